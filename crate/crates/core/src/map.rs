//! Self-maps `T: X → X` that the contraction and solver modules iterate.

use crate::error::{Error, Result};
use crate::integral::IntegralProblem;
use crate::metric::Point;

pub trait SelfMap: Sync {
    fn name(&self) -> String;

    fn apply(&self, x: &Point) -> Result<Point>;
}

impl<T: SelfMap + ?Sized> SelfMap for &T {
    fn name(&self) -> String {
        (**self).name()
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        (**self).apply(x)
    }
}

/// The built-in maps.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    /// `x ↦ x/4`
    LinearQuarter,
    /// `x ↦ x/4` for `x ≥ 0`, `x ↦ 1` for `x < 0`.
    PiecewiseQuarter,
    Identity,
    /// `f ↦ Tf` with the rank-one kernel operator of the integral problem.
    IntegralOp(IntegralProblem),
    /// Finite lookup table; points not listed are outside the domain.
    UserTable(Vec<(f64, f64)>),
}

impl MapSpec {
    fn real(&self, p: &Point) -> Result<f64> {
        match p {
            Point::Real(x) if x.is_finite() => Ok(*x),
            _ => Err(Error::DomainMismatch {
                context: self.name(),
                detail: "expected a finite real point".into(),
            }),
        }
    }
}

impl SelfMap for MapSpec {
    fn name(&self) -> String {
        match self {
            MapSpec::LinearQuarter => "linear-quarter".into(),
            MapSpec::PiecewiseQuarter => "piecewise-quarter".into(),
            MapSpec::Identity => "identity".into(),
            MapSpec::IntegralOp(p) => {
                format!(
                    "integral(alpha={},k={},samples={})",
                    p.alpha,
                    p.k,
                    p.grid.len()
                )
            }
            MapSpec::UserTable(t) => format!("table({} entries)", t.len()),
        }
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            MapSpec::LinearQuarter => Ok(Point::Real(self.real(x)? / 4.0)),
            MapSpec::PiecewiseQuarter => {
                let x = self.real(x)?;
                Ok(Point::Real(if x >= 0.0 { x / 4.0 } else { 1.0 }))
            }
            MapSpec::Identity => Ok(x.clone()),
            MapSpec::IntegralOp(p) => match x {
                Point::Func(f) => Ok(Point::Func(p.apply(f)?)),
                Point::Real(_) => Err(Error::DomainMismatch {
                    context: self.name(),
                    detail: "expected a sampled function".into(),
                }),
            },
            MapSpec::UserTable(table) => {
                let x = self.real(x)?;
                table
                    .iter()
                    .find(|(k, _)| *k == x)
                    .map(|(_, v)| Point::Real(*v))
                    .ok_or_else(|| Error::DomainMismatch {
                        context: self.name(),
                        detail: format!("{x} is not in the table"),
                    })
            }
        }
    }
}

/// A map given by a closure.
pub struct FnMap<F> {
    name: String,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&Point) -> Result<Point> + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self {
            name: name.into(),
            f,
        }
    }
}

impl<F> SelfMap for FnMap<F>
where
    F: Fn(&Point) -> Result<Point> + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        (self.f)(x)
    }
}

/// `seed, T(seed), …, Tⁿ(seed)` (`len + 1` points).
pub fn orbit<T: SelfMap + ?Sized>(map: &T, seed: &Point, len: usize) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(seed.clone());
    for i in 0..len {
        let next = map.apply(&out[i])?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_maps() {
        let r = Point::Real;
        assert_eq!(MapSpec::LinearQuarter.apply(&r(8.0)).unwrap(), r(2.0));
        assert_eq!(MapSpec::PiecewiseQuarter.apply(&r(8.0)).unwrap(), r(2.0));
        assert_eq!(MapSpec::PiecewiseQuarter.apply(&r(-8.0)).unwrap(), r(1.0));
        assert_eq!(MapSpec::Identity.apply(&r(-8.0)).unwrap(), r(-8.0));
        let t = MapSpec::UserTable(vec![(1.0, 0.5), (0.5, 0.5)]);
        assert_eq!(t.apply(&r(1.0)).unwrap(), r(0.5));
        assert!(t.apply(&r(2.0)).is_err());
        assert!(MapSpec::LinearQuarter.apply(&r(f64::NAN)).is_err());
    }

    #[test]
    fn orbit_lists_iterates() {
        let o = orbit(&MapSpec::LinearQuarter, &Point::Real(16.0), 3).unwrap();
        let v: Vec<f64> = o.iter().map(|p| p.as_real().unwrap()).collect();
        assert_eq!(v, vec![16.0, 4.0, 1.0, 0.25]);
    }
}
