//! Scalar abstraction and coefficient types.
//!
//! Propagation runs over any floating-point scalar (`f32` or `f64`) through
//! the [`Real`] trait. Coefficients come in two flavors behind the [`Coeff`]
//! trait: a plain scalar, and [`PathCoeff`] which additionally tracks how a
//! term's representative path branched (cosine count, sine count, cumulative
//! path weight) so that frequency, sine, and path-weight truncations can act.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Floating-point scalar usable for coefficients.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }

    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Branch counters carried by a tracked coefficient.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub struct PathCounters {
    pub ncos: u32,
    pub nsin: u32,
    pub pathweight: u32,
}

/// Coefficient attached to a Pauli word during propagation.
///
/// The plain-scalar implementation ignores all counter operations; the
/// tracked implementation maintains them. `TRACKED` lets the engine reject
/// counter-based truncation thresholds on plain runs.
pub trait Coeff<T: Real>: Copy + Debug + PartialEq + Send + Sync + 'static {
    const TRACKED: bool;

    fn from_value(v: T) -> Self;
    fn value(&self) -> T;

    /// Multiply the value without touching counters (Clifford signs, noise
    /// damping, projector halves, transfer-map entries).
    fn scale(&self, factor: T) -> Self;

    /// Cosine branch of a non-commuting rotation.
    fn cos_branch(&self, cos_theta: T) -> Self;

    /// Sine branch of a non-commuting rotation.
    fn sin_branch(&self, signed_sin_theta: T) -> Self;

    /// Combine with a coefficient already stored under the same word.
    fn merge(&self, other: &Self) -> Self;

    /// Add the current Pauli weight of the word to the path-weight counter.
    fn accrue_pathweight(&self, weight: u32) -> Self;

    fn counters(&self) -> Option<PathCounters>;
}

impl<T: Real> Coeff<T> for T {
    const TRACKED: bool = false;

    #[inline]
    fn from_value(v: T) -> Self {
        v
    }

    #[inline]
    fn value(&self) -> T {
        *self
    }

    #[inline]
    fn scale(&self, factor: T) -> Self {
        *self * factor
    }

    #[inline]
    fn cos_branch(&self, cos_theta: T) -> Self {
        *self * cos_theta
    }

    #[inline]
    fn sin_branch(&self, signed_sin_theta: T) -> Self {
        *self * signed_sin_theta
    }

    #[inline]
    fn merge(&self, other: &Self) -> Self {
        *self + *other
    }

    #[inline]
    fn accrue_pathweight(&self, _weight: u32) -> Self {
        *self
    }

    #[inline]
    fn counters(&self) -> Option<PathCounters> {
        None
    }
}

/// Coefficient that remembers branch statistics of its path.
#[derive(Copy, Clone, PartialEq, Debug)]
pub struct PathCoeff<T: Real> {
    pub value: T,
    pub counters: PathCounters,
}

impl<T: Real> Coeff<T> for PathCoeff<T> {
    const TRACKED: bool = true;

    #[inline]
    fn from_value(v: T) -> Self {
        PathCoeff {
            value: v,
            counters: PathCounters::default(),
        }
    }

    #[inline]
    fn value(&self) -> T {
        self.value
    }

    #[inline]
    fn scale(&self, factor: T) -> Self {
        PathCoeff {
            value: self.value * factor,
            counters: self.counters,
        }
    }

    #[inline]
    fn cos_branch(&self, cos_theta: T) -> Self {
        PathCoeff {
            value: self.value * cos_theta,
            counters: PathCounters {
                ncos: self.counters.ncos + 1,
                ..self.counters
            },
        }
    }

    #[inline]
    fn sin_branch(&self, signed_sin_theta: T) -> Self {
        PathCoeff {
            value: self.value * signed_sin_theta,
            counters: PathCounters {
                nsin: self.counters.nsin + 1,
                ..self.counters
            },
        }
    }

    /// Values add. Counters take the elementwise minimum of the two paths, a
    /// parameter-independent rule: which contributor dominates numerically
    /// depends on the angles, and the surrogate compiler must reach the same
    /// truncation decisions without knowing them.
    #[inline]
    fn merge(&self, other: &Self) -> Self {
        PathCoeff {
            value: self.value + other.value,
            counters: PathCounters {
                ncos: self.counters.ncos.min(other.counters.ncos),
                nsin: self.counters.nsin.min(other.counters.nsin),
                pathweight: self.counters.pathweight.min(other.counters.pathweight),
            },
        }
    }

    #[inline]
    fn accrue_pathweight(&self, weight: u32) -> Self {
        PathCoeff {
            value: self.value,
            counters: PathCounters {
                pathweight: self.counters.pathweight + weight,
                ..self.counters
            },
        }
    }

    #[inline]
    fn counters(&self) -> Option<PathCounters> {
        Some(self.counters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_scalar_ignores_counters() {
        let c: f64 = 0.5;
        assert_eq!(c.cos_branch(0.8), 0.4);
        assert_eq!(c.accrue_pathweight(3), 0.5);
        assert!(c.counters().is_none());
    }

    #[test]
    fn tracked_branches_count() {
        let c = PathCoeff::<f64>::from_value(1.0);
        let cos = c.cos_branch(0.5);
        let sin = cos.sin_branch(0.25);
        let ctr = sin.counters().unwrap();
        assert_eq!((ctr.ncos, ctr.nsin), (1, 1));
        assert_eq!(sin.value(), 0.125);
        assert_eq!(sin.accrue_pathweight(4).counters().unwrap().pathweight, 4);
    }

    #[test]
    fn merge_takes_min_counters() {
        let a = PathCoeff {
            value: 0.3f64,
            counters: PathCounters {
                ncos: 2,
                nsin: 0,
                pathweight: 5,
            },
        };
        let b = PathCoeff {
            value: 0.1,
            counters: PathCounters {
                ncos: 1,
                nsin: 3,
                pathweight: 7,
            },
        };
        let m = a.merge(&b);
        assert!((m.value - 0.4).abs() < 1e-15);
        assert_eq!(m.counters, PathCounters { ncos: 1, nsin: 0, pathweight: 5 });
    }
}
