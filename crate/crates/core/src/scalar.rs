//! Scalar abstraction shared by the oracle and the estimators.
//!
//! Transition matrices, stationary laws and Horvitz-Thompson ratios are
//! written once over [`Scalar`] and instantiated for `f64`, `f32`, and the
//! exact rational type [`Exact`]. The rational instance only supports
//! integer exponents, which covers SRW, MHRW and IDRW (α = 1) and lets the
//! small fixtures be checked without rounding.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// `degree^(-alpha)`, or `None` when the value is not representable.
    fn inv_degree_pow(degree: usize, alpha: f64) -> Option<Self>;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn abs_diff(self, other: Self) -> Self {
        if self >= other {
            self - other
        } else {
            other - self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn inv_degree_pow(degree: usize, alpha: f64) -> Option<Self> {
        if alpha == 0.0 {
            Some(1.0)
        } else if alpha == 1.0 {
            Some(1.0 / degree as f64)
        } else {
            Some((degree as f64).powf(-alpha))
        }
    }
}

impl Scalar for f32 {
    fn inv_degree_pow(degree: usize, alpha: f64) -> Option<Self> {
        f64::inv_degree_pow(degree, alpha).map(|v| v as f32)
    }
}

impl Scalar for Exact {
    fn inv_degree_pow(degree: usize, alpha: f64) -> Option<Self> {
        if !(alpha >= 0.0 && alpha.fract() == 0.0 && alpha <= 62.0) {
            return None;
        }
        let d = i64::try_from(degree).ok()?;
        let denom = d.checked_pow(alpha as u32)?;
        Some(Ratio::new(1, denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_powers_reject_fractional_alpha() {
        assert_eq!(Exact::inv_degree_pow(4, 1.0), Some(Ratio::new(1, 4)));
        assert_eq!(Exact::inv_degree_pow(3, 2.0), Some(Ratio::new(1, 9)));
        assert_eq!(Exact::inv_degree_pow(3, 0.0), Some(Ratio::new(1, 1)));
        assert_eq!(Exact::inv_degree_pow(3, 0.5), None);
    }

    #[test]
    fn float_powers() {
        assert_eq!(f64::inv_degree_pow(4, 1.0), Some(0.25));
        assert_eq!(f64::inv_degree_pow(4, 0.0), Some(1.0));
        assert!((f64::inv_degree_pow(4, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(f32::inv_degree_pow(2, 1.0), Some(0.5));
    }
}
