//! Fixed-precision decimal reals and the [`Scalar`] abstraction shared with
//! exact rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_base::{Abs, CubicRoot, Sign, SquareRoot};
use dashu_float::DBig;
use dashu_int::IBig;
use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Working precision in significant decimal digits.
pub const DIGITS: usize = 64;

#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real(DBig);

fn pin(x: DBig) -> DBig {
    x.with_precision(DIGITS).value()
}

fn to_ibig(x: &num_bigint::BigInt) -> IBig {
    IBig::from_str(&x.to_string()).expect("decimal integer")
}

impl Real {
    pub fn from_i64(v: i64) -> Self {
        Real(pin(DBig::from(v)))
    }

    pub fn from_rational(q: &Rational) -> Self {
        let n = pin(DBig::from(to_ibig(q.numer())));
        let d = pin(DBig::from(to_ibig(q.denom())));
        Real(n / d)
    }

    pub fn from_f64(v: f64) -> Self {
        Real::from_str(&format!("{v:e}")).expect("finite float")
    }

    pub fn zero() -> Self {
        Real::from_i64(0)
    }

    pub fn one() -> Self {
        Real::from_i64(1)
    }

    /// Square root; `None` for negative input.
    pub fn sqrt(&self) -> Option<Self> {
        if self.0.sign() == Sign::Negative && !self.is_zero() {
            return None;
        }
        Some(Real(pin(self.0.sqrt())))
    }

    /// Real cube root (odd, so defined for negative input).
    pub fn cbrt(&self) -> Self {
        Real(pin(self.0.cbrt()))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0 == DBig::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0.sign() == Sign::Negative && !self.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Decimal text with `digits` significant digits.
    pub fn to_digits(&self, digits: usize) -> String {
        self.0.clone().with_precision(digits).value().to_string()
    }
}

impl FromStr for Real {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DBig::from_str(s.trim())
            .map(|x| Real(pin(x)))
            .map_err(|e| format!("`{s}` is not a real number: {e}"))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*}", p, self.0),
            None => write!(f, "{}", self.0),
        }
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real(pin($tr::$m(self.0, rhs.0)))
            }
        }
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                Real(pin($tr::$m(&self.0, &rhs.0)))
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                Real(pin($tr::$m(self.0, &rhs.0)))
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

/// Field operations needed to build and measure the isomorphism matrices
/// either exactly or in fixed precision.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn is_zero_value(&self) -> bool;
    fn abs_value(&self) -> Self;
    fn to_real(&self) -> Real;

    fn max_of(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        crate::rational::int(v)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_real(&self) -> Real {
        Real::from_rational(self)
    }
}

impl Scalar for Real {
    fn from_i64(v: i64) -> Self {
        Real::from_i64(v)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_real(&self) -> Real {
        self.clone()
    }
}
