//! Exact arithmetic in the quadratic field Q(sqrt 3).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational `{0}`")]
    Malformed(String),
}

/// `rat + root3 * sqrt(3)` with both parts rational.
///
/// `BigRational` keeps both parts reduced with a positive denominator, so the
/// derived `Eq`/`Hash` are structural and exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    rat: BigRational,
    root3: BigRational,
}

pub const SQRT3_F64: f64 = 1.732_050_807_568_877_2;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn new(rat: BigRational, root3: BigRational) -> Self {
        Scalar { rat, root3 }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn int(n: i64) -> Self {
        Scalar::new(ratio(n, 1), BigRational::zero())
    }

    /// `n / d`; panics when `d == 0`, use [`Scalar::try_frac`] for untrusted input.
    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::new(ratio(n, d), BigRational::zero())
    }

    pub fn try_frac(n: i64, d: i64) -> Result<Self, ScalarError> {
        if d == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::frac(n, d))
    }

    pub fn sqrt3() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    /// `a + b sqrt 3` with both parts given as small fractions.
    pub fn quad(a: (i64, i64), b: (i64, i64)) -> Self {
        Scalar::new(ratio(a.0, a.1), ratio(b.0, b.1))
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn root3_part(&self) -> &BigRational {
        &self.root3
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.root3.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.root3.is_zero()
    }

    /// Exact sign, decided by comparing `a^2` against `3 b^2`.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.root3.cmp(&BigRational::zero());
        match (a, b) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (sa, sb) if sa == sb => sa,
            (sa, sb) => {
                let a2 = &self.rat * &self.rat;
                let b2 = &self.root3 * &self.root3 * ratio(3, 1);
                if a2 > b2 {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Field conjugate `a - b sqrt 3`.
    pub fn conjugate(&self) -> Scalar {
        Scalar::new(self.rat.clone(), -&self.root3)
    }

    /// Rational norm `a^2 - 3 b^2`.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - &self.root3 * &self.root3 * ratio(3, 1)
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Scalar::new(&self.rat / &n, -&self.root3 / &n))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &other.recip()?)
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    /// Square root inside the field, when it exists.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        let three = ratio(3, 1);
        if self.root3.is_zero() {
            if let Some(a) = rat_sqrt(&self.rat) {
                return Some(Scalar::new(a, BigRational::zero()));
            }
            return rat_sqrt(&(&self.rat / &three)).map(|b| Scalar::new(BigRational::zero(), b));
        }
        // (a + b r3)^2 = x + y r3  gives  a^2 = (x +- sqrt(x^2 - 3 y^2)) / 2
        let (x, y) = (&self.rat, &self.root3);
        let d = rat_sqrt(&(x * x - &three * y * y))?;
        for a2 in [(x + &d) / ratio(2, 1), (x - &d) / ratio(2, 1)] {
            if let Some(a) = rat_sqrt(&a2).filter(|a| !a.is_zero()) {
                let b = y / (ratio(2, 1) * &a);
                let r = Scalar::new(a, b);
                let r = if r.is_negative() { -&r } else { r };
                if r.square() == *self {
                    return Some(r);
                }
            }
        }
        None
    }

    pub fn half(&self) -> Scalar {
        Scalar::new(&self.rat / ratio(2, 1), &self.root3 / ratio(2, 1))
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar::new(&self.rat * q, &self.root3 * q)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        let b = self.root3.to_f64().unwrap_or(f64::NAN);
        a + b * SQRT3_F64
    }

    /// Enclosure of the value, widened to cover rounding in `to_f64`.
    pub fn interval(&self) -> (f64, f64) {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        let b = self.root3.to_f64().unwrap_or(f64::NAN);
        let v = a + b * SQRT3_F64;
        let err = (a.abs() + 2.0 * b.abs() * SQRT3_F64) * 4.0 * f64::EPSILON + f64::MIN_POSITIVE;
        (v - err, v + err)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root3.is_zero() {
            write!(f, "{}", self.rat)
        } else if self.rat.is_zero() {
            write!(f, "{}*r3", self.root3)
        } else if self.root3.is_negative() {
            write!(f, "{}-{}*r3", self.rat, -&self.root3)
        } else {
            write!(f, "{}+{}*r3", self.rat, self.root3)
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::new(q, BigRational::zero())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.rat + &o.rat, &self.root3 + &o.root3)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.rat - &o.rat, &self.root3 - &o.root3)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let three = ratio(3, 1);
        Scalar::new(
            &self.rat * &o.rat + &self.root3 * &o.root3 * three,
            &self.rat * &o.root3 + &self.root3 * &o.rat,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-&self.rat, -&self.root3)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn rat_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// Parses `"n"` or `"n/d"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::Malformed(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let a = Scalar::quad((1, 1), (1, 1));
        let b = Scalar::quad((1, 1), (-1, 1));
        assert_eq!(&a * &b, Scalar::int(-2));
    }

    #[test]
    fn sign_of_two_minus_root3() {
        let x = Scalar::quad((2, 1), (-1, 1));
        assert!(x.is_positive());
        assert!(Scalar::quad((-2, 1), (1, 1)).is_negative());
        assert!(Scalar::quad((1, 1), (-1, 1)).is_negative());
    }

    #[test]
    fn inverse_of_root3() {
        let r = Scalar::sqrt3().recip().unwrap();
        assert_eq!(r, Scalar::quad((0, 1), (1, 3)));
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Scalar::zero().recip(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(Scalar::frac(9, 4).sqrt_exact(), Some(Scalar::frac(3, 2)));
        assert_eq!(Scalar::int(3).sqrt_exact(), Some(Scalar::sqrt3()));
        assert_eq!(Scalar::int(2).sqrt_exact(), None);
        // (2 - r3)^2 = 7 - 4 r3
        assert_eq!(Scalar::quad((7, 1), (-4, 1)).sqrt_exact(), Some(Scalar::quad((2, 1), (-1, 1))));
        assert_eq!(Scalar::int(-1).sqrt_exact(), None);
    }
}
