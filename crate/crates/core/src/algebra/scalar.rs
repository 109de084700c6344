//! Exact Gaussian rationals `a + b·i` with `a, b ∈ Q`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PnfError;

/// An element of `Q(i)`. All arithmetic is exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(v: i64) -> Self {
        Scalar { re: BigRational::from_integer(BigInt::from(v)), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn complex(re: (i64, i64), im: (i64, i64)) -> Self {
        Scalar {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -&self.im }
    }

    /// `|z|² = re² + im²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn abs_f64(&self) -> f64 {
        self.norm_sqr().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Canonical rational rendering of the real part ("a" or "a/b").
    pub fn re_string(&self) -> String {
        self.re.to_string()
    }

    pub fn im_string(&self) -> String {
        self.im.to_string()
    }

    /// Builds a scalar from separate rational strings for the real and imaginary parts.
    pub fn from_parts(re: &str, im: &str) -> Result<Self, PnfError> {
        Ok(Scalar { re: parse_rational(re)?, im: parse_rational(im)? })
    }
}

/// Parses `"a"`, `"-a/b"` (no spaces required, surrounding whitespace ignored).
pub fn parse_rational(s: &str) -> Result<BigRational, PnfError> {
    let s = s.trim();
    let bad = || PnfError::Parse(format!("invalid rational literal {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(PnfError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

impl FromStr for Scalar {
    type Err = PnfError;

    /// Accepts `"a/b"`, `"a/b+c/di"`, `"a/b-c/d*i"`, `"i"`, `"-2i"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(PnfError::Parse("empty scalar literal".into()));
        }
        if !t.ends_with('i') {
            return Ok(Scalar::from_rational(parse_rational(&t)?));
        }
        let body = t.trim_end_matches('i').trim_end_matches('*');
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other.trim_start_matches('+'),
        };
        Ok(Scalar { re: parse_rational(re)?, im: parse_rational(im)? })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -&self.im)
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar { re: &self.re * &o.re, im: BigRational::zero() };
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero, like the integer types.
    fn div(self, o: &Scalar) -> Scalar {
        let inv = o.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, im: -&self.im }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
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
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations_are_exact() {
        let a = Scalar::complex((1, 2), (1, 3));
        let b = Scalar::complex((-2, 5), (7, 1));
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(Scalar::i().pow(2), Scalar::from_int(-1));
    }

    #[test]
    fn squared_modulus() {
        let z = Scalar::complex((3, 1), (-4, 1));
        assert_eq!(z.norm_sqr(), BigRational::from_integer(25.into()));
        assert!((z.abs_f64() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        for s in ["3", "-1/2", "1/2+3i", "2-1/3i", "i", "-i", "5i"] {
            let z: Scalar = s.parse().unwrap();
            let back: Scalar = z.to_string().parse().unwrap();
            assert_eq!(z, back, "{s}");
        }
        assert_eq!("1/2+3i".parse::<Scalar>().unwrap(), Scalar::complex((1, 2), (3, 1)));
        assert_eq!("-i".parse::<Scalar>().unwrap(), Scalar::complex((0, 1), (-1, 1)));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Scalar::zero().inv().is_none());
    }
}
