//! Numeric backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided:
//!
//! * `f64`, the float backend. Comparisons use a caller-supplied relative
//!   tolerance.
//! * [`Surd`], the exact backend. A `Surd` is `c·√r` with `c` and `r`
//!   rational. Rationals are the special case `r = 1`. Cholesky factors of a
//!   rational Hankel matrix have columns of the form `u·√d`, and every table
//!   derived from them (Π, connection and linearization coefficients, kernel
//!   values) is a sum of terms sharing one radicand, so this representation
//!   keeps the whole pipeline exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A real-number backend.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Serialize
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact (no rounding).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn sqrt(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn abs(&self) -> Self {
        if self.is_positive() || self.is_zero() {
            self.clone()
        } else {
            -self.clone()
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    /// Exact equality for exact backends; relative closeness
    /// `|a − b| ≤ tol · max(1, |a|, |b|)` for floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let (a, b) = (self.to_f64(), other.to_f64());
        (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Numeric(format!("square root of negative value {self}")));
        }
        Ok(f64::sqrt(*self))
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Converts a rational to the nearest `f64`, falling back to a log-domain
/// estimate when numerator or denominator overflow.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let ln = big_ln(&r.numer().abs()) - big_ln(r.denom());
    sign * ln.exp()
}

fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = v >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parses a rational from `"p/q"`, an integer, or a plain decimal such as
/// `"-0.125"` or `"2.5e-3"` (converted exactly).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad number `{s}`")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad number `{s}`")));
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all).unwrap_or_default());
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Formats a rational as `"p/q"` (or `"p"` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Exact real of the form `coeff · √radicand`.
///
/// The radicand is kept as a positive integer with small square factors
/// pulled into the coefficient; zero is always stored with radicand 1.
///
/// Addition is only defined between surds whose radicands differ by a
/// rational square factor. Adding incommensurable surds panics: every sum the
/// crate forms is homogeneous, so hitting that case is a logic error.
#[derive(Clone)]
pub struct Surd {
    coeff: BigRational,
    radicand: BigInt,
}

impl Surd {
    pub fn rational(r: BigRational) -> Self {
        Surd {
            coeff: r,
            radicand: BigInt::one(),
        }
    }

    /// `coeff · √radicand` for any rational radicand ≥ 0.
    pub fn new(coeff: BigRational, radicand: BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Numeric("negative radicand".into()));
        }
        if radicand.is_zero() || coeff.is_zero() {
            return Ok(Surd::rational(BigRational::zero()));
        }
        // √(p/q) = √(pq)/q
        let (p, q) = (radicand.numer().clone(), radicand.denom().clone());
        let coeff = coeff / BigRational::from_integer(q.clone());
        Ok(Self::normalized(coeff, p * q))
    }

    fn normalized(mut coeff: BigRational, mut radicand: BigInt) -> Self {
        if coeff.is_zero() {
            return Surd::rational(coeff);
        }
        if radicand.is_one() {
            return Surd { coeff, radicand };
        }
        let root = radicand.sqrt();
        if &root * &root == radicand {
            coeff *= BigRational::from_integer(root);
            return Surd::rational(coeff);
        }
        for &p in SMALL_PRIMES.iter() {
            let sq = BigInt::from(p * p);
            loop {
                let (quot, rem) = radicand.div_rem(&sq);
                if !rem.is_zero() {
                    break;
                }
                radicand = quot;
                coeff *= BigRational::from_integer(BigInt::from(p));
            }
        }
        Surd { coeff, radicand }
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.coeff)
    }

    /// Square of the value, always rational.
    pub fn squared_rational(&self) -> BigRational {
        &self.coeff * &self.coeff * BigRational::from_integer(self.radicand.clone())
    }

    fn sign(&self) -> Sign {
        if self.coeff.is_zero() {
            Sign::NoSign
        } else if self.coeff.is_positive() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// If `self.radicand / other.radicand` is a rational square `t²`, returns `t`.
    fn radicand_ratio_root(&self, other: &Surd) -> Option<BigRational> {
        if self.radicand == other.radicand {
            return Some(BigRational::one());
        }
        let ratio = BigRational::new(self.radicand.clone(), other.radicand.clone());
        let (p, q) = (ratio.numer(), ratio.denom());
        let (rp, rq) = (p.sqrt(), q.sqrt());
        (&rp * &rp == *p && &rq * &rq == *q).then(|| BigRational::new(rp, rq))
    }

    fn add_impl(self, other: Surd) -> Surd {
        if other.coeff.is_zero() {
            return self;
        }
        if self.coeff.is_zero() {
            return other;
        }
        match self.radicand_ratio_root(&other) {
            Some(t) => {
                let coeff = self.coeff * t + other.coeff;
                Surd::normalized(coeff, other.radicand)
            }
            None => panic!("incommensurable surds: {self} + {other}"),
        }
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({self})")
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", format_rational(&self.coeff))
        } else if self.coeff.is_one() {
            write!(f, "sqrt({})", self.radicand)
        } else if (-self.coeff.clone()).is_one() {
            write!(f, "-sqrt({})", self.radicand)
        } else {
            write!(f, "{}*sqrt({})", format_rational(&self.coeff), self.radicand)
        }
    }
}

impl FromStr for Surd {
    type Err = Error;

    /// Accepts `"p/q"`, `"sqrt(r)"`, `"-sqrt(r)"` and `"c*sqrt(r)"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(pos) = s.find("sqrt(") else {
            return Ok(Surd::rational(parse_rational(s)?));
        };
        let inner = s[pos + 5..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unbalanced sqrt in `{s}`")))?;
        let radicand = parse_rational(inner)?;
        let prefix = s[..pos].trim();
        let coeff = match prefix {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            _ => {
                let c = prefix
                    .strip_suffix('*')
                    .ok_or_else(|| Error::Parse(format!("expected `*` before sqrt in `{s}`")))?;
                parse_rational(c)?
            }
        };
        Surd::new(coeff, radicand)
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.sign() == other.sign() && self.squared_rational() == other.squared_rational()
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b) = (self.sign(), other.sign());
        if a != b {
            return Some(sign_rank(a).cmp(&sign_rank(b)));
        }
        let mag = self.squared_rational().cmp(&other.squared_rational());
        Some(if a == Sign::Minus { mag.reverse() } else { mag })
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl Serialize for Surd {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        self.add_impl(rhs)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self.add_impl(-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            coeff: -self.coeff,
            radicand: self.radicand,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        if self.coeff.is_zero() || rhs.coeff.is_zero() {
            return Surd::rational(BigRational::zero());
        }
        let coeff = self.coeff * rhs.coeff;
        if self.radicand == rhs.radicand {
            return Surd::rational(coeff * BigRational::from_integer(self.radicand));
        }
        Surd::normalized(coeff, self.radicand * rhs.radicand)
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        assert!(!rhs.coeff.is_zero(), "division by zero surd");
        if self.radicand == rhs.radicand {
            return Surd::rational(self.coeff / rhs.coeff);
        }
        // c1√r1 / (c2√r2) = c1/(c2 r2) · √(r1 r2)
        let coeff = self.coeff / (rhs.coeff * BigRational::from_integer(rhs.radicand.clone()));
        Surd::normalized(coeff, self.radicand * rhs.radicand)
    }
}

impl Scalar for Surd {
    const EXACT: bool = true;

    fn zero() -> Self {
        Surd::rational(BigRational::zero())
    }
    fn one() -> Self {
        Surd::rational(BigRational::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        Surd::rational(r.clone())
    }
    fn sqrt(&self) -> Result<Self> {
        if !self.is_rational() {
            return Err(Error::Numeric(format!("square root of irrational surd {self}")));
        }
        if self.coeff.is_negative() {
            return Err(Error::Numeric(format!("square root of negative value {self}")));
        }
        Surd::new(BigRational::one(), self.coeff.clone())
    }
    fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }
    fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }
    fn to_f64(&self) -> f64 {
        let c = rational_to_f64(&self.coeff);
        if self.radicand.is_one() {
            c
        } else {
            c * rational_to_f64(&BigRational::from_integer(self.radicand.clone())).sqrt()
        }
    }
}

/// Shorthand for building a rational from a numerator and denominator.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Surd {
        text.parse().unwrap()
    }

    #[test]
    fn sqrt_of_rational_normalizes() {
        let r = Surd::rational(ratio(1, 2)).sqrt().unwrap();
        assert_eq!(r.to_string(), "1/2*sqrt(2)");
        assert_eq!(Surd::rational(ratio(9, 4)).sqrt().unwrap(), s("3/2"));
        assert_eq!(Surd::rational(ratio(12, 1)).sqrt().unwrap().to_string(), "2*sqrt(3)");
    }

    #[test]
    fn products_fold_back_to_rationals() {
        let a = s("sqrt(2)");
        assert_eq!(a.clone() * a.clone(), s("2"));
        assert_eq!(s("sqrt(6)") / s("sqrt(3)"), s("sqrt(2)"));
        assert_eq!(s("sqrt(3)") * s("sqrt(12)"), s("6"));
    }

    #[test]
    fn commensurable_sums() {
        assert_eq!(s("sqrt(2)") + s("sqrt(8)"), s("3*sqrt(2)"));
        assert_eq!(s("sqrt(2)") - s("sqrt(2)"), Surd::zero());
        assert_eq!(s("1/2*sqrt(2)") + Surd::zero(), s("sqrt(1/2)"));
    }

    #[test]
    #[should_panic(expected = "incommensurable")]
    fn incommensurable_sum_panics() {
        let _ = s("sqrt(2)") + s("sqrt(3)");
    }

    #[test]
    fn ordering_and_sign() {
        assert!(s("sqrt(2)") > s("1"));
        assert!(s("-sqrt(2)") < s("-1"));
        assert!(s("-1") < s("0"));
        assert_eq!(s("-sqrt(2)").abs(), s("sqrt(2)"));
    }

    #[test]
    fn parse_decimal_exactly() {
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(1.0e6f64.approx_eq(&(1.0e6 + 1.0e-5), 1e-10));
        assert!(!1.0f64.approx_eq(&1.001, 1e-10));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(10).pow(400), BigInt::from(3) * BigInt::from(10).pow(399));
        assert!((rational_to_f64(&big) - 10.0 / 3.0).abs() < 1e-12);
    }
}
