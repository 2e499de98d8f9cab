//! Exact rationals, negative continued fractions and lens-space normal forms.
//!
//! Continued fractions use the minus convention
//! `[a1, a2, ..., ak] = a1 - 1/(a2 - 1/(... - 1/ak))`, and `L(p, q)` always
//! denotes the result of `-p/q` surgery on the unknot.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("continued fraction {0} divides by zero during evaluation")]
    DegenerateFraction(ContinuedFraction),
    #[error("invalid fraction p={p}, q={q}: need p > q >= 1 and gcd(p, q) = 1")]
    InvalidFraction { p: i64, q: i64 },
    #[error("empty continued fraction")]
    EmptyFraction,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value {0} does not fit in a machine integer")]
    Overflow(String),
}

/// Coefficient list of a negative continued fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContinuedFraction(pub Vec<i64>);

impl ContinuedFraction {
    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every coefficient is at most -2 (the canonical expansion).
    pub fn is_canonical(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|&a| a <= -2)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Evaluates `a1 - 1/(a2 - 1/(... - 1/ak))` exactly.
pub fn cf_eval(cf: &ContinuedFraction) -> Result<Rational, NumberError> {
    let mut iter = cf.0.iter().rev();
    let last = iter.next().ok_or(NumberError::EmptyFraction)?;
    let mut value = rat(*last);
    for &a in iter {
        if value.is_zero() {
            return Err(NumberError::DegenerateFraction(cf.clone()));
        }
        value = rat(a) - value.recip();
    }
    Ok(value)
}

/// Canonical expansion of `-p/q` with every coefficient `<= -2`.
pub fn cf_expand(p: i64, q: i64) -> Result<ContinuedFraction, NumberError> {
    if !(q >= 1 && p > q && p.gcd(&q) == 1) {
        return Err(NumberError::InvalidFraction { p, q });
    }
    let (mut p, mut q) = (p, q);
    let mut coefficients = Vec::new();
    loop {
        let ceil = Integer::div_ceil(&p, &q);
        coefficients.push(-ceil);
        let deficit = ceil * q - p;
        if deficit == 0 {
            break;
        }
        // -p/q = -ceil - 1/x with x = -q/deficit.
        p = q;
        q = deficit;
    }
    Ok(ContinuedFraction(coefficients))
}

/// Framing string of the chain `C_n`: `[-n-2, -2, ..., -2]` with `n-2` twos.
pub fn cn_fraction(n: i64) -> Result<ContinuedFraction, NumberError> {
    if n < 2 {
        return Err(NumberError::InvalidParameter(format!("C_n needs n >= 2, got {n}")));
    }
    let mut coefficients = vec![-n - 2];
    coefficients.extend(std::iter::repeat_n(-2, (n - 2) as usize));
    Ok(ContinuedFraction(coefficients))
}

/// Lens space `L(p, q)` in reduced residue form. `L(1, 0)` is `S^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LensSpace {
    p: i64,
    q: i64,
}

impl LensSpace {
    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn sphere() -> Self {
        LensSpace { p: 1, q: 0 }
    }

    /// Orientation reversal `L(p, p - q)`. Never applied implicitly.
    pub fn mirror(&self) -> Self {
        if self.p == 1 {
            return *self;
        }
        LensSpace { p: self.p, q: self.p - self.q }
    }

    /// The lens space bounding a chain whose continued fraction evaluates to
    /// `value`, i.e. `value = -p/q`.
    pub fn from_surgery_coefficient(value: &Rational) -> Result<Self, NumberError> {
        if value.is_zero() {
            return Err(NumberError::InvalidParameter(
                "surgery coefficient 0 gives S^1 x S^2, not a lens space".into(),
            ));
        }
        let p = to_i64(&-value.numer())?;
        let q = to_i64(value.denom())?;
        lens_normalize(p, q)
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.p, self.q)
    }
}

impl std::str::FromStr for LensSpace {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumberError::InvalidParameter(format!("cannot read lens space `{s}`"));
        let inner = s.trim().strip_prefix("L(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (p, q) = inner.split_once(',').ok_or_else(bad)?;
        let p = p.trim().parse::<i64>().map_err(|_| bad())?;
        let q = q.trim().parse::<i64>().map_err(|_| bad())?;
        lens_normalize(p, q)
    }
}

impl Serialize for LensSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LensSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn lens_normalize(p: i64, q: i64) -> Result<LensSpace, NumberError> {
    if p == 0 {
        return Err(NumberError::InvalidParameter("lens space with p = 0".into()));
    }
    if p.gcd(&q) != 1 {
        return Err(NumberError::InvalidParameter(format!("gcd({p}, {q}) != 1")));
    }
    let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
    Ok(LensSpace { p, q: q.rem_euclid(p) })
}

/// Orientation-preserving homeomorphism test.
pub fn lens_equal(a: &LensSpace, b: &LensSpace) -> bool {
    if a.p != b.p {
        return false;
    }
    let p = a.p as i128;
    a.q == b.q || (a.q as i128 * b.q as i128).rem_euclid(p) == 1 % p
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let egcd = a.rem_euclid(m).extended_gcd(&m);
    (egcd.gcd == 1).then(|| egcd.x.rem_euclid(m))
}

pub(crate) fn to_i64(value: &BigInt) -> Result<i64, NumberError> {
    value.to_i64().ok_or_else(|| NumberError::Overflow(value.to_string()))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `p` or `p/q` (signed decimal).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    let value = Rational::new(num, den.abs());
    Some(if den.is_negative() { -value } else { value })
}
