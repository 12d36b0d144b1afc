//! Exact positive and nonnegative rationals.
//!
//! Both types hold a reduced `Ratio<BigUint>`, so equality and hashing are
//! structural. Zero only exists as a [`NonnegRational`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

type Q = Ratio<BigUint>;

/// A strictly positive rational in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosRational(Q);

/// A nonnegative rational in lowest terms; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonnegRational(Q);

/// A vector of positive rationals, such as `v` or `u`.
pub type RatVector = Vec<PosRational>;

impl PosRational {
    /// Returns `None` when either part is zero.
    pub fn new(num: BigUint, den: BigUint) -> Option<Self> {
        if num.is_zero() || den.is_zero() {
            None
        } else {
            Some(PosRational(Q::new(num, den)))
        }
    }

    /// # Panics
    /// If `num` or `den` is zero.
    pub fn frac(num: u64, den: u64) -> Self {
        Self::new(num.into(), den.into()).expect("positive numerator and denominator")
    }

    /// # Panics
    /// If `n` is zero.
    pub fn int(n: u64) -> Self {
        Self::frac(n, 1)
    }

    pub fn one() -> Self {
        PosRational(Q::one())
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, if the denominator is 1.
    pub fn to_natural(&self) -> Option<BigUint> {
        self.is_integer().then(|| self.numer().clone())
    }

    /// Small naturals as `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        self.to_natural().and_then(|n| u64::try_from(n).ok())
    }

    /// max(numerator, denominator).
    pub fn height(&self) -> BigUint {
        self.numer().max(self.denom()).clone()
    }

    /// Exponent of 2 in the numerator minus the exponent in the denominator.
    pub fn val2(&self) -> i64 {
        let tz = |n: &BigUint| n.trailing_zeros().unwrap_or(0) as i64;
        tz(self.numer()) - tz(self.denom())
    }

    pub fn recip(&self) -> Self {
        PosRational(self.0.recip())
    }

    /// Integer power; negative exponents give reciprocals.
    pub fn powi(&self, e: i64) -> Self {
        let p = self.0.clone().pow(e.unsigned_abs() as u32);
        if e < 0 {
            PosRational(p.recip())
        } else {
            PosRational(p)
        }
    }

    pub fn to_nonneg(&self) -> NonnegRational {
        NonnegRational(self.0.clone())
    }
}

impl NonnegRational {
    pub fn zero() -> Self {
        NonnegRational(Q::zero())
    }

    pub fn new(num: BigUint, den: BigUint) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(NonnegRational(Q::new(num, den)))
        }
    }

    /// # Panics
    /// If `den` is zero.
    pub fn frac(num: u64, den: u64) -> Self {
        Self::new(num.into(), den.into()).expect("nonzero denominator")
    }

    pub fn int(n: u64) -> Self {
        Self::frac(n, 1)
    }

    pub fn from_natural(n: BigUint) -> Self {
        NonnegRational(Q::from_integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn to_natural(&self) -> Option<BigUint> {
        self.is_integer().then(|| self.numer().clone())
    }

    pub fn to_positive(&self) -> Option<PosRational> {
        (!self.is_zero()).then(|| PosRational(self.0.clone()))
    }
}

/// Entrywise product `q·v`.
pub fn scale(q: &PosRational, v: &[PosRational]) -> RatVector {
    v.iter().map(|x| q * x).collect()
}

/// Product of an iterator of positive rationals; the empty product is 1.
pub fn product<'a>(items: impl IntoIterator<Item = &'a PosRational>) -> PosRational {
    let mut acc = Q::one();
    for x in items {
        acc *= &x.0;
    }
    PosRational(acc)
}

/// Reduced fractions with numerator and denominator at most `max_height`,
/// ordered by height and then by value.
pub fn by_height(max_height: u64) -> Vec<PosRational> {
    let mut out = Vec::new();
    for h in 1..=max_height {
        let mut layer: Vec<PosRational> = (1..=h)
            .filter(|&k| k.gcd(&h) == 1)
            .flat_map(|k| {
                let lo = PosRational::frac(k, h);
                if k == h {
                    vec![lo]
                } else {
                    vec![lo, PosRational::frac(h, k)]
                }
            })
            .collect();
        layer.sort();
        out.extend(layer);
    }
    out
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(items: impl IntoIterator<Item = &'a NonnegRational>) -> BigUint {
    items
        .into_iter()
        .fold(BigUint::one(), |acc, q| acc.lcm(q.denom()))
}

impl<'a> Add<&'a PosRational> for &'a PosRational {
    type Output = PosRational;
    fn add(self, rhs: &PosRational) -> PosRational {
        PosRational(&self.0 + &rhs.0)
    }
}

impl<'a> Add<&'a NonnegRational> for &'a PosRational {
    type Output = PosRational;
    fn add(self, rhs: &NonnegRational) -> PosRational {
        PosRational(&self.0 + &rhs.0)
    }
}

impl<'a> Mul<&'a PosRational> for &'a PosRational {
    type Output = PosRational;
    fn mul(self, rhs: &PosRational) -> PosRational {
        PosRational(&self.0 * &rhs.0)
    }
}

impl<'a> Div<&'a PosRational> for &'a PosRational {
    type Output = PosRational;
    fn div(self, rhs: &PosRational) -> PosRational {
        PosRational(&self.0 / &rhs.0)
    }
}

impl<'a> Add<&'a NonnegRational> for &'a NonnegRational {
    type Output = NonnegRational;
    fn add(self, rhs: &NonnegRational) -> NonnegRational {
        NonnegRational(&self.0 + &rhs.0)
    }
}

impl<'a> Mul<&'a NonnegRational> for &'a NonnegRational {
    type Output = NonnegRational;
    fn mul(self, rhs: &NonnegRational) -> NonnegRational {
        NonnegRational(&self.0 * &rhs.0)
    }
}

impl<'a> Mul<&'a PosRational> for &'a NonnegRational {
    type Output = NonnegRational;
    fn mul(self, rhs: &PosRational) -> NonnegRational {
        NonnegRational(&self.0 * &rhs.0)
    }
}

impl<'a> Div<&'a PosRational> for &'a NonnegRational {
    type Output = NonnegRational;
    fn div(self, rhs: &PosRational) -> NonnegRational {
        NonnegRational(&self.0 / &rhs.0)
    }
}

impl PartialEq<NonnegRational> for PosRational {
    fn eq(&self, other: &NonnegRational) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd<NonnegRational> for PosRational {
    fn partial_cmp(&self, other: &NonnegRational) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl From<PosRational> for NonnegRational {
    fn from(p: PosRational) -> Self {
        NonnegRational(p.0)
    }
}

fn fmt_ratio(q: &Q, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(&self.0, f)
    }
}

impl fmt::Debug for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(&self.0, f)
    }
}

impl fmt::Display for NonnegRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(&self.0, f)
    }
}

impl fmt::Debug for NonnegRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(&self.0, f)
    }
}

fn parse_digits(s: &str, whole: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad rational literal {whole:?}")));
    }
    BigUint::from_str(s).map_err(|e| Error::Parse(format!("{whole:?}: {e}")))
}

fn parse_ratio(s: &str) -> Result<(BigUint, BigUint)> {
    let t = s.trim();
    match t.split_once('/') {
        Some((a, b)) => Ok((parse_digits(a, t)?, parse_digits(b, t)?)),
        None => Ok((parse_digits(t, t)?, BigUint::one())),
    }
}

impl FromStr for PosRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = parse_ratio(s)?;
        PosRational::new(a, b)
            .ok_or_else(|| Error::Parse(format!("{s:?} is not a positive rational")))
    }
}

impl FromStr for NonnegRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = parse_ratio(s)?;
        NonnegRational::new(a, b).ok_or_else(|| Error::Parse(format!("{s:?}: zero denominator")))
    }
}

/// Parses a comma-separated list such as `"1,2,1/2"`.
pub fn parse_vector(s: &str) -> Result<RatVector> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(PosRational::from_str).collect()
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(PosRational);
string_serde!(NonnegRational);
