//! Exact angles in Q/Z and their orbits under the antiholomorphic angle map
//! `t -> -d t (mod 1)`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AngleError {
    #[error("malformed angle {0:?}: expected \"p/q\" or \"0\"")]
    Malformed(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("degree must be at least 2, got {0}")]
    BadDegree(u32),
}

/// A rational angle `num/den` in `[0, 1)`, always stored reduced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle {
    num: BigUint,
    den: BigUint,
}

impl Angle {
    /// Builds `num/den` reduced mod 1 and to lowest terms.
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<Self, AngleError> {
        let den = den.into();
        if den.is_zero() {
            return Err(AngleError::ZeroDenominator);
        }
        Ok(Self::reduced(num.into() % &den, den))
    }

    /// Signed numerator, reduced mod 1.
    pub fn from_signed(num: impl Into<BigInt>, den: impl Into<BigUint>) -> Result<Self, AngleError> {
        let den: BigUint = den.into();
        if den.is_zero() {
            return Err(AngleError::ZeroDenominator);
        }
        let d = BigInt::from(den.clone());
        let n = num.into().mod_floor(&d);
        Ok(Self::reduced(n.to_biguint().expect("mod_floor is non-negative"), den))
    }

    pub fn zero() -> Self {
        Self {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    fn reduced(num: BigUint, den: BigUint) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        Self {
            num: num / &g,
            den: den / g,
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        // Ratio of the leading bits keeps precision for huge denominators.
        let bits = self.den.bits();
        if bits <= 1000 {
            self.num.to_f64().unwrap_or(0.0) / self.den.to_f64().unwrap_or(1.0)
        } else {
            let shift = bits - 64;
            let n = (&self.num >> shift).to_f64().unwrap_or(0.0);
            let d = (&self.den >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }

    /// `(self + other) mod 1`.
    pub fn add(&self, other: &Angle) -> Angle {
        let den = &self.den * &other.den;
        let num = &self.num * &other.den + &other.num * &self.den;
        Self::reduced(num % &den, den)
    }

    /// `(self - other) mod 1`.
    pub fn sub(&self, other: &Angle) -> Angle {
        let den = &self.den * &other.den;
        let a = &self.num * &other.den;
        let b = &other.num * &self.den;
        let num = if a >= b { a - b } else { &den - (b - a) };
        Self::reduced(num % &den, den)
    }

    /// `(k * self) mod 1` for a signed integer `k`.
    pub fn scale(&self, k: &BigInt) -> Angle {
        let n = BigInt::from(self.num.clone()) * k;
        Self::from_signed(n, self.den.clone()).expect("denominator is positive")
    }

    /// `1 - self`, the angle of the complex-conjugate ray.
    pub fn conjugate(&self) -> Angle {
        Angle::zero().sub(self)
    }

    /// Counterclockwise length of the arc from `self` to `other`, as an angle in `[0, 1)`.
    pub fn arc_length_to(&self, other: &Angle) -> Angle {
        other.sub(self)
    }

    /// Whether `x` lies on the open counterclockwise arc from `a` to `b`.
    ///
    /// When `a == b` the arc is the whole circle minus `a`.
    pub fn in_open_arc(a: &Angle, b: &Angle, x: &Angle) -> bool {
        if x == a || x == b {
            return false;
        }
        if a == b {
            return true;
        }
        x.sub(a) < b.sub(a)
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = AngleError;

    /// Accepts only `p/q` with ASCII digits, or a bare `0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AngleError::Malformed(s.to_string());
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        if s == "0" {
            return Ok(Angle::zero());
        }
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        if !digits(p) || !digits(q) {
            return Err(bad());
        }
        let p: BigUint = p.parse().map_err(|_| bad())?;
        let q: BigUint = q.parse().map_err(|_| bad())?;
        Angle::new(p, q)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_degree(d: u32) -> Result<(), AngleError> {
    if d < 2 {
        Err(AngleError::BadDegree(d))
    } else {
        Ok(())
    }
}

/// `(-d t) mod 1`.
pub fn angle_map(t: &Angle, d: u32) -> Angle {
    debug_assert!(d >= 2);
    let dn = (&t.num * d) % &t.den;
    let num = if dn.is_zero() { dn } else { &t.den - dn };
    Angle::reduced(num, t.den.clone())
}

/// `(-d)^n t mod 1`.
pub fn angle_map_iter(t: &Angle, d: u32, n: u32) -> Angle {
    let k = BigInt::from(-(d as i64)).pow(n);
    t.scale(&k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleOrbitInfo {
    pub preperiod: usize,
    pub period: usize,
    /// The periodic cycle, starting at the first periodic point of the orbit.
    pub cycle: Vec<Angle>,
}

/// Exact preperiod and minimal period of `t` under the angle map.
pub fn orbit_info(t: &Angle, d: u32) -> Result<AngleOrbitInfo, AngleError> {
    check_degree(d)?;
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut orbit = Vec::new();
    let mut cur = t.clone();
    loop {
        if let Some(&first) = seen.get(&cur) {
            return Ok(AngleOrbitInfo {
                preperiod: first,
                period: orbit.len() - first,
                cycle: orbit[first..].to_vec(),
            });
        }
        seen.insert(cur.clone(), orbit.len());
        let next = angle_map(&cur, d);
        orbit.push(cur);
        cur = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum PeriodType {
    Fixed,
    Odd { k: usize },
    TwiceOdd { k: usize },
    FourFold { k: usize },
    Preperiodic { preperiod: usize, period: usize },
}

impl PeriodType {
    pub fn from_orbit(preperiod: usize, period: usize) -> Self {
        if preperiod > 0 {
            PeriodType::Preperiodic { preperiod, period }
        } else if period == 1 {
            PeriodType::Fixed
        } else if period % 2 == 1 {
            PeriodType::Odd { k: period }
        } else if period % 4 == 2 {
            PeriodType::TwiceOdd { k: period / 2 }
        } else {
            PeriodType::FourFold { k: period / 4 }
        }
    }
}

pub fn period_type(t: &Angle, d: u32) -> Result<PeriodType, AngleError> {
    let info = orbit_info(t, d)?;
    Ok(PeriodType::from_orbit(info.preperiod, info.period))
}

/// Number of angles whose orbit is periodic with period dividing `n`: `|(-d)^n - 1|`.
pub fn count_periodic_points(n: u32, d: u32) -> BigUint {
    let v: BigInt = BigInt::from(-(d as i64)).pow(n) - 1;
    v.abs().to_biguint().expect("absolute value")
}

fn mobius(mut n: u32) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Number of angles of exact period `n` under the angle map (Möbius inversion).
pub fn count_periodic_angles(n: u32, d: u32) -> Result<BigUint, AngleError> {
    check_degree(d)?;
    assert!(n >= 1, "period must be positive");
    let mut total = BigInt::zero();
    for m in 1..=n {
        if n % m == 0 {
            let mu = mobius(n / m);
            if mu != 0 {
                total += BigInt::from(mu) * BigInt::from(count_periodic_points(m, d));
            }
        }
    }
    Ok(total.to_biguint().expect("exact-period counts are non-negative"))
}

/// The `d + 1` fixed angles `j/(d+1)`.
pub fn fixed_angles(d: u32) -> Vec<Angle> {
    (0..=d).map(|j| Angle::new(j, d + 1).expect("positive denominator")).collect()
}
