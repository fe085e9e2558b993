//! Exact arithmetic on signed square roots of nonnegative rationals.
//!
//! Every entry of a constructed matrix with rational parameters has the form
//! `±√r` with `r ∈ ℚ, r ≥ 0`, and every inner product of two rows or columns is
//! a finite sum of such values. [`RadicalSum`] keeps those sums grouped by
//! square-free class so that deciding "is this sum zero" is a map lookup.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadicalError {
    #[error("radicand must be nonnegative, got {0}")]
    NegativeRadicand(BigRational),
    #[error("cannot parse radical from {0:?}")]
    Parse(String),
}

/// Sign of a radical. `Zero` is used exactly when the radicand is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn from_i8(s: i8) -> Sign {
        match s.cmp(&0) {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * rhs.as_i8())
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_i8(-self.as_i8())
    }
}

/// Integer square root of `n` if `n` is a perfect square.
fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    if &root * &root == *n {
        Some(root)
    } else {
        None
    }
}

/// Square root of a nonnegative rational, if it is itself rational.
///
/// `BigRational` is always kept in lowest terms, so it is enough to check that
/// numerator and denominator are perfect squares separately.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let num = exact_isqrt(r.numer())?;
    let den = exact_isqrt(r.denom())?;
    Some(BigRational::new(num, den))
}

/// `sign · √radicand`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Radical {
    sign: Sign,
    radicand: BigRational,
}

impl Radical {
    pub fn zero() -> Self {
        Radical {
            sign: Sign::Zero,
            radicand: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Radical::sqrt(BigRational::one())
    }

    /// `+√r`; panics if `r < 0`.
    pub fn sqrt(r: BigRational) -> Self {
        Radical::new(Sign::Pos, r).expect("negative radicand")
    }

    /// Builds `sign·√r`. The stored sign is forced to `Zero` when `r = 0`, and
    /// a `Zero` sign with a nonzero radicand yields the zero radical.
    pub fn new(sign: Sign, radicand: BigRational) -> Result<Self, RadicalError> {
        if radicand.is_negative() {
            return Err(RadicalError::NegativeRadicand(radicand));
        }
        if radicand.is_zero() || sign == Sign::Zero {
            return Ok(Radical::zero());
        }
        Ok(Radical { sign, radicand })
    }

    /// The radical whose value is the rational `x`, i.e. `sign(x)·√(x²)`.
    pub fn from_rational(x: &BigRational) -> Self {
        let sign = if x.is_zero() {
            Sign::Zero
        } else if x.is_negative() {
            Sign::Neg
        } else {
            Sign::Pos
        };
        Radical::new(sign, x * x).expect("square is nonnegative")
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// The square of the value, which is always rational.
    pub fn square(&self) -> BigRational {
        self.radicand.clone()
    }

    /// The value as a rational, when the radicand is a perfect square.
    pub fn to_rational(&self) -> Option<BigRational> {
        let root = rational_sqrt(&self.radicand)?;
        Some(match self.sign {
            Sign::Neg => -root,
            _ => root,
        })
    }

    pub fn to_f64(&self) -> f64 {
        let mag = self.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
        f64::from(self.sign.as_i8()) * mag
    }
}

impl Mul for &Radical {
    type Output = Radical;

    fn mul(self, rhs: &Radical) -> Radical {
        Radical::new(self.sign * rhs.sign, &self.radicand * &rhs.radicand)
            .expect("product of nonnegative radicands")
    }
}

impl Mul for Radical {
    type Output = Radical;

    fn mul(self, rhs: Radical) -> Radical {
        &self * &rhs
    }
}

impl Neg for Radical {
    type Output = Radical;

    fn neg(self) -> Radical {
        Radical {
            sign: -self.sign,
            radicand: self.radicand,
        }
    }
}

/// Product of two radicals: signs multiply and radicands multiply.
pub fn radical_mul(a: &Radical, b: &Radical) -> Radical {
    a * b
}

impl fmt::Display for Radical {
    /// Renders as `0`, `1`, `-1`, `sqrt(p/q)` or `-sqrt(p/q)` with `p/q` in
    /// lowest terms (`sqrt(p)` when the denominator is 1).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self.sign {
            Sign::Zero => "0".to_string(),
            s => {
                let minus = if s == Sign::Neg { "-" } else { "" };
                if self.radicand.is_one() {
                    format!("{minus}1")
                } else {
                    format!("{minus}sqrt({})", self.radicand)
                }
            }
        };
        f.pad(&text)
    }
}

/// Parses `p/q` or an integer. Decimal notation is not accepted.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

impl FromStr for Radical {
    type Err = RadicalError;

    /// Accepts the rendered forms plus plain rationals such as `1/2`, which
    /// denote the rational value itself.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RadicalError::Parse(s.to_string());
        let t = s.trim();
        let (sign, body) = match t.strip_prefix('-') {
            Some(rest) => (Sign::Neg, rest.trim_start()),
            None => (Sign::Pos, t.strip_prefix('+').unwrap_or(t).trim_start()),
        };
        if let Some(inner) = body.strip_prefix("sqrt(").and_then(|b| b.strip_suffix(')')) {
            let r = parse_rational(inner).ok_or_else(err)?;
            return Radical::new(sign, r);
        }
        if body.starts_with('-') || body.starts_with('+') {
            return Err(err());
        }
        let x = parse_rational(body).ok_or_else(err)?;
        let r = Radical::from_rational(&x);
        Ok(if sign == Sign::Neg { -r } else { r })
    }
}

/// A finite sum `Σ c·√r` grouped by square-free class.
///
/// Two radicands share a class when their ratio is the square of a rational;
/// each class is stored once, under the first radicand that introduced it
/// (radicands that are perfect squares are stored under the class of `1`).
/// Square roots from distinct classes are linearly independent over ℚ, so
/// the sum is zero exactly when no class survives.
///
/// Equality compares values: the stored representative of a class depends on
/// insertion order, so two maps with different representatives can still be
/// equal.
#[derive(Debug, Clone, Default)]
pub struct RadicalSum {
    terms: Vec<(BigRational, BigRational)>,
}

impl RadicalSum {
    pub fn new() -> Self {
        RadicalSum::default()
    }

    /// `(representative, coefficient)` pairs in insertion order.
    pub fn terms(&self) -> &[(BigRational, BigRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, t: &Radical) {
        if t.is_zero() {
            return;
        }
        let sign = BigRational::from_integer(BigInt::from(t.sign().as_i8()));
        for idx in 0..self.terms.len() {
            let ratio = t.radicand() / &self.terms[idx].0;
            if let Some(scale) = rational_sqrt(&ratio) {
                self.terms[idx].1 += &sign * scale;
                if self.terms[idx].1.is_zero() {
                    self.terms.remove(idx);
                }
                return;
            }
        }
        match rational_sqrt(t.radicand()) {
            Some(root) => self.terms.push((BigRational::one(), sign * root)),
            None => self.terms.push((t.radicand().clone(), sign)),
        }
    }

    /// The value as a rational, if it lies in the rational class.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(rep, coeff)] => rational_sqrt(rep).map(|root| coeff * root),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(rep, coeff)| {
                coeff.to_f64().unwrap_or(f64::NAN) * rep.to_f64().unwrap_or(f64::NAN).sqrt()
            })
            .sum()
    }
}

impl PartialEq for RadicalSum {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        // c₁√r₁ = c₂√r₂ with both in one class iff signs agree and c₁²r₁ = c₂²r₂.
        self.terms.iter().all(|(r1, c1)| {
            other.terms.iter().any(|(r2, c2)| {
                c1.is_negative() == c2.is_negative() && c1 * c1 * r1 == c2 * c2 * r2
            })
        })
    }
}

impl Eq for RadicalSum {}

impl<'a> Extend<&'a Radical> for RadicalSum {
    fn extend<I: IntoIterator<Item = &'a Radical>>(&mut self, iter: I) {
        for r in iter {
            self.add(r);
        }
    }
}

impl Extend<Radical> for RadicalSum {
    fn extend<I: IntoIterator<Item = Radical>>(&mut self, iter: I) {
        for r in iter {
            self.add(&r);
        }
    }
}

impl FromIterator<Radical> for RadicalSum {
    fn from_iter<I: IntoIterator<Item = Radical>>(iter: I) -> Self {
        let mut s = RadicalSum::new();
        s.extend(iter);
        s
    }
}

/// Returns `s + t` as a new sum.
pub fn sum_add(s: &RadicalSum, t: &Radical) -> RadicalSum {
    let mut out = s.clone();
    out.add(t);
    out
}

pub fn sum_is_zero(s: &RadicalSum) -> bool {
    s.is_zero()
}
