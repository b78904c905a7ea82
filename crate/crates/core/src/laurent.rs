//! Exact integer Laurent polynomials in `q`, Laurent series truncated at an
//! explicit cutoff, and quantum integers.
//!
//! Every matrix in this crate has entries of one of these two kinds. Coefficients
//! are arbitrary-precision integers, so no identity check is ever approximate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("truncated series have different cutoffs ({left} vs {right})")]
    CutoffMismatch { left: i64, right: i64 },
}

/// A finite sum `Σ c_k q^k` with integer coefficients and integer exponents.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

fn insert_term(terms: &mut BTreeMap<i64, BigInt>, exp: i64, coef: BigInt) {
    if coef.is_zero() {
        return;
    }
    match terms.entry(exp) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coef);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += coef;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `coef · q^exp`.
    pub fn monomial(coef: impl Into<BigInt>, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        insert_term(&mut terms, exp, coef.into());
        LaurentPoly { terms }
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(1, exp)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            insert_term(&mut out, e, c.into());
        }
        LaurentPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// The substitution `q ↦ -q`.
    pub fn substitute_neg_q(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e.rem_euclid(2) == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// The substitution `q ↦ q^{-1}`.
    pub fn substitute_inverse_q(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Reduces modulo `q^{cutoff+1}`.
    pub fn truncate(&self, cutoff: i64) -> TruncSeries {
        TruncSeries {
            cutoff,
            terms: self.terms.range(..=cutoff).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &BTreeMap<i64, BigInt>) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        let unit = mag.is_one();
        match *e {
            0 => write!(f, "{mag}")?,
            1 if unit => write!(f, "q")?,
            1 => write!(f, "{mag}q")?,
            _ if unit => write!(f, "q^{e}")?,
            _ => write!(f, "{mag}q^{e}")?,
        }
    }
    Ok(())
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            insert_term(&mut self.terms, *e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            insert_term(&mut self.terms, *e, -c);
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                insert_term(&mut terms, ea + eb, ca * cb);
            }
        }
        LaurentPoly { terms }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        let mut acc = LaurentPoly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

/// A Laurent series known modulo `q^{cutoff+1}`.
///
/// Only terms with exponent `<= cutoff` are stored. Products are reduced after
/// every operation; they are exact modulo `q^{cutoff+1}` as long as neither
/// factor has negative exponents, which holds for every series built here.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    cutoff: i64,
    terms: BTreeMap<i64, BigInt>,
}

impl TruncSeries {
    pub fn zero(cutoff: i64) -> Self {
        TruncSeries {
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cutoff: i64) -> Self {
        LaurentPoly::one().truncate(cutoff)
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// The stored terms as a polynomial.
    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.clone(),
        }
    }

    fn check(&self, other: &TruncSeries) -> Result<(), LaurentError> {
        if self.cutoff != other.cutoff {
            return Err(LaurentError::CutoffMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &TruncSeries) -> Result<TruncSeries, LaurentError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            insert_term(&mut terms, *e, c.clone());
        }
        Ok(TruncSeries {
            cutoff: self.cutoff,
            terms,
        })
    }

    pub fn checked_sub(&self, other: &TruncSeries) -> Result<TruncSeries, LaurentError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &TruncSeries) -> Result<TruncSeries, LaurentError> {
        self.check(other)?;
        Ok(self.mul_poly(&other.to_poly()))
    }

    /// Product with an exact polynomial, reduced at this series' cutoff.
    pub fn mul_poly(&self, p: &LaurentPoly) -> TruncSeries {
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &p.terms {
                let e = ea + eb;
                if e <= self.cutoff {
                    insert_term(&mut terms, e, ca * cb);
                }
            }
        }
        TruncSeries {
            cutoff: self.cutoff,
            terms,
        }
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            cutoff: self.cutoff,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn substitute_neg_q(&self) -> TruncSeries {
        TruncSeries {
            cutoff: self.cutoff,
            terms: self.to_poly().substitute_neg_q().terms,
        }
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms)?;
        write!(f, " + O(q^{})", self.cutoff + 1)
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries({self})")
    }
}

/// The quantum integer `[n]_q = (q^n - q^{-n}) / (q - q^{-1})`.
pub fn quantum_integer(n: i64) -> LaurentPoly {
    if n < 0 {
        return -quantum_integer(-n);
    }
    LaurentPoly::from_terms((0..n).map(|k| (n - 1 - 2 * k, 1)))
}

/// Expansion of `(1 - q^2)^{1-r}` modulo `q^{cutoff+1}`.
///
/// The coefficient of `q^{2k}` is `binom(k + r - 2, r - 2)`.
pub fn geometric_power(r: usize, cutoff: i64) -> TruncSeries {
    assert!(r >= 1, "rank must be positive");
    if r == 1 {
        return TruncSeries::one(cutoff);
    }
    let m = (r - 2) as u64;
    let terms = (0..)
        .map(|k: u64| (2 * k as i64, k))
        .take_while(|(e, _)| *e <= cutoff)
        .map(|(e, k)| (e, num_integer::binomial(BigInt::from(k + m), BigInt::from(m))))
        .collect();
    TruncSeries { cutoff, terms }
}

// JSON form: {"terms": {"<exponent>": <coefficient>}} with coefficients as
// integers when they fit in i64 and as decimal strings otherwise.

fn coeff_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

struct TermsRef<'a>(&'a BTreeMap<i64, BigInt>);

impl Serialize for TermsRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (e, c) in self.0 {
            map.serialize_entry(&e.to_string(), &coeff_json(c))?;
        }
        map.end()
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("terms", &TermsRef(&self.terms))?;
        map.end()
    }
}

impl Serialize for TruncSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("terms", &TermsRef(&self.terms))?;
        map.serialize_entry("cutoff", &self.cutoff)?;
        map.end()
    }
}

#[derive(Deserialize)]
struct RawPoly {
    terms: BTreeMap<String, serde_json::Value>,
    cutoff: Option<i64>,
}

fn parse_terms<E: de::Error>(raw: BTreeMap<String, serde_json::Value>) -> Result<BTreeMap<i64, BigInt>, E> {
    let mut terms = BTreeMap::new();
    for (k, v) in raw {
        let e: i64 = k.parse().map_err(|_| E::custom(format!("bad exponent {k:?}")))?;
        let c: BigInt = match &v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| E::custom(format!("coefficient {n} is not an integer")))?,
            serde_json::Value::String(s) => s.parse().map_err(|_| E::custom(format!("bad coefficient {s:?}")))?,
            other => return Err(E::custom(format!("bad coefficient {other}"))),
        };
        insert_term(&mut terms, e, c);
    }
    Ok(terms)
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPoly::deserialize(d)?;
        Ok(LaurentPoly {
            terms: parse_terms(raw.terms)?,
        })
    }
}

impl<'de> Deserialize<'de> for TruncSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPoly::deserialize(d)?;
        let cutoff = raw.cutoff.ok_or_else(|| de::Error::missing_field("cutoff"))?;
        let terms: BTreeMap<i64, BigInt> = parse_terms(raw.terms)?;
        if terms.keys().any(|e| *e > cutoff) {
            return Err(de::Error::custom("series term above its cutoff"));
        }
        Ok(TruncSeries { cutoff, terms })
    }
}
