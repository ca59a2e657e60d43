//! Exact sparse polynomials in `q` (and `q`, `t`) with big-integer
//! coefficients, plus Gaussian polynomials.
//!
//! Terms are kept in `BTreeMap`s so iteration order is the canonical order
//! used for display, serialization and equality: ascending `t`-exponent,
//! then ascending `q`-exponent. Zero coefficients are never stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Polynomial in `q` alone.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UniPoly {
    terms: BTreeMap<u32, BigInt>,
}

/// Polynomial in `q` and `t`. Keys are `(t, q)` so the map order is canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, BigInt>, key: K, c: BigInt) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(q: u32, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        accumulate(&mut p.terms, q, c.into());
        p
    }

    /// Builds a polynomial from a dense coefficient list, lowest degree first.
    pub fn from_coeffs<C: Into<BigInt> + Clone>(coeffs: &[C]) -> Self {
        let mut p = Self::zero();
        for (e, c) in coeffs.iter().enumerate() {
            accumulate(&mut p.terms, e as u32, c.clone().into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, q: u32) -> BigInt {
        self.terms.get(&q).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, q: u32, c: impl Into<BigInt>) {
        accumulate(&mut self.terms, q, c.into());
    }

    pub fn shift(&self, dq: u32) -> Self {
        UniPoly {
            terms: self.terms.iter().map(|(&e, c)| (e + dq, c.clone())).collect(),
        }
    }

    /// Value at `q = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Dense coefficient vector `[c_0, .., c_deg]`.
    pub fn to_dense(&self) -> Vec<BigInt> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|e| self.coeff(e)).collect(),
        }
    }

    /// Embeds as a `t`-free bivariate polynomial.
    pub fn to_bi(&self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(&e, c)| ((0, e), c.clone())).collect(),
        }
    }

    /// Multiplies every term by `t^dt`.
    pub fn with_t(&self, dt: u32) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(&e, c)| ((dt, e), c.clone())).collect(),
        }
    }

    pub fn to_latex(&self) -> String {
        self.to_bi().to_latex()
    }
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 1)
    }

    pub fn monomial(q: u32, t: u32, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        accumulate(&mut p.terms, (t, q), c.into());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, q: u32, t: u32) -> BigInt {
        self.terms.get(&(t, q)).cloned().unwrap_or_default()
    }

    /// Terms as `(q, t, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> {
        self.terms.iter().map(|(&(t, q), c)| (q, t, c))
    }

    pub fn add_term(&mut self, q: u32, t: u32, c: impl Into<BigInt>) {
        accumulate(&mut self.terms, (t, q), c.into());
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn add_assign_ref(&mut self, other: &BiPoly) {
        for (&k, c) in &other.terms {
            accumulate(&mut self.terms, k, c.clone());
        }
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(t1, q1), c1) in &self.terms {
            for (&(t2, q2), c2) in &other.terms {
                accumulate(&mut out.terms, (t1 + t2, q1 + q2), c1 * c2);
            }
        }
        out
    }

    pub fn shift(&self, dq: u32, dt: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(t, q), c)| ((t + dt, q + dq), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `1` for `q` and/or `t`. With neither flag set the
    /// polynomial is returned unchanged.
    pub fn specialize(&self, q_to_one: bool, t_to_one: bool) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(t, q), c) in &self.terms {
            let key = (if t_to_one { 0 } else { t }, if q_to_one { 0 } else { q });
            accumulate(&mut out.terms, key, c.clone());
        }
        out
    }

    /// The coefficient of `t^dt`, as a polynomial in `q`.
    pub fn t_coeff(&self, dt: u32) -> UniPoly {
        let mut out = UniPoly::zero();
        for (&(t, q), c) in self.terms.range((dt, 0)..=(dt, u32::MAX)) {
            debug_assert_eq!(t, dt);
            out.add_term(q, c.clone());
        }
        out
    }

    /// Distinct `t`-exponents carrying a nonzero term, ascending.
    pub fn t_support(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|&(t, _)| t).collect();
        v.dedup();
        v
    }

    /// Collapses to a `q`-polynomial by setting `t = 1`.
    pub fn at_t_one(&self) -> UniPoly {
        let mut out = UniPoly::zero();
        for (&(_, q), c) in &self.terms {
            out.add_term(q, c.clone());
        }
        out
    }

    /// Returns the `q`-polynomial if no term involves `t`.
    pub fn as_uni(&self) -> Option<UniPoly> {
        if self.terms.keys().any(|&(t, _)| t != 0) {
            return None;
        }
        Some(self.at_t_one())
    }

    pub fn to_latex(&self) -> String {
        render(self, Style::Latex)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("q,t,c\n");
        for (q, t, c) in self.terms() {
            s.push_str(&format!("{q},{t},{c}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<BiPoly, serde_json::Error> {
        serde_json::from_str(s)
    }
}

impl From<UniPoly> for BiPoly {
    fn from(p: UniPoly) -> Self {
        p.to_bi()
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::add(self, rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::mul(self, rhs)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            accumulate(&mut out.terms, e, c.clone());
        }
        out
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        let mut out = UniPoly::zero();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &rhs.terms {
                accumulate(&mut out.terms, a + b, ca * cb);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Plain,
    Latex,
}

fn power(var: &str, e: u32, style: Style) -> String {
    match (e, style) {
        (0, _) => String::new(),
        (1, _) => var.to_string(),
        (_, Style::Plain) => format!("{var}^{e}"),
        (_, Style::Latex) => format!("{var}^{{{e}}}"),
    }
}

/// Renders a list of signed monomials (`coefficient`, `body`) as `a+b-c`.
fn join_signed(items: &[(BigInt, String)]) -> String {
    let mut s = String::new();
    for (i, (c, body)) in items.iter().enumerate() {
        let neg = c.is_negative();
        if i > 0 {
            s.push(if neg { '-' } else { '+' });
        } else if neg {
            s.push('-');
        }
        let a = c.abs();
        if body.is_empty() {
            s.push_str(&a.to_string());
        } else if !a.is_one() {
            s.push_str(&a.to_string());
            s.push_str(body);
        } else {
            s.push_str(body);
        }
    }
    s
}

fn render(p: &BiPoly, style: Style) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let (qv, tv) = match style {
        Style::Plain => ("q", "t"),
        Style::Latex => ("\\lambda", "\\mu"),
    };
    let mut groups = Vec::new();
    for t in p.t_support() {
        let inner = p.t_coeff(t);
        let items: Vec<(BigInt, String)> = inner
            .terms()
            .map(|(q, c)| (c.clone(), power(qv, q, style)))
            .collect();
        let tpow = power(tv, t, style);
        let group = if items.len() == 1 {
            let (c, body) = &items[0];
            join_signed(&[(c.clone(), format!("{body}{tpow}"))])
        } else if tpow.is_empty() {
            join_signed(&items)
        } else {
            format!("({}){tpow}", join_signed(&items))
        };
        groups.push(group);
    }
    let sep = match style {
        Style::Plain => " + ",
        Style::Latex => " + ",
    };
    groups.join(sep).replace("+ -", "- ")
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let items: Vec<(BigInt, String)> = self
            .terms()
            .map(|(q, c)| (c.clone(), power("q", q, Style::Plain)))
            .collect();
        f.write_str(&join_signed(&items))
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Style::Plain))
    }
}

// ---------------------------------------------------------------------------
// JSON: {"terms":[{"q":..,"t":..,"c":"<decimal>"}]} in canonical order
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    q: u32,
    t: u32,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for BiPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            terms: self
                .terms()
                .map(|(q, t, c)| TermRepr { q, t, c: c.to_string() })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(de)?;
        let mut p = BiPoly::zero();
        for term in repr.terms {
            let c: BigInt = term
                .c
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient {:?}", term.c)))?;
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficient in serialized polynomial"));
            }
            p.add_term(term.q, term.t, c);
        }
        Ok(p)
    }
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_bi().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        BiPoly::deserialize(de)?
            .as_uni()
            .ok_or_else(|| D::Error::custom("expected a polynomial in q only"))
    }
}

// ---------------------------------------------------------------------------
// Gaussian polynomials
// ---------------------------------------------------------------------------

fn qbinom_cache() -> &'static Mutex<HashMap<(u32, u32), UniPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), UniPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The Gaussian polynomial `[n choose k]_q`, zero when `k < 0` or `k > n`.
///
/// Computed row by row from `[n k] = [n-1 k-1] + q^k [n-1 k]`; rows are
/// memoized in a process-wide table.
pub fn qbinom(n: u32, k: i64) -> UniPoly {
    if k < 0 || k > n as i64 {
        return UniPoly::zero();
    }
    let k = k as u32;
    let k = k.min(n - k);
    if k == 0 {
        return UniPoly::one();
    }
    if let Some(p) = qbinom_cache().lock().unwrap().get(&(n, k)) {
        return p.clone();
    }
    let p = &qbinom(n - 1, k as i64 - 1) + &qbinom(n - 1, k as i64).shift(k);
    qbinom_cache().lock().unwrap().insert((n, k), p.clone());
    p
}

/// `qbinom` for a possibly negative level; a negative level is out of range
/// and yields zero.
pub fn qbinom_signed(n: i64, k: i64) -> UniPoly {
    if n < 0 {
        return UniPoly::zero();
    }
    qbinom(n as u32, k)
}

/// Ordinary binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
