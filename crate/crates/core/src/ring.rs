//! Exact coefficient rings.
//!
//! A [`RingSpec`] names a commutative ring; [`RingElem`] values are plain data
//! and all arithmetic goes through the spec, which knows the modulus (if any)
//! and whether negative parameter exponents are allowed.
//!
//! The parameter rings hold bivariate (Laurent) polynomials in `δ` and `ε`
//! with integer coefficients, stored as a map from `(δ-exponent, ε-exponent)`
//! to a nonzero coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("element {elem} does not belong to {ring}")]
    Foreign { elem: String, ring: String },
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("cannot parse ring element {0:?}")]
    Parse(String),
    #[error("cannot parse ring {0:?}")]
    ParseRing(String),
    #[error("malformed ring element json: {0}")]
    Json(String),
}

/// The coefficient rings understood by the library.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingSpec {
    Integers,
    IntegersMod { m: u64 },
    PrimeField { p: u64 },
    Rationals,
    /// `Z[δ, ε]`
    ParamPoly,
    /// `Z[δ^±1, ε^±1]`
    ParamLaurent,
}

/// A bivariate Laurent polynomial with integer coefficients, zero terms
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent {
    terms: BTreeMap<(i32, i32), BigInt>,
}

impl Laurent {
    pub fn monomial(delta_exp: i32, eps_exp: i32, coeff: impl Into<BigInt>) -> Self {
        let mut out = Laurent::default();
        out.add_term(delta_exp, eps_exp, coeff.into());
        out
    }

    fn add_term(&mut self, a: i32, b: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i32, &BigInt)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn has_negative_exponent(&self) -> bool {
        self.terms.keys().any(|&(a, b)| a < 0 || b < 0)
    }

    fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    fn neg(&self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((a, b), c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let bare = *a == 0 && *b == 0;
            if !mag.is_one() || bare {
                write!(f, "{mag}")?;
            }
            for (sym, e) in [("δ", *a), ("ε", *b)] {
                match e {
                    0 => {}
                    1 => write!(f, "{sym}")?,
                    e => write!(f, "{sym}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// A value in some [`RingSpec`]. Elements are canonical: residues are
/// reduced, rationals are in lowest terms, polynomials carry no zero terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingElem {
    Int(BigInt),
    Residue(u64),
    Rational(BigRational),
    Poly(Laurent),
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElem::Int(v) => write!(f, "{v}"),
            RingElem::Residue(v) => write!(f, "{v}"),
            RingElem::Rational(v) => write!(f, "{v}"),
            RingElem::Poly(p) => write!(f, "{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

impl RingSpec {
    pub fn integers_mod(m: u64) -> Result<Self, RingError> {
        if m == 0 {
            return Err(RingError::ZeroModulus);
        }
        Ok(RingSpec::IntegersMod { m })
    }

    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(RingError::NotPrime(p));
        }
        Ok(RingSpec::PrimeField { p })
    }

    /// Parses the short names used on the command line: `z`, `q`, `f<p>`,
    /// `zmod<m>`, `poly`, `laurent`.
    pub fn parse(s: &str) -> Result<Self, RingError> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "z" | "int" | "integers" => return Ok(RingSpec::Integers),
            "q" | "rationals" => return Ok(RingSpec::Rationals),
            "poly" => return Ok(RingSpec::ParamPoly),
            "laurent" => return Ok(RingSpec::ParamLaurent),
            _ => {}
        }
        let bad = || RingError::ParseRing(s.to_string());
        if let Some(rest) = t.strip_prefix("zmod") {
            return RingSpec::integers_mod(rest.parse().map_err(|_| bad())?);
        }
        if let Some(rest) = t.strip_prefix('f') {
            return RingSpec::prime_field(rest.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }

    /// Short name, inverse of [`RingSpec::parse`].
    pub fn short_name(&self) -> String {
        match self {
            RingSpec::Integers => "z".into(),
            RingSpec::IntegersMod { m } => format!("zmod{m}"),
            RingSpec::PrimeField { p } => format!("f{p}"),
            RingSpec::Rationals => "q".into(),
            RingSpec::ParamPoly => "poly".into(),
            RingSpec::ParamLaurent => "laurent".into(),
        }
    }

    pub fn is_parametric(&self) -> bool {
        matches!(self, RingSpec::ParamPoly | RingSpec::ParamLaurent)
    }

    /// True for the rings in which every nonzero element is invertible.
    pub fn is_field(&self) -> bool {
        match self {
            RingSpec::PrimeField { .. } | RingSpec::Rationals => true,
            RingSpec::IntegersMod { m } => is_prime(*m),
            _ => false,
        }
    }

    /// The characteristic, when the ring is `Z/m` or `F_p`.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingSpec::IntegersMod { m } => Some(*m),
            RingSpec::PrimeField { p } => Some(*p),
            _ => None,
        }
    }

    pub fn zero(&self) -> RingElem {
        self.from_i64(0)
    }

    pub fn one(&self) -> RingElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElem {
        self.from_bigint(BigInt::from(v))
    }

    pub fn from_bigint(&self, v: BigInt) -> RingElem {
        match self {
            RingSpec::Integers => RingElem::Int(v),
            RingSpec::IntegersMod { m } | RingSpec::PrimeField { p: m } => {
                let r = v.mod_floor(&BigInt::from(*m));
                RingElem::Residue(r.to_u64().expect("residue fits"))
            }
            RingSpec::Rationals => RingElem::Rational(BigRational::from_integer(v)),
            RingSpec::ParamPoly | RingSpec::ParamLaurent => {
                RingElem::Poly(Laurent::monomial(0, 0, v))
            }
        }
    }

    /// The monomial `c·δ^a·ε^b` in a parameter ring.
    pub fn monomial(&self, a: i32, b: i32, c: i64) -> Result<RingElem, RingError> {
        let elem = RingElem::Poly(Laurent::monomial(a, b, c));
        self.check(&elem)?;
        Ok(elem)
    }

    /// The formal parameter `δ`; only defined in the parameter rings.
    pub fn formal_delta(&self) -> Option<RingElem> {
        self.is_parametric()
            .then(|| RingElem::Poly(Laurent::monomial(1, 0, 1)))
    }

    /// The formal parameter `ε`; only defined in the parameter rings.
    pub fn formal_eps(&self) -> Option<RingElem> {
        self.is_parametric()
            .then(|| RingElem::Poly(Laurent::monomial(0, 1, 1)))
    }

    pub fn contains(&self, x: &RingElem) -> bool {
        match (self, x) {
            (RingSpec::Integers, RingElem::Int(_)) => true,
            (RingSpec::IntegersMod { m } | RingSpec::PrimeField { p: m }, RingElem::Residue(r)) => {
                r < m
            }
            (RingSpec::Rationals, RingElem::Rational(_)) => true,
            (RingSpec::ParamPoly, RingElem::Poly(p)) => !p.has_negative_exponent(),
            (RingSpec::ParamLaurent, RingElem::Poly(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, x: &RingElem) -> Result<(), RingError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(RingError::Foreign {
                elem: x.to_string(),
                ring: self.short_name(),
            })
        }
    }

    fn foreign(&self, x: &RingElem) -> ! {
        panic!("element {x} does not belong to ring {}", self.short_name())
    }

    pub fn is_zero(&self, x: &RingElem) -> bool {
        match x {
            RingElem::Int(v) => v.is_zero(),
            RingElem::Residue(v) => *v == 0,
            RingElem::Rational(v) => v.is_zero(),
            RingElem::Poly(p) => p.is_zero(),
        }
    }

    pub fn add(&self, x: &RingElem, y: &RingElem) -> RingElem {
        match (x, y) {
            (RingElem::Int(a), RingElem::Int(b)) => RingElem::Int(a + b),
            (RingElem::Residue(a), RingElem::Residue(b)) => {
                let m = self.modulus().unwrap_or_else(|| self.foreign(x));
                RingElem::Residue(((*a as u128 + *b as u128) % m as u128) as u64)
            }
            (RingElem::Rational(a), RingElem::Rational(b)) => RingElem::Rational(a + b),
            (RingElem::Poly(a), RingElem::Poly(b)) => RingElem::Poly(a.add(b)),
            _ => self.foreign(y),
        }
    }

    pub fn neg(&self, x: &RingElem) -> RingElem {
        match x {
            RingElem::Int(a) => RingElem::Int(-a),
            RingElem::Residue(a) => {
                let m = self.modulus().unwrap_or_else(|| self.foreign(x));
                RingElem::Residue((m - a % m) % m)
            }
            RingElem::Rational(a) => RingElem::Rational(-a),
            RingElem::Poly(a) => RingElem::Poly(a.neg()),
        }
    }

    pub fn sub(&self, x: &RingElem, y: &RingElem) -> RingElem {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &RingElem, y: &RingElem) -> RingElem {
        match (x, y) {
            (RingElem::Int(a), RingElem::Int(b)) => RingElem::Int(a * b),
            (RingElem::Residue(a), RingElem::Residue(b)) => {
                let m = self.modulus().unwrap_or_else(|| self.foreign(x));
                RingElem::Residue(mod_mul(*a, *b, m))
            }
            (RingElem::Rational(a), RingElem::Rational(b)) => RingElem::Rational(a * b),
            (RingElem::Poly(a), RingElem::Poly(b)) => RingElem::Poly(a.mul(b)),
            _ => self.foreign(y),
        }
    }

    pub fn pow(&self, x: &RingElem, mut e: u32) -> RingElem {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Returns `s` with `x·s = 1`, or `None` when `x` is not a unit.
    pub fn try_invert(&self, x: &RingElem) -> Option<RingElem> {
        match (self, x) {
            (RingSpec::Integers, RingElem::Int(v)) => {
                (v.is_one() || (-v).is_one()).then(|| x.clone())
            }
            (RingSpec::IntegersMod { m } | RingSpec::PrimeField { p: m }, RingElem::Residue(v)) => {
                mod_inverse(*v, *m).map(RingElem::Residue)
            }
            (RingSpec::Rationals, RingElem::Rational(v)) => {
                (!v.is_zero()).then(|| RingElem::Rational(v.recip()))
            }
            (RingSpec::ParamPoly | RingSpec::ParamLaurent, RingElem::Poly(p)) => {
                // Units of Z[δ,ε] are ±1; units of the Laurent ring are ±monomials.
                if p.terms.len() != 1 {
                    return None;
                }
                let (&(a, b), c) = p.terms.iter().next()?;
                if !(c.is_one() || (-c).is_one()) {
                    return None;
                }
                if *self == RingSpec::ParamPoly && (a != 0 || b != 0) {
                    return None;
                }
                Some(RingElem::Poly(Laurent::monomial(-a, -b, c.clone())))
            }
            _ => self.foreign(x),
        }
    }

    /// `δ^a · ε^b` for given parameter values.
    pub fn evaluate_parameters(&self, a: u32, b: u32, delta: &RingElem, eps: &RingElem) -> RingElem {
        let da = self.pow(delta, a);
        let eb = self.pow(eps, b);
        self.mul(&da, &eb)
    }

    /// Evaluates a parameter polynomial at `(δ, ε) = (delta, eps)` in this
    /// ring. Negative exponents require `delta`/`eps` to be units here.
    pub fn specialize(
        &self,
        src: &RingElem,
        delta: &RingElem,
        eps: &RingElem,
    ) -> Result<RingElem, RingError> {
        let RingElem::Poly(poly) = src else {
            return Err(RingError::Foreign {
                elem: src.to_string(),
                ring: "poly".into(),
            });
        };
        self.check(delta)?;
        self.check(eps)?;
        let power = |x: &RingElem, e: i32| -> Result<RingElem, RingError> {
            if e >= 0 {
                Ok(self.pow(x, e as u32))
            } else {
                let inv = self
                    .try_invert(x)
                    .ok_or_else(|| RingError::NotAUnit(x.to_string()))?;
                Ok(self.pow(&inv, e.unsigned_abs()))
            }
        };
        let mut acc = self.zero();
        for (a, b, c) in poly.terms() {
            let term = self.mul(&self.from_bigint(c.clone()), &self.mul(&power(delta, a)?, &power(eps, b)?));
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Integer representative of an element of `Z`, `Z/m`, `F_p`, or an
    /// integral rational. Used to lift structure constants into machine
    /// integers.
    pub fn integer_lift(&self, x: &RingElem) -> Option<BigInt> {
        match x {
            RingElem::Int(v) => Some(v.clone()),
            RingElem::Residue(v) => Some(BigInt::from(*v)),
            RingElem::Rational(v) => v.is_integer().then(|| v.to_integer()),
            RingElem::Poly(p) => match p.terms.len() {
                0 => Some(BigInt::zero()),
                1 => p.terms.get(&(0, 0)).cloned(),
                _ => None,
            },
        }
    }

    /// Parses an element: an integer, `a/b` over the rationals, or `delta`/`δ`
    /// and `eps`/`ε` for the formal parameters.
    pub fn parse_elem(&self, s: &str) -> Result<RingElem, RingError> {
        let t = s.trim();
        let bad = || RingError::Parse(s.to_string());
        match t {
            "delta" | "δ" | "d" => return self.formal_delta().ok_or_else(bad),
            "eps" | "ε" | "e" => return self.formal_eps().ok_or_else(bad),
            _ => {}
        }
        if let (RingSpec::Rationals, Some((n, d))) = (self, t.split_once('/')) {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(RingElem::Rational(BigRational::new(n, d)));
        }
        let v: BigInt = t.parse().map_err(|_| bad())?;
        Ok(self.from_bigint(v))
    }

    /// JSON form: `{"monomials": [[a, b, coeff], ...]}` for parameter rings,
    /// a number for integers and residues (a string when it does not fit in
    /// 64 bits), a `"p/q"` string for rationals.
    pub fn elem_to_json(&self, x: &RingElem) -> Value {
        let int_json = |v: &BigInt| match v.to_i64() {
            Some(small) => json!(small),
            None => json!(v.to_string()),
        };
        match x {
            RingElem::Int(v) => int_json(v),
            RingElem::Residue(v) => json!(v),
            RingElem::Rational(v) => json!(v.to_string()),
            RingElem::Poly(p) => {
                let monos: Vec<Value> = p
                    .terms()
                    .map(|(a, b, c)| json!([a, b, int_json(c)]))
                    .collect();
                json!({ "monomials": monos })
            }
        }
    }

    pub fn elem_from_json(&self, v: &Value) -> Result<RingElem, RingError> {
        let bad = |why: &str| RingError::Json(format!("{why}: {v}"));
        let as_int = |v: &Value| -> Result<BigInt, RingError> {
            match v {
                Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad("not an integer")),
                Value::String(s) => s.parse().map_err(|_| bad("not an integer")),
                _ => Err(bad("not an integer")),
            }
        };
        let elem = match self {
            RingSpec::ParamPoly | RingSpec::ParamLaurent => {
                let monos = v
                    .get("monomials")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("missing monomials"))?;
                let mut poly = Laurent::default();
                for m in monos {
                    let parts = m.as_array().filter(|p| p.len() == 3).ok_or_else(|| bad("monomial"))?;
                    let a = parts[0].as_i64().ok_or_else(|| bad("exponent"))? as i32;
                    let b = parts[1].as_i64().ok_or_else(|| bad("exponent"))? as i32;
                    poly.add_term(a, b, as_int(&parts[2])?);
                }
                RingElem::Poly(poly)
            }
            RingSpec::Rationals => match v {
                Value::String(s) => self.parse_elem(s)?,
                other => RingElem::Rational(BigRational::from_integer(as_int(other)?)),
            },
            _ => self.from_bigint(as_int(v)?),
        };
        self.check(&elem)?;
        Ok(elem)
    }
}
