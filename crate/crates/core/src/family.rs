//! The five diagram algebra families over a coefficient ring, with their
//! through-strand filtration and quotients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, DiagramFeatures};
use crate::ring::{RingElem, RingError, RingSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("unknown family `{0}` (expected rbr, rook, br, tl or rtl)")]
    UnknownFamily(String),
    #[error("elements belong to different algebras")]
    ContextMismatch,
    #[error("floor {floor} must be below n = {n}")]
    FloorTooLarge { floor: usize, n: usize },
    #[error("algebra is already a quotient")]
    AlreadyQuotient,
    #[error("diagram {0} is not a basis element of this algebra")]
    NotInBasis(Diagram),
    #[error("product of {x} and {y} leaves the family: {product}")]
    ClosureViolated { x: Diagram, y: Diagram, product: Diagram },
    #[error("product of {x} and {y} carries unexpected parameter exponents δ^{a} ε^{b}")]
    UnexpectedParameters { x: Diagram, y: Diagram, a: u32, b: u32 },
    #[error("algebra has no permutation diagrams")]
    NoPermutations,
    #[error("strand {i} out of range for n = {n}")]
    StrandOutOfRange { i: usize, n: usize },
    #[error("malformed JSON: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RookBrauer,
    Rook,
    Brauer,
    TemperleyLieb,
    RookTemperleyLieb,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::RookBrauer,
        Family::Rook,
        Family::Brauer,
        Family::TemperleyLieb,
        Family::RookTemperleyLieb,
    ];

    pub fn contains(self, f: &DiagramFeatures) -> bool {
        match self {
            Family::RookBrauer => true,
            Family::Rook => !f.has_left_left && !f.has_right_right,
            Family::Brauer => !f.has_missing,
            Family::TemperleyLieb => f.planar && !f.has_missing,
            Family::RookTemperleyLieb => f.planar,
        }
    }

    pub fn allows_missing(self) -> bool {
        matches!(self, Family::RookBrauer | Family::Rook | Family::RookTemperleyLieb)
    }

    pub fn is_planar(self) -> bool {
        matches!(self, Family::TemperleyLieb | Family::RookTemperleyLieb)
    }

    /// All member diagrams on `n` strands, sorted.
    pub fn diagrams(self, n: usize) -> Vec<Diagram> {
        let turnbacks = self != Family::Rook;
        Diagram::enumerate(n, self.allows_missing(), turnbacks, self.is_planar())
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Family::RookBrauer => "rbr",
            Family::Rook => "rook",
            Family::Brauer => "br",
            Family::TemperleyLieb => "tl",
            Family::RookTemperleyLieb => "rtl",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "rbr" | "rookbrauer" => Family::RookBrauer,
            "r" | "rook" => Family::Rook,
            "br" | "brauer" => Family::Brauer,
            "tl" | "temperleylieb" => Family::TemperleyLieb,
            "rtl" | "rooktemperleylieb" => Family::RookTemperleyLieb,
            _ => return Err(FamilyError::UnknownFamily(s.to_string())),
        })
    }
}

/// The data naming an algebra: family, strand count, ring, parameter
/// values and an optional truncation floor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextSpec {
    pub family: Family,
    pub n: usize,
    pub ring: RingSpec,
    pub delta: RingElem,
    pub eps: RingElem,
    /// With `Some(k)` the algebra is the quotient by diagrams with at most
    /// `k` through strands.
    pub floor: Option<usize>,
}

impl ContextSpec {
    /// Parameters default to the formal `δ`, `ε` over parameter rings and to
    /// `1` otherwise.
    pub fn new(family: Family, n: usize, ring: RingSpec) -> Self {
        let delta = ring.formal_delta().unwrap_or_else(|| ring.one());
        let eps = ring.formal_eps().unwrap_or_else(|| ring.one());
        ContextSpec {
            family,
            n,
            ring,
            delta,
            eps,
            floor: None,
        }
    }

    pub fn delta(mut self, delta: RingElem) -> Self {
        self.delta = delta;
        self
    }

    pub fn eps(mut self, eps: RingElem) -> Self {
        self.eps = eps;
        self
    }

    pub fn delta_int(self, v: i64) -> Self {
        let d = self.ring.from_i64(v);
        self.delta(d)
    }

    pub fn eps_int(self, v: i64) -> Self {
        let e = self.ring.from_i64(v);
        self.eps(e)
    }

    pub fn floor(mut self, k: usize) -> Self {
        self.floor = Some(k);
        self
    }

    pub fn build(self) -> Result<Arc<AlgebraContext>, FamilyError> {
        AlgebraContext::new(self)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.short_name(),
            "n": self.n,
            "ring": serde_json::to_value(&self.ring).expect("ring spec serializes"),
            "delta": self.ring.elem_to_json(&self.delta),
            "eps": self.ring.elem_to_json(&self.eps),
            "floor": self.floor,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, FamilyError> {
        let bad = |what: &str| FamilyError::Json(format!("missing or invalid `{what}`"));
        let family: Family = v["family"].as_str().ok_or_else(|| bad("family"))?.parse()?;
        let n = v["n"].as_u64().ok_or_else(|| bad("n"))? as usize;
        let ring: RingSpec =
            serde_json::from_value(v["ring"].clone()).map_err(|e| FamilyError::Json(e.to_string()))?;
        let delta = ring.elem_from_json(&v["delta"])?;
        let eps = ring.elem_from_json(&v["eps"])?;
        let floor = match &v["floor"] {
            Value::Null => None,
            f => Some(f.as_u64().ok_or_else(|| bad("floor"))? as usize),
        };
        Ok(ContextSpec {
            family,
            n,
            ring,
            delta,
            eps,
            floor,
        })
    }
}

impl fmt::Display for ContextSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{} over {} (δ={}, ε={})",
            self.family, self.n, self.ring.short_name(), self.delta, self.eps
        )?;
        if let Some(k) = self.floor {
            write!(f, " mod I_{k}")?;
        }
        Ok(())
    }
}

/// Result of multiplying two basis diagrams: the basis index of the product
/// and its parameter exponents. `None` in a table slot means the product
/// falls below the floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Product {
    pub index: usize,
    pub delta_exp: u32,
    pub eps_exp: u32,
}

type Row = Result<Vec<Option<Product>>, FamilyError>;

/// An algebra together with its basis and a lazily filled multiplication
/// table. Shared behind an `Arc`; the table is safe to fill concurrently.
pub struct AlgebraContext {
    spec: ContextSpec,
    basis: Vec<Diagram>,
    index: HashMap<Diagram, usize>,
    rows: Vec<OnceLock<Row>>,
}

impl fmt::Debug for AlgebraContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraContext")
            .field("spec", &self.spec)
            .field("dim", &self.basis.len())
            .finish()
    }
}

impl AlgebraContext {
    pub fn new(spec: ContextSpec) -> Result<Arc<Self>, FamilyError> {
        if spec.n == 0 || spec.n > crate::diagram::MAX_STRANDS {
            return Err(DiagramError::BadStrandCount(spec.n).into());
        }
        if let Some(k) = spec.floor {
            if k >= spec.n {
                return Err(FamilyError::FloorTooLarge { floor: k, n: spec.n });
            }
        }
        spec.ring.check(&spec.delta)?;
        spec.ring.check(&spec.eps)?;
        let basis: Vec<Diagram> = spec
            .family
            .diagrams(spec.n)
            .into_iter()
            .filter(|d| spec.floor.is_none_or(|k| d.through_count() > k))
            .collect();
        let index = basis.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        let rows = (0..basis.len()).map(|_| OnceLock::new()).collect();
        Ok(Arc::new(AlgebraContext {
            spec,
            basis,
            index,
            rows,
        }))
    }

    pub fn spec(&self) -> &ContextSpec {
        &self.spec
    }

    pub fn ring(&self) -> &RingSpec {
        &self.spec.ring
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn floor(&self) -> Option<usize> {
        self.spec.floor
    }

    pub fn basis(&self) -> &[Diagram] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, d: &Diagram) -> Option<usize> {
        self.index.get(d).copied()
    }

    /// Basis diagrams with at most `i` through strands.
    pub fn filtration_basis(&self, i: usize) -> Vec<Diagram> {
        self.basis.iter().filter(|d| d.through_count() <= i).cloned().collect()
    }

    /// The quotient by diagrams with at most `k` through strands.
    pub fn quotient_context(&self, k: usize) -> Result<Arc<AlgebraContext>, FamilyError> {
        if self.spec.floor.is_some() {
            return Err(FamilyError::AlreadyQuotient);
        }
        self.spec.clone().floor(k).build()
    }

    fn compute_entry(&self, x: &Diagram, y: &Diagram) -> Result<Option<Product>, FamilyError> {
        let family = self.spec.family;
        let p = x.compose(y)?;
        if !family.contains(&p.diagram.classify()) {
            return Err(FamilyError::ClosureViolated {
                x: x.clone(),
                y: y.clone(),
                product: p.diagram,
            });
        }
        let forbidden = match family {
            Family::Rook => p.delta_exp > 0,
            Family::Brauer | Family::TemperleyLieb => p.eps_exp > 0,
            _ => false,
        };
        if forbidden {
            return Err(FamilyError::UnexpectedParameters {
                x: x.clone(),
                y: y.clone(),
                a: p.delta_exp,
                b: p.eps_exp,
            });
        }
        match self.index_of(&p.diagram) {
            Some(index) => Ok(Some(Product {
                index,
                delta_exp: p.delta_exp,
                eps_exp: p.eps_exp,
            })),
            None if self.spec.floor.is_some_and(|k| p.diagram.through_count() <= k) => Ok(None),
            None => Err(FamilyError::NotInBasis(p.diagram)),
        }
    }

    fn compute_row(&self, i: usize) -> Row {
        let x = &self.basis[i];
        self.basis.iter().map(|y| self.compute_entry(x, y)).collect()
    }

    /// Row `i` of the multiplication table: products `b_i · b_j` for all `j`.
    pub fn row(&self, i: usize) -> Result<&[Option<Product>], FamilyError> {
        match self.rows[i].get_or_init(|| self.compute_row(i)) {
            Ok(r) => Ok(r),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn product(&self, i: usize, j: usize) -> Result<Option<Product>, FamilyError> {
        Ok(self.row(i)?[j])
    }

    /// A single product computed directly, bypassing the table. Cheaper when
    /// only a handful of products of a large algebra are needed.
    pub fn product_uncached(&self, i: usize, j: usize) -> Result<Option<Product>, FamilyError> {
        match self.rows[i].get() {
            Some(Ok(row)) => Ok(row[j]),
            _ => self.compute_entry(&self.basis[i], &self.basis[j]),
        }
    }

    /// `δ^a ε^b` evaluated in the ring.
    pub fn coefficient(&self, a: u32, b: u32) -> RingElem {
        self.spec
            .ring
            .evaluate_parameters(a, b, &self.spec.delta, &self.spec.eps)
    }

    /// 1 on permutation diagrams, 0 elsewhere.
    pub fn augmentation(&self, d: &Diagram) -> RingElem {
        if d.through_count() == d.n() {
            self.spec.ring.one()
        } else {
            self.spec.ring.zero()
        }
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&Diagram::identity(self.n()))
            .expect("the identity diagram lies in every family")
    }
}

/// A linear combination of basis diagrams.
#[derive(Clone)]
pub struct AlgebraElement {
    ctx: Arc<AlgebraContext>,
    coeffs: BTreeMap<usize, RingElem>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.spec == other.ctx.spec && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraElement {}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(d, c)| format!("({c})·{d}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl AlgebraElement {
    pub fn zero(ctx: &Arc<AlgebraContext>) -> Self {
        AlgebraElement {
            ctx: ctx.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn unit(ctx: &Arc<AlgebraContext>) -> Self {
        Self::basis_element(ctx, ctx.identity_index())
    }

    pub fn basis_element(ctx: &Arc<AlgebraContext>, i: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, ctx.ring().one());
        AlgebraElement { ctx: ctx.clone(), coeffs }
    }

    pub fn from_diagram(ctx: &Arc<AlgebraContext>, d: &Diagram) -> Result<Self, FamilyError> {
        let i = ctx.index_of(d).ok_or_else(|| FamilyError::NotInBasis(d.clone()))?;
        Ok(Self::basis_element(ctx, i))
    }

    pub fn from_terms(
        ctx: &Arc<AlgebraContext>,
        terms: impl IntoIterator<Item = (Diagram, RingElem)>,
    ) -> Result<Self, FamilyError> {
        let mut out = Self::zero(ctx);
        for (d, c) in terms {
            ctx.ring().check(&c)?;
            let i = ctx.index_of(&d).ok_or(FamilyError::NotInBasis(d))?;
            out.add_term(i, &c);
        }
        Ok(out)
    }

    fn add_term(&mut self, i: usize, c: &RingElem) {
        let ring = self.ctx.ring().clone();
        let entry = self.coeffs.entry(i).or_insert_with(|| ring.zero());
        *entry = ring.add(entry, c);
        if ring.is_zero(entry) {
            self.coeffs.remove(&i);
        }
    }

    pub fn context(&self) -> &Arc<AlgebraContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, d: &Diagram) -> RingElem {
        self.ctx
            .index_of(d)
            .and_then(|i| self.coeffs.get(&i).cloned())
            .unwrap_or_else(|| self.ctx.ring().zero())
    }

    /// Nonzero terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, &RingElem)> {
        self.coeffs.iter().map(|(&i, c)| (&self.ctx.basis[i], c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    fn same_context(&self, other: &Self) -> Result<(), FamilyError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.spec == other.ctx.spec {
            Ok(())
        } else {
            Err(FamilyError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FamilyError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (&i, c) in &other.coeffs {
            out.add_term(i, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &RingElem) -> Self {
        let ring = self.ctx.ring();
        let mut out = Self::zero(&self.ctx);
        for (&i, c) in &self.coeffs {
            out.add_term(i, &ring.mul(s, c));
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, FamilyError> {
        self.multiply_with(other, true)
    }

    /// Like [`AlgebraElement::multiply`] but computes each product directly
    /// instead of filling table rows.
    pub fn multiply_uncached(&self, other: &Self) -> Result<Self, FamilyError> {
        self.multiply_with(other, false)
    }

    fn multiply_with(&self, other: &Self, cached: bool) -> Result<Self, FamilyError> {
        self.same_context(other)?;
        let ctx = &self.ctx;
        let ring = ctx.ring();
        let mut out = Self::zero(ctx);
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let p = if cached { ctx.product(i, j)? } else { ctx.product_uncached(i, j)? };
                if let Some(p) = p {
                    let c = ring.mul(&ring.mul(a, b), &ctx.coefficient(p.delta_exp, p.eps_exp));
                    out.add_term(p.index, &c);
                }
            }
        }
        Ok(out)
    }

    pub fn augmentation(&self) -> RingElem {
        let ring = self.ctx.ring();
        self.terms()
            .fold(ring.zero(), |acc, (d, c)| ring.add(&acc, &ring.mul(c, &self.ctx.augmentation(d))))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(d, c)| json!([d, self.ctx.ring().elem_to_json(c)]))
                .collect(),
        )
    }

    pub fn from_json(ctx: &Arc<AlgebraContext>, v: &Value) -> Result<Self, FamilyError> {
        let items = v.as_array().ok_or_else(|| FamilyError::Json("element must be a list".into()))?;
        let mut terms = Vec::new();
        for item in items {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| FamilyError::Json("term must be [diagram, coefficient]".into()))?;
            let d: Diagram =
                serde_json::from_value(pair[0].clone()).map_err(|e| FamilyError::Json(e.to_string()))?;
            terms.push((d, ctx.ring().elem_from_json(&pair[1])?));
        }
        Self::from_terms(ctx, terms)
    }
}

/// The identity with the strand at height `i` removed.
pub fn rho(n: usize, i: usize) -> Result<Diagram, FamilyError> {
    if i == 0 || i > n {
        return Err(FamilyError::StrandOutOfRange { i, n });
    }
    let edges: Vec<_> = (1..=n).filter(|&j| j != i).map(|j| (j, n + j)).collect();
    Ok(Diagram::from_encoded(n, &edges)?)
}

/// The permutation group carried by the full-through diagrams of an
/// algebra, and checks that it is a retract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RetractReport {
    /// Permutations as image lists `[σ(1), ..., σ(n)]`, sorted.
    pub group: Vec<Vec<usize>>,
    pub closed: bool,
    pub has_inverses: bool,
    /// The permutation diagrams survive as a basis of the top quotient.
    pub retract_identity: bool,
    /// Products of permutation diagrams agree in the algebra and in the top
    /// quotient, and match composition of permutations.
    pub multiplicative: bool,
}

impl RetractReport {
    pub fn holds(&self) -> bool {
        self.closed && self.has_inverses && self.retract_identity && self.multiplicative
    }
}

pub fn canonical_retract(ctx: &Arc<AlgebraContext>) -> Result<RetractReport, FamilyError> {
    let n = ctx.n();
    let perms: Vec<&Diagram> = ctx.basis().iter().filter(|d| d.through_count() == n).collect();
    if perms.is_empty() {
        return Err(FamilyError::NoPermutations);
    }
    let mut group: Vec<Vec<usize>> = perms.iter().map(|d| d.to_permutation()).collect::<Result<_, _>>()?;
    group.sort();
    let member = |s: &Vec<usize>| group.binary_search(s).is_ok();

    let compose = |t: &[usize], s: &[usize]| -> Vec<usize> { (0..n).map(|i| t[s[i] - 1]).collect() };
    let closed = group.iter().all(|t| group.iter().all(|s| member(&compose(t, s))));
    let has_inverses = group.iter().all(|s| {
        let mut inv = vec![0; n];
        for (i, &v) in s.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        member(&inv)
    });

    let top = ctx.spec().clone().floor(n - 1).build()?;
    let retract_identity = top.dim() == group.len() && perms.iter().all(|d| top.index_of(d).is_some());

    let mut multiplicative = true;
    for t in &group {
        for s in &group {
            let dt = Diagram::from_permutation(t)?;
            let ds = Diagram::from_permutation(s)?;
            let expected = Diagram::from_permutation(&compose(t, s))?;
            let big = AlgebraElement::from_diagram(ctx, &dt)?.multiply(&AlgebraElement::from_diagram(ctx, &ds)?)?;
            let small = AlgebraElement::from_diagram(&top, &dt)?.multiply(&AlgebraElement::from_diagram(&top, &ds)?)?;
            let one = ctx.ring().one();
            let ok = big.terms().map(|(d, c)| (d.clone(), c.clone())).collect::<Vec<_>>() == vec![(expected.clone(), one.clone())]
                && small.terms().map(|(d, c)| (d.clone(), c.clone())).collect::<Vec<_>>() == vec![(expected, one)];
            multiplicative &= ok;
        }
    }

    Ok(RetractReport {
        group,
        closed,
        has_inverses,
        retract_identity,
        multiplicative,
    })
}
