//! Exhaustive and randomized checks of the lemmas, and theorem verifiers that
//! compute both sides of each homology isomorphism.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Node};
use crate::family::{rho, canonical_retract, AlgebraContext, AlgebraElement, ContextSpec, Family, FamilyError};
use crate::homology::{bar_cells, tor_trivial, GroupAlgebra, HomologyError, HomologyGroup};
use crate::idempotent::{
    brauer_defect_idempotent, juxtaposition_components, ls_control_properties, mirror_idempotent, single_trundle,
    spheres_of_influence, tl_defect_idempotent, verify_principal_ideal, IdempotentError,
};
use crate::linkstate::{Constraint, LinkState, LinkStateError};
use crate::ring::{RingElem, RingError, RingSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    LinkState(#[from] LinkStateError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Idempotent(#[from] IdempotentError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("bar complex needs {cells} cells, over the budget of {budget}")]
    OverBudget { cells: u128, budget: u128 },
}

/// One property checked over a family of cases. `witness` is the first
/// failing case in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub max_n: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Result of checking one case: how many elementary assertions it covered,
/// and a witness if one failed.
type Outcome = Result<(usize, Option<Value>), VerifyError>;

fn sweep<T: Sync>(name: &str, items: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) -> Result<Check, VerifyError> {
    let results: Vec<(usize, Option<Value>)> = items.par_iter().map(f).collect::<Result<_, _>>()?;
    let cases = results.iter().map(|r| r.0).sum();
    let witness = results.into_iter().find_map(|r| r.1);
    Ok(Check {
        name: name.to_string(),
        cases,
        passed: witness.is_none(),
        witness,
    })
}

fn formal(family: Family, n: usize) -> Result<Arc<AlgebraContext>, VerifyError> {
    Ok(ContextSpec::new(family, n, RingSpec::ParamPoly).build()?)
}

fn no_missing_states(n: usize, planar: bool) -> Vec<LinkState> {
    let c = if planar { Constraint::PlanarNoMissing } else { Constraint::NoMissing };
    LinkState::enumerate_all(n, c)
}

fn in_ideal(p: &LinkState, y: &Diagram) -> Result<bool, VerifyError> {
    Ok(p.reaches(&LinkState::right_of(y))?)
}

fn family_name(f: Family) -> &'static str {
    f.short_name()
}

// ---------------------------------------------------------------- lemmas

/// `y d_p = δ^{(n-i)/2} y` for every Brauer diagram `y` in `J_p`.
pub fn check_mirror_identity(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<(Arc<AlgebraContext>, LinkState)> = (1..=max_n)
        .map(|n| formal(Family::Brauer, n).map(|c| no_missing_states(n, false).into_iter().map(move |p| (c.clone(), p))))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    sweep("mirror-identity", &cases, |(ctx, p)| {
        let d = p.mirror_diagram()?;
        let expected = p.connections().len() as u32;
        let mut count = 0;
        for y in ctx.basis() {
            if !in_ideal(p, y)? {
                continue;
            }
            count += 1;
            let yd = y.compose(&d)?;
            if yd.diagram != *y || yd.delta_exp != expected || yd.eps_exp != 0 {
                return Ok((count, Some(json!({"p": p, "y": y, "d_p": d, "product": yd.diagram, "delta_exp": yd.delta_exp}))));
            }
        }
        Ok((count, None))
    })
}

/// Mirror idempotents generate `A ∩ J_p` over Laurent polynomials in δ.
pub fn check_mirror_principal(family: Family, max_n: usize) -> Result<Check, VerifyError> {
    let planar = family.is_planar();
    let mut cases = Vec::new();
    for n in 1..=max_n {
        let ctx = ContextSpec::new(family, n, RingSpec::ParamLaurent).build()?;
        cases.extend(no_missing_states(n, planar).into_iter().map(|p| (ctx.clone(), p)));
    }
    sweep(&format!("mirror-principal-{}", family_name(family)), &cases, |(ctx, p)| {
        let e = mirror_idempotent(p, ctx)?;
        let report = verify_principal_ideal(ctx, p, &e)?;
        Ok((1, (!report.holds()).then(|| json!({"p": p, "e": e.to_json(), "report": report}))))
    })
}

/// The sesqui-diagram conditions force `y e = y` on `J_p`: checked for
/// every Brauer diagram `e` meeting them, not only the constructed ones.
pub fn check_ls_control_consequence(max_n: usize) -> Result<Check, VerifyError> {
    let mut cases = Vec::new();
    for n in 1..=max_n {
        let basis = Family::Brauer.diagrams(n);
        let mut by_right: HashMap<LinkState, Vec<Diagram>> = HashMap::new();
        for d in &basis {
            by_right.entry(LinkState::right_of(d)).or_default().push(d.clone());
        }
        let basis = Arc::new(basis);
        for p in no_missing_states(n, false) {
            for e in by_right.remove(&p).unwrap_or_default() {
                cases.push((basis.clone(), p.clone(), e));
            }
        }
    }
    sweep("ls-control-consequence", &cases, |(basis, p, e)| {
        if ls_control_properties(p, e)? != [true; 3] {
            return Ok((0, None));
        }
        let mut count = 0;
        for y in basis.iter() {
            if !in_ideal(p, y)? {
                continue;
            }
            count += 1;
            let ye = y.compose(e)?;
            if ye.diagram != *y || ye.delta_exp != 0 || ye.eps_exp != 0 {
                return Ok((count, Some(json!({"p": p, "e": e, "y": y, "product": ye.diagram}))));
            }
        }
        Ok((count, None))
    })
}

/// Defect idempotents: sesqui conditions, `e² = e` with no parameters, and
/// `A e = A ∩ J_p` over formal δ. The Temperley-Lieb construction must also
/// be planar.
pub fn check_defect_idempotents(family: Family, max_n: usize) -> Result<Check, VerifyError> {
    let planar = family.is_planar();
    let mut cases = Vec::new();
    for n in 1..=max_n {
        let ctx = formal(family, n)?;
        cases.extend(
            no_missing_states(n, planar)
                .into_iter()
                .filter(|p| p.defect_count() > 0)
                .map(|p| (ctx.clone(), p)),
        );
    }
    let name = if planar { "tl-defect-idempotent" } else { "brauer-defect-idempotent" };
    sweep(name, &cases, |(ctx, p)| {
        let e = if planar { tl_defect_idempotent(p)? } else { brauer_defect_idempotent(p)? };
        let props = ls_control_properties(p, &e)?;
        let sq = e.compose(&e)?;
        let squares = sq.diagram == e && sq.delta_exp == 0 && sq.eps_exp == 0;
        let planar_ok = !planar || e.classify().planar;
        let report = verify_principal_ideal(ctx, p, &AlgebraElement::from_diagram(ctx, &e)?)?;
        let ok = props == [true; 3] && squares && planar_ok && report.holds();
        Ok((1, (!ok).then(|| json!({"p": p, "e": e, "ls_control": props, "planar": planar_ok, "principal_ideal": report}))))
    })
}

/// Every noncrossing perfect matching on up to `max_nodes` nodes has a
/// single-component two-defect partner.
pub fn check_single_trundle(max_nodes: usize) -> Result<Check, VerifyError> {
    let cases: Vec<LinkState> = (1..=max_nodes / 2)
        .flat_map(|m| LinkState::enumerate(2 * m, 0, Constraint::PlanarNoMissing))
        .collect();
    sweep("single-trundle", &cases, |p0| {
        let q = single_trundle(p0)?;
        let ok = juxtaposition_components(p0, &q) == 1
            && q.defect_count() == 2
            && q.missing().is_empty()
            && q.is_planar();
        Ok((1, (!ok).then(|| json!({"p0": p0, "q": q}))))
    })
}

/// Garden cuts: boundary values, one defect per garden, no connection
/// crossing a cut.
pub fn check_spheres(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<LinkState> = (1..=max_n)
        .flat_map(|n| no_missing_states(n, true))
        .filter(|p| p.defect_count() > 0)
        .collect();
    sweep("spheres", &cases, |p| {
        let g = spheres_of_influence(p)?;
        let n = p.n();
        let garden = |v: usize| g.cuts.partition_point(|&a| a <= v) - 1;
        let ok = g.cuts.first() == Some(&1)
            && g.cuts.last() == Some(&(n + 1))
            && g.cuts.windows(2).all(|w| w[0] < w[1])
            && g.defects.len() + 1 == g.cuts.len()
            && g.defects.iter().enumerate().all(|(j, &d)| g.cuts[j] <= d && d < g.cuts[j + 1])
            && p.connections().iter().all(|&(a, b)| garden(a) == garden(b));
        Ok((1, (!ok).then(|| json!({"p": p, "cuts": g.cuts, "defects": g.defects}))))
    })
}

/// `ρ_i² = ε ρ_i` and `ρ_i ρ_j = ρ_j ρ_i`.
pub fn check_rho(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<(usize, usize, usize)> = (1..=max_n)
        .flat_map(|n| (1..=n).flat_map(move |i| (1..=n).map(move |j| (n, i, j))))
        .collect();
    sweep("rho", &cases, |&(n, i, j)| {
        let (ri, rj) = (rho(n, i)?, rho(n, j)?);
        let ij = ri.compose(&rj)?;
        let ok = if i == j {
            ij.diagram == ri && ij.delta_exp == 0 && ij.eps_exp == 1
        } else {
            ij == rj.compose(&ri)?
        };
        Ok((1, (!ok).then(|| json!({"n": n, "i": i, "j": j, "rho_i": ri, "rho_j": rj}))))
    })
}

/// The left ideal generated by `ρ_i` in the rook algebra is spanned by the
/// diagrams whose right node `i` has no partner.
pub fn check_my_first_ideal(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<(usize, usize)> = (1..=max_n).flat_map(|n| (1..=n).map(move |i| (n, i))).collect();
    sweep("my-first-ideal", &cases, |&(n, i)| {
        let basis = Family::Rook.diagrams(n);
        let r = rho(n, i)?;
        let generated: BTreeSet<Diagram> = basis
            .iter()
            .map(|y| y.compose(&r).map(|p| p.diagram))
            .collect::<Result<_, _>>()?;
        let expected: BTreeSet<Diagram> = basis.into_iter().filter(|d| d.mate(Node::Right(i)).is_none()).collect();
        let witness = generated.symmetric_difference(&expected).next().cloned();
        Ok((1, witness.map(|d| json!({"n": n, "i": i, "diagram": d}))))
    })
}

/// Diagrams with exactly `i` through strands lie in `J_p` for exactly one
/// occurring `p ∈ P_i`, namely their own right link state.
pub fn check_direct_sum(family: Family, max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<usize> = (1..=max_n).collect();
    sweep(&format!("direct-sum-{}", family_name(family)), &cases, |&n| {
        let basis = family.diagrams(n);
        let mut occurring: Vec<BTreeSet<LinkState>> = vec![BTreeSet::new(); n + 1];
        for d in &basis {
            occurring[d.through_count()].insert(LinkState::right_of(d));
        }
        for d in &basis {
            let own = LinkState::right_of(d);
            for p in &occurring[d.through_count()] {
                if p.reaches(&own)? != (*p == own) {
                    return Ok((basis.len(), Some(json!({"diagram": d, "p": p}))));
                }
            }
        }
        Ok((basis.len(), None))
    })
}

/// Full-through diagrams form a group, a retract of the algebra.
pub fn check_retract(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<(Family, usize)> = Family::ALL.into_iter().flat_map(|f| (1..=max_n).map(move |n| (f, n))).collect();
    sweep("retract", &cases, |&(family, n)| {
        let report = canonical_retract(&formal(family, n)?)?;
        let order = if family.is_planar() { 1 } else { (1..=n).product() };
        let ok = report.holds() && report.group.len() == order;
        Ok((1, (!ok).then(|| json!({"family": family_name(family), "n": n, "report": report}))))
    })
}

// ---------------------------------------------------------- structure

/// Closure under composition and the through-strand filtration, exhaustive.
pub fn check_closure_and_filtration(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<(Family, usize)> = Family::ALL.into_iter().flat_map(|f| (1..=max_n).map(move |n| (f, n))).collect();
    sweep("closure-filtration", &cases, |&(family, n)| {
        let basis = family.diagrams(n);
        let found = basis.par_iter().find_map_first(|x| {
            basis.iter().find_map(|y| {
                let p = x.compose(y).ok()?;
                let ok = family.contains(&p.diagram.classify())
                    && p.diagram.through_count() <= x.through_count().min(y.through_count());
                (!ok).then(|| json!({"family": family_name(family), "x": x, "y": y, "product": p.diagram}))
            })
        });
        Ok((basis.len() * basis.len(), found))
    })
}

fn random_element(ctx: &Arc<AlgebraContext>, rng: &mut ChaCha8Rng) -> Result<AlgebraElement, VerifyError> {
    let ring = ctx.ring();
    let terms = rng.gen_range(1..=3);
    let mut x = AlgebraElement::zero(ctx);
    for _ in 0..terms {
        let i = rng.gen_range(0..ctx.dim());
        let c = ring.from_i64(rng.gen_range(-3..=3));
        x = x.add(&AlgebraElement::basis_element(ctx, i).scale(&c))?;
    }
    Ok(x)
}

/// `(xy)z = x(yz)` and `1x = x = x1` on seeded random elements, in the
/// algebras and in their quotients by the filtration.
pub fn check_associativity(max_n: usize, samples: usize, seed: u64) -> Result<Check, VerifyError> {
    let mut cases = Vec::new();
    for family in Family::ALL {
        for n in 1..=max_n {
            cases.push((family, n, None));
            if n > 1 {
                cases.push((family, n, Some(n / 2)));
            }
        }
    }
    sweep("associativity", &cases, |&(family, n, floor)| {
        let mut spec = ContextSpec::new(family, n, RingSpec::ParamPoly);
        if let Some(k) = floor {
            spec = spec.floor(k);
        }
        let ctx = spec.build()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((family as u64) << 32) ^ ((n as u64) << 8) ^ floor.map_or(0xff, |k| k as u64));
        let one = AlgebraElement::unit(&ctx);
        for _ in 0..samples {
            let x = random_element(&ctx, &mut rng)?;
            let y = random_element(&ctx, &mut rng)?;
            let z = random_element(&ctx, &mut rng)?;
            let ok = x.multiply(&y)?.multiply(&z)? == x.multiply(&y.multiply(&z)?)?
                && one.multiply(&x)? == x
                && x.multiply(&one)? == x;
            if !ok {
                let w = json!({"context": ctx.spec().to_json(), "x": x.to_json(), "y": y.to_json(), "z": z.to_json()});
                return Ok((samples, Some(w)));
            }
        }
        Ok((samples, None))
    })
}

/// The direct reachability criterion agrees with search over moves.
pub fn check_reachability(max_n: usize) -> Result<Check, VerifyError> {
    let cases: Vec<usize> = (1..=max_n).collect();
    sweep("reachability", &cases, |&n| {
        let states = LinkState::enumerate_all(n, Constraint::Any);
        let found = states.par_iter().find_map_first(|p| {
            states.iter().find_map(|q| match (p.reaches(q), p.reaches_by_search(q)) {
                (Ok(a), Ok(b)) if a == b => None,
                _ => Some(json!({"p": p, "q": q})),
            })
        });
        Ok((states.len() * states.len(), found))
    })
}

// --------------------------------------------------------------- suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    MirrorDiagram,
    LsControl,
    EasyTrundle,
    HardTrundle,
    SingleTrundle,
    Spheres,
    RhoCommute,
    MyFirstIdeal,
    DirectSum,
    Retract,
}

impl Lemma {
    pub const ALL: [Lemma; 10] = [
        Lemma::MirrorDiagram,
        Lemma::LsControl,
        Lemma::EasyTrundle,
        Lemma::HardTrundle,
        Lemma::SingleTrundle,
        Lemma::Spheres,
        Lemma::RhoCommute,
        Lemma::MyFirstIdeal,
        Lemma::DirectSum,
        Lemma::Retract,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::MirrorDiagram => "mirror-diagram",
            Lemma::LsControl => "ls-control",
            Lemma::EasyTrundle => "easy-trundle",
            Lemma::HardTrundle => "hard-trundle",
            Lemma::SingleTrundle => "single-trundle",
            Lemma::Spheres => "spheres",
            Lemma::RhoCommute => "rho-commute",
            Lemma::MyFirstIdeal => "my-first-ideal",
            Lemma::DirectSum => "direct-sum",
            Lemma::Retract => "retract",
        }
    }

    /// Size swept when none is given; for single-trundle it counts nodes.
    pub fn default_size(self) -> usize {
        match self {
            Lemma::MirrorDiagram | Lemma::RhoCommute | Lemma::DirectSum => 5,
            Lemma::LsControl | Lemma::MyFirstIdeal | Lemma::Retract => 4,
            Lemma::EasyTrundle => 6,
            Lemma::HardTrundle => 8,
            Lemma::SingleTrundle => 12,
            Lemma::Spheres => 10,
        }
    }

    pub fn run(self, size: usize) -> Result<SuiteReport, VerifyError> {
        let checks = match self {
            Lemma::MirrorDiagram => vec![
                check_mirror_identity(size)?,
                check_mirror_principal(Family::Brauer, size)?,
                check_mirror_principal(Family::TemperleyLieb, size + 1)?,
            ],
            Lemma::LsControl => vec![check_ls_control_consequence(size)?],
            Lemma::EasyTrundle => vec![check_defect_idempotents(Family::Brauer, size)?],
            Lemma::HardTrundle => vec![check_defect_idempotents(Family::TemperleyLieb, size)?],
            Lemma::SingleTrundle => vec![check_single_trundle(size)?],
            Lemma::Spheres => vec![check_spheres(size)?],
            Lemma::RhoCommute => vec![check_rho(size)?],
            Lemma::MyFirstIdeal => vec![check_my_first_ideal(size)?],
            Lemma::DirectSum => Family::ALL
                .into_iter()
                .map(|f| check_direct_sum(f, size))
                .collect::<Result<_, _>>()?,
            Lemma::Retract => vec![check_retract(size)?],
        };
        Ok(SuiteReport {
            suite: self.name().to_string(),
            max_n: size,
            checks,
        })
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| VerifyError::UnknownName(s.to_string()))
    }
}

/// Closure, filtration, associativity and reachability in one report.
pub fn structural_suite(max_n: usize, samples: usize, seed: u64) -> Result<SuiteReport, VerifyError> {
    Ok(SuiteReport {
        suite: "structure".into(),
        max_n,
        checks: vec![
            check_closure_and_filtration(max_n)?,
            check_associativity(max_n, samples, seed)?,
            check_reachability(max_n)?,
        ],
    })
}

// ------------------------------------------------------------- theorems

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    RookInvertible,
    RookBrauerInvertible,
    BrauerRecovery,
    TlRecovery,
    Sroka,
    GeneralisedSroka,
    BrauerSroka,
    GeneralisedBrauerSroka,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::RookInvertible,
        Theorem::RookBrauerInvertible,
        Theorem::BrauerRecovery,
        Theorem::TlRecovery,
        Theorem::Sroka,
        Theorem::GeneralisedSroka,
        Theorem::BrauerSroka,
        Theorem::GeneralisedBrauerSroka,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::RookInvertible => "rook-invertible",
            Theorem::RookBrauerInvertible => "rook-brauer-invertible",
            Theorem::BrauerRecovery => "brauer-recovery",
            Theorem::TlRecovery => "tl-recovery",
            Theorem::Sroka => "sroka",
            Theorem::GeneralisedSroka => "generalised-sroka",
            Theorem::BrauerSroka => "brauer-sroka",
            Theorem::GeneralisedBrauerSroka => "generalised-brauer-sroka",
        }
    }

    /// The family whose homology is computed on the left-hand side.
    pub fn family(self) -> Family {
        match self {
            Theorem::RookInvertible => Family::Rook,
            Theorem::RookBrauerInvertible => Family::RookBrauer,
            Theorem::BrauerRecovery | Theorem::BrauerSroka | Theorem::GeneralisedBrauerSroka => Family::Brauer,
            Theorem::TlRecovery | Theorem::Sroka | Theorem::GeneralisedSroka => Family::TemperleyLieb,
        }
    }

    fn quotients_by_empty_through(self) -> bool {
        matches!(self, Theorem::GeneralisedSroka | Theorem::GeneralisedBrauerSroka)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| VerifyError::UnknownName(s.to_string()))
    }
}

/// Parameters of a theorem check. Unset parameters default to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremInput {
    pub n: usize,
    pub ring: RingSpec,
    pub delta: Option<RingElem>,
    pub eps: Option<RingElem>,
    pub max_degree: usize,
    /// Largest bar complex, in cells, either side may build.
    pub cell_budget: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub algebra: Value,
    /// The algebra or group on the other side.
    pub reference: Value,
    pub max_degree: usize,
    pub algebra_side: Vec<HomologyGroup>,
    pub reference_side: Vec<HomologyGroup>,
    pub passed: bool,
    /// First degree where the two sides differ.
    pub witness: Option<usize>,
}

fn unit_or(ring: &RingSpec, x: &Option<RingElem>) -> RingElem {
    x.clone().unwrap_or_else(|| ring.one())
}

fn require_unit(ring: &RingSpec, x: &RingElem, what: &str) -> Result<(), VerifyError> {
    match ring.try_invert(x) {
        Some(_) => Ok(()),
        None => Err(VerifyError::Hypothesis(format!("{what} = {x} must be invertible in {}", ring.short_name()))),
    }
}

fn guard(dim: usize, top: usize, budget: Option<u128>) -> Result<(), VerifyError> {
    let cells = bar_cells(dim.saturating_sub(1), top);
    match budget {
        Some(b) if cells > b => Err(VerifyError::OverBudget { cells, budget: b }),
        _ => Ok(()),
    }
}

fn trivial_group(n: usize) -> Vec<Vec<usize>> {
    vec![(1..=n).collect()]
}

pub fn verify_theorem(theorem: Theorem, input: &TheoremInput) -> Result<TheoremReport, VerifyError> {
    let TheoremInput { n, ring, .. } = input;
    let n = *n;
    let delta = unit_or(ring, &input.delta);
    let eps = unit_or(ring, &input.eps);
    match theorem {
        Theorem::Sroka | Theorem::BrauerSroka if n % 2 == 0 => {
            return Err(VerifyError::Hypothesis(format!("n = {n} must be odd")));
        }
        Theorem::RookInvertible | Theorem::RookBrauerInvertible => require_unit(ring, &eps, "ε")?,
        Theorem::BrauerRecovery | Theorem::TlRecovery => require_unit(ring, &delta, "δ")?,
        _ => {}
    }
    let mut spec = ContextSpec::new(theorem.family(), n, ring.clone()).delta(delta.clone()).eps(eps);
    if theorem.quotients_by_empty_through() {
        spec = spec.floor(0);
    }
    let top = input.max_degree + 1;
    let ctx = spec.build()?;
    guard(ctx.dim(), top, input.cell_budget)?;

    let (reference, reference_side) = match theorem {
        Theorem::RookBrauerInvertible => {
            let other = ContextSpec::new(Family::Brauer, n, ring.clone()).delta(delta).build()?;
            guard(other.dim(), top, input.cell_budget)?;
            (other.spec().to_json(), tor_trivial(&*other, input.max_degree)?)
        }
        _ => {
            let group = match theorem {
                Theorem::TlRecovery | Theorem::Sroka | Theorem::GeneralisedSroka => {
                    GroupAlgebra::new(trivial_group(n), ring.clone())?
                }
                _ => GroupAlgebra::symmetric(n, ring.clone()),
            };
            guard(group.elements().len(), top, input.cell_budget)?;
            let label = if group.elements().len() == 1 { "trivial group".to_string() } else { format!("Σ_{n}") };
            (json!({"group": label, "order": group.elements().len()}), tor_trivial(&group, input.max_degree)?)
        }
    };
    let algebra_side = tor_trivial(&*ctx, input.max_degree)?;
    let witness = (0..=input.max_degree).find(|&q| algebra_side[q] != reference_side[q]);
    Ok(TheoremReport {
        theorem: theorem.name().to_string(),
        algebra: ctx.spec().to_json(),
        reference,
        max_degree: input.max_degree,
        algebra_side,
        reference_side,
        passed: witness.is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(n: usize, ring: &str, delta: Option<i64>, max_degree: usize) -> TheoremInput {
        let ring = RingSpec::parse(ring).unwrap();
        TheoremInput {
            n,
            delta: delta.map(|d| ring.from_i64(d)),
            ring,
            eps: None,
            max_degree,
            cell_budget: None,
        }
    }

    #[test]
    fn names_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(l.name().parse::<Lemma>().unwrap(), l);
        }
        for t in Theorem::ALL {
            assert_eq!(t.to_string().parse::<Theorem>().unwrap(), t);
        }
        assert!("nope".parse::<Theorem>().is_err());
    }

    #[test]
    fn small_lemma_suites_pass() {
        for l in Lemma::ALL {
            let size = if l == Lemma::SingleTrundle { 8 } else { 3 };
            let r = l.run(size).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(structural_suite(3, 20, 7).unwrap().passed());
    }

    #[test]
    fn a_false_property_yields_a_witness() {
        // d_p itself, unscaled, is not idempotent once p has a connection
        let ctx = ContextSpec::new(Family::Brauer, 3, RingSpec::ParamPoly).build().unwrap();
        let p = LinkState::new(3, vec![(1, 2)], vec![3], vec![]).unwrap();
        let e = AlgebraElement::from_diagram(&ctx, &p.mirror_diagram().unwrap()).unwrap();
        assert!(!verify_principal_ideal(&ctx, &p, &e).unwrap().holds());
    }

    #[test]
    fn theorem_sides_agree_in_small_cases() {
        let r = verify_theorem(Theorem::Sroka, &input(3, "f2", Some(0), 2)).unwrap();
        assert!(r.passed);
        assert!(r.algebra_side[1..].iter().all(HomologyGroup::is_zero));
        let r = verify_theorem(Theorem::GeneralisedBrauerSroka, &input(2, "z", Some(0), 3)).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.reference_side[1], HomologyGroup::integral(0, &[2]));
        let r = verify_theorem(Theorem::RookInvertible, &input(2, "z", None, 3)).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn hypotheses_are_enforced() {
        assert!(matches!(
            verify_theorem(Theorem::Sroka, &input(2, "f2", Some(0), 1)),
            Err(VerifyError::Hypothesis(_))
        ));
        assert!(matches!(
            verify_theorem(Theorem::BrauerRecovery, &input(2, "f2", Some(0), 1)),
            Err(VerifyError::Hypothesis(_))
        ));
        let mut big = input(3, "f2", Some(1), 3);
        big.cell_budget = Some(100);
        assert!(matches!(verify_theorem(Theorem::BrauerSroka, &big), Err(VerifyError::OverBudget { .. })));
    }

    #[test]
    fn dropping_the_hypothesis_can_change_the_answer() {
        // TL_2 at δ = 0 has no idempotent generating its bottom ideal
        let mut spec = input(2, "f2", Some(0), 2);
        spec.cell_budget = None;
        let ctx = ContextSpec::new(Family::TemperleyLieb, 2, spec.ring.clone()).delta_int(0).build().unwrap();
        let tor = tor_trivial(&*ctx, 2).unwrap();
        assert!(tor[1..].iter().any(|h| !h.is_zero()));
    }
}
