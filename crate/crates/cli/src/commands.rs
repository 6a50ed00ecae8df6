use std::sync::Arc;

use diagcat::homology::{bar_cells, tor_trivial, HomologyRow};
use diagcat::idempotent::{
    brauer_defect_idempotent, ls_control_properties, mirror_idempotent, tl_defect_idempotent, verify_principal_ideal,
};
use diagcat::verify::{self, Lemma, Theorem, TheoremInput, TheoremReport};
use diagcat::{AlgebraContext, AlgebraElement, Constraint, ContextSpec, Diagram, Family, LinkState, RingSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::input::{self, edge_text, link_state_text};
use crate::report::{Report, Table};
use crate::{CliError, ConstraintArg, Kind, Options};

const DEFAULT_CELL_BUDGET: u128 = 250_000;

fn cell_budget() -> Result<u128, CliError> {
    match std::env::var("DIAGCAT_CELL_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("DIAGCAT_CELL_BUDGET must be a number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CELL_BUDGET),
    }
}

fn guard(ctx: &AlgebraContext, max_degree: usize, budget: u128) -> Result<(), CliError> {
    let cells = bar_cells(ctx.dim().saturating_sub(1), max_degree + 1);
    if cells > budget {
        return Err(CliError::Budget(format!(
            "{} needs {cells} bar-complex cells through degree {}, over the budget of {budget} (set DIAGCAT_CELL_BUDGET to raise it)",
            ctx.spec(),
            max_degree + 1
        )));
    }
    Ok(())
}

fn require_n(opts: &Options) -> Result<usize, CliError> {
    opts.n.ok_or_else(|| CliError::Usage("--n is required".into()))
}

fn ring(opts: &Options, default: &str) -> Result<RingSpec, CliError> {
    Ok(RingSpec::parse(opts.ring.as_deref().unwrap_or(default))?)
}

fn context_with(
    family: Family,
    n: usize,
    ring: RingSpec,
    delta: Option<&str>,
    eps: Option<&str>,
    floor: Option<usize>,
) -> Result<Arc<AlgebraContext>, CliError> {
    let mut spec = ContextSpec::new(family, n, ring.clone());
    if let Some(d) = delta {
        spec = spec.delta(ring.parse_elem(d)?);
    }
    if let Some(e) = eps {
        spec = spec.eps(ring.parse_elem(e)?);
    }
    if let Some(k) = floor {
        spec = spec.floor(k);
    }
    Ok(spec.build()?)
}

fn context(opts: &Options, family: Family, n: usize, ring_default: &str) -> Result<Arc<AlgebraContext>, CliError> {
    let ring = ring(opts, ring_default)?;
    context_with(family, n, ring, opts.delta.as_deref(), opts.eps.as_deref(), opts.floor)
}

pub fn basis(argv: &[String], opts: &Options) -> Result<Report, CliError> {
    let ctx = context(opts, opts.family.unwrap_or(Family::RookBrauer), require_n(opts)?, "poly")?;
    let mut r = Report::new(
        argv,
        json!({"context": ctx.spec().to_json(), "dim": ctx.dim(), "basis": ctx.basis()}),
    );
    r.lines = ctx.basis().iter().enumerate().map(|(i, d)| format!("{i} {}", edge_text(d))).collect();
    r.table = Some(Table {
        header: "index,edges".into(),
        rows: ctx.basis().iter().enumerate().map(|(i, d)| format!("{i},{}", edge_text(d))).collect(),
    });
    Ok(r)
}

enum Operand {
    Diagram(Diagram),
    Element(Value),
}

fn operand(s: &str, n: Option<usize>) -> Result<Operand, CliError> {
    if s.trim_start().starts_with('[') {
        let v: Value = serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad element JSON: {e}")))?;
        Ok(Operand::Element(v))
    } else {
        Ok(Operand::Diagram(input::diagram(s, n)?))
    }
}

pub fn multiply(argv: &[String], opts: &Options, operands: &[String]) -> Result<Report, CliError> {
    let parsed: Vec<Operand> = operands.iter().map(|s| operand(s, opts.n)).collect::<Result<_, _>>()?;
    let n = match (opts.n, parsed.iter().find_map(|o| if let Operand::Diagram(d) = o { Some(d.n()) } else { None })) {
        (Some(n), _) | (None, Some(n)) => n,
        (None, None) => return Err(CliError::Usage("--n is required for element operands".into())),
    };
    let ctx = context(opts, opts.family.unwrap_or(Family::RookBrauer), n, "poly")?;
    let elements: Vec<AlgebraElement> = parsed
        .iter()
        .map(|o| match o {
            Operand::Diagram(d) => AlgebraElement::from_diagram(&ctx, d),
            Operand::Element(v) => AlgebraElement::from_json(&ctx, v),
        })
        .collect::<Result<_, _>>()?;
    let mut product = elements[0].clone();
    for e in &elements[1..] {
        product = product.multiply(e)?;
    }
    let mut result = json!({
        "context": ctx.spec().to_json(),
        "operands": elements.iter().map(AlgebraElement::to_json).collect::<Vec<_>>(),
        "product": product.to_json(),
    });
    let mut lines = vec![format!("product: {product}")];
    let diagrams: Option<Vec<&Diagram>> = parsed
        .iter()
        .map(|o| if let Operand::Diagram(d) = o { Some(d) } else { None })
        .collect();
    if let (Some(ds), None) = (diagrams, ctx.floor()) {
        let (mut cur, mut a, mut b) = (ds[0].clone(), 0, 0);
        for d in &ds[1..] {
            let p = cur.compose(d)?;
            cur = p.diagram;
            a += p.delta_exp;
            b += p.eps_exp;
        }
        lines.push(format!("diagram: {}", edge_text(&cur)));
        lines.push(format!("loops (δ): {a}, contractible components (ε): {b}"));
        result["diagram"] = json!(cur);
        result["delta_exp"] = json!(a);
        result["eps_exp"] = json!(b);
    }
    let mut r = Report::new(argv, result);
    r.lines = lines;
    Ok(r)
}

pub fn classify(argv: &[String], opts: &Options, d: &str) -> Result<Report, CliError> {
    let d = input::diagram(d, opts.n)?;
    let f = d.classify();
    let families: Vec<&str> = Family::ALL.into_iter().filter(|fam| fam.contains(&f)).map(Family::short_name).collect();
    let mut r = Report::new(argv, json!({"diagram": d, "features": f, "families": families}));
    r.lines = vec![
        format!("diagram: {}", edge_text(&d)),
        format!("through strands: {}", f.through_count),
        format!("planar: {}", f.planar),
        format!("missing nodes: {}", f.has_missing),
        format!("left-left edges: {}", f.has_left_left),
        format!("right-right edges: {}", f.has_right_right),
        format!("families: {}", families.join(" ")),
    ];
    Ok(r)
}

fn state_row(p: &LinkState) -> String {
    let join = |v: Vec<String>| v.join(" ");
    format!(
        "{},{},{}",
        join(p.connections().iter().map(|(a, b)| format!("{a}-{b}")).collect()),
        join(p.defects().iter().map(usize::to_string).collect()),
        join(p.missing().iter().map(usize::to_string).collect())
    )
}

pub fn linkstate(
    argv: &[String],
    opts: &Options,
    diagram: Option<&str>,
    from: Option<&str>,
    to: Option<&str>,
    defects: Option<usize>,
    constraint: ConstraintArg,
) -> Result<Report, CliError> {
    if let Some(d) = diagram {
        let d = input::diagram(d, opts.n)?;
        let (left, right) = LinkState::extract(&d);
        let mut r = Report::new(argv, json!({"diagram": d, "left": left, "right": right}));
        r.lines = vec![format!("left: {}", link_state_text(&left)), format!("right: {}", link_state_text(&right))];
        return Ok(r);
    }
    if let (Some(p), Some(q)) = (from, to) {
        let p = input::link_state(p, opts.n)?;
        let q = input::link_state(q, opts.n.or(Some(p.n())))?;
        let direct = p.reaches(&q)?;
        let search = p.reaches_by_search(&q)?;
        let mut r = Report::new(argv, json!({"from": p, "to": q, "reachable": direct}));
        r.lines = vec![format!("{} reaches {}: {direct}", link_state_text(&p), link_state_text(&q))];
        r.assert("direct criterion agrees with search", direct == search);
        if direct != search {
            r.witness = Some(json!({"from": p, "to": q, "direct": direct, "search": search}));
        }
        return Ok(r);
    }
    if from.is_some() || to.is_some() {
        return Err(CliError::Usage("--from and --to go together".into()));
    }
    let n = require_n(opts)?;
    let c: Constraint = constraint.into();
    let states = match defects {
        Some(i) => LinkState::enumerate(n, i, c),
        None => LinkState::enumerate_all(n, c),
    };
    let mut r = Report::new(
        argv,
        json!({"n": n, "defects": defects, "constraint": constraint.name(), "count": states.len(), "states": states}),
    );
    r.lines = states.iter().map(link_state_text).collect();
    r.table = Some(Table {
        header: "index,connections,defects,missing".into(),
        rows: states.iter().enumerate().map(|(i, p)| format!("{i},{}", state_row(p))).collect(),
    });
    Ok(r)
}

pub fn idempotent(argv: &[String], opts: &Options, p: &str, kind: Kind) -> Result<Report, CliError> {
    let p = input::link_state(p, opts.n)?;
    let kind = match (kind, opts.family) {
        (Kind::Auto, Some(Family::TemperleyLieb)) => Kind::Hard,
        (Kind::Auto, None | Some(Family::Brauer)) => Kind::Easy,
        (k, _) => k,
    };
    let family = match (kind, opts.family) {
        (_, Some(f @ (Family::Brauer | Family::TemperleyLieb))) => f,
        (_, Some(f)) => {
            return Err(CliError::Usage(format!("no idempotent construction for family {f}; use br or tl")));
        }
        (Kind::Hard, None) => Family::TemperleyLieb,
        _ => Family::Brauer,
    };
    if kind == Kind::Hard && family != Family::TemperleyLieb {
        return Err(CliError::Usage("the planar construction needs --family tl".into()));
    }
    let ring_default = if kind == Kind::Mirror { "laurent" } else { "poly" };
    let ctx = context(opts, family, p.n(), ring_default)?;
    let (e, diagram) = match kind {
        Kind::Mirror => (mirror_idempotent(&p, &ctx)?, None),
        Kind::Easy | Kind::Hard => {
            let d = if kind == Kind::Easy { brauer_defect_idempotent(&p)? } else { tl_defect_idempotent(&p)? };
            (AlgebraElement::from_diagram(&ctx, &d)?, Some(d))
        }
        Kind::Auto => unreachable!("resolved above"),
    };
    let idem = e.multiply_uncached(&e)? == e;
    let ls_control = ls_control_properties(&p, &diagram.clone().map_or_else(|| p.mirror_diagram(), Ok)?)?;
    let principal = verify_principal_ideal(&ctx, &p, &e)?;
    let e_json = match &diagram {
        Some(d) => json!(d),
        None => e.to_json(),
    };
    let mut r = Report::new(
        argv,
        json!({
            "kind": kind.name(),
            "context": ctx.spec().to_json(),
            "p": p,
            "e": e_json,
            "idempotent": idem,
            "ls_control": ls_control,
            "principal_ideal": principal.holds(),
        }),
    );
    r.lines = vec![
        format!("p: {}", link_state_text(&p)),
        match &diagram {
            Some(d) => format!("e: {}", edge_text(d)),
            None => format!("e: {e}"),
        },
        format!("ls_control: {ls_control:?}"),
    ];
    r.assert("e·e = e", idem);
    if diagram.is_some() {
        r.assert("sesqui-diagram conditions", ls_control == [true; 3]);
    }
    if let (Kind::Hard, Some(d)) = (kind, &diagram) {
        r.assert("planar", d.classify().planar);
    }
    r.assert("e lies in J_p", principal.in_ideal);
    r.assert("y·e = y on J_p", principal.absorbs);
    if let Some(y) = principal.witness {
        r.witness = Some(json!({"p": p, "e": e_json, "y": y}));
    }
    Ok(r)
}

pub fn verify_lemma(argv: &[String], opts: &Options, lemma: Lemma) -> Result<Report, CliError> {
    let size = opts.n.unwrap_or_else(|| lemma.default_size());
    let suite = lemma.run(size)?;
    let mut r = Report::new(argv, serde_json::to_value(&suite).expect("reports serialize"));
    r.lines = vec![format!("lemma {} up to size {size}", suite.suite)];
    for c in &suite.checks {
        r.lines.push(format!("{}: {} cases", c.name, c.cases));
        r.assert(c.name.clone(), c.passed);
    }
    r.witness = suite
        .checks
        .iter()
        .find_map(|c| c.witness.clone().map(|w| json!({"check": c.name, "case": w})));
    r.table = Some(Table {
        header: "suite,check,cases,passed".into(),
        rows: suite.checks.iter().map(|c| format!("{},{},{},{}", suite.suite, c.name, c.cases, c.passed)).collect(),
    });
    Ok(r)
}

fn list(s: Option<&str>) -> Vec<Option<String>> {
    match s {
        None => vec![None],
        Some(s) => s.split(',').map(|t| Some(t.trim().to_string())).collect(),
    }
}

pub fn homology(argv: &[String], opts: &Options) -> Result<Report, CliError> {
    let n = require_n(opts)?;
    let family = opts.family.unwrap_or(Family::Brauer);
    let max_degree = opts.max_degree.unwrap_or(3);
    let budget = cell_budget()?;
    let mut contexts = Vec::new();
    for ring_name in list(Some(opts.ring.as_deref().unwrap_or("z"))).into_iter().flatten() {
        let ring = RingSpec::parse(&ring_name)?;
        for delta in list(opts.delta.as_deref()) {
            for eps in list(opts.eps.as_deref()) {
                let ctx = context_with(family, n, ring.clone(), delta.as_deref(), eps.as_deref(), opts.floor)?;
                guard(&ctx, max_degree, budget)?;
                contexts.push(ctx);
            }
        }
    }
    let tables: Vec<Vec<HomologyRow>> = contexts
        .par_iter()
        .map(|ctx| tor_trivial(&**ctx, max_degree).map(|g| HomologyRow::rows_for(ctx, &g)))
        .collect::<Result<_, _>>()?;
    let rows: Vec<HomologyRow> = tables.into_iter().flatten().collect();
    let mut r = Report::new(argv, json!({"rows": rows.iter().map(HomologyRow::to_json).collect::<Vec<_>>()}));
    r.lines = rows
        .iter()
        .map(|row| {
            let floor = row.floor.map_or(String::new(), |k| format!(" mod I_{k}"));
            format!("{}{}{floor} over {} δ={} ε={}: H_{} = {}", row.family, row.n, row.ring, row.delta, row.eps, row.q, row.group)
        })
        .collect();
    r.table = Some(Table {
        header: HomologyRow::CSV_HEADER.into(),
        rows: rows.iter().map(HomologyRow::to_csv).collect(),
    });
    Ok(r)
}

fn theorem_report(argv: &[String], rep: &TheoremReport) -> Report {
    let mut r = Report::new(argv, serde_json::to_value(rep).expect("reports serialize"));
    r.lines = vec![
        format!("theorem: {}", rep.theorem),
        format!("algebra: {}", rep.algebra),
        format!("reference: {}", rep.reference),
    ];
    for q in 0..=rep.max_degree {
        let (a, b) = (&rep.algebra_side[q], &rep.reference_side[q]);
        r.assert(format!("H_{q}: {a} vs {b}"), a == b);
    }
    r.witness = rep.witness.map(|q| {
        json!({"degree": q, "algebra": rep.algebra_side[q], "reference": rep.reference_side[q]})
    });
    r.table = Some(Table {
        header: "q,algebra,reference,agree".into(),
        rows: (0..=rep.max_degree)
            .map(|q| {
                let (a, b) = (&rep.algebra_side[q], &rep.reference_side[q]);
                format!("{q},{a},{b},{}", a == b)
            })
            .collect(),
    });
    r
}

pub fn verify_theorem(argv: &[String], opts: &Options, theorem: Theorem) -> Result<Report, CliError> {
    let ring = ring(opts, "z")?;
    let input = TheoremInput {
        n: require_n(opts)?,
        delta: opts.delta.as_deref().map(|d| ring.parse_elem(d)).transpose()?,
        eps: opts.eps.as_deref().map(|e| ring.parse_elem(e)).transpose()?,
        ring,
        max_degree: opts.max_degree.unwrap_or(3),
        cell_budget: Some(cell_budget()?),
    };
    let rep = verify::verify_theorem(theorem, &input)?;
    Ok(theorem_report(argv, &rep))
}

pub fn selftest(argv: &[String], opts: &Options) -> Result<Report, CliError> {
    let mut suites = Vec::new();
    for lemma in Lemma::ALL {
        suites.push(lemma.run(lemma.default_size())?);
    }
    suites.push(verify::structural_suite(4, 100, opts.seed)?);
    let cases: [(Theorem, usize, &str, Option<i64>, Option<i64>, usize); 8] = [
        (Theorem::Sroka, 3, "f2", Some(0), None, 3),
        (Theorem::GeneralisedSroka, 4, "f2", Some(0), None, 2),
        (Theorem::BrauerSroka, 3, "f3", Some(0), None, 2),
        (Theorem::GeneralisedBrauerSroka, 2, "z", Some(0), None, 3),
        (Theorem::RookInvertible, 2, "z", None, Some(1), 3),
        (Theorem::RookBrauerInvertible, 2, "f3", Some(1), Some(1), 3),
        (Theorem::BrauerRecovery, 2, "z", Some(1), None, 3),
        (Theorem::TlRecovery, 3, "f2", Some(1), None, 3),
    ];
    let theorems: Vec<TheoremReport> = cases
        .par_iter()
        .map(|&(t, n, ring, delta, eps, max_degree)| {
            let ring = RingSpec::parse(ring)?;
            verify::verify_theorem(
                t,
                &TheoremInput {
                    n,
                    delta: delta.map(|d| ring.from_i64(d)),
                    eps: eps.map(|e| ring.from_i64(e)),
                    ring,
                    max_degree,
                    cell_budget: None,
                },
            )
            .map_err(CliError::from)
        })
        .collect::<Result<_, _>>()?;
    let mut r = Report::new(argv, json!({"suites": suites, "theorems": theorems}));
    let mut rows = Vec::new();
    for s in &suites {
        for c in &s.checks {
            let name = format!("{}/{}", s.suite, c.name);
            r.lines.push(format!("{name}: {} cases", c.cases));
            rows.push(format!("{name},{}", c.passed));
            r.assert(name, c.passed);
            if r.witness.is_none() {
                r.witness = c.witness.clone();
            }
        }
    }
    for t in &theorems {
        let name = format!("theorem/{}", t.theorem);
        rows.push(format!("{name},{}", t.passed));
        r.assert(name, t.passed);
    }
    r.table = Some(Table {
        header: "check,passed".into(),
        rows,
    });
    Ok(r)
}
