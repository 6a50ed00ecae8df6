//! Textual forms accepted on the command line.
//!
//! Diagrams: JSON `{"n":3,"edges":[[1,6],[2,3]]}`, or edge text such as
//! `L1-R3,L2-L3` with `n` taken from `--n`.
//!
//! Link states: JSON `{"n":..,"connections":..,"defects":..,"missing":..}`,
//! or tokens such as `1-2,3,x4`: a pair is a connection, a bare node a defect,
//! `x` marks a missing node.

use diagcat::{Diagram, LinkState, Node};

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn node(token: &str, n: usize) -> Result<Node, CliError> {
    let t = token.trim();
    let (side, rest) = t.split_at(t.chars().next().map_or(0, char::len_utf8));
    let k: usize = rest.parse().map_err(|_| usage(format!("bad node {t:?}")))?;
    if k == 0 || k > n {
        return Err(usage(format!("node {t:?} out of range 1..={n}")));
    }
    match side {
        "L" | "l" => Ok(Node::Left(k)),
        "R" | "r" => Ok(Node::Right(k)),
        _ => Err(usage(format!("node {t:?} must start with L or R"))),
    }
}

fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

fn split_pair(t: &str) -> Option<(&str, &str)> {
    t.split_once('-').or_else(|| t.split_once('–'))
}

pub fn diagram(s: &str, n: Option<usize>) -> Result<Diagram, CliError> {
    let t = s.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| usage(format!("bad diagram JSON: {e}")));
    }
    let n = n.ok_or_else(|| usage("edge text needs --n"))?;
    let edges = tokens(t)
        .map(|e| {
            let (a, b) = split_pair(e).ok_or_else(|| usage(format!("bad edge {e:?}")))?;
            Ok((node(a, n)?, node(b, n)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Diagram::from_edges(n, &edges).map_err(|e| usage(e.to_string()))
}

pub fn link_state(s: &str, n: Option<usize>) -> Result<LinkState, CliError> {
    let t = s.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| usage(format!("bad link state JSON: {e}")));
    }
    let n = n.ok_or_else(|| usage("link state text needs --n"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| usage(format!("bad node {x:?}")));
    let (mut connections, mut defects, mut missing) = (Vec::new(), Vec::new(), Vec::new());
    for tok in tokens(t) {
        if let Some((a, b)) = split_pair(tok) {
            connections.push((num(a)?, num(b)?));
        } else if let Some(k) = tok.strip_prefix(['x', 'X']) {
            missing.push(num(k)?);
        } else {
            defects.push(num(tok)?);
        }
    }
    LinkState::new(n, connections, defects, missing).map_err(|e| usage(e.to_string()))
}

/// Compact edge text, the inverse of [`diagram`].
pub fn edge_text(d: &Diagram) -> String {
    let n = d.n();
    let name = |k: usize| match Node::decode(k, n) {
        Node::Left(i) => format!("L{i}"),
        Node::Right(i) => format!("R{i}"),
    };
    d.edges().iter().map(|&(u, v)| format!("{}-{}", name(u), name(v))).collect::<Vec<_>>().join(" ")
}

/// Compact token text, the inverse of [`link_state`].
pub fn link_state_text(p: &LinkState) -> String {
    let mut parts: Vec<(usize, String)> = p.connections().iter().map(|&(a, b)| (a, format!("{a}-{b}"))).collect();
    parts.extend(p.defects().iter().map(|&d| (d, d.to_string())));
    parts.extend(p.missing().iter().map(|&m| (m, format!("x{m}"))));
    parts.sort();
    parts.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join(",")
}
