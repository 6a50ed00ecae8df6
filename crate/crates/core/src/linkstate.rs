//! Link states: the half-diagrams obtained by slicing a diagram down the
//! middle, the splice and deletion moves between them, and sesqui-diagrams.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, DoubleNode, Node, Partition};
use crate::unionfind::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkStateError {
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("node {0} is assigned more than one role")]
    NodeReused(usize),
    #[error("node {0} is assigned no role")]
    NodeUnassigned(usize),
    #[error("node {0} is not a defect")]
    NotADefect(usize),
    #[error("cannot splice node {0} to itself")]
    SelfSplice(usize),
    #[error("link state has missing nodes")]
    HasMissing,
    #[error("link state sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("n must be positive")]
    Empty,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A link state on nodes `1..=n`. All three lists are kept sorted; each
/// connection is stored with its smaller node first.
///
/// The derived order follows the serialization order, so sorting a list of
/// link states sorts it lexicographically on `(n, connections, defects,
/// missing)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLinkState")]
pub struct LinkState {
    n: usize,
    connections: Vec<(usize, usize)>,
    defects: Vec<usize>,
    missing: Vec<usize>,
}

#[derive(Deserialize)]
struct RawLinkState {
    n: usize,
    connections: Vec<(usize, usize)>,
    defects: Vec<usize>,
    missing: Vec<usize>,
}

impl TryFrom<RawLinkState> for LinkState {
    type Error = LinkStateError;
    fn try_from(r: RawLinkState) -> Result<Self, Self::Error> {
        LinkState::new(r.n, r.connections, r.defects, r.missing)
    }
}

/// Restrictions used when enumerating link states with a given defect count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Any,
    NoMissing,
    PlanarNoMissing,
    NoConnections,
}

impl LinkState {
    pub fn new(
        n: usize,
        connections: Vec<(usize, usize)>,
        defects: Vec<usize>,
        missing: Vec<usize>,
    ) -> Result<Self, LinkStateError> {
        if n == 0 {
            return Err(LinkStateError::Empty);
        }
        let mut seen = vec![false; n + 1];
        let mut mark = |v: usize| {
            if v == 0 || v > n {
                return Err(LinkStateError::NodeOutOfRange { node: v, n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(LinkStateError::NodeReused(v));
            }
            Ok(())
        };
        for &(a, b) in &connections {
            mark(a)?;
            mark(b)?;
        }
        for &v in defects.iter().chain(&missing) {
            mark(v)?;
        }
        if let Some(v) = (1..=n).find(|&v| !seen[v]) {
            return Err(LinkStateError::NodeUnassigned(v));
        }
        Ok(Self::normalized(n, connections, defects, missing))
    }

    fn normalized(
        n: usize,
        mut connections: Vec<(usize, usize)>,
        mut defects: Vec<usize>,
        mut missing: Vec<usize>,
    ) -> Self {
        for c in &mut connections {
            if c.0 > c.1 {
                *c = (c.1, c.0);
            }
        }
        connections.sort_unstable();
        defects.sort_unstable();
        missing.sort_unstable();
        LinkState {
            n,
            connections,
            defects,
            missing,
        }
    }

    /// Every node a defect: the link state of the identity diagram.
    pub fn all_defects(n: usize) -> Self {
        Self::normalized(n, Vec::new(), (1..=n).collect(), Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn connections(&self) -> &[(usize, usize)] {
        &self.connections
    }

    pub fn defects(&self) -> &[usize] {
        &self.defects
    }

    pub fn missing(&self) -> &[usize] {
        &self.missing
    }

    pub fn defect_count(&self) -> usize {
        self.defects.len()
    }

    /// Partner of node `v` under a connection.
    pub fn partner(&self, v: usize) -> Option<usize> {
        self.connections.iter().find_map(|&(a, b)| match v {
            _ if v == a => Some(b),
            _ if v == b => Some(a),
            _ => None,
        })
    }

    /// Connections do not cross and no defect sits under an arc.
    pub fn is_planar(&self) -> bool {
        let crossing = self.connections.iter().enumerate().any(|(k, &(a, b))| {
            self.connections[k + 1..]
                .iter()
                .any(|&(c, d)| (a < c && c < b && b < d) || (c < a && a < d && d < b))
        });
        let covered = self
            .connections
            .iter()
            .any(|&(a, b)| self.defects.iter().any(|&d| a < d && d < b));
        !crossing && !covered
    }

    pub fn satisfies(&self, constraint: Constraint) -> bool {
        match constraint {
            Constraint::Any => true,
            Constraint::NoMissing => self.missing.is_empty(),
            Constraint::PlanarNoMissing => self.missing.is_empty() && self.is_planar(),
            Constraint::NoConnections => self.connections.is_empty(),
        }
    }

    fn require_defect(&self, v: usize) -> Result<(), LinkStateError> {
        if v == 0 || v > self.n {
            return Err(LinkStateError::NodeOutOfRange { node: v, n: self.n });
        }
        if self.defects.binary_search(&v).is_err() {
            return Err(LinkStateError::NotADefect(v));
        }
        Ok(())
    }

    /// Joins two defects into a connection.
    pub fn splice(&self, i: usize, j: usize) -> Result<Self, LinkStateError> {
        if i == j {
            return Err(LinkStateError::SelfSplice(i));
        }
        self.require_defect(i)?;
        self.require_defect(j)?;
        let mut connections = self.connections.clone();
        connections.push((i.min(j), i.max(j)));
        let defects = self.defects.iter().copied().filter(|&d| d != i && d != j).collect();
        Ok(Self::normalized(self.n, connections, defects, self.missing.clone()))
    }

    /// Turns a defect into a missing node.
    pub fn delete_defect(&self, i: usize) -> Result<Self, LinkStateError> {
        self.require_defect(i)?;
        let defects = self.defects.iter().copied().filter(|&d| d != i).collect();
        let mut missing = self.missing.clone();
        missing.push(i);
        Ok(Self::normalized(self.n, self.connections.clone(), defects, missing))
    }

    /// Whether `q` arises from `self` by splices and deletions.
    pub fn reaches(&self, q: &LinkState) -> Result<bool, LinkStateError> {
        if self.n != q.n {
            return Err(LinkStateError::SizeMismatch(self.n, q.n));
        }
        let is_defect = |v: usize| self.defects.binary_search(&v).is_ok();
        let old_connections: BTreeSet<_> = self.connections.iter().collect();
        let old_missing: BTreeSet<_> = self.missing.iter().collect();
        if !old_connections.iter().all(|c| q.connections.binary_search(c).is_ok()) {
            return Ok(false);
        }
        if !old_missing.iter().all(|v| q.missing.binary_search(v).is_ok()) {
            return Ok(false);
        }
        let new_connections_ok = q
            .connections
            .iter()
            .filter(|c| !old_connections.contains(c))
            .all(|&(a, b)| is_defect(a) && is_defect(b));
        let new_missing_ok = q.missing.iter().filter(|v| !old_missing.contains(v)).all(|&v| is_defect(v));
        Ok(new_connections_ok && new_missing_ok)
    }

    /// Same question as [`LinkState::reaches`], answered by breadth-first
    /// search over the move graph. Exponential; intended as a check.
    pub fn reaches_by_search(&self, q: &LinkState) -> Result<bool, LinkStateError> {
        if self.n != q.n {
            return Err(LinkStateError::SizeMismatch(self.n, q.n));
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.clone()]);
        seen.insert(self.clone());
        while let Some(s) = queue.pop_front() {
            if &s == q {
                return Ok(true);
            }
            if s.defect_count() <= q.defect_count() {
                continue;
            }
            for next in s.moves() {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        Ok(false)
    }

    /// Every link state one splice or deletion away.
    pub fn moves(&self) -> Vec<LinkState> {
        let mut out = Vec::new();
        for (k, &a) in self.defects.iter().enumerate() {
            out.push(self.delete_defect(a).expect("a is a defect"));
            for &b in &self.defects[k + 1..] {
                out.push(self.splice(a, b).expect("a, b are defects"));
            }
        }
        out
    }

    /// All link states on `n` nodes with exactly `i` defects satisfying the
    /// constraint, sorted.
    pub fn enumerate(n: usize, i: usize, constraint: Constraint) -> Vec<LinkState> {
        if n == 0 || i > n {
            return Vec::new();
        }
        let mut out = Vec::new();
        if constraint == Constraint::PlanarNoMissing {
            let mut conns = Vec::new();
            let mut defects = Vec::new();
            planar_states(1, n + 1, i, &mut conns, &mut defects, &mut |c, d| {
                out.push(Self::normalized(n, c.to_vec(), d.to_vec(), Vec::new()))
            });
        } else {
            let allow_missing = matches!(constraint, Constraint::Any | Constraint::NoConnections);
            let allow_connections = constraint != Constraint::NoConnections;
            let mut role = vec![Role::Free; n + 1];
            general_states(1, n, i, allow_missing, allow_connections, &mut role, &mut out);
        }
        out.sort();
        out
    }

    /// All link states on `n` nodes with any number of defects.
    pub fn enumerate_all(n: usize, constraint: Constraint) -> Vec<LinkState> {
        let mut out: Vec<_> = (0..=n).flat_map(|i| Self::enumerate(n, i, constraint)).collect();
        out.sort();
        out
    }

    /// Left and right link states of a diagram.
    pub fn extract(x: &Diagram) -> (LinkState, LinkState) {
        let n = x.n();
        let half = |side: fn(usize) -> Node| {
            let mut connections = Vec::new();
            let mut defects = Vec::new();
            let mut missing = Vec::new();
            for j in 1..=n {
                match x.mate(side(j)) {
                    None => missing.push(j),
                    Some(other) if std::mem::discriminant(&other) == std::mem::discriminant(&side(j)) => {
                        let k = match other {
                            Node::Left(k) | Node::Right(k) => k,
                        };
                        if j < k {
                            connections.push((j, k));
                        }
                    }
                    Some(_) => defects.push(j),
                }
            }
            LinkState::normalized(n, connections, defects, missing)
        };
        (half(Node::Left), half(Node::Right))
    }

    pub fn right_of(x: &Diagram) -> LinkState {
        Self::extract(x).1
    }

    /// Components of the sesqui-diagram `(self, e)`: the connections of
    /// `self` drawn on the middle column, `e` spanning middle and right.
    pub fn sesqui_components(&self, e: &Diagram) -> Result<Partition, LinkStateError> {
        if self.n != e.n() {
            return Err(LinkStateError::SizeMismatch(self.n, e.n()));
        }
        let n = self.n;
        // 0..n are m-nodes, n..2n are r-nodes, matching e's node encoding
        let mut uf = UnionFind::new(2 * n);
        for &(a, b) in &self.connections {
            uf.union(a - 1, b - 1);
        }
        for (u, v) in e.edges() {
            uf.union(u - 1, v - 1);
        }
        Ok(uf
            .classes()
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|k| if k < n { DoubleNode::M(k + 1) } else { DoubleNode::R(k - n + 1) })
                    .collect()
            })
            .collect())
    }

    /// The diagram with both link states equal to `self` and a horizontal
    /// strand at every defect.
    pub fn mirror_diagram(&self) -> Result<Diagram, LinkStateError> {
        if !self.missing.is_empty() {
            return Err(LinkStateError::HasMissing);
        }
        let n = self.n;
        let mut edges = Vec::new();
        for &(a, b) in &self.connections {
            edges.push((a, b));
            edges.push((n + a, n + b));
        }
        for &d in &self.defects {
            edges.push((d, n + d));
        }
        Ok(Diagram::from_encoded(n, &edges)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Free,
    Taken,
}

fn general_states(
    v: usize,
    n: usize,
    defects_left: usize,
    allow_missing: bool,
    allow_connections: bool,
    role: &mut Vec<Role>,
    out: &mut Vec<LinkState>,
) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        v: usize,
        n: usize,
        defects_left: usize,
        allow_missing: bool,
        allow_connections: bool,
        role: &mut Vec<Role>,
        acc: &mut (Vec<(usize, usize)>, Vec<usize>, Vec<usize>),
        out: &mut Vec<LinkState>,
    ) {
        if v > n {
            if defects_left == 0 {
                out.push(LinkState::normalized(n, acc.0.clone(), acc.1.clone(), acc.2.clone()));
            }
            return;
        }
        if role[v] == Role::Taken {
            go(v + 1, n, defects_left, allow_missing, allow_connections, role, acc, out);
            return;
        }
        let free_after = (v + 1..=n).filter(|&w| role[w] == Role::Free).count();
        if defects_left > 0 {
            acc.1.push(v);
            go(v + 1, n, defects_left - 1, allow_missing, allow_connections, role, acc, out);
            acc.1.pop();
        }
        if defects_left > free_after {
            return;
        }
        if allow_missing {
            acc.2.push(v);
            go(v + 1, n, defects_left, allow_missing, allow_connections, role, acc, out);
            acc.2.pop();
        }
        if allow_connections {
            for w in v + 1..=n {
                if role[w] != Role::Free {
                    continue;
                }
                role[w] = Role::Taken;
                acc.0.push((v, w));
                go(v + 1, n, defects_left, allow_missing, allow_connections, role, acc, out);
                acc.0.pop();
                role[w] = Role::Free;
            }
        }
    }
    let mut acc = (Vec::new(), Vec::new(), Vec::new());
    go(v, n, defects_left, allow_missing, allow_connections, role, &mut acc, out);
}

/// Planar link states without missing nodes on the interval `lo..hi`, with
/// exactly `defects_left` defects, all at the top level.
fn planar_states(
    lo: usize,
    hi: usize,
    defects_left: usize,
    conns: &mut Vec<(usize, usize)>,
    defects: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[(usize, usize)], &[usize]),
) {
    if lo == hi {
        if defects_left == 0 {
            emit(conns, defects);
        }
        return;
    }
    let len = hi - lo;
    if defects_left > len || (len - defects_left) % 2 == 1 {
        return;
    }
    if defects_left > 0 {
        defects.push(lo);
        planar_states(lo + 1, hi, defects_left - 1, conns, defects, emit);
        defects.pop();
    }
    // lo pairs with some w; the inside lo+1..w is a perfect noncrossing matching
    let mut w = lo + 1;
    while w < hi {
        conns.push((lo, w));
        let inside_len = w - lo - 1;
        if inside_len.is_multiple_of(2) {
            let mut inside = Vec::new();
            matchings_on(lo + 1, w, &mut Vec::new(), &mut inside);
            for m in inside {
                let base = conns.len();
                conns.extend(m);
                planar_states(w + 1, hi, defects_left, conns, defects, emit);
                conns.truncate(base);
            }
        }
        conns.pop();
        w += 2;
    }
}

/// Noncrossing perfect matchings of the interval `lo..hi`.
fn matchings_on(lo: usize, hi: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if lo >= hi {
        out.push(acc.clone());
        return;
    }
    let mut w = lo + 1;
    while w < hi {
        let mut inner = Vec::new();
        matchings_on(lo + 1, w, &mut Vec::new(), &mut inner);
        let mut outer = Vec::new();
        matchings_on(w + 1, hi, &mut Vec::new(), &mut outer);
        for a in &inner {
            for b in &outer {
                let base = acc.len();
                acc.push((lo, w));
                acc.extend(a);
                acc.extend(b);
                out.push(acc.clone());
                acc.truncate(base);
            }
        }
        w += 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use DoubleNode::{M, R};
    use Node::{Left, Right};

    fn ls(n: usize, c: &[(usize, usize)], d: &[usize], m: &[usize]) -> LinkState {
        LinkState::new(n, c.to_vec(), d.to_vec(), m.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_partitions() {
        assert_eq!(LinkState::new(2, vec![], vec![1], vec![]), Err(LinkStateError::NodeUnassigned(2)));
        assert_eq!(LinkState::new(2, vec![(1, 2)], vec![1], vec![]), Err(LinkStateError::NodeReused(1)));
        assert!(LinkState::new(2, vec![], vec![1, 3], vec![]).is_err());
    }

    #[test]
    fn extract_rook_brauer_example() {
        let x = Diagram::from_edges(
            5,
            &[(Left(1), Left(3)), (Left(2), Right(3)), (Left(4), Right(5)), (Right(1), Right(2))],
        )
        .unwrap();
        let (left, right) = LinkState::extract(&x);
        assert_eq!(right, ls(5, &[(1, 2)], &[3, 5], &[4]));
        assert_eq!(right.defect_count(), 2);
        assert_eq!(left, ls(5, &[(1, 3)], &[2, 4], &[5]));
    }

    #[test]
    fn extract_identity() {
        let (l, r) = LinkState::extract(&Diagram::identity(4));
        assert_eq!(l, LinkState::all_defects(4));
        assert_eq!(r, LinkState::all_defects(4));
    }

    #[test]
    fn splice_and_delete_basics() {
        let p = LinkState::all_defects(2);
        assert_eq!(p.splice(1, 2).unwrap(), ls(2, &[(1, 2)], &[], &[]));
        assert_eq!(LinkState::all_defects(1).delete_defect(1).unwrap(), ls(1, &[], &[], &[1]));
        let q = ls(3, &[(1, 2)], &[3], &[]);
        assert_eq!(q.splice(1, 3), Err(LinkStateError::NotADefect(1)));
        assert_eq!(q.delete_defect(2), Err(LinkStateError::NotADefect(2)));
        assert_eq!(q.splice(3, 3), Err(LinkStateError::SelfSplice(3)));
    }

    #[test]
    fn moves_commute_exhaustively() {
        for n in 1..=5 {
            for p in LinkState::enumerate_all(n, Constraint::Any) {
                let d = p.defects().to_vec();
                for &a in &d {
                    for &b in &d {
                        if a < b {
                            let ab = p.delete_defect(a).unwrap().delete_defect(b).unwrap();
                            let ba = p.delete_defect(b).unwrap().delete_defect(a).unwrap();
                            assert_eq!(ab, ba);
                        }
                    }
                }
                for quad in d.to_vec().windows(4) {
                    let (a, b, c, e) = (quad[0], quad[1], quad[2], quad[3]);
                    let one = p.splice(a, c).unwrap().splice(b, e).unwrap();
                    let two = p.splice(b, e).unwrap().splice(a, c).unwrap();
                    assert_eq!(one, two);
                    assert_eq!(one.defect_count(), p.defect_count() - 4);
                }
            }
        }
    }

    #[test]
    fn reachability_examples() {
        let p = LinkState::all_defects(3);
        let q = ls(3, &[(1, 2)], &[], &[3]);
        assert!(p.reaches(&p).unwrap());
        assert!(p.reaches(&q).unwrap());
        assert!(p.reaches_by_search(&q).unwrap());
        let a = ls(3, &[(1, 2)], &[3], &[]);
        let b = ls(3, &[(1, 3)], &[2], &[]);
        assert!(!a.reaches(&b).unwrap());
        assert!(a.reaches(&LinkState::all_defects(2)).is_err());
    }

    #[test]
    fn reachability_matches_search_exhaustively() {
        for n in 1..=4 {
            let all = LinkState::enumerate_all(n, Constraint::Any);
            for p in &all {
                for q in &all {
                    assert_eq!(p.reaches(q).unwrap(), p.reaches_by_search(q).unwrap(), "{p:?} {q:?}");
                }
            }
        }
    }

    #[test]
    fn reachability_is_antisymmetric() {
        let all = LinkState::enumerate_all(4, Constraint::Any);
        for p in &all {
            for q in &all {
                if p.reaches(q).unwrap() && q.reaches(p).unwrap() {
                    assert_eq!(p, q);
                }
            }
        }
    }

    /// Brute force: assign every node one of the three roles in all ways.
    fn brute_force(n: usize, i: usize, constraint: Constraint) -> Vec<LinkState> {
        let mut out = BTreeSet::new();
        for x in Diagram::enumerate(n, true, true, false) {
            let (_, r) = LinkState::extract(&x);
            if r.defect_count() == i && r.satisfies(constraint) {
                out.insert(r);
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(LinkState::enumerate(3, 1, Constraint::NoMissing).len(), 3);
        let planar = LinkState::enumerate(3, 1, Constraint::PlanarNoMissing);
        assert_eq!(planar, vec![ls(3, &[(1, 2)], &[3], &[]), ls(3, &[(2, 3)], &[1], &[])]);
        for c in [Constraint::Any, Constraint::NoMissing, Constraint::PlanarNoMissing, Constraint::NoConnections] {
            assert_eq!(LinkState::enumerate(4, 4, c), vec![LinkState::all_defects(4)]);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=4 {
            for i in 0..=n {
                for c in [Constraint::Any, Constraint::NoMissing, Constraint::PlanarNoMissing, Constraint::NoConnections] {
                    assert_eq!(LinkState::enumerate(n, i, c), brute_force(n, i, c), "n={n} i={i} {c:?}");
                }
            }
        }
    }

    #[test]
    fn planar_enumeration_matches_filter() {
        for n in 1..=9 {
            for i in 0..=n {
                let filtered: Vec<_> = LinkState::enumerate(n, i, Constraint::NoMissing)
                    .into_iter()
                    .filter(|p| p.is_planar())
                    .collect();
                assert_eq!(LinkState::enumerate(n, i, Constraint::PlanarNoMissing), filtered);
            }
        }
    }

    #[test]
    fn sesqui_brauer7_example() {
        let p = ls(7, &[(2, 3), (4, 7)], &[1, 5, 6], &[]);
        let e = Diagram::from_edges(
            7,
            &[
                (Right(1), Right(5)),
                (Right(4), Right(7)),
                (Left(1), Left(4)),
                (Left(3), Left(2)),
                (Left(5), Right(3)),
                (Left(7), Right(6)),
                (Left(6), Right(2)),
            ],
        )
        .unwrap();
        let mut got = p.sesqui_components(&e).unwrap();
        got.sort();
        let mut expected = vec![
            vec![M(1), M(4), M(7), R(6)],
            vec![M(2), M(3)],
            vec![M(5), R(3)],
            vec![M(6), R(2)],
            vec![R(1), R(5)],
            vec![R(4), R(7)],
        ];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn sesqui_identity() {
        let got = LinkState::all_defects(3).sesqui_components(&Diagram::identity(3)).unwrap();
        assert_eq!(got, vec![vec![M(1), R(1)], vec![M(2), R(2)], vec![M(3), R(3)]]);
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(LinkState::all_defects(3).mirror_diagram().unwrap(), Diagram::identity(3));
        let p = ls(5, &[(1, 4)], &[2, 3, 5], &[]);
        let expected = Diagram::from_edges(
            5,
            &[(Left(1), Left(4)), (Right(1), Right(4)), (Left(2), Right(2)), (Left(3), Right(3)), (Left(5), Right(5))],
        )
        .unwrap();
        assert_eq!(p.mirror_diagram().unwrap(), expected);
        assert_eq!(ls(2, &[], &[1], &[2]).mirror_diagram(), Err(LinkStateError::HasMissing));
    }

    #[test]
    fn mirror_link_states_exhaustive() {
        for n in 1..=6 {
            for p in LinkState::enumerate_all(n, Constraint::NoMissing) {
                let (l, r) = LinkState::extract(&p.mirror_diagram().unwrap());
                assert_eq!((&l, &r), (&p, &p));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = ls(4, &[(3, 1)], &[2], &[4]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":4,"connections":[[1,3]],"defects":[2],"missing":[4]}"#);
        assert_eq!(serde_json::from_str::<LinkState>(&s).unwrap(), p);
        assert!(serde_json::from_str::<LinkState>(r#"{"n":2,"connections":[],"defects":[1],"missing":[]}"#).is_err());
    }

    fn any_diagram(n: usize) -> impl Strategy<Value = Diagram> {
        prop::sample::select(Diagram::enumerate(n, true, true, false))
    }

    proptest! {
        #[test]
        fn product_right_state_reachable(
            (x, y) in (1usize..=4).prop_flat_map(|n| (any_diagram(n), any_diagram(n)))
        ) {
            let p = x.compose(&y).unwrap();
            prop_assert!(LinkState::right_of(&y).reaches(&LinkState::right_of(&p.diagram)).unwrap());
        }

        #[test]
        fn sesqui_is_restriction_of_double(
            (x, y) in (1usize..=4).prop_flat_map(|n| (any_diagram(n), any_diagram(n)))
        ) {
            let p = LinkState::right_of(&x);
            let restricted: Partition = x
                .double_diagram_components(&y)
                .unwrap()
                .into_iter()
                .map(|c| c.into_iter().filter(|v| !matches!(v, DoubleNode::L(_))).collect::<Vec<_>>())
                .filter(|c| !c.is_empty())
                .collect();
            let mut restricted = restricted;
            restricted.sort();
            let mut sesqui = p.sesqui_components(&y).unwrap();
            sesqui.sort();
            prop_assert_eq!(restricted, sesqui);
        }

        #[test]
        fn moves_preserve_partition(p in (1usize..=6).prop_flat_map(|n| prop::sample::select(LinkState::enumerate_all(n, Constraint::Any)))) {
            for q in p.moves() {
                let rebuilt = LinkState::new(q.n(), q.connections().to_vec(), q.defects().to_vec(), q.missing().to_vec());
                prop_assert_eq!(rebuilt, Ok(q.clone()));
                prop_assert!(p.reaches(&q).unwrap());
                for r in q.moves() {
                    prop_assert!(p.reaches(&r).unwrap());
                }
            }
        }

        #[test]
        fn common_descendants_lose_defects(
            (p, q, r) in (2usize..=5).prop_flat_map(|n| {
                let all = LinkState::enumerate_all(n, Constraint::Any);
                (prop::sample::select(all.clone()), prop::sample::select(all.clone()), prop::sample::select(all))
            })
        ) {
            if p != q && p.defect_count() == q.defect_count() && p.reaches(&r).unwrap() && q.reaches(&r).unwrap() {
                prop_assert!(r.defect_count() < p.defect_count());
            }
        }
    }
}
