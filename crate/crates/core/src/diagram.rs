//! Rook-Brauer diagrams and their composition.
//!
//! A diagram on `n` strands is a partial matching of `2n` nodes. Externally
//! nodes are numbered `1..=n` on the left (top to bottom) and `n+1..=2n` on
//! the right (top to bottom); that numbering is what the JSON form and
//! [`Diagram::edges`] use.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::unionfind::UnionFind;

const NONE: u8 = u8::MAX;

/// Largest supported strand count (node indices are stored as `u8`).
pub const MAX_STRANDS: usize = 126;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("strand counts differ: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("strand count {0} out of range 1..={MAX_STRANDS}")]
    BadStrandCount(usize),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("node {0} appears in more than one edge")]
    NodeReused(usize),
    #[error("edge joins node {0} to itself")]
    SelfLoop(usize),
    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("diagram has {through} through strands, need {n}")]
    NotFullThrough { through: usize, n: usize },
}

/// A node of a single diagram, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Left(usize),
    Right(usize),
}

impl Node {
    pub fn encode(self, n: usize) -> usize {
        match self {
            Node::Left(i) => i,
            Node::Right(i) => n + i,
        }
    }

    pub fn decode(code: usize, n: usize) -> Node {
        if code <= n {
            Node::Left(code)
        } else {
            Node::Right(code - n)
        }
    }
}

/// A node of a double diagram: left column of `x`, the shared middle
/// column, or the right column of `y`. Ordered `L < M < R`, then by height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DoubleNode {
    L(usize),
    M(usize),
    R(usize),
}

impl fmt::Display for DoubleNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DoubleNode::L(i) => write!(f, "l{i}"),
            DoubleNode::M(i) => write!(f, "m{i}"),
            DoubleNode::R(i) => write!(f, "r{i}"),
        }
    }
}

/// Equivalence classes of nodes, each class sorted, classes sorted.
pub type Partition = Vec<Vec<DoubleNode>>;

/// A rook-Brauer diagram in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    n: u8,
    /// `mate[k]` is the 0-based partner of 0-based node `k`, or `NONE`.
    mate: Vec<u8>,
}

/// A diagram together with the `δ^a ε^b` prefactor produced by a product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledDiagram {
    pub diagram: Diagram,
    pub delta_exp: u32,
    pub eps_exp: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagramFeatures {
    pub planar: bool,
    pub has_missing: bool,
    pub has_left_left: bool,
    pub has_right_right: bool,
    pub through_count: usize,
}

impl Diagram {
    fn check_n(n: usize) -> Result<(), DiagramError> {
        if n == 0 || n > MAX_STRANDS {
            return Err(DiagramError::BadStrandCount(n));
        }
        Ok(())
    }

    /// Builds a diagram from encoded node pairs (`1..=n` left, `n+1..=2n`
    /// right). Edge order and orientation are irrelevant.
    pub fn from_encoded(n: usize, edges: &[(usize, usize)]) -> Result<Self, DiagramError> {
        Self::check_n(n)?;
        let mut mate = vec![NONE; 2 * n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w == 0 || w > 2 * n {
                    return Err(DiagramError::NodeOutOfRange { node: w, n });
                }
            }
            if u == v {
                return Err(DiagramError::SelfLoop(u));
            }
            for w in [u, v] {
                if mate[w - 1] != NONE {
                    return Err(DiagramError::NodeReused(w));
                }
            }
            mate[u - 1] = (v - 1) as u8;
            mate[v - 1] = (u - 1) as u8;
        }
        Ok(Diagram { n: n as u8, mate })
    }

    pub fn from_edges(n: usize, edges: &[(Node, Node)]) -> Result<Self, DiagramError> {
        let enc: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (a.encode(n), b.encode(n))).collect();
        Self::from_encoded(n, &enc)
    }

    pub fn identity(n: usize) -> Self {
        let edges: Vec<_> = (1..=n).map(|i| (i, n + i)).collect();
        Self::from_encoded(n, &edges).expect("identity is valid")
    }

    /// The diagram with no edges at all.
    pub fn empty(n: usize) -> Self {
        Self::from_encoded(n, &[]).expect("empty diagram is valid")
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Partner of a node, if it has one.
    pub fn mate(&self, node: Node) -> Option<Node> {
        let k = node.encode(self.n()) - 1;
        let m = self.mate[k];
        (m != NONE).then(|| Node::decode(m as usize + 1, self.n()))
    }

    /// Canonical edge list: encoded pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.edge_iter().collect()
    }

    fn edge_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(k, &m)| m != NONE && (m as usize) > k)
            .map(|(k, &m)| (k + 1, m as usize + 1))
    }

    pub fn through_count(&self) -> usize {
        let n = self.n();
        (0..n).filter(|&k| self.mate[k] != NONE && (self.mate[k] as usize) >= n).count()
    }

    /// Position of a 0-based node in the cyclic boundary order
    /// left-top → left-bottom → right-bottom → right-top.
    fn boundary_position(&self, k: usize) -> usize {
        let n = self.n();
        if k < n {
            k
        } else {
            2 * n - 1 - (k - n)
        }
    }

    pub fn classify(&self) -> DiagramFeatures {
        let n = self.n();
        let mut has_left_left = false;
        let mut has_right_right = false;
        let mut through_count = 0;
        let mut chords = Vec::new();
        for (u, v) in self.edge_iter() {
            let (a, b) = (u - 1, v - 1);
            match (a < n, b < n) {
                (true, true) => has_left_left = true,
                (false, false) => has_right_right = true,
                _ => through_count += 1,
            }
            let (pa, pb) = (self.boundary_position(a), self.boundary_position(b));
            chords.push((pa.min(pb), pa.max(pb)));
        }
        let planar = chords.iter().enumerate().all(|(i, &(a1, b1))| {
            chords[i + 1..]
                .iter()
                .all(|&(a2, b2)| !((a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1)))
        });
        DiagramFeatures {
            planar,
            has_missing: self.mate.contains(&NONE),
            has_left_left,
            has_right_right,
            through_count,
        }
    }

    /// `d_σ`: the right node `i` joined to the left node `σ(i)`. The
    /// permutation is given as 1-based images `[σ(1), ..., σ(n)]`.
    pub fn from_permutation(sigma: &[usize]) -> Result<Self, DiagramError> {
        let n = sigma.len();
        let mut seen = vec![false; n + 1];
        for &s in sigma {
            if s == 0 || s > n || seen[s] {
                return Err(DiagramError::NotAPermutation(n));
            }
            seen[s] = true;
        }
        let edges: Vec<_> = sigma.iter().enumerate().map(|(i, &s)| (s, n + i + 1)).collect();
        Self::from_encoded(n, &edges)
    }

    /// Inverse of [`Diagram::from_permutation`].
    pub fn to_permutation(&self) -> Result<Vec<usize>, DiagramError> {
        let n = self.n();
        let through = self.through_count();
        if through != n {
            return Err(DiagramError::NotFullThrough { through, n });
        }
        Ok((0..n).map(|i| self.mate[n + i] as usize + 1).collect())
    }

    /// Union-find over the `3n` nodes of the double diagram `(self, y)`:
    /// indices `0..n` are `l`, `n..2n` are `m`, `2n..3n` are `r`.
    fn double_graph(&self, y: &Diagram) -> UnionFind {
        let n = self.n();
        let mut uf = UnionFind::new(3 * n);
        // x occupies l (its left column) and m (its right column)
        for (u, v) in self.edge_iter() {
            uf.union(u - 1, v - 1);
        }
        // y occupies m (its left column) and r (its right column)
        for (u, v) in y.edge_iter() {
            uf.union(u - 1 + n, v - 1 + n);
        }
        uf
    }

    /// Equivalence classes of the double diagram `(self, y)`.
    pub fn double_diagram_components(&self, y: &Diagram) -> Result<Partition, DiagramError> {
        if self.n != y.n {
            return Err(DiagramError::StrandMismatch(self.n(), y.n()));
        }
        let n = self.n();
        let label = |k: usize| match k / n {
            0 => DoubleNode::L(k + 1),
            1 => DoubleNode::M(k - n + 1),
            _ => DoubleNode::R(k - 2 * n + 1),
        };
        let mut uf = self.double_graph(y);
        Ok(uf
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(label).collect())
            .collect())
    }

    /// The product `self · y`: concatenate, then replace each closed loop in
    /// the middle by `δ` and every other middle-only component by `ε`.
    pub fn compose(&self, y: &Diagram) -> Result<ScaledDiagram, DiagramError> {
        if self.n != y.n {
            return Err(DiagramError::StrandMismatch(self.n(), y.n()));
        }
        let n = self.n();
        let mut uf = self.double_graph(y);

        // Per root: first boundary node seen, and middle-component bookkeeping.
        let mut boundary: Vec<u8> = vec![NONE; 3 * n];
        let mut mate = vec![NONE; 2 * n];
        let mut has_boundary = vec![false; 3 * n];
        let mut all_degree_two = vec![true; 3 * n];
        let mut middle_roots = Vec::new();

        for k in (0..n).chain(2 * n..3 * n) {
            let root = uf.find(k);
            has_boundary[root] = true;
            // output node: l_i -> left i, r_j -> right j
            let out = if k < n { k } else { k - n };
            if boundary[root] == NONE {
                boundary[root] = out as u8;
            } else {
                let other = boundary[root] as usize;
                mate[other] = out as u8;
                mate[out] = other as u8;
            }
        }
        for i in 0..n {
            let k = n + i;
            let root = uf.find(k);
            let degree = self.mate[n + i] != NONE;
            let degree2 = y.mate[i] != NONE;
            if !(degree && degree2) {
                all_degree_two[root] = false;
            }
            if !has_boundary[root] {
                middle_roots.push(root);
            }
        }
        middle_roots.sort_unstable();
        middle_roots.dedup();
        let mut delta_exp = 0;
        let mut eps_exp = 0;
        for r in middle_roots {
            if all_degree_two[r] {
                delta_exp += 1;
            } else {
                eps_exp += 1;
            }
        }
        Ok(ScaledDiagram {
            diagram: Diagram { n: self.n, mate },
            delta_exp,
            eps_exp,
        })
    }

    /// All rook-Brauer diagrams on `n` strands subject to the given shape
    /// constraints, in canonical order.
    pub fn enumerate(n: usize, allow_missing: bool, allow_turnbacks: bool, planar: bool) -> Vec<Diagram> {
        if Self::check_n(n).is_err() {
            return Vec::new();
        }
        // work in boundary positions; translate to nodes at the end
        let node_at = |pos: usize| if pos < n { pos } else { 2 * n - 1 - pos + n };
        let side_left = |pos: usize| pos < n;
        let positions: Vec<usize> = (0..2 * n).collect();
        let mut out = Vec::new();
        let mut pairs = Vec::new();
        let ok_pair = |a: usize, b: usize| allow_turnbacks || side_left(a) != side_left(b);
        if planar {
            let mut matchings = Vec::new();
            noncrossing(&positions, allow_missing, &ok_pair, &mut pairs, &mut matchings);
            for m in matchings {
                out.push(m);
            }
        } else {
            all_matchings(&positions, allow_missing, &ok_pair, &mut pairs, &mut out);
        }
        let mut diagrams: Vec<Diagram> = out
            .into_iter()
            .map(|ps| {
                let edges: Vec<_> = ps.iter().map(|&(a, b)| (node_at(a) + 1, node_at(b) + 1)).collect();
                Diagram::from_encoded(n, &edges).expect("enumerated matching is valid")
            })
            .collect();
        diagrams.sort();
        diagrams
    }
}

type Pairs = Vec<(usize, usize)>;

fn all_matchings(
    rest: &[usize],
    allow_missing: bool,
    ok_pair: &dyn Fn(usize, usize) -> bool,
    pairs: &mut Pairs,
    out: &mut Vec<Pairs>,
) {
    let Some((&first, tail)) = rest.split_first() else {
        out.push(pairs.clone());
        return;
    };
    if allow_missing {
        all_matchings(tail, allow_missing, ok_pair, pairs, out);
    }
    for (idx, &other) in tail.iter().enumerate() {
        if !ok_pair(first, other) {
            continue;
        }
        let remaining: Vec<usize> = tail.iter().enumerate().filter(|&(j, _)| j != idx).map(|(_, &v)| v).collect();
        pairs.push((first, other));
        all_matchings(&remaining, allow_missing, ok_pair, pairs, out);
        pairs.pop();
    }
}

/// Noncrossing (partial) matchings of a run of boundary positions.
fn noncrossing(
    run: &[usize],
    allow_missing: bool,
    ok_pair: &dyn Fn(usize, usize) -> bool,
    pairs: &mut Pairs,
    out: &mut Vec<Pairs>,
) {
    // Each result extends `pairs`; we enumerate complete choices for `run`.
    fn go(
        runs: &mut Vec<Vec<usize>>,
        allow_missing: bool,
        ok_pair: &dyn Fn(usize, usize) -> bool,
        pairs: &mut Pairs,
        out: &mut Vec<Pairs>,
    ) {
        let Some(run) = runs.pop() else {
            out.push(pairs.clone());
            return;
        };
        let Some((&first, tail)) = run.split_first() else {
            go(runs, allow_missing, ok_pair, pairs, out);
            runs.push(run);
            return;
        };
        if allow_missing {
            runs.push(tail.to_vec());
            go(runs, allow_missing, ok_pair, pairs, out);
            runs.pop();
        }
        for (idx, &other) in tail.iter().enumerate() {
            let inside = &tail[..idx];
            if !allow_missing && inside.len() % 2 == 1 {
                continue;
            }
            if !ok_pair(first, other) {
                continue;
            }
            pairs.push((first, other));
            runs.push(tail[idx + 1..].to_vec());
            runs.push(inside.to_vec());
            go(runs, allow_missing, ok_pair, pairs, out);
            runs.pop();
            runs.pop();
            pairs.pop();
        }
        runs.push(run);
    }
    let mut runs = vec![run.to_vec()];
    go(&mut runs, allow_missing, ok_pair, pairs, out);
}

impl Ord for Diagram {
    /// Lexicographic on the canonical serialization `(n, edges)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.edge_iter().cmp(other.edge_iter()))
    }
}

impl PartialOrd for Diagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Diagram({self})")
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let name = |k: usize| match Node::decode(k, n) {
            Node::Left(i) => format!("L{i}"),
            Node::Right(i) => format!("R{i}"),
        };
        let parts: Vec<String> = self.edge_iter().map(|(u, v)| format!("{}–{}", name(u), name(v))).collect();
        write!(f, "n={} [{}]", n, parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Diagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DiagramJson {
            n: self.n(),
            edges: self.edge_iter().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Diagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = DiagramJson::deserialize(d)?;
        let edges: Vec<_> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        Diagram::from_encoded(raw.n, &edges).map_err(serde::de::Error::custom)
    }
}
