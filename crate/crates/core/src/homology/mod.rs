//! `Tor^A_*(𝟙, 𝟙)` for augmented diagram algebras, computed from the
//! normalized bar complex over a prime field or the integers.

mod bar;
mod group;
mod snf;
mod sparse;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::family::{AlgebraContext, FamilyError};
use crate::ring::{RingElem, RingSpec};

pub use bar::{reduced_bar_complex, unreduced_bar_complex, ChainComplex};
pub use group::{group_homology_oracle, GroupAlgebra};
pub use snf::{smith_normal_form, Snf};
pub use sparse::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("homology needs a prime field or the integers, not {0}")]
    UnsupportedRing(String),
    #[error("parameters must be specialized to numbers before computing homology")]
    NeedsSpecialization,
    #[error("structure constant {0} is not an integer")]
    NonIntegral(String),
    #[error("degree {q} out of range (complex stops at {top})")]
    DegreeOutOfRange { q: usize, top: usize },
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("chain group in degree {q} has {cells} generators, beyond the index range")]
    TooLarge { q: usize, cells: u128 },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("d∘d ≠ 0 in degree {0}")]
    NotAComplex(usize),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// How matrix entries are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// Residues modulo a prime.
    Prime(u64),
    /// Integers; over the rationals only ranks are read off.
    Integers { rational: bool },
}

impl Coefficients {
    pub fn of(ring: &RingSpec) -> Result<Self, HomologyError> {
        match *ring {
            RingSpec::PrimeField { p } => Ok(Coefficients::Prime(p)),
            RingSpec::IntegersMod { m } if is_prime(m) => Ok(Coefficients::Prime(m)),
            RingSpec::IntegersMod { .. } => Err(HomologyError::UnsupportedRing(ring.short_name())),
            RingSpec::Integers => Ok(Coefficients::Integers { rational: false }),
            RingSpec::Rationals => Ok(Coefficients::Integers { rational: true }),
            RingSpec::ParamPoly | RingSpec::ParamLaurent => Err(HomologyError::NeedsSpecialization),
        }
    }

    pub(crate) fn modulus(self) -> Option<u64> {
        match self {
            Coefficients::Prime(p) => Some(p),
            Coefficients::Integers { .. } => None,
        }
    }

    pub(crate) fn reduce(self, v: i64) -> i64 {
        match self {
            Coefficients::Prime(p) => v.rem_euclid(p as i64),
            Coefficients::Integers { .. } => v,
        }
    }

    /// An integer representative of a ring element.
    pub fn lift(self, ring: &RingSpec, x: &RingElem) -> Result<i64, HomologyError> {
        let v = ring
            .integer_lift(x)
            .ok_or_else(|| HomologyError::NonIntegral(x.to_string()))?;
        let v = match self {
            Coefficients::Prime(p) => {
                let r = v % BigInt::from(p);
                r.to_i64().expect("residue fits")
            }
            Coefficients::Integers { .. } => v.to_i64().ok_or(HomologyError::Overflow)?,
        };
        Ok(self.reduce(v))
    }
}

fn is_prime(m: u64) -> bool {
    m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
}

/// An algebra with a basis, a unit basis element and an augmentation taking
/// each basis element to 0 or 1.
pub trait AugmentedAlgebra: Sync {
    fn ring(&self) -> &RingSpec;
    fn dim(&self) -> usize;
    fn unit_index(&self) -> usize;
    fn augmentation_of(&self, i: usize) -> bool;
    /// `b_i b_j` as a single scaled basis element, or zero.
    fn structure(&self, i: usize, j: usize) -> Result<Option<(usize, RingElem)>, HomologyError>;
}

impl AugmentedAlgebra for AlgebraContext {
    fn ring(&self) -> &RingSpec {
        AlgebraContext::ring(self)
    }

    fn dim(&self) -> usize {
        AlgebraContext::dim(self)
    }

    fn unit_index(&self) -> usize {
        self.identity_index()
    }

    fn augmentation_of(&self, i: usize) -> bool {
        let d = &self.basis()[i];
        d.through_count() == d.n()
    }

    fn structure(&self, i: usize, j: usize) -> Result<Option<(usize, RingElem)>, HomologyError> {
        Ok(self
            .product(i, j)?
            .map(|p| (p.index, self.coefficient(p.delta_exp, p.eps_exp))))
    }
}

impl<A: AugmentedAlgebra + Send + ?Sized> AugmentedAlgebra for Arc<A> {
    fn ring(&self) -> &RingSpec {
        (**self).ring()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn unit_index(&self) -> usize {
        (**self).unit_index()
    }
    fn augmentation_of(&self, i: usize) -> bool {
        (**self).augmentation_of(i)
    }
    fn structure(&self, i: usize, j: usize) -> Result<Option<(usize, RingElem)>, HomologyError> {
        (**self).structure(i, j)
    }
}

/// A homology group: a dimension over a field, or a free rank and torsion
/// invariant factors over the integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomologyGroup {
    Field { dim: usize },
    Integral { free_rank: usize, torsion: Vec<u64> },
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        match self {
            HomologyGroup::Field { dim } => *dim == 0,
            HomologyGroup::Integral { free_rank, torsion } => *free_rank == 0 && torsion.is_empty(),
        }
    }

    /// Dimension over a field, or free rank over the integers.
    pub fn rank(&self) -> usize {
        match self {
            HomologyGroup::Field { dim } => *dim,
            HomologyGroup::Integral { free_rank, .. } => *free_rank,
        }
    }

    pub fn torsion(&self) -> &[u64] {
        match self {
            HomologyGroup::Field { .. } => &[],
            HomologyGroup::Integral { torsion, .. } => torsion,
        }
    }

    pub fn integral(free_rank: usize, torsion: &[u64]) -> Self {
        HomologyGroup::Integral {
            free_rank,
            torsion: torsion.to_vec(),
        }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomologyGroup::Field { dim } => write!(f, "{dim}"),
            HomologyGroup::Integral { free_rank, torsion } => {
                let mut parts = Vec::new();
                match free_rank {
                    0 => {}
                    1 => parts.push("ℤ".to_string()),
                    r => parts.push(format!("ℤ^{r}")),
                }
                parts.extend(torsion.iter().map(|t| format!("ℤ/{t}")));
                if parts.is_empty() {
                    f.write_str("0")
                } else {
                    f.write_str(&parts.join(" ⊕ "))
                }
            }
        }
    }
}

/// Rank of a matrix and its invariant factors (over the integers only).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct MatrixInvariants {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<u64>,
}

pub(crate) fn matrix_invariants(m: &SparseMatrix, coeffs: Coefficients) -> Result<MatrixInvariants, HomologyError> {
    let elim = sparse::eliminate(m, coeffs.modulus())?;
    if coeffs.modulus().is_some() || elim.residual.is_empty() {
        return Ok(MatrixInvariants {
            rank: elim.pivots,
            torsion: Vec::new(),
        });
    }
    let dense = elim.residual_dense();
    let factors = snf::invariant_factors(dense);
    let mut torsion = Vec::new();
    for t in &factors {
        if !t.is_one() {
            torsion.push(t.to_u64().ok_or(HomologyError::Overflow)?);
        }
    }
    Ok(MatrixInvariants {
        rank: elim.pivots + factors.len(),
        torsion,
    })
}

fn group_from(coeffs: Coefficients, dim: usize, below: &MatrixInvariants, above: &MatrixInvariants) -> HomologyGroup {
    let free = dim - below.rank - above.rank;
    match coeffs {
        Coefficients::Prime(_) | Coefficients::Integers { rational: true } => HomologyGroup::Field { dim: free },
        Coefficients::Integers { rational: false } => HomologyGroup::Integral {
            free_rank: free,
            torsion: above.torsion.clone(),
        },
    }
}

/// `H_q` of a chain complex. The differential out of the top degree is taken
/// to be zero.
pub fn homology_of_complex(c: &ChainComplex, q: usize) -> Result<HomologyGroup, HomologyError> {
    let top = c.dims.len() - 1;
    if q > top {
        return Err(HomologyError::DegreeOutOfRange { q, top });
    }
    let coeffs = Coefficients::of(&c.ring)?;
    let below = matrix_invariants(&c.differentials[q], coeffs)?;
    let above = if q < top {
        matrix_invariants(&c.differentials[q + 1], coeffs)?
    } else {
        MatrixInvariants::default()
    };
    Ok(group_from(coeffs, c.dims[q], &below, &above))
}

/// `H_0, ..., H_{max_degree}` of a complex whose top degree is at least
/// `max_degree + 1`. Ranks of the differentials are computed in parallel.
pub fn homology_groups(c: &ChainComplex, max_degree: usize) -> Result<Vec<HomologyGroup>, HomologyError> {
    let top = c.dims.len() - 1;
    if max_degree + 1 > top {
        return Err(HomologyError::DegreeOutOfRange { q: max_degree + 1, top });
    }
    let coeffs = Coefficients::of(&c.ring)?;
    let invariants: Vec<MatrixInvariants> = (0..=max_degree + 1)
        .into_par_iter()
        .map(|q| matrix_invariants(&c.differentials[q], coeffs))
        .collect::<Result<_, _>>()?;
    Ok((0..=max_degree)
        .map(|q| group_from(coeffs, c.dims[q], &invariants[q], &invariants[q + 1]))
        .collect())
}

/// `Tor_q(𝟙, 𝟙)` for `q = 0..=max_degree`.
pub fn tor_trivial<A: AugmentedAlgebra + ?Sized>(alg: &A, max_degree: usize) -> Result<Vec<HomologyGroup>, HomologyError> {
    let c = reduced_bar_complex(alg, max_degree + 1)?;
    homology_groups(&c, max_degree)
}

/// Number of generators in the normalized bar complex through `top`.
pub fn bar_cells(augmentation_ideal_dim: usize, top: usize) -> u128 {
    (0..=top as u32).map(|q| (augmentation_ideal_dim as u128).saturating_pow(q)).sum()
}

/// One row of a homology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyRow {
    pub family: String,
    pub n: usize,
    pub ring: String,
    pub delta: String,
    pub eps: String,
    pub floor: Option<usize>,
    pub q: usize,
    pub group: HomologyGroup,
}

impl HomologyRow {
    pub fn rows_for(ctx: &AlgebraContext, groups: &[HomologyGroup]) -> Vec<HomologyRow> {
        let spec = ctx.spec();
        groups
            .iter()
            .enumerate()
            .map(|(q, g)| HomologyRow {
                family: spec.family.short_name().to_string(),
                n: spec.n,
                ring: spec.ring.short_name(),
                delta: spec.delta.to_string(),
                eps: spec.eps.to_string(),
                floor: spec.floor,
                q,
                group: g.clone(),
            })
            .collect()
    }

    pub const CSV_HEADER: &'static str = "family,n,ring,delta,eps,floor,q,rank,torsion";

    pub fn to_csv(&self) -> String {
        let torsion: Vec<String> = self.group.torsion().iter().map(u64::to_string).collect();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.ring,
            self.delta,
            self.eps,
            self.floor.map_or(String::new(), |k| k.to_string()),
            self.q,
            self.group.rank(),
            torsion.join(";")
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "n": self.n,
            "ring": self.ring,
            "delta": self.delta,
            "eps": self.eps,
            "floor": self.floor,
            "q": self.q,
            "rank": self.group.rank(),
            "torsion": self.group.torsion(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ContextSpec, Family};

    fn f(p: u64) -> RingSpec {
        RingSpec::prime_field(p).unwrap()
    }

    fn dims(groups: &[HomologyGroup]) -> Vec<usize> {
        groups.iter().map(HomologyGroup::rank).collect()
    }

    #[test]
    fn zero_differentials() {
        let c = ChainComplex::new(
            f(2),
            vec![1, 3],
            vec![SparseMatrix::zero(0, 1), SparseMatrix::zero(1, 3)],
        )
        .unwrap();
        assert_eq!(homology_of_complex(&c, 1).unwrap(), HomologyGroup::Field { dim: 3 });
        assert!(matches!(homology_of_complex(&c, 2), Err(HomologyError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn multiplication_by_two() {
        let d1 = SparseMatrix::from_columns(1, vec![vec![(0, 2)]]);
        let c = ChainComplex::new(RingSpec::Integers, vec![1, 1], vec![SparseMatrix::zero(0, 1), d1.clone()]).unwrap();
        assert_eq!(homology_of_complex(&c, 0).unwrap(), HomologyGroup::integral(0, &[2]));
        assert_eq!(homology_of_complex(&c, 1).unwrap(), HomologyGroup::integral(0, &[]));
        let c2 = ChainComplex::new(f(2), vec![1, 1], vec![SparseMatrix::zero(0, 1), d1]).unwrap();
        assert_eq!(dims(&[homology_of_complex(&c2, 0).unwrap(), homology_of_complex(&c2, 1).unwrap()]), vec![1, 1]);
    }

    #[test]
    fn rejects_unsupported_rings() {
        let c = ContextSpec::new(Family::TemperleyLieb, 2, RingSpec::ParamPoly).build().unwrap();
        assert_eq!(tor_trivial(&*c, 1), Err(HomologyError::NeedsSpecialization));
        let z6 = ContextSpec::new(Family::TemperleyLieb, 2, RingSpec::integers_mod(6).unwrap()).build().unwrap();
        assert!(matches!(tor_trivial(&*z6, 1), Err(HomologyError::UnsupportedRing(_))));
        let z5 = ContextSpec::new(Family::TemperleyLieb, 2, RingSpec::integers_mod(5).unwrap()).build().unwrap();
        assert!(tor_trivial(&*z5, 1).is_ok());
    }

    #[test]
    fn tl3_dims_and_vanishing() {
        let c = ContextSpec::new(Family::TemperleyLieb, 3, f(2)).delta_int(0).build().unwrap();
        let cx = reduced_bar_complex(&*c, 4).unwrap();
        assert_eq!(cx.dims, vec![1, 4, 16, 64, 256]);
        assert_eq!(dims(&homology_groups(&cx, 3).unwrap()), vec![1, 0, 0, 0]);
    }

    #[test]
    fn rook2_matches_sigma2_over_integers() {
        let c = ContextSpec::new(Family::Rook, 2, RingSpec::Integers).eps_int(1).build().unwrap();
        let got = tor_trivial(&*c, 3).unwrap();
        let expected = vec![
            HomologyGroup::integral(1, &[]),
            HomologyGroup::integral(0, &[2]),
            HomologyGroup::integral(0, &[]),
            HomologyGroup::integral(0, &[2]),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn degree_zero_is_the_ring() {
        for family in Family::ALL {
            for n in 1..=3 {
                for ring in [f(2), f(3), RingSpec::Integers, RingSpec::Rationals] {
                    let c = ContextSpec::new(family, n, ring.clone()).build().unwrap();
                    let h = tor_trivial(&*c, 0).unwrap();
                    let expected = match ring {
                        RingSpec::Integers => HomologyGroup::integral(1, &[]),
                        _ => HomologyGroup::Field { dim: 1 },
                    };
                    assert_eq!(h, vec![expected]);
                }
            }
        }
    }

    #[test]
    fn reduced_and_unreduced_agree() {
        for family in Family::ALL {
            for n in 1..=3 {
                for (ring, delta) in [(f(2), 0), (f(3), 1), (RingSpec::Integers, 0), (RingSpec::Integers, 2)] {
                    let c = ContextSpec::new(family, n, ring).delta_int(delta).build().unwrap();
                    if c.dim() > 15 {
                        continue;
                    }
                    let reduced = tor_trivial(&*c, 2).unwrap();
                    let full = unreduced_bar_complex(&*c, 3).unwrap();
                    assert_eq!(homology_groups(&full, 2).unwrap(), reduced, "{}", c.spec());
                }
            }
        }
    }

    #[test]
    fn field_dims_bound_free_ranks() {
        for family in Family::ALL {
            for n in 1..=3 {
                let z = ContextSpec::new(family, n, RingSpec::Integers).delta_int(0).build().unwrap();
                if z.dim() > 20 {
                    continue;
                }
                let zh = tor_trivial(&*z, 2).unwrap();
                for p in [2, 3] {
                    let fp = ContextSpec::new(family, n, f(p)).delta_int(0).build().unwrap();
                    let fh = tor_trivial(&*fp, 2).unwrap();
                    for (a, b) in fh.iter().zip(&zh) {
                        assert!(a.rank() >= b.rank());
                    }
                }
            }
        }
    }

    #[test]
    fn csv_row_format() {
        let c = ContextSpec::new(Family::Rook, 2, RingSpec::Integers).eps_int(1).build().unwrap();
        let rows = HomologyRow::rows_for(&c, &tor_trivial(&*c, 1).unwrap());
        assert_eq!(rows[1].to_csv(), "rook,2,z,1,1,,1,0,2");
        assert_eq!(rows[1].to_json()["torsion"], json!([2]));
    }

    #[test]
    fn display_groups() {
        assert_eq!(HomologyGroup::integral(2, &[2, 6]).to_string(), "ℤ^2 ⊕ ℤ/2 ⊕ ℤ/6");
        assert_eq!(HomologyGroup::integral(0, &[]).to_string(), "0");
        assert_eq!(HomologyGroup::Field { dim: 3 }.to_string(), "3");
    }
}
