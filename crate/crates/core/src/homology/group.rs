use std::collections::HashMap;

use super::{tor_trivial, AugmentedAlgebra, HomologyError, HomologyGroup};
use crate::ring::{RingElem, RingSpec};

/// The group algebra of a permutation group, with every group element
/// augmenting to 1. Elements are image lists `[σ(1), ..., σ(n)]`; the product
/// of `τ` and `σ` is `τ ∘ σ`.
pub struct GroupAlgebra {
    ring: RingSpec,
    elements: Vec<Vec<usize>>,
    table: Vec<usize>,
    unit: usize,
}

impl GroupAlgebra {
    pub fn new(mut elements: Vec<Vec<usize>>, ring: RingSpec) -> Result<Self, HomologyError> {
        elements.sort();
        elements.dedup();
        let n = elements.first().map(Vec::len).ok_or_else(|| HomologyError::NotAGroup("empty".into()))?;
        for s in &elements {
            let mut seen = vec![false; n + 1];
            let ok = s.len() == n && s.iter().all(|&v| v >= 1 && v <= n && !std::mem::replace(&mut seen[v], true));
            if !ok {
                return Err(HomologyError::NotAGroup(format!("{s:?} is not a permutation of 1..={n}")));
            }
        }
        let index: HashMap<&Vec<usize>, usize> = elements.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let identity: Vec<usize> = (1..=n).collect();
        let unit = *index
            .get(&identity)
            .ok_or_else(|| HomologyError::NotAGroup("identity missing".into()))?;
        let mut table = Vec::with_capacity(elements.len() * elements.len());
        for t in &elements {
            for s in &elements {
                let ts: Vec<usize> = (0..n).map(|i| t[s[i] - 1]).collect();
                let k = *index
                    .get(&ts)
                    .ok_or_else(|| HomologyError::NotAGroup(format!("not closed: {t:?}∘{s:?} = {ts:?}")))?;
                table.push(k);
            }
        }
        // a finite set closed under composition is closed under inverses
        Ok(GroupAlgebra {
            ring,
            elements,
            table,
            unit,
        })
    }

    /// The full symmetric group on `n` letters.
    pub fn symmetric(n: usize, ring: RingSpec) -> Self {
        let mut perms = vec![Vec::new()];
        for k in 1..=n {
            perms = perms
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..k).map(move |pos| {
                        let mut q = p.clone();
                        q.insert(pos, k);
                        q
                    })
                })
                .collect();
        }
        Self::new(perms, ring).expect("the symmetric group is a group")
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }
}

impl AugmentedAlgebra for GroupAlgebra {
    fn ring(&self) -> &RingSpec {
        &self.ring
    }

    fn dim(&self) -> usize {
        self.elements.len()
    }

    fn unit_index(&self) -> usize {
        self.unit
    }

    fn augmentation_of(&self, _: usize) -> bool {
        true
    }

    fn structure(&self, i: usize, j: usize) -> Result<Option<(usize, RingElem)>, HomologyError> {
        Ok(Some((self.table[i * self.elements.len() + j], self.ring.one())))
    }
}

/// Group homology `H_q(G; R)` for `q = 0..=max_degree`.
pub fn group_homology_oracle(
    elements: Vec<Vec<usize>>,
    ring: RingSpec,
    max_degree: usize,
) -> Result<Vec<HomologyGroup>, HomologyError> {
    let g = GroupAlgebra::new(elements, ring)?;
    tor_trivial(&g, max_degree)
}
