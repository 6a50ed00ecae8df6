use std::sync::Arc;

use diagcat::homology::{
    reduced_bar_complex, tor_trivial, unreduced_bar_complex, homology_groups, AugmentedAlgebra, HomologyError,
    HomologyGroup,
};
use diagcat::{AlgebraContext, AlgebraElement, ContextSpec, Family, RingElem, RingSpec};
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn ctx(family: Family, n: usize, ring: RingSpec, delta: i64, eps: i64) -> Arc<AlgebraContext> {
    ContextSpec::new(family, n, ring).delta_int(delta).eps_int(eps).build().unwrap()
}

fn rank_mod(mut rows: Vec<Vec<i64>>, p: i64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c].rem_euclid(p) != 0) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|k| (k * rows[rank][c]).rem_euclid(p) == 1).unwrap();
        for r in 0..rows.len() {
            if r != rank && rows[r][c].rem_euclid(p) != 0 {
                let f = (rows[r][c] * inv).rem_euclid(p);
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] - f * rows[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim I/I²` for the augmentation ideal `I`, from products of algebra
/// elements alone.
fn indecomposables(ctx: &Arc<AlgebraContext>, p: i64) -> usize {
    let ring = ctx.ring();
    let unit = ctx.identity_index();
    let one = AlgebraElement::unit(ctx);
    let gens: Vec<AlgebraElement> = (0..ctx.dim())
        .filter(|&k| k != unit)
        .map(|k| {
            let b = AlgebraElement::basis_element(ctx, k);
            let aug = ctx.augmentation(&ctx.basis()[k]);
            b.add(&one.scale(&ring.neg(&aug))).unwrap()
        })
        .collect();
    let coords = |x: &AlgebraElement| -> Vec<i64> {
        (0..ctx.dim())
            .filter(|&k| k != unit)
            .map(|k| {
                let c: RingElem = x.coefficient(&ctx.basis()[k]);
                ring.integer_lift(&c).unwrap().to_i64().unwrap()
            })
            .collect()
    };
    let mut products = Vec::new();
    for a in &gens {
        for b in &gens {
            products.push(coords(&a.multiply(b).unwrap()));
        }
    }
    gens.len() - rank_mod(products, p)
}

#[test]
fn first_homology_is_the_indecomposables() {
    for family in Family::ALL {
        for n in 1..=3 {
            for p in [2u64, 3] {
                for (delta, eps) in [(0, 0), (0, 1), (1, 1), (2, 1)] {
                    let c = ctx(family, n, RingSpec::prime_field(p).unwrap(), delta, eps);
                    if c.dim() > 40 {
                        continue;
                    }
                    let tor = tor_trivial(&*c, 1).unwrap();
                    assert_eq!(tor[0].rank(), 1);
                    assert_eq!(tor[1].rank(), indecomposables(&c, p as i64), "{}", c.spec());
                }
            }
        }
    }
}

#[test]
fn rook_brauer_and_brauer_differ_when_delta_is_not_a_unit() {
    let f3 = RingSpec::prime_field(3).unwrap();
    let rbr = ctx(Family::RookBrauer, 2, f3.clone(), 0, 1);
    let br = ctx(Family::Brauer, 2, f3, 0, 1);
    assert_eq!(indecomposables(&rbr, 3), 0);
    assert_eq!(indecomposables(&br, 3), 1);
    assert_eq!(tor_trivial(&*rbr, 1).unwrap()[1].rank(), 0);
    assert_eq!(tor_trivial(&*br, 1).unwrap()[1].rank(), 1);
}

#[test]
fn normalized_and_unnormalized_complexes_agree() {
    for family in Family::ALL {
        for ring in [RingSpec::Integers, RingSpec::prime_field(2).unwrap()] {
            let c = ctx(family, 2, ring, 0, 1);
            let top = if c.dim() > 5 { 2 } else { 3 };
            let small = homology_groups(&reduced_bar_complex(&*c, top).unwrap(), top - 1).unwrap();
            let big = homology_groups(&unreduced_bar_complex(&*c, top).unwrap(), top - 1).unwrap();
            assert_eq!(small, big, "{}", c.spec());
        }
    }
}

/// Dimensions over F_p predicted from the integral groups.
fn universal_coefficients(z: &[HomologyGroup], p: u64) -> Vec<usize> {
    let divisible = |h: &HomologyGroup| h.torsion().iter().filter(|&&t| t % p == 0).count();
    (0..z.len())
        .map(|q| z[q].rank() + divisible(&z[q]) + if q > 0 { divisible(&z[q - 1]) } else { 0 })
        .collect()
}

#[test]
fn field_homology_follows_from_integral_homology() {
    for (family, n, delta) in [
        (Family::Brauer, 2, 0),
        (Family::Brauer, 2, 3),
        (Family::Rook, 2, 1),
        (Family::TemperleyLieb, 2, 0),
        (Family::RookBrauer, 2, 0),
    ] {
        let z = tor_trivial(&*ctx(family, n, RingSpec::Integers, delta, 1), 3).unwrap();
        for p in [2u64, 3] {
            let f = tor_trivial(&*ctx(family, n, RingSpec::prime_field(p).unwrap(), delta, 1), 2).unwrap();
            let predicted = universal_coefficients(&z, p);
            let dims: Vec<usize> = f.iter().map(HomologyGroup::rank).collect();
            assert_eq!(dims, predicted[..3].to_vec(), "{family} n={n} δ={delta} p={p}");
        }
    }
}

#[test]
fn rational_homology_is_the_free_part() {
    let q = tor_trivial(&*ctx(Family::Brauer, 2, RingSpec::Rationals, 0, 1), 3).unwrap();
    let z = tor_trivial(&*ctx(Family::Brauer, 2, RingSpec::Integers, 0, 1), 3).unwrap();
    assert_eq!(
        q.iter().map(HomologyGroup::rank).collect::<Vec<_>>(),
        z.iter().map(HomologyGroup::rank).collect::<Vec<_>>()
    );
    assert!(matches!(
        tor_trivial(&*ContextSpec::new(Family::Brauer, 2, RingSpec::ParamPoly).build().unwrap(), 1),
        Err(HomologyError::NeedsSpecialization)
    ));
}

/// The same algebra with its basis listed in another order.
struct Relabelled {
    inner: Arc<AlgebraContext>,
    /// new index → old index
    order: Vec<usize>,
    inverse: Vec<usize>,
}

impl AugmentedAlgebra for Relabelled {
    fn ring(&self) -> &RingSpec {
        self.inner.ring()
    }
    fn dim(&self) -> usize {
        self.order.len()
    }
    fn unit_index(&self) -> usize {
        self.inverse[self.inner.identity_index()]
    }
    fn augmentation_of(&self, i: usize) -> bool {
        self.inner.augmentation_of(self.order[i])
    }
    fn structure(&self, i: usize, j: usize) -> Result<Option<(usize, RingElem)>, HomologyError> {
        Ok(self.inner.structure(self.order[i], self.order[j])?.map(|(k, c)| (self.inverse[k], c)))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homology_ignores_basis_order(
        which in 0usize..3,
        keys in prop::collection::vec(any::<u32>(), 14),
        integral in any::<bool>(),
    ) {
        let ring = if integral { RingSpec::Integers } else { RingSpec::prime_field(2).unwrap() };
        let (family, n) = [(Family::Brauer, 2), (Family::TemperleyLieb, 3), (Family::Rook, 2)][which];
        let inner = ctx(family, n, ring, 0, 1);
        let mut order: Vec<usize> = (0..inner.dim()).collect();
        order.sort_by_key(|&i| (keys[i % keys.len()], i));
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let relabelled = Relabelled { inner: inner.clone(), order, inverse };
        prop_assert_eq!(tor_trivial(&relabelled, 2).unwrap(), tor_trivial(&*inner, 2).unwrap());
    }
}
