use rayon::prelude::*;

use super::sparse::{normalize, SparseMatrix};
use super::{AugmentedAlgebra, Coefficients, HomologyError};
use crate::ring::RingSpec;

/// A bounded chain complex of free modules. `differentials[q]` maps degree
/// `q` to degree `q - 1`; `differentials[0]` is the zero map out of degree 0.
/// Entries are integers, read modulo `p` over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub ring: RingSpec,
    pub dims: Vec<usize>,
    pub differentials: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// Checks shapes and that consecutive differentials compose to zero.
    pub fn new(ring: RingSpec, dims: Vec<usize>, differentials: Vec<SparseMatrix>) -> Result<Self, HomologyError> {
        assert_eq!(dims.len(), differentials.len(), "one differential per degree");
        for (q, d) in differentials.iter().enumerate() {
            let target = if q == 0 { 0 } else { dims[q - 1] };
            assert!(d.rows() == target && d.cols() == dims[q], "differential {q} has the wrong shape");
        }
        let c = ChainComplex {
            ring,
            dims,
            differentials,
        };
        c.check_square_zero()?;
        Ok(c)
    }

    fn check_square_zero(&self) -> Result<(), HomologyError> {
        let modulus = Coefficients::of(&self.ring)?.modulus();
        for q in 2..self.dims.len() {
            if !self.differentials[q - 1].mul(&self.differentials[q], modulus)?.is_zero() {
                return Err(HomologyError::NotAComplex(q));
            }
        }
        Ok(())
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }
}

/// Multiplication of the chosen basis, one sparse row per pair of indices.
struct Products {
    size: usize,
    table: Vec<Vec<(u32, i64)>>,
}

impl Products {
    fn get(&self, i: usize, j: usize) -> &[(u32, i64)] {
        &self.table[i * self.size + j]
    }
}

fn full_products<A: AugmentedAlgebra + ?Sized>(alg: &A, coeffs: Coefficients) -> Result<Products, HomologyError> {
    let d = alg.dim();
    let ring = alg.ring();
    let table = (0..d * d)
        .into_par_iter()
        .map(|ij| {
            Ok(match alg.structure(ij / d, ij % d)? {
                Some((k, c)) => normalize(vec![(k as u32, coeffs.lift(ring, &c)?)], coeffs.modulus()),
                None => Vec::new(),
            })
        })
        .collect::<Result<_, HomologyError>>()?;
    Ok(Products { size: d, table })
}

/// Products in the augmentation ideal, on the basis `b - ε(b)·1` over the
/// non-unit basis elements.
fn ideal_products<A: AugmentedAlgebra + ?Sized>(alg: &A, coeffs: Coefficients) -> Result<Products, HomologyError> {
    let full = full_products(alg, coeffs)?;
    let unit = alg.unit_index();
    let basis: Vec<usize> = (0..alg.dim()).filter(|&k| k != unit).collect();
    let pos = |k: usize| -> Option<u32> { (k != unit).then(|| (if k < unit { k } else { k - 1 }) as u32) };
    let aug: Vec<bool> = basis.iter().map(|&k| alg.augmentation_of(k)).collect();
    let size = basis.len();
    let mut table = Vec::with_capacity(size * size);
    for (a, &i) in basis.iter().enumerate() {
        for (b, &j) in basis.iter().enumerate() {
            // (b_i - α_i)(b_j - α_j) = b_i b_j - α_j b_i - α_i b_j + α_i α_j;
            // the multiple of 1 cancels against the 1-components of the rest
            let mut terms: Vec<(u32, i64)> = full
                .get(i, j)
                .iter()
                .filter_map(|&(k, c)| pos(k as usize).map(|p| (p, c)))
                .collect();
            if aug[b] {
                terms.push((a as u32, -1));
            }
            if aug[a] {
                terms.push((b as u32, -1));
            }
            table.push(normalize(terms, coeffs.modulus()));
        }
    }
    Ok(Products { size, table })
}

fn checked_pow(base: usize, exp: usize, q: usize) -> Result<usize, HomologyError> {
    let cells = (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX);
    if cells > u32::MAX as u128 {
        return Err(HomologyError::TooLarge { q, cells });
    }
    Ok(cells as usize)
}

/// Bar differential on `size^q` tensors. `ends` gives the augmentation of
/// each basis element when the outer terms survive (unnormalized complex).
fn bar_differential(
    products: &Products,
    ends: Option<&[bool]>,
    q: usize,
    coeffs: Coefficients,
) -> Result<SparseMatrix, HomologyError> {
    let d = products.size;
    let rows = checked_pow(d, q - 1, q - 1)?;
    let cols = checked_pow(d, q, q)?;
    let pow: Vec<usize> = (0..=q).map(|e| d.pow(e as u32)).collect();
    let columns: Vec<Vec<(u32, i64)>> = (0..cols)
        .into_par_iter()
        .map(|x| {
            let mut entries = Vec::new();
            // tensor factors a_1..a_q, a_1 most significant
            let digit = |t: usize| (x / pow[q - t]) % d;
            for i in 1..q {
                let low = pow[q - i - 1];
                let suffix = x % low;
                let prefix = x / (low * d * d);
                let sign = if i % 2 == 1 { -1 } else { 1 };
                for &(k, c) in products.get(digit(i), digit(i + 1)) {
                    let row = (prefix * d + k as usize) * low + suffix;
                    entries.push((row as u32, sign * c));
                }
            }
            if let Some(aug) = ends {
                if aug[digit(1)] {
                    entries.push(((x % pow[q - 1]) as u32, 1));
                }
                if aug[digit(q)] {
                    let sign = if q % 2 == 1 { -1 } else { 1 };
                    entries.push(((x / d) as u32, sign));
                }
            }
            normalize(entries, coeffs.modulus())
        })
        .collect();
    Ok(SparseMatrix::from_normalized(rows, columns))
}

fn assemble(
    ring: &RingSpec,
    products: &Products,
    ends: Option<&[bool]>,
    top: usize,
    coeffs: Coefficients,
) -> Result<ChainComplex, HomologyError> {
    let mut dims = vec![1];
    let mut differentials = vec![SparseMatrix::zero(0, 1)];
    for q in 1..=top {
        let dim = checked_pow(products.size, q, q)?;
        dims.push(dim);
        differentials.push(bar_differential(products, ends, q, coeffs)?);
    }
    ChainComplex::new(ring.clone(), dims, differentials)
}

/// The normalized bar complex `Ā^{⊗q}` through degree `top`, whose
/// homology is `Tor_q(𝟙, 𝟙)`.
pub fn reduced_bar_complex<A: AugmentedAlgebra + ?Sized>(alg: &A, top: usize) -> Result<ChainComplex, HomologyError> {
    let coeffs = Coefficients::of(alg.ring())?;
    let products = ideal_products(alg, coeffs)?;
    assemble(alg.ring(), &products, None, top, coeffs)
}

/// The unnormalized bar complex `A^{⊗q}` through degree `top`. Much larger;
/// used to cross-check the normalized one in low degrees.
pub fn unreduced_bar_complex<A: AugmentedAlgebra + ?Sized>(alg: &A, top: usize) -> Result<ChainComplex, HomologyError> {
    let coeffs = Coefficients::of(alg.ring())?;
    let products = full_products(alg, coeffs)?;
    let aug: Vec<bool> = (0..alg.dim()).map(|k| alg.augmentation_of(k)).collect();
    assemble(alg.ring(), &products, Some(&aug), top, coeffs)
}
