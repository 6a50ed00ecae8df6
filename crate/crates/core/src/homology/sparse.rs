use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;

use super::HomologyError;

/// A column-major sparse matrix with `i64` entries. Each column is sorted by
/// row and holds no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Builds a matrix from columns of `(row, value)` pairs in any order;
    /// repeated rows are summed and zeros dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let columns = columns.into_iter().map(|c| normalize(c, None)).collect();
        SparseMatrix { rows, columns }
    }

    pub(crate) fn from_normalized(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        SparseMatrix { rows, columns }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let columns = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i as u32, rows[i][j]))
                    .collect()
            })
            .collect();
        SparseMatrix { rows: nrows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i as usize][j] = v;
            }
        }
        out
    }

    /// `self · other`, reduced modulo `modulus` when given.
    pub fn mul(&self, other: &SparseMatrix, modulus: Option<u64>) -> Result<SparseMatrix, HomologyError> {
        assert_eq!(self.cols(), other.rows, "inner dimensions differ");
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc = Vec::new();
                for &(k, v) in col {
                    for &(i, w) in &self.columns[k as usize] {
                        acc.push((i, v.checked_mul(w).ok_or(HomologyError::Overflow)?));
                    }
                }
                Ok(normalize(acc, modulus))
            })
            .collect::<Result<_, HomologyError>>()?;
        Ok(SparseMatrix {
            rows: self.rows,
            columns,
        })
    }
}

/// Sorts by row, sums repeated rows, reduces and drops zeros.
pub(crate) fn normalize(mut entries: Vec<(u32, i64)>, modulus: Option<u64>) -> Vec<(u32, i64)> {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(entries.len());
    for (r, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 += v,
            _ => out.push((r, v)),
        }
    }
    if let Some(p) = modulus {
        for e in &mut out {
            e.1 = e.1.rem_euclid(p as i64);
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

fn inverse_mod(a: i64, p: i64) -> i64 {
    let (mut r0, mut r1, mut s0, mut s1) = (p, a.rem_euclid(p), 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

/// Outcome of eliminating on unit pivots: the number of pivots taken and the
/// columns left over (non-empty only over the integers).
pub(crate) struct Elimination {
    pub pivots: usize,
    pub residual: Vec<Vec<(u32, i64)>>,
}

impl Elimination {
    /// The leftover block as a dense matrix over its occupied rows.
    pub fn residual_dense(&self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<u32> = self.residual.iter().flatten().map(|e| e.0).collect();
        rows.sort_unstable();
        rows.dedup();
        let mut out = vec![vec![BigInt::from(0); self.residual.len()]; rows.len()];
        for (j, col) in self.residual.iter().enumerate() {
            for &(r, v) in col {
                let i = rows.binary_search(&r).expect("row collected above");
                out[i][j] = BigInt::from(v);
            }
        }
        out
    }
}

/// `a - f·b` for sorted sparse vectors; reports rows new to `a`.
fn axpy(
    a: &[(u32, i64)],
    f: i64,
    b: &[(u32, i64)],
    modulus: Option<u64>,
    fresh: &mut Vec<u32>,
) -> Result<Vec<(u32, i64)>, HomologyError> {
    let combine = |x: i64, y: i64| -> Result<i64, HomologyError> {
        match modulus {
            Some(p) => {
                let p = p as i128;
                Ok(((x as i128 - f as i128 * y as i128).rem_euclid(p)) as i64)
            }
            None => f
                .checked_mul(y)
                .and_then(|fy| x.checked_sub(fy))
                .ok_or(HomologyError::Overflow),
        }
    };
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ra = a.get(i).map_or(u32::MAX, |e| e.0);
        let rb = b.get(j).map_or(u32::MAX, |e| e.0);
        let (r, v) = if ra < rb {
            i += 1;
            (ra, a[i - 1].1)
        } else if rb < ra {
            j += 1;
            fresh.push(rb);
            (rb, combine(0, b[j - 1].1)?)
        } else {
            i += 1;
            j += 1;
            (ra, combine(a[i - 1].1, b[j - 1].1)?)
        };
        if v != 0 {
            out.push((r, v));
        }
    }
    Ok(out)
}

/// Markowitz-style elimination. Repeatedly takes the sparsest live column,
/// pivots on its unit entry lying in the sparsest row (ties to the lowest
/// row) and clears that row from every other column. Over a prime field
/// every nonzero entry is a unit and the result is the rank; over the
/// integers only `±1` pivots are used, so the leftover block carries the
/// remaining invariant factors.
pub(crate) fn eliminate(m: &SparseMatrix, modulus: Option<u64>) -> Result<Elimination, HomologyError> {
    let ncols = m.cols();
    let mut cols: Vec<Vec<(u32, i64)>> = m.columns.iter().map(|c| normalize(c.clone(), modulus)).collect();
    let mut alive = vec![true; ncols];
    let mut row_occ: Vec<Vec<u32>> = vec![Vec::new(); m.rows];
    let mut heap = BinaryHeap::new();
    for (c, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_occ[r as usize].push(c as u32);
        }
        if !col.is_empty() {
            heap.push(Reverse((col.len(), c as u32)));
        }
    }
    let is_unit = |v: i64| match modulus {
        Some(_) => v != 0,
        None => v == 1 || v == -1,
    };
    let mut pivots = 0;
    let mut fresh = Vec::new();
    while let Some(Reverse((len, c))) = heap.pop() {
        let c = c as usize;
        if !alive[c] || cols[c].len() != len {
            continue;
        }
        if cols[c].is_empty() {
            alive[c] = false;
            continue;
        }
        let pivot = cols[c]
            .iter()
            .filter(|e| is_unit(e.1))
            .min_by_key(|e| (row_occ[e.0 as usize].len(), e.0))
            .copied();
        // without a unit entry the column waits until an update changes it
        let Some((r, v)) = pivot else { continue };
        pivots += 1;
        alive[c] = false;
        let pivot_col = std::mem::take(&mut cols[c]);
        let occ = std::mem::take(&mut row_occ[r as usize]);
        let v_inv = match modulus {
            Some(p) => inverse_mod(v, p as i64),
            None => v,
        };
        for c2 in occ {
            let c2 = c2 as usize;
            if !alive[c2] {
                continue;
            }
            let Ok(pos) = cols[c2].binary_search_by_key(&r, |e| e.0) else {
                continue;
            };
            let w = cols[c2][pos].1;
            let f = match modulus {
                Some(p) => ((w as i128 * v_inv as i128).rem_euclid(p as i128)) as i64,
                None => w * v_inv,
            };
            fresh.clear();
            let updated = axpy(&cols[c2], f, &pivot_col, modulus, &mut fresh)?;
            debug_assert!(updated.binary_search_by_key(&r, |e| e.0).is_err());
            for &nr in &fresh {
                if nr != r {
                    row_occ[nr as usize].push(c2 as u32);
                }
            }
            cols[c2] = updated;
            heap.push(Reverse((cols[c2].len(), c2 as u32)));
        }
    }
    let residual = cols
        .into_iter()
        .zip(&alive)
        .filter(|(c, &a)| a && !c.is_empty())
        .map(|(c, _)| c)
        .collect();
    Ok(Elimination { pivots, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense Gaussian elimination modulo p.
    fn dense_rank_mod(rows: &[Vec<i64>], p: i64) -> usize {
        let mut a: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|v| v.rem_euclid(p)).collect()).collect();
        let (m, n) = (a.len(), a.first().map_or(0, Vec::len));
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..m).find(|&i| a[i][col] != 0) else { continue };
            a.swap(rank, piv);
            let inv = inverse_mod(a[rank][col], p);
            for i in 0..m {
                if i != rank && a[i][col] != 0 {
                    let f = a[i][col] * inv % p;
                    for j in 0..n {
                        a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..7, 1usize..9).prop_flat_map(|(m, n)| {
            prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], n), m)
        })
    }

    #[test]
    fn inverse_mod_examples() {
        assert_eq!(inverse_mod(2, 5), 3);
        assert_eq!(inverse_mod(4, 7), 2);
    }

    #[test]
    fn normalize_merges_and_reduces() {
        assert_eq!(normalize(vec![(3, 1), (1, 2), (3, -1), (0, 5)], Some(5)), vec![(1, 2)]);
    }

    #[test]
    fn product_of_matrices() {
        let a = SparseMatrix::from_dense(&[vec![1, 2], vec![0, 1]]);
        let b = SparseMatrix::from_dense(&[vec![3, 0], vec![1, 1]]);
        assert_eq!(a.mul(&b, None).unwrap().to_dense(), vec![vec![5, 2], vec![1, 1]]);
        assert_eq!(a.mul(&b, Some(2)).unwrap().to_dense(), vec![vec![1, 0], vec![1, 1]]);
    }

    proptest! {
        #[test]
        fn rank_matches_dense_mod_p(rows in small_matrix(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let m = SparseMatrix::from_dense(&rows);
            let e = eliminate(&m, Some(p)).unwrap();
            prop_assert!(e.residual.is_empty());
            prop_assert_eq!(e.pivots, dense_rank_mod(&rows, p as i64));
        }
    }
}
