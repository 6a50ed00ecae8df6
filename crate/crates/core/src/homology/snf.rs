use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::SparseMatrix;

type Dense = Vec<Vec<BigInt>>;

/// Smith normal form `U · M · V = D` of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    /// Nonzero diagonal entries of `D`, positive, each dividing the next.
    pub factors: Vec<BigInt>,
    pub u: Dense,
    pub v: Dense,
    pub d: Dense,
}

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Work<'a> {
    a: Dense,
    rows: usize,
    cols: usize,
    u: Option<&'a mut Dense>,
    v: Option<&'a mut Dense>,
}

impl Work<'_> {
    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap(i, k);
        if let Some(u) = self.u.as_deref_mut() {
            u.swap(i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        for row in &mut self.a {
            row.swap(j, k);
        }
        if let Some(v) = self.v.as_deref_mut() {
            for row in v.iter_mut() {
                row.swap(j, k);
            }
        }
    }

    /// row_i += f · row_k
    fn add_row(&mut self, i: usize, k: usize, f: &BigInt) {
        for j in 0..self.cols {
            let t = &self.a[k][j] * f;
            self.a[i][j] += t;
        }
        if let Some(u) = self.u.as_deref_mut() {
            for j in 0..u[k].len() {
                let t = &u[k][j] * f;
                u[i][j] += t;
            }
        }
    }

    /// col_j += f · col_k
    fn add_col(&mut self, j: usize, k: usize, f: &BigInt) {
        for i in 0..self.rows {
            let t = &self.a[i][k] * f;
            self.a[i][j] += t;
        }
        if let Some(v) = self.v.as_deref_mut() {
            for row in v.iter_mut() {
                let t = &row[k] * f;
                row[j] += t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = self.u.as_deref_mut() {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    /// Position of a smallest nonzero entry in the lower-right block at `t`.
    fn smallest_from(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                if !self.a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| self.a[i][j].abs() < self.a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) -> Vec<BigInt> {
        let mut factors = Vec::new();
        let mut t = 0;
        while t < self.rows.min(self.cols) {
            let Some((i, j)) = self.smallest_from(t) else { break };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                let mut clean = true;
                for i in t + 1..self.rows {
                    if !self.a[i][t].is_zero() {
                        let q = &self.a[i][t] / &self.a[t][t];
                        self.add_row(i, t, &-q);
                        clean &= self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..self.cols {
                    if !self.a[t][j].is_zero() {
                        let q = &self.a[t][j] / &self.a[t][t];
                        self.add_col(j, t, &-q);
                        clean &= self.a[t][j].is_zero();
                    }
                }
                if !clean {
                    // a smaller remainder sits in row or column t; make it the pivot
                    let col_best = (t + 1..self.rows)
                        .filter(|&i| !self.a[i][t].is_zero())
                        .min_by(|&x, &y| self.a[x][t].abs().cmp(&self.a[y][t].abs()));
                    if let Some(i) = col_best.filter(|&i| self.a[i][t].abs() < self.a[t][t].abs()) {
                        self.swap_rows(t, i);
                    }
                    let row_best = (t + 1..self.cols)
                        .filter(|&j| !self.a[t][j].is_zero())
                        .min_by(|&x, &y| self.a[t][x].abs().cmp(&self.a[t][y].abs()));
                    if let Some(j) = row_best.filter(|&j| self.a[t][j].abs() < self.a[t][t].abs()) {
                        self.swap_cols(t, j);
                    }
                    continue;
                }
                let pivot = self.a[t][t].clone();
                let offender = (t + 1..self.rows).find(|&i| {
                    (t + 1..self.cols).any(|j| !(&self.a[i][j] % &pivot).is_zero())
                });
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            factors.push(self.a[t][t].clone());
            t += 1;
        }
        factors
    }
}

/// Smith normal form with unimodular transforms. Dense; meant for small
/// matrices.
pub fn smith_normal_form(m: &SparseMatrix) -> Snf {
    let a: Dense = m
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut w = Work {
        a,
        rows,
        cols,
        u: Some(&mut u),
        v: Some(&mut v),
    };
    let factors = w.run();
    let d = w.a;
    Snf { factors, u, v, d }
}

/// Nonzero invariant factors of a dense matrix, in divisibility order.
pub(crate) fn invariant_factors(a: Dense) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    Work {
        a,
        rows,
        cols,
        u: None,
        v: None,
    }
    .run()
}
