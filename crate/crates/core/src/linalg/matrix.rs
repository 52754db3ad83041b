use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rat, Rat};

/// Dense integer matrix, row-major.
///
/// Matrices built by [`IntMatrix::new`] have positive dimensions; column
/// selections may be empty (the weight matrix of the empty support).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::DegenerateWeights("matrix has no rows".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::DegenerateWeights("matrix has no columns".into()));
        }
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
        }
        Ok(IntMatrix { rows: m, cols: n, data: rows.into_iter().flatten().collect() })
    }

    /// Builds from columns; `dim` fixes the row count when `cols` is empty.
    pub fn from_columns(dim: usize, cols: &[Vec<i64>]) -> Self {
        let mut data = vec![0; dim * cols.len()];
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim, "column length");
            for i in 0..dim {
                data[i * cols.len() + j] = c[i];
            }
        }
        IntMatrix { rows: dim, cols: cols.len(), data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<i64>> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    /// Appends one row (used for the extended `[Q; c]` matrix).
    pub fn with_row(&self, row: &[i64]) -> Result<IntMatrix> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: row.len() });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        Ok(IntMatrix { rows: self.rows + 1, cols: self.cols, data })
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn mul_rat_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| rat(self.get(i, j)) * &v[j]).sum())
            .collect()
    }

    /// `v^T M` for a rational row vector `v` of length `rows`.
    pub fn left_mul_rat_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * rat(self.get(i, j))).sum())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn to_rat_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).into_iter().map(rat).collect()).collect()
    }

    pub fn rank(&self) -> usize {
        rat_rank(&self.to_rat_rows())
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Row echelon form over the rationals; returns the rank.
pub fn rat_rank(rows: &[Vec<Rat>]) -> usize {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = Rat::one() / &a[rank][col];
        for r in 0..m {
            if r != rank && !a[r][col].is_zero() {
                let f = &a[r][col] * &inv;
                for c in col..n {
                    let delta = &f * &a[rank][c];
                    a[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// Solves `A x = b` over the rationals when `A` is square and invertible.
pub fn rat_solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = Rat::one() / &m[col][col];
        for c in col..=n {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Whether `v` lies in the rational row span of `rows`.
pub fn in_row_span(rows: &[Vec<Rat>], v: &[Rat]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rat_rank(rows) == rat_rank(&ext)
}
