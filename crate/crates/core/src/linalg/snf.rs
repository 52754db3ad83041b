//! Smith normal form over the integers.
//!
//! `U * A * V = S` with `U`, `V` unimodular and `S` diagonal with
//! `s_1 | s_2 | ... | s_r`, all `s_i > 0`. Intermediate arithmetic runs in
//! `i128` and fails loudly on overflow.

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Nonzero diagonal entries `s_1 .. s_r`.
    pub divisors: Vec<i64>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

struct Work {
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    m: usize,
    n: usize,
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("smith normal form"))
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }

    /// row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: i128) -> Result<()> {
        for c in 0..self.n {
            self.a[i][c] = ck(self.a[i][c].checked_add(ck(k.checked_mul(self.a[j][c]))?))?;
        }
        for c in 0..self.m {
            self.u[i][c] = ck(self.u[i][c].checked_add(ck(k.checked_mul(self.u[j][c]))?))?;
        }
        Ok(())
    }

    /// col_i += k * col_j
    fn add_col(&mut self, i: usize, j: usize, k: i128) -> Result<()> {
        for r in 0..self.m {
            self.a[r][i] = ck(self.a[r][i].checked_add(ck(k.checked_mul(self.a[r][j]))?))?;
        }
        for r in 0..self.n {
            self.v[r][i] = ck(self.v[r][i].checked_add(ck(k.checked_mul(self.v[r][j]))?))?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = self.a[i][j].abs();
                if x != 0 && best.is_none_or(|(bi, bj)| x < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) -> Result<usize> {
        let mut t = 0;
        while t < self.m.min(self.n) {
            let Some((pi, pj)) = self.min_entry(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let p = self.a[t][t];
                let mut dirty = false;
                for i in t + 1..self.m {
                    let q = self.a[i][t].div_euclid(p);
                    if q != 0 {
                        self.add_row(i, t, -q)?;
                    }
                    if self.a[i][t] != 0 {
                        dirty = true;
                    }
                }
                for j in t + 1..self.n {
                    let q = self.a[t][j].div_euclid(p);
                    if q != 0 {
                        self.add_col(j, t, -q)?;
                    }
                    if self.a[t][j] != 0 {
                        dirty = true;
                    }
                }
                if !dirty {
                    // Row and column cleared; enforce divisibility on the rest.
                    let bad = (t + 1..self.m)
                        .flat_map(|i| (t + 1..self.n).map(move |j| (i, j)))
                        .find(|&(i, j)| self.a[i][j] % p != 0);
                    match bad {
                        None => break,
                        Some((i, _)) => {
                            self.add_row(t, i, 1)?;
                            continue;
                        }
                    }
                }
                let (pi, pj) = self.min_entry_in_cross(t);
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
            }
            if self.a[t][t] < 0 {
                self.negate_row(t);
            }
            t += 1;
        }
        Ok(t)
    }

    /// Smallest nonzero entry in row `t` or column `t` (from `t` on).
    fn min_entry_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut bv = self.a[t][t].abs();
        for i in t..self.m {
            let x = self.a[i][t].abs();
            if x != 0 && (bv == 0 || x < bv) {
                best = (i, t);
                bv = x;
            }
        }
        for j in t..self.n {
            let x = self.a[t][j].abs();
            if x != 0 && (bv == 0 || x < bv) {
                best = (t, j);
                bv = x;
            }
        }
        best
    }
}

fn to_matrix(rows: &[Vec<i128>], nrows: usize, ncols: usize) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(nrows, ncols);
    for i in 0..nrows {
        for j in 0..ncols {
            let x = i64::try_from(rows[i][j]).map_err(|_| Error::Overflow("smith normal form"))?;
            out.set(i, j, x);
        }
    }
    Ok(out)
}

pub fn smith_normal_form(a: &IntMatrix) -> Result<Snf> {
    let (m, n) = (a.rows(), a.cols());
    let ident = |k: usize| -> Vec<Vec<i128>> {
        (0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect()).collect()
    };
    let mut w = Work {
        a: (0..m).map(|i| a.row(i).into_iter().map(i128::from).collect()).collect(),
        u: ident(m),
        v: ident(n),
        m,
        n,
    };
    let r = w.run()?;
    let s = to_matrix(&w.a, m, n)?;
    let divisors = (0..r).map(|i| s.get(i, i)).collect();
    Ok(Snf { u: to_matrix(&w.u, m, m)?, s, v: to_matrix(&w.v, n, n)?, divisors })
}
