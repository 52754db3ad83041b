//! Exact phase-one simplex: decides `{x >= 0 : A x = b}` over the rationals.
//!
//! Bland's rule is used throughout, so the method terminates on degenerate
//! inputs. Instances in this crate are tiny; no effort goes into speed.

use num_traits::{One, Signed, Zero};

use crate::rational::Rat;

/// Returns a nonnegative solution of `A x = b`, or `None` when infeasible.
///
/// `a` is given row-wise; every row must have the same length.
pub fn feasible_point(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let m = a.len();
    assert_eq!(m, b.len());
    let n = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![Rat::zero(); n]);
    }

    // Tableau columns: n structural, m artificial, then the rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        assert_eq!(a[i].len(), n);
        let flip = b[i].is_negative();
        let mut row = Vec::with_capacity(width);
        for x in &a[i] {
            row.push(if flip { -x } else { x.clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        row.push(if flip { -&b[i] } else { b[i].clone() });
        t.push(row);
    }
    // Objective row: minimize the sum of artificials, written as reduced costs.
    let mut obj = vec![Rat::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let cur = &t[l][width - 1] / &t[l][enter];
                        ratio < cur || (ratio == cur && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Unbounded cannot happen for phase one (objective bounded below by 0).
            unreachable!("phase-one objective is bounded");
        };
        pivot(&mut t, r, enter);
        basis[r] = enter;
    }

    if !t[m][width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rat>], r: usize, c: usize) {
    let inv = Rat::one() / &t[r][c];
    for x in t[r].iter_mut() {
        *x *= &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                *x -= &f * p;
            }
        }
    }
}
