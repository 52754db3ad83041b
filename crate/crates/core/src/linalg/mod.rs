//! Exact integer and rational linear algebra: cones, integer kernels, finite
//! diagonal groups.

mod matrix;
pub mod simplex;
pub mod snf;

pub use matrix::{in_row_span, rat_rank, rat_solve, IntMatrix};
pub use snf::{smith_normal_form, Snf};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{rat, ratio, PhaseVector, Rat, RatVector};

/// Outcome of a cone membership query, with a certificate either way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConeMembership {
    /// `v = sum coefficients[i] * generators[i]` with every coefficient `>= 0`.
    Inside { coefficients: RatVector },
    /// Farkas certificate: `y . g >= 0` for every generator and `y . v < 0`.
    Outside { separator: RatVector },
}

impl ConeMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, ConeMembership::Inside { .. })
    }
}

fn check_dims(generators: &[RatVector], v: &RatVector) -> Result<()> {
    for g in generators {
        if g.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: v.len(), got: g.len() });
        }
    }
    Ok(())
}

/// Whether `v` is a nonnegative rational combination of `generators`.
pub fn cone_member(generators: &[RatVector], v: &RatVector) -> Result<bool> {
    check_dims(generators, v)?;
    Ok(cone_combination(generators, v).is_some())
}

fn cone_combination(generators: &[RatVector], v: &RatVector) -> Option<RatVector> {
    let dim = v.len();
    let a: Vec<Vec<Rat>> =
        (0..dim).map(|r| generators.iter().map(|g| g[r].clone()).collect()).collect();
    simplex::feasible_point(&a, &v.0).map(RatVector)
}

/// Like [`cone_member`], but returns the combination or a Farkas separator.
pub fn cone_membership(generators: &[RatVector], v: &RatVector) -> Result<ConeMembership> {
    check_dims(generators, v)?;
    if let Some(coefficients) = cone_combination(generators, v) {
        return Ok(ConeMembership::Inside { coefficients });
    }
    // y = y+ - y-, slack s_i = y . g_i >= 0, and y . v = -1.
    let dim = v.len();
    let k = generators.len();
    let width = 2 * dim + k;
    let mut rows = Vec::with_capacity(k + 1);
    for (i, g) in generators.iter().enumerate() {
        let mut row = vec![Rat::zero(); width];
        for r in 0..dim {
            row[r] = g[r].clone();
            row[dim + r] = -&g[r];
        }
        row[2 * dim + i] = -Rat::one();
        rows.push(row);
    }
    let mut last = vec![Rat::zero(); width];
    for r in 0..dim {
        last[r] = v[r].clone();
        last[dim + r] = -&v[r];
    }
    rows.push(last);
    let mut rhs = vec![Rat::zero(); k];
    rhs.push(-Rat::one());
    let sol = simplex::feasible_point(&rows, &rhs)
        .expect("Farkas alternative must be feasible when the primal is not");
    let y = (0..dim).map(|r| &sol[r] - &sol[dim + r]).collect();
    Ok(ConeMembership::Outside { separator: RatVector(y) })
}

/// Lattice basis of `{ v in Z^n : M v = 0 }`.
pub fn kernel_basis(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let f = smith_normal_form(m)?;
    let r = f.rank();
    Ok((r..m.cols()).map(|j| f.v.column(j)).collect())
}

/// All `t in [0,1)^m` with `(column j of M) . t` integral for every column
/// `j`, i.e. the diagonal group elements acting trivially on every
/// coordinate indexed by a column of `M`. Sorted.
pub fn finite_group_elements(m: &IntMatrix) -> Result<Vec<PhaseVector>> {
    let dim = m.rows();
    if dim == 0 {
        return Ok(vec![PhaseVector::identity(0)]);
    }
    if m.cols() == 0 {
        return Err(Error::InfiniteGroup { rank: 0, dim });
    }
    let f = smith_normal_form(&m.transpose())?;
    if f.rank() < dim {
        return Err(Error::InfiniteGroup { rank: f.rank(), dim });
    }
    let mut out = Vec::new();
    let mut idx = vec![0i64; dim];
    loop {
        let u: Vec<Rat> = (0..dim).map(|i| ratio(idx[i], f.divisors[i])).collect();
        let t = f.v.mul_rat_vec(&u);
        out.push(PhaseVector::new(t));
        // Odometer over the product of cyclic factors.
        let mut i = 0;
        loop {
            if i == dim {
                out.sort();
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < f.divisors[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Whether some nonzero `a >= 0` supported in `support` has `M a = 0`.
pub fn nonneg_kernel_exists(m: &IntMatrix, support: &[usize]) -> bool {
    if support.is_empty() {
        return false;
    }
    let mut rows: Vec<Vec<Rat>> =
        (0..m.rows()).map(|i| support.iter().map(|&j| rat(m.get(i, j))).collect()).collect();
    rows.push(vec![Rat::one(); support.len()]);
    let mut rhs = vec![Rat::zero(); m.rows()];
    rhs.push(Rat::one());
    simplex::feasible_point(&rows, &rhs).is_some()
}

/// Columns of `m` at `idx` as rational vectors.
pub fn rat_columns(m: &IntMatrix, idx: &[usize]) -> Vec<RatVector> {
    idx.iter().map(|&j| RatVector::from_ints(&m.column(j))).collect()
}
