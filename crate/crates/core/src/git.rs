//! GIT for a torus `(C*)^m` acting diagonally on `C^n`.
//!
//! Semistability of a point depends only on its support (the set of
//! nonvanishing coordinates): a support `S` is semistable at level `tau`
//! iff `tau` lies in the rational cone spanned by the weight columns indexed
//! by `S`. Levels follow the moment-map sign: `tau = -(weights of theta)`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{cone_membership, nonneg_kernel_exists, rat_columns, ConeMembership, IntMatrix};
use crate::rational::{gcd_all, rat, Rat, RatVector};

/// A set of coordinate indices, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Support(Vec<usize>);

impl Support {
    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        Support(idx)
    }

    pub fn empty() -> Self {
        Support(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        Support((0..n).collect())
    }

    pub fn from_mask(mask: u64) -> Self {
        Support((0..64).filter(|&j| mask >> j & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &j| m | 1 << j)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn is_subset(&self, other: &Support) -> bool {
        self.0.iter().all(|&j| other.contains(j))
    }

    pub fn complement(&self, n: usize) -> Support {
        Support((0..n).filter(|&j| !self.contains(j)).collect())
    }

    pub fn union(&self, other: &Support) -> Support {
        Support::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn intersect(&self, other: &Support) -> Support {
        Support(self.0.iter().copied().filter(|&j| other.contains(j)).collect())
    }

    /// Renders the support with variable names, e.g. `{x1, p}`.
    pub fn named(&self, vars: &[String]) -> String {
        let names: Vec<&str> = self.0.iter().map(|&j| vars[j].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for Support {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Moment-map level `tau` (length `m`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Level(pub RatVector);

/// `tau = -theta`: a character of weight `-e` with `e > 0` gives `tau = e`.
pub fn level_of_theta(theta: &RatVector) -> Level {
    Level(theta.neg())
}

fn check_level(q: &IntMatrix, tau: &Level) -> Result<()> {
    if tau.0.len() != q.rows() {
        return Err(Error::DimensionMismatch { expected: q.rows(), got: tau.0.len() });
    }
    Ok(())
}

/// Cone-membership certificate for a single support.
pub fn semistability(q: &IntMatrix, tau: &Level, s: &Support) -> Result<ConeMembership> {
    check_level(q, tau)?;
    cone_membership(&rat_columns(q, s.indices()), &tau.0)
}

pub fn is_semistable(q: &IntMatrix, tau: &Level, s: &Support) -> Result<bool> {
    Ok(semistability(q, tau, s)?.is_inside())
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Support> {
    let mut out = vec![Support::empty()];
    let mut frontier = vec![Vec::<usize>::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l| l + 1);
            for j in start..n {
                let mut t = s.clone();
                t.push(j);
                out.push(Support(t.clone()));
                next.push(t);
            }
        }
        frontier = next;
    }
    out
}

fn support_order(a: &Support, b: &Support) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Inclusion-minimal semistable supports, sorted by size then lexicographically.
///
/// A minimal support has linearly independent columns, so only subsets of
/// size at most `m` are examined.
pub fn semistable_supports(q: &IntMatrix, tau: &Level) -> Result<Vec<Support>> {
    check_level(q, tau)?;
    let mut minimal: Vec<Support> = Vec::new();
    for s in subsets_up_to(q.cols(), q.rows()) {
        if minimal.iter().any(|m| m.is_subset(&s)) {
            continue;
        }
        if is_semistable(q, tau, &s)? {
            minimal.push(s);
        }
    }
    minimal.sort_by(support_order);
    Ok(minimal)
}

/// Minimal transversals of a family of sets (Berge's incremental method).
fn minimal_transversals(edges: &[Support]) -> Vec<Support> {
    let mut cur: Vec<Support> = vec![Support::empty()];
    for e in edges {
        let mut next: Vec<Support> = Vec::new();
        for t in &cur {
            if t.indices().iter().any(|&j| e.contains(j)) {
                next.push(t.clone());
            } else {
                for &j in e.indices() {
                    next.push(t.union(&Support(vec![j])));
                }
            }
        }
        next.sort();
        next.dedup();
        let snapshot = next.clone();
        next.retain(|t| !snapshot.iter().any(|u| u != t && u.is_subset(t)));
        cur = next;
    }
    cur
}

/// Inclusion-maximal unstable supports; the unstable locus is the union of
/// the coordinate subspaces they span.
pub fn unstable_subspaces(q: &IntMatrix, tau: &Level) -> Result<Vec<Support>> {
    let minimal = semistable_supports(q, tau)?;
    Ok(maximal_unstable_from_minimal(q.cols(), &minimal))
}

pub fn maximal_unstable_from_minimal(n: usize, minimal: &[Support]) -> Vec<Support> {
    let mut out: Vec<Support> =
        minimal_transversals(minimal).into_iter().map(|t| t.complement(n)).collect();
    out.sort_by(support_order);
    out
}

/// Whether `s` contains one of the `minimal` supports.
pub fn covers(minimal: &[Support], s: &Support) -> bool {
    minimal.iter().any(|m| m.is_subset(s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularityViolation {
    /// No support is semistable; the separator certifies `tau` outside the full cone.
    EmptySemistableLocus { separator: RatVector },
    /// `tau` lies in the cone of a rank-deficient set of columns, so points
    /// with that support are semistable with positive-dimensional stabilizer.
    RankDeficientCone { support: Support, rank: usize, coefficients: RatVector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongRegularity {
    pub strongly_regular: bool,
    pub violation: Option<RegularityViolation>,
}

/// Strong regularity: something is semistable and no semistable support has
/// a positive-dimensional stabilizer.
pub fn is_strongly_regular(q: &IntMatrix, tau: &Level) -> Result<StrongRegularity> {
    check_level(q, tau)?;
    let m = q.rows();
    if let ConeMembership::Outside { separator } = semistability(q, tau, &Support::full(q.cols()))? {
        return Ok(StrongRegularity {
            strongly_regular: false,
            violation: Some(RegularityViolation::EmptySemistableLocus { separator }),
        });
    }
    // Every rank-deficient support lies inside the closure of an
    // independent set of fewer than m columns.
    let mut flats: Vec<Support> = Vec::new();
    for t in subsets_up_to(q.cols(), m.saturating_sub(1)) {
        let r = q.select_columns(t.indices()).rank();
        if r != t.len() {
            continue;
        }
        let closure: Vec<usize> = (0..q.cols())
            .filter(|&j| {
                let mut idx = t.indices().to_vec();
                idx.push(j);
                q.select_columns(&idx).rank() == r
            })
            .collect();
        flats.push(Support::new(closure));
    }
    flats.sort_by(support_order);
    flats.dedup();
    for f in flats {
        if let ConeMembership::Inside { coefficients } = semistability(q, tau, &f)? {
            let rank = q.select_columns(f.indices()).rank();
            return Ok(StrongRegularity {
                strongly_regular: false,
                violation: Some(RegularityViolation::RankDeficientCone { support: f, rank, coefficients }),
            });
        }
    }
    Ok(StrongRegularity { strongly_regular: true, violation: None })
}

/// True iff no nonconstant invariant monomial is supported in `s`, i.e. the
/// affine quotient of the coordinate subspace `V_S` is a point.
pub fn affine_support_trivial(q: &IntMatrix, s: &Support) -> bool {
    !nonneg_kernel_exists(q, s.indices())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseChamber {
    /// A level strictly inside the chamber.
    pub representative: RatVector,
    /// Bounding rays (primitive integer directions); empty in sample mode.
    pub walls: Vec<RatVector>,
    pub minimal_semistable: Vec<Support>,
    pub maximal_unstable: Vec<Support>,
    pub strongly_regular: bool,
}

impl PhaseChamber {
    fn at(q: &IntMatrix, representative: RatVector, walls: Vec<RatVector>) -> Result<Self> {
        let tau = Level(representative.clone());
        let minimal_semistable = semistable_supports(q, &tau)?;
        let maximal_unstable = maximal_unstable_from_minimal(q.cols(), &minimal_semistable);
        let strongly_regular = is_strongly_regular(q, &tau)?.strongly_regular;
        Ok(PhaseChamber { representative, walls, minimal_semistable, maximal_unstable, strongly_regular })
    }

    /// For two-dimensional chambers, whether `tau` is strictly inside.
    pub fn contains(&self, tau: &RatVector) -> bool {
        match self.walls.as_slice() {
            [w] if tau.len() == 1 => {
                let side = &self.representative[0] - &w[0];
                (&tau[0] - &w[0]) * side > Rat::zero()
            }
            [a, b] if tau.len() == 2 => cross(a, tau).is_positive() && cross(tau, b).is_positive(),
            _ => false,
        }
    }
}

fn cross(a: &RatVector, b: &RatVector) -> Rat {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_all(v).abs();
    v.iter().map(|x| x / g).collect()
}

/// Upper half-plane first, then by angle; exact.
fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let half = |v: &[i64]| i32::from(!(v[1] > 0 || (v[1] == 0 && v[0] > 0)));
    half(a).cmp(&half(b)).then_with(|| {
        let c = a[0] * b[1] - a[1] * b[0];
        0.cmp(&c)
    })
}

/// Exact chamber decomposition for `m = 1` and `m = 2`.
///
/// For `m >= 3` use [`classify_levels`].
pub fn chambers(q: &IntMatrix) -> Result<Vec<PhaseChamber>> {
    match q.rows() {
        1 => {
            let w = q.row(0);
            if w.iter().all(|&x| x == 0) {
                return Err(Error::DegenerateWeights("all weights are zero".into()));
            }
            let zero = RatVector::from_ints(&[0]);
            let mut out = Vec::new();
            if w.iter().any(|&x| x > 0) {
                out.push(PhaseChamber::at(q, RatVector::from_ints(&[1]), vec![zero.clone()])?);
            }
            if w.iter().any(|&x| x < 0) {
                out.push(PhaseChamber::at(q, RatVector::from_ints(&[-1]), vec![zero])?);
            }
            Ok(out)
        }
        2 => {
            if q.rank() < 2 {
                return Err(Error::DegenerateWeights("columns span a space of dimension < 2".into()));
            }
            let mut rays: Vec<Vec<i64>> = (0..q.cols())
                .map(|j| q.column(j))
                .filter(|c| c.iter().any(|&x| x != 0))
                .map(|c| primitive(&c))
                .collect();
            rays.sort_by(|a, b| angle_cmp(a, b));
            rays.dedup();
            let mut out = Vec::new();
            for i in 0..rays.len() {
                let a = &rays[i];
                let b = &rays[(i + 1) % rays.len()];
                if a[0] * b[1] - a[1] * b[0] <= 0 {
                    continue;
                }
                let rep = RatVector::from_ints(&[a[0] + b[0], a[1] + b[1]]);
                out.push(PhaseChamber::at(q, rep, vec![RatVector::from_ints(a), RatVector::from_ints(b)])?);
            }
            Ok(out)
        }
        m => Err(Error::Precondition(format!(
            "exact chamber enumeration supports m <= 2 (got m = {m}); classify candidate levels instead"
        ))),
    }
}

/// Sample mode: groups candidate levels by their minimal-semistable-support
/// family. Levels on a wall (not strongly regular) are still grouped; the
/// `strongly_regular` flag tells them apart.
pub fn classify_levels(q: &IntMatrix, levels: &[RatVector]) -> Result<Vec<PhaseChamber>> {
    let mut out: Vec<PhaseChamber> = Vec::new();
    for tau in levels {
        let c = PhaseChamber::at(q, tau.clone(), Vec::new())?;
        if !out.iter().any(|o| o.minimal_semistable == c.minimal_semistable) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Whether `tau` lies on a wall: the cone of some rank-deficient column set
/// (for `m <= 2`, a column ray or the origin).
pub fn on_wall(q: &IntMatrix, tau: &Level) -> Result<bool> {
    check_level(q, tau)?;
    if tau.0.is_zero() {
        return Ok(true);
    }
    Ok(match q.rows() {
        1 => false,
        2 => (0..q.cols()).any(|j| {
            let c = q.column(j);
            let v = RatVector::from_ints(&c);
            !v.is_zero() && cross(&v, &tau.0).is_zero() && v.dot(&tau.0).is_positive()
        }),
        _ => !is_strongly_regular(q, tau)?.strongly_regular,
    })
}

pub fn tau_from_ints(xs: &[i64]) -> Level {
    Level(RatVector(xs.iter().map(|&x| rat(x)).collect()))
}
