//! The group generated by the gauge torus `G` and the R-charge torus
//! `C*_R`, its compatibility conditions, and lifts of a polarization.
//!
//! `Gamma` is parameterized by `(t, lambda) in (C*)^m x C*` acting through
//! the extended weight matrix `E = [Q; c]`. Characters of `Gamma` are
//! written by their `E`-weights in `Z^(m+1)`; the last coordinate is the
//! R-direction.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::git::{self, Level, Support};
use crate::linalg::{finite_group_elements, kernel_basis, rat_solve, smith_normal_form, ConeMembership, IntMatrix};
use crate::poly::{Polynomial, WeightedDegree};
use crate::rational::{common_denominator, gcd_all, rat, ratio, to_i64, PhaseVector, Rat, RatVector};

/// R-charge weights `c` and the R-degree `d` of the superpotential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RCharge {
    c: Vec<i64>,
    d: i64,
}

impl RCharge {
    pub fn new(c: Vec<i64>, d: i64) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidRCharge("no weights".into()));
        }
        if d <= 0 {
            return Err(Error::InvalidRCharge(format!("R-degree must be positive, got {d}")));
        }
        let g = gcd_all(&c);
        if g != 1 {
            return Err(Error::InvalidRCharge(format!("gcd of weights is {g}, expected 1")));
        }
        Ok(RCharge { c, d })
    }

    pub fn weights(&self) -> &[i64] {
        &self.c
    }

    pub fn degree(&self) -> i64 {
        self.d
    }

    /// `q_i = c_i / d`.
    pub fn q_weights(&self) -> RatVector {
        RatVector(self.c.iter().map(|&ci| ratio(ci, self.d)).collect())
    }

    /// `q = sum_i c_i / d`.
    pub fn q(&self) -> Rat {
        ratio(self.c.iter().sum(), self.d)
    }

    /// `J = (exp(2 pi i c_1/d), ...)`.
    pub fn j(&self) -> PhaseVector {
        PhaseVector::new(self.q_weights().0)
    }
}

/// Lattice description of `zeta: Gamma -> C*`, `g * lambda^c -> lambda^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaData {
    /// `E`-weights of `zeta`: zero on `G`, `d` on the R-direction.
    pub weights: Vec<i64>,
    /// A monomial exponent `a` realizing `zeta` on `V`: `Q a = 0`, `c . a = d`.
    pub witness: Vec<i64>,
}

/// Lattice description of `eps: Gamma -> G/<J>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsData {
    /// Basis (in `G`-weight coordinates) of the characters of `G/<J>`,
    /// pulled back along `eps` with R-weight zero.
    pub basis: Vec<Vec<i64>>,
    /// Index of that lattice in the character lattice of `G`; equals `|<J>|`.
    pub index: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaData {
    pub gauge: IntMatrix,
    pub rcharge: RCharge,
    pub extended: IntMatrix,
    pub j: PhaseVector,
    pub d: i64,
    #[serde(serialize_with = "crate::rational::rat_string::serialize")]
    pub q: Rat,
    /// Elements of `G ∩ C*_R`, sorted; equal to the powers of `J`.
    pub intersection: Vec<PhaseVector>,
    pub zeta: ZetaData,
    pub eps: EpsData,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// An integer combination of `vecs` whose value under `f` is the gcd of all values.
fn bezout_combination(vecs: &[Vec<i64>], f: impl Fn(&[i64]) -> i64, n: usize) -> (i64, Vec<i64>) {
    let mut g = 0i64;
    let mut acc = vec![0i64; n];
    for v in vecs {
        let val = f(v);
        let (ng, x, y) = ext_gcd(g, val);
        if ng == g {
            continue;
        }
        acc = acc.iter().zip(v).map(|(a, b)| x * a + y * b).collect();
        g = ng;
    }
    (g, acc)
}

/// Lattice spanned by the columns of `a`: a basis and `prod` of its
/// elementary divisors (the index in `Z^rows` when of full rank).
fn column_lattice(a: &IntMatrix) -> Result<(Vec<Vec<i64>>, i64)> {
    if a.cols() == 0 {
        return Ok((Vec::new(), 0));
    }
    let f = smith_normal_form(a)?;
    let av = a.mul(&f.v);
    let basis = (0..f.rank()).map(|j| av.column(j)).collect();
    let prod = if f.rank() == a.rows() { f.divisors.iter().product() } else { 0 };
    Ok((basis, prod))
}

/// Assembles `Gamma` and checks compatibility: `G ∩ C*_R = <J>` of order `d`.
pub fn build_gamma(q: &IntMatrix, r: &RCharge) -> Result<GammaData> {
    let n = q.cols();
    if r.c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: r.c.len() });
    }
    if q.rank() < q.rows() {
        return Err(Error::DegenerateWeights("gauge weight rows are linearly dependent".into()));
    }
    let extended = q.with_row(&r.c)?;
    if extended.rank() == q.rank() {
        return Err(Error::Compatibility(
            "the R-charge weights lie in the row span of the gauge weights, so G ∩ C*_R is infinite".into(),
        ));
    }

    // (s, lambda) with Q^T s + c lambda integral: lambda^c lies in G.
    let m = q.rows();
    let kernel = finite_group_elements(&extended)?;
    let mut lambdas: Vec<Rat> = kernel.iter().map(|t| t.entries()[m].clone()).collect();
    lambdas.sort();
    lambdas.dedup();
    let mut intersection: Vec<PhaseVector> = lambdas
        .iter()
        .map(|l| PhaseVector::new(r.c.iter().map(|&ci| rat(ci) * l).collect()))
        .collect();
    intersection.sort();
    intersection.dedup();

    let j = r.j();
    let mut powers: Vec<PhaseVector> = (0..r.d).map(|k| j.pow(k)).collect();
    powers.sort();
    powers.dedup();
    if powers.len() as i64 != r.d {
        return Err(Error::Compatibility(format!("J has order {} rather than d = {}", powers.len(), r.d)));
    }
    if intersection != powers {
        return Err(Error::Compatibility(format!(
            "G ∩ C*_R has {} elements but <J> has {}",
            intersection.len(),
            powers.len()
        )));
    }

    let ker_q = kernel_basis(q)?;
    let (g, witness) = bezout_combination(&ker_q, |a| a.iter().zip(&r.c).map(|(x, y)| x * y).sum(), n);
    debug_assert_eq!(g, r.d);
    let mut zeta_weights = vec![0i64; m];
    zeta_weights.push(r.d);
    let zeta = ZetaData { weights: zeta_weights, witness };

    let c_row = IntMatrix::new(vec![r.c.clone()])?;
    let ker_c = kernel_basis(&c_row)?;
    let images: Vec<Vec<i64>> = ker_c.iter().map(|a| q.mul_vec(a)).collect();
    let (basis, prod_eps) = column_lattice(&IntMatrix::from_columns(m, &images))?;
    let (_, prod_g) = column_lattice(q)?;
    let index = if prod_g == 0 { 0 } else { prod_eps / prod_g };
    let eps = EpsData { basis, index };

    Ok(GammaData {
        gauge: q.clone(),
        rcharge: r.clone(),
        extended,
        j,
        d: r.d,
        q: r.q(),
        intersection,
        zeta,
        eps,
    })
}

/// `(n - m) - 2q`.
pub fn central_charge(q: &IntMatrix, r: &RCharge) -> Rat {
    rat((q.cols() - q.rows()) as i64) - rat(2) * r.q()
}

/// A `Gamma`-character restricting to `theta` on `G`: weight `theta` on the
/// gauge parameters and `r_level` on the R-direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lift {
    pub theta: RatVector,
    #[serde(serialize_with = "crate::rational::rat_string::serialize")]
    pub r_level: Rat,
}

impl Lift {
    pub fn new(theta: RatVector, r_level: Rat) -> Self {
        Lift { theta, r_level }
    }

    /// `E`-weights of the character.
    pub fn weights(&self) -> RatVector {
        let mut w = self.theta.0.clone();
        w.push(self.r_level.clone());
        RatVector(w)
    }

    /// Restriction to `G`.
    pub fn restrict(&self) -> RatVector {
        self.theta.clone()
    }

    /// Level for the extended action: `(tau, -r_level)`.
    pub fn extended_level(&self) -> Level {
        Level(self.weights().neg())
    }
}

pub fn trivial_lift(theta: &RatVector) -> Lift {
    Lift::new(theta.clone(), Rat::zero())
}

/// Semistable families of a lift next to those of `theta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftComparison {
    pub gauge_minimal: Vec<Support>,
    pub gamma_minimal: Vec<Support>,
    pub good: bool,
    /// A `G`-semistable support that is `Gamma`-unstable, with its separator.
    pub witness: Option<(Support, RatVector)>,
}

pub fn compare_lift(gamma: &GammaData, lift: &Lift) -> Result<LiftComparison> {
    let tau = git::level_of_theta(&lift.theta);
    let gauge_minimal = git::semistable_supports(&gamma.gauge, &tau)?;
    let ext_tau = lift.extended_level();
    let gamma_minimal = git::semistable_supports(&gamma.extended, &ext_tau)?;
    let mut witness = None;
    for s in &gauge_minimal {
        if let ConeMembership::Outside { separator } = git::semistability(&gamma.extended, &ext_tau, s)? {
            witness = Some((s.clone(), separator));
            break;
        }
    }
    let good = witness.is_none();
    Ok(LiftComparison { gauge_minimal, gamma_minimal, good, witness })
}

/// `V^ss_Gamma(lift) = V^ss_G(theta)`.
pub fn is_good_lift(gamma: &GammaData, theta: &RatVector, lift: &Lift) -> Result<bool> {
    if lift.theta != *theta {
        return Err(Error::Precondition("lift does not restrict to theta".into()));
    }
    Ok(compare_lift(gamma, lift)?.good)
}

/// The R-level at which a minimal support stays semistable for `Gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportRLevel {
    pub support: Support,
    #[serde(serialize_with = "crate::rational::rat_string::serialize")]
    pub r_level: Rat,
}

/// A sampled lift that fails, with the support that becomes unstable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftWitness {
    pub direction: &'static str,
    #[serde(serialize_with = "crate::rational::rat_string::serialize")]
    pub r_level: Rat,
    pub support: Support,
    pub separator: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftAnalysis {
    pub per_support: Vec<SupportRLevel>,
    /// The unique good R-level, when one exists.
    #[serde(serialize_with = "serialize_opt_rat")]
    pub good_r_level: Option<Rat>,
    pub trivial_is_good: bool,
    pub witnesses: Vec<LiftWitness>,
}

fn serialize_opt_rat<S: serde::Serializer>(x: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&crate::rational::fmt_rat(v)),
        None => s.serialize_none(),
    }
}

/// Decides every lift of a strongly regular `theta` at once.
///
/// Each minimal `G`-semistable support `S` has `|S| = m` independent
/// columns, so `tau = Q_S a` has a unique solution and `S` stays
/// `Gamma`-semistable only at `r_level = -c_S . a`. A lift is good iff
/// every minimal support accepts it; hence at most one R-level is good.
pub fn analyze_lifts(gamma: &GammaData, theta: &RatVector) -> Result<LiftAnalysis> {
    let q = &gamma.gauge;
    let tau = git::level_of_theta(theta);
    let reg = git::is_strongly_regular(q, &tau)?;
    if !reg.strongly_regular {
        return Err(Error::Precondition("theta is not strongly regular".into()));
    }
    let minimal = git::semistable_supports(q, &tau)?;
    let mut per_support = Vec::with_capacity(minimal.len());
    for s in &minimal {
        let qs = q.select_columns(s.indices());
        let a = rat_solve(&qs.to_rat_rows(), &tau.0 .0)
            .ok_or_else(|| Error::Precondition(format!("support {s} is not a basis")))?;
        let c_s: Vec<Rat> = s.indices().iter().map(|&j| rat(gamma.rcharge.c[j])).collect();
        let val: Rat = c_s.iter().zip(&a).map(|(x, y)| x * y).sum();
        per_support.push(SupportRLevel { support: s.clone(), r_level: -val });
    }
    let good_r_level = match per_support.split_first() {
        Some((first, rest)) if rest.iter().all(|p| p.r_level == first.r_level) => Some(first.r_level.clone()),
        Some(_) => None,
        None => None,
    };

    // One sampled lift per sign direction, each with a failing support.
    let center = good_r_level.clone().unwrap_or_else(Rat::zero);
    let mut samples = vec![("above", &center + Rat::one()), ("below", &center - Rat::one())];
    if good_r_level.is_none() {
        samples.insert(0, ("at", center.clone()));
    }
    let mut witnesses = Vec::new();
    for (direction, r) in samples {
        let cmp = compare_lift(gamma, &Lift::new(theta.clone(), r.clone()))?;
        if let Some((support, separator)) = cmp.witness {
            witnesses.push(LiftWitness { direction, r_level: r, support, separator });
        }
    }
    let trivial_is_good = good_r_level.as_ref().is_some_and(Zero::is_zero);
    Ok(LiftAnalysis { per_support, good_r_level, trivial_is_good, witnesses })
}

/// Checks of the R-charge shift against the original data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftChecks {
    /// The extended groups agree (equal integer annihilator lattices).
    pub same_gamma: bool,
    /// The superpotential has R-degree `d'` under the new weights.
    pub w_degree_is_d: Option<bool>,
    /// `G ∩ C*_R' = <J'>` holds for the new data.
    pub compatible: bool,
    /// `J' = J * exp(2 pi i combo . Q)`, a gauge element.
    pub j_differs_by_gauge_element: bool,
    /// `J' = J` on the nose (true when `combo . Q` is integral).
    pub j_unchanged: bool,
    /// Calabi-Yau weights (every row sums to zero): `q` and `c-hat` preserved.
    pub calabi_yau: bool,
    pub q_preserved: bool,
    pub central_charge_preserved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftOutcome {
    pub gamma: GammaData,
    pub checks: ShiftChecks,
}

fn annihilators_agree(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    let ka = kernel_basis(a)?;
    let kb = kernel_basis(b)?;
    Ok(ka.len() == kb.len()
        && ka.iter().all(|v| b.mul_vec(v).iter().all(|&x| x == 0))
        && kb.iter().all(|v| a.mul_vec(v).iter().all(|&x| x == 0)))
}

/// Moves the R-weights by a rational combination of gauge rows:
/// `q'_i = c_i/d + (combo . Q)_i`, then clears denominators and the gcd.
pub fn rcharge_shift(gamma: &GammaData, combo: &RatVector, w: Option<&Polynomial>) -> Result<ShiftOutcome> {
    let q = &gamma.gauge;
    if combo.len() != q.rows() {
        return Err(Error::DimensionMismatch { expected: q.rows(), got: combo.len() });
    }
    let delta = q.left_mul_rat_vec(&combo.0);
    let new_q: Vec<Rat> = gamma.rcharge.q_weights().0.iter().zip(&delta).map(|(a, b)| a + b).collect();
    let den = common_denominator(&new_q);
    let scaled: Vec<i64> = new_q
        .iter()
        .map(|x| to_i64(&(x * Rat::from_integer(den.clone()))).ok_or(Error::Overflow("R-charge shift")))
        .collect::<Result<_>>()?;
    let g = gcd_all(&scaled);
    if g == 0 {
        return Err(Error::Shift("shifted R-weights vanish identically".into()));
    }
    let den = to_i64(&Rat::from_integer(den)).ok_or(Error::Overflow("R-charge shift"))?;
    if den % g != 0 {
        return Err(Error::Shift(format!(
            "weights {scaled:?} over {den} cannot be normalized to integral weights with gcd 1"
        )));
    }
    let c: Vec<i64> = scaled.iter().map(|x| x / g).collect();
    let r = RCharge::new(c, den / g)?;

    let compatible;
    let new_gamma = match build_gamma(q, &r) {
        Ok(gd) => {
            compatible = true;
            gd
        }
        Err(Error::Compatibility(msg)) => return Err(Error::Shift(format!("shifted data incompatible: {msg}"))),
        Err(e) => return Err(e),
    };

    let same_gamma = annihilators_agree(&gamma.extended, &new_gamma.extended)?;
    let w_degree_is_d = w.map(|w| {
        w.weighted_degree(&RatVector::from_ints(&r.c)) == WeightedDegree::Homogeneous(rat(r.d))
    });
    let gauge_part = PhaseVector::new(delta.clone());
    let j_differs_by_gauge_element = gamma.j.mul(&gauge_part) == new_gamma.j;
    let j_unchanged = gamma.j == new_gamma.j;
    let calabi_yau = q.row_sums().iter().all(|&s| s == 0);
    let q_preserved = gamma.q == new_gamma.q;
    let central_charge_preserved = central_charge(q, &gamma.rcharge) == central_charge(q, &r);
    Ok(ShiftOutcome {
        gamma: new_gamma,
        checks: ShiftChecks {
            same_gamma,
            w_degree_is_d,
            compatible,
            j_differs_by_gauge_element,
            j_unchanged,
            calabi_yau,
            q_preserved,
            central_charge_preserved,
        },
    })
}
