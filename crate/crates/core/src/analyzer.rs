//! Whole-model analysis: input validation, the critical locus of a
//! structured superpotential, compactness, twisted sectors, virtual
//! dimension and fixed loci of an auxiliary torus.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{self, build_gamma, central_charge, compare_lift, GammaData, Lift, LiftComparison, RCharge};
use crate::git::{self, Level, StrongRegularity, Support};
use crate::linalg::{finite_group_elements, in_row_span, IntMatrix};
use crate::poly::{Polynomial, WeightedDegree};
use crate::rational::{frac, rat, PhaseVector, Rat, RatVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Epsilon {
    #[serde(rename = "0+")]
    ZeroPlus,
    #[serde(rename = "infinity")]
    Infinity,
}

impl FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "0+" => Ok(Epsilon::ZeroPlus),
            "infinity" | "inf" | "∞" => Ok(Epsilon::Infinity),
            other => Err(format!("unknown epsilon {other:?}, expected \"0+\" or \"infinity\"")),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::ZeroPlus => "0+",
            Epsilon::Infinity => "infinity",
        })
    }
}

/// The full input data of a model. R-weights are kept raw so that invalid
/// choices can still be reported by [`validate_model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelInput {
    pub variables: Vec<String>,
    pub gauge: IntMatrix,
    pub r_weights: Vec<i64>,
    pub r_degree: i64,
    pub superpotential: Polynomial,
    pub theta: RatVector,
    pub epsilon: Epsilon,
    pub lift_r_level: Option<Rat>,
    /// The user asserts the `F_j` of `W = sum p_j F_j` meet transversely.
    pub transversality: bool,
    /// Explicit choice of the `p`-like variables, bypassing detection.
    pub p_fields: Option<Vec<usize>>,
}

impl ModelInput {
    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn m(&self) -> usize {
        self.gauge.rows()
    }

    pub fn tau(&self) -> Level {
        git::level_of_theta(&self.theta)
    }

    pub fn rcharge(&self) -> Result<RCharge> {
        RCharge::new(self.r_weights.clone(), self.r_degree)
    }

    pub fn gamma(&self) -> Result<GammaData> {
        build_gamma(&self.gauge, &self.rcharge()?)
    }

    pub fn lift(&self) -> Lift {
        match &self.lift_r_level {
            Some(r) => Lift::new(self.theta.clone(), r.clone()),
            None => gamma::trivial_lift(&self.theta),
        }
    }

    pub fn central_charge(&self) -> Result<Rat> {
        Ok(central_charge(&self.gauge, &self.rcharge()?))
    }

    /// Same model at another stability parameter.
    pub fn with_theta(&self, theta: RatVector) -> ModelInput {
        ModelInput { theta, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Regularity(StrongRegularity),
    Lift(LiftComparison),
    Gamma { j: PhaseVector, intersection: Vec<PhaseVector> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status != CheckStatus::Pass)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &'static str, ok: bool, detail: impl Into<String>, certificate: Option<Certificate>) -> bool {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.0.push(Check { name, status, detail: detail.into(), certificate });
        ok
    }

    fn skip(&mut self, name: &'static str, why: &str) {
        self.0.push(Check { name, status: CheckStatus::Skipped, detail: format!("skipped: {why}"), certificate: None });
    }
}

/// Runs every input check; never stops early, later checks that depend on
/// a failed one are marked skipped.
pub fn validate_model(m: &ModelInput) -> ValidationReport {
    let mut checks = Checks(Vec::new());
    let n = m.n();
    let mut problems = Vec::new();
    if m.gauge.cols() != n {
        problems.push(format!("gauge weights have {} columns for {} variables", m.gauge.cols(), n));
    }
    if m.r_weights.len() != n {
        problems.push(format!("{} R-weights for {} variables", m.r_weights.len(), n));
    }
    if m.theta.len() != m.m() {
        problems.push(format!("theta has length {} but there are {} gauge rows", m.theta.len(), m.m()));
    }
    if m.superpotential.vars() != m.variables.as_slice() {
        problems.push("superpotential is over a different variable list".into());
    }
    let dims_ok = problems.is_empty();
    checks.push(
        "dimensions",
        dims_ok,
        if dims_ok { format!("n = {n}, m = {}", m.m()) } else { problems.join("; ") },
        None,
    );

    let rcharge = m.rcharge();
    let r_ok = checks.push(
        "r_charge",
        rcharge.is_ok(),
        match &rcharge {
            Ok(_) => "gcd of R-weights is 1 and the R-degree is positive".to_string(),
            Err(e) => e.to_string(),
        },
        None,
    );

    if !dims_ok {
        for name in ["gauge_rank", "w_gauge_invariant", "w_quasihomogeneous", "compatibility", "strong_regularity", "good_lift"] {
            checks.skip(name, "dimension mismatch");
        }
        return finish(checks);
    }

    let rank = m.gauge.rank();
    let rank_ok = checks.push("gauge_rank", rank == m.m(), format!("rank {rank} of {} rows", m.m()), None);

    let w = &m.superpotential;
    if w.is_zero() {
        checks.push("w_gauge_invariant", false, "superpotential is zero", None);
    } else {
        let bad: Vec<String> = (0..m.m())
            .filter_map(|i| {
                let row = RatVector::from_ints(&m.gauge.row(i));
                match w.weighted_degree(&row) {
                    WeightedDegree::Homogeneous(d) if d.is_zero() => None,
                    WeightedDegree::Homogeneous(d) => Some(format!("row {i} has degree {d}")),
                    _ => Some(format!("row {i}: not homogeneous")),
                }
            })
            .collect();
        checks.push(
            "w_gauge_invariant",
            bad.is_empty(),
            if bad.is_empty() { "every gauge row gives degree 0".to_string() } else { bad.join("; ") },
            None,
        );
    }
    match &rcharge {
        Ok(r) => {
            let deg = w.weighted_degree(&RatVector::from_ints(r.weights()));
            let ok = deg == WeightedDegree::Homogeneous(rat(r.degree()));
            let detail = match deg {
                WeightedDegree::Homogeneous(d) => format!("R-degree {d}, expected {}", r.degree()),
                WeightedDegree::NotHomogeneous => "not quasihomogeneous for the R-weights".into(),
                WeightedDegree::ZeroPolynomial => "superpotential is zero".into(),
            };
            checks.push("w_quasihomogeneous", ok, detail, None);
        }
        Err(_) => checks.skip("w_quasihomogeneous", "invalid R-charge"),
    }

    let gamma = match (&rcharge, rank_ok) {
        (Ok(r), true) => {
            let g = build_gamma(&m.gauge, r);
            match &g {
                Ok(gd) => checks.push(
                    "compatibility",
                    true,
                    format!("G ∩ C*_R = <J> of order {}", gd.d),
                    Some(Certificate::Gamma { j: gd.j.clone(), intersection: gd.intersection.clone() }),
                ),
                Err(e) => checks.push("compatibility", false, e.to_string(), None),
            };
            g.ok()
        }
        _ => {
            checks.skip("compatibility", if r_ok { "gauge weights are degenerate" } else { "invalid R-charge" });
            None
        }
    };

    let reg = git::is_strongly_regular(&m.gauge, &m.tau());
    let reg_ok = match reg {
        Ok(reg) => {
            let ok = reg.strongly_regular;
            let detail = if ok {
                format!("tau = {} is strongly regular", m.tau().0)
            } else {
                format!("tau = {} is not strongly regular", m.tau().0)
            };
            checks.push("strong_regularity", ok, detail, Some(Certificate::Regularity(reg)))
        }
        Err(e) => checks.push("strong_regularity", false, e.to_string(), None),
    };

    match (gamma, reg_ok) {
        (Some(gd), true) => match compare_lift(&gd, &m.lift()) {
            Ok(cmp) => {
                let good = cmp.good;
                let required = m.epsilon == Epsilon::Infinity;
                let detail = format!(
                    "lift with R-level {} is {}good{}",
                    crate::rational::fmt_rat(&m.lift().r_level),
                    if good { "" } else { "not " },
                    if required { "" } else { " (only required for epsilon = infinity)" }
                );
                checks.push("good_lift", good || !required, detail, Some(Certificate::Lift(cmp)));
            }
            Err(e) => {
                checks.push("good_lift", false, e.to_string(), None);
            }
        },
        _ => checks.skip("good_lift", "needs a compatible R-charge and a strongly regular theta"),
    }
    finish(checks)
}

fn finish(checks: Checks) -> ValidationReport {
    let valid = checks.0.iter().all(|c| c.status == CheckStatus::Pass);
    ValidationReport { valid, checks: checks.0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    CoordinateSubspace,
    HypersurfaceInSubspace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compactness {
    Compact,
    Noncompact,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalComponent {
    pub kind: ComponentKind,
    /// Coordinates allowed to be nonzero.
    pub support: Support,
    pub equations: Vec<Polynomial>,
    pub survives_semistability: bool,
    pub quotient_compact: Compactness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum CriticalLocus {
    /// `W = sum_j p_j F_j(x)`.
    Structured {
        p_fields: Support,
        x_fields: Support,
        /// Variables absent from `W`.
        free_fields: Support,
        transversality_asserted: bool,
        components: Vec<CriticalComponent>,
    },
    /// No decomposition: the partial derivatives of `W`.
    Raw { equations: Vec<Polynomial> },
}

/// Variable sets `P` with exactly one member, to the first power, in every
/// monomial of `w`.
fn p_like_sets(w: &Polynomial) -> Result<Vec<Vec<usize>>> {
    let n = w.nvars();
    let monomials: Vec<&Vec<u32>> = w.terms().map(|(e, _)| e).collect();
    let candidates: Vec<usize> = w
        .occurring_variables()
        .into_iter()
        .filter(|&i| monomials.iter().all(|e| e[i] <= 1))
        .collect();
    if candidates.len() > 24 {
        return Err(Error::Structure(format!("{} linear variables is too many to classify", candidates.len())));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << candidates.len()) {
        let p: Vec<usize> = (0..candidates.len()).filter(|b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
        if monomials.iter().all(|e| p.iter().filter(|&&i| e[i] == 1).count() == 1) {
            out.push(p);
        }
    }
    debug_assert!(out.iter().all(|p| p.iter().all(|&i| i < n)));
    Ok(out)
}

fn pick_p_fields(m: &ModelInput) -> Result<Option<Vec<usize>>> {
    let w = &m.superpotential;
    if let Some(p) = &m.p_fields {
        let valid = p_like_sets(w)?;
        let mut p = p.clone();
        p.sort_unstable();
        if !valid.contains(&p) {
            return Err(Error::Structure("the declared p-fields do not put W in the form sum p_j F_j(x)".into()));
        }
        return Ok(Some(p));
    }
    let sets = p_like_sets(w)?;
    match sets.len() {
        0 => Ok(None),
        1 => Ok(sets.into_iter().next()),
        _ => {
            // Prefer the fibre-like choice: p-columns with only nonpositive, not all zero, weights.
            let fibre: Vec<Vec<usize>> = sets
                .iter()
                .filter(|p| {
                    p.iter().all(|&j| {
                        let col = m.gauge.column(j);
                        col.iter().all(|&x| x <= 0) && col.iter().any(|&x| x < 0)
                    })
                })
                .cloned()
                .collect();
            if fibre.len() == 1 {
                Ok(fibre.into_iter().next())
            } else {
                let names: Vec<String> =
                    sets.iter().map(|p| Support::new(p.clone()).named(&m.variables)).collect();
                Err(Error::Structure(format!("ambiguous p-like variables: {}", names.join(" or "))))
            }
        }
    }
}

pub fn critical_components(m: &ModelInput) -> Result<CriticalLocus> {
    let w = &m.superpotential;
    let n = m.n();
    let Some(p) = pick_p_fields(m)? else {
        let equations = (0..n).map(|i| w.partial(i)).filter(|d| !d.is_zero()).collect();
        return Ok(CriticalLocus::Raw { equations });
    };
    let occurring = Support::new(w.occurring_variables());
    let p_fields = Support::new(p);
    let x_fields = Support::new(occurring.indices().iter().copied().filter(|j| !p_fields.contains(*j)).collect());
    let free_fields = occurring.complement(n);
    let tau = m.tau();

    let a_support = p_fields.union(&free_fields);
    let b_support = x_fields.union(&free_fields);
    let a_eqs = x_fields.indices().iter().map(|&i| Polynomial::variable(&m.variables, i)).collect();
    let b_eqs = p_fields.indices().iter().map(|&i| w.partial(i)).collect();

    let mut components = Vec::new();
    for (kind, support, equations) in [
        (ComponentKind::CoordinateSubspace, a_support, a_eqs),
        (ComponentKind::HypersurfaceInSubspace, b_support, b_eqs),
    ] {
        let survives = git::is_semistable(&m.gauge, &tau, &support)?;
        let quotient_compact = if !m.transversality {
            Compactness::Unknown
        } else if git::affine_support_trivial(&m.gauge, &support) {
            Compactness::Compact
        } else {
            Compactness::Noncompact
        };
        components.push(CriticalComponent { kind, support, equations, survives_semistability: survives, quotient_compact });
    }
    Ok(CriticalLocus::Structured {
        p_fields,
        x_fields,
        free_fields,
        transversality_asserted: m.transversality,
        components,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NondegeneracyVerdict {
    /// Verdicts of the surviving components, in component order.
    pub components: Vec<(ComponentKind, Compactness)>,
    pub overall: Compactness,
}

/// `W` is nondegenerate when its critical locus in the quotient is compact.
pub fn nondegeneracy_check(locus: &CriticalLocus) -> NondegeneracyVerdict {
    match locus {
        CriticalLocus::Raw { .. } => NondegeneracyVerdict { components: Vec::new(), overall: Compactness::Unknown },
        CriticalLocus::Structured { components, .. } => {
            let verdicts: Vec<(ComponentKind, Compactness)> = components
                .iter()
                .filter(|c| c.survives_semistability)
                .map(|c| (c.kind, c.quotient_compact))
                .collect();
            let overall = if verdicts.iter().any(|(_, v)| *v == Compactness::Noncompact) {
                Compactness::Noncompact
            } else if verdicts.iter().any(|(_, v)| *v == Compactness::Unknown) {
                Compactness::Unknown
            } else {
                Compactness::Compact
            };
            NondegeneracyVerdict { components: verdicts, overall }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sector {
    /// `J^k` when the element is a power of `J`.
    pub name: Option<String>,
    pub gamma: PhaseVector,
    pub fixed_support: Support,
    #[serde(serialize_with = "crate::rational::rat_string::serialize")]
    pub age: Rat,
    #[serde(serialize_with = "crate::rational::rat_string::serialize")]
    pub degree_shift: Rat,
}

/// Sum of the phases, each taken in `[0, 1)`.
pub fn age(gamma: &PhaseVector) -> Rat {
    gamma.entries().iter().map(frac).sum()
}

fn j_power_name(gamma: &PhaseVector, j: &PhaseVector, d: i64) -> Option<String> {
    (0..d).find(|&k| j.pow(k) == *gamma).map(|k| format!("J^{k}"))
}

/// Group elements fixing some semistable point, sorted by age.
pub fn sectors(m: &ModelInput) -> Result<Vec<Sector>> {
    let tau = m.tau();
    if !git::is_strongly_regular(&m.gauge, &tau)?.strongly_regular {
        return Err(Error::Precondition("theta is not strongly regular".into()));
    }
    let r = m.rcharge()?;
    let j = r.j();
    let q = r.q();
    let qt = m.gauge.transpose();
    let mut elements: Vec<PhaseVector> = Vec::new();
    for s in git::semistable_supports(&m.gauge, &tau)? {
        for t in finite_group_elements(&m.gauge.select_columns(s.indices()))? {
            let g = PhaseVector::new(qt.mul_rat_vec(t.entries()));
            if !elements.contains(&g) {
                elements.push(g);
            }
        }
    }
    let mut out = Vec::new();
    for g in elements {
        let fixed_support = Support::new(g.fixed_indices());
        if !git::is_semistable(&m.gauge, &tau, &fixed_support)? {
            continue;
        }
        let a = age(&g);
        let degree_shift = rat(2) * &q - rat(2) * &a;
        out.push(Sector { name: j_power_name(&g, &j, r.degree()), gamma: g, fixed_support, age: a, degree_shift });
    }
    out.sort_by(|a, b| a.age.cmp(&b.age).then_with(|| a.gamma.cmp(&b.gamma)));
    Ok(out)
}

/// `int_beta c_1 + (c-hat - 3)(1 - g) + k - sum_i (age(gamma_i) - q)`.
///
/// `beta` pairs with the characters of `Gamma` in the basis of `E`-weights:
/// `m` gauge coordinates then the R-direction. The anticanonical character
/// is the sum of the coordinate characters.
pub fn virtual_dimension(
    m: &ModelInput,
    genus: u32,
    marks: usize,
    beta: &RatVector,
    insertions: &[PhaseVector],
) -> Result<Rat> {
    if insertions.len() != marks {
        return Err(Error::DimensionMismatch { expected: marks, got: insertions.len() });
    }
    if beta.len() != m.m() + 1 {
        return Err(Error::DimensionMismatch { expected: m.m() + 1, got: beta.len() });
    }
    let r = m.rcharge()?;
    let mut anticanonical: Vec<i64> = m.gauge.row_sums();
    anticanonical.push(r.weights().iter().sum());
    let c1 = beta.dot(&RatVector::from_ints(&anticanonical));
    let chat = central_charge(&m.gauge, &r);
    let q = r.q();
    let twist: Rat = insertions.iter().map(|g| age(g) - &q).sum();
    Ok(c1 + (chat - rat(3)) * (rat(1) - rat(i64::from(genus))) + rat(marks as i64) - twist)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedLocus {
    pub component: ComponentKind,
    pub support: Support,
    /// Coordinates forced to vanish.
    pub vanishing: Support,
    /// Component equations that survive on the support.
    pub equations: Vec<Polynomial>,
}

impl FixedLocus {
    /// `{x0=x1=F=0}`-style rendering.
    pub fn describe(&self, vars: &[String]) -> String {
        let mut parts: Vec<String> = self.vanishing.indices().iter().map(|&i| vars[i].clone()).collect();
        parts.extend(self.equations.iter().map(|e| e.to_string()));
        if parts.is_empty() {
            "{}".into()
        } else {
            format!("{{{}=0}}", parts.join("="))
        }
    }

    fn contained_in(&self, other: &FixedLocus) -> bool {
        self.support.is_subset(&other.support)
            && other.equations.iter().all(|e| {
                let r = e.restrict_to(self.support.indices());
                r.is_zero() || self.equations.contains(&r)
            })
    }
}

/// Loci of the semistable critical locus fixed by an extra `C*` acting
/// with weights `extra`, up to the gauge group.
///
/// On a support `S`, the extra action is absorbed by `G` iff `extra|_S`
/// lies in the rational row span of `Q_S`. For each surviving critical
/// component the maximal such semistable `S` inside its support are kept.
pub fn fixed_loci(m: &ModelInput, extra: &[i64]) -> Result<Vec<FixedLocus>> {
    let n = m.n();
    if extra.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: extra.len() });
    }
    let tau = m.tau();
    let components: Vec<(ComponentKind, Support, Vec<Polynomial>)> = match critical_components(m)? {
        CriticalLocus::Structured { components, .. } => components
            .into_iter()
            .filter(|c| c.survives_semistability)
            .map(|c| (c.kind, c.support, c.equations))
            .collect(),
        CriticalLocus::Raw { equations } => vec![(ComponentKind::HypersurfaceInSubspace, Support::full(n), equations)],
    };
    let mut loci: Vec<FixedLocus> = Vec::new();
    for (kind, support, equations) in components {
        let idx = support.indices();
        if idx.len() > 24 {
            return Err(Error::Precondition("component support too large to enumerate".into()));
        }
        let mut good: Vec<Support> = Vec::new();
        for mask in 0u64..(1u64 << idx.len()) {
            let s = Support::new((0..idx.len()).filter(|b| mask >> b & 1 == 1).map(|b| idx[b]).collect());
            let rows: Vec<Vec<Rat>> =
                (0..m.m()).map(|i| s.indices().iter().map(|&j| rat(m.gauge.get(i, j))).collect()).collect();
            let target: Vec<Rat> = s.indices().iter().map(|&j| rat(extra[j])).collect();
            if in_row_span(&rows, &target) && git::is_semistable(&m.gauge, &tau, &s)? {
                good.push(s);
            }
        }
        let maximal: Vec<Support> =
            good.iter().filter(|s| !good.iter().any(|t| t != *s && s.is_subset(t))).cloned().collect();
        for s in maximal {
            let vanishing = s.complement(n);
            let eqs: Vec<Polynomial> = equations
                .iter()
                .map(|e| e.restrict_to(s.indices()))
                .filter(|e| !e.is_zero() && e.occurring_variables().iter().any(|v| s.contains(*v)))
                .collect();
            let locus = FixedLocus { component: kind, support: s, vanishing, equations: eqs };
            if !loci.iter().any(|l| l.support == locus.support && l.equations == locus.equations) {
                loci.push(locus);
            }
        }
    }
    let kept: Vec<FixedLocus> = loci
        .iter()
        .filter(|l| !loci.iter().any(|o| o != *l && l.contained_in(o)))
        .cloned()
        .collect();
    Ok(kept)
}
