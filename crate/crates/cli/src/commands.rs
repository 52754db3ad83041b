//! Command dispatch: each command turns a model file into a [`Report`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use glsm_lab::analyzer::{self, CheckStatus, CriticalLocus, Epsilon, ModelInput};
use glsm_lab::gamma;
use glsm_lab::git::{self, Level, Support};
use glsm_lab::linalg::ConeMembership;
use glsm_lab::qmap;
use glsm_lab::rational::{fmt_rat, parse_rat};
use glsm_lab::{PhaseVector, RatVector};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::model_file::ModelFile;
use crate::report::{digest, CommandEcho, Certified, Report, SCHEMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Phases,
    Analyze,
    Lifts,
    Sectors,
    Vdim,
    QmapCheck,
    QmapEnumerate,
    FixedLoci,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Phases => "phases",
            Command::Analyze => "analyze",
            Command::Lifts => "lifts",
            Command::Sectors => "sectors",
            Command::Vdim => "vdim",
            Command::QmapCheck => "qmap-check",
            Command::QmapEnumerate => "qmap-enumerate",
            Command::FixedLoci => "fixed-loci",
        }
    }
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct Options {
    /// Replace theta, e.g. "1,-1" or "1/2,3".
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub theta_override: Option<String>,
    /// "0+" or "infinity".
    #[arg(long)]
    pub epsilon: Option<String>,
    /// R-level of the lift of theta.
    #[arg(long, value_name = "R_LEVEL", allow_hyphen_values = true)]
    pub lift: Option<String>,
    /// Largest base-point count per component for qmap-enumerate.
    #[arg(long)]
    pub max_degree: Option<u32>,
    #[arg(long)]
    pub genus: Option<u32>,
    #[arg(long)]
    pub marks: Option<usize>,
    /// Pairings of beta with the characters of Gamma ("0" for none).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Comma-separated sectors: J, J^k, id, or sector names.
    #[arg(long)]
    pub insertions: Option<String>,
    /// Weights of the extra C* for fixed-loci.
    #[arg(long, value_name = "WEIGHTS", allow_hyphen_values = true)]
    pub action: Option<String>,
}

impl Options {
    fn echo(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.insert(k.to_string(), v);
            }
        };
        put("theta-override", self.theta_override.clone());
        put("epsilon", self.epsilon.clone());
        put("lift", self.lift.clone());
        put("max-degree", self.max_degree.map(|x| x.to_string()));
        put("genus", self.genus.map(|x| x.to_string()));
        put("marks", self.marks.map(|x| x.to_string()));
        put("beta", self.beta.clone());
        put("insertions", self.insertions.clone());
        put("action", self.action.clone());
        out
    }
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Finds a model file, falling back to `$GLSM_LAB_FIXTURES/<name>[.toml]`.
pub fn resolve_model_path(name: &str) -> Result<PathBuf, CliError> {
    let direct = PathBuf::from(name);
    if direct.is_file() {
        return Ok(direct);
    }
    if let Ok(dir) = std::env::var("GLSM_LAB_FIXTURES") {
        let dir = Path::new(&dir);
        for candidate in [dir.join(name), dir.join(format!("{name}.toml"))] {
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
    }
    Err(CliError::Io(format!("{name}: model file not found")))
}

#[derive(Default)]
struct Out {
    payload: Map<String, Value>,
    text: Vec<String>,
    warnings: Vec<String>,
    certificates: Vec<Certified>,
    exit_code: i32,
}

impl Out {
    fn put(&mut self, key: &str, v: impl Serialize) -> Result<(), CliError> {
        self.payload.insert(key.to_string(), serde_json::to_value(v)?);
        Ok(())
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn certify(&mut self, claim: impl Into<String>, certificate: impl Serialize) -> Result<(), CliError> {
        self.certificates.push(Certified { claim: claim.into(), certificate: serde_json::to_value(certificate)? });
        Ok(())
    }
}

pub fn run(command: Command, model: &str, opts: &Options) -> Result<Outcome, CliError> {
    let path = resolve_model_path(model)?;
    let (file, bytes) = ModelFile::load(&path)?;
    let mut m = file.to_model()?;
    apply_overrides(&mut m, opts)?;

    let mut out = Out::default();
    match command {
        Command::Validate => validate(&m, &mut out)?,
        Command::Phases => phases(&m, &mut out)?,
        Command::Analyze => analyze(&m, &mut out)?,
        Command::Lifts => lifts(&m, &mut out)?,
        Command::Sectors => sectors(&m, &mut out)?,
        Command::Vdim => vdim(&m, opts, &mut out)?,
        Command::QmapCheck => qmap_check(&m, &file, &mut out)?,
        Command::QmapEnumerate => qmap_enumerate(&m, &file, opts, &mut out)?,
        Command::FixedLoci => fixed_loci(&m, &file, opts, &mut out)?,
    }
    let report = Report {
        schema: SCHEMA,
        command: CommandEcho { name: command.name().to_string(), model: model.to_string(), options: opts.echo() },
        input_digest: digest(&bytes),
        payload: Value::Object(out.payload),
        warnings: out.warnings,
        certificates: out.certificates,
        text: out.text,
    };
    Ok(Outcome { report, exit_code: out.exit_code })
}

fn apply_overrides(m: &mut ModelInput, opts: &Options) -> Result<(), CliError> {
    if let Some(t) = &opts.theta_override {
        let theta = RatVector::parse_list(t).map_err(|e| CliError::Usage(format!("--theta-override: {}", e.message)))?;
        if theta.len() != m.m() {
            return Err(CliError::Usage(format!("--theta-override needs {} entries", m.m())));
        }
        m.theta = theta;
    }
    if let Some(e) = &opts.epsilon {
        m.epsilon = e.parse().map_err(|e| CliError::Usage(format!("--epsilon: {e}")))?;
    }
    if let Some(l) = &opts.lift {
        m.lift_r_level = Some(parse_rat(l).map_err(|e| CliError::Usage(format!("--lift: {}", e.message)))?);
    }
    Ok(())
}

fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>, CliError> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("{what}: bad integer {x:?}"))))
        .collect()
}

/// `{x1=x2=0}` for the coordinate subspace with support `s`.
fn vanishing(s: &Support, vars: &[String]) -> String {
    let zero: Vec<&str> = s.complement(vars.len()).indices().iter().map(|&j| vars[j].as_str()).collect();
    if zero.is_empty() {
        "{}".into()
    } else {
        format!("{{{}=0}}", zero.join("="))
    }
}

fn names(supports: &[Support], vars: &[String]) -> Vec<String> {
    supports.iter().map(|s| s.named(vars)).collect()
}

fn validate(m: &ModelInput, out: &mut Out) -> Result<(), CliError> {
    let report = analyzer::validate_model(m);
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skip",
        };
        out.line(format!("[{tag}] {}: {}", c.name, c.detail));
        if let Some(cert) = &c.certificate {
            out.certify(c.name, cert)?;
        }
        if c.status == CheckStatus::Fail {
            out.warnings.push(format!("check {} failed: {}", c.name, c.detail));
        }
    }
    out.line(if report.valid { "model is valid" } else { "model is INVALID" });
    if !report.valid {
        out.exit_code = 1;
    }
    out.put("valid", report.valid)?;
    out.put("checks", &report.checks)
}

fn phases(m: &ModelInput, out: &mut Out) -> Result<(), CliError> {
    let q = &m.gauge;
    let vars = &m.variables;
    let tau = m.tau();
    let found = if m.m() <= 2 {
        git::chambers(q)?
    } else {
        out.warnings.push("exact chambers need at most two gauge rows; only the chamber of theta is reported".into());
        git::classify_levels(q, std::slice::from_ref(&tau.0))?
    };
    out.line(format!("{} chamber(s)", found.len()));
    let mut list = Vec::new();
    for (i, c) in found.iter().enumerate() {
        let here = if c.walls.is_empty() {
            git::semistable_supports(q, &tau)? == c.minimal_semistable
        } else {
            c.contains(&tau.0)
        };
        let loci: Vec<String> = c.maximal_unstable.iter().map(|s| vanishing(s, vars)).collect();
        let unstable_locus = if loci.is_empty() { "empty".to_string() } else { loci.join(" ∪ ") };
        out.line(format!(
            "chamber {}: tau = {} (theta = {}){}",
            i + 1,
            c.representative,
            c.representative.neg(),
            if here { "  <- model theta" } else { "" }
        ));
        if !c.walls.is_empty() {
            let walls: Vec<String> = c.walls.iter().map(|w| w.to_string()).collect();
            out.line(format!("  walls: {}", walls.join(", ")));
        }
        out.line(format!("  minimal semistable supports: {}", names(&c.minimal_semistable, vars).join(" ")));
        out.line(format!("  maximal unstable supports:   {}", names(&c.maximal_unstable, vars).join(" ")));
        out.line(format!("  unstable locus: {unstable_locus}"));
        out.line(format!("  strongly regular: {}", c.strongly_regular));
        let level = Level(c.representative.clone());
        for s in &c.minimal_semistable {
            out.certify(format!("chamber {}: {} semistable", i + 1, s.named(vars)), git::semistability(q, &level, s)?)?;
        }
        for s in &c.maximal_unstable {
            out.certify(format!("chamber {}: {} unstable", i + 1, s.named(vars)), git::semistability(q, &level, s)?)?;
        }
        list.push(json!({
            "index": i + 1,
            "representative_tau": c.representative,
            "representative_theta": c.representative.neg(),
            "walls": c.walls,
            "contains_model_theta": here,
            "strongly_regular": c.strongly_regular,
            "minimal_semistable": names(&c.minimal_semistable, vars),
            "maximal_unstable": names(&c.maximal_unstable, vars),
            "unstable_locus": loci,
        }));
    }
    out.put("chamber_count", found.len())?;
    out.put("chambers", list)
}

fn gamma_summary(g: &gamma::GammaData) -> Value {
    json!({
        "j": g.j,
        "d": g.d,
        "q": fmt_rat(&g.q),
        "intersection_order": g.intersection.len(),
        "zeta": g.zeta,
        "eps": g.eps,
    })
}

fn analyze(m: &ModelInput, out: &mut Out) -> Result<(), CliError> {
    let report = analyzer::validate_model(m);
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    out.put("valid", report.valid)?;
    out.put("failed_checks", &failed)?;
    if !report.valid {
        out.line(format!("model is INVALID: {}", failed.join(", ")));
        for c in report.failures() {
            out.warnings.push(format!("check {} failed: {}", c.name, c.detail));
        }
        out.exit_code = 1;
        return Ok(());
    }
    let vars = &m.variables;
    let g = m.gamma()?;
    let chat = m.central_charge()?;
    out.line("model is valid");
    out.line(format!("J = {} (order {}), q = {}, central charge = {}", g.j, g.d, fmt_rat(&g.q), fmt_rat(&chat)));
    out.put("gamma", gamma_summary(&g))?;
    out.put("central_charge", fmt_rat(&chat))?;

    let minimal = git::semistable_supports(&m.gauge, &m.tau())?;
    let unstable: Vec<String> =
        git::maximal_unstable_from_minimal(m.n(), &minimal).iter().map(|s| vanishing(s, vars)).collect();
    out.line(format!("unstable locus: {}", unstable.join(" ∪ ")));
    out.put("unstable_locus", &unstable)?;

    let locus = analyzer::critical_components(m)?;
    let verdict = analyzer::nondegeneracy_check(&locus);
    describe_locus(&locus, vars, out);
    out.line(format!("nondegeneracy: {}", compactness(verdict.overall)));
    out.put("critical_locus", &locus)?;
    out.put("nondegeneracy", &verdict)?;

    let secs = analyzer::sectors(m)?;
    out.line(format!("{} sector(s)", secs.len()));
    out.put("sectors", &secs)?;

    let lifts = gamma::analyze_lifts(&g, &m.theta)?;
    out.line(match &lifts.good_r_level {
        Some(r) => format!("unique good lift at R-level {}", fmt_rat(r)),
        None => "no good lift".to_string(),
    });
    out.put("lifts", &lifts)
}

fn compactness(c: analyzer::Compactness) -> &'static str {
    match c {
        analyzer::Compactness::Compact => "compact",
        analyzer::Compactness::Noncompact => "NONCOMPACT",
        analyzer::Compactness::Unknown => "unknown",
    }
}

fn describe_locus(locus: &CriticalLocus, vars: &[String], out: &mut Out) {
    match locus {
        CriticalLocus::Raw { equations } => {
            let eqs: Vec<String> = equations.iter().map(|e| format!("{e} = 0")).collect();
            out.line(format!("critical locus (undecomposed): {}", eqs.join(", ")));
        }
        CriticalLocus::Structured { p_fields, components, .. } => {
            out.line(format!("W = sum p_j F_j with p-fields {}", p_fields.named(vars)));
            for c in components {
                let eqs: Vec<String> = c.equations.iter().map(|e| e.to_string()).collect();
                out.line(format!(
                    "  {:?} on {}: {} = 0; {}; quotient {}",
                    c.kind,
                    c.support.named(vars),
                    eqs.join(", "),
                    if c.survives_semistability { "meets the semistable locus" } else { "unstable" },
                    compactness(c.quotient_compact)
                ));
            }
        }
    }
}

fn lifts(m: &ModelInput, out: &mut Out) -> Result<(), CliError> {
    let g = m.gamma()?;
    let vars = &m.variables;
    let analysis = gamma::analyze_lifts(&g, &m.theta)?;
    let configured = m.lift();
    let cmp = gamma::compare_lift(&g, &configured)?;
    let verdict = |good: bool| if good { "GOOD" } else { "NOT GOOD" };

    let trivial_good = analysis.trivial_is_good;
    out.line(format!("trivial lift (R-level 0): {}", verdict(trivial_good)));
    if configured.r_level != glsm_lab::rational::rat(0) {
        out.line(format!("configured lift (R-level {}): {}", fmt_rat(&configured.r_level), verdict(cmp.good)));
    }
    match &analysis.good_r_level {
        Some(r) => out.line(format!("unique good R-level: {}; every other R-level is NOT GOOD", fmt_rat(r))),
        None => out.line("no R-level gives a good lift"),
    }
    out.line("R-level at which each minimal semistable support stays semistable:");
    for p in &analysis.per_support {
        out.line(format!("  {}: {}", p.support.named(vars), fmt_rat(&p.r_level)));
    }
    out.certify(
        "each minimal semistable support is a basis, so it stays semistable only at its listed R-level",
        &analysis.per_support,
    )?;
    for w in &analysis.witnesses {
        out.line(format!(
            "  R-level {} ({}): NOT GOOD, {} becomes unstable",
            fmt_rat(&w.r_level),
            w.direction,
            w.support.named(vars)
        ));
        out.certify(
            format!("R-level {} is not good: {} is unstable for Gamma", fmt_rat(&w.r_level), w.support.named(vars)),
            ConeMembership::Outside { separator: w.separator.clone() },
        )?;
    }
    out.put("theta", &m.theta)?;
    out.put("trivial_lift_good", trivial_good)?;
    out.put("configured_lift", json!({ "r_level": fmt_rat(&configured.r_level), "good": cmp.good }))?;
    out.put("good_r_level", analysis.good_r_level.as_ref().map(fmt_rat))?;
    out.put("per_support", &analysis.per_support)?;
    out.put("witnesses", &analysis.witnesses)
}

fn sectors(m: &ModelInput, out: &mut Out) -> Result<(), CliError> {
    let secs = analyzer::sectors(m)?;
    out.line(format!("{} sector(s)", secs.len()));
    for s in &secs {
        out.line(format!(
            "  {:<5} gamma = {}  fixed {}  age {}  shift {}",
            s.name.as_deref().unwrap_or("-"),
            s.gamma,
            s.fixed_support.named(&m.variables),
            fmt_rat(&s.age),
            fmt_rat(&s.degree_shift)
        ));
    }
    out.put("count", secs.len())?;
    out.put("sectors", &secs)
}

fn insertion(token: &str, m: &ModelInput, secs: &[analyzer::Sector]) -> Result<PhaseVector, CliError> {
    let j = m.rcharge()?.j();
    let t = token.trim();
    if matches!(t, "1" | "id" | "e") {
        return Ok(PhaseVector::identity(m.n()));
    }
    if t == "J" {
        return Ok(j);
    }
    if let Some(k) = t.strip_prefix("J^") {
        let k: i64 = k.parse().map_err(|_| CliError::Usage(format!("bad insertion {t:?}")))?;
        return Ok(j.pow(k));
    }
    secs.iter()
        .find(|s| s.name.as_deref() == Some(t))
        .map(|s| s.gamma.clone())
        .ok_or_else(|| CliError::Usage(format!("unknown insertion {t:?}")))
}

fn vdim(m: &ModelInput, opts: &Options, out: &mut Out) -> Result<(), CliError> {
    let genus = opts.genus.unwrap_or(0);
    let tokens: Vec<&str> = match &opts.insertions {
        Some(s) if !s.trim().is_empty() => s.split(',').collect(),
        _ => Vec::new(),
    };
    let marks = opts.marks.unwrap_or(tokens.len());
    let beta = match opts.beta.as_deref().map(str::trim) {
        None | Some("0") => RatVector::zeros(m.m() + 1),
        Some(b) => RatVector::parse_list(b).map_err(|e| CliError::Usage(format!("--beta: {}", e.message)))?,
    };
    if beta.len() != m.m() + 1 {
        return Err(CliError::Usage(format!("--beta needs {} entries (gauge rows then R)", m.m() + 1)));
    }
    let secs = analyzer::sectors(m).unwrap_or_default();
    let insertions: Vec<PhaseVector> = tokens.iter().map(|t| insertion(t, m, &secs)).collect::<Result<_, _>>()?;
    let d = analyzer::virtual_dimension(m, genus, marks, &beta, &insertions)?;
    let r = m.rcharge()?;
    out.line(format!("genus {genus}, {marks} marking(s), beta = {beta}"));
    for (t, g) in tokens.iter().zip(&insertions) {
        out.line(format!("  insertion {}: gamma = {}, age {}", t.trim(), g, fmt_rat(&analyzer::age(g))));
    }
    out.line(format!("virtual dimension = {}", fmt_rat(&d)));
    out.put("genus", genus)?;
    out.put("marks", marks)?;
    out.put("beta", &beta)?;
    out.put(
        "insertions",
        tokens
            .iter()
            .zip(&insertions)
            .map(|(t, g)| json!({ "token": t.trim(), "gamma": g, "age": fmt_rat(&analyzer::age(g)) }))
            .collect::<Vec<_>>(),
    )?;
    out.put("central_charge", fmt_rat(&m.central_charge()?))?;
    out.put("q", fmt_rat(&r.q()))?;
    out.put("virtual_dimension", fmt_rat(&d))
}

fn need_graph(file: &ModelFile) -> Result<(qmap::DualGraph, Option<qmap::QmapNumericalData>, Option<i64>), CliError> {
    file.graph()?.ok_or_else(|| CliError::Semantic("the model file has no [graph] section".into()))
}

fn qmap_check(m: &ModelInput, file: &ModelFile, out: &mut Out) -> Result<(), CliError> {
    let (g, data, spin) = need_graph(file)?;
    let data = data.ok_or_else(|| CliError::Semantic("[graph] has no per-vertex data".into()))?;
    let verdict = qmap::check_stability(&g, &data, m.epsilon, spin)?;
    out.line(format!("epsilon = {}: {}", m.epsilon, if verdict.stable { "STABLE" } else { "UNSTABLE" }));
    for v in &verdict.vertices {
        let status = if v.violations.is_empty() { "ok".to_string() } else { v.violations.join("; ") };
        out.line(format!("  vertex {}: wlog {}, {} special point(s): {}", v.vertex, v.wlog, v.special_points, status));
    }
    let dm = if m.epsilon == Epsilon::Infinity && verdict.stable {
        let dm = qmap::classify_infty_lg(&g, &data)?;
        out.line(format!("underlying curve is DM-stable: {dm}"));
        Some(dm)
    } else {
        None
    };
    if verdict.stable {
        out.certify("stability holds vertex by vertex", &verdict.vertices)?;
    }
    out.put("stable", verdict.stable)?;
    out.put("verdict", &verdict)?;
    out.put("dm_stable", dm)
}

fn qmap_enumerate(m: &ModelInput, file: &ModelFile, opts: &Options, out: &mut Out) -> Result<(), CliError> {
    let (g, _, spin) = need_graph(file)?;
    let b = spin.unwrap_or(m.r_degree);
    let max_d = opts.max_degree.unwrap_or(0);
    let found = qmap::enumerate_lg_configs(&g, b, m.epsilon, max_d)?;
    out.line(format!("b = {b}, epsilon = {}, base points per component <= {max_d}", m.epsilon));
    out.line(format!("{} stable configuration(s)", found.len()));
    for d in &found {
        let parts: Vec<String> = d
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| format!("v{i}: D={} degA={} deg L={}", v.base_d, fmt_rat(&v.deg_a), fmt_rat(&v.lift_deg)))
            .collect();
        out.line(format!("  {}", parts.join(" | ")));
    }
    if m.epsilon == Epsilon::Infinity {
        out.put("dm_stable", g.is_dm_stable())?;
    }
    out.put("b", b)?;
    out.put("epsilon", m.epsilon)?;
    out.put("max_degree", max_d)?;
    out.put("count", found.len())?;
    out.put("configurations", &found)
}

fn fixed_loci(m: &ModelInput, file: &ModelFile, opts: &Options, out: &mut Out) -> Result<(), CliError> {
    let action = match (&opts.action, &file.model.extra_action) {
        (Some(a), _) => parse_ints(a, "--action")?,
        (None, Some(a)) => a.clone(),
        (None, None) => return Err(CliError::Usage("fixed-loci needs --action or extra_action in [model]".into())),
    };
    let loci = analyzer::fixed_loci(m, &action)?;
    out.line(format!("extra C* weights {action:?}: {} fixed locus/loci", loci.len()));
    let described: Vec<String> = loci.iter().map(|l| l.describe(&m.variables)).collect();
    for (l, d) in loci.iter().zip(&described) {
        out.line(format!("  {d}  (in {:?}, support {})", l.component, l.support.named(&m.variables)));
    }
    out.put("action", &action)?;
    out.put("count", loci.len())?;
    out.put("loci", described)?;
    out.put("details", &loci)
}
