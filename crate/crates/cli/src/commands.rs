use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Rotation3;
use qframe_core::detection::{
    binomial_se, fibonacci_rotations, orientation_sweep, qdoc_exact_on_grid, qdoc_exact_with_cap,
    qdoc_monte_carlo, threshold_grid, BinaryHypothesis, QdocCurve, QdocPoint,
};
use qframe_core::estimation::{tradeoff_grid, EstimationSummary};
use qframe_core::povm::{
    platonic_povm, quaternion_of, rotation_from_quaternion, IcKind, PlatonicSpec, Povm,
    PovmDocument, Solid,
};
use qframe_core::sampling_stats::{
    cell_seed, coeff_error_moments, composition_count, deviation_moments_analytic,
    empirical_deviation_moments, stated_deviation_moments,
};
use serde::Serialize;

use crate::config::{
    self, resolve_rotation, EstimateConfig, MomentsConfig, OrientSweepConfig, QdocConfig,
    StateSpec, VerifyConfig,
};
use crate::output::{num, write_text, Clock, ResultDoc};
use crate::plot::{qdoc_svg, Series};
use crate::{
    CliError, EstimateArgs, HypothesisArgs, MomentsArgs, OrientSweepArgs, QdocArgs, ReportFormat,
    VerifyArgs,
};

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Validation(msg.into()))
    }
}

fn build_povm(solid: Solid, rotation: &Rotation3<f64>) -> Result<Povm, CliError> {
    Ok(platonic_povm(&PlatonicSpec::new(solid).rotated(*rotation))?)
}

fn hypothesis(rho0: &StateSpec, rho1: &StateSpec, q0: f64) -> Result<BinaryHypothesis, CliError> {
    Ok(BinaryHypothesis::new(
        rho0.to_density("rho0")?,
        rho1.to_density("rho1")?,
        q0,
    )?)
}

fn apply_hypothesis(h: &HypothesisArgs, rho0: &mut StateSpec, rho1: &mut StateSpec, q0: &mut f64) {
    if let Some([t, p]) = h.rho0_angles {
        *rho0 = StateSpec::angles(t, p);
    }
    if let Some(r) = h.rho0_bloch {
        *rho0 = StateSpec::bloch(r);
    }
    if let Some([t, p]) = h.rho1_angles {
        *rho1 = StateSpec::angles(t, p);
    }
    if let Some(r) = h.rho1_bloch {
        *rho1 = StateSpec::bloch(r);
    }
    if let Some(q) = h.q0 {
        *q0 = q;
    }
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub source: String,
    pub dim: usize,
    pub elements: usize,
    pub valid: bool,
    pub psd: bool,
    pub min_eigenvalues: Vec<f64>,
    pub completeness_residual: f64,
    pub trace_sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit_cone: Option<bool>,
    pub informationally_complete: bool,
    pub ic_rank: usize,
    pub ic_kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tight: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tightness_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cn_minus_ma2: Option<f64>,
}

impl VerifyReport {
    pub fn of(povm: &Povm, source: String, tol: f64) -> Self {
        let v = povm.validate(tol);
        let ic = povm.ic_check();
        let tight = povm.tight_ic_check(tol).ok();
        let entf = povm
            .traceless_rep()
            .ok()
            .and_then(|r| r.entf_params(tol).ok());
        Self {
            source,
            dim: povm.dim(),
            elements: povm.len(),
            valid: v.is_valid,
            psd: v.psd_ok,
            min_eigenvalues: v.min_eigenvalues,
            completeness_residual: v.completeness_residual,
            trace_sum: v.trace_sum,
            qubit_cone: v.qubit.map(|q| q.cone_ok && q.c0_in_range),
            informationally_complete: ic.is_ic,
            ic_rank: ic.rank,
            ic_kind: match ic.kind {
                IcKind::NotIc => "not-ic",
                IcKind::Minimal => "minimal",
                IcKind::Overcomplete => "overcomplete",
            }
            .into(),
            tight: tight.map(|t| t.is_tight_ic),
            tightness_residual: tight.map(|t| t.residual),
            frame_bound: tight.map(|t| t.c),
            element_norm: entf.map(|e| e.a),
            cn_minus_ma2: entf.map(|e| e.c * e.n as f64 - e.m as f64 * e.a * e.a),
        }
    }

    pub fn to_text(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let opt = |x: Option<f64>| x.map_or("n/a".to_string(), num);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "POVM: {} ({} elements on C^{})",
            self.source, self.elements, self.dim
        );
        let _ = writeln!(s, "valid POVM:               {}", yn(self.valid));
        let _ = writeln!(s, "positive semidefinite:    {}", yn(self.psd));
        let margins: Vec<String> = self.min_eigenvalues.iter().map(|&x| num(x)).collect();
        let _ = writeln!(s, "min eigenvalues:          {}", margins.join(" "));
        let _ = writeln!(
            s,
            "completeness residual:    {}",
            num(self.completeness_residual)
        );
        let _ = writeln!(s, "trace sum:                {}", num(self.trace_sum));
        if let Some(c) = self.qubit_cone {
            let _ = writeln!(s, "qubit cone constraints:   {}", yn(c));
        }
        let _ = writeln!(
            s,
            "informationally complete: {} (rank {}, {})",
            yn(self.informationally_complete),
            self.ic_rank,
            self.ic_kind
        );
        let _ = writeln!(
            s,
            "tight Q-frame:            {}",
            self.tight.map_or("n/a", yn)
        );
        let _ = writeln!(
            s,
            "tightness residual:       {}",
            opt(self.tightness_residual)
        );
        let _ = writeln!(s, "frame bound C:            {}", opt(self.frame_bound));
        let _ = writeln!(s, "element norm a:           {}", opt(self.element_norm));
        let _ = writeln!(s, "C N - M a^2:              {}", opt(self.cn_minus_ma2));
        s
    }
}

fn resolve_verify(args: &VerifyArgs) -> Result<VerifyConfig, CliError> {
    let mut cfg: VerifyConfig = config::load(args.config.as_deref())?;
    if args.solid.is_some() {
        cfg.solid = args.solid;
    }
    if let Some(q) = args.rotation {
        cfg.rotation = Some(q);
        cfg.euler = None;
    }
    if let Some(e) = args.euler {
        cfg.euler = Some(e);
        cfg.rotation = None;
    }
    if args.weights.is_some() {
        cfg.weights = args.weights.clone();
    }
    if args.povm_file.is_some() {
        cfg.povm_file = args.povm_file.clone();
    }
    if args.export.is_some() {
        cfg.export = args.export.clone();
    }
    if let Some(t) = args.tolerance {
        cfg.tolerance = t;
    }
    Ok(cfg)
}

fn load_povm_document(path: &Path) -> Result<Povm, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let doc: PovmDocument =
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(Povm::from_elements_unchecked(doc.to_elements()?)?)
}

pub fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let cfg = resolve_verify(&args)?;
    ensure(
        cfg.tolerance > 0.0 && cfg.tolerance.is_finite(),
        "tolerance must be positive",
    )?;
    let (povm, source) = match (&cfg.povm_file, cfg.solid) {
        (Some(path), None) => (load_povm_document(path)?, path.display().to_string()),
        (None, Some(solid)) => {
            let rot = resolve_rotation(cfg.rotation, cfg.euler)?;
            let mut spec = PlatonicSpec::new(solid).rotated(rot);
            if let Some(w) = &cfg.weights {
                spec = spec.with_weights(w.clone());
            }
            (platonic_povm(&spec)?, solid.name().to_string())
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Parse(
                "give either a solid or a POVM file, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Parse(
                "no POVM given: use --solid or --povm-file".into(),
            ))
        }
    };
    let report = VerifyReport::of(&povm, source, cfg.tolerance);
    let text = match args.format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Toml => toml::to_string(&report).expect("report serializes"),
    };
    write_text(None, &text)?;
    if !report.valid {
        return Err(CliError::Validation(format!(
            "not a POVM (completeness residual {}, psd {})",
            num(report.completeness_residual),
            report.psd
        )));
    }
    if let Some(path) = &cfg.export {
        let doc = toml::to_string(&PovmDocument::from_povm(&povm)).expect("document serializes");
        write_text(Some(path), &doc)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// estimate

pub fn resolve_estimate(args: &EstimateArgs) -> Result<EstimateConfig, CliError> {
    let mut cfg: EstimateConfig = config::load(args.config.as_deref())?;
    if let Some(s) = &args.solids {
        cfg.solids = s.clone();
    }
    if let Some(l) = &args.shots {
        cfg.shots = l.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.state.bloch {
        cfg.state = StateSpec::bloch(r);
    } else if args.state.theta.is_some() || args.state.phi.is_some() {
        let theta = args.state.theta.or(cfg.state.theta).unwrap_or(0.0);
        let phi = args.state.phi.or(cfg.state.phi).unwrap_or(0.0);
        cfg.state = StateSpec::angles(theta, phi);
    }
    if let Some(q) = args.rotation {
        cfg.rotation = Some(q);
        cfg.euler = None;
    }
    if let Some(e) = args.euler {
        cfg.euler = Some(e);
        cfg.rotation = None;
    }
    cfg.force_exact_frequencies |= args.force_exact_frequencies;
    cfg.self_check |= args.self_check;
    if let Some(s) = args.self_check_sigma {
        cfg.self_check_sigma = s;
    }
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    Ok(cfg)
}

pub const ESTIMATE_COLUMNS: [&str; 11] = [
    "solid",
    "m",
    "shots",
    "trials",
    "mean_error_sq",
    "std_error_sq",
    "standard_error",
    "predicted_uncorrelated",
    "predicted_exact",
    "z_score",
    "seed",
];

pub fn run_estimate(cfg: &EstimateConfig) -> Result<(ResultDoc, Vec<EstimationSummary>), CliError> {
    ensure(
        !cfg.solids.is_empty() && !cfg.shots.is_empty(),
        "solids and shots must be non-empty",
    )?;
    ensure(cfg.trials >= 2, "trials must be at least 2")?;
    ensure(
        cfg.shots.iter().all(|&l| l >= 1),
        "shots must be at least 1",
    )?;
    ensure(
        cfg.self_check_sigma > 0.0,
        "self_check_sigma must be positive",
    )?;
    let rho = cfg.state.to_density("state")?;
    let rot = resolve_rotation(cfg.rotation, cfg.euler)?;
    let povms = cfg
        .solids
        .iter()
        .map(|&s| build_povm(s, &rot))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = tradeoff_grid(
        &povms,
        &cfg.shots,
        &rho,
        cfg.trials,
        cfg.seed,
        cfg.force_exact_frequencies,
    )?;
    let mut doc = ResultDoc::new(
        "estimate",
        Some(cfg.seed),
        config::render(cfg),
        ESTIMATE_COLUMNS.to_vec(),
    );
    for (i, s) in grid.iter().enumerate() {
        let solid = cfg.solids[i / cfg.shots.len()];
        doc.push_row(vec![
            solid.name().into(),
            s.m.to_string(),
            s.shots.to_string(),
            s.trials.to_string(),
            num(s.mean_error_sq),
            num(s.std_error_sq),
            num(s.standard_error()),
            num(s.predicted_uncorrelated),
            num(s.predicted_exact),
            num(s.z_score()),
            cell_seed(cfg.seed, s.m, s.shots).to_string(),
        ]);
    }
    if let (Some(&lo), Some(&hi)) = (cfg.shots.iter().min(), cfg.shots.iter().max()) {
        if lo < hi && !cfg.force_exact_frequencies {
            for (k, solid) in cfg.solids.iter().enumerate() {
                let row = &grid[k * cfg.shots.len()..(k + 1) * cfg.shots.len()];
                let at = |l: u64| {
                    row.iter()
                        .find(|s| s.shots == l)
                        .map(|s| s.mean_error_sq * l as f64)
                };
                if let (Some(a), Some(b)) = (at(lo), at(hi)) {
                    doc.push_footer(format!(
                        "inverse-L scaling {} m={}: (L*mean at L={lo}) / (L*mean at L={hi}) = {}",
                        solid.name(),
                        solid.vertex_count(),
                        num(a / b)
                    ));
                }
            }
        }
    }
    Ok((doc, grid))
}

pub fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let clock = Clock::start();
    let cfg = resolve_estimate(&args)?;
    let (mut doc, grid) = run_estimate(&cfg)?;
    doc = doc.with_clock(clock);
    let check = cfg.self_check && !cfg.force_exact_frequencies;
    let worst = grid.iter().map(|s| s.z_score().abs()).fold(0.0, f64::max);
    if check {
        let status = if worst <= cfg.self_check_sigma {
            "pass"
        } else {
            "fail"
        };
        doc.push_footer(format!(
            "self-check max |z| = {} (limit {}): {status}",
            num(worst),
            num(cfg.self_check_sigma)
        ));
    }
    doc.emit(cfg.output.as_deref())?;
    if check && worst > cfg.self_check_sigma {
        return Err(CliError::SelfCheck(format!(
            "max |z| = {worst:.3} exceeds {}",
            cfg.self_check_sigma
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// qdoc

pub fn resolve_qdoc(args: &QdocArgs) -> Result<QdocConfig, CliError> {
    let mut cfg: QdocConfig = config::load(args.config.as_deref())?;
    if let Some(s) = &args.solids {
        cfg.solids = s.clone();
    }
    if let Some(l) = &args.shots {
        cfg.shots = l.clone();
    }
    apply_hypothesis(&args.hypothesis, &mut cfg.rho0, &mut cfg.rho1, &mut cfg.q0);
    if let Some(q) = args.rotation {
        cfg.rotation = Some(q);
        cfg.euler = None;
    }
    if let Some(e) = args.euler {
        cfg.euler = Some(e);
        cfg.rotation = None;
    }
    if let Some(c) = args.enumeration_cap {
        cfg.enumeration_cap = c;
    }
    cfg.monte_carlo_fallback |= args.monte_carlo_fallback;
    cfg.compare_monte_carlo |= args.compare_monte_carlo;
    cfg.envelope |= args.envelope;
    if let Some(n) = args.monte_carlo_samples {
        cfg.monte_carlo_samples = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    if args.plot.is_some() {
        cfg.plot = args.plot.clone();
    }
    Ok(cfg)
}

pub const QDOC_COLUMNS: [&str; 9] = [
    "solid", "m", "shots", "method", "eta", "pf", "pd", "pf_se", "pd_se",
];

/// Exact or Monte Carlo curves for one `(solid, L)` cell.
#[derive(Debug, Clone)]
pub struct QdocCell {
    pub solid: Solid,
    pub primary: QdocCurve,
    pub exact_grid: Option<QdocCurve>,
    pub monte_carlo: Option<QdocCurve>,
}

fn push_curve(
    doc: &mut ResultDoc,
    solid: Solid,
    label: &str,
    curve: &QdocCurve,
    points: &[QdocPoint],
    se: bool,
) {
    let n = match curve.method {
        qframe_core::detection::QdocMethod::MonteCarlo { samples, .. } => Some(samples),
        _ => None,
    };
    for p in points {
        let (sf, sd) = match (se, n) {
            (true, Some(n)) => (binomial_se(p.pf, n), binomial_se(p.pd, n)),
            _ => (0.0, 0.0),
        };
        doc.push_row(vec![
            solid.name().into(),
            curve.m.to_string(),
            curve.shots.to_string(),
            label.into(),
            num(p.eta),
            num(p.pf),
            num(p.pd),
            num(sf),
            num(sd),
        ]);
    }
}

/// Largest `|mc - exact| / se` over matching thresholds, with `se` from the exact value.
pub fn max_z(exact: &QdocCurve, mc: &QdocCurve, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for e in &exact.points {
        let Some(m) = mc.points.iter().find(|m| m.eta == e.eta) else {
            continue;
        };
        for (x, y) in [(e.pf, m.pf), (e.pd, m.pd)] {
            let se = binomial_se(x, samples);
            let d = (x - y).abs();
            let z = if se > 0.0 {
                d / se
            } else if d > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst = worst.max(z);
        }
    }
    worst
}

pub fn run_qdoc(cfg: &QdocConfig) -> Result<(ResultDoc, Vec<QdocCell>), CliError> {
    ensure(
        !cfg.solids.is_empty() && !cfg.shots.is_empty(),
        "solids and shots must be non-empty",
    )?;
    ensure(
        cfg.shots.iter().all(|&l| l >= 1),
        "shots must be at least 1",
    )?;
    let hyp = hypothesis(&cfg.rho0, &cfg.rho1, cfg.q0)?;
    let rot = resolve_rotation(cfg.rotation, cfg.euler)?;
    let cap = cfg.enumeration_cap as u128;
    let needs_mc = cfg.compare_monte_carlo || cfg.monte_carlo_fallback;
    if needs_mc {
        ensure(
            cfg.monte_carlo_samples >= 1000,
            "monte_carlo_samples must be at least 1000",
        )?;
    }
    for &solid in &cfg.solids {
        for &l in &cfg.shots {
            let count = composition_count(l, solid.vertex_count());
            if count > cap && !cfg.monte_carlo_fallback {
                return Err(CliError::Cap(format!(
                    "{} at L = {l} needs {count} count vectors, above the cap {cap}; enable monte_carlo_fallback",
                    solid.name()
                )));
            }
        }
    }
    let mut cells = Vec::new();
    for &solid in &cfg.solids {
        let povm = build_povm(solid, &rot)?;
        for &l in &cfg.shots {
            let seed = cell_seed(cfg.seed, solid.vertex_count(), l);
            let enumerable = composition_count(l, solid.vertex_count()) <= cap;
            let mc = if needs_mc && (cfg.compare_monte_carlo || !enumerable) {
                Some(qdoc_monte_carlo(
                    &hyp,
                    &povm,
                    l,
                    cfg.monte_carlo_samples,
                    seed,
                )?)
            } else {
                None
            };
            let cell = if enumerable {
                QdocCell {
                    solid,
                    primary: qdoc_exact_with_cap(&hyp, &povm, l, cap)?,
                    exact_grid: cfg
                        .compare_monte_carlo
                        .then(|| qdoc_exact_on_grid(&hyp, &povm, l, &threshold_grid(), cap))
                        .transpose()?,
                    monte_carlo: mc,
                }
            } else {
                QdocCell {
                    solid,
                    primary: mc.expect("fallback computed"),
                    exact_grid: None,
                    monte_carlo: None,
                }
            };
            cells.push(cell);
        }
    }
    let mut doc = ResultDoc::new(
        "qdoc",
        Some(cfg.seed),
        config::render(cfg),
        QDOC_COLUMNS.to_vec(),
    );
    for c in &cells {
        push_curve(
            &mut doc,
            c.solid,
            c.primary.method.name(),
            &c.primary,
            &c.primary.points,
            true,
        );
        if cfg.envelope {
            push_curve(
                &mut doc,
                c.solid,
                "envelope",
                &c.primary,
                &c.primary.concave_envelope(),
                false,
            );
        }
        if let Some(g) = &c.exact_grid {
            push_curve(&mut doc, c.solid, "exact-grid", g, &g.points, false);
        }
        if let Some(m) = &c.monte_carlo {
            push_curve(&mut doc, c.solid, m.method.name(), m, &m.points, true);
        }
    }
    for c in &cells {
        if let (Some(g), Some(m)) = (&c.exact_grid, &c.monte_carlo) {
            doc.push_footer(format!(
                "agreement {} L={}: max |z| = {}",
                c.solid.name(),
                c.primary.shots,
                num(max_z(g, m, cfg.monte_carlo_samples))
            ));
        }
    }
    for &solid in &cfg.solids {
        let mine: Vec<&QdocCell> = cells.iter().filter(|c| c.solid == solid).collect();
        let lo = mine.iter().min_by_key(|c| c.primary.shots);
        let hi = mine.iter().max_by_key(|c| c.primary.shots);
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo.primary.shots < hi.primary.shots {
                let ok = hi.primary.dominates(&lo.primary, 1e-12);
                doc.push_footer(format!(
                    "dominance {} L={} over L={}: {}",
                    solid.name(),
                    hi.primary.shots,
                    lo.primary.shots,
                    if ok { "pass" } else { "flag" }
                ));
            }
        }
    }
    Ok((doc, cells))
}

pub fn qdoc(args: QdocArgs) -> Result<(), CliError> {
    let clock = Clock::start();
    let cfg = resolve_qdoc(&args)?;
    let (doc, cells) = run_qdoc(&cfg)?;
    let doc = doc.with_clock(clock);
    doc.emit(cfg.output.as_deref())?;
    if let Some(path) = &cfg.plot {
        let series: Vec<Series> = cells
            .iter()
            .map(|c| {
                let pts = if c.primary.method.name() == "exact" {
                    c.primary.concave_envelope()
                } else {
                    c.primary.points.clone()
                };
                Series {
                    label: format!("M={} L={}", c.primary.m, c.primary.shots),
                    points: pts.iter().map(|p| (p.pf, p.pd)).collect(),
                }
            })
            .collect();
        write_text(
            Some(path),
            &qdoc_svg("LRT operating characteristics", &series),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// orient-sweep

pub fn resolve_orient_sweep(args: &OrientSweepArgs) -> Result<OrientSweepConfig, CliError> {
    let mut cfg: OrientSweepConfig = config::load(args.config.as_deref())?;
    if let Some(s) = &args.solids {
        cfg.solids = s.clone();
    }
    if let Some(l) = args.shots {
        cfg.shots = l;
    }
    apply_hypothesis(&args.hypothesis, &mut cfg.rho0, &mut cfg.rho1, &mut cfg.q0);
    if let Some(a) = args.axes {
        cfg.axes = a;
    }
    if let Some(a) = args.angles {
        cfg.angles = a;
    }
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    Ok(cfg)
}

pub const SWEEP_COLUMNS: [&str; 8] = ["solid", "m", "index", "qw", "qx", "qy", "qz", "pe"];

/// Per-solid extremes of the probability of error.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub solid: Solid,
    pub count: usize,
    pub pe_min: f64,
    pub pe_max: f64,
    pub argmin: usize,
}

impl SweepSummary {
    pub fn spread(&self) -> f64 {
        self.pe_max - self.pe_min
    }
}

/// Whether spreads are non-increasing and minima non-decreasing in `M` over the
/// solids with `M >= 4`, if at least two are present.
pub fn sweep_trends(summaries: &[SweepSummary]) -> Option<(bool, bool)> {
    let mut s: Vec<&SweepSummary> = summaries
        .iter()
        .filter(|s| s.solid.vertex_count() >= 4)
        .collect();
    if s.len() < 2 {
        return None;
    }
    s.sort_by_key(|s| s.solid.vertex_count());
    let spread = s.windows(2).all(|w| w[1].spread() <= w[0].spread());
    let minima = s.windows(2).all(|w| w[1].pe_min >= w[0].pe_min);
    Some((spread, minima))
}

pub fn run_orient_sweep(
    cfg: &OrientSweepConfig,
) -> Result<(ResultDoc, Vec<SweepSummary>), CliError> {
    ensure(!cfg.solids.is_empty(), "solids must be non-empty")?;
    ensure(cfg.shots >= 1, "shots must be at least 1")?;
    let hyp = hypothesis(&cfg.rho0, &cfg.rho1, cfg.q0)?;
    let rotations = match &cfg.rotations {
        Some(qs) => qs
            .iter()
            .map(|&q| rotation_from_quaternion(q))
            .collect::<Result<Vec<_>, _>>()?,
        None => {
            ensure(
                cfg.axes >= 1 && cfg.angles >= 1,
                "axes and angles must be at least 1",
            )?;
            fibonacci_rotations(cfg.axes, cfg.angles)
        }
    };
    let mut doc = ResultDoc::new(
        "orient-sweep",
        None,
        config::render(cfg),
        SWEEP_COLUMNS.to_vec(),
    );
    let mut summaries = Vec::new();
    for &solid in &cfg.solids {
        let res = orientation_sweep(&hyp, &PlatonicSpec::new(solid), cfg.shots, &rotations)?;
        for (i, (r, pe)) in res.rotations.iter().zip(&res.pe).enumerate() {
            let q = quaternion_of(r);
            doc.push_row(vec![
                solid.name().into(),
                solid.vertex_count().to_string(),
                i.to_string(),
                num(q[0]),
                num(q[1]),
                num(q[2]),
                num(q[3]),
                num(*pe),
            ]);
        }
        summaries.push(SweepSummary {
            solid,
            count: res.pe.len(),
            pe_min: res.pe_min,
            pe_max: res.pe_max,
            argmin: res.argmin(),
        });
    }
    for s in &summaries {
        doc.push_footer(format!(
            "summary solid={} m={} rotations={} pe_min={} pe_max={} spread={} argmin={}",
            s.solid.name(),
            s.solid.vertex_count(),
            s.count,
            num(s.pe_min),
            num(s.pe_max),
            num(s.spread()),
            s.argmin
        ));
    }
    if let Some((spread, minima)) = sweep_trends(&summaries) {
        let st = |b: bool| if b { "pass" } else { "flag" };
        doc.push_footer(format!(
            "reproduction spread non-increasing in M: {}",
            st(spread)
        ));
        doc.push_footer(format!(
            "reproduction minimum non-decreasing in M: {}",
            st(minima)
        ));
    }
    Ok((doc, summaries))
}

pub fn orient_sweep(args: OrientSweepArgs) -> Result<(), CliError> {
    let clock = Clock::start();
    let cfg = resolve_orient_sweep(&args)?;
    let (doc, _) = run_orient_sweep(&cfg)?;
    let doc = doc.with_clock(clock);
    doc.emit(cfg.output.as_deref())
}

// ---------------------------------------------------------------------------
// moments

pub fn resolve_moments(args: &MomentsArgs) -> Result<MomentsConfig, CliError> {
    let mut cfg: MomentsConfig = config::load(args.config.as_deref())?;
    if let Some(p) = &args.p {
        cfg.p = p.clone();
    }
    if let Some(l) = args.shots {
        cfg.shots = l;
    }
    if args.traces.is_some() {
        cfg.traces = args.traces.clone();
    }
    if let Some(d) = args.draws {
        cfg.draws = d;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    Ok(cfg)
}

pub const MOMENTS_COLUMNS: [&str; 8] = [
    "j",
    "k",
    "analytic",
    "empirical",
    "empirical_se",
    "stated",
    "coeff_analytic",
    "coeff_empirical",
];

/// Maximum absolute deviations reported in the footer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentsDeviation {
    pub empirical_vs_analytic: f64,
    /// Largest `|empirical - analytic| / se` (zero where both agree exactly).
    pub max_z: f64,
    pub stated_vs_analytic: f64,
}

pub fn run_moments(cfg: &MomentsConfig) -> Result<(ResultDoc, MomentsDeviation), CliError> {
    ensure(cfg.shots >= 1, "shots must be at least 1")?;
    let m = cfg.p.len();
    let analytic = deviation_moments_analytic(&cfg.p, cfg.shots)?;
    let stated = stated_deviation_moments(&cfg.p, cfg.shots)?;
    let (emp, se) = empirical_deviation_moments(&cfg.p, cfg.shots, cfg.draws, cfg.seed)?;
    let coeff = cfg
        .traces
        .as_ref()
        .map(|t| coeff_error_moments(&cfg.p, cfg.shots, t))
        .transpose()?;
    let mut doc = ResultDoc::new(
        "moments",
        Some(cfg.seed),
        config::render(cfg),
        MOMENTS_COLUMNS.to_vec(),
    );
    let mut dev = MomentsDeviation {
        empirical_vs_analytic: 0.0,
        max_z: 0.0,
        stated_vs_analytic: 0.0,
    };
    for j in 0..m {
        for k in 0..m {
            let a = analytic.second[(j, k)];
            let e = emp.second[(j, k)];
            let d = (e - a).abs();
            dev.empirical_vs_analytic = dev.empirical_vs_analytic.max(d);
            let z = if se[(j, k)] > 0.0 {
                d / se[(j, k)]
            } else if d > 1e-15 {
                f64::INFINITY
            } else {
                0.0
            };
            dev.max_z = dev.max_z.max(z);
            dev.stated_vs_analytic = dev.stated_vs_analytic.max((stated[(j, k)] - a).abs());
            let (ca, ce) = match (&coeff, &cfg.traces) {
                (Some(c), Some(t)) => (num(c[(j, k)]), num(e / (t[j] * t[k]).sqrt())),
                _ => (String::new(), String::new()),
            };
            doc.push_row(vec![
                j.to_string(),
                k.to_string(),
                num(a),
                num(e),
                num(se[(j, k)]),
                num(stated[(j, k)]),
                ca,
                ce,
            ]);
        }
    }
    doc.push_footer(format!(
        "max |empirical - analytic| = {}",
        num(dev.empirical_vs_analytic)
    ));
    doc.push_footer(format!(
        "max |empirical - analytic| / se = {}",
        num(dev.max_z)
    ));
    doc.push_footer(format!(
        "max |stated - analytic| = {}",
        num(dev.stated_vs_analytic)
    ));
    Ok((doc, dev))
}

pub fn moments(args: MomentsArgs) -> Result<(), CliError> {
    let clock = Clock::start();
    let cfg = resolve_moments(&args)?;
    let (doc, _) = run_moments(&cfg)?;
    let doc = doc.with_clock(clock);
    doc.emit(cfg.output.as_deref())
}
