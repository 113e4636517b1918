//! Binary state detection from finite-shot counts.
//!
//! Under hypothesis `H_i` the state is `rho_i` and `L` shots of a POVM give
//! multinomial counts with probabilities `p_i(k) = tr(E_k rho_i)`. The
//! likelihood-ratio test compares `Lambda = prod_k (p1(k)/p0(k))^{l_k}` with a
//! threshold `eta` and decides `H1` iff `Lambda > eta`; ties go to `H0`.
//!
//! The likelihood ratio depends on the counts only, so exact operating
//! characteristics come from enumerating count vectors rather than outcome
//! sequences.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::herm_space::{bloch_vector, check_density, HermitianOp};
use crate::povm::{platonic_povm, quaternion_of, PlatonicSpec, Povm, Solid, POVM_TOL};
use crate::sampling_stats::{
    composition_count, ln_likelihood, sample_counts_with, validate_probabilities, worker_seed,
    Compositions, LnFactorial, OutcomeCounts,
};

/// Largest number of count vectors enumerated by default.
pub const DEFAULT_ENUM_CAP: u128 = 1_000_000;

/// Relative tolerance for treating two log-likelihood ratios as equal.
pub const TIE_RTOL: f64 = 1e-9;

pub const DEFAULT_SWEEP_AXES: usize = 100;
pub const DEFAULT_SWEEP_ANGLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

/// Two density operators with prior probabilities.
#[derive(Debug, Clone)]
pub struct BinaryHypothesis {
    pub rho0: HermitianOp,
    pub rho1: HermitianOp,
    pub q0: f64,
    pub q1: f64,
}

impl BinaryHypothesis {
    /// Identical states are accepted; the resulting curves are the chance diagonal.
    pub fn new(rho0: HermitianOp, rho1: HermitianOp, q0: f64) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho0.dim(),
                found: rho1.dim(),
            });
        }
        check_density(&rho0, POVM_TOL)?;
        check_density(&rho1, POVM_TOL)?;
        if !(0.0..=1.0).contains(&q0) {
            return Err(Error::InvalidProbability(format!("prior q0 = {q0}")));
        }
        Ok(Self {
            rho0,
            rho1,
            q0,
            q1: 1.0 - q0,
        })
    }

    pub fn equal_priors(rho0: HermitianOp, rho1: HermitianOp) -> Result<Self> {
        Self::new(rho0, rho1, 0.5)
    }

    /// `q0 / q1`, infinite when `q1 = 0`.
    pub fn threshold(&self) -> f64 {
        if self.q1 == 0.0 {
            f64::INFINITY
        } else {
            self.q0 / self.q1
        }
    }

    /// HS distance below `tol`.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        (&self.rho0 - &self.rho1).hs_norm_sq().sqrt() <= tol
    }

    /// Outcome probabilities under `H0` and `H1`.
    pub fn probabilities(&self, povm: &Povm) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((
            povm.probabilities(&self.rho0)?,
            povm.probabilities(&self.rho1)?,
        ))
    }
}

/// `ln Lambda`, with `+inf` when some observed outcome is impossible under `H0` only
/// and `-inf` when impossible under `H1` only. Outcomes impossible under both are
/// skipped; counts impossible under each hypothesis separately give `0`.
pub fn log_likelihood_ratio(counts: &[u64], p0: &[f64], p1: &[f64]) -> f64 {
    let mut acc = 0.0;
    let (mut pos_inf, mut neg_inf) = (false, false);
    for ((&c, &a), &b) in counts.iter().zip(p0).zip(p1) {
        if c == 0 {
            continue;
        }
        match (a > 0.0, b > 0.0) {
            (true, true) => acc += c as f64 * (b.ln() - a.ln()),
            (false, true) => pos_inf = true,
            (true, false) => neg_inf = true,
            (false, false) => {}
        }
    }
    match (pos_inf, neg_inf) {
        (true, true) => 0.0,
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (false, false) => acc,
    }
}

pub fn likelihood_ratio(counts: &OutcomeCounts, p0: &[f64], p1: &[f64]) -> Result<f64> {
    validate_probabilities(p0)?;
    validate_probabilities(p1)?;
    if counts.len() != p0.len() || p0.len() != p1.len() {
        return Err(Error::DimensionMismatch {
            expected: p0.len(),
            found: counts.len().max(p1.len()),
        });
    }
    Ok(log_likelihood_ratio(counts.counts(), p0, p1).exp())
}

/// Equality of log values within [`TIE_RTOL`]; infinities tie only with themselves.
fn log_tie(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= TIE_RTOL * 1f64.max(a.abs()).max(b.abs())
}

/// `H1` iff `ln Lambda > ln eta`, ties decided as `H0`.
pub fn decide_log(log_lambda: f64, log_eta: f64) -> Hypothesis {
    if !log_tie(log_lambda, log_eta) && log_lambda > log_eta {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

pub fn decide(lambda: f64, eta: f64) -> Hypothesis {
    decide_log(lambda.ln(), eta.ln())
}

/// One level set of the likelihood ratio with its probability under each hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrtAtom {
    pub log_lambda: f64,
    pub p0_mass: f64,
    pub p1_mass: f64,
}

/// Distinct likelihood-ratio values in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct LrtAtoms {
    atoms: Vec<LrtAtom>,
}

impl LrtAtoms {
    /// Merges atoms whose log ratios tie; entries with zero mass under both hypotheses are dropped.
    pub fn from_unsorted(mut raw: Vec<LrtAtom>) -> Self {
        raw.retain(|a| a.p0_mass > 0.0 || a.p1_mass > 0.0);
        raw.sort_by(|a, b| b.log_lambda.total_cmp(&a.log_lambda));
        let mut atoms: Vec<LrtAtom> = Vec::new();
        for a in raw {
            match atoms.last_mut() {
                Some(last) if log_tie(last.log_lambda, a.log_lambda) => {
                    last.p0_mass += a.p0_mass;
                    last.p1_mass += a.p1_mass;
                }
                _ => atoms.push(a),
            }
        }
        Self { atoms }
    }

    pub fn atoms(&self) -> &[LrtAtom] {
        &self.atoms
    }

    /// `(P_f, P_d)` at threshold `eta`; `eta = 0` is the endpoint `(1, 1)`.
    pub fn operating_point(&self, eta: f64) -> (f64, f64) {
        if eta <= 0.0 {
            return (1.0, 1.0);
        }
        let log_eta = eta.ln();
        let (mut pf, mut pd) = (0.0, 0.0);
        for a in &self.atoms {
            if decide_log(a.log_lambda, log_eta) == Hypothesis::H1 {
                pf += a.p0_mass;
                pd += a.p1_mass;
            }
        }
        (pf.min(1.0), pd.min(1.0))
    }

    /// All achievable points. The point after admitting atom `i` is reached for
    /// `eta` in `[Lambda_{i+1}, Lambda_i)` and labelled with `Lambda_{i+1}`.
    pub fn curve(&self) -> Vec<QdocPoint> {
        let mut points = vec![QdocPoint {
            eta: f64::INFINITY,
            pf: 0.0,
            pd: 0.0,
        }];
        let (mut pf, mut pd) = (0.0, 0.0);
        for (i, a) in self.atoms.iter().enumerate() {
            pf += a.p0_mass;
            pd += a.p1_mass;
            let eta = self.atoms.get(i + 1).map_or(0.0, |b| b.log_lambda.exp());
            points.push(QdocPoint {
                eta,
                pf: pf.min(1.0),
                pd: pd.min(1.0),
            });
        }
        let last = points.last_mut().expect("non-empty");
        if last.eta != 0.0 {
            points.push(QdocPoint {
                eta: 0.0,
                pf: 1.0,
                pd: 1.0,
            });
        } else {
            last.pf = 1.0;
            last.pd = 1.0;
        }
        points
    }

    /// `q0 P_f + q1 (1 - P_d)` at `eta = q0 / q1`.
    pub fn prob_error(&self, q0: f64, q1: f64) -> f64 {
        let eta = if q1 == 0.0 { f64::INFINITY } else { q0 / q1 };
        let (pf, pd) = self.operating_point(eta);
        q0 * pf + q1 * (1.0 - pd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdocPoint {
    pub eta: f64,
    pub pf: f64,
    pub pd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdocMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl QdocMethod {
    pub fn name(&self) -> &'static str {
        match self {
            QdocMethod::Exact => "exact",
            QdocMethod::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Operating-characteristic samples sorted by `P_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct QdocCurve {
    pub points: Vec<QdocPoint>,
    pub m: usize,
    pub shots: u64,
    pub method: QdocMethod,
}

impl QdocCurve {
    /// `P_d` at `pf` by linear interpolation between neighbouring points, taking the
    /// highest `P_d` where several points share a `P_f`.
    pub fn interpolate(&self, pf: f64) -> f64 {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.pf <= pf);
        if i == 0 {
            return pts[0].pd;
        }
        let a = pts[i - 1];
        match pts.get(i) {
            Some(b) if a.pf < pf => a.pd + (pf - a.pf) / (b.pf - a.pf) * (b.pd - a.pd),
            _ => a.pd,
        }
    }

    /// Whether `self` is at least `other` at every point of `other`, up to `tol`.
    pub fn dominates(&self, other: &QdocCurve, tol: f64) -> bool {
        other
            .points
            .iter()
            .all(|p| self.interpolate(p.pf) >= p.pd - tol)
    }

    /// Upper concave envelope, achievable with randomised thresholds.
    pub fn concave_envelope(&self) -> Vec<QdocPoint> {
        let mut hull: Vec<QdocPoint> = Vec::new();
        for &p in &self.points {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (b.pf - a.pf) * (p.pd - a.pd) - (b.pd - a.pd) * (p.pf - a.pf);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull
    }

    /// Largest gap below the chance diagonal.
    pub fn min_margin_over_diagonal(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.pd - p.pf)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `{0} U {10^(k/4) : k = -24..=24} U {inf}`, decreasing.
pub fn threshold_grid() -> Vec<f64> {
    let mut g = vec![f64::INFINITY];
    g.extend((-24..=24).rev().map(|k| 10f64.powf(k as f64 / 4.0)));
    g.push(0.0);
    g
}

/// All count vectors for `(shots, m)` with their log multinomial coefficients.
#[derive(Debug, Clone)]
pub struct CompositionTable {
    m: usize,
    counts: Vec<u64>,
    ln_coef: Vec<f64>,
}

impl CompositionTable {
    pub fn new(shots: u64, m: usize, cap: u128) -> Result<Self> {
        let count = composition_count(shots, m);
        if count > cap {
            return Err(Error::EnumerationCapExceeded { count, cap });
        }
        let table = LnFactorial::new(shots as usize);
        let mut counts = Vec::with_capacity(count as usize * m);
        let mut ln_coef = Vec::with_capacity(count as usize);
        for c in Compositions::new(shots, m) {
            ln_coef.push(table.ln_multinomial(&c));
            counts.extend_from_slice(&c);
        }
        Ok(Self { m, counts, ln_coef })
    }

    pub fn len(&self) -> usize {
        self.ln_coef.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_coef.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.counts[i * self.m..(i + 1) * self.m]
    }

    fn pmf(&self, i: usize, p: &[f64]) -> f64 {
        let ll = ln_likelihood(self.row(i), p);
        if ll == f64::NEG_INFINITY {
            0.0
        } else {
            (self.ln_coef[i] + ll).exp()
        }
    }

    /// Likelihood-ratio atoms for `p0` against `p1`.
    pub fn atoms(&self, p0: &[f64], p1: &[f64]) -> LrtAtoms {
        let raw = (0..self.len())
            .map(|i| LrtAtom {
                log_lambda: log_likelihood_ratio(self.row(i), p0, p1),
                p0_mass: self.pmf(i, p0),
                p1_mass: self.pmf(i, p1),
            })
            .collect();
        LrtAtoms::from_unsorted(raw)
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        Err(Error::InvalidArgument("shots must be >= 1".into()))
    } else {
        Ok(())
    }
}

pub fn lrt_atoms(hyp: &BinaryHypothesis, povm: &Povm, shots: u64, cap: u128) -> Result<LrtAtoms> {
    check_shots(shots)?;
    let (p0, p1) = hyp.probabilities(povm)?;
    Ok(CompositionTable::new(shots, povm.len(), cap)?.atoms(&p0, &p1))
}

/// Every achievable `(P_f, P_d)` pair, by enumeration of count vectors.
pub fn qdoc_exact(hyp: &BinaryHypothesis, povm: &Povm, shots: u64) -> Result<QdocCurve> {
    qdoc_exact_with_cap(hyp, povm, shots, DEFAULT_ENUM_CAP)
}

pub fn qdoc_exact_with_cap(
    hyp: &BinaryHypothesis,
    povm: &Povm,
    shots: u64,
    cap: u128,
) -> Result<QdocCurve> {
    let atoms = lrt_atoms(hyp, povm, shots, cap)?;
    Ok(QdocCurve {
        points: atoms.curve(),
        m: povm.len(),
        shots,
        method: QdocMethod::Exact,
    })
}

/// Exact operating points at the given thresholds.
pub fn qdoc_exact_on_grid(
    hyp: &BinaryHypothesis,
    povm: &Povm,
    shots: u64,
    grid: &[f64],
    cap: u128,
) -> Result<QdocCurve> {
    let atoms = lrt_atoms(hyp, povm, shots, cap)?;
    Ok(QdocCurve {
        points: points_on_grid(grid, |eta| atoms.operating_point(eta)),
        m: povm.len(),
        shots,
        method: QdocMethod::Exact,
    })
}

fn points_on_grid(grid: &[f64], f: impl Fn(f64) -> (f64, f64)) -> Vec<QdocPoint> {
    let mut points: Vec<QdocPoint> = grid
        .iter()
        .map(|&eta| {
            let (pf, pd) = f(eta);
            QdocPoint { eta, pf, pd }
        })
        .collect();
    points.sort_by(|a, b| a.pf.total_cmp(&b.pf).then(b.eta.total_cmp(&a.eta)));
    points
}

/// Empirical operating points on [`threshold_grid`]. Draw `i` under `H0` uses seed
/// `seed ^ 2i` and under `H1` seed `seed ^ (2i + 1)`.
pub fn qdoc_monte_carlo(
    hyp: &BinaryHypothesis,
    povm: &Povm,
    shots: u64,
    samples: usize,
    seed: u64,
) -> Result<QdocCurve> {
    if samples < 1000 {
        return Err(Error::InvalidArgument("need at least 1000 samples".into()));
    }
    check_shots(shots)?;
    let (p0, p1) = hyp.probabilities(povm)?;
    let draw = |p: &[f64], offset: u64| -> Result<Vec<f64>> {
        (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(worker_seed(seed, 2 * i + offset));
                let c = sample_counts_with(p, shots, &mut rng)?;
                Ok(log_likelihood_ratio(c.counts(), &p0, &p1))
            })
            .collect()
    };
    let under0 = draw(&p0, 0)?;
    let under1 = draw(&p1, 1)?;
    let n = samples as f64;
    let rate = |logs: &[f64], eta: f64| {
        if eta <= 0.0 {
            return 1.0;
        }
        let le = eta.ln();
        logs.iter()
            .filter(|&&l| decide_log(l, le) == Hypothesis::H1)
            .count() as f64
            / n
    };
    Ok(QdocCurve {
        points: points_on_grid(&threshold_grid(), |eta| {
            (rate(&under0, eta), rate(&under1, eta))
        }),
        m: povm.len(),
        shots,
        method: QdocMethod::MonteCarlo { samples, seed },
    })
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Exact probability of error of the test with `eta = q0 / q1`.
pub fn prob_error(hyp: &BinaryHypothesis, povm: &Povm, shots: u64) -> Result<f64> {
    Ok(lrt_atoms(hyp, povm, shots, DEFAULT_ENUM_CAP)?.prob_error(hyp.q0, hyp.q1))
}

/// `prob_error` against a prebuilt table.
pub fn prob_error_with_table(
    hyp: &BinaryHypothesis,
    povm: &Povm,
    table: &CompositionTable,
) -> Result<f64> {
    if table.m != povm.len() {
        return Err(Error::DimensionMismatch {
            expected: povm.len(),
            found: table.m,
        });
    }
    let (p0, p1) = hyp.probabilities(povm)?;
    Ok(table.atoms(&p0, &p1).prob_error(hyp.q0, hyp.q1))
}

/// Rotation taking `from` onto `to` (both unit), about `x` when they are opposite.
pub fn rotation_between(from: &Vector3<f64>, to: &Vector3<f64>) -> Rotation3<f64> {
    Rotation3::rotation_between(from, to).unwrap_or_else(|| {
        let axis = if from.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let perp = Unit::new_normalize(from.cross(&axis));
        Rotation3::from_axis_angle(&perp, PI)
    })
}

/// `n` near-uniform unit vectors: `(r cos(i g), r sin(i g), 1 - (2i + 1)/n)` with
/// `g` the golden angle.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// `n_axes` Fibonacci-sphere directions times `n_angles` spins about each.
///
/// Rotation `(i, j)` first spins by `2 pi j / n_angles` about `z`, then takes `z`
/// onto the `i`-th point of [`fibonacci_sphere`].
pub fn fibonacci_rotations(n_axes: usize, n_angles: usize) -> Vec<Rotation3<f64>> {
    let z = Vector3::z();
    let mut out = Vec::with_capacity(n_axes * n_angles);
    for dir in fibonacci_sphere(n_axes) {
        let align = rotation_between(&z, &dir);
        for j in 0..n_angles {
            let psi = 2.0 * PI * j as f64 / n_angles as f64;
            out.push(align * Rotation3::from_axis_angle(&Vector3::z_axis(), psi));
        }
    }
    out
}

pub fn default_rotation_set() -> Vec<Rotation3<f64>> {
    fibonacci_rotations(DEFAULT_SWEEP_AXES, DEFAULT_SWEEP_ANGLES)
}

const AXIS_SEARCH_POINTS: usize = 2000;

/// Rotation taking `+z` onto the measurement axis that minimises `P_e` for the
/// antipodal pair at `shots`.
///
/// Candidates are the Bloch directions of `rho0`, `rho1` and `rho0 - rho1` plus a
/// Fibonacci grid; the best is refined by a compass search in spherical angles.
pub fn aligned_rotation(hyp: &BinaryHypothesis, shots: u64) -> Result<Rotation3<f64>> {
    check_shots(shots)?;
    let table = CompositionTable::new(shots, 2, DEFAULT_ENUM_CAP)?;
    let z = Vector3::z();
    let eval = |n: &Vector3<f64>| -> Result<f64> {
        let spec = PlatonicSpec::new(Solid::AntipodalPair).rotated(rotation_between(&z, n));
        prob_error_with_table(hyp, &platonic_povm(&spec)?, &table)
    };
    let r0 = Vector3::from(bloch_vector(&hyp.rho0)?);
    let r1 = Vector3::from(bloch_vector(&hyp.rho1)?);
    let mut candidates: Vec<Vector3<f64>> = [r0, r1, r0 - r1]
        .into_iter()
        .filter(|v| v.norm() > 1e-12)
        .map(|v| v.normalize())
        .collect();
    candidates.push(z);
    candidates.extend(fibonacci_sphere(AXIS_SEARCH_POINTS));
    let values: Vec<f64> = candidates.par_iter().map(eval).collect::<Result<_>>()?;
    let (mut best_i, mut best) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v < best {
            best_i = i;
            best = v;
        }
    }
    let start = candidates[best_i];
    let mut theta = start.z.clamp(-1.0, 1.0).acos();
    let mut phi = start.y.atan2(start.x);
    let dir = |t: f64, p: f64| Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
    let mut step = 0.05;
    while step > 1e-10 {
        let mut improved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = eval(&dir(theta + dt, phi + dp))?;
            if v < best {
                best = v;
                theta += dt;
                phi += dp;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(rotation_between(&z, &dir(theta, phi)))
}

#[derive(Debug, Clone)]
pub struct OrientationSweepResult {
    pub solid: Solid,
    pub shots: u64,
    /// Absolute orientations, in evaluation order.
    pub rotations: Vec<Rotation3<f64>>,
    pub pe: Vec<f64>,
    pub pe_min: f64,
    pub pe_max: f64,
}

impl OrientationSweepResult {
    pub fn spread(&self) -> f64 {
        self.pe_max - self.pe_min
    }

    /// `[w, x, y, z]` per rotation.
    pub fn quaternions(&self) -> Vec<[f64; 4]> {
        self.rotations.iter().map(quaternion_of).collect()
    }

    pub fn argmin(&self) -> usize {
        self.pe
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i)
    }
}

/// Exact `P_e` for `spec` composed with each rotation (`R * spec.rotation`).
///
/// For the antipodal pair the identity and [`aligned_rotation`] are appended, so the
/// sampled set always contains the canonical and the best orientation.
pub fn orientation_sweep(
    hyp: &BinaryHypothesis,
    spec: &PlatonicSpec,
    shots: u64,
    rotations: &[Rotation3<f64>],
) -> Result<OrientationSweepResult> {
    if rotations.is_empty() {
        return Err(Error::InvalidArgument("empty rotation set".into()));
    }
    check_shots(shots)?;
    let mut set: Vec<Rotation3<f64>> = rotations.iter().map(|r| r * spec.rotation).collect();
    if spec.solid == Solid::AntipodalPair {
        set.push(Rotation3::identity());
        set.push(aligned_rotation(hyp, shots)?);
    }
    let table = CompositionTable::new(shots, spec.solid.vertex_count(), DEFAULT_ENUM_CAP)?;
    let pe: Vec<f64> = set
        .par_iter()
        .map(|r| {
            let povm = platonic_povm(&spec.clone().rotated(*r))?;
            prob_error_with_table(hyp, &povm, &table)
        })
        .collect::<Result<_>>()?;
    let pe_min = pe.iter().copied().fold(f64::INFINITY, f64::min);
    let pe_max = pe.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(OrientationSweepResult {
        solid: spec.solid,
        shots,
        rotations: set,
        pe,
        pe_min,
        pe_max,
    })
}
