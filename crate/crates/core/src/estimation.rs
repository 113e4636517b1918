//! Finite-shot state estimation with a tight informationally complete POVM.
//!
//! With `Q_k = sqrt(tr E_k) (E_k / tr E_k - I/d)` forming an equal-norm tight frame
//! with bound `C` for the traceless operators, the true coefficients are
//! `a_k = <<Q_k|rho - I/d>> = p(k)/sqrt(tr E_k) - sqrt(tr E_k)/d` and
//! `rho - I/d = sum_k a_k Q_k / C`. Replacing `p(k)` by relative frequencies gives
//! the linear estimate `rho^`, whose squared Hilbert-Schmidt error is studied here.
//! Estimates are not projected onto the state space unless
//! [`project_to_density`] is called explicitly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coord_frame::{expected_recon_error, CoordFrame, DualFrame, NoiseSpec};
use crate::error::{Error, Result};
use crate::herm_space::{check_density, hs_inner, HermBasis, HermitianOp};
use crate::povm::{EntfParams, Povm, POVM_TOL};
use crate::sampling_stats::{
    cell_seed, coeff_error_moments, sample_counts_with, worker_seed, OutcomeCounts, RelFreq,
};

pub const DEFAULT_TRIALS: usize = 500;

/// Tolerance for the equal-norm tight frame check on the `Q_k`.
pub const ENTF_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EstimationConfig {
    pub rho: HermitianOp,
    pub povm: Povm,
    pub shots: u64,
    pub trials: usize,
    pub seed: u64,
    /// Use `p^ = p` instead of sampling.
    pub force_exact: bool,
    /// Keep every [`TrialRecord`] in the summary.
    pub keep_records: bool,
}

impl EstimationConfig {
    pub fn new(rho: HermitianOp, povm: Povm, shots: u64) -> Self {
        Self {
            rho,
            povm,
            shots,
            trials: DEFAULT_TRIALS,
            seed: 0,
            force_exact: false,
            keep_records: false,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub counts: OutcomeCounts,
    pub rel_freq: RelFreq,
    /// `e_k = a^_k - a_k`.
    pub coeff_errors: Vec<f64>,
    /// `||rho^ - rho||^2`.
    pub error_sq: f64,
    pub estimate: HermitianOp,
}

#[derive(Debug, Clone)]
pub struct EstimationSummary {
    pub m: usize,
    pub shots: u64,
    pub trials: usize,
    pub mean_error_sq: f64,
    /// Sample standard deviation of the per-trial errors.
    pub std_error_sq: f64,
    pub predicted_uncorrelated: f64,
    pub predicted_exact: f64,
    /// Average of the trial estimates.
    pub mean_estimate: HermitianOp,
    pub records: Option<Vec<TrialRecord>>,
}

impl EstimationSummary {
    /// Standard error of `mean_error_sq`.
    pub fn standard_error(&self) -> f64 {
        self.std_error_sq / (self.trials as f64).sqrt()
    }

    /// `(mean - predicted_exact) / standard_error`; zero when both vanish.
    pub fn z_score(&self) -> f64 {
        let diff = self.mean_error_sq - self.predicted_exact;
        let se = self.standard_error();
        if se == 0.0 {
            if diff.abs() <= 1e-15 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}

/// Both forms of the expected squared error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Off-diagonal covariances dropped.
    pub uncorrelated: f64,
    /// Full multinomial covariance.
    pub exact: f64,
}

/// Everything about a (POVM, state) pair that does not change between trials.
#[derive(Debug, Clone)]
pub struct EstimationModel {
    dim: usize,
    probs: Vec<f64>,
    traces: Vec<f64>,
    entf: EntfParams,
    /// `M x N` rows are the `Q_k` in orthonormal traceless coordinates.
    q: DMatrix<f64>,
    coeffs: DVector<f64>,
    rho: HermitianOp,
    basis: HermBasis,
}

impl EstimationModel {
    pub fn new(povm: &Povm, rho: &HermitianOp) -> Result<Self> {
        if rho.dim() != povm.dim() {
            return Err(Error::DimensionMismatch {
                expected: povm.dim(),
                found: rho.dim(),
            });
        }
        check_density(rho, POVM_TOL)?;
        let rep = povm.traceless_rep()?;
        let entf = rep.entf_params(ENTF_TOL)?;
        let probs = povm.probabilities(rho)?;
        let d = povm.dim() as f64;
        let coeffs = DVector::from_iterator(
            probs.len(),
            probs
                .iter()
                .zip(&rep.traces)
                .map(|(p, t)| p / t.sqrt() - t.sqrt() / d),
        );
        Ok(Self {
            dim: povm.dim(),
            probs,
            traces: rep.traces.clone(),
            entf,
            q: rep.q_coords(),
            coeffs,
            rho: rho.clone(),
            basis: HermBasis::gellmann(povm.dim())?,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn traces(&self) -> &[f64] {
        &self.traces
    }

    pub fn entf(&self) -> &EntfParams {
        &self.entf
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// True coefficients `a_k`.
    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// `a^_k` from relative frequencies.
    pub fn coeffs_from_freq(&self, freq: &[f64]) -> Result<DVector<f64>> {
        if freq.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: freq.len(),
            });
        }
        let d = self.dim as f64;
        Ok(DVector::from_iterator(
            freq.len(),
            freq.iter()
                .zip(&self.traces)
                .map(|(p, t)| p / t.sqrt() - t.sqrt() / d),
        ))
    }

    /// `sum_k c_k Q_k / C` in traceless coordinates.
    pub fn synthesize(&self, c: &DVector<f64>) -> DVector<f64> {
        self.q.tr_mul(c) / self.entf.c
    }

    /// `I/d + sum_k c_k Q_k / C`.
    pub fn reconstruct(&self, c: &DVector<f64>) -> Result<HermitianOp> {
        let traceless = self.synthesize(c);
        let n = self.dim * self.dim;
        // The first basis element is I / sqrt(d), with coefficient tr(rho) / sqrt(d).
        let full = DVector::from_fn(n, |i, _| {
            if i == 0 {
                1.0 / (self.dim as f64).sqrt()
            } else {
                traceless[i - 1]
            }
        });
        self.basis.operator(&full)
    }

    /// Builds the trial record for observed counts.
    pub fn estimate_from_counts(&self, counts: OutcomeCounts) -> Result<TrialRecord> {
        let rel_freq = counts.rel_freq();
        self.record(counts, rel_freq)
    }

    fn record(&self, counts: OutcomeCounts, rel_freq: RelFreq) -> Result<TrialRecord> {
        let est = self.coeffs_from_freq(&rel_freq.values)?;
        let errors = &est - &self.coeffs;
        // The traceless coordinates are orthonormal, so the HS norm is Euclidean.
        let error_sq = self.synthesize(&errors).norm_squared();
        Ok(TrialRecord {
            counts,
            rel_freq,
            coeff_errors: errors.iter().copied().collect(),
            error_sq,
            estimate: self.reconstruct(&est)?,
        })
    }

    /// One trial with its own `ChaCha8Rng` stream.
    pub fn trial(&self, shots: u64, seed: u64, force_exact: bool) -> Result<TrialRecord> {
        if force_exact {
            let counts = OutcomeCounts::new(vec![0; self.len()]);
            let rel_freq = RelFreq {
                values: self.probs.clone(),
            };
            return self.record(counts, rel_freq);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let counts = sample_counts_with(&self.probs, shots, &mut rng)?;
        self.estimate_from_counts(counts)
    }

    /// Covariance of the coefficient errors at `shots`.
    pub fn coeff_error_covariance(&self, shots: u64) -> Result<DMatrix<f64>> {
        coeff_error_moments(&self.probs, shots, &self.traces)
    }

    /// Expected `||rho^ - rho||^2` for the canonical dual `Q_k / C`.
    pub fn prediction(&self, shots: u64) -> Result<Prediction> {
        let cov = self.coeff_error_covariance(shots)?;
        let c = self.entf.c;
        let a2 = self.entf.a * self.entf.a;
        let uncorrelated = a2 / (c * c) * cov.diagonal().sum();
        let gram = &self.q * self.q.transpose();
        let exact = cov.component_mul(&gram).sum() / (c * c);
        Ok(Prediction {
            uncorrelated,
            exact,
        })
    }

    /// Expected error for an arbitrary synthesis operator (`N x M`) in the same coordinates.
    pub fn prediction_with_dual(&self, dual: &DualFrame, shots: u64) -> Result<Prediction> {
        let frame = self.q_frame()?;
        let cov = self.coeff_error_covariance(shots)?;
        let diag = NoiseSpec::uncorrelated(cov.diagonal().iter().copied().collect())?;
        let full = NoiseSpec::correlated(cov)?;
        Ok(Prediction {
            uncorrelated: expected_recon_error(&frame, dual, &diag)?,
            exact: expected_recon_error(&frame, dual, &full)?,
        })
    }

    pub fn q_frame(&self) -> Result<CoordFrame> {
        CoordFrame::from_analysis_matrix(&self.q)
    }

    pub fn rho(&self) -> &HermitianOp {
        &self.rho
    }
}

/// `a_k` from the probability form `p(k)/sqrt(tr E_k) - sqrt(tr E_k)/d`.
pub fn frame_coeffs(povm: &Povm, rho: &HermitianOp) -> Result<Vec<f64>> {
    Ok(EstimationModel::new(povm, rho)?
        .coeffs
        .iter()
        .copied()
        .collect())
}

/// `a_k = <<Q_k | rho - I/d>>`.
pub fn frame_coeffs_inner(povm: &Povm, rho: &HermitianOp) -> Result<Vec<f64>> {
    check_density(rho, POVM_TOL)?;
    let rep = povm.traceless_rep()?;
    rep.entf_params(ENTF_TOL)?;
    let d = povm.dim();
    let shifted = rho - &HermitianOp::identity(d).scaled(1.0 / d as f64);
    rep.q_ops.iter().map(|q| hs_inner(q, &shifted)).collect()
}

pub fn estimate_once(config: &EstimationConfig, trial_seed: u64) -> Result<TrialRecord> {
    EstimationModel::new(&config.povm, &config.rho)?.trial(
        config.shots,
        trial_seed,
        config.force_exact,
    )
}

pub fn analytic_prediction(povm: &Povm, rho: &HermitianOp, shots: u64) -> Result<Prediction> {
    EstimationModel::new(povm, rho)?.prediction(shots)
}

/// Runs `trials` independent trials; trial `i` uses seed `seed ^ i`.
pub fn run_experiment(config: &EstimationConfig) -> Result<EstimationSummary> {
    if config.trials < 2 {
        return Err(Error::InvalidArgument("trials must be >= 2".into()));
    }
    if config.shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let model = EstimationModel::new(&config.povm, &config.rho)?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            model.trial(
                config.shots,
                worker_seed(config.seed, i as u64),
                config.force_exact,
            )
        })
        .collect::<Result<_>>()?;

    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.error_sq).sum::<f64>() / n;
    let var = records
        .iter()
        .map(|r| (r.error_sq - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let mut acc = DMatrix::<Complex64>::zeros(model.dim, model.dim);
    for r in &records {
        acc += r.estimate.matrix();
    }
    let mean_estimate = HermitianOp::new(acc / Complex64::new(n, 0.0))?;
    let prediction = model.prediction(config.shots)?;
    Ok(EstimationSummary {
        m: model.len(),
        shots: config.shots,
        trials: config.trials,
        mean_error_sq: mean,
        std_error_sq: var.sqrt(),
        predicted_uncorrelated: prediction.uncorrelated,
        predicted_exact: prediction.exact,
        mean_estimate,
        records: config.keep_records.then_some(records),
    })
}

/// One summary per `(povm, shots)` pair, POVM-major. Cell seeds come from
/// [`cell_seed`]`(seed, M, L)`.
pub fn tradeoff_grid(
    povms: &[Povm],
    shots_list: &[u64],
    rho: &HermitianOp,
    trials: usize,
    seed: u64,
    force_exact: bool,
) -> Result<Vec<EstimationSummary>> {
    let mut out = Vec::with_capacity(povms.len() * shots_list.len());
    for povm in povms {
        for &shots in shots_list {
            let config = EstimationConfig {
                rho: rho.clone(),
                povm: povm.clone(),
                shots,
                trials,
                seed: cell_seed(seed, povm.len(), shots),
                force_exact,
                keep_records: false,
            };
            out.push(run_experiment(&config)?);
        }
    }
    Ok(out)
}

/// Nearest density operator in HS norm: eigenvalues projected onto the probability simplex.
pub fn project_to_density(op: &HermitianOp) -> Result<HermitianOp> {
    let eig = SymmetricEigen::new(op.matrix().clone());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let projected = simplex_projection(&values);
    let d = op.dim();
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        d,
        projected.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let u = &eig.eigenvectors;
    HermitianOp::new(u * diag * u.adjoint())
}

fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
