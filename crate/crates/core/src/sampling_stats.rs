//! Finite-shot measurement statistics.
//!
//! `L` i.i.d. shots over `M` outcomes give multinomial counts `l_k` and
//! relative frequencies `p^(k) = l_k / L`. The deviations `d_k = p^(k) - p(k)`
//! have zero mean, `E[d_k^2] = p(k)(1 - p(k)) / L` and, for `j != k`,
//! `E[d_j d_k] = -p(j) p(k) / L`. The off-diagonal value is checked against
//! exhaustive enumeration of outcome sequences in the tests; the
//! [`stated_offdiagonal_moment`] variant `-p(j) p(k) (L - 1) / L` is kept only
//! for side-by-side comparison.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Tolerance on `sum p = 1`.
pub const PROB_SUM_TOL: f64 = 1e-10;

/// Multinomial counts `l_k` over `L` shots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeCounts {
    counts: Vec<u64>,
    shots: u64,
}

/// Relative frequencies `l_k / L`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelFreq {
    pub values: Vec<f64>,
}

/// First and second moments of the deviations `d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMoments {
    pub mean: DVector<f64>,
    /// `E[d_j d_k]`.
    pub second: DMatrix<f64>,
}

impl OutcomeCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        let shots = counts.iter().sum();
        Self { counts, shots }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn rel_freq(&self) -> RelFreq {
        let l = self.shots as f64;
        RelFreq {
            values: self.counts.iter().map(|&c| c as f64 / l).collect(),
        }
    }
}

/// Entrywise non-negative, finite, summing to one within [`PROB_SUM_TOL`].
pub fn validate_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbability("empty probability vector".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidProbability(format!(
            "entry {x} is not a probability"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidProbability(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Per-worker seed `base ^ index`.
pub fn worker_seed(base: u64, index: u64) -> u64 {
    base ^ index
}

/// Base seed for one cell of an experiment grid, mixing `(seed, m, shots)` with splitmix64.
pub fn cell_seed(seed: u64, m: usize, shots: u64) -> u64 {
    let mut x = seed;
    for v in [m as u64, shots] {
        x = splitmix64(x ^ splitmix64(v));
    }
    x
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws multinomial counts with a `ChaCha8Rng` seeded from `seed`.
pub fn sample_counts(p: &[f64], shots: u64, seed: u64) -> Result<OutcomeCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_counts_with(p, shots, &mut rng)
}

/// Sequential conditional binomials: `l_k ~ Bin(L - sum_{i<k} l_i, p_k / sum_{i>=k} p_i)`,
/// with the last outcome taking the remainder.
pub fn sample_counts_with<R: Rng + ?Sized>(
    p: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<OutcomeCounts> {
    validate_probabilities(p)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let m = p.len();
    let mut counts = vec![0u64; m];
    let mut remaining = shots;
    let mut mass = 1.0f64;
    for k in 0..m - 1 {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 {
            (p[k] / mass).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let drawn = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("q in (0, 1)")
                .sample(rng)
        };
        counts[k] = drawn;
        remaining -= drawn;
        mass -= p[k];
    }
    counts[m - 1] += remaining;
    Ok(OutcomeCounts { counts, shots })
}

/// Exact deviation moments of multinomial relative frequencies.
pub fn deviation_moments_analytic(p: &[f64], shots: u64) -> Result<DeviationMoments> {
    validate_probabilities(p)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let m = p.len();
    let l = shots as f64;
    let second = DMatrix::from_fn(m, m, |j, k| {
        if j == k {
            p[k] * (1.0 - p[k]) / l
        } else {
            -p[j] * p[k] / l
        }
    });
    Ok(DeviationMoments {
        mean: DVector::zeros(m),
        second,
    })
}

/// The alternative off-diagonal value `-p(j) p(k) (L - 1) / L`, for comparison only.
pub fn stated_offdiagonal_moment(pj: f64, pk: f64, shots: u64) -> f64 {
    let l = shots as f64;
    -pj * pk * (l - 1.0) / l
}

/// Second-moment matrix with the diagonal of [`deviation_moments_analytic`] and the
/// off-diagonal of [`stated_offdiagonal_moment`].
pub fn stated_deviation_moments(p: &[f64], shots: u64) -> Result<DMatrix<f64>> {
    let exact = deviation_moments_analytic(p, shots)?;
    let m = p.len();
    Ok(DMatrix::from_fn(m, m, |j, k| {
        if j == k {
            exact.second[(j, k)]
        } else {
            stated_offdiagonal_moment(p[j], p[k], shots)
        }
    }))
}

/// `E[e_j e_k]` for `e_k = d_k / sqrt(tr E_k)`.
pub fn coeff_error_moments(p: &[f64], shots: u64, traces: &[f64]) -> Result<DMatrix<f64>> {
    if traces.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: traces.len(),
        });
    }
    if let Some(t) = traces.iter().find(|t| !t.is_finite() || **t <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "trace {t} must be positive"
        )));
    }
    let d = deviation_moments_analytic(p, shots)?;
    let m = p.len();
    Ok(DMatrix::from_fn(m, m, |j, k| {
        d.second[(j, k)] / (traces[j] * traces[k]).sqrt()
    }))
}

/// Sample mean of `d_j d_k` over `draws` seeded draws, with standard errors.
pub fn empirical_deviation_moments(
    p: &[f64],
    shots: u64,
    draws: usize,
    seed: u64,
) -> Result<(DeviationMoments, DMatrix<f64>)> {
    validate_probabilities(p)?;
    if draws < 2 {
        return Err(Error::InvalidArgument("need at least two draws".into()));
    }
    let m = p.len();
    let l = shots as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = DVector::zeros(m);
    let mut sum = DMatrix::zeros(m, m);
    let mut sum_sq = DMatrix::zeros(m, m);
    for _ in 0..draws {
        let c = sample_counts_with(p, shots, &mut rng)?;
        let d = DVector::from_fn(m, |k, _| c.counts[k] as f64 / l - p[k]);
        mean += &d;
        let outer = &d * d.transpose();
        sum_sq += outer.component_mul(&outer);
        sum += outer;
    }
    let n = draws as f64;
    mean /= n;
    let second = &sum / n;
    let var = (&sum_sq / n - second.component_mul(&second)) * (n / (n - 1.0));
    let se = var.map(|v| (v.max(0.0) / n).sqrt());
    Ok((DeviationMoments { mean, second }, se))
}

/// Table of `ln(n!)` for `n = 0..=max`.
#[derive(Debug, Clone)]
pub struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub fn new(max: usize) -> Self {
        let mut t = Vec::with_capacity(max + 1);
        t.push(0.0);
        let mut acc = 0.0;
        for n in 1..=max {
            acc += (n as f64).ln();
            t.push(acc);
        }
        Self(t)
    }

    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    /// `ln(L! / (l_1! ... l_M!))`.
    pub fn ln_multinomial(&self, counts: &[u64]) -> f64 {
        let l: u64 = counts.iter().sum();
        self.get(l as usize) - counts.iter().map(|&c| self.get(c as usize)).sum::<f64>()
    }
}

/// `sum_k l_k ln p_k` with `0 ln 0 = 0`; `-inf` when some `l_k > 0` has `p_k = 0`.
pub fn ln_likelihood(counts: &[u64], p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&c, &pk) in counts.iter().zip(p) {
        if c == 0 {
            continue;
        }
        if pk <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += c as f64 * pk.ln();
    }
    acc
}

/// Multinomial probability mass `L! / prod l_k! * prod p_k^{l_k}`, evaluated in the log domain.
pub fn multinomial_pmf(counts: &OutcomeCounts, p: &[f64]) -> Result<f64> {
    validate_probabilities(p)?;
    if counts.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: counts.len(),
        });
    }
    let table = LnFactorial::new(counts.shots as usize);
    let ll = ln_likelihood(&counts.counts, p);
    if ll == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((table.ln_multinomial(&counts.counts) + ll).exp())
}

/// Number of count vectors of `parts` non-negative integers summing to `total`:
/// `C(total + parts - 1, parts - 1)`.
pub fn composition_count(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let n = total as u128 + k;
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All count vectors of length `parts` summing to `total`, starting at
/// `(total, 0, ..., 0)` and ending at `(0, ..., 0, total)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(total: u64, parts: usize) -> Self {
        assert!(parts >= 1, "need at least one part");
        let mut first = vec![0; parts];
        first[0] = total;
        Self {
            current: Some(first),
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.take()?;
        let mut c = out.clone();
        let m = c.len();
        let tail = c[m - 1];
        c[m - 1] = 0;
        if let Some(i) = (0..m - 1).rev().find(|&i| c[i] > 0) {
            c[i] -= 1;
            c[i + 1] = tail + 1;
            self.current = Some(c);
        }
        Some(out)
    }
}
