//! Finite frames over real coordinate spaces.
//!
//! A [`CoordFrame`] is a list of `M` vectors spanning `R^N`. Its analysis
//! operator `A` (an `M x N` matrix whose rows are the frame vectors) maps a
//! vector to its frame coefficients; the synthesis operator `F = A^T` maps a
//! coefficient vector back to `R^N`. A [`DualFrame`] is any family whose
//! synthesis operator is a left inverse of `A`. The canonical dual is the
//! Moore-Penrose pseudoinverse `(A^T A)^{-1} A^T`, which minimises the
//! expected reconstruction error under uncorrelated coefficient noise.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Coordinates of a vector in `R^N` or of a coefficient sequence in `R^M`.
pub type CoordVector = DVector<f64>;

/// Relative eigenvalue floor below which the frame operator is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;

/// Default relative tolerance `(D - C) / D` for calling a frame tight.
pub const DEFAULT_TIGHT_TOL: f64 = 1e-10;

/// `M` vectors spanning `R^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordFrame {
    vectors: Vec<CoordVector>,
    dim: usize,
}

/// Tightest frame bounds: the extreme eigenvalues of the frame operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
}

impl FrameBounds {
    pub fn relative_gap(&self) -> f64 {
        (self.upper - self.lower) / self.upper
    }
}

/// How a [`DualFrame`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    Canonical,
    /// `L* + G P_perp` drawn from the given seed.
    Random {
        seed: u64,
    },
    /// `M == N`: the dual is unique, so a random dual collapses to the canonical one.
    Unique,
    /// Supplied directly as a synthesis matrix.
    Custom,
}

/// A synthesis family `{f~_k}` dual to some analysis frame.
///
/// Stored as the `N x M` synthesis matrix whose columns are the dual vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFrame {
    synthesis: DMatrix<f64>,
    kind: DualKind,
}

/// Per-coefficient additive noise model.
///
/// Uncorrelated zero-mean noise with variances `Delta_k^2`, or a full
/// covariance matrix which takes precedence when present.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub variances: Vec<f64>,
    pub covariance: Option<DMatrix<f64>>,
}

/// Equal-norm tight frame diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EntfReport {
    pub is_tight: bool,
    pub is_equal_norm: bool,
    /// Lower frame bound (equals the tight bound when `is_tight`).
    pub c: f64,
    /// Mean vector norm.
    pub a: f64,
    /// `|C N - M a^2|`.
    pub cn_ma2_residual: f64,
    pub norms: Vec<f64>,
}

impl CoordFrame {
    /// Builds a frame, rejecting dimension mismatches, non-finite entries and
    /// families that do not span `R^N`.
    pub fn new(vectors: Vec<CoordVector>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidArgument("frame needs at least one vector".into()))?;
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "frame vectors must be non-empty".into(),
            ));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("frame vector"));
            }
        }
        let frame = Self { vectors, dim };
        let eig = frame.frame_operator().symmetric_eigenvalues();
        let max = eig.max();
        let rank = eig.iter().filter(|&&l| l > SINGULAR_RCOND * max).count();
        if max <= 0.0 || rank < dim {
            return Err(Error::NotAFrame { rank, dim });
        }
        Ok(frame)
    }

    /// Frame from row slices, e.g. `&[&[1.0, 0.0], &[0.0, 1.0]]`.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| DVector::from_row_slice(r)).collect())
    }

    /// Frame whose vectors are the rows of `a`.
    pub fn from_analysis_matrix(a: &DMatrix<f64>) -> Result<Self> {
        Self::new(a.row_iter().map(|r| r.transpose()).collect())
    }

    /// Number of frame vectors `M`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[CoordVector] {
        &self.vectors
    }

    /// `M x N` matrix of the analysis operator.
    pub fn analysis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.dim, |k, i| self.vectors[k][i])
    }

    /// `N x M` matrix of the synthesis operator.
    pub fn synthesis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.len(), |i, k| self.vectors[k][i])
    }

    /// `S = A^T A = sum_k f_k f_k^T`.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for f in &self.vectors {
            s.ger(1.0, f, f, 1.0);
        }
        s
    }

    pub fn analyze(&self, v: &CoordVector) -> Result<CoordVector> {
        check_len(self.dim, v.len())?;
        Ok(DVector::from_iterator(
            self.len(),
            self.vectors.iter().map(|f| f.dot(v)),
        ))
    }

    pub fn synthesize(&self, w: &CoordVector) -> Result<CoordVector> {
        check_len(self.len(), w.len())?;
        let mut out = DVector::zeros(self.dim);
        for (f, &wk) in self.vectors.iter().zip(w.iter()) {
            out.axpy(wk, f, 1.0);
        }
        Ok(out)
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        self.frame_bounds_with_tol(DEFAULT_TIGHT_TOL)
    }

    pub fn frame_bounds_with_tol(&self, tol: f64) -> FrameBounds {
        let eig = self.frame_operator().symmetric_eigenvalues();
        let lower = eig.min();
        let upper = eig.max();
        FrameBounds {
            lower,
            upper,
            tight: (upper - lower) / upper <= tol,
        }
    }

    /// `S^{-1}` via the eigendecomposition of the frame operator.
    fn inverse_frame_operator(&self) -> Result<DMatrix<f64>> {
        let eig = SymmetricEigen::new(self.frame_operator());
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if min < SINGULAR_RCOND * max {
            return Err(Error::Singular { ratio: min / max });
        }
        let inv = eig.eigenvalues.map(|l| 1.0 / l);
        Ok(&eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose())
    }

    /// Moore-Penrose pseudoinverse of the analysis operator as a dual frame.
    pub fn canonical_dual(&self) -> Result<DualFrame> {
        let s_inv = self.inverse_frame_operator()?;
        Ok(DualFrame {
            synthesis: s_inv * self.synthesis_matrix(),
            kind: DualKind::Canonical,
        })
    }

    /// Orthogonal projector onto `range(A)` in `R^M`.
    pub fn range_projector(&self) -> Result<DMatrix<f64>> {
        let a = self.analysis_matrix();
        let s_inv = self.inverse_frame_operator()?;
        Ok(&a * s_inv * a.transpose())
    }

    /// Orthonormal basis (as columns) of `null(F) = range(A)^perp`, an `M x (M - N)` matrix.
    pub fn null_space_basis(&self) -> Result<DMatrix<f64>> {
        let m = self.len();
        let p_perp = DMatrix::identity(m, m) - self.range_projector()?;
        let eig = SymmetricEigen::new(p_perp);
        let cols: Vec<DVector<f64>> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.5)
            .map(|(j, _)| eig.eigenvectors.column(j).into_owned())
            .collect();
        if cols.is_empty() {
            return Ok(DMatrix::zeros(m, 0));
        }
        Ok(DMatrix::from_columns(&cols))
    }

    /// A random left inverse `L = L* + G P_perp`.
    ///
    /// `G` is `N x M` with i.i.d. standard normal entries drawn row by row from
    /// `ChaCha8Rng::seed_from_u64(seed)`; `P_perp` projects onto `range(A)^perp`,
    /// so `L` agrees with the canonical dual on `range(A)`. When `M == N` the
    /// dual is unique and the canonical dual is returned with kind [`DualKind::Unique`].
    pub fn random_dual(&self, seed: u64) -> Result<DualFrame> {
        let (m, n) = (self.len(), self.dim);
        let canonical = self.canonical_dual()?;
        if m == n {
            return Ok(DualFrame {
                synthesis: canonical.synthesis,
                kind: DualKind::Unique,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = DMatrix::<f64>::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                g[(i, j)] = StandardNormal.sample(&mut rng);
            }
        }
        let p_perp = DMatrix::identity(m, m) - self.range_projector()?;
        Ok(DualFrame {
            synthesis: canonical.synthesis + g * p_perp,
            kind: DualKind::Random { seed },
        })
    }

    /// Tightness, norm equality and the `C N = M a^2` residual.
    pub fn entf_check(&self, tol: f64) -> EntfReport {
        let bounds = self.frame_bounds_with_tol(tol);
        let norms: Vec<f64> = self.vectors.iter().map(|v| v.norm()).collect();
        let max = norms.iter().cloned().fold(f64::MIN, f64::max);
        let min = norms.iter().cloned().fold(f64::MAX, f64::min);
        let a = norms.iter().sum::<f64>() / norms.len() as f64;
        let c = bounds.lower;
        EntfReport {
            is_tight: bounds.tight,
            is_equal_norm: (max - min) <= tol * max,
            c,
            a,
            cn_ma2_residual: (c * self.dim as f64 - self.len() as f64 * a * a).abs(),
            norms,
        }
    }
}

impl DualFrame {
    /// Wraps an explicit `N x M` synthesis matrix. No duality check is made;
    /// see [`DualFrame::left_inverse_residual`].
    pub fn from_synthesis_matrix(synthesis: DMatrix<f64>, kind: DualKind) -> Self {
        Self { synthesis, kind }
    }

    pub fn synthesis_matrix(&self) -> &DMatrix<f64> {
        &self.synthesis
    }

    pub fn kind(&self) -> DualKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.synthesis.ncols() == 0
    }

    pub fn dim(&self) -> usize {
        self.synthesis.nrows()
    }

    /// The dual vectors `f~_k` (columns of the synthesis matrix).
    pub fn vectors(&self) -> Vec<CoordVector> {
        self.synthesis
            .column_iter()
            .map(|c| c.into_owned())
            .collect()
    }

    /// Applies the synthesis operator to an observed coefficient vector.
    pub fn reconstruct(&self, observed: &CoordVector) -> Result<CoordVector> {
        check_len(self.len(), observed.len())?;
        Ok(&self.synthesis * observed)
    }

    /// `max |L A - I|` against the given analysis frame.
    pub fn left_inverse_residual(&self, frame: &CoordFrame) -> f64 {
        let n = frame.dim();
        (&self.synthesis * frame.analysis_matrix() - DMatrix::identity(n, n)).amax()
    }
}

impl NoiseSpec {
    /// Uncorrelated noise with per-coefficient variances.
    pub fn uncorrelated(variances: Vec<f64>) -> Result<Self> {
        if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "noise variances must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            variances,
            covariance: None,
        })
    }

    /// `m` uncorrelated coefficients sharing variance `delta_sq`.
    pub fn iid(m: usize, delta_sq: f64) -> Result<Self> {
        Self::uncorrelated(vec![delta_sq; m])
    }

    /// Full covariance; must be symmetric PSD.
    pub fn correlated(covariance: DMatrix<f64>) -> Result<Self> {
        if !covariance.is_square() {
            return Err(Error::DimensionMismatch {
                expected: covariance.nrows(),
                found: covariance.ncols(),
            });
        }
        let asym = (&covariance - covariance.transpose()).amax();
        let scale = covariance.amax().max(1.0);
        let min = covariance.symmetric_eigenvalues().min();
        if asym > 1e-12 * scale || min < -1e-12 * scale {
            return Err(Error::NotPsdCovariance {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            variances: covariance.diagonal().iter().cloned().collect(),
            covariance: Some(covariance),
        })
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        match &self.covariance {
            Some(c) => c.clone(),
            None => DMatrix::from_diagonal(&DVector::from_column_slice(&self.variances)),
        }
    }
}

/// Closed-form `E[||F~(e)||^2] = sum_{j,k} Cov(e_j, e_k) <f~_j, f~_k> = tr(L Sigma L^T)`.
pub fn expected_recon_error(
    frame: &CoordFrame,
    dual: &DualFrame,
    noise: &NoiseSpec,
) -> Result<f64> {
    check_len(frame.len(), dual.len())?;
    check_len(frame.dim(), dual.dim())?;
    check_len(frame.len(), noise.len())?;
    let l = dual.synthesis_matrix();
    let sigma = noise.covariance_matrix();
    Ok((l * sigma * l.transpose()).trace())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// The three-vector frame `{(1,0), (0,1), (1,1)/sqrt 2}` used throughout the tests.
#[cfg(test)]
pub(crate) fn diagonal_frame() -> CoordFrame {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CoordFrame::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[s, s]]).unwrap()
}

/// Three unit vectors at 120 degrees in the plane.
pub fn mercedes_benz_frame() -> CoordFrame {
    let h = 3f64.sqrt() / 2.0;
    CoordFrame::from_rows(&[&[0.0, 1.0], &[-h, -0.5], &[h, -0.5]]).expect("spanning")
}
