//! POVMs, their traceless representations, informational completeness and
//! the Platonic-solid qubit families.
//!
//! Everything here works at the level of the POVM elements `{E_k}`. An
//! element list is informationally complete exactly when it is a frame for
//! the operator space, which in coordinates is a rank test on the `M x d^2`
//! matrix of element coordinates. Tightness is checked on the rescaled
//! traceless operators `Q_k = sqrt(tr E_k) (E_k / tr E_k - I/d)` restricted to
//! the traceless subspace.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, SymmetricEigen, UnitQuaternion, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coord_frame::CoordFrame;
use crate::error::{Error, Result};
use crate::herm_space::{
    check_density, hs_inner, qubit_cone_test, sum_ops, HermBasis, HermitianOp,
};

/// Tolerance used by [`Povm::new`] for positivity and completeness.
pub const POVM_TOL: f64 = 1e-10;

/// `M` PSD Hermitian operators on `C^d` summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOp>,
    dim: usize,
    origin: Option<PlatonicSpec>,
}

/// Per-element positivity margins and completeness diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub min_eigenvalues: Vec<f64>,
    pub psd_ok: bool,
    /// `max |sum_k E_k - I|` entrywise.
    pub completeness_residual: f64,
    pub trace_sum: f64,
    pub qubit: Option<QubitCoeffReport>,
    pub is_valid: bool,
}

/// The four coefficient constraints for a qubit POVM in Pauli coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitCoeffReport {
    /// `0 <= c_k0 <= d` for every element.
    pub c0_in_range: bool,
    /// `c_k1^2 + c_k2^2 + c_k3^2 <= c_k0^2` for every element.
    pub cone_ok: bool,
    /// `sum_k c_k0`, should be `d / sqrt 2`.
    pub c0_sum: f64,
    /// `sum_k c_ki` for `i = 1..3`, should vanish.
    pub ci_sums: [f64; 3],
}

/// `S_k = E_k / tr E_k - I/d` and `Q_k = sqrt(tr E_k) S_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessRep {
    pub s_ops: Vec<HermitianOp>,
    pub q_ops: Vec<HermitianOp>,
    pub traces: Vec<f64>,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcKind {
    NotIc,
    /// Linearly independent elements: a basis of the operator space.
    Minimal,
    /// Spanning but linearly dependent.
    Overcomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IcReport {
    pub is_ic: bool,
    pub rank: usize,
    pub kind: IcKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightIcReport {
    pub is_tight_ic: bool,
    /// Mean eigenvalue of the `Q_k` frame operator on the traceless subspace.
    pub c: f64,
    /// `max |S_Q - C I|` entrywise.
    pub residual: f64,
}

/// Frame bound, common norm and sizes of an equal-norm tight `Q_k` frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntfParams {
    pub c: f64,
    pub a: f64,
    pub m: usize,
    pub n: usize,
}

impl EntfParams {
    /// `|C N - M a^2|`.
    pub fn cn_ma2_residual(&self) -> f64 {
        (self.c * self.n as f64 - self.m as f64 * self.a * self.a).abs()
    }
}

impl Povm {
    /// Builds a POVM, enforcing positivity and completeness to [`POVM_TOL`].
    pub fn new(elements: Vec<HermitianOp>) -> Result<Self> {
        let povm = Self::from_elements_unchecked(elements)?;
        let report = povm.validate(POVM_TOL);
        if !report.psd_ok {
            let worst = report
                .min_eigenvalues
                .iter()
                .cloned()
                .fold(f64::MAX, f64::min);
            return Err(Error::InvalidPovm(format!(
                "element min eigenvalue {worst:e} < 0"
            )));
        }
        if report.completeness_residual > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "completeness residual {:e}",
                report.completeness_residual
            )));
        }
        Ok(povm)
    }

    /// Element list that only shares a dimension; use [`Povm::validate`] to
    /// inspect it.
    pub fn from_elements_unchecked(elements: Vec<HermitianOp>) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.dim())
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            elements,
            dim,
            origin: None,
        })
    }

    /// Symmetrically renormalises an element list so it sums to the identity:
    /// `E_k <- T^{-1/2} E_k T^{-1/2}` with `T = sum_k E_k`.
    pub fn recompleted(elements: Vec<HermitianOp>) -> Result<Self> {
        let raw = Self::from_elements_unchecked(elements)?;
        let t = sum_ops(raw.dim, &raw.elements);
        let eig = SymmetricEigen::new(t.matrix().clone());
        if eig.eigenvalues.min() <= 0.0 {
            return Err(Error::InvalidPovm(
                "element sum is not positive definite".into(),
            ));
        }
        let inv_sqrt = eig.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0));
        let w = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.adjoint();
        let elements = raw
            .elements
            .iter()
            .map(|e| HermitianOp::new(&w * e.matrix() * &w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The Platonic specification this POVM was built from, if any.
    pub fn origin(&self) -> Option<&PlatonicSpec> {
        self.origin.as_ref()
    }

    pub fn traces(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.trace()).collect()
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let min_eigenvalues: Vec<f64> = self.elements.iter().map(|e| e.min_eigenvalue()).collect();
        let psd_ok = min_eigenvalues.iter().all(|&l| l >= -tol);
        let total = sum_ops(self.dim, &self.elements);
        let completeness_residual = total.max_abs_diff(&HermitianOp::identity(self.dim));
        let trace_sum = total.trace();
        let qubit = (self.dim == 2).then(|| {
            let basis = HermBasis::pauli();
            let coords: Vec<DVector<f64>> = self
                .elements
                .iter()
                .map(|e| basis.coords(e).expect("qubit element"))
                .collect();
            let mut ci_sums = [0.0; 3];
            let mut c0_sum = 0.0;
            for c in &coords {
                c0_sum += c[0];
                for i in 0..3 {
                    ci_sums[i] += c[i + 1];
                }
            }
            QubitCoeffReport {
                c0_in_range: coords.iter().all(|c| c[0] >= -tol && c[0] <= 2.0 + tol),
                cone_ok: coords.iter().all(|c| qubit_cone_test(c, tol)),
                c0_sum,
                ci_sums,
            }
        });
        let is_valid =
            psd_ok && completeness_residual <= tol && (trace_sum - self.dim as f64).abs() <= tol;
        ValidationReport {
            min_eigenvalues,
            psd_ok,
            completeness_residual,
            trace_sum,
            qubit,
            is_valid,
        }
    }

    /// Outcome probabilities `p(k) = tr(E_k rho)`.
    pub fn probabilities(&self, rho: &HermitianOp) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        check_density(rho, POVM_TOL)?;
        self.elements
            .iter()
            .map(|e| Ok(hs_inner(e, rho)?.clamp(0.0, 1.0)))
            .collect()
    }

    /// `M x d^2` matrix of element coordinates in the Gell-Mann basis.
    pub fn coord_matrix(&self) -> DMatrix<f64> {
        let basis = HermBasis::gellmann(self.dim).expect("d >= 2");
        let n = self.dim * self.dim;
        let mut out = DMatrix::zeros(self.len(), n);
        for (k, e) in self.elements.iter().enumerate() {
            out.set_row(k, &basis.coords(e).expect("same dimension").transpose());
        }
        out
    }

    /// Informational completeness as a rank test on the element coordinates.
    pub fn ic_check(&self) -> IcReport {
        let n = self.dim * self.dim;
        let a = self.coord_matrix();
        let sv = a.singular_values();
        let max = sv.max();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * max.max(1e-300)).count();
        let is_ic = rank == n;
        let kind = match (is_ic, self.len() == n) {
            (false, _) => IcKind::NotIc,
            (true, true) => IcKind::Minimal,
            (true, false) => IcKind::Overcomplete,
        };
        IcReport { is_ic, rank, kind }
    }

    pub fn traceless_rep(&self) -> Result<TracelessRep> {
        let d = self.dim as f64;
        let shift = HermitianOp::identity(self.dim).scaled(1.0 / d);
        let mut s_ops = Vec::with_capacity(self.len());
        let mut q_ops = Vec::with_capacity(self.len());
        let mut traces = Vec::with_capacity(self.len());
        for (index, e) in self.elements.iter().enumerate() {
            let trace = e.trace();
            if trace <= 1e-12 {
                return Err(Error::ZeroTraceElement { index, trace });
            }
            let s = &e.scaled(1.0 / trace) - &shift;
            q_ops.push(s.scaled(trace.sqrt()));
            s_ops.push(s);
            traces.push(trace);
        }
        Ok(TracelessRep {
            s_ops,
            q_ops,
            traces,
            dim: self.dim,
        })
    }

    /// Whether the `Q_k` form a tight frame for the traceless subspace.
    pub fn tight_ic_check(&self, tol: f64) -> Result<TightIcReport> {
        let rep = self.traceless_rep()?;
        let q = rep.q_coords();
        let n = q.ncols();
        let s = q.transpose() * &q;
        let c = s.trace() / n as f64;
        let residual = (s - DMatrix::identity(n, n) * c).amax();
        Ok(TightIcReport {
            is_tight_ic: residual <= tol && c > tol,
            c,
            residual,
        })
    }
}

impl TracelessRep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.q_ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_ops.is_empty()
    }

    /// `M x (d^2 - 1)` coordinates of the `Q_k` in the traceless Gell-Mann elements.
    pub fn q_coords(&self) -> DMatrix<f64> {
        traceless_coords(&self.q_ops, self.dim)
    }

    /// `M x (d^2 - 1)` coordinates of the `S_k`.
    pub fn s_coords(&self) -> DMatrix<f64> {
        traceless_coords(&self.s_ops, self.dim)
    }

    /// The `Q_k` as a coordinate frame for the traceless subspace.
    pub fn q_frame(&self) -> Result<CoordFrame> {
        CoordFrame::from_analysis_matrix(&self.q_coords())
    }

    /// Checks equal norms and tightness of the `Q_k`, returning `C`, `a`, `M`, `N`.
    pub fn entf_params(&self, tol: f64) -> Result<EntfParams> {
        let q = self.q_coords();
        let norms: Vec<f64> = q.row_iter().map(|r| r.norm()).collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let min = norms.iter().cloned().fold(f64::MAX, f64::min);
        if max - min > tol * max.max(1.0) {
            return Err(Error::NotEqualNorm { norms });
        }
        let n = q.ncols();
        let s = q.transpose() * &q;
        let c = s.trace() / n as f64;
        let residual = (s - DMatrix::identity(n, n) * c).amax();
        if residual > tol || c <= tol {
            return Err(Error::NotTight { residual });
        }
        let a = norms.iter().sum::<f64>() / norms.len() as f64;
        Ok(EntfParams {
            c,
            a,
            m: self.len(),
            n,
        })
    }
}

/// Coordinates of traceless operators in the Gell-Mann basis, dropping the identity component.
pub fn traceless_coords(ops: &[HermitianOp], d: usize) -> DMatrix<f64> {
    let basis = HermBasis::gellmann(d).expect("d >= 2");
    let n = d * d - 1;
    let mut out = DMatrix::zeros(ops.len(), n);
    for (k, op) in ops.iter().enumerate() {
        let c = basis.coords(op).expect("same dimension");
        for i in 0..n {
            out[(k, i)] = c[i + 1];
        }
    }
    out
}

/// Inverse of [`traceless_coords`] for a single row.
pub fn traceless_operator(c: &DVector<f64>, d: usize) -> Result<HermitianOp> {
    let basis = HermBasis::gellmann(d)?;
    let mut full = DVector::zeros(d * d);
    if c.len() != d * d - 1 {
        return Err(Error::DimensionMismatch {
            expected: d * d - 1,
            found: c.len(),
        });
    }
    full.rows_mut(1, d * d - 1).copy_from(c);
    basis.operator(&full)
}

/// Qubit POVM families whose Bloch vectors are the vertices of a solid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solid {
    /// Two antipodal points: a projective measurement.
    AntipodalPair,
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
}

impl Solid {
    pub const ALL: [Solid; 5] = [
        Solid::AntipodalPair,
        Solid::Tetrahedron,
        Solid::Octahedron,
        Solid::Cube,
        Solid::Icosahedron,
    ];

    pub fn vertex_count(self) -> usize {
        match self {
            Solid::AntipodalPair => 2,
            Solid::Tetrahedron => 4,
            Solid::Octahedron => 6,
            Solid::Cube => 8,
            Solid::Icosahedron => 12,
        }
    }

    /// Smallest solid with the given vertex count.
    pub fn from_vertex_count(m: usize) -> Option<Solid> {
        Solid::ALL.into_iter().find(|s| s.vertex_count() == m)
    }

    pub fn name(self) -> &'static str {
        match self {
            Solid::AntipodalPair => "antipodal-pair",
            Solid::Tetrahedron => "tetrahedron",
            Solid::Octahedron => "octahedron",
            Solid::Cube => "cube",
            Solid::Icosahedron => "icosahedron",
        }
    }

    /// Unit vertices in canonical orientation.
    ///
    /// The tetrahedron has its first vertex at `+z` and the rest at azimuths
    /// 0, 120 and 240 degrees; the octahedron is ordered `+x, -x, +y, -y, +z, -z`;
    /// cube vertices are `(+-1, +-1, +-1) / sqrt 3` with vertex `k` and `7 - k`
    /// antipodal; the icosahedron uses the cyclic `(0, +-1, +-phi)` permutations.
    pub fn vertices(self) -> Vec<Vector3<f64>> {
        let raw: Vec<[f64; 3]> = match self {
            Solid::AntipodalPair => vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
            Solid::Tetrahedron => {
                let r = 8f64.sqrt() / 3.0;
                let (s, c) = (2.0 * std::f64::consts::PI / 3.0).sin_cos();
                vec![
                    [0.0, 0.0, 1.0],
                    [r, 0.0, -1.0 / 3.0],
                    [r * c, r * s, -1.0 / 3.0],
                    [r * c, -r * s, -1.0 / 3.0],
                ]
            }
            Solid::Octahedron => vec![
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
            Solid::Cube => (0..8)
                .map(|k| {
                    let sign = |bit: usize| if k & bit == 0 { 1.0 } else { -1.0 };
                    [sign(4), sign(2), sign(1)]
                })
                .collect(),
            Solid::Icosahedron => {
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let mut v = Vec::with_capacity(12);
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        v.push([0.0, s1, s2 * phi]);
                        v.push([s1, s2 * phi, 0.0]);
                        v.push([s2 * phi, 0.0, s1]);
                    }
                }
                v
            }
        };
        raw.into_iter()
            .map(|r| Vector3::from(r).normalize())
            .collect()
    }
}

impl fmt::Display for Solid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "antipodal-pair" | "antipodal" | "pair" | "2" => Ok(Solid::AntipodalPair),
            "tetrahedron" | "tet" | "4" => Ok(Solid::Tetrahedron),
            "octahedron" | "oct" | "6" => Ok(Solid::Octahedron),
            "cube" | "8" => Ok(Solid::Cube),
            "icosahedron" | "ico" | "12" => Ok(Solid::Icosahedron),
            _ => Err(Error::InvalidArgument(format!("unknown solid '{s}'"))),
        }
    }
}

/// A solid, an orientation on the Bloch sphere and per-element traces.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatonicSpec {
    pub solid: Solid,
    pub rotation: Rotation3<f64>,
    /// `tr(E_k)`; `None` means the uniform `2 / M`.
    pub weights: Option<Vec<f64>>,
}

impl PlatonicSpec {
    pub fn new(solid: Solid) -> Self {
        Self {
            solid,
            rotation: Rotation3::identity(),
            weights: None,
        }
    }

    pub fn rotated(mut self, rotation: Rotation3<f64>) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    /// Oriented unit Bloch vectors `n_k = R v_k`.
    pub fn bloch_vectors(&self) -> Vec<Vector3<f64>> {
        self.solid
            .vertices()
            .into_iter()
            .map(|v| self.rotation * v)
            .collect()
    }

    pub fn resolved_weights(&self) -> Vec<f64> {
        let m = self.solid.vertex_count();
        self.weights
            .clone()
            .unwrap_or_else(|| vec![2.0 / m as f64; m])
    }
}

/// Validates a 3x3 matrix as an element of SO(3).
pub fn rotation_from_matrix(m: Matrix3<f64>) -> Result<Rotation3<f64>> {
    let orth = (m.transpose() * m - Matrix3::identity()).amax();
    let det = m.determinant();
    if orth > 1e-12 || (det - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidRotation(format!(
            "|R^T R - I| = {orth:e}, det = {det}"
        )));
    }
    Ok(Rotation3::from_matrix_unchecked(m))
}

/// Rotation from a quaternion `[w, x, y, z]`; normalised, must be non-zero.
pub fn rotation_from_quaternion(q: [f64; 4]) -> Result<Rotation3<f64>> {
    let quat = nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]);
    if q.iter().any(|x| !x.is_finite()) || quat.norm() <= 1e-12 {
        return Err(Error::InvalidRotation(format!(
            "degenerate quaternion {q:?}"
        )));
    }
    Ok(UnitQuaternion::from_quaternion(quat).to_rotation_matrix())
}

/// `[w, x, y, z]` with `w >= 0`.
pub fn quaternion_of(r: &Rotation3<f64>) -> [f64; 4] {
    let q = UnitQuaternion::from_rotation_matrix(r);
    let s = if q.w < 0.0 { -1.0 } else { 1.0 };
    [s * q.w, s * q.i, s * q.j, s * q.k]
}

/// `E_k = tr(E_k) (I + n_k . sigma) / 2`.
pub fn platonic_povm(spec: &PlatonicSpec) -> Result<Povm> {
    let m = spec.solid.vertex_count();
    let weights = spec.resolved_weights();
    if weights.len() != m {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} vertices",
            weights.len(),
            m
        )));
    }
    if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::InvalidWeights("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 2.0).abs() > POVM_TOL {
        return Err(Error::InvalidWeights(format!(
            "weights sum to {total}, expected 2"
        )));
    }
    let elements: Vec<HermitianOp> = spec
        .bloch_vectors()
        .iter()
        .zip(&weights)
        .map(|(n, &w)| {
            let mut e = HermitianOp::identity(2);
            for i in 0..3 {
                e = &e + &HermitianOp::pauli(i + 1).scaled(n[i]);
            }
            e.scaled(w / 2.0)
        })
        .collect();
    let mut povm = Povm::new(elements).map_err(|e| match e {
        Error::InvalidPovm(msg) => Error::InvalidWeights(format!("weighted vertices: {msg}")),
        other => other,
    })?;
    povm.origin = Some(spec.clone());
    Ok(povm)
}

/// Serializable form of a POVM: metadata plus the element matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solid: Option<Solid>,
    /// Orientation quaternion `[w, x, y, z]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub elements: Vec<MatrixDocument>,
}

/// Row-major real and imaginary parts of a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl PovmDocument {
    pub fn from_povm(povm: &Povm) -> Self {
        let d = povm.dim();
        let elements = povm
            .elements()
            .iter()
            .map(|e| {
                let m = e.matrix();
                let re = (0..d)
                    .map(|i| (0..d).map(|j| m[(i, j)].re).collect())
                    .collect();
                let im: Vec<Vec<f64>> = (0..d)
                    .map(|i| (0..d).map(|j| m[(i, j)].im).collect())
                    .collect();
                let has_im = im.iter().flatten().any(|&x| x != 0.0);
                MatrixDocument {
                    re,
                    im: has_im.then_some(im),
                }
            })
            .collect();
        let origin = povm.origin();
        Self {
            dim: d,
            solid: origin.map(|o| o.solid),
            rotation: origin.map(|o| quaternion_of(&o.rotation)),
            weights: origin.map(|o| o.resolved_weights()),
            elements,
        }
    }

    /// Element list as written in the document; validity is not checked.
    pub fn to_elements(&self) -> Result<Vec<HermitianOp>> {
        let d = self.dim;
        self.elements
            .iter()
            .map(|md| {
                let rows_ok = md.re.len() == d && md.re.iter().all(|r| r.len() == d);
                let im_ok = md
                    .im
                    .as_ref()
                    .is_none_or(|im| im.len() == d && im.iter().all(|r| r.len() == d));
                if !rows_ok || !im_ok {
                    return Err(Error::InvalidPovm(format!(
                        "element matrices must be {d}x{d}"
                    )));
                }
                let m = DMatrix::from_fn(d, d, |i, j| {
                    let im = md.im.as_ref().map_or(0.0, |im| im[i][j]);
                    Complex64::new(md.re[i][j], im)
                });
                HermitianOp::new(m)
            })
            .collect()
    }
}
