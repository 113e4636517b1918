//! The real vector space of Hermitian operators on `C^d`.
//!
//! Equipped with the Hilbert-Schmidt inner product `<<A|B>> = tr(AB)` the
//! space is isometric to `R^{d^2}`; [`HermBasis`] supplies the orthonormal
//! coordinates (`I/sqrt d` first, traceless generalised Gell-Mann matrices
//! after it) that let the real frame machinery in [`crate::coord_frame`] run
//! on operators unchanged. For `d = 2` the basis is `{I, X, Y, Z} / sqrt 2`.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// A `d x d` Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    m: DMatrix<Complex64>,
}

/// Result of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

impl HermitianOp {
    /// Validates squareness, finiteness and Hermiticity. Drift up to `1e-12`
    /// (relative to the largest entry) is repaired by `(M + M^H) / 2`.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        let adj = m.adjoint();
        let drift = (&m - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if drift > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { drift });
        }
        let m = if drift > 0.0 {
            (m + adj) * Complex64::new(0.5, 0.0)
        } else {
            m
        };
        Ok(Self { m })
    }

    /// Real symmetric matrix given row-major.
    pub fn from_real(d: usize, rows: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(d, d, rows).map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            m: DMatrix::zeros(d, d),
        }
    }

    /// Unnormalised Pauli matrix: 0 = I, 1 = X, 2 = Y, 3 = Z.
    pub fn pauli(i: usize) -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        let entries = match i {
            0 => [c(1.0, 0.0), z, z, c(1.0, 0.0)],
            1 => [z, c(1.0, 0.0), c(1.0, 0.0), z],
            2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
            3 => [c(1.0, 0.0), z, z, c(-1.0, 0.0)],
            _ => panic!("Pauli index {i} out of range 0..4"),
        };
        Self {
            m: DMatrix::from_row_slice(2, 2, &entries),
        }
    }

    /// `|psi><psi|` for a (not necessarily normalised) ket.
    pub fn projector(ket: &[Complex64]) -> Self {
        let v = DVector::from_column_slice(ket);
        Self {
            m: &v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    /// Squared Hilbert-Schmidt norm `tr(V^2)`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(s, 0.0),
        }
    }

    /// `V -> U V U^H` for a unitary `U` (not checked).
    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> Self {
        let m = u * &self.m * u.adjoint();
        Self {
            m: (&m + m.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }
}

impl Add for &HermitianOp {
    type Output = HermitianOp;
    fn add(self, rhs: Self) -> HermitianOp {
        HermitianOp {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianOp {
    type Output = HermitianOp;
    fn sub(self, rhs: Self) -> HermitianOp {
        HermitianOp {
            m: &self.m - &rhs.m,
        }
    }
}

impl Mul<f64> for &HermitianOp {
    type Output = HermitianOp;
    fn mul(self, rhs: f64) -> HermitianOp {
        self.scaled(rhs)
    }
}

/// Sum of `d x d` operators; the zero operator for an empty iterator.
pub fn sum_ops<'a>(d: usize, ops: impl IntoIterator<Item = &'a HermitianOp>) -> HermitianOp {
    ops.into_iter()
        .fold(HermitianOp::zeros(d), |acc, x| &acc + x)
}

/// Hilbert-Schmidt inner product `tr(ab)`; real for Hermitian inputs.
pub fn hs_inner(a: &HermitianOp, b: &HermitianOp) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    // tr(ab) = sum_ij a_ij b_ji = sum_ij a_ij conj(b_ij)
    let z: Complex64 = a.m.iter().zip(b.m.iter()).map(|(x, y)| x * y.conj()).sum();
    let scale = (a.hs_norm_sq() * b.hs_norm_sq()).sqrt().max(1.0);
    debug_assert!(
        z.im.abs() <= IMAG_RESIDUE_TOL * scale,
        "imaginary residue {}",
        z.im
    );
    Ok(z.re)
}

/// Ordered orthonormal Hermitian basis `{B_0 = I/sqrt d, B_1, ..., B_{d^2-1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermBasis {
    elements: Vec<HermitianOp>,
    dim: usize,
}

impl HermBasis {
    /// `{I, X, Y, Z} / sqrt 2`.
    pub fn pauli() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            elements: (0..4).map(|i| HermitianOp::pauli(i).scaled(s)).collect(),
            dim: 2,
        }
    }

    /// Normalised generalised Gell-Mann basis preceded by `I/sqrt d`.
    ///
    /// Order: identity; for each pair `j < k` the symmetric then the
    /// antisymmetric off-diagonal element; then the `d - 1` diagonal elements.
    /// For `d = 2` this reproduces [`HermBasis::pauli`].
    pub fn gellmann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "basis dimension must be >= 2, got {d}"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = vec![HermitianOp::identity(d).scaled(1.0 / (d as f64).sqrt())];
        for j in 0..d {
            for k in (j + 1)..d {
                let mut sym = DMatrix::from_element(d, d, zero);
                sym[(j, k)] = Complex64::new(s, 0.0);
                sym[(k, j)] = Complex64::new(s, 0.0);
                elements.push(HermitianOp { m: sym });
                let mut anti = DMatrix::from_element(d, d, zero);
                anti[(j, k)] = Complex64::new(0.0, -s);
                anti[(k, j)] = Complex64::new(0.0, s);
                elements.push(HermitianOp { m: anti });
            }
        }
        for l in 1..d {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = DMatrix::from_element(d, d, zero);
            for m in 0..l {
                diag[(m, m)] = Complex64::new(norm, 0.0);
            }
            diag[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            elements.push(HermitianOp { m: diag });
        }
        Ok(Self { elements, dim: d })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    /// `c_i = <<B_i|V>>`.
    pub fn coords(&self, v: &HermitianOp) -> Result<DVector<f64>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let c: Result<Vec<f64>> = self.elements.iter().map(|b| hs_inner(b, v)).collect();
        Ok(DVector::from_vec(c?))
    }

    /// `V = sum_i c_i B_i`.
    pub fn operator(&self, c: &DVector<f64>) -> Result<HermitianOp> {
        if c.len() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                found: c.len(),
            });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (b, &ci) in self.elements.iter().zip(c.iter()) {
            m += &b.m * Complex64::new(ci, 0.0);
        }
        Ok(HermitianOp { m })
    }

    /// Gram matrix `G_ij = <<B_i|B_j>>`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.elements.len();
        DMatrix::from_fn(n, n, |i, j| {
            hs_inner(&self.elements[i], &self.elements[j]).expect("same dimension")
        })
    }
}

/// Coordinates of an operator in a shared [`HermBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct OpCoords {
    pub c: DVector<f64>,
    pub basis: Arc<HermBasis>,
}

pub fn to_coords(v: &HermitianOp, basis: &Arc<HermBasis>) -> Result<OpCoords> {
    Ok(OpCoords {
        c: basis.coords(v)?,
        basis: Arc::clone(basis),
    })
}

pub fn from_coords(c: &OpCoords) -> Result<HermitianOp> {
    c.basis.operator(&c.c)
}

/// Splits `V` into its traceless part `V - (tr V / d) I` and `tr V`.
pub fn project_identity_component(v: &HermitianOp) -> (HermitianOp, f64) {
    let t = v.trace();
    let d = v.dim();
    let shift = HermitianOp::identity(d).scaled(t / d as f64);
    (v - &shift, t)
}

pub fn psd_check(v: &HermitianOp, tol: f64) -> PsdReport {
    let min_eigenvalue = v.min_eigenvalue();
    PsdReport {
        is_psd: min_eigenvalue >= -tol,
        min_eigenvalue,
    }
}

/// Qubit positivity in Pauli coordinates: `c_0 >= 0` and `c_0^2 >= c_1^2 + c_2^2 + c_3^2`.
pub fn qubit_cone_test(c: &DVector<f64>, tol: f64) -> bool {
    assert_eq!(c.len(), 4, "qubit coordinates have four entries");
    c[0] >= -tol && c[0] * c[0] - (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]) >= -tol
}

/// `rho = (I + r . sigma) / 2`; rejects `|r| > 1`.
pub fn density_from_bloch(r: [f64; 3]) -> Result<HermitianOp> {
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("Bloch vector"));
    }
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-12 {
        return Err(Error::OutsideBlochBall(norm));
    }
    let mut rho = HermitianOp::identity(2);
    for (i, &ri) in r.iter().enumerate() {
        rho = &rho + &HermitianOp::pauli(i + 1).scaled(ri);
    }
    Ok(rho.scaled(0.5))
}

/// `|psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`, as a density operator.
pub fn pure_state(theta: f64, phi: f64) -> HermitianOp {
    let ket = [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ];
    HermitianOp::projector(&ket)
}

/// Unit Bloch vector `(sin t cos p, sin t sin p, cos t)`.
pub fn bloch_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// `r_i = tr(rho sigma_i)`.
pub fn bloch_vector(rho: &HermitianOp) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let mut r = [0.0; 3];
    for (i, ri) in r.iter_mut().enumerate() {
        *ri = hs_inner(&HermitianOp::pauli(i + 1), rho)?;
    }
    Ok(r)
}

/// Checks unit trace and positivity within `tol`.
pub fn check_density(rho: &HermitianOp, tol: f64) -> Result<()> {
    let t = rho.trace();
    if (t - 1.0).abs() > tol {
        return Err(Error::InvalidDensity(format!("trace {t} != 1")));
    }
    let min = rho.min_eigenvalue();
    if min < -tol {
        return Err(Error::InvalidDensity(format!("min eigenvalue {min:e} < 0")));
    }
    Ok(())
}

/// Uniformly random Hermitian test operator with entries in `[-1, 1]`.
#[cfg(test)]
pub(crate) fn random_hermitian(rng: &mut impl rand::Rng, d: usize) -> HermitianOp {
    let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for i in 0..d {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..d {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOp::new(m).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn hs_inner_examples() {
        let i2 = HermitianOp::identity(2);
        assert_abs_diff_eq!(hs_inner(&i2, &i2).unwrap(), 2.0);
        let b = HermBasis::pauli();
        for (i, bi) in b.elements().iter().enumerate() {
            for (j, bj) in b.elements().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(hs_inner(bi, bj).unwrap(), expected, epsilon = 1e-15);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_hermitian(&mut rng, 3);
        assert_abs_diff_eq!(
            hs_inner(&HermitianOp::identity(3), &v).unwrap(),
            v.trace(),
            epsilon = 1e-14
        );
        assert!(hs_inner(&i2, &HermitianOp::identity(3)).is_err());
    }

    #[test]
    fn pauli_basis_matches_gellmann_two() {
        let p = HermBasis::pauli();
        let g = HermBasis::gellmann(2).unwrap();
        for (a, b) in p.elements().iter().zip(g.elements()) {
            assert!(a.max_abs_diff(b) <= 1e-15);
        }
        assert_abs_diff_eq!(p.gram(), DMatrix::identity(4, 4), epsilon = 1e-15);
    }

    #[test]
    fn gellmann_three_is_orthonormal_with_traceless_tail() {
        let g = HermBasis::gellmann(3).unwrap();
        assert_eq!(g.elements().len(), 9);
        assert_abs_diff_eq!(g.gram(), DMatrix::identity(9, 9), epsilon = 1e-12);
        let traceless = g.elements()[1..]
            .iter()
            .filter(|b| b.trace().abs() < 1e-14)
            .count();
        assert_eq!(traceless, 8);
        assert!(HermBasis::gellmann(1).is_err());
    }

    #[test]
    fn basis_rank_matches_dimension() {
        for d in 2..=4 {
            let g = HermBasis::gellmann(d).unwrap();
            let n = d * d;
            let rank = g.gram().rank(1e-10);
            assert_eq!(rank, n);
            let tail = g.gram().view((1, 1), (n - 1, n - 1)).into_owned();
            assert_eq!(tail.rank(1e-10), n - 1);
        }
    }

    #[test]
    fn coords_examples() {
        let b = Arc::new(HermBasis::pauli());
        let c = to_coords(&HermitianOp::identity(2), &b).unwrap();
        assert_abs_diff_eq!(c.c, dvector![2f64.sqrt(), 0.0, 0.0, 0.0], epsilon = 1e-15);

        let ket0 = pure_state(0.0, 0.0);
        let c = to_coords(&ket0, &b).unwrap();
        assert_abs_diff_eq!(c.c, dvector![S, 0.0, 0.0, S], epsilon = 1e-15);
        assert!(from_coords(&c).unwrap().max_abs_diff(&ket0) <= 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_hermitian(&mut rng, 2);
        let c = to_coords(&v, &b).unwrap();
        assert_abs_diff_eq!(v.hs_norm_sq(), c.c.norm_squared(), epsilon = 1e-12);
        assert!(to_coords(&HermitianOp::identity(3), &b).is_err());
    }

    #[test]
    fn isometry_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2usize, 3] {
            let b = Arc::new(HermBasis::gellmann(d).unwrap());
            for _ in 0..500 {
                let x = random_hermitian(&mut rng, d);
                let y = random_hermitian(&mut rng, d);
                let cx = to_coords(&x, &b).unwrap();
                let cy = to_coords(&y, &b).unwrap();
                assert!((hs_inner(&x, &y).unwrap() - cx.c.dot(&cy.c)).abs() <= 1e-10);
                assert!(from_coords(&cx).unwrap().max_abs_diff(&x) <= 1e-12);
                assert_abs_diff_eq!(cx.c[0], x.trace() / (d as f64).sqrt(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn identity_projection() {
        let (r, t) = project_identity_component(&HermitianOp::identity(2));
        assert!(r.max_abs_diff(&HermitianOp::zeros(2)) == 0.0);
        assert_eq!(t, 2.0);

        let rho = pure_state(1.1, 0.4);
        let (r, t) = project_identity_component(&rho);
        assert!(r.trace().abs() <= 1e-14);
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-15);
        let back = &r + &HermitianOp::identity(2).scaled(t / 2.0);
        assert!(back.max_abs_diff(&rho) <= 1e-15);
        assert!(hs_inner(&r, &HermitianOp::identity(2)).unwrap().abs() <= 1e-12);

        let z = HermitianOp::pauli(3);
        let (r, _) = project_identity_component(&z);
        assert_eq!(r, z);
    }

    #[test]
    fn psd_examples() {
        let half = HermitianOp::identity(2).scaled(0.5);
        let r = psd_check(&half, 1e-12);
        assert!(r.is_psd);
        assert_abs_diff_eq!(r.min_eigenvalue, 0.5, epsilon = 1e-15);

        let r = psd_check(&HermitianOp::pauli(3), 1e-12);
        assert!(!r.is_psd);
        assert_abs_diff_eq!(r.min_eigenvalue, -1.0, epsilon = 1e-15);

        let b = HermBasis::pauli();
        let v = b.operator(&dvector![S, 0.0, 0.0, S]).unwrap();
        let r = psd_check(&v, 1e-12);
        assert!(r.is_psd);
        assert_abs_diff_eq!(r.min_eigenvalue, 0.0, epsilon = 1e-15);
        let c = b.coords(&v).unwrap();
        assert_abs_diff_eq!(
            c[0] * c[0],
            c[1] * c[1] + c[2] * c[2] + c[3] * c[3],
            epsilon = 1e-15
        );
    }

    #[test]
    fn cone_agrees_with_eigenvalues() {
        let b = HermBasis::pauli();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        for _ in 0..1000 {
            let v = random_hermitian(&mut rng, 2);
            let c = b.coords(&v).unwrap();
            // Skip a 1e-10 band around the boundary.
            let margin = c[0] - (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt();
            if margin.abs() < 1e-10 {
                continue;
            }
            checked += 1;
            assert_eq!(qubit_cone_test(&c, 0.0), psd_check(&v, 0.0).is_psd);
        }
        assert!(checked > 990);
    }

    #[test]
    fn bloch_examples() {
        let rho = density_from_bloch([0.0, 0.0, 0.0]).unwrap();
        assert!(rho.max_abs_diff(&HermitianOp::identity(2).scaled(0.5)) <= 1e-15);
        assert!(matches!(
            density_from_bloch([0.8, 0.8, 0.0]),
            Err(Error::OutsideBlochBall(_))
        ));

        let third = 2.0 * std::f64::consts::PI / 3.0;
        let r = bloch_vector(&pure_state(third, 0.0)).unwrap();
        let expected = [3f64.sqrt() / 2.0, 0.0, -0.5];
        for i in 0..3 {
            assert_abs_diff_eq!(r[i], expected[i], epsilon = 1e-15);
        }
        let r = bloch_vector(&pure_state(third, std::f64::consts::PI / 3.0)).unwrap();
        let expected = [3f64.sqrt() / 4.0, 0.75, -0.5];
        for i in 0..3 {
            assert_abs_diff_eq!(r[i], expected[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn densities_lie_on_trace_hyperplane() {
        let b = HermBasis::pauli();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let r = [
                rng.random_range(-0.57..0.57),
                rng.random_range(-0.57..0.57),
                rng.random_range(-0.57..0.57),
            ];
            let rho = density_from_bloch(r).unwrap();
            assert_abs_diff_eq!(b.coords(&rho).unwrap()[0], S, epsilon = 1e-15);
            assert!(check_density(&rho, 1e-12).is_ok());
        }
    }

    #[test]
    fn hermiticity_is_enforced() {
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            HermitianOp::new(bad),
            Err(Error::NotHermitian { .. })
        ));
        let nearly = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 1e-14),
                Complex64::new(0.5, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let op = HermitianOp::new(nearly).unwrap();
        assert_eq!(op.matrix()[(0, 1)], op.matrix()[(1, 0)].conj());
    }
}
