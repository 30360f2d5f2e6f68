//! Diffusion matrices, their factorisations, and the adaptive projection.
//!
//! A degenerate parabolic problem carries a symmetric positive semi-definite
//! diffusion matrix `a(λ)` for every velocity λ. This module provides:
//!
//! * [`SymMatrix`] — a validated symmetric matrix value in dimension 1 or 2,
//!   with a closed-form eigendecomposition `a = Qᵀ Λ Q` (eigenvalues
//!   descending, deterministic eigenvector signs) and the square-root factor
//!   `σ = √Λ · Q` with `σᵀσ = a`;
//! * [`DiffusionFamily`] — named λ-dependent matrices with exact
//!   λ-derivatives, including the degenerate model families used throughout
//!   the experiments;
//! * [`project`] — the adaptive projection
//!   `π(ξ, λ) = ξ / (|ξ| + ⟨a(λ)ξ|ξ⟩)`, which maps the dual space onto the
//!   unit sphere when `a(λ)ξ·ξ` vanishes identically and into the closed unit
//!   ball otherwise;
//! * dyadic derivative certificates ([`marcinkiewicz`]), exact derivative
//!   recursions for the elliptic quotient symbols ([`recursion`]), and
//!   large-|ξ| continuity moduli ([`modulus`]).

pub mod marcinkiewicz;
pub mod modulus;
pub mod recursion;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::LambdaGrid;
use crate::tol;

/// Euclidean norm of a (possibly 1-d, second entry 0) dual vector.
pub fn norm(xi: [f64; 2]) -> f64 {
    xi[0].hypot(xi[1])
}

/// Symmetric matrix value in dimension 1 or 2.
///
/// One-dimensional values are stored in the `[0][0]` slot with zero padding,
/// so quadratic forms and products work uniformly in both dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    e: [[f64; 2]; 2],
}

impl SymMatrix {
    /// One-dimensional value (a 1×1 matrix).
    pub fn scalar(a: f64) -> Self {
        Self { dim: 1, e: [[a, 0.0], [0.0, 0.0]] }
    }

    /// Two-dimensional symmetric matrix `[[a11, a12], [a12, a22]]`.
    pub fn symmetric_2d(a11: f64, a12: f64, a22: f64) -> Self {
        Self { dim: 2, e: [[a11, a12], [a12, a22]] }
    }

    /// Diagonal two-dimensional matrix.
    pub fn diagonal(d0: f64, d1: f64) -> Self {
        Self::symmetric_2d(d0, 0.0, d1)
    }

    /// Validates a full entry table: entries must be finite and symmetric
    /// within [`tol::MATRIX_SYMMETRY_ABS`]; the stored value is symmetrised.
    pub fn from_entries(dim: usize, e: [[f64; 2]; 2]) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::model(format!("matrix dimension {dim} not in 1..=2")));
        }
        for row in &e {
            for v in row {
                if !v.is_finite() {
                    return Err(Error::model(format!("non-finite matrix entry {v}")));
                }
            }
        }
        if dim == 1 {
            if e[0][1] != 0.0 || e[1][0] != 0.0 || e[1][1] != 0.0 {
                return Err(Error::model(
                    "one-dimensional matrix must only use the [0][0] entry".to_string(),
                ));
            }
            return Ok(Self::scalar(e[0][0]));
        }
        let skew = (e[0][1] - e[1][0]).abs();
        if skew > tol::MATRIX_SYMMETRY_ABS {
            return Err(Error::model(format!(
                "matrix is not symmetric: |a12 - a21| = {skew:.3e}"
            )));
        }
        let off = 0.5 * (e[0][1] + e[1][0]);
        Ok(Self::symmetric_2d(e[0][0], off, e[1][1]))
    }

    /// Zero matrix.
    pub fn zero(dim: usize) -> Self {
        Self { dim, e: [[0.0; 2]; 2] }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut e = [[0.0; 2]; 2];
        e[0][0] = 1.0;
        if dim == 2 {
            e[1][1] = 1.0;
        }
        Self { dim, e }
    }

    /// Matrix dimension (1 or 2).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `a_ij` (out-of-dimension entries are 0).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    /// True when every entry is exactly zero — the projection then maps onto
    /// the unit sphere rather than the ball interior.
    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|row| row.iter().all(|&v| v == 0.0))
    }

    /// Quadratic form `⟨aξ|ξ⟩`.
    pub fn quadratic(&self, xi: [f64; 2]) -> f64 {
        let y = self.mul_vec(xi);
        y[0] * xi[0] + y[1] * xi[1]
    }

    /// Matrix-vector product `aξ`.
    pub fn mul_vec(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.e[0][0] * xi[0] + self.e[0][1] * xi[1],
            self.e[1][0] * xi[0] + self.e[1][1] * xi[1],
        ]
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.e.iter().flatten().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Sum of scaled matrices, used for finite-difference derivatives.
    pub fn linear_combination(c1: f64, m1: &SymMatrix, c2: f64, m2: &SymMatrix) -> Result<Self> {
        if m1.dim != m2.dim {
            return Err(Error::shape("matrices of different dimension".to_string()));
        }
        let mut e = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = c1 * m1.e[i][j] + c2 * m2.e[i][j];
            }
        }
        Ok(Self { dim: m1.dim, e })
    }

    /// Eigendecomposition `a = Qᵀ Λ Q` with eigenvalues in descending order
    /// and each eigenvector's first nonzero component positive (rows of `Q`
    /// are the eigenvectors).
    pub fn eigendecompose(&self) -> EigenDecomposition {
        if self.dim == 1 {
            return EigenDecomposition {
                dim: 1,
                values: [self.e[0][0], 0.0],
                q: [[1.0, 0.0], [0.0, 1.0]],
            };
        }
        let (a, b, c) = (self.e[0][0], self.e[0][1], self.e[1][1]);
        let mid = 0.5 * (a + c);
        let disc = (0.5 * (a - c)).hypot(b);
        let values = [mid + disc, mid - disc];
        let v1 = if b != 0.0 {
            // (b, λ₁ - a) is a λ₁-eigenvector with norm ≥ |b| > 0; using the
            // larger residual coordinate keeps it stable near degeneracy.
            let cand = [b, values[0] - a];
            let alt = [values[0] - c, b];
            if norm(alt) > norm(cand) {
                alt
            } else {
                cand
            }
        } else if a >= c {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        let n1 = norm(v1);
        let mut q1 = [v1[0] / n1, v1[1] / n1];
        orient(&mut q1);
        // The second eigenvector is the exact perpendicular, re-oriented.
        let mut q2 = [-q1[1], q1[0]];
        orient(&mut q2);
        EigenDecomposition { dim: 2, values, q: [q1, q2] }
    }

    /// Square-root factor `σ = √Λ · Q` with `σᵀσ = a`.
    ///
    /// Fails when an eigenvalue lies below [`tol::PSD_EIGENVALUE_FLOOR`];
    /// eigenvalues in `[floor, 0)` are clamped to zero before the root.
    pub fn sigma_factor(&self) -> Result<Mat2> {
        let eig = self.eigendecompose();
        let mut rows = [[0.0; 2]; 2];
        for (i, &v) in eig.values.iter().enumerate().take(self.dim) {
            if v < tol::PSD_EIGENVALUE_FLOOR {
                return Err(Error::model(format!(
                    "matrix has negative eigenvalue {v:.3e}; no real square-root factor"
                )));
            }
            let root = v.max(0.0).sqrt();
            rows[i] = [root * eig.q[i][0], root * eig.q[i][1]];
        }
        Ok(Mat2 { dim: self.dim, e: rows })
    }

    /// Checks positive semi-definiteness within the eigenvalue floor.
    pub fn check_psd(&self) -> Result<()> {
        let eig = self.eigendecompose();
        let min = if self.dim == 1 { eig.values[0] } else { eig.values[1] };
        if min < tol::PSD_EIGENVALUE_FLOOR {
            return Err(Error::model(format!(
                "matrix is not positive semi-definite: eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "[{}]", self.e[0][0])
        } else {
            write!(
                f,
                "[[{}, {}], [{}, {}]]",
                self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
            )
        }
    }
}

fn orient(v: &mut [f64; 2]) {
    let lead = if v[0] != 0.0 { v[0] } else { v[1] };
    if lead < 0.0 {
        v[0] = -v[0];
        v[1] = -v[1];
    }
}

/// Result of [`SymMatrix::eigendecompose`]: `a = Qᵀ Λ Q`.
#[derive(Debug, Clone, Copy)]
pub struct EigenDecomposition {
    dim: usize,
    /// Eigenvalues in descending order (second entry 0 in one dimension).
    pub values: [f64; 2],
    /// Orthonormal eigenvectors as rows.
    pub q: [[f64; 2]; 2],
}

impl EigenDecomposition {
    /// Reassembles `Qᵀ Λ Q` (used by tests and validation).
    pub fn reconstruct(&self) -> SymMatrix {
        let mut e = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = self.values[0] * self.q[0][i] * self.q[0][j]
                    + self.values[1] * self.q[1][i] * self.q[1][j];
            }
        }
        SymMatrix { dim: self.dim, e }
    }

    /// Largest absolute entry of `QᵀQ - I` (0 for exact orthonormality).
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let dot = self.q[i][0] * self.q[j][0] + self.q[i][1] * self.q[j][1];
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// General (not necessarily symmetric) small matrix: eigenvector frames and
/// square-root factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    dim: usize,
    e: [[f64; 2]; 2],
}

impl Mat2 {
    /// Builds from rows (dimension inferred as 2).
    pub fn from_rows(r0: [f64; 2], r1: [f64; 2]) -> Self {
        Self { dim: 2, e: [r0, r1] }
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry accessor.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    /// Row accessor.
    pub fn row(&self, i: usize) -> [f64; 2] {
        self.e[i]
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.e[0][0] * xi[0] + self.e[0][1] * xi[1],
            self.e[1][0] * xi[0] + self.e[1][1] * xi[1],
        ]
    }

    /// `σᵀσ` as a symmetric matrix (the factorisation check).
    pub fn gram(&self) -> SymMatrix {
        let mut e = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = self.e[0][i] * self.e[0][j] + self.e[1][i] * self.e[1][j];
            }
        }
        SymMatrix { dim: self.dim, e }
    }

    /// Entry-wise `c₁·m₁ + c₂·m₂` (finite-difference rates of factors).
    pub fn linear_combination(c1: f64, m1: &Mat2, c2: f64, m2: &Mat2) -> Result<Mat2> {
        if m1.dim != m2.dim {
            return Err(Error::shape("matrices have different dimensions".to_string()));
        }
        let mut e = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = c1 * m1.e[i][j] + c2 * m2.e[i][j];
            }
        }
        Ok(Mat2 { dim: m1.dim, e })
    }
}

/// Adaptive projection `π(ξ) = ξ / (|ξ| + ⟨aξ|ξ⟩)`.
///
/// Undefined at ξ = 0 (domain error). The image lies on the unit sphere when
/// `a = 0` and inside the closed unit ball otherwise.
pub fn project(a: &SymMatrix, xi: [f64; 2]) -> Result<[f64; 2]> {
    let d = elliptic_denominator(a, xi);
    if d == 0.0 {
        return Err(Error::domain("projection is undefined at ξ = 0".to_string()));
    }
    Ok([xi[0] / d, xi[1] / d])
}

/// The elliptic weight `|ξ| + ⟨aξ|ξ⟩` (denominator of the projection and of
/// the elliptic inverse symbol).
pub fn elliptic_denominator(a: &SymMatrix, xi: [f64; 2]) -> f64 {
    norm(xi) + a.quadratic(xi)
}

type MatrixFn = Arc<dyn Fn(f64) -> SymMatrix + Send + Sync>;

/// A named λ-dependent diffusion matrix with its exact λ-derivative.
///
/// Values must be symmetric positive semi-definite wherever they are used;
/// [`DiffusionFamily::validate_on`] checks this on a velocity grid up front so
/// evaluation stays infallible in hot loops. Derivatives are symmetric but
/// (of course) not sign-constrained.
#[derive(Clone)]
pub struct DiffusionFamily {
    dim: usize,
    label: String,
    value: MatrixFn,
    derivative: MatrixFn,
}

impl fmt::Debug for DiffusionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionFamily")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl DiffusionFamily {
    /// Arbitrary family from value and derivative closures.
    pub fn from_fns(
        dim: usize,
        label: impl Into<String>,
        value: impl Fn(f64) -> SymMatrix + Send + Sync + 'static,
        derivative: impl Fn(f64) -> SymMatrix + Send + Sync + 'static,
    ) -> Self {
        Self { dim, label: label.into(), value: Arc::new(value), derivative: Arc::new(derivative) }
    }

    /// Identically zero diffusion (pure transport): the projection image is
    /// the unit sphere.
    pub fn zero(dim: usize) -> Self {
        Self::from_fns(dim, "zero", move |_| SymMatrix::zero(dim), move |_| SymMatrix::zero(dim))
    }

    /// Constant identity diffusion.
    pub fn identity(dim: usize) -> Self {
        Self::from_fns(
            dim,
            "identity",
            move |_| SymMatrix::identity(dim),
            move |_| SymMatrix::zero(dim),
        )
    }

    /// Two-dimensional family `diag(0, |λ|)`: degenerate along the first
    /// axis everywhere and along both axes at λ = 0. The derivative is
    /// `diag(0, sign λ)` (0 at the kink).
    pub fn axis_degenerate_abs() -> Self {
        Self::from_fns(
            2,
            "axis_degenerate_abs",
            |l| SymMatrix::diagonal(0.0, l.abs()),
            |l| SymMatrix::diagonal(0.0, if l == 0.0 { 0.0 } else { l.signum() }),
        )
    }

    /// Two-dimensional rank-one family `(1, -λ)(1, -λ)ᵀ`, i.e.
    /// `[[1, -λ], [-λ, λ²]]`: degenerate in the direction `(λ, 1)` for every
    /// λ, with smooth bounded factor derivative.
    pub fn rank_one_shear() -> Self {
        Self::from_fns(
            2,
            "rank_one_shear",
            |l| SymMatrix::symmetric_2d(1.0, -l, l * l),
            |l| SymMatrix::symmetric_2d(0.0, -1.0, 2.0 * l),
        )
    }

    /// Isotropic ramp `max(λ, 0) · I`: positive semi-definite for all λ, with
    /// square-root factor `√λ · I` whose λ-derivative blows up as λ → 0⁺.
    /// Useful as a contrast case for factor-derivative-based bounds.
    pub fn isotropic_ramp(dim: usize) -> Self {
        Self::from_fns(
            dim,
            "isotropic_ramp",
            move |l| {
                let v = l.max(0.0);
                if dim == 1 {
                    SymMatrix::scalar(v)
                } else {
                    SymMatrix::diagonal(v, v)
                }
            },
            move |l| {
                let v = if l > 0.0 { 1.0 } else { 0.0 };
                if dim == 1 {
                    SymMatrix::scalar(v)
                } else {
                    SymMatrix::diagonal(v, v)
                }
            },
        )
    }

    /// One-dimensional polynomial family `a(λ) = Σ c_k λ^k`.
    pub fn scalar_poly(coeffs: Vec<f64>) -> Self {
        let label = format!("scalar_poly({coeffs:?})");
        let deriv: Vec<f64> =
            coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        Self::from_fns(
            1,
            label,
            move |l| SymMatrix::scalar(poly_eval(&coeffs, l)),
            move |l| SymMatrix::scalar(poly_eval(&deriv, l)),
        )
    }

    /// Two-dimensional diagonal polynomial family
    /// `a(λ) = diag(p₀(λ), p₁(λ))`.
    pub fn diagonal_poly(p0: Vec<f64>, p1: Vec<f64>) -> Self {
        let label = format!("diagonal_poly({p0:?}, {p1:?})");
        let d0: Vec<f64> = p0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        let d1: Vec<f64> = p1.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        Self::from_fns(
            2,
            label,
            move |l| SymMatrix::diagonal(poly_eval(&p0, l), poly_eval(&p1, l)),
            move |l| SymMatrix::diagonal(poly_eval(&d0, l), poly_eval(&d1, l)),
        )
    }

    /// Lifts a one-dimensional spatial family to the space-time slab: the
    /// time axis (axis 0) carries no diffusion, the spatial axis carries the
    /// inner family.
    pub fn embed_time(inner: &DiffusionFamily) -> Result<Self> {
        if inner.dim != 1 {
            return Err(Error::model(
                "time embedding expects a one-dimensional spatial family".to_string(),
            ));
        }
        let value = Arc::clone(&inner.value);
        let derivative = Arc::clone(&inner.derivative);
        Ok(Self {
            dim: 2,
            label: format!("time_slab({})", inner.label),
            value: Arc::new(move |l| {
                let a = value(l);
                SymMatrix::diagonal(0.0, a.entry(0, 0))
            }),
            derivative: Arc::new(move |l| {
                let a = derivative(l);
                SymMatrix::diagonal(0.0, a.entry(0, 0))
            }),
        })
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Human-readable family label (stable, used in manifests).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Matrix value at velocity λ.
    pub fn value(&self, lambda: f64) -> SymMatrix {
        (self.value)(lambda)
    }

    /// Exact λ-derivative at velocity λ.
    pub fn derivative(&self, lambda: f64) -> SymMatrix {
        (self.derivative)(lambda)
    }

    /// Checks dimension, symmetry, and positive semi-definiteness of the
    /// value at every node of a velocity grid, and that the derivative is at
    /// least symmetric and finite there.
    pub fn validate_on(&self, grid: &LambdaGrid) -> Result<()> {
        for l in grid.nodes() {
            let a = self.value(l);
            if a.dim() != self.dim {
                return Err(Error::model(format!(
                    "family '{}' produced dimension {} at λ = {l}, expected {}",
                    self.label,
                    a.dim(),
                    self.dim
                )));
            }
            SymMatrix::from_entries(a.dim(), a.e)
                .map_err(|e| Error::model(format!("family '{}' at λ = {l}: {e}", self.label)))?;
            a.check_psd()
                .map_err(|e| Error::model(format!("family '{}' at λ = {l}: {e}", self.label)))?;
            let da = self.derivative(l);
            SymMatrix::from_entries(da.dim(), da.e).map_err(|e| {
                Error::model(format!("family '{}' derivative at λ = {l}: {e}", self.label))
            })?;
        }
        Ok(())
    }
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn projection_of_pure_transport_lands_on_the_sphere() {
        let a = SymMatrix::zero(2);
        let pi = project(&a, [3.0, 4.0]).unwrap();
        assert_relative_eq!(pi[0], 0.6, max_relative = 1e-15);
        assert_relative_eq!(pi[1], 0.8, max_relative = 1e-15);
        assert_relative_eq!(norm(pi), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn projection_with_identity_diffusion_contracts_into_the_ball() {
        let a = SymMatrix::identity(2);
        let pi = project(&a, [1.0, 0.0]).unwrap();
        assert_relative_eq!(pi[0], 0.5, max_relative = 1e-15);
        assert_eq!(pi[1], 0.0);
        assert!(norm(pi) < 1.0);
    }

    #[test]
    fn projection_hits_the_sphere_exactly_on_degenerate_directions() {
        // Rank-one family at λ = 1 is degenerate along ξ = (1, 1).
        let a = DiffusionFamily::rank_one_shear().value(1.0);
        let pi = project(&a, [1.0, 1.0]).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(pi[0], inv_sqrt2, max_relative = 1e-15);
        assert_relative_eq!(pi[1], inv_sqrt2, max_relative = 1e-15);
    }

    #[test]
    fn projection_rejects_the_origin() {
        let a = SymMatrix::identity(2);
        assert!(project(&a, [0.0, 0.0]).is_err());
    }

    #[test]
    fn eigendecomposition_orders_and_orients() {
        let a = SymMatrix::diagonal(1.0, 5.0);
        let eig = a.eigendecompose();
        assert_eq!(eig.values, [5.0, 1.0]);
        // Leading eigenvector along axis 1, oriented positive.
        assert_eq!(eig.q[0], [0.0, 1.0]);
        assert_eq!(eig.q[1], [1.0, 0.0]);
        assert_eq!(eig.orthogonality_defect(), 0.0);
    }

    #[test]
    fn rank_one_shear_factorises_exactly() {
        let fam = DiffusionFamily::rank_one_shear();
        for k in 0..=64 {
            let l = -2.0 + 4.0 * k as f64 / 64.0;
            let a = fam.value(l);
            let eig = a.eigendecompose();
            assert_relative_eq!(eig.values[0], 1.0 + l * l, max_relative = 1e-14);
            assert!(eig.values[1].abs() <= 1e-14 * (1.0 + l * l));
            let sigma = a.sigma_factor().unwrap();
            let gram = sigma.gram();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (gram.entry(i, j) - a.entry(i, j)).abs() <= crate::tol::SIGMA_FACTOR_ABS,
                        "λ={l}: σᵀσ[{i}][{j}] = {} vs {}",
                        gram.entry(i, j),
                        a.entry(i, j)
                    );
                }
            }
            // The nonzero σ row is parallel to (1, -λ).
            let r = sigma.row(0);
            assert_relative_eq!(r[1] * 1.0, -l * r[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn sigma_factor_rejects_indefinite_matrices() {
        let a = SymMatrix::diagonal(1.0, -0.5);
        assert!(a.sigma_factor().is_err());
        assert!(a.check_psd().is_err());
    }

    #[test]
    fn family_validation_flags_negative_directions() {
        let grid = LambdaGrid::new(-1.0, 1.0, 9).unwrap();
        let bad = DiffusionFamily::from_fns(
            1,
            "linear",
            |l| SymMatrix::scalar(l),
            |_| SymMatrix::scalar(1.0),
        );
        assert!(bad.validate_on(&grid).is_err());
        assert!(DiffusionFamily::isotropic_ramp(2).validate_on(&grid).is_ok());
        assert!(DiffusionFamily::axis_degenerate_abs().validate_on(&grid).is_ok());
        assert!(DiffusionFamily::rank_one_shear().validate_on(&grid).is_ok());
    }

    #[test]
    fn time_embedding_keeps_the_time_axis_diffusion_free() {
        let inner = DiffusionFamily::scalar_poly(vec![0.0, 0.0, 1.0]); // λ²
        let slab = DiffusionFamily::embed_time(&inner).unwrap();
        let a = slab.value(3.0);
        assert_eq!(a.entry(0, 0), 0.0);
        assert_eq!(a.entry(1, 1), 9.0);
        assert_eq!(slab.derivative(3.0).entry(1, 1), 6.0);
        assert!(DiffusionFamily::embed_time(&slab).is_err());
    }

    #[test]
    fn polynomial_families_differentiate_exactly() {
        let fam = DiffusionFamily::diagonal_poly(vec![1.0, 0.0, 2.0], vec![0.5]);
        assert_eq!(fam.value(2.0).entry(0, 0), 9.0);
        assert_eq!(fam.derivative(2.0).entry(0, 0), 8.0);
        assert_eq!(fam.derivative(2.0).entry(1, 1), 0.0);
    }

    proptest! {
        #[test]
        fn random_psd_matrices_factorise(
            theta in 0.0..std::f64::consts::PI,
            l1 in 0.0f64..100.0,
            l2 in 0.0f64..100.0,
        ) {
            // Build a = QᵀΛQ from a rotation and nonnegative eigenvalues,
            // then check the computed factor reproduces it.
            let (c, s) = (theta.cos(), theta.sin());
            let (hi, lo) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
            let a11 = hi * c * c + lo * s * s;
            let a12 = (hi - lo) * c * s;
            let a22 = hi * s * s + lo * c * c;
            let a = SymMatrix::symmetric_2d(a11, a12, a22);
            let sigma = a.sigma_factor().unwrap();
            let gram = sigma.gram();
            let scale = a.max_abs_entry().max(1.0);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((gram.entry(i, j) - a.entry(i, j)).abs()
                        <= crate::tol::SIGMA_FACTOR_ABS * scale);
                }
            }
            let eig = a.eigendecompose();
            prop_assert!(eig.orthogonality_defect() <= crate::tol::ORTHOGONALITY_ABS);
            prop_assert!(eig.values[0] >= eig.values[1]);
        }

        #[test]
        fn projection_image_obeys_the_ball_dichotomy(
            x in -50.0f64..50.0,
            y in -50.0f64..50.0,
            l in -3.0f64..3.0,
        ) {
            prop_assume!(x.hypot(y) > 1e-6);
            // Pure transport: exactly the sphere.
            let pi0 = project(&SymMatrix::zero(2), [x, y]).unwrap();
            prop_assert!((norm(pi0) - 1.0).abs() < 1e-12);
            // Nontrivial diffusion: closed unit ball.
            let a = DiffusionFamily::rank_one_shear().value(l);
            let pi = project(&a, [x, y]).unwrap();
            prop_assert!(norm(pi) <= 1.0 + 1e-12);
        }
    }
}
