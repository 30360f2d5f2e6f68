//! Fields living on the grids: real, complex, spectral, and kinetic.

use num_complex::Complex64;

use super::{LambdaGrid, SpaceGrid};
use crate::error::{Error, Result};

/// Real-valued function sampled on a [`SpaceGrid`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: SpaceGrid,
    data: Vec<f64>,
}

impl ScalarField {
    /// Zero field.
    pub fn zeros(grid: SpaceGrid) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }

    /// Samples `f` at every lattice point (`x[1]` is 0 in one dimension).
    pub fn from_fn(grid: SpaceGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let data = grid.points().map(|(_, x)| f(x)).collect();
        Self { grid, data }
    }

    /// Wraps existing nodal values; fails unless the length matches the grid.
    pub fn from_data(grid: SpaceGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::shape(format!(
                "grid has {} points but got {} values",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    /// The grid this field lives on.
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// Nodal values, row-major.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable nodal values.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Consumes the field, returning its values.
    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Pointwise map into a new field.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, data })
    }

    /// In-place `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &ScalarField) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    /// In-place multiplication by a constant.
    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// Mean value over the torus, `(1/L^d) ∫ u dx`.
    pub fn mean(&self) -> f64 {
        let total: f64 = self.data.iter().sum();
        total / self.data.len() as f64
    }

    /// Quadrature of the field over the torus, `h^d Σ u_i`.
    pub fn integral(&self) -> f64 {
        let total: f64 = self.data.iter().sum();
        total * self.grid.cell_volume()
    }

    /// Promotes to a complex field with zero imaginary part.
    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub(crate) fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::shape("fields live on different grids".to_string()));
        }
        Ok(())
    }
}

/// Complex-valued function sampled on a [`SpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: SpaceGrid,
    data: Vec<Complex64>,
}

impl ComplexField {
    /// Zero field.
    pub fn zeros(grid: SpaceGrid) -> Self {
        Self { grid, data: vec![Complex64::ZERO; grid.len()] }
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn(grid: SpaceGrid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let data = grid.points().map(|(_, x)| f(x)).collect();
        Self { grid, data }
    }

    /// Wraps existing nodal values; fails unless the length matches the grid.
    pub fn from_data(grid: SpaceGrid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::shape(format!(
                "grid has {} points but got {} values",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    /// The grid this field lives on.
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// Nodal values, row-major.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable nodal values.
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Consumes the field, returning its values.
    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Real part as a scalar field.
    pub fn real_part(&self) -> ScalarField {
        ScalarField { grid: self.grid, data: self.data.iter().map(|z| z.re).collect() }
    }

    /// Largest pointwise imaginary magnitude (diagnostic for "should be real"
    /// results).
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|z| z.conj()).collect() }
    }
}

/// Fourier coefficients of a field, indexed by the dual lattice of a
/// [`SpaceGrid`] (same row-major layout; per-axis DFT index `k` carries mode
/// `k` for `k < N/2` and `k - N` otherwise).
///
/// Values follow the integral-transform normalisation: entry `m` approximates
/// `û(m/L) = ∫ e^{-2πi⟨m/L|x⟩} u(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: SpaceGrid,
    data: Vec<Complex64>,
}

impl SpectralField {
    /// Zero spectrum.
    pub fn zeros(grid: SpaceGrid) -> Self {
        Self { grid, data: vec![Complex64::ZERO; grid.len()] }
    }

    /// Wraps existing coefficients; fails unless the length matches the grid.
    pub fn from_data(grid: SpaceGrid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::shape(format!(
                "dual lattice has {} modes but got {} coefficients",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    /// Builds a spectrum by evaluating `f` on the dual lattice.
    pub fn from_modes(grid: SpaceGrid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let data = grid.frequencies().map(|(_, xi)| f(xi)).collect();
        Self { grid, data }
    }

    /// The spatial grid whose dual lattice indexes this spectrum.
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// Coefficients, row-major over DFT indices.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable coefficients.
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Consumes the spectrum, returning its coefficients.
    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Multiplies every coefficient by `symbol(ξ)` evaluated on the dual
    /// lattice, in place.
    pub fn apply_symbol(&mut self, symbol: impl Fn([f64; 2]) -> Complex64) {
        for flat in 0..self.data.len() {
            let xi = self.grid.frequency(flat);
            self.data[flat] *= symbol(xi);
        }
    }

    /// `(1/L^d) Σ |û_m|²` — equals `∫ |u|² dx` by the discrete Plancherel
    /// identity.
    pub fn energy(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|z| z.norm_sqr()).sum();
        sum / self.grid.side().powi(self.grid.dim() as i32)
    }
}

/// Real kinetic field `w(x, λ)`: one spatial slab per velocity node,
/// λ-major (`slab(k)` is the spatial field at `λ_k`).
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    grid: SpaceGrid,
    lambda: LambdaGrid,
    data: Vec<f64>,
}

impl KineticField {
    /// Zero kinetic field.
    pub fn zeros(grid: SpaceGrid, lambda: LambdaGrid) -> Self {
        let len = grid.len() * lambda.m();
        Self { grid, lambda, data: vec![0.0; len] }
    }

    /// Samples `f(x, λ)` on the product lattice.
    pub fn from_fn(grid: SpaceGrid, lambda: LambdaGrid, f: impl Fn([f64; 2], f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len() * lambda.m());
        for l in lambda.nodes() {
            data.extend(grid.points().map(|(_, x)| f(x, l)));
        }
        Self { grid, lambda, data }
    }

    /// Wraps existing λ-major values; fails unless the length matches.
    pub fn from_data(grid: SpaceGrid, lambda: LambdaGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() * lambda.m() {
            return Err(Error::shape(format!(
                "kinetic field needs {}x{} values, got {}",
                lambda.m(),
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, lambda, data })
    }

    /// Builds a kinetic field from per-λ spatial slabs.
    pub fn from_slabs(lambda: LambdaGrid, slabs: Vec<ScalarField>) -> Result<Self> {
        if slabs.len() != lambda.m() {
            return Err(Error::shape(format!(
                "expected {} slabs, got {}",
                lambda.m(),
                slabs.len()
            )));
        }
        let grid = *slabs[0].grid();
        let mut data = Vec::with_capacity(grid.len() * lambda.m());
        for slab in &slabs {
            if !slab.grid().same_as(&grid) {
                return Err(Error::shape("kinetic slabs live on different grids".to_string()));
            }
            data.extend_from_slice(slab.data());
        }
        Ok(Self { grid, lambda, data })
    }

    /// The spatial grid.
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// The velocity grid.
    pub fn lambda(&self) -> &LambdaGrid {
        &self.lambda
    }

    /// All values, λ-major.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable values, λ-major.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Spatial slab at velocity node `k`.
    pub fn slab(&self, k: usize) -> &[f64] {
        let len = self.grid.len();
        &self.data[k * len..(k + 1) * len]
    }

    /// Mutable spatial slab at velocity node `k`.
    pub fn slab_mut(&mut self, k: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.data[k * len..(k + 1) * len]
    }

    /// Copies slab `k` into an owned spatial field.
    pub fn slab_field(&self, k: usize) -> ScalarField {
        ScalarField { grid: self.grid, data: self.slab(k).to_vec() }
    }

    /// Pointwise difference on the same product lattice.
    pub fn difference(&self, other: &KineticField) -> Result<KineticField> {
        if !self.grid.same_as(&other.grid) || self.lambda != other.lambda {
            return Err(Error::shape("kinetic fields live on different lattices".to_string()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, lambda: self.lambda.clone(), data })
    }

    /// Velocity integral against a weight vector (one weight per node),
    /// returning the spatial field `x ↦ Σ_k w_k u(x, λ_k)`.
    pub fn weighted_lambda_sum(&self, weights: &[f64]) -> Result<ScalarField> {
        if weights.len() != self.lambda.m() {
            return Err(Error::shape(format!(
                "expected {} weights, got {}",
                self.lambda.m(),
                weights.len()
            )));
        }
        let mut out = vec![0.0; self.grid.len()];
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.slab(k)) {
                *o += w * v;
            }
        }
        ScalarField::from_data(self.grid, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid1() -> SpaceGrid {
        SpaceGrid::new(1, 16, 1.0).unwrap()
    }

    #[test]
    fn from_data_checks_length() {
        assert!(ScalarField::from_data(grid1(), vec![0.0; 15]).is_err());
        assert!(ScalarField::from_data(grid1(), vec![0.0; 16]).is_ok());
    }

    #[test]
    fn mean_and_integral_are_consistent() {
        let g = SpaceGrid::new(2, 8, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] + 3.0);
        // mean of x0 over [0,2) sampled at cell left edges: (0 + ... + 7/4)/8 = 7/8.
        assert_relative_eq!(f.mean(), 7.0 / 8.0 + 3.0, max_relative = 1e-14);
        assert_relative_eq!(f.integral(), f.mean() * 4.0, max_relative = 1e-14);
    }

    #[test]
    fn kinetic_slabs_are_lambda_major() {
        let g = grid1();
        let l = LambdaGrid::new(0.0, 1.0, 3).unwrap();
        let k = KineticField::from_fn(g, l, |x, lam| x[0] + 10.0 * lam);
        assert_relative_eq!(k.slab(2)[3], 3.0 / 16.0 + 10.0);
        let s = k.slab_field(1);
        assert_relative_eq!(s.data()[0], 5.0);
    }

    #[test]
    fn weighted_lambda_sum_matches_quadrature() {
        let g = grid1();
        let l = LambdaGrid::new(-1.0, 1.0, 9).unwrap();
        let k = KineticField::from_fn(g, l.clone(), |x, lam| (1.0 + x[0]) * lam * lam);
        let weights: Vec<f64> = l.weights().collect();
        let avg = k.weighted_lambda_sum(&weights).unwrap();
        // ∫_{-1}^{1} λ² dλ by trapezoid on 9 nodes: Δ=0.25 → 2/3 + Δ²/3·... just
        // compare against the directly computed quadrature.
        let expected = l.quadrature(|lam| lam * lam);
        assert_relative_eq!(avg.data()[0], expected, max_relative = 1e-13);
        assert_relative_eq!(avg.data()[8], (1.0 + 0.5) * expected, max_relative = 1e-13);
    }

    #[test]
    fn from_slabs_rejects_mixed_grids() {
        let l = LambdaGrid::new(0.0, 1.0, 2).unwrap();
        let a = ScalarField::zeros(SpaceGrid::new(1, 16, 1.0).unwrap());
        let b = ScalarField::zeros(SpaceGrid::new(1, 32, 1.0).unwrap());
        assert!(KineticField::from_slabs(l, vec![a, b]).is_err());
    }
}
