//! Periodic tensor grids, velocity grids, and fields living on them.
//!
//! Space is the flat torus `[0, L)^d` for `d ∈ {1, 2}`, sampled on a uniform
//! lattice with `N` points per axis (`N` a power of two, so the fast Fourier
//! transform applies). The velocity (λ) variable lives on a closed interval
//! with a uniform node set and trapezoid quadrature weights.
//!
//! Conventions used throughout the crate:
//!
//! * physical points: `x_j = i_j · h` with `h = L / N`;
//! * dual lattice: `ξ_j = m_j / L` with integer `m_j ∈ [-N/2, N/2)`;
//! * Fourier transform: `û(ξ) = ∫ e^{-2πi⟨ξ|x⟩} u(x) dx`, discretised as
//!   `h^d · DFT`; the inverse carries the matching `1/L^d` factor;
//! * storage: row-major, axis 0 slowest; kinetic fields are λ-major (one
//!   spatial slab per velocity node).

mod fft;
mod field;
mod io;
mod norms;

pub use field::{ComplexField, KineticField, ScalarField, SpectralField};
pub use io::{read_kinetic, read_scalar, write_csv_slice, write_kinetic, write_scalar};
pub use norms::{l1_local_distance, Window};

use crate::error::{Error, Result};

/// Largest grid dimension supported; the whole laboratory works in 1-d and
/// 2-d (space-time slabs reuse the 2-d case).
pub const MAX_DIM: usize = 2;

/// Uniform periodic lattice on `[0, side)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    dim: usize,
    n: usize,
    side: f64,
}

impl SpaceGrid {
    /// Creates a grid with `n` points per axis on `[0, side)^dim`.
    ///
    /// `dim` must be 1 or 2, `n` a power of two with `n ≥ 8`, and `side` a
    /// positive finite length.
    pub fn new(dim: usize, n: usize, side: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::grid(format!("dimension {dim} not in 1..={MAX_DIM}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::grid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::grid(format!("side length must be positive, got {side}")));
        }
        Ok(Self { dim, n, side })
    }

    /// Spatial dimension (1 or 2).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Side length of the periodic box.
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Lattice spacing `h = side / n` (identical on both axes).
    pub fn h(&self) -> f64 {
        self.side / self.n as f64
    }

    /// Volume of one cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Total number of lattice points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Always false: grids have at least 8 points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Splits a flat (row-major) index into per-axis indices; axis 1 is 0 in
    /// one dimension.
    pub fn unravel(&self, flat: usize) -> [usize; 2] {
        debug_assert!(flat < self.len());
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.n, flat % self.n],
        }
    }

    /// Flattens per-axis indices (row-major, axis 0 slowest).
    pub fn ravel(&self, idx: [usize; 2]) -> usize {
        debug_assert!(idx[0] < self.n && (self.dim == 2 || idx[1] == 0) && idx[1] < self.n.max(1));
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.n + idx[1],
        }
    }

    /// Physical coordinates of the lattice point with flat index `flat`;
    /// the second entry is 0 in one dimension.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let idx = self.unravel(flat);
        let h = self.h();
        [idx[0] as f64 * h, if self.dim == 2 { idx[1] as f64 * h } else { 0.0 }]
    }

    /// Signed integer mode number for a per-axis DFT index, in `[-n/2, n/2)`.
    pub fn mode(&self, k: usize) -> i64 {
        debug_assert!(k < self.n);
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Dual-lattice point (frequency ξ, in cycles per unit length) for a flat
    /// spectral index; the second entry is 0 in one dimension.
    pub fn frequency(&self, flat: usize) -> [f64; 2] {
        let idx = self.unravel(flat);
        let scale = 1.0 / self.side;
        [
            self.mode(idx[0]) as f64 * scale,
            if self.dim == 2 { self.mode(idx[1]) as f64 * scale } else { 0.0 },
        ]
    }

    /// Iterator over `(flat index, physical point)` pairs in storage order.
    pub fn points(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        (0..self.len()).map(move |flat| (flat, self.point(flat)))
    }

    /// Iterator over `(flat index, frequency)` pairs in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        (0..self.len()).map(move |flat| (flat, self.frequency(flat)))
    }

    /// True when `other` is the same lattice (used for shape checks).
    pub fn same_as(&self, other: &SpaceGrid) -> bool {
        self == other
    }
}

/// Uniform velocity grid on `[lo, hi]` with trapezoid quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    lo: f64,
    hi: f64,
    m: usize,
}

impl LambdaGrid {
    /// Creates a velocity grid with `m ≥ 2` nodes spanning `[lo, hi]`,
    /// endpoints included.
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::grid(format!(
                "velocity interval must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if m < 2 {
            return Err(Error::grid(format!("velocity grid needs at least 2 nodes, got {m}")));
        }
        Ok(Self { lo, hi, m })
    }

    /// Number of nodes.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Lower endpoint.
    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Upper endpoint.
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Node spacing Δλ.
    pub fn delta(&self) -> f64 {
        (self.hi - self.lo) / (self.m - 1) as f64
    }

    /// `k`-th node, `λ_k = lo + k·Δλ`.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k < self.m);
        self.lo + k as f64 * self.delta()
    }

    /// Iterator over the nodes in order.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |k| self.node(k))
    }

    /// Trapezoid weight of node `k` (half weight at the two endpoints).
    pub fn weight(&self, k: usize) -> f64 {
        debug_assert!(k < self.m);
        if k == 0 || k == self.m - 1 {
            0.5 * self.delta()
        } else {
            self.delta()
        }
    }

    /// Iterator over the trapezoid weights; they sum to `hi - lo`.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |k| self.weight(k))
    }

    /// Trapezoid quadrature of nodal values.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.m {
            return Err(Error::shape(format!(
                "expected {} nodal values, got {}",
                self.m,
                values.len()
            )));
        }
        Ok(values
            .iter()
            .zip(self.weights())
            .map(|(v, w)| v * w)
            .sum())
    }

    /// Trapezoid quadrature of a function sampled at the nodes.
    pub fn quadrature(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes().zip(self.weights()).map(|(l, w)| f(l) * w).sum()
    }

    /// Quadrature weights for integrating a nodal function over the
    /// subinterval `[a, b] ∩ [lo, hi]` using the piecewise-linear interpolant.
    ///
    /// When `a` and `b` coincide with nodes this reduces to the trapezoid rule
    /// on the node subrange; otherwise the two partial cells contribute the
    /// exact integral of the linear interpolant over the clipped pieces.
    pub fn clipped_weights(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::domain(format!("need a < b for clipped weights, got [{a}, {b}]")));
        }
        let lo = a.max(self.lo);
        let hi = b.min(self.hi);
        let mut w = vec![0.0; self.m];
        if hi <= lo {
            return Ok(w);
        }
        let d = self.delta();
        // Walk every cell [λ_k, λ_{k+1}], clip it to [lo, hi], and add the
        // integral of the linear interpolant over the clipped piece. With
        // s, t ∈ [0, 1] the local coordinates of the clip, the piece integral
        // is d·∫_s^t ((1-σ)v_k + σv_{k+1}) dσ, i.e. weights
        // d·[(t-s) - (t²-s²)/2] and d·(t²-s²)/2.
        for k in 0..self.m - 1 {
            let left = self.node(k);
            let right = self.node(k + 1);
            let cl = lo.max(left);
            let ch = hi.min(right);
            if ch <= cl {
                continue;
            }
            let s = (cl - left) / d;
            let t = (ch - left) / d;
            let half_sq = 0.5 * (t * t - s * s);
            w[k] += d * ((t - s) - half_sq);
            w[k + 1] += d * half_sq;
        }
        Ok(w)
    }

    /// Index of the node closest to `λ`, clamped to the grid.
    pub fn nearest_node(&self, lambda: f64) -> usize {
        let raw = ((lambda - self.lo) / self.delta()).round();
        (raw.max(0.0) as usize).min(self.m - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(SpaceGrid::new(0, 64, 1.0).is_err());
        assert!(SpaceGrid::new(3, 64, 1.0).is_err());
        assert!(SpaceGrid::new(1, 6, 1.0).is_err());
        assert!(SpaceGrid::new(1, 48, 1.0).is_err());
        assert!(SpaceGrid::new(1, 64, 0.0).is_err());
        assert!(SpaceGrid::new(2, 64, -1.0).is_err());
        assert!(SpaceGrid::new(2, 64, f64::NAN).is_err());
        assert!(SpaceGrid::new(2, 256, 2.0).is_ok());
    }

    #[test]
    fn mode_layout_matches_half_spectrum_convention() {
        let g = SpaceGrid::new(1, 8, 2.0).unwrap();
        let modes: Vec<i64> = (0..8).map(|k| g.mode(k)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        // ξ = m / L.
        assert_relative_eq!(g.frequency(3)[0], 1.5);
        assert_relative_eq!(g.frequency(4)[0], -2.0);
    }

    #[test]
    fn two_dimensional_indexing_is_row_major() {
        let g = SpaceGrid::new(2, 8, 1.0).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.ravel([3, 5]), 29);
        assert_eq!(g.unravel(29), [3, 5]);
        let p = g.point(29);
        assert_relative_eq!(p[0], 3.0 / 8.0);
        assert_relative_eq!(p[1], 5.0 / 8.0);
    }

    #[test]
    fn lambda_weights_sum_to_interval_length() {
        for m in [2, 3, 33, 129, 1025] {
            let g = LambdaGrid::new(-1.5, 2.5, m).unwrap();
            let total: f64 = g.weights().sum();
            assert!(
                (total - 4.0).abs() <= crate::tol::QUADRATURE_WEIGHT_SUM_ABS,
                "m={m}: weight sum {total}"
            );
        }
    }

    #[test]
    fn lambda_grid_rejects_degenerate_intervals() {
        assert!(LambdaGrid::new(0.0, 0.0, 9).is_err());
        assert!(LambdaGrid::new(1.0, -1.0, 9).is_err());
        assert!(LambdaGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn trapezoid_is_exact_on_affine_functions() {
        let g = LambdaGrid::new(0.0, 2.0, 17).unwrap();
        let integral = g.quadrature(|l| 3.0 * l - 1.0);
        // ∫_0^2 (3λ - 1) dλ = 6 - 2 = 4.
        assert_relative_eq!(integral, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn clipped_weights_match_full_weights_on_node_subranges() {
        let g = LambdaGrid::new(0.0, 1.0, 9).unwrap();
        // [0.25, 0.75] spans nodes 2..=6 exactly.
        let w = g.clipped_weights(0.25, 0.75).unwrap();
        let sub = LambdaGrid::new(0.25, 0.75, 5).unwrap();
        for (k, wk) in w.iter().enumerate() {
            let expected = if (2..=6).contains(&k) { sub.weight(k - 2) } else { 0.0 };
            assert_relative_eq!(*wk, expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn clipped_weights_integrate_linear_functions_exactly() {
        let g = LambdaGrid::new(0.0, 1.0, 33).unwrap();
        let (a, b) = (0.1234, 0.8191); // deliberately off the lattice
        let w = g.clipped_weights(a, b).unwrap();
        let vals: Vec<f64> = g.nodes().map(|l| 2.0 * l + 0.5).collect();
        let discrete: f64 = w.iter().zip(&vals).map(|(w, v)| w * v).sum();
        let exact = (b * b - a * a) + 0.5 * (b - a);
        assert_relative_eq!(discrete, exact, max_relative = 1e-13);
    }

    #[test]
    fn nearest_node_clamps_to_range() {
        let g = LambdaGrid::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.nearest_node(-3.0), 0);
        assert_eq!(g.nearest_node(0.3), 1);
        assert_eq!(g.nearest_node(7.0), 4);
    }
}
