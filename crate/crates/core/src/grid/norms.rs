//! Grid norms and localised distances.

use super::field::{KineticField, ScalarField};
use crate::error::{Error, Result};

impl ScalarField {
    /// Quadrature `L^p` norm over the torus: `(h^d Σ |u_i|^p)^{1/p}`.
    ///
    /// `p = f64::INFINITY` gives the max norm. `p < 1` is rejected: the
    /// expression is no longer a norm there.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::domain(format!("L^p norm needs p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.data().iter().fold(0.0f64, |a, &v| a.max(v.abs())));
        }
        let vol = self.grid().cell_volume();
        if p == 2.0 {
            // Common case, avoids powf.
            let sum: f64 = self.data().iter().map(|v| v * v).sum();
            return Ok((sum * vol).sqrt());
        }
        if p == 1.0 {
            let sum: f64 = self.data().iter().map(|v| v.abs()).sum();
            return Ok(sum * vol);
        }
        let sum: f64 = self.data().iter().map(|v| v.abs().powf(p)).sum();
        Ok((sum * vol).powf(1.0 / p))
    }

    /// `L²` norm (the workhorse case, infallible).
    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0).expect("p = 2 is always valid")
    }
}

impl super::ComplexField {
    /// Quadrature `L²` norm of a complex field.
    pub fn l2_norm(&self) -> f64 {
        let vol = self.grid().cell_volume();
        let sum: f64 = self.data().iter().map(|z| z.norm_sqr()).sum();
        (sum * vol).sqrt()
    }
}

impl KineticField {
    /// Pointwise velocity norm `x ↦ (∫ |w(x,λ)|² dλ)^{1/2}` (trapezoid in λ).
    pub fn pointwise_lambda_l2(&self) -> ScalarField {
        let grid = *self.grid();
        let mut acc = vec![0.0; grid.len()];
        for (k, w) in self.lambda().weights().enumerate() {
            for (a, v) in acc.iter_mut().zip(self.slab(k)) {
                *a += w * v * v;
            }
        }
        for a in &mut acc {
            *a = a.sqrt();
        }
        ScalarField::from_data(grid, acc).expect("length matches grid")
    }

    /// Mixed norm `‖ (∫ |w(·,λ)|² dλ)^{1/2} ‖_{L^q_x}`.
    pub fn lq_x_l2_lambda(&self, q: f64) -> Result<f64> {
        self.pointwise_lambda_l2().lp_norm(q)
    }

    /// Full product-space `L²` norm, `(∬ |w|² dλ dx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let vol = self.grid().cell_volume();
        let mut total = 0.0;
        for (k, w) in self.lambda().weights().enumerate() {
            let slab_sq: f64 = self.slab(k).iter().map(|v| v * v).sum();
            total += w * slab_sq * vol;
        }
        total.sqrt()
    }
}

/// Axis-aligned box used to localise distances; cells whose centres lie in
/// the half-open box `[lo, hi)` contribute.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    /// Lower corner (second entry ignored in one dimension).
    pub lo: [f64; 2],
    /// Upper corner (second entry ignored in one dimension).
    pub hi: [f64; 2],
}

impl Window {
    /// Window covering the whole torus of the given grid.
    pub fn full(grid: &super::SpaceGrid) -> Self {
        Window { lo: [0.0, 0.0], hi: [grid.side(), grid.side()] }
    }

    fn contains(&self, dim: usize, x: [f64; 2]) -> bool {
        (0..dim).all(|j| self.lo[j] <= x[j] && x[j] < self.hi[j])
    }
}

/// Localised `L¹` distance: `∫_W |a - b| dx`, with the integral restricted to
/// lattice cells whose sample point lies in the window.
pub fn l1_local_distance(a: &ScalarField, b: &ScalarField, window: &Window) -> Result<f64> {
    a.check_same_grid(b)?;
    let grid = a.grid();
    let vol = grid.cell_volume();
    let mut total = 0.0;
    for (flat, x) in grid.points() {
        if window.contains(grid.dim(), x) {
            total += (a.data()[flat] - b.data()[flat]).abs();
        }
    }
    Ok(total * vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{LambdaGrid, SpaceGrid};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lp_rejects_sub_unit_exponents() {
        let g = SpaceGrid::new(1, 16, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0]);
        assert!(f.lp_norm(0.5).is_err());
        assert!(f.lp_norm(f64::NAN).is_err());
        assert!(f.lp_norm(1.0).is_ok());
        assert!(f.lp_norm(f64::INFINITY).is_ok());
    }

    #[test]
    fn norms_of_constant_fields_are_exact() {
        let g = SpaceGrid::new(2, 16, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |_| -3.0);
        // ‖c‖_p = |c| · L^{d/p}; L² over [0,2)²: 3·(4)^{1/2} = 6.
        assert_relative_eq!(f.lp_norm(2.0).unwrap(), 6.0, max_relative = 1e-14);
        assert_relative_eq!(f.lp_norm(1.0).unwrap(), 12.0, max_relative = 1e-14);
        assert_relative_eq!(f.lp_norm(f64::INFINITY).unwrap(), 3.0);
        assert_relative_eq!(f.lp_norm(4.0).unwrap(), 3.0 * 4.0f64.powf(0.25), max_relative = 1e-14);
    }

    #[test]
    fn kinetic_l2_matches_iterated_quadrature() {
        let g = SpaceGrid::new(1, 32, 1.0).unwrap();
        let l = LambdaGrid::new(0.0, 1.0, 17).unwrap();
        let w = KineticField::from_fn(g, l.clone(), |x, lam| x[0] + lam);
        let pointwise = w.pointwise_lambda_l2();
        let expected0 = l.quadrature(|lam| lam * lam).sqrt();
        assert_relative_eq!(pointwise.data()[0], expected0, max_relative = 1e-13);
        let full = w.l2_norm();
        let via_pointwise = pointwise.lp_norm(2.0).unwrap();
        assert_relative_eq!(full, via_pointwise, max_relative = 1e-13);
    }

    #[test]
    fn local_l1_distance_counts_only_the_window() {
        let g = SpaceGrid::new(1, 16, 1.0).unwrap();
        let a = ScalarField::from_fn(g, |_| 1.0);
        let b = ScalarField::zeros(g);
        let w = Window { lo: [0.25, 0.0], hi: [0.5, 0.0] };
        // Cells with centres... sample points x = k/16 in [0.25, 0.5): k = 4..7, 4 cells.
        let d = l1_local_distance(&a, &b, &w).unwrap();
        assert_relative_eq!(d, 4.0 / 16.0, max_relative = 1e-14);
        let full = l1_local_distance(&a, &b, &Window::full(&g)).unwrap();
        assert_relative_eq!(full, 1.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn triangle_inequality_and_homogeneity(
            seed in 0u64..1000,
            p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]),
            c in -4.0f64..4.0,
        ) {
            use rand::{Rng, SeedableRng};
            let g = SpaceGrid::new(1, 32, 1.0).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut sample = || {
                ScalarField::from_data(
                    g,
                    (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                ).unwrap()
            };
            let a = sample();
            let b = sample();
            let sum = a.zip_with(&b, |x, y| x + y).unwrap();
            let na = a.lp_norm(p).unwrap();
            let nb = b.lp_norm(p).unwrap();
            let ns = sum.lp_norm(p).unwrap();
            prop_assert!(ns <= na + nb + 1e-12);
            let scaled = a.map(|v| c * v);
            prop_assert!((scaled.lp_norm(p).unwrap() - c.abs() * na).abs() <= 1e-12 * (1.0 + na));
        }
    }
}
