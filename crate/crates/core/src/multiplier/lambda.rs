//! Velocity derivatives of symbols.
//!
//! Two distinct mechanisms live here:
//!
//! * a **grid differencer** for arbitrary λ-dependent symbols sampled on a
//!   velocity grid (central differences inside, one-sided at the ends), and
//! * the **exact rate of the elliptic inverse**, `∂_λ[1/D]` with
//!   `D(ξ,λ) = |ξ| + ⟨a(λ)ξ|ξ⟩`, computed by two independent routes:
//!   directly from the matrix derivative `a′` as `-⟨a′ξ|ξ⟩/D²`, and through
//!   square-root factors `a = σᵀσ` as `-2⟨σξ|σ′ξ⟩/D²` with `σ′` obtained by
//!   central differences of the factor itself. The factor route is what
//!   makes the weighted rate `|2πξ_k|^{1/2}·∂_λ[1/D]` bounded whenever `σ′`
//!   is bounded: by Cauchy–Schwarz it is at most `2√(2π)·‖σ′‖`, uniformly
//!   in λ, while matrix families whose factors have unbounded slope (an
//!   isotropic ramp near its onset) blow up.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{LambdaGrid, SpaceGrid};
use crate::symbol::{elliptic_denominator, DiffusionFamily, Mat2};

use super::MultiplierPlan;

/// Step of the central difference used for factor rates `σ′`.
///
/// Truncation is `O(step²·|σ‴|)`; for the smooth factor families exercised
/// here that sits near `1e-9`, comfortably inside
/// [`crate::tol::LAMBDA_DERIV_SIGMA_FORM_ABS`], while round-off
/// (`≈ ε/step ≈ 1e-12`) stays negligible.
pub const SIGMA_FD_STEP: f64 = 1e-4;

/// Finite-difference λ-derivative of a symbol family sampled on a velocity
/// grid: central differences at interior nodes, one-sided at the two ends.
pub struct LambdaDerivedSymbol<F> {
    lambda: LambdaGrid,
    inner: F,
}

impl<F: Fn([f64; 2], f64) -> Complex64> LambdaDerivedSymbol<F> {
    /// Wraps the symbol family `inner(ξ, λ)` over the given velocity grid.
    pub fn new(lambda: LambdaGrid, inner: F) -> Self {
        Self { lambda, inner }
    }

    /// The velocity grid the differences are taken on.
    pub fn lambda(&self) -> &LambdaGrid {
        &self.lambda
    }

    /// True at the two boundary nodes, where only a first-order one-sided
    /// difference is available.
    pub fn uses_one_sided(&self, k: usize) -> bool {
        k == 0 || k + 1 == self.lambda.m()
    }

    /// Difference-quotient derivative at velocity node `k`.
    pub fn eval_node(&self, xi: [f64; 2], k: usize) -> Result<Complex64> {
        let m = self.lambda.m();
        if k >= m {
            return Err(Error::domain(format!("velocity node {k} out of range (m = {m})")));
        }
        let node = |j: usize| (self.inner)(xi, self.lambda.node(j));
        let dl = self.lambda.delta();
        let value = if k == 0 {
            (node(1) - node(0)) / dl
        } else if k + 1 == m {
            (node(m - 1) - node(m - 2)) / dl
        } else {
            (node(k + 1) - node(k - 1)) / (2.0 * dl)
        };
        Ok(value)
    }

    /// Difference-quotient derivative at the grid node nearest to `l`.
    pub fn eval(&self, xi: [f64; 2], l: f64) -> Result<Complex64> {
        self.eval_node(xi, self.lambda.nearest_node(l))
    }
}

/// `∂_λ[1/D](ξ, λ) = -⟨a′(λ)ξ|ξ⟩ / D(ξ, λ)²`, straight from the family's
/// exact matrix derivative.
pub fn elliptic_inverse_rate(family: &DiffusionFamily, l: f64, xi: [f64; 2]) -> f64 {
    let a = family.value(l);
    let ap = family.derivative(l);
    let d = elliptic_denominator(&a, xi);
    -ap.quadratic(xi) / (d * d)
}

/// Central-difference rate `σ′(λ) ≈ (σ(λ+δ) - σ(λ-δ)) / 2δ` of the
/// square-root factor, together with the factor itself.
pub fn sigma_with_rate(family: &DiffusionFamily, l: f64, step: f64) -> Result<(Mat2, Mat2)> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::domain(format!("factor-difference step must be positive, got {step}")));
    }
    let sigma = family.value(l).sigma_factor()?;
    let hi = family.value(l + step).sigma_factor()?;
    let lo = family.value(l - step).sigma_factor()?;
    let rate = Mat2::linear_combination(0.5 / step, &hi, -0.5 / step, &lo)?;
    Ok((sigma, rate))
}

/// `∂_λ[1/D]` through the factor route, `-2⟨σξ|σ′ξ⟩/D²`, with `σ′` from
/// [`sigma_with_rate`]. Agrees with [`elliptic_inverse_rate`] up to the
/// difference truncation whenever the factor is smooth in λ.
pub fn elliptic_inverse_rate_sigma(
    family: &DiffusionFamily,
    l: f64,
    step: f64,
    xi: [f64; 2],
) -> Result<f64> {
    let (sigma, rate) = sigma_with_rate(family, l, step)?;
    let a = family.value(l);
    let d = elliptic_denominator(&a, xi);
    let sx = sigma.mul_vec(xi);
    let rx = rate.mul_vec(xi);
    Ok(-2.0 * (sx[0] * rx[0] + sx[1] * rx[1]) / (d * d))
}

/// Multiplier plan for the exact rate `∂_λ[1/D]` (zero mode 0).
pub fn elliptic_inverse_rate_plan(
    grid: &SpaceGrid,
    family: &DiffusionFamily,
    l: f64,
) -> Result<MultiplierPlan> {
    let a = family.value(l);
    let ap = family.derivative(l);
    MultiplierPlan::with_zero_mode(
        grid,
        |xi| {
            let d = elliptic_denominator(&a, xi);
            Complex64::new(-ap.quadratic(xi) / (d * d), 0.0)
        },
        Complex64::ZERO,
    )
}

/// Multiplier plan for the factor-route rate (zero mode 0).
pub fn elliptic_inverse_rate_sigma_plan(
    grid: &SpaceGrid,
    family: &DiffusionFamily,
    l: f64,
    step: f64,
) -> Result<MultiplierPlan> {
    let (sigma, rate) = sigma_with_rate(family, l, step)?;
    let a = family.value(l);
    MultiplierPlan::with_zero_mode(
        grid,
        |xi| {
            let d = elliptic_denominator(&a, xi);
            let sx = sigma.mul_vec(xi);
            let rx = rate.mul_vec(xi);
            Complex64::new(-2.0 * (sx[0] * rx[0] + sx[1] * rx[1]) / (d * d), 0.0)
        },
        Complex64::ZERO,
    )
}

/// Lattice supremum of the half-derivative-weighted rate,
/// `sup_{ξ≠0} |2πξ_axis|^{1/2} · |∂_λ[1/D](ξ, λ)|`, computed through the
/// factor route. For factors with bounded slope this stays below
/// `2√(2π)·‖σ′‖` whatever λ is; a factor with unbounded slope makes it grow
/// without bound as λ approaches the rough point.
pub fn smoothing_symbol_sup(
    grid: &SpaceGrid,
    family: &DiffusionFamily,
    l: f64,
    axis: usize,
    step: f64,
) -> Result<f64> {
    if axis >= grid.dim() {
        return Err(Error::domain(format!(
            "axis {axis} out of range for a {}-dimensional grid",
            grid.dim()
        )));
    }
    let (sigma, rate) = sigma_with_rate(family, l, step)?;
    let a = family.value(l);
    let mut sup = 0.0f64;
    for (flat, xi) in grid.frequencies() {
        if flat == 0 {
            continue;
        }
        let d = elliptic_denominator(&a, xi);
        let sx = sigma.mul_vec(xi);
        let rx = rate.mul_vec(xi);
        let rate_value = 2.0 * (sx[0] * rx[0] + sx[1] * rx[1]).abs() / (d * d);
        let weight = (2.0 * std::f64::consts::PI * xi[axis].abs()).sqrt();
        sup = sup.max(weight * rate_value);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;
    use std::f64::consts::PI;

    #[test]
    fn grid_differencer_recovers_smooth_velocity_profiles() {
        let lambda = LambdaGrid::new(-1.0, 1.0, 21).unwrap();
        let sym = LambdaDerivedSymbol::new(lambda.clone(), |xi: [f64; 2], l: f64| {
            Complex64::new(0.0, l).exp() / (1.0 + xi[0] * xi[0] + xi[1] * xi[1])
        });
        let xi = [1.5, -0.5];
        let weight = 1.0 / (1.0 + xi[0] * xi[0] + xi[1] * xi[1]);
        // Central truncation Δ²|ψ‴|/6 ≈ 1.7e-3·|ψ| with Δ = 0.1; one-sided
        // truncation Δ|ψ″|/2 = 5e-2·|ψ|.
        for k in 0..lambda.m() {
            let got = sym.eval_node(xi, k).unwrap();
            let l = lambda.node(k);
            let exact = Complex64::new(0.0, 1.0) * Complex64::new(0.0, l).exp() * weight;
            let tol = if sym.uses_one_sided(k) { 6e-2 } else { 2e-3 };
            assert!((got - exact).norm() < tol * weight, "node {k}: {got} vs {exact}");
        }
        assert!(sym.uses_one_sided(0) && sym.uses_one_sided(20) && !sym.uses_one_sided(10));
        // Nearest-node evaluation picks the right node.
        let via_value = sym.eval(xi, lambda.node(7) + 0.03).unwrap();
        assert_eq!(via_value, sym.eval_node(xi, 7).unwrap());
        assert!(sym.eval_node(xi, 21).is_err());
    }

    #[test]
    fn factor_route_matches_the_exact_rate_for_smooth_families() {
        let grid = SpaceGrid::new(2, 16, 1.0).unwrap();
        let cases: Vec<(DiffusionFamily, Vec<f64>)> = vec![
            (DiffusionFamily::rank_one_shear(), vec![-0.8, 0.3, 1.2]),
            (DiffusionFamily::axis_degenerate_abs(), vec![1.0]),
            (DiffusionFamily::isotropic_ramp(2), vec![1.0]),
        ];
        for (family, lambdas) in cases {
            for l in lambdas {
                for (flat, xi) in grid.frequencies() {
                    if flat == 0 {
                        continue;
                    }
                    let direct = elliptic_inverse_rate(&family, l, xi);
                    let factored =
                        elliptic_inverse_rate_sigma(&family, l, SIGMA_FD_STEP, xi).unwrap();
                    assert!(
                        (direct - factored).abs() <= tol::LAMBDA_DERIV_SIGMA_FORM_ABS,
                        "{} at λ={l}, ξ={xi:?}: {direct} vs {factored}",
                        family.label()
                    );
                }
            }
        }
    }

    #[test]
    fn rate_plans_agree_between_routes() {
        let grid = SpaceGrid::new(2, 16, 1.0).unwrap();
        let family = DiffusionFamily::rank_one_shear();
        let direct = elliptic_inverse_rate_plan(&grid, &family, 0.6).unwrap();
        let factored =
            elliptic_inverse_rate_sigma_plan(&grid, &family, 0.6, SIGMA_FD_STEP).unwrap();
        let worst = direct
            .symbol_values()
            .iter()
            .zip(factored.symbol_values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        // The shear family's factor is linear in λ, so the central difference
        // is exact up to round-off.
        assert!(worst < 1e-10, "plans differ by {worst}");
    }

    #[test]
    fn weighted_rate_is_bounded_for_linear_factors() {
        // Cauchy–Schwarz through the factor route gives
        // |2πξ_k|^{1/2}·|∂_λ(1/D)| ≤ 2√(2π)·‖σ′‖ for D ≥ |ξ|; the shear
        // family has ‖σ′‖ = 1 at every λ, so the lattice sup must respect
        // the bound at rough and tame velocities alike.
        let grid = SpaceGrid::new(2, 128, 1.0).unwrap();
        let family = DiffusionFamily::rank_one_shear();
        let bound = 2.0 * (2.0 * PI).sqrt() * (1.0 + 1e-9);
        for l in [1e-4, 0.5, 1.0] {
            for axis in 0..2 {
                let sup = smoothing_symbol_sup(&grid, &family, l, axis, SIGMA_FD_STEP).unwrap();
                assert!(sup <= bound, "λ={l}, axis {axis}: sup {sup} exceeds {bound}");
                assert!(sup > 0.1, "λ={l}, axis {axis}: sup {sup} suspiciously small");
            }
        }
    }

    #[test]
    fn weighted_rate_blows_up_when_the_factor_slope_is_unbounded() {
        // The isotropic ramp has factor √λ·I whose slope diverges at the
        // onset; the weighted rate must grow by an order of magnitude
        // between λ = 1 and λ = 1e-4 on the same lattice.
        let grid = SpaceGrid::new(2, 128, 1.0).unwrap();
        let family = DiffusionFamily::isotropic_ramp(2);
        let tame = smoothing_symbol_sup(&grid, &family, 1.0, 0, SIGMA_FD_STEP).unwrap();
        let rough = smoothing_symbol_sup(&grid, &family, 1e-4, 0, SIGMA_FD_STEP).unwrap();
        assert!(
            rough >= 10.0 * tame,
            "expected blow-up: sup(1e-4) = {rough} vs sup(1) = {tame}"
        );
    }

    #[test]
    fn factor_differences_reject_bad_steps() {
        let family = DiffusionFamily::rank_one_shear();
        assert!(sigma_with_rate(&family, 0.5, 0.0).is_err());
        assert!(sigma_with_rate(&family, 0.5, f64::NAN).is_err());
    }
}
