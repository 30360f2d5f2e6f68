//! Large-|ξ| continuity moduli of projected symbols.
//!
//! Compactness arguments need symbols that become uniformly continuous at
//! infinity: `ω(R) = sup_{|ξ| = R, |h| ≤ 1} |ψ(ξ + h) - ψ(ξ)| → 0` as
//! `R → ∞`. For maps factoring through the adaptive projection this holds
//! whenever the diffusion part is continuous, but the *rate* degrades near
//! degenerate directions: for `a = diag(0, 1)` the modulus decays like
//! `R^{-1/2}` (not `R^{-1}`), with the extremal ξ at angle `~R^{-1/2}` off
//! the degenerate axis. Sampling therefore needs enough directions per circle
//! to resolve that angular boundary layer.

use crate::error::{Error, Result};

/// Evaluates the continuity modulus of a vector-valued symbol at radius `R`:
/// the maximum over sampled base points on the circle `|ξ| = R` and sampled
/// perturbations `|h| ≤ 1` of the Euclidean distance
/// `|map(ξ + h) - map(ξ)|`.
///
/// `R ≥ 2` is required so every perturbed point stays away from the origin.
/// `angles` base directions are sampled uniformly; perturbations use 16
/// directions at magnitudes {1/4, 1/2, 1}.
pub fn continuity_modulus(
    map: &dyn Fn([f64; 2]) -> Vec<f64>,
    radius: f64,
    angles: usize,
) -> Result<f64> {
    if !(radius >= 2.0) {
        return Err(Error::domain(format!(
            "continuity modulus needs radius >= 2 (perturbed points must avoid 0), got {radius}"
        )));
    }
    if angles == 0 {
        return Err(Error::domain("need at least one base direction".to_string()));
    }
    const H_DIRECTIONS: usize = 16;
    const H_MAGNITUDES: [f64; 3] = [0.25, 0.5, 1.0];
    let mut worst = 0.0f64;
    for a in 0..angles {
        let th = 2.0 * std::f64::consts::PI * a as f64 / angles as f64;
        let xi = [radius * th.cos(), radius * th.sin()];
        let base = map(xi);
        for hd in 0..H_DIRECTIONS {
            let ph = 2.0 * std::f64::consts::PI * hd as f64 / H_DIRECTIONS as f64;
            for &mag in &H_MAGNITUDES {
                let shifted = [xi[0] + mag * ph.cos(), xi[1] + mag * ph.sin()];
                let moved = map(shifted);
                let dist: f64 = base
                    .iter()
                    .zip(&moved)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum::<f64>()
                    .sqrt();
                if dist > worst {
                    worst = dist;
                }
            }
        }
    }
    Ok(worst)
}

/// Modulus ladder over a list of radii, with the least-squares slope of
/// `log₂ ω` against `log₂ R`.
#[derive(Debug, Clone)]
pub struct ModulusLadder {
    /// Radii in the order given.
    pub radii: Vec<f64>,
    /// Modulus at each radius.
    pub values: Vec<f64>,
    /// Least-squares slope of log₂(value) vs log₂(radius).
    pub log2_slope: f64,
}

/// Runs [`continuity_modulus`] over a radius ladder and fits the decay rate.
pub fn modulus_ladder(
    map: &dyn Fn([f64; 2]) -> Vec<f64>,
    radii: &[f64],
    angles: usize,
) -> Result<ModulusLadder> {
    if radii.len() < 2 {
        return Err(Error::domain("modulus ladder needs at least two radii".to_string()));
    }
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| continuity_modulus(map, r, angles))
        .collect::<Result<_>>()?;
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::domain(
            "modulus vanished at some radius; slope of log values is undefined".to_string(),
        ));
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.log2()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let log2_slope = least_squares_slope(&xs, &ys);
    Ok(ModulusLadder { radii: radii.to_vec(), values, log2_slope })
}

/// Slope of the least-squares line through (x, y) pairs.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{project, DiffusionFamily, SymMatrix};

    fn projection_map(a: SymMatrix) -> impl Fn([f64; 2]) -> Vec<f64> {
        move |xi| {
            let p = project(&a, xi).expect("samples stay away from 0");
            vec![p[0], p[1]]
        }
    }

    #[test]
    fn pure_transport_projection_has_modulus_of_order_one_over_r() {
        // a = 0: π(ξ) = ξ/|ξ|; |π(ξ+h) - π(ξ)| ≈ |h|/R.
        let map = projection_map(SymMatrix::zero(2));
        let m8 = continuity_modulus(&map, 8.0, 64).unwrap();
        let m64 = continuity_modulus(&map, 64.0, 64).unwrap();
        assert!(m8 < 2.0 / 8.0 + 0.05, "m8 = {m8}");
        assert!(m64 < m8, "modulus should shrink with radius");
        // Roughly degree -1 decay.
        assert!((m8 / m64) > 6.0, "ratio {}", m8 / m64);
    }

    #[test]
    fn half_degenerate_diffusion_slows_the_decay_to_sqrt() {
        // a = diag(0, 1): the circle direction near the degenerate axis sees
        // the denominator switch from |ξ| to ⟨aξ|ξ⟩ at angle ~ R^{-1/2}.
        let a = SymMatrix::diagonal(0.0, 1.0);
        let map = projection_map(a);
        let radii: Vec<f64> = (3..=8).map(|k| 2.0f64.powi(k)).collect();
        let ladder = modulus_ladder(&map, &radii, 512).unwrap();
        for w in ladder.values.windows(2) {
            assert!(w[1] <= w[0] * 1.05, "ladder not decaying: {:?}", ladder.values);
        }
        assert!(
            ladder.log2_slope <= crate::tol::MODULUS_SLOPE_MAX,
            "slope {} too shallow",
            ladder.log2_slope
        );
        assert!(ladder.log2_slope > -0.8, "slope {} suspiciously steep", ladder.log2_slope);
    }

    #[test]
    fn modulus_rejects_small_radii_and_degenerate_ladders() {
        let map = projection_map(SymMatrix::identity(2));
        assert!(continuity_modulus(&map, 1.5, 8).is_err());
        assert!(continuity_modulus(&map, 2.0, 0).is_err());
        assert!(modulus_ladder(&map, &[4.0], 8).is_err());
    }

    #[test]
    fn slope_fit_recovers_exact_power_laws() {
        let xs: Vec<f64> = (0..6).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 3.0).collect();
        assert!((least_squares_slope(&xs, &ys) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rank_one_family_projection_is_continuous_at_infinity() {
        // λ-dependent degenerate direction; modulus still decays.
        let fam = DiffusionFamily::rank_one_shear();
        let map = projection_map(fam.value(0.7));
        let m8 = continuity_modulus(&map, 8.0, 256).unwrap();
        let m128 = continuity_modulus(&map, 128.0, 256).unwrap();
        assert!(m128 < m8);
    }
}
