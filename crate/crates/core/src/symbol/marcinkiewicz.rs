//! Dyadic derivative certificates for Fourier multiplier symbols.
//!
//! A bounded symbol ψ whose scaled derivatives `|ξ^α ∂^α ψ(ξ)|` stay below a
//! constant `C` for all multi-indices `|α| ≤ d` is an `L^p` multiplier for
//! every `1 < p < ∞`, with operator norm at most `C_{d,p} · C` — crucially,
//! the certificate constant is what carries parameter (κ) uniformity through
//! every compactness argument downstream. This module estimates `C` on a
//! dyadic-annulus sample set, using central finite differences with a
//! per-octave step, and cross-checks against the exact derivative recursion
//! for the elliptic quotient symbols.

use crate::error::{Error, Result};

use super::norm;
use super::recursion::{DerivativeRecursion, QuotientKind};

/// Sample set of dyadic annuli: radii `scale · 2^k` for `k = lo_exp..=hi_exp`,
/// with uniformly spaced directions on each annulus.
#[derive(Debug, Clone)]
pub struct DyadicSampler {
    dim: usize,
    radii: Vec<f64>,
    angles: usize,
}

impl DyadicSampler {
    /// Creates the sampler. `scale` shifts the whole dyadic window (pass 1
    /// for the standard window `[2^lo, 2^hi]`); `angles` is the number of
    /// directions per annulus (ignored in one dimension, where the two
    /// directions are ±1).
    pub fn new(dim: usize, lo_exp: i32, hi_exp: i32, angles: usize, scale: f64) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::domain(format!("dimension {dim} not in 1..=2")));
        }
        if lo_exp > hi_exp {
            return Err(Error::domain(format!(
                "empty dyadic window: lo exponent {lo_exp} > hi exponent {hi_exp}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("dyadic window scale must be positive, got {scale}")));
        }
        if dim == 2 && angles == 0 {
            return Err(Error::domain("need at least one direction per annulus".to_string()));
        }
        let radii = (lo_exp..=hi_exp).map(|k| scale * 2.0f64.powi(k)).collect();
        Ok(Self { dim, radii, angles })
    }

    /// Sampled radii in increasing order.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// All sample points.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for &r in &self.radii {
            if self.dim == 1 {
                out.push([r, 0.0]);
                out.push([-r, 0.0]);
            } else {
                for a in 0..self.angles {
                    let th = 2.0 * std::f64::consts::PI * a as f64 / self.angles as f64;
                    out.push([r * th.cos(), r * th.sin()]);
                }
            }
        }
        out
    }
}

/// Multi-indices α with `|α| ≤ max_order` (second component 0 in 1-d),
/// ordered by total degree.
pub fn multi_indices(dim: usize, max_order: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        for a0 in (0..=total).rev() {
            let a1 = total - a0;
            if dim == 1 && a1 > 0 {
                continue;
            }
            out.push([a0, a1]);
        }
    }
    out
}

/// Central finite-difference derivative `∂^α ψ(ξ)` with step `h` on each
/// axis (first and second order per axis, plus the mixed cross stencil).
pub fn fd_derivative(
    symbol: &dyn Fn([f64; 2]) -> f64,
    xi: [f64; 2],
    alpha: [usize; 2],
    h: f64,
) -> Result<f64> {
    let shift = |dx: f64, dy: f64| [xi[0] + dx, xi[1] + dy];
    match alpha {
        [0, 0] => Ok(symbol(xi)),
        [1, 0] => Ok((symbol(shift(h, 0.0)) - symbol(shift(-h, 0.0))) / (2.0 * h)),
        [0, 1] => Ok((symbol(shift(0.0, h)) - symbol(shift(0.0, -h))) / (2.0 * h)),
        [2, 0] => {
            Ok((symbol(shift(h, 0.0)) - 2.0 * symbol(xi) + symbol(shift(-h, 0.0))) / (h * h))
        }
        [0, 2] => {
            Ok((symbol(shift(0.0, h)) - 2.0 * symbol(xi) + symbol(shift(0.0, -h))) / (h * h))
        }
        [1, 1] => Ok((symbol(shift(h, h)) - symbol(shift(h, -h)) - symbol(shift(-h, h))
            + symbol(shift(-h, -h)))
            / (4.0 * h * h)),
        _ => Err(Error::domain(format!(
            "finite differences implemented for |α| ≤ 2, got {alpha:?}"
        ))),
    }
}

/// Result of a derivative-certificate estimate.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// `max_α max_ξ |ξ^α ∂^α ψ(ξ)|` over the sample set.
    pub constant: f64,
    /// The maximum per multi-index, in [`multi_indices`] order.
    pub per_alpha: Vec<([usize; 2], f64)>,
    /// Number of sample points used.
    pub samples: usize,
}

/// Estimates the derivative-certificate constant
/// `C = sup |ξ^α ∂^α ψ|, |α| ≤ max_order` of an arbitrary symbol on a dyadic
/// sample set, using central differences with per-octave step `|ξ| · 1e-4`.
pub fn marcinkiewicz_constant(
    symbol: &dyn Fn([f64; 2]) -> f64,
    sampler: &DyadicSampler,
    max_order: usize,
) -> Result<CertificateReport> {
    if max_order > 2 {
        return Err(Error::domain(format!(
            "finite-difference certificates support |α| ≤ 2, requested {max_order}"
        )));
    }
    let alphas = multi_indices(sampler.dim, max_order);
    let points = sampler.points();
    let mut per_alpha: Vec<([usize; 2], f64)> = alphas.iter().map(|&a| (a, 0.0)).collect();
    for &xi in &points {
        let h = norm(xi) * 1e-4;
        for (slot, &alpha) in alphas.iter().enumerate() {
            let d = fd_derivative(symbol, xi, alpha, h)?;
            let weighted = xi_weight(xi, alpha) * d.abs();
            if weighted > per_alpha[slot].1 {
                per_alpha[slot].1 = weighted;
            }
        }
    }
    let constant = per_alpha.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(CertificateReport { constant, per_alpha, samples: points.len() })
}

fn xi_weight(xi: [f64; 2], alpha: [usize; 2]) -> f64 {
    xi[0].abs().powi(alpha[0] as i32) * xi[1].abs().powi(alpha[1] as i32)
}

/// One κ-point of a uniformity sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    /// Parameter pair (κ₁, κ₂).
    pub kappa: [f64; 2],
    /// Window scale used for this κ (the dyadic window is `[2^lo, 2^hi] / max(1, κ)`).
    pub window_scale: f64,
    /// Certificate constant from the exact derivative recursion.
    pub constant_recursion: f64,
    /// Certificate constant from finite differences.
    pub constant_fd: f64,
    /// Worst scale-weighted disagreement between the two derivative routes:
    /// `max |ξ^α(rec - fd)| / max(1, |ξ^α rec|)`.
    pub fd_discrepancy: f64,
}

/// Result of [`kappa_uniformity_sweep`].
#[derive(Debug, Clone)]
pub struct UniformitySweep {
    /// Per-κ results in input order.
    pub entries: Vec<SweepEntry>,
    /// Largest certificate constant (recursion route).
    pub max_constant: f64,
    /// Smallest nonzero certificate constant (recursion route).
    pub min_nonzero_constant: f64,
    /// `max_constant / min_nonzero_constant`; 1 when all constants vanish.
    pub ratio: f64,
}

/// Sweeps the κ-parameter grid for one quotient family and certifies that
/// the derivative constant is uniform in κ.
///
/// Because the quotient symbols obey the rescaling
/// `ψ_κ(ξ) = ψ_{tκ}(ξ/t)`, their scaled-derivative profile lives near
/// `|ξ| ~ 1/max κ`; a fixed dyadic window would sample pure tails for large
/// κ and report misleadingly small constants. Each κ therefore gets the
/// κ-adapted window `[2^lo, 2^hi] / max(1, κ₁, κ₂)`, which makes the
/// constants comparable across the sweep.
pub fn kappa_uniformity_sweep(
    kind_for: impl Fn([f64; 2]) -> QuotientKind,
    kappas: &[[f64; 2]],
    lo_exp: i32,
    hi_exp: i32,
    angles: usize,
    max_order: usize,
) -> Result<UniformitySweep> {
    if kappas.is_empty() {
        return Err(Error::domain("uniformity sweep needs at least one κ".to_string()));
    }
    let mut entries = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let kind = kind_for(kappa);
        let rec = DerivativeRecursion::new(2, kind, max_order)?;
        let window_scale = 1.0 / kappa[0].max(kappa[1]).max(1.0);
        let sampler = DyadicSampler::new(2, lo_exp, hi_exp, angles, window_scale)?;
        let alphas = multi_indices(2, max_order);
        let symbol = move |xi: [f64; 2]| {
            super::recursion::quotient_symbol_value(2, kind, kappa, xi)
                .expect("sample points avoid the origin")
        };
        let mut constant_recursion = 0.0f64;
        let mut constant_fd = 0.0f64;
        let mut fd_discrepancy = 0.0f64;
        for xi in sampler.points() {
            let h = norm(xi) * 1e-4;
            for &alpha in &alphas {
                let w = xi_weight(xi, alpha);
                let exact = rec.derivative(kappa, xi, alpha)?;
                let fd = fd_derivative(&symbol, xi, alpha, h)?;
                constant_recursion = constant_recursion.max((w * exact).abs());
                constant_fd = constant_fd.max((w * fd).abs());
                let diff = (w * (exact - fd)).abs() / (w * exact).abs().max(1.0);
                fd_discrepancy = fd_discrepancy.max(diff);
            }
        }
        entries.push(SweepEntry {
            kappa,
            window_scale,
            constant_recursion,
            constant_fd,
            fd_discrepancy,
        });
    }
    let max_constant =
        entries.iter().map(|e| e.constant_recursion).fold(0.0, f64::max);
    let min_nonzero_constant = entries
        .iter()
        .map(|e| e.constant_recursion)
        .filter(|&c| c > 0.0)
        .fold(f64::INFINITY, f64::min);
    let ratio = if min_nonzero_constant.is_finite() && min_nonzero_constant > 0.0 {
        max_constant / min_nonzero_constant
    } else {
        1.0
    };
    Ok(UniformitySweep { entries, max_constant, min_nonzero_constant, ratio })
}

/// The κ grid used by the standard uniformity experiment: all pairs from
/// `{0, 1, 10³, 10⁶}`.
pub fn standard_kappa_grid() -> Vec<[f64; 2]> {
    let axis = [0.0, 1.0, 1e3, 1e6];
    let mut out = Vec::with_capacity(16);
    for &k1 in &axis {
        for &k2 in &axis {
            out.push([k1, k2]);
        }
    }
    out
}

/// Picks the concentration axis for a κ pair: the axis with the larger κ
/// (first on ties), matching the strongest degenerate direction.
pub fn concentration_axis(kappa: [f64; 2]) -> usize {
    if kappa[1] > kappa[0] {
        1
    } else {
        0
    }
}
