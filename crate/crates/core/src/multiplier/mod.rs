//! Fourier multiplier operators on grid fields.
//!
//! A multiplier `A_ψ` acts by `(A_ψ u)^(ξ) = ψ(ξ) û(ξ)`. On the lattice this
//! is exact: transform, multiply by the symbol sampled on the dual lattice,
//! transform back. Derivatives become polynomial symbols
//! (`∂_{x_j} ↦ 2πiξ_j`), and the elliptic inverse `1/(|ξ| + ⟨a(λ)ξ|ξ⟩)` is
//! just another symbol (singular at 0, so its zero mode is prescribed —
//! conventionally 0, which projects out the mean).
//!
//! Kinetic (λ-dependent) symbols act slab-by-slab; slabs are independent, so
//! they evaluate in parallel with a deterministic (ordered) reassembly.
//!
//! **Nyquist caveat.** Symbols are sampled exactly per lattice mode. The
//! lattice involution pairs index `k` with `n-k`, which at the Nyquist line
//! `k = n/2` pairs `(-n/2, m)` with `(-n/2, -m)` rather than `(n/2, -m)`.
//! A symbol that is even in ξ but has cross terms (e.g. `⟨aξ|ξ⟩` with
//! off-diagonal `a`) therefore breaks Hermitian symmetry on Nyquist content,
//! and [`MultiplierPlan::apply`] reports the imaginary residue as an error
//! instead of silently truncating it. Dealias with [`low_pass_plan`] (or use
//! smooth fields whose Nyquist energy is negligible) before demanding real
//! output from such symbols.

pub mod lambda;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, KineticField, ScalarField, SpaceGrid, SpectralField};
use crate::symbol::{elliptic_denominator, project, SymMatrix};

/// A Fourier multiplier: the symbol sampled on the dual lattice of one grid.
#[derive(Debug, Clone)]
pub struct MultiplierPlan {
    grid: SpaceGrid,
    symbol: Vec<Complex64>,
}

impl MultiplierPlan {
    /// Samples `symbol` on the whole dual lattice (including ξ = 0).
    /// Fails if any sampled value is non-finite — symbols singular at the
    /// origin should use [`MultiplierPlan::with_zero_mode`].
    pub fn new(grid: &SpaceGrid, symbol: impl Fn([f64; 2]) -> Complex64) -> Result<Self> {
        Self::build(grid, symbol, None)
    }

    /// Samples `symbol` away from ξ = 0 and prescribes the zero-mode value
    /// (0 for the customary mean-projection convention).
    pub fn with_zero_mode(
        grid: &SpaceGrid,
        symbol: impl Fn([f64; 2]) -> Complex64,
        zero_mode: Complex64,
    ) -> Result<Self> {
        Self::build(grid, symbol, Some(zero_mode))
    }

    /// Wraps precomputed symbol values (row-major over DFT indices).
    pub fn from_values(grid: &SpaceGrid, symbol: Vec<Complex64>) -> Result<Self> {
        if symbol.len() != grid.len() {
            return Err(Error::shape(format!(
                "dual lattice has {} modes but got {} symbol values",
                grid.len(),
                symbol.len()
            )));
        }
        if let Some(bad) = symbol.iter().find(|z| !z.is_finite()) {
            return Err(Error::domain(format!("symbol value {bad} is not finite")));
        }
        Ok(Self { grid: *grid, symbol })
    }

    fn build(
        grid: &SpaceGrid,
        symbol: impl Fn([f64; 2]) -> Complex64,
        zero_mode: Option<Complex64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for (flat, xi) in grid.frequencies() {
            let v = if flat == 0 {
                match zero_mode {
                    Some(z) => z,
                    None => symbol(xi),
                }
            } else {
                symbol(xi)
            };
            if !v.is_finite() {
                return Err(Error::domain(format!(
                    "symbol is not finite at ξ = ({}, {}): {v}; prescribe a zero mode for \
                     singular symbols",
                    xi[0], xi[1]
                )));
            }
            values.push(v);
        }
        Ok(Self { grid: *grid, symbol: values })
    }

    /// The grid whose dual lattice this symbol is sampled on.
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// Sampled symbol values.
    pub fn symbol_values(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Largest |ψ(ξ)| over the lattice — an exact `L² → L²` operator norm on
    /// this grid.
    pub fn max_abs(&self) -> f64 {
        self.symbol.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Multiplies a spectrum by the symbol in place.
    pub fn apply_spectrum(&self, spec: &mut SpectralField) -> Result<()> {
        if !spec.grid().same_as(&self.grid) {
            return Err(Error::shape("spectrum lives on a different grid".to_string()));
        }
        for (v, s) in spec.data_mut().iter_mut().zip(&self.symbol) {
            *v *= s;
        }
        Ok(())
    }

    /// Applies the multiplier to a real field, expecting a real result
    /// (Hermitian symbol). The tiny imaginary residue of a Hermitian symbol
    /// is truncated; a non-Hermitian symbol is reported as a domain error.
    pub fn apply(&self, field: &ScalarField) -> Result<ScalarField> {
        if !field.grid().same_as(&self.grid) {
            return Err(Error::shape("field lives on a different grid".to_string()));
        }
        let mut spec = field.spectrum();
        self.apply_spectrum(&mut spec)?;
        spec.inverse_real()
    }

    /// Applies the multiplier in complex arithmetic (no symmetry assumption).
    pub fn apply_complex(&self, field: &ComplexField) -> Result<ComplexField> {
        if !field.grid().same_as(&self.grid) {
            return Err(Error::shape("field lives on a different grid".to_string()));
        }
        let mut spec = field.spectrum();
        self.apply_spectrum(&mut spec)?;
        Ok(spec.inverse_complex())
    }

    /// Applies the multiplier to a real field, returning the full complex
    /// result (for symbols that are not Hermitian, e.g. odd real symbols).
    pub fn apply_real_to_complex(&self, field: &ScalarField) -> Result<ComplexField> {
        self.apply_complex(&field.to_complex())
    }
}

/// Sharp spectral low-pass: keeps modes whose per-axis index satisfies
/// `|mode| < cutoff` and zeroes the rest — in particular the sign-ambiguous
/// Nyquist lines. The standard dealiasing step before applying symbols whose
/// cross terms are not symmetric under the lattice's Nyquist involution.
pub fn low_pass_plan(grid: &SpaceGrid, cutoff: usize) -> Result<MultiplierPlan> {
    if cutoff == 0 || cutoff > grid.n() / 2 {
        return Err(Error::domain(format!(
            "low-pass cutoff must lie in 1..={}, got {cutoff}",
            grid.n() / 2
        )));
    }
    let values = (0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            let keep = (0..grid.dim())
                .all(|axis| grid.mode(idx[axis]).unsigned_abs() < cutoff as u64);
            Complex64::new(if keep { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    MultiplierPlan::from_values(grid, values)
}

/// The derivative multiplier `∂_{x_axis}`, i.e. the symbol `2πiξ_axis`.
pub fn derivative_plan(grid: &SpaceGrid, axis: usize) -> Result<MultiplierPlan> {
    if axis >= grid.dim() {
        return Err(Error::domain(format!(
            "derivative axis {axis} out of range for a {}-dimensional grid",
            grid.dim()
        )));
    }
    MultiplierPlan::new(grid, |xi| Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi[axis]))
}

/// The elliptic inverse multiplier `1/(|ξ| + ⟨aξ|ξ⟩)` with zero mode 0.
pub fn elliptic_inverse_plan(grid: &SpaceGrid, a: &SymMatrix) -> Result<MultiplierPlan> {
    MultiplierPlan::with_zero_mode(
        grid,
        |xi| Complex64::new(1.0 / elliptic_denominator(a, xi), 0.0),
        Complex64::ZERO,
    )
}

/// The forward elliptic weight `|ξ| + ⟨aξ|ξ⟩` with zero mode 0 — the
/// two-sided inverse of [`elliptic_inverse_plan`] on mean-zero fields.
pub fn elliptic_forward_plan(grid: &SpaceGrid, a: &SymMatrix) -> Result<MultiplierPlan> {
    MultiplierPlan::with_zero_mode(
        grid,
        |xi| Complex64::new(elliptic_denominator(a, xi), 0.0),
        Complex64::ZERO,
    )
}

/// Applies a λ-dependent symbol slab-by-slab to a kinetic field:
/// `(x, λ_k) ↦ A_{ψ(·, λ_k)} w(·, λ_k)`, in parallel over λ with
/// deterministic assembly. Symbols singular at ξ = 0 get the prescribed
/// `zero_mode`. Expects real output per slab (Hermitian symbols).
pub fn apply_kinetic(
    field: &KineticField,
    symbol: impl Fn([f64; 2], f64) -> Complex64 + Sync,
    zero_mode: Complex64,
) -> Result<KineticField> {
    let lambda = field.lambda().clone();
    let slabs: Vec<ScalarField> = (0..lambda.m())
        .into_par_iter()
        .map(|k| -> Result<ScalarField> {
            let l = lambda.node(k);
            let plan =
                MultiplierPlan::with_zero_mode(field.grid(), |xi| symbol(xi, l), zero_mode)?;
            plan.apply(&field.slab_field(k))
        })
        .collect::<Result<_>>()?;
    KineticField::from_slabs(lambda, slabs)
}

/// Complex-output variant of [`apply_kinetic`], returning per-λ complex
/// slabs (no Hermitian assumption). Slab `k` of the result corresponds to
/// velocity node `k`.
pub fn apply_kinetic_complex(
    field: &KineticField,
    symbol: impl Fn([f64; 2], f64) -> Complex64 + Sync,
    zero_mode: Complex64,
) -> Result<Vec<ComplexField>> {
    let lambda = field.lambda();
    (0..lambda.m())
        .into_par_iter()
        .map(|k| -> Result<ComplexField> {
            let l = lambda.node(k);
            let plan =
                MultiplierPlan::with_zero_mode(field.grid(), |xi| symbol(xi, l), zero_mode)?;
            plan.apply_real_to_complex(&field.slab_field(k))
        })
        .collect()
}

/// Commutator `[A_ψ, b] v = A_ψ(b·v) - b·A_ψ(v)` of a multiplier with a
/// (rough) coefficient `b`, computed in complex arithmetic: for odd real
/// symbols the commutator of real fields is purely imaginary.
pub fn commutator(
    plan: &MultiplierPlan,
    coeff: &ScalarField,
    v: &ScalarField,
) -> Result<ComplexField> {
    let bv = coeff.zip_with(v, |b, v| b * v)?;
    let a_bv = plan.apply_real_to_complex(&bv)?;
    let a_v = plan.apply_real_to_complex(v)?;
    let grid = *v.grid();
    let data = a_bv
        .data()
        .iter()
        .zip(a_v.data())
        .zip(coeff.data())
        .map(|((abv, av), b)| abv - b * av)
        .collect();
    ComplexField::from_data(grid, data)
}

/// The adapted test function of the weak formulation: for a spatial
/// localiser φ, a slab `v` of the second sequence, a diffusion value `a`,
/// and a velocity-profile symbol ψ evaluated on the projected dual variable,
/// builds
///
/// ```text
/// θ = conj( A_{ conj(ψ(π(ξ))) / D(ξ) } (φ·v) ),   D = |ξ| + ⟨aξ|ξ⟩
/// ```
///
/// with zero mode 0 (the elliptic quotient is singular at the origin).
pub fn theta_test_function(
    phi: &ScalarField,
    v: &ScalarField,
    a: &SymMatrix,
    psi: impl Fn([f64; 2]) -> Complex64,
) -> Result<ComplexField> {
    let weighted = phi.zip_with(v, |p, v| p * v)?;
    let plan = MultiplierPlan::with_zero_mode(
        weighted.grid(),
        |xi| {
            let p = project(a, xi).expect("nonzero lattice modes");
            psi(p).conj() / elliptic_denominator(a, xi)
        },
        Complex64::ZERO,
    )?;
    Ok(plan.apply_real_to_complex(&weighted)?.conj())
}
