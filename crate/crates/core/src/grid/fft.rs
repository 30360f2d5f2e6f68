//! Discrete Fourier transforms in the integral normalisation.
//!
//! Forward: `û_m = h^d Σ_k u_k e^{-2πi m·k/N}` ≈ `∫ e^{-2πi⟨ξ|x⟩} u dx`.
//! Inverse: `u_k = L^{-d} Σ_m û_m e^{+2πi m·k/N}`.
//! The pair is an exact roundtrip on the lattice, and the Plancherel identity
//! `h^d Σ |u_k|² = L^{-d} Σ |û_m|²` holds to roundoff.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::{ComplexField, ScalarField, SpectralField};
use super::SpaceGrid;
use crate::error::{Error, Result};
use crate::tol;

thread_local! {
    // One planner per thread: plans are cached per (size, direction), so
    // repeated transforms (per-λ multiplier sweeps) reuse twiddle tables.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Unnormalised DFT of the row-major buffer along every axis, in place.
fn transform_in_place(grid: &SpaceGrid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.n();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    match grid.dim() {
        1 => fft.process_with_scratch(data, &mut scratch),
        _ => {
            for row in data.chunks_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            transpose_square(data, n);
            for row in data.chunks_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            transpose_square(data, n);
        }
    }
}

impl ScalarField {
    /// Fourier coefficients of the field in the integral normalisation.
    pub fn spectrum(&self) -> SpectralField {
        let mut buf: Vec<Complex64> =
            self.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform_in_place(self.grid(), &mut buf, FftDirection::Forward);
        let scale = self.grid().cell_volume();
        for z in &mut buf {
            *z *= scale;
        }
        SpectralField::from_data(*self.grid(), buf).expect("length preserved by transform")
    }
}

impl ComplexField {
    /// Fourier coefficients of the field in the integral normalisation.
    pub fn spectrum(&self) -> SpectralField {
        let mut buf = self.data().to_vec();
        transform_in_place(self.grid(), &mut buf, FftDirection::Forward);
        let scale = self.grid().cell_volume();
        for z in &mut buf {
            *z *= scale;
        }
        SpectralField::from_data(*self.grid(), buf).expect("length preserved by transform")
    }
}

impl SpectralField {
    /// Inverse transform to a complex spatial field.
    pub fn inverse_complex(&self) -> ComplexField {
        let mut buf = self.data().to_vec();
        transform_in_place(self.grid(), &mut buf, FftDirection::Inverse);
        let scale = self.grid().side().powi(-(self.grid().dim() as i32));
        for z in &mut buf {
            *z *= scale;
        }
        ComplexField::from_data(*self.grid(), buf).expect("length preserved by transform")
    }

    /// Inverse transform to a real spatial field.
    ///
    /// Valid only for conjugate-symmetric spectra (the transform of real
    /// data, possibly multiplied by a Hermitian symbol). The imaginary
    /// residue must stay below [`tol::IMAG_RESIDUE_REL`] relative to the
    /// root-mean-square of the real part; anything larger means the spectrum
    /// was not Hermitian and the caller should use
    /// [`SpectralField::inverse_complex`].
    pub fn inverse_real(&self) -> Result<ScalarField> {
        let complex = self.inverse_complex();
        let n = complex.data().len() as f64;
        let rms_re =
            (complex.data().iter().map(|z| z.re * z.re).sum::<f64>() / n).sqrt();
        let residue = complex.max_imag();
        if residue > tol::IMAG_RESIDUE_REL * rms_re {
            return Err(Error::domain(format!(
                "inverse transform is not real: imaginary residue {residue:.3e} \
                 vs real rms {rms_re:.3e}; use inverse_complex for non-Hermitian spectra"
            )));
        }
        Ok(complex.real_part())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpaceGrid;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// O(N^{2d}) reference transform, straight from the definition.
    fn naive_spectrum(field: &ScalarField) -> Vec<Complex64> {
        let grid = field.grid();
        let vol = grid.cell_volume();
        grid.frequencies()
            .map(|(_, xi)| {
                let mut acc = Complex64::ZERO;
                for (flat, x) in grid.points() {
                    let phase = -2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]);
                    acc += field.data()[flat] * Complex64::new(phase.cos(), phase.sin());
                }
                acc * vol
            })
            .collect()
    }

    fn random_field(grid: SpaceGrid, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ScalarField::from_data(grid, (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap()
    }

    #[test]
    fn forward_matches_naive_definition_1d() {
        let grid = SpaceGrid::new(1, 16, 2.0).unwrap();
        let field = random_field(grid, 7);
        let fast = field.spectrum();
        let slow = naive_spectrum(&field);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (f, s) in fast.data().iter().zip(&slow) {
            assert!((f - s).norm() <= 1e-12 * scale, "fast {f} vs naive {s}");
        }
    }

    #[test]
    fn forward_matches_naive_definition_2d() {
        let grid = SpaceGrid::new(2, 8, 1.5).unwrap();
        let field = random_field(grid, 11);
        let fast = field.spectrum();
        let slow = naive_spectrum(&field);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (f, s) in fast.data().iter().zip(&slow) {
            assert!((f - s).norm() <= 1e-12 * scale, "fast {f} vs naive {s}");
        }
    }

    #[test]
    fn pure_sine_lands_on_the_expected_modes() {
        // u(x) = sin(2πx/L) on L = 2: û(±1/L) = ∓ iL/2, all other modes 0.
        let grid = SpaceGrid::new(1, 16, 2.0).unwrap();
        let field = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0] / 2.0).sin());
        let spec = field.spectrum();
        for (flat, xi) in grid.frequencies() {
            let m = (xi[0] * 2.0).round() as i64;
            let expected = match m {
                1 => Complex64::new(0.0, -1.0),
                -1 => Complex64::new(0.0, 1.0),
                _ => Complex64::ZERO,
            };
            assert!(
                (spec.data()[flat] - expected).norm() < 1e-13,
                "mode {m}: {} vs {expected}",
                spec.data()[flat]
            );
        }
    }

    #[test]
    fn roundtrip_is_exact_to_roundoff() {
        for (dim, n) in [(1usize, 64usize), (1, 256), (2, 64)] {
            let grid = SpaceGrid::new(dim, n, 1.0 + dim as f64).unwrap();
            let field = random_field(grid, 1000 + n as u64);
            let back = field.spectrum().inverse_real().unwrap();
            let scale = field.data().iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            let err = field
                .data()
                .iter()
                .zip(back.data())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err <= crate::tol::FFT_ROUNDTRIP_REL * scale, "dim {dim} n {n}: err {err}");
        }
    }

    #[test]
    fn plancherel_identity_holds() {
        for (dim, n) in [(1usize, 64usize), (2, 32)] {
            let grid = SpaceGrid::new(dim, n, 2.5).unwrap();
            let field = random_field(grid, 42 + n as u64);
            let direct: f64 =
                field.data().iter().map(|v| v * v).sum::<f64>() * grid.cell_volume();
            let viaspec = field.spectrum().energy();
            assert_relative_eq!(direct, viaspec, max_relative = crate::tol::FFT_ROUNDTRIP_REL);
        }
    }

    #[test]
    fn complex_roundtrip_preserves_nonsymmetric_data() {
        let grid = SpaceGrid::new(2, 16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let field = ComplexField::from_data(
            grid,
            (0..grid.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let back = field.spectrum().inverse_complex();
        let err = field
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn inverse_real_rejects_non_hermitian_spectra() {
        let grid = SpaceGrid::new(1, 16, 1.0).unwrap();
        let mut spec = SpectralField::zeros(grid);
        spec.data_mut()[1] = Complex64::new(1.0, 0.0); // +ξ mode only
        assert!(spec.inverse_real().is_err());
        assert!(spec.inverse_complex().data()[0].norm() > 0.0);
    }
}
