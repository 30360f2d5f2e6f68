//! Centralised numerical tolerances.
//!
//! Every comparison threshold used by the library lives here with a short
//! justification, so reviewers can audit the numerics in one place and tests
//! never bake in ad-hoc magic numbers.

/// Relative error allowed for a forward/inverse Fourier roundtrip and for the
/// Plancherel identity on the grid.
///
/// The transform pair is exact in exact arithmetic; the only error is f64
/// roundoff accumulated over O(N log N) operations, which stays well below
/// 1e-13 for N ≤ 1024. 1e-12 leaves a 10× margin.
pub const FFT_ROUNDTRIP_REL: f64 = 1e-12;

/// Absolute error allowed between the sum of velocity quadrature weights and
/// the length of the velocity interval.
///
/// Trapezoid weights sum to the interval length exactly up to roundoff in the
/// O(M) summation.
pub const QUADRATURE_WEIGHT_SUM_ABS: f64 = 1e-12;

/// Absolute asymmetry `max |a_ij - a_ji|` tolerated in a diffusion matrix.
/// Entries are produced by closed-form expressions; asymmetry is pure roundoff.
pub const MATRIX_SYMMETRY_ABS: f64 = 1e-12;

/// Lower bound for eigenvalues of a positive semi-definite diffusion matrix.
/// Exact zeros may round to tiny negatives; anything below -1e-12 is a real
/// negative direction, not roundoff.
pub const PSD_EIGENVALUE_FLOOR: f64 = -1e-12;

/// Absolute entrywise error allowed in the factorisation σᵀσ = a.
///
/// The factor is assembled from an eigendecomposition computed by closed-form
/// 2×2 formulas (or trivially in 1-d); reconstruction error is a handful of
/// rounding steps. 1e-10 absorbs cancellation for entries up to O(10³).
pub const SIGMA_FACTOR_ABS: f64 = 1e-10;

/// Absolute entrywise error allowed in QᵀQ = I for eigenvector matrices.
pub const ORTHOGONALITY_ABS: f64 = 1e-10;

/// Relative agreement required between recursion-evaluated symbol derivatives
/// and central finite differences, measured in the scale-weighted metric
/// `|ξ^α (rec - fd)| / max(1, |ξ^α rec|)`.
///
/// Central differences with per-octave step h = |ξ|·1e-4 carry O(h²) ≈ 1e-8
/// truncation error relative to the octave scale; 1e-6 gives two orders of
/// headroom across the dyadic ring 2^{-10}..2^{10}.
pub const RECURSION_VS_FD_REL: f64 = 1e-6;

/// Largest imaginary residue magnitude (relative to the field's L² size)
/// silently discarded when a real-symbol multiplier is applied to a real
/// field. Anything larger indicates a non-Hermitian symbol and is an error.
pub const IMAG_RESIDUE_REL: f64 = 1e-12;

/// Absolute roundtrip error allowed for the elliptic inverse multiplier:
/// applying `(|ξ| + ⟨aξ|ξ⟩)` after its inverse on mean-zero fields.
pub const ELLIPTIC_ROUNDTRIP_ABS: f64 = 1e-10;

/// Agreement between the λ-derivative of the elliptic inverse symbol computed
/// from the diffusion derivative (-⟨a'ξ|ξ⟩/D²) and from the square-root
/// factor route (-2⟨σξ|σ'ξ⟩/D² with σ' by central difference, step 1e-4).
/// Central differencing carries O(step²) ≈ 1e-8-scale truncation error at
/// that step, which this tolerance matches.
pub const LAMBDA_DERIV_SIGMA_FORM_ABS: f64 = 1e-8;

/// Absolute tolerance for bilinearity/linearity identities of discrete
/// functionals (μ, commutators) probed with O(1) fields: pure roundoff.
pub const BILINEARITY_ABS: f64 = 1e-12;

/// Multiplicative slack on the adapted-norm bound for the defect functional:
/// the discrete bound is an exact Cauchy–Schwarz/Plancherel inequality, so the
/// estimate may exceed the bound only by accumulated roundoff.
pub const MU_BOUND_SLACK: f64 = 1e-6;

/// Absolute error allowed when reproducing the principal symbol through its
/// projected factorisation at individual (ξ, λ) points.
pub const PRINCIPAL_SYMBOL_ABS: f64 = 1e-12;

/// Scale below which a principal-symbol value counts as vanishing when
/// comparing the zero sets of the raw and projected forms.
pub const PRINCIPAL_VANISH_ABS: f64 = 1e-9;

/// Absolute error allowed for flux zeros at the state-interval endpoints.
/// Fluxes are given in closed form; the endpoints must be exact roots up to
/// evaluation roundoff.
pub const FLUX_ZERO_ABS: f64 = 1e-12;

/// Per-step absolute drift of total mass allowed in the conservative scheme,
/// relative to nothing: the scheme telescopes exactly, so drift is the
/// roundoff of one pass of compensated-free summation, ≲ N·eps·max|flux|·dt.
/// The acceptance budget is 1e-10 over 10⁴ steps; 1e-12 per step is the
/// matching per-step share with margin.
pub const MASS_DRIFT_PER_STEP_ABS: f64 = 1e-12;

/// Absolute overshoot of the discrete maximum principle tolerated for the
/// monotone regime (CFL·(1) with both flux zeros bracketing the data).
pub const MAX_PRINCIPLE_ABS: f64 = 1e-12;

/// Most negative value the discrete entropy production may take for the pure
/// heat equation, where the cell update is a convex combination and the
/// residual is non-negative in exact arithmetic.
pub const HEAT_ENTROPY_FLOOR: f64 = -1e-6;

/// Absolute residual allowed for the four-term weak-form identity evaluated
/// on manufactured spectral data, where every term is computed by exact
/// lattice summation and the identity holds term-by-term up to roundoff.
pub const WEAK_FORM_MANUFACTURED_ABS: f64 = 1e-8;

/// Relative tolerance used when two symbol evaluations must agree exactly in
/// exact arithmetic (e.g. composed vs. direct projected principal symbol).
pub const SYMBOL_EVAL_REL: f64 = 1e-12;

/// Noise allowance for "non-increasing" ladder verdicts: a later rung may
/// exceed an earlier one by at most this relative fraction.
pub const LADDER_NOISE_REL: f64 = 0.10;

/// A Cauchy/decay ladder passes only if its last rung is at most this
/// fraction of its first.
pub const LADDER_DECAY_FACTOR: f64 = 0.5;

/// A localisation ladder passes only if its last rung is at most this
/// fraction of its first.
pub const LOCALISATION_DECAY_FACTOR: f64 = 0.1;

/// Commutator / defect decay experiments pass when the finest-oscillation
/// value is at most this fraction of the coarsest.
pub const OSCILLATION_DECAY_FACTOR: f64 = 0.25;

/// Control experiments (expected NOT to vanish) pass when the final value
/// stays at least this fraction of the initial one.
pub const CONTROL_RETENTION_FACTOR: f64 = 0.5;

/// Largest admissible max/min ratio across a parameter sweep that certifies
/// parameter-uniformity of a symbol-derivative bound.
pub const UNIFORMITY_RATIO_MAX: f64 = 4.0;

/// Cap on the dyadic derivative certificate constant for the elliptic
/// quotient symbols in two dimensions.
pub const MARCINKIEWICZ_CONSTANT_MAX: f64 = 20.0;

/// Least-squares log₂-slope that a continuity-modulus sequence must not
/// exceed (moduli decay like R^{-1/2} for the degenerate witness; -0.4 leaves
/// discretisation headroom).
pub const MODULUS_SLOPE_MAX: f64 = -0.4;

/// Relative error allowed on the observed shock position/speed for the
/// Riemann oracle at N = 1024.
pub const SHOCK_SPEED_REL: f64 = 0.02;
