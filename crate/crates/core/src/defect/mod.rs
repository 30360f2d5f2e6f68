//! Micro-local defect diagnostics.
//!
//! The central object is a bilinear estimate between two field sequences,
//! probed by product test functions `φ(x)·ψ(z,λ)·ρ(λ)` whose fiber factor is
//! evaluated on the adaptive projection `π(ξ,λ) = ξ/(|ξ| + ⟨a(λ)ξ|ξ⟩)`:
//!
//! ```text
//! μ(φψρ) = ∬ φ(x)ρ(λ) u(x,λ) · conj(A_{ψ̄∘π(·,λ)} v)(x) dx dλ .
//! ```
//!
//! The companion norm on such test functions takes a pointwise velocity `L²`
//! of the fiber factor along the projection, a supremum over dual directions
//! (realised on a fixed dyadic-by-angle sample certificate), and a spatial
//! `L^p`. Cauchy–Schwarz plus the discrete Parseval identity then bound every
//! estimate by `‖u‖_{L^q_x(L²_λ)}·‖v‖₂·‖φψρ‖`, which is what the reports
//! tabulate.
//!
//! The submodule [`nondeg`] quantifies non-degeneracy: the velocity measure
//! of directions where both the convective and diffusive symbols are flat,
//! swept over a shrinking threshold ladder.

pub mod nondeg;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{KineticField, LambdaGrid, ScalarField};
use crate::multiplier::MultiplierPlan;
use crate::symbol::marcinkiewicz::DyadicSampler;
use crate::symbol::{elliptic_denominator, norm, project, DiffusionFamily, SymMatrix};

/// Integrability bookkeeping for a sequence experiment: the driving
/// exponent `q ∈ (2,∞]` of the first sequence fixes the spatial exponent
/// `p = 2q/(q−2)` of the test-function norm (`p = 2` when `q = ∞`), while
/// `r` (mixed-space) and `p₀, r₀` (source terms) are validated companions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentProfile {
    q: f64,
    p: f64,
    r: f64,
    p0: f64,
    r0: f64,
}

impl ExponentProfile {
    /// Builds and validates a profile. `q` may be `f64::INFINITY`.
    pub fn new(q: f64, r: f64, p0: f64, r0: f64) -> Result<Self> {
        if !(q > 2.0) {
            return Err(Error::domain(format!("exponent q must lie in (2, ∞], got {q}")));
        }
        let p = if q.is_infinite() { 2.0 } else { 2.0 * q / (q - 2.0) };
        let r_floor = if q.is_infinite() { 1.0 } else { q / (q - 1.0) };
        if !(r > r_floor) || !r.is_finite() {
            return Err(Error::domain(format!(
                "mixed-space exponent r must exceed q/(q-1) = {r_floor}, got {r}"
            )));
        }
        for (name, value) in [("p0", p0), ("r0", r0)] {
            if !(value > 1.0) || !value.is_finite() {
                return Err(Error::domain(format!(
                    "source exponent {name} must lie in (1, ∞), got {value}"
                )));
            }
        }
        Ok(Self { q, p, r, p0, r0 })
    }

    /// Profile from `q` alone with conservative companions.
    pub fn from_q(q: f64) -> Result<Self> {
        let r_floor = if q.is_infinite() { 1.0 } else { q / (q - 1.0) };
        Self::new(q, r_floor + 1.0, 2.0, 2.0)
    }

    /// Integrability of the first sequence.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Spatial exponent of the test-function norm, `2q/(q−2)`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Mixed-space exponent.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// First source-term exponent.
    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Second source-term exponent.
    pub fn r0(&self) -> f64 {
        self.r0
    }
}

type FiberFn = Arc<dyn Fn([f64; 2], f64) -> Complex64 + Send + Sync>;
type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Product test function `φ(x)·ψ(z,λ)·ρ(λ)`: a spatial localiser, a fiber
/// factor evaluated on the closed unit ball, and an optional velocity
/// weight (identically 1 when absent).
#[derive(Clone)]
pub struct TestSymbol {
    id: String,
    phi: ScalarField,
    psi: FiberFn,
    rho: Option<WeightFn>,
}

impl TestSymbol {
    /// New test function with trivial velocity weight.
    pub fn new(
        id: impl Into<String>,
        phi: ScalarField,
        psi: impl Fn([f64; 2], f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { id: id.into(), phi, psi: Arc::new(psi), rho: None }
    }

    /// Attaches a velocity weight.
    pub fn with_rho(mut self, rho: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.rho = Some(Arc::new(rho));
        self
    }

    /// Stable identifier used in report rows.
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Spatial localiser.
    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    /// Fiber factor at `(z, λ)`, `z` in the closed unit ball.
    pub fn psi(&self, z: [f64; 2], l: f64) -> Complex64 {
        (self.psi)(z, l)
    }

    /// Velocity weight at λ (1 when none was attached).
    pub fn rho(&self, l: f64) -> f64 {
        match &self.rho {
            Some(r) => r(l),
            None => 1.0,
        }
    }
}

impl fmt::Debug for TestSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestSymbol")
            .field("id", &self.id)
            .field("grid", self.phi.grid())
            .field("has_rho", &self.rho.is_some())
            .finish()
    }
}

/// One tabulated estimate: sequence index, test id, complex value, and the
/// sampled-norm bound it must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct MuRow {
    pub n: usize,
    pub test_id: String,
    pub value: Complex64,
    pub bound: f64,
}

/// Table of defect estimates across sequence indices and test functions.
#[derive(Debug, Clone, Default)]
pub struct DefectReport {
    rows: Vec<MuRow>,
}

impl DefectReport {
    /// Empty report.
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a row; estimates and bounds must be finite.
    pub fn push(&mut self, row: MuRow) -> Result<()> {
        if !row.value.is_finite() || !row.bound.is_finite() {
            return Err(Error::data(format!(
                "non-finite defect estimate for test '{}' at n = {}",
                row.test_id, row.n
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// All rows in insertion order.
    pub fn rows(&self) -> &[MuRow] {
        &self.rows
    }

    /// `(n, |value|)` pairs for one test id, in insertion order.
    pub fn series(&self, test_id: &str) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.test_id == test_id)
            .map(|r| (r.n, r.value.norm()))
            .collect()
    }

    /// True when every `|value|` sits within `(1 + slack)` of its bound.
    pub fn bounds_respected(&self, slack: f64) -> bool {
        self.rows.iter().all(|r| r.value.norm() <= r.bound * (1.0 + slack))
    }

    /// Writes the `n,test,real,imag,bound` CSV.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "n,test,real,imag,bound")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                row.n, row.test_id, row.value.re, row.value.im, row.bound
            )?;
        }
        Ok(())
    }
}

/// Kinetic source data carried alongside a sequence entry: a scalar source
/// on the product lattice and one flux-mismatch field per spatial axis.
#[derive(Debug, Clone)]
pub struct SourceTerms {
    g: KineticField,
    p: Vec<KineticField>,
}

impl SourceTerms {
    /// Validates that every component shares the scalar source's lattice and
    /// that there is one flux-mismatch field per spatial axis.
    pub fn new(g: KineticField, p: Vec<KineticField>) -> Result<Self> {
        if p.len() != g.grid().dim() {
            return Err(Error::shape(format!(
                "expected {} flux-mismatch components, got {}",
                g.grid().dim(),
                p.len()
            )));
        }
        for (axis, comp) in p.iter().enumerate() {
            if !comp.grid().same_as(g.grid()) || comp.lambda() != g.lambda() {
                return Err(Error::shape(format!(
                    "flux-mismatch component {axis} lives on a different lattice"
                )));
            }
        }
        Ok(Self { g, p })
    }

    /// Scalar source.
    pub fn g(&self) -> &KineticField {
        &self.g
    }

    /// Flux-mismatch components, one per spatial axis.
    pub fn p(&self) -> &[KineticField] {
        &self.p
    }
}

/// The fixed dual-direction certificate for the test-function norm:
/// dyadic radii `2^{-5}..2^{5}` times 64 angles (sign pairs in one
/// dimension). The fiber factor only enters through the projection, which
/// collapses radial detail, so this captures the sup's scale structure.
pub fn standard_projection_sampler(dim: usize) -> DyadicSampler {
    DyadicSampler::new(dim, -5, 5, 64, 1.0).expect("fixed sampler parameters are valid")
}

/// Norm of `Ψ = Σ_j φ_j(x)·ρ_j(λ)·ψ_j(z,λ)` on product test functions:
///
/// ```text
/// ( ∫ [ sup_ξ ( ∫_S |Ψ(x, π(ξ,λ), λ)|² dλ )^{1/2} ]^p dx )^{1/p}
/// ```
///
/// with the ξ-sup over the sampler's points. A single term factorises as
/// `‖φ‖_p · sup_ξ Φ(ξ)` and is computed that way; sums take the full
/// per-point path.
pub fn wp_pi_norm(
    terms: &[TestSymbol],
    p: f64,
    family: &DiffusionFamily,
    lambda: &LambdaGrid,
    sampler: &DyadicSampler,
) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("norm exponent p must lie in (1, ∞), got {p}")));
    }
    if terms.is_empty() {
        return Ok(0.0);
    }
    let grid = *terms[0].phi.grid();
    for t in terms {
        if !t.phi.grid().same_as(&grid) {
            return Err(Error::shape("test-function localisers live on different grids"));
        }
    }
    let points = sampler.points();
    let weights: Vec<f64> = lambda.weights().collect();
    let nodes: Vec<f64> = lambda.nodes().collect();
    let matrices: Vec<SymMatrix> = nodes.iter().map(|&l| family.value(l)).collect();

    // Fiber table: for each sample point and velocity node, the weighted
    // fiber values of every term (shared by both paths).
    let mut fiber = vec![vec![Complex64::ZERO; weights.len() * terms.len()]; points.len()];
    for (pi, &xi) in points.iter().enumerate() {
        for (k, (&l, a)) in nodes.iter().zip(&matrices).enumerate() {
            let z = project(a, xi)?;
            for (j, t) in terms.iter().enumerate() {
                fiber[pi][k * terms.len() + j] = t.psi(z, l) * t.rho(l);
            }
        }
    }

    if terms.len() == 1 {
        let t = &terms[0];
        let sup = fiber
            .iter()
            .map(|row| {
                let acc: f64 =
                    weights.iter().zip(row.iter()).map(|(&w, v)| w * v.norm_sqr()).sum();
                acc.sqrt()
            })
            .fold(0.0, f64::max);
        return Ok(sup * t.phi.lp_norm(p)?);
    }

    let phis: Vec<&[f64]> = terms.iter().map(|t| t.phi.data()).collect();
    let sup_p: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut sup = 0.0f64;
            for row in &fiber {
                let mut acc = 0.0;
                for (k, &w) in weights.iter().enumerate() {
                    let mut s = Complex64::ZERO;
                    for (j, phi) in phis.iter().enumerate() {
                        s += phi[flat] * row[k * terms.len() + j];
                    }
                    acc += w * s.norm_sqr();
                }
                sup = sup.max(acc.sqrt());
            }
            sup.powf(p)
        })
        .collect();
    let total: f64 = sup_p.iter().sum();
    Ok((total * grid.cell_volume()).powf(1.0 / p))
}

/// One defect estimate: `∬ φρ u · conj(A_{ψ̄∘π(·,λ)} v) dx dλ` by velocity
/// quadrature, with the fiber multiplier's zero mode set to 0 (the
/// projection is undefined at ξ = 0, so the operator acts on mean-free
/// content only).
pub fn mu_estimate(
    u: &KineticField,
    v: &ScalarField,
    test: &TestSymbol,
    family: &DiffusionFamily,
) -> Result<Complex64> {
    if !u.grid().same_as(v.grid()) || !u.grid().same_as(test.phi.grid()) {
        return Err(Error::shape("defect estimate needs all fields on one grid"));
    }
    let lambda = u.lambda();
    let vol = v.grid().cell_volume();
    let contributions: Vec<Complex64> = (0..lambda.m())
        .into_par_iter()
        .map(|k| -> Result<Complex64> {
            let l = lambda.node(k);
            let scale = lambda.weight(k) * test.rho(l);
            if scale == 0.0 {
                return Ok(Complex64::ZERO);
            }
            let a = family.value(l);
            let plan = MultiplierPlan::with_zero_mode(
                v.grid(),
                |xi| {
                    let z = project(&a, xi).expect("lattice modes away from the origin");
                    test.psi(z, l).conj()
                },
                Complex64::ZERO,
            )?;
            let av = plan.apply_real_to_complex(v)?;
            let mut acc = Complex64::ZERO;
            for ((&phi, &us), az) in
                test.phi.data().iter().zip(u.slab(k)).zip(av.data())
            {
                acc += phi * us * az.conj();
            }
            Ok(acc * (scale * vol))
        })
        .collect::<Result<_>>()?;
    Ok(contributions.iter().sum())
}

/// Exact discrete bound on [`mu_estimate`]:
///
/// ```text
/// |μ| ≤ sup_{ξ ≠ 0 on the lattice} Φ(ξ) · ‖v‖₂ · ‖φ·u‖_{L²(dx dλ)},
/// Φ(ξ)² = ∫_S ρ(λ)² |ψ(π(ξ,λ), λ)|² dλ,
/// ```
///
/// by Cauchy–Schwarz and the discrete Parseval identity over exactly the
/// modes the estimator touches — it dominates `|μ|` up to rounding, with no
/// sampling gap.
pub fn mu_lattice_bound(
    u: &KineticField,
    v: &ScalarField,
    test: &TestSymbol,
    family: &DiffusionFamily,
) -> Result<f64> {
    if !u.grid().same_as(v.grid()) || !u.grid().same_as(test.phi.grid()) {
        return Err(Error::shape("defect bound needs all fields on one grid"));
    }
    let lambda = u.lambda();
    let weights: Vec<f64> = lambda.weights().collect();
    let nodes: Vec<f64> = lambda.nodes().collect();
    let matrices: Vec<SymMatrix> = nodes.iter().map(|&l| family.value(l)).collect();
    let grid = u.grid();
    let mut sup = 0.0f64;
    for (flat, xi) in grid.frequencies() {
        if flat == 0 {
            continue;
        }
        let mut acc = 0.0;
        for (k, (&w, a)) in weights.iter().zip(&matrices).enumerate() {
            let l = nodes[k];
            let r = test.rho(l);
            let z = project(a, xi)?;
            acc += w * r * r * test.psi(z, l).norm_sqr();
        }
        sup = sup.max(acc.sqrt());
    }
    let mut fu_sq = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        let slab: f64 = test
            .phi
            .data()
            .iter()
            .zip(u.slab(k))
            .map(|(&phi, &us)| (phi * us) * (phi * us))
            .sum();
        fu_sq += w * slab * grid.cell_volume();
    }
    Ok(sup * v.l2_norm() * fu_sq.sqrt())
}

/// The theorem-style reported bound with the sampled test-function norm:
/// `‖u‖_{L^q_x(L²_λ)} · ‖v‖₂ · ‖φψρ‖_{sampled}`. The dual-direction sup is
/// taken over the sampler rather than the lattice, which is the quantity the
/// reports pin (see [`mu_lattice_bound`] for the gap-free variant).
pub fn mu_bound(
    u: &KineticField,
    v: &ScalarField,
    test: &TestSymbol,
    family: &DiffusionFamily,
    profile: &ExponentProfile,
    sampler: &DyadicSampler,
) -> Result<f64> {
    let wp = wp_pi_norm(std::slice::from_ref(test), profile.p(), family, u.lambda(), sampler)?;
    Ok(u.lq_x_l2_lambda(profile.q())? * v.l2_norm() * wp)
}

/// Principal symbol of the velocity-kinetic operator at a ball point `z`:
/// `F = i⟨f|z⟩ + 2π(1 − |z|)`, with `f` the convective velocity at the
/// evaluation point.
pub fn principal_symbol(f: [f64; 2], z: [f64; 2]) -> Result<Complex64> {
    let n = norm(z);
    if n > 1.0 + 1e-12 {
        return Err(Error::domain(format!(
            "principal symbol argument must lie in the closed unit ball, |z| = {n}"
        )));
    }
    Ok(Complex64::new(2.0 * std::f64::consts::PI * (1.0 - n), f[0] * z[0] + f[1] * z[1]))
}

/// The principal symbol composed with the projection, `F(π(ξ,λ))`.
pub fn principal_symbol_projected(f: [f64; 2], a: &SymMatrix, xi: [f64; 2]) -> Result<Complex64> {
    principal_symbol(f, project(a, xi)?)
}

/// Closed-form quotient for the composition: real part `2π⟨aξ|ξ⟩/D`,
/// imaginary part `⟨f|ξ⟩/D` with `D = |ξ| + ⟨aξ|ξ⟩` — the independent
/// formula [`principal_symbol_projected`] is checked against.
pub fn principal_symbol_quotient(f: [f64; 2], a: &SymMatrix, xi: [f64; 2]) -> Result<Complex64> {
    let d = elliptic_denominator(a, xi);
    if d == 0.0 {
        return Err(Error::domain("quotient symbol is undefined at ξ = 0"));
    }
    Ok(Complex64::new(
        2.0 * std::f64::consts::PI * a.quadratic(xi) / d,
        (f[0] * xi[0] + f[1] * xi[1]) / d,
    ))
}
