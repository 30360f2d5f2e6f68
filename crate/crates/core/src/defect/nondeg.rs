//! Non-degeneracy diagnostics: the velocity measure of flat directions.
//!
//! For a dual direction ξ on the unit sphere and a base point x, the set
//!
//! ```text
//! { λ ∈ S : |⟨f(x,λ)|ξ⟩| ≤ ε  and  ⟨a(λ)ξ|ξ⟩ ≤ ε }
//! ```
//!
//! collects the velocities at which both the convective and the diffusive
//! mechanism are ε-flat along ξ. Genuine non-degeneracy means this measure
//! vanishes as ε ↓ 0; a flux that is constant in λ along some direction
//! keeps the full measure at every threshold. The ladder runner sweeps a
//! decreasing sequence of thresholds and the verdict checks monotone decay,
//! retention at the finest rung, and fits a log–log slope.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::LambdaGrid;
use crate::symbol::modulus::least_squares_slope;
use crate::symbol::DiffusionFamily;
use crate::tol;

/// A probe: a base point for the velocity field and a unit dual direction
/// (normalised on construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondegSample {
    x: [f64; 2],
    xi: [f64; 2],
}

impl NondegSample {
    /// Normalises ξ; rejects zero or non-finite inputs.
    pub fn new(x: [f64; 2], xi: [f64; 2]) -> Result<Self> {
        if x.iter().chain(xi.iter()).any(|c| !c.is_finite()) {
            return Err(Error::domain(format!(
                "probe coordinates must be finite, got x = {x:?}, ξ = {xi:?}"
            )));
        }
        let n = xi[0].hypot(xi[1]);
        if n == 0.0 {
            return Err(Error::domain("dual direction must be nonzero"));
        }
        Ok(Self { x, xi: [xi[0] / n, xi[1] / n] })
    }

    /// Base point.
    pub fn x(&self) -> [f64; 2] {
        self.x
    }

    /// Unit dual direction.
    pub fn xi(&self) -> [f64; 2] {
        self.xi
    }
}

/// Flat-direction measures at one threshold: one entry per probe, plus the
/// worst case over probes.
#[derive(Debug, Clone, PartialEq)]
pub struct NondegReport {
    pub epsilon: f64,
    pub max_measure: f64,
    pub measures: Vec<f64>,
}

/// Velocity measure of the ε-flat set for each probe, by the velocity
/// grid's quadrature applied to the indicator.
pub fn nondegeneracy_measure(
    f: &(dyn Fn([f64; 2], f64) -> [f64; 2] + Sync),
    family: &DiffusionFamily,
    lambda: &LambdaGrid,
    epsilon: f64,
    samples: &[NondegSample],
) -> Result<NondegReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!("flatness threshold must be positive, got {epsilon}")));
    }
    if samples.is_empty() {
        return Err(Error::domain("non-degeneracy needs at least one probe"));
    }
    let nodes: Vec<f64> = lambda.nodes().collect();
    let weights: Vec<f64> = lambda.weights().collect();
    let matrices: Vec<_> = nodes.iter().map(|&l| family.value(l)).collect();
    let measures: Vec<f64> = samples
        .par_iter()
        .map(|s| {
            let mut acc = 0.0;
            for (k, &l) in nodes.iter().enumerate() {
                let vel = f(s.x, l);
                let convective = (vel[0] * s.xi[0] + vel[1] * s.xi[1]).abs() <= epsilon;
                let diffusive = matrices[k].quadratic(s.xi) <= epsilon;
                if convective && diffusive {
                    acc += weights[k];
                }
            }
            acc
        })
        .collect();
    let max_measure = measures.iter().copied().fold(0.0, f64::max);
    Ok(NondegReport { epsilon, max_measure, measures })
}

/// [`nondegeneracy_measure`] swept over a threshold ladder.
pub fn nondegeneracy_ladder(
    f: &(dyn Fn([f64; 2], f64) -> [f64; 2] + Sync),
    family: &DiffusionFamily,
    lambda: &LambdaGrid,
    epsilons: &[f64],
    samples: &[NondegSample],
) -> Result<Vec<NondegReport>> {
    if epsilons.is_empty() {
        return Err(Error::domain("threshold ladder must not be empty"));
    }
    epsilons
        .iter()
        .map(|&e| nondegeneracy_measure(f, family, lambda, e, samples))
        .collect()
}

/// Outcome of a localisation ladder: whether the flat-direction measure
/// decays as required, the fitted log–log slope when enough rungs are
/// positive, and a human-readable account.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalisationVerdict {
    pub passed: bool,
    pub log_slope: Option<f64>,
    pub diagnostic: String,
}

/// Judges a `(ε, measure)` ladder with strictly decreasing thresholds:
/// measures must be non-increasing up to a relative noise allowance, and
/// the finest rung must retain at most [`tol::LOCALISATION_DECAY_FACTOR`]
/// of the coarsest (a ladder that is zero from the start passes vacuously).
/// The slope is fitted through the positive rungs in log–log coordinates.
pub fn localisation_verdict(ladder: &[(f64, f64)]) -> Result<LocalisationVerdict> {
    if ladder.len() < 3 {
        return Err(Error::domain(format!(
            "localisation verdict needs at least 3 rungs, got {}",
            ladder.len()
        )));
    }
    for &(e, m) in ladder {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::domain(format!("thresholds must be positive and finite, got {e}")));
        }
        if !m.is_finite() || m < 0.0 {
            return Err(Error::data(format!("measures must be finite and non-negative, got {m}")));
        }
    }
    for w in ladder.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::domain(format!(
                "thresholds must decrease strictly, got {} then {}",
                w[0].0, w[1].0
            )));
        }
    }

    let mut passed = true;
    let mut diagnostic = String::new();
    for (i, w) in ladder.windows(2).enumerate() {
        let (prev, cur) = (w[0].1, w[1].1);
        if cur > prev * (1.0 + tol::LADDER_NOISE_REL) {
            passed = false;
            diagnostic = format!(
                "measure rises from {prev} to {cur} between rungs {i} and {}",
                i + 1
            );
            break;
        }
    }
    let first = ladder[0].1;
    let last = ladder[ladder.len() - 1].1;
    if passed {
        if first == 0.0 {
            diagnostic =
                "flat-direction set already has zero measure at the coarsest threshold".into();
        } else if last > tol::LOCALISATION_DECAY_FACTOR * first {
            passed = false;
            diagnostic = format!(
                "measure retains {last} at the finest threshold versus {first} at the coarsest"
            );
        } else {
            diagnostic = format!("measure decays from {first} to {last} across the ladder");
        }
    }

    let pts: Vec<(f64, f64)> = ladder
        .iter()
        .filter(|&&(_, m)| m > 0.0)
        .map(|&(e, m)| (e.ln(), m.ln()))
        .collect();
    let log_slope = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        Some(least_squares_slope(&xs, &ys))
    } else {
        None
    };
    Ok(LocalisationVerdict { passed, log_slope, diagnostic })
}
