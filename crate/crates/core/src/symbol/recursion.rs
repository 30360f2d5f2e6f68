//! Exact derivative recursion for the elliptic quotient symbols.
//!
//! The two families
//!
//! * `Fraction`:       `ψ(ξ) = |ξ| / (|ξ| + Σ_j κ_j ξ_j²)`
//! * `Concentration`:  `ψ(ξ) = κ_m ξ_m² / (|ξ| + Σ_j κ_j ξ_j²)`
//!
//! (κ_j ≥ 0) have derivatives of the form `∂^α ψ = P_α / D^{|α|+1}` with
//! `D = |ξ| + Σ κ_j ξ_j²` and `P_α` a polynomial in the variables
//! `(ξ₁, ξ₂, η, κ₁, κ₂)` evaluated at `η = 1/|ξ|`. Writing `∂_s D = ξ_s η +
//! 2κ_s ξ_s` and using `Σ ξ_j² η² = 1` on the evaluation surface, one
//! quotient-rule step gives the recursion
//!
//! ```text
//! P_{α+e_s} = -(|α|+1)(ξ_s η + 2κ_s ξ_s) P_α
//!             + ((Σ ξ_j²) η + Σ κ_j ξ_j²) ∂_{ξ_s} P_α
//!             - (ξ_s η² + (Σ κ_j ξ_j²) ξ_s η³) ∂_η P_α
//! ```
//!
//! with base cases `P_0 = (Σ ξ_j²) η` (Fraction) and `P_0 = κ_m ξ_m²`
//! (Concentration). Every monomial `κ^b ξ^g η^l` of `P_α` satisfies integer
//! side conditions (checked exactly at construction) which force the scaled
//! derivative `|ξ^α ∂^α ψ|` to be bounded by the sum of |coefficients|,
//! uniformly in κ — the content of the κ-uniform multiplier bound. The tables
//! also provide the independent "recursion route" that the finite-difference
//! certificates are cross-checked against.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::norm;

/// Which elliptic quotient the recursion differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientKind {
    /// `|ξ| / (|ξ| + Σ κ_j ξ_j²)`.
    Fraction,
    /// `κ_m ξ_m² / (|ξ| + Σ κ_j ξ_j²)` for the given axis `m`.
    Concentration {
        /// Axis `m` of the concentrated quadratic term.
        axis: usize,
    },
}

/// Closed-form value of the quotient symbol (no tables needed).
pub fn quotient_symbol_value(
    dim: usize,
    kind: QuotientKind,
    kappa: [f64; 2],
    xi: [f64; 2],
) -> Result<f64> {
    check_inputs(dim, kind, kappa, xi)?;
    let denom = denominator(dim, kappa, xi);
    let numer = match kind {
        QuotientKind::Fraction => norm(xi),
        QuotientKind::Concentration { axis } => kappa[axis] * xi[axis] * xi[axis],
    };
    Ok(numer / denom)
}

fn denominator(dim: usize, kappa: [f64; 2], xi: [f64; 2]) -> f64 {
    let mut d = norm(xi);
    for j in 0..dim {
        d += kappa[j] * xi[j] * xi[j];
    }
    d
}

fn check_inputs(dim: usize, kind: QuotientKind, kappa: [f64; 2], xi: [f64; 2]) -> Result<()> {
    if let QuotientKind::Concentration { axis } = kind {
        if axis >= dim {
            return Err(Error::domain(format!(
                "concentration axis {axis} out of range for dimension {dim}"
            )));
        }
    }
    for j in 0..dim {
        if !(kappa[j] >= 0.0) {
            return Err(Error::domain(format!(
                "quotient symbols need κ_j >= 0, got κ_{j} = {}",
                kappa[j]
            )));
        }
    }
    if norm(xi) == 0.0 {
        return Err(Error::domain("quotient symbols are undefined at ξ = 0".to_string()));
    }
    Ok(())
}

/// Monomial exponents in the order `(ξ₁, ξ₂, η, κ₁, κ₂)`.
type Mono = [u16; 5];

/// Sparse integer polynomial in `(ξ₁, ξ₂, η, κ₁, κ₂)`.
#[derive(Debug, Clone, Default, PartialEq)]
struct Poly {
    terms: BTreeMap<Mono, i64>,
}

impl Poly {
    fn zero() -> Self {
        Self::default()
    }

    fn monomial(mono: Mono, coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(mono, coeff);
        p
    }

    fn add_term(&mut self, mono: Mono, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(mono).or_insert(0);
        *slot = slot
            .checked_add(coeff)
            .expect("polynomial coefficients stay far inside i64 for |α| <= 4");
        if *slot == 0 {
            self.terms.remove(&mono);
        }
    }

    fn add_scaled(&mut self, other: &Poly, factor: i64) {
        for (mono, c) in &other.terms {
            self.add_term(
                *mono,
                c.checked_mul(factor).expect("coefficient product fits in i64"),
            );
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono = [
                    ma[0] + mb[0],
                    ma[1] + mb[1],
                    ma[2] + mb[2],
                    ma[3] + mb[3],
                    ma[4] + mb[4],
                ];
                out.add_term(mono, ca.checked_mul(*cb).expect("coefficient product fits in i64"));
            }
        }
        out
    }

    /// Partial derivative in ξ_s (slot `s`) or η (slot 2).
    fn derivative(&self, slot: usize) -> Poly {
        let mut out = Poly::zero();
        for (mono, c) in &self.terms {
            let e = mono[slot];
            if e == 0 {
                continue;
            }
            let mut m = *mono;
            m[slot] = e - 1;
            out.add_term(m, c * e as i64);
        }
        out
    }

    fn eval(&self, xi: [f64; 2], eta: f64, kappa: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| {
                c as f64
                    * xi[0].powi(m[0] as i32)
                    * xi[1].powi(m[1] as i32)
                    * eta.powi(m[2] as i32)
                    * kappa[0].powi(m[3] as i32)
                    * kappa[1].powi(m[4] as i32)
            })
            .sum()
    }
}

/// `ξ_s η + 2 κ_s ξ_s` — the derivative of the denominator in direction `s`.
fn denominator_gradient(s: usize) -> Poly {
    let mut p = Poly::zero();
    let mut xi_eta = [0u16; 5];
    xi_eta[s] = 1;
    xi_eta[2] = 1;
    p.add_term(xi_eta, 1);
    let mut xi_kappa = [0u16; 5];
    xi_kappa[s] = 1;
    xi_kappa[3 + s] = 1;
    p.add_term(xi_kappa, 2);
    p
}

/// `(Σ_j ξ_j²) η + Σ_j κ_j ξ_j²` — the denominator in polynomial form.
fn denominator_poly(dim: usize) -> Poly {
    let mut p = Poly::zero();
    for j in 0..dim {
        let mut sq_eta = [0u16; 5];
        sq_eta[j] = 2;
        sq_eta[2] = 1;
        p.add_term(sq_eta, 1);
        let mut sq_kappa = [0u16; 5];
        sq_kappa[j] = 2;
        sq_kappa[3 + j] = 1;
        p.add_term(sq_kappa, 1);
    }
    p
}

/// `ξ_s η² + (Σ_j κ_j ξ_j²) ξ_s η³` — the chain-rule factor from η = 1/|ξ|,
/// already simplified with `Σ ξ_j² η² = 1`.
fn eta_chain_factor(dim: usize, s: usize) -> Poly {
    let mut p = Poly::zero();
    let mut lead = [0u16; 5];
    lead[s] = 1;
    lead[2] = 2;
    p.add_term(lead, 1);
    for j in 0..dim {
        let mut m = [0u16; 5];
        m[j] = 2;
        m[3 + j] = 1;
        m[s] += 1;
        m[2] = 3;
        p.add_term(m, 1);
    }
    p
}

/// One recursion step: `P_{α+e_s}` from `P_α` with `|α| = abs_alpha`.
fn advance(p: &Poly, abs_alpha: usize, s: usize, dim: usize) -> Poly {
    let mut out = Poly::zero();
    out.add_scaled(&denominator_gradient(s).mul(p), -((abs_alpha + 1) as i64));
    out.add_scaled(&denominator_poly(dim).mul(&p.derivative(s)), 1);
    out.add_scaled(&eta_chain_factor(dim, s).mul(&p.derivative(2)), -1);
    out
}

fn base_polynomial(dim: usize, kind: QuotientKind) -> Poly {
    match kind {
        QuotientKind::Fraction => {
            let mut p = Poly::zero();
            for j in 0..dim {
                let mut m = [0u16; 5];
                m[j] = 2;
                m[2] = 1;
                p.add_term(m, 1);
            }
            p
        }
        QuotientKind::Concentration { axis } => {
            let mut m = [0u16; 5];
            m[axis] = 2;
            m[3 + axis] = 1;
            Poly::monomial(m, 1)
        }
    }
}

/// Checks the integer side conditions satisfied by every monomial
/// `κ^b ξ^g η^l` of `P_α`; these are exactly what forces the κ-uniform bound
/// `|ξ^α ∂^α ψ| ≤ Σ |coefficients|`.
fn check_side_conditions(kind: QuotientKind, alpha: [usize; 2], poly: &Poly) -> Result<()> {
    for (mono, coeff) in &poly.terms {
        let g = [mono[0] as usize, mono[1] as usize];
        let l = mono[2] as usize;
        let b = [mono[3] as usize, mono[4] as usize];
        let abs_a = alpha[0] + alpha[1];
        let abs_b = b[0] + b[1];
        let abs_g = g[0] + g[1];
        let per_axis = (0..2).all(|j| alpha[j] + g[j] >= 2 * b[j]);
        let homogeneity = abs_g == 1 + l + abs_b;
        let kappa_budget = match kind {
            QuotientKind::Fraction => abs_a >= abs_b,
            QuotientKind::Concentration { axis } => abs_a + 1 >= abs_b && b[axis] >= 1,
        };
        if !(per_axis && homogeneity && kappa_budget) {
            return Err(Error::model(format!(
                "derivative recursion produced a monomial violating its side conditions: \
                 α = {alpha:?}, ξ^{g:?} η^{l} κ^{b:?} (coeff {coeff})"
            )));
        }
    }
    Ok(())
}

/// Precomputed derivative tables for a quotient symbol up to a maximal order.
#[derive(Debug, Clone)]
pub struct DerivativeRecursion {
    dim: usize,
    kind: QuotientKind,
    max_order: usize,
    tables: BTreeMap<[usize; 2], Poly>,
}

impl DerivativeRecursion {
    /// Builds all tables `P_α` with `|α| ≤ max_order` (capped at `dim + 2`),
    /// verifying the integer side conditions of every polynomial produced.
    pub fn new(dim: usize, kind: QuotientKind, max_order: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::domain(format!("dimension {dim} not in 1..=2")));
        }
        if let QuotientKind::Concentration { axis } = kind {
            if axis >= dim {
                return Err(Error::domain(format!(
                    "concentration axis {axis} out of range for dimension {dim}"
                )));
            }
        }
        if max_order > dim + 2 {
            return Err(Error::domain(format!(
                "derivative tables are provided up to order dim + 2 = {}, requested {max_order}",
                dim + 2
            )));
        }
        let mut tables = BTreeMap::new();
        let base = base_polynomial(dim, kind);
        check_side_conditions(kind, [0, 0], &base)?;
        tables.insert([0usize, 0usize], base);
        for order in 0..max_order {
            let current: Vec<[usize; 2]> = tables
                .keys()
                .filter(|a| a[0] + a[1] == order)
                .copied()
                .collect();
            for alpha in current {
                for s in 0..dim {
                    let mut next = alpha;
                    next[s] += 1;
                    if tables.contains_key(&next) {
                        continue;
                    }
                    let p = advance(&tables[&alpha], order, s, dim);
                    check_side_conditions(kind, next, &p)?;
                    tables.insert(next, p);
                }
            }
        }
        Ok(Self { dim, kind, max_order, tables })
    }

    /// Spatial dimension the tables were built for.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Symbol family.
    pub fn kind(&self) -> QuotientKind {
        self.kind
    }

    /// Largest available derivative order.
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Symbol value `ψ(ξ)` for parameters κ.
    pub fn value(&self, kappa: [f64; 2], xi: [f64; 2]) -> Result<f64> {
        quotient_symbol_value(self.dim, self.kind, kappa, xi)
    }

    /// Exact derivative `∂^α ψ(ξ)` via the polynomial tables.
    pub fn derivative(&self, kappa: [f64; 2], xi: [f64; 2], alpha: [usize; 2]) -> Result<f64> {
        check_inputs(self.dim, self.kind, kappa, xi)?;
        if self.dim == 1 && alpha[1] != 0 {
            return Err(Error::domain(
                "second derivative axis unavailable in one dimension".to_string(),
            ));
        }
        let order = alpha[0] + alpha[1];
        if order > self.max_order {
            return Err(Error::domain(format!(
                "derivative order {order} exceeds the table bound {}",
                self.max_order
            )));
        }
        let poly = &self.tables[&alpha];
        let r = norm(xi);
        let eta = 1.0 / r;
        let d = denominator(self.dim, kappa, xi);
        Ok(poly.eval(xi, eta, kappa) / d.powi(order as i32 + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_dimensional_fraction_matches_closed_form() {
        let rec = DerivativeRecursion::new(1, QuotientKind::Fraction, 3).unwrap();
        // f(ξ) = 1/(1 + κ|ξ|): f' = -κ sgn(ξ)/(1+κ|ξ|)², f'' = 2κ²/(1+κ|ξ|)³.
        for &kappa in &[0.0, 0.5, 3.0, 1e4] {
            for &xi in &[-4.0f64, -0.3, 0.7, 25.0] {
                let k = [kappa, 0.0];
                let x = [xi, 0.0];
                let denom = 1.0 + kappa * xi.abs();
                assert_relative_eq!(
                    rec.value(k, x).unwrap(),
                    1.0 / denom,
                    max_relative = 1e-13
                );
                assert_relative_eq!(
                    rec.derivative(k, x, [1, 0]).unwrap(),
                    -kappa * xi.signum() / (denom * denom),
                    max_relative = 1e-12
                );
                assert_relative_eq!(
                    rec.derivative(k, x, [2, 0]).unwrap(),
                    2.0 * kappa * kappa / denom.powi(3),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn one_dimensional_concentration_matches_closed_form() {
        let rec = DerivativeRecursion::new(1, QuotientKind::Concentration { axis: 0 }, 3).unwrap();
        // g(ξ) = κ|ξ|/(1 + κ|ξ|): g' = κ sgn(ξ)/(1+κ|ξ|)².
        for &kappa in &[0.0, 2.0, 1e3] {
            for &xi in &[-2.0f64, 0.4, 9.0] {
                let k = [kappa, 0.0];
                let x = [xi, 0.0];
                let denom = 1.0 + kappa * xi.abs();
                assert_relative_eq!(
                    rec.value(k, x).unwrap(),
                    kappa * xi.abs() / denom,
                    max_relative = 1e-13,
                    epsilon = 1e-15
                );
                assert_relative_eq!(
                    rec.derivative(k, x, [1, 0]).unwrap(),
                    kappa * xi.signum() / (denom * denom),
                    max_relative = 1e-12,
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn mixed_derivatives_are_path_independent_on_the_surface() {
        // The recursion simplifies with Σξ_j²η² = 1, which holds only at
        // η = 1/|ξ|; the two descent orders may differ as formal polynomials
        // but must evaluate identically there.
        let base = base_polynomial(2, QuotientKind::Fraction);
        let via_x_then_y = advance(&advance(&base, 0, 0, 2), 1, 1, 2);
        let via_y_then_x = advance(&advance(&base, 0, 1, 2), 1, 0, 2);
        for &kappa in &[[0.0, 0.0], [1.0, 3.0], [1e3, 0.5]] {
            for &xi in &[[1.0f64, 2.0], [-0.3, 0.4], [10.0, -7.0]] {
                let eta = 1.0 / xi[0].hypot(xi[1]);
                let a = via_x_then_y.eval(xi, eta, kappa);
                let b = via_y_then_x.eval(xi, eta, kappa);
                let scale = a.abs().max(b.abs()).max(1e-12);
                assert!(
                    (a - b).abs() <= 1e-12 * scale,
                    "κ={kappa:?} ξ={xi:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn two_dimensional_tables_agree_with_finite_differences() {
        for kind in [QuotientKind::Fraction, QuotientKind::Concentration { axis: 1 }] {
            let rec = DerivativeRecursion::new(2, kind, 4).unwrap();
            let kappa = [3.0, 0.25];
            for &xi in &[[1.3, -0.7], [-2.0, 0.1], [0.5, 4.0]] {
                for alpha in [[1, 0], [0, 1], [1, 1], [2, 0], [0, 2], [2, 1], [2, 2]] {
                    // Nested central differences lose accuracy with order:
                    // scale the step and tolerance accordingly.
                    let (h, tol) = match alpha[0] + alpha[1] {
                        0..=2 => (1e-3, 2e-5),
                        3 => (4e-3, 1e-3),
                        _ => (1e-2, 5e-3),
                    };
                    let exact = rec.derivative(kappa, xi, alpha).unwrap();
                    let fd = nested_fd(&rec, kappa, xi, alpha, h);
                    let denom = exact.abs().max(0.1);
                    assert!(
                        (exact - fd).abs() / denom < tol,
                        "{kind:?} α={alpha:?} ξ={xi:?}: exact {exact} vs fd {fd}"
                    );
                }
            }
        }
    }

    /// Nested central differences of the closed-form value (test oracle).
    fn nested_fd(
        rec: &DerivativeRecursion,
        kappa: [f64; 2],
        xi: [f64; 2],
        alpha: [usize; 2],
        h: f64,
    ) -> f64 {
        if alpha == [0, 0] {
            return rec.value(kappa, xi).unwrap();
        }
        let s = if alpha[0] > 0 { 0 } else { 1 };
        let mut lo = alpha;
        lo[s] -= 1;
        let mut xp = xi;
        xp[s] += h;
        let mut xm = xi;
        xm[s] -= h;
        (nested_fd(rec, kappa, xp, lo, h) - nested_fd(rec, kappa, xm, lo, h)) / (2.0 * h)
    }

    #[test]
    fn scaled_derivatives_stay_bounded_for_extreme_parameters() {
        let rec = DerivativeRecursion::new(2, QuotientKind::Fraction, 2).unwrap();
        let mut worst = 0.0f64;
        for &kappa in &[[1e6, 1e6], [1e6, 0.0], [0.0, 1e6], [1.0, 1e6]] {
            for exp in -20..=20 {
                let r = 2.0f64.powi(exp);
                for t in 0..16 {
                    let th = std::f64::consts::PI * t as f64 / 8.0;
                    let xi = [r * th.cos(), r * th.sin()];
                    for alpha in [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [0, 2]] {
                        let d = rec.derivative(kappa, xi, alpha).unwrap();
                        let w = xi[0].abs().powi(alpha[0] as i32)
                            * xi[1].abs().powi(alpha[1] as i32);
                        worst = worst.max((w * d).abs());
                    }
                }
            }
        }
        assert!(worst < 20.0, "κ-uniform scaled derivative bound broke: {worst}");
    }

    #[test]
    fn invalid_requests_are_rejected() {
        let rec = DerivativeRecursion::new(2, QuotientKind::Fraction, 2).unwrap();
        assert!(rec.derivative([1.0, 1.0], [0.0, 0.0], [1, 0]).is_err());
        assert!(rec.derivative([-1.0, 1.0], [1.0, 0.0], [1, 0]).is_err());
        assert!(rec.derivative([1.0, 1.0], [1.0, 0.0], [2, 1]).is_err());
        assert!(DerivativeRecursion::new(2, QuotientKind::Concentration { axis: 2 }, 2).is_err());
        assert!(DerivativeRecursion::new(2, QuotientKind::Fraction, 5).is_err());
        assert!(DerivativeRecursion::new(1, QuotientKind::Fraction, 2)
            .unwrap()
            .derivative([1.0, 0.0], [1.0, 0.0], [0, 1])
            .is_err());
    }
}
