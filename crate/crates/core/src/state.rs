//! Bounds for the binary state channel and the Gaussian state channel.

use alloc::vec;

pub use crate::bound::{Argmax, BoundResult, GaussianAux};
use crate::info::{capf, h2f, starf};
use crate::models::{BinaryStateModel, GaussianStateModel};
use crate::optim::{maximize_box, quad_roots, BoxSpec, Maximum, DEFAULT_REFINE_ROUNDS};
use crate::{Error, Result};

/// Grid over the correlation coefficient in [`gaussian_inner_full`].
pub const RHO_GRID_POINTS: usize = 2049;
/// Grid over each feasible γ interval in [`gaussian_inner_full`].
pub const GAMMA_GRID_POINTS: usize = 513;

/// `ε (1-β) h2(a) + h2(ζ)`.
pub fn binary_state_outer(model: &BinaryStateModel) -> BoundResult {
    let (a, z, b, e) = (model.a().get(), model.zeta().get(), model.beta().get(), model.epsilon().get());
    BoundResult::closed_form(e * (1.0 - b) * h2f(a) + h2f(z), Argmax::None, 0.0)
}

/// `[ε h2(a⋆ζ) - β h2(a) + (1-ε) h2(ζ)]⁺`, attained with `X = V = V' ⊕ A`.
pub fn binary_state_inner(model: &BinaryStateModel) -> BoundResult {
    let (a, z, b, e) = (model.a().get(), model.zeta().get(), model.beta().get(), model.epsilon().get());
    let value = e * h2f(starf(a, z)) - b * h2f(a) + (1.0 - e) * h2f(z);
    BoundResult::closed_form(value, Argmax::None, 0.0)
}

fn check_order(model: &GaussianStateModel) -> Result<()> {
    if model.n1() > model.n2() {
        return Err(Error::NoiseOrder { n1: model.n1(), n2: model.n2() });
    }
    Ok(())
}

/// Received signal power `P + Q + 2ρ√(PQ)` when `X` and `S` have correlation
/// `ρ`.
fn coherent_power(model: &GaussianStateModel, rho: f64) -> f64 {
    model.p() + model.q() + 2.0 * rho * libm::sqrt(model.p() * model.q())
}

/// `[C(s/N1) - C(s/N2)]⁺` with `s` the fully coherent power.
pub fn gaussian_outer(model: &GaussianStateModel) -> Result<BoundResult> {
    check_order(model)?;
    let s = coherent_power(model, 1.0);
    let value = capf(s / model.n1()) - capf(s / model.n2());
    Ok(BoundResult::closed_form(value, Argmax::None, 0.0))
}

/// Largest correlation the inner bound allows, from
/// `ρ² = 1 - [N1 - N1² / (P + Q + 2√(PQ) + N1)] / P`, clamped to `[0, 1]`.
/// Returns `(0, true)` when `P = 0` leaves it undefined.
pub fn max_correlation(model: &GaussianStateModel) -> (f64, bool) {
    let (p, n1) = (model.p(), model.n1());
    if p == 0.0 {
        return (0.0, true);
    }
    let s = coherent_power(model, 1.0);
    let rho2 = 1.0 - (n1 - n1 * n1 / (s + n1)) / p;
    (libm::sqrt(rho2.clamp(0.0, 1.0)), false)
}

/// Coefficients `(a, b, c)` of the quadratic in γ that must be non-negative.
pub fn gamma_quadratic(model: &GaussianStateModel, rho: f64) -> (f64, f64, f64) {
    let (p, q, n1) = (model.p(), model.q(), model.n1());
    let r = libm::sqrt(p * q);
    let w = 1.0 - rho * rho;
    let a = -q * (w * p + n1);
    let b = 2.0 * (w * p * q - rho * r * n1);
    let c = p * (w * (p + 2.0 * rho * r) - rho * rho * n1);
    (a, b, c)
}

/// `(Δ1, Δ2)` at `(ρ, γ)`. A vanishing numerator counts as zero SNR even when
/// the denominator also vanishes.
pub fn gaussian_deltas(model: &GaussianStateModel, rho: f64, gamma: f64) -> (f64, f64) {
    let (p, q) = (model.p(), model.q());
    let r = libm::sqrt(p * q);
    let num = {
        let t = p + gamma * q + rho * (1.0 + gamma) * r;
        t * t
    };
    let common = (1.0 - rho * rho) * (1.0 - gamma) * (1.0 - gamma) * p * q;
    let power = p + gamma * gamma * q + 2.0 * rho * gamma * r;
    let delta = |n: f64| {
        if num == 0.0 {
            0.0
        } else {
            num / (common + n * power)
        }
    };
    (delta(model.n1()), delta(model.n2()))
}

/// `½ [log2(1+Δ1) - log2(1+Δ2)]⁺`.
pub fn gaussian_inner_objective(model: &GaussianStateModel, rho: f64, gamma: f64) -> f64 {
    let (d1, d2) = gaussian_deltas(model, rho, gamma);
    (0.5 * (libm::log2(1.0 + d1) - libm::log2(1.0 + d2))).max(0.0)
}

fn aux_at(model: &GaussianStateModel, rho: f64, gamma: f64, rho_undefined: bool) -> GaussianAux {
    let (delta1, delta2) = gaussian_deltas(model, rho, gamma);
    let (quad_a, quad_b, quad_c) = gamma_quadratic(model, rho);
    GaussianAux { rho, gamma, mu_bar: delta1 >= delta2, delta1, delta2, quad_a, quad_b, quad_c, rho_undefined }
}

/// Inner bound at `γ = 1` and the largest admissible correlation:
/// `[C(s(ρ)/N1) - C(s(ρ)/N2)]⁺`.
pub fn gaussian_inner_closed(model: &GaussianStateModel) -> Result<BoundResult> {
    check_order(model)?;
    let (rho, undefined) = max_correlation(model);
    let s = coherent_power(model, rho);
    let value = capf(s / model.n1()) - capf(s / model.n2());
    let aux = aux_at(model, rho, 1.0, undefined);
    let (a, b, c) = (aux.quad_a, aux.quad_b, aux.quad_c);
    Ok(BoundResult::closed_form(value, Argmax::Gaussian(aux), a + b + c))
}

/// Admissible γ interval for one correlation.
fn gamma_interval(model: &GaussianStateModel, rho: f64) -> Option<(f64, f64)> {
    let (a, b, c) = gamma_quadratic(model, rho);
    if a < 0.0 {
        quad_roots(a, b, c).ok()?
    } else if b == 0.0 && c >= 0.0 {
        // Q = 0: γ does not enter the bound.
        Some((1.0, 1.0))
    } else {
        None
    }
}

/// Best γ for one correlation, or `None` when no γ satisfies the quadratic
/// condition.
fn best_gamma(model: &GaussianStateModel, rho: f64) -> Option<(f64, f64)> {
    let (g1, g2) = gamma_interval(model, rho)?;
    let spec = BoxSpec::new(vec![(g1, g2)], GAMMA_GRID_POINTS, DEFAULT_REFINE_ROUNDS).ok()?;
    match maximize_box(|g| gaussian_inner_objective(model, rho, g[0]), |_| true, &spec).ok()? {
        Maximum::Found { point, value } => Some((point[0], value)),
        Maximum::Infeasible => None,
    }
}

/// Joint maximization over `(ρ, γ)` of [`gaussian_inner_objective`] subject
/// to the quadratic condition on γ. Correlations whose γ interval is empty
/// are skipped. The closed-form point is always a candidate, so the result
/// never falls below [`gaussian_inner_closed`].
pub fn gaussian_inner_full(model: &GaussianStateModel) -> Result<BoundResult> {
    let closed = gaussian_inner_closed(model)?;
    if model.p() == 0.0 {
        return Ok(BoundResult { certified: false, ..closed });
    }
    let spec = BoxSpec::new(vec![(0.0, 1.0)], RHO_GRID_POINTS, DEFAULT_REFINE_ROUNDS)?;
    let searched = maximize_box(
        |r| best_gamma(model, r[0]).map_or(f64::NEG_INFINITY, |(_, v)| v),
        |r| gamma_interval(model, r[0]).is_some(),
        &spec,
    )?;
    let mut best = closed.clone();
    best.certified = false;
    if let Maximum::Found { point, value } = searched {
        if value > closed.rk {
            let rho = point[0];
            let (gamma, value) = best_gamma(model, rho).expect("feasible by construction");
            let aux = aux_at(model, rho, gamma, false);
            let slack = aux.quad_a * gamma * gamma + aux.quad_b * gamma + aux.quad_c;
            best = BoundResult::searched(value, Argmax::Gaussian(aux), slack);
        }
    }
    Ok(best)
}
