//! Incompressible limit for a general strictly increasing potential `V`.
//!
//! With `𝓗(z) = ∫_z^R u V(u) du`, the transition-layer profile is
//!
//! ```text
//! n(r) = R²(V(R)−λ)/(2δ) ln(r/R) + (R²−r²)(V(R)−λ)/(4δ) + (1/δ) ∫_r^R 𝓗(z)/z dz
//! ```
//!
//! and the relative width `τ = (R² − R0²)/R²` of the layer solves
//! `𝓕(τ) = 2δ`. For `V = r²` everything reduces to the [`crate::limit`]
//! quantities, with `𝓕(τ) = R⁴ f(τ)/4`.

use crate::model::{h_integral, h_over_z_integral, PotentialSpec};
use crate::{quadrature, roots, Error, Result};

const TAU_MAX: f64 = 1.0 - 1e-12;
const BRACKET_SERIES: f64 = 1e-4;

/// `n(r)` and `n'(r)` on `(0, R]`.
pub fn solution_n_general(r: f64, big_r: f64, lambda: f64, delta: f64, v: &PotentialSpec) -> Result<(f64, f64)> {
    if !(r > 0.0) || r > big_r * (1.0 + 1e-14) {
        return Err(Error::Domain(format!("need 0 < r <= R, got r = {r}, R = {big_r}")));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let r = r.min(big_r);
    let a = v.value(big_r) - lambda;
    let big_r2 = big_r * big_r;
    let value = big_r2 * a / (2.0 * delta) * (r / big_r).ln()
        + (big_r2 - r * r) * a / (4.0 * delta)
        + h_over_z_integral(r, big_r, v)? / delta;
    let slope = big_r2 * a / (2.0 * delta * r) - r * a / (2.0 * delta) - h_integral(r, big_r, v)? / (delta * r);
    Ok((value, slope))
}

/// `ln(1−τ)/τ + 1`, by series for small `τ`.
fn log_bracket(tau: f64) -> f64 {
    if tau < BRACKET_SERIES {
        -tau / 2.0 - tau * tau / 3.0 - tau.powi(3) / 4.0
    } else {
        (-tau).ln_1p() / tau + 1.0
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau must lie in [0, 1), got {tau}")));
    }
    Ok(())
}

/// `𝓕(τ) = 𝓗(R0)(ln(1−τ)/τ + 1) + 2 ∫_{R0}^R 𝓗(z)/z dz`, `R0 = R√(1−τ)`.
///
/// Evaluated as the single integral
/// `∫_{R0}^R u (V(u) − V(R)) (ln(1−τ)/τ + 1 + 2 ln(u/R0)) du`, which is the
/// same quantity because `𝓕` does not change when a constant is added to `V`.
pub fn f_tau(tau: f64, big_r: f64, v: &PotentialSpec) -> Result<f64> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let r0 = big_r * (1.0 - tau).sqrt();
    let c = log_bracket(tau);
    let vr = v.value(big_r);
    quadrature::quad(|u| u * (v.value(u) - vr) * (c + 2.0 * (u / r0).ln()), r0, big_r)
}

/// `(R²τ/2) V(R0) − 𝓗(R0)`; negative for increasing `V`.
pub fn aux_bracket(tau: f64, big_r: f64, v: &PotentialSpec) -> Result<f64> {
    check_tau(tau)?;
    let r0 = big_r * (1.0 - tau).sqrt();
    Ok(big_r * big_r * tau / 2.0 * v.value(r0) - h_integral(r0, big_r, v)?)
}

/// `𝓕'(τ) = (ln(1−τ)/τ + 1) · ((R²τ/2) V(R0) − 𝓗(R0)) / τ`.
pub fn f_tau_derivative(tau: f64, big_r: f64, v: &PotentialSpec) -> Result<f64> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(log_bracket(tau) * aux_bracket(tau, big_r, v)? / tau)
}

/// Root of `𝓕(τ) = 2δ` in `(0, 1)`.
pub fn solve_tau(big_r: f64, delta: f64, v: &PotentialSpec) -> Result<f64> {
    if !(big_r > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("need R > 0 and delta > 0, got R = {big_r}, delta = {delta}")));
    }
    let target = 2.0 * delta;
    let top = f_tau(TAU_MAX, big_r, v)?;
    if !(top > target) {
        return Err(Error::Infeasible(format!(
            "2 delta = {target} is outside the range of F (sup {top}) for R = {big_r}"
        )));
    }
    let g = |t: f64| f_tau(t, big_r, v).map_or(f64::NAN, |f| f - target);
    let root = roots::bisect(g, 0.0, TAU_MAX, 1e-13)?;
    let dg = |t: f64| f_tau_derivative(t, big_r, v).unwrap_or(f64::NAN);
    let polished = roots::newton_polish(g, dg, root.x, 0.0, TAU_MAX);
    Ok(if g(polished).abs() <= g(root.x).abs() { polished } else { root.x })
}

/// `λ = V(R) − 2𝓗(R0)/(R² − R0²)` and `R0`.
pub fn lambda_general(big_r: f64, delta: f64, v: &PotentialSpec) -> Result<(f64, f64)> {
    let tau = solve_tau(big_r, delta, v)?;
    lambda_from_tau(tau, big_r, v)
}

fn lambda_from_tau(tau: f64, big_r: f64, v: &PotentialSpec) -> Result<(f64, f64)> {
    let r0 = big_r * (1.0 - tau).sqrt();
    let width = big_r * big_r * tau;
    Ok((v.value(big_r) - 2.0 * h_integral(r0, big_r, v)? / width, r0))
}

/// Small-δ approximations: the pressure jump `(∛12/2) δ^{1/3} V'(R)^{2/3}`
/// and the layer width `R² − R0² ≈ 2∛12 δ^{1/3} R / ∛V'(R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpAsymptote {
    pub jump: f64,
    pub width: f64,
    pub tau: f64,
}

pub fn jump_general_asymptote(big_r: f64, delta: f64, v: &PotentialSpec) -> JumpAsymptote {
    let dv = v.slope(big_r);
    let c12 = 12f64.cbrt();
    let tau = (96.0 * delta / (big_r.powi(3) * dv)).cbrt();
    JumpAsymptote {
        jump: c12 / 2.0 * delta.cbrt() * dv.powf(2.0 / 3.0),
        width: 2.0 * c12 * delta.cbrt() * big_r / dv.cbrt(),
        tau,
    }
}

#[derive(Debug, Clone)]
pub struct GeneralLimitProfile {
    pub r_support: f64,
    pub tau: f64,
    pub r0: f64,
    pub lambda: f64,
    pub delta: f64,
    pub jump_asymptote: f64,
    pub potential: PotentialSpec,
}

impl GeneralLimitProfile {
    pub fn new(big_r: f64, delta: f64, v: PotentialSpec) -> Result<Self> {
        let tau = solve_tau(big_r, delta, &v)?;
        let (lambda, r0) = lambda_from_tau(tau, big_r, &v)?;
        Ok(Self {
            r_support: big_r,
            tau,
            r0,
            lambda,
            delta,
            jump_asymptote: jump_general_asymptote(big_r, delta, &v).jump,
            potential: v,
        })
    }

    pub fn density_at(&self, r: f64) -> Result<f64> {
        if r <= self.r0 {
            Ok(1.0)
        } else if r >= self.r_support {
            Ok(0.0)
        } else {
            Ok(solution_n_general(r, self.r_support, self.lambda, self.delta, &self.potential)?.0)
        }
    }

    /// Pressure `V(R) − V(r) − λ` inside the saturated core.
    pub fn pressure_at(&self, r: f64) -> f64 {
        if r < self.r0 {
            self.potential.value(self.r_support) - self.potential.value(r) - self.lambda
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralRow {
    pub delta: f64,
    pub tau: f64,
    pub r0: f64,
    pub lambda: f64,
    pub lambda_asymptote: f64,
    pub ratio: f64,
}

/// One row per δ at fixed `R`.
pub fn general_sweep(big_r: f64, deltas: &[f64], v: &PotentialSpec) -> Result<Vec<GeneralRow>> {
    deltas
        .iter()
        .map(|&delta| {
            let tau = solve_tau(big_r, delta, v)?;
            let (lambda, r0) = lambda_from_tau(tau, big_r, v)?;
            let lambda_asymptote = jump_general_asymptote(big_r, delta, v).jump;
            Ok(GeneralRow { delta, tau, r0, lambda, lambda_asymptote, ratio: lambda / lambda_asymptote })
        })
        .collect()
}
