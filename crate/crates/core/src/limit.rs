//! Incompressible limit `γ → ∞` for the quadratic potential `V(r) = r²`.
//!
//! The limit density is `1` on `[0, R0]`, follows the explicit profile `u`
//! on `[R0, R]` and vanishes beyond. Everything is determined by the root
//! `x_c ∈ (0,1)` of `f(x) = 8δ/R⁴` with
//! `f(x) = (1−x) ln(1−x) − x²/2 + x`.

use rayon::prelude::*;

use crate::grid::{build_grid, DensityField};
use crate::model::Params;
use crate::stationary::{find_radius_for_mass, resample, StationaryOptions};
use crate::{par, roots, Error, Result};

/// `u(r)` and `u'(r)` for the reference profile with multiplier `lambda_u`.
pub fn reference_u(r: f64, big_r: f64, lambda_u: f64, delta: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || r > big_r * (1.0 + 1e-14) {
        return Err(Error::Domain(format!("reference profile needs 0 < r <= R, got r = {r}, R = {big_r}")));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let r2 = r * r;
    let big_r2 = big_r * big_r;
    let a = big_r2 - 2.0 * lambda_u;
    let diff = r2 - big_r2;
    let value = big_r2 / (4.0 * delta) * a * (r / big_r).ln()
        + diff * diff / (16.0 * delta)
        + a / (8.0 * delta) * (big_r2 - r2);
    let slope = (big_r2 - r2) * (big_r2 - r2 - 2.0 * lambda_u) / (4.0 * delta * r);
    Ok((value, slope))
}

const SERIES_CUTOFF: f64 = 0.05;

/// `f(x) = (1−x) ln(1−x) − x²/2 + x` on `[0, 1]`.
pub fn f_xc(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("f is defined on [0, 1), got {x}")));
    }
    Ok(f_unchecked(x))
}

fn f_unchecked(x: f64) -> f64 {
    if x >= 1.0 {
        return 0.5;
    }
    if x < SERIES_CUTOFF {
        // Σ_{k≥3} x^k / (k(k−1))
        let mut term = x * x * x;
        let mut sum = 0.0f64;
        let mut k = 3.0;
        while term > 1e-18 * sum.max(f64::MIN_POSITIVE) || k < 4.0 {
            sum += term / (k * (k - 1.0));
            term *= x;
            k += 1.0;
            if k > 60.0 {
                break;
            }
        }
        return sum;
    }
    (1.0 - x) * (-x).ln_1p() - 0.5 * x * x + x
}

/// `f'(x) = −ln(1−x) − x`.
pub fn f_xc_derivative(x: f64) -> f64 {
    -(-x).ln_1p() - x
}

/// Root `x_c ∈ (0,1)` of `f(x) = 8δ/R⁴`; requires `16δ < R⁴`.
pub fn solve_xc(big_r: f64, delta: f64) -> Result<f64> {
    if !(big_r > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("need R > 0 and delta > 0, got R = {big_r}, delta = {delta}")));
    }
    let target = 8.0 * delta / big_r.powi(4);
    if !(target < 0.5) {
        return Err(Error::Infeasible(format!(
            "no critical profile: 16 delta = {} >= R^4 = {}",
            16.0 * delta,
            big_r.powi(4)
        )));
    }
    let g = |x: f64| f_unchecked(x) - target;
    let root = roots::bisect(g, 0.0, 1.0, 1e-14)?;
    let polished = roots::newton_polish(g, f_xc_derivative, root.x, 0.0, 1.0);
    Ok(if g(polished).abs() <= g(root.x).abs() { polished } else { root.x })
}

/// `M(R) = R⁶ x_c³ / (96 δ)`.
pub fn mass_formula(big_r: f64, delta: f64) -> Result<f64> {
    let xc = solve_xc(big_r, delta)?;
    Ok(big_r.powi(6) * xc.powi(3) / (96.0 * delta))
}

/// `m > 72 √δ`, the mass range in which existence of the limit profile is
/// proved. The mass map is increasing on its whole domain, so
/// [`radius_for_mass`] also accepts smaller masses.
pub fn within_existence_hypothesis(m: f64, delta: f64) -> bool {
    m > 72.0 * delta.sqrt()
}

/// Infimum of the limit mass map, approached as `R⁴ ↓ 16δ`.
pub fn minimal_mass(delta: f64) -> f64 {
    2.0 / 3.0 * delta.sqrt()
}

/// Invert `R ↦ M(R)`.
pub fn radius_for_mass(m: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive (got {delta})")));
    }
    if !(m > minimal_mass(delta)) || !m.is_finite() {
        return Err(Error::Infeasible(format!(
            "mass {m} is below the smallest limit mass {} for delta = {delta}",
            minimal_mass(delta)
        )));
    }
    let r_min = (16.0 * delta).powf(0.25) * (1.0 + 1e-12);
    let g = |r: f64| -> Result<f64> { Ok(mass_formula(r, delta)? - m) };
    let guess = (2.0 * m).sqrt();
    let mut lo = (0.9 * guess).max(r_min);
    let mut hi = (1.5 * guess).max(lo * 1.5);
    while g(lo)? > 0.0 {
        lo = (0.5 * lo).max(r_min);
        if lo == r_min {
            break;
        }
    }
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::BracketFailure(format!("no radius found for mass {m}")));
        }
    }
    let root = roots::illinois(g, lo, hi, 1e-13 * hi, 1e-14 * m, 300)?;
    Ok(root.x)
}

/// [`radius_for_mass`] restricted to `m > 72 √δ`.
pub fn radius_for_mass_strict(m: f64, delta: f64) -> Result<f64> {
    if !within_existence_hypothesis(m, delta) {
        return Err(Error::Infeasible(format!("mass {m} does not exceed 72 sqrt(delta) = {}", 72.0 * delta.sqrt())));
    }
    radius_for_mass(m, delta)
}

/// `∛6 R^{2/3} δ^{1/3}`, the small-δ approximation of the pressure jump.
pub fn jump_asymptotic(big_r: f64, delta: f64) -> f64 {
    6f64.cbrt() * big_r.powf(2.0 / 3.0) * delta.cbrt()
}

#[derive(Debug, Clone)]
pub struct IncompressibleProfile {
    pub r_support: f64,
    pub r0: f64,
    pub lambda_c: f64,
    pub x_c: f64,
    /// Pressure jump at `R0`, equal to `λ_c`.
    pub jump: f64,
    pub mass: f64,
    pub delta: f64,
    pub n_inc: DensityField,
    pub p_inc: DensityField,
    pub within_hypothesis: bool,
}

impl IncompressibleProfile {
    pub fn density_at(&self, r: f64) -> f64 {
        if r <= self.r0 {
            1.0
        } else if r >= self.r_support {
            0.0
        } else {
            reference_u(r, self.r_support, self.lambda_c, self.delta).map_or(0.0, |v| v.0)
        }
    }

    pub fn slope_at(&self, r: f64) -> f64 {
        if r <= self.r0 || r >= self.r_support {
            0.0
        } else {
            reference_u(r, self.r_support, self.lambda_c, self.delta).map_or(0.0, |v| v.1)
        }
    }

    pub fn pressure_at(&self, r: f64) -> f64 {
        if r < self.r0 {
            self.r_support.powi(2) - r * r - self.lambda_c
        } else {
            0.0
        }
    }
}

/// Limit profile with support radius `R`, sampled on `[0, r_out]`.
pub fn profile_for_radius(big_r: f64, delta: f64, r_out: f64, n_nodes: usize) -> Result<IncompressibleProfile> {
    if r_out < big_r {
        return Err(Error::InvalidArgument(format!("r_out = {r_out} is smaller than R = {big_r}")));
    }
    let x_c = solve_xc(big_r, delta)?;
    let lambda_c = big_r * big_r * x_c / 2.0;
    let r0 = big_r * (1.0 - x_c).sqrt();
    let mass = big_r.powi(6) * x_c.powi(3) / (96.0 * delta);
    let grid = build_grid(r_out, n_nodes)?;
    let mut prof = IncompressibleProfile {
        r_support: big_r,
        r0,
        lambda_c,
        x_c,
        jump: lambda_c,
        mass,
        delta,
        n_inc: DensityField::constant(grid, 0.0)?,
        p_inc: DensityField::constant(grid, 0.0)?,
        within_hypothesis: within_existence_hypothesis(mass, delta),
    };
    prof.n_inc = DensityField::from_fn(grid, |r| prof.density_at(r))?;
    prof.p_inc = DensityField::from_fn(grid, |r| prof.pressure_at(r))?;
    Ok(prof)
}

/// Limit profile carrying mass `m`.
pub fn build_profile(m: f64, delta: f64, r_out: f64, n_nodes: usize) -> Result<IncompressibleProfile> {
    let big_r = radius_for_mass(m, delta)?;
    let mut prof = profile_for_radius(big_r, delta, r_out, n_nodes)?;
    prof.mass = m;
    Ok(prof)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub r_gamma: f64,
    /// `‖n_γ − n_inc‖∞` on the common grid.
    pub sup_err: f64,
    pub r_err: f64,
    /// `max(0, n_γ(R0))^γ`.
    pub p_at_r0: f64,
    pub lambda_c: f64,
    pub jump_asymptote: f64,
}

#[derive(Debug)]
pub struct GammaSweep {
    pub limit: IncompressibleProfile,
    pub rows: Vec<(f64, Result<SweepRow>)>,
}

/// Compare finite-γ stationary states of mass `m` with the limit profile.
/// Each γ is solved independently; failures are kept per row.
pub fn gamma_sweep(m: f64, delta: f64, gammas: &[f64], n_nodes: usize) -> Result<GammaSweep> {
    if gammas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("gammas must be increasing".into()));
    }
    let big_r = radius_for_mass(m, delta)?;
    let r_out = 1.2 * big_r;
    let limit = {
        let mut p = profile_for_radius(big_r, delta, r_out, n_nodes)?;
        p.mass = m;
        p
    };
    let opts = StationaryOptions::new(n_nodes)?;
    let jump_asymptote = jump_asymptotic(big_r, delta);
    let one = |gamma: f64| -> Result<SweepRow> {
        let p = Params::new(gamma, delta, 0.0, m, 4.0 * r_out)?;
        let prof = find_radius_for_mass(m, &p, &opts)?;
        let on_common = resample(&prof.n, limit.n_inc.grid())?;
        let sup_err = on_common.sup_distance(&limit.n_inc)?;
        let n_r0 = if limit.r0 <= prof.r_support { prof.n.interpolate(limit.r0) } else { 0.0 };
        Ok(SweepRow {
            gamma,
            r_gamma: prof.r_support,
            sup_err,
            r_err: (prof.r_support - big_r).abs(),
            p_at_r0: n_r0.max(0.0).powf(gamma),
            lambda_c: limit.lambda_c,
            jump_asymptote,
        })
    };
    let rows = par::pool().install(|| gammas.par_iter().map(|&g| (g, one(g))).collect());
    Ok(GammaSweep { limit, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRow {
    pub delta: f64,
    pub lambda_c: f64,
    pub asymptote: f64,
    pub ratio: f64,
}

/// `λ_c / (∛6 R^{2/3} δ^{1/3})` at fixed `R` over several `δ`.
pub fn delta_sweep(big_r: f64, deltas: &[f64]) -> Result<Vec<DeltaRow>> {
    deltas
        .iter()
        .map(|&delta| {
            let xc = solve_xc(big_r, delta)?;
            let lambda_c = big_r * big_r * xc / 2.0;
            let asymptote = jump_asymptotic(big_r, delta);
            Ok(DeltaRow { delta, lambda_c, asymptote, ratio: lambda_c / asymptote })
        })
        .collect()
}
