//! Numerical checks numbered 1 to 11, shared by `chradial verify` and the
//! acceptance test target.
//!
//! Every tolerance is multiplied by a scale factor, and acceptance bands are
//! widened or narrowed about their midpoint by the same factor, so a scale
//! well below one turns passing checks into failures.

use std::time::Instant;

use crate::evolution::{self, EvolutionConfig};
use crate::general::{self, GeneralLimitProfile};
use crate::grid::{build_grid, DensityField};
use crate::limit;
use crate::model::{Params, PotentialSpec};
use crate::stationary::{find_lambda, solve_bvp_given_lambda, StationaryOptions};
use crate::{quadrature, Result};

use super::config::{Command, RunConfig};

pub const ALL: [usize; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

#[derive(Debug, Clone)]
pub struct Check {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {} ({:.2} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Tol(f64);

impl Tol {
    fn of(self, x: f64) -> f64 {
        x * self.0
    }

    fn band(self, lo: f64, hi: f64) -> (f64, f64) {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo) * self.0;
        (mid - half, mid + half)
    }
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "closed-form stationary profile",
        2 => "multiplier bisection",
        3 => "x_c root and bounds",
        4 => "limit mass formula",
        5 => "pressure jump asymptote",
        6 => "general potential reduces to r^2",
        7 => "general potential asymptote",
        8 => "mass conservation and energy dissipation",
        9 => "long-time convergence to the stationary state",
        10 => "incompressible limit sweep",
        11 => "growth replica plateau",
        _ => "unknown",
    }
}

/// Run one check; solver errors count as failures.
pub fn run_check(id: usize, scale: f64) -> Check {
    let tol = Tol(scale);
    let start = Instant::now();
    let outcome = match id {
        1 => closed_form(tol),
        2 => bisection(tol),
        3 => xc_root(tol),
        4 => mass_formula(tol),
        5 => jump_asymptote(tol),
        6 => general_reduces(tol),
        7 => general_asymptote(tol),
        8 => conservation(tol),
        9 => long_time(tol),
        10 => limit_sweep(tol),
        11 => replica(tol),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { id, title: title(id), pass, detail, seconds }
}

/// Run `ids` in order, calling `report` after each.
pub fn run_checks(ids: &[usize], scale: f64, mut report: impl FnMut(&Check)) -> Vec<Check> {
    ids.iter()
        .map(|&id| {
            let c = run_check(id, scale);
            report(&c);
            c
        })
        .collect()
}

type Outcome = Result<(bool, String)>;

fn closed_form(tol: Tol) -> Outcome {
    let big_r = 1.0;
    let p = Params::new(4.0, 0.01, 0.0, 1.0, 2.0)?;
    let opts = StationaryOptions::new(1000)?.extrapolated();
    let start = Instant::now();
    let s = solve_bvp_given_lambda(big_r, big_r * big_r, &p, &opts)?;
    let secs = start.elapsed().as_secs_f64();
    let exact = |r: f64| (r.powi(4) - big_r.powi(4)) / (16.0 * p.delta);
    let err = max_error(&s.n, exact);
    let pass = err < tol.of(1e-6) && secs < 1.0;
    Ok((pass, format!("max nodal error {err:.3e} (< {:.1e}), solve {secs:.3} s (< 1 s)", tol.of(1e-6))))
}

fn max_error(n: &DensityField, exact: impl Fn(f64) -> f64) -> f64 {
    n.grid()
        .nodes()
        .iter()
        .zip(n.values())
        .map(|(r, v)| (v - exact(*r)).abs())
        .fold(0.0, f64::max)
}

fn bisection(tol: Tol) -> Outcome {
    let p = Params::new(4.0, 0.01, 0.0, 1.0, 2.0)?;
    let opts = StationaryOptions::new(1000)?;
    let start = Instant::now();
    let prof = find_lambda(1.0, &p, &opts)?;
    let secs = start.elapsed().as_secs_f64();
    let lo = solve_bvp_given_lambda(1.0, 0.0, &p, &opts)?.slope;
    let hi = solve_bvp_given_lambda(1.0, 1.0, &p, &opts)?.slope;
    let pass = prof.lambda > 0.0
        && prof.lambda < 1.0
        && prof.residual_neumann < tol.of(1e-8)
        && lo < 0.0
        && hi > 0.0
        && secs < 10.0;
    Ok((
        pass,
        format!(
            "lambda* = {:.10}, |n'(R)| = {:.2e}, end slopes ({:.3e}, {:.3e}), {secs:.2} s",
            prof.lambda, prof.residual_neumann, lo, hi
        ),
    ))
}

/// Plain bisection on the closed form, independent of the library solver.
fn oracle_xc(target: f64) -> f64 {
    let f = |x: f64| (1.0 - x) * (1.0 - x).ln() - 0.5 * x * x + x;
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn xc_root(tol: Tol) -> Outcome {
    let mut worst = 0.0f64;
    let mut bounds_ok = true;
    let mut bounded = 0;
    for k in 3..=8 {
        let delta = 10f64.powi(-k);
        let xc = limit::solve_xc(1.0, delta)?;
        worst = worst.max((xc - oracle_xc(8.0 * delta)).abs());
        if 6f64.powi(4) * 8.0 * delta < 1.0 {
            bounded += 1;
            let lower = 2.0 * 5f64.cbrt() * delta.cbrt();
            let upper = 2.0 * 6f64.cbrt() * delta.cbrt();
            bounds_ok &= lower <= xc && xc <= upper;
        }
    }
    let pass = worst < tol.of(1e-12) && bounds_ok;
    Ok((pass, format!("max |x_c - oracle| = {worst:.2e}, bounds hold for {bounded} deltas: {bounds_ok}")))
}

fn mass_formula(tol: Tol) -> Outcome {
    let mut worst = 0.0f64;
    for (big_r, delta) in [(1.0, 1e-4), (1.0, 1e-6), (1.5, 1e-3), (2.0, 1e-2), (0.8, 1e-5)] {
        let prof = limit::profile_for_radius(big_r, delta, big_r, 64)?;
        let inner = prof.r0 * prof.r0 / 2.0;
        let outer = quadrature::quad(|r| r * prof.density_at(r), prof.r0, big_r)?;
        let formula = limit::mass_formula(big_r, delta)?;
        worst = worst.max(((inner + outer) - formula).abs() / formula);
    }
    Ok((worst < tol.of(1e-6), format!("max relative mass error {worst:.2e} over 5 (R, delta) pairs")))
}

fn jump_asymptote(tol: Tol) -> Outcome {
    let (lo, hi) = tol.band(0.9410, 1.0);
    let deltas: Vec<f64> = (3..=8).map(|k| 10f64.powi(-k)).collect();
    let rows = limit::delta_sweep(1.0, &deltas)?;
    let mut pass = true;
    let mut shown = Vec::new();
    for row in rows.iter().filter(|r| 6f64.powi(4) * 8.0 * r.delta < 1.0) {
        pass &= lo <= row.ratio && row.ratio <= hi;
        shown.push(format!("{:.0e}:{:.4}", row.delta, row.ratio));
    }
    Ok((pass, format!("ratios {} in [{lo:.4}, {hi:.4}]", shown.join(" "))))
}

fn general_reduces(tol: Tol) -> Outcome {
    let v = PotentialSpec::quadratic();
    let mut worst = 0.0f64;
    for (big_r, delta) in [(1.0, 1e-2), (1.0, 1e-4), (1.3, 1e-3), (0.9, 1e-6)] {
        let (lambda, _) = general::lambda_general(big_r, delta, &v)?;
        let xc = limit::solve_xc(big_r, delta)?;
        worst = worst.max((lambda - big_r * big_r * xc / 2.0).abs());
    }
    let mut ident = 0.0f64;
    for big_r in [0.5f64, 1.0, 1.7, 3.0] {
        let a = 12f64.cbrt() / 2.0 * (2.0 * big_r).powf(2.0 / 3.0);
        let b = 6f64.cbrt() * big_r.powf(2.0 / 3.0);
        ident = ident.max((a - b).abs() / b);
    }
    let pass = worst < tol.of(1e-10) && ident < tol.of(4.0 * f64::EPSILON);
    Ok((pass, format!("max |lambda - lambda_c| = {worst:.2e}, prefactor identity error {ident:.1e}")))
}

fn general_asymptote(tol: Tol) -> Outcome {
    let (lo, hi) = tol.band(0.9, 1.1);
    let start = Instant::now();
    let mut pass = true;
    let mut shown = Vec::new();
    for v in [PotentialSpec::quartic(1.0)?, PotentialSpec::exp_minus_one(1.0)?] {
        let prof = GeneralLimitProfile::new(1.0, 1e-6, v)?;
        let ratio = prof.lambda / prof.jump_asymptote;
        pass &= lo <= ratio && ratio <= hi;
        shown.push(format!("{}: {ratio:.4}", prof.potential.name()));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 5.0;
    Ok((pass, format!("{} in [{lo:.3}, {hi:.3}], {secs:.2} s", shown.join(", "))))
}

fn conservation(tol: Tol) -> Outcome {
    let g = build_grid(2.0, 300)?;
    let p = Params::new(4.0, 0.01, g.h(), 1.0, 2.0)?;
    let n0 = evolution::make_initial(
        evolution::InitialShape::GaussianBump { amplitude: 1.0, width: 0.5, background: 0.05 },
        &g,
    )?;
    let dt = 0.9 * evolution::stable_dt(&g, &n0, &p);
    let mut cfg = EvolutionConfig::new(dt, 1e4 * dt)?;
    cfg.stall_checks = 0;
    let start = Instant::now();
    let out = evolution::run(&n0, &p, &cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let m0 = out.diagnostics[0].mass;
    let mass_err = out.diagnostics.iter().map(|d| (d.mass - m0).abs() / m0).fold(0.0, f64::max);
    let rise = out
        .diagnostics
        .windows(2)
        .map(|w| (w[1].energy - w[0].energy) / w[0].energy.abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = out.steps == 10_000 && mass_err < tol.of(1e-12) && rise <= tol.of(1e-8) && secs < 30.0;
    Ok((
        pass,
        format!(
            "{} steps, mass drift {mass_err:.2e}, largest relative energy change {rise:.2e}, {secs:.1} s",
            out.steps
        ),
    ))
}

fn long_time(tol: Tol) -> Outcome {
    let nodes = 65;
    let big_r = 1.0;
    let g0 = build_grid(big_r, nodes)?;
    let p = Params::new(4.0, 0.05, g0.h(), 1.0, big_r)?;
    let prof = find_lambda(big_r, &p, &StationaryOptions::new(nodes)?)?;
    let g = *prof.n.grid();
    let bumped: Vec<f64> = g
        .nodes()
        .iter()
        .zip(prof.n.values())
        .map(|(r, v)| (v * (1.0 + 0.1 * (std::f64::consts::PI * r / big_r).cos())).max(0.0))
        .collect();
    let bumped = DensityField::new(g, bumped)?;
    let k = prof.mass / evolution::mass(&g, &bumped, p.eps);
    let n0 = DensityField::new(g, bumped.values().iter().map(|v| v * k).collect())?;
    let dt = 0.9 * evolution::stable_dt(&g, &n0, &p);
    let mut cfg = EvolutionConfig::new(dt, 20.0)?;
    cfg.output_every = 1_000_000;
    let start = Instant::now();
    let out = evolution::run(&n0, &p, &cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let gap = out.final_state.sup_distance(&prof.n)?;
    let bound = tol.of(5.0 * g.h() * g.h());
    let pass = out.stalled && gap < bound && secs < 300.0;
    Ok((
        pass,
        format!(
            "stalled {} at t = {:.3} after {} steps, sup gap {gap:.3e} (< {bound:.3e}), {secs:.0} s",
            out.stalled, out.t_final, out.steps
        ),
    ))
}

fn limit_sweep(tol: Tol) -> Outcome {
    let (lo, hi) = tol.band(0.5, 1.5);
    let sweep = limit::gamma_sweep(0.4, 0.01, &[10.0, 50.0, 250.0], 400)?;
    let mut rows = Vec::new();
    for (gamma, row) in sweep.rows {
        match row {
            Ok(r) => rows.push(r),
            Err(e) => return Ok((false, format!("gamma = {gamma}: {e}"))),
        }
    }
    let sup_down = rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err);
    let r_down = rows.windows(2).all(|w| w[1].r_err < w[0].r_err);
    let last = rows.last().expect("three rows");
    let ratio = last.p_at_r0 / last.lambda_c;
    let pass = sup_down && r_down && lo <= ratio && ratio <= hi;
    let sups: Vec<String> = rows.iter().map(|r| format!("{:.3e}", r.sup_err)).collect();
    let rerrs: Vec<String> = rows.iter().map(|r| format!("{:.3e}", r.r_err)).collect();
    Ok((
        pass,
        format!(
            "sup errors [{}], radius errors [{}], p(R0)/lambda_c = {ratio:.3} in [{lo:.2}, {hi:.2}]",
            sups.join(", "),
            rerrs.join(", ")
        ),
    ))
}

/// The default `evolve` configuration, on the interior `r <= 0.4 r_max`.
fn replica(tol: Tol) -> Outcome {
    let (lo, hi) = tol.band(0.9, 1.0);
    let cfg = RunConfig::defaults(Command::Evolve);
    let g = build_grid(cfg.r_max, cfg.n_nodes)?;
    let p = cfg.params(g.h())?;
    let n0 = evolution::make_initial(cfg.initial_shape(), &g)?;
    let mut ecfg = cfg.evolution()?;
    ecfg.snapshot_times.clear();
    ecfg.output_every = usize::MAX;
    let out = evolution::run(&n0, &p, &ecfg)?;
    let last = out.snapshots.last().expect("final snapshot");
    let interior: Vec<f64> = g
        .nodes()
        .iter()
        .zip(&last.pressure)
        .filter(|(r, _)| **r <= 0.4 * cfg.r_max)
        .map(|(_, p)| *p)
        .collect();
    let pmin = interior.iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = interior.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reached = !out.stalled && (out.t_final - cfg.t_end).abs() <= 0.5 * cfg.dt;
    let pass = reached && lo <= pmin && pmax <= hi;
    Ok((
        pass,
        format!(
            "reached t = {:.6} in {} steps, interior pressure in [{pmin:.6}, {pmax:.6}] vs [{lo:.2}, {hi:.2}]",
            out.t_final, out.steps
        ),
    ))
}
