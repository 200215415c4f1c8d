//! Explicit time stepping of the regularised system
//!
//! ```text
//! ∂t((r+ε) n) = ∂r((r+ε) B_ε(n) ∂r(μ + V)) + (r+ε) n G(p)
//! ```
//!
//! in conservative flux form on the dual cells of a [`RadialGrid`], with mass,
//! energy and entropy diagnostics.

use crate::grid::{radial_integral, DensityField, LaplacianStencil, RadialGrid};
use crate::model::{entropy_phi, mobility, Params, PressureLaw};
use crate::{Error, Result};

/// Magnitude beyond which a run is declared blown up.
pub const BLOW_UP: f64 = 1e6;
/// Relative energy increase tolerated in a sourceless step.
pub const ENERGY_SLACK: f64 = 1e-6;
const MAX_HALVINGS: u32 = 24;

/// Logistic-type growth `G(p) = rate · (p_h − p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSpec {
    pub rate: f64,
    pub homeostatic_pressure: f64,
}

impl GrowthSpec {
    pub fn new(rate: f64, homeostatic_pressure: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!("growth rate must be nonnegative (got {rate})")));
        }
        if !homeostatic_pressure.is_finite() {
            return Err(Error::InvalidArgument("homeostatic pressure must be finite".into()));
        }
        Ok(Self { rate, homeostatic_pressure })
    }

    #[inline]
    pub fn growth(&self, p: f64) -> f64 {
        self.rate * (self.homeostatic_pressure - p)
    }
}

/// How the density is averaged onto faces before the mobility is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceAverage {
    #[default]
    Arithmetic,
    Harmonic,
}

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub source: Option<GrowthSpec>,
    /// Diagnostics are recorded every this many steps (and at the end).
    pub output_every: usize,
    /// Substep instead of failing when the step is unstable.
    pub adaptive_guard: bool,
    /// Stationarity threshold on `‖Δn‖∞ / dt`.
    pub stall_tol: f64,
    /// Consecutive steps under `stall_tol` before the run stops; `0` never stops.
    pub stall_checks: usize,
    /// Times at which full snapshots are kept. `0` and the final time are
    /// always kept.
    pub snapshot_times: Vec<f64>,
    pub face_average: FaceAverage,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_end,
            source: None,
            output_every: 1,
            adaptive_guard: true,
            stall_tol: 1e-7,
            stall_checks: 100,
            snapshot_times: Vec::new(),
            face_average: FaceAverage::Arithmetic,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive (got {})", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidArgument(format!("t_end must be positive (got {})", self.t_end)));
        }
        if self.output_every == 0 {
            return Err(Error::InvalidArgument("output_every must be at least 1".into()));
        }
        if !(self.stall_tol >= 0.0) {
            return Err(Error::InvalidArgument("stall_tol must be nonnegative".into()));
        }
        if let Some(g) = &self.source {
            GrowthSpec::new(g.rate, g.homeostatic_pressure)?;
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
    pub min_n: f64,
    pub max_n: f64,
    pub dt_used: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    pub n: DensityField,
    pub pressure: Vec<f64>,
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub final_state: DensityField,
    pub steps: usize,
    pub t_final: f64,
    /// The stationarity criterion stopped the run before `t_end`.
    pub stalled: bool,
    /// Steps that had to be subdivided.
    pub subdivided_steps: usize,
    /// Last observed `‖Δn‖∞ / dt`.
    pub last_rate: f64,
}

/// Discrete energy: cell-weighted potential terms plus the face-based
/// gradient term `(δ/2) Σ h (r_f+ε) |Δn/h|²`.
pub fn energy(grid: &RadialGrid, n: &DensityField, p: &Params) -> f64 {
    let law = PressureLaw::new(p.gamma);
    let w = grid.cell_weights(p.eps);
    let v = n.values();
    energy_parts(grid, v, &w, &grid.face_factors(p.eps), &law, p)
}

fn energy_parts(grid: &RadialGrid, v: &[f64], w: &[f64], faces: &[f64], law: &PressureLaw, p: &Params) -> f64 {
    let h = grid.h();
    let bulk: f64 = v
        .iter()
        .zip(w)
        .enumerate()
        .map(|(i, (&x, &wi))| wi * (law.energy_density(x) + x * p.potential.value(grid.node(i))))
        .sum();
    let grad: f64 = faces
        .iter()
        .zip(v.windows(2))
        .map(|(f, pair)| {
            let d = (pair[1] - pair[0]) / h;
            h * f * d * d
        })
        .sum();
    bulk + 0.5 * p.delta * grad
}

/// `Φ_ε[n] = ∫ (r+ε) φ_ε(n) dr`.
pub fn entropy_total(grid: &RadialGrid, n: &DensityField, p: &Params) -> f64 {
    let phi: Vec<f64> = n.values().iter().map(|&x| entropy_phi(x, p.eps)).collect();
    radial_integral(grid, &phi, p.eps).unwrap_or(f64::NAN)
}

/// `∫ (r+ε) n dr`.
pub fn mass(grid: &RadialGrid, n: &DensityField, eps: f64) -> f64 {
    radial_integral(grid, n.values(), eps).unwrap_or(f64::NAN)
}

/// Largest step the explicit scheme accepts for the state `n`.
pub fn stable_dt(grid: &RadialGrid, n: &DensityField, p: &Params) -> f64 {
    let mut s = Stepper::new(grid, p, FaceAverage::Arithmetic, None);
    s.compute_fluxes(n.values());
    s.guard_dt()
}

/// One explicit Euler step of size `cfg.dt`, subdivided if the guard
/// requires it and `cfg.adaptive_guard` is set.
pub fn step(state: &DensityField, p: &Params, cfg: &EvolutionConfig) -> Result<DensityField> {
    cfg.validate()?;
    let grid = *state.grid();
    let mut s = Stepper::new(&grid, p, cfg.face_average, cfg.source);
    let mut n = state.values().to_vec();
    s.macro_step(&mut n, cfg.dt, cfg.adaptive_guard)?;
    DensityField::new(grid, n)
}

/// Step `n0` to `cfg.t_end`, or until `‖Δn‖∞/dt < stall_tol` has held for
/// `stall_checks` consecutive steps.
pub fn run(n0: &DensityField, p: &Params, cfg: &EvolutionConfig) -> Result<RunOutput> {
    cfg.validate()?;
    p.validate()?;
    if let Some((i, &v)) = n0.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::InvalidArgument(format!("initial density is negative ({v}) at node {i}")));
    }
    let grid = *n0.grid();
    let mut s = Stepper::new(&grid, p, cfg.face_average, cfg.source);
    let mut n = n0.values().to_vec();
    let total = cfg.n_steps();

    let mut pending: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|t| *t > 0.0).collect();
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let mut pending = pending.into_iter().peekable();

    let mut snapshots = vec![s.snapshot(&n, 0.0, 0)?];
    let mut diagnostics = vec![s.diagnostics(&n, 0.0, cfg.dt)];
    let mut calm = 0usize;
    let mut stalled = false;
    let mut subdivided = 0usize;
    let mut last_rate = f64::NAN;
    let mut k = 0usize;
    while k < total {
        let info = s
            .macro_step(&mut n, cfg.dt, cfg.adaptive_guard)
            .map_err(|e| Error::AtStep { step: k + 1, source: Box::new(e) })?;
        k += 1;
        if info.substeps > 1 {
            subdivided += 1;
        }
        let t = k as f64 * cfg.dt;
        last_rate = info.max_change / cfg.dt;
        if last_rate < cfg.stall_tol {
            calm += 1;
        } else {
            calm = 0;
        }
        stalled = cfg.stall_checks > 0 && calm >= cfg.stall_checks;
        let last = stalled || k == total;
        if k % cfg.output_every == 0 || last {
            diagnostics.push(s.diagnostics(&n, t, info.dt_used));
        }
        while pending.peek().is_some_and(|ts| t >= *ts - 0.5 * cfg.dt) {
            pending.next();
            if !last {
                snapshots.push(s.snapshot(&n, t, k)?);
            }
        }
        if last {
            snapshots.push(s.snapshot(&n, t, k)?);
            break;
        }
    }
    let t_final = k as f64 * cfg.dt;
    Ok(RunOutput {
        snapshots,
        diagnostics,
        final_state: DensityField::new(grid, n)?,
        steps: k,
        t_final,
        stalled,
        subdivided_steps: subdivided,
        last_rate,
    })
}

/// Shapes for initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialShape {
    /// Smoothed step of height `amplitude` around `r = center`, decreasing,
    /// flat at the origin and exactly zero beyond `center + 5·width`.
    TruncatedArctan { amplitude: f64, center: f64, width: f64 },
    /// `background + amplitude · exp(−r²/width²)`.
    GaussianBump { amplitude: f64, width: f64, background: f64 },
    Constant(f64),
}

pub fn make_initial(shape: InitialShape, grid: &RadialGrid) -> Result<DensityField> {
    let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
    match shape {
        InitialShape::Constant(c) => {
            if !(c >= 0.0) || !c.is_finite() {
                return bad("constant initial value must be nonnegative");
            }
            DensityField::constant(*grid, c)
        }
        InitialShape::GaussianBump { amplitude, width, background } => {
            if !(amplitude >= 0.0) || !(background >= 0.0) || !(width > 0.0) {
                return bad("gaussian bump needs amplitude >= 0, background >= 0, width > 0");
            }
            DensityField::from_fn(*grid, |r| background + amplitude * (-(r / width).powi(2)).exp())
        }
        InitialShape::TruncatedArctan { amplitude, center, width } => {
            if !(amplitude >= 0.0) || !(center > 0.0) || !(width > 0.0) {
                return bad("truncated arctangent needs amplitude >= 0, center > 0, width > 0");
            }
            let cut = center + 5.0 * width;
            let z = |r: f64| ((center * center - r * r) / (2.0 * center * width)).atan();
            let (z0, zc) = (z(0.0), z(cut));
            DensityField::from_fn(*grid, |r| {
                if r >= cut {
                    0.0
                } else {
                    (amplitude * (z(r) - zc) / (z0 - zc)).clamp(0.0, amplitude)
                }
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct StepInfo {
    max_change: f64,
    substeps: usize,
    dt_used: f64,
}

/// Precomputed geometry and scratch buffers for repeated steps.
struct Stepper {
    grid: RadialGrid,
    params: Params,
    law: PressureLaw,
    stencil: LaplacianStencil,
    weights: Vec<f64>,
    faces: Vec<f64>,
    /// `(r_f+ε)/h` at each interior face.
    face_coef: Vec<f64>,
    potential: Vec<f64>,
    average: FaceAverage,
    source: Option<GrowthSpec>,
    /// Guard for the diffusion part: `δ ρ(L)`.
    stiffness: f64,
    pressure: Vec<f64>,
    mu: Vec<f64>,
    face_mob: Vec<f64>,
    flux: Vec<f64>,
    dp_max: f64,
    scratch: Vec<f64>,
    spare: Vec<f64>,
}

impl Stepper {
    fn new(grid: &RadialGrid, p: &Params, average: FaceAverage, source: Option<GrowthSpec>) -> Self {
        let n = grid.len();
        let stencil = LaplacianStencil::new(grid, p.eps);
        let faces = grid.face_factors(p.eps);
        let face_coef = faces.iter().map(|f| f / grid.h()).collect();
        Self {
            grid: *grid,
            params: p.clone(),
            law: PressureLaw::new(p.gamma),
            stiffness: p.delta * stencil.spectral_bound(),
            stencil,
            weights: grid.cell_weights(p.eps),
            faces,
            face_coef,
            potential: grid.nodes().iter().map(|&r| p.potential.value(r)).collect(),
            average,
            source,
            pressure: vec![0.0; n],
            mu: vec![0.0; n],
            face_mob: vec![0.0; n - 1],
            flux: vec![0.0; n - 1],
            dp_max: 0.0,
            scratch: vec![0.0; n],
            spare: vec![0.0; n],
        }
    }

    fn compute_fluxes(&mut self, n: &[f64]) {
        let len = n.len();
        let delta = self.params.delta;
        let eps = self.params.eps;
        let mut dp_max = 0.0f64;
        for i in 0..len {
            let (pr, dp) = self.law.value_and_derivative(n[i]);
            self.pressure[i] = pr;
            dp_max = dp_max.max(dp);
            let mut lap = 0.0;
            if i + 1 < len {
                lap += self.stencil.right[i] * (n[i + 1] - n[i]);
            }
            if i > 0 {
                lap -= self.stencil.left[i] * (n[i] - n[i - 1]);
            }
            self.mu[i] = pr - delta * lap;
        }
        self.dp_max = dp_max;
        for f in 0..len - 1 {
            let (a, b) = (n[f], n[f + 1]);
            let avg = match self.average {
                FaceAverage::Arithmetic => 0.5 * (a + b),
                FaceAverage::Harmonic => {
                    if a > 0.0 && b > 0.0 {
                        2.0 * a * b / (a + b)
                    } else {
                        a.min(b)
                    }
                }
            };
            let mob = mobility(avg, eps);
            self.face_mob[f] = mob;
            let dg = (self.mu[f + 1] + self.potential[f + 1]) - (self.mu[f] + self.potential[f]);
            self.flux[f] = self.face_coef[f] * mob * dg;
        }
    }

    /// Stability bound for the fluxes last computed.
    fn guard_dt(&self) -> f64 {
        let len = self.weights.len();
        let mut rho_b = 0.0f64;
        for i in 0..len {
            let mut s = 0.0;
            if i + 1 < len {
                s += self.stencil.right[i] * self.face_mob[i];
            }
            if i > 0 {
                s += self.stencil.left[i] * self.face_mob[i - 1];
            }
            rho_b = rho_b.max(2.0 * s);
        }
        let growth = self.source.map_or(0.0, |g| g.rate * (g.homeostatic_pressure.abs() + self.dp_max));
        let denom = rho_b * (self.dp_max + self.stiffness) + growth;
        if denom > 0.0 {
            1.0 / denom
        } else {
            f64::INFINITY
        }
    }

    /// Apply the update with the fluxes last computed from `n`; writes the new
    /// state into `out` and returns `‖out − n‖∞`.
    fn apply(&self, n: &[f64], dt: f64, out: &mut [f64]) -> Result<f64> {
        let len = n.len();
        let mut max_change = 0.0f64;
        for i in 0..len {
            let mut div = 0.0;
            if i + 1 < len {
                div += self.flux[i];
            }
            if i > 0 {
                div -= self.flux[i - 1];
            }
            let mut d = dt * div / self.weights[i];
            if let Some(g) = &self.source {
                d += dt * n[i] * g.growth(self.pressure[i]);
            }
            let v = n[i] + d;
            if !v.is_finite() {
                return Err(Error::NonFinite { node: i, value: v });
            }
            if v.abs() > BLOW_UP {
                return Err(Error::BlowUp { node: i, value: v.abs() });
            }
            max_change = max_change.max(d.abs());
            out[i] = v;
        }
        Ok(max_change)
    }

    fn energy_of(&self, n: &[f64]) -> f64 {
        energy_parts(&self.grid, n, &self.weights, &self.faces, &self.law, &self.params)
    }

    /// Advance `n` by `dt`, as `2^k` equal substeps when needed.
    fn macro_step(&mut self, n: &mut Vec<f64>, dt: f64, adaptive: bool) -> Result<StepInfo> {
        let check_energy = self.source.is_none();
        let mut halvings = 0u32;
        'outer: loop {
            let parts = 1usize << halvings;
            let sub = dt / parts as f64;
            let mut cur = std::mem::take(&mut self.scratch);
            cur.clear();
            cur.extend_from_slice(n);
            let mut next = std::mem::take(&mut self.spare);
            next.resize(n.len(), 0.0);
            for _ in 0..parts {
                self.compute_fluxes(&cur);
                let limit = self.guard_dt();
                if sub > limit {
                    if adaptive && halvings < MAX_HALVINGS {
                        let need = (sub / limit).log2().ceil().max(1.0) as u32;
                        halvings = (halvings + need).min(MAX_HALVINGS);
                        self.scratch = cur;
                        self.spare = next;
                        continue 'outer;
                    }
                    return Err(Error::StabilityGuard(format!(
                        "dt = {sub:e} exceeds the stable limit {limit:e}"
                    )));
                }
                let e_old = if check_energy { self.energy_of(&cur) } else { 0.0 };
                self.apply(&cur, sub, &mut next)?;
                if check_energy {
                    let e_new = self.energy_of(&next);
                    if e_new > e_old + ENERGY_SLACK * e_old.abs() {
                        if adaptive && halvings < MAX_HALVINGS {
                            halvings += 1;
                            self.scratch = cur;
                            self.spare = next;
                            continue 'outer;
                        }
                        return Err(Error::StabilityGuard(format!(
                            "energy increased from {e_old:e} to {e_new:e} in a sourceless step"
                        )));
                    }
                }
                std::mem::swap(&mut cur, &mut next);
            }
            let mut max_change = 0.0f64;
            for (a, b) in n.iter().zip(&cur) {
                max_change = max_change.max((a - b).abs());
            }
            std::mem::swap(n, &mut cur);
            self.scratch = cur;
            self.spare = next;
            return Ok(StepInfo { max_change, substeps: parts, dt_used: sub });
        }
    }

    fn diagnostics(&self, n: &[f64], t: f64, dt_used: f64) -> DiagnosticsRow {
        let eps = self.params.eps;
        let mass: f64 = self.weights.iter().zip(n).map(|(w, v)| w * v).sum();
        let entropy: f64 = self.weights.iter().zip(n).map(|(w, v)| w * entropy_phi(*v, eps)).sum();
        DiagnosticsRow {
            t,
            mass,
            energy: self.energy_of(n),
            entropy,
            min_n: n.iter().copied().fold(f64::INFINITY, f64::min),
            max_n: n.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            dt_used,
        }
    }

    fn snapshot(&mut self, n: &[f64], t: f64, step: usize) -> Result<Snapshot> {
        self.compute_fluxes(n);
        Ok(Snapshot {
            t,
            step,
            n: DensityField::new(self.grid, n.to_vec())?,
            pressure: self.pressure.clone(),
            mu: self.mu.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::model::PotentialSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(gamma: f64, delta: f64, eps: f64) -> Params {
        Params::new(gamma, delta, eps, 1.0, 1.0).unwrap()
    }

    #[test]
    fn energy_examples() {
        let g = build_grid(1.0, 201).unwrap();
        let mut p = params(2.0, 0.01, 0.0);
        assert_eq!(energy(&g, &DensityField::constant(g, 0.0).unwrap(), &p), 0.0);

        // n ≡ 1, γ = 1, V = r²: ∫ r (1/2 + r²) dr = 1/2
        p.gamma = 1.0;
        let one = DensityField::constant(g, 1.0).unwrap();
        assert_relative_eq!(energy(&g, &one, &p), 0.5, epsilon = 1e-4);

        // only the gradient term for n(r) = r, δ = 1: ∫ r/2 dr = 1/4
        p.delta = 1.0;
        p.potential = PotentialSpec::Flat;
        let ramp = DensityField::from_fn(g, |r| r).unwrap();
        let grad_only = energy(&g, &ramp, &p)
            - g.cell_weights(0.0)
                .iter()
                .zip(ramp.values())
                .map(|(w, x)| w * x * x / 2.0)
                .sum::<f64>();
        assert_relative_eq!(grad_only, 0.25, epsilon = 1e-13);
    }

    #[test]
    fn entropy_examples() {
        let g = build_grid(1.0, 101).unwrap();
        let p = params(2.0, 0.01, 0.1);
        assert!(entropy_total(&g, &DensityField::constant(g, 1.0).unwrap(), &p).abs() < 1e-14);
        // zero density with the ε-shift removed from the measure
        let phi = vec![entropy_phi(0.0, 0.1); g.len()];
        assert_relative_eq!(radial_integral(&g, &phi, 0.0).unwrap(), 0.475, epsilon = 1e-13);
        let n = DensityField::from_fn(g, |r| 0.5 + r).unwrap();
        let direct: Vec<f64> = n.values().iter().map(|x| x * (x.ln() - 1.0) + 1.0).collect();
        assert_relative_eq!(
            entropy_total(&g, &n, &p),
            radial_integral(&g, &direct, 0.1).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn constant_state_is_fixed() {
        let g = build_grid(2.0, 64).unwrap();
        let p = params(3.0, 0.01, 0.05).with_potential(PotentialSpec::Flat);
        let n = DensityField::constant(g, 0.7).unwrap();
        let cfg = EvolutionConfig::new(1e-6, 1e-6).unwrap();
        let next = step(&n, &p, &cfg).unwrap();
        assert_eq!(next.values(), n.values());
    }

    #[test]
    fn homeostatic_state_does_not_grow() {
        let g = build_grid(2.0, 64).unwrap();
        let p = params(10.0, 0.01, 0.05).with_potential(PotentialSpec::Flat);
        let n = DensityField::constant(g, 1.0).unwrap();
        let mut cfg = EvolutionConfig::new(1e-6, 1e-6).unwrap();
        cfg.source = Some(GrowthSpec::new(10.0, 1.0).unwrap());
        let next = step(&n, &p, &cfg).unwrap();
        for v in next.values() {
            assert_eq!(*v, 1.0);
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = build_grid(1.0, 32).unwrap();
        let n0 = DensityField::constant(g, 0.0).unwrap();
        let mut cfg = EvolutionConfig::new(1e-6, 1e-4).unwrap();
        cfg.output_every = 10;
        // the mobility floor lets a nonflat potential move mass, so either
        // ε = 0 or V flat
        for p in [params(2.0, 0.01, 0.0), params(2.0, 0.01, 0.03).with_potential(PotentialSpec::Flat)] {
            let out = run(&n0, &p, &cfg).unwrap();
            assert!(out.final_state.values().iter().all(|v| *v == 0.0));
            for row in &out.diagnostics {
                assert_eq!(row.mass, 0.0);
                assert_eq!(row.energy, 0.0);
            }
        }
    }

    #[test]
    fn guard_violation_without_adaptivity_is_an_error() {
        let g = build_grid(1.0, 64).unwrap();
        let p = params(2.0, 0.01, 0.01);
        let n = make_initial(InitialShape::GaussianBump { amplitude: 1.0, width: 0.3, background: 0.1 }, &g).unwrap();
        let mut cfg = EvolutionConfig::new(1e-2, 1e-2).unwrap();
        cfg.adaptive_guard = false;
        assert!(matches!(step(&n, &p, &cfg), Err(Error::StabilityGuard(_))));
        cfg.adaptive_guard = true;
        let next = step(&n, &p, &cfg).unwrap();
        assert!(next.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn blow_up_is_reported() {
        let g = build_grid(1.0, 16).unwrap();
        let p = params(2.0, 0.01, 0.01);
        let n = DensityField::constant(g, 2e6).unwrap();
        let mut cfg = EvolutionConfig::new(1e-12, 1e-12).unwrap();
        cfg.source = Some(GrowthSpec::new(0.0, 1.0).unwrap());
        assert!(matches!(step(&n, &p, &cfg), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn sourceless_run_conserves_mass_and_dissipates_energy() {
        let g = build_grid(1.0, 80).unwrap();
        let p = params(3.0, 0.01, 0.0);
        let n0 = make_initial(InitialShape::GaussianBump { amplitude: 1.0, width: 0.3, background: 0.05 }, &g).unwrap();
        let dt = 0.5 * stable_dt(&g, &n0, &p);
        let mut cfg = EvolutionConfig::new(dt, 2000.0 * dt).unwrap();
        cfg.stall_checks = usize::MAX;
        let out = run(&n0, &p, &cfg).unwrap();
        let m0 = out.diagnostics[0].mass;
        for pair in out.diagnostics.windows(2) {
            assert!((pair[1].mass - m0).abs() <= 1e-13 * m0);
            assert!(pair[1].energy <= pair[0].energy + 1e-8 * pair[0].energy.abs());
        }
    }

    #[test]
    fn growth_increases_mass_below_homeostasis() {
        let g = build_grid(3.0, 90).unwrap();
        let p = params(10.0, 0.01, g.h()).with_potential(PotentialSpec::Flat);
        let n0 = make_initial(InitialShape::TruncatedArctan { amplitude: 0.9, center: 1.0, width: 0.2 }, &g).unwrap();
        let mut cfg = EvolutionConfig::new(1e-6, 2e-3).unwrap();
        cfg.source = Some(GrowthSpec::new(10.0, 1.0).unwrap());
        let out = run(&n0, &p, &cfg).unwrap();
        for pair in out.diagnostics.windows(2) {
            assert!(pair[1].mass >= pair[0].mass);
        }
    }

    #[test]
    fn snapshots_at_requested_times() {
        let g = build_grid(1.0, 32).unwrap();
        let p = params(2.0, 0.01, 0.03);
        let n0 = make_initial(InitialShape::Constant(0.5), &g).unwrap();
        let mut cfg = EvolutionConfig::new(1e-4, 1e-2).unwrap();
        cfg.snapshot_times = vec![0.0, 0.003, 0.006, 0.01];
        cfg.stall_checks = usize::MAX;
        let out = run(&n0, &p, &cfg).unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 4);
        assert_relative_eq!(times[1], 0.003, epsilon = 1e-12);
        assert_relative_eq!(times[3], 0.01, epsilon = 1e-12);
    }

    #[test]
    fn initial_shapes() {
        let g = build_grid(10.0, 300).unwrap();
        let c = make_initial(InitialShape::Constant(0.3), &g).unwrap();
        assert!(c.values().iter().all(|v| *v == 0.3));
        let arc = make_initial(InitialShape::TruncatedArctan { amplitude: 1.0, center: 2.0, width: 0.2 }, &g).unwrap();
        assert_relative_eq!(arc.values()[0], 1.0);
        for w in arc.values().windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(arc.values().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(*arc.values().last().unwrap(), 0.0);
        let flat = make_initial(InitialShape::GaussianBump { amplitude: 0.0, width: 1.0, background: 0.0 }, &g).unwrap();
        assert!(flat.values().iter().all(|v| *v == 0.0));
        assert!(make_initial(InitialShape::TruncatedArctan { amplitude: 1.0, center: 2.0, width: 0.0 }, &g).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn single_step_conserves_mass(
            amp in 0.0f64..2.0,
            width in 0.1f64..0.6,
            bg in 0.0f64..0.5,
            eps in 0.0f64..0.05,
        ) {
            let g = build_grid(1.0, 48).unwrap();
            let p = params(2.5, 0.02, eps);
            let n = make_initial(InitialShape::GaussianBump { amplitude: amp, width, background: bg }, &g).unwrap();
            let cfg = EvolutionConfig::new(1e-5, 1e-5).unwrap();
            let next = step(&n, &p, &cfg).unwrap();
            let m0 = mass(&g, &n, eps);
            let m1 = mass(&g, &next, eps);
            prop_assert!((m1 - m0).abs() <= 1e-13 * m0.max(1e-300) + 1e-300);
        }
    }
}
