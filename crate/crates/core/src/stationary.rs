//! Finite-stiffness stationary states with compact support.
//!
//! On `[0, R]` we solve
//!
//! ```text
//! max(0,n)^γ − δ (1/(r+ε)) ((r+ε) n')' = V(R) − V(r) − λ,   n'(0) = 0,  n(R) = 0
//! ```
//!
//! by damped Newton, choose `λ` so that `n'(R) = 0`, and finally choose `R`
//! so that the profile carries a prescribed mass.

use std::cell::RefCell;

use crate::grid::{build_grid, radial_integral, DensityField, LaplacianStencil, RadialGrid};
use crate::model::{chemical_potential, Params, PotentialSpec, PressureLaw};
use crate::{limit, roots, tridiag, Error, Result};

pub const MIN_NODES: usize = 64;
const MAX_NEWTON: usize = 100;
const MAX_HALVINGS: usize = 30;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discretization {
    /// Second-order central differences on the requested grid.
    #[default]
    Central,
    /// Central solves on `N` and `2N − 1` nodes combined as
    /// `(4·fine − coarse)/3`, reported on the `N`-node grid.
    Extrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub n_nodes: usize,
    pub discretization: Discretization,
}

impl StationaryOptions {
    pub fn new(n_nodes: usize) -> Result<Self> {
        let o = Self { n_nodes, discretization: Discretization::Central };
        o.validate()?;
        Ok(o)
    }

    pub fn extrapolated(mut self) -> Self {
        self.discretization = Discretization::Extrapolated;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "n_nodes must be at least {MIN_NODES} (got {})",
                self.n_nodes
            )));
        }
        Ok(())
    }
}

/// Result of a single boundary value solve.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub n: DensityField,
    /// One-sided second-order estimate of `n'(R)`.
    pub slope: f64,
    pub newton_iters: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct StationaryProfile {
    /// Support radius.
    pub r_support: f64,
    pub lambda: f64,
    /// Profile on `[0, R]`.
    pub n: DensityField,
    pub gamma: f64,
    pub delta: f64,
    pub eps: f64,
    pub mass: f64,
    /// `|n'(R)|` achieved.
    pub residual_neumann: f64,
    pub newton_iters: usize,
    pub bisect_iters: usize,
    /// Set when the radius search saw a non-monotone mass map.
    pub anomaly: Option<String>,
}

impl StationaryProfile {
    pub fn pressure(&self) -> Vec<f64> {
        let law = PressureLaw::new(self.gamma);
        self.n.values().iter().map(|&x| law.value(x)).collect()
    }

    pub fn chemical_potential(&self) -> Result<DensityField> {
        let p = Params {
            gamma: self.gamma,
            delta: self.delta,
            eps: self.eps,
            mass: self.mass.max(f64::MIN_POSITIVE),
            r_b: self.r_support,
            potential: PotentialSpec::Flat,
            tol_root: Params::DEFAULT_TOL_ROOT,
            tol_newton: Params::DEFAULT_TOL_NEWTON,
        };
        chemical_potential(self.n.grid(), &self.n, &p)
    }
}

/// Newton solver on one fixed grid.
struct Bvp<'a> {
    grid: RadialGrid,
    p: &'a Params,
    law: PressureLaw,
    stencil: LaplacianStencil,
    /// `V(R) − V(r_i)`.
    drive: Vec<f64>,
}

impl<'a> Bvp<'a> {
    fn new(r_support: f64, p: &'a Params, n_nodes: usize) -> Result<Self> {
        let grid = build_grid(r_support, n_nodes)?;
        let vr = p.potential.value(r_support);
        let drive = grid.nodes().iter().map(|&r| vr - p.potential.value(r)).collect();
        Ok(Self {
            grid,
            p,
            law: PressureLaw::new(p.gamma),
            stencil: LaplacianStencil::new(&grid, p.eps),
            drive,
        })
    }

    /// Residual on the free nodes `0..M`; `n[M] = 0` is implied.
    fn residual(&self, n: &[f64], lambda: f64, out: &mut [f64]) -> f64 {
        let m = out.len();
        let mut worst = 0.0f64;
        for i in 0..m {
            let right = if i + 1 < m { n[i + 1] } else { 0.0 };
            let mut lap = self.stencil.right[i] * (right - n[i]);
            if i > 0 {
                lap -= self.stencil.left[i] * (n[i] - n[i - 1]);
            }
            let r = self.law.value(n[i]) - self.p.delta * lap - (self.drive[i] - lambda);
            out[i] = r;
            worst = worst.max(r.abs());
        }
        worst
    }

    fn guess(&self, lambda: f64) -> Vec<f64> {
        let r_sup = self.grid.r_max();
        let delta = self.p.delta;
        let m = self.grid.len() - 1;
        let mut g: Vec<f64> = match (&self.p.potential, limit::solve_xc(r_sup, delta)) {
            (PotentialSpec::Quadratic, Ok(xc)) => {
                let lam_c = r_sup * r_sup * xc / 2.0;
                let r0 = r_sup * (1.0 - xc).sqrt();
                self.grid
                    .nodes()
                    .iter()
                    .map(|&r| {
                        if r <= r0 {
                            1.0
                        } else {
                            limit::reference_u(r, r_sup, lam_c, delta).map_or(0.0, |(u, _)| u.max(0.0))
                        }
                    })
                    .collect()
            }
            _ => self
                .drive
                .iter()
                .map(|d| (d - lambda).max(0.0).powf(1.0 / self.p.gamma))
                .collect(),
        };
        g.truncate(m);
        g
    }

    fn solve(&self, lambda: f64, warm: Option<&[f64]>) -> Result<BvpSolution> {
        let m = self.grid.len() - 1;
        let mut n: Vec<f64> = match warm {
            Some(w) if w.len() == m + 1 => w[..m].to_vec(),
            _ => self.guess(lambda),
        };
        // the constant max(V(R) − V(r) − λ)₊^{1/γ} is a supersolution; Newton
        // iterates for this convex M-function stay above the solution, so
        // clipping at the constant keeps them bounded without slowing them
        let cap = self
            .drive
            .iter()
            .fold(0.0f64, |a, d| a.max(d - lambda))
            .powf(1.0 / self.p.gamma);
        for v in n.iter_mut() {
            *v = v.min(cap);
        }
        let delta = self.p.delta;
        let tol = self.p.tol_newton;
        let mut res = vec![0.0; m];
        let mut trial = vec![0.0; m];
        let mut trial_res = vec![0.0; m];
        let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut norm = self.residual(&n, lambda, &mut res);
        let mut iters = 0;
        while norm >= tol {
            if iters == MAX_NEWTON {
                return Err(Error::NoConvergence { iterations: iters, residual: norm });
            }
            iters += 1;
            for i in 0..m {
                let (a_r, a_l) = (self.stencil.right[i], if i > 0 { self.stencil.left[i] } else { 0.0 });
                diag[i] = self.law.derivative(n[i]) + delta * (a_r + a_l);
                lower[i] = -delta * a_l;
                upper[i] = if i + 1 < m { -delta * a_r } else { 0.0 };
            }
            let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
            tridiag::solve(&lower, &diag, &upper, &mut step)?;
            let scale = n.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let step_size = step.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                for i in 0..m {
                    trial[i] = (n[i] + alpha * step[i]).min(cap);
                }
                let t = self.residual(&trial, lambda, &mut trial_res);
                if t.is_finite() {
                    std::mem::swap(&mut n, &mut trial);
                    std::mem::swap(&mut res, &mut trial_res);
                    norm = t;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                return Err(Error::NoConvergence { iterations: iters, residual: norm });
            }
            // round-off floor: the step no longer moves the iterate
            if step_size <= 1e-14 * scale && norm < 1e3 * tol {
                break;
            }
        }
        n.push(0.0);
        let h = self.grid.h();
        let slope = (3.0 * n[m] - 4.0 * n[m - 1] + n[m - 2]) / (2.0 * h);
        Ok(BvpSolution {
            n: DensityField::new(self.grid, n)?,
            slope,
            newton_iters: iters,
            residual: norm,
        })
    }
}

/// Solver for a fixed support radius, reused across values of `λ`.
struct FixedRadius<'a> {
    coarse: Bvp<'a>,
    fine: Option<Bvp<'a>>,
    warm: RefCell<(Option<Vec<f64>>, Option<Vec<f64>>)>,
}

impl<'a> FixedRadius<'a> {
    fn new(r_support: f64, p: &'a Params, opts: &StationaryOptions) -> Result<Self> {
        if !(r_support > 0.0) || !r_support.is_finite() {
            return Err(Error::InvalidArgument(format!("R must be positive (got {r_support})")));
        }
        opts.validate()?;
        let coarse = Bvp::new(r_support, p, opts.n_nodes)?;
        let fine = match opts.discretization {
            Discretization::Central => None,
            Discretization::Extrapolated => Some(Bvp::new(r_support, p, 2 * opts.n_nodes - 1)?),
        };
        Ok(Self { coarse, fine, warm: RefCell::new((None, None)) })
    }

    fn solve(&self, lambda: f64) -> Result<BvpSolution> {
        let mut warm = self.warm.borrow_mut();
        let c = self.coarse.solve(lambda, warm.0.as_deref())?;
        warm.0 = Some(c.n.values().to_vec());
        let Some(fine_bvp) = &self.fine else {
            return Ok(c);
        };
        let f = fine_bvp.solve(lambda, warm.1.as_deref())?;
        warm.1 = Some(f.n.values().to_vec());
        let fv = f.n.values();
        let combined: Vec<f64> = c
            .n
            .values()
            .iter()
            .enumerate()
            .map(|(i, cv)| (4.0 * fv[2 * i] - cv) / 3.0)
            .collect();
        Ok(BvpSolution {
            n: DensityField::new(self.coarse.grid, combined)?,
            slope: (4.0 * f.slope - c.slope) / 3.0,
            newton_iters: c.newton_iters + f.newton_iters,
            residual: c.residual.max(f.residual),
        })
    }
}

/// Solve the boundary value problem on `[0, R]` for a given multiplier.
pub fn solve_bvp_given_lambda(r_support: f64, lambda: f64, p: &Params, opts: &StationaryOptions) -> Result<BvpSolution> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument("lambda must be finite".into()));
    }
    FixedRadius::new(r_support, p, opts)?.solve(lambda)
}

/// Bisection on `λ ∈ [0, V(R) − V(0)]` for `n'(R) = 0`.
pub fn find_lambda(r_support: f64, p: &Params, opts: &StationaryOptions) -> Result<StationaryProfile> {
    let solver = FixedRadius::new(r_support, p, opts)?;
    find_lambda_with(&solver, r_support, p)
}

fn find_lambda_with(solver: &FixedRadius<'_>, r_support: f64, p: &Params) -> Result<StationaryProfile> {
    let width = p.potential.value(r_support) - p.potential.value(0.0);
    if !(width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "potential {} gives no confinement on [0, {r_support}]",
            p.potential.name()
        )));
    }
    let (mut lo, mut hi) = (0.0, width);
    let s_hi = solver.solve(hi)?;
    let s_lo = solver.solve(lo)?;
    if !(s_lo.slope < 0.0 && s_hi.slope > 0.0) {
        return Err(Error::BracketFailure(format!(
            "end slopes n'(R; 0) = {:e}, n'(R; {width}) = {:e} are not (-, +); refine the grid",
            s_lo.slope, s_hi.slope
        )));
    }
    let mut newton = s_lo.newton_iters + s_hi.newton_iters;
    let mut best = s_lo;
    let mut best_lambda = lo;
    let mut iters = 0;
    let xtol = p.tol_root * width;
    while iters < MAX_BISECTIONS {
        iters += 1;
        let mid = 0.5 * (lo + hi);
        let s = solver.solve(mid)?;
        newton += s.newton_iters;
        let slope = s.slope;
        if slope.abs() <= best.slope.abs() {
            best = s;
            best_lambda = mid;
        }
        if slope == 0.0 {
            break;
        }
        if slope < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < xtol {
            break;
        }
    }
    let mass = radial_integral(best.n.grid(), best.n.values(), p.eps)?;
    Ok(StationaryProfile {
        r_support,
        lambda: best_lambda,
        residual_neumann: best.slope.abs(),
        n: best.n,
        gamma: p.gamma,
        delta: p.delta,
        eps: p.eps,
        mass,
        newton_iters: newton,
        bisect_iters: iters,
        anomaly: None,
    })
}

/// `∫ (r+ε) n dr` over the support.
pub fn mass_of(profile: &StationaryProfile) -> f64 {
    radial_integral(profile.n.grid(), profile.n.values(), profile.eps).unwrap_or(f64::NAN)
}

const SCAN_POINTS: usize = 24;

/// Find the support radius whose stationary profile has mass `m`.
pub fn find_radius_for_mass(m: f64, p: &Params, opts: &StationaryOptions) -> Result<StationaryProfile> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("mass must be positive (got {m})")));
    }
    p.validate()?;
    opts.validate()?;
    let profile_at = |r: f64| -> Result<StationaryProfile> {
        let solver = FixedRadius::new(r, p, opts)?;
        find_lambda_with(&solver, r, p)
    };
    let g = |r: f64| -> Result<f64> { Ok(profile_at(r)?.mass - m) };

    let guess = (2.0 * m).sqrt();
    let cap = p.r_b;
    let lo = (0.5 * guess).min(0.5 * cap);
    let hi = (2.0 * guess).min(cap);
    let ftol = 1e-8 * m;
    let xtol = 1e-14 * hi;

    let (glo, ghi) = (g(lo)?, g(hi)?);
    let mut anomaly = None;
    let (a, b) = if glo < 0.0 && ghi > 0.0 {
        (lo, hi)
    } else {
        let top = cap;
        let bottom = 0.125 * guess.min(cap);
        let mut table = Vec::with_capacity(SCAN_POINTS);
        for k in 0..SCAN_POINTS {
            let r = bottom * (top / bottom).powf(k as f64 / (SCAN_POINTS - 1) as f64);
            table.push((r, g(r)? + m));
        }
        if table.windows(2).any(|w| w[1].1 <= w[0].1) {
            anomaly = Some(format!("mass map is not monotone on the scan {table:?}"));
        }
        match table.windows(2).find(|w| w[0].1 < m && w[1].1 >= m) {
            Some(w) => (w[0].0, w[1].0),
            None => {
                let (r_top, m_top) = *table.last().unwrap();
                if m_top < m && r_top >= cap {
                    return Err(Error::DomainTooSmall(format!(
                        "mass {m} needs a support larger than r_b = {cap} (mass at r_b is {m_top})"
                    )));
                }
                return Err(Error::BracketFailure(format!("no radius with mass {m}; scan (R, mass) = {table:?}")));
            }
        }
    };
    let root = roots::illinois(g, a, b, xtol, ftol, 200)?;
    let mut best = profile_at(root.x)?;
    if (best.mass - m).abs() > ftol {
        return Err(Error::NoConvergence { iterations: root.iterations, residual: (best.mass - m).abs() });
    }
    best.anomaly = anomaly;
    Ok(best)
}

/// Pad the profile with zeros out to `r_b`, keeping the grid spacing.
pub fn extend_to_domain(profile: &StationaryProfile, r_b: f64) -> Result<DensityField> {
    let r = profile.r_support;
    if r > r_b * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("support radius {r} exceeds r_b = {r_b}")));
    }
    if (r - r_b).abs() <= 1e-12 * r_b {
        return Ok(profile.n.clone());
    }
    let h = profile.n.grid().h();
    let n_out = ((r_b / h).round() as usize).max(1) + 1;
    let grid = build_grid(r_b, n_out)?;
    resample(&profile.n, &grid)
}

/// Linear interpolation onto `grid`, zero beyond the last node of `field`.
pub fn resample(field: &DensityField, grid: &RadialGrid) -> Result<DensityField> {
    let edge = field.grid().r_max();
    DensityField::from_fn(*grid, |r| {
        if r > edge * (1.0 + 1e-12) {
            0.0
        } else {
            field.interpolate(r.min(edge))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(gamma: f64, delta: f64) -> Params {
        Params::new(gamma, delta, 0.0, 0.4, 5.0).unwrap()
    }

    #[test]
    fn closed_form_when_pressure_is_inactive() {
        let p = params(3.0, 0.01);
        let r = 1.0;
        let opts = StationaryOptions::new(1000).unwrap();
        let s = solve_bvp_given_lambda(r, r * r, &p, &opts).unwrap();
        let exact = |x: f64| (x.powi(4) - r.powi(4)) / (16.0 * p.delta);
        let err = s
            .n
            .grid()
            .nodes()
            .iter()
            .zip(s.n.values())
            .map(|(x, v)| (v - exact(*x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 2e-5, "central error {err}");
        let ext = solve_bvp_given_lambda(r, r * r, &p, &opts.extrapolated()).unwrap();
        let err = ext
            .n
            .grid()
            .nodes()
            .iter()
            .zip(ext.n.values())
            .map(|(x, v)| (v - exact(*x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "extrapolated error {err}");
        assert_relative_eq!(ext.slope, r.powi(3) / (4.0 * p.delta), max_relative = 1e-6);
    }

    #[test]
    fn end_slope_signs() {
        let p = params(10.0, 0.01);
        let opts = StationaryOptions::new(200).unwrap();
        assert!(solve_bvp_given_lambda(1.0, 0.0, &p, &opts).unwrap().slope < 0.0);
        assert!(solve_bvp_given_lambda(1.0, 1.0, &p, &opts).unwrap().slope > 0.0);
    }

    #[test]
    fn slope_changes_sign_once() {
        let p = params(10.0, 0.01);
        let opts = StationaryOptions::new(200).unwrap();
        let slopes: Vec<f64> = (0..10)
            .map(|k| solve_bvp_given_lambda(1.0, k as f64 / 9.0, &p, &opts).unwrap().slope)
            .collect();
        let changes = slopes.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        assert_eq!(changes, 1, "{slopes:?}");
    }

    #[test]
    fn lambda_profile_properties() {
        let p = params(10.0, 0.01);
        let opts = StationaryOptions::new(400).unwrap();
        let prof = find_lambda(1.0, &p, &opts).unwrap();
        assert!(prof.lambda > 0.0 && prof.lambda < 1.0);
        assert!(prof.residual_neumann < 1e-6);
        let v = prof.n.values();
        assert!(v.iter().all(|x| *x >= -1e-8));
        for w in v.windows(2) {
            assert!(w[1] <= w[0] + 1e-8);
        }
        assert_eq!(*v.last().unwrap(), 0.0);
        // equation at the origin with the symmetric laplacian 4(n1 − n0)/h²
        let h = prof.n.grid().h();
        let lap0 = 4.0 * (v[1] - v[0]) / (h * h);
        let lhs = v[0].max(0.0).powf(p.gamma) - p.delta * lap0;
        assert!((lhs - (1.0 - prof.lambda)).abs() < 10.0 * p.tol_newton);
        assert_relative_eq!(mass_of(&prof), prof.mass);
    }

    #[test]
    fn large_gamma_lambda_near_limit() {
        let p = params(200.0, 0.01);
        let opts = StationaryOptions::new(400).unwrap();
        let prof = find_lambda(1.0, &p, &opts).unwrap();
        let xc = limit::solve_xc(1.0, 0.01).unwrap();
        let lam_c = xc / 2.0;
        assert!((prof.lambda - lam_c).abs() < 0.15 * lam_c, "{} vs {lam_c}", prof.lambda);
    }

    #[test]
    fn lambda_converges_second_order() {
        let p = params(4.0, 0.05);
        let lam: Vec<f64> = [65, 129, 257, 513]
            .iter()
            .map(|&n| find_lambda(1.0, &p, &StationaryOptions::new(n).unwrap()).unwrap().lambda)
            .collect();
        let r1 = (lam[1] - lam[0]) / (lam[2] - lam[1]);
        let r2 = (lam[2] - lam[1]) / (lam[3] - lam[2]);
        assert!((3.0..=5.0).contains(&r1), "{lam:?} {r1}");
        assert!((3.0..=5.0).contains(&r2), "{lam:?} {r2}");
    }

    #[test]
    fn mass_of_synthetic_profiles() {
        let g = build_grid(1.3, 100).unwrap();
        let mk = |v: Vec<f64>| StationaryProfile {
            r_support: 1.3,
            lambda: 0.5,
            n: DensityField::new(g, v).unwrap(),
            gamma: 2.0,
            delta: 0.01,
            eps: 0.0,
            mass: 0.0,
            residual_neumann: 0.0,
            newton_iters: 0,
            bisect_iters: 0,
            anomaly: None,
        };
        assert_eq!(mass_of(&mk(vec![0.0; 100])), 0.0);
        assert_relative_eq!(mass_of(&mk(vec![1.0; 100])), 1.3 * 1.3 / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn mass_increases_with_radius() {
        let p = params(10.0, 0.01);
        let opts = StationaryOptions::new(200).unwrap();
        let m08 = find_lambda(0.8, &p, &opts).unwrap().mass;
        let m10 = find_lambda(1.0, &p, &opts).unwrap().mass;
        assert!(m08 < m10);
    }

    #[test]
    fn radius_for_mass_round_trip() {
        let p = params(10.0, 0.01);
        let opts = StationaryOptions::new(200).unwrap();
        let prof = find_radius_for_mass(0.4, &p, &opts).unwrap();
        assert!((prof.mass - 0.4).abs() < 1e-8 * 0.4);
        let bound = prof.n.values()[0] * prof.r_support.powi(2) / 2.0;
        assert!(prof.mass <= bound + 1e-12);
    }

    #[test]
    fn small_mass_gives_small_support() {
        let p = params(3.0, 0.01);
        let opts = StationaryOptions::new(100).unwrap();
        let a = find_radius_for_mass(1e-2, &p, &opts).unwrap();
        let b = find_radius_for_mass(1e-3, &p, &opts).unwrap();
        assert!(b.r_support < a.r_support);
        assert!(b.n.max() < a.n.max());
    }

    #[test]
    fn domain_too_small_is_reported() {
        let mut p = params(10.0, 0.01);
        p.r_b = 0.5;
        let opts = StationaryOptions::new(100).unwrap();
        assert!(matches!(find_radius_for_mass(0.4, &p, &opts), Err(Error::DomainTooSmall(_))));
    }

    #[test]
    fn extension_pads_with_zeros() {
        let p = params(10.0, 0.01);
        let opts = StationaryOptions::new(101).unwrap();
        let prof = find_lambda(1.0, &p, &opts).unwrap();
        let same = extend_to_domain(&prof, 1.0).unwrap();
        assert_eq!(same.values(), prof.n.values());
        let wide = extend_to_domain(&prof, 2.0).unwrap();
        assert_eq!(wide.values().len(), 201);
        for (i, v) in wide.values().iter().enumerate() {
            if i > 100 {
                assert_eq!(*v, 0.0);
            } else {
                assert_relative_eq!(*v, prof.n.values()[i], epsilon = 1e-13);
            }
        }
        assert!(extend_to_domain(&prof, 0.5).is_err());
    }

    #[test]
    fn custom_potential_profile() {
        let p = params(10.0, 0.01).with_potential(PotentialSpec::quartic(2.0).unwrap());
        let opts = StationaryOptions::new(200).unwrap();
        let prof = find_lambda(1.0, &p, &opts).unwrap();
        assert!(prof.lambda > 0.0 && prof.lambda < 1.0);
    }
}
