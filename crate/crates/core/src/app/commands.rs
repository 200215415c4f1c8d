//! One function per subcommand. Each writes its files into the output
//! directory through [`Outputs`], which keeps the list for the manifest.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{Command, RunConfig};
use super::csv;
use super::manifest::{FileEntry, RunManifest};
use super::verify;
use crate::evolution::{self, Snapshot};
use crate::general::{self, GeneralLimitProfile};
use crate::grid::build_grid;
use crate::limit;
use crate::stationary::{find_lambda, find_radius_for_mass};
use crate::{Error, Result};

/// Files emitted so far plus convergence notes.
pub struct Outputs {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl Outputs {
    pub fn new(dir: &Path, cfg: &RunConfig) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), manifest: RunManifest::new(cfg) })
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), text)?;
        self.manifest.files.retain(|f| f.name != name);
        self.manifest.files.push(FileEntry { name: name.to_string(), bytes: text.len() as u64 });
        Ok(())
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.manifest.convergence.insert(key.to_string(), value);
    }
}

/// Run the subcommand named in `cfg`.
pub fn dispatch(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    match cfg.command {
        Command::Evolve => cmd_evolve(cfg, out),
        Command::Stationary => cmd_stationary(cfg, out),
        Command::Limit => cmd_limit(cfg, out),
        Command::General => cmd_general(cfg, out),
        Command::Sweep => cmd_sweep(cfg, out),
        Command::Verify => cmd_verify(cfg, out),
    }
}

pub const SNAPSHOT_HEADER: [&str; 4] = ["r", "n", "p", "mu"];
pub const DIAGNOSTICS_HEADER: [&str; 7] = ["t", "mass", "energy", "entropy", "min_n", "max_n", "dt_used"];

fn snapshot_csv(s: &Snapshot) -> String {
    let g = s.n.grid();
    csv::render(
        &SNAPSHOT_HEADER,
        (0..g.len()).map(|i| [g.node(i), s.n.values()[i], s.pressure[i], s.mu[i]]),
    )
}

pub fn cmd_evolve(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let grid = build_grid(cfg.r_max, cfg.n_nodes)?;
    let p = cfg.params(grid.h())?;
    let n0 = evolution::make_initial(cfg.initial_shape(), &grid)?;
    let ecfg = cfg.evolution()?;
    out.note("stable_dt_initial", json!(evolution::stable_dt(&grid, &n0, &p)));
    let run = evolution::run(&n0, &p, &ecfg)?;

    let mut names = Vec::new();
    for (k, s) in run.snapshots.iter().enumerate() {
        let name = format!("snapshot_{k:03}.csv");
        out.write(&name, &snapshot_csv(s))?;
        names.push((name, s.t));
    }
    let diag = csv::render(
        &DIAGNOSTICS_HEADER,
        run.diagnostics.iter().map(|d| [d.t, d.mass, d.energy, d.entropy, d.min_n, d.max_n, d.dt_used]),
    );
    out.write("diagnostics.csv", &diag)?;
    out.write("plot.gp", &plot_script(&names, cfg.r_max))?;

    let last = run.snapshots.last().expect("final snapshot");
    let interior_p = grid
        .nodes()
        .iter()
        .zip(&last.pressure)
        .filter(|(r, _)| **r <= 0.4 * cfg.r_max)
        .map(|(_, p)| *p)
        .fold(f64::NEG_INFINITY, f64::max);
    out.note("steps", json!(run.steps));
    out.note("t_final", json!(run.t_final));
    out.note("stalled", json!(run.stalled));
    out.note("subdivided_steps", json!(run.subdivided_steps));
    out.note("last_rate", json!(finite(run.last_rate)));
    out.note("snapshot_times", json!(names.iter().map(|n| n.1).collect::<Vec<_>>()));
    if let Some(d) = run.diagnostics.last() {
        out.note("final_mass", json!(d.mass));
        out.note("final_energy", json!(d.energy));
        out.note("final_min_n", json!(d.min_n));
    }
    out.note("final_interior_max_pressure", json!(finite(interior_p)));
    println!(
        "evolve: {} steps to t = {}, {} snapshots{}",
        run.steps,
        run.t_final,
        run.snapshots.len(),
        if run.stalled { ", stationary" } else { "" }
    );
    Ok(())
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Gnuplot script: up to four snapshots in a 2x2 layout, density and
/// pressure in each panel.
pub fn plot_script(snapshots: &[(String, f64)], r_max: f64) -> String {
    let picks: Vec<usize> = if snapshots.len() <= 4 {
        (0..snapshots.len()).collect()
    } else {
        let last = snapshots.len() - 1;
        vec![0, last / 3, 2 * last / 3, last]
    };
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 1200,900\n");
    s.push_str("set output 'evolution.png'\n");
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xrange [0:{r_max}]\n"));
    s.push_str("set xlabel 'r'\n");
    s.push_str("set multiplot layout 2,2\n");
    for (panel, &k) in picks.iter().enumerate() {
        let (name, t) = &snapshots[k];
        let label = (b'a' + panel as u8) as char;
        s.push_str(&format!("set title '({label}) t = {t}'\n"));
        s.push_str(&format!(
            "plot '{name}' using 1:2 skip 1 with lines title 'n', '{name}' using 1:3 skip 1 with lines title 'p'\n"
        ));
    }
    s.push_str("unset multiplot\n");
    s
}

pub fn cmd_stationary(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let span = cfg.radius.unwrap_or(cfg.r_b);
    let p = cfg.params(span / (cfg.n_nodes - 1) as f64)?;
    let opts = cfg.stationary_options()?;
    let prof = match cfg.radius {
        Some(r) => find_lambda(r, &p, &opts)?,
        None => find_radius_for_mass(cfg.mass, &p, &opts)?,
    };
    let g = *prof.n.grid();
    let pressure = prof.pressure();
    let mu = prof.chemical_potential()?;
    let profile = csv::render(
        &SNAPSHOT_HEADER,
        (0..g.len()).map(|i| [g.node(i), prof.n.values()[i], pressure[i], mu.values()[i]]),
    );
    out.write("profile.csv", &profile)?;
    let summary = csv::render(
        &["R", "lambda", "mass", "residual_neumann"],
        [[prof.r_support, prof.lambda, prof.mass, prof.residual_neumann]],
    );
    out.write("summary.csv", &summary)?;
    out.note("newton_iters", json!(prof.newton_iters));
    out.note("bisect_iters", json!(prof.bisect_iters));
    out.note("residual_neumann", json!(prof.residual_neumann));
    out.note("eps", json!(p.eps));
    if let Some(a) = &prof.anomaly {
        out.note("anomaly", json!(a));
    }
    println!("stationary: R = {}, lambda = {}, mass = {}", prof.r_support, prof.lambda, prof.mass);
    Ok(())
}

pub const LIMIT_HEADER: [&str; 7] = ["R", "R0", "lambda_c", "x_c", "jump", "mass", "jump_asymptote"];

pub fn cmd_limit(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let big_r = match cfg.radius {
        Some(r) => r,
        None => limit::radius_for_mass(cfg.mass, cfg.delta)?,
    };
    let mut prof = limit::profile_for_radius(big_r, cfg.delta, 1.2 * big_r, cfg.n_nodes)?;
    if cfg.radius.is_none() {
        prof.mass = cfg.mass;
    }
    let asym = limit::jump_asymptotic(big_r, cfg.delta);
    out.write(
        "limit.csv",
        &csv::render(&LIMIT_HEADER, [[prof.r_support, prof.r0, prof.lambda_c, prof.x_c, prof.jump, prof.mass, asym]]),
    )?;
    let g = *prof.n_inc.grid();
    out.write(
        "profile.csv",
        &csv::render(
            &["r", "n", "p"],
            (0..g.len()).map(|i| [g.node(i), prof.n_inc.values()[i], prof.p_inc.values()[i]]),
        ),
    )?;
    out.note("within_existence_hypothesis", json!(prof.within_hypothesis));
    out.note("x_c", json!(prof.x_c));
    println!("limit: R = {}, R0 = {}, lambda_c = {}", prof.r_support, prof.r0, prof.lambda_c);
    Ok(())
}

pub const GENERAL_HEADER: [&str; 6] = ["delta", "tau", "R0", "lambda", "lambda_asymptote", "ratio"];

pub fn cmd_general(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let v = cfg.potential_spec()?;
    let big_r = cfg.radius.unwrap_or(1.0);
    let rows = general::general_sweep(big_r, &cfg.deltas, &v)?;
    out.write(
        "general.csv",
        &csv::render(
            &GENERAL_HEADER,
            rows.iter().map(|r| [r.delta, r.tau, r.r0, r.lambda, r.lambda_asymptote, r.ratio]),
        ),
    )?;
    let prof = GeneralLimitProfile::new(big_r, cfg.delta, v)?;
    let g = build_grid(1.2 * big_r, cfg.n_nodes)?;
    let mut table = Vec::with_capacity(g.len());
    for r in g.nodes() {
        let n = if r > 0.0 { prof.density_at(r)? } else { 1.0 };
        table.push([r, n, prof.pressure_at(r)]);
    }
    out.write("profile.csv", &csv::render(&["r", "n", "p"], table))?;
    out.note("radius", json!(big_r));
    out.note("potential", json!(prof.potential.name()));
    out.note("profile_tau", json!(prof.tau));
    out.note("profile_lambda", json!(prof.lambda));
    println!("general: {} rows for V = {}, R = {big_r}", rows.len(), prof.potential.name());
    Ok(())
}

pub const GAMMA_SWEEP_HEADER: [&str; 7] = ["gamma", "R_gamma", "sup_err", "R_err", "p_at_R0", "lambda_c", "jump_asymptote"];
pub const DELTA_SWEEP_HEADER: [&str; 6] = ["delta", "R", "lambda_c", "asymptote", "ratio", "bounds_apply"];

pub fn cmd_sweep(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let sweep = limit::gamma_sweep(cfg.mass, cfg.delta, &cfg.gammas, cfg.n_nodes)?;
    let mut failed = Vec::new();
    let rows: Vec<[f64; 7]> = sweep
        .rows
        .iter()
        .map(|(gamma, row)| match row {
            Ok(r) => [r.gamma, r.r_gamma, r.sup_err, r.r_err, r.p_at_r0, r.lambda_c, r.jump_asymptote],
            Err(e) => {
                failed.push(format!("gamma = {gamma}: {e}"));
                [*gamma, f64::NAN, f64::NAN, f64::NAN, f64::NAN, sweep.limit.lambda_c, f64::NAN]
            }
        })
        .collect();
    out.write("gamma_sweep.csv", &csv::render(&GAMMA_SWEEP_HEADER, rows))?;

    let big_r = cfg.radius.unwrap_or(sweep.limit.r_support);
    let deltas = limit::delta_sweep(big_r, &cfg.deltas)?;
    let feasible = |d: f64| 6f64.powi(4) * 8.0 * d < big_r.powi(4);
    out.write(
        "delta_sweep.csv",
        &csv::render(
            &DELTA_SWEEP_HEADER,
            deltas
                .iter()
                .map(|d| [d.delta, big_r, d.lambda_c, d.asymptote, d.ratio, if feasible(d.delta) { 1.0 } else { 0.0 }]),
        ),
    )?;
    out.note("limit_radius", json!(sweep.limit.r_support));
    out.note("limit_r0", json!(sweep.limit.r0));
    out.note("lambda_c", json!(sweep.limit.lambda_c));
    out.note("threads", json!(crate::par::sweep_threads()));
    out.note("failed_rows", json!(failed));
    println!("sweep: {} gamma rows, {} delta rows", sweep.rows.len(), deltas.len());
    if !failed.is_empty() {
        return Err(Error::Infeasible(format!("gamma sweep rows failed: {}", failed.join("; "))));
    }
    Ok(())
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let checks = verify::run_checks(&cfg.criteria, cfg.tolerance_scale, |c| println!("{}", c.line()));
    let text: String = checks.iter().map(|c| c.line() + "\n").collect();
    out.write("verify.txt", &text)?;
    out.write(
        "verify.csv",
        &csv::render(
            &["criterion", "pass"],
            checks.iter().map(|c| [c.id as f64, if c.pass { 1.0 } else { 0.0 }]),
        ),
    )?;
    for c in &checks {
        out.note(
            &format!("criterion_{:02}", c.id),
            json!({ "pass": c.pass, "detail": c.detail, "seconds": c.seconds }),
        );
    }
    let failed: Vec<usize> = checks.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    if failed.is_empty() {
        println!("verify: all {} criteria pass", checks.len());
        Ok(())
    } else {
        Err(Error::Verification(failed))
    }
}
