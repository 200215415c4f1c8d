//! Growth-driven spreading without a confining potential: the density
//! saturates behind a moving front and the pressure settles at the
//! homeostatic value.
//!
//! `cargo run --release --example evolve_growth [t_end]`

use chradial::evolution::{make_initial, run, EvolutionConfig, GrowthSpec, InitialShape};
use chradial::grid::build_grid;
use chradial::model::{Params, PotentialSpec};

fn main() -> chradial::Result<()> {
    let t_end: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let g = build_grid(10.0, 300)?;
    let p = Params::new(10.0, 1e-2, g.h(), 1.0, 10.0)?.with_potential(PotentialSpec::Flat);
    let n0 = make_initial(InitialShape::TruncatedArctan { amplitude: 0.9, center: 2.0, width: 0.2 }, &g)?;
    let mut cfg = EvolutionConfig::new(1e-7, t_end)?;
    cfg.source = Some(GrowthSpec::new(10.0, 1.0)?);
    cfg.output_every = 100_000;
    cfg.stall_checks = 0;
    let out = run(&n0, &p, &cfg)?;
    let last = out.snapshots.last().unwrap();
    println!("t = {}  steps = {}", out.t_final, out.steps);
    println!("{:>6} {:>10} {:>10}", "r", "n", "p");
    for i in (0..g.len()).step_by(20) {
        println!("{:>6.2} {:>10.6} {:>10.6}", g.node(i), last.n.values()[i], last.pressure[i]);
    }
    for d in &out.diagnostics {
        println!("t = {:.4}  mass = {:.6}  max n = {:.6}", d.t, d.mass, d.max_n);
    }
    Ok(())
}
