//! Sourceless evolution in the quadratic potential: mass stays put, the
//! energy decreases.

use chradial::evolution::{make_initial, run, stable_dt, EvolutionConfig, InitialShape};
use chradial::grid::build_grid;
use chradial::model::Params;

fn main() -> chradial::Result<()> {
    let g = build_grid(2.0, 300)?;
    let p = Params::new(4.0, 0.01, g.h(), 1.0, 2.0)?;
    let n0 = make_initial(InitialShape::GaussianBump { amplitude: 1.0, width: 0.5, background: 0.05 }, &g)?;
    let dt = 0.9 * stable_dt(&g, &n0, &p);
    let mut cfg = EvolutionConfig::new(dt, 1e4 * dt)?;
    cfg.output_every = 1000;
    cfg.stall_checks = 0;
    let out = run(&n0, &p, &cfg)?;
    println!("dt = {dt:.3e}");
    println!("{:>12} {:>22} {:>22} {:>14}", "t", "mass", "energy", "entropy");
    for d in &out.diagnostics {
        println!("{:>12.4e} {:>22.16} {:>22.16} {:>14.8}", d.t, d.mass, d.energy, d.entropy);
    }
    Ok(())
}
