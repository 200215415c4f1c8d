//! Finite-stiffness stationary state of prescribed mass: support radius,
//! multiplier and the profile itself.

use chradial::model::Params;
use chradial::stationary::{find_lambda, find_radius_for_mass, solve_bvp_given_lambda, StationaryOptions};

fn main() -> chradial::Result<()> {
    let p = Params::new(4.0, 0.01, 0.0, 0.4, 5.0)?;
    let opts = StationaryOptions::new(400)?;

    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let s = solve_bvp_given_lambda(1.0, lambda, &p, &opts)?;
        println!("R = 1, lambda = {lambda:.2}: n'(R) = {:+.4e}", s.slope);
    }
    let fixed = find_lambda(1.0, &p, &opts)?;
    println!("R = 1: lambda* = {:.10}, mass = {:.6}", fixed.lambda, fixed.mass);

    let prof = find_radius_for_mass(0.4, &p, &opts)?;
    println!(
        "mass 0.4: R = {:.10}, lambda = {:.10}, |n'(R)| = {:.2e}",
        prof.r_support, prof.lambda, prof.residual_neumann
    );
    let pr = prof.pressure();
    let g = prof.n.grid();
    for i in (0..g.len()).step_by(40) {
        println!("{:>8.4} {:>12.6} {:>12.6}", g.node(i), prof.n.values()[i], pr[i]);
    }
    Ok(())
}
