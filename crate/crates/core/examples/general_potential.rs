//! Limit multiplier and layer width for several increasing potentials,
//! compared with the small-delta asymptote.

use chradial::general::{general_sweep, jump_general_asymptote, GeneralLimitProfile};
use chradial::model::PotentialSpec;

fn main() -> chradial::Result<()> {
    let big_r = 1.0;
    let deltas = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
    for v in PotentialSpec::test_registry(big_r)? {
        println!("V = {}", v.name());
        for row in general_sweep(big_r, &deltas, &v)? {
            let asym = jump_general_asymptote(big_r, row.delta, &v);
            println!(
                "  delta {:>6.0e}  tau {:.6e} (asym {:.6e})  lambda {:.6e}  ratio {:.5}",
                row.delta, row.tau, asym.tau, row.lambda, row.ratio
            );
        }
    }
    let v = PotentialSpec::custom("r^3", |r: f64| r.powi(3), |r: f64| 3.0 * r * r, 2.0)?;
    let prof = GeneralLimitProfile::new(big_r, 1e-4, v)?;
    println!("custom {}: R0 = {:.8}, lambda = {:.8}", prof.potential.name(), prof.r0, prof.lambda);
    for k in 0..=10 {
        let r = prof.r0 + (big_r - prof.r0) * k as f64 / 10.0;
        println!("  r = {r:.5}  n = {:.8}", prof.density_at(r)?);
    }
    Ok(())
}
