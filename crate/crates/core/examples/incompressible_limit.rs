//! Limit profile for V = r^2: saturated core, transition layer, and the
//! pressure jump against its small-delta asymptote.

use chradial::limit::{build_profile, delta_sweep, jump_asymptotic};

fn main() -> chradial::Result<()> {
    let (m, delta) = (0.4, 1e-2);
    let prof = build_profile(m, delta, 1.5, 61)?;
    println!("m = {m}, delta = {delta}");
    println!("R = {:.12}  R0 = {:.12}  x_c = {:.12}", prof.r_support, prof.r0, prof.x_c);
    println!("jump = lambda_c = {:.12}, asymptote {:.12}", prof.lambda_c, jump_asymptotic(prof.r_support, delta));
    println!("proved existence range m > 72 sqrt(delta): {}", prof.within_hypothesis);
    for (r, (n, p)) in prof.n_inc.grid().nodes().iter().zip(prof.n_inc.values().iter().zip(prof.p_inc.values())).step_by(5) {
        println!("{r:>6.3} {n:>10.6} {p:>10.6}");
    }
    println!("\n{:>8} {:>14} {:>14} {:>8}", "delta", "lambda_c", "asymptote", "ratio");
    for row in delta_sweep(1.0, &[1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8])? {
        println!("{:>8.0e} {:>14.8e} {:>14.8e} {:>8.5}", row.delta, row.lambda_c, row.asymptote, row.ratio);
    }
    Ok(())
}
