//! Finite-gamma stationary states approaching the incompressible limit.
//! Thread count follows CHRADIAL_THREADS.

use chradial::limit::gamma_sweep;

fn main() -> chradial::Result<()> {
    let sweep = gamma_sweep(0.4, 1e-2, &[4.0, 10.0, 50.0, 250.0], 400)?;
    let lim = &sweep.limit;
    println!("limit: R = {:.8}, R0 = {:.8}, lambda_c = {:.8}", lim.r_support, lim.r0, lim.lambda_c);
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "gamma", "R_gamma", "sup_err", "R_err", "p(R0)");
    for (gamma, row) in &sweep.rows {
        match row {
            Ok(r) => println!(
                "{gamma:>6} {:>12.8} {:>12.4e} {:>12.4e} {:>12.6}",
                r.r_gamma, r.sup_err, r.r_err, r.p_at_r0
            ),
            Err(e) => println!("{gamma:>6} failed: {e}"),
        }
    }
    Ok(())
}
