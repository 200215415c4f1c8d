//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
//!
//! Criteria 9 and 11 run long explicit time integrations (a minute or two
//! each with optimisations on).

use chradial::app::verify;

fn main() {
    let checks = verify::run_checks(&verify::ALL, 1.0, |c| println!("{}", c.line()));
    let failed: Vec<usize> = checks.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        checks.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
