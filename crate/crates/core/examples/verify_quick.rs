//! The fast acceptance checks (everything except the two long time
//! integrations).

use chradial::app::verify::run_checks;

fn main() {
    let checks = run_checks(&[1, 2, 3, 4, 5, 6, 7, 8, 10], 1.0, |c| println!("{}", c.line()));
    if checks.iter().any(|c| !c.pass) {
        std::process::exit(1);
    }
}
