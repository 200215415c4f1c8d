//! Bracketed scalar root finding.
//!
//! Everything here assumes the caller has a sign change on `[lo, hi]`.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

fn bracket_check(flo: f64, fhi: f64, lo: f64, hi: f64) -> Result<()> {
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::BracketFailure(format!(
            "non-finite endpoint values on [{lo}, {hi}]"
        )));
    }
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::BracketFailure(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    Ok(())
}

/// Plain bisection until the bracket is narrower than `xtol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> Result<Root> {
    let mut flo = f(lo);
    let fhi = f(hi);
    bracket_check(flo, fhi, lo, hi)?;
    if flo == 0.0 {
        return Ok(Root { x: lo, fx: 0.0, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, fx: 0.0, iterations: 0 });
    }
    let mut iterations = 0;
    let mut best = (lo, flo);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == 0.0 {
            return Ok(Root { x: mid, fx: 0.0, iterations });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    let (x, fx) = if fm.abs() <= best.1.abs() { (mid, fm) } else { best };
    Ok(Root { x, fx, iterations })
}

/// One Newton step from `x`, kept only when it stays inside `[lo, hi]` and
/// does not increase `|f|`.
pub fn newton_polish(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
    let fx = f(x);
    let d = df(x);
    if fx == 0.0 || d == 0.0 || !d.is_finite() {
        return x;
    }
    let y = x - fx / d;
    if y.is_finite() && y >= lo && y <= hi && f(y).abs() <= fx.abs() {
        y
    } else {
        x
    }
}

/// Illinois-modified regula falsi. Stops when `|f| <= ftol` or the bracket
/// is narrower than `xtol`.
pub fn illinois(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<Root> {
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    bracket_check(fa, fb, a, b)?;
    if fa.abs() <= ftol {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb.abs() <= ftol {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    let mut side = 0i8;
    for it in 1..=max_iter {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc.abs() <= ftol || (b - a).abs() < xtol {
            return Ok(Root { x: c, fx: fc, iterations: it });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: fa.abs().min(fb.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r.x, 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn bisect_requires_sign_change() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10), Err(Error::BracketFailure(_))));
    }

    #[test]
    fn polish_improves() {
        let f = |x: f64| x.powi(3) - 3.0;
        let x = newton_polish(f, |x| 3.0 * x * x, 1.44, 1.0, 2.0);
        assert!((x - 3f64.cbrt()).abs() < (1.44 - 3f64.cbrt()).abs());
    }

    #[test]
    fn illinois_converges() {
        let r = illinois(|x| Ok(x.exp() - 3.0), 0.0, 3.0, 1e-15, 1e-14, 100).unwrap();
        assert_relative_eq!(r.x, 3f64.ln(), epsilon = 1e-12);
    }
}
