//! Physical closures: pressure law, truncated mobility, entropy density,
//! chemical potential and confining potentials.

use std::fmt;
use std::sync::Arc;

use crate::grid::{DensityField, LaplacianStencil, RadialGrid};
use crate::quadrature;
use crate::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A caller-supplied increasing potential together with its derivative.
#[derive(Clone)]
pub struct CustomPotential {
    name: String,
    v: ScalarFn,
    dv: ScalarFn,
}

/// Confining potential `V(r)`.
#[derive(Clone)]
pub enum PotentialSpec {
    /// `V(r) = r²`.
    Quadratic,
    /// `V ≡ 0`: no confinement. Only meaningful for the evolution.
    Flat,
    Custom(CustomPotential),
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PotentialSpec({})", self.name())
    }
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Quadratic
    }
}

/// Number of probe radii used to validate a custom potential.
const PROBES: usize = 64;

impl PotentialSpec {
    /// Wrap `V` and `V'`; `V'` must be finite and strictly positive on
    /// `(0, r_max]` (checked at equispaced probe radii), `V` finite on `[0, r_max]`.
    pub fn custom<V, D>(name: impl Into<String>, v: V, dv: D, r_max: f64) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        if !(r_max > 0.0) {
            return Err(Error::InvalidArgument(format!("potential probe radius must be positive, got {r_max}")));
        }
        if !v(0.0).is_finite() {
            return Err(Error::InvalidArgument(format!("potential {name}: V(0) is not finite")));
        }
        for k in 1..=PROBES {
            let r = r_max * k as f64 / PROBES as f64;
            let (vr, dvr) = (v(r), dv(r));
            if !vr.is_finite() || !dvr.is_finite() {
                return Err(Error::InvalidArgument(format!("potential {name}: non-finite value at r = {r}")));
            }
            if dvr <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "potential {name}: V'({r}) = {dvr} is not positive"
                )));
            }
        }
        Ok(PotentialSpec::Custom(CustomPotential {
            name,
            v: Arc::new(v),
            dv: Arc::new(dv),
        }))
    }

    pub fn quadratic() -> Self {
        PotentialSpec::Quadratic
    }

    /// `V(r) = r⁴`.
    pub fn quartic(r_max: f64) -> Result<Self> {
        Self::custom("r^4", |r: f64| r.powi(4), |r: f64| 4.0 * r.powi(3), r_max)
    }

    /// `V(r) = e^r - 1`.
    pub fn exp_minus_one(r_max: f64) -> Result<Self> {
        Self::custom("exp(r)-1", |r: f64| r.exp_m1(), f64::exp, r_max)
    }

    /// The potentials the general-potential checks are exercised on:
    /// `r²`, `r⁴` and `e^r - 1`.
    pub fn test_registry(r_max: f64) -> Result<Vec<Self>> {
        Ok(vec![Self::quadratic(), Self::quartic(r_max)?, Self::exp_minus_one(r_max)?])
    }

    /// Look a potential up by the name used in configuration files.
    pub fn by_name(name: &str, r_max: f64) -> Result<Self> {
        match name {
            "quadratic" | "r^2" => Ok(Self::Quadratic),
            "flat" | "none" => Ok(Self::Flat),
            "quartic" | "r^4" => Self::quartic(r_max),
            "exp" | "exp(r)-1" => Self::exp_minus_one(r_max),
            other => Err(Error::InvalidArgument(format!("unknown potential {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            PotentialSpec::Quadratic => "quadratic",
            PotentialSpec::Flat => "flat",
            PotentialSpec::Custom(c) => &c.name,
        }
    }

    /// Short key accepted by [`PotentialSpec::by_name`].
    pub fn key(&self) -> &str {
        match self {
            PotentialSpec::Custom(c) if c.name == "r^4" => "quartic",
            PotentialSpec::Custom(c) if c.name == "exp(r)-1" => "exp",
            other => other.name(),
        }
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match self {
            PotentialSpec::Quadratic => r * r,
            PotentialSpec::Flat => 0.0,
            PotentialSpec::Custom(c) => (c.v)(r),
        }
    }

    #[inline]
    pub fn slope(&self, r: f64) -> f64 {
        match self {
            PotentialSpec::Quadratic => 2.0 * r,
            PotentialSpec::Flat => 0.0,
            PotentialSpec::Custom(c) => (c.dv)(r),
        }
    }

    pub fn is_confining(&self) -> bool {
        !matches!(self, PotentialSpec::Flat)
    }
}

/// Physical and numerical parameters.
#[derive(Debug, Clone)]
pub struct Params {
    /// Pressure stiffness γ (> 1).
    pub gamma: f64,
    /// Surface-tension coefficient δ (> 0).
    pub delta: f64,
    /// Regularisation ε: shift `r → r+ε` and mobility floor.
    pub eps: f64,
    /// Target mass `∫ r n dr`.
    pub mass: f64,
    /// Domain radius.
    pub r_b: f64,
    pub potential: PotentialSpec,
    pub tol_root: f64,
    pub tol_newton: f64,
}

impl Params {
    pub const DEFAULT_TOL_ROOT: f64 = 1e-12;
    pub const DEFAULT_TOL_NEWTON: f64 = 1e-10;

    /// Validated parameters with the quadratic potential and default tolerances.
    pub fn new(gamma: f64, delta: f64, eps: f64, mass: f64, r_b: f64) -> Result<Self> {
        let p = Self {
            gamma,
            delta,
            eps,
            mass,
            r_b,
            potential: PotentialSpec::Quadratic,
            tol_root: Self::DEFAULT_TOL_ROOT,
            tol_newton: Self::DEFAULT_TOL_NEWTON,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_potential(mut self, potential: PotentialSpec) -> Self {
        self.potential = potential;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return fail(format!("gamma must exceed 1 (got {})", self.gamma));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return fail(format!("delta must be positive (got {})", self.delta));
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return fail(format!("eps must be nonnegative (got {})", self.eps));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return fail(format!("mass must be positive (got {})", self.mass));
        }
        if !(self.r_b > 0.0) || !self.r_b.is_finite() {
            return fail(format!("r_b must be positive (got {})", self.r_b));
        }
        if !(self.tol_root > 0.0) || !(self.tol_newton > 0.0) {
            return fail("tolerances must be positive".into());
        }
        Ok(())
    }
}

/// `max(0, n)^γ`.
pub fn pressure(n: f64, gamma: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        n.powf(gamma)
    }
}

/// Truncated mobility: `ε` for `n ≤ ε`, `n` otherwise.
#[inline]
pub fn mobility(n: f64, eps: f64) -> f64 {
    if n <= eps {
        eps
    } else {
        n
    }
}

/// Regularised entropy density with `φ'' = 1/B_ε` and `φ(1) = φ'(1) = 0`.
pub fn entropy_phi(x: f64, eps: f64) -> f64 {
    if x <= eps {
        x * (eps.ln() - 1.0) + 1.0 + x * x / (2.0 * eps) - eps / 2.0
    } else {
        x * (x.ln() - 1.0) + 1.0
    }
}

/// Pressure law evaluated in the hot loops; integer exponents avoid `powf`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PressureLaw {
    gamma: f64,
    int_gamma: Option<i32>,
}

impl PressureLaw {
    pub fn new(gamma: f64) -> Self {
        let int_gamma = (gamma.fract() == 0.0 && gamma.abs() <= 512.0).then_some(gamma as i32);
        Self { gamma, int_gamma }
    }

    #[inline]
    fn pow(&self, n: f64, shift: i32) -> f64 {
        match self.int_gamma {
            Some(g) => n.powi(g + shift),
            None => n.powf(self.gamma + shift as f64),
        }
    }

    /// `max(0,n)^γ`
    #[inline]
    pub fn value(&self, n: f64) -> f64 {
        if n <= 0.0 {
            0.0
        } else {
            self.pow(n, 0)
        }
    }

    /// `γ max(0,n)^{γ-1}`
    #[inline]
    pub fn derivative(&self, n: f64) -> f64 {
        if n <= 0.0 {
            0.0
        } else {
            self.gamma * self.pow(n, -1)
        }
    }

    /// Pressure and its derivative from a single power evaluation.
    #[inline]
    pub fn value_and_derivative(&self, n: f64) -> (f64, f64) {
        if n <= 0.0 {
            (0.0, 0.0)
        } else {
            let q = self.pow(n, -1);
            (q * n, self.gamma * q)
        }
    }

    /// `max(0,n)^{γ+1}/(γ+1)`, whose derivative is the pressure.
    #[inline]
    pub fn energy_density(&self, n: f64) -> f64 {
        if n <= 0.0 {
            0.0
        } else {
            self.pow(n, 1) / (self.gamma + 1.0)
        }
    }
}

/// `μ = max(0,n)^γ - δ (1/(r+ε)) ∂_r((r+ε) ∂_r n)` at every node.
pub fn chemical_potential(grid: &RadialGrid, n: &DensityField, p: &Params) -> Result<DensityField> {
    if n.grid() != grid {
        return Err(Error::InvalidArgument("density is not defined on this grid".into()));
    }
    let law = PressureLaw::new(p.gamma);
    let stencil = LaplacianStencil::new(grid, p.eps);
    let v = n.values();
    let mu = (0..v.len())
        .map(|i| law.value(v[i]) - p.delta * stencil.apply_at(v, i))
        .collect();
    DensityField::new(*grid, mu)
}

/// `𝓗(z) = ∫_z^R u V(u) du`.
pub fn h_integral(z: f64, r: f64, v: &PotentialSpec) -> Result<f64> {
    if !(z >= 0.0) || z > r {
        return Err(Error::InvalidArgument(format!("need 0 <= z <= R, got z = {z}, R = {r}")));
    }
    match v {
        PotentialSpec::Quadratic => Ok((r.powi(4) - z.powi(4)) / 4.0),
        PotentialSpec::Flat => Ok(0.0),
        PotentialSpec::Custom(_) => quadrature::quad(|u| u * v.value(u), z, r),
    }
}

/// `∫_r^R 𝓗(z)/z dz`, rewritten by parts as `∫_r^R u V(u) ln(u/r) du`.
pub fn h_over_z_integral(r: f64, big_r: f64, v: &PotentialSpec) -> Result<f64> {
    if !(r > 0.0) || r > big_r {
        return Err(Error::InvalidArgument(format!("need 0 < r <= R, got r = {r}, R = {big_r}")));
    }
    match v {
        PotentialSpec::Quadratic => {
            let r4 = big_r.powi(4);
            Ok(r4 / 4.0 * (big_r / r).ln() - (r4 - r.powi(4)) / 16.0)
        }
        PotentialSpec::Flat => Ok(0.0),
        PotentialSpec::Custom(_) => quadrature::quad(|u| u * v.value(u) * (u / r).ln(), r, big_r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pressure_examples() {
        assert_eq!(pressure(1.0, 3.7), 1.0);
        assert_eq!(pressure(-0.3, 4.0), 0.0);
        assert_relative_eq!(pressure(0.5, 2.0), 0.25);
        let law = PressureLaw::new(4.0);
        assert_relative_eq!(law.value(0.7), pressure(0.7, 4.0), epsilon = 1e-15);
        assert_relative_eq!(law.derivative(0.7), 4.0 * 0.7f64.powi(3), epsilon = 1e-15);
        let frac = PressureLaw::new(2.5);
        assert_relative_eq!(frac.value(0.7), 0.7f64.powf(2.5), epsilon = 1e-15);
    }

    #[test]
    fn mobility_examples() {
        assert_eq!(mobility(0.5, 0.1), 0.5);
        assert_eq!(mobility(0.05, 0.1), 0.1);
        assert_eq!(mobility(-1.0, 0.1), 0.1);
    }

    #[test]
    fn entropy_examples() {
        assert!(entropy_phi(1.0, 0.5).abs() < 1e-15);
        let eps: f64 = 0.2;
        let left = eps * (eps.ln() - 1.0) + 1.0 + eps / 2.0 - eps / 2.0;
        assert_relative_eq!(entropy_phi(eps, eps), left, epsilon = 1e-15);
        assert_relative_eq!(entropy_phi(eps, eps), eps * (eps.ln() - 1.0) + 1.0, epsilon = 1e-15);
        // x = 0 in the first branch: 1 - ε/2
        assert_relative_eq!(entropy_phi(0.0, 0.1), 0.95, epsilon = 1e-15);
    }

    #[test]
    fn entropy_is_nonnegative_on_dense_sample() {
        for eps in [1e-3, 0.05, 0.3, 0.9] {
            for k in 0..=20_000 {
                let x = -10.0 + 20.0 * k as f64 / 20_000.0;
                assert!(entropy_phi(x, eps) >= 0.0, "phi({x}, {eps}) < 0");
            }
        }
    }

    #[test]
    fn entropy_upper_bound() {
        // φ_ε(x) ≤ φ(x) + 1 - ε/2 for x ≥ 0, with φ(0) = 1
        for eps in [1e-3, 0.05, 0.3, 0.9] {
            for k in 0..=5000 {
                let x = 5.0 * k as f64 / 5000.0;
                let phi = if x > 0.0 { x * (x.ln() - 1.0) + 1.0 } else { 1.0 };
                assert!(entropy_phi(x, eps) <= phi + 1.0 - eps / 2.0 + 1e-12);
            }
        }
    }

    #[test]
    fn pressure_complementarity_vanishes_with_stiffness() {
        let min_over_unit = |gamma: f64| {
            (0..=10_000)
                .map(|k| {
                    let n = k as f64 / 10_000.0;
                    pressure(n, gamma) * (n - 1.0)
                })
                .fold(f64::INFINITY, f64::min)
        };
        let mut previous = f64::NEG_INFINITY;
        for gamma in [2.0, 10.0, 50.0, 250.0, 1000.0] {
            let m = min_over_unit(gamma);
            assert!(m <= 0.0);
            // closed form of the minimum: -(γ/(γ+1))^γ /(γ+1)
            let exact = -(gamma / (gamma + 1.0)).powf(gamma) / (gamma + 1.0);
            assert!((m - exact).abs() < 1e-6);
            assert!(m > previous);
            previous = m;
        }
        assert!(previous.abs() < 1e-3);
    }

    #[test]
    fn chemical_potential_examples() {
        let g = build_grid(1.0, 21).unwrap();
        let p = Params::new(3.0, 0.01, 0.0, 1.0, 1.0).unwrap();
        let zero = DensityField::constant(g, 0.0).unwrap();
        assert!(chemical_potential(&g, &zero, &p).unwrap().values().iter().all(|v| *v == 0.0));
        let c = DensityField::constant(g, 0.8).unwrap();
        for v in chemical_potential(&g, &c, &p).unwrap().values() {
            assert_relative_eq!(*v, 0.8f64.powi(3), epsilon = 1e-14);
        }
        // γ = 1, δ = 1: μ = (1 - r²) + 4 away from the Neumann row
        let mut p1 = p.clone();
        p1.gamma = 1.0;
        p1.delta = 1.0;
        let n = DensityField::from_fn(g, |r| 1.0 - r * r).unwrap();
        let mu = chemical_potential(&g, &n, &p1).unwrap();
        for i in 0..20 {
            let r = g.node(i);
            assert_relative_eq!(mu.values()[i], 1.0 - r * r + 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn params_validation_messages() {
        let err = Params::new(0.5, 0.01, 0.0, 1.0, 1.0).unwrap_err().to_string();
        assert!(err.contains("gamma must exceed 1"), "{err}");
        assert!(Params::new(2.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(Params::new(2.0, 0.1, -1e-3, 1.0, 1.0).is_err());
        assert!(Params::new(2.0, 0.1, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn custom_potential_validation() {
        assert!(PotentialSpec::custom("dec", |r: f64| -r, |_| -1.0, 1.0).is_err());
        assert!(PotentialSpec::custom("flat", |_| 0.0, |_| 0.0, 1.0).is_err());
        assert!(PotentialSpec::quartic(2.0).is_ok());
        assert_eq!(PotentialSpec::test_registry(1.0).unwrap().len(), 3);
    }

    #[test]
    fn h_integral_examples() {
        let q = PotentialSpec::Quadratic;
        assert_eq!(h_integral(1.3, 1.3, &q).unwrap(), 0.0);
        assert_relative_eq!(h_integral(0.0, 1.0, &q).unwrap(), 0.25);
        let linear = PotentialSpec::custom("r", |r: f64| r, |_| 1.0, 1.0).unwrap();
        assert_relative_eq!(h_integral(0.5, 1.0, &linear).unwrap(), (1.0 - 0.125) / 3.0, epsilon = 1e-14);
        assert!(h_integral(1.2, 1.0, &q).is_err());
    }

    #[test]
    fn h_over_z_matches_nested_quadrature() {
        let quartic = PotentialSpec::quartic(1.0).unwrap();
        for v in [PotentialSpec::Quadratic, quartic] {
            for r in [0.2, 0.5, 0.9] {
                let nested = quadrature::quad(|z| h_integral(z, 1.0, &v).unwrap() / z, r, 1.0).unwrap();
                assert_relative_eq!(h_over_z_integral(r, 1.0, &v).unwrap(), nested, epsilon = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn h_integral_quadratic_closed_form(z in 0.0f64..1.0, big_r in 1.0f64..3.0) {
            let as_custom = PotentialSpec::custom("r^2", |r: f64| r * r, |r: f64| 2.0 * r, big_r).unwrap();
            let exact = (big_r.powi(4) - z.powi(4)) / 4.0;
            let numeric = h_integral(z, big_r, &as_custom).unwrap();
            prop_assert!((numeric - exact).abs() <= 1e-10 * exact.abs().max(1e-300));
        }

        #[test]
        fn mobility_floor_and_monotone(a in -5.0f64..5.0, b in -5.0f64..5.0, eps in 1e-6f64..0.5) {
            prop_assert!(mobility(a, eps) >= eps);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(mobility(lo, eps) <= mobility(hi, eps));
        }
    }
}
