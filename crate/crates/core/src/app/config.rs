//! Line-oriented `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Command-line
//! overrides are applied after the file, in order. Every key has a default
//! that depends on the subcommand; [`RunConfig::echo`] prints the fully
//! resolved configuration in a form [`parse_config_str`] reads back.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::evolution::{EvolutionConfig, FaceAverage, GrowthSpec, InitialShape};
use crate::model::{Params, PotentialSpec};
use crate::stationary::{Discretization, StationaryOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Stationary,
    Limit,
    General,
    Sweep,
    Verify,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Evolve,
        Command::Stationary,
        Command::Limit,
        Command::General,
        Command::Sweep,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Stationary => "stationary",
            Command::Limit => "limit",
            Command::General => "general",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::ConfigValue(format!("unknown subcommand {s:?}")))
    }
}

/// `ε` either as a number or tied to the grid spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsSetting {
    GridSpacing,
    Value(f64),
}

impl EpsSetting {
    pub fn resolve(self, h: f64) -> f64 {
        match self {
            EpsSetting::GridSpacing => h,
            EpsSetting::Value(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Arctan,
    Gaussian,
    Constant,
}

/// Fully resolved configuration for one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub gamma: f64,
    pub delta: f64,
    pub eps: EpsSetting,
    pub mass: f64,
    pub r_b: f64,
    pub potential: String,
    pub tol_root: f64,
    pub tol_newton: f64,
    pub n_nodes: usize,
    pub r_max: f64,
    pub dt: f64,
    pub t_end: f64,
    pub growth_rate: f64,
    pub homeostatic_pressure: f64,
    pub output_every: usize,
    pub adaptive_guard: bool,
    pub stall_tol: f64,
    pub stall_checks: usize,
    pub snapshot_times: Vec<f64>,
    pub face_average: FaceAverage,
    pub initial: InitialKind,
    pub ic_amplitude: f64,
    pub ic_center: f64,
    pub ic_width: f64,
    pub ic_background: f64,
    /// Fixed support radius; `None` means "solve for the radius from `mass`".
    pub radius: Option<f64>,
    pub discretization: Discretization,
    pub gammas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub criteria: Vec<usize>,
    pub tolerance_scale: f64,
}

impl RunConfig {
    /// Defaults for `command`. `evolve` defaults to the growth replica on
    /// `[0, 10]`; the stationary and limit commands to `m = 0.4`, `δ = 10⁻²`.
    pub fn defaults(command: Command) -> Self {
        let evolve = command == Command::Evolve;
        Self {
            command,
            gamma: if evolve { 10.0 } else { 4.0 },
            delta: 0.01,
            eps: if evolve { EpsSetting::GridSpacing } else { EpsSetting::Value(0.0) },
            mass: 0.4,
            r_b: if evolve { 10.0 } else { 5.0 },
            potential: if evolve { "flat".into() } else { "quadratic".into() },
            tol_root: Params::DEFAULT_TOL_ROOT,
            tol_newton: Params::DEFAULT_TOL_NEWTON,
            n_nodes: if evolve { 300 } else { 400 },
            r_max: 10.0,
            dt: 1e-7,
            t_end: 2.11,
            growth_rate: if evolve { 10.0 } else { 0.0 },
            homeostatic_pressure: 1.0,
            output_every: 10_000,
            adaptive_guard: true,
            stall_tol: 1e-7,
            stall_checks: 100,
            snapshot_times: if evolve { vec![0.0, 0.31, 1.14, 2.11] } else { Vec::new() },
            face_average: FaceAverage::Arithmetic,
            initial: InitialKind::Arctan,
            ic_amplitude: 0.9,
            ic_center: 2.0,
            ic_width: 0.2,
            ic_background: 0.0,
            radius: None,
            discretization: Discretization::Central,
            gammas: vec![10.0, 50.0, 250.0],
            deltas: vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7],
            criteria: (1..=11).collect(),
            tolerance_scale: 1.0,
        }
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "gamma" => self.gamma = num(v)?,
            "delta" => self.delta = num(v)?,
            "eps" => {
                self.eps = if v == "h" { EpsSetting::GridSpacing } else { EpsSetting::Value(num(v)?) }
            }
            "mass" => self.mass = num(v)?,
            "r_b" => self.r_b = num(v)?,
            "potential" => self.potential = v.to_string(),
            "tol_root" => self.tol_root = num(v)?,
            "tol_newton" => self.tol_newton = num(v)?,
            "n_nodes" => self.n_nodes = int(v)?,
            "r_max" => self.r_max = num(v)?,
            "dt" => self.dt = num(v)?,
            "t_end" => self.t_end = num(v)?,
            "growth_rate" => self.growth_rate = num(v)?,
            "homeostatic_pressure" => self.homeostatic_pressure = num(v)?,
            "output_every" => self.output_every = int(v)?,
            "adaptive_guard" => self.adaptive_guard = boolean(v)?,
            "stall_tol" => self.stall_tol = num(v)?,
            "stall_checks" => self.stall_checks = int(v)?,
            "snapshot_times" => self.snapshot_times = list(v, num)?,
            "face_average" => {
                self.face_average = match v {
                    "arithmetic" => FaceAverage::Arithmetic,
                    "harmonic" => FaceAverage::Harmonic,
                    _ => return Err(format!("expected arithmetic or harmonic, got {v:?}")),
                }
            }
            "initial" => {
                self.initial = match v {
                    "arctan" => InitialKind::Arctan,
                    "gaussian" => InitialKind::Gaussian,
                    "constant" => InitialKind::Constant,
                    _ => return Err(format!("expected arctan, gaussian or constant, got {v:?}")),
                }
            }
            "ic_amplitude" => self.ic_amplitude = num(v)?,
            "ic_center" => self.ic_center = num(v)?,
            "ic_width" => self.ic_width = num(v)?,
            "ic_background" => self.ic_background = num(v)?,
            "radius" => self.radius = if v == "auto" { None } else { Some(num(v)?) },
            "discretization" => {
                self.discretization = match v {
                    "central" => Discretization::Central,
                    "extrapolated" => Discretization::Extrapolated,
                    _ => return Err(format!("expected central or extrapolated, got {v:?}")),
                }
            }
            "gammas" => self.gammas = list(v, num)?,
            "deltas" => self.deltas = list(v, num)?,
            "criteria" => self.criteria = list(v, int)?,
            "tolerance_scale" => self.tolerance_scale = num(v)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Check every field against the solver preconditions.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigValue(m));
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return bad(format!("gamma must exceed 1 (got {})", self.gamma));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return bad(format!("delta must be positive (got {})", self.delta));
        }
        if let EpsSetting::Value(e) = self.eps {
            if !(e >= 0.0) || !e.is_finite() {
                return bad(format!("eps must be nonnegative (got {e})"));
            }
        }
        for (name, v) in [
            ("mass", self.mass),
            ("r_b", self.r_b),
            ("tol_root", self.tol_root),
            ("tol_newton", self.tol_newton),
            ("r_max", self.r_max),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("ic_width", self.ic_width),
            ("ic_center", self.ic_center),
            ("tolerance_scale", self.tolerance_scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive (got {v})"));
            }
        }
        for (name, v) in [
            ("growth_rate", self.growth_rate),
            ("ic_amplitude", self.ic_amplitude),
            ("ic_background", self.ic_background),
            ("stall_tol", self.stall_tol),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be nonnegative (got {v})"));
            }
        }
        if !self.homeostatic_pressure.is_finite() {
            return bad("homeostatic_pressure must be finite".into());
        }
        let min_nodes = match self.command {
            Command::Evolve => crate::grid::MIN_NODES,
            _ => crate::stationary::MIN_NODES,
        };
        if self.n_nodes < min_nodes {
            return bad(format!("n_nodes must be at least {min_nodes} (got {})", self.n_nodes));
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1".into());
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) || !r.is_finite() {
                return bad(format!("radius must be positive (got {r})"));
            }
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0)) {
            return bad("snapshot_times must be nonnegative".into());
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(*g > 1.0)) {
            return bad("gammas must be a nonempty list of values exceeding 1".into());
        }
        if self.gammas.windows(2).any(|w| w[1] <= w[0]) {
            return bad("gammas must be increasing".into());
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d > 0.0)) {
            return bad("deltas must be a nonempty list of positive values".into());
        }
        if self.criteria.iter().any(|c| !(1..=11).contains(c)) {
            return bad("criteria must be numbers between 1 and 11".into());
        }
        self.potential_spec()?;
        Ok(())
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        let reach = self.r_max.max(self.r_b).max(self.radius.unwrap_or(0.0));
        PotentialSpec::by_name(&self.potential, reach).map_err(|e| Error::ConfigValue(format!("potential: {e}")))
    }

    /// Physical parameters; `h` resolves `eps = h`.
    pub fn params(&self, h: f64) -> Result<Params> {
        let mut p = Params::new(self.gamma, self.delta, self.eps.resolve(h), self.mass, self.r_b)
            .map_err(|e| Error::ConfigValue(e.to_string()))?;
        p.potential = self.potential_spec()?;
        p.tol_root = self.tol_root;
        p.tol_newton = self.tol_newton;
        Ok(p)
    }

    pub fn evolution(&self) -> Result<EvolutionConfig> {
        let mut cfg = EvolutionConfig::new(self.dt, self.t_end).map_err(|e| Error::ConfigValue(e.to_string()))?;
        if self.growth_rate > 0.0 {
            cfg.source = Some(GrowthSpec::new(self.growth_rate, self.homeostatic_pressure)?);
        }
        cfg.output_every = self.output_every;
        cfg.adaptive_guard = self.adaptive_guard;
        cfg.stall_tol = self.stall_tol;
        cfg.stall_checks = self.stall_checks;
        cfg.snapshot_times = self.snapshot_times.clone();
        cfg.face_average = self.face_average;
        Ok(cfg)
    }

    pub fn initial_shape(&self) -> InitialShape {
        match self.initial {
            InitialKind::Arctan => InitialShape::TruncatedArctan {
                amplitude: self.ic_amplitude,
                center: self.ic_center,
                width: self.ic_width,
            },
            InitialKind::Gaussian => InitialShape::GaussianBump {
                amplitude: self.ic_amplitude,
                width: self.ic_width,
                background: self.ic_background,
            },
            InitialKind::Constant => InitialShape::Constant(self.ic_amplitude),
        }
    }

    pub fn stationary_options(&self) -> Result<StationaryOptions> {
        let mut o = StationaryOptions::new(self.n_nodes).map_err(|e| Error::ConfigValue(e.to_string()))?;
        o.discretization = self.discretization;
        Ok(o)
    }

    /// Every resolved key with its value, in a stable order.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| format!("{x:?}");
        let fl = |xs: &[f64]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        vec![
            ("gamma", f(self.gamma)),
            ("delta", f(self.delta)),
            (
                "eps",
                match self.eps {
                    EpsSetting::GridSpacing => "h".into(),
                    EpsSetting::Value(v) => f(v),
                },
            ),
            ("mass", f(self.mass)),
            ("r_b", f(self.r_b)),
            ("potential", self.potential.clone()),
            ("tol_root", f(self.tol_root)),
            ("tol_newton", f(self.tol_newton)),
            ("n_nodes", self.n_nodes.to_string()),
            ("r_max", f(self.r_max)),
            ("dt", f(self.dt)),
            ("t_end", f(self.t_end)),
            ("growth_rate", f(self.growth_rate)),
            ("homeostatic_pressure", f(self.homeostatic_pressure)),
            ("output_every", self.output_every.to_string()),
            ("adaptive_guard", self.adaptive_guard.to_string()),
            ("stall_tol", f(self.stall_tol)),
            ("stall_checks", self.stall_checks.to_string()),
            ("snapshot_times", fl(&self.snapshot_times)),
            (
                "face_average",
                match self.face_average {
                    FaceAverage::Arithmetic => "arithmetic".into(),
                    FaceAverage::Harmonic => "harmonic".into(),
                },
            ),
            (
                "initial",
                match self.initial {
                    InitialKind::Arctan => "arctan".into(),
                    InitialKind::Gaussian => "gaussian".into(),
                    InitialKind::Constant => "constant".into(),
                },
            ),
            ("ic_amplitude", f(self.ic_amplitude)),
            ("ic_center", f(self.ic_center)),
            ("ic_width", f(self.ic_width)),
            ("ic_background", f(self.ic_background)),
            ("radius", self.radius.map_or("auto".into(), f)),
            (
                "discretization",
                match self.discretization {
                    Discretization::Central => "central".into(),
                    Discretization::Extrapolated => "extrapolated".into(),
                },
            ),
            ("gammas", fl(&self.gammas)),
            ("deltas", fl(&self.deltas)),
            (
                "criteria",
                self.criteria.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("tolerance_scale", f(self.tolerance_scale)),
        ]
    }

    /// [`RunConfig::echo`] as configuration-file text.
    pub fn to_config_text(&self) -> String {
        self.echo().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config_text())
    }
}

fn num(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got {v:?}"))
}

fn int(v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, got {v:?}"))
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("expected true or false, got {v:?}")),
    }
}

fn list<T>(v: &str, item: fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| item(s.trim())).collect()
}

/// Apply `key=value` lines to `cfg`; errors carry the 1-based line number.
fn apply_text(cfg: &mut RunConfig, text: &str) -> Result<()> {
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigParse { line: idx + 1, message: format!("expected key=value, got {line:?}") });
        };
        cfg.set(key.trim(), value)
            .map_err(|message| Error::ConfigParse { line: idx + 1, message })?;
    }
    Ok(())
}

/// Resolve a configuration from file text plus overrides, then validate.
pub fn parse_config_str(command: Command, text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(command);
    apply_text(&mut cfg, text)?;
    for (k, v) in overrides {
        cfg.set(k, v).map_err(|m| Error::ConfigValue(format!("--{k}: {m}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Read `path` (if any) and resolve it with `overrides`.
pub fn parse_config(command: Command, path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::ConfigValue(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config_str(command, &text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_are_carried() {
        let cfg = parse_config_str(Command::Stationary, "gamma=4\ndelta=0.01\n", &[]).unwrap();
        assert_eq!(cfg.gamma, 4.0);
        assert_eq!(cfg.delta, 0.01);
    }

    #[test]
    fn overrides_win() {
        let cfg = parse_config_str(
            Command::Limit,
            "# comment\n\ngamma = 4\n",
            &[("gamma".into(), "7".into())],
        )
        .unwrap();
        assert_eq!(cfg.gamma, 7.0);
    }

    #[test]
    fn gamma_validation_names_field() {
        let err = parse_config_str(Command::Stationary, "gamma=0.5\n", &[]).unwrap_err();
        assert!(err.to_string().contains("gamma must exceed 1"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse_config_str(Command::Evolve, "gamma=4\n\nfooo=1\n", &[]).unwrap_err();
        match err {
            Error::ConfigParse { line, ref message } => {
                assert_eq!(line, 3);
                assert!(message.contains("fooo"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn echo_round_trips() {
        for cmd in Command::ALL {
            let mut cfg = RunConfig::defaults(cmd);
            cfg.radius = Some(1.25);
            cfg.snapshot_times = vec![0.0, 0.1 + 0.2];
            cfg.eps = EpsSetting::Value(1.0 / 3.0);
            let back = parse_config_str(cmd, &cfg.to_config_text(), &[]).unwrap();
            assert_eq!(back, cfg);
            let default_back = parse_config_str(cmd, &RunConfig::defaults(cmd).to_config_text(), &[]).unwrap();
            assert_eq!(default_back, RunConfig::defaults(cmd));
        }
    }

    #[test]
    fn malformed_line() {
        assert!(matches!(
            parse_config_str(Command::Sweep, "gamma\n", &[]),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_str(Command::Sweep, "gamma=abc\n", &[]),
            Err(Error::ConfigParse { line: 1, .. })
        ));
    }
}
