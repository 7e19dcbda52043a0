//! JSON run configurations.
//!
//! A config is an object with a `command` key and the parameters of that
//! command. Unknown keys are rejected, missing ones take the defaults below,
//! and every error names the offending key.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use horoflow::flow::{BoundaryCondition, SpatialScheme};
use horoflow::stability::PerturbationKind;
use horoflow::{Dimension, FlowControls, HemisphereGrid, IntegratorControls, Perturbation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Catenoid,
    GrimReaper,
    Flow,
    Stability,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Catenoid => "catenoid",
            CommandKind::GrimReaper => "grim-reaper",
            CommandKind::Flow => "flow",
            CommandKind::Stability => "stability",
            CommandKind::Verify => "verify",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        [Self::Catenoid, Self::GrimReaper, Self::Flow, Self::Stability, Self::Verify]
            .into_iter()
            .find(|c| c.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunConfig {
    Catenoid(CatenoidConfig),
    GrimReaper(GrimReaperConfig),
    Flow(FlowConfig),
    Stability(StabilityConfig),
    Verify(VerifyConfig),
}

impl RunConfig {
    pub fn command(&self) -> CommandKind {
        match self {
            RunConfig::Catenoid(_) => CommandKind::Catenoid,
            RunConfig::GrimReaper(_) => CommandKind::GrimReaper,
            RunConfig::Flow(_) => CommandKind::Flow,
            RunConfig::Stability(_) => CommandKind::Stability,
            RunConfig::Verify(_) => CommandKind::Verify,
        }
    }

    pub fn output_dir(&self) -> Option<&PathBuf> {
        match self {
            RunConfig::Catenoid(c) => c.output_dir.as_ref(),
            RunConfig::GrimReaper(c) => c.output_dir.as_ref(),
            RunConfig::Flow(c) => c.output_dir.as_ref(),
            RunConfig::Stability(c) => c.output_dir.as_ref(),
            RunConfig::Verify(c) => c.output_dir.as_ref(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub s_max: f64,
    pub alpha_switch: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = IntegratorControls::default();
        IntegratorConfig {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: d.max_step,
            s_max: d.s_max,
            alpha_switch: d.alpha_switch,
        }
    }
}

impl IntegratorConfig {
    pub fn controls(&self) -> IntegratorControls {
        IntegratorControls {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            s_max: self.s_max,
            alpha_switch: self.alpha_switch,
        }
    }

    fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("s_max", self.s_max),
            ("alpha_switch", self.alpha_switch),
        ] {
            positive(&format!("integrator.{key}"), v)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatenoidConfig {
    pub n: usize,
    /// Neck radius of a single profile, written to `profile.csv`.
    #[serde(default)]
    pub r: Option<f64>,
    /// Increasing neck radii for `family.csv`.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrimReaperConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub h0: f64,
    pub lambda: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { m: 400, theta_max: default_theta_max() }
    }
}

impl GridConfig {
    pub fn grid(&self, n: Dimension) -> Result<HemisphereGrid> {
        HemisphereGrid::new(n, self.theta_max, self.m).map_err(|e| CliError::config("grid", e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub width: f64,
}

impl PerturbationConfig {
    pub fn perturbation(&self) -> Perturbation {
        Perturbation { kind: self.kind, amplitude: self.amplitude, center: self.center, width: self.width }
    }
}

fn default_perturbation() -> PerturbationConfig {
    PerturbationConfig { kind: PerturbationKind::GaussianBump, amplitude: 0.1, center: 0.0, width: 0.05 * FRAC_PI_2 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub n: usize,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "one")]
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_record_every")]
    pub record_every: f64,
    #[serde(default)]
    pub boundary: BoundaryCondition,
    #[serde(default)]
    pub scheme: SpatialScheme,
    /// Deviation from the soliton at t = 0; none starts on the soliton.
    #[serde(default)]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub n: usize,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "one")]
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_record_every")]
    pub record_every: f64,
    #[serde(default)]
    pub scheme: SpatialScheme,
    #[serde(default = "default_perturbation")]
    pub perturbation: PerturbationConfig,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_barrier_epsilon")]
    pub barrier_epsilon: f64,
    /// Also run the mirrored perturbation and write `mirror_report.json`.
    #[serde(default = "yes")]
    pub mirror: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_dimensions")]
    pub n: Vec<usize>,
    #[serde(default = "default_suite")]
    pub radii: Vec<f64>,
    #[serde(default = "default_suite")]
    pub lambdas: Vec<f64>,
    #[serde(default = "one")]
    pub h0: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Number of random tuples for the curvature identity checks.
    #[serde(default = "default_tuples")]
    pub random_tuples: usize,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_theta_max() -> f64 {
    0.99 * FRAC_PI_2
}

fn default_cfl() -> f64 {
    FlowControls::default().cfl
}

fn default_record_every() -> f64 {
    FlowControls::default().record_every
}

fn default_eps() -> Vec<f64> {
    vec![0.05, 0.01]
}

fn default_barrier_epsilon() -> f64 {
    0.3
}

fn default_dimensions() -> Vec<usize> {
    vec![2, 3]
}

fn default_suite() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_tuples() -> usize {
    1000
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be a positive finite number, got {v}")))
    }
}

pub fn dimension(key: &str, n: usize) -> Result<Dimension> {
    Dimension::new(n).map_err(|_| CliError::config(key, format!("must be >= 2, got {n}")))
}

fn flow_controls(
    t_end: f64,
    cfl: f64,
    record_every: f64,
    boundary: BoundaryCondition,
    scheme: SpatialScheme,
) -> Result<FlowControls> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(CliError::config("t_end", format!("must be a non-negative finite number, got {t_end}")));
    }
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(CliError::config("cfl", format!("must lie in (0, 1], got {cfl}")));
    }
    positive("record_every", record_every)?;
    Ok(FlowControls { cfl, t_end, record_every, boundary, scheme })
}

fn check_perturbation(p: &PerturbationConfig, grid: HemisphereGrid) -> Result<()> {
    horoflow::stability::make_initial(&p.perturbation(), grid)
        .map(|_| ())
        .map_err(|e| CliError::config("perturbation", e.to_string()))
}

impl CatenoidConfig {
    fn validate(&self) -> Result<()> {
        dimension("n", self.n)?;
        self.integrator.validate()?;
        if self.r.is_none() && self.radii.is_none() {
            return Err(CliError::config("r", "one of `r` or `radii` is required"));
        }
        if let Some(r) = self.r {
            positive("r", r)?;
        }
        if let Some(radii) = &self.radii {
            if radii.is_empty() {
                return Err(CliError::config("radii", "must not be empty"));
            }
            for (i, &r) in radii.iter().enumerate() {
                positive(&format!("radii[{i}]"), r)?;
            }
            if radii.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::config("radii", "must be strictly increasing"));
            }
        }
        Ok(())
    }
}

impl GrimReaperConfig {
    fn validate(&self) -> Result<()> {
        dimension("n", self.n)?;
        self.integrator.validate()?;
        positive("h0", self.h0)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(CliError::config("lambda", format!("must be a non-negative finite number, got {}", self.lambda)));
        }
        Ok(())
    }
}

impl FlowConfig {
    pub fn controls(&self) -> Result<FlowControls> {
        flow_controls(self.t_end, self.cfl, self.record_every, self.boundary, self.scheme)
    }

    fn validate(&self) -> Result<()> {
        let grid = self.grid.grid(dimension("n", self.n)?)?;
        self.controls()?;
        if let Some(p) = &self.perturbation {
            check_perturbation(p, grid)?;
        }
        Ok(())
    }
}

impl StabilityConfig {
    pub fn controls(&self) -> Result<FlowControls> {
        flow_controls(self.t_end, self.cfl, self.record_every, BoundaryCondition::PinToSoliton, self.scheme)
    }

    fn validate(&self) -> Result<()> {
        let grid = self.grid.grid(dimension("n", self.n)?)?;
        self.controls()?;
        check_perturbation(&self.perturbation, grid)?;
        for (i, &e) in self.eps.iter().enumerate() {
            positive(&format!("eps[{i}]"), e)?;
        }
        positive("barrier_epsilon", self.barrier_epsilon)
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.n.is_empty() {
            return Err(CliError::config("n", "must not be empty"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            dimension(&format!("n[{i}]"), n)?;
        }
        for (i, &r) in self.radii.iter().enumerate() {
            positive(&format!("radii[{i}]"), r)?;
        }
        for (i, &l) in self.lambdas.iter().enumerate() {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(CliError::config(format!("lambdas[{i}]"), format!("must be non-negative, got {l}")));
            }
        }
        positive("h0", self.h0)?;
        positive("tolerance", self.tolerance)?;
        self.integrator.validate()
    }
}

fn typed<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { "config".to_string() } else { path };
        CliError::config(key, e.into_inner().to_string())
    })
}

/// Parses and validates a config document.
///
/// `expected` is the command given on the command line; the document's
/// `command` key may be omitted but must agree with it when present.
pub fn parse_config(text: &str, expected: Option<CommandKind>) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::config("config", "must be a JSON object"));
    };
    let command = match map.remove("command") {
        Some(Value::String(name)) => {
            let kind = CommandKind::parse(&name)
                .ok_or_else(|| CliError::config("command", format!("unknown command `{name}`")))?;
            if let Some(cli) = expected.filter(|&c| c != kind) {
                return Err(CliError::config(
                    "command",
                    format!("config is for `{}` but `{}` was requested", kind.name(), cli.name()),
                ));
            }
            kind
        }
        Some(other) => return Err(CliError::config("command", format!("must be a string, got {other}"))),
        None => expected.ok_or_else(|| CliError::config("command", "missing"))?,
    };
    let value = Value::Object(map);
    let config = match command {
        CommandKind::Catenoid => RunConfig::Catenoid(typed(value)?),
        CommandKind::GrimReaper => RunConfig::GrimReaper(typed(value)?),
        CommandKind::Flow => RunConfig::Flow(typed(value)?),
        CommandKind::Stability => RunConfig::Stability(typed(value)?),
        CommandKind::Verify => RunConfig::Verify(typed(value)?),
    };
    match &config {
        RunConfig::Catenoid(c) => c.validate()?,
        RunConfig::GrimReaper(c) => c.validate()?,
        RunConfig::Flow(c) => c.validate()?,
        RunConfig::Stability(c) => c.validate()?,
        RunConfig::Verify(c) => c.validate()?,
    }
    Ok(config)
}
