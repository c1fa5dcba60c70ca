//! Command-line arguments, config files and figure presets, resolved into
//! one [`ExperimentSpec`].
//!
//! Precedence is command line, then config file, then preset, then defaults.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use qrecon_core::{InterpolationMode, Policy};

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "QRECON_OUT_DIR";
pub const DEFAULT_HORIZON: f64 = 1e6;
pub const DEFAULT_CEILING: f64 = 30.0;
pub const DEFAULT_BETA_MAX: u32 = 64;

#[derive(Debug, Parser)]
#[command(name = "qrecon", version, about = "Reconstruction distortion of a Poisson process observed through a queue")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form distortion on the parameter grid
    Analytic(Target),
    /// Simulate each grid point and print its reports
    Simulate(Target),
    /// Simulate a grid and write CSV and JSON artifacts
    Sweep(Target),
    /// Optimal sampling rate and threshold
    Optimize(Target),
    /// Interpolation lower bound against the simulated oracle strategy
    Lowerbound(Target),
    /// Run the simulation-versus-theory reconciliation suite
    Validate(Target),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Args)]
pub struct Target {
    /// Named experiment grid; same as --preset
    pub preset: Option<Preset>,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analytic(_) => "analytic",
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
            Command::Optimize(_) => "optimize",
            Command::Lowerbound(_) => "lowerbound",
            Command::Validate(_) => "validate",
        }
    }

    fn preset(self) -> Option<Preset> {
        match self {
            Command::Analytic(t)
            | Command::Simulate(t)
            | Command::Sweep(t)
            | Command::Optimize(t)
            | Command::Lowerbound(t)
            | Command::Validate(t) => t.preset,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Source arrival rates
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub lambda: Vec<f64>,
    /// Service rates
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub mu: Vec<f64>,
    /// Uniform sampling rates
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub rate: Vec<f64>,
    /// Sampling thresholds
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub beta: Vec<u32>,
    /// Largest threshold searched by `optimize`
    #[arg(long, global = true)]
    pub beta_max: Option<u32>,
    /// Sampling policies
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub policy: Vec<PolicyKind>,
    /// Simulation horizon T
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Replications per grid point
    #[arg(long, global = true)]
    pub reps: Option<u32>,
    /// Base seed; replication k uses seed + k
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Named experiment grid
    #[arg(long = "preset", id = "preset_flag", value_name = "PRESET", global = true)]
    pub preset: Option<Preset>,
    /// Output directory
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Monitor interpolation: off, single, uniform or oracle
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub interp: Vec<InterpolationMode>,
    /// Plot value substituted for unstable points
    #[arg(long, global = true)]
    pub ceiling: Option<f64>,
    /// key = value config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Uniform,
    Threshold,
    #[value(name = "zero_wait", alias = "zero-wait", alias = "zerowait")]
    ZeroWait,
}

impl FromStr for PolicyKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        <Self as ValueEnum>::from_str(s.trim(), true).map_err(|_| CliError::usage(format!("unknown policy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig7a,
    Fig7b,
    Fig8,
    Fig9a,
    Fig9b,
    Fig9c,
    Fig10a,
    Fig10b,
    None,
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        <Self as ValueEnum>::from_str(s.trim(), true).map_err(|_| CliError::usage(format!("unknown preset '{s}'")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub command: &'static str,
    pub preset: Option<Preset>,
    pub policies: Vec<PolicyKind>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub rates: Vec<f64>,
    pub betas: Vec<u32>,
    pub beta_max: u32,
    pub interpolation: Vec<InterpolationMode>,
    pub horizon: f64,
    pub reps: u32,
    pub seed: u64,
    #[serde(skip)]
    pub workers: Option<usize>,
    pub ceiling: f64,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    /// The spec a command runs with when nothing is overridden.
    pub fn defaults(command: &'static str) -> Self {
        Self {
            command,
            preset: None,
            policies: vec![PolicyKind::Uniform],
            lambdas: vec![0.9],
            mus: vec![1.0],
            rates: vec![0.5],
            betas: vec![1],
            beta_max: DEFAULT_BETA_MAX,
            interpolation: vec![InterpolationMode::Off],
            horizon: DEFAULT_HORIZON,
            reps: 1,
            seed: 1,
            workers: None,
            ceiling: DEFAULT_CEILING,
            out_dir: PathBuf::from("results"),
        }
    }

    /// Resolves command line, config file and preset.
    pub fn resolve(cli: &Cli) -> CliResult<Self> {
        let mut spec = Self::defaults(cli.command.name());
        let file = match &cli.flags.config {
            Some(path) => Some(ConfigFile::read(path)?),
            None => None,
        };
        let preset = cli
            .flags
            .preset
            .or(cli.command.preset())
            .or(file.as_ref().and_then(|f| f.preset))
            .filter(|p| *p != Preset::None);
        if let Some(preset) = preset {
            spec.apply_preset(preset);
        }
        if let Some(file) = file {
            spec.apply_overrides(&file.flags);
        }
        spec.apply_overrides(&PartialFlags::from(&cli.flags));
        spec.validate()?;
        Ok(spec)
    }

    fn apply_preset(&mut self, preset: Preset) {
        let steps = |lo: f64, step: f64, n: usize| -> Vec<f64> {
            (0..n).map(|k| ((lo + step * k as f64) * 1e6).round() / 1e6).collect()
        };
        let rate_grid = steps(0.05, 0.05, 19);
        self.preset = Some(preset);
        self.mus = vec![1.0];
        match preset {
            Preset::Fig7a => {
                self.policies = vec![PolicyKind::Uniform];
                self.lambdas = vec![0.9];
                self.rates = rate_grid;
            }
            Preset::Fig7b => {
                self.policies = vec![PolicyKind::Uniform];
                self.lambdas = vec![0.5, 0.9, 1.5];
                self.rates = rate_grid;
            }
            Preset::Fig8 => {
                self.policies = vec![PolicyKind::Uniform];
                self.lambdas = vec![0.9];
                self.rates = rate_grid;
                self.interpolation =
                    vec![InterpolationMode::Off, InterpolationMode::SinglePoint, InterpolationMode::UniformJ];
            }
            Preset::Fig9a => {
                self.policies = vec![PolicyKind::Threshold];
                self.lambdas = vec![0.3, 0.5, 0.7, 0.9, 1.5, 2.0, 3.0, 4.0, 5.0];
                self.betas = (1..=12).collect();
            }
            Preset::Fig9b => {
                self.policies = vec![PolicyKind::Threshold];
                self.lambdas = vec![0.3, 0.5, 0.7, 0.9];
                self.betas = (1..=10).collect();
            }
            Preset::Fig9c => {
                self.policies = vec![PolicyKind::Threshold];
                self.lambdas = vec![1.5, 2.0, 3.0, 4.0, 5.0];
                self.betas = (1..=14).collect();
            }
            Preset::Fig10a => {
                self.policies = vec![PolicyKind::ZeroWait];
                self.lambdas = steps(0.2, 0.2, 10);
            }
            Preset::Fig10b => {
                self.policies = vec![PolicyKind::ZeroWait];
                self.lambdas = vec![0.9];
                self.mus = steps(0.5, 0.25, 11);
            }
            Preset::None => {}
        }
    }

    fn apply_overrides(&mut self, flags: &PartialFlags) {
        macro_rules! set {
            ($field:ident, $src:expr) => {
                if let Some(v) = $src.clone() {
                    self.$field = v;
                }
            };
        }
        set!(lambdas, flags.lambda);
        set!(mus, flags.mu);
        set!(rates, flags.rate);
        set!(betas, flags.beta);
        set!(policies, flags.policy);
        set!(interpolation, flags.interp);
        set!(beta_max, flags.beta_max);
        set!(horizon, flags.horizon);
        set!(reps, flags.reps);
        set!(seed, flags.seed);
        set!(ceiling, flags.ceiling);
        set!(out_dir, flags.out);
        if flags.workers.is_some() {
            self.workers = flags.workers;
        }
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |what: &str| Err(CliError::usage(what.to_string()));
        if self.policies.is_empty() {
            return bad("policy list is empty");
        }
        if self.lambdas.is_empty() || self.mus.is_empty() {
            return bad("lambda and mu grids must be non-empty");
        }
        if self.policies.contains(&PolicyKind::Uniform) && self.rates.is_empty() {
            return bad("rate grid is empty");
        }
        if self.policies.contains(&PolicyKind::Threshold) && self.betas.is_empty() {
            return bad("beta grid is empty");
        }
        if self.interpolation.is_empty() {
            return bad("interpolation list is empty");
        }
        for (name, values) in [("lambda", &self.lambdas), ("mu", &self.mus), ("rate", &self.rates)] {
            if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(CliError::usage(format!("{name} values must be finite and > 0, got {v}")));
            }
        }
        if self.betas.contains(&0) {
            return bad("beta values must be >= 1");
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(CliError::usage(format!("horizon must be finite and > 0, got {}", self.horizon)));
        }
        if self.reps == 0 {
            return bad("reps must be >= 1");
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1");
        }
        if !(self.ceiling.is_finite() && self.ceiling > 0.0) {
            return bad("ceiling must be finite and > 0");
        }
        Ok(())
    }

    /// Grid points in deterministic order: policy, λ, μ, parameter,
    /// interpolation mode.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut points = Vec::new();
        for &kind in &self.policies {
            let policies: Vec<Policy> = match kind {
                PolicyKind::Uniform => self.rates.iter().map(|&rate| Policy::Uniform { rate }).collect(),
                PolicyKind::Threshold => self.betas.iter().map(|&beta| Policy::Threshold { beta }).collect(),
                PolicyKind::ZeroWait => vec![Policy::ZeroWait],
            };
            for &lambda in &self.lambdas {
                for &mu in &self.mus {
                    for &policy in &policies {
                        for &interpolation in &self.interpolation {
                            points.push(GridPoint { policy, lambda, mu, interpolation });
                        }
                    }
                }
            }
        }
        points
    }

    /// SHA-256 of the canonical JSON form of the spec.
    pub fn hash(&self) -> String {
        digest_hex(&serde_json::to_vec(self).expect("spec serialises"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub policy: Policy,
    pub lambda: f64,
    pub mu: f64,
    pub interpolation: InterpolationMode,
}

impl GridPoint {
    /// Policy label used in the CSV `policy` column.
    pub fn label(&self) -> String {
        match self.interpolation {
            InterpolationMode::Off => self.policy.name().to_string(),
            mode => format!("{}+{}", self.policy.name(), mode.as_str()),
        }
    }

    /// Short hash identifying the point together with horizon and seed.
    pub fn hash(&self, horizon: f64, seed: u64) -> String {
        let key = serde_json::json!({ "point": self, "horizon": horizon, "seed": seed });
        digest_hex(key.to_string().as_bytes())[..16].to_string()
    }
}

fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Optional values from one source (command line or file).
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct PartialFlags {
    lambda: Option<Vec<f64>>,
    mu: Option<Vec<f64>>,
    rate: Option<Vec<f64>>,
    beta: Option<Vec<u32>>,
    beta_max: Option<u32>,
    policy: Option<Vec<PolicyKind>>,
    interp: Option<Vec<InterpolationMode>>,
    horizon: Option<f64>,
    reps: Option<u32>,
    seed: Option<u64>,
    ceiling: Option<f64>,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

impl From<&Flags> for PartialFlags {
    fn from(f: &Flags) -> Self {
        let list = |v: &Vec<_>| (!v.is_empty()).then(|| v.clone());
        Self {
            lambda: list(&f.lambda),
            mu: list(&f.mu),
            rate: list(&f.rate),
            beta: (!f.beta.is_empty()).then(|| f.beta.clone()),
            beta_max: f.beta_max,
            policy: (!f.policy.is_empty()).then(|| f.policy.clone()),
            interp: (!f.interp.is_empty()).then(|| f.interp.clone()),
            horizon: f.horizon,
            reps: f.reps,
            seed: f.seed,
            ceiling: f.ceiling,
            out: f.out.clone(),
            workers: f.workers,
        }
    }
}

/// Parsed `key = value` config file.
///
/// List keys may repeat and may hold comma-separated values; every
/// occurrence appends. A list key with an empty value sets an empty list.
/// `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct ConfigFile {
    flags: PartialFlags,
    preset: Option<Preset>,
}

impl ConfigFile {
    fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub(crate) fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = ConfigFile::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", number + 1))?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            let at = |e: String| format!("line {}: {e}", number + 1);
            let f = &mut cfg.flags;
            match key.as_str() {
                "lambda" => append(&mut f.lambda, value).map_err(at)?,
                "mu" => append(&mut f.mu, value).map_err(at)?,
                "rate" => append(&mut f.rate, value).map_err(at)?,
                "beta" => append(&mut f.beta, value).map_err(at)?,
                "policy" => append(&mut f.policy, value).map_err(at)?,
                "interp" => append(&mut f.interp, value).map_err(at)?,
                "beta_max" => f.beta_max = Some(scalar(value).map_err(at)?),
                "horizon" => f.horizon = Some(scalar(value).map_err(at)?),
                "reps" => f.reps = Some(scalar(value).map_err(at)?),
                "seed" => f.seed = Some(scalar(value).map_err(at)?),
                "ceiling" => f.ceiling = Some(scalar(value).map_err(at)?),
                "workers" => f.workers = Some(scalar(value).map_err(at)?),
                "out" => f.out = Some(PathBuf::from(value)),
                "preset" => cfg.preset = Some(scalar(value).map_err(at)?),
                other => return Err(at(format!("unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }
}

fn scalar<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| format!("cannot parse '{value}': {e}"))
}

fn append<T: FromStr>(list: &mut Option<Vec<T>>, value: &str) -> Result<(), String>
where
    T::Err: fmt::Display,
{
    let list = list.get_or_insert_with(Vec::new);
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        list.push(scalar(item)?);
    }
    Ok(())
}
