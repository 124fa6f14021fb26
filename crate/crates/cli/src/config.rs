//! Configuration resolution: config-file merge, defaults and validation.
//!
//! Precedence is strictly `command-line flag > config file > built-in
//! default`; the resolved configuration is echoed verbatim into every JSON
//! report so a run can be reproduced from its output alone.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use specgap::distfun::GRID_PER_UNIT;
use specgap::models::{CoefficientModel, ModelSpec};
use specgap::operator::TruncatedPair;

use crate::{CliError, CommonArgs, PolluteArgs};

/// Output format choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Which subcommand is being resolved; decides defaults and shape checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Scan,
    Enclose,
    Bounds,
    Compare,
    Pollute,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::Scan => "scan",
            CommandKind::Enclose => "enclose",
            CommandKind::Bounds => "bounds",
            CommandKind::Compare => "compare",
            CommandKind::Pollute => "pollute",
        }
    }

    fn default_format(self) -> Format {
        match self {
            CommandKind::Scan | CommandKind::Pollute => Format::Csv,
            CommandKind::Enclose | CommandKind::Bounds | CommandKind::Compare => Format::Json,
        }
    }

    fn takes_ladder(self) -> bool {
        matches!(self, CommandKind::Enclose | CommandKind::Pollute)
    }
}

/// Config-file schema: the same knobs as the flags, every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<String>,
    n: Option<Truncations>,
    out: Option<PathBuf>,
    format: Option<Format>,
    tol: Option<f64>,
    grid: Option<usize>,
    interval: Option<[f64; 2]>,
    nu: Option<f64>,
    mu: Option<f64>,
    epsilon_s: Option<f64>,
    spurious_threshold: Option<f64>,
    digits: Option<usize>,
    demo_low: Option<f64>,
    demo_high: Option<f64>,
    demo_mu: Option<f64>,
    demo_levels: Option<usize>,
}

/// A single size or a ladder, as found in config files.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Truncations {
    One(usize),
    Ladder(Vec<usize>),
}

impl Truncations {
    fn to_vec(&self) -> Vec<usize> {
        match self {
            Truncations::One(n) => vec![*n],
            Truncations::Ladder(ns) => ns.clone(),
        }
    }
}

/// Parameters of the synthetic-collapse demo.
#[derive(Debug, Clone, Serialize)]
pub struct DemoConfig {
    pub low: f64,
    pub high: f64,
    pub mu: f64,
    pub levels: usize,
}

/// The model-dependent part of a resolved run.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub spec: ModelSpec,
    pub coeff: CoefficientModel,
    /// Validated truncation sizes: exactly one for scan/bounds/compare,
    /// a strictly increasing ladder for enclose/pollute.
    pub ns: Vec<usize>,
    pub interval: (f64, f64),
    pub grid: usize,
    pub nu: f64,
    pub mu: f64,
}

impl ResolvedModel {
    pub fn single_n(&self) -> usize {
        self.ns[0]
    }

    pub fn ladder_pairs(&self) -> Result<Vec<TruncatedPair>, CliError> {
        self.ns.iter().map(|&n| self.coeff.build(n).map_err(CliError::from)).collect()
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: &'static str,
    pub model: Option<ResolvedModel>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: f64,
    pub epsilon_s: f64,
    pub spurious_threshold: Option<f64>,
    pub digits: Option<usize>,
    pub demo: Option<DemoConfig>,
}

impl Resolved {
    pub fn require_model(&self) -> Result<&ResolvedModel, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs --model".into()))
    }

    /// The effective configuration, echoed into JSON reports.
    pub fn config_value(&self) -> Value {
        json!({
            "model": self.model.as_ref().map(|m| {
                serde_json::to_value(&m.spec).expect("model spec serializes")
            }),
            "n": self.model.as_ref().map(|m| m.ns.clone()),
            "interval": self.model.as_ref().map(|m| [m.interval.0, m.interval.1]),
            "grid": self.model.as_ref().map(|m| m.grid),
            "nu": self.model.as_ref().map(|m| m.nu),
            "mu": self.model.as_ref().map(|m| m.mu),
            "tol": self.tol,
            "epsilon_s": self.epsilon_s,
            "spurious_threshold": self.spurious_threshold,
            "digits": self.digits,
            "format": self.format,
            "demo": self.demo,
        })
    }
}

/// Merges flags over the config file, applies defaults and validates.
pub fn resolve(
    kind: CommandKind,
    args: &CommonArgs,
    pollute: Option<&PolluteArgs>,
) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|err| {
                CliError::Config(format!("cannot read config file {}: {err}", path.display()))
            })?;
            serde_json::from_str::<FileConfig>(&text).map_err(|err| {
                CliError::Config(format!("malformed config file {}: {err}", path.display()))
            })?
        }
        None => FileConfig::default(),
    };

    let format = args.format.or(file.format).unwrap_or_else(|| kind.default_format());
    if format == Format::Csv
        && matches!(kind, CommandKind::Enclose | CommandKind::Bounds | CommandKind::Compare)
    {
        return Err(CliError::Config(format!(
            "{} emits a JSON report; --format csv is not supported",
            kind.name()
        )));
    }

    let tol = args.tol.or(file.tol).unwrap_or(1e-12);
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let epsilon_s = args.epsilon_s.or(file.epsilon_s).unwrap_or(0.0);
    if !(epsilon_s >= 0.0) || !epsilon_s.is_finite() {
        return Err(CliError::Config(format!("epsilon-s must be nonnegative, got {epsilon_s}")));
    }
    let spurious_threshold = args.spurious_threshold.or(file.spurious_threshold);
    if let Some(threshold) = spurious_threshold {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(CliError::Config(format!(
                "spurious threshold must be positive, got {threshold}"
            )));
        }
    }

    let ns_override = args.n.clone().or_else(|| file.n.as_ref().map(Truncations::to_vec));
    let model = match args.model.clone().or_else(|| file.model.clone()) {
        Some(text) => Some(resolve_model(kind, &text, ns_override, args, &file)?),
        None => None,
    };

    let demo = match pollute {
        Some(flags) => resolve_demo(flags, &file)?,
        None => None,
    };

    if kind == CommandKind::Pollute && model.is_none() && demo.is_none() {
        return Err(CliError::Config(
            "pollute needs --model, the demo flags, or both".into(),
        ));
    }
    if model.is_none() && kind != CommandKind::Pollute {
        return Err(CliError::Config("this command needs --model".into()));
    }

    Ok(Resolved {
        command: kind.name(),
        model,
        out: args.out.clone().or(file.out),
        format,
        tol,
        epsilon_s,
        spurious_threshold,
        digits: args.digits.or(file.digits),
        demo,
    })
}

fn resolve_model(
    kind: CommandKind,
    text: &str,
    ns_override: Option<Vec<usize>>,
    args: &CommonArgs,
    file: &FileConfig,
) -> Result<ResolvedModel, CliError> {
    let trimmed = text.trim();
    let json = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(trimmed)
            .map_err(|err| CliError::Config(format!("cannot read model file {trimmed}: {err}")))?
    };
    let spec = ModelSpec::from_json(&json)?;
    let coeff = spec.coefficient()?;

    let ns = ns_override
        .or_else(|| spec.default_n().map(|n| vec![n]))
        .ok_or_else(|| {
            CliError::Config("no truncation size: pass --n or put \"n\" in the model spec".into())
        })?;
    if ns.is_empty() {
        return Err(CliError::Config("the truncation list must not be empty".into()));
    }
    if kind.takes_ladder() {
        for window in ns.windows(2) {
            if window[1] <= window[0] {
                return Err(CliError::Config(format!(
                    "the truncation ladder must be strictly increasing, got {} then {}",
                    window[0], window[1]
                )));
            }
        }
    } else if ns.len() != 1 {
        return Err(CliError::Config(format!(
            "{} takes a single --n, got {} values",
            kind.name(),
            ns.len()
        )));
    }

    let gap = coeff.spectral_gap();
    let interval = match args.interval.as_deref() {
        Some([a, b]) => (*a, *b),
        Some(other) => {
            return Err(CliError::Config(format!(
                "--interval takes exactly two numbers, got {}",
                other.len()
            )))
        }
        None => file.interval.map(|[a, b]| (a, b)).unwrap_or(gap),
    };
    if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
        return Err(CliError::Config(format!(
            "interval must satisfy a < b, got ({}, {})",
            interval.0, interval.1
        )));
    }

    let grid = args
        .grid
        .or(file.grid)
        .unwrap_or_else(|| ((GRID_PER_UNIT * (interval.1 - interval.0)).ceil() as usize).max(2));
    if grid < 2 {
        return Err(CliError::Config(format!("grid needs at least 2 points, got {grid}")));
    }

    let nu = args.nu.or(file.nu).unwrap_or(interval.0);
    let mu = args.mu.or(file.mu).unwrap_or(interval.1);
    if !(nu < mu) || !nu.is_finite() || !mu.is_finite() {
        return Err(CliError::Config(format!("shifts must satisfy nu < mu, got ({nu}, {mu})")));
    }

    Ok(ResolvedModel { spec, coeff, ns, interval, grid, nu, mu })
}

fn resolve_demo(flags: &PolluteArgs, file: &FileConfig) -> Result<Option<DemoConfig>, CliError> {
    let low = flags.demo_low.or(file.demo_low);
    let high = flags.demo_high.or(file.demo_high);
    let mu = flags.demo_mu.or(file.demo_mu);
    let levels = flags.demo_levels.or(file.demo_levels);
    match (low, high, mu) {
        (None, None, None) if levels.is_none() => Ok(None),
        (Some(low), Some(high), Some(mu)) => {
            let levels = levels.unwrap_or(6);
            if levels == 0 {
                return Err(CliError::Config("the demo needs at least one level".into()));
            }
            Ok(Some(DemoConfig { low, high, mu, levels }))
        }
        _ => Err(CliError::Config(
            "the demo needs --demo-low, --demo-high and --demo-mu together".into(),
        )),
    }
}
