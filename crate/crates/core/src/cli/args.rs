use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{read_config_text, RunConfig};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "nlclt", version, about = "Classical, martingale and nonlinear CLT laboratory")]
pub(crate) struct Cli {
    /// JSON config; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub stream: Option<u32>,
    /// Output directory for CSV files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Cmd {
    /// Tabulate an explicit nonlinear normal density.
    Density(DensityArgs),
    /// Solve a G-heat or g-expectation problem.
    Solve(SolveArgs),
    /// DP value against its limit along an n schedule.
    Converge(ConvergeArgs),
    /// Classical, martingale or Lindeberg condition reports.
    Check(CheckArgs),
    /// Monte Carlo checks.
    Simulate(SimulateArgs),
    /// CSV data for the density figures.
    Figures(FiguresArgs),
    /// Report every violated precondition of a config without running it.
    Validate {
        path: Option<PathBuf>,
    },
}

impl Cmd {
    fn name_and_flags(&self) -> Option<(&'static str, Value)> {
        let pair = match self {
            Cmd::Density(a) => ("density", serde_json::to_value(a)),
            Cmd::Solve(a) => ("solve", serde_json::to_value(a)),
            Cmd::Converge(a) => ("converge", serde_json::to_value(a)),
            Cmd::Check(a) => ("check", serde_json::to_value(a)),
            Cmd::Simulate(a) => ("simulate", serde_json::to_value(a)),
            Cmd::Figures(a) => ("figures", serde_json::to_value(a)),
            Cmd::Validate { .. } => return None,
        };
        Some((pair.0, pair.1.unwrap_or(Value::Null)))
    }
}

impl Cli {
    /// Merges flags over the config file into one [`RunConfig`].
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json(&read_config_text(path)?)?,
            None => RunConfig { command: String::new(), seed: None, stream: None, out: None, params: Map::new() },
        };
        match self.command.as_ref().and_then(Cmd::name_and_flags) {
            Some((name, flags)) => {
                if !cfg.command.is_empty() && cfg.command != name {
                    return Err(Error::Config(format!(
                        "subcommand `{name}` conflicts with config command `{}`",
                        cfg.command
                    )));
                }
                cfg.command = name.to_string();
                if let Value::Object(flags) = flags {
                    for (k, v) in flags {
                        if !v.is_null() {
                            cfg.params.insert(k, v);
                        }
                    }
                }
            }
            None if cfg.command.is_empty() => {
                return Err(Error::Config("no subcommand given and no --config to take one from".into()))
            }
            None => {}
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.stream.is_some() {
            cfg.stream = self.stream;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    ChenEpstein,
    Cez,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Sup,
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeArg {
    Phi,
    Phibar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorArg {
    GHeat,
    GExpectation,
}

/// Mean- or variance-uncertain rectangular model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Mean,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawArg {
    Rademacher,
    Bernoulli,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MdsArg {
    IidRademacher,
    HallMixture,
    VarFeedback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckTarget {
    Classical,
    Martingale,
    Lindeberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulateTarget {
    Clt,
    Hall,
    Policy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureSet {
    Paper,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// lo:hi:points
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Absolute tolerance of the total-mass quadrature.
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorArg>,
    #[arg(long)]
    pub sigma_low: Option<f64>,
    #[arg(long)]
    pub sigma_high: Option<f64>,
    #[arg(long)]
    pub mu_low: Option<f64>,
    #[arg(long)]
    pub mu_high: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long)]
    pub terminal: Option<String>,
    #[arg(long)]
    pub phi1: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    pub envelope: Option<EnvelopeArg>,
    #[arg(long)]
    pub space_points: Option<usize>,
    #[arg(long)]
    pub domain_halfwidth: Option<f64>,
    #[arg(long)]
    pub time_steps: Option<usize>,
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Also evaluate the tree oracle with this many steps.
    #[arg(long)]
    pub tree_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub sigma_low: Option<f64>,
    #[arg(long)]
    pub sigma_high: Option<f64>,
    #[arg(long)]
    pub mu_low: Option<f64>,
    #[arg(long)]
    pub mu_high: Option<f64>,
    /// Noise scale of the mean-uncertain model.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long)]
    pub terminal: Option<String>,
    #[arg(long)]
    pub phi1: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    pub envelope: Option<EnvelopeArg>,
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    #[arg(long)]
    pub enrich_controls: Option<bool>,
    #[arg(long)]
    pub target_points: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub innovation_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub innovation_probs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub target: Option<CheckTarget>,
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long)]
    pub eps: Option<f64>,
    // classical
    #[arg(long, value_enum)]
    pub law: Option<LawArg>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
    #[arg(long)]
    pub delta: Option<f64>,
    // martingale
    #[arg(long, value_enum)]
    pub model: Option<MdsArg>,
    #[arg(long, value_delimiter = ',')]
    pub eta_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub eta_probs: Option<Vec<f64>>,
    #[arg(long)]
    pub init: Option<f64>,
    #[arg(long)]
    pub pos: Option<f64>,
    #[arg(long)]
    pub neg: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    // lindeberg
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub sigma_low: Option<f64>,
    #[arg(long)]
    pub sigma_high: Option<f64>,
    #[arg(long)]
    pub mu_low: Option<f64>,
    #[arg(long)]
    pub mu_high: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub innovation_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub innovation_probs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub target: Option<SimulateTarget>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    // clt
    #[arg(long, value_enum)]
    pub law: Option<LawArg>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
    // hall
    #[arg(long, value_delimiter = ',')]
    pub eta_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub eta_probs: Option<Vec<f64>>,
    #[arg(long)]
    pub k_n: Option<usize>,
    // policy
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub sigma_low: Option<f64>,
    #[arg(long)]
    pub sigma_high: Option<f64>,
    #[arg(long)]
    pub mu_low: Option<f64>,
    #[arg(long)]
    pub mu_high: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long)]
    pub terminal: Option<String>,
    #[arg(long)]
    pub phi1: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    pub envelope: Option<EnvelopeArg>,
    #[arg(long)]
    pub enrich_controls: Option<bool>,
    #[arg(long)]
    pub target_points: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub innovation_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub innovation_probs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresArgs {
    #[arg(long, value_enum)]
    pub set: Option<FigureSet>,
    /// lo:hi:points shared by every figure.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}
