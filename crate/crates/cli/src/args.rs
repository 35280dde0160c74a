//! Command-line flags. Every flag is optional here so that a JSON config
//! file (`--config`) can fill in what the command line leaves unset.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ltll_core::bayes::{McmcConfig, PriorSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "ltll",
    version,
    about = "Left-truncated log-logistic fitting and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit (α, β) to a dataset by maximum likelihood and/or MCMC.
    Fit(FitArgs),
    /// Run the Monte Carlo truncation or sample-size sweep.
    Simulate(SimulateArgs),
    /// Trace Wald and/or credible ellipses for a dataset.
    Ellipse(EllipseArgs),
    /// Monte Carlo moments over an (α, β) grid at a fixed truncation point.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Bayes,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EllipseMethod {
    Wald,
    Credible,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Truncation,
    N,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DataArgs {
    /// CSV file, or `builtin:bladder` for the bundled remission times.
    #[arg(long)]
    pub data: Option<String>,
    /// Column index (0-based) or header name.
    #[arg(long)]
    pub column: Option<String>,
    /// Truncation point; values at or below it are dropped.
    #[arg(long)]
    pub xl: Option<f64>,
    /// Label echoed into outputs.
    #[arg(long)]
    pub units: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcArgs {
    /// Gamma prior hyperparameters `a1,b1,a2,b2` (shape, rate).
    #[arg(long)]
    pub prior: Option<String>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Log-scale proposal sd, one value or `alpha,beta`.
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long)]
    pub chains: Option<usize>,
    /// Disable burn-in step adaptation.
    #[arg(long)]
    pub no_adapt: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CommonArgs {
    /// Random seed; falls back to LTLL_SEED, then a fixed default.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of this command's flags as keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(flatten)]
    pub mcmc: McmcArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub sweep: Option<Sweep>,
    /// 200 replicates instead of 1000.
    #[arg(long)]
    pub fast: bool,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Sample size for the truncation sweep.
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation point for the sample-size sweep.
    #[arg(long)]
    pub xl: Option<f64>,
    /// Comma-separated truncation points.
    #[arg(long)]
    pub xl_list: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Run replicates on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub mcmc: McmcArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EllipseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub method: Option<EllipseMethod>,
    /// Number of boundary points.
    #[arg(long)]
    pub points: Option<usize>,
    /// γ for the 100(1−γ)% region.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub mcmc: McmcArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct MomentsArgs {
    #[arg(long)]
    pub xl: Option<f64>,
    /// `lo:hi:count`
    #[arg(long)]
    pub alpha_grid: Option<String>,
    /// `lo:hi:count`
    #[arg(long)]
    pub beta_grid: Option<String>,
    /// Monte Carlo draws per cell.
    #[arg(long)]
    pub draws: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

/// Fills unset fields of `cli` from the JSON object at `cli.common.config`.
pub fn with_config<T>(cli: T, config: Option<&PathBuf>, merge: fn(T, T) -> T) -> Result<T>
where
    T: for<'de> Deserialize<'de> + Serialize + Default,
{
    let Some(path) = config else { return Ok(cli) };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let file = parse_config::<T>(&text)
        .with_context(|| format!("invalid config file {}", path.display()))?;
    Ok(merge(cli, file))
}

/// Parses a JSON config object, rejecting keys that are not flags of `T`.
pub fn parse_config<T>(text: &str) -> Result<T>
where
    T: for<'de> Deserialize<'de> + Serialize + Default,
{
    let value: serde_json::Value = serde_json::from_str(text)?;
    let Some(object) = value.as_object() else {
        bail!("config must be a JSON object")
    };
    let known = serde_json::to_value(T::default())?;
    let known = known
        .as_object()
        .expect("argument structs serialize to objects");
    let unknown: Vec<&String> = object.keys().filter(|k| !known.contains_key(*k)).collect();
    if !unknown.is_empty() {
        bail!("unknown config keys: {unknown:?}");
    }
    Ok(serde_json::from_value(value)?)
}

macro_rules! merge_fields {
    ($a:expr, $b:expr; $($f:ident),*) => {{
        let (a, b) = (&$a, &$b);
        #[allow(clippy::needless_update)]
        Self { $($f: a.$f.clone().or(b.$f.clone()),)* ..Default::default() }
    }};
}

impl DataArgs {
    pub fn merge(self, other: Self) -> Self {
        merge_fields!(self, other; data, column, xl, units)
    }
}

impl McmcArgs {
    pub fn merge(self, other: Self) -> Self {
        Self {
            no_adapt: self.no_adapt || other.no_adapt,
            ..merge_fields!(self, other; prior, iters, burnin, thin, steps, chains)
        }
    }

    pub fn prior(&self) -> Result<PriorSpec> {
        let Some(raw) = &self.prior else {
            return Ok(PriorSpec::default());
        };
        let v = parse_list::<f64>(raw, "prior")?;
        let [a1, b1, a2, b2] = v[..] else {
            bail!("--prior expects four values a1,b1,a2,b2, got {raw:?}");
        };
        Ok(PriorSpec::new(a1, b1, a2, b2)?)
    }

    pub fn config(&self, seed: u64) -> Result<McmcConfig> {
        let d = McmcConfig::default();
        let (step_alpha, step_beta) = match &self.steps {
            None => (d.step_alpha, d.step_beta),
            Some(raw) => match parse_list::<f64>(raw, "steps")?[..] {
                [s] => (s, s),
                [a, b] => (a, b),
                _ => bail!("--steps expects one or two values, got {raw:?}"),
            },
        };
        let cfg = McmcConfig {
            iterations: self.iters.unwrap_or(d.iterations),
            burn_in: self.burnin.unwrap_or(d.burn_in),
            thin: self.thin.unwrap_or(d.thin),
            step_alpha,
            step_beta,
            adapt: !self.no_adapt,
            seed,
            chains: self.chains.unwrap_or(d.chains),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl CommonArgs {
    pub fn merge(self, other: Self) -> Self {
        Self {
            seed: self.seed.or(other.seed),
            out: self.out.or(other.out),
            config: self.config,
        }
    }

    pub fn seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var("LTLL_SEED") {
            Ok(raw) => raw
                .trim()
                .parse()
                .with_context(|| format!("LTLL_SEED is not a u64: {raw:?}")),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }
}

impl FitArgs {
    pub fn merge(self, other: Self) -> Self {
        Self {
            data: self.data.merge(other.data),
            method: self.method.or(other.method),
            format: self.format.or(other.format),
            mcmc: self.mcmc.merge(other.mcmc),
            common: self.common.merge(other.common),
        }
    }
}

impl SimulateArgs {
    pub fn merge(self, other: Self) -> Self {
        Self {
            sweep: self.sweep.or(other.sweep),
            fast: self.fast || other.fast,
            replicates: self.replicates.or(other.replicates),
            n: self.n.or(other.n),
            xl: self.xl.or(other.xl),
            xl_list: self.xl_list.or(other.xl_list),
            n_list: self.n_list.or(other.n_list),
            alpha: self.alpha.or(other.alpha),
            beta: self.beta.or(other.beta),
            sequential: self.sequential || other.sequential,
            mcmc: self.mcmc.merge(other.mcmc),
            common: self.common.merge(other.common),
        }
    }
}

impl EllipseArgs {
    pub fn merge(self, other: Self) -> Self {
        Self {
            data: self.data.merge(other.data),
            method: self.method.or(other.method),
            points: self.points.or(other.points),
            gamma: self.gamma.or(other.gamma),
            mcmc: self.mcmc.merge(other.mcmc),
            common: self.common.merge(other.common),
        }
    }
}

impl MomentsArgs {
    pub fn merge(self, other: Self) -> Self {
        Self {
            xl: self.xl.or(other.xl),
            alpha_grid: self.alpha_grid.or(other.alpha_grid),
            beta_grid: self.beta_grid.or(other.beta_grid),
            draws: self.draws.or(other.draws),
            common: self.common.merge(other.common),
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|t| t.trim().parse::<T>().ok())
        .collect::<Option<Vec<T>>>()
        .with_context(|| format!("cannot parse {what} list {raw:?}"))
}

/// `lo:hi:count` into `count` evenly spaced values.
pub fn parse_grid(raw: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        bail!("grid must be lo:hi:count, got {raw:?}");
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad grid start in {raw:?}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad grid end in {raw:?}"))?;
    let count: usize = count
        .trim()
        .parse()
        .with_context(|| format!("bad grid count in {raw:?}"))?;
    if count == 0 || lo.is_nan() || lo <= 0.0 || hi < lo || (count == 1 && hi != lo) {
        bail!("grid {raw:?} must have positive bounds lo <= hi and count >= 1 (count 1 needs lo == hi)");
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect())
}
