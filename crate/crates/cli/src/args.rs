use std::path::PathBuf;

use bubbletest::{AdfSpec, Deterministic, LagPolicy, MinWindow, NullSpec, TestConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "bubbletest", version, about = "Right-tail ADF / SADF / GSADF bubble tests")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one or all of the ADF, RADF, SADF and GSADF tests on a series.
    Test(TestArgs),
    /// Date-stamp bubble episodes from the BSADF sequence.
    Datestamp(DatestampArgs),
    /// Simulate critical values and write a cache document.
    Cv(CvArgs),
    /// Generate a synthetic series.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "date")]
    pub date_col: String,
    #[arg(long, default_value = "value")]
    pub value_col: String,
    #[arg(long, default_value = bubbletest::series::DEFAULT_DATE_FORMAT)]
    pub date_format: String,
    /// Test log prices (default).
    #[arg(long, overrides_with = "no_log")]
    pub log: bool,
    /// Test price levels.
    #[arg(long, overrides_with = "log")]
    pub no_log: bool,
}

impl InputArgs {
    pub fn use_log(&self) -> bool {
        !self.no_log
    }
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Fixed number of lagged differences.
    #[arg(long, conflicts_with = "lag_bic_max")]
    pub lags: Option<usize>,
    /// Choose the lag per window by BIC up to this maximum.
    #[arg(long)]
    pub lag_bic_max: Option<usize>,
    /// Add a linear trend to the regression.
    #[arg(long)]
    pub trend: bool,
    /// Minimum window in observations (default: floor(T * (0.01 + 1.8 / sqrt T))).
    #[arg(long)]
    pub min_window: Option<usize>,
    /// Window width for the rolling ADF test.
    #[arg(long)]
    pub rolling_width: Option<usize>,
}

impl ConfigArgs {
    pub fn test_config(&self) -> TestConfig {
        let lag_policy = match (self.lags, self.lag_bic_max) {
            (_, Some(k)) => LagPolicy::Bic(k),
            (Some(k), None) => LagPolicy::Fixed(k),
            (None, None) => LagPolicy::Fixed(0),
        };
        TestConfig {
            adf: AdfSpec {
                lag_policy,
                deterministic: if self.trend {
                    Deterministic::ConstantAndTrend
                } else {
                    Deterministic::Constant
                },
                ..AdfSpec::default()
            },
            min_window: self.min_window.map_or(MinWindow::PsyDefault, MinWindow::Fixed),
            rolling_width: self.rolling_width,
        }
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    pub replications: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Null drift d in y_t = d * T^(-eta) + y_{t-1} + e_t.
    #[arg(long, default_value_t = 1.0)]
    pub drift_scale: f64,
    /// Null drift exponent eta.
    #[arg(long, default_value_t = 1.0)]
    pub drift_exponent: f64,
}

impl McArgs {
    pub fn null_spec(&self) -> Result<NullSpec, CliError> {
        let null = NullSpec {
            drift_scale: self.drift_scale,
            drift_exponent: self.drift_exponent,
            innovation_sd: 1.0,
        };
        null.validate()?;
        Ok(null)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestSelection {
    Adf,
    Radf,
    Sadf,
    Gsadf,
    All,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, conflicts_with = "all")]
    pub test: Option<TestSelection>,
    /// Same as `--test all`.
    #[arg(long)]
    pub all: bool,
    /// Critical-value levels in percent.
    #[arg(long, default_value = "90,95,99")]
    pub levels: String,
    /// Directory of cached critical values.
    #[arg(long)]
    pub cv_cache: Option<PathBuf>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DatestampArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub mc: McArgs,
    /// Critical-value level in percent: 90, 95 or 99.
    #[arg(long, default_value = "95")]
    pub level: String,
    /// Minimum episode length in observations (default: max(1, floor(ln T))).
    #[arg(long)]
    pub min_duration: Option<usize>,
    /// Cache file written by `cv --test bsadf`, or a cache directory.
    #[arg(long)]
    pub cv_cache: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "datestamp")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CvTest {
    Adf,
    Radf,
    Sadf,
    Gsadf,
    Bsadf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long = "T")]
    pub t: usize,
    #[arg(long, value_enum)]
    pub test: CvTest,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub mc: McArgs,
    /// Levels in percent; `bsadf` takes exactly one (default 95).
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Rw,
    Ar1,
    Evans,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub generator: Generator,
    #[arg(long = "T", default_value_t = 400)]
    pub t: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV; a JSON sidecar with the same stem is written next to it.
    #[arg(long, default_value = "simulated.csv")]
    pub out: PathBuf,
    // random walk
    #[arg(long, default_value_t = 0.0)]
    pub drift_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub drift_exponent: f64,
    /// Innovation standard deviation (rw, ar1).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    // explosive AR(1)
    #[arg(long, default_value_t = 1.05)]
    pub rho: f64,
    /// First explosive index (default: 3T/4).
    #[arg(long)]
    pub regime_start: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub y0: f64,
    // Evans bubble
    #[arg(long, default_value_t = 0.05)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.85)]
    pub pi: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    /// Initial bubble (default: delta).
    #[arg(long)]
    pub b0: Option<f64>,
    /// Constant fundamental added to the bubble to form the price.
    #[arg(long, default_value_t = 0.0)]
    pub fundamental: f64,
}
