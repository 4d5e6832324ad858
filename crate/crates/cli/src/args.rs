use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "metrohaul", version, about = "Metro horseshoe network and slice orchestration simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn seed(&self) -> Option<u64> {
        match &self.command {
            Command::Scenario(a) => Some(a.seed),
            Command::Experiment(a) => Some(a.seed),
            Command::Report(a) => Some(a.seed),
            _ => None,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a topology document and summarise it.
    Validate {
        #[arg(long)]
        topology: PathBuf,
    },
    /// Create a connectivity service.
    Provision(ProvisionArgs),
    /// Delete a connectivity service.
    Delete {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        service: String,
    },
    /// Create, delete or inspect network slices.
    #[command(subcommand)]
    Slice(SliceCommand),
    /// Generate a camera scenario.
    Scenario(ScenarioArgs),
    /// Run a blocking experiment.
    Experiment(ExperimentArgs),
    /// Run the end-to-end surveillance demo and emit its report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State file; created on first use.
    #[arg(long)]
    pub state: PathBuf,
    /// Topology used when the state file does not exist yet (default: the
    /// built-in five-node demo).
    #[arg(long)]
    pub topology: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayerArg {
    Optical,
    L2,
    L3,
}

#[derive(Debug, Args)]
pub struct ProvisionArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum)]
    pub layer: LayerArg,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub z: String,
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth: f64,
    /// Modulation format, e.g. DP-16QAM.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SliceCommand {
    Create {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        id: String,
        /// Service descriptor (default: the bundled surveillance descriptor).
        #[arg(long)]
        nsd: Option<PathBuf>,
    },
    Delete {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        id: String,
    },
    Show {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        id: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub topology: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 150, allow_negative_numbers = true)]
    pub cameras_per_amen: i64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub ptz_fraction: f64,
    #[arg(long, default_value_t = 4.0)]
    pub stream_mbps: f64,
    /// Also write the scenario JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EndpointArg {
    AmenTrunks,
    RandomSipPairs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub topology: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub arrival_rate: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub mean_hold: f64,
    #[arg(long, conflicts_with = "duration")]
    pub requests: Option<u64>,
    /// Simulated seconds, instead of a request count.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Demand classes as `gbps:weight`, comma separated.
    #[arg(long, default_value = "100:1")]
    pub demand: String,
    #[arg(long, value_enum, default_value_t = EndpointArg::AmenTrunks)]
    pub endpoints: EndpointArg,
    /// Latency histogram as CSV.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// Metrics JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub topology: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 150, allow_negative_numbers = true)]
    pub cameras_per_amen: i64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub ptz_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    pub arrival_rate: f64,
    #[arg(long, default_value_t = 5.0)]
    pub mean_hold: f64,
    #[arg(long, default_value_t = 10_000)]
    pub requests: u64,
    /// Report payload without timestamp, for byte comparison between runs.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}
