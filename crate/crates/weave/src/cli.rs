//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use weave_core::effective::Method;

use crate::output::OUT_ENV;

#[derive(Debug, Parser)]
#[command(name = "weave", version, about = "Effective coupling graphs on transmon lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bloch2,
    Bloch4,
    StarSeries,
    StarClosed,
    EbdLa,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Bloch2 => Method::Bloch2,
            MethodArg::Bloch4 => Method::Bloch4,
            MethodArg::StarSeries => Method::StarSeries,
            MethodArg::StarClosed => Method::StarClosed,
            MethodArg::EbdLa => Method::EbdLa,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory (default: $WEAVE_OUT/<command>, else ./weave-out/<command>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = OUT_ENV, hide_env_values = true, hide = true)]
    pub out_root: Option<PathBuf>,
    /// Also render SVG plots.
    #[arg(long)]
    pub svg: bool,
}

impl OutArgs {
    pub fn dir(&self, command: &str) -> PathBuf {
        match (&self.out, &self.out_root) {
            (Some(p), _) => p.clone(),
            (None, Some(root)) => root.join(command),
            (None, None) => PathBuf::from("weave-out").join(command),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective couplings and shifted frequencies of a device.
    Effective {
        #[arg(long)]
        device: PathBuf,
        #[arg(long, value_enum, default_value = "ebd-la")]
        method: MethodArg,
        /// Node qubits, comma separated (default: the most common frequency).
        #[arg(long, value_delimiter = ',')]
        nodes: Option<Vec<usize>>,
        /// Report deviations from this walk speed, MHz.
        #[arg(long)]
        walk_speed: Option<f64>,
        /// Dump the single-excitation Hamiltonian as text.
        #[arg(long)]
        dump_matrix: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Full versus effective dynamics from one basis state.
    Evolve {
        #[arg(long)]
        device: PathBuf,
        #[arg(long, value_enum, default_value = "ebd-la")]
        method: MethodArg,
        #[arg(long, value_delimiter = ',')]
        nodes: Option<Vec<usize>>,
        /// Initial occupation label, e.g. 100 (default: first node excited).
        #[arg(long)]
        initial: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        tmax_us: f64,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Periodic bridge dynamics sampled at period boundaries.
    Floquet {
        /// Plan whose compiled schedule drives the device.
        #[arg(long, conflicts_with = "connectors")]
        plan: Option<PathBuf>,
        /// Device for --plan (default: the one the plan names).
        #[arg(long, requires = "plan")]
        device: Option<PathBuf>,
        /// Build a uniform chain bridge with this many connectors.
        #[arg(long, default_value_t = 2)]
        connectors: usize,
        #[arg(long, default_value_t = 25.0)]
        g_mhz: f64,
        #[arg(long, default_value_t = 4500.0)]
        omega_mhz: f64,
        #[arg(long, default_value_t = -250.0)]
        alpha_mhz: f64,
        #[arg(long, default_value_t = 10)]
        cycles: usize,
        /// Intra-period samples per segment in the trace output.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        initial: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ideal walk on a target graph.
    Ctqw {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        from: usize,
        /// Uniform hopping rate in MHz; time is then in us. Dimensionless otherwise.
        #[arg(long)]
        walk_speed: Option<f64>,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        tmax_us: f64,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Embed a target graph onto a device.
    Plan {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        device: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
        /// Detuning of new static connectors, omega_node - omega_connector.
        #[arg(long, default_value_t = -200.0, allow_negative_numbers = true)]
        connector_detuning_mhz: f64,
        #[arg(long)]
        no_static: bool,
        #[arg(long)]
        no_dynamic: bool,
        #[arg(long)]
        no_hubs: bool,
        /// Longest dynamic bridge.
        #[arg(long, default_value_t = 7)]
        max_connectors: usize,
        /// Skip iterative deepening on the bridge count.
        #[arg(long)]
        any_bridges: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check a plan against its device.
    Validate {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        device: Option<PathBuf>,
    },
    /// Bridge coupling against connector count, static and periodic.
    Scaling {
        #[arg(long, default_value_t = 25.0)]
        g_mhz: f64,
        #[arg(long, default_value_t = -200.0, allow_negative_numbers = true)]
        delta_mhz: f64,
        #[arg(long, default_value_t = 4500.0)]
        omega_mhz: f64,
        #[arg(long, default_value_t = -250.0, allow_negative_numbers = true)]
        alpha_mhz: f64,
        /// Largest static chain.
        #[arg(long, default_value_t = 4)]
        max_static: usize,
        /// Largest periodic chain.
        #[arg(long, default_value_t = 7)]
        max_dynamic: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}
