use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use magic_mps::harness::{self, Command, RunConfig};
use magic_mps::{Error, Result};

/// Stabilizer Rényi entropies of MPS by perfect Pauli sampling.
///
/// Worker threads for sampling are taken from MAGIC_MPS_WORKERS.
#[derive(Parser)]
#[command(name = "magic-mps", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Draw Pauli strings from an MPS and write sample records.
    Sample,
    /// Estimate SRE densities from a record file.
    Estimate,
    /// T-state product under a random Clifford circuit over a phase grid.
    TstateBench,
    /// Repeated m2 estimates on the uniform Bloch product state.
    ProductBench,
    /// Ising ground states over a transverse-field grid.
    GroundState,
    /// Magic and entanglement after a quench from |+...+>.
    Quench,
    /// Per-sample timing over bond dimension and chain length.
    Bench,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Sample => Command::Sample,
            Sub::Estimate => Command::Estimate,
            Sub::TstateBench => Command::TstateBench,
            Sub::ProductBench => Command::ProductBench,
            Sub::GroundState => Command::GroundState,
            Sub::Quench => Command::Quench,
            Sub::Bench => Command::Bench,
        }
    }
}

#[derive(Args)]
struct Flags {
    /// Number of sites N.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of samples N_s.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    chi_max: Option<usize>,
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Comma-separated Rényi indices.
    #[arg(long, global = true, value_delimiter = ',')]
    renyi: Option<Vec<f64>>,
    #[arg(long, global = true)]
    phi: Option<f64>,
    #[arg(long, global = true)]
    field_h: Option<f64>,
    #[arg(long, global = true)]
    field_g: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in state for `sample`.
    #[arg(long, global = true, value_parser = ["zero", "ghz", "tstate", "product", "random"])]
    state: Option<String>,
    #[arg(long, global = true)]
    clifford_depth: Option<usize>,
    /// MPS JSON for `sample`, record file for `estimate`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self, command: Command) -> Map<String, Value> {
        let mut map = Map::new();
        let mut set = |key: &str, value: Option<Value>| {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        };
        set("experiment", Some(json!(command)));
        set("n_sites", self.n.map(|v| json!(v)));
        set("n_samples", self.samples.map(|v| json!(v)));
        set("seed", self.seed.map(|v| json!(v)));
        set("chi_max", self.chi_max.map(|v| json!(v)));
        set("cutoff", self.cutoff.map(|v| json!(v)));
        set("renyi", self.renyi.as_ref().map(|v| json!(v)));
        set("phi", self.phi.map(|v| json!(v)));
        set("field_h", self.field_h.map(|v| json!(v)));
        set("field_g", self.field_g.map(|v| json!(v)));
        set("dt", self.dt.map(|v| json!(v)));
        set("t_max", self.t_max.map(|v| json!(v)));
        set("format", self.format.as_ref().map(|v| json!(v)));
        set("out", self.out.as_ref().map(|v| json!(v)));
        set("state", self.state.as_ref().map(|v| json!(v)));
        set("clifford_depth", self.clifford_depth.map(|v| json!(v)));
        set("input", self.input.as_ref().map(|v| json!(v)));
        map
    }
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var("MAGIC_MPS_WORKERS") else {
        return Ok(());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&w| w >= 1)
        .ok_or_else(|| Error::Contract(format!("MAGIC_MPS_WORKERS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Error::Contract(format!("cannot configure worker pool: {e}")))
}

fn run(cli: &Cli) -> Result<()> {
    configure_workers()?;
    let command = cli.command.command();
    let file_text = cli.flags.config.as_ref().map(std::fs::read_to_string).transpose()?;
    let config = RunConfig::layered(file_text.as_deref(), cli.flags.overrides(command))?;
    let text = match command {
        Command::Sample => harness::cmd_sample(&config)?.emit(&config)?,
        _ => harness::run(&config)?.expect("non-sample commands produce a report").emit()?,
    };
    if let Some(text) = text {
        std::io::stdout().lock().write_all(text.as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("magic-mps: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
