use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use swapsim::config::{ConfigFile, ConfigLayers};
use swapsim::{cmd_merge, cmd_report, cmd_run, cmd_topology};

#[derive(Parser)]
#[command(
    name = "swapsim",
    version,
    about = "Simulates bandwidth incentives in a Kademlia-style storage network \
             and measures reward fairness (set SIM_LOG=info|debug for diagnostics)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a deterministic overlay and write the topology file
    Topology(TopologyArgs),
    /// Simulate file downloads and write a result file
    Run(RunArgs),
    /// Merge result files from disjoint step ranges of one configuration
    Merge(MergeArgs),
    /// Compute fairness reports (JSON + CSV + SVG) from a result file
    Report(ReportArgs),
}

#[derive(Args, Default)]
struct OverlayFlags {
    /// Node count
    #[arg(long)]
    nodes: Option<usize>,
    /// Address width in bits
    #[arg(long)]
    bits: Option<u32>,
    /// Bucket capacity k
    #[arg(long = "bucket-size")]
    bucket_size: Option<usize>,
    /// Topology seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TopologyArgs {
    #[command(flatten)]
    overlay: OverlayFlags,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overlay: OverlayFlags,
    /// Reuse a previously written topology file instead of overlay flags
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Number of file downloads to simulate
    #[arg(long)]
    files: Option<u64>,
    /// Minimum chunks per file
    #[arg(long = "chunks-min")]
    chunks_min: Option<u32>,
    /// Maximum chunks per file
    #[arg(long = "chunks-max")]
    chunks_max: Option<u32>,
    /// Fraction of nodes that originate downloads
    #[arg(long = "originator-fraction")]
    originator_fraction: Option<f64>,
    /// Workload seed
    #[arg(long = "workload-seed")]
    workload_seed: Option<u64>,
    /// Pricing mode: xor-remaining, proximity-step or constant:<c>
    #[arg(long)]
    pricing: Option<String>,
    /// Execute only steps start:end of the workload
    #[arg(long)]
    shard: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct MergeArgs {
    /// Result files to merge
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Result file to analyze
    input: PathBuf,
    /// F1 series variant: first-hop-ratio or per-reward
    #[arg(long = "f1-variant")]
    f1_variant: Option<String>,
    /// Histogram bin width (defaults to about 50 bins)
    #[arg(long = "bin-width")]
    bin_width: Option<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn layered(flags: ConfigFile, config: Option<&PathBuf>) -> anyhow::Result<ConfigLayers> {
    let file = match config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    Ok(ConfigLayers { flags, file })
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Topology(args) => {
            let flags = ConfigFile {
                nodes: args.overlay.nodes,
                bits: args.overlay.bits,
                bucket_size: args.overlay.bucket_size,
                seed: args.overlay.seed,
                ..ConfigFile::default()
            };
            let layers = layered(flags, args.config.as_ref())?;
            match layers.overlay_source()? {
                swapsim::OverlaySource::Params(params) => {
                    cmd_topology(params, &args.out)?;
                }
                swapsim::OverlaySource::TopologyFile(_) => {
                    anyhow::bail!("the topology subcommand builds from parameters, not from a topology file")
                }
            }
            Ok(())
        }
        Command::Run(args) => {
            let flags = ConfigFile {
                nodes: args.overlay.nodes,
                bits: args.overlay.bits,
                bucket_size: args.overlay.bucket_size,
                seed: args.overlay.seed,
                topology: args.topology,
                files: args.files,
                chunks_min: args.chunks_min,
                chunks_max: args.chunks_max,
                originator_fraction: args.originator_fraction,
                workload_seed: args.workload_seed,
                pricing: args.pricing,
                shard: args.shard,
                out: args.out,
                ..ConfigFile::default()
            };
            let layers = layered(flags, args.config.as_ref())?;
            cmd_run(&layers.resolve()?)?;
            Ok(())
        }
        Command::Merge(args) => {
            cmd_merge(&args.inputs, &args.out)?;
            Ok(())
        }
        Command::Report(args) => {
            let variant = match &args.f1_variant {
                None => swapsim_core::F1Variant::default(),
                Some(text) => text.parse()?,
            };
            cmd_report(&args.input, variant, args.bin_width, &args.out)?;
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
