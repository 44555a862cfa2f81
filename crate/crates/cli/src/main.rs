//! `aocc`: evaluate event-camera denoising from the command line.
//!
//! The pipeline subcommands (`synth`, `inject`, `denoise`) produce and
//! transform event streams; the analysis subcommands (`eval`, `ccc`,
//! `sweep`, `roc`) reduce streams to CSV metrics; `plot` renders metric
//! CSVs as SVG charts. Every run is fully determined by its flags and
//! input bytes: seeds are explicit and outputs are byte-reproducible.
//!
//! Exit status: 0 on success, 1 on data errors (with a single
//! `error: ...` line on stderr), 2 on flag errors.

mod plot;
mod run;
mod stream_files;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use aocc_core::denoise::NeighborNorm;
use aocc_core::SensorGeometry;
use stream_files::{
    parse_geometry, parse_size, parse_span_f64, parse_span_u64, parse_u64_pair, F64Span,
    FileFormat, U64Span,
};

#[derive(Parser)]
#[command(
    name = "aocc",
    version,
    about = "Event-stream denoising evaluation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic test scene
    Synth(SynthArgs),
    /// Add seeded uniform background noise to a stream
    Inject(InjectArgs),
    /// Filter a stream with one of the baseline denoisers
    Denoise(DenoiseArgs),
    /// Evaluate labeled confusion metrics or the structural ratio
    Eval(EvalArgs),
    /// Compute the contrast curve over a window grid and its area
    Ccc(CccArgs),
    /// Sweep a denoiser parameter and report the area per point
    Sweep(SweepArgs),
    /// Trace detection rates over a score threshold grid
    Roc(RocArgs),
    /// Render metric CSVs as an SVG line chart
    Plot(PlotArgs),
}

#[derive(Args)]
struct StreamIn {
    /// Input stream path, `-` for stdin
    #[arg(short, long, default_value = "-")]
    input: String,
    /// Stream file format; inferred from the path extension when omitted
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Fallback geometry (WxH) for CSV inputs without a geometry comment
    #[arg(long, value_parser = parse_geometry)]
    geometry: Option<SensorGeometry>,
}

#[derive(Args)]
struct SinkOut {
    /// Output path, `-` for stdout
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SceneKind {
    /// Vertical bar sweeping horizontally
    Bar,
    /// Edge rotating about the sensor center
    Edge,
    /// Every pixel fires at a fixed period
    Saturating,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    out: SinkOut,
    /// Stream file format; inferred from the output extension when omitted
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    #[arg(long, value_enum)]
    scene: SceneKind,
    /// Sensor size as WxH
    #[arg(long, value_parser = parse_geometry, default_value = "346x260")]
    geometry: SensorGeometry,
    #[arg(long, default_value_t = 1000)]
    duration_ms: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bar: time for one full sweep across the sensor
    #[arg(long, default_value_t = 500)]
    traverse_ms: u64,
    /// Bar: width in pixels
    #[arg(long, default_value_t = 2)]
    bar_width: u16,
    /// Fraction of rows firing per edge crossing (scene default when omitted)
    #[arg(long)]
    density: Option<f64>,
    /// Timestamp jitter in microseconds (scene default when omitted)
    #[arg(long)]
    jitter_us: Option<u64>,
    /// Edge: time for one full rotation
    #[arg(long, default_value_t = 500)]
    rotation_ms: u64,
    /// Saturating: firing period
    #[arg(long, default_value_t = 2)]
    period_ms: u64,
}

#[derive(Args)]
struct InjectArgs {
    #[command(flatten)]
    src: StreamIn,
    #[command(flatten)]
    out: SinkOut,
    /// Noise rate per pixel in Hz
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that a noise event is polarity +1
    #[arg(long, default_value_t = 0.5)]
    polarity_split: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dwf,
    Threshold,
    Passthrough,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    Chebyshev,
    Manhattan,
}

impl From<NormArg> for NeighborNorm {
    fn from(norm: NormArg) -> Self {
        match norm {
            NormArg::Chebyshev => NeighborNorm::Chebyshev,
            NormArg::Manhattan => NeighborNorm::Manhattan,
        }
    }
}

#[derive(Args)]
struct DenoiseArgs {
    #[command(flatten)]
    src: StreamIn,
    #[command(flatten)]
    out: SinkOut,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// dwf: neighbor search radius in pixels
    #[arg(long, default_value_t = 4)]
    radius: u16,
    /// dwf: capacity of each event window
    #[arg(long, default_value_t = 200)]
    buffer: usize,
    /// dwf: neighbors required to accept an event
    #[arg(long, default_value_t = 1)]
    support: usize,
    /// dwf: distance norm for the neighbor test
    #[arg(long, value_enum, default_value_t = NormArg::Chebyshev)]
    norm: NormArg,
    /// threshold: keep events scoring at least this value
    #[arg(long, required_if_eq("method", "threshold"))]
    tau: Option<f64>,
    /// threshold: CSV with one `score` column, one row per event
    #[arg(long, conflicts_with = "oracle_sigma")]
    scores: Option<String>,
    /// threshold: draw scores from the labels with this spread instead
    #[arg(long)]
    oracle_sigma: Option<f64>,
    /// Seed for oracle scores
    #[arg(long, default_value_t = 0)]
    oracle_seed: u64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true)))]
struct EvalArgs {
    #[command(flatten)]
    src: StreamIn,
    #[command(flatten)]
    out: SinkOut,
    /// Confusion metrics of a kept stream against the labeled input
    #[arg(long, group = "mode")]
    labeled: bool,
    /// Kept (denoised) stream to score; defaults to the input itself
    #[arg(long, requires = "labeled")]
    kept: Option<String>,
    /// Structural ratio of the event-count image
    #[arg(long, group = "mode")]
    esr: bool,
    /// Reference event count for the ratio (defaults to the stream count)
    #[arg(long, requires = "esr")]
    esr_m: Option<u64>,
    /// Evaluate per window of this length instead of the whole stream
    #[arg(long, requires = "esr")]
    esr_window_ms: Option<u64>,
}

#[derive(Args)]
struct GridArgs {
    /// Named window grid preset: `standard` or `eventzoom`
    #[arg(long, default_value = "standard", conflicts_with = "grid_us")]
    grid: String,
    /// Explicit uniform grid as START:END:STEP in microseconds
    #[arg(long, value_parser = parse_span_u64)]
    grid_us: Option<U64Span>,
}

#[derive(Args)]
struct CccArgs {
    #[command(flatten)]
    src: StreamIn,
    #[command(flatten)]
    out: SinkOut,
    #[command(flatten)]
    grid: GridArgs,
    /// Also export one accumulated frame as a PGM image
    #[arg(long, requires = "frame_window")]
    frame_pgm: Option<String>,
    /// Frame window as T0:T1 in microseconds
    #[arg(long, value_parser = parse_u64_pair, requires = "frame_pgm")]
    frame_window: Option<(u64, u64)>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    DwfRadius,
    Threshold,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    src: StreamIn,
    #[command(flatten)]
    out: SinkOut,
    #[command(flatten)]
    grid: GridArgs,
    /// Parameter to sweep
    #[arg(long, value_enum)]
    param: SweepParam,
    /// dwf-radius: radii as START:END:STEP
    #[arg(long, value_parser = parse_span_u64, default_value = "2:14:2")]
    radii: U64Span,
    /// dwf-radius: capacity of each event window
    #[arg(long, default_value_t = 200)]
    buffer: usize,
    /// threshold: thresholds as START:END:STEP
    #[arg(long, value_parser = parse_span_f64, default_value = "0.02:0.98:0.02")]
    taus: F64Span,
    /// threshold: CSV with one `score` column, one row per event
    #[arg(long, conflicts_with = "oracle_sigma")]
    scores: Option<String>,
    /// threshold: draw scores from the labels with this spread instead
    #[arg(long)]
    oracle_sigma: Option<f64>,
    /// Seed for oracle scores
    #[arg(long, default_value_t = 0)]
    oracle_seed: u64,
    /// Also write one contrast-curve CSV per parameter into this directory
    #[arg(long)]
    curves_dir: Option<String>,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    src: StreamIn,
    #[command(flatten)]
    out: SinkOut,
    /// Threshold grid as START:END:STEP
    #[arg(long, value_parser = parse_span_f64, default_value = "0:1:0.02")]
    taus: F64Span,
    /// CSV with one `score` column, one row per event
    #[arg(long, conflicts_with = "oracle_sigma")]
    scores: Option<String>,
    /// Draw scores from the labels with this spread instead
    #[arg(long)]
    oracle_sigma: Option<f64>,
    /// Seed for oracle scores
    #[arg(long, default_value_t = 0)]
    oracle_seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    /// Metric CSV to plot; repeat for multiple series
    #[arg(short, long, required = true)]
    input: Vec<String>,
    #[command(flatten)]
    out: SinkOut,
    /// Column for the x axis (default: first column)
    #[arg(long)]
    x_col: Option<String>,
    /// Column for the y axis (default: second column)
    #[arg(long)]
    y_col: Option<String>,
    /// Chart size as WxH in pixels
    #[arg(long, value_parser = parse_size, default_value = "800x500")]
    size: (u32, u32),
    /// Chart title
    #[arg(long)]
    title: Option<String>,
}

/// Flag-style misuse that clap's declarative rules cannot express.
fn usage_error(message: &str) -> ! {
    eprintln!("error: {message}");
    std::process::exit(2);
}

fn init_worker_pool() {
    let Ok(raw) = std::env::var("AOCC_THREADS") else {
        return;
    };
    match raw.parse::<usize>() {
        Ok(n) if n >= 1 => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => usage_error("AOCC_THREADS must be a positive integer"),
    }
}

fn main() {
    let cli = Cli::parse();
    init_worker_pool();
    let outcome = match cli.command {
        Command::Synth(args) => run::synth(args),
        Command::Inject(args) => run::inject(args),
        Command::Denoise(args) => run::denoise(args),
        Command::Eval(args) => run::eval(args),
        Command::Ccc(args) => run::ccc(args),
        Command::Sweep(args) => run::sweep(args),
        Command::Roc(args) => run::roc(args),
        Command::Plot(args) => run::plot(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
