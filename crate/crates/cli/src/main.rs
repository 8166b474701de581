mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "imrestore",
    version,
    about = "Grayscale image restoration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inject seeded artifacts into a PGM image.
    Degrade(DegradeArgs),
    /// Restore a PGM image with one filter.
    Restore(RestoreArgs),
    /// Compare original, noisy and restored images.
    Metrics(MetricsArgs),
    /// Run a density × filter grid and write a CSV report.
    Bench(BenchArgs),
    /// Homomorphic illumination correction.
    Homomorphic(HomomorphicArgs),
    /// Temporal median over a directory of frames.
    VideoDenoise(VideoArgs),
}

/// Artifacts other than impulse noise. Shared by `degrade` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct ArtifactArgs {
    #[arg(long, default_value_t = 0)]
    drop_lines: usize,
    #[arg(long, default_value_t = 0)]
    strip_lines: usize,
    /// start,width
    #[arg(long, value_parser = parse_band)]
    band: Option<(usize, usize)>,
    /// count[,rmin,rmax]
    #[arg(long, value_parser = parse_blotches)]
    blotches: Option<(usize, u32, u32)>,
    #[arg(long)]
    gaussian: Option<f64>,
    /// Run the degradation on the transposed image so lines become columns.
    #[arg(long)]
    vertical: bool,
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    impulse: f64,
    #[command(flatten)]
    artifacts: ArtifactArgs,
    /// Also write the corruption mask (0 clean, 255 corrupted).
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterId {
    Ndb,
    Smf3,
    Smf5,
    Cwmf,
    Tsmf,
    Amf,
}

impl FilterId {
    pub fn name(self) -> &'static str {
        match self {
            FilterId::Ndb => "ndb",
            FilterId::Smf3 => "smf3",
            FilterId::Smf5 => "smf5",
            FilterId::Cwmf => "cwmf",
            FilterId::Tsmf => "tsmf",
            FilterId::Amf => "amf",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterParams {
    #[arg(long, default_value_t = 3)]
    center_weight: usize,
    #[arg(long, default_value_t = 20)]
    threshold: u8,
    #[arg(long, default_value_t = 7)]
    max_window: usize,
}

#[derive(Debug, Args)]
pub struct RestoreArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    filter: FilterId,
    #[command(flatten)]
    params: FilterParams,
    /// Per-case counts of the ndb filter as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    noisy: PathBuf,
    #[arg(long)]
    restored: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    /// Value of the filter column.
    #[arg(long, default_value = "restored")]
    label: String,
    /// Value of the density column; defaults to the mask coverage.
    #[arg(long)]
    density: Option<f64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    densities: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_enum, required = true)]
    filters: Vec<FilterId>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    artifacts: ArtifactArgs,
    #[command(flatten)]
    params: FilterParams,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HomomorphicArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    gamma_l: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma_h: f64,
    #[arg(long, default_value_t = 30.0)]
    cutoff: f64,
    #[arg(long, default_value_t = 1.0)]
    sharpness: f64,
}

#[derive(Debug, Args)]
pub struct VideoArgs {
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 16)]
    block: usize,
    #[arg(long, default_value_t = 7)]
    search: usize,
    #[arg(long)]
    no_motion: bool,
    /// Directory for per-frame motion field CSVs.
    #[arg(long)]
    motion_dir: Option<PathBuf>,
}

fn parse_band(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [start, width] => Ok((
            start
                .trim()
                .parse()
                .map_err(|e| format!("band start: {e}"))?,
            width
                .trim()
                .parse()
                .map_err(|e| format!("band width: {e}"))?,
        )),
        _ => Err("expected start,width".into()),
    }
}

fn parse_blotches(s: &str) -> Result<(usize, u32, u32), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let count = parts[0].parse().map_err(|e| format!("blotch count: {e}"))?;
    match parts.as_slice() {
        [_] => Ok((count, 2, 6)),
        [_, lo, hi] => Ok((
            count,
            lo.parse().map_err(|e| format!("blotch rmin: {e}"))?,
            hi.parse().map_err(|e| format!("blotch rmax: {e}"))?,
        )),
        _ => Err("expected count or count,rmin,rmax".into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Degrade(a) => commands::degrade(&a),
        Command::Restore(a) => commands::restore(&a),
        Command::Metrics(a) => commands::metrics(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Homomorphic(a) => commands::homomorphic(&a),
        Command::VideoDenoise(a) => commands::video_denoise(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imrestore: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
