use std::path::{Path, PathBuf};

use imrestore::baselines::{adaptive_median, cwmf, smf, tsmf};
use imrestore::degrade::{DegradationMask, DegradationSpec};
use imrestore::freqdomain::{homomorphic_enhance, TransferSpec};
use imrestore::metrics::{format_value, MetricsReport};
use imrestore::pgm::{read_pgm_file, write_pgm_file};
use imrestore::restore::{ndb_restore, DecisionCase, Replacement, RestoreConfig};
use imrestore::video::{
    estimate_sequence_motion, read_frame_dir, temporal_median_denoise, write_frame_dir,
};
use imrestore::{Image, WindowSize};

use crate::{
    ArtifactArgs, BenchArgs, DegradeArgs, FilterId, FilterParams, HomomorphicArgs, MetricsArgs,
    RestoreArgs, VideoArgs,
};

pub const CSV_HEADER: &str = "filter,density,mse,psnr_db,snri_db,pona_pct,posp_pct";
const TRACE_HEADER: &str = "case1,case2,case3,case4,median3,median5,mean_uncorrupted,fallback";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] imrestore::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Data(_) => 2,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_image(path: &Path) -> CliResult<Image> {
    read_pgm_file(path).map_err(io_err(path))
}

fn write_image(path: &Path, img: &Image) -> CliResult {
    write_pgm_file(path, img).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(io_err(path))
}

fn emit_csv(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn degradation_spec(impulse: f64, artifacts: &ArtifactArgs, seed: u64) -> DegradationSpec {
    let (blotches, rmin, rmax) = artifacts.blotches.unwrap_or((0, 2, 6));
    DegradationSpec {
        impulse_density: impulse,
        drop_lines: artifacts.drop_lines,
        strip_lines: artifacts.strip_lines,
        band: artifacts.band,
        blotches,
        blotch_radius: (rmin, rmax),
        gaussian_sigma: artifacts.gaussian,
        seed,
    }
}

fn apply_degradation(
    img: &Image,
    spec: &DegradationSpec,
    artifacts: &ArtifactArgs,
) -> CliResult<(Image, DegradationMask)> {
    if !artifacts.vertical {
        return Ok(spec.apply(img)?);
    }
    let (noisy, mask) = spec.apply(&img.transposed())?;
    Ok((
        noisy.transposed(),
        DegradationMask::from_image(&mask.to_image().transposed()),
    ))
}

pub fn degrade(args: &DegradeArgs) -> CliResult {
    let img = read_image(&args.input)?;
    let spec = degradation_spec(args.impulse, &args.artifacts, args.seed);
    let (noisy, mask) = apply_degradation(&img, &spec, &args.artifacts)?;
    write_image(&args.out, &noisy)?;
    if let Some(path) = &args.mask {
        write_image(path, &mask.to_image())?;
    }
    Ok(())
}

pub fn run_filter(img: &Image, filter: FilterId, params: &FilterParams) -> CliResult<Image> {
    Ok(match filter {
        FilterId::Ndb => ndb_restore(img, &RestoreConfig::default())?.0,
        FilterId::Smf3 => smf(img, WindowSize::Three),
        FilterId::Smf5 => smf(img, WindowSize::Five),
        FilterId::Cwmf => cwmf(img, params.center_weight)?,
        FilterId::Tsmf => tsmf(img, params.threshold, params.center_weight)?,
        FilterId::Amf => adaptive_median(img, params.max_window)?,
    })
}

pub fn restore(args: &RestoreArgs) -> CliResult {
    let img = read_image(&args.input)?;
    if args.filter != FilterId::Ndb {
        if args.trace.is_some() {
            return Err(CliError::Usage(
                "--trace is only available with --filter ndb".into(),
            ));
        }
        let out = run_filter(&img, args.filter, &args.params)?;
        return write_image(&args.out, &out);
    }
    let (out, trace) = ndb_restore(&img, &RestoreConfig::default())?;
    write_image(&args.out, &out)?;
    if let Some(path) = &args.trace {
        let counts = [
            trace.case_count(DecisionCase::Unaltered),
            trace.case_count(DecisionCase::Sparse),
            trace.case_count(DecisionCase::Moderate),
            trace.case_count(DecisionCase::Dense),
            trace.source_count(Replacement::Median3),
            trace.source_count(Replacement::Median5),
            trace.source_count(Replacement::MeanUncorrupted),
            trace.source_count(Replacement::Fallback),
        ];
        let row: Vec<String> = counts.iter().map(usize::to_string).collect();
        write_text(path, &format!("{TRACE_HEADER}\n{}\n", row.join(",")))?;
    }
    Ok(())
}

fn csv_row(filter: &str, density: f64, r: &MetricsReport) -> String {
    format!(
        "{filter},{},{},{},{},{},{}\n",
        format_value(Some(density)),
        format_value(Some(r.mse)),
        format_value(Some(r.psnr_db)),
        format_value(r.snri_db),
        format_value(r.pona_pct),
        format_value(r.posp_pct),
    )
}

pub fn metrics(args: &MetricsArgs) -> CliResult {
    let original = read_image(&args.original)?;
    let noisy = read_image(&args.noisy)?;
    let restored = read_image(&args.restored)?;
    let mask = DegradationMask::from_image(&read_image(&args.mask)?);
    let report = MetricsReport::compute(&original, &noisy, &restored, &mask)?;
    let density = args
        .density
        .unwrap_or_else(|| mask.count() as f64 / original.len() as f64);
    let text = format!("{CSV_HEADER}\n{}", csv_row(&args.label, density, &report));
    emit_csv(args.out.as_deref(), &text)
}

pub fn bench(args: &BenchArgs) -> CliResult {
    if let Some(d) = args.densities.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
        return Err(CliError::Usage(format!("density {d} outside (0, 1]")));
    }
    let img = read_image(&args.input)?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for (index, &density) in args.densities.iter().enumerate() {
        let spec = degradation_spec(density, &args.artifacts, args.seed ^ index as u64);
        let (noisy, mask) = apply_degradation(&img, &spec, &args.artifacts)?;
        // filters run concurrently on the shared input, rows keep grid order
        let rows: Vec<CliResult<String>> = std::thread::scope(|s| {
            let handles: Vec<_> = args
                .filters
                .iter()
                .map(|&f| {
                    let (img, noisy, mask) = (&img, &noisy, &mask);
                    s.spawn(move || -> CliResult<String> {
                        let restored = run_filter(noisy, f, &args.params)?;
                        let report = MetricsReport::compute(img, noisy, &restored, mask)?;
                        Ok(csv_row(f.name(), density, &report))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("filter thread panicked"))
                .collect()
        });
        for row in rows {
            text.push_str(&row?);
        }
    }
    emit_csv(args.out.as_deref(), &text)
}

pub fn homomorphic(args: &HomomorphicArgs) -> CliResult {
    let img = read_image(&args.input)?;
    let t = TransferSpec::HomomorphicEmphasis {
        cutoff: args.cutoff,
        gamma_low: args.gamma_l,
        gamma_high: args.gamma_h,
        sharpness: args.sharpness,
    };
    let out = homomorphic_enhance(&img, &t)?;
    write_image(&args.out, &out)
}

pub fn video_denoise(args: &VideoArgs) -> CliResult {
    let seq = read_frame_dir(&args.frames).map_err(io_err(&args.frames))?;
    let motion = if args.no_motion {
        None
    } else {
        Some(estimate_sequence_motion(&seq, args.block, args.search)?)
    };
    let out = temporal_median_denoise(&seq, motion.as_deref())?;
    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    write_frame_dir(&args.out, &out).map_err(io_err(&args.out))?;

    if let (Some(dir), Some(fields)) = (&args.motion_dir, &motion) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (i, (back, fwd)) in fields.iter().enumerate() {
            // frame files are numbered from 1, and field i belongs to frame i + 1
            let frame = i + 2;
            for (tag, field) in [("prev", back), ("next", fwd)] {
                let path = dir.join(format!("motion_{frame:04}_{tag}.csv"));
                write_text(&path, &field.to_csv())?;
            }
        }
    }
    Ok(())
}
