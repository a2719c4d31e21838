use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seedseg_core::batch::{read_images_csv, write_truth_csv};
use seedseg_core::synth::{parse_background, BLUE_BACKGROUNDS};
use seedseg_core::{
    check_images_csv, count_seeds, generate_pair, generate_scene, label_components, load_image,
    process_folder, save_mask, save_rgb, segment_dim, write_report, Connectivity, Error,
    ImageStatus, ReportFormat, SceneSpec, SegmentationParams,
};

const WORKERS_ENV: &str = "SEEDSEG_WORKERS";

/// Seed segmentation on blue scanner backgrounds.
#[derive(Debug, Parser)]
#[command(name = "seedseg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment every image in a folder and write masks, overlays and a report.
    Segment(SegmentArgs),
    /// Generate synthetic scenes (or white/black pairs) with a truth.csv.
    Synth(SynthArgs),
    /// Segment a white/black background pair with the double-scan baseline.
    Dim(DimArgs),
    /// Compare images.csv seed counts with a filename,count reference.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 170.0)]
    hue_lo: f64,
    #[arg(long, default_value_t = 260.0)]
    hue_hi: f64,
    #[arg(long = "min-br-diff", default_value_t = 20)]
    min_br_diff: u8,
    /// Defaults to exactly 1/3.
    #[arg(long)]
    noise_ratio: Option<f64>,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(4..=8))]
    connectivity: u8,
    #[arg(long, default_value_t = 400.0)]
    dpi: f64,
    /// Disable the edge-based auto crop.
    #[arg(long)]
    no_crop: bool,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    report: String,
    /// Worker threads (default: all cores). SEEDSEG_WORKERS takes precedence.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    output: PathBuf,
    /// Number of scenes (or pairs).
    #[arg(long)]
    count: usize,
    /// Seeds per scene: `K`, or `MIN-MAX` for a per-scene draw.
    #[arg(long, value_parser = parse_range)]
    seeds_per_image: (usize, usize),
    /// light|mediumlight|mediumdark|dark|R,G,B
    #[arg(long, required_unless_present = "pairs")]
    background: Option<String>,
    /// Scene size as WxH.
    #[arg(long, value_parser = parse_size)]
    size: (u32, u32),
    #[arg(long)]
    rng_seed: u64,
    /// Write white/black background pairs instead of blue scenes.
    #[arg(long)]
    pairs: bool,
    /// Translation of the black scan, DX,DY.
    #[arg(long, requires = "pairs", value_parser = parse_shift, allow_hyphen_values = true, default_value = "0,0")]
    shift: (i32, i32),
    /// Dust specks per scene.
    #[arg(long, default_value_t = 13)]
    dust: usize,
    /// Probability of an interior hole per seed.
    #[arg(long, default_value_t = 0.3)]
    hole_prob: f64,
    /// Semi-axis range MIN,MAX in pixels.
    #[arg(long, value_parser = parse_axes, default_value = "10,16")]
    axes: (f64, f64),
}

#[derive(Debug, Args)]
struct DimArgs {
    #[arg(long)]
    white: PathBuf,
    #[arg(long)]
    black: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// images.csv written by `seedseg segment`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    let (lo, hi) = match s.split_once('-') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let k = parse(s)?;
            (k, k)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: u32 = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    if w == 0 || h == 0 {
        return Err("size must be at least 1x1".into());
    }
    Ok((w, h))
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String>
where
    T::Err: std::fmt::Display,
{
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<T>().map_err(|e| format!("{v:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_shift(s: &str) -> Result<(i32, i32), String> {
    parse_pair(s)
}

fn parse_axes(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

/// Usage problems exit 1, empty inputs 3, everything else is treated as I/O (2).
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) => 1,
        Error::EmptyFolder(_) | Error::EmptyInput | Error::NoForeground => 3,
        _ => 2,
    }
}

fn workers(flag: Option<usize>) -> Result<Option<usize>, Error> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParams(format!("{WORKERS_ENV}={v:?} is not a number"))),
        _ => Ok(flag),
    }
}

fn run_segment(a: SegmentArgs) -> Result<(), Error> {
    let defaults = SegmentationParams::default();
    let params = SegmentationParams {
        hue_lo: a.hue_lo,
        hue_hi: a.hue_hi,
        min_b_minus_r: a.min_br_diff,
        noise_ratio: a.noise_ratio.unwrap_or(defaults.noise_ratio),
        connectivity: Connectivity::try_from(a.connectivity)?,
        auto_crop: !a.no_crop,
        dpi: a.dpi,
        ..defaults
    };
    let format: ReportFormat = a.report.parse()?;
    let report = process_folder(&a.input, &a.output, &params, workers(a.workers)?)?;
    write_report(&report, format, &a.output)?;
    for r in &report.reports {
        if let ImageStatus::Skipped(reason) = &r.status {
            eprintln!("skipped {}: {reason}", r.filename);
        }
    }
    println!(
        "{} images: {} ok, {} skipped; mean {:.1} ms/image, total {:.1} ms",
        report.total_images,
        report.total_ok,
        report.total_skipped,
        report.mean_elapsed_ms,
        report.total_elapsed_ms
    );
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::OutputIo {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    })
}

fn run_synth(a: SynthArgs) -> Result<(), Error> {
    create_dir(&a.output)?;
    let background = match &a.background {
        Some(s) => Some(parse_background(s)?),
        None => None,
    };
    let prefix = match &a.background {
        _ if a.pairs => "pair".to_string(),
        Some(s) => {
            let lower = s.trim().to_ascii_lowercase();
            if BLUE_BACKGROUNDS.iter().any(|(n, _)| *n == lower) {
                lower
            } else {
                "scene".to_string()
            }
        }
        None => "scene".to_string(),
    };
    // per-scene seed counts come from their own stream so scenes stay reproducible
    let mut counts = ChaCha8Rng::seed_from_u64(a.rng_seed ^ 0x5eed_c0de);
    let mut truth = Vec::with_capacity(a.count);
    for i in 0..a.count {
        let (lo, hi) = a.seeds_per_image;
        let spec = SceneSpec {
            width: a.size.0,
            height: a.size.1,
            n_seeds: counts.random_range(lo..=hi),
            axis_range: a.axes,
            n_dust: a.dust,
            hole_prob: a.hole_prob,
            rng_seed: a.rng_seed.wrapping_add(i as u64),
            ..Default::default()
        };
        let stem = format!("{prefix}_{i:04}");
        if a.pairs {
            let (white, black, t) = generate_pair(&spec, a.shift)?;
            save_rgb(&white, a.output.join(format!("{stem}_white.png")))?;
            save_rgb(&black, a.output.join(format!("{stem}_black.png")))?;
            truth.push((stem, t.count));
        } else {
            let bg = background.expect("required unless --pairs");
            let (img, t) = generate_scene(&spec, bg)?;
            let name = format!("{stem}.png");
            save_rgb(&img, a.output.join(&name))?;
            truth.push((name, t.count));
        }
    }
    write_truth_csv(a.output.join("truth.csv"), &truth)?;
    println!("wrote {} scenes to {}", a.count, a.output.display());
    Ok(())
}

fn run_dim(a: DimArgs) -> Result<(), Error> {
    let white = load_image(&a.white)?;
    let black = load_image(&a.black)?;
    let params = SegmentationParams::default();
    let r = segment_dim(&white, &black, &params)?;
    create_dir(&a.output)?;
    let stem = a.white.file_stem().unwrap_or_default().to_string_lossy();
    let path = a.output.join(format!("{stem}_dim_mask.png"));
    save_mask(&r.mask, &path)?;
    let count = count_seeds(&label_components(&r.mask, params.connectivity));
    println!("threshold: {}", r.threshold);
    println!("overlap_score: {:.4}", r.overlap_score);
    println!("seed_count: {count}");
    println!("elapsed_ms: {:.4}", r.elapsed * 1e3);
    Ok(())
}

fn run_check(a: CheckArgs) -> Result<(), Error> {
    let cmp = check_images_csv(&a.report, &a.truth)?;
    println!("images: {}", cmp.n_images);
    println!("success: {} ({:.2}%)", cmp.n_success, cmp.success_pct);
    println!("errors: {} ({:.2}%)", cmp.n_error, cmp.error_pct);
    if !cmp.mismatched_indices.is_empty() {
        let rows = read_images_csv(&a.report)?;
        let ok: Vec<_> = rows
            .iter()
            .filter(|r| r.status == ImageStatus::Ok)
            .collect();
        for &i in &cmp.mismatched_indices {
            println!("mismatch: {} ({} seeds)", ok[i].filename, ok[i].seed_count);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Segment(a) => run_segment(a),
        Command::Synth(a) => run_synth(a),
        Command::Dim(a) => run_dim(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
