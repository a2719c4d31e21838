//! Folder-level batch processing and the CSV/JSON report files.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::crop;
use crate::error::{Error, Result};
use crate::io::{is_supported_image, load_image, save_mask, save_rgb};
use crate::params::SegmentationParams;
use crate::raster::{overlay, BinaryMask, Rect, RgbImage};
use crate::regions::{
    compare_counts, component_stats, label_components, CountComparison, SeedRecord,
};
use crate::segment::{segment, SegmentationResult};

pub const IMAGES_CSV: &str = "images.csv";
pub const SEEDS_CSV: &str = "seeds.csv";
pub const REPORT_JSON: &str = "report.json";

/// Whether an image made it through the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ImageStatus {
    Ok,
    /// Carries the error kind, e.g. `CorruptImage`.
    Skipped(String),
}

impl fmt::Display for ImageStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageStatus::Ok => f.write_str("ok"),
            ImageStatus::Skipped(reason) => write!(f, "skipped({reason})"),
        }
    }
}

impl FromStr for ImageStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "ok" {
            return Ok(ImageStatus::Ok);
        }
        s.strip_prefix("skipped(")
            .and_then(|r| r.strip_suffix(')'))
            .map(|r| ImageStatus::Skipped(r.to_string()))
            .ok_or_else(|| format!("unknown image status {s:?}"))
    }
}

impl From<ImageStatus> for String {
    fn from(s: ImageStatus) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for ImageStatus {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageReport {
    pub filename: String,
    pub width: u32,
    pub height: u32,
    pub seed_count: usize,
    /// Segmentation plus feature extraction, milliseconds.
    pub elapsed_ms: f64,
    pub seeds: Vec<SeedRecord>,
    pub status: ImageStatus,
}

impl ImageReport {
    fn skipped(filename: String, err: &Error) -> Self {
        Self {
            filename,
            width: 0,
            height: 0,
            seed_count: 0,
            elapsed_ms: 0.0,
            seeds: Vec::new(),
            status: ImageStatus::Skipped(err.kind().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    /// Sorted by filename.
    pub reports: Vec<ImageReport>,
    pub total_images: usize,
    pub total_ok: usize,
    pub total_skipped: usize,
    /// Mean `elapsed_ms` over the images that were processed.
    pub mean_elapsed_ms: f64,
    /// Sum over images of their full processing time, file I/O included.
    pub total_elapsed_ms: f64,
    /// Wall time of the whole batch.
    pub wall_elapsed_ms: f64,
    pub params: SegmentationParams,
}

impl BatchReport {
    pub fn new(
        reports: Vec<ImageReport>,
        total_elapsed_ms: f64,
        wall_elapsed_ms: f64,
        params: SegmentationParams,
    ) -> Self {
        let total_ok = reports
            .iter()
            .filter(|r| r.status == ImageStatus::Ok)
            .count();
        let ok_ms: f64 = reports
            .iter()
            .filter(|r| r.status == ImageStatus::Ok)
            .map(|r| r.elapsed_ms)
            .sum();
        Self {
            total_images: reports.len(),
            total_ok,
            total_skipped: reports.len() - total_ok,
            mean_elapsed_ms: if total_ok == 0 {
                0.0
            } else {
                ok_ms / total_ok as f64
            },
            total_elapsed_ms,
            wall_elapsed_ms,
            params,
            reports,
        }
    }
}

/// Result of running the pipeline on one in-memory scan.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub segmentation: SegmentationResult,
    /// Seed records in scan coordinates.
    pub seeds: Vec<SeedRecord>,
    /// Segmentation plus feature extraction, milliseconds.
    pub elapsed_ms: f64,
}

impl Analysis {
    /// The segmentation mask placed back into the full scan frame.
    pub fn full_mask(&self, width: u32, height: u32) -> Result<BinaryMask> {
        self.segmentation
            .mask
            .embed(self.segmentation.crop_rect, width, height)
    }
}

/// Segments a scan and measures every seed.
pub fn analyze_image(img: &RgbImage, params: &SegmentationParams) -> Result<Analysis> {
    let start = Instant::now();
    let segmentation = segment(img, params)?;
    let rect = segmentation.crop_rect;
    let labels = label_components(&segmentation.mask, params.connectivity);
    let mut seeds = if rect == Rect::full(img.width(), img.height()) {
        component_stats(&labels, img, params.dpi)?
    } else {
        component_stats(&labels, &crop(img, rect)?, params.dpi)?
    };
    for s in &mut seeds {
        s.translate(rect.x, rect.y);
    }
    Ok(Analysis {
        segmentation,
        seeds,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Supported images directly inside `dir`, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::InputDirNotFound(dir.to_path_buf()));
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && is_supported_image(&path) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Output stem per input: the file stem, or the whole file name when two
/// inputs share a stem (`a.png` and `a.jpg`).
fn output_stems(files: &[PathBuf]) -> Vec<String> {
    let stem = |p: &PathBuf| {
        p.file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned()
    };
    let mut seen = HashSet::new();
    let clash = files.iter().any(|p| !seen.insert(stem(p)));
    files
        .iter()
        .map(|p| {
            if clash {
                p.file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .replace('.', "_")
            } else {
                stem(p)
            }
        })
        .collect()
}

fn output_err(path: &Path, e: Error) -> Error {
    Error::OutputIo {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn process_one(
    path: &Path,
    stem: &str,
    out_dir: &Path,
    params: &SegmentationParams,
) -> Result<(ImageReport, f64)> {
    let start = Instant::now();
    let filename = path
        .file_name()
        .unwrap_or_default()
        .to_string_lossy()
        .into_owned();
    let img = match load_image(path) {
        Ok(img) => img,
        Err(e) => {
            return Ok((
                ImageReport::skipped(filename, &e),
                start.elapsed().as_secs_f64() * 1e3,
            ))
        }
    };
    let analysis = analyze_image(&img, params)?;
    let (w, h) = img.dimensions();
    let mask = analysis.full_mask(w, h)?;

    let mask_path = out_dir.join(format!("{stem}_mask.png"));
    save_mask(&mask, &mask_path).map_err(|e| output_err(&mask_path, e))?;
    let overlay_path = out_dir.join(format!("{stem}_overlay.png"));
    save_rgb(&overlay(&img, &mask)?, &overlay_path).map_err(|e| output_err(&overlay_path, e))?;

    let report = ImageReport {
        filename,
        width: w,
        height: h,
        seed_count: analysis.seeds.len(),
        elapsed_ms: analysis.elapsed_ms,
        seeds: analysis.seeds,
        status: ImageStatus::Ok,
    };
    Ok((report, start.elapsed().as_secs_f64() * 1e3))
}

/// Segments every supported image in `in_dir` (non-recursive) and writes a
/// mask and an overlay PNG per image into `out_dir`. Unreadable images are
/// recorded as skipped. `workers = None` uses all available cores.
pub fn process_folder(
    in_dir: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
    params: &SegmentationParams,
    workers: Option<usize>,
) -> Result<BatchReport> {
    let (in_dir, out_dir) = (in_dir.as_ref(), out_dir.as_ref());
    params.validate()?;
    let wall = Instant::now();
    let files = list_images(in_dir)?;
    if files.is_empty() {
        return Err(Error::EmptyFolder(in_dir.to_path_buf()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::OutputIo {
        path: out_dir.to_path_buf(),
        reason: e.to_string(),
    })?;
    let stems = output_stems(&files);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(ImageReport, f64)> = pool.install(|| {
        files
            .par_iter()
            .zip(stems.par_iter())
            .map(|(path, stem)| process_one(path, stem, out_dir, params))
            .collect::<Result<_>>()
    })?;

    let total_ms = results.iter().map(|(_, ms)| ms).sum();
    let reports = results.into_iter().map(|(r, _)| r).collect();
    Ok(BatchReport::new(
        reports,
        total_ms,
        wall.elapsed().as_secs_f64() * 1e3,
        *params,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidParams(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::OutputIo {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

fn write_csv(report: &BatchReport, dir: &Path) -> Result<()> {
    let images_path = dir.join(IMAGES_CSV);
    let mut images = csv_writer(&images_path)?;
    images
        .write_record([
            "filename",
            "width",
            "height",
            "seed_count",
            "elapsed_ms",
            "status",
        ])
        .map_err(|e| csv_err(&images_path, e))?;
    for r in &report.reports {
        images
            .write_record([
                r.filename.clone(),
                r.width.to_string(),
                r.height.to_string(),
                r.seed_count.to_string(),
                f4(r.elapsed_ms),
                r.status.to_string(),
            ])
            .map_err(|e| csv_err(&images_path, e))?;
    }
    images.flush().map_err(|e| Error::io(&images_path, e))?;

    let seeds_path = dir.join(SEEDS_CSV);
    let mut seeds = csv_writer(&seeds_path)?;
    seeds
        .write_record([
            "filename",
            "seed_id",
            "area_px",
            "area_mm2",
            "perimeter_px",
            "centroid_x",
            "centroid_y",
            "bbox_x",
            "bbox_y",
            "bbox_w",
            "bbox_h",
            "mean_r",
            "mean_g",
            "mean_b",
            "mean_h",
            "mean_s",
            "mean_bri",
        ])
        .map_err(|e| csv_err(&seeds_path, e))?;
    for r in &report.reports {
        for s in &r.seeds {
            seeds
                .write_record([
                    r.filename.clone(),
                    s.seed_id.to_string(),
                    s.area_px.to_string(),
                    f4(s.area_mm2),
                    s.perimeter_px.to_string(),
                    f4(s.centroid.x),
                    f4(s.centroid.y),
                    s.bbox.x.to_string(),
                    s.bbox.y.to_string(),
                    s.bbox.w.to_string(),
                    s.bbox.h.to_string(),
                    f4(s.mean_rgb[0]),
                    f4(s.mean_rgb[1]),
                    f4(s.mean_rgb[2]),
                    f4(s.mean_hsb.h),
                    f4(s.mean_hsb.s),
                    f4(s.mean_hsb.b),
                ])
                .map_err(|e| csv_err(&seeds_path, e))?;
        }
    }
    seeds.flush().map_err(|e| Error::io(&seeds_path, e))
}

fn round_floats(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round4)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Writes the report into the existing directory `dir`: `images.csv` and
/// `seeds.csv` for CSV, `report.json` for JSON. Measured floats carry 4 decimals.
pub fn write_report(
    report: &BatchReport,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "report directory does not exist",
            ),
        ));
    }
    match format {
        ReportFormat::Csv => write_csv(report, dir),
        ReportFormat::Json => {
            let path = dir.join(REPORT_JSON);
            let mut value = serde_json::to_value(report).map_err(|e| Error::OutputIo {
                path: path.clone(),
                reason: e.to_string(),
            })?;
            // measurements are rounded, parameters are kept exact so they can be reused
            if let serde_json::Value::Object(map) = &mut value {
                for (key, v) in map.iter_mut() {
                    if key != "params" {
                        round_floats(v);
                    }
                }
            }
            let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
            text.push('\n');
            fs::write(&path, text).map_err(|e| Error::io(&path, e))
        }
    }
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<BatchReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// One row of `images.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRow {
    pub filename: String,
    pub width: u32,
    pub height: u32,
    pub seed_count: usize,
    pub elapsed_ms: f64,
    pub status: ImageStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TruthRow {
    filename: String,
    count: usize,
}

fn parse_err(path: &Path, e: impl fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| parse_err(path, e))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| parse_err(path, e))
}

pub fn read_images_csv(path: impl AsRef<Path>) -> Result<Vec<ImageRow>> {
    read_rows(path.as_ref())
}

/// Reads a `filename,count` reference table.
pub fn read_truth_csv(path: impl AsRef<Path>) -> Result<HashMap<String, usize>> {
    let rows: Vec<TruthRow> = read_rows(path.as_ref())?;
    Ok(rows.into_iter().map(|r| (r.filename, r.count)).collect())
}

pub fn write_truth_csv(path: impl AsRef<Path>, rows: &[(String, usize)]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["filename", "count"])
        .map_err(|e| csv_err(path, e))?;
    for (name, count) in rows {
        w.write_record([name.as_str(), &count.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn join_with_truth<'a>(
    counts: impl Iterator<Item = (&'a str, usize)>,
    truth: &HashMap<String, usize>,
) -> Result<CountComparison> {
    let (mut auto, mut reference) = (Vec::new(), Vec::new());
    for (name, count) in counts {
        let t = truth
            .get(name)
            .ok_or_else(|| Error::MissingTruthRow(name.to_string()))?;
        auto.push(count);
        reference.push(*t);
    }
    compare_counts(&auto, &reference)
}

/// Compares the seed counts of every processed image with a reference table.
pub fn run_count_check(
    report: &BatchReport,
    truth_csv: impl AsRef<Path>,
) -> Result<CountComparison> {
    let truth = read_truth_csv(truth_csv)?;
    join_with_truth(
        report
            .reports
            .iter()
            .filter(|r| r.status == ImageStatus::Ok)
            .map(|r| (r.filename.as_str(), r.seed_count)),
        &truth,
    )
}

/// Same as [`run_count_check`], reading the counts back from `images.csv`.
pub fn check_images_csv(
    images_csv: impl AsRef<Path>,
    truth_csv: impl AsRef<Path>,
) -> Result<CountComparison> {
    let rows = read_images_csv(images_csv)?;
    let truth = read_truth_csv(truth_csv)?;
    join_with_truth(
        rows.iter()
            .filter(|r| r.status == ImageStatus::Ok)
            .map(|r| (r.filename.as_str(), r.seed_count)),
        &truth,
    )
}
