//! Seed segmentation on blue scanner backgrounds.
//!
//! A scan of seeds lying on a blue tray is split into seeds and background
//! by classifying every pixel jointly in RGB and HSB: a pixel is background
//! when blue is its strongest channel, blue exceeds red by a margin, and its
//! hue sits in a blue band. The resulting mask is hole-filled, and any
//! component smaller than a fixed fraction of the largest one is dropped as
//! dust. Survivors are counted and measured.
//!
//! ```no_run
//! use seedseg_core::{analyze_image, load_image, SegmentationParams};
//!
//! let scan = load_image("scans/sample_001.jpg")?;
//! let analysis = analyze_image(&scan, &SegmentationParams::default())?;
//! println!("{} seeds", analysis.seeds.len());
//! # Ok::<(), seedseg_core::Error>(())
//! ```
//!
//! Besides the single-image pipeline the crate carries a white/black
//! double-scan baseline ([`dim`]), a synthetic scene generator with exact
//! ground truth ([`synth`]) and folder-level batch processing ([`batch`]).

pub mod batch;
pub mod color;
pub mod dim;
pub mod error;
pub mod io;
pub mod params;
pub mod raster;
pub mod regions;
pub mod segment;
pub mod synth;

pub use batch::{
    analyze_image, check_images_csv, process_folder, run_count_check, write_report, Analysis,
    BatchReport, ImageReport, ImageStatus, ReportFormat,
};
pub use color::{content_bbox, crop, hsb_to_rgb, rgb_to_hsb, sobel_edges, to_grayscale, HsbColor};
pub use dim::{otsu_threshold, segment_dim, DimResult};
pub use error::{Error, Result};
pub use io::{load_image, load_mask, save_mask, save_rgb};
pub use params::{Connectivity, SegmentationParams};
pub use raster::{overlay, BinaryMask, GrayImage, Rect, Rgb, RgbImage};
pub use regions::{
    compare_counts, component_stats, count_seeds, label_components, CountComparison, LabelMap,
    Point, SeedRecord,
};
pub use segment::{
    blue_mask, fill_holes, is_blue_background, remove_noise, segment, SegmentationResult,
};
pub use synth::{generate_pair, generate_scene, GroundTruth, SceneSpec};
