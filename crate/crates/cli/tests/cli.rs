use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn seedseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedseg"))
        .args(args)
        .env_remove("SEEDSEG_WORKERS")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, count: &str, seeds: &str) {
    let out = seedseg(&[
        "synth",
        "--output",
        p(dir),
        "--count",
        count,
        "--seeds-per-image",
        seeds,
        "--background",
        "mediumdark",
        "--size",
        "300x200",
        "--rng-seed",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_segment_check_round_trip() {
    let tmp = TempDir::new().unwrap();
    let (scenes, out) = (tmp.path().join("scenes"), tmp.path().join("out"));
    synth(&scenes, "3", "2-9");
    assert!(scenes.join("mediumdark_0002.png").is_file());

    let seg = seedseg(&[
        "segment",
        "--input",
        p(&scenes),
        "--output",
        p(&out),
        "--workers",
        "2",
    ]);
    assert_eq!(seg.status.code(), Some(0));
    assert!(out.join("mediumdark_0000_mask.png").is_file());
    assert!(out.join("mediumdark_0000_overlay.png").is_file());

    let check = seedseg(&[
        "check",
        "--report",
        p(&out.join("images.csv")),
        "--truth",
        p(&scenes.join("truth.csv")),
    ]);
    assert_eq!(check.status.code(), Some(0));
    let text = String::from_utf8(check.stdout).unwrap();
    assert!(text.contains("success: 3 (100.00%)"), "{text}");
}

#[test]
fn json_report_option() {
    let tmp = TempDir::new().unwrap();
    let (scenes, out) = (tmp.path().join("scenes"), tmp.path().join("out"));
    synth(&scenes, "1", "4");
    let seg = seedseg(&[
        "segment",
        "--input",
        p(&scenes),
        "--output",
        p(&out),
        "--report",
        "json",
        "--connectivity",
        "4",
        "--no-crop",
        "--dpi",
        "600",
    ]);
    assert_eq!(seg.status.code(), Some(0));
    let json: String = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(json.contains("\"connectivity\": 4"));
    assert!(json.contains("\"auto_crop\": false"));
    assert!(!out.join("images.csv").exists());
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = p(tmp.path());

    assert_eq!(
        seedseg(&["segment", "--input", p(&empty), "--output", out])
            .status
            .code(),
        Some(3)
    );
    let missing = tmp.path().join("missing");
    assert_eq!(
        seedseg(&["segment", "--input", p(&missing), "--output", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        seedseg(&["segment", "--output", out]).status.code(),
        Some(1)
    );
    assert_eq!(seedseg(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        seedseg(&[
            "segment",
            "--input",
            p(&empty),
            "--output",
            out,
            "--noise-ratio",
            "1.5"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(seedseg(&["--help"]).status.code(), Some(0));
    assert_eq!(seedseg(&["--version"]).status.code(), Some(0));
}

#[test]
fn corrupt_file_does_not_fail_the_batch() {
    let tmp = TempDir::new().unwrap();
    let (scenes, out) = (tmp.path().join("scenes"), tmp.path().join("out"));
    synth(&scenes, "2", "3");
    fs::write(scenes.join("zz_broken.png"), "nope").unwrap();
    let seg = seedseg(&["segment", "--input", p(&scenes), "--output", p(&out)]);
    assert_eq!(seg.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("images.csv")).unwrap();
    assert!(csv
        .lines()
        .last()
        .unwrap()
        .ends_with("skipped(CorruptImage)"));
}

#[test]
fn workers_env_overrides_flag() {
    let tmp = TempDir::new().unwrap();
    let (scenes, out) = (tmp.path().join("scenes"), tmp.path().join("out"));
    synth(&scenes, "1", "3");
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_seedseg"))
            .args([
                "segment",
                "--input",
                p(&scenes),
                "--output",
                p(&out),
                "--workers",
                "2",
            ])
            .env("SEEDSEG_WORKERS", env)
            .output()
            .unwrap()
    };
    assert_eq!(run("1").status.code(), Some(0));
    // an invalid override wins over a valid flag, so it must be rejected
    assert_eq!(run("lots").status.code(), Some(1));
}

#[test]
fn dim_pair() {
    let tmp = TempDir::new().unwrap();
    let (pairs, out) = (tmp.path().join("pairs"), tmp.path().join("out"));
    let gen = seedseg(&[
        "synth",
        "--output",
        p(&pairs),
        "--count",
        "1",
        "--seeds-per-image",
        "6",
        "--size",
        "300x200",
        "--rng-seed",
        "2",
        "--pairs",
        "--shift",
        "-4,3",
    ]);
    assert_eq!(
        gen.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&gen.stderr)
    );
    let white = pairs.join("pair_0000_white.png");
    let black = pairs.join("pair_0000_black.png");
    let dim = seedseg(&[
        "dim",
        "--white",
        p(&white),
        "--black",
        p(&black),
        "--output",
        p(&out),
    ]);
    assert_eq!(dim.status.code(), Some(0));
    let text = String::from_utf8(dim.stdout).unwrap();
    assert!(text.contains("overlap_score: "), "{text}");
    assert!(out.join("pair_0000_white_dim_mask.png").is_file());

    let same = seedseg(&[
        "dim",
        "--white",
        p(&white),
        "--black",
        p(&white),
        "--output",
        p(&out),
    ]);
    assert_eq!(same.status.code(), Some(3));
    let gone = seedseg(&[
        "dim",
        "--white",
        "nope.png",
        "--black",
        p(&black),
        "--output",
        p(&out),
    ]);
    assert_eq!(gone.status.code(), Some(2));
}
