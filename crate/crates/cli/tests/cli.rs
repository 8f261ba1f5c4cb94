//! End-to-end checks of the `ehyclus` binary: exit codes, file outputs,
//! and byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ehyclus"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ehyclus-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn simulate_then_run_produces_sorted_results() {
    let dir = workdir("simulate-run");
    let sample_dir = dir.join("ds4");
    run_ok(bin()
        .args(["simulate", "--dataset", "ds4", "--seed", "7"])
        .arg("--out")
        .arg(&sample_dir));
    assert!(sample_dir.join("dim1.csv").exists());
    assert!(sample_dir.join("dim2.csv").exists());
    assert!(sample_dir.join("labels.csv").exists());

    let results = dir.join("results.csv");
    run_ok(bin()
        .args([
            "run",
            "--datasets",
            "d.MEIMHI,_d.MEI",
            "--methods",
            "kmeans-euclidean,complete",
            "--seed",
            "3",
            "--deterministic-timing",
        ])
        .arg("--input")
        .arg(&sample_dir)
        .arg("--out")
        .arg(&results));
    let text = std::fs::read_to_string(&results).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "dataset,method,purity,fmeasure,rand_index,time_seconds,replicate,seed"
    );
    assert_eq!(lines.len(), 1 + 4);
    // Sorted by Rand index descending.
    let ris: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert!(ris.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = workdir("rerun");
    let sample_dir = dir.join("ds4");
    run_ok(bin()
        .args(["simulate", "--dataset", "ds4", "--seed", "11"])
        .arg("--out")
        .arg(&sample_dir));
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for out in [&a, &b] {
        run_ok(bin()
            .args([
                "run",
                "--datasets",
                "dd2.MEIMHI",
                "--methods",
                "spc,kkmeans-gaussian",
                "--seed",
                "5",
                "--deterministic-timing",
                "--format",
                "json",
            ])
            .arg("--input")
            .arg(&sample_dir)
            .arg("--out")
            .arg(out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bench_writes_aggregate_table() {
    let dir = workdir("bench");
    let out = dir.join("table.csv");
    let rows = dir.join("rows.csv");
    let output = run_ok(bin()
        .args([
            "bench",
            "--dataset",
            "ds4",
            "--reps",
            "2",
            "--datasets",
            "_d.MEIMHI",
            "--methods",
            "kmeans-euclidean,ward.D2",
            "--seed",
            "2",
            "--deterministic-timing",
        ])
        .arg("--out")
        .arg(&out)
        .arg("--rows-out")
        .arg(&rows));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("top 5 by mean RI"), "{stdout}");

    let table = std::fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().count(), 1 + 2); // two combinations
    assert!(table.starts_with("dataset,method,purity,fmeasure,rand_index,time_seconds,replicates"));
    let rows_text = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(rows_text.lines().count(), 1 + 4); // 2 combinations x 2 reps
}

#[test]
fn weather_run_reproduces_the_complete_linkage_score() {
    let dir = workdir("weather");
    let out = dir.join("weather.csv");
    run_ok(bin()
        .args([
            "run",
            "--input",
            "weather",
            "--datasets",
            "d.MEIMHI",
            "--methods",
            "complete",
            "--k",
            "4",
            "--deterministic-timing",
        ])
        .arg("--out")
        .arg(&out));
    let text = std::fs::read_to_string(&out).unwrap();
    let ri: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert!(ri >= 0.74, "weather RI {ri}");
}

#[test]
fn plot_data_emits_two_columns_plus_label() {
    let dir = workdir("plot");
    let sample_dir = dir.join("ds1");
    run_ok(bin()
        .args(["simulate", "--dataset", "ds1", "--seed", "1"])
        .arg("--out")
        .arg(&sample_dir));
    let out = dir.join("plot.csv");
    run_ok(bin()
        .args(["plot-data", "--dataset-name", "d.MEIMHI"])
        .arg("--input")
        .arg(&sample_dir)
        .arg("--out")
        .arg(&out));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dMEI,dMHI,label");
    assert_eq!(lines.len(), 1 + 100);
}

#[test]
fn config_file_is_applied_and_flags_override() {
    let dir = workdir("config");
    let sample_dir = dir.join("ds4");
    run_ok(bin()
        .args(["simulate", "--dataset", "ds4", "--seed", "4"])
        .arg("--out")
        .arg(&sample_dir));
    let config = dir.join("pipeline.conf");
    std::fs::write(
        &config,
        "# benchmark defaults\ndatasets = d.MEIMHI\nmethods = average\nseed = 9\n",
    )
    .unwrap();
    let out = dir.join("results.csv");
    // --methods on the command line overrides the config file.
    run_ok(bin()
        .args(["run", "--methods", "ward.D2", "--deterministic-timing"])
        .arg("--config")
        .arg(&config)
        .arg("--input")
        .arg(&sample_dir)
        .arg("--out")
        .arg(&out));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("d.MEIMHI,ward.D2,"));
    assert!(!text.contains(",average,"));
}

#[test]
fn unknown_names_exit_one() {
    let dir = workdir("exit1");
    let status = bin()
        .args(["simulate", "--dataset", "ds9", "--seed", "1"])
        .arg("--out")
        .arg(dir.join("x"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));

    let status = bin()
        .args([
            "run",
            "--input",
            "weather",
            "--datasets",
            "d.MEIHI",
            "--k",
            "4",
        ])
        .arg("--out")
        .arg(dir.join("y.csv"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn missing_input_exits_two() {
    let dir = workdir("exit2");
    let status = bin()
        .args(["run", "--input"])
        .arg(dir.join("does-not-exist"))
        .args(["--k", "2"])
        .arg("--out")
        .arg(dir.join("r.csv"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn long_format_round_trips_through_the_cli() {
    let dir = workdir("long");
    let sample = dir.join("s.csv");
    run_ok(bin()
        .args(["simulate", "--dataset", "ds4", "--seed", "2", "--format", "long"])
        .arg("--out")
        .arg(&sample));
    assert!(sample.exists());
    assert!(dir.join("s.labels.csv").exists());
    let out = dir.join("r.csv");
    run_ok(bin()
        .args([
            "run",
            "--input-format",
            "long",
            "--datasets",
            "_.MEIMHI",
            "--methods",
            "single",
            "--deterministic-timing",
        ])
        .arg("--input")
        .arg(&sample)
        .arg("--out")
        .arg(&out));
    assert!(out.exists());
}

fn assert_no_dir(p: &Path) {
    assert!(!p.exists());
}

#[test]
fn unlabeled_input_emits_partitions() {
    let dir = workdir("unlabeled");
    let sample_dir = dir.join("s");
    run_ok(bin()
        .args(["simulate", "--dataset", "ds4", "--seed", "3"])
        .arg("--out")
        .arg(&sample_dir));
    // Strip the labels sidecar to make the sample unlabeled.
    std::fs::remove_file(sample_dir.join("labels.csv")).unwrap();
    assert_no_dir(&sample_dir.join("labels.csv"));

    let out = dir.join("partitions.csv");
    run_ok(bin()
        .args([
            "run",
            "--datasets",
            "d.MEIMHI",
            "--methods",
            "kmeans-euclidean",
            "--k",
            "4",
        ])
        .arg("--input")
        .arg(&sample_dir)
        .arg("--out")
        .arg(&out));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dataset,method,curve,cluster");
    assert_eq!(lines.len(), 1 + 100);
}
