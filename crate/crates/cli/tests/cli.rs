use std::fs;
use std::path::PathBuf;
use std::process::Command;

use allroots::{find_all_roots, DomainGrid, Problem};
use allroots_cli::output::write_csv;
use allroots_cli::{dump_contours, parse_config, read_csv, run_to};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_allroots"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn example_toml(points: usize) -> String {
    format!(
        r#"
equations = ["x1*cos(0.5*x2)", "-x1+0.5*x2^2"]
variables = ["x1", "x2"]
repetitions = 1
[[domain]]
lower = -10
upper = 10
points = {points}
[[domain]]
lower = -10
upper = 10
points = {points}
"#
    )
}

#[test]
fn csv_round_trips_bitwise() {
    let cfg = parse_config(&example_toml(41)).unwrap();
    let mut buf = Vec::new();
    let set = run_to(&cfg, &mut buf, "mem".as_ref()).unwrap();
    let (names, rows) = read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(names, cfg.variables);
    assert_eq!(rows.len(), set.len());
    for ((coords, residual, iterations), s) in rows.iter().zip(&set.solutions) {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(coords), bits(&s.coordinates));
        assert_eq!(residual.to_bits(), s.residual_norm.to_bits());
        assert_eq!(*iterations, s.iterations);
    }
}

#[test]
fn json_lines_round_trip_and_trailer() {
    let mut cfg = parse_config(&example_toml(41)).unwrap();
    cfg.output.format = allroots_cli::OutputFormat::Json;
    let mut buf = Vec::new();
    let set = run_to(&cfg, &mut buf, "mem".as_ref()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), set.len() + 1);
    for (v, s) in lines.iter().zip(&set.solutions) {
        assert_eq!(v["x1"].as_f64().unwrap().to_bits(), s.coordinates[0].to_bits());
        assert_eq!(v["x2"].as_f64().unwrap().to_bits(), s.coordinates[1].to_bits());
    }
    let trailer = &lines.last().unwrap()["trailer"];
    assert_eq!(trailer["solution_count"], set.len());
    assert_eq!(trailer["config"]["mode"], "pairwise");
    assert_eq!(trailer["config"]["domain"][0]["points"], 41);
    assert_eq!(trailer["timing"]["repetitions"], 1);
}

#[test]
fn csv_column_count_is_n_plus_two() {
    let p = Problem::new("q", &["a", "b", "c"], &["a^2-1", "b", "c"]).unwrap();
    let set = find_all_roots(
        &p,
        &allroots::SolverConfig::new(DomainGrid::uniform(3, -2.0, 2.0, 11).unwrap()),
    )
    .unwrap();
    let mut buf = Vec::new();
    let names: Vec<String> = p.variables().names().to_vec();
    write_csv(&mut buf, &names, &set).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), "a,b,c,residual_norm,iterations");
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.split(',').count() == 5));
}

#[test]
fn chen_config_emits_six_rows() {
    let out = bin().arg("solve").arg(config_path("chen.toml")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
}

#[test]
fn rootless_config_is_empty_success() {
    let out = bin()
        .arg("solve")
        .arg(config_path("rootless.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "x1,x2,residual_norm,iterations\n"
    );
}

#[test]
fn unreadable_config_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = bin().arg("solve").arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(&missing.display().to_string()));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, example_toml(2)).unwrap();
    let out = bin().arg("solve").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points"));
}

#[test]
fn output_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("roots.csv");
    let status = bin()
        .arg("solve")
        .arg(config_path("example.toml"))
        .args([
            "--points",
            "101",
            "--mode",
            "strict_paper",
            "--repetitions",
            "1",
            "--output",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let (names, rows) = read_csv(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(names, vec!["x1", "x2"]);
    assert!(!rows.is_empty());
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let path = dir.path().join(format!("run{k}.csv"));
            let status = bin()
                .args(["bench", "effati", "--param", "10", "--output"])
                .arg(&path)
                .status()
                .unwrap();
            assert!(status.success());
            fs::read(&path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn unknown_benchmark_is_config_error() {
    let out = bin().args(["bench", "nonesuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn contour_dump_shape() {
    let dir = tempfile::tempdir().unwrap();
    let p = Problem::new(
        "chen",
        &["x1", "x2"],
        &["exp(x1-x2)-sin(x1+x2)", "x1^2*x2^2-cos(x1+x2)"],
    )
    .unwrap();
    let g = DomainGrid::uniform(2, -10.0, 10.0, 101).unwrap();
    let files = dump_contours(&p, &g, dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    for f in files {
        let text = fs::read_to_string(f).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 102);
        assert!(rows.iter().all(|r| r.split(',').count() == 102));
    }
}

#[test]
fn contours_subcommand_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .arg("contours")
        .arg(config_path("example.toml"))
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let f1 = fs::read_to_string(dir.path().join("f1.csv")).unwrap();
    assert_eq!(f1.lines().count(), 12);
    assert!(dir.path().join("f2.csv").exists());
}

#[test]
fn sweep_subcommand_reports_cells_and_skips() {
    let out = bin()
        .args([
            "sweep",
            "--dimensions",
            "2,5",
            "--start",
            "20",
            "--stop",
            "30",
            "--repetitions",
            "1",
            "--memory-budget",
            "2000000",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,points,mean_seconds,std_seconds,cells,solutions,status"
    );
    assert!(lines[1].starts_with("2,20,") && lines[1].contains(",361,4,ok"));
    assert!(lines
        .iter()
        .any(|l| l.starts_with("5,20,") && l.ends_with("skipped: memory budget")));
}

#[test]
fn sweep_rejects_unsupported_dimension() {
    let out = bin().args(["sweep", "--dimensions", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
