use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use conformal_h2::irka::{Rom, RomFile};
use conformal_h2::C64;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_conformal-h2"));
    c.env("CONFORMAL_H2_THREADS", "1");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn approximate_rational(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["approximate", "--model", "rational", "--map", "affine", "--r", "4", "--seeds", "2", "--out", path(out)];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_rom(p: &Path) -> RomFile {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn invalid_map_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["approximate", "--model", "heat", "--map", "hexagon", "--r", "2", "--out", path(dir.path())]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("unknown map kind"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[model]\nname = \"heat\"\n\n[run]\nr = [2]\nmax_iters = 5\n").unwrap();
    let o = run(&["approximate", "--config", path(&cfg), "--map", "moebius", "--out", path(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("max_iters"), "{}", stderr(&o));
}

#[test]
fn approximate_writes_results_that_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = approximate_rational(&out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("r=4 best relative error"));
    for f in ["config.toml", "summary.csv", "errors_vs_r.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    for s in 0..2 {
        let run_dir = out.join("r4").join(format!("seed{s}"));
        for f in ["rom.json", "report.csv", "residuals.json"] {
            assert!(run_dir.join(f).is_file(), "{f}");
        }
    }

    let file = read_rom(&out.join("r4/seed0/rom.json"));
    let rom = Rom::from_file(file.clone()).unwrap();
    assert_eq!(rom.to_file(), file);
    let reloaded = Rom::from_file(serde_json::from_str(&serde_json::to_string(&rom.to_file()).unwrap()).unwrap()).unwrap();
    for k in 0..20 {
        let s = C64::from_polar(0.3 + 0.03 * k as f64, 0.7 * k as f64);
        let (a, b) = (rom.disk_eval(s).unwrap(), reloaded.disk_eval(s).unwrap());
        assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
    }

    let errors = fs::read_to_string(out.join("errors_vs_r.csv")).unwrap();
    let line = errors.lines().nth(1).unwrap();
    let err: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
    assert!(err <= 1e-8, "{line}");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&approximate_rational(&a, &["--r", "2,4"])), 0);
    assert_eq!(code(&approximate_rational(&b, &["--r", "2,4"])), 0);
    for f in ["summary.csv", "errors_vs_r.csv", "r2/seed1/report.csv", "r4/seed0/rom.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn verify_accepts_converged_and_rejects_corrupted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    assert_eq!(code(&approximate_rational(&out, &[])), 0);
    let rom_path = out.join("r4/seed0/rom.json");
    let o = run(&["verify", "--model", "rational", "--rom", path(&rom_path)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("max interpolation residual"));
    let line = stdout(&o).lines().find(|l| l.starts_with("reflection restatement")).unwrap().to_string();
    let disc: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(disc <= 1e-8, "{line}");

    let mut file = read_rom(&rom_path);
    file.dr += C64::new(1e-2, 0.0);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(code(&run(&["verify", "--model", "rational", "--rom", path(&bad)])), 4);

    fs::write(&bad, "{\"framework\": \"h2a\"}").unwrap();
    assert_eq!(code(&run(&["verify", "--model", "rational", "--rom", path(&bad)])), 1);
}

#[test]
fn non_convergence_exits_2_but_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = run(&["approximate", "--model", "heat", "--map", "moebius", "--framework", "e2", "--r", "4", "--max-iter", "1", "--out", path(&out)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(out.join("r4/seed0/rom.json").is_file());
    assert!(fs::read_to_string(out.join("summary.csv")).unwrap().contains(",false,1,"));
}

#[test]
fn midpoint_simulation_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = run(&["approximate", "--model", "stable", "--map", "midpoint", "--h", "0.1", "--r", "2", "--out", path(&out)]);
    assert!(matches!(code(&o), 0 | 2), "{}", stderr(&o));
    let o = run(&["simulate", "--model", "stable", "--rom", path(&out.join("r2/seed0/rom.json")), "--out", path(&out)]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("midpoint"), "{}", stderr(&o));
}

#[test]
fn stable_bdf2_simulation_respects_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = run(&["approximate", "--model", "stable", "--map", "bdf2", "--h", "0.01", "--r", "4", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rom = out.join("r4/seed0/rom.json");
    for input in ["impulse", "random"] {
        let o = run(&["simulate", "--model", "stable", "--rom", path(&rom), "--input", input, "--k", "60", "--out", path(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("bound constant"));
        let csv = fs::read_to_string(out.join("simulation.csv")).unwrap();
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 61);
    }
}

#[test]
fn compare_aaa_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = run(&["compare-aaa", "--model", "rational", "--map", "affine", "--r", "0,4", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = fs::read_to_string(out.join("compare_aaa.csv")).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(table.lines().next(), Some("r,irka_error,aaa_error"));
    assert_eq!(rows[0][1], "NaN");
    assert!(rows[0][2].parse::<f64>().unwrap() <= 1.0);
    assert!(rows[1][1].parse::<f64>().unwrap() <= 1e-8);
    assert!(rows[1][2].parse::<f64>().unwrap() <= 1e-8);
}

#[test]
fn missing_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["approximate", "--map", "moebius", "--r", "2", "--out", path(dir.path())]);
    assert_eq!(code(&o), 1);
    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 1);
}
