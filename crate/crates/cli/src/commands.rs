use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use conformal_h2::aaa::{aaa_fit_disk_function, compare_on_domain, log_circle_samples};
use conformal_h2::conformal::schwarz_reflect;
use conformal_h2::hardy::{interp_residuals, pole_residues, relative_error, DiskFunction, Framework, ResidualRecord};
use conformal_h2::irka::{irka_iterate, Rom, RomFile};
use conformal_h2::models::ModelRegistry;
use conformal_h2::simulate::{impulse, random_sign_input, verify_linf_bound};
use conformal_h2::C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{InputKind, RunConfig};
use crate::{exit, CliError};

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.run.out.clone().unwrap_or_else(|| PathBuf::from("results"))
}

fn disk_function(cfg: &RunConfig) -> Result<DiskFunction, CliError> {
    let model = ModelRegistry::with_builtins().build(cfg.model()?)?;
    let map = cfg.map()?.build()?;
    Ok(DiskFunction::new(cfg.run.framework, model, map))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |v| format!("{v:.16e}"))
}

fn seeds(cfg: &RunConfig) -> Vec<u64> {
    (0..cfg.run.seeds).collect()
}

#[derive(Debug, Serialize)]
struct ResidualsFile {
    max_residual: Option<f64>,
    records: Vec<ResidualRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Outcome of one (r, seed) task.
struct RunOutcome {
    r: usize,
    seed: u64,
    result: Result<RunSummary, String>,
}

struct RunSummary {
    rel_error: f64,
    converged: bool,
    iterations: usize,
    max_residual: Option<f64>,
}

fn run_one(f: &DiskFunction, cfg: &RunConfig, r: usize, seed: u64, dir: &Path) -> Result<RunSummary, CliError> {
    let (rom, report) = irka_iterate(f, r, &cfg.irka_options(seed))?;
    let rel_error = relative_error(f, &rom, &f.quadrature(&cfg.quadrature))?;
    let residuals = match interp_residuals(f, &rom) {
        Ok(res) => ResidualsFile { max_residual: Some(res.max()), records: res.records, error: None },
        Err(e) => ResidualsFile { max_residual: None, records: vec![], error: Some(e.to_string()) },
    };
    let rom_json = serde_json::to_string_pretty(&rom.to_file()).expect("ROM files serialize");
    write(&dir.join("rom.json"), &rom_json)?;
    write(&dir.join("report.csv"), &report.to_csv())?;
    write(&dir.join("residuals.json"), &serde_json::to_string_pretty(&residuals).expect("residuals serialize"))?;
    Ok(RunSummary {
        rel_error,
        converged: report.converged,
        iterations: report.iterations,
        max_residual: residuals.max_residual,
    })
}

fn run_grid(f: &DiskFunction, cfg: &RunConfig, out: &Path) -> Vec<RunOutcome> {
    let tasks: Vec<(usize, u64)> = cfg.run.r.iter().flat_map(|&r| seeds(cfg).into_iter().map(move |s| (r, s))).collect();
    let mut outcomes: Vec<RunOutcome> = tasks
        .into_par_iter()
        .map(|(r, seed)| {
            let start = Instant::now();
            let dir = out.join(format!("r{r}")).join(format!("seed{seed}"));
            let result = run_one(f, cfg, r, seed, &dir).map_err(|e| e.to_string());
            match &result {
                Ok(s) => eprintln!(
                    "r={r} seed={seed}: rel_error={:.6e} converged={} iterations={} ({:.1} s)",
                    s.rel_error,
                    s.converged,
                    s.iterations,
                    start.elapsed().as_secs_f64()
                ),
                Err(e) => eprintln!("r={r} seed={seed}: failed: {e}"),
            }
            RunOutcome { r, seed, result }
        })
        .collect();
    outcomes.sort_by_key(|o| (o.r, o.seed));
    outcomes
}

/// Best relative error per order, over all seeds that produced a ROM.
fn best_per_r(outcomes: &[RunOutcome], orders: &[usize]) -> Vec<(usize, Option<(u64, f64)>)> {
    orders
        .iter()
        .map(|&r| {
            let best = outcomes
                .iter()
                .filter(|o| o.r == r)
                .filter_map(|o| o.result.as_ref().ok().map(|s| (o.seed, s.rel_error)))
                .filter(|(_, e)| e.is_finite())
                .min_by(|a, b| a.1.total_cmp(&b.1));
            (r, best)
        })
        .collect()
}

pub fn approximate(cfg: &RunConfig) -> Result<u8, CliError> {
    if cfg.run.r.is_empty() {
        return Err(CliError::Config("no orders given (use --r or run.r)".into()));
    }
    let f = disk_function(cfg)?;
    let out = out_dir(cfg);
    write(&out.join("config.toml"), &cfg.to_toml())?;
    let outcomes = run_grid(&f, cfg, &out);

    let mut summary = String::from("r,seed,status,converged,iterations,rel_error,max_residual\n");
    for o in &outcomes {
        match &o.result {
            Ok(s) => {
                let _ = writeln!(
                    summary,
                    "{},{},ok,{},{},{:.16e},{}",
                    o.r,
                    o.seed,
                    s.converged,
                    s.iterations,
                    s.rel_error,
                    fmt_opt(s.max_residual)
                );
            }
            Err(_) => {
                let _ = writeln!(summary, "{},{},failed,false,0,NaN,NaN", o.r, o.seed);
            }
        }
    }
    write(&out.join("summary.csv"), &summary)?;

    let mut errors = String::from("r,best_seed,rel_error\n");
    for (r, best) in best_per_r(&outcomes, &cfg.run.r) {
        match best {
            Some((seed, e)) => {
                let _ = writeln!(errors, "{r},{seed},{e:.16e}");
                println!("r={r} best relative error {e:.6e} (seed {seed})");
            }
            None => {
                let _ = writeln!(errors, "{r},,NaN");
                println!("r={r} no successful run");
            }
        }
    }
    write(&out.join("errors_vs_r.csv"), &errors)?;

    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    let unconverged = outcomes.iter().filter(|o| matches!(&o.result, Ok(s) if !s.converged)).count();
    if failed > 0 {
        for o in outcomes.iter().filter(|o| o.result.is_err()) {
            eprintln!("error: r={} seed={}: {}", o.r, o.seed, o.result.as_ref().err().unwrap());
        }
        return Ok(exit::NUMERICAL);
    }
    if unconverged > 0 {
        eprintln!("warning: {unconverged} run(s) did not converge; results were written");
        return Ok(exit::NOT_CONVERGED);
    }
    Ok(exit::OK)
}

fn load_rom(path: &Path) -> Result<Rom, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: RomFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Rom::from_file(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The ROM's own map and framework take precedence over the config.
fn disk_function_for(rom: &Rom, cfg: &RunConfig) -> Result<DiskFunction, CliError> {
    let model = ModelRegistry::with_builtins().build(cfg.model()?)?;
    Ok(DiskFunction::new(rom.framework, model, Arc::clone(&rom.map)))
}

pub fn verify(rom_path: &Path, cfg: &RunConfig) -> Result<u8, CliError> {
    let rom = load_rom(rom_path)?;
    let f = disk_function_for(&rom, cfg)?;
    let res = interp_residuals(&f, &rom)?;
    let max = res.max();
    println!("max interpolation residual {max:.6e} (threshold {:.1e})", cfg.run.threshold);
    for rec in &res.records {
        println!(
            "  p={:<3} value {:.3e}  derivative {:.3e}  origin {:.3e}",
            rec.p, rec.value_residual, rec.deriv_residual, rec.d_condition_residual
        );
    }

    // The interpolation points 1/conj(lambda) seen through the map are the
    // reflections of the mapped poles across the domain boundary.
    let map = rom.map.as_ref();
    let mut worst: Option<f64> = None;
    for p in pole_residues(&rom)? {
        let lhs = map.phi(p.pole).and_then(|z| schwarz_reflect(map, z));
        let rhs = map.phi(C64::new(1.0, 0.0) / p.pole.conj());
        if let (Ok(l), Ok(r)) = (lhs, rhs) {
            let d = (l - r).norm() / r.norm().max(1.0);
            worst = Some(worst.map_or(d, |w| w.max(d)));
        }
    }
    match worst {
        Some(w) => println!("reflection restatement a(phi(lambda)) vs phi(1/conj(lambda)): max discrepancy {w:.3e}"),
        None => println!("reflection restatement: not available for this map"),
    }
    Ok(if max <= cfg.run.threshold { exit::OK } else { exit::CHECK_FAILED })
}

pub fn simulate(rom_path: &Path, cfg: &RunConfig) -> Result<u8, CliError> {
    let rom = load_rom(rom_path)?;
    if rom.framework != Framework::H2A {
        return Err(CliError::Unsupported("the output bound is only available for h2a ROMs".into()));
    }
    let pf = rom.map.poly_fraction();
    if !pf.is_polynomial() {
        return Err(CliError::Unsupported(format!(
            "map `{}` does not induce a delay system (its symbol has a denominator); use implicit_euler, bdf2 or bdf4",
            rom.map.kind()
        )));
    }
    let f = disk_function_for(&rom, cfg)?;
    let ss = f
        .model()
        .as_state_space()
        .ok_or_else(|| CliError::Unsupported(format!("model `{}` has no state-space realization", f.model().name())))?;
    let sim = &cfg.simulate;
    let u = match sim.input {
        InputKind::Impulse => impulse(sim.m, sim.k)?,
        InputKind::Random => random_sign_input(sim.k, sim.input_seed),
    };
    let result = verify_linf_bound(ss, &pf, &rom, &f, &u, sim.k, &cfg.quadrature)?;
    let out = out_dir(cfg);
    write(&out.join("simulation.csv"), &result.to_csv())?;
    println!("bound constant {:.6e}", result.bound);
    println!("max output error {:.6e}", result.err_inf);
    println!("bound holds: {}", result.holds);
    Ok(if result.holds { exit::OK } else { exit::CHECK_FAILED })
}

pub fn compare_aaa(cfg: &RunConfig) -> Result<u8, CliError> {
    if cfg.run.r.is_empty() {
        return Err(CliError::Config("no degrees given (use --r or run.r)".into()));
    }
    let f = disk_function(cfg)?;
    let out = out_dir(cfg);
    write(&out.join("config.toml"), &cfg.to_toml())?;
    let positive: Vec<usize> = cfg.run.r.iter().copied().filter(|&r| r > 0).collect();
    let irka_cfg = RunConfig { run: crate::config::RunSection { r: positive.clone(), ..cfg.run.clone() }, ..cfg.clone() };
    let outcomes = run_grid(&f, &irka_cfg, &out.join("irka"));
    let best = best_per_r(&outcomes, &positive);

    let samples = log_circle_samples(cfg.compare.samples_per_side, cfg.compare.theta_min);
    let q = f.quadrature(&cfg.quadrature);
    let mut table = String::from("r,irka_error,aaa_error\n");
    for &r in &cfg.run.r {
        let irka = best.iter().find(|(rr, _)| *rr == r).and_then(|(_, b)| b.map(|(_, e)| e));
        let aaa = aaa_fit_disk_function(&f, &samples, r, cfg.compare.aaa_tol)
            .and_then(|m| compare_on_domain(&m, &f, &q))
            .map_err(|e| log::warn!("AAA at degree {r} failed: {e}"))
            .ok();
        println!("r={r} irka {} aaa {}", fmt_opt(irka), fmt_opt(aaa));
        let _ = writeln!(table, "{r},{},{}", fmt_opt(irka), fmt_opt(aaa));
    }
    write(&out.join("compare_aaa.csv"), &table)?;
    Ok(exit::OK)
}
