//! Loewner-matrix fixed-point iteration for locally H2-optimal ROMs.
//!
//! Each pass samples the disk function `F` at the current shifts, builds
//! an interpolating realization from Loewner matrices, and moves the
//! shifts to the reflections `1/conj(lambda_j)` of the new poles.

mod loewner;
mod mapped;
mod rom;
mod shifts;

pub use loewner::{assemble_rom, build_loewner, hermite_mismatch, LoewnerData};
pub use mapped::{domain_poles, midpoint_realization, DomainRealization};
pub use rom::{rom_disk_eval, rom_domain_eval, Rom, RomFile};
pub use shifts::{canonical_cmp, canonical_sort, init_shifts, jitter_coincident, shift_change};

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{interp_residuals, DiskFunction};
use crate::linalg::{self, CMat};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stabilization {
    /// Replace poles in the closed unit disk by their reflections.
    #[default]
    Reflect,
    Error,
}

/// How the feedthrough `d_r` is chosen when a new iterate is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DUpdate {
    /// Solve `R(0) = F(0)` exactly for the realization at the new shifts.
    #[default]
    Exact,
    /// `d <- F(0) + c^T A^{-1} b` using the previous iterate.
    Previous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IrkaOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub stabilization: Stabilization,
    pub d_update: DUpdate,
    /// Overrides the random initial shifts.
    pub initial_shifts: Option<Vec<C64>>,
}

impl Default for IrkaOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 100, seed: 0, stabilization: Stabilization::Reflect, d_update: DUpdate::Exact, initial_shifts: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Shifts the iterate was assembled at.
    pub shifts: Vec<C64>,
    /// Relative change to the next shift set.
    pub metric: f64,
    /// Largest relative Hermite mismatch of this iterate at the next shifts
    /// and of its value at the origin.
    pub max_interp_residual: f64,
    pub stabilized: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrkaReport {
    pub records: Vec<IterationRecord>,
    pub iterations: usize,
    pub converged: bool,
    /// Optimality residual of the returned ROM, when its poles permit.
    pub final_residual: Option<f64>,
}

impl IrkaReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,metric,max_interp_residual\n");
        for r in &self.records {
            let _ = writeln!(s, "{},{:.16e},{:.16e}", r.iteration, r.metric, r.max_interp_residual);
        }
        s
    }
}

/// Eigenvalues of `A x = lambda E x`, each checked against the pencil
/// residual `||A x - lambda E x|| <= 1e-8 (||A|| + |lambda| ||E||) ||x||`.
pub fn pencil_eigs(ar: &CMat, er: &CMat) -> Result<Vec<C64>> {
    let cond = linalg::scaled_condition_number(er)?;
    if !(cond < 1e14) {
        return Err(Error::SingularE(cond));
    }
    let (vals, x) = linalg::generalized_eigen(ar, er)?;
    let (na, ne) = (linalg::frobenius(ar), linalg::frobenius(er));
    for (j, &l) in vals.iter().enumerate() {
        let xj: Vec<C64> = (0..x.nrows()).map(|i| x[(i, j)]).collect();
        let ax = linalg::matvec(ar, &xj);
        let ex = linalg::matvec(er, &xj);
        let res: Vec<C64> = ax.iter().zip(&ex).map(|(a, e)| a - l * e).collect();
        let bound = 1e-8 * (na + l.norm() * ne) * linalg::norm2(&xj);
        if !(linalg::norm2(&res) <= bound) {
            return Err(Error::EigenFailure(format!("pencil residual {:e} exceeds {bound:e} for lambda = {l}", linalg::norm2(&res))));
        }
    }
    Ok(vals)
}

/// `F(0) + c^T A^{-1} b`: the feedthrough that makes the realization match
/// `F` at the origin.
fn feedthrough_update(rom: &Rom, f0: C64) -> Result<C64> {
    let x = linalg::solve(&rom.ar, &rom.br)?;
    Ok(f0 + linalg::dot_t(&rom.cr, &x))
}

/// The `d` for which the Loewner realization at `ld` takes the value
/// `F(0)` at the origin. With `M` symmetric, `alpha = y^T M^{-1} y`,
/// `beta = 1^T M^{-1} y` and `gamma = 1^T M^{-1} 1`, the realization's
/// value at zero is `(alpha + d((1 - beta)^2 - alpha gamma)) / (1 - d gamma)`,
/// which is solved for `d`. `None` when `M` is singular or the equation
/// degenerates.
fn exact_feedthrough(ld: &LoewnerData) -> Option<C64> {
    let r = ld.shifts.len();
    let one = C64::new(1.0, 0.0);
    let rhs = CMat::from_fn(r, 2, |i, j| if j == 0 { ld.y[i] } else { one });
    let cond = linalg::scaled_condition_number(&ld.m).ok()?;
    if !(cond < 1e14) {
        return None;
    }
    let x = linalg::DenseLu::new(&ld.m).ok()?.solve_mat(&rhs).ok()?;
    let (mut alpha, mut beta, mut gamma) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for i in 0..r {
        alpha += ld.y[i] * x[(i, 0)];
        beta += x[(i, 0)];
        gamma += x[(i, 1)];
    }
    let den = (one - beta) * (one - beta) - alpha * gamma + ld.f0 * gamma;
    let scale = (one - beta).norm_sqr() + (alpha * gamma).norm() + (ld.f0 * gamma).norm();
    if !(den.norm() > 1e-12 * scale) {
        return None;
    }
    let d = (ld.f0 - alpha) / den;
    d.is_finite().then_some(d)
}

fn next_feedthrough(opts: &IrkaOptions, prev: Option<&Rom>, ld: &LoewnerData) -> Result<C64> {
    if opts.d_update == DUpdate::Exact {
        if let Some(d) = exact_feedthrough(ld) {
            return Ok(d);
        }
        log::debug!("exact feedthrough unavailable, using the previous iterate");
    }
    match prev {
        Some(rom) => feedthrough_update(rom, ld.f0),
        None => Ok(ld.f0),
    }
}

/// Reflected poles of the current iterate. A pole in the closed unit disk
/// is kept as its own shift (the reflection of its reflection) under
/// `Reflect`. When `E_r` is too ill-conditioned for [`pencil_eigs`], the
/// homogeneous QZ pairs `(alpha, beta)` are used directly: the shift
/// `conj(beta / alpha)` stays finite for huge or infinite poles.
fn next_shifts(rom: &Rom, stabilization: Stabilization, iteration: usize) -> Result<(Vec<C64>, usize)> {
    let pairs: Vec<(C64, C64)> = match pencil_eigs(&rom.ar, &rom.er) {
        Ok(l) => l.into_iter().map(|l| (l, C64::new(1.0, 0.0))).collect(),
        Err(Error::SingularE(cond)) => {
            log::info!("iteration {iteration}: E_r condition estimate {cond:e}; using homogeneous QZ eigenvalues");
            let (a, b, _) = linalg::generalized_eigen_homogeneous(&rom.ar, &rom.er)?;
            a.into_iter().zip(b).collect()
        }
        Err(e) => return Err(e),
    };
    let mut stabilized = 0;
    let mut next = Vec::with_capacity(pairs.len());
    for (alpha, beta) in pairs {
        if alpha.norm() == 0.0 && beta.norm() == 0.0 {
            return Err(Error::EigenFailure("singular pencil (alpha = beta = 0)".into()));
        }
        if alpha.norm() <= beta.norm() {
            let l = alpha / beta;
            match stabilization {
                Stabilization::Error => return Err(Error::PoleInsideDisk(l)),
                Stabilization::Reflect => {
                    log::info!("iteration {iteration}: reflecting pole {l} out of the unit disk");
                    stabilized += 1;
                    next.push(l);
                }
            }
        } else {
            next.push((beta / alpha).conj());
        }
    }
    Ok((next, stabilized))
}

/// Infinite when the iterate has a pole at one of the next shifts, which
/// happens when a stabilized pole is reflected onto itself.
fn mismatch_at(rom: &Rom, next: &LoewnerData) -> f64 {
    worst_mismatch(rom, next).unwrap_or(f64::INFINITY)
}

fn worst_mismatch(rom: &Rom, next: &LoewnerData) -> Result<f64> {
    let mut worst = (rom.disk_eval(C64::new(0.0, 0.0))? - next.f0).norm() / next.f0.norm().max(1.0);
    for (ev, ed) in hermite_mismatch(rom, next)? {
        worst = worst.max(ev).max(ed);
    }
    Ok(worst)
}

/// Runs the iteration at order `r`. Non-convergence within `max_iter` is
/// reported through `converged = false`, not as an error.
pub fn irka_iterate(f: &DiskFunction, r: usize, opts: &IrkaOptions) -> Result<(Rom, IrkaReport)> {
    if r == 0 {
        return Err(Error::Config("order r must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_1e55);
    let mut shifts = match &opts.initial_shifts {
        Some(s) if s.len() != r => {
            return Err(Error::DimensionMismatch(format!("{} initial shifts for order {r}", s.len())));
        }
        Some(s) => {
            let mut s = s.clone();
            canonical_sort(&mut s);
            s
        }
        None => init_shifts(r, opts.seed),
    };
    let ld = build_loewner(f, &shifts)?;
    let d0 = next_feedthrough(opts, None, &ld)?;
    let mut rom = assemble_rom(&ld, d0, f.map().clone(), f.framework())?;
    let mut records = Vec::new();
    let mut converged = false;
    let mut iteration = 1;
    loop {
        let (mut next, stabilized) = next_shifts(&rom, opts.stabilization, iteration)?;
        canonical_sort(&mut next);
        let moved = jitter_coincident(&mut next, &mut rng);
        if moved > 0 {
            log::warn!("iteration {iteration}: jittered {moved} coincident shifts");
        }
        let metric = shift_change(&shifts, &next);
        let ld = build_loewner(f, &next)?;
        records.push(IterationRecord {
            iteration,
            shifts: shifts.clone(),
            metric,
            max_interp_residual: mismatch_at(&rom, &ld),
            stabilized,
        });
        let dr = next_feedthrough(opts, Some(&rom), &ld)?;
        rom = assemble_rom(&ld, dr, f.map().clone(), f.framework())?;
        shifts = next;
        log::debug!("iteration {iteration}: metric {metric:e}");
        if metric <= opts.tol {
            converged = true;
            break;
        }
        if iteration >= opts.max_iter {
            break;
        }
        iteration += 1;
    }
    rom.converged = converged;
    rom.iterations = iteration;
    let final_residual = match interp_residuals(f, &rom) {
        Ok(res) => Some(res.max()),
        Err(e) => {
            log::warn!("optimality residuals unavailable for the final ROM: {e}");
            None
        }
    };
    Ok((rom, IrkaReport { records, iterations: iteration, converged, final_residual }))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::conformal::Affine;
    use crate::hardy::{relative_error, Framework, QuadratureSpec};
    use crate::models::PoleResidueModel;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pencil_examples() {
        let a = CMat::from_fn(2, 2, |i, j| if i == j { c(2.0 + i as f64, 0.0) } else { c(0.0, 0.0) });
        let mut l = pencil_eigs(&a, &linalg::identity(2)).unwrap();
        l.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((l[0] - 2.0).norm() < 1e-14 && (l[1] - 3.0).norm() < 1e-14);
        let l = pencil_eigs(&CMat::from_fn(1, 1, |_, _| c(2.0, 0.0)), &CMat::from_fn(1, 1, |_, _| c(0.5, 0.0))).unwrap();
        assert!((l[0] - 4.0).norm() < 1e-14);
        assert!(matches!(pencil_eigs(&a, &linalg::zeros(2, 2)), Err(Error::SingularE(_))));
    }

    #[test]
    fn recovers_a_rational_function() {
        let g = PoleResidueModel::random_outside_disk(3, 11);
        let f = DiskFunction::new(Framework::H2A, Arc::new(g), Arc::new(Affine::new(1.0, 0.0).unwrap()));
        let (rom, rep) = irka_iterate(&f, 3, &IrkaOptions::default()).unwrap();
        assert!(rep.converged, "{:?}", rep.records.iter().map(|r| r.metric).collect::<Vec<_>>());
        assert!(relative_error(&f, &rom, &QuadratureSpec::default()).unwrap() < 1e-8);
        assert!(rep.final_residual.unwrap() < 1e-8);
        assert!(rep.to_csv().starts_with("iteration,metric,max_interp_residual\n"));
    }

    #[test]
    fn wrong_number_of_initial_shifts() {
        let g = PoleResidueModel::random_outside_disk(2, 1);
        let f = DiskFunction::new(Framework::H2A, Arc::new(g), Arc::new(Affine::new(1.0, 0.0).unwrap()));
        let opts = IrkaOptions { initial_shifts: Some(vec![c(0.1, 0.0)]), ..Default::default() };
        assert!(matches!(irka_iterate(&f, 2, &opts), Err(Error::DimensionMismatch(_))));
    }
}
