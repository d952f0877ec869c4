//! Time stepping of the delay system induced by a polynomial map and of
//! the disk-side ROM recurrence, plus the output-error bound check.
//!
//! With `phi(s) = sum_j alpha_j s^j`, the full model steps
//! `sum_j alpha_j x_{k-j} - A x_k = b u_k`, `y_k = c^* x_k + d u_k`, so its
//! impulse response has generating function `G(phi(s))`. The ROM steps
//! `A_r x_k = E_r x_{k-1} - b_r u_k`, `y_k = c_r^T x_k + d_r u_k`, whose
//! generating function is the disk evaluation of the ROM.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conformal::PolyFraction;
use crate::error::{Error, Result};
use crate::hardy::{error_norms, DiskFunction, Framework, QuadratureSpec};
use crate::irka::Rom;
use crate::linalg::{self, DenseLu};
use crate::models::{ShiftedSolver, StateSpaceModel};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub u: Vec<C64>,
    pub y: Vec<C64>,
    pub y_hat: Vec<C64>,
    pub err_inf: f64,
    /// `||F - R||_{H2} ||u||_2`.
    pub bound: f64,
    pub holds: bool,
}

impl SimulationResult {
    pub fn recompute_err_inf(&self) -> f64 {
        max_abs_diff(&self.y, &self.y_hat)
    }

    /// Largest imaginary part among `u`, `y`, `y_hat`; zero for real data.
    pub fn max_imag(&self) -> f64 {
        self.u.iter().chain(&self.y).chain(&self.y_hat).map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// `k,u,y,y_hat,abs_err` rows (real parts), preceded by comment lines
    /// carrying the bound and the imaginary-part sanity value.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# bound = {:.16e}", self.bound);
        let _ = writeln!(s, "# err_inf = {:.16e}", self.err_inf);
        let _ = writeln!(s, "# max_imag = {:.16e}", self.max_imag());
        s.push_str("k,u,y,y_hat,abs_err\n");
        for k in 0..self.y.len() {
            let _ = writeln!(
                s,
                "{k},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.u[k].re,
                self.y[k].re,
                self.y_hat[k].re,
                (self.y[k] - self.y_hat[k]).norm()
            );
        }
        s
    }
}

fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Unit impulse at index `m` in a sequence of length `k`.
pub fn impulse(m: usize, k: usize) -> Result<Vec<C64>> {
    if m >= k {
        return Err(Error::Index { index: m, len: k });
    }
    let mut u = vec![C64::new(0.0, 0.0); k];
    u[m] = C64::new(1.0, 0.0);
    Ok(u)
}

/// Random `+-1` input of length `k`, deterministic in `seed`.
pub fn random_sign_input(k: usize, seed: u64) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect()
}

fn check_input(u: &[C64], k: usize) -> Result<()> {
    if u.len() < k {
        return Err(Error::DimensionMismatch(format!("input has {} samples, {k} steps requested", u.len())));
    }
    Ok(())
}

/// Runs the delay system of a polynomial map for `k` steps from zero history.
pub fn simulate_delay_fom(model: &StateSpaceModel, pf: &PolyFraction, u: &[C64], k: usize) -> Result<Vec<C64>> {
    if !pf.is_polynomial() {
        return Err(Error::Unsupported(
            "delay simulation needs a polynomial map (constant denominator); the midpoint map is not one".into(),
        ));
    }
    check_input(u, k)?;
    let alpha = &pf.alpha;
    if alpha.is_empty() {
        return Err(Error::Config("empty map numerator".into()));
    }
    let n = model.n();
    let step = ShiftedSolver::new(model.a(), C64::new(alpha[0], 0.0), C64::new(1.0, 0.0))?;
    let mut hist: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut y = Vec::with_capacity(k);
    for step_k in 0..k {
        let mut rhs: Vec<C64> = model.b().iter().map(|b| b * u[step_k]).collect();
        for (j, &a) in alpha.iter().enumerate().skip(1) {
            if j > step_k || a == 0.0 {
                continue;
            }
            let prev = &hist[step_k - j];
            for i in 0..n {
                rhs[i] -= a * prev[i];
            }
        }
        let x = step.solve(&rhs)?;
        y.push(linalg::dot_h(model.c(), &x) + model.d() * u[step_k]);
        hist.push(x);
    }
    Ok(y)
}

/// Runs the ROM recurrence for `k` steps from `x_{-1} = 0`.
pub fn simulate_rom(rom: &Rom, u: &[C64], k: usize) -> Result<Vec<C64>> {
    check_input(u, k)?;
    let r = rom.r();
    let lu = DenseLu::new(&rom.ar)?;
    let mut x = vec![C64::new(0.0, 0.0); r];
    let mut y = Vec::with_capacity(k);
    for &uk in &u[..k] {
        let ex = linalg::matvec(&rom.er, &x);
        let rhs: Vec<C64> = ex.iter().zip(&rom.br).map(|(e, b)| e - b * uk).collect();
        x = lu.solve(&rhs)?;
        y.push(linalg::dot_t(&rom.cr, &x) + rom.dr * uk);
    }
    Ok(y)
}

/// `err_inf <= bound (1 + 1e-8)`, with an absolute floor of `1e-13 ||y||_inf`
/// for bounds that vanish up to rounding.
pub fn bound_holds(err_inf: f64, bound: f64, y: &[C64]) -> bool {
    let y_inf = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    err_inf <= bound * (1.0 + 1e-8) + 1e-13 * y_inf
}

/// Simulates both systems and checks `||y - y_hat||_inf <= ||F - R||_{H2} ||u||_2`.
pub fn verify_linf_bound(
    model: &StateSpaceModel,
    pf: &PolyFraction,
    rom: &Rom,
    f: &DiskFunction,
    u: &[C64],
    k: usize,
    q: &QuadratureSpec,
) -> Result<SimulationResult> {
    if f.framework() != Framework::H2A || rom.framework != Framework::H2A {
        return Err(Error::Unsupported("the output bound needs h2a disk functions".into()));
    }
    let y = simulate_delay_fom(model, pf, u, k)?;
    let y_hat = simulate_rom(rom, u, k)?;
    let (abs_err, _) = error_norms(f, rom, &f.quadrature(q))?;
    let bound = abs_err * linalg::norm2(&u[..k]);
    let err_inf = max_abs_diff(&y, &y_hat);
    let holds = bound_holds(err_inf, bound, &y);
    Ok(SimulationResult { u: u[..k].to_vec(), y, y_hat, err_inf, bound, holds })
}
