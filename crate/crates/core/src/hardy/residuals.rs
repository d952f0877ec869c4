//! Pole-residue form of a disk ROM and the first-order optimality
//! conditions written in terms of it.

use serde::{Deserialize, Serialize};

use super::DiskFunction;
use crate::error::{Error, Result};
use crate::irka::Rom;
use crate::linalg::{self, CMat};
use crate::C64;

const REPEATED: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleResidue {
    pub pole: C64,
    pub residue: C64,
}

/// Modal form of the pencil: eigenvalues `lambda_j` and the modal input
/// and output weights, so `c^T (sE - A)^{-1} b = sum_j c_j b_j / (s - lambda_j)`.
pub(crate) struct Modal {
    pub lambda: Vec<C64>,
    pub c: Vec<C64>,
    pub b: Vec<C64>,
}

pub(crate) fn modal_form(rom: &Rom) -> Result<Modal> {
    let r = rom.r();
    if r == 0 {
        return Ok(Modal { lambda: vec![], c: vec![], b: vec![] });
    }
    let cond = linalg::scaled_condition_number(&rom.er)?;
    if !(cond < 1e14) {
        return Err(Error::SingularE(cond));
    }
    let (lambda, x) = linalg::generalized_eigen(&rom.ar, &rom.er)?;
    let scale = lambda.iter().map(|l| l.norm()).fold(1.0, f64::max);
    for i in 0..r {
        for j in 0..i {
            let sep = (lambda[i] - lambda[j]).norm();
            if sep <= REPEATED * scale {
                return Err(Error::RepeatedPoles(sep));
            }
        }
    }
    // (sE - A) X = E X (sI - Lambda)  =>  (sE - A)^{-1} = X (sI - Lambda)^{-1} (E X)^{-1}
    let ex: CMat = &rom.er * &x;
    let b = linalg::solve(&ex, &rom.br)?;
    let c = (0..r).map(|j| (0..r).map(|i| rom.cr[i] * x[(i, j)]).sum()).collect();
    Ok(Modal { lambda, c, b })
}

/// `rom(s) = sum_j residue_j / (s - pole_j) + d_r`.
pub fn pole_residues(rom: &Rom) -> Result<Vec<PoleResidue>> {
    let m = modal_form(rom)?;
    Ok((0..m.lambda.len()).map(|j| PoleResidue { pole: m.lambda[j], residue: m.c[j] * m.b[j] }).collect())
}

/// Residuals of the optimality conditions at one reflected pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub p: usize,
    /// `F(1/conj(lambda_p))` against the ROM value there.
    pub value_residual: f64,
    /// `F'(1/conj(lambda_p))` against the ROM derivative there.
    pub deriv_residual: f64,
    /// `F(0)` against the ROM value at the origin (same for every `p`).
    pub d_condition_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpResiduals {
    pub records: Vec<ResidualRecord>,
}

impl InterpResiduals {
    pub fn max(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.value_residual.max(r.deriv_residual).max(r.d_condition_residual))
            .fold(0.0, f64::max)
    }
}

fn rel(got: C64, want: C64) -> f64 {
    (got - want).norm() / want.norm().max(1.0)
}

/// Checks `F(0) = R(0)`, `F(mu_p) = R(mu_p)` and `F'(mu_p) = R'(mu_p)` at
/// the reflected poles `mu_p = 1/conj(lambda_p)`, with `R` in pole-residue
/// form. Each residual is scaled by `max(1, |F|)` of the quantity.
pub fn interp_residuals(f: &DiskFunction, rom: &Rom) -> Result<InterpResiduals> {
    let pr = pole_residues(rom)?;
    if let Some(p) = pr.iter().find(|p| p.pole.norm() <= 1.0) {
        return Err(Error::PoleInsideDisk(p.pole));
    }
    let value = |s: C64| pr.iter().map(|p| p.residue / (s - p.pole)).sum::<C64>() + rom.dr;
    let deriv = |s: C64| -pr.iter().map(|p| p.residue / ((s - p.pole) * (s - p.pole))).sum::<C64>();
    let zero = C64::new(0.0, 0.0);
    let d_res = rel(value(zero), f.eval(zero)?);
    let records = pr
        .iter()
        .enumerate()
        .map(|(p, pole)| {
            let mu = C64::new(1.0, 0.0) / pole.pole.conj();
            let (fv, fd) = f.eval_with_deriv(mu)?;
            Ok(ResidualRecord {
                p: p + 1,
                value_residual: rel(value(mu), fv),
                deriv_residual: rel(deriv(mu), fd),
                d_condition_residual: d_res,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterpResiduals { records })
}
