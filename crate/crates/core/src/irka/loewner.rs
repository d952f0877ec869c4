use std::sync::Arc;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::hardy::{DiskFunction, Framework};
use crate::linalg::CMat;
use crate::C64;

use super::rom::Rom;

const COINCIDENT: f64 = 1e-12;

/// Divided-difference data of `F` at the shifts.
#[derive(Debug, Clone)]
pub struct LoewnerData {
    pub l: CMat,
    pub m: CMat,
    /// `F(sigma_i)`; the right data `Z` equals `Y`.
    pub y: Vec<C64>,
    pub dy: Vec<C64>,
    pub f0: C64,
    pub shifts: Vec<C64>,
}

impl LoewnerData {
    pub fn z(&self) -> &[C64] {
        &self.y
    }

    /// Loewner matrices from precomputed samples `F(sigma_i)`, `F'(sigma_i)`, `F(0)`.
    pub fn from_samples(shifts: &[C64], y: Vec<C64>, dy: Vec<C64>, f0: C64) -> Result<Self> {
        let r = shifts.len();
        if y.len() != r || dy.len() != r {
            return Err(Error::DimensionMismatch("one value and one derivative per shift".into()));
        }
        check_distinct(shifts)?;
        let s = shifts;
        let l = CMat::from_fn(r, r, |i, j| if i == j { dy[i] } else { (y[i] - y[j]) / (s[i] - s[j]) });
        let m = CMat::from_fn(r, r, |i, j| {
            if i == j {
                y[i] + s[i] * dy[i]
            } else {
                (s[i] * y[i] - s[j] * y[j]) / (s[i] - s[j])
            }
        });
        Ok(Self { l, m, y, dy, f0, shifts: shifts.to_vec() })
    }
}

pub(crate) fn check_distinct(shifts: &[C64]) -> Result<()> {
    for i in 0..shifts.len() {
        for j in 0..i {
            let dist = (shifts[i] - shifts[j]).norm();
            if dist <= COINCIDENT {
                return Err(Error::CoincidentShifts { i: j, j: i, dist });
            }
        }
    }
    Ok(())
}

/// Samples `F` at every shift (value and derivative) and at the origin.
pub fn build_loewner(f: &DiskFunction, shifts: &[C64]) -> Result<LoewnerData> {
    use rayon::prelude::*;
    check_distinct(shifts)?;
    let pts: Vec<C64> = shifts.to_vec();
    let samples = pts.par_iter().map(|&s| f.eval_with_deriv(s)).collect::<Result<Vec<_>>>()?;
    let f0 = f.eval(C64::new(0.0, 0.0))?;
    let (y, dy) = samples.into_iter().unzip();
    LoewnerData::from_samples(shifts, y, dy, f0)
}

/// `E = -L`, `A = d J - M` (`J` all ones), `b = Z - d`, `c = Y - d`.
///
/// The result interpolates `F` and `F'` at every shift for any `d`; this
/// is checked before returning.
pub fn assemble_rom(
    ld: &LoewnerData,
    dr: C64,
    map: Arc<dyn ConformalMap>,
    framework: Framework,
) -> Result<Rom> {
    let r = ld.shifts.len();
    let er = CMat::from_fn(r, r, |i, j| -ld.l[(i, j)]);
    let ar = CMat::from_fn(r, r, |i, j| dr - ld.m[(i, j)]);
    let br: Vec<C64> = ld.z().iter().map(|v| v - dr).collect();
    let cr: Vec<C64> = ld.y.iter().map(|v| v - dr).collect();
    let rom = Rom { framework, map, er, ar, br, cr, dr, shifts: ld.shifts.clone(), converged: false, iterations: 0 };
    check_hermite(&rom, ld, 1e-8)?;
    Ok(rom)
}

/// Relative value and derivative mismatch at every assembly shift.
pub fn hermite_mismatch(rom: &Rom, ld: &LoewnerData) -> Result<Vec<(f64, f64)>> {
    ld.shifts
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let v = rom.disk_eval(s)?;
            let dv = rom.disk_deriv(s)?;
            let ev = (v - ld.y[i]).norm() / ld.y[i].norm().max(1.0);
            let ed = (dv - ld.dy[i]).norm() / ld.dy[i].norm().max(1.0);
            Ok((ev, ed))
        })
        .collect()
}

fn check_hermite(rom: &Rom, ld: &LoewnerData, tol: f64) -> Result<()> {
    for (index, (ev, ed)) in hermite_mismatch(rom, ld)?.into_iter().enumerate() {
        let mismatch = ev.max(ed);
        if !(mismatch <= tol) {
            return Err(Error::InterpolationMismatch { index, mismatch });
        }
    }
    Ok(())
}
