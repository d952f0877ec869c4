use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalMap, MapSpec};
use crate::error::{Error, Result};
use crate::hardy::{DiskApproximant, Framework};
use crate::linalg::{self, CMat, DenseLu};
use crate::C64;

/// Reduced realization `c^T (s E - A)^{-1} b + d` on the disk.
#[derive(Debug, Clone)]
pub struct Rom {
    pub framework: Framework,
    pub map: Arc<dyn ConformalMap>,
    pub er: CMat,
    pub ar: CMat,
    pub br: Vec<C64>,
    pub cr: Vec<C64>,
    pub dr: C64,
    /// Interpolation points the realization was assembled at.
    pub shifts: Vec<C64>,
    pub converged: bool,
    pub iterations: usize,
}

impl Rom {
    pub fn r(&self) -> usize {
        self.br.len()
    }

    /// Constant ROM `G_r = d` (order zero).
    pub fn constant(framework: Framework, map: Arc<dyn ConformalMap>, d: C64) -> Self {
        Self {
            framework,
            map,
            er: linalg::zeros(0, 0),
            ar: linalg::zeros(0, 0),
            br: vec![],
            cr: vec![],
            dr: d,
            shifts: vec![],
            converged: true,
            iterations: 0,
        }
    }

    fn resolvent_solve(&self, s: C64) -> Result<Vec<C64>> {
        let m = CMat::from_fn(self.r(), self.r(), |i, j| s * self.er[(i, j)] - self.ar[(i, j)]);
        DenseLu::new(&m)
            .and_then(|lu| lu.solve(&self.br))
            .map_err(|e| Error::SingularResolvent { z: s, detail: e.to_string() })
    }

    /// `c^T (s E - A)^{-1} b + d`.
    pub fn disk_eval(&self, s: C64) -> Result<C64> {
        if self.r() == 0 {
            return Ok(self.dr);
        }
        Ok(linalg::dot_t(&self.cr, &self.resolvent_solve(s)?) + self.dr)
    }

    /// `-c^T (s E - A)^{-1} E (s E - A)^{-1} b`.
    pub fn disk_deriv(&self, s: C64) -> Result<C64> {
        if self.r() == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let n = self.r();
        let m = CMat::from_fn(n, n, |i, j| s * self.er[(i, j)] - self.ar[(i, j)]);
        let lu = DenseLu::new(&m).map_err(|e| Error::SingularResolvent { z: s, detail: e.to_string() })?;
        let x = lu.solve(&self.br)?;
        // left solve via the transpose: w^T = c^T (sE - A)^{-1}
        let mt = m.transpose().to_owned();
        let w = linalg::solve(&mt, &self.cr)?;
        Ok(-linalg::dot_t(&w, &linalg::matvec(&self.er, &x)))
    }

    /// `G_r(z)` on the domain: `s = phi^{-1}(z)`, divided by
    /// `sqrt(phi'(s))` in the E2 framework.
    pub fn domain_eval(&self, z: C64) -> Result<C64> {
        let s = self.map.phi_inv(z)?;
        let v = self.disk_eval(s)?;
        match self.framework {
            Framework::H2A => Ok(v),
            Framework::E2 => Ok(v / self.map.sqrt_dphi(s)?),
        }
    }

    pub fn to_file(&self) -> RomFile {
        RomFile {
            framework: self.framework,
            map: self.map.spec(),
            r: self.r(),
            er: linalg::to_rows(&self.er),
            ar: linalg::to_rows(&self.ar),
            br: self.br.clone(),
            cr: self.cr.clone(),
            dr: self.dr,
            shifts: self.shifts.clone(),
            converged: self.converged,
            iterations: self.iterations,
        }
    }

    pub fn from_file(f: RomFile) -> Result<Self> {
        let r = f.r;
        let square = |m: &Vec<Vec<C64>>| m.len() == r && m.iter().all(|row| row.len() == r);
        if !square(&f.er) || !square(&f.ar) || f.br.len() != r || f.cr.len() != r {
            return Err(Error::DimensionMismatch(format!("ROM file declares r = {r} but matrix/vector sizes differ")));
        }
        let er = if r == 0 { linalg::zeros(0, 0) } else { linalg::from_rows(&f.er)? };
        let ar = if r == 0 { linalg::zeros(0, 0) } else { linalg::from_rows(&f.ar)? };
        Ok(Self {
            framework: f.framework,
            map: f.map.build()?,
            er,
            ar,
            br: f.br,
            cr: f.cr,
            dr: f.dr,
            shifts: f.shifts,
            converged: f.converged,
            iterations: f.iterations,
        })
    }
}

impl DiskApproximant for Rom {
    fn disk_eval(&self, s: C64) -> Result<C64> {
        Rom::disk_eval(self, s)
    }
}

pub fn rom_disk_eval(rom: &Rom, s: C64) -> Result<C64> {
    rom.disk_eval(s)
}

pub fn rom_domain_eval(rom: &Rom, z: C64) -> Result<C64> {
    rom.domain_eval(z)
}

/// On-disk ROM layout; matrices are row-major and complex numbers are
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RomFile {
    pub framework: Framework,
    pub map: MapSpec,
    pub r: usize,
    #[serde(rename = "Er")]
    pub er: Vec<Vec<C64>>,
    #[serde(rename = "Ar")]
    pub ar: Vec<Vec<C64>>,
    pub br: Vec<C64>,
    pub cr: Vec<C64>,
    pub dr: C64,
    pub shifts: Vec<C64>,
    pub converged: bool,
    pub iterations: usize,
}
