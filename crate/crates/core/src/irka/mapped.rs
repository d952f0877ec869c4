use serde::{Deserialize, Serialize};

use super::Rom;
use crate::error::{Error, Result};
use crate::hardy::residuals::modal_form;
use crate::hardy::Framework;
use crate::C64;

/// Diagonal realization `c^T (zI - diag(poles))^{-1} b + d` of a ROM
/// written directly on the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRealization {
    pub poles: Vec<C64>,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
    pub d: C64,
}

impl DomainRealization {
    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut acc = self.d;
        for j in 0..self.poles.len() {
            let den = z - self.poles[j];
            if den.norm() == 0.0 {
                return Err(Error::SingularResolvent { z, detail: "evaluation at a pole".into() });
            }
            acc += self.c[j] * self.b[j] / den;
        }
        Ok(acc)
    }
}

/// Images `phi(lambda_j)` of the disk-side poles.
pub fn domain_poles(rom: &Rom) -> Result<Vec<C64>> {
    modal_form(rom)?.lambda.into_iter().map(|l| rom.map.phi(l)).collect()
}

/// Midpoint-map ROM as a continuous-time realization on the half-plane.
///
/// With `mu_j = phi(lambda_j)` and modal weights `c_j, b_j` of the disk
/// pencil, `G_r(z) = sum_j c_j b_j / (phi^{-1}(z) - lambda_j) + d_r` becomes
/// `c_hat^T (zI - diag(mu))^{-1} b_hat + d_hat` with
/// `c_hat_j = (h/4) (mu_j + 2/h) c_j`, `b_hat_j = -(mu_j + 2/h) b_j` and
/// `d_hat = d_r + (h/4) sum_j c_j b_hat_j`.
pub fn midpoint_realization(rom: &Rom) -> Result<DomainRealization> {
    if rom.map.kind() != "midpoint" || rom.framework != Framework::H2A {
        return Err(Error::Unsupported(format!(
            "mapped realization needs an h2a ROM on the midpoint map, got {} on {}",
            rom.framework,
            rom.map.kind()
        )));
    }
    let h = rom.map.h().expect("midpoint map has a step");
    let m = modal_form(rom)?;
    let poles: Vec<C64> = m.lambda.iter().map(|&l| rom.map.phi(l)).collect::<Result<_>>()?;
    let shift: Vec<C64> = poles.iter().map(|mu| mu + 2.0 / h).collect();
    let c: Vec<C64> = (0..poles.len()).map(|j| h / 4.0 * shift[j] * m.c[j]).collect();
    let b: Vec<C64> = (0..poles.len()).map(|j| -shift[j] * m.b[j]).collect();
    let d = rom.dr + h / 4.0 * (0..poles.len()).map(|j| m.c[j] * b[j]).sum::<C64>();
    Ok(DomainRealization { poles, b, c, d })
}
