use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Analyticity, TransferFunction};
use crate::error::{Error, Result};
use crate::C64;

/// `G(z) = sum_j residues[j] / (z - poles[j]) + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidueModel {
    pub poles: Vec<C64>,
    pub residues: Vec<C64>,
    pub d: C64,
}

impl PoleResidueModel {
    pub fn new(poles: Vec<C64>, residues: Vec<C64>, d: C64) -> Result<Self> {
        if poles.len() != residues.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} poles but {} residues",
                poles.len(),
                residues.len()
            )));
        }
        Ok(Self { poles, residues, d })
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }

    /// Random order-`r` rational with poles of modulus in `(1, 3]` (outside
    /// the closed unit disk), complex Gaussian residues and feedthrough.
    pub fn random_outside_disk(r: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cn = |rng: &mut ChaCha8Rng| {
            C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
        };
        let mut poles: Vec<C64> = Vec::with_capacity(r);
        while poles.len() < r {
            let rad = 1.0 + 2.0 * (1.0 - rng.random::<f64>());
            let ang = std::f64::consts::TAU * rng.random::<f64>();
            let p = C64::from_polar(rad, ang);
            // keep poles well separated so the instance is well conditioned
            if poles.iter().all(|q| (p - q).norm() > 0.2) {
                poles.push(p);
            }
        }
        let residues = (0..r).map(|_| cn(&mut rng)).collect();
        let d = cn(&mut rng);
        Self { poles, residues, d }
    }
}

impl TransferFunction for PoleResidueModel {
    fn name(&self) -> &str {
        "pole-residue"
    }

    fn eval(&self, z: C64) -> Result<C64> {
        let mut acc = self.d;
        for (p, r) in self.poles.iter().zip(&self.residues) {
            let den = z - p;
            if den.norm() == 0.0 {
                return Err(Error::SingularResolvent { z, detail: "evaluation at a pole".into() });
            }
            acc += r / den;
        }
        Ok(acc)
    }

    fn deriv(&self, z: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (p, r) in self.poles.iter().zip(&self.residues) {
            let den = z - p;
            if den.norm() == 0.0 {
                return Err(Error::SingularResolvent { z, detail: "evaluation at a pole".into() });
            }
            acc -= r / (den * den);
        }
        Ok(acc)
    }

    fn domain(&self) -> Analyticity {
        Analyticity::ExteriorOfPoles(self.poles.clone())
    }
}
