//! Finite-difference semi-discretization of
//! `w_t = Δw - conv (x w_x + y w_y) + 1_{x in input} u` on the unit square
//! with homogeneous Dirichlet data and output `y = <1_{x in output}, w>`.

use serde::{Deserialize, Serialize};

use super::state_space::{SparseMatrix, StateSpaceModel, SystemMatrix};
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvDiffConfig {
    /// Interior grid points per dimension.
    pub n0: usize,
    pub conv: f64,
    pub input_interval: [f64; 2],
    pub output_interval: [f64; 2],
}

impl Default for ConvDiffConfig {
    fn default() -> Self {
        Self { n0: 100, conv: 100.0, input_interval: [0.1, 0.3], output_interval: [0.7, 0.9] }
    }
}

impl ConvDiffConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n0 < 2 {
            return Err(Error::Config(format!("n0 must be >= 2, got {}", self.n0)));
        }
        for (name, [a, b]) in [("input_interval", self.input_interval), ("output_interval", self.output_interval)] {
            if !(0.0 < a && a <= b && b < 1.0) {
                return Err(Error::Config(format!("{name} [{a}, {b}] must lie in (0, 1)")));
            }
        }
        if !self.conv.is_finite() {
            return Err(Error::Config("conv must be finite".into()));
        }
        Ok(())
    }
}

/// Node `(i, j)` (x index `i`, y index `j`, both 0-based) is stored at
/// `i + n0 * j`, at coordinates `((i + 1) hs, (j + 1) hs)`.
pub fn build_conv_diff(cfg: &ConvDiffConfig) -> Result<StateSpaceModel> {
    cfg.validate()?;
    let n0 = cfg.n0;
    let n = n0 * n0;
    let hs = 1.0 / (n0 as f64 + 1.0);
    let lap = 1.0 / (hs * hs);
    let adv = cfg.conv / (2.0 * hs);
    let idx = |i: usize, j: usize| i + n0 * j;
    let mut t = Vec::with_capacity(5 * n);
    for j in 0..n0 {
        let y = (j as f64 + 1.0) * hs;
        for i in 0..n0 {
            let x = (i as f64 + 1.0) * hs;
            let k = idx(i, j);
            t.push((k, k, C64::new(-4.0 * lap, 0.0)));
            // centered differences: -conv x w_x -> -conv x (w_{i+1} - w_{i-1}) / (2 hs)
            if i + 1 < n0 {
                t.push((k, idx(i + 1, j), C64::new(lap - adv * x, 0.0)));
            }
            if i > 0 {
                t.push((k, idx(i - 1, j), C64::new(lap + adv * x, 0.0)));
            }
            if j + 1 < n0 {
                t.push((k, idx(i, j + 1), C64::new(lap - adv * y, 0.0)));
            }
            if j > 0 {
                t.push((k, idx(i, j - 1), C64::new(lap + adv * y, 0.0)));
            }
        }
    }
    let a = SparseMatrix::from_triplets(n, &t)?;
    let indicator = |[lo, hi]: [f64; 2]| -> Vec<C64> {
        (0..n)
            .map(|k| {
                let x = ((k % n0) as f64 + 1.0) * hs;
                C64::new(if lo <= x && x <= hi { 1.0 } else { 0.0 }, 0.0)
            })
            .collect()
    };
    let b = indicator(cfg.input_interval);
    let c = indicator(cfg.output_interval);
    Ok(StateSpaceModel::new(SystemMatrix::Sparse(a), b, c, C64::new(0.0, 0.0))?
        .with_name(format!("convdiff-n0{}-conv{}", n0, cfg.conv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::models::TransferFunction;

    fn cfg(n0: usize, conv: f64) -> ConvDiffConfig {
        ConvDiffConfig { n0, conv, ..Default::default() }
    }

    #[test]
    fn benchmark_size() {
        let m = build_conv_diff(&ConvDiffConfig::default()).unwrap();
        assert_eq!(m.n(), 10000);
        assert!(m.a().is_sparse());
    }

    #[test]
    fn small_laplacian_by_hand() {
        let m = build_conv_diff(&cfg(2, 0.0)).unwrap();
        let a = m.a().to_dense();
        // hs = 1/3, 1/hs^2 = 9; nodes 0..4 on a 2x2 grid
        let want = [
            [-36.0, 9.0, 9.0, 0.0],
            [9.0, -36.0, 0.0, 9.0],
            [9.0, 0.0, -36.0, 9.0],
            [0.0, 9.0, 9.0, -36.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[(i, j)].re - want[i][j]).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn pure_diffusion_is_symmetric_negative_definite() {
        for n0 in [3, 6, 10] {
            let a = build_conv_diff(&cfg(n0, 0.0)).unwrap().a().to_dense();
            let n = n0 * n0;
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(a[(i, j)], a[(j, i)]);
                }
            }
            for l in linalg::eigenvalues(&a).unwrap() {
                assert!(l.im.abs() < 1e-8 && l.re < 0.0, "{l}");
            }
        }
    }

    #[test]
    fn convection_terms_are_centered() {
        let m = build_conv_diff(&cfg(3, 100.0)).unwrap();
        let a = m.a().to_dense();
        let hs = 0.25;
        // node (1, 1) at x = y = 0.5 -> index 4
        let x = 0.5;
        assert!((a[(4, 5)].re - (16.0 - 100.0 * x / (2.0 * hs))).abs() < 1e-12);
        assert!((a[(4, 3)].re - (16.0 + 100.0 * x / (2.0 * hs))).abs() < 1e-12);
        assert!((a[(4, 7)].re - (16.0 - 100.0 * x / (2.0 * hs))).abs() < 1e-12);
    }

    #[test]
    fn indicator_vectors() {
        let m = build_conv_diff(&ConvDiffConfig::default()).unwrap();
        let hs = 1.0 / 101.0;
        let nb = m.b().iter().filter(|v| v.re == 1.0).count();
        let nc = m.c().iter().filter(|v| v.re == 1.0).count();
        // x_i = i hs, i = 11..=30 lie in [0.1, 0.3]; i = 71..=90 in [0.7, 0.9]
        assert_eq!(nb, 20 * 100);
        assert_eq!(nc, 20 * 100);
        assert!((0.1..=0.3).contains(&(11.0 * hs)) && !(0.1..=0.3).contains(&(10.0 * hs)));
    }

    #[test]
    fn invalid_configs() {
        assert!(build_conv_diff(&cfg(1, 0.0)).is_err());
        let bad = ConvDiffConfig { input_interval: [0.0, 0.3], ..Default::default() };
        assert!(matches!(build_conv_diff(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn sparse_matches_dense_evaluation() {
        let m = build_conv_diff(&cfg(8, 100.0)).unwrap();
        let d = m.to_dense_model();
        for z in [C64::new(1.0, 0.0), C64::new(100.0, 50.0), C64::new(5.0, -300.0)] {
            let a = m.eval(z).unwrap();
            let b = d.eval(z).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm(), "{a} vs {b}");
        }
    }
}
