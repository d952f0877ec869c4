//! Greedy barycentric rational approximation (AAA, no Lawson phase).
//!
//! `R(z) = sum_j w_j g_j / (z - z_j) / sum_j w_j / (z - z_j)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{relative_error, DiskApproximant, DiskFunction, QuadratureSpec};
use crate::linalg::{self, CMat};
use crate::C64;

/// Minimal singular values closer than this (relative) are reported.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarycentricModel {
    pub support: Vec<C64>,
    pub weights: Vec<C64>,
    pub values: Vec<C64>,
    /// Largest residual over the sample set after each greedy step.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<f64>,
}

impl BarycentricModel {
    pub fn constant(z: C64, g: C64) -> Self {
        Self { support: vec![z], weights: vec![C64::new(1.0, 0.0)], values: vec![g], residuals: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        bary_eval(self, z)
    }
}

/// Evaluates the barycentric formula. At a support point the stored value
/// is returned directly.
pub fn bary_eval(model: &BarycentricModel, z: C64) -> C64 {
    if let Some(j) = model.support.iter().position(|&zj| zj == z) {
        return model.values[j];
    }
    if model.support.len() == 1 && model.weights[0].norm() != 0.0 {
        return model.values[0];
    }
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    for j in 0..model.support.len() {
        let t = model.weights[j] / (z - model.support[j]);
        num += t * model.values[j];
        den += t;
    }
    num / den
}

impl DiskApproximant for BarycentricModel {
    fn disk_eval(&self, s: C64) -> Result<C64> {
        let v = bary_eval(self, s);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singular(format!("barycentric denominator vanishes at {s}")))
        }
    }
}

/// Greedy AAA fit with at most `max_degree + 1` support points. Stops once
/// the largest residual over the samples is at most `tol * max |values|`.
pub fn aaa_fit(samples: &[C64], values: &[C64], max_degree: usize, tol: f64) -> Result<BarycentricModel> {
    let n = samples.len();
    if values.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} samples but {} values", values.len())));
    }
    if n < max_degree + 2 {
        return Err(Error::Config(format!("degree {max_degree} needs at least {} samples, got {n}", max_degree + 2)));
    }
    if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Config(format!("non-finite value at sample {i}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| samples[a].re.total_cmp(&samples[b].re).then(samples[a].im.total_cmp(&samples[b].im)));
    if let Some(w) = order.windows(2).find(|w| samples[w[0]] == samples[w[1]]) {
        return Err(Error::DegenerateSamples(w[1]));
    }

    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mean = values.iter().sum::<C64>() / n as f64;
    let mut approx = vec![mean; n];
    let mut in_support = vec![false; n];
    let mut support: Vec<usize> = Vec::new();
    let mut weights: Vec<C64> = Vec::new();
    let mut residuals = Vec::new();

    loop {
        let (next, worst) = (0..n)
            .filter(|&i| !in_support[i])
            .map(|i| (i, (values[i] - approx[i]).norm()))
            .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !support.is_empty() {
            residuals.push(worst.max(0.0));
        }
        let done = support.len() > max_degree || worst <= tol * scale;
        if (done && !support.is_empty()) || next == usize::MAX {
            break;
        }
        in_support[next] = true;
        support.push(next);

        let rest: Vec<usize> = (0..n).filter(|&i| !in_support[i]).collect();
        let m = support.len();
        let loewner = CMat::from_fn(rest.len(), m, |i, j| {
            let (zi, zj) = (samples[rest[i]], samples[support[j]]);
            (values[rest[i]] - values[support[j]]) / (zi - zj)
        });
        weights = if m == 1 {
            vec![C64::new(1.0, 0.0)]
        } else {
            let (w, smin, snext) = linalg::min_right_singular_vector(&loewner)?;
            if snext - smin <= TIE_TOL * snext.max(f64::MIN_POSITIVE) {
                log::warn!("AAA step {m}: smallest singular value is not simple ({smin:e}, {snext:e})");
            }
            w
        };
        for &i in &rest {
            let mut num = C64::new(0.0, 0.0);
            let mut den = C64::new(0.0, 0.0);
            for (j, &k) in support.iter().enumerate() {
                let t = weights[j] / (samples[i] - samples[k]);
                num += t * values[k];
                den += t;
            }
            approx[i] = num / den;
        }
        for &k in &support {
            approx[k] = values[k];
        }
    }

    if weights.iter().all(|w| w.norm() == 0.0) {
        return Err(Error::Svd("all barycentric weights vanish".into()));
    }
    Ok(BarycentricModel {
        support: support.iter().map(|&k| samples[k]).collect(),
        weights,
        values: support.iter().map(|&k| values[k]).collect(),
        residuals,
    })
}

/// Log-spaced unit-circle grid `exp(+-i pi theta)`, `theta` logarithmically
/// spaced in `[theta_min, 1]` with `n` points per half. The point at
/// `theta = 1` is shared by both halves and kept once.
pub fn log_circle_samples(n: usize, theta_min: f64) -> Vec<C64> {
    if n == 0 {
        return vec![];
    }
    let (lo, hi) = (theta_min.log10(), 0.0_f64);
    let thetas: Vec<f64> = (0..n)
        .map(|k| if n == 1 { 1.0 } else { 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64) })
        .collect();
    let mut out = Vec::with_capacity(2 * n - 1);
    for &t in &thetas {
        out.push(C64::from_polar(1.0, std::f64::consts::PI * t));
    }
    for &t in &thetas[..n - 1] {
        out.push(C64::from_polar(1.0, -std::f64::consts::PI * t));
    }
    out
}

/// The default comparison grid: 500 points per half on `[1e-7, 1]`.
pub fn default_circle_samples() -> Vec<C64> {
    log_circle_samples(500, 1e-7)
}

/// Samples `F` on `samples` and fits it.
pub fn aaa_fit_disk_function(
    f: &DiskFunction,
    samples: &[C64],
    max_degree: usize,
    tol: f64,
) -> Result<BarycentricModel> {
    let values = samples.iter().map(|&s| f.eval(s)).collect::<Result<Vec<_>>>()?;
    aaa_fit(samples, &values, max_degree, tol)
}

/// Relative Hardy-space error of a barycentric fit against `F`.
pub fn compare_on_domain(model: &BarycentricModel, f: &DiskFunction, q: &QuadratureSpec) -> Result<f64> {
    relative_error(f, model, &f.quadrature(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn circle(n: usize) -> Vec<C64> {
        (0..n).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)).collect()
    }

    #[test]
    fn simple_pole() {
        let z = circle(50);
        let v: Vec<C64> = z.iter().map(|&z| 1.0 / (z - 2.0)).collect();
        let m = aaa_fit(&z, &v, 2, 0.0).unwrap();
        let worst = z.iter().zip(&v).map(|(&z, &v)| (bary_eval(&m, z) - v).norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-12, "{worst:e}");
    }

    #[test]
    fn constant_needs_one_support() {
        let z = circle(10);
        let m = aaa_fit(&z, &vec![c(2.0, -1.0); 10], 5, 1e-13).unwrap();
        assert_eq!(m.support.len(), 1);
        assert_eq!(bary_eval(&m, c(0.3, 0.2)), c(2.0, -1.0));
    }

    #[test]
    fn interpolates_at_support() {
        let z = circle(30);
        let v: Vec<C64> = z.iter().map(|z| z.exp()).collect();
        let m = aaa_fit(&z, &v, 4, 0.0).unwrap();
        for (zj, gj) in m.support.iter().zip(&m.values) {
            assert_eq!(bary_eval(&m, *zj), *gj);
        }
        assert_eq!(m.support.len(), 5);
    }

    #[test]
    fn duplicate_samples_rejected() {
        let z = vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(-1.0, 0.0)];
        assert!(matches!(aaa_fit(&z, &[c(1.0, 0.0); 4], 1, 0.0), Err(Error::DegenerateSamples(_))));
        assert!(matches!(aaa_fit(&z[..2], &[c(1.0, 0.0); 2], 1, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn circle_grid() {
        let g = default_circle_samples();
        assert_eq!(g.len(), 999);
        assert!(g.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert!((g[0] - C64::from_polar(1.0, std::f64::consts::PI * 1e-7)).norm() < 1e-20);
        assert!((g[499] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn json_layout() {
        let m = BarycentricModel::constant(c(1.0, 0.0), c(0.5, 0.25));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"support":[[1.0,0.0]],"weights":[[1.0,0.0]],"values":[[0.5,0.25]]}"#);
        let back: BarycentricModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
