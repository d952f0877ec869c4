//! Adaptive Gauss-Kronrod (7/15) quadrature over `[0, 2 pi]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

const TAU: f64 = std::f64::consts::TAU;

// Kronrod abscissae in decreasing order; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the number of panels; a power of two.
    pub max_panels: usize,
    /// Angles that must be panel breakpoints (never quadrature nodes).
    pub exclusion_angles: Vec<f64>,
    pub initial_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_panels: 1 << 16, exclusion_angles: Vec::new(), initial_panels: 16 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if !self.max_panels.is_power_of_two() {
            return Err(Error::Config(format!("max_panels = {} is not a power of two", self.max_panels)));
        }
        if self.initial_panels == 0 || self.initial_panels > self.max_panels {
            return Err(Error::Config("initial_panels must be in 1..=max_panels".into()));
        }
        Ok(())
    }

    pub fn with_exclusions(mut self, angles: impl IntoIterator<Item = f64>) -> Self {
        self.exclusion_angles.extend(angles);
        self
    }
}

#[derive(Debug, Clone)]
pub struct Quadrature<const K: usize> {
    pub values: [C64; K],
    pub errors: [f64; K],
    pub panels: usize,
    pub evaluations: usize,
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    val: [C64; K],
    err: [f64; K],
}

fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut x = [0.0; 15];
    for k in 0..7 {
        x[2 * k] = c - r * XGK[k];
        x[2 * k + 1] = c + r * XGK[k];
    }
    x[14] = c;
    x
}

fn rule<const K: usize>(a: f64, b: f64, f: &[[C64; K]]) -> Panel<K> {
    let r = 0.5 * (b - a);
    let mut val = [C64::new(0.0, 0.0); K];
    let mut err = [0.0; K];
    for k in 0..K {
        let mut kr = f[14][k] * WGK[7];
        let mut g = f[14][k] * WG[3];
        for j in 0..7 {
            let pair = f[2 * j][k] + f[2 * j + 1][k];
            kr += pair * WGK[j];
            if j % 2 == 1 {
                g += pair * WG[j / 2];
            }
        }
        val[k] = kr * r;
        err[k] = ((kr - g) * r).norm();
    }
    Panel { a, b, val, err }
}

fn breakpoints(spec: &QuadratureSpec) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=spec.initial_panels).map(|k| TAU * k as f64 / spec.initial_panels as f64).collect();
    for &t in &spec.exclusion_angles {
        let t = t.rem_euclid(TAU);
        if pts.iter().all(|p| (p - t).abs() > 1e-12) {
            pts.push(t);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// Integrates `f(theta)` over `[0, 2 pi]` (no `1/(2 pi)` factor).
///
/// Panels whose Kronrod-minus-Gauss estimate exceeds their length share
/// of the tolerance are bisected, all of them in one round; node
/// evaluations within a round run in parallel but are merged in a fixed
/// order, so the result does not depend on the thread count.
pub fn integrate<const K: usize, F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature<K>>
where
    F: Fn(f64) -> Result<[C64; K]> + Sync,
{
    spec.validate()?;
    let eval_panels = |ivals: &[(f64, f64)]| -> Result<Vec<Panel<K>>> {
        let xs: Vec<f64> = ivals.iter().flat_map(|&(a, b)| nodes(a, b)).collect();
        let fx = xs.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Ok(ivals.iter().zip(fx.chunks(15)).map(|(&(a, b), fv)| rule(a, b, fv)).collect())
    };
    let bp = breakpoints(spec);
    let init: Vec<(f64, f64)> = bp.windows(2).map(|w| (w[0], w[1])).collect();
    let mut evaluations = 15 * init.len();
    let mut panels = eval_panels(&init)?;
    loop {
        let mut total = [C64::new(0.0, 0.0); K];
        let mut err = [0.0; K];
        for p in &panels {
            for k in 0..K {
                total[k] += p.val[k];
                err[k] += p.err[k];
            }
        }
        let tol: [f64; K] = std::array::from_fn(|k| spec.abs_tol.max(spec.rel_tol * total[k].norm()));
        let done = (0..K).all(|k| err[k] <= tol[k]);
        let split: Vec<usize> = if done {
            Vec::new()
        } else {
            (0..panels.len())
                .filter(|&i| {
                    let p = &panels[i];
                    let share = (p.b - p.a) / TAU;
                    // stop refining below roundoff width
                    p.b - p.a > 1e-13 && (0..K).any(|k| p.err[k] > tol[k] * share)
                })
                .collect()
        };
        if done || split.is_empty() || panels.len() + split.len() > spec.max_panels {
            if !done {
                let worst = (0..K).map(|k| err[k] / tol[k]).fold(0.0, f64::max);
                let k = (0..K).map(|k| err[k] / tol[k]).position(|r| r == worst).unwrap_or(0);
                if worst > 10.0 {
                    return Err(Error::QuadratureNonConvergence {
                        estimate: err[k],
                        tolerance: tol[k],
                        panels: panels.len(),
                    });
                }
                log::warn!("quadrature stopped at {} panels with error {:e} > tol {:e}", panels.len(), err[k], tol[k]);
            }
            return Ok(Quadrature { values: total, errors: err, panels: panels.len(), evaluations });
        }
        let halves: Vec<(f64, f64)> = split
            .iter()
            .flat_map(|&i| {
                let (a, b) = (panels[i].a, panels[i].b);
                let m = 0.5 * (a + b);
                [(a, m), (m, b)]
            })
            .collect();
        evaluations += 15 * halves.len();
        let mut fresh = eval_panels(&halves)?.into_iter();
        let mut next = Vec::with_capacity(panels.len() + split.len());
        let mut si = split.iter().peekable();
        for (i, p) in panels.into_iter().enumerate() {
            if si.peek() == Some(&&i) {
                si.next();
                next.push(fresh.next().expect("two halves per split panel"));
                next.push(fresh.next().expect("two halves per split panel"));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}

/// `(1 / 2 pi) * integral of f(e^{i theta}) d theta` for vector-valued `f`.
pub fn circle_mean<const K: usize, F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature<K>>
where
    F: Fn(C64) -> Result<[C64; K]> + Sync,
{
    let mut q = integrate(|t| f(C64::from_polar(1.0, t)), spec)?;
    for k in 0..K {
        q.values[k] /= TAU;
        q.errors[k] /= TAU;
    }
    Ok(q)
}
