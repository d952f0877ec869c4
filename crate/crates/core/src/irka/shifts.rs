use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::C64;

/// Random initial shifts: unit direction of `0.1 N(0,1) + 0.1i N(0,1)`
/// scaled by an independent `U(0,1)` radius, in canonical order.
pub fn init_shifts(r: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(r);
    while out.len() < r {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let g = C64::new(0.1 * re, 0.1 * im);
        let u: f64 = rng.random();
        if g.norm() == 0.0 || u == 0.0 {
            continue;
        }
        out.push(g / g.norm() * u);
    }
    canonical_sort(&mut out);
    out
}

/// Lexicographic order by (real, imag), treating real parts that agree to
/// about 1e-8 as equal so conjugate pairs keep a stable order; remaining
/// ties go by modulus.
pub fn canonical_cmp(a: &C64, b: &C64) -> Ordering {
    let tol = 1e-8 * (1.0 + a.re.abs().max(b.re.abs()));
    if (a.re - b.re).abs() > tol {
        return a.re.total_cmp(&b.re);
    }
    a.im.total_cmp(&b.im).then(a.norm().total_cmp(&b.norm()))
}

pub fn canonical_sort(s: &mut [C64]) {
    s.sort_by(canonical_cmp);
}

/// `||new - P old|| / ||old||`, where `P` pairs every new shift with an old
/// one, closest pairs first. Eigensolvers return poles in arbitrary order
/// and near-tied real parts can swap places under the canonical sort, so
/// the metric must not depend on ordering.
pub fn shift_change(old: &[C64], new: &[C64]) -> f64 {
    let n = old.len().min(new.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, a) in old.iter().enumerate().take(n) {
        for (j, b) in new.iter().enumerate().take(n) {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let (mut used_old, mut used_new) = (vec![false; n], vec![false; n]);
    let mut sq = 0.0;
    for (d, i, j) in pairs {
        if !used_old[i] && !used_new[j] {
            used_old[i] = true;
            used_new[j] = true;
            sq += d * d;
        }
    }
    let base = linalg::norm2(old);
    if base == 0.0 {
        sq.sqrt()
    } else {
        sq.sqrt() / base
    }
}

/// Moves any shift within 1e-12 of an earlier one by 1e-10 in a random
/// direction. Returns how many were moved.
pub fn jitter_coincident(s: &mut [C64], rng: &mut ChaCha8Rng) -> usize {
    let mut moved = 0;
    for i in 1..s.len() {
        while (0..i).any(|j| (s[i] - s[j]).norm() <= 1e-12) {
            let t = std::f64::consts::TAU * rng.random::<f64>();
            s[i] += C64::from_polar(1e-10, t);
            moved += 1;
        }
    }
    moved
}
