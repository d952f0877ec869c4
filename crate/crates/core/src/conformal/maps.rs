use super::{ConformalMap, MapSpec, PolyFraction};
use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

const IN_DISK: f64 = 1.0 - 1e-12;
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn check_in_disk(map: &'static str, z: C64, s: C64) -> Result<C64> {
    // closed forms are exact; allow boundary points up to roundoff
    if s.norm() <= 1.0 + 1e-8 {
        Ok(s)
    } else {
        Err(Error::NotInImage { map, z })
    }
}

fn check_h(h: f64) -> Result<f64> {
    if h.is_finite() && h > 0.0 {
        Ok(h)
    } else {
        Err(Error::Config(format!("time step h must be positive, got {h}")))
    }
}

/// `phi(s) = (1 + s) / (1 - s)`: disk onto the open right half-plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moebius;

impl Moebius {
    fn den(s: C64) -> Result<C64> {
        let d = ONE - s;
        if d.norm() == 0.0 {
            return Err(Error::MapPole { map: "moebius_halfplane", s });
        }
        Ok(d)
    }
}

impl ConformalMap for Moebius {
    fn kind(&self) -> &'static str {
        "moebius_halfplane"
    }

    fn spec(&self) -> MapSpec {
        MapSpec::new(self.kind())
    }

    fn phi(&self, s: C64) -> Result<C64> {
        Ok((ONE + s) / Self::den(s)?)
    }

    fn dphi(&self, s: C64) -> Result<C64> {
        let d = Self::den(s)?;
        Ok(2.0 / (d * d))
    }

    fn d2phi(&self, s: C64) -> Result<C64> {
        let d = Self::den(s)?;
        Ok(4.0 / (d * d * d))
    }

    fn sqrt_dphi(&self, s: C64) -> Result<C64> {
        Ok(std::f64::consts::SQRT_2 / Self::den(s)?)
    }

    fn phi_inv(&self, z: C64) -> Result<C64> {
        let s = self.phi_inv_continued(z)?;
        check_in_disk(self.kind(), z, s)
    }

    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        if (z + 1.0).norm() == 0.0 {
            return Err(Error::MapPole { map: "moebius_halfplane", s: z });
        }
        Ok((z - 1.0) / (z + 1.0))
    }

    fn poly_fraction(&self) -> PolyFraction {
        PolyFraction { alpha: vec![1.0, 1.0], beta: vec![1.0, -1.0] }
    }

    fn singular_angles(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// Implicit Euler: `phi(s) = (1 - s) / h`, the disk of radius `1/h`
/// centred at `1/h`.
#[derive(Debug, Clone, Copy)]
pub struct ImplicitEuler {
    h: f64,
}

impl ImplicitEuler {
    pub fn new(h: f64) -> Result<Self> {
        Ok(Self { h: check_h(h)? })
    }
}

impl ConformalMap for ImplicitEuler {
    fn kind(&self) -> &'static str {
        "implicit_euler"
    }

    fn h(&self) -> Option<f64> {
        Some(self.h)
    }

    fn spec(&self) -> MapSpec {
        MapSpec::new(self.kind()).with_h(self.h)
    }

    fn phi(&self, s: C64) -> Result<C64> {
        Ok((ONE - s) / self.h)
    }

    fn dphi(&self, _s: C64) -> Result<C64> {
        Ok(C64::new(-1.0 / self.h, 0.0))
    }

    fn d2phi(&self, _s: C64) -> Result<C64> {
        Ok(C64::new(0.0, 0.0))
    }

    fn sqrt_dphi(&self, _s: C64) -> Result<C64> {
        Ok(I / self.h.sqrt())
    }

    fn phi_inv(&self, z: C64) -> Result<C64> {
        check_in_disk(self.kind(), z, self.phi_inv_continued(z)?)
    }

    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        Ok(ONE - self.h * z)
    }

    fn poly_fraction(&self) -> PolyFraction {
        PolyFraction { alpha: vec![1.0 / self.h, -1.0 / self.h], beta: vec![1.0] }
    }
}

/// Implicit midpoint / Tustin: `phi(s) = (2/h) (1 - s) / (1 + s)`, again
/// the right half-plane.
#[derive(Debug, Clone, Copy)]
pub struct Midpoint {
    h: f64,
}

impl Midpoint {
    pub fn new(h: f64) -> Result<Self> {
        Ok(Self { h: check_h(h)? })
    }

    fn den(s: C64) -> Result<C64> {
        let d = ONE + s;
        if d.norm() == 0.0 {
            return Err(Error::MapPole { map: "midpoint", s });
        }
        Ok(d)
    }
}

impl ConformalMap for Midpoint {
    fn kind(&self) -> &'static str {
        "midpoint"
    }

    fn h(&self) -> Option<f64> {
        Some(self.h)
    }

    fn spec(&self) -> MapSpec {
        MapSpec::new(self.kind()).with_h(self.h)
    }

    fn phi(&self, s: C64) -> Result<C64> {
        Ok((2.0 / self.h) * (ONE - s) / Self::den(s)?)
    }

    fn dphi(&self, s: C64) -> Result<C64> {
        let d = Self::den(s)?;
        Ok(-4.0 / (self.h * d * d))
    }

    fn d2phi(&self, s: C64) -> Result<C64> {
        let d = Self::den(s)?;
        Ok(8.0 / (self.h * d * d * d))
    }

    fn sqrt_dphi(&self, s: C64) -> Result<C64> {
        Ok(2.0 * I / (self.h.sqrt() * Self::den(s)?))
    }

    fn phi_inv(&self, z: C64) -> Result<C64> {
        check_in_disk(self.kind(), z, self.phi_inv_continued(z)?)
    }

    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        let den = 2.0 + self.h * z;
        if den.norm() == 0.0 {
            return Err(Error::MapPole { map: "midpoint", s: z });
        }
        Ok((2.0 - self.h * z) / den)
    }

    fn poly_fraction(&self) -> PolyFraction {
        PolyFraction { alpha: vec![2.0 / self.h, -2.0 / self.h], beta: vec![1.0, 1.0] }
    }

    fn singular_angles(&self) -> Vec<f64> {
        vec![std::f64::consts::PI]
    }
}

/// BDF2: `phi(s) = (s^2/2 - 2 s + 3/2) / h`.
#[derive(Debug, Clone, Copy)]
pub struct Bdf2 {
    h: f64,
}

impl Bdf2 {
    pub fn new(h: f64) -> Result<Self> {
        Ok(Self { h: check_h(h)? })
    }
}

impl ConformalMap for Bdf2 {
    fn kind(&self) -> &'static str {
        "bdf2"
    }

    fn h(&self) -> Option<f64> {
        Some(self.h)
    }

    fn spec(&self) -> MapSpec {
        MapSpec::new(self.kind()).with_h(self.h)
    }

    fn phi(&self, s: C64) -> Result<C64> {
        Ok((s * s / 2.0 - 2.0 * s + 1.5) / self.h)
    }

    fn dphi(&self, s: C64) -> Result<C64> {
        Ok((s - 2.0) / self.h)
    }

    fn d2phi(&self, _s: C64) -> Result<C64> {
        Ok(C64::new(1.0 / self.h, 0.0))
    }

    fn sqrt_dphi(&self, s: C64) -> Result<C64> {
        // Re(2 - s) > 0 on the closed disk, so the principal root is analytic there.
        Ok(I * ((2.0 - s) / self.h).sqrt())
    }

    fn phi_inv(&self, z: C64) -> Result<C64> {
        check_in_disk(self.kind(), z, self.phi_inv_continued(z)?)
    }

    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        Ok(2.0 - (2.0 * self.h * z + 1.0).sqrt())
    }

    fn poly_fraction(&self) -> PolyFraction {
        let h = self.h;
        PolyFraction { alpha: vec![1.5 / h, -2.0 / h, 0.5 / h], beta: vec![1.0] }
    }
}

/// BDF4: `phi(s) = (s^4/4 - 4 s^3/3 + 3 s^2 - 4 s + 25/12) / h`.
///
/// `phi'(s) h = (s - 2)(s^2 - 2 s + 2)` vanishes only at `2` and `1 ± i`,
/// all outside the closed disk.
#[derive(Debug, Clone, Copy)]
pub struct Bdf4 {
    h: f64,
}

impl Bdf4 {
    pub fn new(h: f64) -> Result<Self> {
        Ok(Self { h: check_h(h)? })
    }

    /// All four roots of `phi(s) = z`, Newton-polished, sorted by modulus.
    pub fn preimages(&self, z: C64) -> Result<Vec<C64>> {
        // monic: s^4 - 16/3 s^3 + 12 s^2 - 16 s + (25/3 - 4 h z)
        let c = [C64::new(25.0 / 3.0, 0.0) - 4.0 * self.h * z, (-16.0).into(), 12.0.into(), (-16.0 / 3.0).into()];
        let comp = faer::Mat::from_fn(4, 4, |i, j| {
            if j == 3 {
                -c[i]
            } else if i == j + 1 {
                ONE
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mut roots = linalg::eigenvalues(&comp)?;
        for r in roots.iter_mut() {
            for _ in 0..3 {
                let f = self.phi(*r)? - z;
                let d = self.dphi(*r)?;
                if d.norm() == 0.0 {
                    break;
                }
                let step = f / d;
                *r -= step;
                if step.norm() <= 1e-16 * r.norm().max(1.0) {
                    break;
                }
            }
        }
        roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        Ok(roots)
    }
}

impl ConformalMap for Bdf4 {
    fn kind(&self) -> &'static str {
        "bdf4"
    }

    fn h(&self) -> Option<f64> {
        Some(self.h)
    }

    fn spec(&self) -> MapSpec {
        MapSpec::new(self.kind()).with_h(self.h)
    }

    fn phi(&self, s: C64) -> Result<C64> {
        let p = (((s / 4.0 - 4.0 / 3.0) * s + 3.0) * s - 4.0) * s + 25.0 / 12.0;
        Ok(p / self.h)
    }

    fn dphi(&self, s: C64) -> Result<C64> {
        Ok((((s - 4.0) * s + 6.0) * s - 4.0) / self.h)
    }

    fn d2phi(&self, s: C64) -> Result<C64> {
        Ok(((3.0 * s - 8.0) * s + 6.0) / self.h)
    }

    fn sqrt_dphi(&self, s: C64) -> Result<C64> {
        // -(2 - s)(1 + i - s)(1 - i - s) / h, each factor's principal root is
        // analytic on the closed disk (none crosses the negative real axis).
        let a = (2.0 - s).sqrt();
        let b = (C64::new(1.0, 1.0) - s).sqrt();
        let c = (C64::new(1.0, -1.0) - s).sqrt();
        Ok(I * a * b * c / self.h.sqrt())
    }

    fn phi_inv(&self, z: C64) -> Result<C64> {
        let roots = self.preimages(z)?;
        let inside: Vec<C64> = roots.into_iter().filter(|r| r.norm() < IN_DISK).collect();
        match inside.as_slice() {
            [s] => Ok(*s),
            _ => Err(Error::NotInImage { map: "bdf4", z }),
        }
    }

    /// Near `∂A` the continued inverse is the smallest-modulus root; the
    /// other three stay at modulus above 1.7 there.
    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        let roots = self.preimages(z)?;
        let (s0, s1) = (roots[0], roots[1]);
        if s0.norm() < 1.25 && s1.norm() > s0.norm() * 1.1 {
            Ok(s0)
        } else {
            Err(Error::NotInImage { map: "bdf4", z })
        }
    }

    fn poly_fraction(&self) -> PolyFraction {
        let h = self.h;
        PolyFraction {
            alpha: vec![25.0 / (12.0 * h), -4.0 / h, 3.0 / h, -4.0 / (3.0 * h), 1.0 / (4.0 * h)],
            beta: vec![1.0],
        }
    }
}

/// `phi(s) = a s + b`. With `a = 1, b = 0` the E2 and H2 weights agree.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    a: f64,
    b: f64,
}

impl Affine {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("affine map needs finite a != 0, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }
}

impl ConformalMap for Affine {
    fn kind(&self) -> &'static str {
        "affine"
    }

    fn spec(&self) -> MapSpec {
        MapSpec { a: Some(self.a), b: Some(self.b), ..MapSpec::new(self.kind()) }
    }

    fn phi(&self, s: C64) -> Result<C64> {
        Ok(self.a * s + self.b)
    }

    fn dphi(&self, _s: C64) -> Result<C64> {
        Ok(C64::new(self.a, 0.0))
    }

    fn d2phi(&self, _s: C64) -> Result<C64> {
        Ok(C64::new(0.0, 0.0))
    }

    fn sqrt_dphi(&self, _s: C64) -> Result<C64> {
        Ok(C64::new(self.a, 0.0).sqrt())
    }

    fn phi_inv(&self, z: C64) -> Result<C64> {
        check_in_disk(self.kind(), z, self.phi_inv_continued(z)?)
    }

    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        Ok((z - self.b) / self.a)
    }

    fn poly_fraction(&self) -> PolyFraction {
        PolyFraction { alpha: vec![self.b, self.a], beta: vec![1.0] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::schwarz_reflect;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn centre_values() {
        assert_eq!(ImplicitEuler::new(1.0).unwrap().phi(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(Midpoint::new(1.0).unwrap().phi(c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        let b2 = Bdf2::new(1.0).unwrap();
        assert_eq!(b2.phi(c(0.0, 0.0)).unwrap(), c(1.5, 0.0));
        assert_eq!(b2.dphi(c(0.0, 0.0)).unwrap(), c(-2.0, 0.0));
    }

    #[test]
    fn closed_form_inverses() {
        for h in [0.001, 0.3, 2.0] {
            let b2 = Bdf2::new(h).unwrap();
            assert!(b2.phi_inv(c(1.5 / h, 0.0)).unwrap().norm() < 1e-12);
        }
        assert!(Midpoint::new(1.0).unwrap().phi_inv(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let b4 = Bdf4::new(0.001).unwrap();
        let s = c(0.3, 0.2);
        let back = b4.phi_inv(b4.phi(s).unwrap()).unwrap();
        assert!((back - s).norm() < 1e-8, "{back}");
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(Moebius.phi(c(1.0, 0.0)), Err(Error::MapPole { .. })));
        assert!(matches!(Midpoint::new(1.0).unwrap().phi(c(-1.0, 0.0)), Err(Error::MapPole { .. })));
        assert!(matches!(Midpoint::new(0.5).unwrap().phi_inv(c(-4.0, 0.0)), Err(Error::MapPole { .. })));
    }

    #[test]
    fn bdf4_rejects_points_outside_image() {
        let b4 = Bdf4::new(1.0).unwrap();
        let far = b4.phi(c(1.5, 0.0)).unwrap();
        assert!(matches!(b4.phi_inv(far), Err(Error::NotInImage { .. })));
    }

    #[test]
    fn reflection_examples() {
        for h in [0.1, 1.0, 3.0] {
            let m = Midpoint::new(h).unwrap();
            let a = schwarz_reflect(&m, c(1.0, 2.0)).unwrap();
            assert!((a - c(-1.0, 2.0)).norm() < 1e-12, "{a}");
        }
        let ie = ImplicitEuler::new(1.0).unwrap();
        assert!((schwarz_reflect(&ie, c(2.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        assert!(matches!(schwarz_reflect(&ie, c(1.0, 0.0)), Err(Error::ReflectionAtCenter(_))));
    }

    #[test]
    fn invalid_parameters() {
        assert!(ImplicitEuler::new(0.0).is_err());
        assert!(Bdf4::new(-1.0).is_err());
        assert!(Affine::new(0.0, 1.0).is_err());
    }
}
