mod common;

use std::sync::Arc;

use common::{c, rel};
use conformal_h2::conformal::{Affine, ConformalMap, ImplicitEuler, Midpoint, Moebius};
use conformal_h2::hardy::{pole_residues, relative_error, DiskFunction, Framework, QuadratureSpec};
use conformal_h2::irka::{
    assemble_rom, build_loewner, domain_poles, irka_iterate, midpoint_realization, IrkaOptions,
};
use conformal_h2::models::{random_stable_model, HeatModel, PoleResidueModel, TransferFunction};
use conformal_h2::C64;
use proptest::prelude::*;

fn rational(seed: u64, order: usize) -> DiskFunction {
    DiskFunction::new(
        Framework::H2A,
        Arc::new(PoleResidueModel::random_outside_disk(order, seed)),
        Arc::new(Affine::new(1.0, 0.0).unwrap()),
    )
}

fn separated_shifts(raw: Vec<(f64, f64)>) -> Option<Vec<C64>> {
    let s: Vec<C64> = raw.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect();
    let ok = (0..s.len()).all(|i| (0..i).all(|j| (s[i] - s[j]).norm() > 0.05));
    ok.then_some(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// The assembled realization interpolates values and derivatives at every
    /// shift whatever the feedthrough.
    #[test]
    fn loewner_realization_is_hermite_interpolatory(
        heat in any::<bool>(),
        e2 in any::<bool>(),
        seed in 0u64..1000,
        raw in prop::collection::vec((0.0..0.9f64, 0.0..std::f64::consts::TAU), 1..=8),
        d in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let Some(shifts) = separated_shifts(raw) else { return Ok(()) };
        let fw = if e2 { Framework::E2 } else { Framework::H2A };
        let f = if heat {
            DiskFunction::new(fw, Arc::new(HeatModel), Arc::new(Moebius))
        } else {
            DiskFunction::new(fw, Arc::new(PoleResidueModel::random_outside_disk(10, seed)), Arc::new(Affine::new(1.0, 0.0).unwrap()))
        };
        let ld = build_loewner(&f, &shifts).unwrap();
        let rom = assemble_rom(&ld, c(d.0, d.1), f.map().clone(), fw).unwrap();
        for &s in &shifts {
            let (v, dv) = f.eval_with_deriv(s).unwrap();
            prop_assert!(rel(rom.disk_eval(s).unwrap(), v) <= 1e-8);
            prop_assert!(rel(rom.disk_deriv(s).unwrap(), dv) <= 1e-8);
        }
    }

    #[test]
    fn pole_residue_form_reconstructs_the_rom(
        seed in 0u64..1000,
        raw in prop::collection::vec((0.0..0.9f64, 0.0..std::f64::consts::TAU), 5),
        pts in prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU), 20),
    ) {
        let Some(shifts) = separated_shifts(raw) else { return Ok(()) };
        let f = rational(seed, 8);
        let rom = assemble_rom(&build_loewner(&f, &shifts).unwrap(), c(0.3, -0.1), f.map().clone(), Framework::H2A).unwrap();
        let pr = pole_residues(&rom).unwrap();
        for (r, t) in pts {
            let s = C64::from_polar(r, t);
            let sum = pr.iter().map(|p| p.residue / (s - p.pole)).sum::<C64>() + rom.dr;
            prop_assert!(rel(sum, rom.disk_eval(s).unwrap()) <= 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn exact_recovery(seed in 0u64..10_000, order in 1usize..=4) {
        let f = rational(seed, order);
        let q = QuadratureSpec::default();
        let mut good = 0;
        for s in 0..5 {
            let (rom, _) = irka_iterate(&f, order, &IrkaOptions { seed: s, max_iter: 50, ..Default::default() }).unwrap();
            if relative_error(&f, &rom, &q).unwrap() <= 1e-8 {
                good += 1;
            }
        }
        prop_assert!(good >= 4, "{good}/5 seeds recovered the order-{order} function");
    }

    #[test]
    fn shifts_stay_inside_the_disk(seed in 0u64..1000, r in 1usize..=6) {
        let f = DiskFunction::new(Framework::E2, Arc::new(HeatModel), Arc::new(Moebius));
        let (rom, report) = irka_iterate(&f, r, &IrkaOptions { seed, max_iter: 30, ..Default::default() }).unwrap();
        prop_assert!(rom.shifts.iter().all(|s| s.norm() < 1.0));
        for rec in &report.records {
            prop_assert!(rec.shifts.iter().all(|s| s.norm() < 1.0));
            prop_assert!(rec.shifts.windows(2).all(|w| conformal_h2::irka::canonical_cmp(&w[0], &w[1]).is_le()));
        }
    }

    #[test]
    fn implicit_euler_domain_form(seed in 0u64..1000, h in 0.1..2.0f64, s in (0.0..0.99f64, 0.0..std::f64::consts::TAU)) {
        let model: Arc<dyn TransferFunction> = Arc::new(random_stable_model(12, seed).unwrap());
        let map: Arc<dyn ConformalMap> = Arc::new(ImplicitEuler::new(h).unwrap());
        let f = DiskFunction::new(Framework::H2A, model, map);
        let (rom, _) = irka_iterate(&f, 3, &IrkaOptions { seed, max_iter: 30, ..Default::default() }).unwrap();
        let pr = pole_residues(&rom).unwrap();
        let mapped = domain_poles(&rom).unwrap();
        for (p, mu) in pr.iter().zip(&mapped) {
            prop_assert!(rel(*mu, (1.0 - p.pole) / h) <= 1e-12);
        }
        let z = (1.0 - C64::from_polar(s.0, s.1)) / h;
        let want = pr.iter().map(|p| p.residue / ((1.0 - h * z) - p.pole)).sum::<C64>() + rom.dr;
        prop_assert!(rel(rom.domain_eval(z).unwrap(), want) <= 1e-8);
    }

    #[test]
    fn midpoint_realization_matches(seed in 0u64..1000, h in 0.05..2.0f64, r in 1usize..=5) {
        let model: Arc<dyn TransferFunction> = Arc::new(random_stable_model(16, seed).unwrap());
        let f = DiskFunction::new(Framework::H2A, model, Arc::new(Midpoint::new(h).unwrap()));
        let (rom, _) = irka_iterate(&f, r, &IrkaOptions { seed, max_iter: 40, ..Default::default() }).unwrap();
        let real = midpoint_realization(&rom).unwrap();
        prop_assert!(real.poles.iter().all(|p| p.re < 0.0), "{:?}", real.poles);
        for k in 0..20 {
            let z = c(0.1 + 0.37 * k as f64, -3.0 + 0.31 * k as f64);
            prop_assert!(rel(real.eval(z).unwrap(), rom.domain_eval(z).unwrap()) <= 1e-8);
        }
    }
}
