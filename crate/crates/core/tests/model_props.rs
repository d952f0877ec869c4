mod common;

use common::c;
use conformal_h2::linalg;
use conformal_h2::models::{
    build_conv_diff, random_stable_model, ConvDiffConfig, HeatModel, PoleResidueModel, TransferFunction,
};
use conformal_h2::C64;
use proptest::prelude::*;

fn fd_check(m: &dyn TransferFunction, z: C64) -> Result<(), TestCaseError> {
    let step = 1e-6;
    let fd = (m.eval(z + step).unwrap() - m.eval(z - step).unwrap()) / (2.0 * step);
    let d = m.deriv(z).unwrap();
    prop_assert!((fd - d).norm() <= 1e-5 * d.norm().max(1e-6), "{}: {d} vs {fd} at {z}", m.name());
    Ok(())
}

fn right_half_plane() -> impl Strategy<Value = C64> {
    (0.05..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn heat_derivative(z in right_half_plane()) {
        fd_check(&HeatModel, z)?;
    }

    #[test]
    fn rational_derivative(seed in 0u64..1000, z in (-4.0..4.0f64, -4.0..4.0f64)) {
        let m = PoleResidueModel::random_outside_disk(5, seed);
        let z = c(z.0, z.1);
        prop_assume!(m.poles.iter().all(|p| (z - p).norm() > 0.1));
        fd_check(&m, z)?;
    }

    #[test]
    fn state_space_derivative(seed in 0u64..1000, n in 2usize..30, z in right_half_plane()) {
        fd_check(&random_stable_model(n, seed).unwrap(), z)?;
    }

    #[test]
    fn conv_diff_derivative(n0 in 3usize..10, conv in 0.0..200.0f64, z in right_half_plane()) {
        let m = build_conv_diff(&ConvDiffConfig { n0, conv, ..Default::default() }).unwrap();
        fd_check(&m, z)?;
    }

    #[test]
    fn sparse_and_dense_paths_agree(n0 in 2usize..=10, conv in 0.0..200.0f64, z in right_half_plane()) {
        let sparse = build_conv_diff(&ConvDiffConfig { n0, conv, ..Default::default() }).unwrap();
        let dense = sparse.to_dense_model();
        let (a, b) = (sparse.eval(z).unwrap(), dense.eval(z).unwrap());
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        let (da, db) = (sparse.deriv(z).unwrap(), dense.deriv(z).unwrap());
        prop_assert!((da - db).norm() <= 1e-12 * db.norm().max(1e-300));
    }

    #[test]
    fn pure_diffusion_is_symmetric_and_negative(n0 in 2usize..=10) {
        let m = build_conv_diff(&ConvDiffConfig { n0, conv: 0.0, ..Default::default() }).unwrap();
        let a = m.a().to_dense();
        let n = a.nrows();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(a[(i, j)], a[(j, i)]);
            }
        }
        for ev in linalg::eigenvalues(&a).unwrap() {
            prop_assert!(ev.im.abs() <= 1e-8 * ev.norm() && ev.re < 0.0, "{ev}");
        }
    }
}
