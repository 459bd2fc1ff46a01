//! Property tests for the structural invariants: transform isometry,
//! convolution support, quadrature inequalities, projection idempotence,
//! and fitted-constant determinism.

use calderon_core::angular::AngularKernel;
use calderon_core::grid::{convolve, BoxGrid, GridFunction, C64};
use calderon_core::harness::fit_bound_constant;
use proptest::prelude::*;

fn grid16() -> BoxGrid {
    BoxGrid::new(16, 1.0, 2).unwrap()
}

fn complex_values(len: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im)),
        len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plancherel_is_an_isometry(vals in complex_values(16 * 16)) {
        let grid = grid16();
        let f = GridFunction::from_values(grid, vals).unwrap();
        let spatial = f.l2_norm();
        prop_assume!(spatial > 1e-6);
        let spectral = f.forward().unwrap().l2_norm();
        prop_assert!((spatial - spectral).abs() / spatial <= 1e-12);
    }

    #[test]
    fn transform_round_trip(vals in complex_values(16 * 16)) {
        let grid = grid16();
        let f = GridFunction::from_values(grid, vals).unwrap();
        let back = f.forward().unwrap().inverse().unwrap();
        let denom = f.l2_norm().max(1e-12);
        prop_assert!(f.sub(&back).unwrap().l2_norm() / denom <= 1e-12);
    }

    #[test]
    fn hoelder_pairing_bound(
        fv in complex_values(16 * 16),
        gv in complex_values(16 * 16),
        p in 1.5f64..6.0,
    ) {
        let grid = grid16();
        let f = GridFunction::from_values(grid, fv).unwrap();
        let g = GridFunction::from_values(grid, gv).unwrap();
        let q = p / (p - 1.0);
        let pairing = f.inner(&g).unwrap().norm();
        let bound = f.lp_norm(p).unwrap() * g.lp_norm(q).unwrap();
        prop_assert!(pairing <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn lp_norm_homogeneity(
        vals in complex_values(16 * 16),
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
        p in 1.0f64..8.0,
    ) {
        let grid = grid16();
        let f = GridFunction::from_values(grid, vals).unwrap();
        let alpha = C64::new(re, im);
        let lhs = f.scale(alpha).lp_norm(p).unwrap();
        let rhs = alpha.norm() * f.lp_norm(p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs.max(1.0));
    }

    #[test]
    fn convolution_respects_support_sums(shift in 0usize..4) {
        // both factors inside [-L/2, L/2): the product support never leaves
        // the Minkowski sum, so linear convolution shows no wrap-around
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let n = grid.n();
        let mut f = GridFunction::zeros(grid);
        for iy in (n / 2 - 3)..(n / 2 + 3) {
            for ix in (n / 2 - 3 + shift)..(n / 2 + 3 + shift) {
                f.values_mut()[iy * n + ix] = C64::new(1.0, -0.5);
            }
        }
        let conv = convolve(&f, &f).unwrap();
        let h = grid.spacing();
        let extent = (6 + shift) as f64 * h + h;
        for (idx, v) in conv.values().iter().enumerate() {
            let (x, y) = grid.position(idx);
            if x.abs() > 2.0 * extent || y.abs() > 2.0 * extent {
                prop_assert!(v.norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn fitted_constant_is_permutation_invariant(
        pairs in proptest::collection::vec((0.0f64..10.0, 0.1f64..10.0), 1..20),
        seed in 0u64..1000,
    ) {
        let (c, _) = fit_bound_constant(&pairs).unwrap();
        let mut shuffled = pairs.clone();
        // deterministic shuffle from the seed
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let (c2, _) = fit_bound_constant(&shuffled).unwrap();
        prop_assert_eq!(c.to_bits(), c2.to_bits());
    }

    #[test]
    fn moment_projection_is_idempotent(
        amps in proptest::collection::vec(-2.0f64..2.0, 6),
        k in 1u32..3,
    ) {
        let m = 128;
        let samples: Vec<f64> = (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                amps.iter()
                    .enumerate()
                    .map(|(h, a)| a * ((h as f64 + 1.0) * t).cos())
                    .sum()
            })
            .collect();
        let omega = AngularKernel::new(samples, k, "proptest").unwrap();
        let once = omega.project_moments();
        let twice = once.project_moments();
        for (a, b) in once.samples().iter().zip(twice.samples()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        // all order-k monomial moments vanish
        for g1 in 0..=k {
            prop_assert!(once.moment(g1, k - g1).abs() <= 1e-10);
        }
    }
}
