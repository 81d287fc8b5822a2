use decay_core::besov::phi_bump;
use decay_core::characterization::norm_ratio;
use decay_core::examples::{example_v0, pure_power};
use decay_core::indicators::{decay_character, default_r_search, phi, RhoGrid};
use decay_core::numerics::{LogScalar, TimeGrid};
use decay_core::oracle::{crosscheck_evolution, crosscheck_phi};
use decay_core::profiles::{Component, PowerSegment, RadialProfile};
use decay_core::semigroup::{evolved_l2_norm, Symbol};
use proptest::prelude::*;

mod common;
use common::piecewise;

fn rel(a: LogScalar, b: LogScalar) -> f64 {
    if a.is_zero() && b.is_zero() {
        0.0
    } else {
        a.rel_diff(b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn characters_are_ordered((p, r0) in piecewise()) {
        let rep = decay_character(&p, default_r_search(p.dimension()), &RhoGrid::auto(&p)).unwrap();
        prop_assert!(rep.ordered(), "{rep:?}");
        prop_assert!((rep.r_plus.value(p.dimension()) - r0).abs() < 0.02, "{rep:?}");
    }

    #[test]
    fn lacunary_characters_are_ordered(n in 1u32..=3, shift in 0.0f64..2.0) {
        let r = -(n as f64) / 2.0 + 0.2 + shift;
        let depth = 24 + libm::ceil(3.0 / (2.0 * r + n as f64)) as u32;
        let (p, meta) = example_v0(n, r, depth).unwrap();
        let grid = meta.rho_grid;
        let rep = decay_character(&p, default_r_search(n), &grid).unwrap();
        prop_assert!(rep.ordered(), "{rep:?}");
        prop_assert!((rep.r_plus.value(n) - r).abs() < 0.02, "{rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_scales_with_amplitude_squared((p, _) in piecewise(), k in -300i64..300, r in -1.0f64..2.0, u in -40.0f64..4.0) {
        let c = LogScalar::exp2(k as f64);
        let q = p.scaled(c).unwrap();
        prop_assert!(rel(phi(&q, r, u), c * c * phi(&p, r, u)) < 1e-12);
        prop_assert!(rel(q.l2_norm(), c * p.l2_norm()) < 1e-12);
    }

    #[test]
    fn phi_adds_over_components((a, _) in piecewise(), h in -5.0f64..5.0, r in -0.5f64..1.0, u in -40.0f64..4.0) {
        let n = a.dimension();
        let b = Component::from_segments(vec![PowerSegment::new(-20.0, -1.0, h, r, 0)]);
        let both = RadialProfile::new(n, vec![a.components()[0].clone(), b.clone()], "pair").unwrap();
        let lone = RadialProfile::new(n, vec![b], "b").unwrap();
        let sum = phi(&a, 0.0, u) + phi(&lone, 0.0, u);
        prop_assert!(rel(phi(&both, 0.0, u), sum) < 1e-12);
    }

    #[test]
    fn evolution_is_nonincreasing((p, _) in piecewise(), alpha in 0.3f64..2.5, t in 0.0f64..1e4, dt in 0.0f64..1e4) {
        let sym = Symbol::fractional(alpha, 1).unwrap();
        let a = evolved_l2_norm(&p, &sym, t).unwrap();
        let b = evolved_l2_norm(&p, &sym, t + dt).unwrap();
        prop_assert!(b <= a * LogScalar::from_f64(1.0 + 1e-9));
    }

    #[test]
    fn bumps_sum_to_one(u in -40.0f64..40.0) {
        let lambda = libm::exp2(u);
        let s: f64 = (-45..=45).map(|j| phi_bump(lambda * libm::exp2(-j as f64))).sum();
        prop_assert!((s - 1.0).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_match_oracle((p, _) in piecewise(), r in -1.0f64..2.0, u in -40.0f64..4.0, alpha in 0.5f64..2.0, lt in -2.0f64..6.0) {
        let rep = crosscheck_phi(&p, r, u).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
        let sym = Symbol::fractional(alpha, 1).unwrap();
        let rep = crosscheck_evolution(&p, &sym, libm::pow(10.0, lt)).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn norm_ratio_ignores_amplitude(r0 in -1.0f64..1.0, k in prop::sample::select(vec![-6i32, 6])) {
        let (p, _) = pure_power(3, r0).unwrap();
        let sigma = (r0 + 1.5) / 2.0;
        let grid = TimeGrid::new(-2.0, 12.0, 8).unwrap();
        let sym = Symbol::heat(1);
        let base = norm_ratio(&p, &sym, sigma, (-64, 8), &grid).unwrap();
        let q = p.scaled(LogScalar::from_f64(libm::pow(10.0, k as f64))).unwrap();
        let moved = norm_ratio(&q, &sym, sigma, (-64, 8), &grid).unwrap();
        prop_assert!((moved.ratio / base.ratio - 1.0).abs() <= 1e-12, "{base:?} {moved:?}");
    }
}
