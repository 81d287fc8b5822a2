use super::*;
use crate::examples::{annulus_datum, example_u0_log, example_v0, example_w0, gaussian_datum, pure_power};
use crate::profiles::{Component, PowerSegment};

fn unit_ball() -> RadialProfile {
    let c = Component::from_segments(alloc::vec![PowerSegment::plateau(f64::NEG_INFINITY, 0.0, 0.0)]);
    RadialProfile::new(3, alloc::vec![c], "unit ball").unwrap()
}

#[test]
fn sphere_recursion() {
    for n in 1..8 {
        let v = omega(n).to_f64();
        assert!((v / crate::numerics::sphere_surface(n) - 1.0).abs() < 1e-13, "{n}");
    }
}

#[test]
fn phi_unit_ball() {
    let rep = crosscheck_phi(&unit_ball(), 0.0, -2.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    let ball = 4.0 * core::f64::consts::PI / 3.0;
    assert!((rep.brute_force.to_f64() / ball - 1.0).abs() < 1e-12);
}

#[test]
fn phi_examples() {
    let (v0, _) = example_v0(3, 0.0, 20).unwrap();
    assert!(crosscheck_phi(&v0, 0.0, -20.0).unwrap().pass);
    assert!(crosscheck_phi(&v0, 0.0, -20.5).unwrap().pass);
    let (u0, _) = example_u0_log(3, 0.0, -4.0).unwrap();
    for u in [-5.0, -40.0, -140.0] {
        let rep = crosscheck_phi(&u0, 0.0, u).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
    let (w0, meta) = example_w0(3, 0.5, 40).unwrap();
    for u in meta.structural_radii.iter().take(20) {
        let rep = crosscheck_phi(&w0, 0.5, *u).unwrap();
        assert!(rep.pass, "{u}: {rep:?}");
    }
    let (g, _) = gaussian_datum(3).unwrap();
    for u in [-31.0, -3.3, 0.0, 2.2, 6.0] {
        let rep = crosscheck_phi(&g, 0.0, u).unwrap();
        assert!(rep.pass, "{u}: {rep:?}");
    }
}

#[test]
fn phi_zero_profile() {
    let c = Component::from_segments(alloc::vec![PowerSegment::plateau(-1.0, 0.0, f64::NEG_INFINITY)]);
    let p = RadialProfile::new(3, alloc::vec![c], "zero").unwrap();
    let rep = crosscheck_phi(&p, 0.0, 0.0).unwrap();
    assert!(rep.pass && rep.closed_form.is_zero() && rep.brute_force.is_zero());
}

#[test]
fn evolution_checks() {
    let (pp, _) = pure_power(3, 0.0).unwrap();
    assert!(crosscheck_evolution(&pp, &Symbol::heat(1), 100.0).unwrap().pass);
    let rep = crosscheck_evolution(&pp, &Symbol::heat(1), 0.0).unwrap();
    assert!(rep.pass && rep.closed_form == pp.l2_norm());

    let (g, _) = gaussian_datum(3).unwrap();
    let rep = crosscheck_evolution(&g, &Symbol::heat(1), 10.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    let exact = libm::pow(core::f64::consts::PI, 0.75) * libm::pow(21.0, -0.75);
    assert!((rep.brute_force.to_f64() / exact - 1.0).abs() < 1e-6);
}

#[test]
fn evolution_lattice() {
    let corpus = [
        pure_power(3, -1.0).unwrap().0,
        pure_power(3, 1.0).unwrap().0,
        example_v0(3, 0.0, 20).unwrap().0,
        example_v0(1, 0.0, 20).unwrap().0,
        example_u0_log(3, 0.0, -4.0).unwrap().0,
        example_w0(3, 0.5, 40).unwrap().0,
        annulus_datum(3).unwrap().0,
    ];
    for p in &corpus {
        for alpha in [0.5, 1.0, 2.0] {
            let sym = Symbol::fractional(alpha, 1).unwrap();
            for t in [1e-2, 1.0, 1e3, 1e6] {
                let rep =
                    crosscheck_evolution(p, &sym, t).unwrap_or_else(|e| panic!("{} α={alpha} t={t}: {e:?}", p.label()));
                assert!(rep.pass, "{} α={alpha} t={t}: {rep:?}", p.label());
            }
        }
    }
}

#[test]
fn dyadic_identity_examples() {
    let t = libm::pow(4.0, 10.0);
    let heat = Symbol::heat(1);
    let (pp, _) = pure_power(3, 0.0).unwrap();
    let rep = crosscheck_dyadic_identity(&pp, &heat, 0.75, t, (-64, 4)).unwrap();
    assert!(rep.pass, "{rep:?}");
    let (v0, _) = example_v0(3, 0.0, 32).unwrap();
    let rep = crosscheck_dyadic_identity(&v0, &heat, 0.75, t, (-64, 4)).unwrap();
    assert!(rep.pass, "{rep:?}");
    let (an, _) = annulus_datum(3).unwrap();
    let rep = crosscheck_dyadic_identity(&an, &heat, 0.75, 1e6, (-64, 4)).unwrap();
    assert!(rep.pass && rep.note.contains("below floor"), "{rep:?}");
}

#[test]
fn dyadic_identity_shallow_window() {
    let (pp, _) = pure_power(3, 0.0).unwrap();
    let r = crosscheck_dyadic_identity(&pp, &Symbol::heat(1), 0.75, 1e6, (-6, 4));
    assert!(matches!(r, Err(Error::WindowTooShallow(_))), "{r:?}");
}

fn identity_corpus() -> Vec<(RadialProfile, f64)> {
    alloc::vec![
        (pure_power(3, -1.0).unwrap().0, 0.25),
        (pure_power(3, 0.0).unwrap().0, 0.75),
        (pure_power(3, 1.0).unwrap().0, 1.25),
        (example_v0(1, 0.0, 32).unwrap().0, 0.25),
        (example_v0(3, 0.0, 32).unwrap().0, 0.75),
        (example_v0(3, 1.0, 32).unwrap().0, 1.25),
        (example_u0_log(3, 0.0, -4.0).unwrap().0, 0.75),
        (gaussian_datum(3).unwrap().0, 0.75),
    ]
}

#[test]
fn dyadic_identity_lattice() {
    for (p, sigma) in identity_corpus() {
        for alpha in [0.5, 1.0, 2.0] {
            let sym = Symbol::fractional(alpha, 1).unwrap();
            for lt in 0..=8 {
                let t = libm::pow(10.0, lt as f64);
                let rep = crosscheck_dyadic_identity(&p, &sym, sigma, t, (-64, 8)).unwrap();
                assert!(rep.pass, "{} α={alpha} t=1e{lt}: {rep:?}", p.label());
            }
        }
    }
}

// shells sit anywhere inside a block, so one damping constant cannot track them
#[test]
fn dyadic_identity_lacunary_escapes() {
    let (w0, _) = example_w0(3, 0.5, 40).unwrap();
    let sym = Symbol::fractional(0.5, 1).unwrap();
    let rep = crosscheck_dyadic_identity(&w0, &sym, 1.0, 1e6, (-64, 8)).unwrap();
    assert!(!rep.pass && rep.rel_err < 1e-9, "{rep:?}");
    let (an, _) = annulus_datum(3).unwrap();
    let rep = crosscheck_dyadic_identity(&an, &Symbol::heat(1), 0.75, 1e2, (-64, 8)).unwrap();
    assert!(!rep.pass && rep.rel_err < 1e-15, "{rep:?}");
}
