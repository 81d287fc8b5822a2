use super::*;
use crate::examples::{annulus_datum, example_u0_log, example_v0, example_w0, gaussian_datum, pure_power};

fn heat() -> Vec<Symbol> {
    alloc::vec![Symbol::heat(1)]
}

fn all(rep: &EquivalenceReport, want: bool) {
    assert_eq!(rep.status, Status::Consistent, "{rep:#?}");
    assert_eq!(rep.criterion_indicator.verdict, Verdict::of(want));
    assert_eq!(rep.criterion_set.verdict, Verdict::of(want));
    for c in &rep.criterion_decay {
        assert_eq!(c.verdict, Verdict::of(want), "alpha = {}", c.alpha);
    }
    assert!(matches!(rep.criterion_navier_stokes, Verdict::Unresolved(_)));
}

#[test]
fn v0_all_true() {
    let (p, meta) = example_v0(3, 0.0, 32).unwrap();
    let opts = VerifyOptions::default().with_rho_grid(meta.rho_grid);
    let rep = verify_characterization(&p, Some(1.5), &heat(), &opts).unwrap();
    all(&rep, true);
}

#[test]
fn w0_all_false() {
    let (p, _) = example_w0(3, 0.5, 40).unwrap();
    let opts = VerifyOptions { j_window: Some((-80, 4)), ..VerifyOptions::default() };
    let rep = verify_characterization(&p, Some(2.0), &heat(), &opts).unwrap();
    all(&rep, false);
}

#[test]
fn pure_power_two_alphas() {
    let (p, _) = pure_power(3, 1.0).unwrap();
    let syms = alloc::vec![Symbol::heat(1), Symbol::fractional(0.5, 1).unwrap()];
    let rep = verify_characterization(&p, Some(2.5), &syms, &VerifyOptions::default()).unwrap();
    all(&rep, true);
    let fits: Vec<f64> = rep.criterion_decay.iter().map(|c| c.fit.as_ref().unwrap().sigma_fit).collect();
    assert!((fits[0] - 1.25).abs() < 0.05 && (fits[1] - 2.5).abs() < 0.05, "{fits:?}");
}

#[test]
fn estimated_sigma() {
    let (p, _) = pure_power(3, 0.0).unwrap();
    let rep = verify_characterization(&p, None, &heat(), &VerifyOptions::default()).unwrap();
    assert_eq!(rep.sigma_source, SigmaSource::DecayCharacter);
    assert!((rep.sigma_besov - 1.5).abs() < 0.02);
    all(&rep, true);

    let (p, _) = example_u0_log(3, 0.0, -4.0).unwrap();
    let rep = verify_characterization(&p, None, &heat(), &VerifyOptions::default()).unwrap();
    assert_eq!(rep.sigma_source, SigmaSource::UpperCharacter);
    all(&rep, false);
    assert!(rep.notes.iter().any(|n| n.contains("logarithmic")));

    let (p, _) = annulus_datum(3).unwrap();
    let rep = verify_characterization(&p, None, &heat(), &VerifyOptions::default()).unwrap();
    assert_eq!(rep.sigma_source, SigmaSource::HalfDimension);
    all(&rep, false);
}

#[test]
fn sigma_perturbation_all_false() {
    let (p, _) = pure_power(3, 0.0).unwrap();
    for s in [1.0, 2.0] {
        let rep = verify_characterization(&p, Some(s), &heat(), &VerifyOptions::default()).unwrap();
        all(&rep, false);
    }
}

#[test]
fn relation_pure_and_v0() {
    let (p, _) = pure_power(3, 0.0).unwrap();
    let rel = relation_check(&p, None, None);
    assert!(rel.delta.unwrap() <= 0.05, "{rel:?}");

    let (p, meta) = example_v0(3, 1.0, 32).unwrap();
    let rel = relation_check(&p, Some(&meta.rho_grid), None);
    assert!(rel.delta.unwrap() <= 0.05, "{rel:?}");

    let (p, _) = gaussian_datum(3).unwrap();
    let rel = relation_check(&p, None, None);
    assert!((rel.sigma_from_besov.unwrap() - 1.5).abs() <= 0.02, "{rel:?}");
}

#[test]
fn relation_w0_has_no_delta() {
    let (p, _) = example_w0(3, 0.5, 40).unwrap();
    let rel = relation_check(&p, None, Some((-80, 4)));
    assert!(rel.r_star.is_none() && rel.delta.is_none());
    assert!(rel.sigma_from_besov.is_some());
}
