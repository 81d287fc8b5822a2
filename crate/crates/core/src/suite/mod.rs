//! The acceptance criteria as pure functions over the frozen corpus.
//!
//! Wall-clock limits are left to the caller.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::besov::{classify_sets, dyadic_spectrum, phi_bump};
use crate::characterization::{
    default_j_window, norm_ratio, verify_characterization, EquivalenceReport, Verdict, VerifyOptions, NORM_K,
};
use crate::examples::{example_v0, example_w0, frozen_corpus, gaussian_datum, ExampleMeta, Family};
use crate::indicators::{decay_character, decay_indicator, default_r_search, phi_side, RhoGrid};
use crate::numerics::{
    gamma_identity_residual, sphere_surface, uniform_dyadic_sum_bound, LogScalar, QuadratureSpec, TimeGrid,
};
use crate::oracle::{crosscheck_dyadic_identity, crosscheck_evolution, crosscheck_phi};
use crate::profiles::{Component, PowerSegment, RadialProfile, Side};
use crate::semigroup::{evolution_trace, fit_decay, Symbol};

pub const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
const SEED: u64 = 0x005e_ed0d_eca7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub title: String,
    pub detail: String,
    pub failures: Vec<String>,
}

impl Outcome {
    fn new(id: u32, title: &str, detail: String, failures: Vec<String>) -> Self {
        Self { id, title: title.into(), detail, failures }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run(id: u32) -> Outcome {
    match id {
        1 => v0_ratio(),
        2 => w0_characters(),
        3 => w0_selected_limits(),
        4 => gaussian_closed_form(),
        5 => exponent_law(),
        6 => equivalence_chain(),
        7 => norm_equivalence(),
        8 => identities(),
        9 => structural_invariants(),
        10 => navier_stokes_slot(),
        _ => Outcome::new(id, "unknown", String::new(), alloc::vec![format!("no criterion {id}")]),
    }
}

/// `σ` of `Ḃ^{−σ}` used by `verify` on a corpus member, with its options.
pub fn verify_setup(p: &RadialProfile, meta: &ExampleMeta) -> (f64, VerifyOptions) {
    let n = p.n();
    let param = |k: &str| meta.parameters.get(k).copied().unwrap_or(0.0);
    let opts = VerifyOptions::default().with_rho_grid(meta.rho_grid.clone());
    match meta.family {
        Family::PurePower | Family::U0log => (param("r0") + n / 2.0, opts),
        Family::V0 => (param("r") + n / 2.0, opts),
        Family::W0 => (param("r") + n / 2.0, VerifyOptions { j_window: Some((-80, 4)), ..opts }),
        Family::Annulus | Family::Gaussian => (n / 2.0, opts),
    }
}

/// Whether all three criteria should hold on a corpus member.
pub fn expected_verdict(meta: &ExampleMeta) -> bool {
    matches!(meta.family, Family::PurePower | Family::V0 | Family::Gaussian)
}

/// Semigroup-side `σ` (pairs with `Ḃ^{−2σ}`) on each datum's own scale.
pub fn heat_sigma(p: &RadialProfile, meta: &ExampleMeta) -> f64 {
    let param = |k: &str| meta.parameters.get(k).copied().unwrap_or(0.0);
    let n = p.n();
    match meta.family {
        Family::PurePower => (param("r0") + n / 2.0) / 2.0,
        Family::V0 | Family::W0 => (param("r") + n / 2.0) / 2.0,
        Family::U0log | Family::Annulus | Family::Gaussian => n / 4.0,
    }
}

pub fn spectrum_window(p: &RadialProfile, meta: &ExampleMeta) -> (i64, i64) {
    match meta.family {
        Family::W0 => (-80, 4),
        _ => default_j_window(p),
    }
}

/// Power law at the origin followed by up to three free segments.
pub fn random_profile(rng: &mut ChaCha8Rng) -> (RadialProfile, f64) {
    let n = rng.gen_range(1..=3u32);
    let r0 = -(n as f64) / 2.0 + 0.1 + rng.gen_range(0.0..2.5);
    let mut u = -30.0;
    let mut segs = alloc::vec![PowerSegment::new(f64::NEG_INFINITY, u, rng.gen_range(-10.0..10.0), r0, 0)];
    for _ in 0..rng.gen_range(0..4) {
        let w = rng.gen_range(0.5..8.0);
        segs.push(PowerSegment::new(u, u + w, rng.gen_range(-10.0..10.0), rng.gen_range(-3.0..3.0), 0));
        u += w;
    }
    let p =
        RadialProfile::new(n, alloc::vec![Component::from_segments(segs)], "random").expect("valid by construction");
    (p, r0)
}

pub fn random_profiles(count: usize) -> Vec<(RadialProfile, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| random_profile(&mut rng)).collect()
}

fn v0_ratio() -> Outcome {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for (n, r) in [(1u32, 0.0), (3, 0.0), (3, 1.0)] {
        let (p, meta) = match example_v0(n, r, 32) {
            Ok(x) => x,
            Err(e) => {
                fails.push(format!("n={n} r={r}: {e}"));
                continue;
            }
        };
        let want = libm::exp2(2.0 * r + n as f64);
        match decay_indicator(&p, r, &meta.rho_grid) {
            Ok(rep) => {
                let err = (rep.ratio / want - 1.0).abs();
                worst = worst.max(err);
                if !(err <= 0.02) {
                    fails.push(format!("n={n} r={r}: ratio {} against {want}", rep.ratio));
                }
            }
            Err(e) => fails.push(format!("n={n} r={r}: {e}")),
        }
    }
    let detail = format!("limsup/liminf of Phi_r against 2^(2r+n), worst rel err {worst:.2e}");
    Outcome::new(1, "v0 indicator ratio", detail, fails)
}

fn w0_characters() -> Outcome {
    let mut fails = Vec::new();
    let mut detail = String::from("w0(3, 0.5, 40)");
    match example_w0(3, 0.5, 40).and_then(|(p, meta)| decay_character(&p, default_r_search(3), &meta.rho_grid)) {
        Ok(rep) => {
            let (rp, rm) = (rep.r_plus.value(3), rep.r_minus.value(3));
            if !((rp - 0.5).abs() <= 0.05) {
                fails.push(format!("r_plus = {rp}"));
            }
            if !((rm - 2.5).abs() <= 0.05) {
                fails.push(format!("r_minus = {rm}"));
            }
            detail = format!("w0(3, 0.5, 40): r_plus {rp:.4}, r_minus {rm:.4}");
        }
        Err(e) => fails.push(format!("{e}")),
    }
    Outcome::new(2, "w0 characters", detail, fails)
}

fn w0_selected_limits() -> Outcome {
    let mut fails = Vec::new();
    let (p, meta) = match example_w0(3, 0.5, 40) {
        Ok(x) => x,
        Err(e) => return Outcome::new(3, "w0 selected limits", String::new(), alloc::vec![format!("{e}")]),
    };
    let ball = sphere_surface(3) / 3.0;
    let periods = &meta.rho_grid.periods;
    let tail = &periods[periods.len().saturating_sub(10)..];
    if tail.len() < 10 {
        fails.push(format!("only {} witnesses", tail.len()));
    }
    let mut worst = 0.0f64;
    for per in &tail[tail.len().saturating_sub(3)..] {
        let v = phi_side(&p, 0.5, per.log2_outer, Side::At).to_f64();
        worst = worst.max((v / ball - 1.0).abs());
    }
    if !(worst <= 0.02) {
        fails.push(format!("Phi at outer radii off the unit-ball volume by {worst:.3e}"));
    }
    let inner: Vec<LogScalar> = tail.iter().map(|per| phi_side(&p, 0.5, per.log2_inner, Side::Below)).collect();
    if !inner.windows(2).all(|w| w[1] < w[0]) {
        fails.push(String::from("Phi at inner radii is not strictly decreasing"));
    }
    let last = inner.last().map(|v| v.log2_mag()).unwrap_or(0.0);
    let detail = format!("outer radii within {worst:.2e} of |B1|; inner radii fall to 2^{last:.3e}");
    Outcome::new(3, "w0 selected limits", detail, fails)
}

fn gaussian_closed_form() -> Outcome {
    let mut fails = Vec::new();
    let trace = gaussian_datum(3).and_then(|(g, _)| evolution_trace(&g, &Symbol::heat(1), (-2.0, 8.0), 8));
    let tr = match trace {
        Ok(t) => t,
        Err(e) => return Outcome::new(4, "Gaussian closed form", String::new(), alloc::vec![format!("{e}")]),
    };
    let mut worst = 0.0f64;
    for (t, v) in tr.times.iter().zip(&tr.norms) {
        let exact = libm::pow(core::f64::consts::PI, 0.75) * libm::pow(1.0 + 2.0 * t, -0.75);
        worst = worst.max((v.to_f64() / exact - 1.0).abs());
    }
    if !(worst <= 1e-6) {
        fails.push(format!("worst rel err {worst:.3e}"));
    }
    let sigma = fit_decay(&tr, 8).map(|f| f.sigma_fit).unwrap_or(f64::NAN);
    if !((sigma / 0.75 - 1.0).abs() <= 0.01) {
        fails.push(format!("sigma_fit = {sigma}"));
    }
    let detail = format!("{} trace points, worst rel err {worst:.2e}, sigma_fit {sigma:.4}", tr.times.len());
    Outcome::new(4, "Gaussian closed form", detail, fails)
}

fn exponent_law() -> Outcome {
    let mut fails = Vec::new();
    let (mut worst, mut count) = (0.0f64, 0);
    for (p, meta) in frozen_corpus().unwrap_or_default() {
        let n = p.dimension();
        let Some(r_star) =
            decay_character(&p, default_r_search(n), &meta.rho_grid).ok().and_then(|c| c.r_star_finite())
        else {
            continue;
        };
        for alpha in ALPHAS {
            let fit = Symbol::fractional(alpha, 1)
                .and_then(|sym| evolution_trace(&p, &sym, (-2.0, 12.0), 8))
                .and_then(|tr| fit_decay(&tr, 10));
            match fit {
                Ok(f) => {
                    let err = (2.0 * alpha * f.sigma_fit - (r_star + p.n() / 2.0)).abs();
                    worst = worst.max(err);
                    count += 1;
                    if !(err <= 0.05) {
                        fails.push(format!("{} alpha={alpha}: |2a sigma_fit - (r*+n/2)| = {err:.4}", p.label()));
                    }
                }
                Err(e) => fails.push(format!("{} alpha={alpha}: {e}", p.label())),
            }
        }
    }
    Outcome::new(5, "exponent law", format!("{count} fits, worst deviation {worst:.4}"), fails)
}

fn equivalence_chain() -> Outcome {
    let mut fails = Vec::new();
    let syms: Vec<Symbol> = ALPHAS.iter().filter_map(|a| Symbol::fractional(*a, 1).ok()).collect();
    let corpus = frozen_corpus().unwrap_or_default();
    for (p, meta) in &corpus {
        let (sigma, opts) = verify_setup(p, meta);
        match verify_characterization(p, Some(sigma), &syms, &opts) {
            Ok(rep) => {
                if !rep.consistent {
                    fails.push(format!("{}: inconsistent {:?}", p.label(), rep.status));
                }
                let want = expected_verdict(meta);
                if uniform(&rep) != Some(want) {
                    fails.push(format!("{}: expected all {want}", p.label()));
                }
            }
            Err(e) => fails.push(format!("{}: {e}", p.label())),
        }
    }
    Outcome::new(6, "equivalence chain", format!("{} corpus profiles, 3 symbols each", corpus.len()), fails)
}

/// The common verdict of every criterion in a report, if they agree.
pub fn uniform(rep: &EquivalenceReport) -> Option<bool> {
    let mut vs = alloc::vec![rep.criterion_indicator.verdict.as_bool(), rep.criterion_set.verdict.as_bool()];
    vs.extend(rep.criterion_decay.iter().map(|c| c.verdict.as_bool()));
    let first = vs[0]?;
    vs.iter().all(|v| *v == Some(first)).then_some(first)
}

fn norm_equivalence() -> Outcome {
    let mut fails = Vec::new();
    let grid = TimeGrid::new(-2.0, 12.0, 8).expect("fixed grid");
    let (mut lo, mut hi, mut drift) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (p, meta) in frozen_corpus().unwrap_or_default() {
        // u0-log sits outside Ḃ^{-3/2}; probe it just inside
        let sigma = if meta.family == Family::U0log { 0.6 } else { heat_sigma(&p, &meta) };
        for alpha in ALPHAS {
            let Ok(sym) = Symbol::fractional(alpha, 1) else { continue };
            let base = match norm_ratio(&p, &sym, sigma, (-64, 8), &grid) {
                Ok(b) => b,
                Err(e) => {
                    fails.push(format!("{} alpha={alpha}: {e}", p.label()));
                    continue;
                }
            };
            lo = lo.min(base.ratio);
            hi = hi.max(base.ratio);
            if !base.within {
                fails.push(format!("{} alpha={alpha}: ratio {}", p.label(), base.ratio));
            }
            if alpha != 1.0 {
                continue;
            }
            for k in [-6.0, 6.0] {
                let moved = p
                    .scaled(LogScalar::from_f64(libm::pow(10.0, k)))
                    .and_then(|q| norm_ratio(&q, &sym, sigma, (-64, 8), &grid));
                match moved {
                    Ok(m) => {
                        let d = (m.ratio / base.ratio - 1.0).abs();
                        drift = drift.max(d);
                        if !(d <= 1e-12) {
                            fails.push(format!("{} scaled 1e{k}: ratio moved by {d:.3e}", p.label()));
                        }
                    }
                    Err(e) => fails.push(format!("{} scaled 1e{k}: {e}", p.label())),
                }
            }
        }
    }
    let detail = format!("K = {NORM_K}, ratios in [{lo:.3}, {hi:.3}], scaling drift {drift:.1e}");
    Outcome::new(7, "norm equivalence", detail, fails)
}

fn identities() -> Outcome {
    let mut fails = Vec::new();
    let spec = QuadratureSpec::default();
    let mut worst_gamma = 0.0f64;
    for a in ALPHAS {
        for s in [0.25, 1.0, 2.0] {
            for c in [0.5, 1.0, 2.0] {
                for l in [0.1, 1.0, 10.0] {
                    match gamma_identity_residual(a, s, c, l, &spec) {
                        Ok(r) => {
                            worst_gamma = worst_gamma.max(r);
                            if !(r <= 1e-8) {
                                fails.push(format!("gamma identity a={a} s={s} c={c} l={l}: {r:.3e}"));
                            }
                        }
                        Err(e) => fails.push(format!("gamma identity a={a} s={s} c={c} l={l}: {e}")),
                    }
                }
            }
        }
    }
    let grid = TimeGrid::new(-4.0, 8.0, 8).expect("fixed grid");
    for a in ALPHAS {
        for s in [0.25, 1.0] {
            let coarse = uniform_dyadic_sum_bound(a, s, 1.0, &grid, -400, 40);
            let fine = uniform_dyadic_sum_bound(a, s, 1.0, &grid.refined(), -400, 40);
            match (coarse, fine) {
                (Ok(x), Ok(y)) if x.is_finite() && (x - y).abs() <= 0.01 * y => {}
                (x, y) => fails.push(format!("dyadic sum bound a={a} s={s}: {x:?} / {y:?}")),
            }
        }
    }
    let (mut lo, mut hi, mut checks) = (f64::INFINITY, 0.0f64, 0);
    for (p, meta) in frozen_corpus().unwrap_or_default() {
        let sigma = heat_sigma(&p, &meta);
        for alpha in ALPHAS {
            let Ok(sym) = Symbol::fractional(alpha, 1) else { continue };
            for lt in 0..=8 {
                checks += 1;
                match crosscheck_dyadic_identity(&p, &sym, sigma, libm::pow(10.0, lt as f64), (-64, 8)) {
                    Ok(rep) => {
                        if rep.rel_err > 0.0 {
                            lo = lo.min(rep.rel_err);
                            hi = hi.max(rep.rel_err);
                        }
                        if !rep.pass {
                            fails.push(format!(
                                "dyadic identity {} alpha={alpha} t=1e{lt}: ratio {:.3e}",
                                p.label(),
                                rep.rel_err
                            ));
                        }
                    }
                    Err(e) => fails.push(format!("dyadic identity {} alpha={alpha} t=1e{lt}: {e}", p.label())),
                }
            }
        }
    }
    let detail = format!(
        "gamma residual {worst_gamma:.1e} on 81 points; {checks} dyadic identity checks, ratios in [{lo:.2e}, {hi:.2e}]"
    );
    Outcome::new(8, "identities", detail, fails)
}

fn structural_invariants() -> Outcome {
    let mut fails = Vec::new();
    for (i, (p, _)) in random_profiles(100).iter().enumerate() {
        match decay_character(p, default_r_search(p.dimension()), &RhoGrid::auto(p)) {
            Ok(rep) if rep.ordered() => {}
            Ok(rep) => fails.push(format!("random profile {i}: r_plus {:?} r_minus {:?}", rep.r_plus, rep.r_minus)),
            Err(e) => fails.push(format!("random profile {i}: {e}")),
        }
    }

    let corpus = frozen_corpus().unwrap_or_default();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (p, meta) in &corpus {
        let (sigma, _) = verify_setup(p, meta);
        let (j0, j1) = spectrum_window(p, meta);
        match dyadic_spectrum(p, j0, j1) {
            Ok(sp) => {
                lo = lo.min(sp.orthogonality_ratio);
                hi = hi.max(sp.orthogonality_ratio);
                if !(0.5..=1.0).contains(&sp.orthogonality_ratio) {
                    fails.push(format!("{}: sum e_j^2 / |f|^2 = {}", p.label(), sp.orthogonality_ratio));
                }
                match classify_sets(&sp, sigma) {
                    Ok(v) if v.chain_holds() => {}
                    Ok(v) => fails.push(format!("{}: inclusion chain broken {v:?}", p.label())),
                    Err(e) => fails.push(format!("{}: {e}", p.label())),
                }
            }
            Err(e) => fails.push(format!("{}: {e}", p.label())),
        }
    }

    let mut pou = 0.0f64;
    for i in 0..=4000 {
        let lambda = libm::exp2(-40.0 + 80.0 * i as f64 / 4000.0);
        let s: f64 = (-45..=45).map(|j| phi_bump(lambda * libm::exp2(-j as f64))).sum();
        pou = pou.max((s - 1.0).abs());
    }
    if !(pou <= 1e-10) {
        fails.push(format!("partition of unity error {pou:.3e}"));
    }

    let mut oracle = 0;
    for (p, meta) in &corpus {
        for u in meta.structural_radii.iter().take(12).chain([-7.5, -60.0].iter()) {
            oracle += 1;
            match crosscheck_phi(p, 0.0, *u) {
                Ok(rep) if rep.pass => {}
                r => fails.push(format!("oracle phi {} u={u}: {r:?}", p.label())),
            }
        }
        for alpha in ALPHAS {
            let Ok(sym) = Symbol::fractional(alpha, 1) else { continue };
            for t in [1e-2, 1.0, 1e3, 1e6] {
                oracle += 1;
                match crosscheck_evolution(p, &sym, t) {
                    Ok(rep) if rep.pass && rep.rel_err <= 1e-8 => {}
                    r => fails.push(format!("oracle evolution {} alpha={alpha} t={t}: {r:?}", p.label())),
                }
            }
        }
    }
    let detail = format!(
        "100 random orderings; orthogonality in [{lo:.3}, {hi:.3}]; partition error {pou:.1e}; {oracle} oracle checks"
    );
    Outcome::new(9, "structural invariants", detail, fails)
}

fn navier_stokes_slot() -> Outcome {
    let mut fails = Vec::new();
    let rep = gaussian_datum(3).and_then(|(g, meta)| {
        let (sigma, opts) = verify_setup(&g, &meta);
        verify_characterization(&g, Some(sigma), &[Symbol::heat(1)], &opts)
    });
    match rep.map(|r| r.criterion_navier_stokes) {
        Ok(Verdict::Unresolved(why)) if why.contains("Navier-Stokes") => {}
        other => fails.push(format!("report slot is {other:?}")),
    }
    Outcome::new(10, "Navier-Stokes out of scope", String::from("permanent Unresolved slot in every report"), fails)
}
