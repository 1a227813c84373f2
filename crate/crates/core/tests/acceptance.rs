//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use charvar_core::catalog::{
    check_sampler_t, enumerate_parabolic, excellent_quartic, explore_solve, membership_residual,
    sample_component, special_points, Classification, ComponentId, ComponentSample, SAMPLER_MARGIN,
};
use charvar_core::mat2::{
    commuting_triple_lemma, has_common_eigenvector, is_irreducible_pair, CommutingTripleClass,
    GtElement,
};
use charvar_core::numfield::{max_normalized, multiset_distance, solve_poly, PolyLE4};
use charvar_core::reconstruct::{realize_character, Quadruple};
use charvar_core::tracealg::{
    det_sdiamond, rotate, s_from_t, tr3_residuals, trace_equation_residuals, trace_vector_of,
    type_i_residuals, type_ii_residuals,
};
use charvar_core::wirtinger::{braid_lemma_check, fig8_relator_residual, is_representation};
use charvar_core::{TraceVectorf64, C64};
use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_trace_eq(v: &TraceVectorf64) -> f64 {
    max_normalized(&trace_equation_residuals(v))
}

fn universal_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let t = disk(&mut rng, 3.0);
        let q = random_quadruple(&mut rng, t);
        let s = s_from_t(&trace_vector_of(&q.mats()).expect("shared trace"));
        worst = worst
            .max(max_normalized(&type_i_residuals(&s)))
            .max(max_normalized(&type_ii_residuals(&s)))
            .max(det_sdiamond(&s).normalized());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && secs < 10.0,
        format!("500 quadruples, max normalized type I/II/det residual {worst:.2e}, {secs:.2} s (< 10 s)"),
    )
}

fn reconstruction_round_trip() -> Outcome {
    let mut rng = rng(102);
    let (mut worst_rt, mut worst_conj, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..200 {
        let t = disk(&mut rng, 3.0);
        let q = random_irreducible_quadruple(&mut rng, t);
        let v = q.trace_vector();
        match realize_character(&v) {
            Ok(r) => worst_rt = worst_rt.max(r.trace_vector().distance(&v)),
            Err(_) => failures += 1,
        }
        let g = random_sl2(&mut rng);
        let conj = q.conjugate(&g).expect("det 1");
        worst_conj = worst_conj.max(conj.trace_vector().distance(&v));
    }
    outcome(
        failures == 0 && worst_rt <= 1e-8 && worst_conj <= 1e-9,
        format!(
            "200 quadruples, {failures} realization failures, round-trip deviation {worst_rt:.2e} (<= 1e-8), \
             conjugation deviation {worst_conj:.2e} (<= 1e-9)"
        ),
    )
}

fn component_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(103);
    let (mut worst_rel, mut worst_tr, mut samples, mut failures) = (0.0f64, 0.0f64, 0, Vec::new());
    for id in ComponentId::ALL {
        let mut ts = 0;
        while ts < 50 {
            let t = disk(&mut rng, 3.0);
            if check_sampler_t(id, t, SAMPLER_MARGIN).is_err() {
                continue;
            }
            ts += 1;
            let Ok(list) = sample_component(id, t) else {
                failures.push(format!("{id} sampler at t={t:.4}"));
                continue;
            };
            for s in list {
                samples += 1;
                worst_tr = worst_tr.max(max_trace_eq(&s.vector));
                match realize_character(&s.vector) {
                    Ok(q) => {
                        worst_rel = worst_rel.max(is_representation(&q, 1e-7).1);
                        worst_tr = worst_tr.max(max_trace_eq(&q.trace_vector()));
                    }
                    Err(e) => failures.push(format!("{id} branch {} at t={t:.4}: {e}", s.branch)),
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let first = failures.first().cloned().unwrap_or_default();
    outcome(
        failures.is_empty() && worst_rel <= 1e-7 && worst_tr <= 1e-8 && secs < 60.0,
        format!(
            "10 components x 50 t, {samples} samples, {} failures {first}, relator residual {worst_rel:.2e} (<= 1e-7), \
             trace equations {worst_tr:.2e} (<= 1e-8), {secs:.2} s (< 60 s)",
            failures.len()
        ),
    )
}

fn params(samples: &[ComponentSample], id: ComponentId, name: &str) -> Vec<C64> {
    samples
        .iter()
        .filter(|s| s.id == id)
        .map(|s| s.param(name).expect("param"))
        .collect()
}

fn parabolic_census() -> Outcome {
    let rep = enumerate_parabolic().expect("t = 2 is admissible");
    let want = [4, 4, 4, 4, 2, 4, 1, 1, 1, 1];
    let counts: Vec<usize> = ComponentId::ALL.iter().map(|&id| rep.count(id)).collect();
    let s3 = 3f64.sqrt();
    let x3_want = [c(2.5, s3 / 2.0), c(2.5, -s3 / 2.0)];
    let x3_dev = multiset_distance(&params(&rep.samples, ComponentId::X3, "u"), &x3_want)
        .unwrap_or(f64::INFINITY);
    let (a, b) = (
        (8.0 * 2f64.sqrt() - 11.0).sqrt(),
        (8.0 * 2f64.sqrt() + 11.0).sqrt(),
    );
    let x4_want = [
        c(1.5 + a / 2.0, 0.0),
        c(1.5 - a / 2.0, 0.0),
        c(1.5, b / 2.0),
        c(1.5, -b / 2.0),
    ];
    let x4_u = params(&rep.samples, ComponentId::X4, "u");
    let x4_dev = multiset_distance(&x4_u, &x4_want).unwrap_or(f64::INFINITY);
    let quartic = PolyLE4::from_real(&[1.0, -6.0, 19.0, -30.0, 17.0]).expect("degree 4");
    let root_dev =
        multiset_distance(&solve_poly(&quartic).expect("roots"), &x4_want).unwrap_or(f64::INFINITY);

    // mu and z values of the first two families
    let mu_want = [c(1.5, 1.5 * s3), c(1.5, -1.5 * s3)];
    let z_want = [c(1.5, s3 / 2.0), c(1.5, -s3 / 2.0)];
    let mut family_dev = 0.0f64;
    for id in [ComponentId::X11, ComponentId::X12] {
        for mu in params(&rep.samples, id, "mu") {
            family_dev = family_dev.max(
                mu_want
                    .iter()
                    .map(|w| (mu - w).norm())
                    .fold(f64::INFINITY, f64::min),
            );
        }
    }
    for id in [ComponentId::X21, ComponentId::X22] {
        for z in params(&rep.samples, id, "z") {
            family_dev = family_dev.max(
                z_want
                    .iter()
                    .map(|w| (z - w).norm())
                    .fold(f64::INFINITY, f64::min),
            );
        }
    }
    outcome(
        rep.total == 26 && counts == want && x3_dev <= 1e-9 && x4_dev <= 1e-9 && root_dev <= 1e-9 && family_dev <= 1e-9,
        format!(
            "{} classes, counts {counts:?}, X3 u deviation {x3_dev:.2e}, X4 u deviation {x4_dev:.2e}, \
             quartic roots {root_dev:.2e}, mu/z deviation {family_dev:.2e} (all <= 1e-9)",
            rep.total
        ),
    )
}

/// The eliminated quartic, written out independently of the library.
fn quartic_oracle(t: C64, u: C64) -> (C64, f64) {
    let (t2, t4) = (t * t, t * t * t * t);
    let terms = [
        u.powi(4),
        (2.0 - 2.0 * t2) * u.powi(3),
        (t4 + 3.0) * u * u,
        (2.0 - 2.0 * t4) * u,
        2.0 * t4 - 4.0 * t2 + 1.0,
    ];
    let value: C64 = terms.iter().sum();
    let scale = terms.iter().map(|z| z.norm()).fold(1.0, f64::max);
    (value, scale)
}

fn excellent_component() -> Outcome {
    let mut rng = rng(105);
    let (mut worst_set, mut worst_oracle, mut failures) = (0.0f64, 0.0f64, 0);
    let mut n = 0;
    while n < 100 {
        let t = disk(&mut rng, 3.0);
        if t.norm() <= 1e-3 || check_sampler_t(ComponentId::X4, t, SAMPLER_MARGIN).is_err() {
            continue;
        }
        n += 1;
        let us: Vec<C64> = match sample_component(ComponentId::X4, t) {
            Ok(list) => list.iter().map(|s| s.param("u").expect("u")).collect(),
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let roots = solve_poly(&excellent_quartic(t)).expect("quartic roots");
        worst_set = worst_set.max(multiset_distance(&us, &roots).unwrap_or(f64::INFINITY));
        for u in us {
            let (value, scale) = quartic_oracle(t, u);
            worst_oracle = worst_oracle.max(value.norm() / scale);
        }
    }
    let coeffs = excellent_quartic(c(2.0, 0.0));
    let want = [1.0, -6.0, 19.0, -30.0, 17.0];
    let coeff_dev = coeffs
        .coeffs()
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    outcome(
        failures == 0 && worst_set <= 1e-7 && worst_oracle <= 1e-10 && coeff_dev <= 1e-12,
        format!(
            "100 t, {failures} sampler failures, u-values vs quartic roots {worst_set:.2e} (<= 1e-7), \
             independent quartic residual {worst_oracle:.2e}, t=2 coefficients {coeff_dev:.2e} (<= 1e-12)"
        ),
    )
}

fn special_points_check() -> Outcome {
    let pts = special_points();
    let mut worst = 0.0f64;
    let mut worst_tr = 0.0f64;
    for p in &pts {
        let [a, b] = p.residuals();
        // the X4 system written out independently
        let (t, u, eta) = (p.t, p.u, p.eta);
        let lin = t * eta - (u * u + u - t * t + 1.0);
        let quad = eta * eta + t * (t * t + 4.0 - 2.0 * u) * eta - 5.0 * t * t * u
            + t.powi(4)
            + 4.0 * t * t
            - 6.0;
        let scale = [t, u, eta]
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max)
            .powi(4);
        worst = worst
            .max(a)
            .max(b)
            .max(lin.norm() / scale)
            .max(quad.norm() / scale);
        worst_tr = worst_tr.max(max_trace_eq(&p.vector));
    }
    let s2 = 2f64.sqrt();
    let has = |pred: &dyn Fn(C64) -> bool| pts.iter().any(|p| pred(p.t));
    let near = |a: C64, b: f64| (a - b).norm() < 1e-12;
    let covered = has(&|t| near(t, 1.0 - s2))
        && has(&|t| near(t, 0.0))
        && has(&|t| near(t * t, 1.0))
        && has(&|t| near(t * t, 3.0))
        && has(&|t| near(t * t, 5.0))
        && has(&|t| near(t.powi(4) - 6.0 * t * t, -4.0));
    outcome(
        worst <= 1e-10 && worst_tr <= 1e-10 && covered,
        format!(
            "{} points (all families present: {covered}), X4 system residual {worst:.2e} (<= 1e-10), \
             trace equations {worst_tr:.2e}",
            pts.len()
        ),
    )
}

fn rotation_symmetry() -> Outcome {
    let mut rng = rng(107);
    let (mut worst, mut samples, mut identity_ok) = (0.0f64, 0, true);
    for _ in 0..20 {
        let t = admissible_t(&mut rng, 3.0);
        for id in ComponentId::ALL {
            for s in sample_component(id, t).expect("admissible t") {
                samples += 1;
                let r = rotate(&s.vector);
                worst = worst.max(max_normalized_named(id.pair(), &r));
                let r4 = rotate(&rotate(&rotate(&r)));
                identity_ok &= r4 == s.vector;
            }
        }
    }
    for _ in 0..100 {
        let a: [C64; 11] = std::array::from_fn(|_| disk(&mut rng, 5.0));
        let v = TraceVectorf64::from_array(a);
        identity_ok &= rotate(&rotate(&rotate(&rotate(&v)))) == v;
    }
    outcome(
        worst <= 1e-10 && identity_ok,
        format!("{samples} samples, membership of rotated sample in paired component {worst:.2e} (<= 1e-10), rotate^4 = id: {identity_ok}"),
    )
}

fn max_normalized_named(id: ComponentId, v: &TraceVectorf64) -> f64 {
    charvar_core::catalog::max_normalized(&membership_residual(id, v))
}

fn pair_criterion() -> Outcome {
    let mut rng = rng(108);
    let (mut disagree, mut commutator_disagree, mut reducible_seen) = (0, 0, 0);
    let mut check = |x: &GtElement<f64>, y: &GtElement<f64>| {
        let by_trace = is_irreducible_pair(x, y);
        let by_eigen = !has_common_eigenvector(&[*x.mat(), *y.mat()]);
        // tr[x, y] = 2 exactly for pairs with a common eigenvector
        let comm = *x.mat() * *y.mat() * *x.inverse().mat() * *y.inverse().mat();
        let scale = x.mat().norm().max(y.mat().norm()).max(1.0).powi(4);
        let by_commutator = (comm.trace() - 2.0).norm() > 1e-8 * scale;
        if by_trace != by_eigen {
            disagree += 1;
        }
        if by_commutator != by_eigen {
            commutator_disagree += 1;
        }
        if !by_eigen {
            reducible_seen += 1;
        }
    };
    for _ in 0..500 {
        let t = disk(&mut rng, 3.0);
        let (x, y) = (random_gt(&mut rng, t), random_gt(&mut rng, t));
        check(&x, &y);
    }
    for _ in 0..100 {
        let t = disk(&mut rng, 3.0);
        let (x, y) = random_reducible_pair(&mut rng, t);
        check(&x, &y);
    }
    outcome(
        disagree == 0 && commutator_disagree == 0 && reducible_seen >= 100,
        format!(
            "600 pairs ({reducible_seen} reducible), trace criterion disagreements {disagree}, \
             commutator-trace oracle disagreements {commutator_disagree}"
        ),
    )
}

fn structural_lemmas() -> Outcome {
    let mut rng = rng(109);
    let mut notes = Vec::new();
    let mut ok = true;

    // commuting-triple lemma on (x1, x2, x3) of X3 realizations, plus the parabolic case
    let mut worst25 = 0.0f64;
    let mut ts: Vec<C64> = (0..20).map(|_| admissible_t(&mut rng, 3.0)).collect();
    ts.push(c(2.0, 0.0));
    for &t in &ts {
        for s in sample_component(ComponentId::X3, t).expect("admissible t") {
            let q = realize_character(&s.vector).expect("X3 realizes");
            let [x1, x2, x3, _] = *q.elements();
            match commuting_triple_lemma(&x1, &x2, &x3) {
                Ok(rep) => {
                    let parabolic = (t - 2.0).norm() < 1e-12;
                    let class_ok = if parabolic {
                        rep.class == CommutingTripleClass::Commuting
                    } else {
                        rep.class == CommutingTripleClass::Equal
                    };
                    ok &= class_ok && rep.holds(1e-9);
                    worst25 = worst25
                        .max(rep.commutator_residual)
                        .max(rep.power_residual.unwrap_or(0.0));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("X3 t={t:.3}: {e}"));
                }
            }
        }
    }

    // braid-relation lemma on X51 realizations
    let mut worst31 = 0.0f64;
    for _ in 0..20 {
        let t = admissible_t(&mut rng, 3.0);
        let s = &sample_component(ComponentId::X51, t).expect("admissible t")[0];
        let q = realize_character(&s.vector).expect("X51 realizes");
        match braid_lemma_check(&q, 2) {
            Ok(rep) => {
                ok &= rep.holds(1e-8);
                worst31 = worst31
                    .max(rep.adjacent)
                    .max(rep.opposite)
                    .max(rep.trace_gap);
            }
            Err(e) => {
                ok = false;
                notes.push(format!("X51 t={t:.3}: {e}"));
            }
        }
    }

    // the fourth trace equation on every component sample
    let (mut worst19, mut worst_pre) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let t = admissible_t(&mut rng, 3.0);
        for id in ComponentId::ALL {
            for s in sample_component(id, t).expect("admissible t") {
                worst_pre = worst_pre.max(max_trace_eq(&s.vector));
                let scale = s.vector.norm().max(1.0);
                worst19 = worst19.max(max_normalized(&tr3_residuals(&s.vector)) / scale);
            }
        }
    }
    ok &= worst19 <= 1e-8 && worst_pre <= 1e-10;
    outcome(
        ok,
        format!(
            "X3 triples {worst25:.2e}, X51 quadruples {worst31:.2e}, redundant equation {worst19:.2e} \
             (given first three families {worst_pre:.2e}){}",
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
        ),
    )
}

fn fig8_factorization() -> Outcome {
    let mut rng = rng(110);
    let (mut worst, mut x4_min_gap) = (0.0f64, f64::INFINITY);
    let mut ts: Vec<C64> = (0..20).map(|_| admissible_t(&mut rng, 3.0)).collect();
    ts.push(c(2.0, 0.0));
    for &t in &ts {
        for s in sample_component(ComponentId::X3, t).expect("admissible t") {
            let q = realize_character(&s.vector).expect("X3 realizes");
            let scale = q.scale();
            worst = worst
                .max(q.x(1).mat().distance(q.x(3).mat()) / scale)
                .max(q.x(2).mat().distance(q.x(4).mat()) / scale)
                .max(fig8_relator_residual(&q));
        }
        if (t - 2.0).norm() < 1e-12 {
            continue;
        }
        for s in sample_component(ComponentId::X4, t).expect("admissible t") {
            let q: Quadruple = realize_character(&s.vector).expect("X4 realizes");
            x4_min_gap = x4_min_gap.min(q.x(1).mat().distance(q.x(3).mat()) / q.scale());
        }
    }
    outcome(
        worst <= 1e-9 && x4_min_gap > 1e-3,
        format!("X3: x1=x3, x2=x4 and 4_1 relator within {worst:.2e} (<= 1e-9); X4 control: min |x1-x3| {x4_min_gap:.2e} (> 1e-3)"),
    )
}

fn completeness_probe() -> Outcome {
    let mut rng = rng(111);
    let mut lines = Vec::new();
    let mut ok = true;
    for _ in 0..5 {
        let t = admissible_t(&mut rng, 3.0);
        let rep = explore_solve(t, 11, 200);
        let irr = rep.irreducible_converged();
        let cls = rep.classified();
        let frac = if irr == 0 {
            1.0
        } else {
            cls as f64 / irr as f64
        };
        let repro = rep.reproducible_unclassified();
        for f in rep
            .findings
            .iter()
            .filter(|f| matches!(f.classification, Classification::Unclassified { .. }))
        {
            println!(
                "    unclassified at t={t:.4} attempt {}: {:?}",
                f.attempt, f.vector
            );
        }
        ok &= frac >= 0.95 && repro.is_empty();
        lines.push(format!(
            "t={t:.3}: {cls}/{irr} of {} converged",
            rep.converged
        ));
    }
    outcome(
        ok,
        format!(
            "{} (>= 95% classified, no reproducible unclassified)",
            lines.join(", ")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("universal identities", universal_identities),
        ("reconstruction round-trip", reconstruction_round_trip),
        ("component soundness", component_soundness),
        ("parabolic census", parabolic_census),
        ("excellent component quartic", excellent_component),
        ("special points", special_points_check),
        ("rotation symmetry", rotation_symmetry),
        ("pair irreducibility criterion", pair_criterion),
        ("structural lemmas", structural_lemmas),
        ("figure-eight factorization", fig8_factorization),
        ("completeness probe", completeness_probe),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.2} s]",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
