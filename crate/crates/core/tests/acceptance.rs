//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nctx_core::invariants::{compute_invariants, invariants_for, lovasz_theta, predictability, uniform_q, QChoice};
use nctx_core::models::{
    ce1_back, ce1_forward, ce1_polytope, extremal_models, extremal_partition, general_polytope, ks_colourable,
    max_expression, random_mixture, ModelSet, ProbModel,
};
use nctx_core::noncontextuality::{
    certify_trivial_povm_with, evaluate_nci, fcf_bound, violation_threshold_kcbs, Witness,
};
use nctx_core::quantum::{
    born_table, compute_corr, compute_r, fcf_measurement_residual, fcf_realization, identity, kcbs_realization,
    max_abs_diff, Operator,
};
use nctx_core::rational::{self, Rational};
use nctx_core::scenario::library::{
    cega_18, cega_27, cega_expression, chsh_4cycle, kcbs_g, kcbs_gamma_g, library_scenario, LibraryName,
};
use nctx_core::scenario::{build_gamma_g, specker_extension, structural_specker_check, ContextualityScenario, OrthoGraph, WeightedGraph};
use nctx_core::solvers::enumerate_vertices;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

const SEED: u64 = 2018;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_q(s: &ContextualityScenario, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let raw: Vec<i64> = (0..s.num_hyperedges()).map(|_| rng.gen_range(1..=100)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| rational::ratio(x, total)).collect()
}

fn kcbs_invariants() -> Outcome {
    let gg = kcbs_gamma_g();
    let inv = ok(invariants_for(&gg, &QChoice::Uniform))?;
    ensure!(inv.alpha == rational::int(2), "alpha = {}", inv.alpha);
    ensure!(inv.alpha_star == rational::ratio(5, 2), "alpha* = {}", inv.alpha_star);
    ensure!(inv.beta == Some(rational::ratio(1, 2)), "beta(uniform) = {:?}", inv.beta);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..10 {
        let q = random_q(&gg.scenario, &mut rng);
        let b = ok(invariants_for(&gg, &QChoice::Given(q.clone())))?.beta;
        ensure!(b == Some(rational::ratio(1, 2)), "beta at q = {q:?} is {b:?}");
    }
    let theta = ok(lovasz_theta(&WeightedGraph::unit(OrthoGraph::cycle(5))))?;
    ensure!((theta - 2.23607).abs() < 1e-4, "theta(C5) = {theta}");
    Ok(format!("alpha 2, alpha* 5/2, beta 1/2 at 11 q, theta {theta:.7}"))
}

fn kcbs_polytope() -> Outcome {
    let gg = kcbs_gamma_g();
    let ext = ok(extremal_partition(&gg.scenario))?;
    let (d, i) = (ext.deterministic.len(), ext.indeterministic.len());
    ensure!(d == 11 && i == 1, "{d} deterministic, {i} indeterministic");
    let half = rational::ratio(1, 2);
    let p = &ext.indeterministic[0];
    let n = gg.graph.num_vertices();
    let shape = (0..gg.scenario.num_vertices()).all(|v| {
        if v < n {
            *p.get(v) == half
        } else {
            p.get(v).is_zero()
        }
    });
    ensure!(shape, "indeterministic vertex is {:?}", p.to_map(&gg.scenario));
    Ok("12 vertices: 11 deterministic, 1 indeterministic (events 1/2)".into())
}

fn noiseless_kcbs() -> Outcome {
    let real = ok(kcbs_realization(1.0, 1.0))?;
    let t = ok(born_table(&real))?;
    let corr = ok(compute_corr(&t, &uniform_q(&real.scenario)))?;
    let r = ok(compute_r(&t, &kcbs_g()))?;
    let p0 = t.star.as_ref().map(|s| s.p0).unwrap_or(f64::NAN);
    ensure!((corr - 1.0).abs() < 1e-9, "Corr = {corr}");
    ensure!((r - 5f64.sqrt()).abs() < 1e-9, "R = {r}");
    ensure!(p0 == 1.0 / 3.0, "p0 = {p0}");
    let inv = ok(compute_invariants(&kcbs_g(), &QChoice::Uniform))?.1;
    let rep = ok(evaluate_nci(&corr, &r, &p0, &inv))?;
    ensure!(rep.witness == Witness::Violation, "verdict {:?}", rep.witness);
    Ok(format!("Corr {corr:.12}, R {r:.12}, p0 1/3, LHS {:.6}, Violation", rep.lhs_nci3.unwrap()))
}

fn depolarized_kcbs() -> Outcome {
    let inv = ok(compute_invariants(&kcbs_g(), &QChoice::Uniform))?.1;
    let closed = |x: f64| (1.0 / 3.0 + 2.0 / 3.0 * x, x * 5f64.sqrt() + 5.0 / 3.0 * (1.0 - x));
    let mut rows = Vec::new();
    for k in 0..20 {
        let x = 0.899 + 0.019 * k as f64 / 19.0;
        let r = x.sqrt();
        let real = ok(kcbs_realization(r, r))?;
        let t = ok(born_table(&real))?;
        let corr = ok(compute_corr(&t, &uniform_q(&real.scenario)))?;
        let rv = ok(compute_r(&t, &kcbs_g()))?;
        let (c0, r0) = closed(r * r);
        ensure!((corr - c0).abs() < 1e-9, "Corr at r1r2 = {x}: {corr} vs {c0}");
        ensure!((rv - r0).abs() < 1e-9, "R at r1r2 = {x}: {rv} vs {r0}");
        let p0 = t.star.as_ref().unwrap().p0;
        rows.push((x, corr, ok(evaluate_nci(&corr, &rv, &p0, &inv))?.witness));
    }
    // independent noise levels on each side
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..20 {
        let (r1, r2): (f64, f64) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        let real = ok(kcbs_realization(r1, r2))?;
        let t = ok(born_table(&real))?;
        let corr = ok(compute_corr(&t, &uniform_q(&real.scenario)))?;
        let rv = ok(compute_r(&t, &kcbs_g()))?;
        let (c0, r0) = closed(r1 * r2);
        ensure!((corr - c0).abs() < 1e-9 && (rv - r0).abs() < 1e-9, "closed form off at ({r1}, {r2})");
    }
    let flips: Vec<usize> = (1..rows.len()).filter(|&k| rows[k].2 != rows[k - 1].2).collect();
    ensure!(flips.len() == 1, "verdict changes {} times", flips.len());
    let k = flips[0];
    let (lo, hi) = (&rows[k - 1], &rows[k]);
    ensure!(lo.2 == Witness::NoViolation && hi.2 == Witness::Violation, "flip goes {:?} -> {:?}", lo.2, hi.2);
    for x in [lo.0, hi.0] {
        ensure!((x - 0.908).abs() <= 0.001 + 1e-12, "flip at r1r2 = {x}");
    }
    for c in [lo.1, hi.1] {
        ensure!((c - 0.939).abs() <= 0.001 + 1e-12, "flip at Corr = {c}");
    }
    let th = violation_threshold_kcbs();
    ensure!(lo.0 < th.product && th.product < hi.0, "threshold {} outside flip", th.product);
    Ok(format!(
        "closed forms to 1e-9 on 40 points; flip between r1r2 {:.3} and {:.3} (threshold {:.6}, Corr {:.6})",
        lo.0, hi.0, th.product, th.corr
    ))
}

fn fair_coin_flip() -> Outcome {
    let b = ok(fcf_bound())?;
    ensure!(b.value == rational::ratio(5, 6), "bound {}", b.value);
    let want = vec![Rational::one(), rational::ratio(1, 2), Rational::zero()];
    ensure!(b.vertex == want, "vertex {:?}", b.vertex);
    let real = fcf_realization();
    let t = ok(born_table(&real))?;
    let corr = ok(compute_corr(&t, &uniform_q(&real.scenario)))?;
    ensure!((corr - 1.0).abs() < 1e-9, "Corr_fcf = {corr}");
    let mix = fcf_measurement_residual(&real);
    ensure!(mix < 1e-12, "measurement mixture residual {mix}");
    let half: Operator = identity(2) * Complex64::new(0.5, 0.0);
    for k in 0..3 {
        let res = max_abs_diff(&real.coarse_grained_source(k), &half);
        ensure!(res < 1e-12, "source {k} differs from I/2 by {res}");
    }
    Ok(format!("bound 5/6 at (1, 1/2, 0); trine Corr_fcf {corr:.12}"))
}

fn cega() -> Outcome {
    ensure!(ok(ks_colourable(&cega_18()))?.is_none(), "Γ18 colourable");
    let s27 = cega_27();
    ensure!(ok(ks_colourable(&s27))?.is_some(), "Γ27 uncolourable");
    let want = [["8", "9", "9"], ["1", "1", "3/2"], ["9", "10", "21/2"]];
    for (k, row) in (1..=3).zip(want) {
        let w = ok(cega_expression(k))?;
        for (class, expect) in [ModelSet::Classical, ModelSet::Ce1, ModelSet::General].into_iter().zip(row) {
            let got = ok(max_expression(&s27, &w, class))?;
            let got = got.value().map(rational::format);
            ensure!(got.as_deref() == Some(expect), "Expr{k} over {class:?}: {got:?} vs {expect}");
        }
    }
    Ok("Γ18 uncolourable, Γ27 colourable, (8,9,9) (1,1,3/2) (9,10,21/2)".into())
}

fn specker() -> Outcome {
    let s = cega_18();
    ensure!(!ok(structural_specker_check(&s))?.holds(), "Γ18 passes structural Specker");
    let ext = ok(specker_extension(&s))?;
    ensure!(ok(structural_specker_check(&ext.scenario))?.holds(), "Γ' fails structural Specker");
    let vertices = ok(enumerate_vertices(&ok(ce1_polytope(&s))?))?;
    let models: Vec<ProbModel> = vertices
        .into_iter()
        .map(|v| ProbModel::new(&s, v))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mixtures: Vec<ProbModel> = (0..50).map(|_| random_mixture(&models, &mut rng)).collect();
    for m in models.iter().chain(&mixtures) {
        let up = ok(ce1_forward(&ext, &s, m))?;
        let back = ok(ce1_back(&ext, &s, &up))?;
        ensure!(back == *m, "round trip changed {:?}", m.to_map(&s));
        let again = ok(ce1_forward(&ext, &s, &back))?;
        ensure!(again == up, "forward not stable");
    }
    Ok(format!(
        "Γ18 violates, Γ' holds ({} added cliques); {} CE1 vertices + 50 mixtures round-trip",
        ext.added_cliques.len(),
        models.len()
    ))
}

fn trivial_povms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for (name, gg) in [("KCBS", kcbs_gamma_g()), ("4-cycle", chsh_4cycle())] {
        let s = &gg.scenario;
        let (_, inv) = ok(compute_invariants(&gg.graph, &QChoice::Uniform))?;
        let ext = ok(extremal_partition(s))?;
        let all: Vec<ProbModel> = ext.deterministic.iter().chain(&ext.indeterministic).cloned().collect();
        let mut models: Vec<ProbModel> = ext.deterministic.clone();
        if name == "4-cycle" {
            let n = gg.graph.num_vertices();
            let values = (0..s.num_vertices())
                .map(|v| if v < n { rational::ratio(1, 2) } else { Rational::zero() })
                .collect();
            models.push(ok(ProbModel::new(s, values))?);
        }
        models.extend((0..200).map(|_| random_mixture(&all, &mut rng)));
        for m in &models {
            let c = ok(certify_trivial_povm_with(&ext, m, &inv))?;
            ensure!(c.verdict == Witness::NoViolation, "{name}: {:?} gives {:?}", m.to_map(s), c.verdict);
            // the bounds must cover the model itself
            let r = m.weighted_sum(&weights_on(s, &gg.graph));
            ensure!(r <= c.r_bound, "{name}: R {r} above bound {}", c.r_bound);
            let pred = predictability(s, &inv.q_used, m);
            ensure!(pred <= c.corr_bound, "{name}: predictability {pred} above bound {}", c.corr_bound);
            checked += 1;
        }
    }
    Ok(format!("{checked} models certified NoViolation"))
}

fn weights_on(s: &ContextualityScenario, g: &WeightedGraph) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); s.num_vertices()];
    for (id, x) in g.graph().vertices().iter().zip(g.weights()) {
        w[s.index_of(id).expect("G vertex in scenario")] = x.clone();
    }
    w
}

fn library_graphs() -> Vec<(String, WeightedGraph)> {
    let mut out = Vec::new();
    for name in LibraryName::FIXED.into_iter().chain((3..=8).map(LibraryName::NCycle)) {
        if let Some(g) = library_scenario(name).expect("library builds").graph {
            out.push((name.to_string(), g));
        }
    }
    out
}

fn sandwich() -> Outcome {
    let graphs = library_graphs();
    for (name, g) in &graphs {
        let (_, inv) = ok(compute_invariants(g, &QChoice::Uniform))?;
        let a = rational::to_f64(&inv.alpha);
        let s = rational::to_f64(&inv.alpha_star);
        ensure!(a <= inv.theta + 1e-5 && inv.theta <= s + 1e-5, "{name}: {a} / {} / {s}", inv.theta);
    }
    let inv = ok(compute_invariants(&kcbs_g(), &QChoice::Uniform))?.1;
    for p0 in [rational::ratio(1, 4), rational::ratio(1, 3), Rational::one()] {
        let rep = ok(evaluate_nci(&Rational::one(), &rational::ratio(9, 4), &p0, &inv))?;
        ensure!(rep.bound_nci2 == Some(2.0), "NCI2 bound at Corr = 1 is {:?}", rep.bound_nci2);
    }
    Ok(format!("sandwich on {} library graphs; NCI2 bound at Corr = 1 equals alpha", graphs.len()))
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut scenarios = 0;
    for name in LibraryName::FIXED.into_iter().chain((3..=7).map(LibraryName::NCycle)) {
        let item = ok(library_scenario(name))?;
        let s = &item.scenario;
        let vertices = ok(enumerate_vertices(&general_polytope(s)))?;
        let mut weight_sets = vec![match &item.graph {
            Some(g) => weights_on(s, g),
            None => vec![Rational::one(); s.num_vertices()],
        }];
        weight_sets.push((0..s.num_vertices()).map(|_| rational::int(rng.gen_range(-3..=5))).collect());
        if name == LibraryName::Cega27 {
            weight_sets.extend((1..=3).map(|k| cega_expression(k).expect("k in 1..=3")));
        }
        for w in &weight_sets {
            let brute = vertices
                .iter()
                .map(|v| v.iter().zip(w).fold(Rational::zero(), |a, (x, y)| a + x * y))
                .max()
                .ok_or("empty polytope")?;
            let lp = ok(max_expression(s, w, ModelSet::General))?;
            ensure!(lp.value() == Some(&brute), "{name}: LP {:?} vs brute {brute}", lp.value());
        }
        scenarios += 1;
    }
    // β against a direct scan of Λ_ind
    let mut betas = 0;
    let mut graphs = vec![kcbs_g()];
    graphs.extend([5, 7, 9].map(|n| WeightedGraph::unit(OrthoGraph::cycle(n))));
    for g in &graphs {
        let gg = ok(build_gamma_g(g))?;
        let s = &gg.scenario;
        let ind: Vec<ProbModel> = ok(extremal_models(s))?
            .into_iter()
            .filter(|m| !m.is_deterministic())
            .collect();
        for q in [uniform_q(s), random_q(s, &mut rng), random_q(s, &mut rng)] {
            let scan = ind
                .iter()
                .map(|p| {
                    s.hyperedges().iter().zip(&q).fold(Rational::zero(), |acc, (e, qe)| {
                        let best = e.iter().map(|&v| p.get(v).clone()).max().unwrap();
                        acc + qe * best
                    })
                })
                .max()
                .ok_or("no indeterministic vertices")?;
            let beta = ok(invariants_for(&gg, &QChoice::Given(q)))?.beta;
            ensure!(beta.as_ref() == Some(&scan), "beta {beta:?} vs scan {scan}");
            betas += 1;
        }
    }
    Ok(format!("max_expression matches brute force on {scenarios} scenarios; beta matches scan {betas} times"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("KCBS invariants", kcbs_invariants),
        ("KCBS polytope", kcbs_polytope),
        ("noiseless KCBS realization", noiseless_kcbs),
        ("depolarized KCBS sweep", depolarized_kcbs),
        ("fair coin flip", fair_coin_flip),
        ("CEGA bounds", cega),
        ("Specker machinery", specker),
        ("trivial POVMs never violate", trivial_povms),
        ("sandwich and reduction", sandwich),
        ("oracle cross-checks", oracles),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
