//! Acceptance checklist. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always show up in
//! `cargo test` output. The process fails if any criterion outside
//! `KNOWN_RED` fails, or if a `KNOWN_RED` criterion starts passing (so the
//! list is kept honest in both directions). See the README for why the red
//! ones are red.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use contextuality::builtin::{all_builtins, builtin, tetrahedron_boundary};
use contextuality::connection::{
    all_edge_kernels, edge_kernels, holonomy, phi, singular_edges, svd, transport, ConnectionError, GroupClass, Matrix,
    Tolerances,
};
use contextuality::fraction::{classify, contextual_fraction, hierarchy, support_reduced_problem, ContextualityClass};
use contextuality::lp::{fm_oracle, solve_simplex, FmOutcome, LpProblem, LpStatus};
use contextuality::model::{binary_fibers, synthesize_noncontextual, tuples, EmpiricalModel};
use contextuality::rational::{int, ratio, to_text};
use contextuality::scenario::{
    barycentric_subdivided_triangle, cycle_scenario, graham_reduce_with, v, Context, SimplicialScenario, VertexId,
};
use contextuality::Rational;

const SEED: u64 = 0x5eed_c0de;
const LOOP_TOL: f64 = 1e-9;
const ORTHOGONALITY_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-12;
const SYNTHESIZED_MODELS: usize = 200;
const SVD_SAMPLES: usize = 500;
const LP_SAMPLES: usize = 200;
const RULE_ORDERS: usize = 100;

/// Criteria expected to fail; each has an explanation in the README.
const KNOWN_RED: &[&str] = &["2", "6a"];

struct Line {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn check(id: &'static str, title: &'static str, failures: Vec<String>, summary: String) -> Line {
    let pass = failures.is_empty();
    let detail = if pass { summary } else { format!("{summary}; {}", failures.join("; ")) };
    Line { id, title, pass, detail }
}

fn model(name: &str) -> EmpiricalModel {
    builtin(name).unwrap_or_else(|e| panic!("{e}"))
}

fn exact_fractions() -> Line {
    let expected = [
        ("trivial", ratio(1, 1)),
        ("pr_box", int(0)),
        ("kcbs", int(0)),
        ("hardy", ratio(7, 9)),
        ("bell", ratio(3, 4)),
        ("maximally_random", int(1)),
        ("modified_bell", int(1)),
        ("liar_random", int(1)),
        ("liar_random_1", ratio(1, 2)),
        ("holonomy_counterexample", ratio(3, 4)),
        ("tetrahedron", ratio(1, 4)),
        ("barycentric_triangle", ratio(1, 2)),
        ("ghz_octahedron", int(0)),
        ("svetlichny_box", int(0)),
    ];
    let mut failures = Vec::new();
    for (name, want) in &expected {
        match contextual_fraction(&model(name)) {
            Ok(fr) if &fr.ncf == want && fr.certified => {}
            Ok(fr) => failures.push(format!(
                "{name}: ncf {} (want {}), certified {}",
                to_text(&fr.ncf),
                to_text(want),
                fr.certified
            )),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    check("1", "exact contextual fractions", failures, format!("{} models, all certified", expected.len()))
}

fn classification() -> Line {
    use ContextualityClass::*;
    let expected = [
        ("pr_box", Strong),
        ("kcbs", Strong),
        ("ghz_octahedron", Strong),
        ("svetlichny_box", Strong),
        ("hardy", Possibilistic),
        ("bell", Probabilistic),
        ("holonomy_counterexample", Probabilistic),
        ("trivial", NonContextual),
        ("maximally_random", NonContextual),
        ("modified_bell", NonContextual),
    ];
    let mut failures = Vec::new();
    for (name, want) in &expected {
        match classify(&model(name)) {
            Ok(got) if &got == want => {}
            Ok(got) => failures.push(format!("{name}: {got} (want {want})")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let ok = expected.len() - failures.len();
    check("2", "classification", failures, format!("{ok}/{} as expected", expected.len()))
}

fn hierarchies() -> Line {
    let mut failures = Vec::new();
    let pinned = [("tetrahedron", [int(0), ratio(3, 4)]), ("ghz_octahedron", [int(0), int(1)])];
    for (name, want) in &pinned {
        match hierarchy(&model(name)) {
            Ok(h) => {
                let got = [h.cf_by_dim.get(&1).cloned(), h.cf_by_dim.get(&2).cloned()];
                if got[0].as_ref() != Some(&want[0]) || got[1].as_ref() != Some(&want[1]) {
                    failures.push(format!("{name}: cf by dimension {:?}", h.cf_by_dim));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let all = all_builtins();
    for (name, m) in &all {
        match hierarchy(m) {
            Ok(h) if h.monotone_nondecreasing => {}
            Ok(h) => failures.push(format!("{name}: not monotone at {:?}", h.first_violation)),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    check("3", "n-contextuality hierarchy", failures, format!("pinned values exact; monotone on {} builtins", all.len()))
}

fn kernels_and_holonomy() -> Line {
    let tol = Tolerances::default();
    let mut failures = Vec::new();

    let hardy_loop: Vec<VertexId> = ["a", "b", "c", "d", "e", "a"].iter().map(|l| v(l)).collect();
    let want = Matrix::from_rows(&[vec![0.8, 0.6], vec![0.6, -0.8]]);
    match transport(&model("hardy"), &hardy_loop, None, &tol) {
        Ok(q) if q.matrix.max_abs_diff(&want) <= LOOP_TOL => {}
        Ok(q) => failures.push(format!("hardy loop product {}", q.matrix)),
        Err(e) => failures.push(format!("hardy loop: {e}")),
    }

    let bell_bc = [vec![ratio(3, 4), ratio(1, 4)], vec![ratio(1, 4), ratio(3, 4)]];
    match edge_kernels(&model("bell"), &v("b"), &v("c")) {
        Ok((k, _)) if k.matrix() == &bell_bc[..] => {}
        Ok((k, _)) => failures.push(format!("bell bc kernel {k}")),
        Err(e) => failures.push(format!("bell bc: {e}")),
    }

    let expected = [
        ("pr_box", GroupClass::CyclicOfOrder(2)),
        ("kcbs", GroupClass::CyclicOfOrder(2)),
        ("hardy", GroupClass::CyclicOfOrder(2)),
        ("bell", GroupClass::CyclicOfOrder(2)),
        ("trivial", GroupClass::Trivial),
        ("modified_bell", GroupClass::Trivial),
        ("holonomy_counterexample", GroupClass::Trivial),
    ];
    for (name, want) in &expected {
        let m = model(name);
        let base = m.scenario().vertices().iter().next().unwrap().clone();
        match holonomy(&m, &base, None, &tol) {
            Ok(h) if h.classification == *want => {}
            Ok(h) => failures.push(format!("{name}: {} (want {want})", h.classification)),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }

    let all = all_builtins();
    for (name, m) in &all {
        let classes: Result<Vec<GroupClass>, ConnectionError> = m
            .scenario()
            .vertices()
            .iter()
            .map(|b| holonomy(m, b, None, &tol).map(|h| h.classification))
            .collect();
        match classes {
            Ok(c) if c.windows(2).all(|w| w[0] == w[1]) => {}
            Ok(c) => failures.push(format!("{name}: basepoint-dependent {c:?}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    check(
        "4",
        "kernels and holonomy",
        failures,
        format!("hardy loop, bell bc, {} classes, basepoint independence on {} builtins", expected.len(), all.len()),
    )
}

fn acyclicity(rng: &mut StdRng) -> Line {
    let labels = ["a", "b", "c", "d", "e"];
    let cases: Vec<(&str, SimplicialScenario, bool)> = vec![
        ("filled_triangle", model("filled_triangle").scenario().clone(), true),
        ("barycentric subdivision", barycentric_subdivided_triangle(), false),
        ("barycentric_triangle", model("barycentric_triangle").scenario().clone(), false),
        ("5-cycle", cycle_scenario(&labels), false),
        ("tetrahedron boundary", tetrahedron_boundary(), false),
    ];
    let mut failures = Vec::new();
    for (name, s, want) in &cases {
        let (acyclic, _) = s.is_acyclic();
        if acyclic != *want {
            failures.push(format!("{name}: acyclic = {acyclic}"));
        }
        let unstable = (0..RULE_ORDERS)
            .filter(|_| graham_reduce_with(s.maximal_contexts(), |legal| rng.gen_range(0..legal.len())).is_acyclic() != *want)
            .count();
        if unstable > 0 {
            failures.push(format!("{name}: {unstable}/{RULE_ORDERS} random orders disagree"));
        }
    }
    check("5", "acyclicity", failures, format!("{} scenarios x {RULE_ORDERS} random rule orders", cases.len()))
}

/// A random mixture of global assignments on a small cycle, resampled until
/// no edge kernel is singular.
fn synthesized(rng: &mut StdRng) -> (EmpiricalModel, Vec<VertexId>) {
    let labels = ["a", "b", "c", "d", "e"];
    loop {
        let n = rng.gen_range(3..=5);
        let s = cycle_scenario(&labels[..n]);
        let fibers = binary_fibers(&s);
        let weights: Vec<(Vec<usize>, i64)> = tuples(&vec![2; n])
            .map(|a| (a, rng.gen_range(0..=6)))
            .filter(|(_, w)| *w > 0)
            .collect();
        let total: i64 = weights.iter().map(|(_, w)| w).sum();
        if total == 0 {
            continue;
        }
        let weighted: Vec<(Vec<usize>, Rational)> = weights.into_iter().map(|(a, w)| (a, ratio(w, total))).collect();
        let m = synthesize_noncontextual(&s, &fibers, &weighted).expect("valid mixture");
        if singular_edges(&m, &Tolerances::default()).map_or(true, |s| s.is_empty()) {
            let cycle = labels[..n].iter().map(|l| v(l)).collect();
            return (m, cycle);
        }
    }
}

fn synthesized_models(rng: &mut StdRng) -> Line {
    let tol = Tolerances::default();
    let (mut ncf_one, mut trivial, mut path_independent) = (0, 0, 0);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for _ in 0..SYNTHESIZED_MODELS {
        let (m, cycle) = synthesized(rng);
        if contextual_fraction(&m).is_ok_and(|fr| fr.ncf == int(1) && fr.certified) {
            ncf_one += 1;
        }
        match holonomy(&m, &cycle[0], None, &tol) {
            Ok(h) if h.classification == GroupClass::Trivial => trivial += 1,
            Ok(_) => {}
            Err(e) => errors.push(e.to_string()),
        }
        // Two arcs from cycle[0] to the vertex opposite it.
        let k = cycle.len() / 2;
        let forward = &cycle[..=k];
        let mut backward = vec![cycle[0].clone()];
        backward.extend(cycle[k..].iter().rev().cloned());
        match (transport(&m, forward, None, &tol), transport(&m, &backward, None, &tol)) {
            (Ok(f), Ok(b)) => {
                let gap = f.matrix.max_abs_diff(&b.matrix);
                worst = worst.max(gap);
                if gap <= LOOP_TOL {
                    path_independent += 1;
                }
            }
            (Err(e), _) | (_, Err(e)) => errors.push(e.to_string()),
        }
    }
    let n = SYNTHESIZED_MODELS;
    let mut failures = errors;
    if ncf_one < n || trivial < n || path_independent < n {
        failures.push(format!("worst transport gap between arcs {worst:.3e}"));
    }
    check(
        "6a",
        "synthesized non-contextual models",
        failures,
        format!("ncf = 1 on {ncf_one}/{n}, trivial holonomy on {trivial}/{n}, path-independent on {path_independent}/{n}"),
    )
}

fn phi_orthogonality() -> Line {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let (mut checked, mut worst) = (0, 0.0f64);
    for (name, m) in all_builtins() {
        let kernels = match all_edge_kernels(&m) {
            Ok(k) => k,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        for ((a, b), k) in kernels {
            match phi(&k, &tol) {
                Ok(q) => {
                    checked += 1;
                    let defect = q.matrix.orthogonality_defect();
                    worst = worst.max(defect);
                    if defect > ORTHOGONALITY_TOL {
                        failures.push(format!("{name} {a}->{b}: defect {defect:.3e}"));
                    }
                }
                Err(ConnectionError::SingularKernel { .. }) => {}
                Err(e) => failures.push(format!("{name} {a}->{b}: {e}")),
            }
        }
    }
    check("6b", "orthogonality of phi", failures, format!("{checked} non-singular kernels, worst {worst:.1e}"))
}

fn random_stochastic(rng: &mut StdRng, d: usize) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut col: Vec<f64> = (0..d).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
        if col.iter().all(|x| *x == 0.0) {
            col[rng.gen_range(0..d)] = 1.0;
        }
        let total: f64 = col.iter().sum();
        cols.push(col.into_iter().map(|x| x / total).collect());
    }
    let rows: Vec<Vec<f64>> = (0..d).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Matrix::from_rows(&rows)
}

fn svd_reconstruction(rng: &mut StdRng) -> Line {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..SVD_SAMPLES {
        let d = rng.gen_range(1..=6);
        let a = random_stochastic(rng, d);
        match svd(&a) {
            Ok(s) => {
                let err = s.reconstruct().max_abs_diff(&a);
                worst = worst.max(err);
                if err > RECONSTRUCTION_TOL {
                    failures.push(format!("sample {i} (d = {d}): error {err:.3e}"));
                }
            }
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    check("6c", "svd reconstruction", failures, format!("{SVD_SAMPLES} matrices, worst {worst:.1e}"))
}

fn random_lp(rng: &mut StdRng) -> LpProblem {
    let n = rng.gen_range(1..=8);
    let rows = rng.gen_range(1..=if n > 5 { 3 } else { 5 });
    let small = |rng: &mut StdRng, lo: i64, hi: i64| int(rng.gen_range(lo..=hi));
    let objective = (0..n).map(|_| small(rng, -3, 3)).collect();
    let matrix = (0..rows).map(|_| (0..n).map(|_| small(rng, -3, 3)).collect()).collect();
    let rhs = (0..rows).map(|_| small(rng, -2, 6)).collect();
    LpProblem::new(objective, matrix, rhs).expect("consistent")
}

fn simplex_matches_oracle(rng: &mut StdRng) -> Line {
    let mut failures = Vec::new();
    let mut statuses = BTreeMap::new();
    for i in 0..LP_SAMPLES {
        let p = random_lp(rng);
        let s = solve_simplex(&p);
        let agree = match fm_oracle(&p) {
            Ok(FmOutcome::Optimal(value)) => s.status == LpStatus::Optimal && s.value == value,
            Ok(FmOutcome::Infeasible) => s.status == LpStatus::Infeasible,
            Ok(FmOutcome::Unbounded) => s.status == LpStatus::Unbounded,
            Err(e) => {
                failures.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        *statuses.entry(format!("{:?}", s.status)).or_insert(0) += 1;
        if !agree {
            failures.push(format!("instance {i}: simplex {:?} {}", s.status, to_text(&s.value)));
        }
    }
    check("6d", "simplex vs Fourier-Motzkin", failures, format!("{LP_SAMPLES} instances, statuses {statuses:?}"))
}

fn functoriality() -> Line {
    let mut failures = Vec::new();
    let mut checks = 0;
    for (name, m) in all_builtins() {
        for (c, dist) in m.distributions() {
            for s in c.nonempty_subsets() {
                let direct = dist.marginalize(&s).unwrap();
                for t in s.nonempty_subsets() {
                    checks += 1;
                    let via = direct.marginalize(&t).unwrap();
                    if dist.marginalize(&t).unwrap() != via {
                        failures.push(format!("{name}: {} -> {} -> {}", c.key(), s.key(), t.key()));
                    }
                }
            }
        }
        let marginal = |u: &VertexId| m.distribution_on(&Context::new([u.clone()]).unwrap()).map(|d| d.weights().to_vec());
        match all_edge_kernels(&m) {
            Ok(kernels) => {
                for ((a, b), k) in kernels {
                    checks += 1;
                    if k.apply(&marginal(&a).unwrap()) != marginal(&b).unwrap() {
                        failures.push(format!("{name}: K mu_{a} != mu_{b}"));
                    }
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    check("6e", "marginal functoriality and kernel pushforward", failures, format!("{checks} exact identities"))
}

fn mixtures() -> Line {
    let (trivial, pr) = (model("trivial"), model("pr_box"));
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for lambda in [int(0), ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)] {
        let m = trivial.mix(&pr, &lambda).expect("same scenario");
        let lp = contextual_fraction(&m).expect("solvable");
        let (reduced, _) = support_reduced_problem(&m).expect("solvable");
        let oracle = match fm_oracle(&reduced) {
            Ok(FmOutcome::Optimal(x)) => x,
            other => {
                failures.push(format!("lambda {}: oracle {other:?}", to_text(&lambda)));
                continue;
            }
        };
        let want = int(1) - &lambda;
        if lp.ncf != oracle || oracle != want || !lp.certified {
            failures.push(format!(
                "lambda {}: simplex {}, oracle {}, 1 - lambda {}",
                to_text(&lambda),
                to_text(&lp.ncf),
                to_text(&oracle),
                to_text(&want)
            ));
        }
        values.push(to_text(&lp.ncf));
    }
    check("7", "pr_box/trivial mixtures", failures, format!("ncf = [{}] = 1 - lambda", values.join(", ")))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);
    let lines = vec![
        exact_fractions(),
        classification(),
        hierarchies(),
        kernels_and_holonomy(),
        acyclicity(&mut rng),
        synthesized_models(&mut rng),
        phi_orthogonality(),
        svd_reconstruction(&mut rng),
        simplex_matches_oracle(&mut rng),
        functoriality(),
        mixtures(),
    ];
    let mut unexpected = Vec::new();
    for l in &lines {
        let known_red = KNOWN_RED.contains(&l.id);
        let tag = match (l.pass, known_red) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        println!("{tag:<17} {:<3} {}: {}", l.id, l.title, l.detail);
        if l.pass == known_red {
            unexpected.push(l.id);
        }
    }
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
