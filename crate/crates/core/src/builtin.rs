//! The builtin corpus of worked models, all on binary outcome fibers.

use crate::model::{binary_fibers, EmpiricalModel};
use crate::rational::{ratio, Rational};
use crate::scenario::{cycle_scenario, Context, SimplicialScenario};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown builtin `{name}`; known builtins: {}", BUILTINS.join(", "))]
pub struct UnknownBuiltin {
    pub name: String,
}

pub const BUILTINS: &[&str] = &[
    "trivial",
    "pr_box",
    "kcbs",
    "hardy",
    "bell",
    "maximally_random",
    "modified_bell",
    "liar_random",
    "liar_random_2",
    "liar_random_1",
    "holonomy_counterexample",
    "tetrahedron",
    "barycentric_triangle",
    "ghz_octahedron",
    "svetlichny_box",
    "filled_triangle",
];

fn row(ws: &[(i64, i64)]) -> Vec<Rational> {
    ws.iter().map(|&(n, d)| ratio(n, d)).collect()
}

fn half(pattern: [i64; 4]) -> Vec<Rational> {
    pattern.iter().map(|&n| ratio(n, 2)).collect()
}

fn ident() -> Vec<Rational> {
    half([1, 0, 0, 1])
}

fn swap() -> Vec<Rational> {
    half([0, 1, 1, 0])
}

fn uniform(n: usize) -> Vec<Rational> {
    vec![ratio(1, n as i64); n]
}

fn bell_like() -> Vec<Rational> {
    row(&[(3, 8), (1, 8), (1, 8), (3, 8)])
}

fn bell_anti() -> Vec<Rational> {
    row(&[(1, 8), (3, 8), (3, 8), (1, 8)])
}

fn even3() -> Vec<Rational> {
    [1, 0, 0, 1, 0, 1, 1, 0].iter().map(|&n| ratio(n, 4)).collect()
}

fn odd3() -> Vec<Rational> {
    [0, 1, 1, 0, 1, 0, 0, 1].iter().map(|&n| ratio(n, 4)).collect()
}

/// A binary table written in the vertex order `labels`, re-indexed into the
/// sorted order of its context.
fn table(labels: &[&str], weights: Vec<Rational>) -> (Context, Vec<Rational>) {
    let ctx = Context::of(labels);
    let k = labels.len();
    let perm: Vec<usize> = ctx
        .vertices()
        .iter()
        .map(|u| labels.iter().position(|l| *l == u.as_str()).expect("label"))
        .collect();
    let mut out = vec![Rational::default(); weights.len()];
    for (idx, w) in weights.into_iter().enumerate() {
        let bits: Vec<usize> = (0..k).map(|i| (idx >> (k - 1 - i)) & 1).collect();
        let sorted = perm.iter().fold(0, |acc, &p| acc * 2 + bits[p]);
        out[sorted] = w;
    }
    (ctx, out)
}

fn binary_model(scenario: SimplicialScenario, tables: Vec<(Context, Vec<Rational>)>) -> EmpiricalModel {
    let fibers = binary_fibers(&scenario);
    EmpiricalModel::from_tables(scenario, fibers, tables).expect("builtin tables are valid")
}

fn five_cycle(rows: [Vec<Rational>; 5]) -> EmpiricalModel {
    let names = [["a", "b"], ["b", "c"], ["c", "d"], ["d", "e"], ["e", "a"]];
    let tables = names.iter().zip(rows).map(|(n, r)| table(n, r)).collect();
    binary_model(cycle_scenario(&["a", "b", "c", "d", "e"]), tables)
}

fn four_cycle(rows: [Vec<Rational>; 4]) -> EmpiricalModel {
    let names = [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]];
    let tables = names.iter().zip(rows).map(|(n, r)| table(n, r)).collect();
    binary_model(cycle_scenario(&["a", "b", "c", "d"]), tables)
}

fn triangles(faces: &[(&str, Vec<Rational>)]) -> EmpiricalModel {
    let tables: Vec<_> = faces
        .iter()
        .map(|(name, r)| {
            let labels: Vec<String> = name.chars().map(String::from).collect();
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            table(&labels, r.clone())
        })
        .collect();
    let scenario = SimplicialScenario::from_contexts(tables.iter().map(|(c, _)| c.clone())).expect("valid faces");
    binary_model(scenario, tables)
}

pub fn builtin(name: &str) -> Result<EmpiricalModel, UnknownBuiltin> {
    let m = match name {
        "trivial" => five_cycle([ident(), ident(), ident(), ident(), ident()]),
        "pr_box" => five_cycle([ident(), ident(), ident(), ident(), swap()]),
        "kcbs" => five_cycle([swap(), swap(), swap(), swap(), swap()]),
        "hardy" => five_cycle([
            row(&[(2, 9), (2, 3), (1, 9), (0, 1)]),
            row(&[(0, 1), (1, 3), (2, 3), (0, 1)]),
            row(&[(1, 3), (1, 3), (1, 3), (0, 1)]),
            row(&[(0, 1), (2, 3), (1, 3), (0, 1)]),
            row(&[(2, 9), (1, 9), (2, 3), (0, 1)]),
        ]),
        "bell" => four_cycle([ident(), bell_like(), bell_like(), bell_anti()]),
        "maximally_random" => four_cycle([uniform(4), uniform(4), uniform(4), uniform(4)]),
        "modified_bell" => four_cycle([swap(), bell_like(), bell_like(), bell_anti()]),
        "liar_random" => four_cycle([swap(), uniform(4), uniform(4), uniform(4)]),
        "liar_random_2" => four_cycle([swap(), ident(), uniform(4), uniform(4)]),
        "liar_random_1" => four_cycle([swap(), ident(), ident(), uniform(4)]),
        "holonomy_counterexample" => four_cycle([ident(), ident(), ident(), bell_like()]),
        "tetrahedron" => triangles(&[("abc", even3()), ("abd", even3()), ("acd", odd3()), ("bcd", odd3())]),
        "barycentric_triangle" => triangles(&[("abd", even3()), ("acd", odd3()), ("bcd", odd3())]),
        "ghz_octahedron" => triangles(&[
            ("ABC", odd3()),
            ("ABc", uniform(8)),
            ("AbC", uniform(8)),
            ("aBC", uniform(8)),
            ("abc", uniform(8)),
            ("Abc", even3()),
            ("aBc", even3()),
            ("abC", even3()),
        ]),
        "svetlichny_box" => triangles(&[
            ("ABC", even3()),
            ("ABc", even3()),
            ("AbC", even3()),
            ("aBC", even3()),
            ("Abc", odd3()),
            ("aBc", odd3()),
            ("abC", odd3()),
            ("abc", odd3()),
        ]),
        // Edge marginals: ab and bc anticorrelated, ac correlated.
        "filled_triangle" => triangles(&[("abc", [0, 0, 1, 0, 0, 1, 0, 0].iter().map(|&n| ratio(n, 2)).collect())]),
        _ => {
            return Err(UnknownBuiltin {
                name: name.to_string(),
            })
        }
    };
    Ok(m)
}

/// All builtins, in corpus order.
pub fn all_builtins() -> Vec<(&'static str, EmpiricalModel)> {
    BUILTINS
        .iter()
        .map(|&n| (n, builtin(n).expect("listed builtin")))
        .collect()
}

/// The boundary of the tetrahedron as a bare scenario.
pub fn tetrahedron_boundary() -> SimplicialScenario {
    SimplicialScenario::from_contexts(
        [["a", "b", "c"], ["a", "b", "d"], ["a", "c", "d"], ["b", "c", "d"]].map(|c| Context::of(&c)),
    )
    .expect("valid faces")
}
