//! Graphviz rendering of a model's support as a bundle over its 1-skeleton.
//!
//! Every `(vertex, outcome)` pair is a node, grouped by vertex; every edge
//! context contributes one arrow per outcome pair of positive probability.

use std::fmt::Write;

use num_traits::Zero;

use crate::model::EmpiricalModel;
use crate::rational::to_text;

fn node(vertex: &str, label: &str) -> String {
    format!("\"{}={}\"", escape(vertex), escape(label))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(name: &str, m: &EmpiricalModel) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for (u, fiber) in m.fibers() {
        writeln!(out, "  subgraph \"cluster_{}\" {{", escape(u.as_str())).unwrap();
        writeln!(out, "    label=\"{}\";", escape(u.as_str())).unwrap();
        for l in fiber.labels() {
            writeln!(out, "    {} [label=\"{}\"];", node(u.as_str(), l), escape(l)).unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }
    for edge in m.scenario().faces(1) {
        let Ok(d) = m.distribution_on(&edge) else {
            writeln!(out, "  // {}: no well-defined distribution", edge.key()).unwrap();
            continue;
        };
        let (a, b) = (&edge.vertices()[0], &edge.vertices()[1]);
        for (t, w) in d.entries() {
            if w.is_zero() {
                continue;
            }
            let la = &m.fiber(a).labels()[t[0]];
            let lb = &m.fiber(b).labels()[t[1]];
            writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                node(a.as_str(), la),
                node(b.as_str(), lb),
                to_text(w)
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}
