//! JSON model documents and transition-atlas files.
//!
//! A model document looks like
//!
//! ```json
//! {
//!   "name": "bell",
//!   "vertices": ["a", "b", "c", "d"],
//!   "outcomes": {"a": ["0", "1"], "b": ["0", "1"], "c": ["0", "1"], "d": ["0", "1"]},
//!   "contexts": [["a", "b"], ["b", "c"], ["c", "d"], ["a", "d"]],
//!   "distributions": {"a,b": {"0,0": "1/2", "1,1": "1/2"}, "...": {}}
//! }
//! ```
//!
//! Context keys list vertices joined by `,`; tuple keys list outcome labels in
//! the same vertex order. Omitted tuples have weight zero. Vertices missing
//! from `outcomes` get the binary fiber `["0", "1"]`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::connection::{ConnectionError, StochasticKernel, TransitionAtlas};
use crate::model::{flat_index, tuples, EmpiricalModel, Fibers, JointDistribution, ModelError, OutcomeFiber};
use crate::rational::{parse_rational, to_text, Rational};
use crate::scenario::{Context, ScenarioError, SimplicialScenario, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub name: String,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub outcomes: BTreeMap<String, Vec<String>>,
    pub contexts: Vec<Vec<String>>,
    pub distributions: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("distribution on {context} sums to {sum}, not 1")]
    Normalization { context: String, sum: Rational },
    #[error("tuple `{tuple}` on {context}: `{label}` is not an outcome of {vertex}")]
    UnknownLabel {
        context: String,
        tuple: String,
        vertex: String,
        label: String,
    },
    #[error("tuple `{tuple}` on {context} has {got} labels, expected {expected}")]
    TupleArity {
        context: String,
        tuple: String,
        expected: usize,
        got: usize,
    },
    #[error("weight `{text}` for `{tuple}` on {context}: {message}")]
    BadWeight {
        context: String,
        tuple: String,
        text: String,
        message: String,
    },
    #[error("context key `{0}` does not name a maximal context")]
    UnknownContext(String),
    #[error("context {0} is given twice")]
    DuplicateContext(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

impl From<ScenarioError> for DocumentError {
    fn from(e: ScenarioError) -> Self {
        DocumentError::Model(ModelError::Scenario(e))
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T, DocumentError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() || inner.is_io() {
            DocumentError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        } else {
            DocumentError::Schema {
                path,
                message: inner.to_string(),
            }
        }
    })?;
    Ok(value)
}

pub fn parse_document(bytes: &[u8]) -> Result<ModelDocument, DocumentError> {
    from_json(bytes)
}

/// Parses and validates a model document.
pub fn parse_model(bytes: &[u8]) -> Result<EmpiricalModel, DocumentError> {
    parse_document(bytes)?.to_model()
}

fn split_key(key: &str) -> Vec<&str> {
    key.split(',').map(str::trim).collect()
}

/// A context key in the caller's vertex order.
fn written_vertices(key: &str) -> Result<Vec<VertexId>, DocumentError> {
    split_key(key)
        .into_iter()
        .map(|l| VertexId::new(l).map_err(DocumentError::from))
        .collect()
}

impl ModelDocument {
    pub fn to_model(&self) -> Result<EmpiricalModel, DocumentError> {
        let vertices = self
            .vertices
            .iter()
            .map(|l| VertexId::new(l.as_str()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = BTreeSet::new();
        if let Some(dup) = vertices.iter().find(|u| !seen.insert((*u).clone())) {
            return Err(ScenarioError::DuplicateVertex(dup.clone()).into());
        }
        let contexts = self
            .contexts
            .iter()
            .map(|c| Context::new(c.iter().map(|l| VertexId::new(l.as_str())).collect::<Result<Vec<_>, _>>()?))
            .collect::<Result<Vec<_>, _>>()?;
        let scenario = SimplicialScenario::build(vertices.iter().cloned(), contexts)?;

        let mut fibers = Fibers::new();
        for (label, outcomes) in &self.outcomes {
            let u = VertexId::new(label.as_str())?;
            if !scenario.vertices().contains(&u) {
                return Err(ModelError::UnknownFiber(u).into());
            }
            fibers.insert(u.clone(), OutcomeFiber::new(u, outcomes.clone())?);
        }
        for u in &vertices {
            fibers
                .entry(u.clone())
                .or_insert_with(|| OutcomeFiber::binary(u.clone()));
        }

        let mut distributions = BTreeMap::new();
        for (key, table) in &self.distributions {
            let written = written_vertices(key)?;
            let ctx = Context::new(written.iter().cloned())?;
            if !scenario.maximal_contexts().contains(&ctx) {
                return Err(DocumentError::UnknownContext(key.clone()));
            }
            if distributions.contains_key(&ctx) {
                return Err(DocumentError::DuplicateContext(ctx.key()));
            }
            let d = parse_table(key, &written, &ctx, table, &fibers)?;
            distributions.insert(ctx, d);
        }
        Ok(EmpiricalModel::new(scenario, fibers, distributions)?)
    }

    /// The document of a model; every tuple is listed, zeros included.
    pub fn from_model(name: &str, m: &EmpiricalModel) -> Self {
        let vertices = m.scenario().vertices().iter().map(|u| u.to_string()).collect();
        let outcomes = m
            .fibers()
            .iter()
            .map(|(u, f)| (u.to_string(), f.labels().to_vec()))
            .collect();
        let contexts = m
            .scenario()
            .maximal_contexts()
            .iter()
            .map(|c| c.vertices().iter().map(|u| u.to_string()).collect())
            .collect();
        let distributions = m
            .distributions()
            .iter()
            .map(|(c, d)| {
                let table = d
                    .entries()
                    .map(|(t, w)| (m.tuple_labels(c, &t).join(","), to_text(w)))
                    .collect();
                (c.key(), table)
            })
            .collect();
        ModelDocument {
            name: name.to_string(),
            vertices,
            outcomes,
            contexts,
            distributions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

fn parse_table(
    key: &str,
    written: &[VertexId],
    ctx: &Context,
    table: &BTreeMap<String, String>,
    fibers: &Fibers,
) -> Result<JointDistribution, DocumentError> {
    let shape: Vec<usize> = ctx.vertices().iter().map(|u| fibers[u].size()).collect();
    let positions: Vec<usize> = written.iter().map(|u| ctx.position(u).expect("same vertices")).collect();
    let mut weights = vec![Rational::zero(); shape.iter().product()];
    for (tuple_key, text) in table {
        let labels = split_key(tuple_key);
        if labels.len() != written.len() {
            return Err(DocumentError::TupleArity {
                context: key.to_string(),
                tuple: tuple_key.clone(),
                expected: written.len(),
                got: labels.len(),
            });
        }
        let mut tuple = vec![0; written.len()];
        for ((u, label), &p) in written.iter().zip(&labels).zip(&positions) {
            tuple[p] = fibers[u].index_of(label).ok_or_else(|| DocumentError::UnknownLabel {
                context: key.to_string(),
                tuple: tuple_key.clone(),
                vertex: u.to_string(),
                label: label.to_string(),
            })?;
        }
        let w = parse_rational(text).map_err(|e| DocumentError::BadWeight {
            context: key.to_string(),
            tuple: tuple_key.clone(),
            text: text.clone(),
            message: e.to_string(),
        })?;
        weights[flat_index(&shape, &tuple)] += w;
    }
    let sum: Rational = weights.iter().sum();
    if !sum.is_one() {
        return Err(DocumentError::Normalization {
            context: ctx.key(),
            sum,
        });
    }
    Ok(JointDistribution::new(ctx.clone(), shape, weights)?)
}

/// One transition kernel: `matrix[t][s] = t(t | s)` on the vertex's outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub vertex: String,
    pub incoming: String,
    pub outgoing: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasDocument {
    pub transitions: Vec<TransitionEntry>,
}

/// Parses a transition-atlas file and checks it against `m`.
pub fn parse_atlas(bytes: &[u8], m: &EmpiricalModel) -> Result<TransitionAtlas, DocumentError> {
    let doc: AtlasDocument = from_json(bytes)?;
    let mut atlas = TransitionAtlas::new();
    for (i, e) in doc.transitions.iter().enumerate() {
        let vertex = VertexId::new(e.vertex.as_str())?;
        let incoming = Context::new(written_vertices(&e.incoming)?)?;
        let outgoing = Context::new(written_vertices(&e.outgoing)?)?;
        let matrix = e
            .matrix
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, text)| {
                        parse_rational(text).map_err(|err| DocumentError::Schema {
                            path: format!("transitions[{i}].matrix[{r}][{c}]"),
                            message: err.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let kernel = StochasticKernel::new(vertex.clone(), vertex.clone(), matrix, BTreeSet::new())?;
        atlas.insert(vertex, incoming, outgoing, kernel)?;
    }
    atlas.validate(m)?;
    Ok(atlas)
}

/// Every distribution of `m` as `(context key, [(tuple key, weight)])`, for
/// renderers that want the zero rows too.
pub fn labelled_tables(m: &EmpiricalModel) -> Vec<(String, Vec<(String, Rational)>)> {
    m.distributions()
        .iter()
        .map(|(c, d)| {
            let rows = tuples(d.shape())
                .map(|t| (m.tuple_labels(c, &t).join(","), d.weight(&t).clone()))
                .collect();
            (c.key(), rows)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{all_builtins, builtin};
    use crate::rational::ratio;

    const BELL: &str = r#"{
        "name": "bell",
        "vertices": ["a", "b", "c", "d"],
        "contexts": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]],
        "distributions": {
            "a,b": {"0,0": "1/2", "1,1": "1/2"},
            "b,c": {"0,0": "3/8", "0,1": "1/8", "1,0": "1/8", "1,1": "3/8"},
            "c,d": {"0,0": "0.375", "0,1": "0.125", "1,0": "0.125", "1,1": "0.375"},
            "d,a": {"0,0": "1/8", "0,1": "3/8", "1,0": "3/8", "1,1": "1/8"}
        }
    }"#;

    #[test]
    fn bell_document_matches_builtin() {
        let m = parse_model(BELL.as_bytes()).unwrap();
        assert_eq!(m, builtin("bell").unwrap());
    }

    #[test]
    fn round_trip_every_builtin() {
        for (name, m) in all_builtins() {
            let text = ModelDocument::from_model(name, &m).to_json();
            assert_eq!(parse_model(text.as_bytes()).unwrap(), m, "{name}");
        }
    }

    #[test]
    fn reversed_keys_are_reindexed() {
        // "d,a" lists d first; the tuple "0,1" means d = 0, a = 1.
        let doc = BELL.replace(r#""d,a": {"0,0": "1/8", "0,1": "3/8", "1,0": "3/8", "1,1": "1/8"}"#, r#""d,a": {"0,0": "1/8", "0,1": "1/2", "1,0": "1/4", "1,1": "1/8"}"#);
        let m = parse_model(doc.as_bytes()).unwrap();
        let ad = m.distribution(&Context::of(&["a", "d"])).unwrap();
        assert_eq!(*ad.weight(&[1, 0]), ratio(1, 2));
        assert_eq!(*ad.weight(&[0, 1]), ratio(1, 4));
    }

    #[test]
    fn normalization_error() {
        let doc = BELL.replace(r#""a,b": {"0,0": "1/2", "1,1": "1/2"}"#, r#""a,b": {"0,0": "1/2", "1,1": "5/8"}"#);
        match parse_model(doc.as_bytes()) {
            Err(DocumentError::Normalization { context, sum }) => {
                assert_eq!(context, "a,b");
                assert_eq!(sum, ratio(9, 8));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_label() {
        let doc = BELL.replace(r#""0,0": "1/2", "1,1": "1/2""#, r#""0,2": "1/2", "1,1": "1/2""#);
        assert!(matches!(parse_model(doc.as_bytes()), Err(DocumentError::UnknownLabel { .. })));
    }

    #[test]
    fn syntax_and_schema_errors() {
        match parse_model(b"{\n  \"name\": \"x\",\n  oops }") {
            Err(DocumentError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let doc = BELL.replace(r#""vertices": ["a", "b", "c", "d"]"#, r#""vertices": ["a", 7, "c", "d"]"#);
        match parse_model(doc.as_bytes()) {
            Err(DocumentError::Schema { path, .. }) => assert_eq!(path, "vertices[1]"),
            other => panic!("{other:?}"),
        }
        let doc = BELL.replace(r#""name": "bell","#, r#""name": "bell", "extra": 1,"#);
        assert!(matches!(parse_model(doc.as_bytes()), Err(DocumentError::Schema { .. })));
    }

    #[test]
    fn structural_errors() {
        let doc = BELL.replace(r#""d,a": {"#, r#""a,c": {"#);
        assert!(matches!(parse_model(doc.as_bytes()), Err(DocumentError::UnknownContext(_))));
        let doc = BELL.replace(r#""a,b": {"0,0": "1/2", "1,1": "1/2"},"#, "");
        assert!(matches!(
            parse_model(doc.as_bytes()),
            Err(DocumentError::Model(ModelError::MissingDistribution(_)))
        ));
        let doc = BELL.replace(r#""0,0": "1/2", "1,1": "1/2""#, r#""0,0": "half", "1,1": "1/2""#);
        assert!(matches!(parse_model(doc.as_bytes()), Err(DocumentError::BadWeight { .. })));
        let doc = BELL.replace(r#""0,0": "1/2", "1,1": "1/2""#, r#""0": "1/2", "1,1": "1/2""#);
        assert!(matches!(parse_model(doc.as_bytes()), Err(DocumentError::TupleArity { .. })));
    }

    #[test]
    fn atlas_file() {
        let s = crate::scenario::SimplicialScenario::from_contexts([Context::of(&["a", "b"]), Context::of(&["b", "c"])]).unwrap();
        let m = EmpiricalModel::from_tables(
            s.clone(),
            crate::model::binary_fibers(&s),
            [
                (Context::of(&["a", "b"]), vec![ratio(1, 4), ratio(0, 1), ratio(0, 1), ratio(3, 4)]),
                (Context::of(&["b", "c"]), vec![ratio(3, 4), ratio(0, 1), ratio(0, 1), ratio(1, 4)]),
            ],
        )
        .unwrap();
        let good = br#"{"transitions": [{"vertex": "b", "incoming": "a,b", "outgoing": "b,c", "matrix": [["0", "1"], ["1", "0"]]}]}"#;
        assert_eq!(parse_atlas(good, &m).unwrap().len(), 1);
        let bad = br#"{"transitions": [{"vertex": "b", "incoming": "a,b", "outgoing": "b,c", "matrix": [["1", "0"], ["0", "1"]]}]}"#;
        assert!(matches!(
            parse_atlas(bad, &m),
            Err(DocumentError::Connection(ConnectionError::TransitionMismatch { .. }))
        ));
    }

    #[test]
    fn labelled_tables_include_zeros() {
        let tables = labelled_tables(&builtin("pr_box").unwrap());
        let (key, rows) = tables.iter().find(|(k, _)| k == "a,e").unwrap();
        assert_eq!(key, "a,e");
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], ("0,0".to_string(), Rational::zero()));
    }
}
