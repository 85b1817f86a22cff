//! Finite empirical models with exact rational probabilities.
//!
//! Distributions live only on maximal contexts. Everything on smaller
//! contexts is obtained by marginalization. Outcome tuples are stored as
//! label indices in context (sorted vertex) order; the fiber's label order
//! defines the index order everywhere.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;
use crate::scenario::{Context, ScenarioError, SimplicialScenario, VertexId};

/// Default cap on the number of global assignments enumerated.
pub const DEFAULT_ASSIGNMENT_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid outcome label {0:?}")]
    InvalidLabel(String),
    #[error("fiber of {0} is empty")]
    EmptyFiber(VertexId),
    #[error("fiber of {vertex} repeats label {label:?}")]
    DuplicateLabel { vertex: VertexId, label: String },
    #[error("no outcome fiber declared for {0}")]
    MissingFiber(VertexId),
    #[error("fiber declared for unknown vertex {0}")]
    UnknownFiber(VertexId),
    #[error("no distribution for maximal context {0}")]
    MissingDistribution(Context),
    #[error("distribution given for {0}, which is not a maximal context")]
    UnexpectedDistribution(Context),
    #[error("distribution on {context} has {got} weights, expected {expected}")]
    WrongArity {
        context: Context,
        expected: usize,
        got: usize,
    },
    #[error("distribution on {context} sums to {sum}, not 1")]
    Normalization { context: Context, sum: Rational },
    #[error("negative weight {weight} on {context}")]
    NegativeWeight { context: Context, weight: Rational },
    #[error("{sub} is not a subcontext of {context}")]
    NotASubcontext { sub: Context, context: Context },
    #[error("model is disturbing: marginals on {0} disagree between contexts")]
    Disturbing(Context),
    #[error("requested skeleton dimension {requested} exceeds model dimension {max}")]
    DimensionTooLarge { requested: usize, max: usize },
    #[error("{count} global assignments exceed the cap of {cap}")]
    TooManyAssignments { count: u128, cap: usize },
    #[error("mixture weights must be nonnegative and sum to 1 (sum is {0})")]
    BadWeights(Rational),
    #[error("assignment has {got} entries for {expected} vertices or an out-of-range label")]
    BadAssignment { expected: usize, got: usize },
    #[error("models do not share scenario and fibers")]
    IncompatibleModels,
}

/// Ordered outcome labels of one measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeFiber {
    vertex: VertexId,
    labels: Vec<String>,
}

impl OutcomeFiber {
    pub fn new(vertex: VertexId, labels: Vec<String>) -> Result<Self, ModelError> {
        if labels.is_empty() {
            return Err(ModelError::EmptyFiber(vertex));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if l.is_empty() || l.chars().any(|c| c == ',' || c.is_whitespace()) {
                return Err(ModelError::InvalidLabel(l.clone()));
            }
            if !seen.insert(l) {
                return Err(ModelError::DuplicateLabel {
                    vertex,
                    label: l.clone(),
                });
            }
        }
        Ok(OutcomeFiber { vertex, labels })
    }

    pub fn binary(vertex: VertexId) -> Self {
        OutcomeFiber {
            vertex,
            labels: vec!["0".into(), "1".into()],
        }
    }

    pub fn vertex(&self) -> &VertexId {
        &self.vertex
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

pub type Fibers = BTreeMap<VertexId, OutcomeFiber>;

/// Binary `{0,1}` fibers on every vertex of `s`.
pub fn binary_fibers(s: &SimplicialScenario) -> Fibers {
    s.vertices()
        .iter()
        .map(|u| (u.clone(), OutcomeFiber::binary(u.clone())))
        .collect()
}

/// Mixed-radix enumeration of index tuples, last position fastest.
pub fn tuples(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = shape.iter().product();
    (0..total).map(move |mut k| {
        let mut t = vec![0; shape.len()];
        for i in (0..shape.len()).rev() {
            t[i] = k % shape[i];
            k /= shape[i];
        }
        t
    })
}

pub(crate) fn flat_index(shape: &[usize], tuple: &[usize]) -> usize {
    tuple
        .iter()
        .zip(shape)
        .fold(0, |acc, (&t, &s)| acc * s + t)
}

/// Exact joint distribution over the Cartesian product of a context's fibers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    context: Context,
    shape: Vec<usize>,
    weights: Vec<Rational>,
}

impl JointDistribution {
    /// `weights` are listed in lexicographic tuple order.
    pub fn new(context: Context, shape: Vec<usize>, weights: Vec<Rational>) -> Result<Self, ModelError> {
        let expected: usize = shape.iter().product();
        if shape.len() != context.len() || weights.len() != expected {
            return Err(ModelError::WrongArity {
                context,
                expected,
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(ModelError::NegativeWeight {
                weight: w.clone(),
                context,
            });
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(ModelError::Normalization { context, sum });
        }
        Ok(JointDistribution {
            context,
            shape,
            weights,
        })
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, tuple: &[usize]) -> &Rational {
        &self.weights[flat_index(&self.shape, tuple)]
    }

    /// `(tuple, weight)` pairs in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> {
        tuples(&self.shape).zip(self.weights.iter())
    }

    pub fn marginalize(&self, sub: &Context) -> Result<JointDistribution, ModelError> {
        let positions: Vec<usize> = sub
            .vertices()
            .iter()
            .map(|u| self.context.position(u))
            .collect::<Option<_>>()
            .ok_or_else(|| ModelError::NotASubcontext {
                sub: sub.clone(),
                context: self.context.clone(),
            })?;
        let shape: Vec<usize> = positions.iter().map(|&p| self.shape[p]).collect();
        let mut weights = vec![Rational::zero(); shape.iter().product()];
        for (t, w) in self.entries() {
            let reduced: Vec<usize> = positions.iter().map(|&p| t[p]).collect();
            weights[flat_index(&shape, &reduced)] += w;
        }
        Ok(JointDistribution {
            context: sub.clone(),
            shape,
            weights,
        })
    }

    /// Largest absolute difference between matching weights.
    pub fn max_discrepancy(&self, other: &JointDistribution) -> Rational {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Convex combination `(1 - lambda) * self + lambda * other`.
    pub fn mix(&self, other: &JointDistribution, lambda: &Rational) -> Result<JointDistribution, ModelError> {
        if self.context != other.context || self.shape != other.shape {
            return Err(ModelError::IncompatibleModels);
        }
        let keep = Rational::one() - lambda;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a * &keep + b * lambda)
            .collect();
        JointDistribution::new(self.context.clone(), self.shape.clone(), weights)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: SimplicialScenario,
    fibers: Fibers,
    distributions: BTreeMap<Context, JointDistribution>,
}

impl EmpiricalModel {
    pub fn new(
        scenario: SimplicialScenario,
        fibers: Fibers,
        distributions: BTreeMap<Context, JointDistribution>,
    ) -> Result<Self, ModelError> {
        for u in scenario.vertices() {
            if !fibers.contains_key(u) {
                return Err(ModelError::MissingFiber(u.clone()));
            }
        }
        if let Some(u) = fibers.keys().find(|u| !scenario.vertices().contains(*u)) {
            return Err(ModelError::UnknownFiber(u.clone()));
        }
        for c in scenario.maximal_contexts() {
            let d = distributions
                .get(c)
                .ok_or_else(|| ModelError::MissingDistribution(c.clone()))?;
            let shape: Vec<usize> = c.vertices().iter().map(|u| fibers[u].size()).collect();
            if d.shape != shape || d.context != *c {
                return Err(ModelError::WrongArity {
                    context: c.clone(),
                    expected: shape.iter().product(),
                    got: d.weights.len(),
                });
            }
        }
        if let Some(c) = distributions
            .keys()
            .find(|c| !scenario.maximal_contexts().contains(*c))
        {
            return Err(ModelError::UnexpectedDistribution(c.clone()));
        }
        Ok(EmpiricalModel {
            scenario,
            fibers,
            distributions,
        })
    }

    /// Builds a model from per-context weight lists in lexicographic tuple order.
    pub fn from_tables<I>(scenario: SimplicialScenario, fibers: Fibers, tables: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Context, Vec<Rational>)>,
    {
        let mut distributions = BTreeMap::new();
        for (c, w) in tables {
            let shape = c
                .vertices()
                .iter()
                .map(|u| fibers.get(u).map(OutcomeFiber::size).ok_or_else(|| ModelError::MissingFiber(u.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            distributions.insert(c.clone(), JointDistribution::new(c, shape, w)?);
        }
        EmpiricalModel::new(scenario, fibers, distributions)
    }

    pub fn scenario(&self) -> &SimplicialScenario {
        &self.scenario
    }

    pub fn fibers(&self) -> &Fibers {
        &self.fibers
    }

    pub fn fiber(&self, u: &VertexId) -> &OutcomeFiber {
        &self.fibers[u]
    }

    pub fn distributions(&self) -> &BTreeMap<Context, JointDistribution> {
        &self.distributions
    }

    pub fn distribution(&self, c: &Context) -> Option<&JointDistribution> {
        self.distributions.get(c)
    }

    pub fn shape_of(&self, c: &Context) -> Vec<usize> {
        c.vertices().iter().map(|u| self.fibers[u].size()).collect()
    }

    /// Labels of an index tuple on `c`.
    pub fn tuple_labels(&self, c: &Context, tuple: &[usize]) -> Vec<String> {
        c.vertices()
            .iter()
            .zip(tuple)
            .map(|(u, &i)| self.fibers[u].labels[i].clone())
            .collect()
    }

    /// Marginals of `sub` from every maximal context containing it.
    pub fn marginals_on(&self, sub: &Context) -> Vec<(Context, JointDistribution)> {
        self.distributions
            .iter()
            .filter(|(c, _)| sub.is_subset(c))
            .map(|(c, d)| (c.clone(), d.marginalize(sub).expect("subset checked")))
            .collect()
    }

    /// The distribution on any simplex of the complex, provided all maximal
    /// contexts containing it agree on its marginal.
    pub fn distribution_on(&self, sub: &Context) -> Result<JointDistribution, ModelError> {
        if let Some(d) = self.distributions.get(sub) {
            return Ok(d.clone());
        }
        let mut marginals = self.marginals_on(sub).into_iter().map(|(_, d)| d);
        let first = marginals.next().ok_or_else(|| ModelError::NotASubcontext {
            sub: sub.clone(),
            context: sub.clone(),
        })?;
        if marginals.any(|d| d != first) {
            return Err(ModelError::Disturbing(sub.clone()));
        }
        Ok(first)
    }

    pub fn disturbance_report(&self) -> DisturbanceReport {
        let contexts: Vec<&Context> = self.distributions.keys().collect();
        let mut pairs = Vec::new();
        for (i, u1) in contexts.iter().enumerate() {
            for u2 in &contexts[i + 1..] {
                if let Some(shared) = u1.intersection(u2) {
                    let m1 = self.distributions[*u1].marginalize(&shared).expect("subset");
                    let m2 = self.distributions[*u2].marginalize(&shared).expect("subset");
                    pairs.push(DisturbancePair {
                        first: (*u1).clone(),
                        second: (*u2).clone(),
                        intersection: shared,
                        discrepancy: m1.max_discrepancy(&m2),
                    });
                }
            }
        }
        let is_nondisturbing = pairs.iter().all(|p| p.discrepancy.is_zero());
        DisturbanceReport {
            pairs,
            is_nondisturbing,
        }
    }

    pub fn is_nondisturbing(&self) -> bool {
        self.disturbance_report().is_nondisturbing
    }

    /// Replaces every maximal context of dimension `>= n` by its `n`-faces
    /// (smaller maximal contexts are kept) and marginalizes.
    pub fn restrict_to_skeleton(&self, n: usize) -> Result<EmpiricalModel, ModelError> {
        let max = self.scenario.dim();
        if n > max {
            return Err(ModelError::DimensionTooLarge { requested: n, max });
        }
        let report = self.disturbance_report();
        if let Some(p) = report.pairs.iter().find(|p| !p.discrepancy.is_zero()) {
            return Err(ModelError::Disturbing(p.intersection.clone()));
        }
        let mut new_contexts: BTreeSet<Context> = BTreeSet::new();
        for c in self.scenario.maximal_contexts() {
            if c.dim() >= n {
                new_contexts.extend(c.subsets_of_size(n + 1));
            } else {
                new_contexts.insert(c.clone());
            }
        }
        // A kept low-dimensional context may now sit inside a new face only
        // if it was already inside a maximal context, which cannot happen;
        // faces of different maximal contexts deduplicate through the set.
        let scenario = SimplicialScenario::build(self.scenario.vertices().iter().cloned(), new_contexts.iter().cloned())?;
        let mut distributions = BTreeMap::new();
        for c in new_contexts {
            let d = self.distribution_on(&c)?;
            distributions.insert(c, d);
        }
        EmpiricalModel::new(scenario, self.fibers.clone(), distributions)
    }

    /// Boolean coarse-graining: which tuples have positive weight.
    pub fn support(&self) -> PossibilisticModel {
        PossibilisticModel {
            supports: self
                .distributions
                .iter()
                .map(|(c, d)| (c.clone(), d.weights.iter().map(|w| w.is_positive()).collect()))
                .collect(),
        }
    }

    /// Convex combination `(1 - lambda) * self + lambda * other` of two
    /// models on the same scenario and fibers.
    pub fn mix(&self, other: &EmpiricalModel, lambda: &Rational) -> Result<EmpiricalModel, ModelError> {
        if self.scenario != other.scenario || self.fibers != other.fibers {
            return Err(ModelError::IncompatibleModels);
        }
        let distributions = self
            .distributions
            .iter()
            .map(|(c, d)| Ok((c.clone(), d.mix(&other.distributions[c], lambda)?)))
            .collect::<Result<_, ModelError>>()?;
        EmpiricalModel::new(self.scenario.clone(), self.fibers.clone(), distributions)
    }

    pub fn global_assignments(&self, cap: usize) -> Result<GlobalAssignments, ModelError> {
        global_assignments(&self.scenario, &self.fibers, cap)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisturbancePair {
    pub first: Context,
    pub second: Context,
    pub intersection: Context,
    pub discrepancy: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisturbanceReport {
    pub pairs: Vec<DisturbancePair>,
    pub is_nondisturbing: bool,
}

impl DisturbanceReport {
    pub fn max_discrepancy(&self) -> Rational {
        self.pairs
            .iter()
            .map(|p| p.discrepancy.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Supports per maximal context, in the same tuple order as the weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilisticModel {
    pub supports: BTreeMap<Context, Vec<bool>>,
}

impl PossibilisticModel {
    pub fn supported_count(&self, c: &Context) -> usize {
        self.supports[c].iter().filter(|&&b| b).count()
    }
}

/// Lexicographic enumeration of maps vertex → label index over sorted vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalAssignments {
    vertices: Vec<VertexId>,
    radices: Vec<usize>,
}

impl GlobalAssignments {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn count(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        tuples(&self.radices)
    }

    /// Position of `assignment` in the enumeration.
    pub fn index_of(&self, assignment: &[usize]) -> usize {
        flat_index(&self.radices, assignment)
    }

    /// Restriction of an assignment to a context, in context order.
    pub fn restrict(&self, assignment: &[usize], c: &Context) -> Vec<usize> {
        c.vertices()
            .iter()
            .map(|u| {
                let i = self.vertices.binary_search(u).expect("context vertex in scenario");
                assignment[i]
            })
            .collect()
    }

    pub fn vertex_index(&self, u: &VertexId) -> Option<usize> {
        self.vertices.binary_search(u).ok()
    }
}

pub fn global_assignments(s: &SimplicialScenario, fibers: &Fibers, cap: usize) -> Result<GlobalAssignments, ModelError> {
    let vertices: Vec<VertexId> = s.vertices().iter().cloned().collect();
    let radices = vertices
        .iter()
        .map(|u| fibers.get(u).map(OutcomeFiber::size).ok_or_else(|| ModelError::MissingFiber(u.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let count = radices.iter().map(|&r| r as u128).product::<u128>();
    if count > cap as u128 {
        return Err(ModelError::TooManyAssignments { count, cap });
    }
    Ok(GlobalAssignments { vertices, radices })
}

/// Pushforward of a mixture of global assignments onto every maximal context.
pub fn synthesize_noncontextual(
    s: &SimplicialScenario,
    fibers: &Fibers,
    weighted: &[(Vec<usize>, Rational)],
) -> Result<EmpiricalModel, ModelError> {
    let total: Rational = weighted.iter().map(|(_, w)| w).sum();
    if !total.is_one() || weighted.iter().any(|(_, w)| w.is_negative()) {
        return Err(ModelError::BadWeights(total));
    }
    let vertices: Vec<VertexId> = s.vertices().iter().cloned().collect();
    for (a, _) in weighted {
        let in_range = a.len() == vertices.len()
            && a.iter().zip(&vertices).all(|(&i, u)| fibers.get(u).is_some_and(|f| i < f.size()));
        if !in_range {
            return Err(ModelError::BadAssignment {
                expected: vertices.len(),
                got: a.len(),
            });
        }
    }
    let mut tables = Vec::new();
    for c in s.maximal_contexts() {
        let shape: Vec<usize> = c.vertices().iter().map(|u| fibers[u].size()).collect();
        let positions: Vec<usize> = c
            .vertices()
            .iter()
            .map(|u| vertices.binary_search(u).expect("context vertex"))
            .collect();
        let mut w = vec![Rational::zero(); shape.iter().product()];
        for (a, weight) in weighted {
            let t: Vec<usize> = positions.iter().map(|&p| a[p]).collect();
            w[flat_index(&shape, &t)] += weight;
        }
        tables.push((c.clone(), w));
    }
    EmpiricalModel::from_tables(s.clone(), fibers.clone(), tables)
}
