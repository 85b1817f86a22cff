//! Contextual fraction, contextuality classes and the dimension hierarchy.
//!
//! The non-contextual fraction is the optimum of
//! `max Σ b  s.t.  M b <= p, b >= 0`, where `M` is the incidence matrix
//! between local events of maximal contexts (rows) and global assignments
//! (columns). Rows and columns share one canonical order: contexts sorted,
//! tuples and assignments lexicographic.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::lp::{self, LpProblem, LpSolution, LpStatus};
use crate::model::{EmpiricalModel, GlobalAssignments, ModelError, DEFAULT_ASSIGNMENT_CAP};
use crate::rational::Rational;
use crate::scenario::Context;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FractionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("linear program ended with status {0:?}")]
    Solver(LpStatus),
}

/// 0/1 incidence between local events and global assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    /// `(maximal context, outcome tuple)` per row.
    pub rows: Vec<(Context, Vec<usize>)>,
    pub columns: GlobalAssignments,
    /// For every row, the indices of the columns holding a 1.
    pub ones: Vec<Vec<usize>>,
}

impl IncidenceMatrix {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.count()
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        u8::from(self.ones[row].binary_search(&col).is_ok())
    }

    pub fn dense(&self) -> Vec<Vec<Rational>> {
        let n = self.num_columns();
        self.ones
            .iter()
            .map(|ones| {
                let mut r = vec![Rational::zero(); n];
                for &j in ones {
                    r[j] = Rational::one();
                }
                r
            })
            .collect()
    }
}

pub fn incidence_matrix(m: &EmpiricalModel) -> Result<IncidenceMatrix, FractionError> {
    incidence_matrix_with_cap(m, DEFAULT_ASSIGNMENT_CAP)
}

pub fn incidence_matrix_with_cap(m: &EmpiricalModel, cap: usize) -> Result<IncidenceMatrix, FractionError> {
    let columns = m.global_assignments(cap)?;
    let mut rows = Vec::new();
    let mut ones = Vec::new();
    for (c, d) in m.distributions() {
        let base = rows.len();
        for (t, _) in d.entries() {
            rows.push((c.clone(), t));
            ones.push(Vec::new());
        }
        let shape = d.shape().to_vec();
        for (j, g) in columns.iter().enumerate() {
            let local = columns.restrict(&g, c);
            let offset = local.iter().zip(&shape).fold(0, |acc, (&t, &s)| acc * s + t);
            ones[base + offset].push(j);
        }
    }
    Ok(IncidenceMatrix {
        rows,
        columns,
        ones,
    })
}

/// Probabilities in incidence-row order.
pub fn probability_vector(m: &EmpiricalModel) -> Vec<Rational> {
    m.distributions()
        .values()
        .flat_map(|d| d.weights().iter().cloned())
        .collect()
}

/// The contextual-fraction LP over all global assignments.
pub fn fraction_problem(m: &EmpiricalModel) -> Result<(LpProblem, IncidenceMatrix), FractionError> {
    let inc = incidence_matrix(m)?;
    let p = probability_vector(m);
    let objective = vec![Rational::one(); inc.num_columns()];
    let problem = LpProblem::new(objective, inc.dense(), p).expect("consistent dimensions");
    Ok((problem, inc))
}

/// The same LP restricted to assignments whose every local event has positive
/// probability; all other columns are forced to zero by some `p_i = 0` row.
/// Returns the reduced problem and the retained column indices.
pub fn support_reduced_problem(m: &EmpiricalModel) -> Result<(LpProblem, Vec<usize>), FractionError> {
    let inc = incidence_matrix(m)?;
    let p = probability_vector(m);
    let mut killed = vec![false; inc.num_columns()];
    for (ones, pi) in inc.ones.iter().zip(&p) {
        if pi.is_zero() {
            for &j in ones {
                killed[j] = true;
            }
        }
    }
    let kept: Vec<usize> = (0..inc.num_columns()).filter(|&j| !killed[j]).collect();
    let rows: Vec<usize> = (0..inc.num_rows()).filter(|&i| !p[i].is_zero()).collect();
    let matrix = rows
        .iter()
        .map(|&i| {
            kept.iter()
                .map(|&j| if inc.entry(i, j) == 1 { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let rhs = rows.iter().map(|&i| p[i].clone()).collect();
    let problem = LpProblem::new(vec![Rational::one(); kept.len()], matrix, rhs).expect("consistent dimensions");
    Ok((problem, kept))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionResult {
    pub ncf: Rational,
    pub cf: Rational,
    /// Weight per global assignment, in column order.
    pub witness_b: Vec<Rational>,
    pub certified: bool,
    pub solution: LpSolution,
}

impl FractionResult {
    /// Assignments carrying positive weight in the witness.
    pub fn weighted_assignments(&self, columns: &GlobalAssignments) -> Vec<(Vec<usize>, Rational)> {
        columns
            .iter()
            .zip(&self.witness_b)
            .filter(|(_, w)| w.is_positive())
            .map(|(g, w)| (g, w.clone()))
            .collect()
    }
}

pub fn contextual_fraction(m: &EmpiricalModel) -> Result<FractionResult, FractionError> {
    let (problem, _) = fraction_problem(m)?;
    let solution = lp::solve_simplex(&problem);
    if solution.status != LpStatus::Optimal {
        return Err(FractionError::Solver(solution.status));
    }
    let certified = lp::verify_certificate(&problem, &solution);
    Ok(FractionResult {
        ncf: solution.value.clone(),
        cf: Rational::one() - &solution.value,
        witness_b: solution.primal.clone(),
        certified,
        solution,
    })
}

/// Backtracking search for global assignments consistent with every
/// context's support.
struct SupportSearch<'a> {
    columns: GlobalAssignments,
    /// Per maximal context: vertex positions, tuple shape and support.
    contexts: Vec<(Vec<usize>, Vec<usize>, &'a [Rational])>,
    /// Contexts to check once position `i` is assigned (their last vertex).
    closing: Vec<Vec<usize>>,
}

impl<'a> SupportSearch<'a> {
    fn new(m: &'a EmpiricalModel) -> Result<Self, FractionError> {
        let columns = m.global_assignments(DEFAULT_ASSIGNMENT_CAP)?;
        let n = columns.vertices().len();
        let mut contexts = Vec::new();
        let mut closing = vec![Vec::new(); n];
        for (k, (c, d)) in m.distributions().iter().enumerate() {
            let pos: Vec<usize> = c
                .vertices()
                .iter()
                .map(|u| columns.vertex_index(u).expect("vertex in scenario"))
                .collect();
            closing[*pos.iter().max().expect("nonempty context")].push(k);
            contexts.push((pos, d.shape().to_vec(), d.weights()));
        }
        Ok(SupportSearch {
            columns,
            contexts,
            closing,
        })
    }

    fn context_ok(&self, k: usize, values: &[usize]) -> bool {
        let (pos, shape, weights) = &self.contexts[k];
        let idx = pos.iter().zip(shape).fold(0, |acc, (&p, &s)| acc * s + values[p]);
        weights[idx].is_positive()
    }

    /// True if some consistent assignment agrees with `fixed` (`None` = free).
    fn exists(&self, fixed: &[Option<usize>]) -> bool {
        let mut values = vec![0; fixed.len()];
        self.extend(0, fixed, &mut values)
    }

    fn extend(&self, i: usize, fixed: &[Option<usize>], values: &mut [usize]) -> bool {
        if i == values.len() {
            return true;
        }
        let choices: Vec<usize> = match fixed[i] {
            Some(x) => vec![x],
            None => (0..self.columns.radices()[i]).collect(),
        };
        for x in choices {
            values[i] = x;
            if self.closing[i].iter().all(|&k| self.context_ok(k, values)) && self.extend(i + 1, fixed, values) {
                return true;
            }
        }
        false
    }
}

/// For every supported local event: does some support-consistent global
/// assignment restrict to it?
pub fn possibilistic_extendable(m: &EmpiricalModel) -> Result<BTreeMap<(Context, Vec<usize>), bool>, FractionError> {
    let search = SupportSearch::new(m)?;
    let n = search.columns.vertices().len();
    let mut out = BTreeMap::new();
    for (c, d) in m.distributions() {
        for (t, w) in d.entries() {
            if !w.is_positive() {
                continue;
            }
            let mut fixed = vec![None; n];
            for (u, &x) in c.vertices().iter().zip(&t) {
                fixed[search.columns.vertex_index(u).expect("vertex")] = Some(x);
            }
            out.insert((c.clone(), t), search.exists(&fixed));
        }
    }
    Ok(out)
}

/// True if at least one global assignment is consistent with all supports.
pub fn has_global_section_of_support(m: &EmpiricalModel) -> Result<bool, FractionError> {
    let search = SupportSearch::new(m)?;
    Ok(search.exists(&vec![None; search.columns.vertices().len()]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ContextualityClass {
    NonContextual,
    Probabilistic,
    Possibilistic,
    Strong,
}

impl std::fmt::Display for ContextualityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

pub fn classify(m: &EmpiricalModel) -> Result<ContextualityClass, FractionError> {
    Ok(classify_detailed(m)?.0)
}

/// Classification together with the fraction it was derived from (when the
/// decision needed it).
pub fn classify_detailed(m: &EmpiricalModel) -> Result<(ContextualityClass, Option<FractionResult>), FractionError> {
    if !has_global_section_of_support(m)? {
        return Ok((ContextualityClass::Strong, None));
    }
    if possibilistic_extendable(m)?.values().any(|ok| !ok) {
        return Ok((ContextualityClass::Possibilistic, None));
    }
    let fr = contextual_fraction(m)?;
    let class = if fr.cf.is_positive() {
        ContextualityClass::Probabilistic
    } else {
        ContextualityClass::NonContextual
    };
    Ok((class, Some(fr)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyProfile {
    pub cf_by_dim: BTreeMap<usize, Rational>,
    pub monotone_nondecreasing: bool,
    /// First `(n, n + 1)` where the contextual fraction drops.
    pub first_violation: Option<(usize, usize)>,
}

pub fn hierarchy(m: &EmpiricalModel) -> Result<HierarchyProfile, FractionError> {
    if let Some(p) = m.disturbance_report().pairs.into_iter().find(|p| !p.discrepancy.is_zero()) {
        return Err(ModelError::Disturbing(p.intersection).into());
    }
    let mut cf_by_dim = BTreeMap::new();
    for n in 1..=m.scenario().dim() {
        let restricted = m.restrict_to_skeleton(n)?;
        cf_by_dim.insert(n, contextual_fraction(&restricted)?.cf);
    }
    let values: Vec<(&usize, &Rational)> = cf_by_dim.iter().collect();
    let first_violation = values
        .windows(2)
        .find(|w| w[1].1 < w[0].1)
        .map(|w| (*w[0].0, *w[1].0));
    Ok(HierarchyProfile {
        monotone_nondecreasing: first_violation.is_none(),
        first_violation,
        cf_by_dim,
    })
}
