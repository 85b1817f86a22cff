//! Exact rational linear programming.
//!
//! Problems have the inequality form `maximize c·x  s.t.  A x <= p, x >= 0`.
//! [`solve_simplex`] is a dense two-phase tableau simplex with Bland's rule
//! and returns a dual certificate; [`fm_oracle`] is an independent
//! Fourier–Motzkin elimination used to cross-check small instances.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint matrix row {row} has {got} entries, expected {expected}")]
    Dimension { row: usize, expected: usize, got: usize },
    #[error("right-hand side has {got} entries for {expected} rows")]
    RhsLength { expected: usize, got: usize },
    #[error("Fourier-Motzkin oracle limited to {limit} variables/{row_limit} rows (got {got})")]
    TooLarge { got: usize, limit: usize, row_limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub matrix: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

impl LpProblem {
    pub fn new(objective: Vec<Rational>, matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Result<Self, LpError> {
        let n = objective.len();
        if rhs.len() != matrix.len() {
            return Err(LpError::RhsLength {
                expected: matrix.len(),
                got: rhs.len(),
            });
        }
        if let Some((row, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(LpError::Dimension {
                row,
                expected: n,
                got: r.len(),
            });
        }
        Ok(LpProblem {
            objective,
            matrix,
            rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.len()
    }

    fn dot(a: &[Rational], b: &[Rational]) -> Rational {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal value; zero unless `status` is `Optimal`.
    pub value: Rational,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
}

impl LpSolution {
    fn without_optimum(status: LpStatus) -> Self {
        LpSolution {
            status,
            value: Rational::zero(),
            primal: Vec::new(),
            dual: Vec::new(),
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row: `c_B B^-1 a_j - c_j`; last entry is the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    enterable: Vec<bool>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        if !piv.is_one() {
            for x in self.rows[r].iter_mut() {
                *x /= &piv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        if !self.obj[e].is_zero() {
            let f = self.obj[e].clone();
            for (x, p) in self.obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = e;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let w = self.width();
        let mut obj: Vec<Rational> = costs.iter().map(|c| -c).collect();
        obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    obj[j] += cb * &row[j];
                }
            }
        }
        self.obj = obj;
    }

    /// Runs Bland's rule to optimality. Returns false if unbounded.
    fn optimize(&mut self) -> bool {
        let w = self.width();
        loop {
            let entering = (0..w).find(|&j| self.enterable[j] && self.obj[j].is_negative());
            let Some(e) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[e];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }
}

/// Exact optimum of `max c·x, A x <= p, x >= 0` with a dual certificate.
pub fn solve_simplex(problem: &LpProblem) -> LpSolution {
    let n = problem.num_vars();
    let m = problem.num_rows();
    let flipped: Vec<bool> = problem.rhs.iter().map(Signed::is_negative).collect();
    let k = flipped.iter().filter(|&&f| f).count();
    let width = n + m + k;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n + m;
    for i in 0..m {
        let mut row = vec![Rational::zero(); width + 1];
        let sign = if flipped[i] { -Rational::one() } else { Rational::one() };
        for (r, a) in row.iter_mut().zip(&problem.matrix[i]) {
            *r = a * &sign;
        }
        row[n + i] = sign.clone();
        row[width] = &problem.rhs[i] * &sign;
        if flipped[i] {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: vec![Rational::zero(); width + 1],
        basis,
        enterable: vec![true; width],
    };

    if k > 0 {
        let mut phase1 = vec![Rational::zero(); width];
        for c in phase1.iter_mut().skip(n + m) {
            *c = -Rational::one();
        }
        t.set_costs(&phase1);
        t.optimize();
        if t.obj[width].is_negative() {
            return LpSolution::without_optimum(LpStatus::Infeasible);
        }
        for r in 0..m {
            if t.basis[r] >= n + m {
                // Basic artificial at level zero: swap in any structural or
                // slack column with a nonzero entry (one always exists).
                let j = (0..n + m)
                    .find(|&j| !t.rows[r][j].is_zero())
                    .expect("tableau rows have full rank");
                t.pivot(r, j);
            }
        }
        for e in t.enterable.iter_mut().skip(n + m) {
            *e = false;
        }
    }

    let mut costs = vec![Rational::zero(); width];
    costs[..n].clone_from_slice(&problem.objective);
    t.set_costs(&costs);
    if !t.optimize() {
        return LpSolution::without_optimum(LpStatus::Unbounded);
    }

    let mut primal = vec![Rational::zero(); n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            primal[b] = row[width].clone();
        }
    }
    let dual: Vec<Rational> = (0..m).map(|i| t.obj[n + i].clone()).collect();
    LpSolution {
        status: LpStatus::Optimal,
        value: t.obj[width].clone(),
        primal,
        dual,
    }
}

/// Exact check of primal feasibility, dual feasibility and `c·x = y·p`.
pub fn verify_certificate(problem: &LpProblem, solution: &LpSolution) -> bool {
    if solution.status != LpStatus::Optimal
        || solution.primal.len() != problem.num_vars()
        || solution.dual.len() != problem.num_rows()
    {
        return false;
    }
    let x = &solution.primal;
    let y = &solution.dual;
    let primal_ok = x.iter().all(|v| !v.is_negative())
        && problem
            .matrix
            .iter()
            .zip(&problem.rhs)
            .all(|(row, p)| LpProblem::dot(row, x) <= *p);
    let dual_ok = y.iter().all(|v| !v.is_negative())
        && (0..problem.num_vars()).all(|j| {
            let col: Rational = problem.matrix.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum();
            col >= problem.objective[j]
        });
    let cx = LpProblem::dot(&problem.objective, x);
    let yp = LpProblem::dot(y, &problem.rhs);
    primal_ok && dual_ok && cx == yp && cx == solution.value
}

/// Result of the Fourier–Motzkin oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmOutcome {
    Optimal(Rational),
    Infeasible,
    Unbounded,
}

pub const FM_MAX_VARS: usize = 8;
pub const FM_MAX_ROWS: usize = 200_000;

/// `coeffs · (x, z) <= bound`, scaled so the first nonzero coefficient has
/// magnitude one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Halfspace {
    coeffs: Vec<Rational>,
    bound: Rational,
}

impl Halfspace {
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in self.coeffs.iter_mut() {
                *c /= &lead;
            }
            self.bound /= &lead;
        }
        self
    }
}

/// Optimum of the problem by projecting `{(x, z) : z <= c·x, A x <= p, x >= 0}`
/// onto `z`.
pub fn fm_oracle(problem: &LpProblem) -> Result<FmOutcome, LpError> {
    let n = problem.num_vars();
    if n > FM_MAX_VARS {
        return Err(LpError::TooLarge {
            got: n,
            limit: FM_MAX_VARS,
            row_limit: FM_MAX_ROWS,
        });
    }
    let z = n;
    let mut system: BTreeSet<Halfspace> = BTreeSet::new();
    let push = |coeffs: Vec<Rational>, bound: Rational, system: &mut BTreeSet<Halfspace>| {
        system.insert(Halfspace { coeffs, bound }.normalized());
    };
    for (row, p) in problem.matrix.iter().zip(&problem.rhs) {
        let mut coeffs = row.clone();
        coeffs.push(Rational::zero());
        push(coeffs, p.clone(), &mut system);
    }
    for j in 0..n {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[j] = -Rational::one();
        push(coeffs, Rational::zero(), &mut system);
    }
    let mut coeffs: Vec<Rational> = problem.objective.iter().map(|c| -c).collect();
    coeffs.push(Rational::one());
    push(coeffs, Rational::zero(), &mut system);

    // With no variables at all, constant rows would otherwise survive to the end.
    let Some(mut system) = drop_constant_rows(system) else {
        return Ok(FmOutcome::Infeasible);
    };
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        // Eliminate the variable producing the fewest combinations.
        let (pos_in_list, var) = remaining
            .iter()
            .copied()
            .enumerate()
            .min_by_key(|&(_, j)| {
                let pos = system.iter().filter(|h| h.coeffs[j].is_positive()).count();
                let neg = system.iter().filter(|h| h.coeffs[j].is_negative()).count();
                pos * neg
            })
            .expect("nonempty");
        remaining.swap_remove(pos_in_list);

        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), BTreeSet::new());
        for h in system {
            if h.coeffs[var].is_positive() {
                pos.push(h);
            } else if h.coeffs[var].is_negative() {
                neg.push(h);
            } else {
                next.insert(h);
            }
        }
        for p in &pos {
            for q in &neg {
                let a = p.coeffs[var].clone();
                let b = -q.coeffs[var].clone();
                let coeffs: Vec<Rational> = p
                    .coeffs
                    .iter()
                    .zip(&q.coeffs)
                    .map(|(x, y)| x / &a + y / &b)
                    .collect();
                let bound = &p.bound / &a + &q.bound / &b;
                next.insert(Halfspace { coeffs, bound }.normalized());
            }
        }
        let Some(filtered) = drop_constant_rows(next) else {
            return Ok(FmOutcome::Infeasible);
        };
        if filtered.len() > FM_MAX_ROWS {
            return Err(LpError::TooLarge {
                got: filtered.len(),
                limit: FM_MAX_VARS,
                row_limit: FM_MAX_ROWS,
            });
        }
        system = filtered;
    }

    let mut upper: Option<Rational> = None;
    let mut lower: Option<Rational> = None;
    for h in &system {
        let a = &h.coeffs[z];
        let b = &h.bound / a;
        if a.is_positive() {
            upper = Some(upper.map_or(b.clone(), |u| u.min(b)));
        } else {
            lower = Some(lower.map_or(b.clone(), |l| l.max(b)));
        }
    }
    match (lower, upper) {
        (Some(l), Some(u)) if l > u => Ok(FmOutcome::Infeasible),
        (_, None) => Ok(FmOutcome::Unbounded),
        (_, Some(u)) => Ok(FmOutcome::Optimal(u)),
    }
}

/// Removes rows with no variable left; `None` if one of them is `0 <= negative`.
fn drop_constant_rows(system: BTreeSet<Halfspace>) -> Option<BTreeSet<Halfspace>> {
    let mut kept = BTreeSet::new();
    for h in system {
        if h.coeffs.iter().all(Zero::is_zero) {
            if h.bound.is_negative() {
                return None;
            }
        } else {
            kept.insert(h);
        }
    }
    Some(kept)
}
