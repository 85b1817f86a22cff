//! The contextual connection: Markov kernels on oriented edges, their
//! orthogonal parts, parallel transport, holonomy and per-face curvature.
//!
//! Kernels are exact. `K_{b<-a}` has rows indexed by outcomes of `b` and
//! columns by outcomes of `a`, so `K · mu_a = mu_b`. Floating point enters
//! only when a kernel is handed to [`phi`].

pub mod svd;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::model::{flat_index, tuples, EmpiricalModel, JointDistribution, ModelError};
use crate::rational::{to_f64, Rational};
use crate::scenario::{boundary, Context, ScenarioError, SimplicialScenario, VertexId};

pub use svd::{svd, Matrix, Svd, SvdError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Svd(#[from] SvdError),
    #[error("{a} - {b} is not an edge of the scenario")]
    MissingEdge { a: VertexId, b: VertexId },
    #[error("edge {a} - {b} has no well-defined distribution")]
    NoDistributionForEdge { a: VertexId, b: VertexId },
    #[error("kernel {from} -> {to} is singular (min singular value {min_sigma:.3e}); its orthogonal part is not unique")]
    SingularKernel { from: VertexId, to: VertexId, min_sigma: f64 },
    #[error("no transition at {vertex} from {incoming} to {outgoing}, and the marginals there differ")]
    MissingTransition {
        vertex: VertexId,
        incoming: Context,
        outgoing: Context,
    },
    #[error("transition atlas lacks {vertex}: {incoming} -> {outgoing}")]
    IncompleteAtlas {
        vertex: VertexId,
        incoming: Context,
        outgoing: Context,
    },
    #[error("transition at {vertex} does not map the {incoming} marginal onto the {outgoing} marginal")]
    TransitionMismatch {
        vertex: VertexId,
        incoming: Context,
        outgoing: Context,
    },
    #[error("{vertex} is not in context {context}")]
    NotInContext { vertex: VertexId, context: Context },
    #[error("matrix is not a column-stochastic {rows}x{cols} kernel: {reason}")]
    NotStochastic { rows: usize, cols: usize, reason: String },
    #[error("SVD reconstruction error {error:.3e} exceeds tolerance")]
    Inaccurate { error: f64 },
    #[error("the scenario has no 2-faces")]
    NoTwoFaces,
    #[error("context {0} is not an edge; transitions need a graph model")]
    NotAGraphModel(Context),
    #[error("path needs at least one vertex")]
    EmptyPath,
}

/// Numerical tolerances for everything downstream of the SVD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed `‖U Σ Vᵀ − A‖_max`.
    pub reconstruction: f64,
    /// Orthogonality checks and matching group elements.
    pub group: f64,
    /// Kernels whose smallest singular value is at most this are singular.
    pub singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            reconstruction: 1e-12,
            group: 1e-9,
            singular: 1e-9,
        }
    }
}

impl Tolerances {
    /// Sets both the group and singularity tolerances.
    pub fn with(tol: f64) -> Self {
        Tolerances {
            group: tol,
            singular: tol,
            ..Tolerances::default()
        }
    }
}

/// Column-stochastic matrix `entry(t, s) = p(target = t | source = s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticKernel {
    source: VertexId,
    target: VertexId,
    matrix: Vec<Vec<Rational>>,
    padded_columns: BTreeSet<usize>,
}

impl StochasticKernel {
    pub fn new(
        source: VertexId,
        target: VertexId,
        matrix: Vec<Vec<Rational>>,
        padded_columns: BTreeSet<usize>,
    ) -> Result<Self, ConnectionError> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        let bad = |reason: &str| ConnectionError::NotStochastic {
            rows,
            cols,
            reason: reason.to_string(),
        };
        if rows == 0 || cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return Err(bad("ragged or empty"));
        }
        if matrix.iter().flatten().any(|x| *x < Rational::zero()) {
            return Err(bad("negative entry"));
        }
        for s in 0..cols {
            let sum: Rational = matrix.iter().map(|r| &r[s]).sum();
            if !sum.is_one() {
                return Err(bad(&format!("column {s} sums to {sum}")));
            }
        }
        if padded_columns.iter().any(|&s| s >= cols) {
            return Err(bad("padded column out of range"));
        }
        Ok(StochasticKernel {
            source,
            target,
            matrix,
            padded_columns,
        })
    }

    /// Conditional kernel of a joint distribution on `{source, target}`;
    /// columns with zero source probability are uniform and recorded.
    pub fn from_joint(source: &VertexId, target: &VertexId, joint: &JointDistribution) -> Self {
        let ctx = joint.context();
        let ps = ctx.position(source).expect("source in context");
        let pt = ctx.position(target).expect("target in context");
        let ds = joint.shape()[ps];
        let dt = joint.shape()[pt];
        let mut matrix = vec![vec![Rational::zero(); ds]; dt];
        for (tuple, w) in joint.entries() {
            matrix[tuple[pt]][tuple[ps]] += w;
        }
        let mut padded = BTreeSet::new();
        for s in 0..ds {
            let marg: Rational = matrix.iter().map(|r| &r[s]).sum();
            if marg.is_zero() {
                padded.insert(s);
                for row in matrix.iter_mut() {
                    row[s] = Rational::new(1.into(), (dt as i64).into());
                }
            } else {
                for row in matrix.iter_mut() {
                    row[s] /= &marg;
                }
            }
        }
        StochasticKernel {
            source: source.clone(),
            target: target.clone(),
            matrix,
            padded_columns: padded,
        }
    }

    pub fn identity(vertex: &VertexId, d: usize) -> Self {
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        StochasticKernel {
            source: vertex.clone(),
            target: vertex.clone(),
            matrix,
            padded_columns: BTreeSet::new(),
        }
    }

    pub fn source(&self) -> &VertexId {
        &self.source
    }

    pub fn target(&self) -> &VertexId {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn padded_columns(&self) -> &BTreeSet<usize> {
        &self.padded_columns
    }

    pub fn entry(&self, t: usize, s: usize) -> &Rational {
        &self.matrix[t][s]
    }

    pub fn source_size(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn target_size(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_square(&self) -> bool {
        self.source_size() == self.target_size()
    }

    pub fn apply(&self, mu: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(mu).map(|(k, m)| k * m).sum())
            .collect()
    }

    /// `after · self`: first this kernel, then `after`.
    pub fn then(&self, after: &StochasticKernel) -> StochasticKernel {
        assert_eq!(after.source_size(), self.target_size(), "kernel sizes");
        let matrix = after
            .matrix
            .iter()
            .map(|row| {
                (0..self.source_size())
                    .map(|s| row.iter().zip(&self.matrix).map(|(a, r)| a * &r[s]).sum())
                    .collect()
            })
            .collect();
        StochasticKernel {
            source: self.source.clone(),
            target: after.target.clone(),
            matrix,
            padded_columns: self.padded_columns.clone(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(
            &self
                .matrix
                .iter()
                .map(|r| r.iter().map(to_f64).collect())
                .collect::<Vec<_>>(),
        )
    }
}

impl fmt::Display for StochasticKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K[{} <- {}]", self.target, self.source)?;
        for (i, row) in self.matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>6}")).collect();
            write!(f, "  [{}]", cells.join(" "))?;
            if i + 1 < self.matrix.len() {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// An element of `O(d)`, produced as the orthogonal polar factor `U Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalPart {
    pub matrix: Matrix,
    pub det_sign: i8,
    pub tol: f64,
}

impl OrthogonalPart {
    pub fn identity(d: usize, tol: f64) -> Self {
        OrthogonalPart {
            matrix: Matrix::identity(d),
            det_sign: 1,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.max_abs_diff(&Matrix::identity(self.dim())) <= self.tol
    }

    pub fn approx_eq(&self, other: &OrthogonalPart) -> bool {
        self.dim() == other.dim() && self.matrix.max_abs_diff(&other.matrix) <= self.tol.max(other.tol)
    }

    /// `self · other`.
    pub fn compose(&self, other: &OrthogonalPart) -> OrthogonalPart {
        OrthogonalPart {
            matrix: &self.matrix * &other.matrix,
            det_sign: self.det_sign * other.det_sign,
            tol: self.tol.max(other.tol),
        }
    }

    pub fn inverse(&self) -> OrthogonalPart {
        OrthogonalPart {
            matrix: self.matrix.transpose(),
            ..self.clone()
        }
    }

    /// Smallest `k >= 1` with `Q^k = I`, searched up to `cap`.
    pub fn order(&self, cap: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=cap {
            if p.is_identity() {
                return Some(k);
            }
            p = self.compose(&p);
        }
        None
    }
}

/// Orthogonal part of an arbitrary square matrix; `source`/`target` only
/// label the error.
pub fn phi_matrix(
    a: &Matrix,
    source: &VertexId,
    target: &VertexId,
    tol: &Tolerances,
) -> Result<OrthogonalPart, ConnectionError> {
    let s = svd(a)?;
    let error = s.reconstruct().max_abs_diff(a);
    if error > tol.reconstruction {
        return Err(ConnectionError::Inaccurate { error });
    }
    let min_sigma = s.min_singular_value();
    if min_sigma <= tol.singular {
        return Err(ConnectionError::SingularKernel {
            from: source.clone(),
            to: target.clone(),
            min_sigma,
        });
    }
    let q = &s.u * &s.v.transpose();
    let det_sign = if q.det() < 0.0 { -1 } else { 1 };
    Ok(OrthogonalPart {
        matrix: q,
        det_sign,
        tol: tol.group,
    })
}

/// `Φ(K) = U Vᵀ` for `K = U Σ Vᵀ`; defined only for non-singular kernels.
pub fn phi(k: &StochasticKernel, tol: &Tolerances) -> Result<OrthogonalPart, ConnectionError> {
    if !k.is_square() {
        return Err(ConnectionError::NotStochastic {
            rows: k.target_size(),
            cols: k.source_size(),
            reason: "not square".into(),
        });
    }
    phi_matrix(&k.to_matrix(), k.source(), k.target(), tol)
}

fn edge_context(m: &EmpiricalModel, a: &VertexId, b: &VertexId) -> Result<Context, ConnectionError> {
    let missing = || ConnectionError::MissingEdge { a: a.clone(), b: b.clone() };
    if a == b {
        return Err(missing());
    }
    let ctx = Context::new([a.clone(), b.clone()]).map_err(|_| missing())?;
    if !m.scenario().complex().contains(&ctx) {
        return Err(missing());
    }
    Ok(ctx)
}

/// `(K_{b<-a}, K_{a<-b})` from the distribution on the edge `{a, b}`.
pub fn edge_kernels(
    m: &EmpiricalModel,
    a: &VertexId,
    b: &VertexId,
) -> Result<(StochasticKernel, StochasticKernel), ConnectionError> {
    let ctx = edge_context(m, a, b)?;
    let joint = m
        .distribution_on(&ctx)
        .map_err(|_| ConnectionError::NoDistributionForEdge { a: a.clone(), b: b.clone() })?;
    Ok((
        StochasticKernel::from_joint(a, b, &joint),
        StochasticKernel::from_joint(b, a, &joint),
    ))
}

/// Both oriented kernels of every 1-face, keyed by `(source, target)`.
pub fn all_edge_kernels(m: &EmpiricalModel) -> Result<BTreeMap<(VertexId, VertexId), StochasticKernel>, ConnectionError> {
    let mut out = BTreeMap::new();
    for (a, b) in m.scenario().one_skeleton().edges() {
        let (ab, ba) = edge_kernels(m, &a, &b)?;
        out.insert((a.clone(), b.clone()), ab);
        out.insert((b, a), ba);
    }
    Ok(out)
}

fn vertex_marginal(m: &EmpiricalModel, vertex: &VertexId, ctx: &Context) -> Result<Vec<Rational>, ConnectionError> {
    if !ctx.contains(vertex) {
        return Err(ConnectionError::NotInContext {
            vertex: vertex.clone(),
            context: ctx.clone(),
        });
    }
    let single = Context::new([vertex.clone()])?;
    Ok(m.distribution_on(ctx)?.marginalize(&single)?.weights().to_vec())
}

/// A kernel at a vertex together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexTransition {
    pub kernel: StochasticKernel,
    /// True when the marginals differ and the rank-one kernel was used.
    pub singular: bool,
}

/// The canonical transition at `vertex` between two contexts containing it.
///
/// Equal marginals give the kernel of the diagonal coupling (identity on the
/// support, uniform on zero-probability outcomes). Otherwise every input is
/// sent to the outgoing marginal.
pub fn vertex_transition(
    m: &EmpiricalModel,
    vertex: &VertexId,
    ctx_in: &Context,
    ctx_out: &Context,
) -> Result<VertexTransition, ConnectionError> {
    let mu_in = vertex_marginal(m, vertex, ctx_in)?;
    let mu_out = vertex_marginal(m, vertex, ctx_out)?;
    let d = mu_in.len();
    if mu_in == mu_out {
        let mut padded = BTreeSet::new();
        let mut matrix = vec![vec![Rational::zero(); d]; d];
        for (j, p) in mu_in.iter().enumerate() {
            if p.is_zero() {
                padded.insert(j);
                for row in matrix.iter_mut() {
                    row[j] = Rational::new(1.into(), (d as i64).into());
                }
            } else {
                matrix[j][j] = Rational::one();
            }
        }
        return Ok(VertexTransition {
            kernel: StochasticKernel::new(vertex.clone(), vertex.clone(), matrix, padded)?,
            singular: false,
        });
    }
    let matrix = mu_out.iter().map(|p| vec![p.clone(); d]).collect();
    Ok(VertexTransition {
        kernel: StochasticKernel::new(vertex.clone(), vertex.clone(), matrix, BTreeSet::new())?,
        singular: d > 1,
    })
}

/// User-supplied transitions `(vertex, incoming, outgoing) -> kernel`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionAtlas {
    entries: BTreeMap<(VertexId, Context, Context), StochasticKernel>,
}

impl TransitionAtlas {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        vertex: VertexId,
        incoming: Context,
        outgoing: Context,
        kernel: StochasticKernel,
    ) -> Result<(), ConnectionError> {
        if kernel.source() != &vertex || kernel.target() != &vertex || !kernel.is_square() {
            return Err(ConnectionError::NotStochastic {
                rows: kernel.target_size(),
                cols: kernel.source_size(),
                reason: format!("a transition at {vertex} must be a square kernel on {vertex}"),
            });
        }
        for ctx in [&incoming, &outgoing] {
            if !ctx.contains(&vertex) {
                return Err(ConnectionError::NotInContext {
                    vertex,
                    context: ctx.clone(),
                });
            }
        }
        self.entries.insert((vertex, incoming, outgoing), kernel);
        Ok(())
    }

    pub fn get(&self, vertex: &VertexId, incoming: &Context, outgoing: &Context) -> Option<&StochasticKernel> {
        self.entries.get(&(vertex.clone(), incoming.clone(), outgoing.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(VertexId, Context, Context), &StochasticKernel)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks that every entry carries the incoming marginal exactly onto
    /// the outgoing one.
    pub fn validate(&self, m: &EmpiricalModel) -> Result<(), ConnectionError> {
        for ((vertex, incoming, outgoing), k) in &self.entries {
            let mu_in = vertex_marginal(m, vertex, incoming)?;
            let mu_out = vertex_marginal(m, vertex, outgoing)?;
            if k.source_size() != mu_in.len() || k.apply(&mu_in) != mu_out {
                return Err(ConnectionError::TransitionMismatch {
                    vertex: vertex.clone(),
                    incoming: incoming.clone(),
                    outgoing: outgoing.clone(),
                });
            }
        }
        Ok(())
    }
}

/// The kernel applied at `vertex` when moving from `incoming` to `outgoing`,
/// or `None` for the identity.
fn transition_kernel(
    m: &EmpiricalModel,
    nondisturbing: bool,
    vertex: &VertexId,
    incoming: &Context,
    outgoing: &Context,
    atlas: Option<&TransitionAtlas>,
) -> Result<Option<StochasticKernel>, ConnectionError> {
    if let Some(k) = atlas.and_then(|a| a.get(vertex, incoming, outgoing)) {
        return Ok(Some(k.clone()));
    }
    if nondisturbing || incoming == outgoing {
        return Ok(None);
    }
    if vertex_marginal(m, vertex, incoming)? == vertex_marginal(m, vertex, outgoing)? {
        return Ok(None);
    }
    Err(ConnectionError::MissingTransition {
        vertex: vertex.clone(),
        incoming: incoming.clone(),
        outgoing: outgoing.clone(),
    })
}

/// Parallel transport along `path`: the ordered product of `Φ(K ∘ t)` per
/// step, each new factor multiplied on the left. On a closed path the
/// transition at the basepoint (last edge into first edge) is included.
pub fn transport(
    m: &EmpiricalModel,
    path: &[VertexId],
    atlas: Option<&TransitionAtlas>,
    tol: &Tolerances,
) -> Result<OrthogonalPart, ConnectionError> {
    let first = path.first().ok_or(ConnectionError::EmptyPath)?;
    let d0 = m.fiber(first).size();
    let mut acc = OrthogonalPart::identity(d0, tol.group);
    if path.len() < 2 {
        return Ok(acc);
    }
    let edges = path
        .windows(2)
        .map(|w| edge_context(m, &w[0], &w[1]))
        .collect::<Result<Vec<_>, _>>()?;
    let closed = path.len() > 2 && path.first() == path.last();
    let nondisturbing = m.is_nondisturbing();
    for (i, w) in path.windows(2).enumerate() {
        let (k, _) = edge_kernels(m, &w[0], &w[1])?;
        let incoming = match i {
            0 if closed => Some(edges.last().expect("closed path has edges")),
            0 => None,
            _ => Some(&edges[i - 1]),
        };
        let step = match incoming {
            Some(inc) => match transition_kernel(m, nondisturbing, &w[0], inc, &edges[i], atlas)? {
                Some(t) => t.then(&k),
                None => k,
            },
            None => k,
        };
        acc = phi(&step, tol)?.compose(&acc);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum GroupClass {
    Trivial,
    CyclicOfOrder(usize),
    FiniteOfOrder(usize),
    NotClosedWithinCap,
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupClass::Trivial => f.write_str("Trivial"),
            GroupClass::CyclicOfOrder(k) => write!(f, "CyclicOfOrder({k})"),
            GroupClass::FiniteOfOrder(k) => write!(f, "FiniteOfOrder({k})"),
            GroupClass::NotClosedWithinCap => f.write_str("NotClosedWithinCap"),
        }
    }
}

pub const GROUP_CAP: usize = 64;

/// Closes `generators` under multiplication. `None` if the group exceeds `cap`.
pub fn close_group(generators: &[OrthogonalPart], d: usize, tol: f64, cap: usize) -> Option<Vec<OrthogonalPart>> {
    let mut elements = vec![OrthogonalPart::identity(d, tol)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let e = elements[frontier].clone();
        frontier += 1;
        for g in generators {
            let p = g.compose(&e);
            if !elements.iter().any(|x| x.approx_eq(&p)) {
                if elements.len() == cap {
                    return None;
                }
                elements.push(p);
            }
        }
    }
    Some(elements)
}

pub fn classify_group(generators: &[OrthogonalPart], d: usize, tol: f64) -> (GroupClass, Option<usize>) {
    match close_group(generators, d, tol, GROUP_CAP) {
        None => (GroupClass::NotClosedWithinCap, None),
        Some(els) if els.len() == 1 => (GroupClass::Trivial, Some(1)),
        Some(els) => {
            let n = els.len();
            let cyclic = els.iter().any(|e| e.order(n) == Some(n));
            let class = if cyclic {
                GroupClass::CyclicOfOrder(n)
            } else {
                GroupClass::FiniteOfOrder(n)
            };
            (class, Some(n))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularEdge {
    pub source: VertexId,
    pub target: VertexId,
    pub min_sigma: f64,
}

/// Transport around one fundamental cycle; `None` when it crosses a singular
/// kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopHolonomy {
    pub path: Vec<VertexId>,
    pub element: Option<OrthogonalPart>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyGroupReport {
    pub basepoint: VertexId,
    pub loops: Vec<LoopHolonomy>,
    pub generators: Vec<OrthogonalPart>,
    pub classification: GroupClass,
    pub group_order: Option<usize>,
    pub singular_edges: Vec<SingularEdge>,
    /// No singular edge and no singular loop: the hypothesis under which
    /// holonomy is meaningful.
    pub applicable: bool,
}

/// Singular oriented kernels of the 1-skeleton.
pub fn singular_edges(m: &EmpiricalModel, tol: &Tolerances) -> Result<Vec<SingularEdge>, ConnectionError> {
    let mut out = Vec::new();
    for (_, k) in all_edge_kernels(m)? {
        if !k.is_square() {
            continue;
        }
        match phi(&k, tol) {
            Ok(_) => {}
            Err(ConnectionError::SingularKernel { from, to, min_sigma }) => out.push(SingularEdge {
                source: from,
                target: to,
                min_sigma,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn holonomy(
    m: &EmpiricalModel,
    basepoint: &VertexId,
    atlas: Option<&TransitionAtlas>,
    tol: &Tolerances,
) -> Result<HolonomyGroupReport, ConnectionError> {
    if !m.scenario().vertices().contains(basepoint) {
        return Err(ScenarioError::UnknownVertex(basepoint.clone()).into());
    }
    let cycles = m.scenario().one_skeleton().cycle_basis(basepoint)?;
    let singular = singular_edges(m, tol)?;
    let mut loops = Vec::new();
    for path in cycles {
        let element = match transport(m, &path, atlas, tol) {
            Ok(q) => Some(q),
            Err(ConnectionError::SingularKernel { .. }) => None,
            Err(e) => return Err(e),
        };
        loops.push(LoopHolonomy { path, element });
    }
    let generators: Vec<OrthogonalPart> = loops.iter().filter_map(|l| l.element.clone()).collect();
    let d = m.fiber(basepoint).size();
    let (classification, group_order) = classify_group(&generators, d, tol.group);
    let applicable = singular.is_empty() && loops.iter().all(|l| l.element.is_some());
    Ok(HolonomyGroupReport {
        basepoint: basepoint.clone(),
        loops,
        generators,
        classification,
        group_order,
        singular_edges: singular,
        applicable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaceCurvature {
    Holonomy(OrthogonalPart),
    Singular {
        source: VertexId,
        target: VertexId,
        min_sigma: f64,
    },
}

impl FaceCurvature {
    pub fn is_flat(&self) -> bool {
        matches!(self, FaceCurvature::Holonomy(q) if q.is_identity())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub per_face: BTreeMap<Context, FaceCurvature>,
    pub flat: bool,
}

/// Boundary holonomy of every 2-face, starting from its smallest vertex.
pub fn curvature(
    m: &EmpiricalModel,
    atlas: Option<&TransitionAtlas>,
    tol: &Tolerances,
) -> Result<CurvatureReport, ConnectionError> {
    let faces = m.scenario().faces(2);
    if faces.is_empty() {
        return Err(ConnectionError::NoTwoFaces);
    }
    let mut per_face = BTreeMap::new();
    for face in faces {
        let mut path: Vec<VertexId> = boundary(&face)?.into_iter().map(|(a, _)| a).collect();
        path.push(path[0].clone());
        let entry = match transport(m, &path, atlas, tol) {
            Ok(q) => FaceCurvature::Holonomy(q),
            Err(ConnectionError::SingularKernel { from, to, min_sigma }) => FaceCurvature::Singular {
                source: from,
                target: to,
                min_sigma,
            },
            Err(e) => return Err(e),
        };
        per_face.insert(face, entry);
    }
    let flat = per_face.values().all(FaceCurvature::is_flat);
    Ok(CurvatureReport { per_face, flat })
}

/// Re-expresses `d` on the context obtained by renaming its vertices.
fn relabel(d: &JointDistribution, rename: &BTreeMap<VertexId, VertexId>) -> Result<JointDistribution, ConnectionError> {
    let old = d.context();
    let renamed: Vec<VertexId> = old
        .vertices()
        .iter()
        .map(|u| rename.get(u).unwrap_or(u).clone())
        .collect();
    let ctx = Context::new(renamed.iter().cloned())?;
    let to_new: Vec<usize> = renamed.iter().map(|u| ctx.position(u).expect("renamed vertex")).collect();
    let mut shape = vec![0; ctx.len()];
    for (k, &p) in to_new.iter().enumerate() {
        shape[p] = d.shape()[k];
    }
    let mut weights = vec![Rational::zero(); d.weights().len()];
    for (t, w) in d.entries() {
        let mut nt = vec![0; t.len()];
        for (k, &p) in to_new.iter().enumerate() {
            nt[p] = t[k];
        }
        weights[flat_index(&shape, &nt)] = w.clone();
    }
    Ok(JointDistribution::new(ctx, shape, weights)?)
}

fn fresh_label(taken: &BTreeSet<VertexId>, vertex: &VertexId, other: &VertexId) -> VertexId {
    let mut label = format!("{vertex}~{other}");
    loop {
        let id = VertexId::new(label.clone()).expect("labels built from valid labels");
        if !taken.contains(&id) {
            return id;
        }
        label.push('~');
    }
}

/// Makes a disturbing graph model non-disturbing by splitting each disturbed
/// vertex crossing with a virtual vertex.
///
/// At each vertex the smallest edge containing it is the reference. Every
/// other edge whose marginal there differs gets its copy of the vertex
/// replaced by a virtual vertex `v~w`, joined to `v` by an edge carrying the
/// coupling `p(v = i, v~w = j) = t(j|i) mu_ref(i)` of the atlas transition.
pub fn extend_with_transitions(m: &EmpiricalModel, atlas: &TransitionAtlas) -> Result<EmpiricalModel, ConnectionError> {
    if let Some(c) = m.scenario().maximal_contexts().iter().find(|c| c.len() != 2) {
        return Err(ConnectionError::NotAGraphModel(c.clone()));
    }
    if m.is_nondisturbing() {
        return Ok(m.clone());
    }
    let mut taken: BTreeSet<VertexId> = m.scenario().vertices().clone();
    let mut renames: BTreeMap<Context, BTreeMap<VertexId, VertexId>> = BTreeMap::new();
    let mut fibers = m.fibers().clone();
    let mut virtual_edges: Vec<JointDistribution> = Vec::new();

    for vertex in m.scenario().vertices() {
        let edges: Vec<&Context> = m
            .scenario()
            .maximal_contexts()
            .iter()
            .filter(|c| c.contains(vertex))
            .collect();
        let Some((&reference, rest)) = edges.split_first() else {
            continue;
        };
        let mu_ref = vertex_marginal(m, vertex, reference)?;
        for &e in rest {
            let mu_e = vertex_marginal(m, vertex, e)?;
            if mu_e == mu_ref {
                continue;
            }
            let t = atlas.get(vertex, reference, e).ok_or_else(|| ConnectionError::IncompleteAtlas {
                vertex: vertex.clone(),
                incoming: reference.clone(),
                outgoing: e.clone(),
            })?;
            if t.source_size() != mu_ref.len() || t.apply(&mu_ref) != mu_e {
                return Err(ConnectionError::TransitionMismatch {
                    vertex: vertex.clone(),
                    incoming: reference.clone(),
                    outgoing: e.clone(),
                });
            }
            let other = e.vertices().iter().find(|u| *u != vertex).expect("edge has two vertices");
            let virt = fresh_label(&taken, vertex, other);
            taken.insert(virt.clone());
            fibers.insert(virt.clone(), relabel_fiber(m, vertex, &virt)?);
            renames.entry(e.clone()).or_default().insert(vertex.clone(), virt.clone());

            let ctx = Context::new([vertex.clone(), virt.clone()])?;
            let d = mu_ref.len();
            // `vertex` is a prefix of `virt`, so it sorts first.
            let mut weights = vec![Rational::zero(); d * d];
            for (idx, tuple) in tuples(&[d, d]).enumerate() {
                weights[idx] = t.entry(tuple[1], tuple[0]) * &mu_ref[tuple[0]];
            }
            virtual_edges.push(JointDistribution::new(ctx, vec![d, d], weights)?);
        }
    }

    let mut distributions = BTreeMap::new();
    for (c, d) in m.distributions() {
        let nd = match renames.get(c) {
            Some(r) => relabel(d, r)?,
            None => d.clone(),
        };
        distributions.insert(nd.context().clone(), nd);
    }
    for d in virtual_edges {
        distributions.insert(d.context().clone(), d);
    }
    let scenario = SimplicialScenario::build(taken, distributions.keys().cloned())?;
    Ok(EmpiricalModel::new(scenario, fibers, distributions)?)
}

fn relabel_fiber(
    m: &EmpiricalModel,
    vertex: &VertexId,
    virt: &VertexId,
) -> Result<crate::model::OutcomeFiber, ConnectionError> {
    Ok(crate::model::OutcomeFiber::new(virt.clone(), m.fiber(vertex).labels().to_vec())?)
}
