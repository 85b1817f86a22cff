//! Serializable summaries of every analysis, and the combined report.
//!
//! Rationals appear twice: as exact `p/q` text and as a rounded decimal.
//! Floating-point matrices are rounded to twelve decimals so that output is
//! byte-stable.

use std::fmt::{self, Write};

use serde::Serialize;

use crate::connection::{
    curvature, edge_kernels, holonomy, ConnectionError, CurvatureReport, FaceCurvature, HolonomyGroupReport, Matrix,
    SingularEdge, StochasticKernel, Tolerances, TransitionAtlas,
};
use crate::fraction::{classify_detailed, contextual_fraction, hierarchy, FractionResult, HierarchyProfile};
use crate::model::{DisturbanceReport, EmpiricalModel};
use crate::rational::{to_decimal, to_text, Rational};
use crate::scenario::ReductionTrace;

pub const DECIMAL_DIGITS: usize = 12;

fn dec(r: &Rational) -> String {
    to_decimal(r, DECIMAL_DIGITS)
}

fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(clean).collect()).collect()
}

fn labels<'a, I: IntoIterator<Item = &'a crate::scenario::VertexId>>(it: I) -> Vec<String> {
    it.into_iter().map(|u| u.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisturbanceSummary {
    pub nondisturbing: bool,
    pub max_discrepancy: String,
    pub max_discrepancy_decimal: String,
    /// Overlaps `first | second on intersection` whose marginals differ.
    pub disturbed_overlaps: Vec<String>,
}

impl From<&DisturbanceReport> for DisturbanceSummary {
    fn from(r: &DisturbanceReport) -> Self {
        let max = r.max_discrepancy();
        DisturbanceSummary {
            nondisturbing: r.is_nondisturbing,
            max_discrepancy: to_text(&max),
            max_discrepancy_decimal: dec(&max),
            disturbed_overlaps: r
                .pairs
                .iter()
                .filter(|p| p.discrepancy != Rational::default())
                .map(|p| format!("{} | {} on {}", p.first, p.second, p.intersection))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcyclicitySummary {
    pub acyclic: bool,
    pub trace_length: usize,
    pub residual: Vec<Vec<String>>,
}

impl AcyclicitySummary {
    pub fn new(acyclic: bool, trace: &ReductionTrace) -> Self {
        AcyclicitySummary {
            acyclic,
            trace_length: trace.steps.len(),
            residual: trace.residual.iter().map(labels).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionSummary {
    pub ncf: String,
    pub cf: String,
    pub certified: bool,
    pub ncf_decimal: String,
    pub cf_decimal: String,
}

impl From<&FractionResult> for FractionSummary {
    fn from(r: &FractionResult) -> Self {
        FractionSummary {
            ncf: to_text(&r.ncf),
            cf: to_text(&r.cf),
            certified: r.certified,
            ncf_decimal: dec(&r.ncf),
            cf_decimal: dec(&r.cf),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyLevel {
    pub dim: usize,
    pub cf: String,
    pub cf_decimal: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchySummary {
    pub levels: Vec<HierarchyLevel>,
    pub monotone_nondecreasing: bool,
    pub first_violation: Option<(usize, usize)>,
}

impl From<&HierarchyProfile> for HierarchySummary {
    fn from(h: &HierarchyProfile) -> Self {
        HierarchySummary {
            levels: h
                .cf_by_dim
                .iter()
                .map(|(&dim, cf)| HierarchyLevel {
                    dim,
                    cf: to_text(cf),
                    cf_decimal: dec(cf),
                })
                .collect(),
            monotone_nondecreasing: h.monotone_nondecreasing,
            first_violation: h.first_violation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularEdgeSummary {
    pub source: String,
    pub target: String,
    pub min_sigma: f64,
}

impl From<&SingularEdge> for SingularEdgeSummary {
    fn from(e: &SingularEdge) -> Self {
        SingularEdgeSummary {
            source: e.source.to_string(),
            target: e.target.to_string(),
            min_sigma: clean(e.min_sigma),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopSummary {
    pub path: Vec<String>,
    /// `None` when the loop crosses a singular kernel.
    pub matrix: Option<Vec<Vec<f64>>>,
    pub det_sign: Option<i8>,
    pub identity: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomySummary {
    pub basepoint: String,
    pub classification: String,
    pub group_order: Option<usize>,
    pub applicable: bool,
    pub loops: Vec<LoopSummary>,
    pub singular_edges: Vec<SingularEdgeSummary>,
}

impl From<&HolonomyGroupReport> for HolonomySummary {
    fn from(r: &HolonomyGroupReport) -> Self {
        HolonomySummary {
            basepoint: r.basepoint.to_string(),
            classification: r.classification.to_string(),
            group_order: r.group_order,
            applicable: r.applicable,
            loops: r
                .loops
                .iter()
                .map(|l| LoopSummary {
                    path: labels(&l.path),
                    matrix: l.element.as_ref().map(|q| rows(&q.matrix)),
                    det_sign: l.element.as_ref().map(|q| q.det_sign),
                    identity: l.element.as_ref().map(|q| q.is_identity()),
                })
                .collect(),
            singular_edges: r.singular_edges.iter().map(SingularEdgeSummary::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceSummary {
    pub face: String,
    /// `flat`, `curved` or `singular`.
    pub status: String,
    pub matrix: Option<Vec<Vec<f64>>>,
    pub singular_edge: Option<SingularEdgeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub flat: bool,
    pub faces: Vec<FaceSummary>,
}

impl From<&CurvatureReport> for CurvatureSummary {
    fn from(r: &CurvatureReport) -> Self {
        CurvatureSummary {
            flat: r.flat,
            faces: r
                .per_face
                .iter()
                .map(|(face, c)| match c {
                    FaceCurvature::Holonomy(q) => FaceSummary {
                        face: face.key(),
                        status: if q.is_identity() { "flat" } else { "curved" }.to_string(),
                        matrix: Some(rows(&q.matrix)),
                        singular_edge: None,
                    },
                    FaceCurvature::Singular {
                        source,
                        target,
                        min_sigma,
                    } => FaceSummary {
                        face: face.key(),
                        status: "singular".to_string(),
                        matrix: None,
                        singular_edge: Some(SingularEdgeSummary {
                            source: source.to_string(),
                            target: target.to_string(),
                            min_sigma: clean(*min_sigma),
                        }),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSummary {
    pub source: String,
    pub target: String,
    /// Rows indexed by target outcomes, columns by source outcomes.
    pub matrix: Vec<Vec<String>>,
    pub padded_columns: Vec<usize>,
}

impl From<&StochasticKernel> for KernelSummary {
    fn from(k: &StochasticKernel) -> Self {
        KernelSummary {
            source: k.source().to_string(),
            target: k.target().to_string(),
            matrix: k.matrix().iter().map(|r| r.iter().map(to_text).collect()).collect(),
            padded_columns: k.padded_columns().iter().copied().collect(),
        }
    }
}

/// Both oriented kernels of every 1-face.
pub fn kernel_summaries(m: &EmpiricalModel) -> Result<Vec<KernelSummary>, ConnectionError> {
    let mut out = Vec::new();
    for (a, b) in m.scenario().one_skeleton().edges() {
        let (ab, ba) = edge_kernels(m, &a, &b)?;
        out.push(KernelSummary::from(&ab));
        out.push(KernelSummary::from(&ba));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub model: String,
    pub disturbance: DisturbanceSummary,
    pub acyclicity: AcyclicitySummary,
    pub fraction: Option<FractionSummary>,
    pub classification: Option<String>,
    pub hierarchy: Option<HierarchySummary>,
    pub holonomy: Option<HolonomySummary>,
    pub curvature: Option<CurvatureSummary>,
    /// Why a section is missing, and singular-edge warnings.
    pub warnings: Vec<String>,
}

/// Runs every analysis; failures become warnings rather than errors.
pub fn analyze(name: &str, m: &EmpiricalModel, atlas: Option<&TransitionAtlas>, tol: &Tolerances) -> AnalysisReport {
    let mut warnings = Vec::new();
    let disturbance = DisturbanceSummary::from(&m.disturbance_report());
    let (acyclic, trace) = m.scenario().is_acyclic();
    let acyclicity = AcyclicitySummary::new(acyclic, &trace);

    let (fraction, classification) = if disturbance.nondisturbing {
        match classify_detailed(m) {
            Ok((class, fr)) => {
                let fr = match fr {
                    Some(fr) => Some(fr),
                    None => contextual_fraction(m)
                        .map_err(|e| warnings.push(format!("fraction: {e}")))
                        .ok(),
                };
                (fr.as_ref().map(FractionSummary::from), Some(class.to_string()))
            }
            Err(e) => {
                warnings.push(format!("fraction: {e}"));
                (None, None)
            }
        }
    } else {
        warnings.push("fraction and classification need a non-disturbing model".to_string());
        (None, None)
    };

    let hierarchy = match hierarchy(m) {
        Ok(h) => Some(HierarchySummary::from(&h)),
        Err(e) => {
            warnings.push(format!("hierarchy: {e}"));
            None
        }
    };

    let base = m.scenario().vertices().iter().next().expect("scenarios have vertices").clone();
    let holonomy = match holonomy(m, &base, atlas, tol) {
        Ok(h) => {
            for e in &h.singular_edges {
                warnings.push(format!(
                    "singular kernel {} -> {} (min singular value {:.3e})",
                    e.source, e.target, e.min_sigma
                ));
            }
            Some(HolonomySummary::from(&h))
        }
        Err(e) => {
            warnings.push(format!("holonomy: {e}"));
            None
        }
    };

    let curvature = match curvature(m, atlas, tol) {
        Ok(c) => Some(CurvatureSummary::from(&c)),
        Err(ConnectionError::NoTwoFaces) => None,
        Err(e) => {
            warnings.push(format!("curvature: {e}"));
            None
        }
    };

    AnalysisReport {
        model: name.to_string(),
        disturbance,
        acyclicity,
        fraction,
        classification,
        hierarchy,
        holonomy,
        curvature,
        warnings,
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn fmt_matrix(m: &[Vec<f64>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "model: {}", self.model)?;
        let d = &self.disturbance;
        writeln!(
            s,
            "non-disturbing: {} (max discrepancy {} = {})",
            d.nondisturbing, d.max_discrepancy, d.max_discrepancy_decimal
        )?;
        for o in &d.disturbed_overlaps {
            writeln!(s, "  disturbed: {o}")?;
        }
        writeln!(
            s,
            "acyclic: {} ({} reduction steps)",
            self.acyclicity.acyclic, self.acyclicity.trace_length
        )?;
        if let Some(fr) = &self.fraction {
            writeln!(s, "ncf: {} = {}", fr.ncf, fr.ncf_decimal)?;
            writeln!(s, "cf: {} = {}", fr.cf, fr.cf_decimal)?;
            writeln!(s, "certified: {}", fr.certified)?;
        }
        if let Some(c) = &self.classification {
            writeln!(s, "class: {c}")?;
        }
        if let Some(h) = &self.hierarchy {
            for l in &h.levels {
                writeln!(s, "cf at dimension {}: {} = {}", l.dim, l.cf, l.cf_decimal)?;
            }
            writeln!(s, "monotone: {}", h.monotone_nondecreasing)?;
        }
        if let Some(h) = &self.holonomy {
            writeln!(
                s,
                "holonomy at {}: {} (applicable: {})",
                h.basepoint, h.classification, h.applicable
            )?;
            for l in &h.loops {
                match &l.matrix {
                    Some(m) => writeln!(s, "  loop {}: {}", l.path.join("-"), fmt_matrix(m))?,
                    None => writeln!(s, "  loop {}: singular", l.path.join("-"))?,
                }
            }
        }
        if let Some(c) = &self.curvature {
            writeln!(s, "flat: {}", c.flat)?;
            for face in &c.faces {
                match &face.matrix {
                    Some(m) => writeln!(s, "  face {}: {} {}", face.face, face.status, fmt_matrix(m))?,
                    None => writeln!(s, "  face {}: {}", face.face, face.status)?,
                }
            }
        }
        for w in &self.warnings {
            writeln!(s, "warning: {w}")?;
        }
        f.write_str(s.trim_end())
    }
}
