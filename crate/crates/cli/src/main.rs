//! `ctxbundle`: analyze empirical models from JSON files or the builtin corpus.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse or validation error,
//! 3 analysis not applicable to the model.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use contextuality::builtin::{builtin, BUILTINS};
use contextuality::connection::{self, ConnectionError, Tolerances, TransitionAtlas};
use contextuality::document::{parse_atlas, DocumentError, ModelDocument};
use contextuality::dot::export_dot;
use contextuality::fraction::{self, FractionError};
use contextuality::model::{EmpiricalModel, ModelError};
use contextuality::report::{self, AcyclicitySummary, CurvatureSummary, FractionSummary, HierarchySummary, HolonomySummary};
use contextuality::scenario::{GrahamStep, ScenarioError, VertexId};

#[derive(Parser, Debug)]
#[command(name = "ctxbundle", version, about = "Contextuality analysis of finite empirical models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Model document (JSON).
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "builtin")]
    model: Option<PathBuf>,
    /// Name of a builtin model.
    #[arg(long, global = true, value_name = "NAME")]
    builtin: Option<String>,
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Group-matching and singularity tolerance.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a model.
    Validate,
    /// Exact non-contextual and contextual fractions.
    Fraction {
        /// Restrict to the n-skeleton first.
        #[arg(long, value_name = "N")]
        skeleton: Option<usize>,
    },
    /// Contextual fraction of every skeleton restriction.
    Hierarchy,
    /// Strong / possibilistic / probabilistic / non-contextual.
    Classify,
    /// Graham reduction of the maximal contexts.
    Acyclic,
    /// Markov kernels of every oriented edge.
    Kernels,
    /// Holonomy group of the contextual connection.
    Holonomy {
        /// Basepoint (defaults to the smallest vertex).
        #[arg(long, value_name = "V")]
        base: Option<String>,
        /// Transition atlas for disturbing models.
        #[arg(long, value_name = "FILE")]
        transitions: Option<PathBuf>,
    },
    /// Boundary holonomy of every 2-face.
    Curvature {
        #[arg(long, value_name = "FILE")]
        transitions: Option<PathBuf>,
    },
    /// Support bundle as a Graphviz digraph.
    Bundle {
        /// DOT output (the only format).
        #[arg(long)]
        dot: bool,
    },
    /// Print a builtin model document, or list the builtins.
    Builtin { name: Option<String> },
    /// Every analysis at once.
    Report {
        #[arg(long, value_name = "FILE")]
        transitions: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn inapplicable(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::parse(e.to_string())
    }
}

fn model_failure(e: &ModelError) -> Failure {
    match e {
        ModelError::Disturbing(_) | ModelError::TooManyAssignments { .. } | ModelError::DimensionTooLarge { .. } => {
            Failure::inapplicable(e.to_string())
        }
        _ => Failure::parse(e.to_string()),
    }
}

impl From<FractionError> for Failure {
    fn from(e: FractionError) -> Self {
        match &e {
            FractionError::Model(m) => model_failure(m),
            FractionError::Solver(_) => Failure::inapplicable(e.to_string()),
        }
    }
}

impl From<ConnectionError> for Failure {
    fn from(e: ConnectionError) -> Self {
        match &e {
            ConnectionError::Scenario(ScenarioError::UnknownVertex(_)) => Failure::usage(e.to_string()),
            ConnectionError::Model(m) => model_failure(m),
            ConnectionError::TransitionMismatch { .. } | ConnectionError::NotStochastic { .. } => Failure::parse(e.to_string()),
            _ => Failure::inapplicable(e.to_string()),
        }
    }
}

struct Loaded {
    name: String,
    model: EmpiricalModel,
}

fn load(cli: &Cli) -> Result<Loaded, Failure> {
    match (&cli.model, &cli.builtin) {
        (Some(path), None) => {
            let bytes = std::fs::read(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
            let doc = contextuality::document::parse_document(&bytes)?;
            let model = doc.to_model()?;
            Ok(Loaded { name: doc.name, model })
        }
        (None, Some(name)) => {
            let model = builtin(name).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(Loaded {
                name: name.clone(),
                model,
            })
        }
        _ => Err(Failure::usage("give exactly one of --model FILE or --builtin NAME")),
    }
}

fn load_atlas(path: &Option<PathBuf>, m: &EmpiricalModel) -> Result<Option<TransitionAtlas>, Failure> {
    let Some(path) = path else {
        return Ok(None);
    };
    let bytes = std::fs::read(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    Ok(Some(parse_atlas(&bytes, m)?))
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    match cli.tol {
        None => Ok(Tolerances::default()),
        Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerances::with(t)),
        Some(t) => Err(Failure::usage(format!("--tol must be a positive number, got {t}"))),
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

fn require_nondisturbing(m: &EmpiricalModel) -> Result<(), Failure> {
    let r = m.disturbance_report();
    match r.pairs.iter().find(|p| p.discrepancy != Default::default()) {
        Some(p) => Err(Failure::inapplicable(format!(
            "model is disturbing: {} and {} disagree on {}",
            p.first, p.second, p.intersection
        ))),
        None => Ok(()),
    }
}

fn step_text(s: &GrahamStep) -> String {
    let edge = |e: &[VertexId]| e.iter().map(VertexId::as_str).collect::<Vec<_>>().join(",");
    match s {
        GrahamStep::DeleteVertex { vertex, hyperedge } => format!("delete vertex {vertex} from {{{}}}", edge(hyperedge)),
        GrahamStep::DeleteHyperedge { hyperedge } => format!("delete hyperedge {{{}}}", edge(hyperedge)),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if let Command::Builtin { name } = &cli.command {
        return Ok(match name {
            None if cli.json => pretty(&BUILTINS),
            None => BUILTINS.join("\n"),
            Some(n) => {
                let m = builtin(n).map_err(|e| Failure::usage(e.to_string()))?;
                ModelDocument::from_model(n, &m).to_json()
            }
        });
    }
    let tol = tolerances(cli)?;
    let Loaded { name, model: m } = load(cli)?;
    let out = match &cli.command {
        Command::Validate => {
            let nondisturbing = m.is_nondisturbing();
            if cli.json {
                pretty(&json!({
                    "valid": true,
                    "name": name,
                    "vertices": m.scenario().vertices().len(),
                    "maximal_contexts": m.scenario().maximal_contexts().len(),
                    "nondisturbing": nondisturbing,
                }))
            } else {
                format!(
                    "valid: {name} ({} vertices, {} maximal contexts, non-disturbing: {nondisturbing})",
                    m.scenario().vertices().len(),
                    m.scenario().maximal_contexts().len()
                )
            }
        }
        Command::Fraction { skeleton } => {
            require_nondisturbing(&m)?;
            let target = match skeleton {
                Some(n) => m.restrict_to_skeleton(*n).map_err(|e| model_failure(&e))?,
                None => m,
            };
            let s = FractionSummary::from(&fraction::contextual_fraction(&target)?);
            if cli.json {
                pretty(&s)
            } else {
                format!(
                    "ncf: {} = {}\ncf: {} = {}\ncertified: {}",
                    s.ncf, s.ncf_decimal, s.cf, s.cf_decimal, s.certified
                )
            }
        }
        Command::Hierarchy => {
            require_nondisturbing(&m)?;
            let h = HierarchySummary::from(&fraction::hierarchy(&m)?);
            if cli.json {
                pretty(&h)
            } else {
                let mut lines: Vec<String> = h
                    .levels
                    .iter()
                    .map(|l| format!("cf at dimension {}: {} = {}", l.dim, l.cf, l.cf_decimal))
                    .collect();
                lines.push(format!("monotone: {}", h.monotone_nondecreasing));
                lines.join("\n")
            }
        }
        Command::Classify => {
            require_nondisturbing(&m)?;
            let class = fraction::classify(&m)?;
            if cli.json {
                pretty(&json!({ "classification": class.to_string() }))
            } else {
                class.to_string()
            }
        }
        Command::Acyclic => {
            let (acyclic, trace) = m.scenario().is_acyclic();
            if cli.json {
                let mut v = serde_json::to_value(AcyclicitySummary::new(acyclic, &trace)).expect("json value");
                v["steps"] = json!(trace.steps.iter().map(step_text).collect::<Vec<_>>());
                pretty(&v)
            } else {
                let mut lines = vec![if acyclic { "acyclic" } else { "cyclic" }.to_string()];
                lines.extend(trace.steps.iter().map(|s| format!("  {}", step_text(s))));
                lines.join("\n")
            }
        }
        Command::Kernels => {
            let ks = report::kernel_summaries(&m)?;
            if cli.json {
                pretty(&ks)
            } else {
                ks.iter()
                    .map(|k| {
                        let rows: Vec<String> = k.matrix.iter().map(|r| format!("  [{}]", r.join(", "))).collect();
                        format!("K[{} <- {}]\n{}", k.target, k.source, rows.join("\n"))
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        }
        Command::Holonomy { base, transitions } => {
            let atlas = load_atlas(transitions, &m)?;
            let base = match base {
                Some(b) => VertexId::new(b.as_str()).map_err(|e| Failure::usage(e.to_string()))?,
                None => m.scenario().vertices().iter().next().expect("nonempty").clone(),
            };
            let r = connection::holonomy(&m, &base, atlas.as_ref(), &tol)?;
            let h = HolonomySummary::from(&r);
            if cli.json {
                pretty(&h)
            } else {
                let mut lines = vec![format!(
                    "holonomy at {}: {} (applicable: {})",
                    h.basepoint, h.classification, h.applicable
                )];
                for l in &h.loops {
                    lines.push(match &l.matrix {
                        Some(q) => format!("  loop {}: {q:?}", l.path.join("-")),
                        None => format!("  loop {}: singular", l.path.join("-")),
                    });
                }
                for e in &h.singular_edges {
                    lines.push(format!("  singular kernel {} -> {} (min sigma {:e})", e.source, e.target, e.min_sigma));
                }
                lines.join("\n")
            }
        }
        Command::Curvature { transitions } => {
            let atlas = load_atlas(transitions, &m)?;
            let c = CurvatureSummary::from(&connection::curvature(&m, atlas.as_ref(), &tol)?);
            if cli.json {
                pretty(&c)
            } else {
                let mut lines = vec![format!("flat: {}", c.flat)];
                for f in &c.faces {
                    lines.push(match &f.matrix {
                        Some(q) => format!("  face {}: {} {q:?}", f.face, f.status),
                        None => format!("  face {}: {}", f.face, f.status),
                    });
                }
                lines.join("\n")
            }
        }
        Command::Bundle { .. } => {
            let dot = export_dot(&name, &m);
            if cli.json {
                pretty(&json!({ "dot": dot }))
            } else {
                dot.trim_end().to_string()
            }
        }
        Command::Report { transitions } => {
            let atlas = load_atlas(transitions, &m)?;
            let r = report::analyze(&name, &m, atlas.as_ref(), &tol);
            if cli.json {
                r.to_json()
            } else {
                r.to_string()
            }
        }
        Command::Builtin { .. } => unreachable!("handled above"),
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        // A closed pipe (`| head`) is not an error worth reporting.
        Ok(out) => match writeln!(std::io::stdout().lock(), "{out}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
            _ => ExitCode::SUCCESS,
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
