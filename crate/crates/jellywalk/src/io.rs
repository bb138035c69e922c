//! Graph files, boundary-input parsing, and report serialization.
//!
//! Graph JSON format (1-based vertex ids):
//!
//! ```json
//! {"vertices": 3, "edges": [[1,2],[2,3],[1,3]], "tails": [{"attach":1},{"attach":2}]}
//! ```
//!
//! Tail order in the file defines the alpha/beta index order everywhere.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_jellyfish, GraphError, JellyfishGraph};
use crate::observables::ObservableReport;
use crate::solver::StationaryState;
use crate::walk::{BoundaryInput, C64};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("validation error: {0}")]
    Validation(#[from] GraphError),
    #[error("invalid boundary input: {0}")]
    InvalidAlphas(String),
}

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub tails: Vec<TailSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSpec {
    pub attach: usize,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<JellyfishGraph, GraphError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let attachments: Vec<usize> = self.tails.iter().map(|t| t.attach).collect();
        build_jellyfish(self.vertices, &edges, &attachments)
    }

    pub fn from_graph(g: &JellyfishGraph) -> GraphFile {
        GraphFile {
            vertices: g.vertex_count(),
            // One entry per undirected edge: arrows are stored in reverse
            // pairs, the even-id arrow carries the input orientation.
            edges: g
                .core()
                .arrows()
                .iter()
                .step_by(2)
                .map(|a| [a.origin.0, a.target.0])
                .collect(),
            tails: g
                .tails()
                .iter()
                .map(|t| TailSpec { attach: t.attach.0 })
                .collect(),
        }
    }
}

/// Parse a graph JSON file and build the validated graph.
pub fn parse_graph(path: &Path) -> Result<JellyfishGraph, IoError> {
    graph_from_str(&std::fs::read_to_string(path)?)
}

pub fn graph_from_str(text: &str) -> Result<JellyfishGraph, IoError> {
    let file: GraphFile = serde_json::from_str(text)?;
    Ok(file.to_graph()?)
}

pub fn graph_to_string(g: &JellyfishGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(g)).expect("graph file serializes")
}

/// One boundary amplitude in a config or on the command line: a bare real
/// or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl From<AlphaSpec> for C64 {
    fn from(a: AlphaSpec) -> C64 {
        match a {
            AlphaSpec::Real(re) => C64::new(re, 0.0),
            AlphaSpec::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// Parse boundary amplitudes from either a JSON list (`[1, [0, 0.5]]`) or a
/// comma-separated list of reals (`1,0.5,-2`).
pub fn parse_alphas(text: &str) -> Result<BoundaryInput, IoError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let specs: Vec<AlphaSpec> = serde_json::from_str(trimmed)?;
        return Ok(BoundaryInput(specs.into_iter().map(C64::from).collect()));
    }
    let mut out = Vec::new();
    for tok in trimmed.split(',') {
        let v: f64 = tok
            .trim()
            .parse()
            .map_err(|_| IoError::InvalidAlphas(format!("cannot parse '{tok}' as a number")))?;
        out.push(C64::new(v, 0.0));
    }
    Ok(BoundaryInput(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRow {
    pub vertex: usize,
    pub j_out: ComplexJson,
    pub p0: f64,
    pub predicted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowRow {
    pub arrow: usize,
    pub origin: usize,
    pub target: usize,
    pub psi: ComplexJson,
    pub j: ComplexJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailRow {
    pub tail: usize,
    pub attach: usize,
    pub alpha: ComplexJson,
    pub beta: ComplexJson,
}

/// Serializable view of an [`ObservableReport`] plus the state it came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub ave: ComplexJson,
    pub zero_ave: bool,
    pub thm4_residual: f64,
    pub kirchhoff_residual: f64,
    pub scattering_deviation: f64,
    pub baseline_per_arrow: f64,
    pub argmax_p0: Vec<usize>,
    pub argmax_j_out: Vec<usize>,
    pub vertices: Vec<VertexRow>,
    pub arrows: Vec<ArrowRow>,
    pub tails: Vec<TailRow>,
}

impl ReportDocument {
    pub fn build(
        g: &JellyfishGraph,
        s: &StationaryState,
        b: &BoundaryInput,
        report: &ObservableReport,
    ) -> ReportDocument {
        let vertices = g
            .core()
            .vertices()
            .map(|v| {
                let jo = report.j_out[v.index0()];
                let p0 = report.p0[v.index0()];
                let predicted = 4.0 * (report.ave.conj() * jo).re;
                VertexRow {
                    vertex: v.0,
                    j_out: jo.into(),
                    p0,
                    predicted,
                    residual: (p0 - predicted).abs(),
                }
            })
            .collect();
        let arrows = g
            .core()
            .arrows()
            .iter()
            .map(|a| ArrowRow {
                arrow: a.id,
                origin: a.origin.0,
                target: a.target.0,
                psi: s.core[a.id].into(),
                j: report.currents.core[a.id].into(),
            })
            .collect();
        let tails = g
            .tails()
            .iter()
            .map(|t| TailRow {
                tail: t.tail_index,
                attach: t.attach.0,
                alpha: b.0[t.tail_index].into(),
                beta: s.betas[t.tail_index].into(),
            })
            .collect();
        ReportDocument {
            ave: report.ave.into(),
            zero_ave: report.argmax_p0.zero_ave,
            thm4_residual: report.thm4_residual,
            kirchhoff_residual: report.kirchhoff_residual,
            scattering_deviation: report.scattering_deviation,
            baseline_per_arrow: report.baseline.first().copied().unwrap_or(0.0),
            argmax_p0: report.argmax_p0.vertices.iter().map(|v| v.0).collect(),
            argmax_j_out: report.argmax_j_out.iter().map(|v| v.0).collect(),
            vertices,
            arrows,
            tails,
        }
    }
}

fn fmt_c(z: ComplexJson) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{}{}i", z.re, if z.im < 0.0 { "" } else { "+" }, z.im)
    }
}

/// Render a report document as JSON or CSV. The CSV has one row per vertex
/// (vertex, J_out, P0, 4*ave*J_out, residual) followed by one per arrow
/// (arrow, origin, target, psi_re, psi_im, J).
pub fn serialize_report(doc: &ReportDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(doc).expect("report serializes")
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str("vertex,j_out,p0,predicted,residual\n");
            for row in &doc.vertices {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.vertex,
                    fmt_c(row.j_out),
                    row.p0,
                    row.predicted,
                    row.residual
                )
                .unwrap();
            }
            out.push_str("arrow,origin,target,psi_re,psi_im,j\n");
            for row in &doc.arrows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.arrow,
                    row.origin,
                    row.target,
                    row.psi.re,
                    row.psi.im,
                    fmt_c(row.j)
                )
                .unwrap();
            }
            out
        }
    }
}

/// Serializable stationary state for the `solve` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryDocument {
    pub ave: ComplexJson,
    pub core: Vec<ArrowAmplitude>,
    pub betas: Vec<ComplexJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowAmplitude {
    pub arrow: usize,
    pub origin: usize,
    pub target: usize,
    pub psi: ComplexJson,
}

impl StationaryDocument {
    pub fn build(g: &JellyfishGraph, s: &StationaryState) -> StationaryDocument {
        StationaryDocument {
            ave: s.ave.into(),
            core: g
                .core()
                .arrows()
                .iter()
                .map(|a| ArrowAmplitude {
                    arrow: a.id,
                    origin: a.origin.0,
                    target: a.target.0,
                    psi: s.core[a.id].into(),
                })
                .collect(),
            betas: s.betas.iter().map(|&b| b.into()).collect(),
        }
    }
}

pub fn serialize_stationary(doc: &StationaryDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(doc).expect("state serializes"),
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str("arrow,origin,target,psi_re,psi_im\n");
            for row in &doc.core {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.arrow, row.origin, row.target, row.psi.re, row.psi.im
                )
                .unwrap();
            }
            out.push_str("tail,beta_re,beta_im\n");
            for (i, beta) in doc.betas.iter().enumerate() {
                writeln!(out, "{},{},{}", i, beta.re, beta.im).unwrap();
            }
            out
        }
    }
}
