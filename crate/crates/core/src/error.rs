use std::path::PathBuf;

use thiserror::Error;

use crate::mesh::LoopTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid section: {0}")]
    InvalidSection(String),

    #[error("invalid polygon loop {loop_index}: {reason}")]
    InvalidPolygon { loop_index: usize, reason: String },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("seed triangulation quality too low: minimum angle {min_angle_deg:.2} deg (need > {limit_deg} deg)")]
    PoorSeedQuality { min_angle_deg: f64, limit_deg: f64 },

    #[error("invalid mesh size {h}: must be positive and below half the section diameter {diameter}")]
    InvalidMeshSize { h: f64, diameter: f64 },

    #[error("element budget exceeded: {requested} triangles requested, budget is {budget}")]
    ElementBudget { requested: usize, budget: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("missing Dirichlet data for boundary node {node} on loop {tag:?}")]
    MissingBoundaryData { node: usize, tag: LoopTag },

    #[error("field belongs to a different mesh or has the wrong length ({0})")]
    FieldMismatch(String),

    #[error("conjugate gradients stagnated after {iterations} iterations (last relative residual {:e})", .history.last().copied().unwrap_or(f64::NAN))]
    SolverStagnation { iterations: usize, history: Vec<f64> },

    #[error("conjugate gradients did not reach rtol {rtol:e} within {iterations} iterations (relative residual {residual:e})")]
    SolverNotConverged { iterations: usize, rtol: f64, residual: f64, history: Vec<f64> },

    #[error("operator is not positive definite (pivot/curvature {value:e} at step {step})")]
    Indefinite { step: usize, value: f64 },

    #[error("flexure requires a simply connected section ({holes} hole(s) present)")]
    MultiplyConnected { holes: usize },

    #[error("ill-posed {kind} factor: resultant {resultant:e} is negligible against energy scale {scale:e}")]
    IllPosedFactor { kind: String, resultant: f64, scale: f64 },

    #[error("field carries zero energy")]
    ZeroEnergy,

    #[error("field kind does not match factor kind {0}")]
    FieldKindMismatch(String),

    #[error("stiffness routes disagree for {kind}: relative gap {gap:e}")]
    IdentificationMismatch { kind: String, gap: f64 },

    #[error("no oracle entry for ({section}, {quantity}, nu={nu:?}); available: {available}")]
    MissingOracle { section: String, quantity: String, nu: Option<f64>, available: String },

    #[error("malformed oracle catalog line {line}: {reason}")]
    Catalog { line: usize, reason: String },

    #[error("could not resample a non-degenerate {kind} field from seed {seed} after {attempts} attempts")]
    DegenerateSample { kind: String, seed: u64, attempts: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("section JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}
