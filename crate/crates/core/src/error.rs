use thiserror::Error;

use crate::analysis::EinsteinCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected: vertex `{vertex}` is unreachable from `{root}`")]
    DisconnectedGraph { root: String, vertex: String },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("edge `{edge}` has non-positive or non-finite length {length}")]
    NonpositiveLength { edge: String, length: f64 },

    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("cannot subdivide loop edge `{0}`")]
    LoopSubdivision(String),

    #[error("split {0} is outside the open interval (0, 1)")]
    SplitOutOfRange(f64),

    #[error("source and sink are the same vertex `{0}`")]
    SameVertex(String),

    #[error("spanning-tree enumeration needs {edges} non-loop edges, above the cap of {cap}")]
    InstanceTooLarge { edges: usize, cap: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),

    #[error("finite-difference step {step} is not below edge length {length}")]
    StepTooLarge { step: f64, length: f64 },

    #[error("einstein solver did not converge; best max residual {:.3e}", .0.max_residual)]
    NoConvergence(Box<EinsteinCertificate>),

    #[error("parse error: {0}")]
    Parse(String),
}
