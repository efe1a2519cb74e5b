//! Resistance-based Ricci curvature on weighted multigraphs and the Ricci
//! flow it drives.
//!
//! Each edge `e = uv` of length `ℓ_e` gets curvature
//! `K_e = 1/deg u + 1/deg v − ω_uv/ℓ_e`, where `ω` is effective resistance.
//! The flow `dℓ_e/dt = −K_e` shrinks positively curved edges; [`flow`]
//! integrates it and optionally contracts edges as they collapse.
//!
//! ```
//! use ricci_foster::{curvature_report, fixtures};
//!
//! let report = curvature_report(&fixtures::house()).unwrap();
//! assert!((report.total_curvature - 1.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod corpus;
pub mod curvature;
mod error;
pub mod fixtures;
pub mod flow;
pub mod graph;
pub mod io;
pub mod resistance;

pub use analysis::{
    einstein_check, einstein_solve, einstein_solve_with, finite_difference, monitor_trace, verify_all, verify_with_profile,
    CheckResult, EinsteinCertificate, EinsteinMethod, EinsteinSolution, EinsteinSolverOptions, VerificationReport,
};
pub use curvature::{
    curvature_of_edge, curvature_partials, curvature_report, edge_curvatures, verify_subdivision_additivity,
    CurvatureReport, EdgeCurvature, SubdivisionCheck, VertexCurvature,
};
pub use error::{Error, Result};
pub use flow::{
    curvature_time_derivative, flow, flow_with_surgery_to_point, resistance_time_derivatives, FlowConfig,
    FlowSample, FlowTrace, StopReason, SurgeryEvent, TerminalState, TimeLimit,
};
pub use graph::{ContractionMap, EdgeId, EdgeRecord, VertexId, WeightedGraph};
pub use resistance::{
    resistance_by_trees, resistance_by_trees_with_cap, resistance_gradient, resistance_profile, tree_polynomial,
    unit_current, CurrentVector, ResistanceProfile,
};
