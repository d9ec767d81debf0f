//! Hybrid classical/quantum pipeline for minimum vertex cover, maximum
//! independent set and maximum clique.
//!
//! The graph is first shrunk by polynomial-time reduction rules. The residual
//! kernel is then encoded as a penalty-free maximum profit cover objective and
//! optimized with a simulated QAOA circuit. Finally the samples are repaired
//! into covers and mapped back to the original graph.

pub mod error;
pub mod graph;
pub mod instances;
pub mod kernel;
pub mod lp;
pub mod metrics;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod pipeline;
pub mod postprocess;
pub mod qaoa;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSubset};
pub use kernel::{reconstruct, reduce, KernelResult, Rule, RuleSet};
pub use model::{build_ising, build_qubo, IsingModel, Qubo};
pub use pipeline::{PipelineConfig, PipelineReport, Problem, SolverKind};
pub use qaoa::{AngleSchedule, SampleDistribution, TrainConfig};
