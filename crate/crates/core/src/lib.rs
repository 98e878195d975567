//! Strong simulation of closed ZX-diagrams by cutting along rank-width and
//! tree-width separators.

pub mod bench;
pub mod cuts;
pub mod decomp;
pub mod diagram;
pub mod error;
pub mod f2;
pub mod graph;
pub mod oracle;
pub mod phase;
pub mod plan;
pub mod rules;
pub mod scalar;
pub mod sim;

pub use diagram::{EType, VType, ZxDiagram, V};
pub use error::{Error, Result};
pub use phase::Phase;
pub use plan::{build_cut_tree, effective_alpha, execute_cut_tree, CutNode, CutTree, PlannerConfig};
pub use scalar::Scalar;
pub use sim::{simulate, Mode, SimConfig, SimResult, SimStats};
