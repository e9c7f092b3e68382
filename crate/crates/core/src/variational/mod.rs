//! Layered XX ansatz, VQE/VQD solvers and gate-count accounting.

mod ansatz;
mod lbfgs;
mod objective;
mod resources;
mod solver;
mod subspace;

pub use ansatz::{build_block_ansatz, build_hierarchical_ansatz, canonical_pairs, AnsatzGate, AnsatzProgram, BlockInfo};
pub use lbfgs::{minimize, LbfgsOptions, LbfgsResult};
pub use objective::{vqe_objective, Objective};
pub use resources::{
    closed_form_depth_parallel, closed_form_depth_sequential, closed_form_n_xx, closed_form_resources,
    constructive_resources, count_resources, one_factorization, ResourceCount,
};
pub use solver::{
    run_vqd, run_vqe, BetaPolicy, DeflationConfig, GradientMethod, LevelResult, OptimizerConfig, Strategy,
    VariationalResult,
};
pub use subspace::{subspace_refine, SubspaceRefinement};
