//! Inference of hidden diffusion networks from infection-time cascades.
//!
//! Given only *when* nodes got infected across a set of cascades, the greedy
//! optimizer recovers *which* directed edges carried the infections, by
//! maximizing a monotone submodular score: the log-likelihood improvement of
//! the edge set over an empty graph, summed over every propagation tree
//! consistent with each cascade. The crate also ships the synthetic pipeline
//! around it: Kronecker and preferential-attachment ground-truth generators,
//! a continuous-time cascade simulator, and the recovery metrics.

pub mod cascade;
pub mod eval;
pub mod inference;
pub mod likelihood;
pub mod network;
pub mod simulate;

pub use cascade::{candidate_pairs, validate, Cascade, CascadeSet, InfectionTime};
pub use inference::{
    exhaustive_opt, greedy_infer, online_bound, GainLedger, InferenceConfig, InferenceResult,
    Objective, SelectedEdge,
};
pub use likelihood::{
    cascade_score, edge_weight, pairwise_likelihood, total_score, tree_sum_enumerate,
    tree_sum_matrix, Hyper, ModelKind, TransmissionModel,
};
pub use network::{Edge, Network, NodeId};
pub use simulate::{
    assign_rates, kronecker_network, scale_free_network, simulate_cascade, simulate_once,
    simulate_set, KroneckerParams, SimConfig,
};
