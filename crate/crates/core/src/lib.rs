//! Aggregated quality evaluation of hierarchical network systems.
//!
//! The operators are generic over [`Scalar`] (`f32` or `f64`). The `*64`
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! command line tool uses.

pub mod aggregate;
pub mod error;
pub mod evaluation;
pub mod hierarchy;
pub mod network;
pub mod priority;
pub mod rollup;
pub mod scalar;
pub mod theorems;

pub use aggregate::{
    adequacy_wem_nam, adequacy_wem_wlam, hybrid_grouped, nam, weakest, wem, wem_then_aggregate, wlam, AdequacyReport,
    FallbackMethod, Weakest, WemThen,
};
pub use error::{EvalError, NetworkError, RollupError};
pub use evaluation::{ElementId, EvaluationVector, Group, GroupedSystem, PriorityVector, Scale};
pub use hierarchy::{validate_hierarchy, HierarchyNode, HierarchyViolation, Method, MethodConfig, NodeKind};
pub use network::{validate_network, Flow, Network, NetworkViolation, NodeId};
pub use priority::{
    betweenness_centrality, degree_centrality, derive_priorities, flow_volume, group_by_priority, route_priority,
    Basis, Normalization, PriorityRanking, PriorityStrategy,
};
pub use rollup::{aggregate, compare_methods, sweep, AggregationReport, ComparisonRow, SweepRow};
pub use scalar::{approx_eq, approx_le, Scalar};
pub use theorems::{check_theorem1, check_theorem2, check_theorem3, GroupedBounds, OrderingChain, ProductBound};

pub type Scale64 = Scale<f64>;
pub type EvaluationVector64 = EvaluationVector<f64>;
pub type PriorityVector64 = PriorityVector<f64>;
pub type GroupedSystem64 = GroupedSystem<f64>;
pub type Group64 = Group<f64>;
pub type Network64 = Network<f64>;
pub type Flow64 = Flow<f64>;
pub type HierarchyNode64 = HierarchyNode<f64>;
pub type MethodConfig64 = MethodConfig<f64>;
pub type AggregationReport64 = AggregationReport<f64>;
pub type ComparisonRow64 = ComparisonRow<f64>;
pub type SweepRow64 = SweepRow<f64>;

pub type Scale32 = Scale<f32>;
pub type EvaluationVector32 = EvaluationVector<f32>;
pub type PriorityVector32 = PriorityVector<f32>;
pub type GroupedSystem32 = GroupedSystem<f32>;
