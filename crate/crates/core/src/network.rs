//! Single-level flow network: directed unweighted edges and routed flows.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::NetworkError;
use crate::scalar::Scalar;

pub type NodeId = String;

/// A flow along a route of at least two nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow<T> {
    pub route: Vec<NodeId>,
    pub volume: T,
}

impl<T: Scalar> Flow<T> {
    pub fn new<S: Into<NodeId>>(route: impl IntoIterator<Item = S>, volume: T) -> Self {
        Self { route: route.into_iter().map(Into::into).collect(), volume }
    }

    /// A flow of volume 1.
    pub fn unit<S: Into<NodeId>>(route: impl IntoIterator<Item = S>) -> Self {
        Self::new(route, T::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    flows: Vec<Flow<T>>,
}

impl<T: Scalar> Network<T> {
    /// Builds the network as given; see [`validate_network`] for the checks.
    pub fn new<N, S, E>(nodes: N, edges: E, flows: Vec<Flow<T>>) -> Self
    where
        N: IntoIterator<Item = S>,
        S: Into<NodeId>,
        E: IntoIterator<Item = (S, S)>,
    {
        Self {
            nodes: nodes.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
            flows,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn flows(&self) -> &[Flow<T>] {
        &self.flows
    }

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    /// Returns `self` if it has no violations.
    pub fn ensure_valid(&self) -> Result<&Self, NetworkError> {
        let v = validate_network(self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(NetworkError::Invalid(v))
        }
    }

    /// Out-neighbour lists by node index, in edge declaration order.
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (a, b) in &self.edges {
            if let (Some(i), Some(j)) = (self.index_of(a), self.index_of(b)) {
                adj[i].push(j);
            }
        }
        adj
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetworkViolation {
    DuplicateNode(NodeId),
    UnknownEdgeEndpoint { from: NodeId, to: NodeId, missing: NodeId },
    SelfLoop(NodeId),
    DuplicateEdge { from: NodeId, to: NodeId },
    ShortRoute { flow: usize },
    UnknownRouteNode { flow: usize, node: NodeId },
    MissingEdge { flow: usize, from: NodeId, to: NodeId },
    NonPositiveVolume { flow: usize, volume: String },
}

impl fmt::Display for NetworkViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateNode(n) => write!(f, "node {n} declared twice"),
            Self::UnknownEdgeEndpoint { from, to, missing } => {
                write!(f, "edge ({from}, {to}) uses undeclared node {missing}")
            }
            Self::SelfLoop(n) => write!(f, "self-loop on {n}"),
            Self::DuplicateEdge { from, to } => write!(f, "edge ({from}, {to}) declared twice"),
            Self::ShortRoute { flow } => write!(f, "flow {flow} route has fewer than 2 nodes"),
            Self::UnknownRouteNode { flow, node } => {
                write!(f, "flow {flow} passes undeclared node {node}")
            }
            Self::MissingEdge { flow, from, to } => {
                write!(f, "flow {flow} uses missing edge ({from}, {to})")
            }
            Self::NonPositiveVolume { flow, volume } => {
                write!(f, "flow {flow} volume must be positive, got {volume}")
            }
        }
    }
}

/// Lists every invariant violation; empty means valid.
pub fn validate_network<T: Scalar>(net: &Network<T>) -> Vec<NetworkViolation> {
    let mut out = Vec::new();
    let mut nodes = BTreeSet::new();
    for n in &net.nodes {
        if !nodes.insert(n.as_str()) {
            out.push(NetworkViolation::DuplicateNode(n.clone()));
        }
    }
    let mut edges = BTreeSet::new();
    for (a, b) in &net.edges {
        for end in [a, b] {
            if !nodes.contains(end.as_str()) {
                out.push(NetworkViolation::UnknownEdgeEndpoint {
                    from: a.clone(),
                    to: b.clone(),
                    missing: end.clone(),
                });
            }
        }
        if a == b {
            out.push(NetworkViolation::SelfLoop(a.clone()));
        }
        if !edges.insert((a.as_str(), b.as_str())) {
            out.push(NetworkViolation::DuplicateEdge { from: a.clone(), to: b.clone() });
        }
    }
    for (i, flow) in net.flows.iter().enumerate() {
        if !(flow.volume.is_finite() && flow.volume > T::zero()) {
            out.push(NetworkViolation::NonPositiveVolume { flow: i, volume: flow.volume.to_string() });
        }
        if flow.route.len() < 2 {
            out.push(NetworkViolation::ShortRoute { flow: i });
        }
        for n in &flow.route {
            if !nodes.contains(n.as_str()) {
                out.push(NetworkViolation::UnknownRouteNode { flow: i, node: n.clone() });
            }
        }
        for hop in flow.route.windows(2) {
            if !edges.contains(&(hop[0].as_str(), hop[1].as_str())) {
                out.push(NetworkViolation::MissingEdge { flow: i, from: hop[0].clone(), to: hop[1].clone() });
            }
        }
    }
    out
}
