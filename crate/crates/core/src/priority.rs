//! Element priorities derived from network structure.
//!
//! A node's priority comes from its degree, its betweenness centrality, or
//! the volume of flows passing through it. Ties on the primary basis are
//! broken by the remaining bases and finally by node id, so rankings are
//! deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::NetworkError;
use crate::evaluation::{Group, PriorityVector};
use crate::network::{Network, NodeId};
use crate::scalar::Scalar;

/// Priority given to nodes whose score is zero, keeping every weight positive.
pub const PRIORITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Degree,
    Betweenness,
    #[serde(rename = "flow")]
    FlowVolume,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    MaxToOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityStrategy {
    basis: Basis,
    tie_break: Vec<Basis>,
    normalization: Normalization,
}

impl PriorityStrategy {
    /// Returns `None` if `tie_break` repeats a basis.
    pub fn new(basis: Basis, tie_break: Vec<Basis>, normalization: Normalization) -> Option<Self> {
        let distinct: BTreeSet<_> = tie_break.iter().map(|b| *b as u8).collect();
        (distinct.len() == tie_break.len()).then_some(Self { basis, tie_break, normalization })
    }

    /// Primary basis with flow volume as first tie-breaker, normalised so the
    /// top priority is 1.
    pub fn with_basis(basis: Basis) -> Self {
        let tie_break = match basis {
            Basis::Degree => vec![Basis::FlowVolume, Basis::Betweenness],
            Basis::Betweenness => vec![Basis::FlowVolume, Basis::Degree],
            Basis::FlowVolume => vec![Basis::Degree, Basis::Betweenness],
            Basis::Combined => vec![Basis::FlowVolume, Basis::Degree, Basis::Betweenness],
        };
        Self { basis, tie_break, normalization: Normalization::MaxToOne }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn tie_break(&self) -> &[Basis] {
        &self.tie_break
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

/// In-degree plus out-degree.
pub fn degree_centrality<T: Scalar>(net: &Network<T>) -> Result<BTreeMap<NodeId, usize>, NetworkError> {
    net.ensure_valid()?;
    Ok(degrees(net).into_iter().enumerate().map(|(i, d)| (net.nodes()[i].clone(), d)).collect())
}

fn degrees<T: Scalar>(net: &Network<T>) -> Vec<usize> {
    let mut deg = vec![0; net.nodes().len()];
    for (a, b) in net.edges() {
        deg[net.index_of(a).expect("valid")] += 1;
        deg[net.index_of(b).expect("valid")] += 1;
    }
    deg
}

/// Unnormalised betweenness over hop-count shortest paths, endpoints excluded.
pub fn betweenness_centrality<T: Scalar>(net: &Network<T>) -> Result<BTreeMap<NodeId, T>, NetworkError> {
    net.ensure_valid()?;
    Ok(betweenness(net).into_iter().enumerate().map(|(i, b)| (net.nodes()[i].clone(), b)).collect())
}

// Brandes' dependency accumulation; sources visited in node declaration order.
fn betweenness<T: Scalar>(net: &Network<T>) -> Vec<T> {
    let n = net.nodes().len();
    let adj = net.adjacency();
    let mut centrality = vec![T::zero(); n];
    for s in 0..n {
        let mut order = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut paths = vec![T::zero(); n];
        let mut dist: Vec<Option<usize>> = vec![None; n];
        paths[s] = T::one();
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v].expect("queued nodes have a distance");
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
                if dist[w] == Some(dv + 1) {
                    paths[w] = paths[w] + paths[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![T::zero(); n];
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                delta[v] = delta[v] + paths[v] / paths[w] * (T::one() + delta[w]);
            }
            if w != s {
                centrality[w] = centrality[w] + delta[w];
            }
        }
    }
    centrality
}

/// Total flow volume through each node and edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowVolumes<T> {
    pub nodes: BTreeMap<NodeId, T>,
    pub edges: BTreeMap<(NodeId, NodeId), T>,
}

/// Each flow counts once per node and edge on its route, even if revisited.
pub fn flow_volume<T: Scalar>(net: &Network<T>) -> Result<FlowVolumes<T>, NetworkError> {
    net.ensure_valid()?;
    let mut nodes: BTreeMap<NodeId, T> = net.nodes().iter().map(|n| (n.clone(), T::zero())).collect();
    let mut edges: BTreeMap<(NodeId, NodeId), T> = net.edges().iter().map(|e| (e.clone(), T::zero())).collect();
    for flow in net.flows() {
        let on_route: BTreeSet<&NodeId> = flow.route.iter().collect();
        for n in on_route {
            let slot = nodes.get_mut(n).expect("valid");
            *slot = *slot + flow.volume;
        }
        let hops: BTreeSet<(&NodeId, &NodeId)> = flow.route.windows(2).map(|h| (&h[0], &h[1])).collect();
        for (a, b) in hops {
            let slot = edges.get_mut(&(a.clone(), b.clone())).expect("valid");
            *slot = *slot + flow.volume;
        }
    }
    Ok(FlowVolumes { nodes, edges })
}

/// Total volume per distinct route. Routes with no flows do not appear.
pub fn route_priority<T: Scalar>(net: &Network<T>) -> Result<BTreeMap<Vec<NodeId>, T>, NetworkError> {
    net.ensure_valid()?;
    let mut out: BTreeMap<Vec<NodeId>, T> = BTreeMap::new();
    for flow in net.flows() {
        let slot = out.entry(flow.route.clone()).or_insert_with(T::zero);
        *slot = *slot + flow.volume;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedNode<T> {
    pub id: NodeId,
    pub rank: usize,
    /// Raw score on the primary basis.
    pub score: T,
    pub priority: T,
}

/// Nodes in rank order (rank 1 first).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorityRanking<T> {
    pub basis: Basis,
    pub entries: Vec<RankedNode<T>>,
}

impl<T: Scalar> PriorityRanking<T> {
    pub fn priorities(&self) -> PriorityVector<T> {
        PriorityVector::new(self.entries.iter().map(|e| (e.id.clone(), e.priority)))
            .expect("priorities are floored above zero")
    }
}

struct BasisScores<T> {
    degree: Vec<T>,
    betweenness: Vec<T>,
    flow: Vec<T>,
}

impl<T: Scalar> BasisScores<T> {
    fn compute(net: &Network<T>) -> Result<Self, NetworkError> {
        let volumes = flow_volume(net)?;
        Ok(Self {
            degree: degrees(net).into_iter().map(T::from_count).collect(),
            betweenness: betweenness(net),
            flow: net.nodes().iter().map(|n| volumes.nodes[n]).collect(),
        })
    }

    fn get(&self, basis: Basis) -> Vec<T> {
        match basis {
            Basis::Degree => self.degree.clone(),
            Basis::Betweenness => self.betweenness.clone(),
            Basis::FlowVolume => self.flow.clone(),
            Basis::Combined => {
                let parts = [scale_by_max(&self.degree), scale_by_max(&self.betweenness), scale_by_max(&self.flow)];
                let three = T::from_count(parts.len());
                (0..self.degree.len()).map(|i| parts.iter().fold(T::zero(), |acc, p| acc + p[i]) / three).collect()
            }
        }
    }
}

/// Divides by the maximum; all zeros if the maximum is not positive.
fn scale_by_max<T: Scalar>(scores: &[T]) -> Vec<T> {
    let max = scores.iter().fold(T::zero(), |m, &s| m.max(s));
    if max > T::zero() {
        scores.iter().map(|&s| s / max).collect()
    } else {
        vec![T::zero(); scores.len()]
    }
}

const RANK_GRID: f64 = 1e9;

/// Scores scaled by their maximum and snapped to a 1e-9 grid, so that
/// rounding noise neither creates nor breaks ties.
fn rank_keys<T: Scalar>(scores: &[T]) -> Vec<i64> {
    scale_by_max(scores).into_iter().map(|s| (s * T::lit(RANK_GRID)).round().to_i64().unwrap_or(0)).collect()
}

/// Ranks nodes by the strategy and turns primary scores into priorities.
///
/// With `MaxToOne`, scores are divided by the maximum and snapped to the
/// same 1e-9 grid used for ranking; if every score is zero all nodes get
/// priority 1. Zero priorities are raised to [`PRIORITY_FLOOR`].
pub fn derive_priorities<T: Scalar>(
    net: &Network<T>,
    strategy: &PriorityStrategy,
) -> Result<PriorityRanking<T>, NetworkError> {
    if net.nodes().is_empty() {
        return Err(NetworkError::EmptyNetwork);
    }
    let scores = BasisScores::compute(net)?;
    let primary = scores.get(strategy.basis);
    let keys: Vec<Vec<i64>> = std::iter::once(strategy.basis)
        .chain(strategy.tie_break.iter().copied())
        .map(|b| rank_keys(&scores.get(b)))
        .collect();

    let mut order: Vec<usize> = (0..net.nodes().len()).collect();
    order.sort_by(|&a, &b| {
        keys.iter().map(|k| k[b].cmp(&k[a])).find(|o| o.is_ne()).unwrap_or_else(|| net.nodes()[a].cmp(&net.nodes()[b]))
    });

    let normalized = match strategy.normalization {
        Normalization::None => primary.clone(),
        Normalization::MaxToOne => {
            if primary.iter().any(|&s| s > T::zero()) {
                keys[0].iter().map(|&k| T::from_i64(k).expect("key fits") / T::lit(RANK_GRID)).collect()
            } else {
                vec![T::one(); primary.len()]
            }
        }
    };
    let floor = T::lit(PRIORITY_FLOOR);
    let entries = order
        .into_iter()
        .enumerate()
        .map(|(pos, i)| RankedNode {
            id: net.nodes()[i].clone(),
            rank: pos + 1,
            score: primary[i],
            priority: if normalized[i] > T::zero() { normalized[i] } else { floor },
        })
        .collect();
    Ok(PriorityRanking { basis: strategy.basis, entries })
}

/// Single-linkage grouping of priorities.
///
/// After sorting by descending priority, consecutive entries closer than
/// `tolerance` share a group. Each group's priority is its members' mean;
/// groups come out in descending priority and are named `g1, g2, ...`.
/// A negative tolerance behaves like zero.
pub fn group_by_priority<T: Scalar>(priorities: &PriorityVector<T>, tolerance: T) -> Vec<Group<T>> {
    let mut sorted: Vec<&(NodeId, T)> = priorities.entries().iter().collect();
    sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));

    let mut clusters: Vec<Vec<&(NodeId, T)>> = Vec::new();
    for entry in sorted {
        match clusters.last_mut() {
            Some(current) if current.last().expect("non-empty").1 - entry.1 <= tolerance => current.push(entry),
            _ => clusters.push(vec![entry]),
        }
    }
    clusters
        .into_iter()
        .enumerate()
        .map(|(i, members)| {
            let sum = members.iter().fold(T::zero(), |acc, m| acc + m.1);
            let priority = sum / T::from_count(members.len());
            Group::new(format!("g{}", i + 1), members.into_iter().map(|m| m.0.clone()).collect(), priority)
        })
        .collect()
}
