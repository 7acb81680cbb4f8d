//! Hierarchy tree of leaves and subsystems, each subsystem carrying the
//! method used to aggregate its children.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aggregate::FallbackMethod;
use crate::error::EvalError;
use crate::evaluation::{check_partition, ElementId, Group, Scale};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Wem,
    Wlam,
    Nam,
    #[serde(rename = "hybrid")]
    HybridGrouped,
    WemThen,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Wem => "wem",
            Method::Wlam => "wlam",
            Method::Nam => "nam",
            Method::HybridGrouped => "hybrid",
            Method::WemThen => "wem-then",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig<T> {
    pub method: Method,
    /// Partition of the children, required by `HybridGrouped`.
    pub groups: Option<Vec<Group<T>>>,
    /// Children the weakest-element pass looks at, required by `WemThen`.
    pub critical: Option<Vec<ElementId>>,
    /// Method `WemThen` applies to all children.
    pub fallback: FallbackMethod,
    pub adequacy_threshold: Option<T>,
}

impl<T: Scalar> MethodConfig<T> {
    pub fn new(method: Method) -> Self {
        Self { method, groups: None, critical: None, fallback: FallbackMethod::Wlam, adequacy_threshold: None }
    }

    pub fn hybrid(groups: Vec<Group<T>>) -> Self {
        Self { groups: Some(groups), ..Self::new(Method::HybridGrouped) }
    }

    pub fn wem_then(critical: Vec<ElementId>, fallback: FallbackMethod) -> Self {
        Self { critical: Some(critical), fallback, ..Self::new(Method::WemThen) }
    }

    pub fn with_threshold(mut self, threshold: T) -> Self {
        self.adequacy_threshold = Some(threshold);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind<T> {
    Leaf { value: T },
    Subsystem { children: Vec<HierarchyNode<T>>, config: MethodConfig<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyNode<T> {
    pub id: String,
    /// Weight of this node inside its parent; unset means 1.
    pub priority: Option<T>,
    pub kind: NodeKind<T>,
}

impl<T: Scalar> HierarchyNode<T> {
    pub fn leaf(id: impl Into<String>, value: T) -> Self {
        Self { id: id.into(), priority: None, kind: NodeKind::Leaf { value } }
    }

    pub fn subsystem(id: impl Into<String>, config: MethodConfig<T>, children: Vec<Self>) -> Self {
        Self { id: id.into(), priority: None, kind: NodeKind::Subsystem { children, config } }
    }

    pub fn with_priority(mut self, priority: T) -> Self {
        self.priority = Some(priority);
        self
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }

    pub fn children(&self) -> &[Self] {
        match &self.kind {
            NodeKind::Leaf { .. } => &[],
            NodeKind::Subsystem { children, .. } => children,
        }
    }

    /// Number of nodes in the subtree, this one included.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(Self::node_count).sum::<usize>()
    }

    pub fn find(&self, id: &str) -> Option<&Self> {
        if self.id == id {
            return Some(self);
        }
        self.children().iter().find_map(|c| c.find(id))
    }

    pub(crate) fn find_mut(&mut self, id: &str) -> Option<&mut Self> {
        if self.id == id {
            return Some(self);
        }
        match &mut self.kind {
            NodeKind::Leaf { .. } => None,
            NodeKind::Subsystem { children, .. } => children.iter_mut().find_map(|c| c.find_mut(id)),
        }
    }
}

/// Child weights, or `None` when no child carries an explicit priority.
/// Children without a priority count as weight 1.
pub(crate) fn explicit_child_weights<T: Scalar>(children: &[HierarchyNode<T>]) -> Option<Vec<T>> {
    children
        .iter()
        .any(|c| c.priority.is_some())
        .then(|| children.iter().map(|c| c.priority.unwrap_or_else(T::one)).collect())
}

/// True when children carry explicit priorities that are not all equal.
pub(crate) fn is_weighted<T: Scalar>(children: &[HierarchyNode<T>]) -> bool {
    explicit_child_weights(children).is_some_and(|w| w.windows(2).any(|p| p[0] != p[1]))
}

#[derive(Debug, Clone, PartialEq)]
pub enum HierarchyIssue {
    DuplicateId(String),
    EmptySubsystem,
    LeafOutOfScale { value: String },
    NonPositivePriority { value: String },
    MissingGroups,
    InvalidGroups(EvalError),
    UnusedGroups,
    MissingCriticalSet,
    UnknownCritical(Vec<String>),
    UnusedCriticalSet,
    WeightedNam,
    ThresholdOutOfRange { value: String },
}

/// One problem found in a hierarchy; `path` is the slash-joined id chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyViolation {
    pub path: String,
    pub issue: HierarchyIssue,
}

impl fmt::Display for HierarchyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.path)?;
        match &self.issue {
            HierarchyIssue::DuplicateId(id) => write!(f, "id {id} appears more than once"),
            HierarchyIssue::EmptySubsystem => write!(f, "subsystem has no children"),
            HierarchyIssue::LeafOutOfScale { value } => write!(f, "leaf value {value} outside scale"),
            HierarchyIssue::NonPositivePriority { value } => {
                write!(f, "priority must be positive and finite, got {value}")
            }
            HierarchyIssue::MissingGroups => write!(f, "hybrid method requires groups"),
            HierarchyIssue::InvalidGroups(e) => write!(f, "{e}"),
            HierarchyIssue::UnusedGroups => write!(f, "groups are only used by the hybrid method"),
            HierarchyIssue::MissingCriticalSet => write!(f, "wem-then requires a non-empty critical set"),
            HierarchyIssue::UnknownCritical(ids) => write!(f, "critical set names unknown children {ids:?}"),
            HierarchyIssue::UnusedCriticalSet => write!(f, "critical set is only used by wem-then"),
            HierarchyIssue::WeightedNam => {
                write!(f, "nonlinear aggregation cannot take non-uniform child priorities")
            }
            HierarchyIssue::ThresholdOutOfRange { value } => {
                write!(f, "adequacy threshold {value} outside [0, 1]")
            }
        }
    }
}

/// Lists every structural, configuration and range problem; empty means valid.
pub fn validate_hierarchy<T: Scalar>(root: &HierarchyNode<T>, scale: &Scale<T>) -> Vec<HierarchyViolation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    walk(root, scale, &root.id, &mut seen, &mut out);
    out
}

fn walk<'a, T: Scalar>(
    node: &'a HierarchyNode<T>,
    scale: &Scale<T>,
    path: &str,
    seen: &mut BTreeSet<&'a str>,
    out: &mut Vec<HierarchyViolation>,
) {
    let mut push = |issue| out.push(HierarchyViolation { path: path.to_owned(), issue });
    if !seen.insert(node.id.as_str()) {
        push(HierarchyIssue::DuplicateId(node.id.clone()));
    }
    if let Some(p) = node.priority {
        if !(p.is_finite() && p > T::zero()) {
            push(HierarchyIssue::NonPositivePriority { value: p.to_string() });
        }
    }
    let (children, config) = match &node.kind {
        NodeKind::Leaf { value } => {
            if !(value.is_finite() && scale.contains(*value)) {
                push(HierarchyIssue::LeafOutOfScale { value: value.to_string() });
            }
            return;
        }
        NodeKind::Subsystem { children, config } => (children, config),
    };
    if children.is_empty() {
        push(HierarchyIssue::EmptySubsystem);
    }
    let child_ids: Vec<ElementId> = children.iter().map(|c| c.id.clone()).collect();

    match (&config.groups, config.method) {
        (None, Method::HybridGrouped) => push(HierarchyIssue::MissingGroups),
        (Some(groups), Method::HybridGrouped) => {
            for g in groups {
                if !(g.priority.is_finite() && g.priority > T::zero()) {
                    push(HierarchyIssue::InvalidGroups(EvalError::NonPositiveGroupPriority {
                        id: g.id.clone(),
                        value: g.priority.to_string(),
                    }));
                }
            }
            let lists: Vec<(&str, &[ElementId])> =
                groups.iter().map(|g| (g.id.as_str(), g.members.as_slice())).collect();
            if groups.is_empty() {
                push(HierarchyIssue::MissingGroups);
            } else if let Err(e) = check_partition(&child_ids, &lists) {
                push(HierarchyIssue::InvalidGroups(e));
            }
        }
        (Some(_), _) => push(HierarchyIssue::UnusedGroups),
        (None, _) => {}
    }

    match (&config.critical, config.method) {
        (None, Method::WemThen) => push(HierarchyIssue::MissingCriticalSet),
        (Some(c), Method::WemThen) if c.is_empty() => push(HierarchyIssue::MissingCriticalSet),
        (Some(c), Method::WemThen) => {
            let unknown: Vec<_> = c.iter().filter(|id| !child_ids.contains(id)).cloned().collect();
            if !unknown.is_empty() {
                push(HierarchyIssue::UnknownCritical(unknown));
            }
        }
        (Some(_), _) => push(HierarchyIssue::UnusedCriticalSet),
        (None, _) => {}
    }

    let nam_used =
        config.method == Method::Nam || (config.method == Method::WemThen && config.fallback == FallbackMethod::Nam);
    if nam_used && is_weighted(children) {
        push(HierarchyIssue::WeightedNam);
    }

    if let Some(t) = config.adequacy_threshold {
        if !(t >= T::zero() && t <= T::one()) {
            push(HierarchyIssue::ThresholdOutOfRange { value: t.to_string() });
        }
    }

    for child in children {
        let child_path = format!("{path}/{}", child.id);
        walk(child, scale, &child_path, seen, out);
    }
}
