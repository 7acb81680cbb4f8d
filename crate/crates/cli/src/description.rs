//! JSON system description: parsing, validation and conversion into the
//! library's types.
//!
//! Every semantic problem is reported with a JSON-pointer location; syntax
//! errors carry line and column.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use netagg::hierarchy::HierarchyIssue;
use netagg::{
    validate_hierarchy, validate_network, FallbackMethod, Flow64, Group64, HierarchyNode64, Method, MethodConfig64,
    Network64, NetworkViolation, Scale64,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub id: String,
    pub evaluation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub id: String,
    pub members: Vec<String>,
    pub priority: f64,
}

/// A hierarchy node: either `{"element": id}` or a subsystem with `id`,
/// `method` and `children`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<GroupSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub then: Option<FallbackMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<NodeSpec>>,
}

fn unit_volume() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub route: Vec<String>,
    #[serde(default = "unit_volume")]
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub flows: Vec<FlowSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub scale: ScaleSpec,
    pub elements: Vec<ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<GroupSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<NodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// JSON pointer into the document.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = if self.location.is_empty() { "/" } else { &self.location };
        write!(f, "{loc}: {}", self.message)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{} problem(s) in description:\n{}", .0.len(), .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn parse_file(path: &Path) -> Result<SystemDescription, LoadError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    Ok(parse_str(&text)?)
}

/// Parses and fully validates a description.
pub fn parse_str(text: &str) -> Result<SystemDescription, ParseError> {
    let desc: SystemDescription = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let diagnostics = desc.validate();
    if diagnostics.is_empty() {
        Ok(desc)
    } else {
        Err(ParseError::Invalid(diagnostics))
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic { location: location.into(), message: message.into() });
    }
}

impl SystemDescription {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serialises")
    }

    pub fn scale(&self) -> Scale64 {
        Scale64::new(self.scale.min, self.scale.max).expect("validated scale")
    }

    pub fn element(&self, id: &str) -> Option<&ElementSpec> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Every problem in the document; empty means valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Collector(Vec::new());
        let scale = match Scale64::new(self.scale.min, self.scale.max) {
            Ok(s) => Some(s),
            Err(e) => {
                out.push("/scale", e.to_string());
                None
            }
        };
        self.check_elements(scale.as_ref(), &mut out);
        if let Some(groups) = &self.groups {
            let ids: Vec<String> = self.elements.iter().map(|e| e.id.clone()).collect();
            check_groups(groups, &ids, "/groups", "element", &mut out);
        }
        if let Some(root) = &self.hierarchy {
            self.check_hierarchy(root, scale.as_ref(), &mut out);
        }
        if let Some(net) = &self.network {
            check_network(net, &mut out);
        }
        out.0
    }

    fn check_elements(&self, scale: Option<&Scale64>, out: &mut Collector) {
        if self.elements.is_empty() {
            out.push("/elements", "empty system");
        }
        let mut seen = BTreeSet::new();
        for (i, e) in self.elements.iter().enumerate() {
            if !seen.insert(e.id.as_str()) {
                out.push(format!("/elements/{i}/id"), format!("duplicate element id {}", e.id));
            }
            if let Some(s) = scale {
                if !(e.evaluation.is_finite() && s.contains(e.evaluation)) {
                    out.push(
                        format!("/elements/{i}/evaluation"),
                        format!("evaluation {} outside scale [{}, {}]", e.evaluation, s.min(), s.max()),
                    );
                }
            }
            if let Some(p) = e.priority {
                if !positive(p) {
                    out.push(format!("/elements/{i}/priority"), format!("priority must be positive, got {p}"));
                }
            }
        }
    }

    fn check_hierarchy(&self, root: &NodeSpec, scale: Option<&Scale64>, out: &mut Collector) {
        let before = out.0.len();
        let mut used = BTreeMap::new();
        self.check_node_shape(root, "/hierarchy", &mut used, out);
        if out.0.len() > before {
            return;
        }
        let Some(scale) = scale else { return };
        let mut pointers = BTreeMap::new();
        let tree = self.build_node(root, "/hierarchy", &mut pointers);
        for v in validate_hierarchy(&tree, scale) {
            let id = v.path.rsplit('/').next().unwrap_or_default();
            let base = pointers.get(id).cloned().unwrap_or_else(|| "/hierarchy".to_owned());
            let location = match &v.issue {
                HierarchyIssue::MissingGroups | HierarchyIssue::InvalidGroups(_) | HierarchyIssue::UnusedGroups => {
                    format!("{base}/groups")
                }
                HierarchyIssue::MissingCriticalSet
                | HierarchyIssue::UnknownCritical(_)
                | HierarchyIssue::UnusedCriticalSet => format!("{base}/critical"),
                HierarchyIssue::ThresholdOutOfRange { .. } => format!("{base}/threshold"),
                HierarchyIssue::NonPositivePriority { .. } => format!("{base}/priority"),
                HierarchyIssue::WeightedNam => format!("{base}/method"),
                _ => base,
            };
            let message = v.to_string();
            let message = message.split_once(": ").map_or(message.as_str(), |(_, m)| m).to_owned();
            out.push(location, message);
        }
    }

    // Shape checks that must pass before the tree can be built.
    fn check_node_shape(&self, node: &NodeSpec, at: &str, used: &mut BTreeMap<String, String>, out: &mut Collector) {
        match (&node.element, &node.children) {
            (Some(_), Some(_)) => out.push(at, "node has both element and children"),
            (None, None) => out.push(at, "node needs either element or children"),
            (Some(el), None) => {
                if self.element(el).is_none() {
                    out.push(format!("{at}/element"), format!("unknown element id {el}"));
                }
                if let Some(prev) = used.insert(el.clone(), at.to_owned()) {
                    out.push(format!("{at}/element"), format!("element {el} already used at {prev}"));
                }
                let extras = [
                    ("method", node.method.is_some()),
                    ("groups", node.groups.is_some()),
                    ("critical", node.critical.is_some()),
                    ("then", node.then.is_some()),
                    ("threshold", node.threshold.is_some()),
                    ("priority", node.priority.is_some()),
                ];
                for (field, present) in extras {
                    if present {
                        let hint = if field == "priority" { "; set it on the element" } else { "" };
                        out.push(format!("{at}/{field}"), format!("{field} is not allowed on a leaf{hint}"));
                    }
                }
                if node.id.as_ref().is_some_and(|id| id != el) {
                    out.push(format!("{at}/id"), "leaf id must equal its element id");
                }
            }
            (None, Some(children)) => {
                if node.id.is_none() {
                    out.push(at, "subsystem needs an id");
                }
                if node.method.is_none() {
                    out.push(at, "subsystem needs a method");
                }
                for (k, child) in children.iter().enumerate() {
                    self.check_node_shape(child, &format!("{at}/children/{k}"), used, out);
                }
            }
        }
    }

    fn build_node(&self, node: &NodeSpec, at: &str, pointers: &mut BTreeMap<String, String>) -> HierarchyNode64 {
        if let Some(el) = &node.element {
            let spec = self.element(el).expect("shape checked");
            pointers.entry(el.clone()).or_insert_with(|| at.to_owned());
            let leaf = HierarchyNode64::leaf(el.clone(), spec.evaluation);
            return match spec.priority {
                Some(p) => leaf.with_priority(p),
                None => leaf,
            };
        }
        let id = node.id.clone().expect("shape checked");
        pointers.entry(id.clone()).or_insert_with(|| at.to_owned());
        let children = node
            .children
            .iter()
            .flatten()
            .enumerate()
            .map(|(k, c)| self.build_node(c, &format!("{at}/children/{k}"), pointers))
            .collect();
        let config = MethodConfig64 {
            method: node.method.expect("shape checked"),
            groups: node.groups.as_ref().map(|gs| to_groups(gs)),
            critical: node.critical.clone(),
            fallback: node.then.unwrap_or(FallbackMethod::Wlam),
            adequacy_threshold: node.threshold,
        };
        let sub = HierarchyNode64::subsystem(id, config, children);
        match node.priority {
            Some(p) => sub.with_priority(p),
            None => sub,
        }
    }

    /// The declared hierarchy as library types. Panics on an unvalidated description.
    pub fn hierarchy_tree(&self) -> Option<HierarchyNode64> {
        self.hierarchy.as_ref().map(|root| self.build_node(root, "/hierarchy", &mut BTreeMap::new()))
    }

    /// Elements as leaves under one subsystem named `system`.
    pub fn flat_tree(&self, config: MethodConfig64) -> HierarchyNode64 {
        let leaves = self
            .elements
            .iter()
            .map(|e| {
                let leaf = HierarchyNode64::leaf(e.id.clone(), e.evaluation);
                match e.priority {
                    Some(p) => leaf.with_priority(p),
                    None => leaf,
                }
            })
            .collect();
        HierarchyNode64::subsystem("system", config, leaves)
    }

    pub fn group_list(&self) -> Option<Vec<Group64>> {
        self.groups.as_ref().map(|g| to_groups(g))
    }

    pub fn network_model(&self) -> Option<Network64> {
        self.network.as_ref().map(|n| {
            Network64::new(
                n.nodes.iter().cloned(),
                n.edges.iter().cloned(),
                n.flows.iter().map(|f| Flow64::new(f.route.iter().cloned(), f.volume)).collect(),
            )
        })
    }
}

fn to_groups(specs: &[GroupSpec]) -> Vec<Group64> {
    specs.iter().map(|g| Group64::new(g.id.clone(), g.members.clone(), g.priority)).collect()
}

fn check_groups(groups: &[GroupSpec], universe: &[String], at: &str, what: &str, out: &mut Collector) {
    let known: BTreeSet<&str> = universe.iter().map(String::as_str).collect();
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    let mut group_ids = BTreeSet::new();
    for (i, g) in groups.iter().enumerate() {
        if !group_ids.insert(g.id.as_str()) {
            out.push(format!("{at}/{i}/id"), format!("duplicate group id {}", g.id));
        }
        if !positive(g.priority) {
            out.push(format!("{at}/{i}/priority"), format!("priority must be positive, got {}", g.priority));
        }
        if g.members.is_empty() {
            out.push(format!("{at}/{i}/members"), "group has no members");
        }
        for (j, m) in g.members.iter().enumerate() {
            if !known.contains(m.as_str()) {
                out.push(format!("{at}/{i}/members/{j}"), format!("unknown {what} id {m}"));
            } else if let Some(prev) = owner.insert(m.as_str(), g.id.as_str()) {
                out.push(format!("{at}/{i}/members/{j}"), format!("{m} already belongs to group {prev}"));
            }
        }
    }
    let missing: Vec<&str> = universe.iter().map(String::as_str).filter(|id| !owner.contains_key(id)).collect();
    if !missing.is_empty() && groups.iter().all(|g| !g.members.is_empty()) {
        out.push(at, format!("groups do not cover {what}s {}", missing.join(", ")));
    }
}

fn check_network(spec: &NetworkSpec, out: &mut Collector) {
    let net = Network64::new(
        spec.nodes.iter().cloned(),
        spec.edges.iter().cloned(),
        spec.flows.iter().map(|f| Flow64::new(f.route.iter().cloned(), f.volume)).collect(),
    );
    let edge_index = |from: &str, to: &str| spec.edges.iter().position(|(a, b)| a == from && b == to);
    for v in validate_network(&net) {
        let location = match &v {
            NetworkViolation::DuplicateNode(n) => {
                let i = spec.nodes.iter().rposition(|x| x == n).unwrap_or(0);
                format!("/network/nodes/{i}")
            }
            NetworkViolation::UnknownEdgeEndpoint { from, to, .. } | NetworkViolation::SelfLoop(from @ to) => {
                edge_index(from, to).map_or("/network/edges".to_owned(), |i| format!("/network/edges/{i}"))
            }
            NetworkViolation::DuplicateEdge { from, to } => {
                let i = spec.edges.iter().rposition(|(a, b)| a == from && b == to).unwrap_or(0);
                format!("/network/edges/{i}")
            }
            NetworkViolation::NonPositiveVolume { flow, .. } => format!("/network/flows/{flow}/volume"),
            NetworkViolation::ShortRoute { flow }
            | NetworkViolation::UnknownRouteNode { flow, .. }
            | NetworkViolation::MissingEdge { flow, .. } => format!("/network/flows/{flow}/route"),
        };
        out.push(location, v.to_string());
    }
}
