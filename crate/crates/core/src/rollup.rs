//! Bottom-up aggregation over a hierarchy, method comparison tables and
//! parameter sweeps.
//!
//! Every subsystem aggregates the already aggregated values of its direct
//! children; there is no formula that reaches across levels.

use serde::Serialize;

use crate::aggregate::{nam_values, signed_adequacy, wem_values, wlam_unit_values, wlam_values, FallbackMethod};
use crate::error::RollupError;
use crate::evaluation::{ElementId, Group, Scale};
use crate::hierarchy::{explicit_child_weights, validate_hierarchy, HierarchyNode, Method, MethodConfig, NodeKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationReport<T> {
    pub id: String,
    /// `None` for leaves.
    pub method: Option<Method>,
    pub value: T,
    /// Smallest leaf value in the subtree and the leaves attaining it.
    pub weakest_value: T,
    pub weakest_ids: Vec<ElementId>,
    /// Signed `(value - wem) / value`, where `wem` is over the children (or
    /// over the critical children for `wem-then`). Zero for leaves.
    pub adequacy: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_wem: Option<T>,
    pub warnings: Vec<String>,
    pub children: Vec<AggregationReport<T>>,
}

impl<T> AggregationReport<T> {
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Self::node_count).sum::<usize>()
    }

    pub fn find(&self, id: &str) -> Option<&Self> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }
}

/// Aggregates the whole tree. Fails with every violation if the tree is invalid.
pub fn aggregate<T: Scalar>(root: &HierarchyNode<T>, scale: &Scale<T>) -> Result<AggregationReport<T>, RollupError> {
    let violations = validate_hierarchy(root, scale);
    if !violations.is_empty() {
        return Err(RollupError::Invalid(violations));
    }
    evaluate(root)
}

/// Weights a subsystem applies to its children: expanded group priorities
/// for grouped nodes, explicit child priorities otherwise (`None` if unset).
fn node_weights<T: Scalar>(children: &[HierarchyNode<T>], config: &MethodConfig<T>) -> Option<Vec<T>> {
    match (&config.groups, config.method) {
        (Some(groups), Method::HybridGrouped) => {
            Some(children.iter().map(|c| group_of(groups, &c.id).map_or_else(T::one, |g| g.priority)).collect())
        }
        _ => explicit_child_weights(children),
    }
}

fn group_of<'a, T>(groups: &'a [Group<T>], id: &str) -> Option<&'a Group<T>> {
    groups.iter().find(|g| g.members.iter().any(|m| m == id))
}

fn non_uniform<T: Scalar>(weights: &Option<Vec<T>>) -> bool {
    weights.as_ref().is_some_and(|w| w.windows(2).any(|p| p[0] != p[1]))
}

fn member_values<T: Scalar>(reports: &[AggregationReport<T>], members: &[ElementId]) -> Vec<T> {
    members.iter().map(|m| reports.iter().find(|r| &r.id == m).expect("validated member").value).collect()
}

fn weakest_of<T: Scalar>(reports: &[&AggregationReport<T>]) -> (T, Vec<ElementId>) {
    let value = reports.iter().fold(T::infinity(), |m, r| m.min(r.weakest_value));
    let ids = reports.iter().filter(|r| r.weakest_value == value).flat_map(|r| r.weakest_ids.iter().cloned()).collect();
    (value, ids)
}

fn hybrid_value<T: Scalar>(reports: &[AggregationReport<T>], groups: &[Group<T>]) -> Result<T, RollupError> {
    let mut per_group = Vec::with_capacity(groups.len());
    for g in groups {
        per_group.push(nam_values(&member_values(reports, &g.members))?);
    }
    let priorities: Vec<T> = groups.iter().map(|g| g.priority).collect();
    Ok(wlam_values(&per_group, &priorities)?)
}

fn evaluate<T: Scalar>(node: &HierarchyNode<T>) -> Result<AggregationReport<T>, RollupError> {
    let (children, config) = match &node.kind {
        NodeKind::Leaf { value } => {
            return Ok(AggregationReport {
                id: node.id.clone(),
                method: None,
                value: *value,
                weakest_value: *value,
                weakest_ids: vec![node.id.clone()],
                adequacy: T::zero(),
                critical_wem: None,
                warnings: vec![],
                children: vec![],
            })
        }
        NodeKind::Subsystem { children, config } => (children, config),
    };

    let reports = children.iter().map(evaluate).collect::<Result<Vec<_>, _>>()?;
    let values: Vec<T> = reports.iter().map(|r| r.value).collect();
    let weights = node_weights(children, config).unwrap_or_else(|| vec![T::one(); values.len()]);
    let children_wem = wem_values(&values)?;

    let mut critical_wem = None;
    let value = match config.method {
        Method::Wem => children_wem,
        Method::Wlam => wlam_values(&values, &weights)?,
        Method::Nam => nam_values(&values)?,
        Method::HybridGrouped => hybrid_value(&reports, config.groups.as_deref().expect("validated"))?,
        Method::WemThen => {
            let critical = config.critical.as_deref().expect("validated");
            critical_wem = Some(wem_values(&member_values(&reports, critical))?);
            match config.fallback {
                FallbackMethod::Wlam => wlam_values(&values, &weights)?,
                FallbackMethod::Nam => nam_values(&values)?,
            }
        }
    };
    let adequacy = signed_adequacy(value, critical_wem.unwrap_or(children_wem));
    let (weakest_value, weakest_ids) = weakest_of(&reports.iter().collect::<Vec<_>>());

    let mut warnings = Vec::new();
    if let Some(t) = config.adequacy_threshold {
        if adequacy > t {
            warnings.push(hidden_weak_warning("adequacy", adequacy, t, &weakest_ids));
        }
    }

    Ok(AggregationReport {
        id: node.id.clone(),
        method: Some(config.method),
        value,
        weakest_value,
        weakest_ids,
        adequacy,
        critical_wem,
        warnings,
        children: reports,
    })
}

fn hidden_weak_warning<T: Scalar>(measure: &str, value: T, threshold: T, ids: &[ElementId]) -> String {
    format!("hidden weak element: {measure} {value:.4} exceeds threshold {threshold}; weakest: {}", ids.join(", "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Subsystem,
    Group,
}

/// Side-by-side aggregates for one subsystem (or one group inside it).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow<T> {
    /// Node id, or `node:group` for group rows.
    pub node: String,
    pub kind: RowKind,
    pub wem: T,
    /// Weighted by configured priorities, unit weights if none.
    pub wlam: T,
    /// `None` when the children carry non-uniform weights.
    pub nam: Option<T>,
    /// Only for grouped nodes.
    pub hybrid: Option<T>,
    pub sigma_12: T,
    pub sigma_13: Option<T>,
    pub weakest_ids: Vec<ElementId>,
    pub warnings: Vec<String>,
}

/// One row per subsystem in pre-order, each grouped subsystem followed by
/// one row per group. `threshold` applies where a node sets none itself.
pub fn compare_methods<T: Scalar>(
    root: &HierarchyNode<T>,
    scale: &Scale<T>,
    threshold: T,
) -> Result<Vec<ComparisonRow<T>>, RollupError> {
    let report = aggregate(root, scale)?;
    let mut rows = Vec::new();
    collect_rows(root, &report, threshold, &mut rows)?;
    Ok(rows)
}

fn clamp01<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

fn comparison_row<T: Scalar>(
    node: String,
    kind: RowKind,
    reports: &[&AggregationReport<T>],
    weights: Option<Vec<T>>,
    hybrid: Option<T>,
    threshold: T,
) -> Result<ComparisonRow<T>, RollupError> {
    let values: Vec<T> = reports.iter().map(|r| r.value).collect();
    let wem = wem_values(&values)?;
    let wlam = match &weights {
        Some(w) => wlam_values(&values, w)?,
        None => wlam_unit_values(&values)?,
    };
    let nam = if non_uniform(&weights) { None } else { Some(nam_values(&values)?) };
    let sigma_12 = clamp01(signed_adequacy(wlam, wem));
    let sigma_13 = nam.map(|n| clamp01(signed_adequacy(n, wem)));
    let (_, weakest_ids) = weakest_of(reports);
    let mut warnings = Vec::new();
    if sigma_12 > threshold {
        warnings.push(hidden_weak_warning("sigma_12", sigma_12, threshold, &weakest_ids));
    }
    Ok(ComparisonRow { node, kind, wem, wlam, nam, hybrid, sigma_12, sigma_13, weakest_ids, warnings })
}

fn collect_rows<T: Scalar>(
    node: &HierarchyNode<T>,
    report: &AggregationReport<T>,
    threshold: T,
    rows: &mut Vec<ComparisonRow<T>>,
) -> Result<(), RollupError> {
    let NodeKind::Subsystem { children, config } = &node.kind else {
        return Ok(());
    };
    let threshold = config.adequacy_threshold.unwrap_or(threshold);
    let child_reports: Vec<&AggregationReport<T>> = report.children.iter().collect();
    let groups = match (&config.groups, config.method) {
        (Some(g), Method::HybridGrouped) => Some(g),
        _ => None,
    };
    let hybrid = groups.map(|g| hybrid_value(&report.children, g)).transpose()?;
    rows.push(comparison_row(
        node.id.clone(),
        RowKind::Subsystem,
        &child_reports,
        node_weights(children, config),
        hybrid,
        threshold,
    )?);
    for g in groups.into_iter().flatten() {
        let members: Vec<&AggregationReport<T>> =
            g.members.iter().map(|m| report.children.iter().find(|r| &r.id == m).expect("validated member")).collect();
        rows.push(comparison_row(format!("{}:{}", node.id, g.id), RowKind::Group, &members, None, None, threshold)?);
    }
    for (child, child_report) in children.iter().zip(&report.children) {
        collect_rows(child, child_report, threshold, rows)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub varied: T,
    pub wem: T,
    pub wlam: T,
    pub nam: Option<T>,
    pub hybrid: Option<T>,
}

/// Re-evaluates the root while one leaf moves over a uniform grid from
/// `from` to `to` (both included).
pub fn sweep<T: Scalar>(
    root: &HierarchyNode<T>,
    scale: &Scale<T>,
    vary_id: &str,
    from: T,
    to: T,
    steps: usize,
) -> Result<Vec<SweepRow<T>>, RollupError> {
    if !root.find(vary_id).is_some_and(HierarchyNode::is_leaf) {
        return Err(RollupError::UnknownLeaf(vary_id.to_owned()));
    }
    if steps < 2 {
        return Err(RollupError::TooFewSteps(steps));
    }
    if !(scale.contains(from) && scale.contains(to)) {
        return Err(RollupError::RangeOutsideScale {
            from: from.to_string(),
            to: to.to_string(),
            min: scale.min().to_string(),
            max: scale.max().to_string(),
        });
    }
    let last = steps - 1;
    let mut tree = root.clone();
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let varied = if i == last { to } else { from + (to - from) * T::from_count(i) / T::from_count(last) };
        if let Some(HierarchyNode { kind: NodeKind::Leaf { value }, .. }) = tree.find_mut(vary_id) {
            *value = varied;
        }
        let row = if tree.is_leaf() {
            SweepRow { varied, wem: varied, wlam: varied, nam: Some(varied), hybrid: None }
        } else {
            let top = compare_methods(&tree, scale, T::one())?.swap_remove(0);
            SweepRow { varied, wem: top.wem, wlam: top.wlam, nam: top.nam, hybrid: top.hybrid }
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::MethodConfig;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn flat(method: Method, values: &[f64]) -> HierarchyNode<f64> {
        HierarchyNode::subsystem(
            "system",
            MethodConfig::new(method),
            values.iter().enumerate().map(|(i, &v)| HierarchyNode::leaf(format!("s{}", i + 1), v)).collect(),
        )
    }

    fn fig3(x: f64) -> HierarchyNode<f64> {
        HierarchyNode::subsystem(
            "system",
            MethodConfig::hybrid(vec![
                Group::new("g1", ids(&["s1", "s2", "s3"]), 1.0),
                Group::new("g2", ids(&["s4", "s5"]), 0.5),
            ]),
            [x, 100.0, 100.0, 50.0, 50.0]
                .iter()
                .enumerate()
                .map(|(i, &v)| HierarchyNode::leaf(format!("s{}", i + 1), v))
                .collect(),
        )
    }

    #[test]
    fn single_leaf_echoes_value() {
        let r = aggregate(&HierarchyNode::leaf("s1", 42.0), &Scale::percent()).unwrap();
        assert_eq!(r.value, 42.0);
        assert!(r.warnings.is_empty() && r.method.is_none());
        assert_eq!(r.weakest_ids, vec!["s1"]);
    }

    #[test]
    fn nam_node_reports_weakest() {
        let r = aggregate(&flat(Method::Nam, &[10.0, 100.0, 100.0]), &Scale::percent()).unwrap();
        assert!((r.value - 20.408163265306122).abs() < 1e-12);
        assert_eq!(r.weakest_ids, vec!["s1"]);
        assert_eq!(r.node_count(), 4);
        assert!((r.adequacy - 0.51).abs() < 1e-12);
    }

    #[test]
    fn hybrid_node_matches_formula() {
        let r = aggregate(&fig3(100.0), &Scale::percent()).unwrap();
        assert!((r.value - 125.0 / 1.5).abs() < 1e-12);
        assert_eq!(r.weakest_ids, vec!["s4", "s5"]);
    }

    #[test]
    fn invalid_tree_lists_violations() {
        let err = aggregate(&flat(Method::Wem, &[10.0, 120.0]), &Scale::percent()).unwrap_err();
        assert!(matches!(err, RollupError::Invalid(v) if v.len() == 1));
    }

    #[test]
    fn wem_then_uses_critical_children() {
        let mut root = flat(Method::WemThen, &[50.0, 50.0, 100.0]);
        if let NodeKind::Subsystem { config, .. } = &mut root.kind {
            config.critical = Some(ids(&["s3"]));
        }
        let r = aggregate(&root, &Scale::percent()).unwrap();
        assert_eq!(r.critical_wem, Some(100.0));
        assert!((r.value - 200.0 / 3.0).abs() < 1e-12);
        assert!((r.adequacy + 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_on_node_emits_warning() {
        let mut root = flat(Method::Wlam, &[10.0, 100.0, 100.0]);
        if let NodeKind::Subsystem { config, .. } = &mut root.kind {
            config.adequacy_threshold = Some(0.5);
        }
        let r = aggregate(&root, &Scale::percent()).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("s1"));
    }

    #[test]
    fn nested_levels_use_children_aggregates() {
        let root = HierarchyNode::subsystem(
            "top",
            MethodConfig::new(Method::Wem),
            vec![
                HierarchyNode::subsystem(
                    "a",
                    MethodConfig::new(Method::Wlam),
                    vec![HierarchyNode::leaf("a1", 20.0), HierarchyNode::leaf("a2", 80.0)],
                ),
                HierarchyNode::subsystem(
                    "b",
                    MethodConfig::new(Method::Nam),
                    vec![HierarchyNode::leaf("b1", 60.0), HierarchyNode::leaf("b2", 60.0)],
                ),
            ],
        );
        let r = aggregate(&root, &Scale::percent()).unwrap();
        assert_eq!(r.value, 50.0);
        assert_eq!(r.weakest_value, 20.0);
        assert_eq!(r.weakest_ids, vec!["a1"]);
        assert_eq!(r.find("b").unwrap().value, 60.0);
    }

    #[test]
    fn compare_flags_hidden_weak_element() {
        let rows = compare_methods(&flat(Method::Nam, &[10.0, 100.0, 100.0]), &Scale::percent(), 0.5).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!((r.sigma_12 - 6.0 / 7.0).abs() < 1e-12);
        assert!((r.sigma_13.unwrap() - 0.51).abs() < 1e-12);
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("s1"));
    }

    #[test]
    fn compare_equal_children_has_no_warnings() {
        let rows = compare_methods(&flat(Method::Wlam, &[30.0; 4]), &Scale::percent(), 0.0).unwrap();
        assert_eq!((rows[0].sigma_12, rows[0].sigma_13), (0.0, Some(0.0)));
        assert!(rows[0].warnings.is_empty());
    }

    #[test]
    fn compare_grouped_node_has_group_rows() {
        let rows = compare_methods(&fig3(100.0), &Scale::percent(), 0.5).unwrap();
        let names: Vec<_> = rows.iter().map(|r| r.node.as_str()).collect();
        assert_eq!(names, vec!["system", "system:g1", "system:g2"]);
        assert_eq!(rows[0].wlam, 87.5);
        assert_eq!(rows[0].nam, None);
        assert_eq!(rows[0].wem, 50.0);
        assert!((rows[0].hybrid.unwrap() - 125.0 / 1.5).abs() < 1e-12);
        assert_eq!(rows[2].nam, Some(50.0));
    }

    #[test]
    fn sweep_production_family() {
        let rows = sweep(&flat(Method::Nam, &[0.0, 100.0, 100.0]), &Scale::percent(), "s1", 0.0, 100.0, 101).unwrap();
        assert_eq!(rows.len(), 101);
        let r = rows[10];
        assert_eq!((r.varied, r.wem, r.wlam), (10.0, 10.0, 70.0));
        assert!((r.nam.unwrap() - 20.408163265306122).abs() < 1e-12);
        assert_eq!(rows[100].varied, 100.0);
    }

    #[test]
    fn sweep_hybrid_endpoints() {
        let rows = sweep(&fig3(0.0), &Scale::percent(), "s1", 0.0, 100.0, 2).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].hybrid.unwrap() - 25.0 / 1.5).abs() < 1e-12);
        assert!((rows[1].hybrid.unwrap() - 125.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_degenerate_range_repeats() {
        let rows = sweep(&fig3(0.0), &Scale::percent(), "s1", 40.0, 40.0, 5).unwrap();
        assert!(rows.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn sweep_errors() {
        let root = fig3(0.0);
        let s = Scale::percent();
        assert_eq!(sweep(&root, &s, "nope", 0.0, 1.0, 3), Err(RollupError::UnknownLeaf("nope".into())));
        assert_eq!(sweep(&root, &s, "system", 0.0, 1.0, 3), Err(RollupError::UnknownLeaf("system".into())));
        assert_eq!(sweep(&root, &s, "s1", 0.0, 1.0, 1), Err(RollupError::TooFewSteps(1)));
        assert!(matches!(sweep(&root, &s, "s1", 0.0, 101.0, 3), Err(RollupError::RangeOutsideScale { .. })));
    }
}
