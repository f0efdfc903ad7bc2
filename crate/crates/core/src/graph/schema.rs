use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AttrKind, AttrValue, Attrs, ElementRef, PropertyGraph, SchemaError};

/// Labels, edge types and attribute keys of the practice dataset.
pub mod vocab {
    pub const PRACTICE: &str = "Practice";
    pub const ON_DEVICE: &str = "OnDevice";
    pub const HYBRID: &str = "Hybrid";
    pub const DOMAIN: &str = "Domain";
    pub const FUNCTION: &str = "Function";
    pub const MAINTENANCE: &str = "Maintenance";
    pub const PERFORMANCE_EFFICIENCY: &str = "PerformanceEfficiency";
    pub const WEIGHT: &str = "WEIGHT";

    pub const NAME: &str = "name";
    pub const COUPLING: &str = "coupling";
    pub const API_CLIENT: &str = "apiClient";
    pub const CHANNEL: &str = "channel";
    pub const VALUE: &str = "value";

    pub const TIGHT: &str = "tight";
    pub const LOOSE: &str = "loose";

    pub const HOST_AGENTS: &str = "Capacity To Host agents";

    pub const LOCATION_LABELS: [&str; 2] = [ON_DEVICE, HYBRID];
    pub const CHARACTERISTIC_LABELS: [&str; 4] = [DOMAIN, FUNCTION, MAINTENANCE, PERFORMANCE_EFFICIENCY];
    /// Characteristic families the user weights by percentage.
    pub const CRITERIA_LABELS: [&str; 2] = [MAINTENANCE, PERFORMANCE_EFFICIENCY];

    pub const WEIGHT_MIN: f64 = 0.0;
    pub const WEIGHT_MAX: f64 = 5.0;
}

/// Constraint on a single attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttrRule {
    pub kind: AttrKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// Allowed values for text attributes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_of: Option<Vec<String>>,
}

impl AttrRule {
    pub fn of(kind: AttrKind) -> Self {
        Self {
            kind,
            min: None,
            max: None,
            one_of: None,
        }
    }

    pub fn ranged(kind: AttrKind, min: f64, max: f64) -> Self {
        Self {
            min: Some(min),
            max: Some(max),
            ..Self::of(kind)
        }
    }

    pub fn text_one_of<I: IntoIterator<Item = S>, S: Into<String>>(values: I) -> Self {
        Self {
            one_of: Some(values.into_iter().map(Into::into).collect()),
            ..Self::of(AttrKind::Text)
        }
    }

    /// Returns the failing rule name and a message, if `value` breaks this rule.
    fn check(&self, key: &str, value: Option<&AttrValue>) -> Option<(&'static str, String)> {
        let Some(value) = value else {
            return Some(("required-attr", format!("missing required attribute `{key}`")));
        };
        if value.kind() != self.kind {
            return Some((
                "attr-kind",
                format!("attribute `{key}` must be {}, found {}", self.kind, value.kind()),
            ));
        }
        if let Some(n) = value.as_f64() {
            let below = self.min.is_some_and(|min| n < min);
            let above = self.max.is_some_and(|max| n > max);
            if below || above {
                let bound = |b: Option<f64>| b.map_or_else(|| "..".to_string(), |v| v.to_string());
                return Some((
                    "attr-range",
                    format!(
                        "attribute `{key}` = {value} outside [{}, {}]",
                        bound(self.min),
                        bound(self.max)
                    ),
                ));
            }
        }
        if let (Some(allowed), Some(s)) = (&self.one_of, value.as_str()) {
            if !allowed.iter().any(|a| a == s) {
                return Some((
                    "attr-value",
                    format!("attribute `{key}` = {value} not one of {allowed:?}"),
                ));
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeTypeRule {
    pub src_label: String,
    pub edge_label: String,
    pub dst_label: String,
    #[serde(default)]
    pub required_attrs: BTreeMap<String, AttrRule>,
}

/// Nodes carrying `label` must carry exactly one label out of `one_of`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelGroupRule {
    pub label: String,
    pub one_of: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawSchema {
    node_labels: BTreeSet<String>,
    #[serde(default)]
    edge_rules: Vec<EdgeTypeRule>,
    #[serde(default)]
    node_attr_rules: BTreeMap<String, BTreeMap<String, AttrRule>>,
    #[serde(default)]
    label_groups: Vec<LabelGroupRule>,
}

/// Declared labels, edge types and attribute constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct GraphSchema {
    raw: RawSchema,
}

impl TryFrom<RawSchema> for GraphSchema {
    type Error = SchemaError;

    fn try_from(raw: RawSchema) -> Result<Self, Self::Error> {
        GraphSchema::new(raw.node_labels, raw.edge_rules, raw.node_attr_rules, raw.label_groups)
    }
}

impl From<GraphSchema> for RawSchema {
    fn from(schema: GraphSchema) -> Self {
        schema.raw
    }
}

fn check_rule_bounds(context: &str, rules: &BTreeMap<String, AttrRule>) -> Result<(), SchemaError> {
    for (key, rule) in rules {
        if let (Some(min), Some(max)) = (rule.min, rule.max) {
            if min.partial_cmp(&max).is_none_or(|o| o.is_gt()) {
                return Err(SchemaError::InvertedRange {
                    context: format!("{context}.{key}"),
                });
            }
        }
    }
    Ok(())
}

impl GraphSchema {
    pub fn new(
        node_labels: BTreeSet<String>,
        edge_rules: Vec<EdgeTypeRule>,
        node_attr_rules: BTreeMap<String, BTreeMap<String, AttrRule>>,
        label_groups: Vec<LabelGroupRule>,
    ) -> Result<Self, SchemaError> {
        let declared = |label: &str| -> Result<(), SchemaError> {
            if node_labels.contains(label) {
                Ok(())
            } else {
                Err(SchemaError::UndeclaredLabel {
                    label: label.to_string(),
                })
            }
        };
        for rule in &edge_rules {
            declared(&rule.src_label)?;
            declared(&rule.dst_label)?;
            check_rule_bounds(&rule.edge_label, &rule.required_attrs)?;
        }
        for (label, rules) in &node_attr_rules {
            declared(label)?;
            check_rule_bounds(label, rules)?;
        }
        for group in &label_groups {
            declared(&group.label)?;
            for l in &group.one_of {
                declared(l)?;
            }
        }
        Ok(Self {
            raw: RawSchema {
                node_labels,
                edge_rules,
                node_attr_rules,
                label_groups,
            },
        })
    }

    /// A schema with no labels and no rules.
    pub fn empty() -> Self {
        Self {
            raw: RawSchema {
                node_labels: BTreeSet::new(),
                edge_rules: Vec::new(),
                node_attr_rules: BTreeMap::new(),
                label_groups: Vec::new(),
            },
        }
    }

    pub fn node_labels(&self) -> &BTreeSet<String> {
        &self.raw.node_labels
    }

    pub fn edge_rules(&self) -> &[EdgeTypeRule] {
        &self.raw.edge_rules
    }

    pub fn node_attr_rules(&self) -> &BTreeMap<String, BTreeMap<String, AttrRule>> {
        &self.raw.node_attr_rules
    }

    pub fn label_groups(&self) -> &[LabelGroupRule] {
        &self.raw.label_groups
    }

    /// The practice dataset schema: practices located on-device or hybrid,
    /// weighted by `WEIGHT` edges into the four characteristic families.
    pub fn practice_default() -> Self {
        use vocab::*;
        let node_labels: BTreeSet<String> = [PRACTICE]
            .into_iter()
            .chain(LOCATION_LABELS)
            .chain(CHARACTERISTIC_LABELS)
            .map(String::from)
            .collect();

        let weight_rule = || {
            BTreeMap::from([(
                VALUE.to_string(),
                AttrRule::ranged(AttrKind::Float, WEIGHT_MIN, WEIGHT_MAX),
            )])
        };
        let edge_rules = CHARACTERISTIC_LABELS
            .iter()
            .map(|dst| EdgeTypeRule {
                src_label: PRACTICE.into(),
                edge_label: WEIGHT.into(),
                dst_label: (*dst).into(),
                required_attrs: weight_rule(),
            })
            .collect();

        let text = || AttrRule::of(AttrKind::Text);
        let mut node_attr_rules = BTreeMap::new();
        node_attr_rules.insert(
            PRACTICE.to_string(),
            BTreeMap::from([
                (NAME.to_string(), text()),
                (COUPLING.to_string(), AttrRule::text_one_of([TIGHT, LOOSE])),
                (API_CLIENT.to_string(), text()),
                (CHANNEL.to_string(), text()),
            ]),
        );
        for label in CHARACTERISTIC_LABELS {
            node_attr_rules.insert(label.to_string(), BTreeMap::from([(NAME.to_string(), text())]));
        }

        let label_groups = vec![LabelGroupRule {
            label: PRACTICE.into(),
            one_of: LOCATION_LABELS.iter().map(|s| s.to_string()).collect(),
        }];

        Self::new(node_labels, edge_rules, node_attr_rules, label_groups).expect("default schema is well-formed")
    }
}

/// A broken schema rule, reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element: ElementRef,
    pub rule: String,
    pub message: String,
}

/// Checks every element against `schema`. Violations are ordered by element id.
pub fn validate(graph: &PropertyGraph, schema: &GraphSchema) -> Vec<Violation> {
    let mut elements: Vec<ElementRef> = graph
        .nodes()
        .map(|n| ElementRef::Node(n.id))
        .chain(graph.edges().map(|e| ElementRef::Edge(e.id)))
        .collect();
    elements.sort_by_key(ElementRef::raw_id);
    elements
        .into_iter()
        .flat_map(|el| validate_element(graph, schema, el))
        .collect()
}

/// Checks a single element. Unknown elements yield no violations.
pub fn validate_element(graph: &PropertyGraph, schema: &GraphSchema, element: ElementRef) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule: &str, message: String| {
        out.push(Violation {
            element,
            rule: rule.to_string(),
            message,
        })
    };
    match element {
        ElementRef::Node(id) => {
            let Some(node) = graph.node(id) else {
                return Vec::new();
            };
            for label in &node.labels {
                if !schema.node_labels().contains(label) {
                    push("node-label", format!("label `{label}` is not declared"));
                }
            }
            for label in &node.labels {
                if let Some(rules) = schema.node_attr_rules().get(label) {
                    for (rule, message) in check_attrs(rules, &node.attrs) {
                        push(rule, format!("{label}: {message}"));
                    }
                }
            }
            for group in schema.label_groups() {
                if node.has_label(&group.label) {
                    let count = group.one_of.iter().filter(|l| node.has_label(l)).count();
                    if count != 1 {
                        push(
                            "label-group",
                            format!(
                                "{} node must carry exactly one of {:?}, found {count}",
                                group.label, group.one_of
                            ),
                        );
                    }
                }
            }
        }
        ElementRef::Edge(id) => {
            let Some(edge) = graph.edge(id) else {
                return Vec::new();
            };
            let (Some(src), Some(dst)) = (graph.node(edge.src), graph.node(edge.dst)) else {
                push("edge-type", "edge endpoint missing".into());
                return out;
            };
            let candidates: Vec<&EdgeTypeRule> = schema
                .edge_rules()
                .iter()
                .filter(|r| r.edge_label == edge.label && src.has_label(&r.src_label) && dst.has_label(&r.dst_label))
                .collect();
            if candidates.is_empty() {
                push(
                    "edge-type",
                    format!("no rule allows {:?} -[{}]-> {:?}", src.labels, edge.label, dst.labels),
                );
                return out;
            }
            let failures: Vec<Vec<(&'static str, String)>> = candidates
                .iter()
                .map(|r| check_attrs(&r.required_attrs, &edge.attrs))
                .collect();
            if failures.iter().all(|f| !f.is_empty()) {
                for (rule, message) in failures.into_iter().next().unwrap_or_default() {
                    push(rule, format!("{}: {message}", edge.label));
                }
            }
        }
    }
    out
}

fn check_attrs(rules: &BTreeMap<String, AttrRule>, attrs: &Attrs) -> Vec<(&'static str, String)> {
    rules
        .iter()
        .filter_map(|(key, rule)| rule.check(key, attrs.get(key)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::attrs;

    fn practice_graph() -> (PropertyGraph, crate::graph::NodeId, crate::graph::NodeId) {
        let mut g = PropertyGraph::new();
        let p = g
            .add_node(
                ["Practice", "Hybrid"],
                attrs([
                    ("name", "HL:1"),
                    ("coupling", "loose"),
                    ("apiClient", "Apache Milo"),
                    ("channel", "OPC-UA"),
                ]),
            )
            .unwrap();
        let d = g.add_node(["Domain"], attrs([("name", "Factory Automation")])).unwrap();
        (g, p, d)
    }

    fn weight(v: AttrValue) -> Attrs {
        Attrs::from([("value".to_string(), v)])
    }

    #[test]
    fn conforming_graph_has_no_violations() {
        let (mut g, p, d) = practice_graph();
        g.add_edge(p, d, "WEIGHT", weight(AttrValue::Float(3.0))).unwrap();
        assert!(validate(&g, &GraphSchema::practice_default()).is_empty());
        assert!(validate(&PropertyGraph::new(), &GraphSchema::practice_default()).is_empty());
    }

    #[test]
    fn out_of_range_weight_is_one_violation() {
        let (mut g, p, d) = practice_graph();
        let e = g.add_edge(p, d, "WEIGHT", weight(AttrValue::Float(7.0))).unwrap();
        let v = validate(&g, &GraphSchema::practice_default());
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].element, ElementRef::Edge(e));
        assert_eq!(v[0].rule, "attr-range");
    }

    #[test]
    fn kind_and_shape_violations() {
        let (mut g, p, d) = practice_graph();
        let e1 = g.add_edge(p, d, "WEIGHT", weight(AttrValue::Int(3))).unwrap();
        let e2 = g.add_edge(d, p, "WEIGHT", weight(AttrValue::Float(3.0))).unwrap();
        let e3 = g.add_edge(p, d, "WEIGHT", Attrs::new()).unwrap();
        let n = g
            .add_node(["Practice", "OnDevice", "Hybrid", "Alien"], Attrs::new())
            .unwrap();
        let v = validate(&g, &GraphSchema::practice_default());
        let summary: Vec<(u64, &str)> = v.iter().map(|v| (v.element.raw_id(), v.rule.as_str())).collect();
        assert_eq!(
            summary,
            vec![
                (e1.0, "attr-kind"),
                (e2.0, "edge-type"),
                (e3.0, "required-attr"),
                (n.0, "node-label"),
                (n.0, "required-attr"),
                (n.0, "required-attr"),
                (n.0, "required-attr"),
                (n.0, "required-attr"),
                (n.0, "label-group"),
            ]
        );
    }

    #[test]
    fn coupling_values_are_restricted() {
        let (mut g, p, _) = practice_graph();
        g.update_attrs(ElementRef::Node(p), attrs([("coupling", "medium")]))
            .unwrap();
        let v = validate(&g, &GraphSchema::practice_default());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "attr-value");
    }

    #[test]
    fn schema_rejects_undeclared_labels_and_inverted_ranges() {
        let err = GraphSchema::new(
            BTreeSet::from(["A".to_string()]),
            vec![EdgeTypeRule {
                src_label: "A".into(),
                edge_label: "E".into(),
                dst_label: "B".into(),
                required_attrs: BTreeMap::new(),
            }],
            BTreeMap::new(),
            Vec::new(),
        )
        .unwrap_err();
        assert_eq!(err, SchemaError::UndeclaredLabel { label: "B".into() });

        let err = GraphSchema::new(
            BTreeSet::from(["A".to_string()]),
            vec![EdgeTypeRule {
                src_label: "A".into(),
                edge_label: "E".into(),
                dst_label: "A".into(),
                required_attrs: BTreeMap::from([("w".to_string(), AttrRule::ranged(AttrKind::Float, 5.0, 1.0))]),
            }],
            BTreeMap::new(),
            Vec::new(),
        )
        .unwrap_err();
        assert!(matches!(err, SchemaError::InvertedRange { .. }));
    }

    #[test]
    fn schema_json_round_trips() {
        let s = GraphSchema::practice_default();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"max\":5.0"), "{json}");
        let back: GraphSchema = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
