use std::cmp::Ordering;
use std::collections::BTreeSet;

use iaselect_core::graph::{AttrKind, AttrRule, AttrValue, Attrs, GraphSchema, PropertyGraph};
use iaselect_core::query::{CompOp, Literal, Operand, PatternQuery, Projection};

/// Typed comparison written out case by case. Assumes integers small
/// enough to convert to f64 exactly.
pub fn compare(a: &AttrValue, b: &AttrValue) -> Option<Ordering> {
    use AttrValue::*;
    match (a, b) {
        (Text(x), Text(y)) => Some(x.cmp(y)),
        (Bool(x), Bool(y)) => Some(x.cmp(y)),
        (Int(x), Int(y)) => Some(x.cmp(y)),
        (Int(x), Float(y)) => (*x as f64).partial_cmp(y),
        (Float(x), Int(y)) => x.partial_cmp(&(*y as f64)),
        (Float(x), Float(y)) => x.partial_cmp(y),
        _ => None,
    }
}

fn op_holds(op: CompOp, ord: Ordering) -> bool {
    match op {
        CompOp::Eq => ord.is_eq(),
        CompOp::Ne => ord.is_ne(),
        CompOp::Lt => ord.is_lt(),
        CompOp::Le => ord.is_le(),
        CompOp::Gt => ord.is_gt(),
        CompOp::Ge => ord.is_ge(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Bound {
    Node(usize),
    Edge(usize),
}

/// Enumerates every assignment of graph nodes to node-pattern positions and
/// graph edges to edge-pattern positions, keeps the ones satisfying every
/// matching condition, and projects them. Returns projected id tuples.
pub fn brute_force_rows(query: &PatternQuery, graph: &PropertyGraph) -> BTreeSet<Vec<u64>> {
    // Flatten positions.
    let mut node_pos: Vec<(Option<&str>, Option<&str>)> = Vec::new();
    let mut edge_pos: Vec<(Option<&str>, Option<&str>, usize, usize)> = Vec::new();
    for path in &query.paths {
        node_pos.push((path.start.var.as_deref(), path.start.label.as_deref()));
        for (e, n) in &path.steps {
            let src = node_pos.len() - 1;
            node_pos.push((n.var.as_deref(), n.label.as_deref()));
            edge_pos.push((e.var.as_deref(), e.label.as_deref(), src, node_pos.len() - 1));
        }
    }
    // First position of every named variable, in declaration order.
    let mut occurrences: Vec<(Option<&str>, Bound)> = Vec::new();
    let mut np = 0;
    let mut ep = 0;
    for path in &query.paths {
        occurrences.push((path.start.var.as_deref(), Bound::Node(np)));
        np += 1;
        for (e, n) in &path.steps {
            occurrences.push((e.var.as_deref(), Bound::Edge(ep)));
            ep += 1;
            occurrences.push((n.var.as_deref(), Bound::Node(np)));
            np += 1;
        }
    }
    let mut vars: Vec<(&str, Bound)> = Vec::new();
    for (name, b) in occurrences {
        if let Some(n) = name {
            if !vars.iter().any(|(v, _)| *v == n) {
                vars.push((n, b));
            }
        }
    }
    let columns: Vec<Bound> = match &query.returns {
        Projection::All => vars.iter().map(|(_, b)| *b).collect(),
        Projection::Vars(names) => names
            .iter()
            .map(|n| vars.iter().find(|(v, _)| v == n).expect("declared").1)
            .collect(),
    };

    let nodes: Vec<_> = graph.nodes().collect();
    let edges: Vec<_> = graph.edges().collect();
    let mut rows = BTreeSet::new();
    let mut ni = vec![0usize; node_pos.len()];
    if nodes.is_empty() {
        return rows;
    }
    loop {
        let node_ok = node_pos
            .iter()
            .enumerate()
            .all(|(i, (_, label))| label.is_none_or(|l| nodes[ni[i]].labels.contains(l)))
            && (0..node_pos.len()).all(|i| {
                (0..node_pos.len()).all(|j| node_pos[i].0.is_none() || node_pos[i].0 != node_pos[j].0 || ni[i] == ni[j])
            });
        if node_ok && (edge_pos.is_empty() || !edges.is_empty()) {
            let mut ei = vec![0usize; edge_pos.len()];
            loop {
                let edge_ok = edge_pos.iter().enumerate().all(|(k, (_, label, s, d))| {
                    let e = edges[ei[k]];
                    label.is_none_or(|l| e.label == l) && e.src == nodes[ni[*s]].id && e.dst == nodes[ni[*d]].id
                });
                // Same name, same edge; different name or anonymous, different edge.
                let distinct_ok = (0..edge_pos.len()).all(|a| {
                    (0..edge_pos.len()).all(|b| {
                        if a == b {
                            return true;
                        }
                        let same_var = edge_pos[a].0.is_some() && edge_pos[a].0 == edge_pos[b].0;
                        (ei[a] == ei[b]) == same_var
                    })
                });
                if edge_ok && distinct_ok {
                    let attrs_of = |b: Bound| -> &Attrs {
                        match b {
                            Bound::Node(i) => &nodes[ni[i]].attrs,
                            Bound::Edge(k) => &edges[ei[k]].attrs,
                        }
                    };
                    let value = |op: &Operand| -> Option<AttrValue> {
                        match op {
                            Operand::Literal(Literal::Str(s)) => Some(AttrValue::Text(s.clone())),
                            Operand::Literal(Literal::Num(n)) => Some(AttrValue::Float(*n)),
                            Operand::Literal(Literal::Bool(b)) => Some(AttrValue::Bool(*b)),
                            Operand::Property { var, key } => {
                                let b = vars.iter().find(|(v, _)| v == var).expect("declared").1;
                                attrs_of(b).get(key).cloned()
                            }
                        }
                    };
                    let filters_ok = query.filters.iter().all(|c| match (value(&c.lhs), value(&c.rhs)) {
                        (Some(l), Some(r)) => compare(&l, &r).is_some_and(|o| op_holds(c.op, o)),
                        _ => false,
                    });
                    if filters_ok {
                        rows.insert(
                            columns
                                .iter()
                                .map(|b| match *b {
                                    Bound::Node(i) => nodes[ni[i]].id.0,
                                    Bound::Edge(k) => edges[ei[k]].id.0,
                                })
                                .collect(),
                        );
                    }
                }
                if !odometer(&mut ei, edges.len()) {
                    break;
                }
            }
        }
        if !odometer(&mut ni, nodes.len()) {
            break;
        }
    }
    rows
}

/// Advances a little-endian counter in base `base`; false on wrap-around.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn rule_failure(rule: &AttrRule, value: Option<&AttrValue>) -> Option<&'static str> {
    let v = value?;
    let kind = match v {
        AttrValue::Text(_) => AttrKind::Text,
        AttrValue::Float(_) => AttrKind::Float,
        AttrValue::Int(_) => AttrKind::Int,
        AttrValue::Bool(_) => AttrKind::Bool,
    };
    if kind != rule.kind {
        return Some("attr-kind");
    }
    let num = match v {
        AttrValue::Float(f) => Some(*f),
        AttrValue::Int(i) => Some(*i as f64),
        _ => None,
    };
    if let Some(n) = num {
        if rule.min.is_some_and(|m| n < m) || rule.max.is_some_and(|m| n > m) {
            return Some("attr-range");
        }
    }
    if let (Some(allowed), AttrValue::Text(s)) = (&rule.one_of, v) {
        if !allowed.contains(s) {
            return Some("attr-value");
        }
    }
    None
}

fn attr_failures<'a>(rules: impl IntoIterator<Item = (&'a String, &'a AttrRule)>, attrs: &Attrs) -> Vec<&'static str> {
    rules
        .into_iter()
        .filter_map(|(key, rule)| match attrs.get(key) {
            None => Some("required-attr"),
            some => rule_failure(rule, some),
        })
        .collect()
}

/// Re-checks every element against every rule; returns sorted
/// `(element id, rule name)` pairs.
pub fn brute_force_violations(graph: &PropertyGraph, schema: &GraphSchema) -> Vec<(u64, String)> {
    let mut out: Vec<(u64, String)> = Vec::new();
    for node in graph.nodes() {
        for label in &node.labels {
            if !schema.node_labels().contains(label) {
                out.push((node.id.0, "node-label".into()));
            }
            if let Some(rules) = schema.node_attr_rules().get(label) {
                for r in attr_failures(rules, &node.attrs) {
                    out.push((node.id.0, r.into()));
                }
            }
        }
        for group in schema.label_groups() {
            if node.labels.contains(&group.label) && node.labels.intersection(&group.one_of).count() != 1 {
                out.push((node.id.0, "label-group".into()));
            }
        }
    }
    for edge in graph.edges() {
        let src = graph.node(edge.src).unwrap();
        let dst = graph.node(edge.dst).unwrap();
        let applicable: Vec<_> = schema
            .edge_rules()
            .iter()
            .filter(|r| {
                r.edge_label == edge.label && src.labels.contains(&r.src_label) && dst.labels.contains(&r.dst_label)
            })
            .collect();
        if applicable.is_empty() {
            out.push((edge.id.0, "edge-type".into()));
            continue;
        }
        let per_rule: Vec<Vec<&str>> = applicable
            .iter()
            .map(|r| attr_failures(&r.required_attrs, &edge.attrs))
            .collect();
        if per_rule.iter().all(|f| !f.is_empty()) {
            for r in &per_rule[0] {
                out.push((edge.id.0, r.to_string()));
            }
        }
    }
    out.sort();
    out
}

/// Final score per practice name, from a full edge scan.
pub fn scores(
    graph: &PropertyGraph,
    domain: &str,
    function: &str,
    criteria: &[(&str, i64)],
    require_host_agents: bool,
) -> Vec<(String, f64)> {
    let w = |practice: u64, name: &str, labels: &[&str]| -> f64 {
        let mut total = 0.0;
        let mut n = 0.0;
        for e in graph.edges() {
            if e.src.0 != practice || e.label != "WEIGHT" {
                continue;
            }
            let dst = graph.node(e.dst).unwrap();
            let named = dst.attrs.get("name") == Some(&AttrValue::Text(name.to_string()));
            if named && labels.iter().any(|l| dst.labels.contains(*l)) {
                if let Some(AttrValue::Float(v)) = e.attrs.get("value") {
                    total += v;
                    n += 1.0;
                }
            }
        }
        if n == 0.0 {
            0.0
        } else {
            total / n
        }
    };
    let criteria_labels = ["Maintenance", "PerformanceEfficiency"];
    let mut out = Vec::new();
    for p in graph.nodes().filter(|n| n.labels.contains("Practice")) {
        if require_host_agents && w(p.id.0, "Capacity To Host agents", &["Maintenance"]) <= 0.0 {
            continue;
        }
        let mut cumulative = 0.0;
        for (name, pct) in criteria {
            cumulative += (*pct as f64 / 100.0) * w(p.id.0, name, &criteria_labels);
        }
        let context = (w(p.id.0, domain, &["Domain"]) + w(p.id.0, function, &["Function"])) / 2.0;
        let name = match p.attrs.get("name") {
            Some(AttrValue::Text(s)) => s.clone(),
            _ => String::new(),
        };
        out.push((name, cumulative * context));
    }
    out
}
