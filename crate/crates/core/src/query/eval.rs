//! Backtracking subgraph matcher.
//!
//! Edge patterns with different variables (or no variable) bind distinct
//! edges within a row; node patterns may bind the same node. Filters are
//! checked as soon as every variable they mention is bound.

use std::collections::{BTreeSet, HashMap};

use super::ast::{Comparison, Operand, PatternQuery, VarKind};
use super::result::{ElementSnapshot, ResultSet};
use crate::graph::{AttrValue, EdgeId, ElementRef, NodeId, PropertyGraph};

#[derive(Default)]
struct Slot {
    labels: Vec<String>,
}

#[derive(Clone, Copy)]
enum Step {
    Node(usize),
    Edge { src: usize, edge: usize, dst: usize },
}

#[derive(Clone, Copy)]
enum VarSlot {
    Node(usize),
    Edge(usize),
}

struct Plan<'q> {
    node_slots: Vec<Slot>,
    edge_slots: Vec<Slot>,
    steps: Vec<Step>,
    vars: HashMap<&'q str, VarSlot>,
    /// Filters to check right after step `i` completes.
    filters_after: Vec<Vec<&'q Comparison>>,
    columns: Vec<(String, VarSlot)>,
}

struct SlotBuilder<'b, 'q> {
    node_slots: &'b mut Vec<Slot>,
    edge_slots: &'b mut Vec<Slot>,
    vars: &'b mut HashMap<&'q str, VarSlot>,
}

impl<'q> SlotBuilder<'_, 'q> {
    fn slot(&mut self, var: &'q Option<String>, label: &Option<String>, kind: VarKind) -> usize {
        let existing = var.as_deref().and_then(|v| self.vars.get(v).copied());
        let slots = match kind {
            VarKind::Node => &mut *self.node_slots,
            VarKind::Edge => &mut *self.edge_slots,
        };
        let idx = match existing {
            Some(VarSlot::Node(i)) | Some(VarSlot::Edge(i)) => i,
            None => {
                slots.push(Slot::default());
                let i = slots.len() - 1;
                if let Some(v) = var {
                    let slot = match kind {
                        VarKind::Node => VarSlot::Node(i),
                        VarKind::Edge => VarSlot::Edge(i),
                    };
                    self.vars.insert(v.as_str(), slot);
                }
                i
            }
        };
        if let Some(l) = label {
            if !slots[idx].labels.contains(l) {
                slots[idx].labels.push(l.clone());
            }
        }
        idx
    }
}

fn compile(query: &PatternQuery) -> Plan<'_> {
    let mut node_slots: Vec<Slot> = Vec::new();
    let mut edge_slots: Vec<Slot> = Vec::new();
    let mut vars: HashMap<&str, VarSlot> = HashMap::new();
    let mut steps = Vec::new();

    let mut builder = SlotBuilder {
        node_slots: &mut node_slots,
        edge_slots: &mut edge_slots,
        vars: &mut vars,
    };
    for path in &query.paths {
        let mut src = builder.slot(&path.start.var, &path.start.label, VarKind::Node);
        steps.push(Step::Node(src));
        for (edge, node) in &path.steps {
            let e = builder.slot(&edge.var, &edge.label, VarKind::Edge);
            let dst = builder.slot(&node.var, &node.label, VarKind::Node);
            steps.push(Step::Edge { src, edge: e, dst });
            src = dst;
        }
    }

    // Step index after which each slot is guaranteed bound.
    let mut bound_at_node = vec![usize::MAX; node_slots.len()];
    let mut bound_at_edge = vec![usize::MAX; edge_slots.len()];
    for (i, step) in steps.iter().enumerate() {
        match *step {
            Step::Node(n) => bound_at_node[n] = bound_at_node[n].min(i),
            Step::Edge { edge, dst, .. } => {
                bound_at_edge[edge] = bound_at_edge[edge].min(i);
                bound_at_node[dst] = bound_at_node[dst].min(i);
            }
        }
    }
    let mut filters_after = vec![Vec::new(); steps.len()];
    for filter in &query.filters {
        let ready = [filter.lhs.var(), filter.rhs.var()]
            .into_iter()
            .flatten()
            .map(|v| match vars[v] {
                VarSlot::Node(i) => bound_at_node[i],
                VarSlot::Edge(i) => bound_at_edge[i],
            })
            .max()
            .unwrap_or(0);
        filters_after[ready].push(filter);
    }

    let columns = query
        .columns()
        .into_iter()
        .map(|c| {
            let slot = vars[c.as_str()];
            (c, slot)
        })
        .collect();

    Plan {
        node_slots,
        edge_slots,
        steps,
        vars,
        filters_after,
        columns,
    }
}

struct Search<'a, 'q> {
    graph: &'a PropertyGraph,
    plan: &'a Plan<'q>,
    nodes: Vec<Option<NodeId>>,
    edges: Vec<Option<EdgeId>>,
    rows: BTreeSet<Vec<u64>>,
}

impl Search<'_, '_> {
    fn node_fits(&self, slot: usize, id: NodeId) -> bool {
        let node = self.graph.node(id).expect("ids come from the graph");
        self.plan.node_slots[slot].labels.iter().all(|l| node.has_label(l))
    }

    fn operand_value(&self, operand: &Operand) -> Option<AttrValue> {
        match operand {
            Operand::Literal(lit) => Some(lit.to_value()),
            Operand::Property { var, key } => {
                let element = match self.plan.vars[var.as_str()] {
                    VarSlot::Node(i) => ElementRef::Node(self.nodes[i]?),
                    VarSlot::Edge(i) => ElementRef::Edge(self.edges[i]?),
                };
                self.graph.attrs(element)?.get(key).cloned()
            }
        }
    }

    /// Missing attributes and mismatched kinds make a comparison false.
    fn holds(&self, cmp: &Comparison) -> bool {
        let (Some(lhs), Some(rhs)) = (self.operand_value(&cmp.lhs), self.operand_value(&cmp.rhs)) else {
            return false;
        };
        lhs.try_cmp(&rhs).is_ok_and(|ord| cmp.op.holds(ord))
    }

    fn advance(&mut self, step: usize) {
        if self.plan.filters_after[step].iter().all(|f| self.holds(f)) {
            self.run(step + 1);
        }
    }

    fn bind_node_then(&mut self, slot: usize, id: NodeId, step: usize) {
        match self.nodes[slot] {
            Some(bound) if bound == id => self.advance(step),
            Some(_) => {}
            None => {
                if self.node_fits(slot, id) {
                    self.nodes[slot] = Some(id);
                    self.advance(step);
                    self.nodes[slot] = None;
                }
            }
        }
    }

    fn run(&mut self, step: usize) {
        let Some(&current) = self.plan.steps.get(step) else {
            let row = self
                .plan
                .columns
                .iter()
                .map(|(_, slot)| match *slot {
                    VarSlot::Node(i) => self.nodes[i].expect("all slots bound").0,
                    VarSlot::Edge(i) => self.edges[i].expect("all slots bound").0,
                })
                .collect();
            self.rows.insert(row);
            return;
        };
        match current {
            Step::Node(slot) => {
                if let Some(id) = self.nodes[slot] {
                    self.bind_node_then(slot, id, step);
                    return;
                }
                let candidates: Vec<NodeId> = match self.plan.node_slots[slot].labels.first() {
                    Some(label) => self.graph.nodes_with_label(label).map(|n| n.id).collect(),
                    None => self.graph.nodes().map(|n| n.id).collect(),
                };
                for id in candidates {
                    self.bind_node_then(slot, id, step);
                }
            }
            Step::Edge { src, edge, dst } => {
                let src_id = self.nodes[src].expect("path source bound before its edges");
                if let Some(bound) = self.edges[edge] {
                    let e = self.graph.edge(bound).expect("bound edge exists");
                    if e.src == src_id {
                        self.bind_node_then(dst, e.dst, step);
                    }
                    return;
                }
                let candidates: Vec<(EdgeId, NodeId)> = self
                    .graph
                    .out_edges(src_id)
                    .filter(|e| self.plan.edge_slots[edge].labels.iter().all(|l| *l == e.label))
                    .filter(|e| !self.edges.contains(&Some(e.id)))
                    .map(|e| (e.id, e.dst))
                    .collect();
                for (id, target) in candidates {
                    self.edges[edge] = Some(id);
                    self.bind_node_then(dst, target, step);
                    self.edges[edge] = None;
                }
            }
        }
    }
}

/// Finds every binding of the query's pattern in `graph`.
///
/// Rows are deduplicated over the returned columns and sorted by the ids
/// they bind, left to right.
pub fn evaluate(query: &PatternQuery, graph: &PropertyGraph) -> ResultSet {
    let plan = compile(query);
    let mut search = Search {
        graph,
        plan: &plan,
        nodes: vec![None; plan.node_slots.len()],
        edges: vec![None; plan.edge_slots.len()],
        rows: BTreeSet::new(),
    };
    search.run(0);

    let rows = search
        .rows
        .into_iter()
        .map(|ids| {
            plan.columns
                .iter()
                .zip(ids)
                .map(|((_, slot), id)| match slot {
                    VarSlot::Node(_) => ElementSnapshot::of_node(graph.node(NodeId(id)).expect("bound node")),
                    VarSlot::Edge(_) => ElementSnapshot::of_edge(graph.edge(EdgeId(id)).expect("bound edge")),
                })
                .collect()
        })
        .collect();
    ResultSet {
        columns: plan.columns.iter().map(|(c, _)| c.clone()).collect(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::graph::{attrs, Attrs};
    use crate::query::parse;

    fn run(text: &str, graph: &PropertyGraph) -> ResultSet {
        evaluate(&parse(text).unwrap(), graph)
    }

    fn names(rs: &ResultSet, col: usize) -> Vec<String> {
        rs.rows
            .iter()
            .map(|r| {
                r[col]
                    .attrs()
                    .get("name")
                    .and_then(|v| v.as_str())
                    .unwrap_or("")
                    .to_string()
            })
            .collect()
    }

    #[test]
    fn hybrid_factory_query_on_fixture() {
        let g = fixture::graph();
        let rs = run(
            "MATCH(h:Hybrid)-[w:WEIGHT]->(d:Domain) WHERE w.value > 2 AND d.name = \"Factory Automation\" RETURN *",
            &g,
        );
        assert_eq!(rs.columns, ["h", "w", "d"]);
        assert_eq!(names(&rs, 0), ["HT:1", "HL:1", "HL:2"]);
    }

    #[test]
    fn practice_count_and_empty_graph() {
        let g = fixture::graph();
        assert_eq!(run("MATCH (n:Practice) RETURN n", &g).rows.len(), 6);
        let empty = run("MATCH (a)-[r]->(b) RETURN b, r", &PropertyGraph::new());
        assert_eq!(empty.columns, ["b", "r"]);
        assert!(empty.rows.is_empty());
    }

    #[test]
    fn parallel_edges_are_distinct_rows_and_nodes_may_repeat() {
        let mut g = PropertyGraph::new();
        let a = g.add_node(["A"], Attrs::new()).unwrap();
        let b = g.add_node(["B"], Attrs::new()).unwrap();
        g.add_edge(a, b, "E", Attrs::new()).unwrap();
        g.add_edge(a, b, "E", Attrs::new()).unwrap();
        g.add_edge(a, a, "E", Attrs::new()).unwrap();

        assert_eq!(run("MATCH (x)-[r:E]->(y) RETURN *", &g).rows.len(), 3);
        // Two distinct edge patterns over the same pair need two distinct edges.
        assert_eq!(
            run("MATCH (x:A)-[r]->(y:B), (x)-[s]->(y) RETURN r, s", &g).rows.len(),
            2
        );
        // The same variable twice is the same edge.
        assert_eq!(run("MATCH (x:A)-[r]->(y:B), (x)-[r]->(y) RETURN r", &g).rows.len(), 2);
        // Node variables may coincide: the self-loop binds x and y to `a`.
        let rs = run("MATCH (x)-[r]->(y) WHERE r.missing = 1 RETURN x", &g);
        assert!(rs.rows.is_empty());
        let rs = run("MATCH (x:A)-[]->(y:A) RETURN x, y", &g);
        assert_eq!(rs.rows.len(), 1);
        assert_eq!(rs.rows[0][0].id(), rs.rows[0][1].id());
        // Projection deduplicates.
        assert_eq!(run("MATCH (x)-[]->(y:B) RETURN x", &g).rows.len(), 1);
    }

    #[test]
    fn typed_filter_semantics() {
        let mut g = PropertyGraph::new();
        g.add_node(["N"], attrs([("v", AttrValue::Int(2))])).unwrap();
        g.add_node(["N"], attrs([("v", AttrValue::Float(2.5))])).unwrap();
        g.add_node(["N"], attrs([("v", "2")])).unwrap();
        g.add_node(["N"], Attrs::new()).unwrap();
        assert_eq!(run("MATCH (n) WHERE n.v = 2 RETURN n", &g).rows.len(), 1);
        assert_eq!(run("MATCH (n) WHERE n.v >= 2 RETURN n", &g).rows.len(), 2);
        assert_eq!(run("MATCH (n) WHERE n.v <> 2 RETURN n", &g).rows.len(), 1);
        assert_eq!(run("MATCH (n) WHERE n.v = \"2\" RETURN n", &g).rows.len(), 1);
        assert_eq!(run("MATCH (n) WHERE 3 > n.v RETURN n", &g).rows.len(), 2);
        assert_eq!(run("MATCH (n), (m) WHERE n.v < m.v RETURN n, m", &g).rows.len(), 1);
    }

    #[test]
    fn evaluation_is_deterministic_and_read_only() {
        let g = fixture::graph();
        let before = crate::graph::save(&g, &crate::graph::GraphSchema::empty());
        let q = parse("MATCH (p:Practice)-[w:WEIGHT]->(c) WHERE w.value >= 3 RETURN p, c").unwrap();
        let first = evaluate(&q, &g);
        assert_eq!(first, evaluate(&q, &g));
        assert_eq!(before, crate::graph::save(&g, &crate::graph::GraphSchema::empty()));
        let keys: Vec<(u64, u64)> = first.rows.iter().map(|r| (r[0].id(), r[1].id())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(keys, sorted);
    }
}
