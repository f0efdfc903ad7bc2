use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AttrValue, GraphError};

pub type Attrs = BTreeMap<String, AttrValue>;

macro_rules! text_id {
    ($name:ident, $what:literal) => {
        #[doc = concat!("Engine-assigned ", $what, " identifier, serialized as decimal text.")]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl FromStr for $name {
            type Err = std::num::ParseIntError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.parse().map($name)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse()
                    .map_err(|_| serde::de::Error::custom(format!(concat!("invalid ", $what, " id {:?}"), s)))
            }
        }
    };
}

text_id!(NodeId, "node");
text_id!(EdgeId, "edge");

/// Reference to either kind of graph element.
///
/// Node and edge ids are drawn from one counter, so ordering refs by
/// [`ElementRef::raw_id`] orders elements by creation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum ElementRef {
    Node(NodeId),
    Edge(EdgeId),
}

impl ElementRef {
    pub fn raw_id(&self) -> u64 {
        match self {
            ElementRef::Node(id) => id.0,
            ElementRef::Edge(id) => id.0,
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::Node(id) => write!(f, "node {id}"),
            ElementRef::Edge(id) => write!(f, "edge {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub labels: BTreeSet<String>,
    #[serde(default)]
    pub attrs: Attrs,
}

impl Node {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn text_attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).and_then(AttrValue::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub label: String,
    #[serde(default)]
    pub attrs: Attrs,
}

/// Directed, attributed multigraph.
///
/// Every traversal runs in ascending id order. Parallel edges with the same
/// `(src, dst, label)` are kept apart by id.
#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    label_index: BTreeMap<String, BTreeSet<NodeId>>,
    outgoing: BTreeMap<NodeId, BTreeSet<EdgeId>>,
    incoming: BTreeMap<NodeId, BTreeSet<EdgeId>>,
    next_id: u64,
}

impl PartialEq for PropertyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

fn check_attr_keys(attrs: &Attrs) -> Result<(), GraphError> {
    for (key, value) in attrs {
        if key.is_empty() {
            return Err(GraphError::InvalidAttrKey { key: key.clone() });
        }
        if let AttrValue::Float(f) = value {
            if !f.is_finite() {
                return Err(GraphError::NonFiniteFloat);
            }
        }
    }
    Ok(())
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self {
            next_id: 1,
            ..Default::default()
        }
    }

    fn fresh_id(&mut self) -> u64 {
        let id = self.next_id.max(1);
        self.next_id = id + 1;
        id
    }

    pub fn add_node<I, S>(&mut self, labels: I, attrs: Attrs) -> Result<NodeId, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(GraphError::EmptyLabels);
        }
        if labels.iter().any(String::is_empty) {
            return Err(GraphError::InvalidLabel);
        }
        check_attr_keys(&attrs)?;
        let id = NodeId(self.fresh_id());
        self.index_node(Node { id, labels, attrs });
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        label: impl Into<String>,
        attrs: Attrs,
    ) -> Result<EdgeId, GraphError> {
        for end in [src, dst] {
            if !self.nodes.contains_key(&end) {
                return Err(GraphError::UnknownEndpoint { id: end });
            }
        }
        let label = label.into();
        if label.is_empty() {
            return Err(GraphError::InvalidLabel);
        }
        check_attr_keys(&attrs)?;
        let id = EdgeId(self.fresh_id());
        self.index_edge(Edge {
            id,
            src,
            dst,
            label,
            attrs,
        });
        Ok(id)
    }

    /// Overwrites or adds the given keys and returns the full attribute map
    /// as it was before the call.
    pub fn update_attrs(&mut self, element: ElementRef, attrs: Attrs) -> Result<Attrs, GraphError> {
        check_attr_keys(&attrs)?;
        let target = match element {
            ElementRef::Node(id) => self.nodes.get_mut(&id).map(|n| &mut n.attrs),
            ElementRef::Edge(id) => self.edges.get_mut(&id).map(|e| &mut e.attrs),
        }
        .ok_or(GraphError::UnknownElement { element })?;
        let previous = target.clone();
        target.extend(attrs);
        Ok(previous)
    }

    /// Removes an element; removing a node also removes its incident edges.
    /// Returns the number of elements removed.
    pub fn remove(&mut self, element: ElementRef) -> Result<usize, GraphError> {
        match element {
            ElementRef::Edge(id) => {
                self.unindex_edge(id).ok_or(GraphError::UnknownElement { element })?;
                Ok(1)
            }
            ElementRef::Node(id) => {
                if !self.nodes.contains_key(&id) {
                    return Err(GraphError::UnknownElement { element });
                }
                let incident: BTreeSet<EdgeId> = self
                    .outgoing
                    .get(&id)
                    .into_iter()
                    .chain(self.incoming.get(&id))
                    .flatten()
                    .copied()
                    .collect();
                for edge in &incident {
                    self.unindex_edge(*edge);
                }
                let node = self.nodes.remove(&id).expect("checked above");
                for label in &node.labels {
                    if let Some(set) = self.label_index.get_mut(label) {
                        set.remove(&id);
                        if set.is_empty() {
                            self.label_index.remove(label);
                        }
                    }
                }
                self.outgoing.remove(&id);
                self.incoming.remove(&id);
                Ok(1 + incident.len())
            }
        }
    }

    /// All edges `src -> dst` in insertion order.
    pub fn edges_between(&self, src: NodeId, dst: NodeId) -> Vec<&Edge> {
        self.out_edges(src).filter(|e| e.dst == dst).collect()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn contains(&self, element: ElementRef) -> bool {
        match element {
            ElementRef::Node(id) => self.nodes.contains_key(&id),
            ElementRef::Edge(id) => self.edges.contains_key(&id),
        }
    }

    pub fn attrs(&self, element: ElementRef) -> Option<&Attrs> {
        match element {
            ElementRef::Node(id) => self.nodes.get(&id).map(|n| &n.attrs),
            ElementRef::Edge(id) => self.edges.get(&id).map(|e| &e.attrs),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes_with_label<'a>(&'a self, label: &str) -> impl Iterator<Item = &'a Node> + 'a {
        self.label_index
            .get(label)
            .into_iter()
            .flatten()
            .filter_map(move |id| self.nodes.get(id))
    }

    /// Nodes carrying `label` whose `name` attribute equals `name`.
    pub fn find_named<'a>(&'a self, label: &str, name: &'a str) -> impl Iterator<Item = &'a Node> + 'a {
        self.nodes_with_label(label)
            .filter(move |n| n.text_attr("name") == Some(name))
    }

    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.outgoing
            .get(&node)
            .into_iter()
            .flatten()
            .filter_map(move |id| self.edges.get(id))
    }

    pub fn in_edges(&self, node: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.incoming
            .get(&node)
            .into_iter()
            .flatten()
            .filter_map(move |id| self.edges.get(id))
    }

    /// Rebuilds every derived index from scratch and compares it with the
    /// live one. Also checks for dangling edge endpoints.
    pub fn check_integrity(&self) -> Result<(), String> {
        let mut labels: BTreeMap<String, BTreeSet<NodeId>> = BTreeMap::new();
        for node in self.nodes.values() {
            if node.labels.is_empty() {
                return Err(format!("node {} has no labels", node.id));
            }
            for label in &node.labels {
                labels.entry(label.clone()).or_default().insert(node.id);
            }
        }
        if labels != self.label_index {
            return Err("label index out of sync with node labels".into());
        }
        let mut outgoing: BTreeMap<NodeId, BTreeSet<EdgeId>> = BTreeMap::new();
        let mut incoming: BTreeMap<NodeId, BTreeSet<EdgeId>> = BTreeMap::new();
        for edge in self.edges.values() {
            for end in [edge.src, edge.dst] {
                if !self.nodes.contains_key(&end) {
                    return Err(format!("edge {} references missing node {end}", edge.id));
                }
            }
            outgoing.entry(edge.src).or_default().insert(edge.id);
            incoming.entry(edge.dst).or_default().insert(edge.id);
        }
        let strip = |m: &BTreeMap<NodeId, BTreeSet<EdgeId>>| {
            m.iter()
                .filter(|(_, s)| !s.is_empty())
                .map(|(k, v)| (*k, v.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        if outgoing != strip(&self.outgoing) || incoming != strip(&self.incoming) {
            return Err("adjacency index out of sync with edges".into());
        }
        Ok(())
    }

    /// Bulk insertion with caller-chosen ids, used by document loading.
    pub(crate) fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, String> {
        let mut graph = PropertyGraph::new();
        let mut max_id = 0;
        for node in nodes {
            if node.labels.is_empty() {
                return Err(format!("node {} has no labels", node.id));
            }
            if node.labels.iter().any(String::is_empty) {
                return Err(format!("node {} has an empty label", node.id));
            }
            if node.attrs.keys().any(String::is_empty) {
                return Err(format!("node {} has an empty attribute key", node.id));
            }
            if graph.nodes.contains_key(&node.id) {
                return Err(format!("duplicate node id {}", node.id));
            }
            max_id = max_id.max(node.id.0);
            graph.index_node(node);
        }
        for edge in edges {
            if graph.edges.contains_key(&edge.id) || graph.nodes.contains_key(&NodeId(edge.id.0)) {
                return Err(format!("duplicate element id {}", edge.id));
            }
            for end in [edge.src, edge.dst] {
                if !graph.nodes.contains_key(&end) {
                    return Err(format!("edge {} references missing node {end}", edge.id));
                }
            }
            if edge.label.is_empty() {
                return Err(format!("edge {} has an empty label", edge.id));
            }
            if edge.attrs.keys().any(String::is_empty) {
                return Err(format!("edge {} has an empty attribute key", edge.id));
            }
            max_id = max_id.max(edge.id.0);
            graph.index_edge(edge);
        }
        graph.next_id = max_id + 1;
        Ok(graph)
    }

    fn index_node(&mut self, node: Node) {
        for label in &node.labels {
            self.label_index.entry(label.clone()).or_default().insert(node.id);
        }
        self.nodes.insert(node.id, node);
    }

    fn index_edge(&mut self, edge: Edge) {
        self.outgoing.entry(edge.src).or_default().insert(edge.id);
        self.incoming.entry(edge.dst).or_default().insert(edge.id);
        self.edges.insert(edge.id, edge);
    }

    fn unindex_edge(&mut self, id: EdgeId) -> Option<Edge> {
        let edge = self.edges.remove(&id)?;
        if let Some(set) = self.outgoing.get_mut(&edge.src) {
            set.remove(&id);
        }
        if let Some(set) = self.incoming.get_mut(&edge.dst) {
            set.remove(&id);
        }
        Some(edge)
    }
}

/// Builds an attribute map from `(key, value)` pairs.
pub fn attrs<K, V, I>(pairs: I) -> Attrs
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<AttrValue>,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(v: f64) -> Attrs {
        let mut a = Attrs::new();
        a.insert("value".into(), AttrValue::Float(v));
        a
    }

    fn sample() -> (PropertyGraph, NodeId, NodeId) {
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

    #[test]
    fn add_node_assigns_fresh_ids() {
        let (g, p, d) = sample();
        assert_ne!(p, d);
        assert_eq!(g.nodes_with_label("Practice").count(), 1);
        assert_eq!(g.nodes_with_label("Hybrid").next().unwrap().id, p);
        assert_eq!(g.find_named("Domain", "Factory Automation").next().unwrap().id, d);
    }

    #[test]
    fn add_node_rejects_empty_labels_and_keys() {
        let mut g = PropertyGraph::new();
        assert_eq!(
            g.add_node(Vec::<String>::new(), Attrs::new()),
            Err(GraphError::EmptyLabels)
        );
        assert_eq!(
            g.add_node(["Domain"], attrs([("", "x")])),
            Err(GraphError::InvalidAttrKey { key: String::new() })
        );
        assert!(g.is_empty());
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let (mut g, p, d) = sample();
        let e1 = g.add_edge(p, d, "WEIGHT", weight(3.0)).unwrap();
        let e2 = g.add_edge(p, d, "WEIGHT", weight(3.0)).unwrap();
        assert_ne!(e1, e2);
        let between: Vec<_> = g.edges_between(p, d).iter().map(|e| e.id).collect();
        assert_eq!(between, vec![e1, e2]);
        assert!(g.edges_between(d, p).is_empty());
        assert!(g.edges_between(NodeId(99), NodeId(98)).is_empty());
    }

    #[test]
    fn add_edge_requires_endpoints() {
        let (mut g, p, _) = sample();
        assert_eq!(
            g.add_edge(NodeId(404), p, "WEIGHT", Attrs::new()),
            Err(GraphError::UnknownEndpoint { id: NodeId(404) })
        );
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn update_returns_previous_map() {
        let (mut g, p, d) = sample();
        let e = g.add_edge(p, d, "WEIGHT", weight(3.0)).unwrap();
        let prev = g.update_attrs(ElementRef::Edge(e), weight(4.0)).unwrap();
        assert_eq!(prev, weight(3.0));
        assert_eq!(g.edge(e).unwrap().attrs, weight(4.0));

        let prev = g.update_attrs(ElementRef::Edge(e), Attrs::new()).unwrap();
        assert_eq!(prev, weight(4.0));
        assert_eq!(g.edge(e).unwrap().attrs, weight(4.0));

        let prev = g
            .update_attrs(ElementRef::Node(p), attrs([("channel", "MQTT")]))
            .unwrap();
        assert_eq!(prev.get("channel"), Some(&AttrValue::text("OPC-UA")));
        assert_eq!(g.node(p).unwrap().text_attr("name"), Some("HL:1"));

        assert_eq!(
            g.update_attrs(ElementRef::Edge(EdgeId(77)), Attrs::new()),
            Err(GraphError::UnknownElement {
                element: ElementRef::Edge(EdgeId(77))
            })
        );
    }

    #[test]
    fn removing_node_cascades() {
        let (mut g, p, d) = sample();
        let other = g.add_node(["Function"], attrs([("name", "Simulation")])).unwrap();
        g.add_edge(p, d, "WEIGHT", weight(1.0)).unwrap();
        g.add_edge(p, d, "WEIGHT", weight(2.0)).unwrap();
        g.add_edge(other, p, "WEIGHT", weight(2.0)).unwrap();
        let keep = g.add_edge(other, d, "WEIGHT", weight(2.0)).unwrap();
        assert_eq!(g.remove(ElementRef::Node(p)), Ok(4));
        assert_eq!(g.edge_count(), 1);
        assert!(g.edge(keep).is_some());
        assert_eq!(g.nodes_with_label("Practice").count(), 0);
        g.check_integrity().unwrap();
        assert_eq!(
            g.remove(ElementRef::Node(p)),
            Err(GraphError::UnknownElement {
                element: ElementRef::Node(p)
            })
        );
        assert_eq!(g.remove(ElementRef::Edge(keep)), Ok(1));
        assert!(g.remove(ElementRef::Edge(keep)).is_err());
    }

    #[test]
    fn ids_are_not_reused() {
        let (mut g, p, _) = sample();
        g.remove(ElementRef::Node(p)).unwrap();
        let q = g.add_node(["Domain"], Attrs::new()).unwrap();
        assert!(q.0 > p.0);
    }
}
