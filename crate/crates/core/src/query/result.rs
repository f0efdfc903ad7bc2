use serde::{Deserialize, Serialize};

use crate::graph::{Attrs, Edge, EdgeId, Node, NodeId};

/// A copy of a matched element, detached from the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ElementSnapshot {
    Node {
        id: NodeId,
        labels: Vec<String>,
        attrs: Attrs,
    },
    Edge {
        id: EdgeId,
        src: NodeId,
        dst: NodeId,
        label: String,
        attrs: Attrs,
    },
}

impl ElementSnapshot {
    pub fn of_node(node: &Node) -> Self {
        ElementSnapshot::Node {
            id: node.id,
            labels: node.labels.iter().cloned().collect(),
            attrs: node.attrs.clone(),
        }
    }

    pub fn of_edge(edge: &Edge) -> Self {
        ElementSnapshot::Edge {
            id: edge.id,
            src: edge.src,
            dst: edge.dst,
            label: edge.label.clone(),
            attrs: edge.attrs.clone(),
        }
    }

    pub fn id(&self) -> u64 {
        match self {
            ElementSnapshot::Node { id, .. } => id.0,
            ElementSnapshot::Edge { id, .. } => id.0,
        }
    }

    pub fn attrs(&self) -> &Attrs {
        match self {
            ElementSnapshot::Node { attrs, .. } | ElementSnapshot::Edge { attrs, .. } => attrs,
        }
    }
}

/// Query output: one snapshot per column in every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<ElementSnapshot>>,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
