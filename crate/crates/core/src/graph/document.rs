use serde::{Deserialize, Serialize};

use super::{DocumentError, Edge, GraphSchema, Node, PropertyGraph};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Serialize)]
struct DocumentOut<'a> {
    version: u32,
    schema: &'a GraphSchema,
    nodes: Vec<&'a Node>,
    edges: Vec<&'a Edge>,
}

#[derive(Deserialize)]
struct DocumentIn {
    version: u32,
    schema: GraphSchema,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// Serializes a graph and its schema as a pretty-printed JSON document.
pub fn save(graph: &PropertyGraph, schema: &GraphSchema) -> Vec<u8> {
    let doc = DocumentOut {
        version: DOCUMENT_VERSION,
        schema,
        nodes: graph.nodes().collect(),
        edges: graph.edges().collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("graph document serializes");
    out.push(b'\n');
    out
}

pub fn load(bytes: &[u8]) -> Result<(PropertyGraph, GraphSchema), DocumentError> {
    let doc: DocumentIn = serde_json::from_slice(bytes).map_err(|e| DocumentError {
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    let structural = |message: String| DocumentError {
        line: None,
        column: None,
        message,
    };
    if doc.version != DOCUMENT_VERSION {
        return Err(structural(format!(
            "unsupported document version {} (expected {DOCUMENT_VERSION})",
            doc.version
        )));
    }
    let graph = PropertyGraph::from_parts(doc.nodes, doc.edges).map_err(structural)?;
    Ok((graph, doc.schema))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{attrs, AttrValue, Attrs, ElementRef};

    fn sample() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        let p = g
            .add_node(["Practice", "Hybrid"], attrs([("name", "HL:1"), ("coupling", "loose")]))
            .unwrap();
        let d = g.add_node(["Domain"], attrs([("name", "Energy")])).unwrap();
        let mut w = Attrs::new();
        w.insert("value".into(), AttrValue::Float(3.0));
        w.insert("rank".into(), AttrValue::Int(2));
        w.insert("verified".into(), AttrValue::Bool(true));
        g.add_edge(p, d, "WEIGHT", w.clone()).unwrap();
        g.add_edge(p, d, "WEIGHT", w).unwrap();
        g
    }

    #[test]
    fn round_trip_preserves_ids_and_kinds() {
        let mut g = sample();
        let first = g.nodes().next().unwrap().id;
        g.remove(ElementRef::Node(first)).unwrap();
        g.add_node(["Function"], attrs([("name", "Control")])).unwrap();
        let schema = GraphSchema::practice_default();
        let bytes = save(&g, &schema);
        let (back, back_schema) = load(&bytes).unwrap();
        assert_eq!(back, g);
        assert_eq!(back_schema, schema);
        back.check_integrity().unwrap();
        assert_eq!(save(&back, &back_schema), bytes);
    }

    #[test]
    fn floats_keep_their_decimal_point() {
        let text = String::from_utf8(save(&sample(), &GraphSchema::empty())).unwrap();
        assert!(text.contains("\"value\": 3.0"), "{text}");
        assert!(text.contains("\"rank\": 2"), "{text}");
        assert!(text.contains("\"id\": \"1\""), "{text}");
    }

    #[test]
    fn truncated_document_is_malformed() {
        let bytes = save(&sample(), &GraphSchema::empty());
        let err = load(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(err.line.is_some());
    }

    #[test]
    fn dangling_edge_is_malformed() {
        let doc = r#"{"version":1,"schema":{"nodeLabels":[]},
            "nodes":[{"id":"1","labels":["A"],"attrs":{}}],
            "edges":[{"id":"2","src":"1","dst":"9","label":"E","attrs":{}}]}"#;
        let err = load(doc.as_bytes()).unwrap_err();
        assert!(err.message.contains("missing node 9"), "{err}");
    }

    #[test]
    fn structural_problems_are_malformed() {
        for doc in [
            r#"{"version":2,"schema":{"nodeLabels":[]},"nodes":[],"edges":[]}"#,
            r#"{"version":1,"schema":{"nodeLabels":[]},"nodes":[{"id":"1","labels":[]}],"edges":[]}"#,
            r#"{"version":1,"schema":{"nodeLabels":[]},"nodes":[{"id":"1","labels":["A"]},{"id":"1","labels":["B"]}],"edges":[]}"#,
            r#"{"version":1,"schema":{"nodeLabels":[]},"nodes":[{"id":"x","labels":["A"]}],"edges":[]}"#,
            r#"{"version":1,"schema":{"nodeLabels":["A"],"edgeRules":[{"srcLabel":"A","edgeLabel":"E","dstLabel":"Z"}]},"nodes":[],"edges":[]}"#,
            r#"{"version":1,"schema":{"nodeLabels":[]},"nodes":[{"id":"1","labels":["A"],"attrs":{"k":null}}],"edges":[]}"#,
        ] {
            assert!(load(doc.as_bytes()).is_err(), "{doc}");
        }
    }
}
