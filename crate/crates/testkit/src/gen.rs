use std::collections::{BTreeMap, BTreeSet};

use iaselect_core::graph::{
    vocab, AttrKind, AttrRule, AttrValue, Attrs, EdgeTypeRule, ElementRef, GraphSchema, LabelGroupRule, NodeId,
    PropertyGraph,
};
use iaselect_core::query::{
    CompOp, Comparison, EdgePattern, Literal, NodePattern, Operand, PathPattern, PatternQuery, Projection,
};
use iaselect_core::recommender::{ContextSelection, CriteriaWeights};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NODE_LABELS: [&str; 3] = ["A", "B", "C"];
pub const EDGE_LABELS: [&str; 2] = ["R", "S"];

/// Small values of every kind. Integers stay small so they convert to f64
/// exactly.
pub fn small_value(rng: &mut impl Rng) -> AttrValue {
    match rng.gen_range(0..4) {
        0 => AttrValue::Int(rng.gen_range(-3..=3)),
        1 => AttrValue::Float(f64::from(rng.gen_range(-6..=6)) / 2.0),
        2 => AttrValue::text(["a", "b", "c"].choose(rng).unwrap().to_string()),
        _ => AttrValue::Bool(rng.gen()),
    }
}

fn small_attrs(rng: &mut impl Rng) -> Attrs {
    let mut attrs = Attrs::new();
    for key in ["v", "name"] {
        if rng.gen_bool(0.7) {
            attrs.insert(key.to_string(), small_value(rng));
        }
    }
    attrs
}

/// A graph with at most `max_nodes` nodes and `max_edges` edges over a
/// three-label alphabet, including self-loops and parallel edges.
pub fn small_graph(rng: &mut impl Rng, max_nodes: usize, max_edges: usize) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let n = rng.gen_range(0..=max_nodes);
    let mut ids = Vec::new();
    for _ in 0..n {
        let mut labels: Vec<&str> = NODE_LABELS.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        if labels.is_empty() {
            labels.push(NODE_LABELS.choose(rng).unwrap());
        }
        ids.push(g.add_node(labels, small_attrs(rng)).unwrap());
    }
    if !ids.is_empty() {
        for _ in 0..rng.gen_range(0..=max_edges) {
            let src = *ids.choose(rng).unwrap();
            let dst = *ids.choose(rng).unwrap();
            let label = EDGE_LABELS.choose(rng).unwrap();
            g.add_edge(src, dst, *label, small_attrs(rng)).unwrap();
        }
    }
    g
}

fn literal(rng: &mut impl Rng) -> Literal {
    match small_value(rng) {
        AttrValue::Text(s) => Literal::Str(s),
        AttrValue::Bool(b) => Literal::Bool(b),
        v => Literal::Num(v.as_f64().unwrap()),
    }
}

fn filters_over(rng: &mut impl Rng, vars: &[String], count: usize) -> Vec<Comparison> {
    if vars.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let key = ["v", "v", "name", "missing"].choose(rng).unwrap();
            let prop = Operand::prop(vars.choose(rng).unwrap(), key);
            let other = if rng.gen_bool(0.3) {
                Operand::prop(vars.choose(rng).unwrap(), ["v", "name"].choose(rng).unwrap())
            } else {
                Operand::Literal(literal(rng))
            };
            let (lhs, rhs) = if rng.gen_bool(0.5) {
                (prop, other)
            } else {
                (other, prop)
            };
            Comparison {
                lhs,
                op: *CompOp::ALL.choose(rng).unwrap(),
                rhs,
            }
        })
        .collect()
}

fn projection(rng: &mut impl Rng, vars: &[String]) -> Projection {
    if vars.is_empty() || rng.gen_bool(0.4) {
        return Projection::All;
    }
    let mut chosen: Vec<String> = vars.to_vec();
    chosen.shuffle(rng);
    chosen.truncate(rng.gen_range(1..=vars.len()));
    Projection::Vars(chosen)
}

/// One path with at most two edges and up to three filters. Variables may
/// repeat, so both node-homomorphic and edge-distinct cases come up.
pub fn single_path_query(rng: &mut impl Rng) -> PatternQuery {
    let mut declared: Vec<String> = Vec::new();
    let mut declare = |name: Option<&'static str>| -> Option<&'static str> {
        if let Some(n) = name {
            if !declared.iter().any(|d| d == n) {
                declared.push(n.to_string());
            }
        }
        name
    };
    let node_label = |rng: &mut dyn rand::RngCore| -> Option<&'static str> {
        if rng.gen_bool(0.5) {
            Some(*["A", "B", "C", "Z"].choose(rng).unwrap())
        } else {
            None
        }
    };
    let node_var = |rng: &mut dyn rand::RngCore| *[Some("a"), Some("b"), Some("c"), None].choose(rng).unwrap();
    let edge_var = |rng: &mut dyn rand::RngCore| *[Some("r"), Some("s"), Some("t"), None].choose(rng).unwrap();
    let edge_label = |rng: &mut dyn rand::RngCore| *[Some("R"), Some("S"), Some("T"), None].choose(rng).unwrap();

    let start = NodePattern::new(declare(node_var(rng)), node_label(rng));
    let mut path = PathPattern::node(start);
    for _ in 0..rng.gen_range(0..=2) {
        let e = EdgePattern::new(declare(edge_var(rng)), edge_label(rng));
        let n = NodePattern::new(declare(node_var(rng)), node_label(rng));
        path = path.then(e, n);
    }
    let count = rng.gen_range(0..=3);
    PatternQuery {
        paths: vec![path],
        filters: filters_over(rng, &declared, count),
        returns: projection(rng, &declared),
    }
}

const KEYWORDS: [&str; 6] = ["match", "where", "and", "return", "true", "false"];

fn ident(rng: &mut (impl Rng + ?Sized)) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
    loop {
        let mut s = String::new();
        s.push(char::from(*FIRST.choose(rng).unwrap()));
        for _ in 0..rng.gen_range(0..6) {
            s.push(char::from(*REST.choose(rng).unwrap()));
        }
        if rng.gen_bool(0.1) {
            s.push('é');
        }
        if !KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(&s)) {
            return s;
        }
    }
}

fn any_string(rng: &mut impl Rng) -> String {
    const POOL: [char; 14] = ['a', 'Z', ' ', '"', '\\', '\n', '\t', '\r', ':', '-', 'ü', '→', '0', ')'];
    (0..rng.gen_range(0..10)).map(|_| *POOL.choose(rng).unwrap()).collect()
}

fn any_number(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..5) {
        0 => f64::from(rng.gen_range(-1000..1000)),
        1 => rng.gen_range(-10.0..10.0),
        2 => rng.gen_range(-1.0..1.0) * 1e-12,
        3 => rng.gen_range(-1.0..1.0) * 1e200,
        _ => f64::from(rng.gen_range(0..100)) / 4.0,
    }
}

fn any_literal(rng: &mut impl Rng) -> Literal {
    match rng.gen_range(0..3) {
        0 => Literal::Str(any_string(rng)),
        1 => Literal::Num(any_number(rng)),
        _ => Literal::Bool(rng.gen()),
    }
}

/// A valid AST of arbitrary shape: several paths, shared variables, every
/// operator and literal kind, awkward strings and identifiers.
pub fn any_query(rng: &mut impl Rng) -> PatternQuery {
    let node_pool: Vec<String> = (0..3).map(|_| ident(rng)).collect();
    let mut edge_pool: Vec<String> = (0..3).map(|_| ident(rng)).collect();
    edge_pool.retain(|e| !node_pool.contains(e));
    let mut declared: Vec<String> = Vec::new();

    let mut pick = |rng: &mut dyn rand::RngCore, pool: &[String]| -> Option<String> {
        let v = if rng.gen_bool(0.75) {
            pool.choose(rng).cloned()
        } else {
            None
        };
        if let Some(v) = &v {
            if !declared.contains(v) {
                declared.push(v.clone());
            }
        }
        v
    };
    let label = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.6) {
            Some(ident(rng))
        } else {
            None
        }
    };

    let mut paths = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let start = NodePattern {
            var: pick(rng, &node_pool),
            label: label(rng),
        };
        let mut path = PathPattern::node(start);
        for _ in 0..rng.gen_range(0..=3) {
            let e = EdgePattern {
                var: pick(rng, &edge_pool),
                label: label(rng),
            };
            let n = NodePattern {
                var: pick(rng, &node_pool),
                label: label(rng),
            };
            path = path.then(e, n);
        }
        paths.push(path);
    }

    let mut filters = Vec::new();
    if !declared.is_empty() {
        for _ in 0..rng.gen_range(0..=4) {
            let prop = Operand::prop(declared.choose(rng).unwrap(), &ident(rng));
            let other = if rng.gen_bool(0.3) {
                Operand::prop(declared.choose(rng).unwrap(), &ident(rng))
            } else {
                Operand::Literal(any_literal(rng))
            };
            let (lhs, rhs) = if rng.gen_bool(0.5) {
                (prop, other)
            } else {
                (other, prop)
            };
            filters.push(Comparison {
                lhs,
                op: *CompOp::ALL.choose(rng).unwrap(),
                rhs,
            });
        }
    }
    let returns = projection(rng, &declared);
    PatternQuery {
        paths,
        filters,
        returns,
    }
}

/// Random bytes, biased towards query-like text so the parser gets past
/// the first token often.
pub fn fuzz_input(rng: &mut impl Rng, max_len: usize) -> Vec<u8> {
    const PIECES: [&str; 24] = [
        "MATCH", "WHERE", "AND", "RETURN", "(", ")", "[", "]", "-[", "]->", "->", ":", ",", ".", "*", "=", "<>", "<=",
        ">", "\"", "\\", " ", "-1.5", "true",
    ];
    let len = rng.gen_range(0..=max_len);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        match rng.gen_range(0..4) {
            0 => out.push(rng.gen()),
            1 => out.extend_from_slice(ident(rng).as_bytes()),
            _ => out.extend_from_slice(PIECES.choose(rng).unwrap().as_bytes()),
        }
    }
    out.truncate(len);
    out
}

/// A graph that satisfies [`GraphSchema::practice_default`], with id gaps
/// left by removals and arbitrary extra attributes.
pub fn practice_graph(rng: &mut impl Rng) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let mut practices = Vec::new();
    for i in 0..rng.gen_range(0..8) {
        let location = *vocab::LOCATION_LABELS.choose(rng).unwrap();
        let mut attrs = Attrs::from([
            (
                vocab::NAME.to_string(),
                AttrValue::text(format!("P{i}:{}", any_string(rng))),
            ),
            (
                vocab::COUPLING.to_string(),
                AttrValue::text(*[vocab::TIGHT, vocab::LOOSE].choose(rng).unwrap()),
            ),
            (vocab::API_CLIENT.to_string(), AttrValue::text(any_string(rng))),
            (vocab::CHANNEL.to_string(), AttrValue::text(any_string(rng))),
        ]);
        if rng.gen_bool(0.3) {
            attrs.insert("note".into(), small_value(rng));
        }
        if rng.gen_bool(0.2) {
            attrs.insert("big".into(), AttrValue::Int(rng.gen()));
        }
        practices.push(g.add_node([vocab::PRACTICE, location], attrs).unwrap());
    }
    let mut characteristics = Vec::new();
    for i in 0..rng.gen_range(0..8) {
        let label = *vocab::CHARACTERISTIC_LABELS.choose(rng).unwrap();
        let attrs = Attrs::from([(
            vocab::NAME.to_string(),
            AttrValue::text(format!("C{i} {}", any_string(rng))),
        )]);
        characteristics.push(g.add_node([label], attrs).unwrap());
    }
    if !practices.is_empty() && !characteristics.is_empty() {
        for _ in 0..rng.gen_range(0..24) {
            let p = *practices.choose(rng).unwrap();
            let c = *characteristics.choose(rng).unwrap();
            let value = AttrValue::Float(rng.gen_range(vocab::WEIGHT_MIN..=vocab::WEIGHT_MAX));
            g.add_edge(p, c, vocab::WEIGHT, Attrs::from([(vocab::VALUE.to_string(), value)]))
                .unwrap();
        }
    }
    let edges: Vec<_> = g.edges().map(|e| e.id).collect();
    for e in edges {
        if rng.gen_bool(0.1) {
            g.remove(ElementRef::Edge(e)).unwrap();
        }
    }
    if rng.gen_bool(0.3) {
        if let Some(&c) = characteristics.choose(rng) {
            g.remove(ElementRef::Node(c)).unwrap();
        }
    }
    g
}

/// A schema over labels `A`..`D` with random edge rules, attribute rules
/// and label groups.
pub fn small_schema(rng: &mut impl Rng) -> GraphSchema {
    const LABELS: [&str; 4] = ["A", "B", "C", "D"];
    let node_labels: BTreeSet<String> = LABELS.iter().map(|s| s.to_string()).collect();
    let rule = |rng: &mut dyn rand::RngCore| -> AttrRule {
        match rng.gen_range(0..4) {
            0 => AttrRule::ranged(AttrKind::Float, -1.0, 1.0),
            1 => AttrRule::ranged(AttrKind::Int, 0.0, 2.0),
            2 => AttrRule::text_one_of(["a", "b"]),
            _ => AttrRule::of(AttrKind::Bool),
        }
    };
    let mut edge_rules = Vec::new();
    for _ in 0..rng.gen_range(0..5) {
        let mut required_attrs = BTreeMap::new();
        if rng.gen_bool(0.6) {
            required_attrs.insert("v".to_string(), rule(rng));
        }
        edge_rules.push(EdgeTypeRule {
            src_label: LABELS.choose(rng).unwrap().to_string(),
            edge_label: EDGE_LABELS.choose(rng).unwrap().to_string(),
            dst_label: LABELS.choose(rng).unwrap().to_string(),
            required_attrs,
        });
    }
    let mut node_attr_rules = BTreeMap::new();
    for label in LABELS {
        if rng.gen_bool(0.5) {
            let mut rules = BTreeMap::new();
            for key in ["v", "name"] {
                if rng.gen_bool(0.5) {
                    rules.insert(key.to_string(), rule(rng));
                }
            }
            node_attr_rules.insert(label.to_string(), rules);
        }
    }
    let mut label_groups = Vec::new();
    if rng.gen_bool(0.5) {
        label_groups.push(LabelGroupRule {
            label: "A".into(),
            one_of: ["B", "C"].iter().map(|s| s.to_string()).collect(),
        });
    }
    GraphSchema::new(node_labels, edge_rules, node_attr_rules, label_groups).unwrap()
}

/// A graph over labels `A`..`D` plus an undeclared `X`, with attributes
/// that sometimes satisfy and sometimes break [`small_schema`] rules.
pub fn schema_graph(rng: &mut impl Rng) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let mut ids: Vec<NodeId> = Vec::new();
    let value = |rng: &mut dyn rand::RngCore| -> AttrValue {
        match rng.gen_range(0..5) {
            0 => AttrValue::Float(f64::from(rng.gen_range(-4..=4)) / 2.0),
            1 => AttrValue::Int(rng.gen_range(-1..=3)),
            2 => AttrValue::text(*["a", "b", "z"].choose(rng).unwrap()),
            _ => AttrValue::Bool(rng.gen()),
        }
    };
    let attrs = |rng: &mut dyn rand::RngCore| -> Attrs {
        let mut a = Attrs::new();
        for key in ["v", "name"] {
            if rng.gen_bool(0.7) {
                a.insert(key.to_string(), value(rng));
            }
        }
        a
    };
    for _ in 0..rng.gen_range(0..10) {
        let labels: Vec<&str> = ["A", "B", "C", "D", "X"]
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.35))
            .collect();
        let labels = if labels.is_empty() { vec!["A"] } else { labels };
        let a = attrs(rng);
        ids.push(g.add_node(labels, a).unwrap());
    }
    if !ids.is_empty() {
        for _ in 0..rng.gen_range(0..15) {
            let src = *ids.choose(rng).unwrap();
            let dst = *ids.choose(rng).unwrap();
            let label = *EDGE_LABELS.choose(rng).unwrap();
            let a = attrs(rng);
            g.add_edge(src, dst, label, a).unwrap();
        }
    }
    g
}

/// Grid-valued weights (multiples of 0.5 in [0, 5]) keep every score
/// computation exact, so ties are real ties.
pub struct RankingFixture {
    pub graph: PropertyGraph,
    pub context: ContextSelection,
    pub criteria: CriteriaWeights,
}

pub const FIXTURE_DOMAINS: [&str; 3] = ["D1", "D2", "D3"];
pub const FIXTURE_FUNCTIONS: [&str; 2] = ["F1", "F2"];
pub const FIXTURE_CRITERIA: [(&str, &str); 4] = [
    (vocab::MAINTENANCE, "Re-usability"),
    (vocab::MAINTENANCE, "Modifiability"),
    (vocab::PERFORMANCE_EFFICIENCY, "Time behaviour"),
    (vocab::PERFORMANCE_EFFICIENCY, "Scalability"),
];

pub fn ranking_fixture(rng: &mut impl Rng) -> RankingFixture {
    let mut g = PropertyGraph::new();
    let named = |s: &str| Attrs::from([(vocab::NAME.to_string(), AttrValue::text(s))]);
    let mut targets: Vec<NodeId> = Vec::new();
    for d in FIXTURE_DOMAINS {
        targets.push(g.add_node([vocab::DOMAIN], named(d)).unwrap());
    }
    for f in FIXTURE_FUNCTIONS {
        targets.push(g.add_node([vocab::FUNCTION], named(f)).unwrap());
    }
    for (label, name) in FIXTURE_CRITERIA {
        targets.push(g.add_node([label], named(name)).unwrap());
    }
    targets.push(g.add_node([vocab::MAINTENANCE], named(vocab::HOST_AGENTS)).unwrap());

    let count = rng.gen_range(1..=8);
    // Shuffled insertion order so ties cannot be broken by id by accident.
    let mut names: Vec<String> = (0..count)
        .map(|i| format!("{}:{}", ["HL", "OT", "HT", "OL"][i % 4], i / 4 + 1))
        .collect();
    names.shuffle(rng);
    for name in names {
        let location = *vocab::LOCATION_LABELS.choose(rng).unwrap();
        let attrs = Attrs::from([
            (vocab::NAME.to_string(), AttrValue::text(name.clone())),
            (vocab::COUPLING.to_string(), AttrValue::text(vocab::LOOSE)),
            (vocab::API_CLIENT.to_string(), AttrValue::text(format!("client {name}"))),
            (vocab::CHANNEL.to_string(), AttrValue::text("MQTT")),
        ]);
        let p = g.add_node([vocab::PRACTICE, location], attrs).unwrap();
        for &t in &targets {
            let copies = match rng.gen_range(0..10) {
                0 => 0,
                1 => 2,
                _ => 1,
            };
            for _ in 0..copies {
                let w = f64::from(rng.gen_range(0..=10)) / 2.0;
                g.add_edge(
                    p,
                    t,
                    vocab::WEIGHT,
                    Attrs::from([(vocab::VALUE.to_string(), AttrValue::Float(w))]),
                )
                .unwrap();
            }
        }
    }

    let mut chosen: Vec<&str> = FIXTURE_CRITERIA.iter().map(|(_, n)| *n).collect();
    chosen.shuffle(rng);
    chosen.truncate(rng.gen_range(1..=chosen.len()));
    let mut remaining = 100;
    let mut criteria = CriteriaWeights::new();
    for (i, name) in chosen.iter().enumerate() {
        let pct = if i + 1 == chosen.len() {
            remaining
        } else {
            rng.gen_range(0..=remaining)
        };
        remaining -= pct;
        criteria = criteria.with(name, pct);
    }
    RankingFixture {
        graph: g,
        context: ContextSelection {
            domain: FIXTURE_DOMAINS.choose(rng).unwrap().to_string(),
            function: FIXTURE_FUNCTIONS.choose(rng).unwrap().to_string(),
            require_host_agents: rng.gen_bool(0.5),
        },
        criteria,
    }
}

/// Multiplies every WEIGHT value by `k`.
pub fn scale_weights(graph: &PropertyGraph, k: f64) -> PropertyGraph {
    let mut g = graph.clone();
    let edges: Vec<_> = g
        .edges()
        .filter(|e| e.label == vocab::WEIGHT)
        .map(|e| (e.id, e.attrs[vocab::VALUE].as_f64().unwrap()))
        .collect();
    for (id, v) in edges {
        let attrs = Attrs::from([(vocab::VALUE.to_string(), AttrValue::Float(v * k))]);
        g.update_attrs(ElementRef::Edge(id), attrs).unwrap();
    }
    g
}
