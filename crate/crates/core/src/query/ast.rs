use std::fmt;

use crate::graph::AttrValue;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePattern {
    pub var: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgePattern {
    pub var: Option<String>,
    pub label: Option<String>,
}

impl NodePattern {
    pub fn new(var: Option<&str>, label: Option<&str>) -> Self {
        Self {
            var: var.map(String::from),
            label: label.map(String::from),
        }
    }
}

impl EdgePattern {
    pub fn new(var: Option<&str>, label: Option<&str>) -> Self {
        Self {
            var: var.map(String::from),
            label: label.map(String::from),
        }
    }
}

/// `node (-[edge]-> node)*`, edges pointing left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPattern {
    pub start: NodePattern,
    pub steps: Vec<(EdgePattern, NodePattern)>,
}

impl PathPattern {
    pub fn node(start: NodePattern) -> Self {
        Self {
            start,
            steps: Vec::new(),
        }
    }

    pub fn then(mut self, edge: EdgePattern, node: NodePattern) -> Self {
        self.steps.push((edge, node));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompOp {
    pub const ALL: [CompOp; 6] = [CompOp::Eq, CompOp::Ne, CompOp::Lt, CompOp::Le, CompOp::Gt, CompOp::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            CompOp::Eq => "=",
            CompOp::Ne => "<>",
            CompOp::Lt => "<",
            CompOp::Le => "<=",
            CompOp::Gt => ">",
            CompOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CompOp::Eq => ord == Equal,
            CompOp::Ne => ord != Equal,
            CompOp::Lt => ord == Less,
            CompOp::Le => ord != Greater,
            CompOp::Gt => ord == Greater,
            CompOp::Ge => ord != Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Str(String),
    Num(f64),
    Bool(bool),
}

impl Literal {
    pub fn to_value(&self) -> AttrValue {
        match self {
            Literal::Str(s) => AttrValue::Text(s.clone()),
            Literal::Num(n) => AttrValue::Float(*n),
            Literal::Bool(b) => AttrValue::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Property { var: String, key: String },
    Literal(Literal),
}

impl Operand {
    pub fn prop(var: &str, key: &str) -> Self {
        Operand::Property {
            var: var.into(),
            key: key.into(),
        }
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            Operand::Property { var, .. } => Some(var),
            Operand::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub lhs: Operand,
    pub op: CompOp,
    pub rhs: Operand,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    /// Every named variable, in declaration order.
    All,
    Vars(Vec<String>),
}

/// A parsed `MATCH ... [WHERE ...] RETURN ...` query. Filters are conjunctive.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternQuery {
    pub paths: Vec<PathPattern>,
    pub filters: Vec<Comparison>,
    pub returns: Projection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Node,
    Edge,
}

impl PatternQuery {
    /// Named variables in first-occurrence order.
    pub fn declared_vars(&self) -> Vec<(&str, VarKind)> {
        fn push<'q>(out: &mut Vec<(&'q str, VarKind)>, name: &'q Option<String>, kind: VarKind) {
            if let Some(name) = name {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name, kind));
                }
            }
        }
        let mut out = Vec::new();
        for path in &self.paths {
            push(&mut out, &path.start.var, VarKind::Node);
            for (edge, node) in &path.steps {
                push(&mut out, &edge.var, VarKind::Edge);
                push(&mut out, &node.var, VarKind::Node);
            }
        }
        out
    }

    /// Output column names.
    pub fn columns(&self) -> Vec<String> {
        match &self.returns {
            Projection::All => self.declared_vars().into_iter().map(|(n, _)| n.to_string()).collect(),
            Projection::Vars(vars) => vars.clone(),
        }
    }

    /// Canonical single-line text that parses back to `self`.
    pub fn pretty_print(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn write_string_literal(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

fn write_slot(f: &mut fmt::Formatter<'_>, var: &Option<String>, label: &Option<String>) -> fmt::Result {
    if let Some(v) = var {
        f.write_str(v)?;
    }
    if let Some(l) = label {
        write!(f, ":{l}")?;
    }
    Ok(())
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        write_slot(f, &self.var, &self.label)?;
        f.write_str(")")
    }
}

impl fmt::Display for EdgePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("-[")?;
        write_slot(f, &self.var, &self.label)?;
        f.write_str("]->")
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (edge, node) in &self.steps {
            write!(f, "{edge}{node}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => write_string_literal(f, s),
            Literal::Num(n) => write!(f, "{n}"),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Property { var, key } => write!(f, "{var}.{key}"),
            Operand::Literal(lit) => write!(f, "{lit}"),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

impl fmt::Display for PatternQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MATCH ")?;
        for (i, path) in self.paths.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{path}")?;
        }
        for (i, cmp) in self.filters.iter().enumerate() {
            f.write_str(if i == 0 { " WHERE " } else { " AND " })?;
            write!(f, "{cmp}")?;
        }
        f.write_str(" RETURN ")?;
        match &self.returns {
            Projection::All => f.write_str("*"),
            Projection::Vars(vars) => f.write_str(&vars.join(", ")),
        }
    }
}
