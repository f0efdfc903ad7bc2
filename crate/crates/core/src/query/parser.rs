//! Recursive-descent parser for the pattern-query grammar:
//!
//! ```text
//! query := MATCH path (',' path)* (WHERE comp (AND comp)*)? RETURN ('*' | ident (',' ident)*)
//! path  := node (edge node)*
//! node  := '(' ident? (':' label)? ')'
//! edge  := '-[' ident? (':' label)? ']->'
//! comp  := operand comparator operand
//! operand := ident '.' ident | string | number | boolean
//! ```

use std::collections::HashMap;

use super::ast::*;
use super::lexer::{lex, Keyword, Token, TokenKind};
use super::{Position, QueryError};

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: Position,
    decls: Vec<(String, VarKind, Option<Position>)>,
    refs: Vec<(String, Option<Position>)>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error(&self, expected: &str) -> QueryError {
        let (position, found) = match self.peek() {
            Some(tok) => (tok.position, tok.describe()),
            None => (self.end, "end of input".to_string()),
        };
        QueryError::Parse {
            position,
            expected: expected.to_string(),
            found,
        }
    }

    fn eat_punct(&mut self, symbol: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(symbol)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, symbol: &str, expected: &str) -> Result<(), QueryError> {
        if self.eat_punct(symbol) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        if self.peek().is_some_and(|t| t.kind == TokenKind::Keyword(kw)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<(String, Position)> {
        match self.peek() {
            Some(tok) if tok.kind == TokenKind::Ident => {
                let out = (tok.text.clone(), tok.position);
                self.pos += 1;
                Some(out)
            }
            _ => None,
        }
    }

    fn query(&mut self) -> Result<PatternQuery, QueryError> {
        if !self.eat_keyword(Keyword::Match) {
            return Err(self.error("MATCH"));
        }
        let mut paths = vec![self.path()?];
        while self.eat_punct(",") {
            paths.push(self.path()?);
        }

        let mut filters = Vec::new();
        if self.eat_keyword(Keyword::Where) {
            filters.push(self.comparison()?);
            while self.eat_keyword(Keyword::And) {
                filters.push(self.comparison()?);
            }
        }

        if !self.eat_keyword(Keyword::Return) {
            let expected = if filters.is_empty() {
                "'-', ',', WHERE or RETURN"
            } else {
                "AND or RETURN"
            };
            return Err(self.error(expected));
        }
        let returns = if self.eat_punct("*") {
            Projection::All
        } else {
            let mut vars = Vec::new();
            loop {
                let Some((name, position)) = self.ident() else {
                    return Err(self.error(if vars.is_empty() {
                        "'*' or identifier"
                    } else {
                        "identifier"
                    }));
                };
                if vars.contains(&name) {
                    return Err(QueryError::Parse {
                        position,
                        expected: "distinct return variable".into(),
                        found: format!("duplicate `{name}`"),
                    });
                }
                self.refs.push((name.clone(), Some(position)));
                vars.push(name);
                if !self.eat_punct(",") {
                    break;
                }
            }
            Projection::Vars(vars)
        };
        if self.peek().is_some() {
            return Err(self.error("end of input"));
        }
        Ok(PatternQuery {
            paths,
            filters,
            returns,
        })
    }

    fn path(&mut self) -> Result<PathPattern, QueryError> {
        let start = self.node()?;
        let mut steps = Vec::new();
        while self.eat_punct("-") {
            self.expect_punct("[", "'['")?;
            let (var, label) = self.slot(VarKind::Edge)?;
            self.expect_punct("]", if label.is_none() { "':' or ']'" } else { "']'" })?;
            self.expect_punct("->", "'->'")?;
            steps.push((EdgePattern { var, label }, self.node()?));
        }
        Ok(PathPattern { start, steps })
    }

    fn node(&mut self) -> Result<NodePattern, QueryError> {
        self.expect_punct("(", "'('")?;
        let (var, label) = self.slot(VarKind::Node)?;
        self.expect_punct(")", if label.is_none() { "':' or ')'" } else { "')'" })?;
        Ok(NodePattern { var, label })
    }

    /// `ident? (':' label)?` inside a node or edge pattern.
    fn slot(&mut self, kind: VarKind) -> Result<(Option<String>, Option<String>), QueryError> {
        let var = self.ident().map(|(name, position)| {
            self.decls.push((name.clone(), kind, Some(position)));
            name
        });
        let closing = match kind {
            VarKind::Node => ")",
            VarKind::Edge => "]",
        };
        let label = if self.eat_punct(":") {
            Some(self.ident().ok_or_else(|| self.error("label"))?.0)
        } else if var.is_none() && !self.peek().is_some_and(|t| t.is_punct(closing)) {
            return Err(self.error("identifier or ':'"));
        } else {
            None
        };
        Ok((var, label))
    }

    fn comparison(&mut self) -> Result<Comparison, QueryError> {
        let start = self.peek().map(|t| t.position);
        let lhs = self.operand()?;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Comparator(op)) => *op,
            _ => return Err(self.error("comparison operator")),
        };
        self.pos += 1;
        let rhs = self.operand()?;
        if lhs.var().is_none() && rhs.var().is_none() {
            return Err(QueryError::LiteralComparison { position: start });
        }
        Ok(Comparison { lhs, op, rhs })
    }

    fn operand(&mut self) -> Result<Operand, QueryError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("property reference or literal"));
        };
        let lit = match tok.kind {
            TokenKind::Str(s) => Literal::Str(s),
            TokenKind::Number(n) => Literal::Num(n),
            TokenKind::Bool(b) => Literal::Bool(b),
            TokenKind::Ident => {
                self.pos += 1;
                self.refs.push((tok.text.clone(), Some(tok.position)));
                self.expect_punct(".", "'.'")?;
                let (key, _) = self.ident().ok_or_else(|| self.error("property key"))?;
                return Ok(Operand::Property { var: tok.text, key });
            }
            _ => return Err(self.error("property reference or literal")),
        };
        self.pos += 1;
        Ok(Operand::Literal(lit))
    }
}

/// Variable-scope rules shared by parsed and programmatically built queries:
/// a name binds to one element kind, and every referenced name is declared.
pub(crate) fn check_scopes<'a>(
    decls: impl IntoIterator<Item = (&'a str, VarKind, Option<Position>)>,
    refs: impl IntoIterator<Item = (&'a str, Option<Position>)>,
) -> Result<(), QueryError> {
    let mut kinds: HashMap<&str, VarKind> = HashMap::new();
    for (name, kind, position) in decls {
        match kinds.get(name) {
            Some(k) if *k != kind => {
                return Err(QueryError::VariableKindConflict {
                    name: name.to_string(),
                    position,
                })
            }
            _ => {
                kinds.insert(name, kind);
            }
        }
    }
    for (name, position) in refs {
        if !kinds.contains_key(name) {
            return Err(QueryError::UndeclaredVariable {
                name: name.to_string(),
                position,
            });
        }
    }
    Ok(())
}

impl PatternQuery {
    /// Checks a query built without the parser against the same rules
    /// `parse` enforces.
    pub fn check(&self) -> Result<(), QueryError> {
        if self.paths.is_empty() {
            return Err(QueryError::Parse {
                position: Position::new(1, 1),
                expected: "at least one path".into(),
                found: "none".into(),
            });
        }
        if self
            .filters
            .iter()
            .any(|c| c.lhs.var().is_none() && c.rhs.var().is_none())
        {
            return Err(QueryError::LiteralComparison { position: None });
        }
        let mut decls = Vec::new();
        for path in &self.paths {
            decls.extend(path.start.var.as_deref().map(|v| (v, VarKind::Node, None)));
            for (e, n) in &path.steps {
                decls.extend(e.var.as_deref().map(|v| (v, VarKind::Edge, None)));
                decls.extend(n.var.as_deref().map(|v| (v, VarKind::Node, None)));
            }
        }
        let filter_refs = self
            .filters
            .iter()
            .flat_map(|c| [c.lhs.var(), c.rhs.var()])
            .flatten()
            .map(|v| (v, None));
        let return_refs: Vec<(&str, Option<Position>)> = match &self.returns {
            Projection::All => Vec::new(),
            Projection::Vars(vars) => vars.iter().map(|v| (v.as_str(), None)).collect(),
        };
        check_scopes(decls, filter_refs.chain(return_refs))
    }
}

pub fn parse(text: &str) -> Result<PatternQuery, QueryError> {
    let (tokens, end) = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
        decls: Vec::new(),
        refs: Vec::new(),
    };
    let query = parser.query()?;
    check_scopes(
        parser.decls.iter().map(|(n, k, p)| (n.as_str(), *k, *p)),
        parser.refs.iter().map(|(n, p)| (n.as_str(), *p)),
    )?;
    Ok(query)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const QUERY_ONE: &str =
        "MATCH(h:Hybrid)-[w:WEIGHT]->(d:Domain)\nWHERE w.value > 2\nAND d.name = \"Factory Automation\"\nRETURN *";

    #[test]
    fn parses_the_hybrid_factory_query() {
        let q = parse(QUERY_ONE).unwrap();
        let expected = PatternQuery {
            paths: vec![PathPattern::node(NodePattern::new(Some("h"), Some("Hybrid"))).then(
                EdgePattern::new(Some("w"), Some("WEIGHT")),
                NodePattern::new(Some("d"), Some("Domain")),
            )],
            filters: vec![
                Comparison {
                    lhs: Operand::prop("w", "value"),
                    op: CompOp::Gt,
                    rhs: Operand::Literal(Literal::Num(2.0)),
                },
                Comparison {
                    lhs: Operand::prop("d", "name"),
                    op: CompOp::Eq,
                    rhs: Operand::Literal(Literal::Str("Factory Automation".into())),
                },
            ],
            returns: Projection::All,
        };
        assert_eq!(q, expected);
        assert_eq!(
            q.pretty_print(),
            "MATCH (h:Hybrid)-[w:WEIGHT]->(d:Domain) WHERE w.value > 2 AND d.name = \"Factory Automation\" RETURN *"
        );
        assert_eq!(q.columns(), ["h", "w", "d"]);
    }

    #[test]
    fn minimal_query() {
        let q = parse("MATCH (n) RETURN n").unwrap();
        assert_eq!(q.paths, vec![PathPattern::node(NodePattern::new(Some("n"), None))]);
        assert!(q.filters.is_empty());
        assert_eq!(q.returns, Projection::Vars(vec!["n".into()]));
        assert_eq!(q.pretty_print(), "MATCH (n) RETURN n");
    }

    #[test]
    fn undeclared_return_variable() {
        let err = parse("MATCH (a)-[r:WEIGHT]->(b) RETURN x").unwrap_err();
        assert_eq!(
            err,
            QueryError::UndeclaredVariable {
                name: "x".into(),
                position: Some(Position::new(1, 34))
            }
        );
        assert!(matches!(
            parse("MATCH (a) WHERE b.name = 1 RETURN a"),
            Err(QueryError::UndeclaredVariable { .. })
        ));
    }

    #[test]
    fn open_node_reports_expected_identifier() {
        let err = parse("MATCH (").unwrap_err();
        assert_eq!(
            err.to_string(),
            "expected identifier or ':' at 1:8 (found end of input)"
        );
    }

    #[test]
    fn kind_conflicts_and_literal_comparisons() {
        assert!(matches!(
            parse("MATCH (a)-[a]->(b) RETURN *"),
            Err(QueryError::VariableKindConflict { .. })
        ));
        assert!(matches!(
            parse("MATCH (a) WHERE 1 = 1 RETURN *"),
            Err(QueryError::LiteralComparison { .. })
        ));
    }

    #[test]
    fn variable_reuse_across_paths() {
        let q = parse("MATCH (p:Practice)-[:WEIGHT]->(d), (p)-[w]->(f:Function) RETURN p, w").unwrap();
        assert_eq!(q.paths.len(), 2);
        assert_eq!(q.columns(), ["p", "w"]);
        assert_eq!(
            q.pretty_print(),
            "MATCH (p:Practice)-[:WEIGHT]->(d), (p)-[w]->(f:Function) RETURN p, w"
        );
        let anon = parse("MATCH ()-[]->(:X) RETURN *").unwrap();
        assert_eq!(anon.pretty_print(), "MATCH ()-[]->(:X) RETURN *");
        assert!(anon.columns().is_empty());
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let cases = [
            ("", Position::new(1, 1), "MATCH"),
            ("MATCH (a", Position::new(1, 9), "':' or ')'"),
            ("MATCH (a:)", Position::new(1, 10), "label"),
            ("MATCH (a)-(b)", Position::new(1, 11), "'['"),
            ("MATCH (a)-[r]-(b)", Position::new(1, 14), "'->'"),
            ("MATCH (a) RETURN", Position::new(1, 17), "'*' or identifier"),
            (
                "MATCH (a) WHERE a.x RETURN a",
                Position::new(1, 21),
                "comparison operator",
            ),
            ("MATCH (a) WHERE a.x = 1 a", Position::new(1, 25), "AND or RETURN"),
            ("MATCH (a) RETURN a b", Position::new(1, 20), "end of input"),
            ("MATCH (a) RETURN *, a", Position::new(1, 19), "end of input"),
        ];
        for (text, position, expected) in cases {
            match parse(text) {
                Err(QueryError::Parse {
                    position: p,
                    expected: e,
                    ..
                }) => {
                    assert_eq!((p, e.as_str()), (position, expected), "{text}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse("MATCH (a) RETURN a, a"), Err(QueryError::Parse { .. })));
    }
}
