//! Pattern query language: lexer, parser, matcher and templates.

mod ast;
mod boilerplate;
mod error;
mod eval;
mod lexer;
mod parser;
mod result;

pub use ast::{
    CompOp, Comparison, EdgePattern, Literal, NodePattern, Operand, PathPattern, PatternQuery, Projection, VarKind,
};
pub use boilerplate::{expand_boilerplate, Template, TEMPLATES};
pub use error::{BoilerplateError, Position, QueryError};
pub use eval::evaluate;
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::parse;
pub use result::{ElementSnapshot, ResultSet};
