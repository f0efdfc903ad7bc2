//! Embedded property-graph store.
//!
//! A [`PropertyGraph`] is a directed multigraph of labeled nodes and labeled
//! edges, both carrying typed key/value attributes. [`GraphSchema`] declares
//! which labels and edge types are allowed; it is checked by [`validate`] or,
//! for a [`GraphStore`] opened in strict mode, on every mutation.

mod document;
mod error;
mod matrix;
mod model;
mod schema;
mod store;
mod value;

pub use document::{load, save, DOCUMENT_VERSION};
pub use error::{DocumentError, GraphError, ImportError, SchemaError};
pub use matrix::{export_matrix, import_matrix, import_matrix_with, ImportOptions, MatrixTables};
pub use model::{attrs, Attrs, Edge, EdgeId, ElementRef, Node, NodeId, PropertyGraph};
pub use schema::{validate, validate_element, vocab, AttrRule, EdgeTypeRule, GraphSchema, LabelGroupRule, Violation};
pub use store::{write_document, GraphStore, PersistFault, SchemaMode, StoreError};
pub use value::{AttrKind, AttrValue, KindMismatch};
