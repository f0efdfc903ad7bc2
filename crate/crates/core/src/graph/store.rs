use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, PoisonError, RwLock};

use thiserror::Error;

use super::{
    load, save, validate_element, Attrs, DocumentError, EdgeId, ElementRef, GraphError, GraphSchema, NodeId,
    PropertyGraph, Violation,
};

/// Whether mutations are checked against the schema as they happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemaMode {
    #[default]
    Strict,
    /// Mutations are applied unchecked; callers run `validate` themselves.
    Permissive,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("mutation violates the schema: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    SchemaViolation(Vec<Violation>),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// Simulated crash points in the persistence protocol, for tests.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PersistFault {
    /// Stop after writing half of the temp file.
    DuringWrite,
    /// Stop after the temp file is complete but before it replaces the document.
    BeforeRename,
}

struct State {
    graph: PropertyGraph,
    schema: GraphSchema,
}

/// A graph and its schema behind a readers-writer lock, optionally backed by
/// a document on disk that is rewritten after every successful mutation.
pub struct GraphStore {
    state: RwLock<State>,
    mode: SchemaMode,
    path: Option<PathBuf>,
    fault: Mutex<Option<PersistFault>>,
}

impl GraphStore {
    pub fn in_memory(graph: PropertyGraph, schema: GraphSchema, mode: SchemaMode) -> Self {
        Self {
            state: RwLock::new(State { graph, schema }),
            mode,
            path: None,
            fault: Mutex::new(None),
        }
    }

    pub fn open(path: impl AsRef<Path>, mode: SchemaMode) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let bytes = fs::read(&path).map_err(|e| StoreError::Io {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let (graph, schema) = load(&bytes)?;
        Ok(Self {
            path: Some(path),
            ..Self::in_memory(graph, schema, mode)
        })
    }

    pub fn mode(&self) -> SchemaMode {
        self.mode
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Runs `f` under a shared read lease.
    pub fn read<R>(&self, f: impl FnOnce(&PropertyGraph, &GraphSchema) -> R) -> R {
        let state = self.state.read().unwrap_or_else(PoisonError::into_inner);
        f(&state.graph, &state.schema)
    }

    /// The current graph document, as it would be written to disk.
    pub fn document(&self) -> Vec<u8> {
        self.read(save)
    }

    #[doc(hidden)]
    pub fn inject_fault(&self, fault: Option<PersistFault>) {
        *self.fault.lock().unwrap_or_else(PoisonError::into_inner) = fault;
    }

    pub fn add_node(&self, labels: Vec<String>, attrs: Attrs) -> Result<NodeId, StoreError> {
        self.mutate(|g| {
            let id = g.add_node(labels, attrs)?;
            Ok((id, Some(ElementRef::Node(id))))
        })
    }

    pub fn add_edge(&self, src: NodeId, dst: NodeId, label: String, attrs: Attrs) -> Result<EdgeId, StoreError> {
        self.mutate(|g| {
            let id = g.add_edge(src, dst, label, attrs)?;
            Ok((id, Some(ElementRef::Edge(id))))
        })
    }

    pub fn update_attrs(&self, element: ElementRef, attrs: Attrs) -> Result<Attrs, StoreError> {
        self.mutate(|g| Ok((g.update_attrs(element, attrs)?, Some(element))))
    }

    pub fn remove(&self, element: ElementRef) -> Result<usize, StoreError> {
        self.mutate(|g| Ok((g.remove(element)?, None)))
    }

    /// Applies `op` under the write lock. In strict mode the touched element
    /// is validated; on a violation or a failed write the graph is restored.
    fn mutate<T>(
        &self,
        op: impl FnOnce(&mut PropertyGraph) -> Result<(T, Option<ElementRef>), GraphError>,
    ) -> Result<T, StoreError> {
        let mut state = self.state.write().unwrap_or_else(PoisonError::into_inner);
        let backup = state.graph.clone();
        let (out, touched) = op(&mut state.graph)?;

        if let (SchemaMode::Strict, Some(element)) = (self.mode, touched) {
            let violations = validate_element(&state.graph, &state.schema, element);
            if !violations.is_empty() {
                state.graph = backup;
                return Err(StoreError::SchemaViolation(violations));
            }
        }

        if let Some(path) = &self.path {
            let bytes = save(&state.graph, &state.schema);
            let fault = *self.fault.lock().unwrap_or_else(PoisonError::into_inner);
            if let Err(e) = write_atomic(path, &bytes, fault) {
                state.graph = backup;
                return Err(StoreError::Io {
                    path: path.clone(),
                    message: e.to_string(),
                });
            }
        }
        Ok(out)
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Saves `graph` and `schema` to `path` with the same atomic replace the
/// store uses.
pub fn write_document(path: &Path, graph: &PropertyGraph, schema: &GraphSchema) -> Result<(), StoreError> {
    write_atomic(path, &save(graph, schema), None).map_err(|e| StoreError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes `bytes` to a sibling temp file, syncs it, then renames it over
/// `path`. Readers of `path` see either the old or the new document.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8], fault: Option<PersistFault>) -> std::io::Result<()> {
    let tmp = temp_path(path);
    let mut file = File::create(&tmp)?;
    if fault == Some(PersistFault::DuringWrite) {
        file.write_all(&bytes[..bytes.len() / 2])?;
        return Err(std::io::Error::other("injected crash during temp write"));
    }
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    if fault == Some(PersistFault::BeforeRename) {
        return Err(std::io::Error::other("injected crash before rename"));
    }
    fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        // Not every platform can fsync a directory.
        let _ = File::open(dir).and_then(|d| d.sync_all());
    }
    Ok(())
}
