//! CSV ingestion of the practice table and practice x characteristic weight
//! matrix, and the reverse export.

use std::collections::{BTreeMap, HashMap};

use super::schema::vocab::*;
use super::{attrs, AttrValue, Attrs, ImportError, NodeId, PropertyGraph};

const PRACTICE_HEADER: [&str; 5] = [NAME, "location", COUPLING, API_CLIENT, CHANNEL];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImportOptions {
    /// Reject weights outside `[0, 5]` instead of importing them as-is.
    pub check_range: bool,
}

impl Default for ImportOptions {
    fn default() -> Self {
        Self { check_range: true }
    }
}

/// Imports with the weight range enforced.
pub fn import_matrix(practices: &[u8], weights: &[u8]) -> Result<PropertyGraph, ImportError> {
    import_matrix_with(practices, weights, ImportOptions::default())
}

pub fn import_matrix_with(
    practices: &[u8],
    weights: &[u8],
    options: ImportOptions,
) -> Result<PropertyGraph, ImportError> {
    let mut graph = PropertyGraph::new();
    let by_name = read_practices(&mut graph, practices)?;
    read_weights(&mut graph, &by_name, weights, options)?;
    Ok(graph)
}

fn malformed(table: &'static str, line: Option<u64>, message: impl Into<String>) -> ImportError {
    ImportError::MalformedTable {
        table,
        line,
        message: message.into(),
    }
}

fn csv_error(table: &'static str, err: csv::Error) -> ImportError {
    let line = err.position().map(|p| p.line());
    malformed(table, line, err.to_string())
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes)
}

fn read_practices(graph: &mut PropertyGraph, bytes: &[u8]) -> Result<HashMap<String, NodeId>, ImportError> {
    const TABLE: &str = "practices";
    let mut rdr = reader(bytes);
    let header = rdr.headers().map_err(|e| csv_error(TABLE, e))?.clone();
    if header.iter().ne(PRACTICE_HEADER) {
        return Err(malformed(
            TABLE,
            Some(1),
            format!("expected header `{}`", PRACTICE_HEADER.join(",")),
        ));
    }
    let mut by_name = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(TABLE, e))?;
        let line = record.position().map(|p| p.line());
        let field = |i: usize| record.get(i).unwrap_or_default();
        let (name, location, coupling) = (field(0), field(1), field(2));
        if name.is_empty() {
            return Err(malformed(TABLE, line, "empty practice name"));
        }
        if !LOCATION_LABELS.contains(&location) {
            return Err(malformed(
                TABLE,
                line,
                format!("location must be one of {LOCATION_LABELS:?}, got {location:?}"),
            ));
        }
        if coupling != TIGHT && coupling != LOOSE {
            return Err(malformed(
                TABLE,
                line,
                format!("coupling must be `{TIGHT}` or `{LOOSE}`, got {coupling:?}"),
            ));
        }
        if by_name.contains_key(name) {
            return Err(malformed(TABLE, line, format!("duplicate practice {name:?}")));
        }
        let id = graph
            .add_node(
                [PRACTICE, location],
                attrs([
                    (NAME, name),
                    (COUPLING, coupling),
                    (API_CLIENT, field(3)),
                    (CHANNEL, field(4)),
                ]),
            )
            .expect("practice labels are non-empty");
        by_name.insert(name.to_string(), id);
    }
    Ok(by_name)
}

fn read_weights(
    graph: &mut PropertyGraph,
    practices: &HashMap<String, NodeId>,
    bytes: &[u8],
    options: ImportOptions,
) -> Result<(), ImportError> {
    const TABLE: &str = "weights";
    let mut rdr = reader(bytes);
    let header = rdr.headers().map_err(|e| csv_error(TABLE, e))?.clone();
    if header.get(0) != Some(NAME) {
        return Err(malformed(TABLE, Some(1), "first column header must be `name`"));
    }

    let mut seen: BTreeMap<(String, String), NodeId> = BTreeMap::new();
    let mut columns = Vec::new();
    for col in header.iter().skip(1) {
        let Some((label, name)) = col.split_once(':') else {
            return Err(ImportError::UnknownCharacteristicLabel { header: col.into() });
        };
        let (label, name) = (label.trim(), name.trim());
        if !CHARACTERISTIC_LABELS.contains(&label) {
            return Err(ImportError::UnknownCharacteristicLabel { header: col.into() });
        }
        if name.is_empty() {
            return Err(malformed(TABLE, Some(1), format!("column `{col}` has no name")));
        }
        let id = *seen.entry((label.to_string(), name.to_string())).or_insert_with(|| {
            graph
                .add_node([label], attrs([(NAME, name)]))
                .expect("characteristic labels are non-empty")
        });
        columns.push((col.to_string(), id));
    }

    let mut rows_seen = HashMap::new();
    let mut pending = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(TABLE, e))?;
        let line = record.position().map(|p| p.line());
        let practice = record.get(0).unwrap_or_default();
        let Some(&src) = practices.get(practice) else {
            return Err(malformed(
                TABLE,
                line,
                format!("row {practice:?} is not a listed practice"),
            ));
        };
        if rows_seen.insert(practice.to_string(), ()).is_some() {
            return Err(malformed(TABLE, line, format!("duplicate row for {practice:?}")));
        }
        for (cell, (col, dst)) in record.iter().skip(1).zip(&columns) {
            if cell.is_empty() {
                continue;
            }
            let value: f64 =
                cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                    malformed(TABLE, line, format!("cell {cell:?} in column `{col}` is not a number"))
                })?;
            if options.check_range && !(WEIGHT_MIN..=WEIGHT_MAX).contains(&value) {
                return Err(ImportError::WeightOutOfRange {
                    practice: practice.to_string(),
                    column: col.clone(),
                    value,
                });
            }
            pending.push((src, *dst, value));
        }
    }
    for (src, dst, value) in pending {
        let mut a = Attrs::new();
        a.insert(VALUE.to_string(), AttrValue::Float(value));
        graph
            .add_edge(src, dst, WEIGHT, a)
            .expect("endpoints were just created");
    }
    Ok(())
}

/// CSV text of both import tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixTables {
    pub practices: String,
    pub weights: String,
}

/// Writes the graph back out in import format. Columns follow characteristic
/// node order; a practice without an edge to a column gets an empty cell.
pub fn export_matrix(graph: &PropertyGraph) -> MatrixTables {
    let practices: Vec<_> = graph.nodes_with_label(PRACTICE).collect();
    let characteristics: Vec<(&str, _)> = graph
        .nodes()
        .filter_map(|n| CHARACTERISTIC_LABELS.iter().find(|l| n.has_label(l)).map(|l| (*l, n)))
        .collect();

    let mut pw = csv::Writer::from_writer(Vec::new());
    pw.write_record(PRACTICE_HEADER).expect("in-memory write");
    for p in &practices {
        let location = LOCATION_LABELS.iter().find(|l| p.has_label(l)).copied().unwrap_or("");
        let text = |k: &str| p.text_attr(k).unwrap_or_default().to_string();
        pw.write_record([
            text(NAME),
            location.to_string(),
            text(COUPLING),
            text(API_CLIENT),
            text(CHANNEL),
        ])
        .expect("in-memory write");
    }

    let mut ww = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once(NAME.to_string())
        .chain(
            characteristics
                .iter()
                .map(|(label, n)| format!("{label}:{}", n.text_attr(NAME).unwrap_or_default())),
        )
        .collect();
    ww.write_record(&header).expect("in-memory write");
    for p in &practices {
        let mut row = vec![p.text_attr(NAME).unwrap_or_default().to_string()];
        for (_, c) in &characteristics {
            let cell = graph
                .edges_between(p.id, c.id)
                .into_iter()
                .find(|e| e.label == WEIGHT)
                .and_then(|e| e.attrs.get(VALUE))
                .map(|v| v.to_string())
                .unwrap_or_default();
            row.push(cell);
        }
        ww.write_record(&row).expect("in-memory write");
    }

    let into_string = |w: csv::Writer<Vec<u8>>| {
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    };
    MatrixTables {
        practices: into_string(pw),
        weights: into_string(ww),
    }
}
