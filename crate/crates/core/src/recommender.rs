//! Percentage-weighted practice scoring.
//!
//! A practice's final score is its criteria term, the percentage-weighted sum
//! of its criteria weights, times the mean of its domain and function
//! weights. Missing weight edges count as 0 and parallel edges are averaged.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{vocab, Node, NodeId, PropertyGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContextSelection {
    pub domain: String,
    pub function: String,
    #[serde(default)]
    pub require_host_agents: bool,
}

/// Characteristic name to integer percentage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CriteriaWeights(pub BTreeMap<String, i64>);

impl CriteriaWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, pct: i64) -> Self {
        self.0.insert(name.to_string(), pct);
        self
    }

    pub fn sum(&self) -> i128 {
        self.0.values().map(|&p| i128::from(p)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

impl<K: Into<String>> FromIterator<(K, i64)> for CriteriaWeights {
    fn from_iter<I: IntoIterator<Item = (K, i64)>>(iter: I) -> Self {
        CriteriaWeights(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("criteria percentages must total 100, got {actual}")]
    SumNot100 { actual: i128 },
    #[error("unknown criteria characteristic `{name}`")]
    UnknownCharacteristic { name: String },
    #[error("percentage for `{name}` must be between 0 and 100")]
    OutOfRange { name: String },
}

impl CriteriaError {
    pub fn code(&self) -> &'static str {
        match self {
            CriteriaError::SumNot100 { .. } => "SumNot100",
            CriteriaError::UnknownCharacteristic { .. } => "UnknownCharacteristic",
            CriteriaError::OutOfRange { .. } => "OutOfRange",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("{}", join_errors(.0))]
    InvalidCriteria(Vec<CriteriaError>),
    #[error("unknown {field} `{name}`")]
    UnknownContext { field: &'static str, name: String },
}

fn join_errors(errors: &[CriteriaError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl ReportError {
    pub fn code(&self) -> &'static str {
        match self {
            ReportError::InvalidCriteria(errors) => errors.first().map_or("InvalidCriteria", CriteriaError::code),
            ReportError::UnknownContext { .. } => "UnknownContext",
        }
    }
}

/// Checks that only need the criteria themselves: ranges and the total.
pub fn check_criteria_shape(criteria: &CriteriaWeights) -> Result<(), Vec<CriteriaError>> {
    let mut errors: Vec<CriteriaError> = criteria
        .iter()
        .filter(|(_, pct)| !(0..=100).contains(pct))
        .map(|(name, _)| CriteriaError::OutOfRange { name: name.into() })
        .collect();
    if criteria.sum() != 100 {
        errors.insert(0, CriteriaError::SumNot100 { actual: criteria.sum() });
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn is_criteria_node(node: &Node) -> bool {
    vocab::CRITERIA_LABELS.iter().any(|l| node.has_label(l))
}

/// Shape checks first; the graph is consulted only when they pass.
pub fn validate_criteria(criteria: &CriteriaWeights, graph: &PropertyGraph) -> Result<(), Vec<CriteriaError>> {
    check_criteria_shape(criteria)?;
    let unknown: Vec<CriteriaError> = criteria
        .iter()
        .filter(|(name, _)| {
            *name == vocab::HOST_AGENTS
                || !graph
                    .nodes()
                    .any(|n| is_criteria_node(n) && n.text_attr(vocab::NAME) == Some(name))
        })
        .map(|(name, _)| CriteriaError::UnknownCharacteristic { name: name.into() })
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(unknown)
    }
}

/// Mean WEIGHT value from `practice` to characteristics named `name` that
/// carry a label accepted by `family`; 0 when there is no such edge.
fn weight_sum_count(graph: &PropertyGraph, practice: NodeId, name: &str, family: impl Fn(&Node) -> bool) -> (f64, u32) {
    let mut sum = 0.0;
    let mut count = 0;
    for edge in graph.out_edges(practice).filter(|e| e.label == vocab::WEIGHT) {
        let Some(dst) = graph.node(edge.dst) else { continue };
        if !family(dst) || dst.text_attr(vocab::NAME) != Some(name) {
            continue;
        }
        if let Some(v) = edge.attrs.get(vocab::VALUE).and_then(|v| v.as_f64()) {
            sum += v;
            count += 1;
        }
    }
    (sum, count)
}

fn weight(graph: &PropertyGraph, practice: NodeId, name: &str, family: impl Fn(&Node) -> bool) -> f64 {
    match weight_sum_count(graph, practice, name, family) {
        (_, 0) => 0.0,
        (sum, n) => sum / f64::from(n),
    }
}

fn labelled(label: &'static str) -> impl Fn(&Node) -> bool {
    move |n: &Node| n.has_label(label)
}

/// Σ pct·w, still scaled by 100.
fn criteria_sum(practice: NodeId, criteria: &CriteriaWeights, graph: &PropertyGraph) -> f64 {
    criteria
        .iter()
        .map(|(name, pct)| pct as f64 * weight(graph, practice, name, is_criteria_node))
        .sum()
}

fn context_sum(practice: NodeId, context: &ContextSelection, graph: &PropertyGraph) -> f64 {
    weight(graph, practice, &context.domain, labelled(vocab::DOMAIN))
        + weight(graph, practice, &context.function, labelled(vocab::FUNCTION))
}

/// Σ (pct/100)·w over the criteria entries.
pub fn cumulative_weight(practice: NodeId, criteria: &CriteriaWeights, graph: &PropertyGraph) -> f64 {
    criteria_sum(practice, criteria, graph) / 100.0
}

/// Mean of the domain and function weights.
pub fn context_average(practice: NodeId, context: &ContextSelection, graph: &PropertyGraph) -> f64 {
    context_sum(practice, context, graph) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PracticeScore {
    pub name: String,
    pub api_client: String,
    pub channel: String,
    #[serde(skip)]
    pub cumulative: f64,
    #[serde(skip)]
    pub context_avg: f64,
    pub final_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PracticeReport {
    pub rows: Vec<PracticeScore>,
    pub recommended: Option<String>,
    pub excluded: Vec<String>,
}

fn resolve_context(context: &ContextSelection, graph: &PropertyGraph) -> Result<(), ReportError> {
    for (field, label, name) in [
        ("domain", vocab::DOMAIN, &context.domain),
        ("function", vocab::FUNCTION, &context.function),
    ] {
        if graph.find_named(label, name).next().is_none() {
            return Err(ReportError::UnknownContext {
                field,
                name: name.clone(),
            });
        }
    }
    Ok(())
}

/// Scores every practice and ranks them by final score, ties by name.
pub fn generate_report(
    context: &ContextSelection,
    criteria: &CriteriaWeights,
    graph: &PropertyGraph,
) -> Result<PracticeReport, ReportError> {
    check_criteria_shape(criteria).map_err(ReportError::InvalidCriteria)?;
    validate_criteria(criteria, graph).map_err(ReportError::InvalidCriteria)?;
    resolve_context(context, graph)?;

    let mut scored: Vec<(PracticeScore, NodeId)> = Vec::new();
    let mut excluded = Vec::new();
    for practice in graph.nodes_with_label(vocab::PRACTICE) {
        let name = practice.text_attr(vocab::NAME).unwrap_or_default().to_string();
        if context.require_host_agents
            && weight(graph, practice.id, vocab::HOST_AGENTS, |n| {
                n.has_label(vocab::MAINTENANCE)
            }) <= 0.0
        {
            excluded.push(name);
            continue;
        }
        let crit = criteria_sum(practice.id, criteria, graph);
        let ctx = context_sum(practice.id, context, graph);
        scored.push((
            PracticeScore {
                name,
                api_client: practice.text_attr(vocab::API_CLIENT).unwrap_or_default().to_string(),
                channel: practice.text_attr(vocab::CHANNEL).unwrap_or_default().to_string(),
                cumulative: crit / 100.0,
                context_avg: ctx / 2.0,
                // One rounding step, so equal scores compare equal.
                final_score: crit * ctx / 200.0,
            },
            practice.id,
        ));
    }
    scored.sort_by(|(a, ia), (b, ib)| {
        b.final_score
            .total_cmp(&a.final_score)
            .then_with(|| a.name.cmp(&b.name))
            .then(ia.cmp(ib))
    });
    excluded.sort();
    let rows: Vec<PracticeScore> = scored.into_iter().map(|(s, _)| s).collect();
    Ok(PracticeReport {
        recommended: rows.first().map(|r| r.name.clone()),
        rows,
        excluded,
    })
}

pub fn recommend(report: &PracticeReport) -> Option<&str> {
    report.recommended.as_deref()
}

/// Two decimals, halves rounded away from zero on the exact binary value.
pub fn format_score(score: f64) -> String {
    // f64 has at most 1074 fractional binary digits, so this expansion is exact.
    let exact = format!("{:.1074}", score.abs());
    let (int_part, frac) = exact.split_once('.').expect("fixed precision has a point");
    let mut digits: Vec<u8> = int_part.bytes().chain(frac.bytes().take(2)).map(|b| b - b'0').collect();
    if frac.as_bytes()[2] >= b'5' {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - 2;
    let mut out = String::new();
    if score.is_sign_negative() && digits.iter().any(|&d| d != 0) {
        out.push('-');
    }
    for (i, d) in digits.iter().enumerate() {
        if i == split {
            out.push('.');
        }
        out.push(char::from(b'0' + d));
    }
    out
}

impl PracticeReport {
    /// Padded table; the recommended row ends in `*`.
    pub fn render_table(&self) -> String {
        let header = ["NAME", "API CLIENT", "CHANNEL", "FINAL-SCORE"];
        let body: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    r.api_client.clone(),
                    r.channel.clone(),
                    format_score(r.final_score),
                ]
            })
            .collect();
        let mut widths = header.map(|h| h.chars().count());
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: [&str; 4], mark: bool| {
            let _ = write!(
                out,
                "{:<w0$} | {:<w1$} | {:<w2$} | {:>w3$}",
                cells[0],
                cells[1],
                cells[2],
                cells[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            );
            out.push_str(if mark { " *\n" } else { "\n" });
        };
        line(&mut out, header, false);
        for (i, row) in body.iter().enumerate() {
            let cells = [row[0].as_str(), row[1].as_str(), row[2].as_str(), row[3].as_str()];
            line(&mut out, cells, i == 0 && self.recommended.is_some());
        }
        if !self.excluded.is_empty() {
            let _ = writeln!(out, "excluded (cannot host agents): {}", self.excluded.join(", "));
        }
        out
    }
}

impl fmt::Display for PracticeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_table())
    }
}
