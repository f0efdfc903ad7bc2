//! The `iaselect` command line: import, query, report and serve.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iaselect_core::graph::{
    import_matrix_with, validate, GraphSchema, GraphStore, ImportError, ImportOptions, PropertyGraph, SchemaMode,
};
use iaselect_core::query::{evaluate, parse, ElementSnapshot, QueryError, ResultSet};
use iaselect_core::recommender::{ContextSelection, CriteriaWeights, PracticeReport};
use iaselect_service::{json_body, report, router, serve, ReportRequest, ServiceConfig, TokenFileError, TokenTable};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SCHEMA: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_ENVIRONMENT: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "iaselect", version, about = "Select industrial-agent interface practices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph document from a practices table and a weights matrix.
    Import(ImportArgs),
    /// Run a pattern query against a graph document.
    Query(QueryArgs),
    /// Rank practices for a context and weighted criteria.
    Report(ReportArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct DbArg {
    /// Graph document.
    #[arg(long, env = "IASELECT_DB")]
    pub db: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    #[arg(long)]
    pub practices: PathBuf,
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Reject out-of-range weights and any schema violation.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub db: DbArg,
    /// Query text.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub text: Option<String>,
    /// Read the query from a file.
    #[arg(short = 'f', long = "file")]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub db: DbArg,
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub function: String,
    /// Drop practices that cannot host agents.
    #[arg(long)]
    pub host_agents: bool,
    /// Criterion percentage, `NAME=PCT`. Repeat for each criterion.
    #[arg(long = "weight", value_parser = parse_weight)]
    pub weights: Vec<(String, i64)>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub db: DbArg,
    #[arg(long, default_value_t = 8080, value_parser = clap::value_parser!(u16).range(1..))]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Refuse every mutation.
    #[arg(long)]
    pub readonly: bool,
    /// JSON object mapping bearer tokens to "user" or "admin".
    #[arg(long)]
    pub tokens: Option<PathBuf>,
    /// Browser origin allowed to call the API. Repeatable.
    #[arg(long = "cors-origin")]
    pub cors_origins: Vec<String>,
    /// Accept mutations that violate the schema.
    #[arg(long)]
    pub permissive: bool,
}

fn parse_weight(s: &str) -> Result<(String, i64), String> {
    let (name, pct) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected NAME=PCT, got `{s}`"))?;
    let pct = pct
        .trim()
        .parse()
        .map_err(|_| format!("percentage in `{s}` is not an integer"))?;
    Ok((name.trim().to_string(), pct))
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Import(a) => cmd_import(&a, err),
        Command::Query(a) => cmd_query(&a, out),
        Command::Report(a) => cmd_report(&a, out),
        Command::Serve(a) => cmd_serve(&a, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message.trim_end());
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::new(EXIT_INPUT, format!("error: cannot read {}: {e}", path.display())))
}

fn open_db(path: &Path, mode: SchemaMode) -> Result<GraphStore, Failure> {
    GraphStore::open(path, mode).map_err(|e| Failure::new(EXIT_IO, format!("error: cannot open database: {e}")))
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("error: {e}"))
}

pub fn cmd_import(args: &ImportArgs, err: &mut dyn Write) -> Outcome {
    let practices = read_input(&args.practices)?;
    let matrix = read_input(&args.matrix)?;
    let options = ImportOptions {
        check_range: args.strict,
    };
    let graph = import_matrix_with(&practices, &matrix, options).map_err(|e| {
        let code = match e {
            ImportError::WeightOutOfRange { .. } => EXIT_SCHEMA,
            _ => EXIT_INPUT,
        };
        Failure::new(code, format!("error: {e}"))
    })?;
    let schema = GraphSchema::practice_default();
    if args.strict {
        let violations = validate(&graph, &schema);
        if !violations.is_empty() {
            let lines: Vec<String> = violations
                .iter()
                .map(|v| format!("  {}: {}", v.rule, v.message))
                .collect();
            return Err(Failure::new(
                EXIT_SCHEMA,
                format!("error: {} schema violation(s)\n{}", violations.len(), lines.join("\n")),
            ));
        }
    }
    write_document(&args.out, &graph, &schema)?;
    let summary = import_summary(&graph);
    writeln!(err, "{summary}").map_err(io_failure)?;
    Ok(())
}

fn write_document(path: &Path, graph: &PropertyGraph, schema: &GraphSchema) -> Outcome {
    iaselect_core::graph::write_document(path, graph, schema)
        .map_err(|e| Failure::new(EXIT_IO, format!("error: cannot write document: {e}")))
}

/// `"P practices, C characteristics, W weights"`.
pub fn import_summary(graph: &PropertyGraph) -> String {
    use iaselect_core::graph::vocab;
    let practices = graph.nodes_with_label(vocab::PRACTICE).count();
    let characteristics = graph
        .nodes()
        .filter(|n| vocab::CHARACTERISTIC_LABELS.iter().any(|l| n.labels.contains(*l)))
        .count();
    let weights = graph.edges().filter(|e| e.label == vocab::WEIGHT).count();
    format!("{practices} practices, {characteristics} characteristics, {weights} weights")
}

/// The query error with the offending line and a caret under its column.
pub fn diagnostic(text: &str, e: &QueryError) -> String {
    let mut msg = format!("error[{}]: {e}", e.code());
    if let Some(p) = e.position() {
        if let Some(line) = text
            .lines()
            .nth(p.line - 1)
            .or(if p.line == 1 { Some("") } else { None })
        {
            let gutter = p.line.to_string();
            msg.push_str(&format!(
                "\n {gutter} | {line}\n {} | {}^",
                " ".repeat(gutter.len()),
                " ".repeat(p.column - 1)
            ));
        }
    }
    msg
}

pub fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Outcome {
    let text = match (&args.text, &args.file) {
        (Some(t), _) => t.clone(),
        (None, Some(f)) => String::from_utf8(read_input(f)?)
            .map_err(|_| Failure::new(EXIT_INPUT, format!("error: {} is not UTF-8", f.display())))?,
        (None, None) => return Err(Failure::new(EXIT_INPUT, "error: no query given")),
    };
    let query = parse(&text).map_err(|e| Failure::new(EXIT_INPUT, diagnostic(&text, &e)))?;
    let store = open_db(&args.db.db, SchemaMode::Permissive)?;
    let result = store.read(|g, _| evaluate(&query, g));
    let rendered = match args.format {
        Format::Json => json_body(&result),
        Format::Table => render_result_table(&result),
        Format::Csv => render_result_csv(&result),
    };
    out.write_all(rendered.as_bytes()).map_err(io_failure)
}

fn cell(e: &ElementSnapshot) -> String {
    match e {
        ElementSnapshot::Node { id, labels, attrs } => {
            let name = attrs.get("name").map(|v| format!(" {v}")).unwrap_or_default();
            format!("({id}:{}{name})", labels.join(":"))
        }
        ElementSnapshot::Edge {
            id,
            src,
            dst,
            label,
            attrs,
        } => {
            let shown: Vec<String> = attrs.iter().map(|(k, v)| format!(" {k}={v}")).collect();
            format!("[{id}:{label} {src}->{dst}{}]", shown.concat())
        }
    }
}

pub fn render_result_table(result: &ResultSet) -> String {
    let body: Vec<Vec<String>> = result.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
    let mut widths: Vec<usize> = result.columns.iter().map(|c| c.chars().count()).collect();
    for row in &body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join(" | ").trim_end())
    };
    let mut out = line(&result.columns);
    for row in &body {
        out.push_str(&line(row));
    }
    out.push_str(&format!(
        "({} row{})\n",
        body.len(),
        if body.len() == 1 { "" } else { "s" }
    ));
    out
}

/// One column per variable holding element ids.
pub fn render_result_csv(result: &ResultSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&result.columns).expect("in-memory write");
    for row in &result.rows {
        w.write_record(row.iter().map(|e| e.id().to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("UTF-8")
}

pub fn report_request(args: &ReportArgs) -> Result<ReportRequest, Failure> {
    let mut criteria = CriteriaWeights::default();
    for (name, pct) in &args.weights {
        if criteria.0.insert(name.clone(), *pct).is_some() {
            return Err(Failure::new(
                EXIT_INPUT,
                format!("error: criterion `{name}` given twice"),
            ));
        }
    }
    Ok(ReportRequest {
        context: ContextSelection {
            domain: args.domain.clone(),
            function: args.function.clone(),
            require_host_agents: args.host_agents,
        },
        criteria,
    })
}

pub fn cmd_report(args: &ReportArgs, out: &mut dyn Write) -> Outcome {
    let request = report_request(args)?;
    let store = open_db(&args.db.db, SchemaMode::Permissive)?;
    let rep = store
        .read(|g, _| report(g, &request))
        .map_err(|e| Failure::new(EXIT_INPUT, format!("error[{}]: {}", e.code, e.message)))?;
    let rendered = match args.format {
        Format::Json => json_body(&rep),
        Format::Table => rep.render_table(),
        Format::Csv => render_report_csv(&rep),
    };
    out.write_all(rendered.as_bytes()).map_err(io_failure)
}

pub fn render_report_csv(rep: &PracticeReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "apiClient", "channel", "finalScore", "recommended"])
        .expect("in-memory write");
    for (i, r) in rep.rows.iter().enumerate() {
        let mark = if i == 0 && rep.recommended.is_some() { "*" } else { "" };
        w.write_record([&r.name, &r.api_client, &r.channel, &r.final_score.to_string(), mark])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("UTF-8")
}

pub fn cmd_serve(args: &ServeArgs, err: &mut dyn Write) -> Outcome {
    let mode = if args.permissive {
        SchemaMode::Permissive
    } else {
        SchemaMode::Strict
    };
    let store = open_db(&args.db.db, mode)?;
    let tokens = match &args.tokens {
        Some(path) => TokenTable::load(path).map_err(|e| {
            let code = match e {
                TokenFileError::Io { .. } => EXIT_IO,
                TokenFileError::Format { .. } => EXIT_INPUT,
            };
            Failure::new(code, format!("error: {e}"))
        })?,
        None => TokenTable::default(),
    };
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .map_err(|_| Failure::new(EXIT_INPUT, format!("error: invalid host `{}`", args.host)))?;
    let config = ServiceConfig {
        readonly: args.readonly,
        tokens,
        cors_origins: args.cors_origins.clone(),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(EXIT_ENVIRONMENT, format!("error: {e}")))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::new(EXIT_ENVIRONMENT, format!("error: cannot listen on {addr}: {e}")))?;
        let bound = listener.local_addr().map_err(io_failure)?;
        writeln!(err, "listening on http://{bound}").map_err(io_failure)?;
        let _ = err.flush();
        let app = router(Arc::new(store), config);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        serve(listener, app, shutdown).await.map_err(io_failure)
    })
}
