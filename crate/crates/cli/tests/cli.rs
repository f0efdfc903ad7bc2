mod common;

use common::*;
use iaselect_core::fixture;
use iaselect_core::graph::{load, save, GraphSchema, PropertyGraph};
use iaselect_service::{json_body, report, ReportRequest};

fn report_cmd<'a>(db: &'a str, format: &'a str) -> Vec<&'a str> {
    let mut args = vec!["report", "--db", db];
    args.extend_from_slice(&REPORT_ARGS[..12]);
    args.push(format);
    args
}

#[test]
fn import_prints_counts_and_writes_a_loadable_document() {
    let dir = tempfile::tempdir().unwrap();
    let (p, w) = fixture_tables(dir.path());
    let out = dir.path().join("g.json");
    let r = iaselect(&[
        "import",
        "--practices",
        p.to_str().unwrap(),
        "--matrix",
        w.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stderr.trim(), "6 practices, 9 characteristics, 54 weights");
    let (g, s) = load(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(s, GraphSchema::practice_default());
    assert_eq!(g.edge_count(), 54);
}

#[test]
fn import_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (p, w) = fixture_tables(dir.path());
    let out = dir.path().join("g.json");
    let hot = dir.path().join("hot.csv");
    std::fs::write(&hot, fixture::WEIGHTS_CSV.replacen("3.0", "6.0", 1)).unwrap();
    let args = |matrix: &str, strict: bool| {
        let mut a = vec![
            "import".to_string(),
            "--practices".into(),
            p.to_str().unwrap().into(),
            "--matrix".into(),
            matrix.into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ];
        if strict {
            a.push("--strict".into());
        }
        a
    };
    let run = |a: Vec<String>| iaselect(&a.iter().map(String::as_str).collect::<Vec<_>>());

    let r = run(args(hot.to_str().unwrap(), true));
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("outside [0, 5]"));
    assert!(!out.exists());

    // Without --strict the out-of-range cell is kept as data.
    assert_eq!(run(args(hot.to_str().unwrap(), false)).code, 0);

    let r = run(args(dir.path().join("missing.csv").to_str().unwrap(), false));
    assert_eq!(r.code, 2);
    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "name,Nowhere:X\nHL:1,1.0\n").unwrap();
    assert_eq!(run(args(junk.to_str().unwrap(), false)).code, 2);
    assert_eq!(run(args(w.to_str().unwrap(), true)).code, 0);
}

#[test]
fn import_then_query_counts_practices() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let r = iaselect(&[
        "query",
        "--db",
        db.to_str().unwrap(),
        "MATCH (p:Practice) RETURN p",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = fixture::PRACTICES_CSV.lines().count() - 1;
    assert_eq!(r.stdout.lines().count() - 1, rows);
}

#[test]
fn query_output_formats() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let db = db.to_str().unwrap();
    let r = iaselect(&["query", "--db", db, HYBRID_FACTORY]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines[0].starts_with("h "));
    assert_eq!(lines.last().unwrap(), &"(3 rows)");
    assert!(r.stdout.contains("\"HL:1\""));

    let r = iaselect(&["query", "--db", db, HYBRID_FACTORY, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["h", "w", "d"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    let qf = dir.path().join("q.txt");
    std::fs::write(&qf, HYBRID_FACTORY).unwrap();
    let from_file = iaselect(&["query", "--db", db, "-f", qf.to_str().unwrap(), "--format", "json"]);
    assert_eq!(from_file.stdout, r.stdout);
}

#[test]
fn query_errors() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let r = iaselect(&["query", "--db", db.to_str().unwrap(), "MATCH ("]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("expected identifier or ':' at 1:8"), "{}", r.stderr);
    assert!(r.stderr.contains(" 1 | MATCH (\n   |        ^"), "{}", r.stderr);

    let r = iaselect(&["query", "--db", db.to_str().unwrap(), "MATCH (a) RETURN b"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("UndeclaredVariable"));

    let r = iaselect(&[
        "query",
        "--db",
        dir.path().join("nope.json").to_str().unwrap(),
        "MATCH (a) RETURN a",
    ]);
    assert_eq!(r.code, 4);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(
        iaselect(&["query", "--db", bad.to_str().unwrap(), "MATCH (a) RETURN a"]).code,
        4
    );
}

#[test]
fn query_on_an_empty_graph_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("empty.json");
    std::fs::write(&db, save(&PropertyGraph::new(), &GraphSchema::practice_default())).unwrap();
    let r = iaselect_env(
        &["query", "MATCH (p:Practice) RETURN p"],
        &[("IASELECT_DB", db.to_str().unwrap())],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "p\n(0 rows)\n");
}

#[test]
fn db_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let r = iaselect_env(
        &["query", "MATCH (d:Domain) RETURN d", "--format", "csv"],
        &[("IASELECT_DB", db.to_str().unwrap())],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 4);
    assert_eq!(iaselect(&["query", "MATCH (d) RETURN d"]).code, 2);
}

#[test]
fn report_table_marks_the_recommendation() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let r = iaselect(&report_cmd(db.to_str().unwrap(), "table"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "NAME | API CLIENT  | CHANNEL | FINAL-SCORE");
    assert_eq!(lines[1], "HL:1 | Apache Milo | OPC-UA  |       21.15 *");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines.iter().filter(|l| l.ends_with('*')).count(), 1);

    let csv = iaselect(&report_cmd(db.to_str().unwrap(), "csv"));
    assert_eq!(
        csv.stdout.lines().next(),
        Some("name,apiClient,channel,finalScore,recommended")
    );
    assert!(csv
        .stdout
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("HL:1,Apache Milo,OPC-UA,21.15"));
}

#[test]
fn report_json_matches_the_service_encoder() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let r = iaselect(&report_cmd(db.to_str().unwrap(), "json"));
    let request: ReportRequest = serde_json::from_str(REPORT_BODY).unwrap();
    let (graph, _) = load(&std::fs::read(&db).unwrap()).unwrap();
    assert_eq!(r.stdout, json_body(&report(&graph, &request).unwrap()));
}

#[test]
fn report_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let db = db.to_str().unwrap();
    let base = [
        "report",
        "--db",
        db,
        "--domain",
        "Factory Automation",
        "--function",
        "Simulation",
    ];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        iaselect(&a)
    };
    let r = with(&["--weight", "Re-usability=85", "--weight", "Scalability=20"]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("criteria percentages must total 100, got 105"),
        "{}",
        r.stderr
    );
    assert!(r.stderr.contains("SumNot100"));
    assert_eq!(with(&["--weight", "Bogus=100"]).code, 2);
    assert_eq!(with(&["--weight", "Re-usability"]).code, 2);
    assert_eq!(
        with(&["--weight", "Re-usability=50", "--weight", "Re-usability=50"]).code,
        2
    );
    let r = iaselect(&[
        "report",
        "--db",
        db,
        "--domain",
        "Mars Mining",
        "--function",
        "Simulation",
        "--weight",
        "Re-usability=100",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("UnknownContext"));
    assert_eq!(with(&["--weight", "Re-usability=100"]).code, 0);
}

#[test]
fn serve_answers_and_honours_readonly() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let tokens = dir.path().join("tokens.json");
    std::fs::write(&tokens, r#"{"root": "admin", "guest": "user"}"#).unwrap();
    let before = std::fs::read(&db).unwrap();
    {
        let server = Server::start(&db, &["--readonly", "--tokens", tokens.to_str().unwrap()]);
        let (status, body) = server.request("GET", "/api/v1/practices", None, None);
        assert_eq!(status, 200);
        assert_eq!(
            serde_json::from_str::<serde_json::Value>(&body)
                .unwrap()
                .as_array()
                .unwrap()
                .len(),
            6
        );
        let node = r#"{"labels":["Domain"],"attrs":{"name":"Logistics"}}"#;
        assert_eq!(server.request("POST", "/api/v1/nodes", Some("root"), Some(node)).0, 503);
        assert_eq!(
            server.request("POST", "/api/v1/nodes", Some("guest"), Some(node)).0,
            403
        );
    }
    assert_eq!(std::fs::read(&db).unwrap(), before);

    let server = Server::start(&db, &["--tokens", tokens.to_str().unwrap()]);
    let node = r#"{"labels":["Domain"],"attrs":{"name":"Logistics"}}"#;
    assert_eq!(server.request("POST", "/api/v1/nodes", Some("root"), Some(node)).0, 201);
    let (g, _) = load(&std::fs::read(&db).unwrap()).unwrap();
    assert_eq!(g.node_count(), 16);
}

#[test]
fn serve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture_db(dir.path());
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let r = iaselect(&["serve", "--db", db.to_str().unwrap(), "--port", &port]);
    assert_eq!(r.code, 5, "{}", r.stderr);
    let r = iaselect(&[
        "serve",
        "--db",
        dir.path().join("nope.json").to_str().unwrap(),
        "--port",
        &port,
    ]);
    assert_eq!(r.code, 4);
    assert_eq!(
        iaselect(&["serve", "--db", db.to_str().unwrap(), "--port", "0"]).code,
        2
    );
    let tokens = dir.path().join("t.json");
    std::fs::write(&tokens, r#"{"root": "superuser"}"#).unwrap();
    assert_eq!(
        iaselect(&[
            "serve",
            "--db",
            db.to_str().unwrap(),
            "--tokens",
            tokens.to_str().unwrap()
        ])
        .code,
        2
    );
}
