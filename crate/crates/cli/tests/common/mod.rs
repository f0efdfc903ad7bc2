#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use iaselect_core::fixture;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn iaselect(args: &[&str]) -> Run {
    iaselect_env(args, &[])
}

pub fn iaselect_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iaselect"));
    cmd.args(args).env_remove("IASELECT_DB");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

/// Fixture CSVs written to `dir`, returned as (practices, weights).
pub fn fixture_tables(dir: &Path) -> (PathBuf, PathBuf) {
    let p = dir.join("practices.csv");
    let w = dir.join("weights.csv");
    std::fs::write(&p, fixture::PRACTICES_CSV).unwrap();
    std::fs::write(&w, fixture::WEIGHTS_CSV).unwrap();
    (p, w)
}

/// Imports the fixture into `dir/graph.json`.
pub fn fixture_db(dir: &Path) -> PathBuf {
    let (p, w) = fixture_tables(dir);
    let db = dir.join("graph.json");
    let r = iaselect(&[
        "import",
        "--practices",
        p.to_str().unwrap(),
        "--matrix",
        w.to_str().unwrap(),
        "--out",
        db.to_str().unwrap(),
        "--strict",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    db
}

pub fn free_port() -> u16 {
    std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

/// A running `iaselect serve`; killed on drop.
pub struct Server {
    pub child: Child,
    pub port: u16,
}

impl Server {
    pub fn start(db: &Path, extra: &[&str]) -> Server {
        let port = free_port();
        let port_s = port.to_string();
        let mut args = vec!["serve", "--db", db.to_str().unwrap(), "--port", &port_s];
        args.extend_from_slice(extra);
        let child = Command::new(env!("CARGO_BIN_EXE_iaselect"))
            .args(&args)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let deadline = Instant::now() + Duration::from_secs(20);
        while TcpStream::connect(("127.0.0.1", port)).is_err() {
            assert!(Instant::now() < deadline, "server did not start");
            std::thread::sleep(Duration::from_millis(50));
        }
        Server { child, port }
    }

    /// One HTTP/1.1 exchange; returns (status, body).
    pub fn request(&self, method: &str, path: &str, token: Option<&str>, body: Option<&str>) -> (u16, String) {
        let mut s = TcpStream::connect(("127.0.0.1", self.port)).unwrap();
        let body = body.unwrap_or("");
        let auth = token
            .map(|t| format!("Authorization: Bearer {t}\r\n"))
            .unwrap_or_default();
        write!(
            s,
            "{method} {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n{auth}Content-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        let mut raw = String::new();
        s.read_to_string(&mut raw).unwrap();
        let status = raw[9..12].parse().unwrap();
        let (head, rest) = raw.split_once("\r\n\r\n").unwrap();
        let chunked = head.to_ascii_lowercase().contains("transfer-encoding: chunked");
        (status, if chunked { dechunk(rest) } else { rest.to_string() })
    }
}

fn dechunk(mut s: &str) -> String {
    let mut out = String::new();
    loop {
        let (size, rest) = s.split_once("\r\n").unwrap();
        let n = usize::from_str_radix(size.trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.push_str(&rest[..n]);
        s = &rest[n + 2..];
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub const HYBRID_FACTORY: &str = "MATCH(h:Hybrid)-[w:WEIGHT]->(d:Domain)
WHERE w.value > 2
AND d.name = \"Factory Automation\"
RETURN *";

pub const REPORT_BODY: &str = r#"{"context":{"domain":"Factory Automation","function":"Simulation","requireHostAgents":true},"criteria":{"Re-usability":80,"Scalability":10,"Time behaviour":10}}"#;

pub const REPORT_ARGS: [&str; 13] = [
    "--domain",
    "Factory Automation",
    "--function",
    "Simulation",
    "--host-agents",
    "--weight",
    "Re-usability=80",
    "--weight",
    "Scalability=10",
    "--weight",
    "Time behaviour=10",
    "--format",
    "table",
];
