//! Newline-delimited JSON protocol spoken with an external scoring process.
//!
//! ```text
//! -> {"op":"hello","proto":1}
//! <- {"ok":true,"proto":1}
//! -> {"id":0,"op":"score","code":"...","docstring":"...","lang":"python"}
//! <- {"id":0,"score":0.93}
//! ```
//!
//! Responses may arrive in any order and are matched back by id.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread::JoinHandle;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{baseline_score, Backend, PairRef, Scorer};
use crate::error::{Error, Result};

pub const PROTO: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SidecarConfig {
    /// Program and arguments.
    pub command: Vec<String>,
    pub batch_size: usize,
    pub timeout_ms: u64,
    pub fail_open: bool,
}

impl Default for SidecarConfig {
    fn default() -> Self {
        SidecarConfig {
            command: Vec::new(),
            batch_size: 64,
            timeout_ms: 30_000,
            fail_open: false,
        }
    }
}

impl SidecarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.command.is_empty() {
            return Err(Error::Config("sidecar backend selected but no sidecar command given".into()));
        }
        if self.batch_size == 0 || self.timeout_ms == 0 {
            return Err(Error::Config("sidecar batch_size and timeout_ms must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    id: u64,
    op: &'static str,
    code: &'a str,
    docstring: &'a str,
    lang: &'a str,
}

pub struct SidecarClient {
    child: Child,
    stdin: Option<BufWriter<ChildStdin>>,
    lines: Receiver<std::io::Result<String>>,
    reader: Option<JoinHandle<()>>,
    timeout: Duration,
    next_id: u64,
}

impl SidecarClient {
    /// Start the process and complete the handshake.
    pub fn spawn(cfg: &SidecarConfig) -> Result<Self> {
        cfg.validate()?;
        let mut child = Command::new(&cfg.command[0])
            .args(&cfg.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Sidecar(format!("cannot start `{}`: {e}", cfg.command[0])))?;
        let stdout = child.stdout.take().expect("piped stdout");
        let stdin = child.stdin.take().expect("piped stdin");
        let (tx, rx) = mpsc::channel();
        let reader = std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut client = SidecarClient {
            child,
            stdin: Some(BufWriter::new(stdin)),
            lines: rx,
            reader: Some(reader),
            timeout: Duration::from_millis(cfg.timeout_ms),
            next_id: 0,
        };
        client.handshake()?;
        Ok(client)
    }

    fn send(&mut self, value: &impl Serialize) -> Result<()> {
        let w = self.stdin.as_mut().ok_or_else(|| Error::Sidecar("sidecar stdin closed".into()))?;
        serde_json::to_writer(&mut *w, value).map_err(|e| match e.io_error_kind() {
            Some(kind) => write_error(kind.into()),
            None => e.into(),
        })?;
        w.write_all(b"\n").map_err(write_error)
    }

    fn flush(&mut self) -> Result<()> {
        if let Some(w) = self.stdin.as_mut() {
            w.flush().map_err(write_error)?;
        }
        Ok(())
    }

    fn recv(&mut self) -> Result<Value> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => serde_json::from_str(&line)
                .map_err(|e| Error::Sidecar(format!("malformed response `{line}`: {e}"))),
            Ok(Err(e)) => Err(Error::Sidecar(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(Error::Sidecar(format!("no response within {:?}", self.timeout))),
            Err(RecvTimeoutError::Disconnected) => Err(Error::Sidecar("sidecar exited".into())),
        }
    }

    fn handshake(&mut self) -> Result<()> {
        self.send(&json!({"op": "hello", "proto": PROTO}))?;
        self.flush()?;
        let resp = self.recv()?;
        if resp.get("ok") != Some(&Value::Bool(true)) || resp.get("proto").and_then(Value::as_u64) != Some(PROTO) {
            return Err(Error::Sidecar(format!("handshake rejected: {resp}")));
        }
        Ok(())
    }
}

impl Scorer for SidecarClient {
    fn backend(&self) -> Backend {
        Backend::Sidecar
    }

    fn score_batch(&mut self, pairs: &[PairRef<'_>]) -> Result<Vec<f64>> {
        let base = self.next_id;
        self.next_id += pairs.len() as u64;
        for (i, p) in pairs.iter().enumerate() {
            self.send(&ScoreRequest {
                id: base + i as u64,
                op: "score",
                code: p.code,
                docstring: p.docstring,
                lang: p.language.as_str(),
            })?;
        }
        self.flush()?;
        let mut scores: Vec<Option<f64>> = vec![None; pairs.len()];
        for _ in 0..pairs.len() {
            let resp = self.recv()?;
            if let Some(err) = resp.get("error") {
                return Err(Error::Sidecar(format!("sidecar error for id {}: {err}", resp["id"])));
            }
            let id = resp.get("id").and_then(Value::as_u64);
            let slot = id.filter(|id| (base..self.next_id).contains(id)).map(|id| (id - base) as usize);
            let Some(slot) = slot else {
                return Err(Error::Sidecar(format!("response with unknown id: {resp}")));
            };
            let score = resp.get("score").and_then(Value::as_f64).filter(|s| (0.0..=1.0).contains(s));
            let Some(score) = score else {
                return Err(Error::Sidecar(format!("response without a score in [0,1]: {resp}")));
            };
            if scores[slot].replace(score).is_some() {
                return Err(Error::Sidecar(format!("duplicate response for id {}", base + slot as u64)));
            }
        }
        Ok(scores.into_iter().map(|s| s.expect("all ids answered")).collect())
    }
}

impl Drop for SidecarClient {
    fn drop(&mut self) {
        // Closing stdin asks a well-behaved server to exit.
        drop(self.stdin.take());
        for _ in 0..20 {
            if matches!(self.child.try_wait(), Ok(Some(_))) {
                break;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        if matches!(self.child.try_wait(), Ok(None)) {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
        if let Some(h) = self.reader.take() {
            let _ = h.join();
        }
    }
}

fn write_error(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        Error::Sidecar("sidecar exited (broken pipe)".into())
    } else {
        Error::Sidecar(format!("write failed: {e}"))
    }
}

/// Knobs for the built-in server, mostly for exercising client behaviour.
#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// Hold score responses and emit each group of this many in reverse.
    pub reorder_window: usize,
    /// Exit after answering this many score requests.
    pub exit_after: Option<usize>,
    /// Stop answering (but keep reading) after this many score requests.
    pub stall_after: Option<usize>,
}

fn write_line(w: &mut impl Write, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer(&mut *w, v)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// Serve the protocol with the lexical baseline until EOF.
pub fn serve(reader: impl BufRead, mut writer: impl Write, opts: &ServeOptions) -> std::io::Result<()> {
    let mut held: VecDeque<Value> = VecDeque::new();
    let mut answered = 0usize;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let req: HashMap<String, Value> = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                write_line(&mut writer, &json!({"id": null, "error": format!("malformed request: {e}")}))?;
                continue;
            }
        };
        let id = req.get("id").cloned().unwrap_or(Value::Null);
        match req.get("op").and_then(Value::as_str) {
            Some("hello") => {
                let ok = req.get("proto").and_then(Value::as_u64) == Some(PROTO);
                let resp = if ok {
                    json!({"ok": true, "proto": PROTO})
                } else {
                    json!({"ok": false, "proto": PROTO, "error": "unsupported protocol version"})
                };
                write_line(&mut writer, &resp)?;
            }
            Some("score") => {
                let field = |k: &str| req.get(k).and_then(Value::as_str);
                let resp = match (field("code"), field("docstring")) {
                    (Some(code), Some(doc)) => json!({"id": id, "score": baseline_score(code, doc)}),
                    _ => json!({"id": id, "error": "score request needs code and docstring"}),
                };
                answered += 1;
                if opts.stall_after.is_some_and(|n| answered > n) {
                    continue;
                }
                if opts.reorder_window > 1 {
                    held.push_front(resp);
                    if held.len() == opts.reorder_window {
                        for r in held.drain(..) {
                            write_line(&mut writer, &r)?;
                        }
                    }
                } else {
                    write_line(&mut writer, &resp)?;
                }
                if opts.exit_after.is_some_and(|n| answered >= n) {
                    return Ok(());
                }
            }
            _ => write_line(&mut writer, &json!({"id": id, "error": "unknown op"}))?,
        }
    }
    for r in held.drain(..) {
        write_line(&mut writer, &r)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(input: &str, opts: &ServeOptions) -> Vec<Value> {
        let mut out = Vec::new();
        serve(input.as_bytes(), &mut out, opts).unwrap();
        String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
    }

    #[test]
    fn handshake_score_and_errors() {
        let input = concat!(
            "{\"op\":\"hello\",\"proto\":1}\n",
            "{\"id\":7,\"op\":\"score\",\"code\":\"def add_two(a, b)\",\"docstring\":\"add two\",\"lang\":\"python\"}\n",
            "not json\n",
            "{\"id\":8,\"op\":\"score\",\"code\":\"x\"}\n",
        );
        let out = run(input, &ServeOptions::default());
        assert_eq!(out[0], json!({"ok": true, "proto": 1}));
        assert_eq!(out[1]["id"], 7);
        assert!(out[1]["score"].as_f64().unwrap() > 0.5);
        assert_eq!(out[2]["id"], Value::Null);
        assert!(out[2]["error"].is_string());
        assert!(out[3]["error"].is_string());
        assert!(run("", &ServeOptions::default()).is_empty());
    }

    #[test]
    fn reorder_window_reverses_groups() {
        let input: String = (0..4)
            .map(|i| format!("{{\"id\":{i},\"op\":\"score\",\"code\":\"a\",\"docstring\":\"a\",\"lang\":\"go\"}}\n"))
            .collect();
        let ids: Vec<i64> = run(&input, &ServeOptions { reorder_window: 2, ..Default::default() })
            .iter()
            .map(|v| v["id"].as_i64().unwrap())
            .collect();
        assert_eq!(ids, [1, 0, 3, 2]);
    }
}
