mod common;

use std::time::Instant;

use forge_core::consistency::sidecar::SidecarConfig;
use forge_core::consistency::{score_all, BaselineScorer, PairRef, Scorer, SidecarClient};
use forge_core::Error;

fn server(extra: &[&str]) -> Vec<String> {
    let mut cmd = vec![env!("CARGO_BIN_EXE_forge").to_string(), "serve-baseline".to_string()];
    cmd.extend(extra.iter().map(|s| s.to_string()));
    cmd
}

fn config(command: Vec<String>, timeout_ms: u64) -> SidecarConfig {
    SidecarConfig { command, batch_size: 64, timeout_ms, fail_open: false }
}

fn shell(script: &str) -> Vec<String> {
    vec!["sh".into(), "-c".into(), script.into()]
}

const HELLO: &str = r#"read l; echo '{"ok":true,"proto":1}'"#;

fn pairs(n: usize) -> Vec<forge_core::consistency::NaturalPair> {
    common::synthetic_pairs(n, 21)
}

fn refs(p: &[forge_core::consistency::NaturalPair]) -> Vec<PairRef<'_>> {
    p.iter().map(|p| PairRef { code: &p.code, docstring: &p.docstring, language: p.language }).collect()
}

#[test]
fn thousand_reordered_requests_answered_once() {
    let data = pairs(1000);
    let refs = refs(&data);
    // Responses come back in reversed groups of 8; 64-request batches and
    // the final 40 are multiples of 8.
    let mut client = SidecarClient::spawn(&config(server(&["--reorder", "8"]), 10_000)).unwrap();
    let got = score_all(&refs, &mut client, 64, false).unwrap();
    let expected = BaselineScorer.score_batch(&refs).unwrap();
    assert_eq!(got.len(), 1000);
    for (g, e) in got.iter().zip(&expected) {
        assert!(!g.fail_open);
        assert!((g.score - e).abs() <= 1e-5);
    }
}

#[test]
fn batching_is_equivalent() {
    let data = pairs(300);
    let refs = refs(&data);
    let expected = BaselineScorer.score_batch(&refs).unwrap();
    let mut client = SidecarClient::spawn(&config(server(&[]), 10_000)).unwrap();
    for batch in [1, 7, 64, 300] {
        let got = score_all(&refs, &mut client, batch, false).unwrap();
        for (g, e) in got.iter().zip(&expected) {
            assert!((g.score - e).abs() <= 1e-5, "batch {batch}");
        }
    }
}

#[test]
fn stalled_server_times_out() {
    let data = pairs(20);
    let refs = refs(&data);
    let mut client = SidecarClient::spawn(&config(server(&["--stall-after", "5"]), 300)).unwrap();
    let start = Instant::now();
    let err = score_all(&refs, &mut client, 10, false).unwrap_err();
    assert!(matches!(&err, Error::Sidecar(m) if m.contains("no response")), "{err}");
    assert!(start.elapsed().as_secs() < 5);
}

#[test]
fn exited_server_fails_closed_or_open() {
    let data = pairs(30);
    let refs = refs(&data);
    let mut client = SidecarClient::spawn(&config(server(&["--exit-after", "10"]), 5_000)).unwrap();
    let err = score_all(&refs, &mut client, 10, false).unwrap_err();
    assert!(matches!(&err, Error::Sidecar(m) if m.contains("exited")), "{err}");

    let mut client = SidecarClient::spawn(&config(server(&["--exit-after", "10"]), 5_000)).unwrap();
    let got = score_all(&refs, &mut client, 10, true).unwrap();
    assert!(got[..10].iter().all(|s| !s.fail_open));
    assert!(got[10..].iter().all(|s| s.fail_open && s.score == 1.0));
}

#[test]
fn protocol_violations_are_errors() {
    let data = pairs(2);
    let refs = refs(&data);
    let cases = [
        ("unknown id", format!(r#"{HELLO}; read a; read b; echo '{{"id":999,"score":0.5}}'; exec sleep 5"#)),
        ("duplicate", format!(r#"{HELLO}; read a; read b; echo '{{"id":0,"score":0.5}}'; echo '{{"id":0,"score":0.5}}'; exec sleep 5"#)),
        ("[0,1]", format!(r#"{HELLO}; read a; read b; echo '{{"id":0,"score":1.5}}'; exec sleep 5"#)),
        ("sidecar error", format!(r#"{HELLO}; read a; read b; echo '{{"id":0,"error":"model not loaded"}}'; exec sleep 5"#)),
        ("malformed", format!(r#"{HELLO}; read a; read b; echo 'garbage'; exec sleep 5"#)),
    ];
    for (needle, script) in cases {
        let mut client = SidecarClient::spawn(&config(shell(&script), 3_000)).unwrap();
        let err = client.score_batch(&refs).unwrap_err();
        assert!(matches!(&err, Error::Sidecar(m) if m.contains(needle)), "{needle}: {err}");
    }
}

#[test]
fn handshake_failures() {
    let bad = shell(r#"read l; echo '{"ok":false,"proto":2}'"#);
    assert!(matches!(SidecarClient::spawn(&config(bad, 3_000)), Err(Error::Sidecar(m)) if m.contains("handshake")));
    let silent = shell("exec sleep 5");
    assert!(matches!(SidecarClient::spawn(&config(silent, 200)), Err(Error::Sidecar(_))));
    let missing = vec!["/nonexistent/scorer".to_string()];
    assert!(matches!(SidecarClient::spawn(&config(missing, 200)), Err(Error::Sidecar(m)) if m.contains("cannot start")));
    assert!(SidecarClient::spawn(&config(vec![], 200)).is_err());
}
