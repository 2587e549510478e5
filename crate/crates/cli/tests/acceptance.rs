//! Runs every criterion once, prints one line per criterion, then checks
//! the wall-clock limits and byte-identical suite output across processes.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use tiltkit_cli::suite::{run_criterion, CRITERIA};

const SEED: u64 = 42;

fn limit(id: u32) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(5)),
        3 | 7 => Some(Duration::from_secs(10)),
        4 => Some(Duration::from_secs(1)),
        _ => None,
    }
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let r = run_criterion(id, SEED);
        let took = start.elapsed();
        let mut ok = r.passed;
        let mut note = String::new();
        if let Some(max) = limit(id) {
            if took > max {
                ok = false;
                note = format!(" (over the {:.0?} limit)", max);
            }
        }
        // Direct stderr write: visible without --nocapture.
        let _ = writeln!(std::io::stderr(), "{} criterion {:>2} [{:>8.3?}] {}: {}{}", if ok { "PASS" } else { "FAIL" }, id, took, r.name, r.summary, note);
        if !ok {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn suite_json_is_byte_identical_across_runs() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_tiltkit")).args(["--json", "suite", "--seed", "42"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let a = run();
    assert!(!a.is_empty());
    assert_eq!(a, run());
}
