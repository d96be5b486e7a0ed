//! End-to-end checks of the command-line surface: formats, exit codes,
//! and subcommand plumbing.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperfocus"))
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> TempDir {
        let dir = std::env::temp_dir().join(format!("hyperfocus-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn enumerate_prints_compact_records() {
    let out = bin().args(["enumerate", "8"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.len() == 28));
}

#[test]
fn enumerate_rejects_k12() {
    let out = bin().args(["enumerate", "12"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(
        err.contains("ingested"),
        "error should point at ingestion: {err}"
    );
}

#[test]
fn embed_exit_codes_distinguish_verdicts() {
    let f2 = fixtures().join("k12_fixture2.1f");
    let sat = bin()
        .args(["embed", "--in"])
        .arg(&f2)
        .args(["--h", "5"])
        .output()
        .unwrap();
    assert_eq!(sat.status.code(), Some(0));
    let text = stdout(&sat);
    assert!(text.starts_with("field m=5 mod=25"));
    assert!(text.contains("# conic parameter a="));

    let unsat = bin()
        .args(["embed", "--in"])
        .arg(&f2)
        .args(["--h", "6"])
        .output()
        .unwrap();
    assert_eq!(unsat.status.code(), Some(3));

    let budget = bin()
        .args(["embed", "--in"])
        .arg(&f2)
        .args(["--h", "5", "--budget", "2"])
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(4));
}

#[test]
fn embed_scan_prints_table() {
    let f1 = fixtures().join("k12_fixture1.1f");
    let out = bin()
        .args(["embed", "--in"])
        .arg(&f1)
        .args(["--scan", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.contains("Unsat")));
    assert!(text.contains("focus collision"));
}

#[test]
fn embed_sat_output_is_a_valid_arc_file() {
    let dir = TempDir::new("arcfile");
    let f2 = fixtures().join("k12_fixture2.1f");
    let out = bin()
        .args(["embed", "--in"])
        .arg(&f2)
        .args(["--h", "5"])
        .output()
        .unwrap();
    let arc_path = dir.path("witness.arc");
    std::fs::write(&arc_path, stdout(&out)).unwrap();
    let verify = bin()
        .args(["verify-arc", "--in"])
        .arg(&arc_path)
        .output()
        .unwrap();
    assert!(
        verify.status.success(),
        "{}",
        String::from_utf8_lossy(&verify.stderr)
    );
    assert!(stdout(&verify).contains("12-arc hyperfocused"));
}

#[test]
fn construct_verify_and_iso_chain() {
    let dir = TempDir::new("chain");
    let arc = dir.path("arc.txt");
    let fact = dir.path("induced.1fc");
    let out = bin()
        .args([
            "construct",
            "--mode",
            "cyclic",
            "--h",
            "5",
            "--order",
            "11",
            "--verify",
        ])
        .arg("--out")
        .arg(&arc)
        .arg("--factorization")
        .arg(&fact)
        .output()
        .unwrap();
    assert!(out.status.success());
    let verify_msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(verify_msg.contains("12-arc hyperfocused"));
    assert!(verify_msg.contains("external"));

    let iso = bin()
        .args(["iso", "--a"])
        .arg(&fact)
        .arg("--b")
        .arg(fixtures().join("k12_fixture2.1f"))
        .output()
        .unwrap();
    assert_eq!(iso.status.code(), Some(0), "induced factorization matches");

    let not = bin()
        .args(["iso", "--a"])
        .arg(&fact)
        .arg("--b")
        .arg(fixtures().join("k12_fixture1.1f"))
        .output()
        .unwrap();
    assert_eq!(not.status.code(), Some(3));
    assert!(stdout(&not).contains("not isomorphic"));
}

#[test]
fn construct_mult_reports_secant_line() {
    let out = bin()
        .args([
            "construct",
            "--mode",
            "mult",
            "--h",
            "4",
            "--order",
            "5",
            "--verify",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("secant"));
    assert!(stdout(&out).starts_with("field m=4 mod=13"));
}

#[test]
fn verify_arc_rejects_broken_files() {
    let dir = TempDir::new("badarc");
    let path = dir.path("bad.arc");
    // three collinear points
    std::fs::write(&path, "field m=2 mod=7\np 1 0 0\np 0 1 0\np 1 1 0\n").unwrap();
    let out = bin()
        .args(["verify-arc", "--in"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn canon_maps_relabelings_together() {
    let dir = TempDir::new("canon");
    let input = dir.path("in.1fc");
    // the same class twice under different labelings
    std::fs::write(&input, "ABCCBA\nBACCAB\n").unwrap();
    let out = bin().args(["canon", "--in"]).arg(&input).output().unwrap();
    assert!(out.status.success());
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
}

#[test]
fn filter_cli_reports_counts() {
    let dir = TempDir::new("filter");
    let surv = dir.path("out.1fc");
    let out = bin()
        .args(["filter", "--in"])
        .arg(fixtures().join("k12_fixtures.1fc"))
        .arg("--survivors")
        .arg(&surv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("read=2"));
    assert!(text.contains("survived=2"));
    assert_eq!(std::fs::read_to_string(&surv).unwrap().lines().count(), 2);
}

#[test]
fn classify_smoke_on_k8_stream() {
    let dir = TempDir::new("classify8");
    let input = dir.path("k8.1fc");
    let enumerate = bin()
        .args(["enumerate", "8", "--out"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(enumerate.status.success());
    let out = bin()
        .args(["classify", "--n", "8", "--in"])
        .arg(&input)
        .args(["--scan", "4"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("- read: 6"));
    assert!(text.contains("- survived: 2"));
    assert!(text.contains("## summary"));
}

#[test]
fn classify_full_cascade_on_shipped_records() {
    let dir = TempDir::new("classify12");
    let out = bin()
        .args(["classify", "--n", "12", "--in"])
        .arg(fixtures().join("k12_fixtures.1fc"))
        .args(["--scan", "7", "--survivors"])
        .arg(dir.path("surv.1fc"))
        .arg("--report")
        .arg(dir.path("report.md"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("- read: 2"));
    assert!(text.contains("- survived: 2"));
    // survivor 1 never embeds; survivor 2 embeds exactly at h = 5
    let s1 = text.find("### survivor 1").unwrap();
    let s2 = text.find("### survivor 2").unwrap();
    assert!(!text[s1..s2].contains("Sat ("));
    assert!(text[s1..s2].contains("not isomorphic"));
    assert!(text[s2..].contains("- h=5: Sat"));
    assert!(text[s2..].contains("- embeddable at h in [5]"));
    assert!(text[s2..].contains("min_poly x^5 + x^4 + x^3 + x + 1"));
    assert!(text[s2..].contains("order 11): isomorphic"));
    // the report file carries the same text
    let report = std::fs::read_to_string(dir.path("report.md")).unwrap();
    assert_eq!(report, text);
}

#[test]
fn classify_report_is_deterministic_modulo_timing() {
    let dir = TempDir::new("classifydet");
    let strip = |p: &Path| -> String {
        let report = bin()
            .args(["classify", "--n", "12", "--in"])
            .arg(fixtures().join("k12_fixtures.1fc"))
            .args(["--scan", "5", "--survivors"])
            .arg(p)
            .output()
            .unwrap();
        assert!(report.status.success());
        stdout(&report)
            .lines()
            .filter(|l| !l.starts_with("- wall_time_ms") && !l.starts_with("- survivors:"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = strip(&dir.path("s1.1fc"));
    let b = strip(&dir.path("s2.1fc"));
    assert_eq!(a, b);
}
