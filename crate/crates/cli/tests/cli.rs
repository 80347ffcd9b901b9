//! End-to-end checks: the binary's output equals the in-process report, exit codes, formats.

use std::path::PathBuf;
use std::process::{Command, Output};

use clap::Parser;
use paperfold_cli::commands::{EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK};
use paperfold_cli::{execute, Cli, Format, Report};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paperfold")).args(args).output().expect("spawn paperfold")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

/// The in-process rendering for the same arguments.
fn in_process(args: &[&str]) -> (String, i32) {
    let cli = Cli::parse_from(std::iter::once("paperfold").chain(args.iter().copied()));
    let outcome = execute(&cli).expect("command succeeds");
    (outcome.render(cli.opts.format).expect("renderable"), outcome.status)
}

fn assert_golden(args: &[&str]) -> Output {
    let out = run(args);
    let (expected, status) = in_process(args);
    assert_eq!(stdout(&out), expected, "{args:?}");
    assert_eq!(out.status.code(), Some(status), "{args:?}");
    out
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn criterion_under_harmonic_decay_certifies_seq() {
    let out = assert_golden(&["criterion", "--builtin", "seq", "--K", "8", "--hypothesis", "harmonic"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = stdout(&out);
    assert!(text.contains("window k=0"), "{text}");
    assert!(text.trim_end().ends_with("CERTIFIED_UNDER_HYPOTHESIS"), "{text}");
}

#[test]
fn criterion_under_constant_decay_is_inconclusive_for_seq() {
    let out = assert_golden(&["criterion", "--builtin", "seq", "--K", "8", "--hypothesis", "constant"]);
    assert_eq!(out.status.code(), Some(EXIT_INCONCLUSIVE));
    assert!(stdout(&out).contains("INCONCLUSIVE"));
}

#[test]
fn modulus_reports_exact_constants_for_cantor() {
    let args = ["modulus", "--builtin", "cantor", "--rbar", "1/6", "--hbar", "1/4", "--format", "machine"];
    let out = assert_golden(&args);
    let report = Report::parse_machine(&stdout(&out)).unwrap();
    assert_eq!(report.get("delta"), Some("1/192"));
    assert_eq!(report.get("M"), Some("2/15"));
    assert_eq!(report.get("R_mode"), Some("NORMALIZED"));
}

#[test]
fn machine_output_round_trips() {
    for args in [
        vec!["classify", "--builtin", "seq", "--at", "5/8", "--radius", "1/20", "--format", "machine"],
        vec!["validate", "--builtin", "cantor", "--format", "machine"],
        vec!["mcmullen", "--builtin", "seq", "--K1", "3", "--format", "machine"],
    ] {
        let text = stdout(&assert_golden(&args));
        let report = Report::parse_machine(&text).unwrap();
        assert_eq!(report.to_machine(), text, "{args:?}");
    }
}

#[test]
fn malformed_file_reports_path_and_line() {
    let path = scratch("bad.pfs", "polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1 2 3\npair 0 1 2 5/2 4\n");
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains("bad.pfs") && err.contains("line 3"), "{err}");
}

#[test]
fn example_text_validates_from_a_file() {
    let text = stdout(&assert_golden(&["example", "cantor"]));
    let path = scratch("cantor.pfs", &text);
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn renders_are_byte_identical_across_runs() {
    for scene in ["scheme", "scar", "collar"] {
        let args = ["render", "--builtin", "seq", "--scene", scene, "--format", "svg"];
        let first = stdout(&assert_golden(&args));
        assert_eq!(first, stdout(&run(&args)), "{scene}");
        assert!(first.starts_with("<?xml") && first.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn mcmullen_scene_for_cantor_is_well_formed() {
    let args = ["render", "--builtin", "cantor", "--scene", "mcmullen", "--K1", "3", "--format", "svg"];
    let svg = stdout(&assert_golden(&args));
    assert!(svg.contains("<g id=\"annuli\""), "{svg}");
    let opened = svg.matches("<g").count();
    let closed = svg.matches("</g>").count();
    assert_eq!(opened, closed);
}

#[test]
fn svg_format_is_rejected_for_reports() {
    let cli = Cli::parse_from(["paperfold", "validate", "--builtin", "seq", "--format", "svg"]);
    assert_eq!(cli.opts.format, Format::Svg);
    let out = run(&["validate", "--builtin", "seq", "--format", "svg"]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
}
