use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use auxilio::driver::{DriverConfig, EventKind, OutputEvent};
use auxilio::eval::pointing::disabled_user_levels;
use auxilio::sim::{popper_targets, run_pipeline, score_session, scripted_agent, AgentParams, SimOptions};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn auxilio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_auxilio")).args(args).output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn events(stdout: &[u8]) -> Vec<OutputEvent> {
    text(stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn sus_fixture_summary() {
    let out = auxilio(&["sus", fixture("table6.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    let mean = stdout.lines().find(|l| l.starts_with("Mean")).unwrap();
    assert!(mean.contains("84.17") && mean.trim_end().ends_with("A+"), "{mean}");
    assert!(stdout.lines().any(|l| l.starts_with("R9") && l.contains("70.00")));

    let csv = auxilio(&["sus", fixture("table6.csv").to_str().unwrap(), "--csv"]);
    assert!(text(&csv.stdout).lines().next().unwrap().contains("SUS10"));
}

#[test]
fn simulate_center_click_gives_one_click() {
    let out = auxilio(&["simulate", fixture("center_click.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let ev = events(&out.stdout);
    let presses: Vec<_> = ev
        .iter()
        .filter(|e| matches!(e.kind, EventKind::ButtonDown(_) | EventKind::ButtonUp(_)))
        .collect();
    assert_eq!(presses.len(), 2);
    assert!(matches!(presses[0].kind, EventKind::ButtonDown(_)));
    assert!(matches!(presses[1].kind, EventKind::ButtonUp(_)));
    assert!(ev.iter().any(|e| e.kind == EventKind::CursorMove { x: 960, y: 540 }));
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let path = fixture("look_and_click.json");
    let run = |seed: &str| auxilio(&["simulate", path.to_str().unwrap(), "--seed", seed]).stdout;
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn replays_match_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let sim = auxilio(&[
        "simulate",
        fixture("look_and_click.json").to_str().unwrap(),
        "--out",
        &p("events.jsonl"),
        "--capture",
        &p("link.auxw"),
        "--imu-out",
        &p("imu.jsonl"),
        "--ir-out",
        &p("ir.jsonl"),
        "--trace",
        &p("trace.jsonl"),
    ]);
    assert_eq!(sim.status.code(), Some(0), "{}", text(&sim.stderr));
    let expected = std::fs::read(p("events.jsonl")).unwrap();
    assert!(!expected.is_empty());

    let from_capture = auxilio(&["replay", "--capture", &p("link.auxw")]);
    assert_eq!(from_capture.stdout, expected);
    let from_streams = auxilio(&["replay", "--imu", &p("imu.jsonl"), "--ir", &p("ir.jsonl")]);
    assert_eq!(from_streams.stdout, expected);

    let trace = std::fs::read_to_string(p("trace.jsonl")).unwrap();
    assert!(trace.lines().next().unwrap().contains("true_yaw"));
}

#[test]
fn empty_trial_log_is_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = auxilio(&["eval-pointing", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = text(&out.stderr);
    assert!(stderr.contains("no trials"));
    assert_eq!(stderr.lines().count(), 1);
}

#[test]
fn unparsable_and_missing_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"trial\": 1}\n").unwrap();
    assert_eq!(auxilio(&["eval-typing", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(auxilio(&["simulate", "/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn unstable_calibration_exits_three() {
    let out = auxilio(&["simulate", fixture("unstable_calibration.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("calibration"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(auxilio(&[]).status.code(), Some(1));
    assert_eq!(auxilio(&["ftest", "a.csv", "b.csv"]).status.code(), Some(1));
    assert_eq!(auxilio(&["replay"]).status.code(), Some(1));
    assert_eq!(auxilio(&["--version"]).status.code(), Some(0));
}

#[test]
fn eval_pointing_reports_agent_session() {
    let cfg = DriverConfig::default();
    let targets = popper_targets(&disabled_user_levels(), &cfg, 0);
    let scenario = scripted_agent(&targets, &AgentParams::default(), &cfg).unwrap();
    let run = run_pipeline(&scenario, &cfg, &SimOptions::default()).unwrap();
    let session = score_session(&run.events, &targets, scenario.calibration_s);
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("trials.jsonl");
    let body: String = session
        .trials
        .iter()
        .map(|t| serde_json::to_string(t).unwrap() + "\n")
        .collect();
    std::fs::write(&log, body).unwrap();

    let out = auxilio(&["eval-pointing", log.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = text(&out.stdout);
    for w in ["32", "64", "96", "128"] {
        assert!(table.lines().any(|l| l.trim_start().starts_with(w)), "{table}");
    }
    let csv = auxilio(&["eval-pointing", log.to_str().unwrap(), "--csv"]);
    assert_eq!(text(&csv.stdout).lines().count(), 5 + 1);
}

#[test]
fn typing_and_ftest_reports() {
    let out = auxilio(&["eval-typing", fixture("typing_sample.jsonl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = text(&out.stdout);
    let be_honest = table.lines().find(|l| l.starts_with("Be honest.") && l.contains("mouse")).unwrap();
    assert!(be_honest.contains("100.00") && be_honest.contains("16.0000"), "{be_honest}");

    let a = fixture("sct_auxilio.csv");
    let b = fixture("sct_mouse.csv");
    let out = auxilio(&["ftest", a.to_str().unwrap(), b.to_str().unwrap(), "--col", "sct"]);
    assert_eq!(out.status.code(), Some(0));
    let line = text(&out.stdout);
    assert!(line.contains("dof = (7, 7)"), "{line}");
    let missing = auxilio(&["ftest", a.to_str().unwrap(), b.to_str().unwrap(), "--col", "wpm"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn serve_streams_the_event_log() {
    let scenario = fixture("look_and_click.json");
    let expected = events(&auxilio(&["simulate", scenario.to_str().unwrap()]).stdout);

    let mut child = Command::new(env!("CARGO_BIN_EXE_auxilio"))
        .args(["serve", "--scenario", scenario.to_str().unwrap(), "--speed", "0", "--queue", "100000"])
        .env("AUXILIO_PORT", "0")
        .stderr(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("ws://").next().unwrap().to_owned();
    assert!(!addr.ends_with(":8090"), "{line}");

    let (mut socket, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
    let mut got = Vec::new();
    loop {
        match socket.read() {
            Ok(tungstenite::Message::Text(t)) => got.push(serde_json::from_str::<OutputEvent>(&t).unwrap()),
            Ok(tungstenite::Message::Close(_)) | Err(_) => break,
            Ok(_) => {}
        }
    }
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(got, expected);
    let mut rest = String::new();
    std::io::Read::read_to_string(&mut stderr, &mut rest).unwrap();
    assert!(rest.contains(&format!("sent {} events, dropped 0", expected.len())), "{rest}");
}
