//! Command-line front end: simulation, replay, evaluation reports and the
//! WebSocket bridge for the browser task board.

use std::collections::VecDeque;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::actuation::IrSample;
use crate::driver::{DriverConfig, EventKind, OutputEvent};
use crate::eval::report::{
    pointing_csv, pointing_table, read_csv_column, read_jsonl, read_sus_csv, sus_csv, sus_table, typing_csv,
    typing_table,
};
use crate::eval::{f_test, f_test_ordered, summarize_trials, summarize_typing, sus_summary, EvalError, TrialRecord, TypingRecord};
use crate::orientation::{FilterConfig, ImuSample};
use crate::sim::{
    generate_streams, run_streams, Receiver, Scenario, SimError, SimOptions, Transmitter, TransmitterConfig, IR_BASELINE,
};
use crate::wire::MAX_FRAME_LEN;

pub const DEFAULT_PORT: u16 = 8090;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Calibration(_) => 3,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        if e.is_calibration_failure() {
            CliError::Calibration(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn output_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("cannot write {}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "auxilio", version, about = "Head-mounted mouse pipeline, simulator and evaluation tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scripted scenario through sensors, filter, link and driver.
    Simulate(SimulateArgs),
    /// Drive the pipeline from recorded sensor streams or a raw link capture.
    Replay(ReplayArgs),
    /// Completion-time statistics of pointing trials, per target width.
    EvalPointing(EvalArgs),
    /// Per-sentence typing metrics.
    EvalTyping(EvalArgs),
    /// System Usability Scale scores and grade.
    Sus(EvalArgs),
    /// F-test for equality of variances between two CSV columns.
    Ftest(FtestArgs),
    /// Stream driver events to one WebSocket client.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DriverArgs {
    #[arg(long, default_value_t = 1920)]
    pub screen_width: u32,
    #[arg(long, default_value_t = 1080)]
    pub screen_height: u32,
    /// Degrees of head rotation from centre to screen edge.
    #[arg(long, default_value_t = 15.0)]
    pub range_deg: f64,
    /// Swap the buttons driven by the two cheeks.
    #[arg(long)]
    pub invert_clicks: bool,
}

impl DriverArgs {
    fn config(&self) -> Result<DriverConfig, CliError> {
        let cfg = DriverConfig {
            screen_w: self.screen_width,
            screen_h: self.screen_height,
            range_deg: self.range_deg,
            invert_clicks: self.invert_clicks,
            ..DriverConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    /// Event log (JSON Lines); `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Filter gain.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Raw link bytes (.auxw).
    #[arg(long)]
    pub capture: Option<PathBuf>,
    /// Estimated vs true head angles per tick (JSON Lines).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Synthesized IMU stream (JSON Lines).
    #[arg(long)]
    pub imu_out: Option<PathBuf>,
    /// Synthesized IR stream (JSON Lines).
    #[arg(long)]
    pub ir_out: Option<PathBuf>,
    #[command(flatten)]
    pub driver: DriverArgs,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Raw link capture (.auxw).
    #[arg(long, conflicts_with = "imu")]
    pub capture: Option<PathBuf>,
    /// IMU stream (JSON Lines).
    #[arg(long)]
    pub imu: Option<PathBuf>,
    /// IR stream (JSON Lines); a resting baseline is assumed when absent.
    #[arg(long, requires = "imu")]
    pub ir: Option<PathBuf>,
    /// Sample rate in Hz; inferred from IMU timestamps when omitted, 100 for captures.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Length of the calibration phase at the start of a sensor stream.
    #[arg(long, default_value_t = 8.0)]
    pub calibration_s: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Event log (JSON Lines); `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[command(flatten)]
    pub driver: DriverArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub input: PathBuf,
    /// Emit CSV instead of a text table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct FtestArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Column to compare.
    #[arg(long)]
    pub col: String,
    /// Put the larger variance in the numerator.
    #[arg(long)]
    pub ordered: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "AUXILIO_PORT", default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    /// Scenario JSON to simulate live.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Playback speed relative to real time; 0 sends as fast as possible.
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    /// Events held for the socket writer before the oldest are dropped.
    #[arg(long, default_value_t = 1024)]
    pub queue: usize,
    #[command(flatten)]
    pub driver: DriverArgs,
}

/// Parse `args` (program name first) and run the command. Returns the
/// process exit code; diagnostics go to `err` as single lines.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let first: Vec<&str> = text.lines().take_while(|l| !l.trim().is_empty()).map(str::trim).collect();
            let _ = writeln!(err, "{}", first.join(" "));
            return 1;
        }
    };
    match run(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => simulate(a, out, err),
        Command::Replay(a) => replay(a, out, err),
        Command::EvalPointing(a) => eval_pointing(a, out, err),
        Command::EvalTyping(a) => eval_typing(a, out),
        Command::Sus(a) => sus(a, out),
        Command::Ftest(a) => ftest(a, out, err),
        Command::Serve(a) => serve(a, err),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| input_error(path, e))
}

fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let scenario: Scenario = serde_json::from_reader(open(path)?).map_err(|e| input_error(path, e))?;
    scenario.validate().map_err(|e| input_error(path, e))?;
    Ok(scenario)
}

fn filter_config(beta: f64, rate: f64) -> Result<FilterConfig, CliError> {
    let cfg = FilterConfig {
        beta,
        sample_rate_hz: rate,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn write_jsonl<T: Serialize>(w: &mut dyn Write, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Write to `path`, or to `out` when the path is `-`.
fn emit(path: &Path, out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    if path == Path::new("-") {
        return body(out).map_err(|e| output_error(path, e));
    }
    let file = File::create(path).map_err(|e| output_error(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| output_error(path, e))
}

fn count_presses(events: &[OutputEvent]) -> usize {
    events.iter().filter(|e| matches!(e.kind, EventKind::ButtonDown(_))).count()
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let driver_cfg = a.driver.config()?;
    let scenario = read_scenario(&a.scenario)?;
    let opts = SimOptions {
        seed: a.seed,
        filter: filter_config(a.beta, scenario.sample_rate)?,
        ..SimOptions::default()
    };
    let streams = generate_streams(&scenario, a.seed)?;
    let result = run_streams(
        &streams.imu,
        &streams.ir,
        &driver_cfg,
        &opts.transmitter(&scenario),
        Some(&streams.trajectory),
    )?;
    emit(&a.out, out, |w| write_jsonl(w, &result.events))?;
    if let Some(path) = &a.capture {
        emit(path, out, |w| w.write_all(&result.capture))?;
    }
    if let Some(path) = &a.trace {
        emit(path, out, |w| write_jsonl(w, &result.trace))?;
    }
    if let Some(path) = &a.imu_out {
        emit(path, out, |w| write_jsonl(w, &streams.imu))?;
    }
    if let Some(path) = &a.ir_out {
        emit(path, out, |w| write_jsonl(w, &streams.ir))?;
    }
    let _ = writeln!(
        err,
        "simulate: {} samples, {} events, {} button presses, {} link errors",
        streams.imu.len(),
        result.events.len(),
        count_presses(&result.events),
        result.decode.errors()
    );
    Ok(())
}

/// Where replayed or live data comes from.
enum Source {
    Streams {
        imu: Vec<ImuSample>,
        ir: Vec<IrSample>,
        tx: TransmitterConfig,
    },
    Capture {
        bytes: Vec<u8>,
        rate: f64,
    },
}

fn infer_rate(imu: &[ImuSample]) -> Option<f64> {
    let (first, last) = (imu.first()?, imu.last()?);
    let span = last.t - first.t;
    (imu.len() > 1 && span > 0.0).then(|| (imu.len() - 1) as f64 / span)
}

fn load_source(s: &SourceArgs) -> Result<Source, CliError> {
    if let Some(path) = &s.capture {
        let bytes = std::fs::read(path).map_err(|e| input_error(path, e))?;
        let rate = s.rate.unwrap_or(100.0);
        if !(rate.is_finite() && rate > 0.0) {
            return Err(CliError::Usage(format!("sample rate {rate} Hz")));
        }
        return Ok(Source::Capture { bytes, rate });
    }
    let Some(imu_path) = &s.imu else {
        return Err(CliError::Usage("one of --capture or --imu is required".into()));
    };
    let imu: Vec<ImuSample> = read_jsonl(open(imu_path)?).map_err(|e| input_error(imu_path, e))?;
    if imu.is_empty() {
        return Err(input_error(imu_path, "no IMU samples"));
    }
    let ir = match &s.ir {
        Some(path) => read_jsonl(open(path)?).map_err(|e| input_error(path, e))?,
        None => imu
            .iter()
            .map(|m| IrSample {
                t: m.t,
                left: IR_BASELINE as u32,
                right: IR_BASELINE as u32,
            })
            .collect(),
    };
    let rate = match s.rate.or_else(|| infer_rate(&imu)) {
        Some(r) => r,
        None => return Err(input_error(imu_path, "cannot infer sample rate; pass --rate")),
    };
    let tx = TransmitterConfig {
        sample_rate: rate,
        calibration_s: s.calibration_s,
        filter: filter_config(s.beta, rate)?,
        ..TransmitterConfig::default()
    };
    Ok(Source::Streams { imu, ir, tx })
}

/// Run `source` through transmitter, link and driver one tick at a time,
/// handing each event to `sink` until it returns false.
fn stream_events(
    source: &Source,
    driver_cfg: &DriverConfig,
    sink: &mut dyn FnMut(OutputEvent) -> bool,
) -> Result<(), CliError> {
    match source {
        Source::Streams { imu, ir, tx } => {
            if imu.len() != ir.len() {
                return Err(SimError::MismatchedStreams {
                    imu: imu.len(),
                    ir: ir.len(),
                }
                .into());
            }
            let mut transmitter = Transmitter::new(*tx)?;
            let mut rx = Receiver::new(*driver_cfg, tx.sample_rate)?;
            let mut bytes = Vec::new();
            for (s, r) in imu.iter().zip(ir) {
                bytes.clear();
                for f in transmitter.step(s, r)? {
                    crate::wire::encode_into(&f, &mut bytes);
                }
                for e in rx.push(&bytes) {
                    if !sink(e) {
                        return Ok(());
                    }
                }
            }
            if transmitter.reference().is_none() {
                return Err(CliError::Input("stream ends before calibration completes".into()));
            }
            Ok(())
        }
        Source::Capture { bytes, rate } => {
            let mut rx = Receiver::new(*driver_cfg, *rate)?;
            for chunk in bytes.chunks(MAX_FRAME_LEN) {
                for e in rx.push(chunk) {
                    if !sink(e) {
                        return Ok(());
                    }
                }
            }
            Ok(())
        }
    }
}

fn replay(a: ReplayArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let driver_cfg = a.driver.config()?;
    let source = load_source(&a.source)?;
    let mut events = Vec::new();
    stream_events(&source, &driver_cfg, &mut |e| {
        events.push(e);
        true
    })?;
    emit(&a.out, out, |w| write_jsonl(w, &events))?;
    let _ = writeln!(
        err,
        "replay: {} events, {} button presses",
        events.len(),
        count_presses(&events)
    );
    Ok(())
}

fn eval_input<T>(path: &Path, r: Result<T, EvalError>) -> Result<T, CliError> {
    r.map_err(|e| input_error(path, e))
}

fn eval_pointing(a: EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let trials: Vec<TrialRecord> = eval_input(&a.input, read_jsonl(open(&a.input)?))?;
    let summary = eval_input(&a.input, summarize_trials(&trials))?;
    for w in &summary.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let text = if a.csv {
        eval_input(&a.input, pointing_csv(&summary))?
    } else {
        pointing_table(&summary)
    };
    write!(out, "{text}").map_err(|e| output_error(Path::new("-"), e))
}

fn eval_typing(a: EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let records: Vec<TypingRecord> = eval_input(&a.input, read_jsonl(open(&a.input)?))?;
    let rows = eval_input(&a.input, summarize_typing(&records))?;
    let text = if a.csv {
        eval_input(&a.input, typing_csv(&rows))?
    } else {
        typing_table(&rows)
    };
    write!(out, "{text}").map_err(|e| output_error(Path::new("-"), e))
}

fn sus(a: EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let responses = eval_input(&a.input, read_sus_csv(open(&a.input)?))?;
    let summary = eval_input(&a.input, sus_summary(&responses))?;
    let text = if a.csv {
        eval_input(&a.input, sus_csv(&responses, &summary))?
    } else {
        sus_table(&responses, &summary)
    };
    write!(out, "{text}").map_err(|e| output_error(Path::new("-"), e))
}

fn ftest(a: FtestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let xs = eval_input(&a.a, read_csv_column(open(&a.a)?, &a.col))?;
    let ys = eval_input(&a.b, read_csv_column(open(&a.b)?, &a.col))?;
    let (result, swapped) = if a.ordered {
        f_test_ordered(&xs, &ys)
    } else {
        f_test(&xs, &ys).map(|r| (r, false))
    }
    .map_err(|e| CliError::Input(format!("{} vs {}: {e}", a.a.display(), a.b.display())))?;
    if swapped {
        let _ = writeln!(err, "note: B has the larger variance and is used as the numerator");
    } else if result.f_stat < 1.0 {
        let _ = writeln!(err, "note: A has the smaller variance; pass --ordered to swap");
    }
    let p = if result.p_value < 1e-4 {
        format!("{:.3e}", result.p_value)
    } else {
        format!("{:.4}", result.p_value)
    };
    writeln!(
        out,
        "column {}: F = {:.4}, dof = ({}, {}), p = {p}",
        a.col, result.f_stat, result.dof.0, result.dof.1
    )
    .map_err(|e| output_error(Path::new("-"), e))
}

/// Bounded hand-off between the pipeline and the socket writer. When full,
/// the oldest message is discarded and counted.
struct EventQueue {
    state: Mutex<QueueState>,
    ready: Condvar,
    capacity: usize,
}

#[derive(Default)]
struct QueueState {
    items: VecDeque<String>,
    dropped: u64,
    closed: bool,
}

impl EventQueue {
    fn new(capacity: usize) -> Self {
        Self {
            state: Mutex::new(QueueState::default()),
            ready: Condvar::new(),
            capacity: capacity.max(1),
        }
    }

    fn push(&self, msg: String) {
        let mut s = self.state.lock().unwrap();
        if s.items.len() == self.capacity {
            s.items.pop_front();
            s.dropped += 1;
        }
        s.items.push_back(msg);
        self.ready.notify_one();
    }

    fn close(&self) {
        self.state.lock().unwrap().closed = true;
        self.ready.notify_all();
    }

    /// Next message, or `None` once closed and drained.
    fn pop(&self) -> Option<String> {
        let mut s = self.state.lock().unwrap();
        loop {
            if let Some(m) = s.items.pop_front() {
                return Some(m);
            }
            if s.closed {
                return None;
            }
            s = self.ready.wait(s).unwrap();
        }
    }

    fn dropped(&self) -> u64 {
        self.state.lock().unwrap().dropped
    }
}

fn serve(a: ServeArgs, err: &mut dyn Write) -> Result<(), CliError> {
    let driver_cfg = a.driver.config()?;
    if !(a.speed.is_finite() && a.speed >= 0.0) {
        return Err(CliError::Usage(format!("speed {} must be >= 0", a.speed)));
    }
    if a.scenario.is_some() && (a.source.capture.is_some() || a.source.imu.is_some()) {
        return Err(CliError::Usage("--scenario cannot be combined with --capture or --imu".into()));
    }
    let source = match &a.scenario {
        Some(path) => {
            let scenario = read_scenario(path)?;
            let opts = SimOptions {
                seed: a.seed,
                filter: filter_config(a.source.beta, scenario.sample_rate)?,
                ..SimOptions::default()
            };
            let streams = generate_streams(&scenario, a.seed)?;
            Source::Streams {
                imu: streams.imu,
                ir: streams.ir,
                tx: opts.transmitter(&scenario),
            }
        }
        None => load_source(&a.source)?,
    };

    let listener = TcpListener::bind((a.bind.as_str(), a.port))
        .map_err(|e| CliError::Usage(format!("cannot listen on {}:{}: {e}", a.bind, a.port)))?;
    let addr = listener.local_addr().map_err(|e| CliError::Usage(e.to_string()))?;
    let _ = writeln!(err, "serve: listening on ws://{addr}");
    let _ = err.flush();
    let (stream, peer) = listener.accept().map_err(|e| CliError::Usage(format!("accept failed: {e}")))?;
    drop(listener);
    let mut socket =
        tungstenite::accept(stream).map_err(|e| CliError::Usage(format!("handshake with {peer} failed: {e}")))?;
    let _ = writeln!(err, "serve: client {peer} connected");
    let _ = err.flush();

    let queue = Arc::new(EventQueue::new(a.queue));
    let stop = Arc::new(AtomicBool::new(false));
    let producer = {
        let queue = Arc::clone(&queue);
        let stop = Arc::clone(&stop);
        let speed = a.speed;
        thread::spawn(move || {
            let start = Instant::now();
            let mut t0: Option<f64> = None;
            let result = stream_events(&source, &driver_cfg, &mut |e| {
                if speed > 0.0 {
                    let origin = *t0.get_or_insert(e.t);
                    let due = Duration::from_secs_f64(((e.t - origin) / speed).max(0.0));
                    if let Some(wait) = due.checked_sub(start.elapsed()) {
                        thread::sleep(wait);
                    }
                }
                match serde_json::to_string(&e) {
                    Ok(msg) => queue.push(msg),
                    Err(_) => return false,
                }
                !stop.load(Ordering::Relaxed)
            });
            queue.close();
            result
        })
    };

    let mut sent = 0u64;
    let mut client_gone = None;
    while let Some(msg) = queue.pop() {
        if let Err(e) = socket.send(tungstenite::Message::text(msg)) {
            client_gone = Some(e.to_string());
            stop.store(true, Ordering::Relaxed);
            break;
        }
        sent += 1;
    }
    let produced = producer
        .join()
        .map_err(|_| CliError::Usage("pipeline thread panicked".into()))?;
    if client_gone.is_none() {
        let _ = socket.close(None);
        let _ = socket.flush();
    }
    let _ = writeln!(err, "serve: sent {sent} events, dropped {}", queue.dropped());
    if let Some(why) = client_gone {
        let _ = writeln!(err, "serve: client disconnected: {why}");
    }
    produced
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queue_drops_oldest_when_full() {
        let q = EventQueue::new(2);
        for m in ["a", "b", "c"] {
            q.push(m.into());
        }
        q.close();
        assert_eq!(q.dropped(), 1);
        assert_eq!(q.pop().as_deref(), Some("b"));
        assert_eq!(q.pop().as_deref(), Some("c"));
        assert_eq!(q.pop(), None);
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_cli(["auxilio", "frobnicate"], &mut out, &mut err), 1);
        assert_eq!(String::from_utf8(err).unwrap().lines().count(), 1);
        assert_eq!(run_cli(["auxilio", "--help"], &mut out, &mut Vec::new()), 0);
    }

    #[test]
    fn missing_input_exits_two() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_cli(["auxilio", "sus", "/nonexistent/ratings.csv"], &mut out, &mut err), 2);
    }

    #[test]
    fn rate_is_inferred_from_timestamps() {
        let s = |t| ImuSample {
            t,
            gyro: [0.0; 3],
            accel: [0.0, 0.0, 1.0],
            mag: None,
        };
        let r = infer_rate(&[s(0.0), s(0.02), s(0.04)]).unwrap();
        assert!((r - 50.0).abs() < 1e-9);
        assert_eq!(infer_rate(&[s(0.0)]), None);
    }
}
