//! Command-line interface.
//!
//! Six subcommands expose the library:
//!
//! * `run` — one honest signing session; emits the replayable transcript.
//! * `attack` — Monte Carlo forgery experiments with Wilson intervals.
//! * `qkd` — a single BB84 session with optional eavesdropper and noise.
//! * `mix-check` — pad-mixing trace-distance battery.
//! * `efficiency` — transmission accounting for a message length.
//! * `replay` — re-execute a stored transcript and compare bit for bit.
//!
//! Machine-readable output (JSON, or CSV where `--format csv` applies)
//! goes to stdout, or to the file named by `--out`; status lines go to
//! stderr. Exit codes: 0 success, 1 protocol rejection or replay
//! mismatch, 2 usage or transcript-schema errors, 3 internal failures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    efficiency, efficiency_with_seed, mixing_report, run_attack, AttackConfig, AttackModel,
    AttackReport, EfficiencyReport, MixingEntry,
};
use crate::error::{Error, Result};
use crate::protocol::{seeded_session, TranscriptFile};
use crate::qkd::{run_bb84, EveModel, QkdSessionConfig};
use crate::rng::RandomStream;

/// Simulator and analysis harness for an arbitrated single-photon
/// signature protocol.
#[derive(Debug, Parser)]
#[command(name = "qsig", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one honest signing session and emit its transcript.
    Run {
        /// Message length in bits.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Seed for keys, message, and measurements.
        #[arg(long, env = "QSIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Write the transcript to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate forgery detection rates under a threat model.
    Attack {
        /// Threat model to simulate.
        #[arg(long, value_enum, default_value_t = ModelArg::Outsider)]
        model: ModelArg,
        /// Message length in bits.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Number of independent forgery trials.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Base seed; trial t runs on substream t.
        #[arg(long, env = "QSIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Output encoding.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write the report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one BB84 key-distribution session and report its statistics.
    Qkd {
        /// Number of raw photons to transmit.
        #[arg(long, default_value_t = 512)]
        raw_len: usize,
        /// Seed for the session.
        #[arg(long, env = "QSIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Eavesdropper model on the channel.
        #[arg(long, value_enum, default_value_t = EveArg::None)]
        eve: EveArg,
        /// Independent bit-flip probability in the preparation basis.
        #[arg(long, default_value_t = 0.0)]
        noise_p: f64,
        /// Fraction of sifted bits sacrificed for error estimation.
        #[arg(long, default_value_t = 0.25)]
        sample_fraction: f64,
        /// Output encoding.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write the statistics to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that key-averaged pad ciphertexts are maximally mixed.
    MixCheck {
        /// Largest register size to test (1 to 3).
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        /// Output encoding.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write the battery results to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report transmission efficiency for a message length.
    Efficiency {
        /// Message length in bits.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Seed for the underlying session (structure is seed-independent).
        #[arg(long, env = "QSIG_SEED")]
        seed: Option<u64>,
        /// Output encoding.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write the report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a stored transcript and verify it matches bit for bit.
    Replay {
        /// Transcript file produced by `qsig run`.
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Outsider,
    DishonestBob,
}

impl From<ModelArg> for AttackModel {
    fn from(arg: ModelArg) -> Self {
        match arg {
            ModelArg::Outsider => AttackModel::Outsider,
            ModelArg::DishonestBob => AttackModel::DishonestBob,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EveArg {
    None,
    InterceptResend,
}

impl From<EveArg> for EveModel {
    fn from(arg: EveArg) -> Self {
        match arg {
            EveArg::None => EveModel::None,
            EveArg::InterceptResend => EveModel::InterceptResend,
        }
    }
}

impl EveArg {
    fn name(self) -> &'static str {
        match self {
            EveArg::None => "none",
            EveArg::InterceptResend => "intercept-resend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// Statistics of one CLI-driven BB84 session.
#[derive(Debug, Serialize)]
struct QkdStats {
    raw_len: usize,
    sifted_len: usize,
    qber: f64,
    aborted: bool,
    eve: &'static str,
    noise_p: f64,
    seed: u64,
}

/// Parse the process arguments and execute; returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            3
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run { n, seed, out } => cmd_run(n, seed, out.as_deref()),
        Command::Attack {
            model,
            n,
            trials,
            seed,
            format,
            out,
        } => cmd_attack(model.into(), n, trials, seed, format, out.as_deref()),
        Command::Qkd {
            raw_len,
            seed,
            eve,
            noise_p,
            sample_fraction,
            format,
            out,
        } => cmd_qkd(raw_len, seed, eve, noise_p, sample_fraction, format, out.as_deref()),
        Command::MixCheck {
            qubits,
            format,
            out,
        } => cmd_mix_check(qubits, format, out.as_deref()),
        Command::Efficiency {
            n,
            seed,
            format,
            out,
        } => cmd_efficiency(n, seed, format, out.as_deref()),
        Command::Replay { path } => cmd_replay(&path),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(n: usize, seed: u64, out: Option<&Path>) -> Result<i32> {
    let file = seeded_session(n, seed)?;
    let accepted = file.result.accepted;
    eprintln!(
        "signed {n}-bit message under seed {seed}: accepted={accepted} gamma={} xi={} q_t={} b_t={}",
        file.result.gamma, file.result.xi, file.q_t, file.b_t
    );
    let mut text = file.to_json()?;
    text.push('\n');
    emit(&text, out)?;
    Ok(if accepted { 0 } else { 1 })
}

fn attack_csv(report: &AttackReport) -> String {
    let mut text = String::from(
        "model,n,trials,detected,empirical_rate,wilson_lo,wilson_hi,paper_bound,exact_rate\n",
    );
    let exact = report
        .exact_rate
        .map(|v| v.to_string())
        .unwrap_or_default();
    let _ = writeln!(
        text,
        "{},{},{},{},{},{},{},{},{}",
        report.model.name(),
        report.n,
        report.trials,
        report.detected,
        report.empirical_rate,
        report.wilson_lo,
        report.wilson_hi,
        report.paper_bound,
        exact
    );
    text
}

fn cmd_attack(
    model: AttackModel,
    n: usize,
    trials: u64,
    seed: u64,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<i32> {
    let cfg = AttackConfig {
        model,
        n,
        trials,
        seed,
    };
    let report = run_attack(&cfg)?;
    eprintln!(
        "{} forgery, n={n}, {trials} trials: detected {} (rate {:.4}, 95% CI [{:.4}, {:.4}])",
        model.name(),
        report.detected,
        report.empirical_rate,
        report.wilson_lo,
        report.wilson_hi
    );
    let text = match format {
        FormatArg::Json => to_json_line(&report)?,
        FormatArg::Csv => attack_csv(&report),
    };
    emit(&text, out)?;
    Ok(0)
}

fn cmd_qkd(
    raw_len: usize,
    seed: u64,
    eve: EveArg,
    noise_p: f64,
    sample_fraction: f64,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<i32> {
    let cfg = QkdSessionConfig {
        raw_len,
        eve: eve.into(),
        noise_p,
        sample_fraction,
    };
    let outcome = run_bb84(&cfg, &mut RandomStream::new(seed))?;
    let stats = QkdStats {
        raw_len,
        sifted_len: outcome.sifted_len,
        qber: outcome.qber,
        aborted: outcome.aborted,
        eve: eve.name(),
        noise_p,
        seed,
    };
    eprintln!(
        "bb84 raw={raw_len} sifted={} qber={:.4} aborted={} key_bits={}",
        stats.sifted_len,
        stats.qber,
        stats.aborted,
        outcome.key_sender.len()
    );
    let text = match format {
        FormatArg::Json => to_json_line(&stats)?,
        FormatArg::Csv => {
            let mut text = String::from("raw_len,sifted_len,qber,aborted,eve,noise_p,seed\n");
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{}",
                stats.raw_len,
                stats.sifted_len,
                stats.qber,
                stats.aborted,
                stats.eve,
                stats.noise_p,
                stats.seed
            );
            text
        }
    };
    emit(&text, out)?;
    Ok(0)
}

fn cmd_mix_check(qubits: usize, format: FormatArg, out: Option<&Path>) -> Result<i32> {
    let entries = mixing_report(qubits)?;
    let worst = entries
        .iter()
        .map(|e| e.trace_distance)
        .fold(0.0f64, f64::max);
    eprintln!(
        "pad mixing over {} registers up to {qubits} qubits: worst trace distance {worst:.3e}",
        entries.len()
    );
    let text = match format {
        FormatArg::Json => to_json_line(&entries)?,
        FormatArg::Csv => {
            let mut text = String::from("m,label,trace_distance\n");
            for MixingEntry {
                m,
                label,
                trace_distance,
            } in &entries
            {
                let _ = writeln!(text, "{m},{label},{trace_distance}");
            }
            text
        }
    };
    emit(&text, out)?;
    Ok(0)
}

fn cmd_efficiency(
    n: usize,
    seed: Option<u64>,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<i32> {
    let report = match seed {
        Some(seed) => efficiency_with_seed(n, seed)?,
        None => efficiency(n)?,
    };
    eprintln!(
        "efficiency at n={n}: {} signed bits over {} qubits + {} classical bits, eta={:.6}",
        report.b_s, report.q_t, report.b_t, report.eta
    );
    let text = match format {
        FormatArg::Json => to_json_line(&report)?,
        FormatArg::Csv => efficiency_csv(&report),
    };
    emit(&text, out)?;
    Ok(0)
}

fn efficiency_csv(report: &EfficiencyReport) -> String {
    let mut text = String::from("n,b_s,q_t,b_t,eta\n");
    let _ = writeln!(
        text,
        "{},{},{},{},{}",
        report.n, report.b_s, report.q_t, report.b_t, report.eta
    );
    text
}

fn cmd_replay(path: &Path) -> Result<i32> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let stored = match TranscriptFile::from_json(&text) {
        Ok(file) => file,
        Err(err) => {
            eprintln!("error: {err}");
            return Ok(2);
        }
    };
    let fresh = seeded_session(stored.n, stored.seed)?;
    if stored.to_json()? == fresh.to_json()? {
        eprintln!(
            "replayed n={} seed={}: transcript matches the recomputation",
            stored.n, stored.seed
        );
        Ok(0)
    } else {
        eprintln!(
            "replay mismatch: stored transcript for n={} seed={} differs from the recomputation",
            stored.n, stored.seed
        );
        Ok(1)
    }
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string(value).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
