//! Batch front-end: check FEN streams, evaluate predictions against ground
//! truth, replay PGN corpora, synthesize noisy predictors and estimate the
//! random-guesser baseline.

mod lines;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use chess_coherence::baseline::{self, BaselineEstimate};
use chess_coherence::corrupt::CorruptionSpec;
use chess_coherence::metrics::{EvalAccumulator, MetricsError};
use chess_coherence::replay::{replay, PgnError, PgnReader};
use chess_coherence::rules::{self, COUNTING_CONVENTION, RULE_SET_VERSION};
use chess_coherence::Board;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use lines::{next_batch, open_input, open_output, records, Format, Record};

/// Games handed to the worker pool at a time during replay.
const GAME_BATCH: usize = 256;

#[derive(Parser)]
#[command(
    name = "chess-coherence",
    version,
    about = "Sanity checks and coherence metrics for chess board-state predictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every board of a stream against the sanity rules.
    ///
    /// Exit status: 0 all sane, 1 some board insane, 2 some line unparsable.
    Check {
        /// Board file, one per line (stdin if absent or "-").
        input: Option<PathBuf>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Score predictions against line-aligned ground truth.
    Eval {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Baseline cache enabling adjusted likelihoods; created if absent.
        #[arg(long)]
        baseline_cache: Option<PathBuf>,
        /// Samples used if the baseline cache must be (re)built.
        #[arg(long)]
        samples: Option<u64>,
        /// Seed used if the baseline cache must be (re)built.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Replay PGN games into one board per ply.
    ///
    /// Games that fail to parse or replay are reported and skipped; the
    /// exit status is then 1.
    Replay {
        /// PGN file (stdin if absent or "-").
        input: Option<PathBuf>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Replace each cell with probability epsilon by a uniform class.
    Corrupt {
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Estimate per-rule violation frequencies of a uniform random guesser.
    ///
    /// With --output, an existing cache for the same samples, seed and rule
    /// set is reused instead of being recomputed.
    Baseline {
        #[arg(long, default_value_t = baseline::DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = baseline::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IoArgs {
    #[arg(long, value_enum, default_value_t = Format::Fen)]
    format: Format,
    /// Write results here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { input, io } => cmd_check(input.as_deref(), &io),
        Command::Eval {
            truth,
            pred,
            baseline_cache,
            samples,
            seed,
            io,
        } => cmd_eval(&truth, &pred, baseline_cache.as_deref(), samples, seed, &io),
        Command::Replay { input, io } => cmd_replay(input.as_deref(), &io),
        Command::Corrupt {
            truth,
            epsilon,
            seed,
            io,
        } => cmd_corrupt(truth.as_deref(), epsilon, seed, &io),
        Command::Baseline {
            samples,
            seed,
            output,
        } => cmd_baseline(samples, seed, output.as_ref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn source_name(path: Option<&Path>) -> String {
    path.map_or_else(|| "<stdin>".to_owned(), |p| p.display().to_string())
}

fn cmd_check(input: Option<&Path>, io: &IoArgs) -> anyhow::Result<u8> {
    let name = source_name(input);
    let mut lines = records(open_input(input)?);
    let mut out = open_output(io.output.as_ref())?;
    let (mut boards, mut insane, mut violations, mut bad_lines) = (0u64, 0u64, 0u64, 0u64);
    loop {
        let batch = next_batch(&mut lines).with_context(|| format!("reading {name}"))?;
        if batch.is_empty() {
            break;
        }
        let results: Vec<_> = batch
            .par_iter()
            .map(|r| io.format.parse(&r.text).map(|b| rules::check(&b)))
            .collect();
        for (rec, result) in batch.iter().zip(results) {
            match result {
                Ok(report) => {
                    boards += 1;
                    insane += u64::from(!report.is_sane());
                    violations += report.violation_count() as u64;
                    let ids: Vec<String> = report
                        .violations()
                        .iter()
                        .map(ToString::to_string)
                        .collect();
                    let row =
                        json!({"line": rec.line, "sane": report.is_sane(), "violations": ids});
                    writeln!(out, "{row}")?;
                }
                Err(e) => {
                    bad_lines += 1;
                    eprintln!("{name}:{}: {e}", rec.line);
                }
            }
        }
    }
    let pct = |k: u64| {
        if boards == 0 {
            0.0
        } else {
            100.0 * k as f64 / boards as f64
        }
    };
    let summary = json!({"summary": {
        "rule_set_version": RULE_SET_VERSION,
        "convention": COUNTING_CONVENTION,
        "boards": boards,
        "insane": insane,
        "parse_errors": bad_lines,
        "c_pct": pct(insane),
        "mu_c": if boards == 0 { 0.0 } else { violations as f64 / boards as f64 },
    }});
    writeln!(out, "{summary}")?;
    out.flush()?;
    Ok(if bad_lines > 0 {
        2
    } else if insane > 0 {
        1
    } else {
        0
    })
}

fn cmd_eval(
    truth: &Path,
    pred: &Path,
    cache: Option<&Path>,
    samples: Option<u64>,
    seed: Option<u64>,
    io: &IoArgs,
) -> anyhow::Result<u8> {
    let (tname, pname) = (source_name(Some(truth)), source_name(Some(pred)));
    let mut truth_lines = records(open_input(Some(truth))?);
    let mut pred_lines = records(open_input(Some(pred))?);
    let mut acc = EvalAccumulator::new();
    let (mut n_truth, mut n_pred, mut bad_lines) = (0usize, 0usize, 0usize);

    let parse = |name: &str, rec: &Record| {
        io.format
            .parse(&rec.text)
            .map_err(|e| format!("{name}:{}: {e}", rec.line))
    };
    loop {
        let tb = next_batch(&mut truth_lines).with_context(|| format!("reading {tname}"))?;
        let pb = next_batch(&mut pred_lines).with_context(|| format!("reading {pname}"))?;
        n_truth += tb.len();
        n_pred += pb.len();
        if tb.is_empty() && pb.is_empty() {
            break;
        }
        let parsed: Vec<Result<(Board, Board), Vec<String>>> = tb
            .par_iter()
            .zip(&pb)
            .map(|(t, p)| match (parse(&tname, t), parse(&pname, p)) {
                (Ok(y), Ok(yhat)) => Ok((y, yhat)),
                (y, yhat) => Err(y.err().into_iter().chain(yhat.err()).collect()),
            })
            .collect();
        let mut good = Vec::with_capacity(parsed.len());
        for r in parsed {
            match r {
                Ok(pair) => good.push(pair),
                Err(msgs) => {
                    bad_lines += 1;
                    msgs.iter().for_each(|m| eprintln!("{m}"));
                }
            }
        }
        let part = good
            .par_iter()
            .fold(EvalAccumulator::new, |mut a, (y, yhat)| {
                a.push(y, yhat);
                a
            })
            .reduce(EvalAccumulator::new, |mut a, b| {
                a.merge(&b);
                a
            });
        acc.merge(&part);
        if tb.len() != pb.len() {
            // one side ran out; count the rest of the other for the report
            n_truth += truth_lines.by_ref().count();
            n_pred += pred_lines.by_ref().count();
            break;
        }
    }
    if n_truth != n_pred {
        bail!(MetricsError::LengthMismatch {
            truth: n_truth,
            predictions: n_pred
        });
    }
    if bad_lines > 0 {
        eprintln!("error: {bad_lines} unparsable line pair(s); no report written");
        return Ok(2);
    }
    if acc.insane_ground_truth() > 0 {
        eprintln!(
            "warning: {} ground-truth board(s) in {tname} violate the sanity rules",
            acc.insane_ground_truth()
        );
    }
    let baseline = match cache {
        Some(path) => {
            let (est, recomputed) = BaselineEstimate::load_or_refresh(
                path,
                samples.unwrap_or(baseline::DEFAULT_SAMPLES),
                seed.unwrap_or(baseline::DEFAULT_SEED),
            )
            .with_context(|| format!("baseline cache {}", path.display()))?;
            if recomputed {
                eprintln!("rebuilt baseline cache {}", path.display());
            }
            Some(est)
        }
        None => None,
    };
    let report = acc.report(baseline.as_ref())?;
    let mut out = open_output(io.output.as_ref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(0)
}

fn cmd_replay(input: Option<&Path>, io: &IoArgs) -> anyhow::Result<u8> {
    let mut games = PgnReader::new(open_input(input)?).enumerate();
    let mut out = open_output(io.output.as_ref())?;
    let (mut replayed, mut states, mut skipped) = (0usize, 0usize, 0usize);
    loop {
        let batch: Vec<_> = games.by_ref().take(GAME_BATCH).collect();
        if batch.is_empty() {
            break;
        }
        let results: Vec<_> = batch
            .into_par_iter()
            .map(|(i, game)| {
                let boards = match game {
                    Ok(g) => replay(&g).map_err(|e| e.to_string()),
                    Err(PgnError::EmptyInput) => return (i, Err(None)),
                    Err(e) => Err(e.to_string()),
                };
                (i, boards.map_err(Some))
            })
            .collect();
        for (i, result) in results {
            match result {
                Ok(boards) => {
                    replayed += 1;
                    states += boards.len();
                    for b in &boards {
                        writeln!(out, "{}", io.format.render(b))?;
                    }
                }
                Err(Some(msg)) => {
                    skipped += 1;
                    eprintln!("game {}: {msg}; skipped", i + 1);
                }
                Err(None) => bail!("{}: no games found", source_name(input)),
            }
        }
    }
    out.flush()?;
    eprintln!("replayed {replayed} game(s), {states} state(s), skipped {skipped}");
    Ok(u8::from(skipped > 0))
}

fn cmd_corrupt(truth: Option<&Path>, epsilon: f64, seed: u64, io: &IoArgs) -> anyhow::Result<u8> {
    let spec = CorruptionSpec::new(epsilon, seed)?;
    let name = source_name(truth);
    let mut lines = records(open_input(truth)?);
    let mut out = open_output(io.output.as_ref())?;
    let mut index = 0u64;
    let mut bad_lines = 0usize;
    loop {
        let batch = next_batch(&mut lines).with_context(|| format!("reading {name}"))?;
        if batch.is_empty() {
            break;
        }
        // every record keeps its position in the stream, parsed or not
        let first = index;
        index += batch.len() as u64;
        let results: Vec<_> = batch
            .par_iter()
            .enumerate()
            .map(|(k, rec)| {
                io.format
                    .parse(&rec.text)
                    .map(|b| io.format.render(&spec.apply(&b, first + k as u64)))
            })
            .collect();
        for (rec, result) in batch.iter().zip(results) {
            match result {
                Ok(line) => writeln!(out, "{line}")?,
                Err(e) => {
                    bad_lines += 1;
                    eprintln!("{name}:{}: {e}", rec.line);
                }
            }
        }
    }
    out.flush()?;
    Ok(if bad_lines > 0 { 2 } else { 0 })
}

fn cmd_baseline(samples: u64, seed: u64, output: Option<&PathBuf>) -> anyhow::Result<u8> {
    if let Some(path) = output {
        match BaselineEstimate::load(path) {
            Ok(est) if est.is_current(samples, seed) => {
                eprintln!("{} is current; reusing it", path.display());
                return Ok(0);
            }
            Ok(_) => eprintln!("{} is stale; recomputing", path.display()),
            Err(_) if !path.exists() => {}
            Err(e) => eprintln!("ignoring unreadable cache {}: {e}", path.display()),
        }
    }
    let est = baseline::estimate_random_frequencies(samples, seed)?;
    match output {
        Some(path) => {
            est.save(path)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} ({samples} samples, seed {seed})", path.display());
        }
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{}", est.to_json())?;
        }
    }
    Ok(0)
}
