//! Command-line front end for the `twoenv` toolkit.

pub mod paper_check;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use twoenv::{
    compare, estimation_error, exact_expected_payoff, exact_payoff_variance, naive_switch_ev, run,
    EnvelopePair, GainDelta, Money, PairedSummary, Prior, Ratio, Role, RunSummary, SimConfig,
    Strategy, TrialRunner,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const AFTER_HELP: &str = "\
Priors:     point:<dollars> | uniform:<d1>,<d2>,... | table:<d1>=<p1>,<d2>=<p2>,...
            (probabilities as fractions like 1/3 or exact decimals like 0.25)
Strategies: always-switch | never-switch | random:<p> | naive-bayesian

CSV columns
  simulate:      trials,mean_payoff,sample_variance,ci95_halfwidth,exact_expected_payoff,exact_payoff_variance,mean_switch_gain
  compare:       trials,strategy_a,strategy_b,mean_payoff_a,mean_payoff_b,mean_difference,difference_variance,ci95_halfwidth,exact_difference,exact_difference_variance,differing_trials
  --dump-trials: trial_index,base,held,observed,decision,payoff (compare dumps the first strategy's trials)

Exit status: 0 success, 1 failed check or runtime error, 2 usage error.";

#[derive(Debug, Parser)]
#[command(name = "twoenv", version, about = "Exact and Monte Carlo analysis of the two envelope problem", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute and verify every figure of the naive-switching analysis.
    PaperCheck {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo run of one strategy, with the exact expected payoff alongside.
    Simulate(SimulateArgs),
    /// Exact expected payoff by enumeration.
    Exact {
        #[arg(long)]
        prior: Prior,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Paired comparison of two strategies on common random numbers.
    Compare(CompareArgs),
    /// Estimation error of the naive player for each held envelope.
    Asymmetry {
        /// Smaller amount of the pair, in dollars.
        #[arg(long)]
        pair: Money,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub prior: Prior,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: u16,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write one CSV row per trial to this file.
    #[arg(long)]
    pub dump_trials: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub strategy: Strategy,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value = "always-switch")]
    pub strategy: Strategy,
    /// Strategy subtracted from the first one.
    #[arg(long, default_value = "never-switch")]
    pub baseline: Strategy,
    #[command(flatten)]
    pub run: RunArgs,
}

impl RunArgs {
    fn config(&self, strategy: &Strategy) -> twoenv::Result<SimConfig> {
        SimConfig::new(
            self.prior.clone(),
            strategy.clone(),
            self.trials,
            self.seed,
            usize::from(self.workers),
        )
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CHECK_FAILED
        }
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::PaperCheck { format } => cmd_paper_check(format, out, err),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Exact {
            prior,
            strategy,
            format,
        } => cmd_exact(&prior, &strategy, format, out),
        Command::Compare(args) => cmd_compare(&args, out),
        Command::Asymmetry { pair, format } => cmd_asymmetry(pair, format, out),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn cmd_paper_check(format: Format, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let report = paper_check::paper_check();
    match format {
        Format::Json => write_json(out, &report)?,
        Format::Text => out.write_all(paper_check::render_text(&report).as_bytes())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["section", "identity", "value", "passed"])?;
            for s in &report.sections {
                for c in &s.checks {
                    w.write_record([
                        s.title,
                        &c.identity,
                        &c.value,
                        if c.passed { "true" } else { "false" },
                    ])?;
                }
            }
            w.flush()?;
        }
    }
    match report.first_failure() {
        None => Ok(EXIT_OK),
        Some(c) => {
            writeln!(
                err,
                "paper-check failed: {}: got {}, expected {}",
                c.identity, c.value, c.expected
            )?;
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

fn dump_trials(
    path: &PathBuf,
    prior: &Prior,
    strategy: &Strategy,
    seed: u64,
    trials: u64,
) -> io::Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "trial_index",
        "base",
        "held",
        "observed",
        "decision",
        "payoff",
    ])?;
    let runner = TrialRunner::new(prior, strategy, seed);
    for (i, t) in runner.trials(trials).enumerate() {
        w.write_record([
            i.to_string(),
            t.pair.smaller().to_plain_string(),
            t.held.as_str().to_string(),
            t.observed.to_plain_string(),
            t.decision.as_str().to_string(),
            t.payoff.to_plain_string(),
        ])?;
    }
    w.flush()
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let config = args.run.config(&args.strategy)?;
    let summary = run(&config)?;
    if let Some(path) = &args.run.dump_trials {
        dump_trials(
            path,
            &config.prior,
            &config.strategy,
            config.seed,
            config.trials,
        )?;
    }
    match args.run.format {
        Format::Json => write_json(out, &summary)?,
        Format::Csv => write_run_csv(out, &summary)?,
        Format::Text => write_run_text(out, &config, &summary)?,
    }
    Ok(EXIT_OK)
}

fn write_run_csv(out: &mut dyn Write, s: &RunSummary) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trials",
        "mean_payoff",
        "sample_variance",
        "ci95_halfwidth",
        "exact_expected_payoff",
        "exact_payoff_variance",
        "mean_switch_gain",
    ])?;
    w.write_record([
        s.trials.to_string(),
        s.mean_payoff.to_string(),
        s.sample_variance.to_string(),
        s.ci95_halfwidth.to_string(),
        s.exact_expected_payoff.to_plain_string(),
        s.exact_payoff_variance.to_string(),
        s.mean_switch_gain.to_string(),
    ])?;
    w.flush()
}

fn write_run_text(out: &mut dyn Write, config: &SimConfig, s: &RunSummary) -> io::Result<()> {
    let sigma = s.exact_standard_error();
    let exact = s.exact_expected_payoff.to_dollars_f64();
    writeln!(out, "prior                 {}", config.prior)?;
    writeln!(out, "strategy              {}", config.strategy)?;
    writeln!(out, "trials                {}", s.trials)?;
    writeln!(out, "seed                  {}", config.seed)?;
    writeln!(
        out,
        "mean payoff           ${:.6} +/- {:.6} (95% CI)",
        s.mean_payoff, s.ci95_halfwidth
    )?;
    writeln!(out, "sample variance       {:.6}", s.sample_variance)?;
    writeln!(out, "mean switch gain      ${:.6}", s.mean_switch_gain)?;
    writeln!(out, "exact expected payoff {}", s.exact_expected_payoff)?;
    writeln!(out, "exact variance        {}", s.exact_payoff_variance)?;
    if sigma > 0.0 {
        writeln!(
            out,
            "deviation             {:.3} sigma",
            (s.mean_payoff - exact) / sigma
        )?;
    }
    Ok(())
}

fn cmd_exact(prior: &Prior, strategy: &Strategy, format: Format, out: &mut dyn Write) -> CmdResult {
    #[derive(Serialize)]
    struct ExactReport<'a> {
        prior: String,
        strategy: &'a Strategy,
        expected_payoff: Money,
        payoff_variance: Ratio,
    }
    let report = ExactReport {
        prior: prior.to_string(),
        strategy,
        expected_payoff: exact_expected_payoff(prior, strategy),
        payoff_variance: exact_payoff_variance(prior, strategy),
    };
    match format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["prior", "strategy", "expected_payoff", "payoff_variance"])?;
            w.write_record([
                report.prior.clone(),
                strategy.to_string(),
                report.expected_payoff.to_plain_string(),
                report.payoff_variance.to_string(),
            ])?;
            w.flush()?;
        }
        Format::Text => writeln!(out, "{}", report.expected_payoff)?,
    }
    Ok(EXIT_OK)
}

fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    let config = args.run.config(&args.strategy)?;
    let summary = compare(&config, &args.baseline)?;
    if let Some(path) = &args.run.dump_trials {
        dump_trials(
            path,
            &config.prior,
            &config.strategy,
            config.seed,
            config.trials,
        )?;
    }
    match args.run.format {
        Format::Json => write_json(out, &summary)?,
        Format::Csv => write_compare_csv(out, &summary)?,
        Format::Text => write_compare_text(out, &config, &summary)?,
    }
    Ok(EXIT_OK)
}

fn write_compare_csv(out: &mut dyn Write, s: &PairedSummary) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trials",
        "strategy_a",
        "strategy_b",
        "mean_payoff_a",
        "mean_payoff_b",
        "mean_difference",
        "difference_variance",
        "ci95_halfwidth",
        "exact_difference",
        "exact_difference_variance",
        "differing_trials",
    ])?;
    w.write_record([
        s.trials.to_string(),
        s.strategy_a.to_string(),
        s.strategy_b.to_string(),
        s.mean_payoff_a.to_string(),
        s.mean_payoff_b.to_string(),
        s.mean_difference.to_string(),
        s.difference_variance.to_string(),
        s.ci95_halfwidth.to_string(),
        s.exact_difference
            .dollars()
            .unwrap_or_else(|| format!("{} cents", s.exact_difference.cents())),
        s.exact_difference_variance.to_string(),
        s.differing_trials.to_string(),
    ])?;
    w.flush()
}

fn write_compare_text(
    out: &mut dyn Write,
    config: &SimConfig,
    s: &PairedSummary,
) -> io::Result<()> {
    writeln!(out, "prior                  {}", config.prior)?;
    writeln!(
        out,
        "strategies             {} - {}",
        s.strategy_a, s.strategy_b
    )?;
    writeln!(out, "trials                 {}", s.trials)?;
    writeln!(out, "seed                   {}", config.seed)?;
    writeln!(out, "mean payoff a          ${:.6}", s.mean_payoff_a)?;
    writeln!(out, "mean payoff b          ${:.6}", s.mean_payoff_b)?;
    writeln!(
        out,
        "mean difference        ${:.6} +/- {:.6} (95% CI)",
        s.mean_difference, s.ci95_halfwidth
    )?;
    writeln!(out, "differing trials       {}", s.differing_trials)?;
    writeln!(out, "exact difference       {}", s.exact_difference)?;
    writeln!(
        out,
        "exact variance         {}",
        s.exact_difference_variance
    )?;
    let sigma = s.exact_standard_error();
    if sigma > 0.0 {
        let deviation = (s.mean_difference - s.exact_difference.to_dollars_f64()) / sigma;
        writeln!(out, "deviation              {deviation:.3} sigma")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct AsymmetryRow {
    held: Role,
    observed: Money,
    believed_other: Money,
    actual_other: Money,
    error: GainDelta,
}

fn cmd_asymmetry(smaller: Money, format: Format, out: &mut dyn Write) -> CmdResult {
    let pair = EnvelopePair::new(smaller)?;
    let rows = Role::BOTH
        .iter()
        .map(|&held| {
            Ok(AsymmetryRow {
                held,
                observed: pair.amount(held).clone(),
                believed_other: naive_switch_ev(pair.amount(held))?,
                actual_other: pair.amount(held.other()).clone(),
                error: estimation_error(&pair, held)?,
            })
        })
        .collect::<twoenv::Result<Vec<_>>>()?;
    let ratio = rows[1]
        .error
        .magnitude()
        .ratio_to(&rows[0].error.magnitude());
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                pair: &'a EnvelopePair,
                rows: &'a [AsymmetryRow],
                magnitude_ratio: Option<Ratio>,
            }
            write_json(
                out,
                &Report {
                    pair: &pair,
                    rows: &rows,
                    magnitude_ratio: ratio,
                },
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "held",
                "observed",
                "believed_other",
                "actual_other",
                "error",
            ])?;
            for r in &rows {
                w.write_record([
                    r.held.as_str().to_string(),
                    r.observed.to_plain_string(),
                    r.believed_other.to_plain_string(),
                    r.actual_other.to_plain_string(),
                    r.error.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "pair {pair}")?;
            writeln!(
                out,
                "{:<8} {:>14} {:>16} {:>14} {:>14}",
                "held", "observed", "believed other", "actual other", "error"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<8} {:>14} {:>16} {:>14} {:>14}",
                    r.held.as_str(),
                    r.observed.to_string(),
                    r.believed_other.to_string(),
                    r.actual_other.to_string(),
                    r.error.to_string()
                )?;
            }
            if let Some(r) = ratio {
                writeln!(out, "|error(larger)| / |error(smaller)| = {r}")?;
            }
        }
    }
    Ok(EXIT_OK)
}
