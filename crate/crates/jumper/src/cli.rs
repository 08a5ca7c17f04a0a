//! Command-line surface. Machine-readable JSON goes to stdout, progress to
//! stderr. Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use jumper_core::rl::TrainMode;
use serde::Serialize;

use crate::config::RunConfig;
use crate::exec::RayonExecutor;
use crate::io::{write_jsonl, Checkpoint};
use crate::run::{self, ReportLine, UsageError};

#[derive(Debug, Parser)]
#[command(name = "jumper", version, about = "Sentence-by-sentence text classifier trained with REINFORCE")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Print the full default configuration as JSON and exit.
    #[arg(long)]
    pub print_default_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Reinforce,
    Xent,
}

impl From<ModeArg> for TrainMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Reinforce => TrainMode::Reinforce,
            ModeArg::Xent => TrainMode::CrossEntropy,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write its best checkpoint.
    Train {
        /// JSON run configuration; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        dev: Option<PathBuf>,
        /// Checkpoint path.
        #[arg(long)]
        out: PathBuf,
        /// Epoch report (JSON lines); defaults to `<out>.report.jsonl`.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Greedy evaluation; prints a metrics report.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Key-sentence annotations; enables JA and OA.
        #[arg(long)]
        rationale_gold: Option<PathBuf>,
    },
    /// Per-step decision distributions and word importances for one text.
    Explain {
        #[arg(long)]
        model: PathBuf,
        /// The text itself, or a path to a file holding it.
        #[arg(long)]
        input: String,
        #[arg(long)]
        slot: Option<String>,
    },
    /// Writes one JSON line of predictions per input example.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    checkpoint: &'a Path,
    report: &'a Path,
    epochs: usize,
    best_epoch: Option<usize>,
    #[serde(rename = "best_dev_CA")]
    best_dev_ca: Option<f64>,
}

fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.jsonl");
    PathBuf::from(s)
}

pub fn execute(cli: Cli) -> Result<()> {
    if cli.print_default_config {
        println!("{}", RunConfig::default().to_json_pretty());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(UsageError("no command given".into()).into());
    };
    let exec = RayonExecutor::from_env();
    match command {
        Command::Train {
            config,
            schema,
            train,
            dev,
            out,
            report,
            mode,
            seed,
            epochs,
        } => {
            let mut cfg = match &config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            cfg.data.schema = schema.or(cfg.data.schema);
            cfg.data.train = train.or(cfg.data.train);
            cfg.data.dev = dev.or(cfg.data.dev);
            if let Some(m) = mode {
                cfg.train.mode = m.into();
            }
            if let Some(s) = seed {
                cfg.train.seed = s;
            }
            if let Some(e) = epochs {
                cfg.train.max_epochs = e;
            }
            let report = report.unwrap_or_else(|| report_path(&out));
            let data = run::load_training_data(&cfg)?;
            let mut lines: Vec<ReportLine> = Vec::new();
            let (ckpt, rep) = run::train_checkpoint(&cfg, &data, &exec, &mut |line| {
                log::info!("{}", serde_json::to_string(line).unwrap_or_default());
                lines.push(line.clone());
            })?;
            ckpt.save(&out)?;
            write_jsonl(&report, &lines)?;
            print_json(&TrainSummary {
                checkpoint: &out,
                report: &report,
                epochs: rep.epochs.len(),
                best_epoch: rep.best_epoch,
                best_dev_ca: rep.best_dev_ca,
            })
        }
        Command::Eval {
            model,
            data,
            rationale_gold,
        } => {
            let ckpt = Checkpoint::load(&model)?;
            let data = run::load_eval_data(&ckpt, &data)?;
            let report = run::evaluate_checkpoint(&ckpt, &data, rationale_gold.as_deref(), &exec)?;
            print_json(&report)
        }
        Command::Explain { model, input, slot } => {
            let ckpt = Checkpoint::load(&model)?;
            let path = Path::new(&input);
            let text = if path.is_file() {
                std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
            } else {
                input
            };
            print_json(&run::explain_text(&ckpt, &text, slot.as_deref())?)
        }
        Command::Predict { model, data, out } => {
            let ckpt = Checkpoint::load(&model)?;
            let data = run::load_eval_data(&ckpt, &data)?;
            let lines = run::predict_lines(&ckpt, &data, &exec)?;
            write_jsonl(&out, &lines)?;
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}
