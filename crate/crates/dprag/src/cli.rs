//! The `dprag` command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dprag_core::accountant::max_compositions;
use dprag_core::engine::{run, run_non_rag, Algorithm};
use dprag_core::evaluation::{Membership, MiaExample, QaExample};
use dprag_core::synth;
use serde::Serialize;

use crate::config::{budget, CommonFlags, FileConfig, PointFlags, RunFlags, Settings};
use crate::error::{CliError, Result, EXIT_OK};
use crate::experiment::{run_experiment, Grid};
use crate::io::{self, MiaRecord};
use crate::loader::{build_index, load_generator};
use crate::mia::evaluate_mia;

#[derive(Debug, Parser)]
#[command(name = "dprag", version, about = "Differentially private retrieval-augmented generation")]
pub struct Cli {
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps and attack batches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print how many private steps a total budget affords, as one CSV row.
    Accountant(AccountantArgs),
    /// Answer one question; writes the trace to the output directory.
    Generate(GenerateArgs),
    /// Sweep a QA grid and write a results CSV.
    EvalQa(EvalQaArgs),
    /// Run the membership-inference attack and write the ROC curve.
    EvalMia(EvalMiaArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct AccountantArgs {
    #[arg(long)]
    pub epsilon_token: Option<f64>,
    #[arg(long)]
    pub delta_token: Option<f64>,
    #[arg(long)]
    pub epsilon_total: Option<f64>,
    #[arg(long)]
    pub delta_total: Option<f64>,
    /// Print the column names first.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub question: String,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args)]
pub struct EvalQaArgs {
    #[command(flatten)]
    pub common: CommonFlags,
    /// Comma-separated algorithms.
    #[arg(long = "algorithm", value_delimiter = ',')]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon_token: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon_total: Vec<f64>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Results CSV; defaults to results.csv in the output directory.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Skip writing per-run traces.
    #[arg(long)]
    pub no_traces: bool,
}

#[derive(Debug, Args)]
pub struct EvalMiaArgs {
    /// Member records (JSONL with doc_id, text, membership = "in").
    #[arg(long = "in")]
    pub members: PathBuf,
    /// Non-member records (membership = "out").
    #[arg(long = "out")]
    pub non_members: PathBuf,
    /// ROC CSV; defaults to roc.csv in the output directory.
    #[arg(long)]
    pub roc: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Capital-city questions with relevant and distractor documents.
    Qa,
    /// Patient/doctor records split into members and non-members.
    ChatDoctor,
    /// The Gatsby example with its scripted generator.
    Gatsby,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub kind: SynthKind,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Questions (qa), records per side (chat-doctor) or documents (gatsby).
    #[arg(long)]
    pub size: Option<usize>,
    /// Relevant documents per question (qa).
    #[arg(long, default_value_t = 20)]
    pub relevant: usize,
    /// Distractor documents per question (qa).
    #[arg(long, default_value_t = 20)]
    pub distractors: usize,
}

fn settings(cli_config: &Option<PathBuf>, flags: &RunFlags, seed: Option<u64>, jobs: Option<usize>) -> Result<Settings> {
    let file = match cli_config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    Settings::merge(file, flags, seed, jobs)
}

fn cmd_accountant(cli: &Cli, a: &AccountantArgs, out: &mut dyn Write) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("missing --{flag}")));
    let per_token = budget(
        "per-token budget",
        need(a.epsilon_token.or(file.epsilon_token), "epsilon-token")?,
        a.delta_token.or(file.delta_token).unwrap_or(crate::config::DEFAULT_DELTA_TOKEN),
    )?;
    let total = budget(
        "total budget",
        need(a.epsilon_total.or(file.epsilon_total), "epsilon-total")?,
        a.delta_total.or(file.delta_total).unwrap_or(crate::config::DEFAULT_DELTA_TOTAL),
    )?;
    let plan = max_compositions(&per_token, &total)?;
    if a.header {
        writeln!(out, "epsilon_token,delta_token,epsilon_total,delta_total,rule,max_steps")?;
    }
    writeln!(
        out,
        "{},{},{},{},{},{}",
        per_token.epsilon(),
        per_token.delta(),
        total.epsilon(),
        total.delta(),
        plan.rule_used.as_str(),
        plan.max_steps
    )?;
    Ok(())
}

fn corpus_texts<'a>(docs: &'a [dprag_core::retrieval::Document], extra: &[&'a str]) -> Vec<&'a str> {
    docs.iter().map(|d| d.text.as_str()).chain(extra.iter().copied()).collect()
}

fn cmd_generate(cli: &Cli, a: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let s = settings(&cli.config, &a.run, cli.seed, cli.jobs)?;
    let cfg = s.base_run_config()?;
    let trace = if cfg.algorithm == Algorithm::NonRag {
        if s.corpus.is_some() {
            writeln!(err, "warning: non-rag ignores the corpus")?;
        }
        let generator = load_generator(s.generator()?, &[&a.question])?;
        run_non_rag(&a.question, &generator, cfg.t_max_cap)?
    } else {
        let docs = io::read_corpus(s.corpus()?)?;
        let generator = load_generator(s.generator()?, &corpus_texts(&docs, &[&a.question]))?;
        let index = build_index(docs)?;
        run(&a.question, &index, &generator, &cfg)?
    };
    let path = io::write_trace(&s.output_dir, &cfg, &a.question, &trace)?;
    writeln!(out, "{}", trace.answer_text())?;
    writeln!(err, "trace: {}", path.display())?;
    Ok(())
}

fn cmd_eval_qa(cli: &Cli, a: &EvalQaArgs, out: &mut dyn Write) -> Result<()> {
    let flags = RunFlags {
        common: a.common.clone(),
        point: PointFlags::default(),
    };
    let mut s = settings(&cli.config, &flags, cli.seed, cli.jobs)?;
    if let Some(r) = a.repetitions {
        if r == 0 {
            return Err(CliError::Usage("--repetitions must be at least 1".into()));
        }
        s.repetitions = r;
    }
    let questions = io::read_questions(s.questions()?)?;
    let grid = Grid::resolve(&s, &a.algorithms, &a.epsilon_total, &a.epsilon_token, &a.m);
    let docs = io::read_corpus(s.corpus()?)?;
    let qtexts: Vec<&str> = questions.iter().map(|q| q.question.as_str()).collect();
    let generator = load_generator(s.generator()?, &corpus_texts(&docs, &qtexts))?;
    let index = build_index(docs)?;
    let traces = s.output_dir.join("traces");
    let rows = run_experiment(&questions, &index, &generator, &s, &grid, (!a.no_traces).then_some(traces.as_path()))?;
    let path = a.results.clone().unwrap_or_else(|| s.output_dir.join("results.csv"));
    io::write_csv(&path, &rows)?;
    writeln!(out, "{}", path.display())?;
    Ok(())
}

#[derive(Serialize)]
struct RocRow {
    fpr: f64,
    tpr: f64,
}

fn read_side(path: &Path, want: Membership) -> Result<Vec<MiaExample>> {
    let examples = io::read_mia(path)?;
    if let Some(bad) = examples.iter().find(|e| e.membership != want) {
        return Err(CliError::data(path, format!("record {} has the wrong membership label", bad.doc.doc_id)));
    }
    Ok(examples)
}

fn cmd_eval_mia(cli: &Cli, a: &EvalMiaArgs, out: &mut dyn Write) -> Result<()> {
    let s = settings(&cli.config, &a.run, cli.seed, cli.jobs)?;
    let cfg = s.base_run_config()?;
    let mut examples = read_side(&a.members, Membership::In)?;
    examples.extend(read_side(&a.non_members, Membership::Out)?);
    let docs = io::read_corpus(s.corpus()?)?;
    let extra: Vec<&str> = examples.iter().map(|e| e.doc.text.as_str()).collect();
    let generator = load_generator(s.generator()?, &corpus_texts(&docs, &extra))?;
    let index = build_index(docs)?;
    let outcome = evaluate_mia(&examples, &index, &generator, &cfg, s.jobs)?;
    let path = a.roc.clone().unwrap_or_else(|| s.output_dir.join("roc.csv"));
    let rows: Vec<RocRow> = outcome.curve.points.iter().map(|&(fpr, tpr)| RocRow { fpr, tpr }).collect();
    io::write_csv(&path, &rows)?;
    writeln!(out, "auc,{}", outcome.curve.auc)?;
    Ok(())
}

fn cmd_synth(cli: &Cli, a: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let dir = &a.out_dir;
    std::fs::create_dir_all(dir)?;
    let write_lines = |name: &str, lines: &[String]| -> Result<()> {
        let mut body = lines.join("\n");
        body.push('\n');
        std::fs::write(dir.join(name), body)?;
        Ok(())
    };
    match a.kind {
        SynthKind::Qa => {
            let c = synth::qa_corpus(
                &synth::QaSynthConfig {
                    questions: a.size.unwrap_or(20),
                    relevant_per_question: a.relevant,
                    distractors_per_question: a.distractors,
                    ..Default::default()
                },
                seed,
            )?;
            io::write_jsonl(&dir.join("corpus.jsonl"), &c.documents)?;
            io::write_jsonl(&dir.join("questions.jsonl"), &c.examples)?;
            write_lines("public.txt", &c.public_texts)?;
        }
        SynthKind::ChatDoctor => {
            let n = a.size.unwrap_or(200);
            let c = synth::chat_doctor_corpus(
                &synth::ChatDoctorConfig {
                    members: n,
                    non_members: n,
                    ..Default::default()
                },
                seed,
            )?;
            let records = |docs: &[dprag_core::retrieval::Document], membership| -> Vec<MiaRecord> {
                docs.iter()
                    .map(|d| MiaRecord {
                        doc_id: d.doc_id.clone(),
                        text: d.text.clone(),
                        membership,
                    })
                    .collect()
            };
            io::write_jsonl(&dir.join("corpus.jsonl"), &c.members)?;
            io::write_jsonl(&dir.join("mia_in.jsonl"), &records(&c.members, Membership::In))?;
            io::write_jsonl(&dir.join("mia_out.jsonl"), &records(&c.non_members, Membership::Out))?;
            write_lines("public.txt", &c.public_texts)?;
        }
        SynthKind::Gatsby => {
            let c = synth::gatsby_scenario(a.size.unwrap_or(50))?;
            io::write_jsonl(&dir.join("corpus.jsonl"), &c.documents)?;
            io::write_jsonl(
                &dir.join("questions.jsonl"),
                &[QaExample {
                    question: c.question.clone(),
                    answers: vec!["novel".into()],
                }],
            )?;
            let mut body = serde_json::to_string_pretty(&c.table).map_err(|e| CliError::data(dir.join("script.json"), e))?;
            body.push('\n');
            std::fs::write(dir.join("script.json"), body)?;
        }
    }
    writeln!(out, "{}", dir.display())?;
    Ok(())
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Accountant(a) => cmd_accountant(cli, a, out),
        Command::Generate(a) => cmd_generate(cli, a, out, err),
        Command::EvalQa(a) => cmd_eval_qa(cli, a, out),
        Command::EvalMia(a) => cmd_eval_mia(cli, a, out),
        Command::Synth(a) => cmd_synth(cli, a, out),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return e.exit_code();
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    let code = main_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    let _ = std::io::stdout().flush();
    code
}
