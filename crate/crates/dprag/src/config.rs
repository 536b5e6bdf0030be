//! TOML configuration merged with command-line flags (flags win).

use std::path::{Path, PathBuf};

use clap::Args;
use dprag_core::engine::{Algorithm, RunConfig, DEFAULT_DOMAIN_SIZE, DEFAULT_T_MAX_CAP};
use dprag_core::generation::NgramConfig;
use dprag_core::PrivacyBudget;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::remote::RemoteConfig;

pub const DEFAULT_DELTA_TOKEN: f64 = 1e-5;
pub const DEFAULT_DELTA_TOTAL: f64 = 1e-4;
pub const DEFAULT_REPETITIONS: usize = 3;
pub const DEFAULT_OUTPUT_DIR: &str = "dprag-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSettings {
    /// JSON table of scripted answers.
    Scripted { table: PathBuf },
    /// N-gram model trained on a text file, one passage per line.
    Ngram {
        train: PathBuf,
        #[serde(default)]
        model: NgramConfig,
    },
    Remote(RemoteConfig),
}

/// Grid lists for `eval-qa`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub algorithms: Option<Vec<Algorithm>>,
    pub epsilon_total: Option<Vec<f64>>,
    pub epsilon_token: Option<Vec<f64>>,
    pub m: Option<Vec<usize>>,
}

/// The configuration file. Every field is optional; relative paths are
/// taken from the file's directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub questions: Option<PathBuf>,
    pub algorithm: Option<Algorithm>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub tau: Option<f64>,
    pub epsilon_token: Option<f64>,
    pub delta_token: Option<f64>,
    pub epsilon_total: Option<f64>,
    pub delta_total: Option<f64>,
    pub t_max_cap: Option<usize>,
    pub domain_size: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub repetitions: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub generator: Option<GeneratorSettings>,
    pub sweep: Option<SweepFile>,
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl FileConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::data(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| CliError::data(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.corpus, &mut cfg.questions, &mut cfg.output_dir].into_iter().flatten() {
            rebase(base, p);
        }
        match &mut cfg.generator {
            Some(GeneratorSettings::Scripted { table }) => rebase(base, table),
            Some(GeneratorSettings::Ngram { train, .. }) => rebase(base, train),
            _ => {}
        }
        Ok(cfg)
    }
}

/// Flags shared by every run command. Each overrides the file value.
#[derive(Clone, Debug, Default, Args)]
pub struct CommonFlags {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub questions: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub delta_token: Option<f64>,
    #[arg(long)]
    pub delta_total: Option<f64>,
    #[arg(long)]
    pub t_max_cap: Option<usize>,
    #[arg(long)]
    pub domain_size: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Scripted generator table (JSON); replaces the configured generator.
    #[arg(long, conflicts_with = "ngram_train")]
    pub script: Option<PathBuf>,
    /// N-gram training text; replaces the configured generator.
    #[arg(long)]
    pub ngram_train: Option<PathBuf>,
}

/// The hyperparameters of a single run.
#[derive(Clone, Debug, Default, Args)]
pub struct PointFlags {
    #[arg(long)]
    pub algorithm: Option<Algorithm>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub epsilon_token: Option<f64>,
    #[arg(long)]
    pub epsilon_total: Option<f64>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunFlags {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(flatten)]
    pub point: PointFlags,
}

/// Everything a run needs after merging file and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub corpus: Option<PathBuf>,
    pub questions: Option<PathBuf>,
    pub algorithm: Algorithm,
    pub m: Option<usize>,
    pub k: usize,
    pub tau: Option<f64>,
    pub epsilon_token: Option<f64>,
    pub delta_token: f64,
    pub epsilon_total: Option<f64>,
    pub delta_total: f64,
    pub t_max_cap: usize,
    pub domain_size: usize,
    pub seed: u64,
    pub jobs: usize,
    pub repetitions: usize,
    pub output_dir: PathBuf,
    pub generator: Option<GeneratorSettings>,
    pub sweep: SweepFile,
}

pub fn budget(name: &str, epsilon: f64, delta: f64) -> Result<PrivacyBudget> {
    PrivacyBudget::new(epsilon, delta).map_err(|e| CliError::Usage(format!("{name}: {e}")))
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

impl Settings {
    pub fn merge(file: FileConfig, flags: &RunFlags, seed: Option<u64>, jobs: Option<usize>) -> Result<Self> {
        let (point, flags) = (&flags.point, &flags.common);
        let generator = match (&flags.script, &flags.ngram_train) {
            (Some(table), _) => Some(GeneratorSettings::Scripted { table: table.clone() }),
            (None, Some(train)) => Some(GeneratorSettings::Ngram {
                train: train.clone(),
                model: match &file.generator {
                    Some(GeneratorSettings::Ngram { model, .. }) => *model,
                    _ => NgramConfig::default(),
                },
            }),
            (None, None) => file.generator,
        };
        let s = Self {
            corpus: flags.corpus.clone().or(file.corpus),
            questions: flags.questions.clone().or(file.questions),
            algorithm: point.algorithm.or(file.algorithm).unwrap_or(Algorithm::DpSparseVoteRag),
            m: point.m.or(file.m),
            k: flags.k.or(file.k).unwrap_or(1),
            tau: flags.tau.or(file.tau),
            epsilon_token: point.epsilon_token.or(file.epsilon_token),
            delta_token: flags.delta_token.or(file.delta_token).unwrap_or(DEFAULT_DELTA_TOKEN),
            epsilon_total: point.epsilon_total.or(file.epsilon_total),
            delta_total: flags.delta_total.or(file.delta_total).unwrap_or(DEFAULT_DELTA_TOTAL),
            t_max_cap: flags.t_max_cap.or(file.t_max_cap).unwrap_or(DEFAULT_T_MAX_CAP),
            domain_size: flags.domain_size.or(file.domain_size).unwrap_or(DEFAULT_DOMAIN_SIZE),
            seed: seed.or(file.seed).unwrap_or(0),
            jobs: jobs.or(file.jobs).unwrap_or(1),
            repetitions: file.repetitions.unwrap_or(DEFAULT_REPETITIONS),
            output_dir: flags
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            generator,
            sweep: file.sweep.unwrap_or_default(),
        };
        if s.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        if s.repetitions == 0 {
            return Err(CliError::Usage("repetitions must be at least 1".into()));
        }
        Ok(s)
    }

    pub fn generator(&self) -> Result<&GeneratorSettings> {
        self.generator
            .as_ref()
            .ok_or_else(|| CliError::Usage("no generator configured (use --script, --ngram-train or [generator])".into()))
    }

    pub fn corpus(&self) -> Result<&Path> {
        required(self.corpus.as_deref(), "corpus")
    }

    pub fn questions(&self) -> Result<&Path> {
        required(self.questions.as_deref(), "questions")
    }

    /// A run configuration for one cell of the grid. Budgets are only
    /// required by the private algorithms; the others get placeholders that
    /// are never read.
    pub fn run_config(&self, algorithm: Algorithm, m: Option<usize>, eps_token: Option<f64>, eps_total: Option<f64>, seed: u64) -> Result<RunConfig> {
        let (per_token, total) = if algorithm.is_private() {
            (
                budget("per-token budget", required(eps_token, "epsilon-token")?, self.delta_token)?,
                budget("total budget", required(eps_total, "epsilon-total")?, self.delta_total)?,
            )
        } else {
            let unused = budget("per-token budget", eps_token.unwrap_or(1.0), self.delta_token)?;
            (unused, budget("total budget", eps_total.unwrap_or(1.0), self.delta_total)?)
        };
        let m = if algorithm.uses_retrieval() { required(m, "m")? } else { m.unwrap_or(1) };
        let cfg = RunConfig {
            algorithm,
            m,
            k: self.k,
            per_token,
            total,
            tau: self.tau,
            t_max_cap: self.t_max_cap,
            domain_size: self.domain_size,
            seed,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    /// The single run described by the merged settings.
    pub fn base_run_config(&self) -> Result<RunConfig> {
        self.run_config(self.algorithm, self.m, self.epsilon_token, self.epsilon_total, self.seed)
    }
}
