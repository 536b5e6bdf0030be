//! Seeded QA sweeps over a grid of algorithms and budgets.

use std::path::Path;

use dprag_core::engine::{run, Algorithm, GenerationTrace, RunConfig};
use dprag_core::evaluation::{match_accuracy, QaExample};
use dprag_core::generation::Generator;
use dprag_core::retrieval::Retriever;
use dprag_core::rng::question_seed;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::io;

/// Cartesian grid of sweep cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub algorithms: Vec<Algorithm>,
    pub epsilon_total: Vec<Option<f64>>,
    pub epsilon_token: Vec<Option<f64>>,
    pub m: Vec<Option<usize>>,
}

impl Grid {
    /// One list per axis: `flag` if non-empty, else the file's sweep list,
    /// else the single merged value.
    pub fn resolve(
        settings: &Settings,
        algorithms: &[Algorithm],
        epsilon_total: &[f64],
        epsilon_token: &[f64],
        m: &[usize],
    ) -> Self {
        fn pick<T: Copy>(flag: &[T], file: &Option<Vec<T>>, single: Option<T>) -> Vec<Option<T>> {
            if !flag.is_empty() {
                flag.iter().copied().map(Some).collect()
            } else if let Some(list) = file.as_ref().filter(|l| !l.is_empty()) {
                list.iter().copied().map(Some).collect()
            } else {
                vec![single]
            }
        }
        let sweep = &settings.sweep;
        Self {
            algorithms: pick(algorithms, &sweep.algorithms, Some(settings.algorithm))
                .into_iter()
                .flatten()
                .collect(),
            epsilon_total: pick(epsilon_total, &sweep.epsilon_total, settings.epsilon_total),
            epsilon_token: pick(epsilon_token, &sweep.epsilon_token, settings.epsilon_token),
            m: pick(m, &sweep.m, settings.m),
        }
    }

    pub fn cells(&self) -> Vec<(Algorithm, Option<f64>, Option<f64>, Option<usize>)> {
        let mut out = Vec::new();
        for &a in &self.algorithms {
            for &et in &self.epsilon_total {
                for &ek in &self.epsilon_token {
                    for &m in &self.m {
                        out.push((a, et, ek, m));
                    }
                }
            }
        }
        out
    }
}

/// One results row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRow {
    pub algorithm: Algorithm,
    pub epsilon_total: Option<f64>,
    pub epsilon_token: Option<f64>,
    pub m: usize,
    pub k: usize,
    pub tau: f64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub mean_tokens: f64,
    pub mean_private_votes: f64,
    pub error_count: usize,
}

struct RunOutcome {
    repetition: usize,
    result: std::result::Result<(u8, usize, usize), dprag_core::Error>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population standard deviation (zero for one sample).
fn std_dev(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    mean(&xs.iter().map(|x| (x - mu) * (x - mu)).collect::<Vec<_>>()).sqrt()
}

fn aggregate(cfg: &RunConfig, eps: (Option<f64>, Option<f64>), outcomes: &[RunOutcome], repetitions: usize) -> CellRow {
    let mut per_rep = Vec::new();
    for r in 0..repetitions {
        let accs: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.repetition == r)
            .filter_map(|o| o.result.as_ref().ok().map(|(a, _, _)| f64::from(*a)))
            .collect();
        if !accs.is_empty() {
            per_rep.push(mean(&accs));
        }
    }
    let ok: Vec<&(u8, usize, usize)> = outcomes.iter().filter_map(|o| o.result.as_ref().ok()).collect();
    CellRow {
        algorithm: cfg.algorithm,
        epsilon_total: eps.0,
        epsilon_token: eps.1,
        m: cfg.m,
        k: cfg.k,
        tau: cfg.tau(),
        accuracy_mean: mean(&per_rep),
        accuracy_std: std_dev(&per_rep),
        mean_tokens: mean(&ok.iter().map(|o| o.1 as f64).collect::<Vec<_>>()),
        mean_private_votes: mean(&ok.iter().map(|o| o.2 as f64).collect::<Vec<_>>()),
        error_count: outcomes.len() - ok.len(),
    }
}

/// Runs every question of every cell `settings.repetitions` times with seed
/// `settings.seed + question index + repetition`. Failures are counted in
/// `error_count`; means skip them. Traces go to `traces` when given.
pub fn run_experiment<R, G>(
    questions: &[QaExample],
    retriever: &R,
    generator: &G,
    settings: &Settings,
    grid: &Grid,
    traces: Option<&Path>,
) -> Result<Vec<CellRow>>
where
    R: Retriever + Sync + ?Sized,
    G: Generator + Sync + ?Sized,
{
    if questions.is_empty() {
        return Err(CliError::Usage("question set is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rows = Vec::new();
    for (algorithm, eps_total, eps_token, m) in grid.cells() {
        let mut jobs = Vec::new();
        for r in 0..settings.repetitions {
            for (qi, q) in questions.iter().enumerate() {
                let cfg = settings.run_config(algorithm, m, eps_token, eps_total, question_seed(settings.seed, qi, r))?;
                jobs.push((r, q, cfg));
            }
        }
        let results: Vec<(RunOutcome, Option<GenerationTrace>)> = pool.install(|| {
            jobs.par_iter()
                .map(|(r, q, cfg)| {
                    let traced = run(&q.question, retriever, generator, cfg);
                    let result = traced
                        .as_ref()
                        .map(|t| (match_accuracy(&t.answer_text(), &q.answers), t.token_count(), t.private_votes()))
                        .map_err(Clone::clone);
                    (RunOutcome { repetition: *r, result }, traced.ok())
                })
                .collect()
        });
        if let Some(dir) = traces {
            for ((_, q, cfg), (_, trace)) in jobs.iter().zip(&results) {
                if let Some(t) = trace {
                    io::write_trace(dir, cfg, &q.question, t)?;
                }
            }
        }
        let outcomes: Vec<RunOutcome> = results.into_iter().map(|(o, _)| o).collect();
        rows.push(aggregate(&jobs[0].2, (eps_total, eps_token), &outcomes, settings.repetitions));
    }
    Ok(rows)
}
