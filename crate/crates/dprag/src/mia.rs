//! Membership-inference evaluation of a configured system.

use dprag_core::engine::{run, RunConfig};
use dprag_core::evaluation::{roc_auc, s2mia_score, Membership, MiaExample, RocCurve};
use dprag_core::generation::Generator;
use dprag_core::retrieval::Retriever;
use dprag_core::rng::question_seed;
use rayon::prelude::*;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MiaOutcome {
    pub in_scores: Vec<f64>,
    pub out_scores: Vec<f64>,
    pub curve: RocCurve,
}

/// Scores every example against the system described by `base`; example `i`
/// runs with seed `base.seed + i`.
pub fn evaluate_mia<R, G>(examples: &[MiaExample], retriever: &R, generator: &G, base: &RunConfig, jobs: usize) -> Result<MiaOutcome>
where
    R: Retriever + Sync + ?Sized,
    G: Generator + Sync + ?Sized,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let scores: Vec<dprag_core::Result<f64>> = pool.install(|| {
        examples
            .par_iter()
            .enumerate()
            .map(|(i, ex)| {
                let cfg = RunConfig {
                    seed: question_seed(base.seed, i, 0),
                    ..base.clone()
                };
                s2mia_score(ex, |q| Ok(run(q, retriever, generator, &cfg)?.answer_text()))
            })
            .collect()
    });
    let mut in_scores = Vec::new();
    let mut out_scores = Vec::new();
    for (ex, score) in examples.iter().zip(scores) {
        match ex.membership {
            Membership::In => in_scores.push(score?),
            Membership::Out => out_scores.push(score?),
        }
    }
    let curve = roc_auc(&in_scores, &out_scores)?;
    Ok(MiaOutcome {
        in_scores,
        out_scores,
        curve,
    })
}
