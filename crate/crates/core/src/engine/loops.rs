use alloc::vec::Vec;

use super::trace::{GenerationTrace, HaltReason, StepRecord, StepVerdict};
use super::{Algorithm, RunConfig};
use crate::accountant::{max_compositions, CompositionPlan, PrivacyLedger};
use crate::generation::{GenerationContext, Generator, Token};
use crate::mechanisms::{limited_domain_top1, LimitedDomainConfig, NoisyThreshold, TokenHistogram, Verdict};
use crate::retrieval::{partition, Document, RetrievalResult, Retriever, VoterPartition};
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

/// Dispatches on `cfg.algorithm`.
pub fn run<R, G>(question: &str, retriever: &R, generator: &G, cfg: &RunConfig) -> Result<GenerationTrace>
where
    R: Retriever + ?Sized,
    G: Generator + ?Sized,
{
    cfg.validate()?;
    match cfg.algorithm {
        Algorithm::NonRag => run_non_rag(question, generator, cfg.t_max_cap),
        Algorithm::VoteRag => run_vote_rag(question, retriever, generator, cfg.m, cfg.k, cfg.seed, cfg.t_max_cap),
        Algorithm::DpVoteRag => run_dp_vote_rag(question, retriever, generator, cfg),
        Algorithm::DpSparseVoteRag => run_dp_sparse_vote_rag(question, retriever, generator, cfg),
    }
}

struct Shards {
    retrieval: RetrievalResult,
    partition: VoterPartition,
    documents: Vec<Vec<Document>>,
}

fn shard<R: Retriever + ?Sized>(question: &str, retriever: &R, m: usize, k: usize, seed: u64) -> Result<Shards> {
    if m == 0 || k == 0 {
        return Err(Error::invalid("m and k must be positive"));
    }
    let retrieval = retriever.retrieve(question, m * k)?;
    let partition = partition(&retrieval, m, k, &mut stream(seed, Purpose::Partition))?;
    let documents = partition
        .subsets
        .iter()
        .map(|ids| {
            ids.iter()
                .map(|id| {
                    retriever
                        .document(id)
                        .cloned()
                        .ok_or_else(|| Error::InvalidArgument(alloc::format!("retriever returned unknown doc {id}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(Shards {
        retrieval,
        partition,
        documents,
    })
}

/// Voter tokens for one step. With `with_non_rag`, the non-RAG call is
/// batched in front and returned separately.
fn vote<G: Generator + ?Sized>(
    generator: &G,
    question: &str,
    shards: &Shards,
    prefix: &[Token],
    with_non_rag: bool,
) -> Result<(Option<Token>, Vec<Token>)> {
    let mut ctxs = Vec::with_capacity(shards.documents.len() + 1);
    if with_non_rag {
        ctxs.push(GenerationContext::new(question, &[], prefix));
    }
    ctxs.extend(shards.documents.iter().map(|docs| GenerationContext::new(question, docs, prefix)));
    let mut tokens = generator.next_tokens(&ctxs)?;
    if tokens.len() != ctxs.len() {
        return Err(Error::ContractViolation("generator returned the wrong number of tokens"));
    }
    let non_rag = with_non_rag.then(|| tokens.remove(0));
    Ok((non_rag, tokens))
}

struct Recorder {
    trace: GenerationTrace,
}

impl Recorder {
    fn new(algorithm: Algorithm, seed: u64, plan: Option<CompositionPlan>, shards: Option<&Shards>) -> Self {
        Self {
            trace: GenerationTrace {
                algorithm,
                seed,
                plan,
                retrieval: shards.map(|s| s.retrieval.clone()),
                partition: shards.map(|s| s.partition.clone()),
                steps: Vec::new(),
                final_answer: Vec::new(),
                halt_reason: HaltReason::CapReached,
                vocabulary_extensions: Vec::new(),
            },
        }
    }

    fn push<G: Generator + ?Sized>(&mut self, generator: &G, step: StepRecord) {
        if let Some(t) = step.emitted_token.as_ref().filter(|t| !t.is_eos()) {
            self.trace.final_answer.push(t.clone());
        }
        self.trace.steps.push(step);
        self.trace.vocabulary_extensions.extend(generator.take_vocabulary_extensions());
    }

    fn finish(mut self, reason: HaltReason) -> GenerationTrace {
        self.trace.halt_reason = reason;
        self.trace
    }
}

/// Greedy decoding from the question alone.
pub fn run_non_rag<G: Generator + ?Sized>(question: &str, generator: &G, cap: usize) -> Result<GenerationTrace> {
    let mut rec = Recorder::new(Algorithm::NonRag, 0, None, None);
    for index in 0..cap {
        let token = generator.next_token(&GenerationContext::new(question, &[], &rec.trace.final_answer))?;
        let eos = token.is_eos();
        rec.push(
            generator,
            StepRecord {
                index,
                voter_tokens: None,
                non_rag_token: None,
                histogram: None,
                verdict: StepVerdict::NotApplicable,
                emitted_token: Some(token),
                budget_remaining_after: None,
            },
        );
        if eos {
            return Ok(rec.finish(HaltReason::Eos));
        }
    }
    Ok(rec.finish(HaltReason::CapReached))
}

/// Voting without privacy: the plurality token (lowest id on ties) is
/// emitted at every step.
pub fn run_vote_rag<R, G>(
    question: &str,
    retriever: &R,
    generator: &G,
    m: usize,
    k: usize,
    seed: u64,
    cap: usize,
) -> Result<GenerationTrace>
where
    R: Retriever + ?Sized,
    G: Generator + ?Sized,
{
    let shards = shard(question, retriever, m, k, seed)?;
    let mut rec = Recorder::new(Algorithm::VoteRag, seed, None, Some(&shards));
    for index in 0..cap {
        let (_, votes) = vote(generator, question, &shards, &rec.trace.final_answer, false)?;
        let hist = TokenHistogram::from_votes(votes.iter().map(|t| t.id));
        let (winner, _) = hist.plurality().expect("m >= 1 voters");
        let token = votes.iter().find(|t| t.id == winner).cloned().expect("winner was voted for");
        let eos = token.is_eos();
        rec.push(
            generator,
            StepRecord {
                index,
                voter_tokens: Some(votes.iter().map(|t| t.id).collect()),
                non_rag_token: None,
                histogram: Some(hist),
                verdict: StepVerdict::NotApplicable,
                emitted_token: Some(token),
                budget_remaining_after: None,
            },
        );
        if eos {
            return Ok(rec.finish(HaltReason::Eos));
        }
    }
    Ok(rec.finish(HaltReason::CapReached))
}

/// Every token goes through the limited-domain selector at the full
/// per-token budget. The number of tokens is bounded by the composition
/// plan and by `t_max_cap`.
pub fn run_dp_vote_rag<R, G>(question: &str, retriever: &R, generator: &G, cfg: &RunConfig) -> Result<GenerationTrace>
where
    R: Retriever + ?Sized,
    G: Generator + ?Sized,
{
    cfg.validate()?;
    let plan = max_compositions(&cfg.per_token, &cfg.total)?;
    let selector = LimitedDomainConfig::new(cfg.k_bar(), cfg.per_token, cfg.domain_size)?;
    let shards = shard(question, retriever, cfg.m, cfg.k, cfg.seed)?;
    let mut selector_rng = stream(cfg.seed, Purpose::LimitedDomain);
    let mut ledger = PrivacyLedger::new(plan);
    let mut rec = Recorder::new(Algorithm::DpVoteRag, cfg.seed, Some(plan), Some(&shards));

    for index in 0..cfg.t_max_cap {
        let (_, votes) = vote(generator, question, &shards, &rec.trace.final_answer, false)?;
        let hist = TokenHistogram::from_votes(votes.iter().map(|t| t.id));
        let chosen = limited_domain_top1(&hist, &selector, &mut selector_rng)?;
        ledger.consume(index)?;
        let token = chosen.map(|id| votes.iter().find(|t| t.id == id).cloned().expect("selected from votes"));
        let halt = match &token {
            None => Some(HaltReason::NullToken),
            Some(t) if t.is_eos() => Some(HaltReason::Eos),
            _ if ledger.remaining() == 0 => Some(HaltReason::BudgetExhausted),
            _ => None,
        };
        rec.push(
            generator,
            StepRecord {
                index,
                voter_tokens: Some(votes.iter().map(|t| t.id).collect()),
                non_rag_token: None,
                histogram: Some(hist),
                verdict: StepVerdict::PrivateVote,
                emitted_token: token,
                budget_remaining_after: Some(ledger.remaining()),
            },
        );
        if let Some(reason) = halt {
            return Ok(rec.finish(reason));
        }
    }
    Ok(rec.finish(HaltReason::CapReached))
}

/// Private votes only when the non-RAG token is uncommon among voters.
///
/// The per-token budget is split evenly: half for the gate, half (with the
/// full delta) for the selector. The plan counts private votes, each charged
/// at the full per-token budget.
pub fn run_dp_sparse_vote_rag<R, G>(
    question: &str,
    retriever: &R,
    generator: &G,
    cfg: &RunConfig,
) -> Result<GenerationTrace>
where
    R: Retriever + ?Sized,
    G: Generator + ?Sized,
{
    cfg.validate()?;
    let selector_budget = cfg.per_token.split_epsilon(2.0)?;
    let gate_epsilon = cfg.per_token.epsilon() / 2.0;
    let plan = max_compositions(&cfg.per_token, &cfg.total)?;
    let selector = LimitedDomainConfig::new(cfg.k_bar(), selector_budget, cfg.domain_size)?;
    let mut gate_rng = stream(cfg.seed, Purpose::Threshold);
    let mut selector_rng = stream(cfg.seed, Purpose::LimitedDomain);
    let mut ledger = PrivacyLedger::new(plan);
    let mut threshold = NoisyThreshold::new(cfg.tau(), gate_epsilon, &mut gate_rng)?;
    let shards = shard(question, retriever, cfg.m, cfg.k, cfg.seed)?;
    let mut rec = Recorder::new(Algorithm::DpSparseVoteRag, cfg.seed, Some(plan), Some(&shards));

    for index in 0..cfg.t_max_cap {
        let (non_rag, votes) = vote(generator, question, &shards, &rec.trace.final_answer, true)?;
        let non_rag = non_rag.expect("requested");
        let hist = TokenHistogram::from_votes(votes.iter().map(|t| t.id));
        let agreement = hist.count(non_rag.id);

        let (verdict, token) = match threshold.query(agreement, &mut gate_rng)? {
            Verdict::Below => {
                let chosen = limited_domain_top1(&hist, &selector, &mut selector_rng)?;
                ledger.consume(index)?;
                threshold.refresh(&mut gate_rng)?;
                let token = chosen.map(|id| votes.iter().find(|t| t.id == id).cloned().expect("selected from votes"));
                (StepVerdict::PrivateVote, token)
            }
            Verdict::Above => {
                ledger.record_pass(index);
                (StepVerdict::SparsePass, Some(non_rag.clone()))
            }
        };
        let halt = match &token {
            None => Some(HaltReason::NullToken),
            Some(t) if t.is_eos() => Some(HaltReason::Eos),
            _ if ledger.remaining() == 0 => Some(HaltReason::BudgetExhausted),
            _ => None,
        };
        rec.push(
            generator,
            StepRecord {
                index,
                voter_tokens: Some(votes.iter().map(|t| t.id).collect()),
                non_rag_token: Some(non_rag.id),
                histogram: Some(hist),
                verdict,
                emitted_token: token,
                budget_remaining_after: Some(ledger.remaining()),
            },
        );
        if let Some(reason) = halt {
            return Ok(rec.finish(reason));
        }
    }
    Ok(rec.finish(HaltReason::CapReached))
}
