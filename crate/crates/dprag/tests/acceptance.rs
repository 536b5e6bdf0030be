//! Acceptance suite. Each test writes one `PASS`/`FAIL` line to stderr.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use dprag::mia::evaluate_mia;
use dprag_core::accountant::{max_compositions, CompositionRule};
use dprag_core::engine::{run, Algorithm, HaltReason, RunConfig};
use dprag_core::evaluation::{match_accuracy, Membership, MiaExample};
use dprag_core::generation::{context_key, DocsPattern, NgramConfig, NgramModel, ScriptedGenerator};
use dprag_core::mechanisms::{limited_domain_top1, LimitedDomainConfig, TokenHistogram, TokenId};
use dprag_core::retrieval::{partition, RetrievalResult, TfIdfIndex};
use dprag_core::rng::{question_seed, stream, Purpose};
use dprag_core::synth::{
    chat_doctor_corpus, gatsby_scenario, qa_corpus, scripted_scenario, ChatDoctorConfig, QaSynthConfig,
    ScenarioConfig, ScriptedScenario,
};
use dprag_core::PrivacyBudget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn report(n: u32, name: &str, pass: bool, detail: String) {
    // the raw handle bypasses libtest's output capture
    let line = format!("criterion {n:>2} [{}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn budget(eps: f64, delta: f64) -> PrivacyBudget {
    PrivacyBudget::new(eps, delta).unwrap()
}

fn scenario_run(s: &ScriptedScenario, alg: Algorithm, m: usize, per: PrivacyBudget, total: PrivacyBudget, seed: u64) -> dprag_core::engine::GenerationTrace {
    let g = ScriptedGenerator::from_table(s.table.clone());
    let index = TfIdfIndex::build(s.documents.clone()).unwrap();
    run(&s.question, &index, &g, &RunConfig::new(alg, m, per, total, seed)).unwrap()
}

// Brute-force scan of both composition bounds, written out from the formulas.
fn oracle_steps(e0: f64, d0: f64, et: f64, dt: f64) -> (u64, CompositionRule) {
    let ok = |cost: f64, limit: f64| cost <= limit * (1.0 + 1e-12);
    let mut seq = 0u64;
    while ok((seq + 1) as f64 * e0, et) && ok((seq + 1) as f64 * d0, dt) {
        seq += 1;
    }
    let dp = dt / 2.0;
    let mut adv = 0u64;
    loop {
        let t = (adv + 1) as f64;
        let eps = (2.0 * t * (1.0 / dp).ln()).sqrt() * e0 + t * e0 * (e0.exp() - 1.0);
        if ok(eps, et) && ok(t * d0, dp) {
            adv += 1;
        } else {
            break;
        }
    }
    if adv > seq {
        (adv, CompositionRule::Advanced)
    } else {
        (seq, CompositionRule::Sequential)
    }
}

#[test]
fn c01_accountant_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut advanced = 0;
    for _ in 0..200 {
        let e0 = rng.gen_range(0.1..=10.0);
        let d0 = 10f64.powf(rng.gen_range(-8.0..=-4.0));
        let et = rng.gen_range(1.0..=40.0);
        let dt = 10f64.powf(rng.gen_range(-6.0..=-3.0));
        let (want, rule) = oracle_steps(e0, d0, et, dt);
        let got = max_compositions(&budget(e0, d0), &budget(et, dt));
        match got {
            Ok(plan) if want > 0 && plan.max_steps == want && plan.rule_used == rule => {}
            Err(_) if want == 0 => {}
            _ => mismatches += 1,
        }
        if rule == CompositionRule::Advanced {
            advanced += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "accountant oracle equivalence",
        mismatches == 0 && secs < 5.0,
        format!("200 tuples, {mismatches} mismatches, {advanced} decided by advanced composition, {secs:.2}s"),
    );
}

fn outcome_frequencies(counts: &[(u32, u32)], trials: usize, seed: u64) -> BTreeMap<Option<u32>, f64> {
    let hist = TokenHistogram::from_counts(counts.iter().map(|&(t, c)| (TokenId(t), c)));
    let cfg = LimitedDomainConfig::new(50, budget(1.0, 1e-5), 50_272).unwrap();
    let mut rng = stream(seed, Purpose::LimitedDomain);
    let mut freq = BTreeMap::new();
    for _ in 0..trials {
        let o = limited_domain_top1(&hist, &cfg, &mut rng).unwrap().map(|t| t.0);
        *freq.entry(o).or_insert(0.0) += 1.0;
    }
    freq.values_mut().for_each(|v| *v /= trials as f64);
    freq
}

#[test]
fn c02_limited_domain_likelihood_ratio() {
    let start = Instant::now();
    let trials = 100_000;
    let n = trials as f64;
    let e = std::f64::consts::E;
    // (h, h'): one voter moves from the leading token to another bin
    let pairs: [(&[(u32, u32)], &[(u32, u32)]); 4] = [
        (&[(1, 26), (2, 24)], &[(1, 25), (2, 25)]),
        (&[(1, 30), (2, 20)], &[(1, 29), (2, 21)]),
        (&[(1, 50)], &[(1, 49), (2, 1)]),
        (&[(1, 20), (2, 18), (3, 12)], &[(1, 19), (2, 18), (3, 13)]),
    ];
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut worst_reverse: f64 = 0.0;
    for (i, (h, hp)) in pairs.iter().enumerate() {
        let p = outcome_frequencies(h, trials, 100 + i as u64);
        let q = outcome_frequencies(hp, trials, 200 + i as u64);
        for (o, &ph) in &p {
            if ph <= 1e-3 {
                continue;
            }
            checked += 1;
            let qh = q.get(o).copied().unwrap_or(0.0);
            let sigma = (ph * (1.0 - ph) / n + e * e * qh * (1.0 - qh) / n).sqrt();
            if ph > e * qh + 1e-5 + 3.0 * sigma {
                violations.push(format!("pair {i} outcome {o:?}: {ph:.4} vs e*{qh:.4}"));
            }
        }
        for (o, &qh) in &q {
            let ph = p.get(o).copied().unwrap_or(0.0);
            if qh > 1e-3 && ph > 0.0 {
                worst_reverse = worst_reverse.max(qh / ph);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        2,
        "limited-domain likelihood ratio",
        violations.is_empty() && secs < 60.0,
        format!(
            "{checked} outcomes over 4 neighbour pairs, {} violations {:?}, {secs:.1}s; \
             reverse direction h' -> h peaks at ratio {worst_reverse:.2} (informational)",
            violations.len(),
            violations
        ),
    );
}

#[test]
fn c03_noiseless_dp_vote_equals_vote() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut equal = 0;
    for case in 0..50u64 {
        let m = rng.gen_range(6..=30);
        let cfg = ScenarioConfig {
            voters: m,
            answer_len: rng.gen_range(3..=15),
            predictable_fraction: rng.gen_range(0.0..=1.0),
            dissent: rng.gen_range(0.0..=0.3),
        };
        let s = scripted_scenario(&cfg, case).unwrap();
        let per = budget(1e6, 1e-7);
        let total = budget(1e8, 1e-4);
        let dp = scenario_run(&s, Algorithm::DpVoteRag, m, per, total, case);
        let plain = scenario_run(&s, Algorithm::VoteRag, m, per, total, case);
        if dp.answer_text() == plain.answer_text() {
            equal += 1;
        }
    }
    report(3, "noiseless-limit equivalence", equal == 50, format!("{equal}/50 scenarios identical"));
}

#[test]
fn c04_ledger_soundness() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut bad = 0;
    let mut exhausted = 0;
    for run_id in 0..1000u64 {
        let m = rng.gen_range(2..=20);
        let cfg = ScenarioConfig {
            voters: m,
            answer_len: rng.gen_range(1..=12),
            predictable_fraction: rng.gen_range(0.0..=1.0),
            dissent: rng.gen_range(0.0..0.5),
        };
        let s = scripted_scenario(&cfg, run_id).unwrap();
        let e0 = [0.5, 1.0, 2.0, 5.0, 1e3][rng.gen_range(0..5)];
        let d0 = 1e-5;
        let per = budget(e0, d0);
        let total = budget(e0 * rng.gen_range(1.0..6.0), d0 * 100.0);
        let t = scenario_run(&s, Algorithm::DpSparseVoteRag, m, per, total, run_id);
        let c_max = t.plan.unwrap().max_steps as usize;
        let mut ok = t.private_votes() <= c_max;
        if t.halt_reason == HaltReason::BudgetExhausted {
            exhausted += 1;
            ok &= t.steps.last().and_then(|s| s.budget_remaining_after) == Some(0);
        }
        if !ok {
            bad += 1;
        }
    }
    report(
        4,
        "budget ledger soundness",
        bad == 0,
        format!("1000 runs, {bad} unsound traces, {exhausted} halted on an exhausted budget"),
    );
}

#[test]
fn c05_gatsby() {
    let s = gatsby_scenario(50).unwrap();
    let per = budget(1.0, 1e-5);
    let total = budget(5.0, 1e-4);
    let t_max = max_compositions(&per, &total).unwrap().max_steps;
    let mut dp_vote_ok = 0;
    let mut sparse_novel = 0;
    for seed in 0..50 {
        let v = scenario_run(&s, Algorithm::DpVoteRag, 50, per, total, seed);
        if v.token_count() <= 5 && !v.answer_text().split(' ').any(|w| w == "novel") {
            dp_vote_ok += 1;
        }
        let sp = scenario_run(&s, Algorithm::DpSparseVoteRag, 50, per, total, seed);
        if sp.answer_text().split(' ').any(|w| w == "novel") {
            sparse_novel += 1;
        }
    }
    report(
        5,
        "worked-example reproduction",
        t_max == 5 && dp_vote_ok == 50 && sparse_novel >= 45,
        format!("T_max = {t_max}; DPVoteRAG <= 5 tokens without \"novel\" in {dp_vote_ok}/50; DPSparseVoteRAG says \"novel\" in {sparse_novel}/50"),
    );
}

fn predictable_share(s: &ScriptedScenario) -> f64 {
    let hits = s
        .reference
        .iter()
        .enumerate()
        .filter(|(t, word)| {
            s.table.rules.iter().any(|r| {
                r.documents == DocsPattern::Empty && r.prefix[..] == s.reference[..*t] && &&r.token == word
            })
        })
        .count();
    hits as f64 / s.reference.len() as f64
}

#[test]
fn c06_sparse_outlasts_dense() {
    let per = budget(2.0, 1e-5);
    let total = budget(10.0, 1e-4);
    let (mut sparse, mut dense, mut share) = (0.0, 0.0, 0.0);
    for seed in 0..20u64 {
        let cfg = ScenarioConfig {
            voters: 20,
            answer_len: 20,
            predictable_fraction: 0.9,
            dissent: 0.0,
        };
        let s = scripted_scenario(&cfg, 600 + seed).unwrap();
        share += predictable_share(&s);
        sparse += scenario_run(&s, Algorithm::DpSparseVoteRag, 20, per, total, seed).token_count() as f64;
        dense += scenario_run(&s, Algorithm::DpVoteRag, 20, per, total, seed).token_count() as f64;
    }
    let (sparse, dense, share) = (sparse / 20.0, dense / 20.0, share / 20.0);
    report(
        6,
        "sparse voting outlasts dense voting",
        share >= 0.8 && sparse >= 2.0 * dense,
        format!("predictable share {share:.2}; mean tokens DPSparseVoteRAG {sparse:.2} vs DPVoteRAG {dense:.2}"),
    );
}

fn qa_accuracy(relevant: usize, seed: u64) -> f64 {
    let data = qa_corpus(
        &QaSynthConfig {
            questions: 10,
            relevant_per_question: relevant,
            distractors_per_question: 20,
            public_facts: 40,
        },
        seed,
    )
    .unwrap();
    let mut model = NgramModel::train(&data.public_texts, NgramConfig::default()).unwrap();
    let known: Vec<&str> = data
        .documents
        .iter()
        .map(|d| d.text.as_str())
        .chain(data.examples.iter().map(|e| e.question.as_str()))
        .collect();
    model.extend_vocabulary(&known);
    let index = TfIdfIndex::build(data.documents).unwrap();
    let hits: u32 = data
        .examples
        .iter()
        .enumerate()
        .map(|(qi, ex)| {
            let cfg = RunConfig::new(
                Algorithm::DpSparseVoteRag,
                20,
                budget(2.0, 1e-5),
                budget(10.0, 1e-4),
                question_seed(seed, qi, 0),
            );
            let t = run(&ex.question, &index, &model, &cfg).unwrap();
            match_accuracy(&t.answer_text(), &ex.answers) as u32
        })
        .sum();
    hits as f64 / data.examples.len() as f64
}

#[test]
fn c07_more_relevant_documents_help() {
    let few: f64 = (0..10).map(|s| qa_accuracy(2, s)).sum::<f64>() / 10.0;
    let many: f64 = (0..10).map(|s| qa_accuracy(20, s)).sum::<f64>() / 10.0;
    report(
        7,
        "accuracy rises with relevant documents",
        many > few,
        format!("DPSparseVoteRAG accuracy {few:.3} with 2 relevant docs vs {many:.3} with 20"),
    );
}

fn mia_auc(alg: Algorithm, seed: u64) -> f64 {
    let data = chat_doctor_corpus(&ChatDoctorConfig::default(), seed).unwrap();
    let mut model = NgramModel::train(&data.public_texts, NgramConfig::default()).unwrap();
    let known: Vec<&str> = data.members.iter().chain(&data.non_members).map(|d| d.text.as_str()).collect();
    model.extend_vocabulary(&known);
    let examples: Vec<MiaExample> = data
        .members
        .iter()
        .map(|d| MiaExample::new(d.clone(), Membership::In).unwrap())
        .chain(data.non_members.iter().map(|d| MiaExample::new(d.clone(), Membership::Out).unwrap()))
        .collect();
    let index = TfIdfIndex::build(data.members).unwrap();
    let base = RunConfig::new(alg, 1, budget(2.0, 1e-5), budget(10.0, 1e-4), seed);
    evaluate_mia(&examples, &index, &model, &base, 4).unwrap().curve.auc
}

#[test]
fn c08_membership_inference_collapses() {
    let plain: Vec<f64> = (0..3).map(|s| mia_auc(Algorithm::VoteRag, s)).collect();
    let private: Vec<f64> = (0..3).map(|s| mia_auc(Algorithm::DpSparseVoteRag, s)).collect();
    let pass = plain.iter().all(|&a| a >= 0.75) && private.iter().all(|&a| (a - 0.5).abs() <= 0.1);
    report(
        8,
        "membership inference collapses under DP",
        pass,
        format!("AUC VoteRAG {plain:.3?}, DPSparseVoteRAG {private:.3?} (m = 1, 200 members)"),
    );
}

// Upper quantile of chi-square via the Wilson-Hilferty cube approximation.
fn chi2_critical(df: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

#[test]
fn c09_partition_uniformity() {
    let (m, k) = (3, 2);
    let result = RetrievalResult {
        ranked: (0..m * k).map(|i| format!("d{i}")).collect(),
        scores: vec![1.0; m * k],
    };
    let seeds = 100_000u64;
    let mut cells: BTreeMap<Vec<Vec<String>>, u64> = BTreeMap::new();
    let mut membership = vec![[0u64; 3]; m * k];
    for seed in 0..seeds {
        let p = partition(&result, m, k, &mut stream(seed, Purpose::Partition)).unwrap();
        let mut key = p.subsets.clone();
        key.iter_mut().for_each(|s| s.sort());
        for (j, subset) in key.iter().enumerate() {
            for id in subset {
                membership[id[1..].parse::<usize>().unwrap()][j] += 1;
            }
        }
        *cells.entry(key).or_insert(0) += 1;
    }
    // 6! / (2!)^3 ordered splits into labelled pairs
    let outcomes = 90.0;
    let expected = seeds as f64 / outcomes;
    let observed_missing = outcomes - cells.len() as f64;
    let joint: f64 = cells.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>()
        + observed_missing * expected;
    let joint_crit = chi2_critical(outcomes - 1.0, 3.0902);
    let member_expected = seeds as f64 / m as f64;
    let member: f64 = membership
        .iter()
        .flatten()
        .map(|&c| (c as f64 - member_expected).powi(2) / member_expected)
        .sum();
    // each document row has 2 free cells, and rows share column totals
    let member_df = ((m * k) * (m - 1) - (m - 1)) as f64;
    let member_crit = chi2_critical(member_df, 3.0902);
    report(
        9,
        "partition uniformity",
        joint < joint_crit && member < member_crit,
        format!(
            "joint chi2 {joint:.1} < {joint_crit:.1} (df 89); membership chi2 {member:.1} < {member_crit:.1} (df {member_df})"
        ),
    );
}

fn run_cli(args: &[&str], cwd: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_dprag")).args(args).current_dir(cwd).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn snapshot(dir: &Path, stdout: &[u8]) -> String {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(rel, context_key(&String::from_utf8_lossy(&std::fs::read(&path).unwrap())));
            }
        }
    }
    let listing: Vec<String> = files.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    context_key(&format!("{}\n{}", String::from_utf8_lossy(stdout), listing.join("\n")))
}

#[test]
fn c10_cli_determinism() {
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("accountant", vec!["accountant", "--epsilon-token", "2", "--delta-token", "1e-5", "--epsilon-total", "10", "--delta-total", "1e-4", "--header"]),
        ("synth", vec!["--seed", "5", "synth", "qa", "--size", "4", "--out-dir", "qa"]),
        (
            "generate",
            vec![
                "--seed", "9", "generate", "--question", "what type of literature is the great gatsby",
                "--corpus", "g/corpus.jsonl", "--script", "g/script.json", "--m", "50",
                "--epsilon-token", "1", "--epsilon-total", "5",
            ],
        ),
        (
            "eval-qa",
            vec![
                "--seed", "3", "--jobs", "4", "eval-qa", "--corpus", "qa/corpus.jsonl",
                "--questions", "qa/questions.jsonl", "--ngram-train", "qa/public.txt",
                "--algorithm", "vote-rag,dp-vote-rag,dp-sparse-vote-rag", "--m", "20",
                "--epsilon-token", "2", "--epsilon-total", "10", "--repetitions", "2",
            ],
        ),
        (
            "eval-mia",
            vec![
                "--seed", "1", "--jobs", "4", "eval-mia", "--in", "cd/mia_in.jsonl", "--out",
                "cd/mia_out.jsonl", "--corpus", "cd/corpus.jsonl", "--ngram-train", "cd/public.txt",
                "--algorithm", "dp-sparse-vote-rag", "--m", "1", "--epsilon-token", "2",
                "--epsilon-total", "10", "--roc", "roc.csv",
            ],
        ),
    ];
    let mut hashes: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for _ in 0..3 {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        run_cli(&["synth", "gatsby", "--out-dir", "g"], d);
        run_cli(&["synth", "chat-doctor", "--size", "40", "--out-dir", "cd"], d);
        for (name, args) in &commands {
            let stdout = run_cli(args, d);
            hashes.entry(name).or_default().push(snapshot(d, &stdout));
        }
    }
    let unstable: Vec<&str> = hashes.iter().filter(|(_, h)| h.iter().any(|x| x != &h[0])).map(|(n, _)| *n).collect();
    report(
        10,
        "CLI determinism",
        unstable.is_empty(),
        format!("{} commands x 3 runs; unstable: {unstable:?}", commands.len()),
    );
}
