//! Seeded synthetic corpora for desk-scale experiments.
//!
//! [`qa_corpus`] builds capital-city questions whose answers appear only in
//! a configurable number of relevant documents, surrounded by distractors
//! that mention the same entity. [`chat_doctor_corpus`] builds
//! patient/doctor records split by [`MIA_DELIMITER`](crate::evaluation::MIA_DELIMITER)
//! into members (indexed) and non-members drawn from the same templates.
//! Both also return a disjoint public text set for training an n-gram model.
//!
//! [`gatsby_scenario`] and [`scripted_scenario`] build scripted generators
//! with a matching corpus, for runs where every voter's output is fixed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::evaluation::QaExample;
use crate::generation::{DocsPattern, ScriptRule, ScriptTable};
use crate::retrieval::Document;
use crate::{Error, Result};

const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "kl", "st"];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];
const CODAS: &[&str] = &["", "", "n", "r", "s", "x", "th"];

const TRAITS: &[&str] = &[
    "wine", "bridges", "music", "cheese", "forests", "rivers", "markets", "textiles", "festivals", "mountains",
];

const SYMPTOMS: &[&str] = &[
    "a sharp headache",
    "a dry cough",
    "lower back pain",
    "itchy skin",
    "a sore throat",
    "chest tightness",
    "swollen ankles",
    "blurred vision",
];
const BODY_PARTS: &[&str] = &["knee", "shoulder", "stomach", "wrist", "neck", "hip", "elbow", "foot"];
const CONDITIONS: &[&str] = &[
    "a mild strain",
    "an allergic reaction",
    "a viral infection",
    "acid reflux",
    "tendonitis",
    "a vitamin deficiency",
];
const DRUGS: &[&str] = &["ibuprofen", "cetirizine", "omeprazole", "paracetamol", "naproxen", "loratadine"];
const ADVICE: &[&str] = &[
    "rest for a few days",
    "drink plenty of water",
    "avoid heavy lifting",
    "get an x-ray if it persists",
    "book a follow up visit",
];

/// Draws distinct pronounceable nonsense words.
struct WordMint {
    rng: ChaCha20Rng,
    used: BTreeSet<String>,
}

impl WordMint {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            used: BTreeSet::new(),
        }
    }

    fn fresh(&mut self) -> String {
        loop {
            let syllables = self.rng.gen_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSETS.choose(&mut self.rng).unwrap());
                w.push_str(NUCLEI.choose(&mut self.rng).unwrap());
            }
            w.push_str(CODAS.choose(&mut self.rng).unwrap());
            // no word may contain another, so substring matching stays exact
            if self.used.iter().all(|u| !u.contains(&w) && !w.contains(u.as_str())) {
                self.used.insert(w.clone());
                return w;
            }
        }
    }

    fn pick<'a>(&mut self, items: &'a [&'a str]) -> &'a str {
        items.choose(&mut self.rng).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaSynthConfig {
    pub questions: usize,
    /// Documents stating the answer, per question.
    pub relevant_per_question: usize,
    /// Documents mentioning the entity without the answer, per question.
    pub distractors_per_question: usize,
    /// Public facts about other entities, for training.
    pub public_facts: usize,
}

impl Default for QaSynthConfig {
    fn default() -> Self {
        Self {
            questions: 20,
            relevant_per_question: 20,
            distractors_per_question: 20,
            public_facts: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthQa {
    pub documents: Vec<Document>,
    pub examples: Vec<QaExample>,
    pub public_texts: Vec<String>,
}

pub fn qa_corpus(cfg: &QaSynthConfig, seed: u64) -> Result<SynthQa> {
    if cfg.questions == 0 || cfg.relevant_per_question == 0 {
        return Err(Error::invalid("need at least one question and one relevant document"));
    }
    let mut mint = WordMint::new(seed);
    let mut documents = Vec::new();
    let mut examples = Vec::new();
    for q in 0..cfg.questions {
        let place = mint.fresh();
        let capital = mint.fresh();
        for r in 0..cfg.relevant_per_question {
            let id = format!("q{q}-rel{r}");
            documents.push(Document::new(
                id.clone(),
                format!("the capital city of {place} is {capital}"),
                format!("owner-{id}"),
            ));
        }
        for d in 0..cfg.distractors_per_question {
            let id = format!("q{q}-dis{d}");
            let (a, b) = (mint.pick(TRAITS), mint.pick(TRAITS));
            documents.push(Document::new(
                id.clone(),
                format!("{place} is known for its {a} and {b}"),
                format!("owner-{id}"),
            ));
        }
        examples.push(QaExample {
            question: format!("what is the capital city of {place}?"),
            answers: alloc::vec![capital],
        });
    }
    let mut public_texts = Vec::new();
    for _ in 0..cfg.public_facts {
        let (place, capital) = (mint.fresh(), mint.fresh());
        public_texts.push(format!("the capital city of {place} is {capital}"));
        let t = mint.pick(TRAITS);
        public_texts.push(format!("{place} is known for its {t}"));
    }
    Ok(SynthQa {
        documents,
        examples,
        public_texts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatDoctorConfig {
    /// Indexed records.
    pub members: usize,
    /// Records from the same templates that are never indexed.
    pub non_members: usize,
    /// Generic health sentences, for training.
    pub public_texts: usize,
}

impl Default for ChatDoctorConfig {
    fn default() -> Self {
        Self {
            members: 200,
            non_members: 200,
            public_texts: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthChatDoctor {
    pub members: Vec<Document>,
    pub non_members: Vec<Document>,
    pub public_texts: Vec<String>,
}

fn patient_record(mint: &mut WordMint, id: String) -> Document {
    let name = mint.fresh();
    let symptom = mint.pick(SYMPTOMS);
    let part = mint.pick(BODY_PARTS);
    let days = mint.rng.gen_range(2..15);
    let condition = mint.pick(CONDITIONS);
    let drug = mint.pick(DRUGS);
    let advice = mint.pick(ADVICE);
    let dose = mint.rng.gen_range(1..4) * 100;
    let text = format!(
        "hi doctor, i am {name} and i have had {symptom} and pain in my {part} for {days} days. what should i do? \
         ### Doctor's answer: hello {name}, this sounds like {condition}. take {dose} mg of {drug} and {advice}."
    );
    Document::new(id.clone(), text, format!("patient-{id}"))
}

pub fn chat_doctor_corpus(cfg: &ChatDoctorConfig, seed: u64) -> Result<SynthChatDoctor> {
    if cfg.members == 0 || cfg.non_members == 0 {
        return Err(Error::invalid("need at least one member and one non-member record"));
    }
    let mut mint = WordMint::new(seed);
    let members = (0..cfg.members)
        .map(|i| patient_record(&mut mint, format!("in-{i}")))
        .collect();
    let non_members = (0..cfg.non_members)
        .map(|i| patient_record(&mut mint, format!("out-{i}")))
        .collect();
    let public_texts = (0..cfg.public_texts)
        .map(|_| {
            let (c, d, s) = (mint.pick(CONDITIONS), mint.pick(DRUGS), mint.pick(SYMPTOMS));
            let a = mint.pick(ADVICE);
            format!("{c} often causes {s}. many clinicians suggest {d}, and patients should {a}.")
        })
        .collect();
    Ok(SynthChatDoctor {
        members,
        non_members,
        public_texts,
    })
}

/// A corpus with a scripted generator whose answers are known up front.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptedScenario {
    pub question: String,
    pub documents: Vec<Document>,
    pub table: ScriptTable,
    /// The answer produced when every step emits the voters' plurality.
    pub reference: Vec<String>,
}

/// Sentence the voters produce from any retrieved document.
pub const GATSBY_ANSWER: &[&str] = &[
    "the", "great", "gatsby", "is", "a", "novel", "written", "by", "american", "author", "f", "scott", "fitzgerald",
];
pub const GATSBY_QUESTION: &str = "what type of literature is the great gatsby";

/// The worked example: with documents every call continues
/// [`GATSBY_ANSWER`]; without documents the generator knows the same
/// sentence except that it says "book" where the documents say "novel".
pub fn gatsby_scenario(documents: usize) -> Result<ScriptedScenario> {
    if documents == 0 {
        return Err(Error::invalid("need at least one document"));
    }
    let docs = (0..documents)
        .map(|i| {
            Document::new(
                format!("gatsby-{i}"),
                format!(
                    "the great gatsby is a novel written by american author f scott fitzgerald, reviewed in issue {i}"
                ),
                format!("reviewer-{i}"),
            )
        })
        .collect();
    let mut rules = Vec::new();
    let mut public = Vec::new();
    let public_answer: Vec<String> = GATSBY_ANSWER
        .iter()
        .map(|w| String::from(if *w == "novel" { "book" } else { w }))
        .collect();
    for (t, word) in GATSBY_ANSWER.iter().enumerate() {
        rules.push(ScriptRule {
            question: None,
            documents: DocsPattern::NonEmpty,
            prefix: GATSBY_ANSWER[..t].iter().map(|w| String::from(*w)).collect(),
            token: String::from(*word),
        });
        // the public model continues its own phrasing and the private one alike
        let own = public_answer[..t].to_vec();
        let private = rules.last().unwrap().prefix.clone();
        if private != own {
            public.push(ScriptRule {
                question: None,
                documents: DocsPattern::Empty,
                prefix: private,
                token: public_answer[t].clone(),
            });
        }
        public.push(ScriptRule {
            question: None,
            documents: DocsPattern::Empty,
            prefix: own,
            token: public_answer[t].clone(),
        });
    }
    rules.extend(public);
    Ok(ScriptedScenario {
        question: String::from(GATSBY_QUESTION),
        documents: docs,
        table: ScriptTable {
            rules,
            ..Default::default()
        },
        reference: GATSBY_ANSWER.iter().map(|w| String::from(*w)).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Voters, each holding one document (k = 1).
    pub voters: usize,
    pub answer_len: usize,
    /// Chance that the generator gets a step right without documents.
    pub predictable_fraction: f64,
    /// Fraction of voters that emit some other token at each step; must be
    /// below one half so the reference token keeps a strict plurality.
    pub dissent: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            voters: 20,
            answer_len: 10,
            predictable_fraction: 0.8,
            dissent: 0.0,
        }
    }
}

/// Random scripted scenario. At step t, for the prefix made of the first t
/// reference words, each voter's token and the no-document token are fixed
/// by the script; any other prefix ends the sequence.
pub fn scripted_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<ScriptedScenario> {
    if cfg.voters == 0 || cfg.answer_len == 0 {
        return Err(Error::invalid("need at least one voter and one answer word"));
    }
    if !(0.0..=1.0).contains(&cfg.predictable_fraction) {
        return Err(Error::invalid("predictable fraction must lie in [0, 1]"));
    }
    if !(0.0..0.5).contains(&cfg.dissent) {
        return Err(Error::invalid("dissent must lie in [0, 0.5)"));
    }
    let mut mint = WordMint::new(seed);
    let reference: Vec<String> = (0..cfg.answer_len).map(|_| mint.fresh()).collect();
    let rivals: Vec<String> = (0..3).map(|_| mint.fresh()).collect();
    let guess = mint.fresh();
    let topic = mint.fresh();

    let documents: Vec<Document> = (0..cfg.voters)
        .map(|i| {
            Document::new(
                format!("s{i}"),
                format!("{topic} record {i} {}", reference.join(" ")),
                format!("u{i}"),
            )
        })
        .collect();
    let dissenters = libm::round(cfg.dissent * cfg.voters as f64) as usize;
    let mut order: Vec<usize> = (0..cfg.voters).collect();
    let mut rules = Vec::new();
    for t in 0..cfg.answer_len {
        let prefix: Vec<String> = reference[..t].to_vec();
        order.shuffle(&mut mint.rng);
        for (rank, &voter) in order.iter().enumerate() {
            let token = if rank < dissenters {
                rivals.choose(&mut mint.rng).unwrap().clone()
            } else {
                reference[t].clone()
            };
            rules.push(ScriptRule {
                question: None,
                documents: DocsPattern::Ids(alloc::vec![documents[voter].doc_id.clone()]),
                prefix: prefix.clone(),
                token,
            });
        }
        let known = mint.rng.gen_bool(cfg.predictable_fraction);
        rules.push(ScriptRule {
            question: None,
            documents: DocsPattern::Empty,
            prefix,
            token: if known { reference[t].clone() } else { guess.clone() },
        });
    }
    Ok(ScriptedScenario {
        question: format!("tell me about {topic}"),
        documents,
        table: ScriptTable {
            rules,
            ..Default::default()
        },
        reference,
    })
}
