//! Builds generators and retrievers from merged settings.

use dprag_core::generation::{Generator, NgramModel, ScriptedGenerator};
use dprag_core::retrieval::{Document, TfIdfIndex};

use crate::config::GeneratorSettings;
use crate::error::Result;
use crate::io;
use crate::remote::RemoteGenerator;

pub type DynGenerator = Box<dyn Generator + Send + Sync>;

/// `known_texts` are registered with an n-gram model so their words can be
/// emitted when they appear in context.
pub fn load_generator(settings: &GeneratorSettings, known_texts: &[&str]) -> Result<DynGenerator> {
    Ok(match settings {
        GeneratorSettings::Scripted { table } => Box::new(ScriptedGenerator::from_table(io::read_script(table)?)),
        GeneratorSettings::Ngram { train, model } => {
            let texts = io::read_lines(train)?;
            let mut m = NgramModel::train(&texts, *model)?;
            m.extend_vocabulary(known_texts);
            Box::new(m)
        }
        GeneratorSettings::Remote(cfg) => Box::new(RemoteGenerator::new(cfg.clone())?),
    })
}

pub fn build_index(docs: Vec<Document>) -> Result<TfIdfIndex> {
    Ok(TfIdfIndex::build(docs)?)
}
