//! Tokenization, POS tagging, INDICATOR/VALUE/UNIT chunking and entity
//! recognition.

mod chunk;
pub mod gazetteer;
mod ner;
mod pos;
mod tokenize;
mod value;

use thiserror::Error;

use crate::docmodel::{DocId, ExtractionRecord, Sentence};

pub use chunk::{chunk_extract, ChunkGrammar, ChunkRule};
pub use gazetteer::Gazetteer;
pub use ner::ner;
pub use pos::{pos_tag, tag_word};
pub use tokenize::{tokenize, tokenize_plain};
pub use value::normalize_value;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NlpError {
    #[error("not a number: `{0}`")]
    NotANumber(String),
    #[error("invalid chunk grammar: {0}")]
    Grammar(String),
    #[error("invalid gazetteer: {0}")]
    Gazetteer(String),
}

/// Builds a tokenized and tagged [`Sentence`].
pub fn analyze_sentence(doc_id: DocId, ordinal: u32, text: &str, gaz: &Gazetteer) -> Sentence {
    let mut tokens = tokenize(text, gaz);
    pos_tag(&mut tokens, gaz);
    Sentence { doc_id, ordinal, text: text.to_owned(), tokens }
}

/// Grammar and gazetteer bundled for extraction.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub grammar: ChunkGrammar,
    pub gazetteer: Gazetteer,
}

impl Default for Extractor {
    fn default() -> Self {
        Self { grammar: ChunkGrammar::builtin(), gazetteer: Gazetteer::builtin() }
    }
}

impl Extractor {
    pub fn new(grammar: ChunkGrammar, gazetteer: Gazetteer) -> Self {
        Self { grammar, gazetteer }
    }

    /// Runs NER and chunking over an already tagged sentence.
    pub fn extract(&self, sentence: &Sentence) -> Vec<ExtractionRecord> {
        let entities = ner(sentence, &self.gazetteer);
        chunk_extract(sentence, &self.grammar, &self.gazetteer, &entities)
    }

    pub fn analyze(&self, doc_id: DocId, ordinal: u32, text: &str) -> Sentence {
        analyze_sentence(doc_id, ordinal, text, &self.gazetteer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn records_are_well_formed(words in proptest::collection::vec(
            prop::sample::select(vec![
                "cotton", "area", "planted", "per", "farm", "increased", "slightly", "1,518", "2.3",
                "million", "hectares", "ha", "tonnes", "%", "of", "the", "in", "2016", "Australia", ".",
            ]),
            0..16,
        )) {
            let ex = Extractor::default();
            let text = words.join(" ");
            let s = ex.analyze(DocId::new("D"), 3, &text);
            prop_assert!(s.check_spans());
            for r in ex.extract(&s) {
                prop_assert!(!r.indicator_phrase.is_empty());
                prop_assert_eq!(&r.sentence_ref, &s.sentence_ref());
                let spans = r.spans.unwrap();
                // every token inside the VALUE span is CD
                for t in s.tokens.iter().filter(|t| t.span.start() >= spans.value.start() && t.span.end() <= spans.value.end()) {
                    prop_assert_eq!(t.pos.as_str(), "CD");
                }
                prop_assert_eq!(r.unit_unmatched, ex.gazetteer.canonical_unit(&r.unit).is_none());
            }
        }
    }
}
