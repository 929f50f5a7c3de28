//! Induction of a discourse-connective lexicon from word-aligned parallel text.
//!
//! The source side of a parallel corpus carries connectives tagged with a
//! discourse relation. Each tagged occurrence is fused into a single token,
//! the corpus is word-aligned with IBM Model 1 in both directions, the
//! directional alignments are symmetrized, consistent phrase pairs are
//! extracted, and phrase pairs linking a target connective to a fused source
//! connective become evidence that the target connective signals the
//! relation. The resulting ranked lexicon is scored against a gold lexicon
//! with ranked-retrieval metrics.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command line live in the companion `conledisco` crate. Enable the
//! `parallel` feature to run the E-step and phrase extraction on rayon; the
//! results are bit-identical to serial execution.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod alignment;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod inventory;
pub mod lexicon;
pub mod matcher;
pub mod phrasetable;
pub mod tagging;
pub mod tokenize;

mod par;

pub use alignment::{
    symmetrize, train_model1, viterbi_align, Alignment, Direction, Heuristic, Model1Config, TranslationTable,
    NULL_TOKEN, PROB_FLOOR,
};
pub use corpus::{count_occurrences, Corpus, CorpusMetadata, FrequencyTable, SentencePair, Side};
pub use error::{Error, Result};
pub use eval::{
    average_precision, evaluate, interpolated_11pt, make_relevance_list, precision_recall_points, EvalReport,
    RelevanceItem, RelevanceList,
};
pub use inventory::{restrict_gold, Connective, GoldLexicon, Language, RelationInventory, RelationLabel, RelationMap};
pub use lexicon::{build_lexicon, sample_evidence, Excerpt, LexiconEntry, RankedLexicon};
pub use matcher::ConnectiveMatcher;
pub use phrasetable::{
    build_phrase_table, extract_phrase_pairs, extract_phrase_spans, filter_dc_entries, DCAlignmentRecord,
    PhraseTableEntry, SpanPair,
};
pub use tagging::{fuse_tokens, heuristic_tag, unfuse_token, DCAnnotation, FusedSentence, TokenOrigin};
pub use tokenize::{tokenize, TokenizerConfig};
