//! Relation-tagged source connectives and their fusion into single tokens.
//!
//! A tagged occurrence of `even though` signalling `Comparison.Concession`
//! becomes the token `even_though-Comparison.Concession`, so that the aligner
//! and phrase extractor treat each (connective, relation) usage as a
//! distinct word.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, SentencePair};
use crate::error::{Error, Result};
use crate::inventory::{Connective, RelationInventory, RelationLabel};
use crate::matcher::ConnectiveMatcher;
use crate::par;

/// Stand-off annotation of one source connective occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DCAnnotation {
    pub sentence_id: usize,
    /// Inclusive token span.
    pub start: usize,
    pub end: usize,
    pub surface: Vec<String>,
    /// Present iff `discourse_usage`.
    pub relation: Option<RelationLabel>,
    pub discourse_usage: bool,
}

impl DCAnnotation {
    pub fn discourse(sentence_id: usize, start: usize, surface: Vec<String>, relation: RelationLabel) -> Self {
        let end = start + surface.len() - 1;
        DCAnnotation {
            sentence_id,
            start,
            end,
            surface,
            relation: Some(relation),
            discourse_usage: true,
        }
    }

    pub fn span_len(&self) -> usize {
        self.end + 1 - self.start
    }
}

/// Checks annotations against the corpus and returns them ordered by sentence
/// and start. `record` numbers in errors are 1-based positions in `annotations`.
pub fn validate_annotations(corpus: &Corpus, annotations: Vec<DCAnnotation>) -> Result<Vec<DCAnnotation>> {
    let invalid = |record: usize, message: String| Error::InvalidAnnotation {
        record: record + 1,
        message,
    };
    let mut indexed: Vec<(usize, DCAnnotation)> = annotations.into_iter().enumerate().collect();
    for (record, a) in &indexed {
        let pair = corpus
            .get(a.sentence_id)
            .ok_or_else(|| invalid(*record, format!("sentence {} not in corpus", a.sentence_id)))?;
        if a.start > a.end || a.end >= pair.src_tokens.len() {
            return Err(invalid(
                *record,
                format!(
                    "span [{}, {}] out of bounds for sentence of {} tokens",
                    a.start,
                    a.end,
                    pair.src_tokens.len()
                ),
            ));
        }
        if a.discourse_usage != a.relation.is_some() {
            return Err(invalid(*record, String::from("relation must be given iff usage is 1")));
        }
        let span = &pair.src_tokens[a.start..=a.end];
        let same = span.len() == a.surface.len()
            && span
                .iter()
                .zip(&a.surface)
                .all(|(t, s)| t.to_lowercase() == s.to_lowercase());
        if !same {
            return Err(invalid(
                *record,
                format!(
                    "surface `{}` does not match tokens `{}`",
                    a.surface.join(" "),
                    span.join(" ")
                ),
            ));
        }
        if a.surface.iter().any(|t| t.contains('_')) {
            return Err(invalid(*record, String::from("surface tokens may not contain `_`")));
        }
    }
    indexed.sort_by_key(|(record, a)| (a.sentence_id, a.start, *record));
    for w in indexed.windows(2) {
        let (_, prev) = &w[0];
        let (record, next) = &w[1];
        if prev.sentence_id == next.sentence_id && next.start <= prev.end {
            return Err(invalid(
                *record,
                format!(
                    "span [{}, {}] overlaps [{}, {}] in sentence {}",
                    next.start, next.end, prev.start, prev.end, next.sentence_id
                ),
            ));
        }
    }
    Ok(indexed.into_iter().map(|(_, a)| a).collect())
}

/// Tags every inventory match on the source side with the connective's
/// default sense.
pub fn heuristic_tag(
    corpus: &Corpus,
    inventory: &[Connective],
    default_sense: &BTreeMap<String, RelationLabel>,
) -> Result<Vec<DCAnnotation>> {
    let matcher = ConnectiveMatcher::new(inventory);
    let per_sentence = par::map(corpus.pairs(), |pair| {
        matcher
            .find_all(&pair.src_tokens)
            .into_iter()
            .map(|m| {
                let connective = &inventory[m.index];
                let form = connective.form();
                let relation = default_sense
                    .get(&form)
                    .cloned()
                    .ok_or(Error::MissingDefaultSense(form))?;
                Ok(DCAnnotation::discourse(
                    pair.id,
                    m.start,
                    connective.surface.clone(),
                    relation,
                ))
            })
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::new();
    for annotations in per_sentence {
        out.extend(annotations?);
    }
    Ok(out)
}

/// Where a fused-sentence token came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenOrigin {
    Plain(usize),
    /// Inclusive original span.
    Fused {
        start: usize,
        end: usize,
        relation: RelationLabel,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusedSentence {
    pub sentence_id: usize,
    pub tokens: Vec<String>,
    /// Parallel to `tokens`.
    pub origins: Vec<TokenOrigin>,
}

impl FusedSentence {
    /// Original (inclusive) span and relation of fused token `index`.
    pub fn fused_at(&self, index: usize) -> Option<(usize, usize, &RelationLabel)> {
        match &self.origins[index] {
            TokenOrigin::Fused { start, end, relation } => Some((*start, *end, relation)),
            TokenOrigin::Plain(_) => None,
        }
    }
}

pub fn fused_token(surface: &[String], relation: &RelationLabel) -> String {
    let mut token = surface.join("_");
    token.push('-');
    token.push_str(relation.as_str());
    token
}

/// Splits a fused token at its last `-` into (surface form, relation). The
/// form has `_` replaced by spaces. Returns `None` when either part is empty.
pub fn unfuse_token(token: &str) -> Option<(String, &str)> {
    let (surface, relation) = token.rsplit_once('-')?;
    if surface.is_empty() || relation.is_empty() {
        return None;
    }
    Some((surface.replace('_', " "), relation))
}

/// Replaces every discourse-usage span of `annotations` (all belonging to
/// `pair`, validated and non-overlapping) by its fused token.
pub fn fuse_tokens(pair: &SentencePair, annotations: &[DCAnnotation]) -> FusedSentence {
    let mut spans: Vec<&DCAnnotation> = annotations
        .iter()
        .filter(|a| a.discourse_usage && a.sentence_id == pair.id)
        .collect();
    spans.sort_by_key(|a| a.start);
    let mut tokens = Vec::with_capacity(pair.src_tokens.len());
    let mut origins = Vec::with_capacity(pair.src_tokens.len());
    let mut next = spans.into_iter().peekable();
    let mut i = 0;
    while i < pair.src_tokens.len() {
        if let Some(a) = next.next_if(|a| a.start == i) {
            let relation = a.relation.clone().expect("discourse usage carries a relation");
            tokens.push(fused_token(&pair.src_tokens[a.start..=a.end], &relation));
            origins.push(TokenOrigin::Fused {
                start: a.start,
                end: a.end,
                relation,
            });
            i = a.end + 1;
        } else {
            tokens.push(pair.src_tokens[i].clone());
            origins.push(TokenOrigin::Plain(i));
            i += 1;
        }
    }
    FusedSentence {
        sentence_id: pair.id,
        tokens,
        origins,
    }
}

/// Fuses every sentence of `corpus`; output follows corpus order.
pub fn fuse_corpus(corpus: &Corpus, annotations: &[DCAnnotation]) -> Vec<FusedSentence> {
    let mut by_sentence: BTreeMap<usize, Vec<DCAnnotation>> = BTreeMap::new();
    for a in annotations {
        by_sentence.entry(a.sentence_id).or_default().push(a.clone());
    }
    let empty = Vec::new();
    par::map(corpus.pairs(), |pair| {
        fuse_tokens(pair, by_sentence.get(&pair.id).unwrap_or(&empty))
    })
}

/// Inverse of fusion from token text alone: tokens that split into a surface
/// and a relation of `relations` are expanded back. Returns the original
/// tokens and the (inclusive span, relation) of each expanded token.
pub fn unfuse_sentence(
    tokens: &[String],
    relations: &RelationInventory,
) -> (Vec<String>, Vec<(usize, usize, RelationLabel)>) {
    let mut out = Vec::with_capacity(tokens.len());
    let mut spans = Vec::new();
    for token in tokens {
        match unfuse_token(token).filter(|(_, r)| relations.contains_str(r)) {
            Some((form, relation)) => {
                let start = out.len();
                out.extend(form.split(' ').map(String::from));
                let label = RelationLabel::new(relation).expect("inventory labels are valid");
                spans.push((start, out.len() - 1, label));
            }
            None => out.push(token.clone()),
        }
    }
    (out, spans)
}
