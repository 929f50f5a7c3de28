//! Line-aligned parallel corpora and connective frequency counts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::inventory::Connective;
use crate::matcher::ConnectiveMatcher;
use crate::par;
use crate::tokenize::{tokenize, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    /// 0-based line number in both input files.
    pub id: usize,
    pub src_tokens: Vec<String>,
    pub tgt_tokens: Vec<String>,
}

impl SentencePair {
    pub fn side(&self, side: Side) -> &[String] {
        match side {
            Side::Source => &self.src_tokens,
            Side::Target => &self.tgt_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusMetadata {
    pub source_path: String,
    pub target_path: String,
    pub tokenizer: Option<TokenizerConfig>,
    pub pair_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pairs: Vec<SentencePair>,
    pub metadata: CorpusMetadata,
}

impl Corpus {
    /// Tokenizes two line-aligned sides. A line pair where both sides are
    /// empty after tokenization is skipped; a pair with exactly one empty side
    /// is an error.
    pub fn from_lines<S: AsRef<str>>(src_lines: &[S], tgt_lines: &[S], options: &TokenizerConfig) -> Result<Self> {
        if src_lines.len() != tgt_lines.len() {
            return Err(Error::LineCountMismatch {
                source_lines: src_lines.len(),
                target_lines: tgt_lines.len(),
            });
        }
        let mut pairs = Vec::with_capacity(src_lines.len());
        for (id, (s, t)) in src_lines.iter().zip(tgt_lines).enumerate() {
            let src_tokens = tokenize(s.as_ref(), options);
            let tgt_tokens = tokenize(t.as_ref(), options);
            match (src_tokens.is_empty(), tgt_tokens.is_empty()) {
                (true, true) => continue,
                (false, false) => pairs.push(SentencePair {
                    id,
                    src_tokens,
                    tgt_tokens,
                }),
                (src_empty, _) => {
                    return Err(Error::EmptyLine {
                        line: id + 1,
                        message: format!(
                            "{} side is empty but the other is not",
                            if src_empty { "source" } else { "target" }
                        ),
                    })
                }
            }
        }
        let mut corpus = Corpus::from_pairs(pairs);
        corpus.metadata.tokenizer = Some(*options);
        Ok(corpus)
    }

    /// Wraps already tokenized pairs. Ids must be strictly increasing and the
    /// token sequences non-empty.
    pub fn from_pairs(pairs: Vec<SentencePair>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].id < w[1].id));
        let pair_count = pairs.len();
        Corpus {
            pairs,
            metadata: CorpusMetadata {
                pair_count,
                ..CorpusMetadata::default()
            },
        }
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&SentencePair> {
        self.pairs
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .map(|i| &self.pairs[i])
    }

    /// Keeps the first `limit` pairs.
    pub fn truncate(&mut self, limit: usize) {
        self.pairs.truncate(limit);
        self.metadata.pair_count = self.pairs.len();
    }

    pub fn token_count(&self, side: Side) -> usize {
        self.pairs.iter().map(|p| p.side(side).len()).sum()
    }
}

/// Occurrence counts per connective form. Absent forms count 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    entries: BTreeMap<String, u64>,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, form: &str) -> u64 {
        self.entries.get(form).copied().unwrap_or(0)
    }

    pub fn contains(&self, form: &str) -> bool {
        self.entries.contains_key(form)
    }

    pub fn add(&mut self, form: &str, count: u64) {
        match self.entries.get_mut(form) {
            Some(c) => *c += count,
            None => {
                self.entries.insert(String::from(form), count);
            }
        }
    }

    pub fn merge(&mut self, other: &FrequencyTable) {
        for (form, &count) in &other.entries {
            self.add(form, count);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(f, &c)| (f.as_str(), c))
    }

    /// Descending count, then form.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut rows: Vec<_> = self.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }
}

/// Counts inventory connectives on one side of the corpus. Every inventory
/// form is present in the result, with 0 when it never matched.
pub fn count_occurrences(corpus: &Corpus, side: Side, inventory: &[Connective]) -> FrequencyTable {
    let matcher = ConnectiveMatcher::new(inventory);
    let mut table = FrequencyTable::new();
    for c in inventory {
        table.add(&c.form(), 0);
    }
    let forms: Vec<String> = inventory.iter().map(Connective::form).collect();
    let per_sentence = par::map(corpus.pairs(), |pair| {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for m in matcher.find_all(pair.side(side)) {
            *counts.entry(m.index).or_default() += 1;
        }
        counts
    });
    for counts in per_sentence {
        for (index, n) in counts {
            table.add(&forms[index], n);
        }
    }
    table
}
