//! The ranked (connective, relation, probability) lexicon and evidence
//! sampling for manual validation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alignment::Alignment;
use crate::corpus::{Corpus, FrequencyTable};
use crate::error::{Error, Result};
use crate::inventory::RelationLabel;
use crate::matcher::ConnectiveMatcher;
use crate::phrasetable::DCAlignmentRecord;
use crate::tagging::FusedSentence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub fr_dc: String,
    pub relation: RelationLabel,
    pub aligned_count: u64,
    pub corpus_freq: u64,
}

impl LexiconEntry {
    /// `aligned_count / corpus_freq`, exact.
    pub fn prob(&self) -> Ratio<u64> {
        Ratio::new(self.aligned_count, self.corpus_freq)
    }

    /// The probability rounded half-up to `places` decimals, computed in
    /// integer arithmetic.
    pub fn prob_decimal(&self, places: u32) -> String {
        let scale = 10u128.pow(places);
        let num = self.aligned_count as u128 * scale * 2 + self.corpus_freq as u128;
        let scaled = num / (2 * self.corpus_freq as u128);
        let int = scaled / scale;
        let frac = scaled % scale;
        if places == 0 {
            format!("{int}")
        } else {
            format!("{int}.{frac:0width$}", width = places as usize)
        }
    }

    pub fn prob_f64(&self) -> f64 {
        self.aligned_count as f64 / self.corpus_freq as f64
    }

    /// Descending probability, then descending aligned count, then
    /// ascending (connective, relation).
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        let lhs = self.aligned_count as u128 * other.corpus_freq as u128;
        let rhs = other.aligned_count as u128 * self.corpus_freq as u128;
        rhs.cmp(&lhs)
            .then_with(|| other.aligned_count.cmp(&self.aligned_count))
            .then_with(|| self.fr_dc.cmp(&other.fr_dc))
            .then_with(|| self.relation.cmp(&other.relation))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankedLexicon {
    entries: Vec<LexiconEntry>,
}

impl RankedLexicon {
    /// Sorts `entries` into rank order. Fails on a duplicate
    /// (connective, relation) key.
    pub fn from_entries(mut entries: Vec<LexiconEntry>) -> core::result::Result<Self, (String, RelationLabel)> {
        let mut keys = BTreeSet::new();
        for e in &entries {
            if !keys.insert((e.fr_dc.as_str(), &e.relation)) {
                return Err((e.fr_dc.clone(), e.relation.clone()));
            }
        }
        entries.sort_by(LexiconEntry::rank_cmp);
        Ok(RankedLexicon { entries })
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Scales `counts` down to sum to `total` with the largest-remainder rule
/// (ties to the earlier entry).
fn scale_to(counts: &mut [u64], total: u64) {
    let sum: u64 = counts.iter().sum();
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(counts.len());
    let mut assigned = 0;
    for (i, c) in counts.iter_mut().enumerate() {
        let exact = *c as u128 * total as u128;
        let floor = exact / sum as u128;
        remainders.push((exact % sum as u128, i));
        *c = floor as u64;
        assigned += *c;
    }
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take((total - assigned) as usize) {
        counts[i] += 1;
    }
}

/// Sums alignment counts per (connective, relation) over all source
/// connectives and divides by the connective's corpus frequency.
///
/// Connectives below `min_freq` are dropped. When the counts of one
/// connective sum past its frequency they are scaled down to it, so every
/// probability and every per-connective total stays within 1.
pub fn build_lexicon(records: &[DCAlignmentRecord], freqs: &FrequencyTable, min_freq: u64) -> Result<RankedLexicon> {
    let mut by_dc: BTreeMap<&str, BTreeMap<&RelationLabel, u64>> = BTreeMap::new();
    for r in records {
        *by_dc.entry(&r.fr_dc).or_default().entry(&r.relation).or_default() += r.count;
    }
    let mut entries = Vec::new();
    for (fr_dc, relations) in by_dc {
        let corpus_freq = freqs.get(fr_dc);
        if corpus_freq == 0 && relations.values().any(|&c| c > 0) {
            return Err(Error::ZeroFrequency(String::from(fr_dc)));
        }
        if corpus_freq < min_freq {
            continue;
        }
        let labels: Vec<&RelationLabel> = relations.keys().copied().collect();
        let mut counts: Vec<u64> = relations.values().copied().collect();
        let sum: u64 = counts.iter().sum();
        if sum > corpus_freq {
            log::warn!("capping aligned counts of `{fr_dc}`: {sum} alignments for {corpus_freq} occurrences");
            scale_to(&mut counts, corpus_freq);
        }
        for (relation, aligned_count) in labels.into_iter().zip(counts) {
            if aligned_count == 0 {
                continue;
            }
            entries.push(LexiconEntry {
                fr_dc: String::from(fr_dc),
                relation: relation.clone(),
                aligned_count,
                corpus_freq,
            });
        }
    }
    Ok(RankedLexicon::from_entries(entries).expect("keys are unique by construction"))
}

/// A sentence pair supporting a (connective, relation) mapping, with both
/// connectives wrapped in `__`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excerpt {
    pub sentence_id: usize,
    pub fr: String,
    pub en: String,
}

fn highlight(tokens: &[String], spans: &BTreeSet<(usize, usize)>) -> String {
    let mut out = String::new();
    let mut i = 0;
    let mut spans = spans.iter().peekable();
    while i < tokens.len() {
        if !out.is_empty() {
            out.push(' ');
        }
        if let Some(&&(s, e)) = spans.peek().filter(|(s, _)| *s == i) {
            spans.next();
            out.push_str("__");
            out.push_str(&tokens[s..=e].join(" "));
            out.push_str("__");
            i = e + 1;
        } else {
            out.push_str(&tokens[i]);
            i += 1;
        }
    }
    out
}

/// Samples up to `k` sentence pairs, uniformly without replacement with a
/// seeded generator, in which an occurrence of `fr_dc` (as found by
/// `target_matcher`) is linked to a fused source token carrying `relation`.
///
/// `alignments` and `fused` are parallel to `corpus.pairs()` and refer to
/// the fused source side. Excerpts come back in sentence order.
#[allow(clippy::too_many_arguments)]
pub fn sample_evidence(
    corpus: &Corpus,
    alignments: &[Alignment],
    fused: &[FusedSentence],
    target_matcher: &ConnectiveMatcher,
    fr_dc: &str,
    relation: &RelationLabel,
    k: usize,
    seed: u64,
) -> Vec<Excerpt> {
    let mut qualifying = Vec::new();
    for ((pair, alignment), fused) in corpus.pairs().iter().zip(alignments).zip(fused) {
        let mut tgt_spans = BTreeSet::new();
        let mut src_spans = BTreeSet::new();
        for m in target_matcher.find_all(&pair.tgt_tokens) {
            if target_matcher.connectives()[m.index].form() != fr_dc {
                continue;
            }
            for &(i, j) in &alignment.links {
                if !(m.start..m.end()).contains(&j) {
                    continue;
                }
                if let Some((s, e, r)) = fused.fused_at(i) {
                    if r == relation {
                        tgt_spans.insert((m.start, m.end() - 1));
                        src_spans.insert((s, e));
                    }
                }
            }
        }
        if !tgt_spans.is_empty() {
            qualifying.push(Excerpt {
                sentence_id: pair.id,
                fr: highlight(&pair.tgt_tokens, &tgt_spans),
                en: highlight(&pair.src_tokens, &src_spans),
            });
        }
    }
    let n = qualifying.len();
    let amount = k.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, amount).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| qualifying[i].clone()).collect()
}
