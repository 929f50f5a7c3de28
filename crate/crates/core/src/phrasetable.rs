//! Consistent phrase-pair extraction and the connective filter over the
//! resulting phrase table.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::alignment::Alignment;
use crate::error::{Error, Result};
use crate::inventory::{Connective, RelationInventory, RelationLabel};
use crate::par;

/// Inclusive source and target spans of one phrase pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanPair {
    pub src: (usize, usize),
    pub tgt: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhraseTableEntry {
    pub src: Vec<String>,
    pub tgt: Vec<String>,
    pub count: u64,
}

/// One phrase-table row linking a target connective to a relation-tagged
/// source connective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DCAlignmentRecord {
    pub fr_dc: String,
    pub en_dc: String,
    pub relation: RelationLabel,
    pub count: u64,
}

/// All consistent span pairs of one sentence pair with both sides at most
/// `max_len` tokens, including extension over unaligned target boundary
/// words. Each span pair appears once, in ascending order.
pub fn extract_phrase_spans(src_len: usize, tgt_len: usize, alignment: &Alignment, max_len: usize) -> Vec<SpanPair> {
    let mut out = BTreeSet::new();
    if alignment.is_empty() || max_len == 0 {
        return Vec::new();
    }
    let mut tgt_aligned = alloc::vec![false; tgt_len];
    for &(_, t) in &alignment.links {
        tgt_aligned[t] = true;
    }
    for s1 in 0..src_len {
        for s2 in s1..src_len.min(s1 + max_len) {
            let mut tmin = usize::MAX;
            let mut tmax = 0;
            for &(s, t) in &alignment.links {
                if (s1..=s2).contains(&s) {
                    tmin = tmin.min(t);
                    tmax = tmax.max(t);
                }
            }
            if tmin == usize::MAX || tmax - tmin + 1 > max_len {
                continue;
            }
            let consistent = alignment
                .links
                .iter()
                .all(|&(s, t)| !(tmin..=tmax).contains(&t) || (s1..=s2).contains(&s));
            if !consistent {
                continue;
            }
            let mut fs = tmin;
            loop {
                let mut fe = tmax;
                while fe - fs < max_len {
                    out.insert(SpanPair {
                        src: (s1, s2),
                        tgt: (fs, fe),
                    });
                    fe += 1;
                    if fe >= tgt_len || tgt_aligned[fe] {
                        break;
                    }
                }
                if fs == 0 || tgt_aligned[fs - 1] {
                    break;
                }
                fs -= 1;
            }
        }
    }
    out.into_iter().collect()
}

/// Token slices of every consistent phrase pair of `(src, tgt)`.
pub fn extract_phrase_pairs<'a>(
    src: &'a [String],
    tgt: &'a [String],
    alignment: &Alignment,
    max_len: usize,
) -> Vec<(&'a [String], &'a [String])> {
    extract_phrase_spans(src.len(), tgt.len(), alignment, max_len)
        .into_iter()
        .map(|p| (&src[p.src.0..=p.src.1], &tgt[p.tgt.0..=p.tgt.1]))
        .collect()
}

/// Counts, over the corpus, the sentences emitting each phrase pair (a
/// sentence emitting the same pair from two different boxes counts twice).
/// Entries are sorted by source then target phrase.
pub fn build_phrase_table<S, T>(corpus: &[(S, T)], alignments: &[Alignment], max_len: usize) -> Vec<PhraseTableEntry>
where
    S: AsRef<[String]> + Sync,
    T: AsRef<[String]> + Sync,
{
    assert_eq!(corpus.len(), alignments.len(), "one alignment per sentence pair");
    let indexed: Vec<usize> = (0..corpus.len()).collect();
    let mut counts: BTreeMap<(Vec<String>, Vec<String>), u64> = BTreeMap::new();
    for chunk in indexed.chunks(1024) {
        let per_sentence = par::map(chunk, |&i| {
            let (s, t) = &corpus[i];
            extract_phrase_pairs(s.as_ref(), t.as_ref(), &alignments[i], max_len)
                .into_iter()
                .map(|(a, b)| (a.to_vec(), b.to_vec()))
                .collect::<Vec<_>>()
        });
        for pairs in per_sentence {
            for key in pairs {
                *counts.entry(key).or_default() += 1;
            }
        }
    }
    counts
        .into_iter()
        .map(|((src, tgt), count)| PhraseTableEntry { src, tgt, count })
        .collect()
}

/// Keeps entries whose target phrase is exactly a target connective and
/// whose source phrase is a single fused token of a source connective and
/// an induced relation.
///
/// A single-token source phrase splitting into a source connective and a
/// label outside `relations` is an ordinary hyphenated word (`so-called`)
/// and is dropped; one with an empty label is an error.
pub fn filter_dc_entries(
    table: &[PhraseTableEntry],
    tgt_inventory: &[Connective],
    src_inventory: &[Connective],
    relations: &RelationInventory,
) -> Result<Vec<DCAlignmentRecord>> {
    let tgt_forms: BTreeSet<&[String]> = tgt_inventory.iter().map(|c| c.surface.as_slice()).collect();
    let src_forms: BTreeSet<String> = src_inventory.iter().map(Connective::form).collect();
    let mut out = Vec::new();
    for entry in table {
        if entry.src.len() != 1 || !tgt_forms.contains(entry.tgt.as_slice()) {
            continue;
        }
        let token = &entry.src[0];
        let Some((surface, relation)) = token.rsplit_once('-') else {
            continue;
        };
        let en_dc = surface.replace('_', " ");
        if !src_forms.contains(&en_dc) {
            continue;
        }
        if relation.is_empty() {
            return Err(Error::MalformedFusedToken(token.clone()));
        }
        if !relations.contains_str(relation) {
            continue;
        }
        out.push(DCAlignmentRecord {
            fr_dc: entry.tgt.join(" "),
            en_dc,
            relation: RelationLabel::new(relation).map_err(|_| Error::MalformedFusedToken(token.clone()))?,
            count: entry.count,
        });
    }
    Ok(out)
}
