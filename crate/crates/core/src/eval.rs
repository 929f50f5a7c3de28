//! Ranked-retrieval scoring of an induced lexicon against a gold lexicon.
//!
//! All quantities are exact rationals; convert with the `*_f64` helpers for
//! display.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::inventory::{GoldLexicon, RelationLabel, RelationMap};
use crate::lexicon::RankedLexicon;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceItem {
    pub fr_dc: String,
    pub gold_relation: RelationLabel,
    pub is_relevant: bool,
}

/// Ranked items in gold-label space, relevance marked on the first hit of
/// each gold pair only. `total_relevant` is the number of gold pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceList {
    pub items: Vec<RelevanceItem>,
    pub total_relevant: u64,
}

impl RelevanceList {
    /// A list of anonymous items with the given relevance flags.
    pub fn from_flags(flags: &[bool], total_relevant: u64) -> Self {
        let placeholder = RelationLabel::new("_").expect("static label");
        RelevanceList {
            items: flags
                .iter()
                .map(|&is_relevant| RelevanceItem {
                    fr_dc: String::new(),
                    gold_relation: placeholder.clone(),
                    is_relevant,
                })
                .collect(),
            total_relevant,
        }
    }

    pub fn retrieved_relevant(&self) -> u64 {
        self.items.iter().filter(|i| i.is_relevant).count() as u64
    }
}

/// Restricts `ranked` to relations covered by `map`, translates them to
/// gold labels and marks relevance. Only gold pairs whose relation is a
/// target of `map` count towards the total.
pub fn make_relevance_list(ranked: &RankedLexicon, gold: &GoldLexicon, map: &RelationMap) -> RelevanceList {
    let reachable = map.gold_labels();
    let total_relevant = gold.iter().filter(|(_, r)| reachable.contains(r)).count() as u64;
    let mut seen: BTreeSet<(&str, &RelationLabel)> = BTreeSet::new();
    let mut items = Vec::new();
    for entry in ranked.entries() {
        let Some(gold_relation) = map.get(&entry.relation) else {
            continue;
        };
        let is_relevant = gold.contains(&entry.fr_dc, gold_relation) && seen.insert((&entry.fr_dc, gold_relation));
        items.push(RelevanceItem {
            fr_dc: entry.fr_dc.clone(),
            gold_relation: gold_relation.clone(),
            is_relevant,
        });
    }
    RelevanceList { items, total_relevant }
}

/// (recall, precision) after each rank.
pub fn precision_recall_points(rl: &RelevanceList) -> Result<Vec<(Ratio<u64>, Ratio<u64>)>> {
    if rl.total_relevant == 0 {
        return Err(Error::EmptyGold);
    }
    let mut seen = 0u64;
    Ok(rl
        .items
        .iter()
        .enumerate()
        .map(|(k, item)| {
            seen += item.is_relevant as u64;
            (Ratio::new(seen, rl.total_relevant), Ratio::new(seen, k as u64 + 1))
        })
        .collect())
}

/// Interpolated precision at recall 0.0, 0.1, ..., 1.0: the highest
/// precision at any point whose recall reaches the level, 0 if none does.
pub fn interpolated_11pt(points: &[(Ratio<u64>, Ratio<u64>)]) -> [Ratio<u64>; 11] {
    let mut curve = [Ratio::zero(); 11];
    for (level, slot) in curve.iter_mut().enumerate() {
        let r = Ratio::new(level as u64, 10);
        *slot = points
            .iter()
            .filter(|(recall, _)| *recall >= r)
            .map(|(_, precision)| *precision)
            .max()
            .unwrap_or_else(Ratio::zero);
    }
    curve
}

/// Mean over the gold pairs of the precision at the rank where each is
/// first retrieved; pairs never retrieved contribute 0.
pub fn average_precision(rl: &RelevanceList) -> Result<BigRational> {
    if rl.total_relevant == 0 {
        return Err(Error::EmptyGold);
    }
    let mut sum = BigRational::zero();
    let mut seen = 0u64;
    for (k, item) in rl.items.iter().enumerate() {
        if item.is_relevant {
            seen += 1;
            sum += BigRational::new(BigInt::from(seen), BigInt::from(k as u64 + 1));
        }
    }
    Ok(sum / BigRational::from_integer(BigInt::from(rl.total_relevant)))
}

pub fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn big_ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub pr_points: Vec<(Ratio<u64>, Ratio<u64>)>,
    pub curve11: [Ratio<u64>; 11],
    pub avep: BigRational,
    /// Pair-level: retrieved gold pairs over all gold pairs.
    pub recall_final: Ratio<u64>,
    pub retrieved_relevant: u64,
    pub total_relevant: u64,
    /// Connective-level: gold connectives retrieved with at least one of
    /// their gold relations.
    pub dc_recall: Ratio<u64>,
    pub dc_retrieved: u64,
    pub dc_total: u64,
}

pub fn evaluate(ranked: &RankedLexicon, gold: &GoldLexicon, map: &RelationMap) -> Result<EvalReport> {
    let rl = make_relevance_list(ranked, gold, map);
    let pr_points = precision_recall_points(&rl)?;
    let curve11 = interpolated_11pt(&pr_points);
    let avep = average_precision(&rl)?;
    let retrieved_relevant = rl.retrieved_relevant();

    let reachable = map.gold_labels();
    let dc_all: BTreeSet<&str> = gold
        .iter()
        .filter(|(_, r)| reachable.contains(r))
        .map(|(f, _)| f.as_str())
        .collect();
    let dc_hit: BTreeSet<&str> = rl
        .items
        .iter()
        .filter(|i| i.is_relevant)
        .map(|i| i.fr_dc.as_str())
        .collect();
    let dc_total = dc_all.len() as u64;
    let dc_retrieved = dc_hit.len() as u64;

    Ok(EvalReport {
        pr_points,
        curve11,
        avep,
        recall_final: Ratio::new(retrieved_relevant, rl.total_relevant),
        retrieved_relevant,
        total_relevant: rl.total_relevant,
        dc_recall: Ratio::new(dc_retrieved, dc_total),
        dc_retrieved,
        dc_total,
    })
}
