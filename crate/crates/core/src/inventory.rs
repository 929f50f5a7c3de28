//! Connective inventories, relation labels, the gold lexicon and the mapping
//! between induced and gold relation inventories.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::FrequencyTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    Source,
    Target,
}

/// An opaque relation label such as `Comparison.Concession`.
///
/// Labels end up inside fused tokens, so they may not contain whitespace or
/// `-` (the fused-token separator).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationLabel(String);

impl RelationLabel {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() || label.contains('-') || label.chars().any(char::is_whitespace) {
            return Err(Error::InvalidRelationLabel(label));
        }
        Ok(RelationLabel(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A connective surface form: one or more lowercased tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Connective {
    pub surface: Vec<String>,
    pub language: Language,
    pub allowed_relations: Option<BTreeSet<RelationLabel>>,
}

impl Connective {
    /// Builds a connective from free text, lowercasing and splitting on
    /// whitespace.
    pub fn new(text: &str, language: Language) -> Result<Self> {
        let surface: Vec<String> = text.split_whitespace().map(|t| t.to_lowercase()).collect();
        Self::from_tokens(surface, language)
    }

    pub fn from_tokens(surface: Vec<String>, language: Language) -> Result<Self> {
        if surface.is_empty() {
            return Err(Error::InvalidConnective {
                surface: String::new(),
                reason: "empty surface",
            });
        }
        if surface
            .iter()
            .any(|t| t.is_empty() || t.contains('_') || t.chars().any(char::is_whitespace))
        {
            return Err(Error::InvalidConnective {
                surface: surface.join(" "),
                reason: "tokens may not be empty or contain whitespace or `_`",
            });
        }
        Ok(Connective {
            surface,
            language,
            allowed_relations: None,
        })
    }

    pub fn with_allowed_relations(mut self, relations: BTreeSet<RelationLabel>) -> Self {
        self.allowed_relations = Some(relations);
        self
    }

    /// The surface tokens joined by single spaces; the key used by frequency
    /// tables and lexicons.
    pub fn form(&self) -> String {
        self.surface.join(" ")
    }

    pub fn len(&self) -> usize {
        self.surface.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surface.is_empty()
    }
}

/// Removes connectives whose surface repeats an earlier one. Returns the
/// kept connectives (file order) and the dropped duplicate forms.
pub fn dedup_connectives(connectives: Vec<Connective>) -> (Vec<Connective>, Vec<String>) {
    let mut seen = BTreeSet::new();
    let mut kept = Vec::with_capacity(connectives.len());
    let mut dropped = Vec::new();
    for c in connectives {
        if seen.insert(c.surface.clone()) {
            kept.push(c);
        } else {
            dropped.push(c.form());
        }
    }
    (kept, dropped)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationInventory {
    labels: BTreeSet<RelationLabel>,
}

impl RelationInventory {
    pub fn new(labels: impl IntoIterator<Item = RelationLabel>) -> Self {
        RelationInventory {
            labels: labels.into_iter().collect(),
        }
    }

    pub fn contains(&self, label: &RelationLabel) -> bool {
        self.labels.contains(label)
    }

    pub fn contains_str(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l.as_str() == label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationLabel> {
        self.labels.iter()
    }
}

/// Gold (connective form, relation) pairs with set semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldLexicon {
    entries: BTreeSet<(String, RelationLabel)>,
}

impl GoldLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the pair was already present.
    pub fn insert(&mut self, form: impl Into<String>, relation: RelationLabel) -> bool {
        self.entries.insert((form.into(), relation))
    }

    pub fn contains(&self, form: &str, relation: &RelationLabel) -> bool {
        self.entries.contains(&(form.to_string(), relation.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, RelationLabel)> {
        self.entries.iter()
    }

    /// Distinct connective forms in the gold set.
    pub fn connectives(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|(f, _)| f.as_str()).collect()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&str, &RelationLabel) -> bool) {
        self.entries.retain(|(f, r)| keep(f, r));
    }
}

impl FromIterator<(String, RelationLabel)> for GoldLexicon {
    fn from_iter<I: IntoIterator<Item = (String, RelationLabel)>>(iter: I) -> Self {
        GoldLexicon {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Partial function from induced labels to gold labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationMap {
    pairs: BTreeMap<RelationLabel, RelationLabel>,
}

impl RelationMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// The two relations shared by the PDTB sense list and LEXCONN.
    pub fn default_pdtb_lexconn() -> Self {
        let mut map = RelationMap::new();
        for (induced, gold) in [
            ("Contingency.Condition", "Condition"),
            ("Comparison.Concession", "Concession"),
        ] {
            map.insert(
                RelationLabel::new(induced).expect("static label"),
                RelationLabel::new(gold).expect("static label"),
            )
            .expect("distinct keys");
        }
        map
    }

    /// Adds a pair. Re-adding an identical pair is a no-op; mapping an
    /// induced label to a second gold label is an error.
    pub fn insert(&mut self, induced: RelationLabel, gold: RelationLabel) -> core::result::Result<(), RelationLabel> {
        match self.pairs.get(&induced) {
            Some(existing) if *existing != gold => Err(existing.clone()),
            _ => {
                self.pairs.insert(induced, gold);
                Ok(())
            }
        }
    }

    pub fn get(&self, induced: &RelationLabel) -> Option<&RelationLabel> {
        self.pairs.get(induced)
    }

    pub fn gold_labels(&self) -> BTreeSet<&RelationLabel> {
        self.pairs.values().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RelationLabel, &RelationLabel)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Keeps gold entries whose connective occurs at least `min_freq` times.
pub fn restrict_gold(gold: &GoldLexicon, freqs: &FrequencyTable, min_freq: u64) -> GoldLexicon {
    let mut out = gold.clone();
    out.retain(|form, _| freqs.get(form) >= min_freq);
    out
}
