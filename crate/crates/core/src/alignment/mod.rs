//! Word alignment: IBM Model 1 trained by EM, Viterbi decoding and
//! symmetrization of the two directional alignments.

mod model1;
mod symmetrize;

use alloc::collections::BTreeSet;

pub use model1::{
    align_corpus, train_model1, viterbi_align, Model1Config, Model1Fit, TranslationTable, NULL_TOKEN, PROB_FLOOR,
};
pub use symmetrize::{symmetrize, Heuristic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Each target token linked to at most one source token.
    Forward,
    /// Each source token linked to at most one target token, stored in
    /// (src, tgt) orientation.
    Backward,
    Symmetrized,
}

/// Links of one sentence pair as (source index, target index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub links: BTreeSet<(usize, usize)>,
    pub direction: Direction,
}

impl Alignment {
    pub fn new(links: impl IntoIterator<Item = (usize, usize)>, direction: Direction) -> Self {
        Alignment {
            links: links.into_iter().collect(),
            direction,
        }
    }

    pub fn empty(direction: Direction) -> Self {
        Alignment {
            links: BTreeSet::new(),
            direction,
        }
    }

    /// Swaps the roles of the two sides.
    pub fn transposed(&self, direction: Direction) -> Self {
        Alignment::new(self.links.iter().map(|&(s, t)| (t, s)), direction)
    }

    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.links.contains(&(src, tgt))
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn in_bounds(&self, src_len: usize, tgt_len: usize) -> bool {
        self.links.iter().all(|&(s, t)| s < src_len && t < tgt_len)
    }
}
