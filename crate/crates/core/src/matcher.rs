//! Contiguous, longest-match-first, non-overlapping connective matching.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::inventory::Connective;

/// One match: `len` tokens starting at `start`, of inventory entry `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub start: usize,
    pub len: usize,
    pub index: usize,
}

impl Match {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

#[derive(Debug, Clone)]
pub struct ConnectiveMatcher {
    connectives: Vec<Connective>,
    // first token -> candidate indices, longest first, then inventory order
    by_first: BTreeMap<String, Vec<usize>>,
}

fn eq_lowercase(token: &str, lowered: &str) -> bool {
    if token == lowered {
        return true;
    }
    token.chars().flat_map(char::to_lowercase).eq(lowered.chars())
}

impl ConnectiveMatcher {
    pub fn new(inventory: &[Connective]) -> Self {
        let mut by_first: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, c) in inventory.iter().enumerate() {
            by_first.entry(c.surface[0].clone()).or_default().push(i);
        }
        for candidates in by_first.values_mut() {
            candidates.sort_by(|&a, &b| inventory[b].len().cmp(&inventory[a].len()).then(a.cmp(&b)));
        }
        ConnectiveMatcher {
            connectives: inventory.to_vec(),
            by_first,
        }
    }

    pub fn connectives(&self) -> &[Connective] {
        &self.connectives
    }

    /// Scans left to right; at each position the longest matching entry wins
    /// and the scan resumes after it.
    pub fn find_all<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Match> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.match_at(tokens, i) {
                Some(m) => {
                    i = m.end();
                    out.push(m);
                }
                None => i += 1,
            }
        }
        out
    }

    fn match_at<S: AsRef<str>>(&self, tokens: &[S], start: usize) -> Option<Match> {
        let first = tokens[start].as_ref();
        let candidates = match self.by_first.get(first) {
            Some(c) => c,
            None => {
                let lowered: String = first.chars().flat_map(char::to_lowercase).collect();
                self.by_first.get(&lowered)?
            }
        };
        candidates.iter().find_map(|&index| {
            let surface = &self.connectives[index].surface;
            let end = start + surface.len();
            if end > tokens.len() {
                return None;
            }
            let hit = tokens[start..end]
                .iter()
                .zip(surface)
                .all(|(t, s)| eq_lowercase(t.as_ref(), s));
            hit.then_some(Match {
                start,
                len: surface.len(),
                index,
            })
        })
    }
}
