use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{Alignment, Direction};
use crate::error::{Error, Result};
use crate::par;

/// Name of the empty source word in exports.
pub const NULL_TOKEN: &str = "<NULL>";

/// Probability assumed for pairs the table has never seen.
pub const PROB_FLOOR: f64 = 1e-12;

const NULL_ID: u32 = 0;
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Model1Config {
    pub iterations: usize,
    pub use_null: bool,
}

impl Default for Model1Config {
    fn default() -> Self {
        Model1Config {
            iterations: 5,
            use_null: true,
        }
    }
}

/// Lexical translation probabilities t(f|e), stored row-per-source-word.
/// Source id 0 is the empty word.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    src_vocab: Vec<String>,
    src_index: BTreeMap<String, u32>,
    tgt_vocab: Vec<String>,
    tgt_index: BTreeMap<String, u32>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<f64>,
    use_null: bool,
}

impl TranslationTable {
    fn row(&self, e: u32) -> core::ops::Range<usize> {
        self.row_start[e as usize]..self.row_start[e as usize + 1]
    }

    fn slot(&self, e: u32, f: u32) -> Option<usize> {
        let r = self.row(e);
        self.cols[r.clone()].binary_search(&f).ok().map(|k| r.start + k)
    }

    fn prob_ids(&self, e: u32, f: u32) -> f64 {
        self.slot(e, f).map_or(0.0, |k| self.probs[k])
    }

    /// t(f|e); 0 for unseen pairs. Pass [`NULL_TOKEN`] as `e` for the empty
    /// word.
    pub fn prob(&self, e: &str, f: &str) -> f64 {
        let e = if e == NULL_TOKEN {
            if !self.use_null {
                return 0.0;
            }
            NULL_ID
        } else {
            match self.src_index.get(e) {
                Some(&id) => id,
                None => return 0.0,
            }
        };
        match self.tgt_index.get(f) {
            Some(&f) => self.prob_ids(e, f),
            None => 0.0,
        }
    }

    pub fn uses_null(&self) -> bool {
        self.use_null
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Every (e, row) with its (f, t(f|e)) entries; the empty word first
    /// when enabled.
    pub fn rows(&self) -> impl Iterator<Item = (&str, Vec<(&str, f64)>)> {
        let first = if self.use_null { 0 } else { 1 };
        (first..self.src_vocab.len() as u32).map(move |e| {
            let r = self.row(e);
            let entries = self.cols[r.clone()]
                .iter()
                .zip(&self.probs[r])
                .map(|(&f, &p)| (self.tgt_vocab[f as usize].as_str(), p))
                .collect();
            (self.src_vocab[e as usize].as_str(), entries)
        })
    }

    fn src_id(&self, token: &str) -> Option<u32> {
        self.src_index.get(token).copied()
    }

    fn tgt_id(&self, token: &str) -> Option<u32> {
        self.tgt_index.get(token).copied()
    }
}

/// A trained table plus the corpus log-likelihood before the first
/// iteration and after each one (`iterations + 1` values).
#[derive(Debug, Clone)]
pub struct Model1Fit {
    pub table: TranslationTable,
    pub log_likelihood: Vec<f64>,
}

struct Interned {
    // source ids start with NULL_ID when the empty word is enabled
    src: Vec<u32>,
    tgt: Vec<u32>,
}

fn intern<'a>(
    tokens: impl Iterator<Item = &'a String>,
    vocab: &mut Vec<String>,
    index: &mut BTreeMap<String, u32>,
) -> Vec<u32> {
    tokens
        .map(|t| match index.get(t) {
            Some(&id) => id,
            None => {
                let id = vocab.len() as u32;
                vocab.push(t.clone());
                index.insert(t.clone(), id);
                id
            }
        })
        .collect()
}

/// Expected counts and log-likelihood contribution of one sentence.
fn e_step(table: &TranslationTable, s: &Interned) -> (Vec<(usize, f64)>, f64) {
    let mut contributions = Vec::with_capacity(s.src.len() * s.tgt.len());
    let mut ll = 0.0;
    let mut slots = Vec::with_capacity(s.src.len());
    for &f in &s.tgt {
        slots.clear();
        let mut denom = 0.0;
        for &e in &s.src {
            let k = table.slot(e, f).expect("co-occurring pair has a slot");
            denom += table.probs[k];
            slots.push(k);
        }
        ll += libm::log(denom);
        if denom > 0.0 {
            for &k in &slots {
                contributions.push((k, table.probs[k] / denom));
            }
        }
    }
    ll -= s.tgt.len() as f64 * libm::log(s.src.len() as f64);
    (contributions, ll)
}

/// Runs the E-step over the corpus. Returns the expected counts per slot
/// and the corpus log-likelihood. Contributions are added in sentence order
/// whatever the thread count.
fn expectation(table: &TranslationTable, sentences: &[Interned]) -> (Vec<f64>, f64) {
    let mut counts = alloc::vec![0.0; table.probs.len()];
    let mut ll = 0.0;
    for chunk in sentences.chunks(CHUNK) {
        for (contributions, sentence_ll) in par::map(chunk, |s| e_step(table, s)) {
            for (k, c) in contributions {
                counts[k] += c;
            }
            ll += sentence_ll;
        }
    }
    (counts, ll)
}

/// Trains IBM Model 1 t(f|e) on (source, target) token sequences.
///
/// Initialization is uniform over the target words co-occurring with each
/// source word.
pub fn train_model1<S: AsRef<[String]>, T: AsRef<[String]>>(
    corpus: &[(S, T)],
    config: &Model1Config,
) -> Result<Model1Fit> {
    if config.iterations < 1 {
        return Err(Error::ZeroIterations);
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut src_vocab = alloc::vec![String::from(NULL_TOKEN)];
    let mut src_index = BTreeMap::new();
    let mut tgt_vocab = Vec::new();
    let mut tgt_index = BTreeMap::new();
    let mut sentences = Vec::with_capacity(corpus.len());
    for (i, (s, t)) in corpus.iter().enumerate() {
        let (s, t) = (s.as_ref(), t.as_ref());
        if s.is_empty() || t.is_empty() {
            return Err(Error::EmptySentence(i));
        }
        let mut src = Vec::with_capacity(s.len() + 1);
        if config.use_null {
            src.push(NULL_ID);
        }
        src.extend(intern(s.iter(), &mut src_vocab, &mut src_index));
        let tgt = intern(t.iter(), &mut tgt_vocab, &mut tgt_index);
        sentences.push(Interned { src, tgt });
    }

    let mut cooc: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); src_vocab.len()];
    for s in &sentences {
        for &e in &s.src {
            cooc[e as usize].extend(s.tgt.iter().copied());
        }
    }
    let mut row_start = Vec::with_capacity(src_vocab.len() + 1);
    let mut cols = Vec::new();
    let mut probs = Vec::new();
    row_start.push(0);
    for row in &cooc {
        let uniform = if row.is_empty() { 0.0 } else { 1.0 / row.len() as f64 };
        cols.extend(row.iter().copied());
        probs.extend(core::iter::repeat_n(uniform, row.len()));
        row_start.push(cols.len());
    }
    drop(cooc);

    let mut table = TranslationTable {
        src_vocab,
        src_index,
        tgt_vocab,
        tgt_index,
        row_start,
        cols,
        probs,
        use_null: config.use_null,
    };

    let mut log_likelihood = Vec::with_capacity(config.iterations + 1);
    for _ in 0..config.iterations {
        let (counts, ll) = expectation(&table, &sentences);
        log_likelihood.push(ll);
        for e in 0..table.src_vocab.len() as u32 {
            let r = table.row(e);
            let total: f64 = counts[r.clone()].iter().sum();
            if total > 0.0 {
                for k in r {
                    table.probs[k] = counts[k] / total;
                }
            }
        }
    }
    let (_, ll) = expectation(&table, &sentences);
    log_likelihood.push(ll);
    log::debug!("model1 log-likelihood trace: {:?}", log_likelihood);

    Ok(Model1Fit { table, log_likelihood })
}

/// Links each target token to its most probable source token, or to the
/// empty word (dropped from the output) when `use_null` is set. Unseen pairs
/// score [`PROB_FLOOR`]. Ties go to the lowest source index, the empty word
/// counting as index -1.
pub fn viterbi_align(src: &[String], tgt: &[String], table: &TranslationTable, use_null: bool) -> Alignment {
    let use_null = use_null && table.use_null;
    let src_ids: Vec<Option<u32>> = src.iter().map(|e| table.src_id(e)).collect();
    let mut links = BTreeSet::new();
    for (j, f) in tgt.iter().enumerate() {
        let f = table.tgt_id(f);
        let score = |e: Option<u32>| match (e, f) {
            (Some(e), Some(f)) => table.prob_ids(e, f).max(PROB_FLOOR),
            _ => PROB_FLOOR,
        };
        let mut best: Option<usize> = None;
        let mut best_p = if use_null {
            score(Some(NULL_ID))
        } else {
            f64::NEG_INFINITY
        };
        for (i, &e) in src_ids.iter().enumerate() {
            let p = score(e);
            if p > best_p {
                best_p = p;
                best = Some(i);
            }
        }
        if let Some(i) = best {
            links.insert((i, j));
        }
    }
    Alignment {
        links,
        direction: Direction::Forward,
    }
}

/// Viterbi-aligns every pair; output follows input order.
pub fn align_corpus<S, T>(
    corpus: &[(S, T)],
    table: &TranslationTable,
    use_null: bool,
    direction: Direction,
) -> Vec<Alignment>
where
    S: AsRef<[String]> + Sync,
    T: AsRef<[String]> + Sync,
{
    par::map(corpus, |(s, t)| {
        let mut a = viterbi_align(s.as_ref(), t.as_ref(), table, use_null);
        a.direction = direction;
        a
    })
}
