//! Seeded synthetic fixture with planted connective translations.
//!
//! Content words translate one-to-one (with an occasional adjacent swap on
//! the target side). Source connectives are tagged through a stand-off
//! annotation file; each is rendered on the target side by a planted
//! connective. Some target connectives also occur without any source
//! counterpart, which fixes their corpus frequency and hence the planted
//! probabilities:
//!
//! | source | relation | target | aligned | target-only | expected prob |
//! |---|---|---|---|---|---|
//! | zonk | REL_A | blik tak | 90 | 10 | 0.9 |
//! | zonk | REL_A | mur | 10 | | 0.1 |
//! | dorp vang | REL_C | mur | 50 | 40 | 0.5 |
//! | plim | REL_B | sel ven | 70 | 30 | 0.7 |
//! | quell | REL_D | gorp | 25 | rest of `gorp_count` | 25 / `gorp_count` |
//!
//! The gold lexicon lists (blik tak, GOLD_A) and (sel ven, GOLD_B), with
//! REL_A and REL_B mapped onto them.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub pairs: usize,
    pub seed: u64,
    pub min_freq: u64,
    /// Total target occurrences of `gorp`; the threshold probe.
    pub gorp_count: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            pairs: 2000,
            seed: 7,
            min_freq: 50,
            gorp_count: 50,
        }
    }
}

const VOCAB_SIZE: usize = 150;
const GORP_ALIGNED: u64 = 25;

const SOURCE_INVENTORY: &str = "# synthetic source connectives\nzonk\ndorp vang\nplim\nquell\nwibble\n";
const TARGET_INVENTORY: &str = "# synthetic target connectives\nblik tak\nmur\nsel ven\ngorp\nsnerk\n";
const RELATIONS: &str = "REL_A\nREL_B\nREL_C\nREL_D\n";
const GOLD: &str = "blik tak\tGOLD_A\nsel ven\tGOLD_B\n";
const RELATION_MAP: &str = "REL_A\tGOLD_A\nREL_B\tGOLD_B\n";

#[derive(Debug, Clone, Copy)]
enum Kind {
    Plain,
    /// Source connective, relation, target connective.
    Both(&'static str, &'static str, &'static str),
    TargetOnly(&'static str),
}

pub struct Fixture {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub annotations: Vec<String>,
}

fn word(rng: &mut ChaCha8Rng, consonants: &[u8], syllables: usize) -> String {
    const VOWELS: &[u8] = b"aeiou";
    (0..syllables)
        .flat_map(|_| {
            let c = consonants[rng.random_range(0..consonants.len())];
            let v = VOWELS[rng.random_range(0..VOWELS.len())];
            [c as char, v as char]
        })
        .collect()
}

fn vocabulary(rng: &mut ChaCha8Rng, consonants: &[u8], syllables: usize) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(VOCAB_SIZE);
    while out.len() < VOCAB_SIZE {
        let w = word(rng, consonants, syllables);
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

pub fn generate(spec: &SynthSpec) -> Result<Fixture> {
    if spec.gorp_count < GORP_ALIGNED {
        return Err(Error::Config(format!("gorp count must be at least {GORP_ALIGNED}")));
    }
    let mut kinds = Vec::new();
    let mut push = |n: u64, kind: Kind| kinds.extend((0..n).map(|_| kind));
    push(90, Kind::Both("zonk", "REL_A", "blik tak"));
    push(10, Kind::Both("zonk", "REL_A", "mur"));
    push(50, Kind::Both("dorp vang", "REL_C", "mur"));
    push(70, Kind::Both("plim", "REL_B", "sel ven"));
    push(GORP_ALIGNED, Kind::Both("quell", "REL_D", "gorp"));
    push(10, Kind::TargetOnly("blik tak"));
    push(40, Kind::TargetOnly("mur"));
    push(30, Kind::TargetOnly("sel ven"));
    push(spec.gorp_count - GORP_ALIGNED, Kind::TargetOnly("gorp"));
    if kinds.len() > spec.pairs {
        return Err(Error::Config(format!(
            "a fixture with these counts needs at least {} pairs",
            kinds.len()
        )));
    }
    kinds.resize(spec.pairs, Kind::Plain);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    kinds.shuffle(&mut rng);
    let src_vocab = vocabulary(&mut rng, b"bdfgklmnprst", 2);
    let tgt_vocab = vocabulary(&mut rng, b"chjvwxyz", 3);

    let mut fixture = Fixture {
        source: Vec::with_capacity(spec.pairs),
        target: Vec::with_capacity(spec.pairs),
        annotations: Vec::new(),
    };
    for (sid, kind) in kinds.into_iter().enumerate() {
        let len = rng.random_range(4..=9);
        let content: Vec<usize> = (0..len).map(|_| rng.random_range(0..VOCAB_SIZE)).collect();
        let mut src: Vec<&str> = content.iter().map(|&i| src_vocab[i].as_str()).collect();
        let mut tgt: Vec<&str> = content.iter().map(|&i| tgt_vocab[i].as_str()).collect();
        for i in 0..tgt.len().saturating_sub(1) {
            if rng.random_bool(0.1) {
                tgt.swap(i, i + 1);
            }
        }
        let at = rng.random_range(0..=len);
        match kind {
            Kind::Plain => {}
            Kind::Both(s, rel, t) => {
                let s_tokens: Vec<&str> = s.split(' ').collect();
                fixture
                    .annotations
                    .push(format!("{sid}\t{at}\t{}\t{s}\t{rel}\t1", at + s_tokens.len() - 1));
                src.splice(at..at, s_tokens);
                tgt.splice(at..at, t.split(' '));
            }
            Kind::TargetOnly(t) => {
                tgt.splice(at..at, t.split(' '));
            }
        }
        fixture.source.push(format!("{} .", src.join(" ")));
        fixture.target.push(format!("{} .", tgt.join(" ")));
    }
    Ok(fixture)
}

/// Writes the corpus, inventories, gold files and a ready-to-run
/// `config.conf` into `dir`. Returns the config path.
pub fn write_fixture(dir: &Path, spec: &SynthSpec) -> Result<PathBuf> {
    let fixture = generate(spec)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let lines = |v: &[String]| v.iter().map(|l| format!("{l}\n")).collect::<String>();
    let config = format!(
        "# synthetic fixture, seed {seed}\n\
         corpus.source = corpus.en\n\
         corpus.target = corpus.fr\n\
         inventory.source = source-connectives.txt\n\
         inventory.target = target-connectives.txt\n\
         inventory.relations = relations.tsv\n\
         tagging.annotations = annotations.tsv\n\
         eval.gold = gold.tsv\n\
         eval.relation_map = relation-map.tsv\n\
         lexicon.min_freq = {min_freq}\n\
         evidence.connective = blik tak\n\
         evidence.relation = REL_A\n\
         seed = {seed}\n\
         output = out\n",
        seed = spec.seed,
        min_freq = spec.min_freq,
    );
    let files: [(&str, String); 9] = [
        ("corpus.en", lines(&fixture.source)),
        ("corpus.fr", lines(&fixture.target)),
        ("annotations.tsv", lines(&fixture.annotations)),
        ("source-connectives.txt", SOURCE_INVENTORY.into()),
        ("target-connectives.txt", TARGET_INVENTORY.into()),
        ("relations.tsv", RELATIONS.into()),
        ("gold.tsv", GOLD.into()),
        ("relation-map.tsv", RELATION_MAP.into()),
        ("config.conf", config),
    ];
    for (name, contents) in files {
        write_atomic(&dir.join(name), contents.as_bytes())?;
    }
    Ok(dir.join("config.conf"))
}
