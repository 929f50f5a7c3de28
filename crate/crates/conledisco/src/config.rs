//! Pipeline configuration: a line-oriented `key = value` file.
//!
//! Relative paths resolve against the directory holding the config file.
//! Unknown keys are rejected with the closest known key as a suggestion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use conledisco_core::{Heuristic, Model1Config};

use crate::error::{Error, Result};

/// Every recognised key with its default, `None` meaning no default.
const KEYS: &[(&str, Option<&str>)] = &[
    ("corpus.source", None),
    ("corpus.target", None),
    ("corpus.lowercase", Some("true")),
    ("corpus.limit", None),
    ("inventory.source", None),
    ("inventory.target", None),
    ("inventory.relations", None),
    ("tagging.annotations", None),
    ("tagging.senses", None),
    ("model1.iterations", Some("5")),
    ("model1.use_null", Some("true")),
    ("symmetrize.heuristic", Some("grow-diag-final")),
    ("phrases.max_len", Some("7")),
    ("lexicon.min_freq", Some("50")),
    ("eval.gold", None),
    ("eval.gold_relations", None),
    ("eval.relation_map", None),
    ("evidence.k", Some("5")),
    ("evidence.connective", None),
    ("evidence.relation", None),
    ("evidence.min_prob", Some("0.01")),
    ("seed", Some("0")),
    ("output", Some("out")),
];

const REQUIRED: &[&str] = &["corpus.source", "corpus.target", "inventory.source", "inventory.target"];

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_source: PathBuf,
    pub corpus_target: PathBuf,
    pub lowercase: bool,
    pub limit: Option<usize>,
    pub source_inventory: PathBuf,
    pub target_inventory: PathBuf,
    /// Induced-side relation inventory; the packaged sense list when unset.
    pub relations: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub senses: Option<PathBuf>,
    pub model1: Model1Config,
    pub heuristic: Heuristic,
    pub max_phrase_len: usize,
    pub min_freq: u64,
    pub gold: Option<PathBuf>,
    pub gold_relations: Option<PathBuf>,
    /// Induced-to-gold relation map; the two-pair default when unset.
    pub relation_map: Option<PathBuf>,
    pub evidence_k: usize,
    pub evidence_connective: Option<String>,
    pub evidence_relation: Option<String>,
    pub evidence_min_prob: f64,
    pub seed: u64,
    pub output: PathBuf,
    /// Effective key/value pairs after defaults and command-line overrides.
    pub snapshot: BTreeMap<String, String>,
    pub base: PathBuf,
}

fn suggestion(key: &str) -> Option<String> {
    let mut candidates: Vec<&str> = KEYS.iter().map(|(k, _)| *k).collect();
    let namespaces: Vec<&str> = KEYS
        .iter()
        .filter_map(|(k, _)| k.split_once('.').map(|(n, _)| n))
        .collect();
    candidates.extend(namespaces);
    let (best, score) = candidates
        .iter()
        .map(|c| {
            let head = key.split('.').next().unwrap_or(key);
            let s = strsim::jaro_winkler(key, c).max(if c.contains('.') {
                0.0
            } else {
                strsim::jaro_winkler(head, c)
            });
            (*c, s)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    (score >= 0.8).then(|| best.to_owned())
}

/// Parses raw `key = value` text into a map, rejecting unknown and
/// repeated keys.
pub fn parse_pairs(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.iter().any(|(k, _)| *k == key) {
            let hint = suggestion(key)
                .map(|s| format!(" (did you mean `{s}`?)"))
                .unwrap_or_default();
            return Err(Error::Config(format!(
                "{}:{}: unknown key `{key}`{hint}",
                path.display(),
                i + 1
            )));
        }
        if pairs.insert(key.to_owned(), value.to_owned()).is_some() {
            return Err(Error::Config(format!(
                "{}:{}: key `{key}` given twice",
                path.display(),
                i + 1
            )));
        }
    }
    Ok(pairs)
}

fn bad(key: &str, value: &str, expected: &str) -> Error {
    Error::Config(format!("invalid value `{value}` for `{key}`: expected {expected}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v, "true or false")),
    }
}

fn parse_int<T: std::str::FromStr + PartialOrd>(key: &str, v: &str, min: T, expected: &str) -> Result<T> {
    match v.parse::<T>() {
        Ok(n) if n >= min => Ok(n),
        _ => Err(bad(key, v, expected)),
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_text(&text, path)
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let pairs = parse_pairs(text, path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_pairs(pairs, &base)
    }

    /// Applies defaults and range checks; relative paths join `base`.
    pub fn from_pairs(mut pairs: BTreeMap<String, String>, base: &Path) -> Result<Self> {
        for key in REQUIRED {
            if !pairs.contains_key(*key) {
                return Err(Error::Config(format!("missing required key `{key}`")));
            }
        }
        for (key, default) in KEYS {
            if let Some(d) = default {
                pairs.entry((*key).to_owned()).or_insert_with(|| (*d).to_owned());
            }
        }
        let get = |k: &str| pairs.get(k).map(String::as_str);
        let path_of = |k: &str| get(k).filter(|v| !v.is_empty()).map(|v| base.join(v));
        let required = |k: &str| path_of(k).ok_or_else(|| Error::Config(format!("`{k}` must not be empty")));

        let iterations = parse_int(
            "model1.iterations",
            get("model1.iterations").unwrap(),
            1usize,
            "an integer >= 1",
        )?;
        let max_phrase_len = parse_int(
            "phrases.max_len",
            get("phrases.max_len").unwrap(),
            1usize,
            "an integer >= 1",
        )?;
        let min_freq = parse_int(
            "lexicon.min_freq",
            get("lexicon.min_freq").unwrap(),
            0u64,
            "an integer >= 0",
        )?;
        let evidence_k = parse_int("evidence.k", get("evidence.k").unwrap(), 0usize, "an integer >= 0")?;
        let seed = parse_int("seed", get("seed").unwrap(), 0u64, "an integer >= 0")?;
        let limit = get("corpus.limit")
            .filter(|v| !v.is_empty())
            .map(|v| parse_int("corpus.limit", v, 1usize, "an integer >= 1"))
            .transpose()?;
        let heuristic = get("symmetrize.heuristic").unwrap().parse::<Heuristic>().map_err(|_| {
            bad(
                "symmetrize.heuristic",
                get("symmetrize.heuristic").unwrap(),
                "intersection, union or grow-diag-final",
            )
        })?;
        let min_prob_raw = get("evidence.min_prob").unwrap();
        let evidence_min_prob = match min_prob_raw.parse::<f64>() {
            Ok(p) if (0.0..=1.0).contains(&p) => p,
            _ => return Err(bad("evidence.min_prob", min_prob_raw, "a number in [0, 1]")),
        };
        let relation = get("evidence.relation").filter(|v| !v.is_empty()).map(String::from);
        let connective = get("evidence.connective").filter(|v| !v.is_empty()).map(String::from);
        if relation.is_some() != connective.is_some() {
            return Err(Error::Config(
                "`evidence.connective` and `evidence.relation` must be given together".into(),
            ));
        }

        Ok(PipelineConfig {
            corpus_source: required("corpus.source")?,
            corpus_target: required("corpus.target")?,
            lowercase: parse_bool("corpus.lowercase", get("corpus.lowercase").unwrap())?,
            limit,
            source_inventory: required("inventory.source")?,
            target_inventory: required("inventory.target")?,
            relations: path_of("inventory.relations"),
            annotations: path_of("tagging.annotations"),
            senses: path_of("tagging.senses"),
            model1: Model1Config {
                iterations,
                use_null: parse_bool("model1.use_null", get("model1.use_null").unwrap())?,
            },
            heuristic,
            max_phrase_len,
            min_freq,
            gold: path_of("eval.gold"),
            gold_relations: path_of("eval.gold_relations"),
            relation_map: path_of("eval.relation_map"),
            evidence_k,
            evidence_connective: connective,
            evidence_relation: relation,
            evidence_min_prob,
            seed,
            output: path_of("output").unwrap_or_else(|| base.join("out")),
            snapshot: pairs,
            base: base.to_path_buf(),
        })
    }

    /// Re-validates with command-line values layered over the file's.
    /// Relative override paths still resolve against the config directory,
    /// so callers pass absolute paths for anything taken from the shell.
    pub fn with_overrides(&self, overrides: &[(&str, String)]) -> Result<Self> {
        let mut pairs = self.snapshot.clone();
        for (k, v) in overrides {
            pairs.insert((*k).to_owned(), v.clone());
        }
        Self::from_pairs(pairs, &self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "corpus.source = a.fr\ncorpus.target = a.en\ninventory.source = s.txt\ninventory.target = t.txt\n";

    fn load(text: &str) -> Result<PipelineConfig> {
        PipelineConfig::from_text(text, Path::new("/tmp/cfg/run.conf"))
    }

    #[test]
    fn defaults_applied() {
        let c = load(MINIMAL).unwrap();
        assert_eq!(c.min_freq, 50);
        assert_eq!(
            c.model1,
            Model1Config {
                iterations: 5,
                use_null: true
            }
        );
        assert_eq!(c.heuristic, Heuristic::GrowDiagFinal);
        assert_eq!(c.max_phrase_len, 7);
        assert!(c.lowercase);
        assert_eq!(c.corpus_source, Path::new("/tmp/cfg/a.fr"));
        assert_eq!(c.output, Path::new("/tmp/cfg/out"));
        assert_eq!(c.limit, None);
    }

    #[test]
    fn range_errors_name_the_key() {
        let err = load(&format!("{MINIMAL}model1.iterations = 0\n")).unwrap_err();
        assert!(err.to_string().contains("iterations"), "{err}");
        let err = load(&format!("{MINIMAL}phrases.max_len = 0\n")).unwrap_err();
        assert!(err.to_string().contains("phrases.max_len"), "{err}");
        let err = load(&format!("{MINIMAL}lexicon.min_freq = -1\n")).unwrap_err();
        assert!(err.to_string().contains("lexicon.min_freq"), "{err}");
        assert_eq!(load(&format!("{MINIMAL}lexicon.min_freq = 0\n")).unwrap().min_freq, 0);
    }

    #[test]
    fn unknown_keys_get_suggestions() {
        let err = load(&format!("{MINIMAL}modle1.iterations = 3\n")).unwrap_err();
        assert!(err.to_string().contains("model1"), "{err}");
        let err = load(&format!("{MINIMAL}modle1 = 3\n")).unwrap_err();
        assert!(err.to_string().contains("did you mean `model1`"), "{err}");
        let err = load(&format!("{MINIMAL}zzzz = 3\n")).unwrap_err();
        assert!(!err.to_string().contains("did you mean"), "{err}");
    }

    #[test]
    fn missing_and_repeated_keys() {
        assert!(load("corpus.source = a\n")
            .unwrap_err()
            .to_string()
            .contains("corpus.target"));
        assert!(load(&format!("{MINIMAL}seed = 1\nseed = 2\n")).is_err());
        assert!(load(&format!("{MINIMAL}evidence.relation = R\n")).is_err());
    }

    #[test]
    fn overrides_revalidate() {
        let c = load(MINIMAL).unwrap();
        let o = c
            .with_overrides(&[("seed", "9".into()), ("output", "/srv/elsewhere".into())])
            .unwrap();
        assert_eq!(o.seed, 9);
        assert_eq!(o.output, Path::new("/srv/elsewhere"));
        assert!(c.with_overrides(&[("corpus.limit", "0".into())]).is_err());
        assert_eq!(o.corpus_source, Path::new("/tmp/cfg/a.fr"));
    }
}
