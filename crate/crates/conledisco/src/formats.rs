//! Text formats of every pipeline artifact.
//!
//! Parsers take the file contents plus the path used in error messages;
//! writers return the full file contents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use conledisco_core::corpus::FrequencyTable;
use conledisco_core::eval::EvalReport;
use conledisco_core::inventory::dedup_connectives;
use conledisco_core::{
    Alignment, Connective, DCAlignmentRecord, DCAnnotation, Direction, Excerpt, GoldLexicon, Language, LexiconEntry,
    PhraseTableEntry, RankedLexicon, RelationInventory, RelationLabel, RelationMap, TranslationTable,
};
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn label_at(path: &Path, line: usize, s: &str) -> Result<RelationLabel> {
    RelationLabel::new(s.trim()).map_err(|e| Error::format(path, line, e.to_string()))
}

fn split_tab<'a>(path: &Path, line: usize, l: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = l.split('\t').collect();
    if fields.len() != n {
        return Err(Error::format(
            path,
            line,
            format!("expected {n} tab-separated fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_num<T: std::str::FromStr>(path: &Path, line: usize, what: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::format(path, line, format!("invalid {what} `{s}`")))
}

// ---------------------------------------------------------------- inventories

/// One surface form per line, optionally followed by a tab and a
/// comma-separated list of allowed relations. Duplicates (after
/// lowercasing) are dropped with a warning.
pub fn parse_connectives(text: &str, language: Language, path: &Path) -> Result<Vec<Connective>> {
    let mut list = Vec::new();
    for (line, l) in content_lines(text) {
        let (surface, relations) = match l.split_once('\t') {
            Some((s, r)) => (s, Some(r)),
            None => (l, None),
        };
        let mut c = Connective::new(surface, language).map_err(|e| Error::format(path, line, e.to_string()))?;
        if let Some(relations) = relations.filter(|r| !r.trim().is_empty()) {
            let set = relations
                .split(',')
                .map(|r| label_at(path, line, r))
                .collect::<Result<BTreeSet<_>>>()?;
            c = c.with_allowed_relations(set);
        }
        list.push(c);
    }
    if list.is_empty() {
        return Err(Error::Core {
            path: path.to_path_buf(),
            source: conledisco_core::Error::EmptyInventory,
        });
    }
    let (kept, dropped) = dedup_connectives(list);
    for form in dropped {
        log::warn!("{}: duplicate connective `{form}` dropped", path.display());
    }
    Ok(kept)
}

pub fn parse_relation_inventory(text: &str, path: &Path) -> Result<RelationInventory> {
    let labels = content_lines(text)
        .map(|(line, l)| label_at(path, line, l.split('\t').next().unwrap_or(l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationInventory::new(labels))
}

pub fn parse_relation_map(text: &str, path: &Path) -> Result<RelationMap> {
    let mut map = RelationMap::new();
    for (line, l) in content_lines(text) {
        let f = split_tab(path, line, l, 2)?;
        let induced = label_at(path, line, f[0])?;
        let gold = label_at(path, line, f[1])?;
        map.insert(induced.clone(), gold)
            .map_err(|existing| Error::format(path, line, format!("`{induced}` is already mapped to `{existing}`")))?;
    }
    Ok(map)
}

/// `surface<TAB>relation` pairs. With `inventory`, labels outside it are
/// rejected.
pub fn parse_gold_lexicon(text: &str, inventory: Option<&RelationInventory>, path: &Path) -> Result<GoldLexicon> {
    let mut gold = GoldLexicon::new();
    for (line, l) in content_lines(text) {
        let f = split_tab(path, line, l, 2)?;
        let form = normalize_form(f[0]);
        let relation = label_at(path, line, f[1])?;
        if let Some(inventory) = inventory {
            if !inventory.contains(&relation) {
                return Err(Error::Core {
                    path: path.to_path_buf(),
                    source: conledisco_core::Error::UnknownRelation {
                        line,
                        label: relation.to_string(),
                    },
                });
            }
        }
        gold.insert(form, relation);
    }
    Ok(gold)
}

/// Default sense per source connective, `surface<TAB>relation`.
pub fn parse_senses(text: &str, relations: &RelationInventory, path: &Path) -> Result<BTreeMap<String, RelationLabel>> {
    let mut senses = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let f = split_tab(path, line, l, 2)?;
        let relation = label_at(path, line, f[1])?;
        if !relations.contains(&relation) {
            return Err(Error::Core {
                path: path.to_path_buf(),
                source: conledisco_core::Error::UnknownRelation {
                    line,
                    label: relation.to_string(),
                },
            });
        }
        senses.insert(normalize_form(f[0]), relation);
    }
    Ok(senses)
}

fn normalize_form(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

// ---------------------------------------------------------------- annotations

/// `sentence_id<TAB>start<TAB>end<TAB>surface<TAB>relation<TAB>usage`, one
/// record per line. Returns records in file order; validation against the
/// corpus happens separately.
pub fn parse_annotations(text: &str, path: &Path) -> Result<Vec<DCAnnotation>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let f = split_tab(path, line, l, 6)?;
        let usage = match f[5].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(Error::format(path, line, format!("invalid usage `{other}`"))),
        };
        let relation = match (usage, f[4].trim()) {
            (true, "") => return Err(Error::format(path, line, "usage 1 requires a relation")),
            (true, r) => Some(label_at(path, line, r)?),
            (false, "") => None,
            (false, _) => return Err(Error::format(path, line, "usage 0 must have an empty relation")),
        };
        out.push(DCAnnotation {
            sentence_id: parse_num(path, line, "sentence id", f[0])?,
            start: parse_num(path, line, "start", f[1])?,
            end: parse_num(path, line, "end", f[2])?,
            surface: f[3].split_whitespace().map(String::from).collect(),
            relation,
            discourse_usage: usage,
        });
    }
    Ok(out)
}

pub fn write_annotations(annotations: &[DCAnnotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        let relation = a.relation.as_ref().map(RelationLabel::as_str).unwrap_or("");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            a.sentence_id,
            a.start,
            a.end,
            a.surface.join(" "),
            relation,
            a.discourse_usage as u8
        );
    }
    out
}

// ---------------------------------------------------------------- corpus

pub fn write_token_lines<'a>(lines: impl IntoIterator<Item = &'a [String]>) -> String {
    let mut out = String::new();
    for tokens in lines {
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_token_lines(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect()
}

pub fn write_frequency_table(table: &FrequencyTable) -> String {
    let mut out = String::new();
    for (form, count) in table.sorted() {
        let _ = writeln!(out, "{form}\t{count}");
    }
    out
}

pub fn parse_frequency_table(text: &str, path: &Path) -> Result<FrequencyTable> {
    let mut table = FrequencyTable::new();
    for (line, l) in content_lines(text) {
        let f = split_tab(path, line, l, 2)?;
        table.add(f[0], parse_num(path, line, "count", f[1])?);
    }
    Ok(table)
}

// ---------------------------------------------------------------- alignment

/// `e<TAB>f<TAB>prob`, by source word then descending probability.
pub fn write_translation_table(table: &TranslationTable) -> String {
    let mut rows: Vec<(&str, Vec<(&str, f64)>)> = table.rows().collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    let mut out = String::new();
    for (e, mut entries) in rows {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        for (f, p) in entries {
            let _ = writeln!(out, "{e}\t{f}\t{p}");
        }
    }
    out
}

/// Pharaoh format: `i-j` pairs separated by spaces, one line per sentence.
pub fn write_alignments(alignments: &[Alignment]) -> String {
    let mut out = String::new();
    for a in alignments {
        let line: Vec<String> = a.links.iter().map(|(s, t)| format!("{s}-{t}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_alignments(text: &str, direction: Direction, path: &Path) -> Result<Vec<Alignment>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            let links = l
                .split_whitespace()
                .map(|pair| {
                    let (s, t) = pair
                        .split_once('-')
                        .ok_or_else(|| Error::format(path, i + 1, format!("invalid link `{pair}`")))?;
                    Ok((parse_num(path, i + 1, "index", s)?, parse_num(path, i + 1, "index", t)?))
                })
                .collect::<Result<Vec<(usize, usize)>>>()?;
            Ok(Alignment::new(links, direction))
        })
        .collect()
}

// ---------------------------------------------------------------- phrases

pub fn write_phrase_table(table: &[PhraseTableEntry]) -> String {
    let mut rows: Vec<(String, String, u64)> = table
        .iter()
        .map(|e| (e.src.join(" "), e.tgt.join(" "), e.count))
        .collect();
    rows.sort();
    let mut out = String::new();
    for (s, t, c) in rows {
        let _ = writeln!(out, "{s} ||| {t} ||| {c}");
    }
    out
}

pub fn parse_phrase_table(text: &str, path: &Path) -> Result<Vec<PhraseTableEntry>> {
    content_lines(text)
        .map(|(line, l)| {
            let f: Vec<&str> = l.split(" ||| ").collect();
            if f.len() != 3 {
                return Err(Error::format(path, line, "expected `src ||| tgt ||| count`"));
            }
            Ok(PhraseTableEntry {
                src: f[0].split_whitespace().map(String::from).collect(),
                tgt: f[1].split_whitespace().map(String::from).collect(),
                count: parse_num(path, line, "count", f[2])?,
            })
        })
        .collect()
}

pub fn write_dc_records(records: &[DCAlignmentRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", r.fr_dc, r.en_dc, r.relation, r.count);
    }
    out
}

pub fn parse_dc_records(text: &str, path: &Path) -> Result<Vec<DCAlignmentRecord>> {
    content_lines(text)
        .map(|(line, l)| {
            let f = split_tab(path, line, l, 4)?;
            Ok(DCAlignmentRecord {
                fr_dc: f[0].to_owned(),
                en_dc: f[1].to_owned(),
                relation: label_at(path, line, f[2])?,
                count: parse_num(path, line, "count", f[3])?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------- lexicon

pub fn write_lexicon(lexicon: &RankedLexicon) -> String {
    let mut out = String::new();
    for e in lexicon.entries() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.fr_dc,
            e.relation,
            e.prob_decimal(6),
            e.aligned_count,
            e.corpus_freq
        );
    }
    out
}

/// Reads a lexicon export and re-sorts it; the probability column is
/// checked against the counts.
pub fn parse_lexicon(text: &str, path: &Path) -> Result<RankedLexicon> {
    let mut entries = Vec::new();
    for (line, l) in content_lines(text) {
        let f = split_tab(path, line, l, 5)?;
        let entry = LexiconEntry {
            fr_dc: f[0].to_owned(),
            relation: label_at(path, line, f[1])?,
            aligned_count: parse_num(path, line, "aligned count", f[3])?,
            corpus_freq: parse_num(path, line, "corpus frequency", f[4])?,
        };
        if entry.corpus_freq == 0 || entry.prob_decimal(6) != f[2].trim() {
            return Err(Error::format(path, line, "probability does not match counts"));
        }
        entries.push(entry);
    }
    RankedLexicon::from_entries(entries)
        .map_err(|(f, r)| Error::format(path, 0, format!("duplicate entry `{f}` / `{r}`")))
}

// ---------------------------------------------------------------- reports

/// Exact half-up decimal rendering of a ratio.
pub fn fmt_ratio(r: &Ratio<u64>, places: u32) -> String {
    let scale = 10u128.pow(places);
    let (n, d) = (*r.numer() as u128, *r.denom() as u128);
    let scaled = (n * scale * 2 + d) / (2 * d);
    format!("{}.{:0width$}", scaled / scale, scaled % scale, width = places as usize)
}

fn fmt_big_ratio(r: &num_rational::BigRational, places: u32) -> String {
    use num_bigint::BigInt;
    let scale = BigInt::from(10u32).pow(places);
    let two = BigInt::from(2u32);
    let scaled = (r.numer() * &scale * &two + r.denom()) / (r.denom() * &two);
    let int = &scaled / &scale;
    let frac = &scaled % &scale;
    format!(
        "{int}.{frac:0>width$}",
        frac = frac.to_string(),
        width = places as usize
    )
}

pub fn write_eval_report(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str("# curve11\trecall\tprecision\n");
    for (level, p) in report.curve11.iter().enumerate() {
        let _ = writeln!(out, "{}.{}\t{}", level / 10, level % 10, fmt_ratio(p, 6));
    }
    out.push_str("# avep\n");
    let _ = writeln!(out, "{}", fmt_big_ratio(&report.avep, 6));
    out.push_str("# recall\n");
    let _ = writeln!(out, "pairs\t{}", fmt_ratio(&report.recall_final, 6));
    let _ = writeln!(out, "connectives\t{}", fmt_ratio(&report.dc_recall, 6));
    out.push_str("# counts\n");
    let _ = writeln!(out, "retrieved_relevant\t{}", report.retrieved_relevant);
    let _ = writeln!(out, "total_relevant\t{}", report.total_relevant);
    let _ = writeln!(out, "retrieved_connectives\t{}", report.dc_retrieved);
    let _ = writeln!(out, "total_connectives\t{}", report.dc_total);
    let _ = writeln!(out, "ranked_items\t{}", report.pr_points.len());
    out
}

pub fn write_pr_points(report: &EvalReport) -> String {
    let mut out = String::from("rank\trecall\tprecision\n");
    for (k, (r, p)) in report.pr_points.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}", k + 1, fmt_ratio(r, 6), fmt_ratio(p, 6));
    }
    out
}

/// Reads the headline numbers back from an eval report: (AveP, pair recall).
pub fn parse_eval_summary(text: &str) -> Option<(f64, f64)> {
    let mut lines = text.lines();
    let mut avep = None;
    let mut recall = None;
    while let Some(l) = lines.next() {
        match l {
            "# avep" => avep = lines.next().and_then(|v| v.parse().ok()),
            "# recall" => {
                recall = lines
                    .next()
                    .and_then(|v| v.strip_prefix("pairs\t"))
                    .and_then(|v| v.parse().ok())
            }
            _ => {}
        }
    }
    Some((avep?, recall?))
}

pub fn write_evidence(blocks: &[(String, RelationLabel, Vec<Excerpt>)]) -> String {
    let mut out = String::new();
    for (fr_dc, relation, excerpts) in blocks {
        let _ = writeln!(out, "# {fr_dc}\t{relation}\t{} excerpts", excerpts.len());
        for e in excerpts {
            let _ = writeln!(out, "[sentence {}]", e.sentence_id);
            let _ = writeln!(out, "FR: {}", e.fr);
            let _ = writeln!(out, "EN: {}", e.en);
            out.push('\n');
        }
    }
    out
}

/// Distribution of target connectives by corpus frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyDistribution {
    pub zero: usize,
    pub below: usize,
    pub at_or_above: usize,
    pub min_freq: u64,
}

impl FrequencyDistribution {
    pub fn of(table: &FrequencyTable, inventory: &[Connective], min_freq: u64) -> Self {
        let mut d = FrequencyDistribution {
            zero: 0,
            below: 0,
            at_or_above: 0,
            min_freq,
        };
        for c in inventory {
            match table.get(&c.form()) {
                0 => d.zero += 1,
                n if n < min_freq => d.below += 1,
                _ => d.at_or_above += 1,
            }
        }
        d
    }

    pub fn total(&self) -> usize {
        self.zero + self.below + self.at_or_above
    }
}

pub fn write_table1(d: &FrequencyDistribution) -> String {
    format!(
        "freq\t=0\t<{m}\t>={m}\ttotal\n# DC\t{}\t{}\t{}\t{}\n",
        d.zero,
        d.below,
        d.at_or_above,
        d.total(),
        m = d.min_freq
    )
}
