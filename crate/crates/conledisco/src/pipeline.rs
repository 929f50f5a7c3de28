//! Stage runner. Each stage reads its inputs from the configured paths or
//! from earlier artifacts in the output directory and writes its own
//! artifacts there, then updates the run manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use conledisco_core::alignment::align_corpus;
use conledisco_core::tagging::{fuse_corpus, validate_annotations};
use conledisco_core::{
    build_lexicon, build_phrase_table, count_occurrences, evaluate, filter_dc_entries, heuristic_tag, restrict_gold,
    sample_evidence, symmetrize, train_model1, Alignment, Connective, ConnectiveMatcher, Corpus, DCAnnotation,
    Direction, GoldLexicon, Language, RankedLexicon, RelationInventory, RelationLabel, RelationMap, SentencePair, Side,
    TokenizerConfig,
};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::formats::{self, FrequencyDistribution};
use crate::io::{load_parallel_corpus, read_text, write_atomic};
use crate::manifest::{RunManifest, StageRecord};

/// Sense list used when `inventory.relations` is unset.
pub const DEFAULT_RELATIONS: &str = include_str!("../data/conll2016-senses.tsv");

pub mod artifact {
    pub const CORPUS_SRC: &str = "corpus.src";
    pub const CORPUS_TGT: &str = "corpus.tgt";
    pub const CORPUS_IDS: &str = "corpus.ids";
    pub const TARGET_FREQ: &str = "target.freq.tsv";
    pub const ANNOTATIONS: &str = "annotations.tsv";
    pub const FUSED_SRC: &str = "fused.src";
    pub const FORWARD_TTABLE: &str = "forward.ttable.tsv";
    pub const BACKWARD_TTABLE: &str = "backward.ttable.tsv";
    pub const FORWARD_ALIGN: &str = "forward.align";
    pub const BACKWARD_ALIGN: &str = "backward.align";
    pub const SYMMETRIZED_ALIGN: &str = "symmetrized.align";
    pub const PHRASE_TABLE: &str = "phrase-table.txt";
    pub const DC_RECORDS: &str = "dc-records.tsv";
    pub const LEXICON: &str = "lexicon.tsv";
    pub const EVAL_REPORT: &str = "eval-report.txt";
    pub const PR_POINTS: &str = "pr-points.tsv";
    pub const EVIDENCE: &str = "evidence.txt";
    pub const TABLE1: &str = "table1.tsv";
    pub const SUMMARY: &str = "summary.txt";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Tag,
    Align,
    Extract,
    Build,
    Eval,
    Evidence,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Tag,
        Stage::Align,
        Stage::Extract,
        Stage::Build,
        Stage::Eval,
        Stage::Evidence,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Tag => "tag",
            Stage::Align => "align",
            Stage::Extract => "extract",
            Stage::Build => "build",
            Stage::Eval => "eval",
            Stage::Evidence => "evidence",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

/// What a stage produced, for printing and for the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSummary {
    pub stage: Stage,
    pub rows: BTreeMap<String, u64>,
    pub artifacts: Vec<PathBuf>,
    /// Text the command line prints after the stage, if any.
    pub display: Option<String>,
}

pub struct Pipeline {
    config: PipelineConfig,
    /// `report` prints the frequency table instead of the run summary.
    pub print_table1: bool,
}

struct Output {
    rows: BTreeMap<String, u64>,
    written: Vec<PathBuf>,
    inputs: Vec<PathBuf>,
    display: Option<String>,
}

impl Output {
    fn new() -> Self {
        Output {
            rows: BTreeMap::new(),
            written: Vec::new(),
            inputs: Vec::new(),
            display: None,
        }
    }

    fn row(&mut self, name: &str, n: usize) {
        self.rows.insert(name.to_owned(), n as u64);
    }
}

fn core_at(path: &Path) -> impl FnOnce(conledisco_core::Error) -> Error + '_ {
    move |source| Error::Core {
        path: path.to_path_buf(),
        source,
    }
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Self {
        Pipeline {
            config,
            print_table1: false,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn output_dir(&self) -> &Path {
        &self.config.output
    }

    fn out(&self, name: &str) -> PathBuf {
        self.config.output.join(name)
    }

    /// Path of an artifact some earlier stage must have produced.
    fn need(&self, name: &str, stage: Stage) -> Result<PathBuf> {
        let path = self.out(name);
        if path.is_file() {
            Ok(path)
        } else {
            Err(Error::MissingArtifact {
                artifact: path,
                stage: stage.name(),
            })
        }
    }

    fn write(&self, out: &mut Output, name: &str, contents: &str) -> Result<()> {
        let path = self.out(name);
        write_atomic(&path, contents.as_bytes())?;
        out.written.push(path);
        Ok(())
    }

    /// Runs each stage in order.
    pub fn run_all(&self) -> Result<Vec<StageSummary>> {
        Stage::ALL.into_iter().map(|s| self.run(s)).collect()
    }

    pub fn run(&self, stage: Stage) -> Result<StageSummary> {
        std::fs::create_dir_all(&self.config.output).map_err(|e| Error::io(&self.config.output, e))?;
        let started = Instant::now();
        let mut out = Output::new();
        match stage {
            Stage::Ingest => self.ingest(&mut out)?,
            Stage::Tag => self.tag(&mut out)?,
            Stage::Align => self.align(&mut out)?,
            Stage::Extract => self.extract(&mut out)?,
            Stage::Build => self.build(&mut out)?,
            Stage::Eval => self.eval(&mut out)?,
            Stage::Evidence => self.evidence(&mut out)?,
            Stage::Report => self.report(&mut out)?,
        }
        let wall_ms = started.elapsed().as_millis() as u64;
        log::info!("{stage}: done in {wall_ms} ms");

        let mut manifest = RunManifest::load(&self.config.output)
            .filter(|m| m.config == self.config.snapshot)
            .unwrap_or_else(|| RunManifest::new(self.config.snapshot.clone()));
        for input in &out.inputs {
            manifest.record_input(input)?;
        }
        manifest.stages.insert(
            stage.name().to_owned(),
            StageRecord {
                rows: out.rows.clone(),
                wall_ms,
            },
        );
        manifest.save(&self.config.output)?;

        Ok(StageSummary {
            stage,
            rows: out.rows,
            artifacts: out.written,
            display: out.display,
        })
    }

    // ------------------------------------------------------------ loaders

    fn load_inventory(&self, out: &mut Output, language: Language) -> Result<Vec<Connective>> {
        let path = match language {
            Language::Source => &self.config.source_inventory,
            Language::Target => &self.config.target_inventory,
        };
        out.inputs.push(path.clone());
        formats::parse_connectives(&read_text(path)?, language, path)
    }

    fn load_relations(&self, out: &mut Output) -> Result<RelationInventory> {
        match &self.config.relations {
            Some(path) => {
                out.inputs.push(path.clone());
                formats::parse_relation_inventory(&read_text(path)?, path)
            }
            None => formats::parse_relation_inventory(DEFAULT_RELATIONS, Path::new("<packaged sense list>")),
        }
    }

    fn load_relation_map(&self, out: &mut Output) -> Result<RelationMap> {
        match &self.config.relation_map {
            Some(path) => {
                out.inputs.push(path.clone());
                formats::parse_relation_map(&read_text(path)?, path)
            }
            None => Ok(RelationMap::default_pdtb_lexconn()),
        }
    }

    fn load_gold(&self, out: &mut Output) -> Result<GoldLexicon> {
        let path = self
            .config
            .gold
            .as_ref()
            .ok_or_else(|| Error::Config("`eval.gold` is required for this stage".into()))?;
        let inventory = match &self.config.gold_relations {
            Some(p) => {
                out.inputs.push(p.clone());
                Some(formats::parse_relation_inventory(&read_text(p)?, p)?)
            }
            None => None,
        };
        out.inputs.push(path.clone());
        formats::parse_gold_lexicon(&read_text(path)?, inventory.as_ref(), path)
    }

    /// The tokenized corpus written by `ingest`.
    fn load_corpus(&self) -> Result<Corpus> {
        let src = formats::parse_token_lines(&read_text(&self.need(artifact::CORPUS_SRC, Stage::Ingest)?)?);
        let tgt = formats::parse_token_lines(&read_text(&self.need(artifact::CORPUS_TGT, Stage::Ingest)?)?);
        let ids_path = self.need(artifact::CORPUS_IDS, Stage::Ingest)?;
        let ids = read_text(&ids_path)?;
        let ids: Vec<usize> = ids
            .lines()
            .enumerate()
            .map(|(i, l)| {
                l.trim()
                    .parse()
                    .map_err(|_| Error::format(&ids_path, i + 1, "invalid sentence id"))
            })
            .collect::<Result<_>>()?;
        if src.len() != ids.len() || tgt.len() != ids.len() {
            return Err(Error::format(
                &ids_path,
                0,
                "corpus artifacts disagree in length; rerun `ingest`",
            ));
        }
        let pairs = ids
            .into_iter()
            .zip(src.into_iter().zip(tgt))
            .map(|(id, (src_tokens, tgt_tokens))| SentencePair {
                id,
                src_tokens,
                tgt_tokens,
            })
            .collect();
        Ok(Corpus::from_pairs(pairs))
    }

    fn load_freqs(&self) -> Result<conledisco_core::FrequencyTable> {
        let path = self.need(artifact::TARGET_FREQ, Stage::Ingest)?;
        formats::parse_frequency_table(&read_text(&path)?, &path)
    }

    fn load_fused(&self, corpus: &Corpus) -> Result<Vec<Vec<String>>> {
        let path = self.need(artifact::FUSED_SRC, Stage::Tag)?;
        let fused = formats::parse_token_lines(&read_text(&path)?);
        if fused.len() != corpus.len() {
            return Err(Error::format(
                &path,
                0,
                "fused corpus does not match the ingested corpus; rerun `tag`",
            ));
        }
        Ok(fused)
    }

    fn load_symmetrized(&self, corpus: &Corpus) -> Result<Vec<Alignment>> {
        let path = self.need(artifact::SYMMETRIZED_ALIGN, Stage::Align)?;
        let alignments = formats::parse_alignments(&read_text(&path)?, Direction::Symmetrized, &path)?;
        if alignments.len() != corpus.len() {
            return Err(Error::format(
                &path,
                0,
                "alignment count does not match the corpus; rerun `align`",
            ));
        }
        Ok(alignments)
    }

    fn load_lexicon(&self) -> Result<RankedLexicon> {
        let path = self.need(artifact::LEXICON, Stage::Build)?;
        formats::parse_lexicon(&read_text(&path)?, &path)
    }

    // ------------------------------------------------------------ stages

    fn ingest(&self, out: &mut Output) -> Result<()> {
        let c = &self.config;
        let options = TokenizerConfig { lowercase: c.lowercase };
        out.inputs.push(c.corpus_source.clone());
        out.inputs.push(c.corpus_target.clone());
        let mut corpus = load_parallel_corpus(&c.corpus_source, &c.corpus_target, &options)?;
        if let Some(limit) = c.limit {
            corpus.truncate(limit);
        }
        if corpus.is_empty() {
            return Err(Error::Core {
                path: c.corpus_source.clone(),
                source: conledisco_core::Error::EmptyCorpus,
            });
        }
        let target_inventory = self.load_inventory(out, Language::Target)?;
        // Parsed here only so that a bad source inventory fails early.
        self.load_inventory(out, Language::Source)?;
        let freqs = count_occurrences(&corpus, Side::Target, &target_inventory);

        let pairs = corpus.pairs();
        self.write(
            out,
            artifact::CORPUS_SRC,
            &formats::write_token_lines(pairs.iter().map(|p| p.src_tokens.as_slice())),
        )?;
        self.write(
            out,
            artifact::CORPUS_TGT,
            &formats::write_token_lines(pairs.iter().map(|p| p.tgt_tokens.as_slice())),
        )?;
        let ids: String = pairs.iter().map(|p| format!("{}\n", p.id)).collect();
        self.write(out, artifact::CORPUS_IDS, &ids)?;
        self.write(out, artifact::TARGET_FREQ, &formats::write_frequency_table(&freqs))?;
        out.row("pairs", corpus.len());
        out.row("source_tokens", corpus.token_count(Side::Source));
        out.row("target_tokens", corpus.token_count(Side::Target));
        out.row("target_connective_occurrences", freqs.total() as usize);
        Ok(())
    }

    fn tag(&self, out: &mut Output) -> Result<()> {
        let corpus = self.load_corpus()?;
        let relations = self.load_relations(out)?;
        let annotations = match (&self.config.annotations, &self.config.senses) {
            (Some(path), _) => {
                out.inputs.push(path.clone());
                let mut records = formats::parse_annotations(&read_text(path)?, path)?;
                for (i, a) in records.iter().enumerate() {
                    if let Some(r) = &a.relation {
                        if !relations.contains(r) {
                            return Err(Error::Core {
                                path: path.clone(),
                                source: conledisco_core::Error::InvalidAnnotation {
                                    record: i + 1,
                                    message: format!("relation `{r}` is not in the relation inventory"),
                                },
                            });
                        }
                    }
                }
                if self.config.limit.is_some() {
                    let last = corpus.pairs().last().map_or(0, |p| p.id);
                    let before = records.len();
                    records.retain(|a| a.sentence_id <= last);
                    if records.len() < before {
                        log::info!("dropped {} annotations beyond the corpus limit", before - records.len());
                    }
                }
                validate_annotations(&corpus, records).map_err(core_at(path))?
            }
            (None, Some(path)) => {
                out.inputs.push(path.clone());
                let senses = formats::parse_senses(&read_text(path)?, &relations, path)?;
                let inventory = self.load_inventory(out, Language::Source)?;
                heuristic_tag(&corpus, &inventory, &senses).map_err(core_at(path))?
            }
            (None, None) => {
                return Err(Error::Config(
                    "the tag stage needs `tagging.annotations` or `tagging.senses`".into(),
                ))
            }
        };
        let fused = fuse_corpus(&corpus, &annotations);
        let fused_tokens = fused
            .iter()
            .map(|f| {
                f.origins
                    .iter()
                    .filter(|o| !matches!(o, conledisco_core::TokenOrigin::Plain(_)))
                    .count()
            })
            .sum();
        self.write(out, artifact::ANNOTATIONS, &formats::write_annotations(&annotations))?;
        self.write(
            out,
            artifact::FUSED_SRC,
            &formats::write_token_lines(fused.iter().map(|f| f.tokens.as_slice())),
        )?;
        out.row("annotations", annotations.len());
        out.row(
            "discourse_annotations",
            annotations.iter().filter(|a| a.discourse_usage).count(),
        );
        out.row("fused_tokens", fused_tokens);
        Ok(())
    }

    fn align(&self, out: &mut Output) -> Result<()> {
        let corpus = self.load_corpus()?;
        let fused = self.load_fused(&corpus)?;
        let forward_pairs: Vec<(&[String], &[String])> = fused
            .iter()
            .zip(corpus.pairs())
            .map(|(f, p)| (f.as_slice(), p.tgt_tokens.as_slice()))
            .collect();
        let backward_pairs: Vec<(&[String], &[String])> = forward_pairs.iter().map(|(s, t)| (*t, *s)).collect();
        let model = self.config.model1;

        let (forward_fit, backward_fit) = rayon::join(
            || train_model1(&forward_pairs, &model),
            || train_model1(&backward_pairs, &model),
        );
        let forward_fit = forward_fit?;
        let backward_fit = backward_fit?;
        let forward = align_corpus(&forward_pairs, &forward_fit.table, model.use_null, Direction::Forward);
        // Backward links come out as (target, source); store them source-first.
        let backward: Vec<Alignment> = align_corpus(
            &backward_pairs,
            &backward_fit.table,
            model.use_null,
            Direction::Backward,
        )
        .iter()
        .map(|a| a.transposed(Direction::Backward))
        .collect();
        let symmetrized: Vec<Alignment> = forward
            .iter()
            .zip(&backward)
            .map(|(f, b)| symmetrize(f, b, self.config.heuristic))
            .collect();

        self.write(
            out,
            artifact::FORWARD_TTABLE,
            &formats::write_translation_table(&forward_fit.table),
        )?;
        self.write(
            out,
            artifact::BACKWARD_TTABLE,
            &formats::write_translation_table(&backward_fit.table),
        )?;
        self.write(out, artifact::FORWARD_ALIGN, &formats::write_alignments(&forward))?;
        self.write(out, artifact::BACKWARD_ALIGN, &formats::write_alignments(&backward))?;
        self.write(
            out,
            artifact::SYMMETRIZED_ALIGN,
            &formats::write_alignments(&symmetrized),
        )?;
        let links = |a: &[Alignment]| a.iter().map(Alignment::len).sum::<usize>();
        out.row("forward_links", links(&forward));
        out.row("backward_links", links(&backward));
        out.row("symmetrized_links", links(&symmetrized));
        out.row("forward_ttable_entries", forward_fit.table.len());
        out.row("backward_ttable_entries", backward_fit.table.len());
        for (dir, fit) in [("forward", &forward_fit), ("backward", &backward_fit)] {
            if let Some(ll) = fit.log_likelihood.last() {
                log::info!("{dir} model: final per-token log-likelihood {ll:.6}");
            }
        }
        Ok(())
    }

    fn extract(&self, out: &mut Output) -> Result<()> {
        let corpus = self.load_corpus()?;
        let fused = self.load_fused(&corpus)?;
        let alignments = self.load_symmetrized(&corpus)?;
        for (i, (a, (f, p))) in alignments.iter().zip(fused.iter().zip(corpus.pairs())).enumerate() {
            if !a.in_bounds(f.len(), p.tgt_tokens.len()) {
                return Err(Error::format(
                    self.out(artifact::SYMMETRIZED_ALIGN),
                    i + 1,
                    "link out of bounds for its sentence pair; rerun `align`",
                ));
            }
        }
        let relations = self.load_relations(out)?;
        let source = self.load_inventory(out, Language::Source)?;
        let target = self.load_inventory(out, Language::Target)?;
        let pairs: Vec<(&[String], &[String])> = fused
            .iter()
            .zip(corpus.pairs())
            .map(|(f, p)| (f.as_slice(), p.tgt_tokens.as_slice()))
            .collect();
        let table = build_phrase_table(&pairs, &alignments, self.config.max_phrase_len);
        let records = filter_dc_entries(&table, &target, &source, &relations)
            .map_err(core_at(&self.out(artifact::PHRASE_TABLE)))?;
        self.write(out, artifact::PHRASE_TABLE, &formats::write_phrase_table(&table))?;
        self.write(out, artifact::DC_RECORDS, &formats::write_dc_records(&records))?;
        out.row("phrase_table_entries", table.len());
        out.row("dc_records", records.len());
        Ok(())
    }

    fn build(&self, out: &mut Output) -> Result<()> {
        let path = self.need(artifact::DC_RECORDS, Stage::Extract)?;
        let records = formats::parse_dc_records(&read_text(&path)?, &path)?;
        let freqs = self.load_freqs()?;
        let lexicon = build_lexicon(&records, &freqs, self.config.min_freq).map_err(core_at(&path))?;
        self.write(out, artifact::LEXICON, &formats::write_lexicon(&lexicon))?;
        out.row("lexicon_entries", lexicon.len());
        Ok(())
    }

    fn eval(&self, out: &mut Output) -> Result<()> {
        let lexicon = self.load_lexicon()?;
        let freqs = self.load_freqs()?;
        let gold = self.load_gold(out)?;
        let map = self.load_relation_map(out)?;
        let restricted = restrict_gold(&gold, &freqs, self.config.min_freq);
        let gold_path = self.config.gold.clone().unwrap_or_default();
        let report = evaluate(&lexicon, &restricted, &map).map_err(core_at(&gold_path))?;
        self.write(out, artifact::EVAL_REPORT, &formats::write_eval_report(&report))?;
        self.write(out, artifact::PR_POINTS, &formats::write_pr_points(&report))?;
        out.row("gold_pairs", gold.len());
        out.row("gold_pairs_above_threshold", restricted.len());
        out.row("retrieved_relevant", report.retrieved_relevant as usize);
        Ok(())
    }

    fn evidence(&self, out: &mut Output) -> Result<()> {
        let lexicon = self.load_lexicon()?;
        let corpus = self.load_corpus()?;
        let alignments = self.load_symmetrized(&corpus)?;
        let ann_path = self.need(artifact::ANNOTATIONS, Stage::Tag)?;
        let annotations: Vec<DCAnnotation> = formats::parse_annotations(&read_text(&ann_path)?, &ann_path)?;
        let fused = fuse_corpus(&corpus, &annotations);
        let target = self.load_inventory(out, Language::Target)?;
        let matcher = ConnectiveMatcher::new(&target);

        let wanted: Vec<(String, RelationLabel)> =
            match (&self.config.evidence_connective, &self.config.evidence_relation) {
                (Some(dc), Some(rel)) => {
                    let rel = RelationLabel::new(rel.as_str())
                        .map_err(|e| Error::Config(format!("invalid `evidence.relation`: {e}")))?;
                    vec![(dc.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase(), rel)]
                }
                _ => {
                    // Unconfirmed candidates: above the probability cut and not
                    // already licensed by the gold lexicon.
                    let known = match &self.config.gold {
                        Some(_) => Some((self.load_gold(out)?, self.load_relation_map(out)?)),
                        None => None,
                    };
                    lexicon
                        .entries()
                        .iter()
                        .filter(|e| e.prob_f64() > self.config.evidence_min_prob)
                        .filter(|e| match &known {
                            Some((gold, map)) => !map.get(&e.relation).is_some_and(|g| gold.contains(&e.fr_dc, g)),
                            None => true,
                        })
                        .map(|e| (e.fr_dc.clone(), e.relation.clone()))
                        .collect()
                }
            };

        let blocks: Vec<_> = wanted
            .into_iter()
            .map(|(dc, rel)| {
                let excerpts = sample_evidence(
                    &corpus,
                    &alignments,
                    &fused,
                    &matcher,
                    &dc,
                    &rel,
                    self.config.evidence_k,
                    self.config.seed,
                );
                (dc, rel, excerpts)
            })
            .collect();
        let excerpt_count = blocks.iter().map(|b| b.2.len()).sum();
        self.write(out, artifact::EVIDENCE, &formats::write_evidence(&blocks))?;
        out.row("candidates", blocks.len());
        out.row("excerpts", excerpt_count);
        Ok(())
    }

    fn report(&self, out: &mut Output) -> Result<()> {
        let freqs = self.load_freqs()?;
        let target = self.load_inventory(out, Language::Target)?;
        let dist = FrequencyDistribution::of(&freqs, &target, self.config.min_freq);
        let table1 = formats::write_table1(&dist);
        self.write(out, artifact::TABLE1, &table1)?;

        let mut summary = String::new();
        if let Some(manifest) = RunManifest::load(&self.config.output) {
            for stage in Stage::ALL {
                if let Some(record) = manifest.stages.get(stage.name()) {
                    for (k, v) in &record.rows {
                        summary.push_str(&format!("{stage}\t{k}\t{v}\n"));
                    }
                }
            }
        }
        if let Ok(text) = std::fs::read_to_string(self.out(artifact::EVAL_REPORT)) {
            if let Some((avep, recall)) = formats::parse_eval_summary(&text) {
                summary.push_str(&format!("eval\tavep\t{avep:.6}\neval\trecall\t{recall:.6}\n"));
            }
        }
        self.write(out, artifact::SUMMARY, &summary)?;
        out.row("target_connectives", dist.total());
        out.display = Some(if self.print_table1 { table1 } else { summary });
        Ok(())
    }
}
