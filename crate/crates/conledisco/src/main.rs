use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conledisco::synth::{write_fixture, SynthSpec};
use conledisco::{Error, Pipeline, PipelineConfig, Stage, StageSummary};

/// Induce a discourse connective lexicon from a relation-tagged parallel corpus.
#[derive(Parser)]
#[command(name = "conledisco", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Pipeline config file.
    #[arg(long, global = true, env = "CONLEDISCO_CONFIG")]
    config: Option<PathBuf>,
    /// Keep only the first N sentence pairs.
    #[arg(long, global = true, value_name = "N")]
    limit: Option<usize>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Seed for evidence sampling.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Output directory for stage artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize the corpus and count target connectives.
    Ingest,
    /// Tag source connectives and write the fused corpus.
    Tag,
    /// Train both alignment directions and symmetrize.
    Align,
    /// Extract the phrase table and connective alignment records.
    Extract,
    /// Build the ranked lexicon.
    Build,
    /// Evaluate the lexicon against the gold lexicon.
    Eval,
    /// Sample aligned excerpts for lexicon entries.
    Evidence,
    /// Summarize the run.
    Report {
        /// Print the connective frequency distribution instead.
        #[arg(long)]
        table1: bool,
    },
    /// Run one stage, or `all` of them in order.
    Run {
        /// A stage name or `all`.
        stage: String,
    },
    /// Write the synthetic planted fixture.
    Synth {
        /// Directory to create.
        dir: PathBuf,
        #[arg(long, default_value_t = SynthSpec::default().pairs)]
        pairs: usize,
        /// Total occurrences of the threshold-probe connective.
        #[arg(long, default_value_t = SynthSpec::default().gorp_count)]
        probe_count: u64,
        #[arg(long, default_value_t = SynthSpec::default().min_freq)]
        min_freq: u64,
    },
}

fn absolute(path: &Path) -> PathBuf {
    std::env::current_dir()
        .map(|d| d.join(path))
        .unwrap_or_else(|_| path.to_path_buf())
}

fn load_config(global: &Global) -> Result<PipelineConfig, Error> {
    let path = global
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("no config given: pass --config or set CONLEDISCO_CONFIG".into()))?;
    let config = PipelineConfig::load(path)?;
    let mut overrides = Vec::new();
    if let Some(n) = global.limit {
        overrides.push(("corpus.limit", n.to_string()));
    }
    if let Some(s) = global.seed {
        overrides.push(("seed", s.to_string()));
    }
    if let Some(dir) = &global.output {
        overrides.push(("output", absolute(dir).to_string_lossy().into_owned()));
    }
    if overrides.is_empty() {
        Ok(config)
    } else {
        config.with_overrides(&overrides)
    }
}

fn print_summary(summary: &StageSummary) {
    let rows: Vec<String> = summary.rows.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("{}: {}", summary.stage, rows.join(" "));
    if let Some(text) = &summary.display {
        print!("{text}");
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    }
    let stages: Vec<Stage> = match &cli.command {
        Command::Synth {
            dir,
            pairs,
            probe_count,
            min_freq,
        } => {
            let spec = SynthSpec {
                pairs: *pairs,
                seed: cli.global.seed.unwrap_or(SynthSpec::default().seed),
                min_freq: *min_freq,
                gorp_count: *probe_count,
            };
            let config = write_fixture(dir, &spec)?;
            println!("{}", config.display());
            return Ok(());
        }
        Command::Ingest => vec![Stage::Ingest],
        Command::Tag => vec![Stage::Tag],
        Command::Align => vec![Stage::Align],
        Command::Extract => vec![Stage::Extract],
        Command::Build => vec![Stage::Build],
        Command::Eval => vec![Stage::Eval],
        Command::Evidence => vec![Stage::Evidence],
        Command::Report { .. } => vec![Stage::Report],
        Command::Run { stage } if stage == "all" => Stage::ALL.to_vec(),
        Command::Run { stage } => vec![stage.parse().map_err(Error::Config)?],
    };
    let mut pipeline = Pipeline::new(load_config(&cli.global)?);
    pipeline.print_table1 = matches!(cli.command, Command::Report { table1: true });
    for stage in stages {
        print_summary(&pipeline.run(stage)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
