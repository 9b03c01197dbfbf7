//! Command-line pipeline: ingestion -> hint augmentation -> emission ->
//! scoring, with explicit determinism controls (every artifact is a pure
//! function of the flags and the seed).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::UsageError;

#[derive(Parser)]
#[command(
    name = "hintkit",
    version,
    about = "Hint augmentation and evaluation for contextual commonsense inference datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Paracomet,
    Glucose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// ParaCOMET causal LM template.
    Causal,
    /// ParaCOMET seq2seq template ("source:" / "hint:" prefixes).
    Seq2seq,
    /// GLUCOSE seq2seq template (dimension prefix, *-marked target).
    Glucose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubstArg {
    None,
    Syn,
    Ant,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubstModeArg {
    /// Emit the original hint plus the substituted variant(s).
    Append,
    /// The substituted variant stands in for the original hint.
    Replace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubsetModeArg {
    /// Uniform over all non-empty proper subsets.
    Uniform,
    /// Draw subset size first, then members.
    SizeFirst,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest a GLUCOSE- or ParaCOMET-style dataset into canonical JSONL.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Canonical records JSONL.
        #[arg(long)]
        output: PathBuf,
        /// Rejects JSONL; defaults to `<output>.rejects.jsonl`.
        #[arg(long)]
        rejects: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// JSON column-mapping config for GLUCOSE layouts.
        #[arg(long)]
        columns: Option<PathBuf>,
        /// Accepted ATOMIC relation tokens (ParaCOMET), comma-separated.
        #[arg(long, value_delimiter = ',')]
        relations: Option<Vec<String>>,
    },
    /// Apply hint/substitution sampling per epoch and write rendered
    /// example files plus a manifest.
    Augment {
        /// Canonical records JSONL.
        #[arg(long)]
        input: PathBuf,
        /// Output directory for epoch files and the manifest.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(long, default_value_t = 0.5)]
        p_hint: f64,
        #[arg(long, default_value_t = 0.5)]
        p_subst: f64,
        #[arg(long, value_enum, default_value_t = SubstArg::None)]
        subst: SubstArg,
        #[arg(long, value_enum, default_value_t = SubstModeArg::Append)]
        subst_mode: SubstModeArg,
        #[arg(long, value_enum, default_value_t = SubsetModeArg::Uniform)]
        subset_mode: SubsetModeArg,
        #[arg(long, default_value_t = 1)]
        epochs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Display base for sentence-position tokens.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        index_base: u8,
        /// Maximum number of sentence-position tokens.
        #[arg(long, default_value_t = 128)]
        max_sentences: usize,
        /// Synonym lexicon (`lemma<TAB>synonym` per line).
        #[arg(long)]
        lexicon_syn: Option<PathBuf>,
        /// Antonym lexicon (`lemma<TAB>antonym` per line).
        #[arg(long)]
        lexicon_ant: Option<PathBuf>,
        /// Worker threads (0 = automatic). Output bytes do not depend on
        /// this.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Emit the special-token vocabulary for tokenizer extension.
    Vocab {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 128)]
        max_sentences: usize,
        #[arg(long, value_delimiter = ',')]
        relations: Option<Vec<String>>,
    },
    /// Score predictions against references with BLEU/ROUGE/METEOR.
    Score {
        /// Predictions, one per line.
        #[arg(long)]
        predictions: PathBuf,
        /// References, one per line.
        #[arg(long)]
        references: PathBuf,
        /// Metric report JSON.
        #[arg(long)]
        output: PathBuf,
        /// Optional synonym lexicon for METEOR's synonym stage.
        #[arg(long)]
        lexicon_syn: Option<PathBuf>,
    },
    /// Build the forced-hint controllability suite from GLUCOSE records.
    ControlBuild {
        /// Canonical GLUCOSE records JSONL.
        #[arg(long)]
        input: PathBuf,
        /// Suite JSONL of rendered examples with combo metadata.
        #[arg(long)]
        output: PathBuf,
        /// Rejects JSONL; defaults to `<output>.rejects.jsonl`.
        #[arg(long)]
        rejects: Option<PathBuf>,
        /// Slot combinations, comma-separated; defaults to all six.
        #[arg(long, value_delimiter = ',')]
        combos: Option<Vec<String>>,
    },
    /// Score model outputs against a controllability suite.
    ControlScore {
        /// Suite JSONL from control-build.
        #[arg(long)]
        suite: PathBuf,
        /// Model outputs, one per line, aligned with the suite.
        #[arg(long)]
        outputs: PathBuf,
        /// Scores JSON.
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest {
            input,
            output,
            rejects,
            kind,
            columns,
            relations,
        } => commands::ingest(
            &input,
            &output,
            rejects.as_deref(),
            kind,
            columns.as_deref(),
            relations,
        ),
        Command::Augment {
            input,
            output,
            kind,
            format,
            p_hint,
            p_subst,
            subst,
            subst_mode,
            subset_mode,
            epochs,
            seed,
            index_base,
            max_sentences,
            lexicon_syn,
            lexicon_ant,
            workers,
        } => commands::augment(commands::AugmentArgs {
            input,
            output,
            kind,
            format,
            p_hint,
            p_subst,
            subst,
            subst_mode,
            subset_mode,
            epochs,
            seed,
            index_base,
            max_sentences,
            lexicon_syn,
            lexicon_ant,
            workers,
        }),
        Command::Vocab {
            output,
            kind,
            max_sentences,
            relations,
        } => commands::vocab(&output, kind, max_sentences, relations),
        Command::Score {
            predictions,
            references,
            output,
            lexicon_syn,
        } => commands::score(&predictions, &references, &output, lexicon_syn.as_deref()),
        Command::ControlBuild {
            input,
            output,
            rejects,
            combos,
        } => commands::control_build(&input, &output, rejects.as_deref(), combos),
        Command::ControlScore {
            suite,
            outputs,
            output,
        } => commands::control_score(&suite, &outputs, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if err.downcast_ref::<UsageError>().is_some() {
                eprintln!("usage error: {err}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {err:#}");
                ExitCode::FAILURE
            }
        }
    }
}
