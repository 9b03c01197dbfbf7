//! Command implementations behind the CLI surface.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use hintkit::control::{build_control_suite, score_control, ControlCombo};
use hintkit::corpus::{
    self, validate, CciRecord, DatasetKind, GlucoseColumns, ParacometOptions, Reject,
};
use hintkit::formats::{
    self, default_connectives, read_examples, write_examples, IndexBase, RenderOptions,
    RenderedExample, RenderedHint,
};
use hintkit::hinting::{enumerate_elements, sample_hint, HintPolicy, SubsetMode};
use hintkit::lexsub::{gate_substitution, substitute_hint, Lexicon, SubstKind, SubstPolicy};
use hintkit::metrics::score_files;
use hintkit::rng::RngKey;

use crate::{FormatArg, KindArg, SubsetModeArg, SubstArg, SubstModeArg};

/// Invalid flag combinations and values; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

impl KindArg {
    fn to_kind(self) -> DatasetKind {
        match self {
            KindArg::Paracomet => DatasetKind::Paracomet,
            KindArg::Glucose => DatasetKind::Glucose,
        }
    }
}

fn default_rejects_path(output: &Path) -> PathBuf {
    let mut name = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string());
    name.push_str(".rejects.jsonl");
    output.with_file_name(name)
}

fn check_nonempty(path: &Path, what: &str) -> Result<()> {
    let len = fs::metadata(path)
        .with_context(|| format!("{what} missing at {}", path.display()))?
        .len();
    if len == 0 {
        bail!("{what} at {} is empty", path.display());
    }
    Ok(())
}

pub fn ingest(
    input: &Path,
    output: &Path,
    rejects_path: Option<&Path>,
    kind: KindArg,
    columns: Option<&Path>,
    relations: Option<Vec<String>>,
) -> Result<()> {
    if input == output {
        return Err(usage("--input and --output must be distinct paths"));
    }
    let outcome = match kind {
        KindArg::Glucose => {
            let columns = match columns {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("cannot read column config {}", path.display()))?;
                    serde_json::from_str::<GlucoseColumns>(&text)
                        .with_context(|| format!("invalid column config {}", path.display()))?
                }
                None => GlucoseColumns::default(),
            };
            corpus::ingest_glucose(input, &columns)?
        }
        KindArg::Paracomet => {
            let options = match relations {
                Some(relations) if !relations.is_empty() => ParacometOptions { relations },
                _ => ParacometOptions::default(),
            };
            corpus::ingest_paracomet(input, &options)?
        }
    };

    let rejects_file = rejects_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_rejects_path(output));
    corpus::write_records(output, &outcome.records)
        .with_context(|| format!("cannot write {}", output.display()))?;
    corpus::write_rejects(&rejects_file, &outcome.rejects)
        .with_context(|| format!("cannot write {}", rejects_file.display()))?;

    println!(
        "ingested {} records, {} rejects ({} units) -> {}",
        outcome.records.len(),
        outcome.rejects.len(),
        outcome.units,
        output.display()
    );
    if outcome.records.is_empty() {
        bail!("no records ingested from {}", input.display());
    }
    check_nonempty(output, "records file")?;
    Ok(())
}

pub struct AugmentArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    pub kind: KindArg,
    pub format: FormatArg,
    pub p_hint: f64,
    pub p_subst: f64,
    pub subst: SubstArg,
    pub subst_mode: SubstModeArg,
    pub subset_mode: SubsetModeArg,
    pub epochs: u64,
    pub seed: u64,
    pub index_base: u8,
    pub max_sentences: usize,
    pub lexicon_syn: Option<PathBuf>,
    pub lexicon_ant: Option<PathBuf>,
    pub workers: usize,
}

#[derive(Debug, Serialize)]
struct SubstCounts {
    synonym: usize,
    antonym: usize,
}

#[derive(Debug, Serialize)]
struct AugmentReject {
    record_id: String,
    reasons: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: String,
    config_hash: String,
    seed: u64,
    epochs: u64,
    kind: String,
    format: String,
    p_hint: f64,
    p_subst: f64,
    subst: String,
    subst_mode: String,
    subset_mode: String,
    index_base: u8,
    max_sentences: usize,
    records_in: usize,
    rejected: usize,
    emitted: usize,
    hinted: usize,
    hinted_fraction: f64,
    substituted: SubstCounts,
    files: Vec<String>,
    rejects: Vec<AugmentReject>,
}

/// Hash over the semantics-affecting flags only; worker count and i/o
/// paths are excluded, lexicon paths included (they select the
/// substitution data).
fn config_hash(args: &AugmentArgs) -> String {
    let canonical = serde_json::json!({
        "command": "augment",
        "kind": format!("{:?}", args.kind),
        "format": format!("{:?}", args.format),
        "p_hint": args.p_hint,
        "p_subst": args.p_subst,
        "subst": format!("{:?}", args.subst),
        "subst_mode": format!("{:?}", args.subst_mode),
        "subset_mode": format!("{:?}", args.subset_mode),
        "epochs": args.epochs,
        "seed": args.seed,
        "index_base": args.index_base,
        "max_sentences": args.max_sentences,
        "lexicon_syn": args.lexicon_syn.as_ref().map(|p| p.display().to_string()),
        "lexicon_ant": args.lexicon_ant.as_ref().map(|p| p.display().to_string()),
    });
    let mut hasher = Sha256::new();
    hasher.update(canonical.to_string().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn subst_kinds(arg: SubstArg) -> Vec<SubstKind> {
    match arg {
        SubstArg::None => vec![],
        SubstArg::Syn => vec![SubstKind::Synonym],
        SubstArg::Ant => vec![SubstKind::Antonym],
        SubstArg::Both => vec![SubstKind::Synonym, SubstKind::Antonym],
    }
}

fn load_lexicon(args: &AugmentArgs, kinds: &[SubstKind]) -> Result<Lexicon> {
    match (&args.lexicon_syn, &args.lexicon_ant) {
        (Some(syn), Some(ant)) => Ok(Lexicon::load(syn, ant)?),
        (Some(syn), None) => {
            if kinds.contains(&SubstKind::Antonym) {
                return Err(usage("--subst includes antonyms but --lexicon-ant is missing"));
            }
            Ok(Lexicon::load_one(syn, SubstKind::Synonym)?)
        }
        (None, Some(ant)) => {
            if kinds.contains(&SubstKind::Synonym) {
                return Err(usage("--subst includes synonyms but --lexicon-syn is missing"));
            }
            Ok(Lexicon::load_one(ant, SubstKind::Antonym)?)
        }
        (None, None) => {
            if !kinds.is_empty() {
                return Err(usage(
                    "--subst requires --lexicon-syn and/or --lexicon-ant",
                ));
            }
            Ok(Lexicon::empty())
        }
    }
}

fn render_record(
    record: &CciRecord,
    args: &AugmentArgs,
    kinds: &[SubstKind],
    lexicon: &Lexicon,
    epoch: u64,
) -> Result<RenderedExample> {
    let dataset_kind = args.kind.to_kind();
    let hint_policy = HintPolicy {
        p_hint: args.p_hint,
        seed: args.seed,
        epoch,
        subset_mode: match args.subset_mode {
            SubsetModeArg::Uniform => SubsetMode::Uniform,
            SubsetModeArg::SizeFirst => SubsetMode::SizeFirst,
        },
    };
    let elements = enumerate_elements(record);
    let hint = sample_hint(&elements, &hint_policy, &record.id)
        .with_context(|| format!("record {}", record.id))?;

    let mut rendered_hint = None;
    let mut extra = Vec::new();
    if let Some(hint) = &hint {
        let gated = if kinds.is_empty() {
            vec![]
        } else {
            let policy = SubstPolicy {
                p_subst: args.p_subst,
                kinds: kinds.to_vec(),
                seed: args.seed,
                epoch,
                ..SubstPolicy::default()
            };
            gate_substitution(&policy, &record.id)
        };
        let key = RngKey::new(args.seed, epoch, &record.id);
        let substituted: Vec<_> = gated
            .iter()
            .map(|which| substitute_hint(hint, dataset_kind, *which, lexicon, &key))
            .collect();
        match args.subst_mode {
            SubstModeArg::Append => {
                rendered_hint = Some(RenderedHint::from_hint(hint, dataset_kind));
                extra = substituted;
            }
            SubstModeArg::Replace => {
                // Synonym wins when both kinds gate on; the hint slot holds
                // exactly one variant in replace mode.
                rendered_hint = Some(match substituted.first() {
                    Some(first) => RenderedHint::from_substituted(first),
                    None => RenderedHint::from_hint(hint, dataset_kind),
                });
            }
        }
    }

    let opts = RenderOptions {
        index_base: if args.index_base == 1 {
            IndexBase::One
        } else {
            IndexBase::Zero
        },
        max_sentences: args.max_sentences,
        epoch,
        seed: args.seed,
    };
    let example = match args.format {
        FormatArg::Causal => {
            formats::render_paracomet_causal(record, rendered_hint.as_ref(), &extra, &opts)?
        }
        FormatArg::Seq2seq => {
            formats::render_paracomet_seq2seq(record, rendered_hint.as_ref(), &extra, &opts)?
        }
        FormatArg::Glucose => formats::render_glucose(record, rendered_hint.as_ref(), &extra, &opts)?,
    };
    Ok(example)
}

pub fn augment(args: AugmentArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.p_hint) {
        return Err(usage(format!("--p-hint must be in [0,1], got {}", args.p_hint)));
    }
    if !(0.0..=1.0).contains(&args.p_subst) {
        return Err(usage(format!(
            "--p-subst must be in [0,1], got {}",
            args.p_subst
        )));
    }
    if args.epochs < 1 {
        return Err(usage("--epochs must be at least 1"));
    }
    if args.input == args.output {
        return Err(usage("--input and --output must be distinct paths"));
    }
    match (args.kind, args.format) {
        (KindArg::Paracomet, FormatArg::Causal | FormatArg::Seq2seq) => {}
        (KindArg::Glucose, FormatArg::Glucose) => {}
        (kind, format) => {
            return Err(usage(format!(
                "--format {format:?} does not apply to --kind {kind:?}"
            )))
        }
    }

    let kinds = subst_kinds(args.subst);
    let lexicon = load_lexicon(&args, &kinds)?;

    let records = corpus::read_records(&args.input)?;
    if records.is_empty() {
        bail!("no records in {}", args.input.display());
    }
    let mut valid = Vec::new();
    let mut rejects = Vec::new();
    for record in records.iter() {
        match validate(record) {
            Ok(_) => valid.push(record.clone()),
            Err(violations) => rejects.push(AugmentReject {
                record_id: record.id.clone(),
                reasons: violations.iter().map(|v| v.to_string()).collect(),
            }),
        }
    }
    if valid.is_empty() {
        bail!("no valid records in {}", args.input.display());
    }

    fs::create_dir_all(&args.output)
        .with_context(|| format!("cannot create {}", args.output.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .context("cannot build worker pool")?;

    let mut files = Vec::new();
    let mut hinted = 0usize;
    let mut synonym = 0usize;
    let mut antonym = 0usize;
    let mut emitted = 0usize;
    for epoch in 0..args.epochs {
        let examples: Vec<RenderedExample> = pool.install(|| {
            valid
                .par_iter()
                .map(|record| render_record(record, &args, &kinds, &lexicon, epoch))
                .collect::<Result<Vec<_>>>()
        })?;
        hinted += examples.iter().filter(|e| e.meta.hinted).count();
        synonym += examples
            .iter()
            .filter(|e| e.meta.subst_kinds.iter().any(|k| k == "synonym"))
            .count();
        antonym += examples
            .iter()
            .filter(|e| e.meta.subst_kinds.iter().any(|k| k == "antonym"))
            .count();
        emitted += examples.len();
        let name = format!("epoch_{epoch:03}.jsonl");
        let path = args.output.join(&name);
        write_examples(&path, &examples)
            .with_context(|| format!("cannot write {}", path.display()))?;
        check_nonempty(&path, "epoch file")?;
        files.push(name);
    }

    let manifest = Manifest {
        command: "augment".to_string(),
        config_hash: config_hash(&args),
        seed: args.seed,
        epochs: args.epochs,
        kind: format!("{:?}", args.kind).to_lowercase(),
        format: format!("{:?}", args.format).to_lowercase(),
        p_hint: args.p_hint,
        p_subst: args.p_subst,
        subst: format!("{:?}", args.subst).to_lowercase(),
        subst_mode: format!("{:?}", args.subst_mode).to_lowercase(),
        subset_mode: format!("{:?}", args.subset_mode).to_lowercase(),
        index_base: args.index_base,
        max_sentences: args.max_sentences,
        records_in: records.len(),
        rejected: rejects.len(),
        emitted,
        hinted,
        hinted_fraction: hinted as f64 / emitted as f64,
        substituted: SubstCounts { synonym, antonym },
        files,
        rejects,
    };
    let manifest_path = args.output.join("manifest.json");
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).context("manifest serialization")? + "\n",
    )
    .with_context(|| format!("cannot write {}", manifest_path.display()))?;

    println!(
        "augmented {} records x {} epochs -> {} examples ({} hinted) in {}",
        valid.len(),
        args.epochs,
        emitted,
        hinted,
        args.output.display()
    );
    Ok(())
}

pub fn vocab(
    output: &Path,
    kind: KindArg,
    max_sentences: usize,
    relations: Option<Vec<String>>,
) -> Result<()> {
    let relations = match relations {
        Some(relations) if !relations.is_empty() => relations,
        _ => corpus::ATOMIC_RELATIONS.iter().map(|r| r.to_string()).collect(),
    };
    let vocab = formats::emit_vocab(kind.to_kind(), max_sentences, &relations)?;
    vocab
        .write(output)
        .with_context(|| format!("cannot write {}", output.display()))?;
    check_nonempty(output, "vocabulary file")?;
    println!("wrote {} tokens -> {}", vocab.tokens.len(), output.display());
    Ok(())
}

pub fn score(
    predictions: &Path,
    references: &Path,
    output: &Path,
    lexicon_syn: Option<&Path>,
) -> Result<()> {
    let lexicon = match lexicon_syn {
        Some(path) => Some(Lexicon::load_one(path, SubstKind::Synonym)?),
        None => None,
    };
    let report = score_files(predictions, references, lexicon.as_ref())?;
    // Machine-readable single line, human-readable table.
    fs::write(output, serde_json::to_string(&report)? + "\n")
        .with_context(|| format!("cannot write {}", output.display()))?;
    print!("{}", report.table());
    check_nonempty(output, "report file")?;
    Ok(())
}

fn parse_combos(combos: Option<Vec<String>>) -> Result<Vec<ControlCombo>> {
    match combos {
        None => Ok(ControlCombo::all().to_vec()),
        Some(names) => {
            let mut out = Vec::new();
            for name in names {
                let combo = ControlCombo::parse(name.trim())
                    .ok_or_else(|| usage(format!("unknown combo {name:?}")))?;
                if !out.contains(&combo) {
                    out.push(combo);
                }
            }
            if out.is_empty() {
                return Err(usage("--combos must name at least one combination"));
            }
            Ok(out)
        }
    }
}

pub fn control_build(
    input: &Path,
    output: &Path,
    rejects_path: Option<&Path>,
    combos: Option<Vec<String>>,
) -> Result<()> {
    let combos = parse_combos(combos)?;
    let records = corpus::read_records(input)?;
    if records.is_empty() {
        bail!("no records in {}", input.display());
    }
    let suite = build_control_suite(&records, &combos);
    write_examples(output, &suite.examples)
        .with_context(|| format!("cannot write {}", output.display()))?;
    let rejects_file = rejects_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_rejects_path(output));
    let reject_lines: Vec<Reject> = suite
        .rejects
        .iter()
        .enumerate()
        .map(|(i, r)| Reject {
            line_no: (i + 1) as u64,
            reason: format!("{} x {}: {}", r.record_id, r.combo, r.reason),
        })
        .collect();
    corpus::write_rejects(&rejects_file, &reject_lines)
        .with_context(|| format!("cannot write {}", rejects_file.display()))?;
    println!(
        "built {} control examples ({} rejects) -> {}",
        suite.examples.len(),
        suite.rejects.len(),
        output.display()
    );
    if suite.examples.is_empty() {
        bail!("control suite is empty");
    }
    check_nonempty(output, "suite file")?;
    Ok(())
}

pub fn control_score(suite_path: &Path, outputs_path: &Path, output: &Path) -> Result<()> {
    let suite = read_examples(suite_path)
        .with_context(|| format!("cannot read {}", suite_path.display()))?;
    let outputs: Vec<String> = fs::read_to_string(outputs_path)
        .with_context(|| format!("cannot read {}", outputs_path.display()))?
        .lines()
        .map(str::to_string)
        .collect();
    let report = score_control(&outputs, &suite, &default_connectives())?;
    fs::write(output, serde_json::to_string(&report.scores)? + "\n")
        .with_context(|| format!("cannot write {}", output.display()))?;
    print!("{}", report.table());
    if !report.diagnostics.is_empty() {
        eprintln!(
            "{} outputs had unrecoverable hinted slots (scored as empty)",
            report.diagnostics.len()
        );
    }
    check_nonempty(output, "scores file")?;
    Ok(())
}
