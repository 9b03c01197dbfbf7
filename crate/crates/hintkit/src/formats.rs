//! Serialization into the three model I/O templates.
//!
//! - ParaCOMET causal LM: story, sentence-position token, relation token,
//!   optional parenthesized hint; target is the bare ATOMIC object phrase.
//! - ParaCOMET seq2seq: same content behind `source:` / `hint:` /
//!   `synonym:` / `antonym:` prefixes.
//! - GLUCOSE seq2seq: dimension prefix, story with the target sentence
//!   wrapped in `*`, optional hint; target is
//!   `subject relation object ** subject relation object`.
//!
//! Rendering is byte-deterministic: sentences join with single spaces, the
//! hint goes at the end of the source, and nothing is ever truncated
//! (whitespace token counts ride along in `meta` so trainers can enforce
//! their own limits).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Assertion, CciRecord, DatasetKind, Dimension};
use crate::hinting::{
    render_hint, Hint, Part, Slot, TOK_GENERAL, TOK_OBJ, TOK_REL, TOK_SPECIFIC, TOK_SUBJ,
};
use crate::lexsub::{SubstKind, SubstitutedHint, TOK_ANT, TOK_SYN};

/// The three output templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleKind {
    ParacometCausal,
    ParacometSeq2seq,
    GlucoseSeq2seq,
}

/// Augmentation provenance carried next to each rendered example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleMeta {
    pub record_id: String,
    pub epoch: u64,
    pub hinted: bool,
    pub hint_slots: Vec<String>,
    pub subst_kinds: Vec<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combo: Option<String>,
    pub source_words: usize,
    pub target_words: usize,
}

/// A (source, target) pair in one of the model formats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedExample {
    pub source: String,
    pub target: String,
    pub kind: ExampleKind,
    pub meta: ExampleMeta,
}

/// Display base for sentence-position tokens. The underlying
/// `target_index` is always 0-based; this only shifts the rendered token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IndexBase {
    #[default]
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl IndexBase {
    fn offset(&self) -> usize {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

/// Rendering knobs plus the provenance stamped into `meta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub index_base: IndexBase,
    /// Upper bound on sentence-position tokens; rendering a display index
    /// at or past it is an error.
    pub max_sentences: usize,
    pub epoch: u64,
    pub seed: u64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            index_base: IndexBase::Zero,
            max_sentences: 128,
            epoch: 0,
            seed: 0,
        }
    }
}

/// A hint ready for placement in a source string: its rendered text (which
/// may already carry a substitution tag in replace mode) plus the slot and
/// kind bookkeeping for `meta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedHint {
    pub text: String,
    pub slots: Vec<Slot>,
    pub subst_kinds: Vec<SubstKind>,
}

impl RenderedHint {
    pub fn from_hint(hint: &Hint, kind: DatasetKind) -> Self {
        Self {
            text: render_hint(hint, kind),
            slots: hint.slots(),
            subst_kinds: Vec::new(),
        }
    }

    /// Replace mode: the substituted variant stands in for the original.
    pub fn from_substituted(substituted: &SubstitutedHint) -> Self {
        Self {
            text: substituted.text.clone(),
            slots: substituted.hint.slots(),
            subst_kinds: vec![substituted.kind],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("expected a {expected} record, got {found}")]
    WrongDatasetKind {
        expected: DatasetKind,
        found: DatasetKind,
    },
    #[error("sentence token <|sent{display_index}|> exceeds the configured maximum of {max} sentence tokens")]
    SentenceTokenOutOfRange { display_index: usize, max: usize },
    #[error("glucose dimension must be an integer in 1..=10, got {found}")]
    DimensionOutOfRange { found: String },
    #[error("glucose record {id} is missing its general assertion")]
    MissingGeneral { id: String },
    #[error("record {id}: target_index {target_index} out of range ({len} sentences)")]
    TargetIndexOutOfRange {
        id: String,
        target_index: usize,
        len: usize,
    },
    #[error("max_sentences must be at least 1")]
    MaxSentencesZero,
}

pub fn sentence_token(display_index: usize) -> String {
    format!("<|sent{display_index}|>")
}

pub fn relation_token(relation: &str) -> String {
    format!("<|{relation}|>")
}

fn check_kind(record: &CciRecord, expected: DatasetKind) -> Result<(), FormatError> {
    if record.dataset_kind != expected {
        return Err(FormatError::WrongDatasetKind {
            expected,
            found: record.dataset_kind,
        });
    }
    Ok(())
}

fn check_target_index(record: &CciRecord) -> Result<(), FormatError> {
    if record.target_index >= record.story.sentences.len() {
        return Err(FormatError::TargetIndexOutOfRange {
            id: record.id.clone(),
            target_index: record.target_index,
            len: record.story.sentences.len(),
        });
    }
    Ok(())
}

fn display_index(record: &CciRecord, opts: &RenderOptions) -> Result<usize, FormatError> {
    let display = record.target_index + opts.index_base.offset();
    if display >= opts.max_sentences {
        return Err(FormatError::SentenceTokenOutOfRange {
            display_index: display,
            max: opts.max_sentences,
        });
    }
    Ok(display)
}

/// Orders substituted hints synonym-first and drops them entirely when
/// there is no base hint (a variant of nothing is nothing).
fn ordered_substitutions<'a>(
    hint: Option<&RenderedHint>,
    substituted: &'a [SubstitutedHint],
) -> Vec<&'a SubstitutedHint> {
    if hint.is_none() {
        return Vec::new();
    }
    let mut out: Vec<&SubstitutedHint> = substituted.iter().collect();
    out.sort_by_key(|s| s.kind);
    out
}

fn meta_for(
    record: &CciRecord,
    hint: Option<&RenderedHint>,
    substituted: &[&SubstitutedHint],
    source: &str,
    target: &str,
    opts: &RenderOptions,
) -> ExampleMeta {
    let mut kinds: Vec<SubstKind> = hint.map(|h| h.subst_kinds.clone()).unwrap_or_default();
    kinds.extend(substituted.iter().map(|s| s.kind));
    kinds.sort();
    kinds.dedup();
    ExampleMeta {
        record_id: record.id.clone(),
        epoch: opts.epoch,
        hinted: hint.is_some(),
        hint_slots: hint
            .map(|h| h.slots.iter().map(|s| s.to_string()).collect())
            .unwrap_or_default(),
        subst_kinds: kinds.iter().map(|k| k.to_string()).collect(),
        seed: opts.seed,
        combo: None,
        source_words: source.split_whitespace().count(),
        target_words: target.split_whitespace().count(),
    }
}

fn prefixed_substitutions(items: &[&SubstitutedHint]) -> String {
    items
        .iter()
        .map(|s| match s.kind {
            SubstKind::Synonym => format!(" synonym: {}", s.text),
            SubstKind::Antonym => format!(" antonym: {}", s.text),
        })
        .collect()
}

/// ParaCOMET causal LM serialization: story, sentence token, relation
/// token, then the hint (and any substituted variants as further
/// parenthesized groups).
pub fn render_paracomet_causal(
    record: &CciRecord,
    hint: Option<&RenderedHint>,
    substituted: &[SubstitutedHint],
    opts: &RenderOptions,
) -> Result<RenderedExample, FormatError> {
    check_kind(record, DatasetKind::Paracomet)?;
    check_target_index(record)?;
    let display = display_index(record, opts)?;
    let mut source = format!(
        "{} {} {}",
        record.story.sentences.join(" "),
        sentence_token(display),
        relation_token(&record.specific.relation),
    );
    let substituted = ordered_substitutions(hint, substituted);
    if let Some(hint) = hint {
        source.push(' ');
        source.push_str(&hint.text);
        for sub in &substituted {
            source.push(' ');
            source.push_str(&sub.text);
        }
    }
    let target = record.specific.object.clone();
    let meta = meta_for(record, hint, &substituted, &source, &target, opts);
    Ok(RenderedExample {
        source,
        target,
        kind: ExampleKind::ParacometCausal,
        meta,
    })
}

/// ParaCOMET seq2seq serialization with `source:` / `hint:` / `synonym:` /
/// `antonym:` prefixes.
pub fn render_paracomet_seq2seq(
    record: &CciRecord,
    hint: Option<&RenderedHint>,
    substituted: &[SubstitutedHint],
    opts: &RenderOptions,
) -> Result<RenderedExample, FormatError> {
    check_kind(record, DatasetKind::Paracomet)?;
    check_target_index(record)?;
    let display = display_index(record, opts)?;
    let mut source = format!(
        "source: {} {} {}",
        record.story.sentences.join(" "),
        sentence_token(display),
        relation_token(&record.specific.relation),
    );
    let substituted = ordered_substitutions(hint, substituted);
    if let Some(hint) = hint {
        source.push_str(" hint: ");
        source.push_str(&hint.text);
        source.push_str(&prefixed_substitutions(&substituted));
    }
    let target = record.specific.object.clone();
    let meta = meta_for(record, hint, &substituted, &source, &target, opts);
    Ok(RenderedExample {
        source,
        target,
        kind: ExampleKind::ParacometSeq2seq,
        meta,
    })
}

fn render_assertion(assertion: &Assertion) -> String {
    format!(
        "{} {} {}",
        assertion.subject, assertion.relation, assertion.object
    )
}

/// GLUCOSE seq2seq serialization: dimension prefix, story with `*`-wrapped
/// target sentence, optional hint; the target joins the specific and
/// general assertions with ` ** `.
pub fn render_glucose(
    record: &CciRecord,
    hint: Option<&RenderedHint>,
    substituted: &[SubstitutedHint],
    opts: &RenderOptions,
) -> Result<RenderedExample, FormatError> {
    check_kind(record, DatasetKind::Glucose)?;
    check_target_index(record)?;
    let dim = match &record.dimension {
        Dimension::Glucose(d) if (1..=10).contains(d) => *d,
        other => {
            return Err(FormatError::DimensionOutOfRange {
                found: other.to_string(),
            })
        }
    };
    let general = record
        .general
        .as_ref()
        .ok_or_else(|| FormatError::MissingGeneral {
            id: record.id.clone(),
        })?;
    let body: Vec<String> = record
        .story
        .sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i == record.target_index {
                format!("*{s}*")
            } else {
                s.clone()
            }
        })
        .collect();
    let mut source = format!("{dim}: {}", body.join(" "));
    let substituted = ordered_substitutions(hint, substituted);
    if let Some(hint) = hint {
        source.push_str(" hint: ");
        source.push_str(&hint.text);
        source.push_str(&prefixed_substitutions(&substituted));
    }
    let target = format!(
        "{} ** {}",
        render_assertion(&record.specific),
        render_assertion(general)
    );
    let meta = meta_for(record, hint, &substituted, &source, &target, opts);
    Ok(RenderedExample {
        source,
        target,
        kind: ExampleKind::GlucoseSeq2seq,
        meta,
    })
}

/// Assertion fields recovered from a model output; absent fields were not
/// recoverable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionParts {
    pub subject: Option<String>,
    pub relation: Option<String>,
    pub object: Option<String>,
}

impl AssertionParts {
    pub fn part(&self, part: Part) -> Option<&str> {
        match part {
            Part::Subject => self.subject.as_deref(),
            Part::Relation => self.relation.as_deref(),
            Part::Object => self.object.as_deref(),
        }
    }

    pub fn to_assertion(&self) -> Option<Assertion> {
        Some(Assertion {
            subject: self.subject.clone()?,
            relation: self.relation.clone()?,
            object: self.object.clone()?,
        })
    }
}

/// Result of parsing a model output string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedOutput {
    pub specific: Option<AssertionParts>,
    pub general: Option<AssertionParts>,
    /// GLUCOSE output without the `**` separator: only the specific side
    /// was parsed.
    pub degenerate: bool,
    pub issues: Vec<String>,
}

/// The GLUCOSE connective phrases recognized when splitting output sides.
pub fn default_connectives() -> Vec<String> {
    ["Causes/Enables", "Results in", "Motivates", "Enables", "Causes"]
        .into_iter()
        .map(str::to_string)
        .collect()
}

fn split_side(side: &str, connectives: &[String]) -> Option<AssertionParts> {
    let side = side.trim();
    // `>connective>` wrapped form first; the wrapper stays on the relation
    // so wrapped gold text round-trips verbatim.
    if let Some(open) = side.find('>') {
        if let Some(close) = side[open + 1..].find('>').map(|i| open + 1 + i) {
            let subject = side[..open].trim();
            let inner = side[open + 1..close].trim();
            let object = side[close + 1..].trim();
            if !subject.is_empty() && !inner.is_empty() && !object.is_empty() {
                return Some(AssertionParts {
                    subject: Some(subject.to_string()),
                    relation: Some(side[open..=close].trim().to_string()),
                    object: Some(object.to_string()),
                });
            }
        }
    }
    let mut sorted: Vec<&String> = connectives.iter().collect();
    sorted.sort_by_key(|c| std::cmp::Reverse(c.len()));
    for connective in sorted {
        let needle = format!(" {connective} ");
        if let Some(at) = side.find(&needle) {
            let subject = side[..at].trim();
            let object = side[at + needle.len()..].trim();
            if !subject.is_empty() && !object.is_empty() {
                return Some(AssertionParts {
                    subject: Some(subject.to_string()),
                    relation: Some(connective.clone()),
                    object: Some(object.to_string()),
                });
            }
        }
    }
    None
}

/// Parses a model output back into assertion parts.
///
/// GLUCOSE outputs split on `**` and then each side on its connective;
/// ParaCOMET outputs map entirely to the specific object.
pub fn parse_output(text: &str, kind: DatasetKind, connectives: &[String]) -> ParsedOutput {
    let trimmed = text.trim();
    match kind {
        DatasetKind::Paracomet => {
            if trimmed.is_empty() {
                ParsedOutput {
                    issues: vec!["empty output".to_string()],
                    ..ParsedOutput::default()
                }
            } else {
                ParsedOutput {
                    specific: Some(AssertionParts {
                        object: Some(trimmed.to_string()),
                        ..AssertionParts::default()
                    }),
                    ..ParsedOutput::default()
                }
            }
        }
        DatasetKind::Glucose => {
            let mut out = ParsedOutput::default();
            let (specific_text, general_text) = match trimmed.split_once(" ** ") {
                Some((s, g)) => (s, Some(g)),
                None => {
                    out.degenerate = true;
                    out.issues.push("missing ** separator".to_string());
                    (trimmed, None)
                }
            };
            out.specific = split_side(specific_text, connectives);
            if out.specific.is_none() {
                out.issues.push("unsplittable specific side".to_string());
            }
            if let Some(general_text) = general_text {
                out.general = split_side(general_text, connectives);
                if out.general.is_none() {
                    out.issues.push("unsplittable general side".to_string());
                }
            }
            out
        }
    }
}

/// The ordered special-token list for tokenizer extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenVocabulary {
    pub tokens: Vec<String>,
}

impl TokenVocabulary {
    /// One token per line, UTF-8.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut writer = BufWriter::new(File::create(path)?);
        for token in &self.tokens {
            writeln!(writer, "{token}")?;
        }
        writer.flush()
    }
}

/// Emits the full special-token vocabulary for a dataset kind.
///
/// GLUCOSE needs exactly the marker and substitution tokens. ParaCOMET adds
/// `<|sent0|>..<|sent{max_sentences-1}|>` and one token per configured
/// relation (first occurrence wins on duplicates).
pub fn emit_vocab(
    kind: DatasetKind,
    max_sentences: usize,
    relations: &[String],
) -> Result<TokenVocabulary, FormatError> {
    let tokens = match kind {
        DatasetKind::Glucose => vec![
            TOK_SUBJ.to_string(),
            TOK_REL.to_string(),
            TOK_OBJ.to_string(),
            TOK_SPECIFIC.to_string(),
            TOK_GENERAL.to_string(),
            TOK_SYN.to_string(),
            TOK_ANT.to_string(),
        ],
        DatasetKind::Paracomet => {
            if max_sentences == 0 {
                return Err(FormatError::MaxSentencesZero);
            }
            let mut tokens = vec![
                TOK_SUBJ.to_string(),
                TOK_REL.to_string(),
                TOK_OBJ.to_string(),
                TOK_SYN.to_string(),
                TOK_ANT.to_string(),
            ];
            tokens.extend((0..max_sentences).map(sentence_token));
            for relation in relations {
                let token = relation_token(relation);
                if !tokens.contains(&token) {
                    tokens.push(token);
                }
            }
            tokens
        }
    };
    Ok(TokenVocabulary { tokens })
}

/// Writes rendered examples as JSONL with stable field order.
pub fn write_examples(path: &Path, examples: &[RenderedExample]) -> io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    for example in examples {
        serde_json::to_writer(&mut writer, example)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Reads rendered examples back from JSONL.
pub fn read_examples(path: &Path) -> io::Result<Vec<RenderedExample>> {
    let contents = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in contents.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let example: RenderedExample =
            serde_json::from_str(line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        out.push(example);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::hockey_glucose_record;
    use crate::corpus::Story;
    use crate::hinting::tests::hockey_paracomet_record;
    use crate::hinting::{HintElement, Scope};
    use crate::lexsub::Lexicon;
    use crate::rng::RngKey;

    const APPENDIX_C_SOURCE: &str = "The hockey game was tied up. The red team had the puck. They sprinted down the ice. They cracked a shot on goal! They scored a final goal! <|sent5|> <|xEffect|>";

    fn one_based() -> RenderOptions {
        RenderOptions {
            index_base: IndexBase::One,
            ..RenderOptions::default()
        }
    }

    #[test]
    fn causal_golden_without_hint() {
        let record = hockey_paracomet_record();
        let example = render_paracomet_causal(&record, None, &[], &one_based()).unwrap();
        assert_eq!(example.source, APPENDIX_C_SOURCE);
        assert_eq!(example.target, "win the game");
        assert!(!example.meta.hinted);
        assert_eq!(example.meta.hint_slots, Vec::<String>::new());
    }

    #[test]
    fn causal_golden_with_rel_obj_hint() {
        let record = hockey_paracomet_record();
        let hint = Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Relation, "xEffect"),
            HintElement::new(Scope::Unscoped, Part::Object, "they win the game"),
        ])
        .unwrap();
        let rendered = RenderedHint::from_hint(&hint, DatasetKind::Paracomet);
        let example = render_paracomet_causal(&record, Some(&rendered), &[], &one_based()).unwrap();
        assert!(example
            .source
            .ends_with("<|sent5|> <|xEffect|> (<|rel|> <|xEffect|>, <|obj|> they win the game)"));
        assert!(example.meta.hinted);
        assert_eq!(example.meta.hint_slots, vec!["rel", "obj"]);
    }

    #[test]
    fn causal_single_sentence_zero_base() {
        let mut record = hockey_paracomet_record();
        record.story = Story {
            id: "tiny".to_string(),
            sentences: vec!["Only one sentence here.".to_string()],
        };
        record.target_index = 0;
        record.dimension = Dimension::Relation("xAttr".to_string());
        record.specific.relation = "xAttr".to_string();
        let example =
            render_paracomet_causal(&record, None, &[], &RenderOptions::default()).unwrap();
        assert_eq!(example.source, "Only one sentence here. <|sent0|> <|xAttr|>");
    }

    #[test]
    fn sentence_token_limit_is_enforced() {
        let record = hockey_paracomet_record();
        let opts = RenderOptions {
            index_base: IndexBase::One,
            max_sentences: 5,
            ..RenderOptions::default()
        };
        let err = render_paracomet_causal(&record, None, &[], &opts).unwrap_err();
        assert_eq!(
            err,
            FormatError::SentenceTokenOutOfRange {
                display_index: 5,
                max: 5
            }
        );
    }

    #[test]
    fn seq2seq_golden() {
        let record = hockey_paracomet_record();
        let example = render_paracomet_seq2seq(&record, None, &[], &one_based()).unwrap();
        assert_eq!(example.source, format!("source: {APPENDIX_C_SOURCE}"));
        assert_eq!(example.target, "win the game");
    }

    #[test]
    fn seq2seq_hint_and_synonym_prefixes() {
        let record = hockey_paracomet_record();
        let hint = Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Subject, "the red team"),
            HintElement::new(Scope::Unscoped, Part::Relation, "xEffect"),
        ])
        .unwrap();
        let lexicon = Lexicon::from_pairs(&[("team", "squad")], &[]);
        let substituted = crate::lexsub::substitute_hint(
            &hint,
            DatasetKind::Paracomet,
            SubstKind::Synonym,
            &lexicon,
            &RngKey::new(0, 0, &record.id),
        );
        let rendered = RenderedHint::from_hint(&hint, DatasetKind::Paracomet);
        let example =
            render_paracomet_seq2seq(&record, Some(&rendered), &[substituted], &one_based())
                .unwrap();
        assert!(example.source.contains(
            " hint: (<|subj|> the red team, <|rel|> <|xEffect|>) synonym: (<|subj|> the red squad, <|rel|> <|xEffect|>, <|syn|>)"
        ));
        assert_eq!(example.meta.subst_kinds, vec!["synonym"]);
    }

    #[test]
    fn substitution_without_hint_is_suppressed() {
        let record = hockey_paracomet_record();
        let hint = Hint::new(vec![HintElement::new(
            Scope::Unscoped,
            Part::Subject,
            "the red team",
        )])
        .unwrap();
        let substituted = crate::lexsub::substitute_hint(
            &hint,
            DatasetKind::Paracomet,
            SubstKind::Synonym,
            &Lexicon::empty(),
            &RngKey::new(0, 0, &record.id),
        );
        let example =
            render_paracomet_seq2seq(&record, None, &[substituted], &one_based()).unwrap();
        assert!(!example.source.contains("synonym:"));
        assert!(!example.source.contains("hint:"));
        assert_eq!(example.meta.subst_kinds, Vec::<String>::new());
    }

    #[test]
    fn glucose_golden_without_hint() {
        let record = hockey_glucose_record();
        let example = render_glucose(&record, None, &[], &RenderOptions::default()).unwrap();
        assert_eq!(
            example.source,
            "1: The hockey game was tied up. The red team had the puck. They sprinted down the ice. They cracked a shot on goal! *They scored a final goal!*"
        );
        assert_eq!(
            example.target,
            "The red team scores Causes/Enables they win the game ** People_A score Causes/Enables People_A win a game"
        );
    }

    #[test]
    fn glucose_hint_placement() {
        let mut record = hockey_glucose_record();
        record.general.as_mut().unwrap().object = "People_A win the game".to_string();
        let hint = Hint::new(vec![
            HintElement::new(Scope::Specific, Part::Subject, "The red team scores"),
            HintElement::new(Scope::General, Part::Object, "People_A win the game"),
        ])
        .unwrap();
        let rendered = RenderedHint::from_hint(&hint, DatasetKind::Glucose);
        let example =
            render_glucose(&record, Some(&rendered), &[], &RenderOptions::default()).unwrap();
        assert!(example.source.ends_with(
            " hint: (<|specific|><|subj|> The red team scores, <|general|><|obj|> People_A win the game)"
        ));
    }

    #[test]
    fn glucose_dimension_must_be_in_range() {
        let mut record = hockey_glucose_record();
        record.dimension = Dimension::Glucose(11);
        let err = render_glucose(&record, None, &[], &RenderOptions::default()).unwrap_err();
        assert!(matches!(err, FormatError::DimensionOutOfRange { .. }));
    }

    #[test]
    fn wrong_kind_is_an_error() {
        let record = hockey_glucose_record();
        let err =
            render_paracomet_causal(&record, None, &[], &RenderOptions::default()).unwrap_err();
        assert!(matches!(err, FormatError::WrongDatasetKind { .. }));
    }

    #[test]
    fn glucose_target_round_trips_through_parse_output() {
        let record = hockey_glucose_record();
        let example = render_glucose(&record, None, &[], &RenderOptions::default()).unwrap();
        let parsed = parse_output(&example.target, DatasetKind::Glucose, &default_connectives());
        assert!(!parsed.degenerate);
        assert_eq!(
            parsed.specific.unwrap().to_assertion().unwrap(),
            record.specific
        );
        assert_eq!(
            parsed.general.unwrap().to_assertion().unwrap(),
            record.general.unwrap()
        );
    }

    #[test]
    fn parse_output_wrapped_connectives() {
        let parsed = parse_output(
            "A >Causes> B ** C >Causes> D",
            DatasetKind::Glucose,
            &default_connectives(),
        );
        let specific = parsed.specific.unwrap();
        assert_eq!(specific.subject.as_deref(), Some("A"));
        assert_eq!(specific.relation.as_deref(), Some(">Causes>"));
        assert_eq!(specific.object.as_deref(), Some("B"));
        assert_eq!(parsed.general.unwrap().subject.as_deref(), Some("C"));
    }

    #[test]
    fn parse_output_paracomet_is_the_object() {
        let parsed = parse_output("win the game", DatasetKind::Paracomet, &[]);
        assert_eq!(
            parsed.specific.unwrap().object.as_deref(),
            Some("win the game")
        );
        assert_eq!(parsed.general, None);
    }

    #[test]
    fn parse_output_missing_separator_is_degenerate() {
        let parsed = parse_output(
            "no separator here",
            DatasetKind::Glucose,
            &default_connectives(),
        );
        assert!(parsed.degenerate);
        assert_eq!(parsed.specific, None);
        assert!(!parsed.issues.is_empty());
    }

    #[test]
    fn vocab_glucose_is_exactly_the_marker_set() {
        let vocab = emit_vocab(DatasetKind::Glucose, 5, &[]).unwrap();
        assert_eq!(
            vocab.tokens,
            vec![
                "<|subj|>",
                "<|rel|>",
                "<|obj|>",
                "<|specific|>",
                "<|general|>",
                "<|syn|>",
                "<|ant|>"
            ]
        );
    }

    #[test]
    fn vocab_paracomet_counts_by_construction() {
        let relations: Vec<String> = crate::corpus::ATOMIC_RELATIONS
            .iter()
            .map(|r| r.to_string())
            .collect();
        let vocab = emit_vocab(DatasetKind::Paracomet, 5, &relations).unwrap();
        assert_eq!(vocab.tokens.len(), 3 + 2 + 5 + 9);
        assert!(vocab.tokens.contains(&"<|sent4|>".to_string()));
        assert!(!vocab.tokens.contains(&"<|sent5|>".to_string()));
        assert!(vocab.tokens.contains(&"<|xEffect|>".to_string()));
    }

    #[test]
    fn vocab_deduplicates_relations() {
        let relations = vec!["xEffect".to_string(), "xEffect".to_string()];
        let vocab = emit_vocab(DatasetKind::Paracomet, 1, &relations).unwrap();
        let count = vocab.tokens.iter().filter(|t| *t == "<|xEffect|>").count();
        assert_eq!(count, 1);
    }

    #[test]
    fn sources_never_contain_newlines() {
        let record = hockey_glucose_record();
        let example = render_glucose(&record, None, &[], &RenderOptions::default()).unwrap();
        assert!(!example.source.contains('\n'));
        assert!(!example.target.contains('\n'));
    }

    #[test]
    fn examples_round_trip_through_jsonl() {
        let record = hockey_glucose_record();
        let example = render_glucose(&record, None, &[], &RenderOptions::default()).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_examples(file.path(), &[example.clone()]).unwrap();
        let reread = read_examples(file.path()).unwrap();
        assert_eq!(reread, vec![example]);
    }
}
