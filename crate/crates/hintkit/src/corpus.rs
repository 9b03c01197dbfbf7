//! Story-aligned assertion data model and dataset ingestion.
//!
//! The canonical interchange format is JSONL with one [`CciRecord`] per line
//! and stable field order. GLUCOSE-style delimiter-separated files and
//! ParaCOMET-style JSON-lines alignment files are adapters on top of it;
//! their on-disk layout is described by an explicit column-mapping config so
//! the record model stays dataset-agnostic.
//!
//! Ingestion is total: every annotation unit in a well-formed input file
//! becomes either a record or a line-numbered reject, never a crash. Text
//! fields are stored verbatim apart from leading/trailing whitespace
//! trimming.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::split_sentences;

/// The nine ATOMIC social/causal relation tokens used by ParaCOMET.
pub const ATOMIC_RELATIONS: [&str; 9] = [
    "xIntent", "xNeed", "xAttr", "xEffect", "xWant", "xReact", "oEffect", "oWant", "oReact",
];

/// A story: an id plus its sentences in original order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    pub id: String,
    pub sentences: Vec<String>,
}

/// A (subject, relation, object) commonsense assertion.
///
/// The relation is either an ATOMIC relation token name (ParaCOMET) or the
/// GLUCOSE connective text stored verbatim (e.g. "Causes/Enables").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

/// Which task formulation a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Paracomet,
    Glucose,
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetKind::Paracomet => write!(f, "paracomet"),
            DatasetKind::Glucose => write!(f, "glucose"),
        }
    }
}

/// The dimension of commonsense a record asks about: an ATOMIC relation
/// token for ParaCOMET, an integer in 1..=10 for GLUCOSE.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dimension {
    Glucose(u8),
    Relation(String),
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Glucose(d) => write!(f, "{d}"),
            Dimension::Relation(r) => write!(f, "{r}"),
        }
    }
}

/// One story + target sentence + dimension + gold assertion(s): the unit of
/// augmentation.
///
/// `target_index` is 0-based; display bases are a rendering concern. The
/// `id` is assigned at ingestion, is unique within a file, and keys every
/// downstream sampling decision for the record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CciRecord {
    pub id: String,
    pub story: Story,
    pub target_index: usize,
    pub dataset_kind: DatasetKind,
    pub dimension: Dimension,
    pub specific: Assertion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general: Option<Assertion>,
}

impl CciRecord {
    /// The target sentence text, if `target_index` is in range.
    pub fn target_sentence(&self) -> Option<&str> {
        self.story.sentences.get(self.target_index).map(|s| s.as_str())
    }

    /// All type-invariant violations for this record; empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.story.sentences.is_empty() {
            out.push(Violation::EmptyStory);
        }
        for (i, s) in self.story.sentences.iter().enumerate() {
            if s.trim().is_empty() {
                out.push(Violation::EmptySentence { index: i });
            }
        }
        if self.target_index >= self.story.sentences.len() {
            out.push(Violation::TargetIndexOutOfRange {
                target_index: self.target_index,
                len: self.story.sentences.len(),
            });
        }
        for (field, value) in [
            ("specific.subject", &self.specific.subject),
            ("specific.relation", &self.specific.relation),
            ("specific.object", &self.specific.object),
        ] {
            if value.trim().is_empty() {
                out.push(Violation::EmptyField { field });
            }
        }
        match (self.dataset_kind, &self.general) {
            (DatasetKind::Glucose, None) => out.push(Violation::GeneralRequired),
            (DatasetKind::Paracomet, Some(_)) => out.push(Violation::GeneralForbidden),
            (DatasetKind::Glucose, Some(general)) => {
                for (field, value) in [
                    ("general.subject", &general.subject),
                    ("general.relation", &general.relation),
                    ("general.object", &general.object),
                ] {
                    if value.trim().is_empty() {
                        out.push(Violation::EmptyField { field });
                    }
                }
            }
            (DatasetKind::Paracomet, None) => {}
        }
        match (&self.dataset_kind, &self.dimension) {
            (DatasetKind::Glucose, Dimension::Glucose(d)) => {
                if !(1..=10).contains(d) {
                    out.push(Violation::DimensionOutOfRange { dimension: *d });
                }
            }
            (DatasetKind::Paracomet, Dimension::Relation(_)) => {}
            _ => out.push(Violation::DimensionKindMismatch),
        }
        out
    }
}

/// Returns the record untouched when all invariants hold, otherwise the
/// list of named violations. Violations are data, not failures.
pub fn validate(record: &CciRecord) -> Result<&CciRecord, Vec<Violation>> {
    let violations = record.violations();
    if violations.is_empty() {
        Ok(record)
    } else {
        Err(violations)
    }
}

/// A named invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TargetIndexOutOfRange { target_index: usize, len: usize },
    GeneralRequired,
    GeneralForbidden,
    DimensionOutOfRange { dimension: u8 },
    DimensionKindMismatch,
    EmptyStory,
    EmptySentence { index: usize },
    EmptyField { field: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TargetIndexOutOfRange { target_index, len } => {
                write!(f, "target_index out of range ({target_index} on {len} sentences)")
            }
            Violation::GeneralRequired => write!(f, "general required"),
            Violation::GeneralForbidden => write!(f, "general forbidden for paracomet records"),
            Violation::DimensionOutOfRange { dimension } => {
                write!(f, "dimension out of range ({dimension} not in 1..=10)")
            }
            Violation::DimensionKindMismatch => write!(f, "dimension kind mismatch"),
            Violation::EmptyStory => write!(f, "story has no sentences"),
            Violation::EmptySentence { index } => write!(f, "empty sentence at index {index}"),
            Violation::EmptyField { field } => write!(f, "empty field {field}"),
        }
    }
}

/// A rejected annotation unit: the input line it came from and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub line_no: u64,
    pub reason: String,
}

/// Everything ingestion produced. `units` counts the annotation units seen
/// in the input, so `records.len() + rejects.len() == units` always holds.
#[derive(Debug, Clone, Default)]
pub struct IngestOutcome {
    pub records: Vec<CciRecord>,
    pub rejects: Vec<Reject>,
    pub units: usize,
}

/// Hard ingestion failures (bad file, unresolvable schema). Per-record
/// problems are [`Reject`]s, not errors.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("{path} line {line}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        line: u64,
        #[source]
        source: serde_json::Error,
    },
    #[error("reading {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("column delimiter must be a single ASCII character, got {0:?}")]
    BadDelimiter(char),
}

/// How a GLUCOSE-style story cell is cut into sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceSplit {
    /// Split on a literal separator string present in the story cell.
    Delimiter(String),
    /// Split after `.`/`!`/`?` followed by whitespace.
    SentencePunctuation,
}

/// Column mapping for GLUCOSE-style delimiter-separated files.
///
/// `{dim}` in the assertion column patterns is replaced by the dimension
/// number; only dimensions whose specific and general columns both resolve
/// in the header are ingested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlucoseColumns {
    pub story: String,
    pub selected_sentence: String,
    pub story_id: Option<String>,
    pub specific_pattern: String,
    pub general_pattern: String,
    pub delimiter: char,
    pub sentence_split: SentenceSplit,
    /// Cell values meaning "this dimension was not annotated".
    pub absent_markers: Vec<String>,
    /// Keep the `>`…`>` wrapper on the connective instead of storing the
    /// inner text.
    pub keep_connective_wrapper: bool,
}

impl Default for GlucoseColumns {
    fn default() -> Self {
        Self {
            story: "story".to_string(),
            selected_sentence: "selected_sentence".to_string(),
            story_id: Some("story_id".to_string()),
            specific_pattern: "{dim}_specificNL".to_string(),
            general_pattern: "{dim}_generalNL".to_string(),
            delimiter: '\t',
            sentence_split: SentenceSplit::Delimiter("****".to_string()),
            absent_markers: vec!["escaped".to_string()],
            keep_connective_wrapper: false,
        }
    }
}

/// Options for ParaCOMET-style alignment files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParacometOptions {
    /// Accepted ATOMIC relation tokens; alignments with any other relation
    /// are rejected.
    pub relations: Vec<String>,
}

impl Default for ParacometOptions {
    fn default() -> Self {
        Self {
            relations: ATOMIC_RELATIONS.iter().map(|r| r.to_string()).collect(),
        }
    }
}

/// Splits `subject >connective> object` into its three parts.
///
/// Returns `None` when the text does not contain a non-empty `>`…`>`
/// connective with non-empty text on both sides.
pub fn split_assertion(text: &str, keep_wrapper: bool) -> Option<Assertion> {
    let open = text.find('>')?;
    let close = open + 1 + text[open + 1..].find('>')?;
    let subject = text[..open].trim();
    let inner = text[open + 1..close].trim();
    let relation = if keep_wrapper {
        text[open..=close].trim()
    } else {
        inner
    };
    let object = text[close + 1..].trim();
    if subject.is_empty() || inner.is_empty() || object.is_empty() {
        return None;
    }
    Some(Assertion {
        subject: subject.to_string(),
        relation: relation.to_string(),
        object: object.to_string(),
    })
}

fn has_embedded_newline(s: &str) -> bool {
    s.contains('\n') || s.contains('\r')
}

fn split_story(cell: &str, mode: &SentenceSplit) -> Vec<String> {
    match mode {
        SentenceSplit::Delimiter(sep) => cell
            .split(sep.as_str())
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        SentenceSplit::SentencePunctuation => split_sentences(cell)
            .into_iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
    }
}

/// Ingests a GLUCOSE-style delimiter-separated file.
///
/// One record per (story, dimension) annotation; the target index is the
/// first exact match of the selected sentence within the story.
pub fn ingest_glucose(path: &Path, columns: &GlucoseColumns) -> Result<IngestOutcome, IngestError> {
    if !columns.delimiter.is_ascii() {
        return Err(IngestError::BadDelimiter(columns.delimiter));
    }
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(columns.delimiter as u8)
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|source| IngestError::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let story_idx = col(&columns.story).ok_or_else(|| IngestError::MissingColumn(columns.story.clone()))?;
    let selected_idx = col(&columns.selected_sentence)
        .ok_or_else(|| IngestError::MissingColumn(columns.selected_sentence.clone()))?;
    let story_id_idx = match &columns.story_id {
        Some(name) => Some(col(name).ok_or_else(|| IngestError::MissingColumn(name.clone()))?),
        None => None,
    };
    // Dimensions are ingested only where both assertion columns resolve.
    let mut dims = Vec::new();
    for dim in 1u8..=10 {
        let spec_name = columns.specific_pattern.replace("{dim}", &dim.to_string());
        let gen_name = columns.general_pattern.replace("{dim}", &dim.to_string());
        if let (Some(s), Some(g)) = (col(&spec_name), col(&gen_name)) {
            dims.push((dim, s, g));
        }
    }

    let mut outcome = IngestOutcome::default();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(source) => {
                // A physically malformed row is one rejected unit.
                let line_no = source
                    .position()
                    .map(|p| p.line())
                    .unwrap_or_default();
                outcome.units += 1;
                outcome.rejects.push(Reject {
                    line_no,
                    reason: format!("malformed row: {source}"),
                });
                continue;
            }
        };
        let line_no = row.position().map(|p| p.line()).unwrap_or_default();
        let cell = |idx: usize| row.get(idx).unwrap_or_default().trim();

        let story_cell = cell(story_idx);
        let selected = cell(selected_idx);
        let story_id = match story_id_idx {
            Some(idx) => {
                let v = cell(idx);
                if v.is_empty() {
                    format!("row{line_no}")
                } else {
                    v.to_string()
                }
            }
            None => format!("row{line_no}"),
        };

        let reject_row = |reason: String, outcome: &mut IngestOutcome| {
            outcome.units += 1;
            outcome.rejects.push(Reject { line_no, reason });
        };
        if has_embedded_newline(story_cell) || has_embedded_newline(selected) {
            reject_row("embedded newline in story or selected sentence".to_string(), &mut outcome);
            continue;
        }
        let sentences = split_story(story_cell, &columns.sentence_split);
        if sentences.is_empty() {
            reject_row("empty story".to_string(), &mut outcome);
            continue;
        }
        if selected.is_empty() {
            reject_row("empty selected sentence".to_string(), &mut outcome);
            continue;
        }
        let target_index = match sentences.iter().position(|s| s == selected) {
            Some(i) => i,
            None => {
                reject_row("selected sentence not found in story".to_string(), &mut outcome);
                continue;
            }
        };

        for &(dim, spec_idx, gen_idx) in &dims {
            let absent = |v: &str| v.is_empty() || columns.absent_markers.iter().any(|m| m == v);
            let spec_text = cell(spec_idx);
            let gen_text = cell(gen_idx);
            if absent(spec_text) && absent(gen_text) {
                continue;
            }
            outcome.units += 1;
            let mut reject = |reason: String| {
                outcome.rejects.push(Reject { line_no, reason });
            };
            if absent(spec_text) {
                reject(format!("missing specific assertion (dimension {dim})"));
                continue;
            }
            if absent(gen_text) {
                reject(format!("missing general assertion (dimension {dim})"));
                continue;
            }
            if has_embedded_newline(spec_text) || has_embedded_newline(gen_text) {
                reject(format!("embedded newline in assertion (dimension {dim})"));
                continue;
            }
            let specific = match split_assertion(spec_text, columns.keep_connective_wrapper) {
                Some(a) => a,
                None => {
                    reject(format!("unsplittable assertion (dimension {dim}, specific)"));
                    continue;
                }
            };
            let general = match split_assertion(gen_text, columns.keep_connective_wrapper) {
                Some(a) => a,
                None => {
                    reject(format!("unsplittable assertion (dimension {dim}, general)"));
                    continue;
                }
            };
            let id = format!("{story_id}#{dim}#{}", outcome.records.len());
            outcome.records.push(CciRecord {
                id,
                story: Story {
                    id: story_id.clone(),
                    sentences: sentences.clone(),
                },
                target_index,
                dataset_kind: DatasetKind::Glucose,
                dimension: Dimension::Glucose(dim),
                specific,
                general: Some(general),
            });
        }
    }
    Ok(outcome)
}

#[derive(Debug, Deserialize)]
struct AlignmentLine {
    #[serde(default)]
    id: Option<String>,
    sentences: Vec<String>,
    alignments: Vec<Alignment>,
}

#[derive(Debug, Deserialize)]
struct Alignment {
    /// 0-based index into `sentences`.
    sentence: usize,
    relation: String,
    objects: Vec<String>,
}

/// Ingests a ParaCOMET-style JSON-lines alignment file.
///
/// Each line holds one story and its per-sentence `relation -> objects`
/// alignments; every (sentence, relation, object) triple becomes one record.
pub fn ingest_paracomet(path: &Path, options: &ParacometOptions) -> Result<IngestOutcome, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut outcome = IngestOutcome::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = (i + 1) as u64;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: AlignmentLine =
            serde_json::from_str(&line).map_err(|source| IngestError::Json {
                path: path.to_path_buf(),
                line: line_no,
                source,
            })?;
        let story_id = parsed.id.unwrap_or_else(|| format!("story{line_no}"));
        let sentences: Vec<String> = parsed
            .sentences
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        if sentences.is_empty() || sentences.iter().any(|s| s.is_empty() || has_embedded_newline(s)) {
            outcome.units += 1;
            outcome.rejects.push(Reject {
                line_no,
                reason: "story has empty or multi-line sentences".to_string(),
            });
            continue;
        }
        for alignment in &parsed.alignments {
            for object in &alignment.objects {
                outcome.units += 1;
                let object = object.trim();
                let mut reject = |reason: String| {
                    outcome.rejects.push(Reject { line_no, reason });
                };
                if !options.relations.iter().any(|r| r == &alignment.relation) {
                    reject(format!("unknown relation token {:?}", alignment.relation));
                    continue;
                }
                if alignment.sentence >= sentences.len() {
                    reject(format!(
                        "sentence index {} out of range ({} sentences)",
                        alignment.sentence,
                        sentences.len()
                    ));
                    continue;
                }
                if object.is_empty() || has_embedded_newline(object) {
                    reject("empty or multi-line object".to_string());
                    continue;
                }
                let id = format!(
                    "{story_id}#{}#{}",
                    alignment.relation,
                    outcome.records.len()
                );
                outcome.records.push(CciRecord {
                    id,
                    story: Story {
                        id: story_id.clone(),
                        sentences: sentences.clone(),
                    },
                    target_index: alignment.sentence,
                    dataset_kind: DatasetKind::Paracomet,
                    dimension: Dimension::Relation(alignment.relation.clone()),
                    specific: Assertion {
                        subject: sentences[alignment.sentence].clone(),
                        relation: alignment.relation.clone(),
                        object: object.to_string(),
                    },
                    general: None,
                });
            }
        }
    }
    Ok(outcome)
}

/// Reads canonical JSONL records.
pub fn read_records(path: &Path) -> Result<Vec<CciRecord>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CciRecord = serde_json::from_str(&line).map_err(|source| IngestError::Json {
            path: path.to_path_buf(),
            line: (i + 1) as u64,
            source,
        })?;
        records.push(record);
    }
    Ok(records)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> io::Result<()> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Writes canonical JSONL, one record per line, stable field order.
pub fn write_records(path: &Path, records: &[CciRecord]) -> io::Result<()> {
    write_jsonl(path, records)
}

/// Writes the rejects report as JSONL of `{line_no, reason}`.
pub fn write_rejects(path: &Path, rejects: &[Reject]) -> io::Result<()> {
    write_jsonl(path, rejects)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const HOCKEY_SENTENCES: [&str; 5] = [
        "The hockey game was tied up.",
        "The red team had the puck.",
        "They sprinted down the ice.",
        "They cracked a shot on goal!",
        "They scored a final goal!",
    ];

    fn hockey_story_cell() -> String {
        HOCKEY_SENTENCES.join("****")
    }

    fn glucose_fixture() -> String {
        let header = "story_id\tstory\tselected_sentence\t1_specificNL\t1_generalNL";
        let row = format!(
            "hockey\t{}\tThey scored a final goal!\tThe red team scores >Causes/Enables> they win the game\tPeople_A score >Causes/Enables> People_A win a game",
            hockey_story_cell()
        );
        format!("{header}\n{row}\n")
    }

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    pub(crate) fn hockey_glucose_record() -> CciRecord {
        CciRecord {
            id: "hockey#1#0".to_string(),
            story: Story {
                id: "hockey".to_string(),
                sentences: HOCKEY_SENTENCES.iter().map(|s| s.to_string()).collect(),
            },
            target_index: 4,
            dataset_kind: DatasetKind::Glucose,
            dimension: Dimension::Glucose(1),
            specific: Assertion {
                subject: "The red team scores".to_string(),
                relation: "Causes/Enables".to_string(),
                object: "they win the game".to_string(),
            },
            general: Some(Assertion {
                subject: "People_A score".to_string(),
                relation: "Causes/Enables".to_string(),
                object: "People_A win a game".to_string(),
            }),
        }
    }

    #[test]
    fn glucose_hockey_row_ingests() {
        let f = write_temp(&glucose_fixture());
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        assert_eq!(outcome.rejects, vec![]);
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.units, 1);
        assert_eq!(outcome.records[0], hockey_glucose_record());
    }

    #[test]
    fn glucose_first_sentence_targets_index_zero() {
        let mut fixture = glucose_fixture();
        fixture = fixture.replace(
            "\tThey scored a final goal!\t",
            "\tThe hockey game was tied up.\t",
        );
        let f = write_temp(&fixture);
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        assert_eq!(outcome.records[0].target_index, 0);
    }

    #[test]
    fn glucose_unsplittable_assertion_is_rejected() {
        let fixture = glucose_fixture().replace(
            "The red team scores >Causes/Enables> they win the game",
            "no connective in here",
        );
        let f = write_temp(&fixture);
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        assert_eq!(outcome.records.len(), 0);
        assert_eq!(outcome.rejects.len(), 1);
        assert!(outcome.rejects[0].reason.contains("unsplittable assertion"));
        assert_eq!(outcome.rejects[0].line_no, 2);
        assert_eq!(outcome.units, 1);
    }

    #[test]
    fn glucose_missing_column_is_a_hard_error() {
        let f = write_temp("story_id\tstory\n1\tabc\n");
        let err = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap_err();
        match err {
            IngestError::MissingColumn(name) => assert_eq!(name, "selected_sentence"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn glucose_selected_sentence_not_found_is_rejected() {
        let fixture = glucose_fixture().replace(
            "\tThey scored a final goal!\t",
            "\tA sentence from another story.\t",
        );
        let f = write_temp(&fixture);
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        assert_eq!(outcome.records.len(), 0);
        assert_eq!(outcome.rejects.len(), 1);
        assert!(outcome.rejects[0].reason.contains("selected sentence not found"));
    }

    #[test]
    fn glucose_absent_marker_skips_dimension() {
        let header = "story_id\tstory\tselected_sentence\t1_specificNL\t1_generalNL\t2_specificNL\t2_generalNL";
        let row = format!(
            "hockey\t{}\tThey scored a final goal!\tA >Causes> B\tC >Causes> D\tescaped\tescaped",
            hockey_story_cell()
        );
        let f = write_temp(&format!("{header}\n{row}\n"));
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.units, 1);
        assert_eq!(outcome.records[0].dimension, Dimension::Glucose(1));
    }

    #[test]
    fn glucose_verbatim_preservation() {
        let fixture = glucose_fixture();
        let f = write_temp(&fixture);
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        let record = &outcome.records[0];
        for text in [
            &record.specific.subject,
            &record.specific.relation,
            &record.specific.object,
            &record.general.as_ref().unwrap().subject,
        ] {
            assert!(fixture.contains(text.as_str()), "{text:?} not verbatim in input");
        }
        for sentence in &record.story.sentences {
            assert!(fixture.contains(sentence.as_str()));
        }
    }

    #[test]
    fn glucose_keep_connective_wrapper() {
        let f = write_temp(&glucose_fixture());
        let columns = GlucoseColumns {
            keep_connective_wrapper: true,
            ..GlucoseColumns::default()
        };
        let outcome = ingest_glucose(f.path(), &columns).unwrap();
        assert_eq!(outcome.records[0].specific.relation, ">Causes/Enables>");
    }

    fn paracomet_fixture() -> String {
        let sentences: Vec<String> = HOCKEY_SENTENCES.iter().map(|s| s.to_string()).collect();
        serde_json::to_string(&serde_json::json!({
            "id": "hockey",
            "sentences": sentences,
            "alignments": [
                {"sentence": 4, "relation": "xEffect", "objects": ["win the game"]},
            ],
        }))
        .unwrap()
            + "\n"
    }

    #[test]
    fn paracomet_hockey_alignment_ingests() {
        let f = write_temp(&paracomet_fixture());
        let outcome = ingest_paracomet(f.path(), &ParacometOptions::default()).unwrap();
        assert_eq!(outcome.rejects, vec![]);
        assert_eq!(outcome.records.len(), 1);
        let record = &outcome.records[0];
        assert_eq!(record.target_index, 4);
        assert_eq!(record.dimension, Dimension::Relation("xEffect".to_string()));
        assert_eq!(record.specific.subject, "They scored a final goal!");
        assert_eq!(record.specific.relation, "xEffect");
        assert_eq!(record.specific.object, "win the game");
        assert_eq!(record.general, None);
    }

    #[test]
    fn paracomet_unknown_relation_is_rejected() {
        let fixture = paracomet_fixture().replace("xEffect", "notARelation");
        let f = write_temp(&fixture);
        let outcome = ingest_paracomet(f.path(), &ParacometOptions::default()).unwrap();
        assert_eq!(outcome.records.len(), 0);
        assert_eq!(outcome.rejects.len(), 1);
        assert!(outcome.rejects[0].reason.contains("unknown relation token"));
        assert_eq!(outcome.units, 1);
    }

    #[test]
    fn paracomet_single_sentence_story() {
        let line = serde_json::json!({
            "id": "tiny",
            "sentences": ["Only one sentence here."],
            "alignments": [{"sentence": 0, "relation": "xAttr", "objects": ["brief"]}],
        });
        let f = write_temp(&format!("{line}\n"));
        let outcome = ingest_paracomet(f.path(), &ParacometOptions::default()).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.records[0].target_index, 0);
    }

    #[test]
    fn paracomet_multiple_objects_emit_one_record_each() {
        let line = serde_json::json!({
            "id": "multi",
            "sentences": ["A.", "B."],
            "alignments": [{"sentence": 1, "relation": "xWant", "objects": ["rest", "celebrate"]}],
        });
        let f = write_temp(&format!("{line}\n"));
        let outcome = ingest_paracomet(f.path(), &ParacometOptions::default()).unwrap();
        assert_eq!(outcome.records.len(), 2);
        assert_eq!(outcome.units, 2);
        assert_ne!(outcome.records[0].id, outcome.records[1].id);
    }

    #[test]
    fn canonical_jsonl_round_trips() {
        let f = write_temp(&glucose_fixture());
        let outcome = ingest_glucose(f.path(), &GlucoseColumns::default()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_records(out.path(), &outcome.records).unwrap();
        let reread = read_records(out.path()).unwrap();
        assert_eq!(reread, outcome.records);
    }

    #[test]
    fn validate_flags_bad_records() {
        let good = hockey_glucose_record();
        assert!(validate(&good).is_ok());

        let mut bad_index = good.clone();
        bad_index.target_index = 99;
        let violations = validate(&bad_index).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::TargetIndexOutOfRange { .. })));

        let mut no_general = good.clone();
        no_general.general = None;
        let violations = validate(&no_general).unwrap_err();
        assert!(violations.contains(&Violation::GeneralRequired));

        let mut bad_dim = good;
        bad_dim.dimension = Dimension::Glucose(11);
        let violations = validate(&bad_dim).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DimensionOutOfRange { .. })));
    }

    #[test]
    fn split_assertion_variants() {
        assert_eq!(
            split_assertion("A >Causes> B", false),
            Some(Assertion {
                subject: "A".to_string(),
                relation: "Causes".to_string(),
                object: "B".to_string(),
            })
        );
        assert_eq!(split_assertion("no connective", false), None);
        assert_eq!(split_assertion(">Causes> B", false), None);
        assert_eq!(split_assertion("A >> B", false), None);
    }
}
