//! Controllability benchmark: forced-hint suites and overlap scoring.
//!
//! The benchmark fixes six slot combinations (general subject, specific
//! subject+relation, ...), builds one forced-hint input per (record, combo)
//! with the gold element texts, and then measures how much of each hinted
//! element shows up in the model's output: the hinted slot texts are parsed
//! back out of the output and scored against the hint texts with corpus
//! BLEU, one score per combo.
//!
//! A model that echoes every hinted element verbatim scores exactly 100 in
//! every combo; unparseable outputs score as empty hypotheses so `n` stays
//! comparable across models.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CciRecord, DatasetKind};
use crate::formats::{
    parse_output, render_glucose, ParsedOutput, RenderOptions, RenderedExample, RenderedHint,
};
use crate::hinting::{parse_hint, Hint, HintElement, HintParseError, Part, Scope, Slot};
use crate::metrics::{bleu, MetricError};

/// The six slot combinations measured by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlCombo {
    GeneralSubj,
    GeneralSubjRel,
    SpecificSubj,
    SpecificSubjRel,
    SpecificSubjRelGeneralSubj,
    SpecificSubjRelGeneralSubjRel,
}

impl ControlCombo {
    pub fn all() -> [ControlCombo; 6] {
        [
            ControlCombo::GeneralSubj,
            ControlCombo::GeneralSubjRel,
            ControlCombo::SpecificSubj,
            ControlCombo::SpecificSubjRel,
            ControlCombo::SpecificSubjRelGeneralSubj,
            ControlCombo::SpecificSubjRelGeneralSubjRel,
        ]
    }

    /// Human-readable label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            ControlCombo::GeneralSubj => "General Subject",
            ControlCombo::GeneralSubjRel => "General Subj.+Rel.",
            ControlCombo::SpecificSubj => "Specific Subject",
            ControlCombo::SpecificSubjRel => "Specific Subj.+Rel.",
            ControlCombo::SpecificSubjRelGeneralSubj => "Specific Subj.+Rel. & General Subj.",
            ControlCombo::SpecificSubjRelGeneralSubjRel => "Specific Subj.+Rel. & General Subj.+Rel.",
        }
    }

    /// Flag-friendly name accepted on the command line.
    pub fn cli_name(&self) -> &'static str {
        match self {
            ControlCombo::GeneralSubj => "general-subj",
            ControlCombo::GeneralSubjRel => "general-subj-rel",
            ControlCombo::SpecificSubj => "specific-subj",
            ControlCombo::SpecificSubjRel => "specific-subj-rel",
            ControlCombo::SpecificSubjRelGeneralSubj => "specific-subj-rel+general-subj",
            ControlCombo::SpecificSubjRelGeneralSubjRel => "specific-subj-rel+general-subj-rel",
        }
    }

    pub fn parse(name: &str) -> Option<ControlCombo> {
        ControlCombo::all()
            .into_iter()
            .find(|c| c.cli_name() == name || c.label() == name)
    }

    /// The hinted slots, canonical order. Always a non-empty proper subset
    /// of the six GLUCOSE slots.
    pub fn slots(&self) -> Vec<Slot> {
        let spec_subj = Slot::new(Scope::Specific, Part::Subject);
        let spec_rel = Slot::new(Scope::Specific, Part::Relation);
        let gen_subj = Slot::new(Scope::General, Part::Subject);
        let gen_rel = Slot::new(Scope::General, Part::Relation);
        match self {
            ControlCombo::GeneralSubj => vec![gen_subj],
            ControlCombo::GeneralSubjRel => vec![gen_subj, gen_rel],
            ControlCombo::SpecificSubj => vec![spec_subj],
            ControlCombo::SpecificSubjRel => vec![spec_subj, spec_rel],
            ControlCombo::SpecificSubjRelGeneralSubj => vec![spec_subj, spec_rel, gen_subj],
            ControlCombo::SpecificSubjRelGeneralSubjRel => {
                vec![spec_subj, spec_rel, gen_subj, gen_rel]
            }
        }
    }
}

/// One combo's overlap score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlScore {
    pub combo: String,
    pub overlap_bleu: f64,
    pub n: usize,
}

/// A (record, combo) pair that could not be turned into a test input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlReject {
    pub record_id: String,
    pub combo: String,
    pub reason: String,
}

/// Output of [`build_control_suite`].
#[derive(Debug, Clone, Default)]
pub struct ControlSuite {
    pub examples: Vec<RenderedExample>,
    pub rejects: Vec<ControlReject>,
}

fn element_text(record: &CciRecord, slot: Slot) -> Option<String> {
    let assertion = match slot.scope {
        Scope::Specific => Some(&record.specific),
        Scope::General => record.general.as_ref(),
        Scope::Unscoped => None,
    }?;
    let text = match slot.part {
        Part::Subject => &assertion.subject,
        Part::Relation => &assertion.relation,
        Part::Object => &assertion.object,
    };
    if text.trim().is_empty() {
        None
    } else {
        Some(text.clone())
    }
}

/// Builds the forced-hint test inputs: one rendered example per
/// (record, combo), hint gate forced on, hint filled with the record's gold
/// element texts. Records missing a required element are skipped with a
/// reject reason.
pub fn build_control_suite(records: &[CciRecord], combos: &[ControlCombo]) -> ControlSuite {
    let mut suite = ControlSuite::default();
    let opts = RenderOptions::default();
    for record in records {
        for combo in combos {
            let reject = |reason: String, suite: &mut ControlSuite| {
                suite.rejects.push(ControlReject {
                    record_id: record.id.clone(),
                    combo: combo.cli_name().to_string(),
                    reason,
                });
            };
            if record.dataset_kind != DatasetKind::Glucose {
                reject("not a glucose record".to_string(), &mut suite);
                continue;
            }
            let mut elements = Vec::new();
            let mut missing = None;
            for slot in combo.slots() {
                match element_text(record, slot) {
                    Some(text) => elements.push(HintElement { slot, text }),
                    None => {
                        missing = Some(slot);
                        break;
                    }
                }
            }
            if let Some(slot) = missing {
                reject(format!("missing element {slot}"), &mut suite);
                continue;
            }
            let hint = match Hint::new(elements) {
                Ok(hint) => hint,
                Err(e) => {
                    reject(e.to_string(), &mut suite);
                    continue;
                }
            };
            let rendered = RenderedHint::from_hint(&hint, DatasetKind::Glucose);
            match render_glucose(record, Some(&rendered), &[], &opts) {
                Ok(mut example) => {
                    example.meta.combo = Some(combo.cli_name().to_string());
                    suite.examples.push(example);
                }
                Err(e) => reject(e.to_string(), &mut suite),
            }
        }
    }
    suite
}

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("length mismatch: {outputs} outputs vs {suite} suite examples")]
    LengthMismatch { outputs: usize, suite: usize },
    #[error("suite example {index} has no combo in its meta")]
    MissingCombo { index: usize },
    #[error("suite example {index} has no hint in its source")]
    HintMissing { index: usize },
    #[error("suite example {index}: {source}")]
    HintUnparsable {
        index: usize,
        #[source]
        source: HintParseError,
    },
    #[error("suite example {index} names unknown combo {name:?}")]
    UnknownCombo { index: usize, name: String },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A suite example whose model output could not be fully parsed; its hinted
/// slots were scored as empty hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlDiagnostic {
    pub index: usize,
    pub record_id: String,
    pub issue: String,
}

/// Scores plus per-example parse diagnostics.
#[derive(Debug, Clone, Default)]
pub struct ControlReport {
    pub scores: Vec<ControlScore>,
    pub diagnostics: Vec<ControlDiagnostic>,
}

impl ControlReport {
    /// Fixed-width table mirroring the benchmark layout.
    pub fn table(&self) -> String {
        let width = self
            .scores
            .iter()
            .map(|s| s.combo.len())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut out = format!("{:<width$}  {:>5}  {:>8}\n", "combo", "n", "bleu");
        for score in &self.scores {
            out.push_str(&format!(
                "{:<width$}  {:>5}  {:>8.3}\n",
                score.combo, score.n, score.overlap_bleu
            ));
        }
        out
    }
}

/// Pulls the hint back out of a suite example's source.
fn extract_hint(example: &RenderedExample, index: usize) -> Result<Hint, ControlError> {
    let at = example
        .source
        .rfind(" hint: ")
        .ok_or(ControlError::HintMissing { index })?;
    parse_hint(&example.source[at + " hint: ".len()..], DatasetKind::Glucose)
        .map_err(|source| ControlError::HintUnparsable { index, source })
}

fn parsed_slot_text(parsed: &ParsedOutput, slot: Slot) -> Option<String> {
    let side = match slot.scope {
        Scope::Specific => parsed.specific.as_ref(),
        Scope::General => parsed.general.as_ref(),
        Scope::Unscoped => None,
    }?;
    side.part(slot.part).map(str::to_string)
}

/// Scores model outputs against a suite, positionally aligned.
///
/// For every example, the hinted slots are extracted from the parsed
/// output (the matching scope-and-part position only) and paired with the
/// hint element texts; per combo, corpus BLEU runs over those pairs.
pub fn score_control(
    outputs: &[String],
    suite: &[RenderedExample],
    connectives: &[String],
) -> Result<ControlReport, ControlError> {
    if outputs.len() != suite.len() {
        return Err(ControlError::LengthMismatch {
            outputs: outputs.len(),
            suite: suite.len(),
        });
    }
    // (hypotheses, references, examples) per combo, first-appearance order.
    let mut order: Vec<String> = Vec::new();
    let mut pairs: std::collections::HashMap<String, (Vec<String>, Vec<String>, usize)> =
        std::collections::HashMap::new();
    let mut diagnostics = Vec::new();

    for (index, (output, example)) in outputs.iter().zip(suite).enumerate() {
        let combo_name = example
            .meta
            .combo
            .clone()
            .ok_or(ControlError::MissingCombo { index })?;
        if ControlCombo::parse(&combo_name).is_none() {
            return Err(ControlError::UnknownCombo {
                index,
                name: combo_name,
            });
        }
        let hint = extract_hint(example, index)?;
        let parsed = parse_output(output, DatasetKind::Glucose, connectives);
        if !pairs.contains_key(&combo_name) {
            order.push(combo_name.clone());
        }
        let entry = pairs.entry(combo_name).or_default();
        entry.2 += 1;
        let mut problems = Vec::new();
        for element in hint.elements() {
            let hypothesis = match parsed_slot_text(&parsed, element.slot) {
                Some(text) => text,
                None => {
                    problems.push(element.slot.to_string());
                    String::new()
                }
            };
            entry.0.push(hypothesis);
            entry.1.push(element.text.clone());
        }
        if !problems.is_empty() {
            diagnostics.push(ControlDiagnostic {
                index,
                record_id: example.meta.record_id.clone(),
                issue: format!("unrecovered slots: {}", problems.join(", ")),
            });
        }
    }

    let mut scores = Vec::new();
    for name in order {
        let (hypotheses, references, n) = &pairs[&name];
        let combo = ControlCombo::parse(&name).expect("validated above");
        scores.push(ControlScore {
            combo: combo.label().to_string(),
            overlap_bleu: bleu(hypotheses, references, 4)?,
            n: *n,
        });
    }
    Ok(ControlReport {
        scores,
        diagnostics,
    })
}
