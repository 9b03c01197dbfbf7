//! Gated sampling of partial-assertion hints and their canonical rendering.
//!
//! A hint is an ordered, non-empty, proper subset of a record's assertion
//! elements, each tagged with marker tokens and wrapped in parentheses:
//!
//! ```text
//! (<|subj|> the red team, <|rel|> capable of)
//! (<|specific|><|subj|> The red team scores, <|general|><|obj|> People_A win the game)
//! ```
//!
//! Whether a record gets a hint is a Bernoulli gate (default p = 0.5); the
//! subset itself is drawn uniformly over all non-empty proper subsets of the
//! available elements. Both draws are pure functions of
//! `(seed, epoch, record_id)`, so the same configuration always produces the
//! same hints, serially or in parallel.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CciRecord, DatasetKind};
use crate::rng::RngKey;

pub const TOK_SUBJ: &str = "<|subj|>";
pub const TOK_REL: &str = "<|rel|>";
pub const TOK_OBJ: &str = "<|obj|>";
pub const TOK_SPECIFIC: &str = "<|specific|>";
pub const TOK_GENERAL: &str = "<|general|>";

/// Whether an element belongs to the specific or general assertion.
/// ParaCOMET elements are unscoped (the record has a single assertion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Specific,
    General,
    Unscoped,
}

impl Scope {
    pub fn token(&self) -> Option<&'static str> {
        match self {
            Scope::Specific => Some(TOK_SPECIFIC),
            Scope::General => Some(TOK_GENERAL),
            Scope::Unscoped => None,
        }
    }
}

/// Which part of the assertion tuple an element is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Subject,
    Relation,
    Object,
}

impl Part {
    pub fn token(&self) -> &'static str {
        match self {
            Part::Subject => TOK_SUBJ,
            Part::Relation => TOK_REL,
            Part::Object => TOK_OBJ,
        }
    }

    fn short(&self) -> &'static str {
        match self {
            Part::Subject => "subj",
            Part::Relation => "rel",
            Part::Object => "obj",
        }
    }
}

/// One hint position: scope plus part. Ordering is the canonical render
/// order (specific before general; subject, relation, object within scope).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub scope: Scope,
    pub part: Part,
}

impl Slot {
    pub const fn new(scope: Scope, part: Part) -> Self {
        Self { scope, part }
    }

    /// The six GLUCOSE slots in canonical order.
    pub fn glucose_all() -> [Slot; 6] {
        [
            Slot::new(Scope::Specific, Part::Subject),
            Slot::new(Scope::Specific, Part::Relation),
            Slot::new(Scope::Specific, Part::Object),
            Slot::new(Scope::General, Part::Subject),
            Slot::new(Scope::General, Part::Relation),
            Slot::new(Scope::General, Part::Object),
        ]
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scope {
            Scope::Unscoped => write!(f, "{}", self.part.short()),
            Scope::Specific => write!(f, "specific.{}", self.part.short()),
            Scope::General => write!(f, "general.{}", self.part.short()),
        }
    }
}

/// One element of a hint: a slot and the assertion field text, verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintElement {
    pub slot: Slot,
    pub text: String,
}

impl HintElement {
    pub fn new(scope: Scope, part: Part, text: impl Into<String>) -> Self {
        Self {
            slot: Slot::new(scope, part),
            text: text.into(),
        }
    }
}

/// An ordered, non-empty set of hint elements with pairwise-distinct slots,
/// always held in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    elements: Vec<HintElement>,
}

impl Hint {
    /// Builds a hint, sorting elements into canonical order. Fails on an
    /// empty element list or duplicate slots.
    pub fn new(mut elements: Vec<HintElement>) -> Result<Self, HintError> {
        if elements.is_empty() {
            return Err(HintError::EmptyHint);
        }
        elements.sort_by_key(|e| e.slot);
        for pair in elements.windows(2) {
            if pair[0].slot == pair[1].slot {
                return Err(HintError::DuplicateSlot(pair[0].slot));
            }
        }
        Ok(Self { elements })
    }

    /// Like [`Hint::new`] but also enforces the proper-subset rule against
    /// the number of elements available on the source record.
    pub fn new_proper(elements: Vec<HintElement>, available: usize) -> Result<Self, HintError> {
        let hint = Self::new(elements)?;
        if hint.elements.len() >= available {
            return Err(HintError::NotProperSubset {
                len: hint.elements.len(),
                available,
            });
        }
        Ok(hint)
    }

    pub fn elements(&self) -> &[HintElement] {
        &self.elements
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.elements.iter().map(|e| e.slot).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HintError {
    #[error("hint impossible: need at least 2 available elements, got {available}")]
    HintImpossible { available: usize },
    #[error("hint must contain at least one element")]
    EmptyHint,
    #[error("duplicate slot {0}")]
    DuplicateSlot(Slot),
    #[error("hint must be a proper subset ({len} of {available} available elements)")]
    NotProperSubset { len: usize, available: usize },
}

/// How the gated subset is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetMode {
    /// Uniform over all non-empty proper subsets.
    #[default]
    Uniform,
    /// Draw a size uniformly from 1..=n-1 first, then a uniform subset of
    /// that size. Ablation mode; biases toward mid-sized subsets less than
    /// [`SubsetMode::Uniform`] does.
    SizeFirst,
}

/// Gate probability and sampling key material for hint draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HintPolicy {
    pub p_hint: f64,
    pub seed: u64,
    pub epoch: u64,
    pub subset_mode: SubsetMode,
}

impl Default for HintPolicy {
    fn default() -> Self {
        Self {
            p_hint: 0.5,
            seed: 0,
            epoch: 0,
            subset_mode: SubsetMode::Uniform,
        }
    }
}

/// Lists a record's hintable elements in canonical order: 3 unscoped
/// elements for ParaCOMET (target sentence, relation token, object), 6
/// scoped elements for GLUCOSE.
pub fn enumerate_elements(record: &CciRecord) -> Vec<HintElement> {
    match record.dataset_kind {
        DatasetKind::Paracomet => vec![
            HintElement::new(Scope::Unscoped, Part::Subject, record.specific.subject.clone()),
            HintElement::new(Scope::Unscoped, Part::Relation, record.specific.relation.clone()),
            HintElement::new(Scope::Unscoped, Part::Object, record.specific.object.clone()),
        ],
        DatasetKind::Glucose => {
            let mut out = vec![
                HintElement::new(Scope::Specific, Part::Subject, record.specific.subject.clone()),
                HintElement::new(Scope::Specific, Part::Relation, record.specific.relation.clone()),
                HintElement::new(Scope::Specific, Part::Object, record.specific.object.clone()),
            ];
            if let Some(general) = &record.general {
                out.push(HintElement::new(Scope::General, Part::Subject, general.subject.clone()));
                out.push(HintElement::new(Scope::General, Part::Relation, general.relation.clone()));
                out.push(HintElement::new(Scope::General, Part::Object, general.object.clone()));
            }
            out
        }
    }
}

/// Draws the hint for one record in one epoch.
///
/// Returns `None` when the Bernoulli gate (p = `policy.p_hint`) stays
/// closed. When it opens, the subset is drawn per `policy.subset_mode` and
/// returned in canonical order. The gate and the subset use separate
/// deterministic streams, so changing `p_hint` never changes *which* subset
/// a gated record receives.
pub fn sample_hint(
    elements: &[HintElement],
    policy: &HintPolicy,
    record_id: &str,
) -> Result<Option<Hint>, HintError> {
    let n = elements.len();
    if n < 2 {
        // A non-empty proper subset that excludes at least one element needs
        // two or more to choose from.
        return Err(HintError::HintImpossible { available: n });
    }
    debug_assert!((0.0..=1.0).contains(&policy.p_hint));
    let key = RngKey::new(policy.seed, policy.epoch, record_id);
    if key.stream("hint-gate").gen::<f64>() >= policy.p_hint {
        return Ok(None);
    }
    let mut rng = key.stream("hint-subset");
    let mask: u64 = match policy.subset_mode {
        SubsetMode::Uniform => rng.gen_range(1..(1u64 << n) - 1),
        SubsetMode::SizeFirst => {
            let size = rng.gen_range(1..n);
            let mut mask = 0u64;
            for idx in rand::seq::index::sample(&mut rng, n, size) {
                mask |= 1 << idx;
            }
            mask
        }
    };
    let subset: Vec<HintElement> = elements
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e.clone())
        .collect();
    Ok(Some(Hint::new_proper(subset, n)?))
}

fn is_bare_token_word(text: &str) -> bool {
    !text.is_empty() && !text.contains(char::is_whitespace)
}

fn render_element(element: &HintElement, kind: DatasetKind) -> String {
    match kind {
        DatasetKind::Glucose => {
            let scope = element.slot.scope.token().unwrap_or_default();
            format!("{}{} {}", scope, element.slot.part.token(), element.text)
        }
        DatasetKind::Paracomet => {
            // ATOMIC relation tokens render in their special-token form.
            if element.slot.part == Part::Relation && is_bare_token_word(&element.text) {
                format!("{} <|{}|>", element.slot.part.token(), element.text)
            } else {
                format!("{} {}", element.slot.part.token(), element.text)
            }
        }
    }
}

/// Renders a hint to its canonical parenthesized string.
pub fn render_hint(hint: &Hint, kind: DatasetKind) -> String {
    let items: Vec<String> = hint
        .elements()
        .iter()
        .map(|e| render_element(e, kind))
        .collect();
    format!("({})", items.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HintParseError {
    #[error("empty hint")]
    Empty,
    #[error("unbalanced parentheses at byte {position}")]
    UnbalancedParens { position: usize },
    #[error("expected marker token at byte {position}")]
    MissingMarker { position: usize },
    #[error("unknown marker token {token:?} at byte {position}")]
    UnknownMarker { token: String, position: usize },
    #[error("duplicate slot at byte {position}")]
    DuplicateSlot { position: usize },
    #[error("empty element text at byte {position}")]
    EmptyText { position: usize },
}

fn take_marker(piece: &str, position: usize) -> Result<(&str, &str), HintParseError> {
    if !piece.starts_with("<|") {
        return Err(HintParseError::MissingMarker { position });
    }
    match piece.find("|>") {
        Some(end) => Ok((&piece[..end + 2], &piece[end + 2..])),
        None => Err(HintParseError::MissingMarker { position }),
    }
}

fn parse_element(piece: &str, position: usize, kind: DatasetKind) -> Result<HintElement, HintParseError> {
    let unknown = |token: &str, position: usize| HintParseError::UnknownMarker {
        token: token.to_string(),
        position,
    };
    let (scope, rest, rest_pos) = match kind {
        DatasetKind::Glucose => {
            let (token, rest) = take_marker(piece, position)?;
            let scope = match token {
                TOK_SPECIFIC => Scope::Specific,
                TOK_GENERAL => Scope::General,
                _ => return Err(unknown(token, position)),
            };
            (scope, rest, position + token.len())
        }
        DatasetKind::Paracomet => (Scope::Unscoped, piece, position),
    };
    let (token, rest) = take_marker(rest, rest_pos)?;
    let part = match token {
        TOK_SUBJ => Part::Subject,
        TOK_REL => Part::Relation,
        TOK_OBJ => Part::Object,
        _ => return Err(unknown(token, rest_pos)),
    };
    let text_pos = rest_pos + token.len();
    let text = rest.strip_prefix(' ').unwrap_or(rest).trim();
    if text.is_empty() {
        return Err(HintParseError::EmptyText { position: text_pos });
    }
    // Undo the special-token form of ParaCOMET relations.
    let text = if kind == DatasetKind::Paracomet && part == Part::Relation {
        text.strip_prefix("<|")
            .and_then(|t| t.strip_suffix("|>"))
            .filter(|t| is_bare_token_word(t))
            .unwrap_or(text)
    } else {
        text
    };
    Ok(HintElement::new(scope, part, text))
}

/// Parses a rendered hint back into its elements; the inverse of
/// [`render_hint`] on valid hints.
pub fn parse_hint(text: &str, kind: DatasetKind) -> Result<Hint, HintParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(HintParseError::Empty);
    }
    if !trimmed.starts_with('(') {
        return Err(HintParseError::UnbalancedParens { position: 0 });
    }
    if !trimmed.ends_with(')') || trimmed.len() < 2 {
        return Err(HintParseError::UnbalancedParens {
            position: trimmed.len().saturating_sub(1),
        });
    }
    let inner = &trimmed[1..trimmed.len() - 1];
    if inner.trim().is_empty() {
        return Err(HintParseError::Empty);
    }

    // Elements all start with a marker token, so ", <|" is an unambiguous
    // boundary even when element text contains a comma.
    let mut pieces = Vec::new();
    let mut start = 0;
    for (idx, _) in inner.match_indices(", <|") {
        if idx >= start {
            pieces.push((start, &inner[start..idx]));
            start = idx + 2;
        }
    }
    pieces.push((start, &inner[start..]));

    let mut elements = Vec::new();
    let mut seen = Vec::new();
    for (offset, piece) in pieces {
        let position = offset + 1; // +1 for the opening parenthesis
        let element = parse_element(piece.trim(), position, kind)?;
        if seen.contains(&element.slot) {
            return Err(HintParseError::DuplicateSlot { position });
        }
        seen.push(element.slot);
        elements.push(element);
    }
    Hint::new(elements).map_err(|_| HintParseError::Empty)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus::tests::hockey_glucose_record;
    use crate::corpus::{Assertion, CciRecord, Dimension, Story};

    pub(crate) fn hockey_paracomet_record() -> CciRecord {
        CciRecord {
            id: "hockey#xEffect#0".to_string(),
            story: Story {
                id: "hockey".to_string(),
                sentences: hockey_glucose_record().story.sentences,
            },
            target_index: 4,
            dataset_kind: DatasetKind::Paracomet,
            dimension: Dimension::Relation("xEffect".to_string()),
            specific: Assertion {
                subject: "They scored a final goal!".to_string(),
                relation: "xEffect".to_string(),
                object: "win the game".to_string(),
            },
            general: None,
        }
    }

    #[test]
    fn paracomet_elements_are_three_unscoped() {
        let elements = enumerate_elements(&hockey_paracomet_record());
        assert_eq!(elements.len(), 3);
        assert_eq!(elements[0].text, "They scored a final goal!");
        assert_eq!(elements[1].text, "xEffect");
        assert_eq!(elements[2].text, "win the game");
        assert!(elements.iter().all(|e| e.slot.scope == Scope::Unscoped));
    }

    #[test]
    fn glucose_elements_are_six_scoped() {
        let elements = enumerate_elements(&hockey_glucose_record());
        assert_eq!(elements.len(), 6);
        assert!(elements.contains(&HintElement::new(
            Scope::General,
            Part::Object,
            "People_A win a game"
        )));
    }

    #[test]
    fn render_paracomet_natural_relation() {
        let hint = Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Subject, "the red team"),
            HintElement::new(Scope::Unscoped, Part::Relation, "capable of"),
        ])
        .unwrap();
        assert_eq!(
            render_hint(&hint, DatasetKind::Paracomet),
            "(<|subj|> the red team, <|rel|> capable of)"
        );
    }

    #[test]
    fn render_paracomet_token_relation() {
        let hint = Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Relation, "xEffect"),
            HintElement::new(Scope::Unscoped, Part::Object, "they win the game"),
        ])
        .unwrap();
        assert_eq!(
            render_hint(&hint, DatasetKind::Paracomet),
            "(<|rel|> <|xEffect|>, <|obj|> they win the game)"
        );
    }

    #[test]
    fn render_glucose_single_element() {
        let hint = Hint::new(vec![HintElement::new(
            Scope::General,
            Part::Object,
            "People_A win a Something_A",
        )])
        .unwrap();
        assert_eq!(
            render_hint(&hint, DatasetKind::Glucose),
            "(<|general|><|obj|> People_A win a Something_A)"
        );
    }

    #[test]
    fn render_order_is_canonical_regardless_of_input_order() {
        let a = HintElement::new(Scope::General, Part::Object, "People_A win the game");
        let b = HintElement::new(Scope::Specific, Part::Subject, "The red team scores");
        let forward = Hint::new(vec![b.clone(), a.clone()]).unwrap();
        let reversed = Hint::new(vec![a, b]).unwrap();
        let expected =
            "(<|specific|><|subj|> The red team scores, <|general|><|obj|> People_A win the game)";
        assert_eq!(render_hint(&forward, DatasetKind::Glucose), expected);
        assert_eq!(render_hint(&reversed, DatasetKind::Glucose), expected);
    }

    #[test]
    fn parse_inverts_render() {
        let text = "(<|rel|> <|xEffect|>, <|obj|> they win the game)";
        let hint = parse_hint(text, DatasetKind::Paracomet).unwrap();
        assert_eq!(hint.elements().len(), 2);
        assert_eq!(hint.elements()[0].text, "xEffect");
        assert_eq!(render_hint(&hint, DatasetKind::Paracomet), text);
    }

    #[test]
    fn parse_rejects_duplicate_slot() {
        let err = parse_hint("(<|subj|> a, <|subj|> b)", DatasetKind::Paracomet).unwrap_err();
        assert!(matches!(err, HintParseError::DuplicateSlot { .. }));
    }

    #[test]
    fn parse_rejects_empty_and_unbalanced() {
        assert_eq!(parse_hint("", DatasetKind::Paracomet).unwrap_err(), HintParseError::Empty);
        assert!(matches!(
            parse_hint("(<|subj|> a", DatasetKind::Paracomet).unwrap_err(),
            HintParseError::UnbalancedParens { .. }
        ));
        assert!(matches!(
            parse_hint("(<|nope|> a)", DatasetKind::Paracomet).unwrap_err(),
            HintParseError::UnknownMarker { .. }
        ));
    }

    #[test]
    fn parse_handles_commas_inside_element_text() {
        let hint = Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Subject, "ready, set, go"),
            HintElement::new(Scope::Unscoped, Part::Object, "the finish line"),
        ])
        .unwrap();
        let rendered = render_hint(&hint, DatasetKind::Paracomet);
        assert_eq!(parse_hint(&rendered, DatasetKind::Paracomet).unwrap(), hint);
    }

    #[test]
    fn sample_needs_two_elements() {
        let one = vec![HintElement::new(Scope::Unscoped, Part::Subject, "a")];
        let err = sample_hint(&one, &HintPolicy::default(), "r").unwrap_err();
        assert_eq!(err, HintError::HintImpossible { available: 1 });
    }

    #[test]
    fn gate_edges_are_exact() {
        let elements = enumerate_elements(&hockey_paracomet_record());
        let never = HintPolicy {
            p_hint: 0.0,
            ..HintPolicy::default()
        };
        let always = HintPolicy {
            p_hint: 1.0,
            ..HintPolicy::default()
        };
        for i in 0..200 {
            let id = format!("r{i}");
            assert!(sample_hint(&elements, &never, &id).unwrap().is_none());
            assert!(sample_hint(&elements, &always, &id).unwrap().is_some());
        }
    }

    #[test]
    fn sampling_is_deterministic_and_epoch_sensitive() {
        let elements = enumerate_elements(&hockey_glucose_record());
        let policy = HintPolicy {
            p_hint: 1.0,
            seed: 42,
            ..HintPolicy::default()
        };
        let mut differs = false;
        for i in 0..100 {
            let id = format!("r{i}");
            let a = sample_hint(&elements, &policy, &id).unwrap();
            let b = sample_hint(&elements, &policy, &id).unwrap();
            assert_eq!(a, b);
            let later = HintPolicy { epoch: 1, ..policy };
            if sample_hint(&elements, &later, &id).unwrap() != a {
                differs = true;
            }
        }
        assert!(differs, "epoch change should alter at least one draw");
    }

    #[test]
    fn gated_subsets_are_proper_and_cover_all_six() {
        let elements = enumerate_elements(&hockey_paracomet_record());
        let policy = HintPolicy {
            p_hint: 1.0,
            seed: 9,
            ..HintPolicy::default()
        };
        let mut seen = std::collections::HashSet::new();
        for i in 0..2000 {
            let hint = sample_hint(&elements, &policy, &format!("r{i}"))
                .unwrap()
                .unwrap();
            let len = hint.elements().len();
            assert!(len >= 1 && len < elements.len());
            seen.insert(hint.slots());
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn size_first_mode_also_yields_proper_subsets() {
        let elements = enumerate_elements(&hockey_glucose_record());
        let policy = HintPolicy {
            p_hint: 1.0,
            subset_mode: SubsetMode::SizeFirst,
            ..HintPolicy::default()
        };
        for i in 0..500 {
            let hint = sample_hint(&elements, &policy, &format!("r{i}"))
                .unwrap()
                .unwrap();
            let len = hint.elements().len();
            assert!(len >= 1 && len < 6);
        }
    }
}
