//! Synonym/antonym substitution over hint text.
//!
//! A [`Lexicon`] maps lowercase lemmas to ordered candidate lists loaded
//! from flat tab-separated files (one `lemma<TAB>related` pair per line,
//! `#` comments). [`substitute_hint`] swaps every viable word of a hint for
//! a uniformly drawn candidate, keeps everything else verbatim, and appends
//! a `<|syn|>` or `<|ant|>` tag as the final parenthesized item:
//!
//! ```text
//! (<|subj|> the red team, <|rel|> capable of)
//! (<|subj|> the red squad, <|rel|> capable of, <|syn|>)
//! ```
//!
//! Marker tokens, placeholder variables (words containing `_`, e.g.
//! `People_A`) and punctuation are never substituted, and swaps are always
//! one word for one word.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::DatasetKind;
use crate::hinting::{render_hint, Hint, HintElement};
use crate::rng::RngKey;

pub const TOK_SYN: &str = "<|syn|>";
pub const TOK_ANT: &str = "<|ant|>";

/// Which lexical relation a substitution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubstKind {
    Synonym,
    Antonym,
}

impl SubstKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SubstKind::Synonym => TOK_SYN,
            SubstKind::Antonym => TOK_ANT,
        }
    }
}

impl fmt::Display for SubstKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstKind::Synonym => write!(f, "synonym"),
            SubstKind::Antonym => write!(f, "antonym"),
        }
    }
}

/// Lemma -> synonym/antonym candidate lists. Lookup is case-insensitive;
/// candidate order is file load order, so draws are reproducible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    synonyms: BTreeMap<String, Vec<String>>,
    antonyms: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: malformed lexicon line (expected `lemma<TAB>related`)")]
    MalformedLine { path: PathBuf, line: u64 },
}

fn is_single_word(lemma: &str) -> bool {
    !lemma.is_empty() && !lemma.contains(char::is_whitespace) && !lemma.contains('_')
}

fn load_map(path: &Path) -> Result<BTreeMap<String, Vec<String>>, LexiconError> {
    let file = File::open(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (lemma, related) = match (fields.next(), fields.next(), fields.next()) {
            (Some(lemma), Some(related), None) => (lemma.trim(), related.trim()),
            _ => {
                return Err(LexiconError::MalformedLine {
                    path: path.to_path_buf(),
                    line: (i + 1) as u64,
                })
            }
        };
        if lemma.is_empty() || related.is_empty() {
            return Err(LexiconError::MalformedLine {
                path: path.to_path_buf(),
                line: (i + 1) as u64,
            });
        }
        if lemma.eq_ignore_ascii_case(related) {
            continue; // self-pair
        }
        // Multi-word lemmas cannot replace a single word one-for-one.
        if !is_single_word(related) {
            continue;
        }
        let entry = map.entry(lemma.to_lowercase()).or_default();
        if !entry.iter().any(|r| r == related) {
            entry.push(related.to_string());
        }
    }
    Ok(map)
}

impl Lexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Loads both maps from flat `lemma<TAB>related` files.
    pub fn load(syn_path: &Path, ant_path: &Path) -> Result<Self, LexiconError> {
        Ok(Self {
            synonyms: load_map(syn_path)?,
            antonyms: load_map(ant_path)?,
        })
    }

    /// Loads only one side; the other map stays empty.
    pub fn load_one(path: &Path, kind: SubstKind) -> Result<Self, LexiconError> {
        let map = load_map(path)?;
        Ok(match kind {
            SubstKind::Synonym => Self {
                synonyms: map,
                ..Self::default()
            },
            SubstKind::Antonym => Self {
                antonyms: map,
                ..Self::default()
            },
        })
    }

    /// In-memory construction, mostly for tests and small fixtures.
    pub fn from_pairs(synonyms: &[(&str, &str)], antonyms: &[(&str, &str)]) -> Self {
        let build = |pairs: &[(&str, &str)]| {
            let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for (lemma, related) in pairs {
                if lemma.eq_ignore_ascii_case(related) || !is_single_word(related) {
                    continue;
                }
                let entry = map.entry(lemma.to_lowercase()).or_default();
                if !entry.iter().any(|r| r == related) {
                    entry.push(related.to_string());
                }
            }
            map
        };
        Self {
            synonyms: build(synonyms),
            antonyms: build(antonyms),
        }
    }

    pub fn candidates(&self, kind: SubstKind, word: &str) -> &[String] {
        let map = match kind {
            SubstKind::Synonym => &self.synonyms,
            SubstKind::Antonym => &self.antonyms,
        };
        map.get(&word.to_lowercase()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn synonyms_of(&self, word: &str) -> &[String] {
        self.candidates(SubstKind::Synonym, word)
    }

    pub fn antonyms_of(&self, word: &str) -> &[String] {
        self.candidates(SubstKind::Antonym, word)
    }

    /// True when either word lists the other as a synonym.
    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.synonyms_of(a).iter().any(|s| s.eq_ignore_ascii_case(b))
            || self.synonyms_of(b).iter().any(|s| s.eq_ignore_ascii_case(a))
    }

    pub fn is_empty(&self) -> bool {
        self.synonyms.is_empty() && self.antonyms.is_empty()
    }
}

/// Substitution gate probability, kinds and mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstPolicy {
    pub p_subst: f64,
    pub mode: SubstMode,
    /// Kinds eligible for gating, canonical order (synonym before antonym).
    pub kinds: Vec<SubstKind>,
    pub seed: u64,
    pub epoch: u64,
}

impl Default for SubstPolicy {
    fn default() -> Self {
        Self {
            p_subst: 0.5,
            mode: SubstMode::Append,
            kinds: Vec::new(),
            seed: 0,
            epoch: 0,
        }
    }
}

/// Whether substituted hints accompany the original or stand in for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubstMode {
    #[default]
    Append,
    Replace,
}

/// One word swap: the original, its replacement, and the word's position
/// counted across the hint's elements in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Swap {
    pub original: String,
    pub replacement: String,
    pub position: usize,
}

/// A substituted variant of a hint: the swapped elements, the rendered text
/// ending in its `<|syn|>`/`<|ant|>` tag, and the swaps that happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutedHint {
    pub kind: SubstKind,
    pub hint: Hint,
    pub text: String,
    pub swaps: Vec<Swap>,
}

/// Decides which substitution kinds apply to one record in one epoch.
/// Each enabled kind is gated independently with probability `p_subst`.
pub fn gate_substitution(policy: &SubstPolicy, record_id: &str) -> Vec<SubstKind> {
    debug_assert!((0.0..=1.0).contains(&policy.p_subst));
    let key = RngKey::new(policy.seed, policy.epoch, record_id);
    let mut gated: Vec<SubstKind> = policy
        .kinds
        .iter()
        .copied()
        .filter(|kind| {
            let mut rng = key.stream(&format!("subst-gate:{kind}"));
            rng.gen::<f64>() < policy.p_subst
        })
        .collect();
    gated.sort();
    gated.dedup();
    gated
}

fn adapt_case(original_core: &str, candidate: &str) -> String {
    let mut chars = candidate.chars();
    match (original_core.chars().next(), chars.next()) {
        (Some(o), Some(c)) if o.is_uppercase() => c.to_uppercase().chain(chars).collect(),
        (Some(_), Some(c)) => c.to_lowercase().chain(chars).collect(),
        _ => candidate.to_string(),
    }
}

fn substitute_word(
    word: &str,
    which: SubstKind,
    lexicon: &Lexicon,
    rng: &mut impl Rng,
) -> Option<String> {
    if word.contains('_') {
        return None; // placeholder variable such as People_A
    }
    if word.starts_with("<|") && word.ends_with("|>") {
        return None;
    }
    let core = word.trim_matches(|c: char| !c.is_alphanumeric());
    if core.is_empty() {
        return None;
    }
    let candidates = lexicon.candidates(which, core);
    if candidates.is_empty() {
        return None;
    }
    let candidate = &candidates[rng.gen_range(0..candidates.len())];
    let start = word.find(core).unwrap_or(0);
    let prefix = &word[..start];
    let suffix = &word[start + core.len()..];
    Some(format!("{prefix}{}{suffix}", adapt_case(core, candidate)))
}

/// Produces the synonym or antonym variant of a hint.
///
/// Every whitespace-delimited word with a lexicon entry is swapped for a
/// uniformly drawn candidate (initial-letter case preserved); words without
/// an entry are kept. The result is rendered and tagged. A hint with no
/// viable words still comes back, unchanged except for the tag, with empty
/// `swaps`.
pub fn substitute_hint(
    hint: &Hint,
    kind: DatasetKind,
    which: SubstKind,
    lexicon: &Lexicon,
    key: &RngKey<'_>,
) -> SubstitutedHint {
    let mut rng = key.stream(&format!("subst-words:{which}"));
    let mut swaps = Vec::new();
    let mut position = 0usize;
    let elements: Vec<HintElement> = hint
        .elements()
        .iter()
        .map(|element| {
            // Split on single spaces so runs of whitespace survive verbatim.
            let pieces: Vec<String> = element
                .text
                .split(' ')
                .map(|word| {
                    if word.is_empty() {
                        return String::new();
                    }
                    let replaced = substitute_word(word, which, lexicon, &mut rng);
                    let out = match replaced {
                        Some(replacement) => {
                            swaps.push(Swap {
                                original: word.to_string(),
                                replacement: replacement.clone(),
                                position,
                            });
                            replacement
                        }
                        None => word.to_string(),
                    };
                    position += 1;
                    out
                })
                .collect();
            HintElement {
                slot: element.slot,
                text: pieces.join(" "),
            }
        })
        .collect();
    let substituted = Hint::new(elements).expect("substitution preserves hint shape");
    let text = append_tag(&render_hint(&substituted, kind), which);
    SubstitutedHint {
        kind: which,
        hint: substituted,
        text,
        swaps,
    }
}

/// Appends the substitution tag as the final parenthesized item.
pub fn append_tag(rendered: &str, kind: SubstKind) -> String {
    match rendered.strip_suffix(')') {
        Some(body) => format!("{body}, {})", kind.tag()),
        None => format!("{rendered}, {}", kind.tag()),
    }
}

/// Splits a tagged hint back into the untagged rendering and its kind.
pub fn strip_tag(text: &str) -> Option<(String, SubstKind)> {
    for kind in [SubstKind::Synonym, SubstKind::Antonym] {
        let suffix = format!(", {})", kind.tag());
        if let Some(body) = text.strip_suffix(&suffix) {
            return Some((format!("{body})"), kind));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hinting::{parse_hint, Part, Scope};
    use std::io::Write as _;

    fn d1_hint() -> Hint {
        Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Subject, "the red team"),
            HintElement::new(Scope::Unscoped, Part::Relation, "capable of"),
        ])
        .unwrap()
    }

    fn key() -> RngKey<'static> {
        RngKey::new(0, 0, "hockey#1#0")
    }

    #[test]
    fn load_lexicon_from_files() {
        let mut syn = tempfile::NamedTempFile::new().unwrap();
        writeln!(syn, "# synonyms").unwrap();
        writeln!(syn, "team\tsquad").unwrap();
        writeln!(syn, "team\tteam").unwrap();
        writeln!(syn, "team\tsports_team").unwrap();
        writeln!(syn, "win\tprevail").unwrap();
        let mut ant = tempfile::NamedTempFile::new().unwrap();
        writeln!(ant, "team\tindividual").unwrap();
        let lexicon = Lexicon::load(syn.path(), ant.path()).unwrap();
        assert_eq!(lexicon.synonyms_of("team"), ["squad"]);
        assert_eq!(lexicon.synonyms_of("TEAM"), ["squad"]);
        assert_eq!(lexicon.antonyms_of("team"), ["individual"]);
        assert_eq!(lexicon.synonyms_of("puck"), [] as [&str; 0]);
    }

    #[test]
    fn empty_file_is_a_valid_lexicon() {
        let syn = tempfile::NamedTempFile::new().unwrap();
        let ant = tempfile::NamedTempFile::new().unwrap();
        let lexicon = Lexicon::load(syn.path(), ant.path()).unwrap();
        assert!(lexicon.is_empty());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let mut syn = tempfile::NamedTempFile::new().unwrap();
        writeln!(syn, "team\tsquad").unwrap();
        writeln!(syn, "no-tab-here").unwrap();
        let ant = tempfile::NamedTempFile::new().unwrap();
        let err = Lexicon::load(syn.path(), ant.path()).unwrap_err();
        match err {
            LexiconError::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("expected MalformedLine, got {other:?}"),
        }
    }

    #[test]
    fn synonym_hint_matches_golden() {
        let lexicon = Lexicon::from_pairs(&[("team", "squad")], &[("team", "individual")]);
        let syn = substitute_hint(
            &d1_hint(),
            DatasetKind::Paracomet,
            SubstKind::Synonym,
            &lexicon,
            &key(),
        );
        assert_eq!(syn.text, "(<|subj|> the red squad, <|rel|> capable of, <|syn|>)");
        assert_eq!(
            syn.swaps,
            vec![Swap {
                original: "team".to_string(),
                replacement: "squad".to_string(),
                position: 2,
            }]
        );
    }

    #[test]
    fn antonym_hint_matches_golden() {
        let lexicon = Lexicon::from_pairs(&[("team", "squad")], &[("team", "individual")]);
        let ant = substitute_hint(
            &d1_hint(),
            DatasetKind::Paracomet,
            SubstKind::Antonym,
            &lexicon,
            &key(),
        );
        assert_eq!(ant.text, "(<|subj|> the red individual, <|rel|> capable of, <|ant|>)");
    }

    #[test]
    fn unviable_hint_keeps_text_and_reports_no_swaps() {
        let out = substitute_hint(
            &d1_hint(),
            DatasetKind::Paracomet,
            SubstKind::Synonym,
            &Lexicon::empty(),
            &key(),
        );
        assert_eq!(out.text, "(<|subj|> the red team, <|rel|> capable of, <|syn|>)");
        assert_eq!(out.swaps, vec![]);
    }

    #[test]
    fn placeholders_and_punctuation_survive() {
        let hint = Hint::new(vec![HintElement::new(
            Scope::General,
            Part::Object,
            "People_A win the game!",
        )])
        .unwrap();
        let lexicon = Lexicon::from_pairs(&[("people", "folks"), ("game", "match")], &[]);
        let out = substitute_hint(&hint, DatasetKind::Glucose, SubstKind::Synonym, &lexicon, &key());
        assert_eq!(out.text, "(<|general|><|obj|> People_A win the match!, <|syn|>)");
        assert_eq!(out.swaps.len(), 1);
        assert_eq!(out.swaps[0].original, "game!");
        assert_eq!(out.swaps[0].replacement, "match!");
    }

    #[test]
    fn replacement_adopts_initial_case() {
        let hint = Hint::new(vec![HintElement::new(Scope::Unscoped, Part::Subject, "Team spirit")])
            .unwrap();
        let lexicon = Lexicon::from_pairs(&[("team", "squad")], &[]);
        let out = substitute_hint(&hint, DatasetKind::Paracomet, SubstKind::Synonym, &lexicon, &key());
        assert_eq!(out.text, "(<|subj|> Squad spirit, <|syn|>)");
    }

    #[test]
    fn word_count_is_preserved() {
        let hint = d1_hint();
        let lexicon = Lexicon::from_pairs(&[("team", "squad"), ("red", "crimson")], &[]);
        let out = substitute_hint(&hint, DatasetKind::Paracomet, SubstKind::Synonym, &lexicon, &key());
        for (before, after) in hint.elements().iter().zip(out.hint.elements()) {
            assert_eq!(
                before.text.split_whitespace().count(),
                after.text.split_whitespace().count()
            );
        }
    }

    #[test]
    fn tagged_text_parses_after_stripping() {
        let lexicon = Lexicon::from_pairs(&[("team", "squad")], &[]);
        let out = substitute_hint(&hint_for_parse(), DatasetKind::Paracomet, SubstKind::Synonym, &lexicon, &key());
        let (base, kind) = strip_tag(&out.text).unwrap();
        assert_eq!(kind, SubstKind::Synonym);
        let parsed = parse_hint(&base, DatasetKind::Paracomet).unwrap();
        assert_eq!(parsed, out.hint);
    }

    fn hint_for_parse() -> Hint {
        Hint::new(vec![
            HintElement::new(Scope::Unscoped, Part::Subject, "the red team"),
            HintElement::new(Scope::Unscoped, Part::Object, "win the game"),
        ])
        .unwrap()
    }

    #[test]
    fn gate_edges_and_determinism() {
        let mut policy = SubstPolicy {
            kinds: vec![SubstKind::Synonym, SubstKind::Antonym],
            ..SubstPolicy::default()
        };
        policy.p_subst = 0.0;
        assert_eq!(gate_substitution(&policy, "r1"), vec![]);
        policy.p_subst = 1.0;
        assert_eq!(
            gate_substitution(&policy, "r1"),
            vec![SubstKind::Synonym, SubstKind::Antonym]
        );
        policy.p_subst = 0.5;
        for i in 0..50 {
            let id = format!("r{i}");
            assert_eq!(gate_substitution(&policy, &id), gate_substitution(&policy, &id));
        }
    }

    #[test]
    fn substitution_draw_is_uniform_over_candidates() {
        let lexicon = Lexicon::from_pairs(&[("team", "squad"), ("team", "crew"), ("team", "club")], &[]);
        let hint = d1_hint();
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..3000 {
            let id = format!("r{i}");
            let key = RngKey::new(1, 0, &id);
            let out = substitute_hint(&hint, DatasetKind::Paracomet, SubstKind::Synonym, &lexicon, &key);
            *counts.entry(out.swaps[0].replacement.clone()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        for (_, count) in counts {
            let freq = count as f64 / 3000.0;
            assert!((freq - 1.0 / 3.0).abs() < 0.05, "freq {freq}");
        }
    }
}
