//! Reference implementations of BLEU, ROUGE and METEOR.
//!
//! These are self-contained re-implementations, not wrappers, so scores are
//! reproducible within this toolkit without pinning third-party metric
//! libraries. The fixed conventions:
//!
//! - Tokenization: lowercase; runs of alphanumerics/`_` are words; any
//!   other non-space character is its own token.
//! - BLEU: corpus-level modified n-gram precision with uniform weights,
//!   brevity penalty, and an epsilon floor (0.1) on zero match counts for
//!   n >= 2. Orders whose n-gram total is zero are left out of the
//!   geometric mean.
//! - ROUGE-1/2: n-gram overlap F1. ROUGE-L: LCS F1. ROUGE-LSUM: union-LCS
//!   over sentence splits.
//! - METEOR: exact, then stem (s/es/ed/ing suffix stripping), then synonym
//!   unigram alignment; F-mean with recall weighted 9:1; chunk penalty
//!   `0.5 * (chunks/matches)^3`.
//!
//! All scores live on a 0-100 scale.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexsub::Lexicon;
use crate::text::split_sentences;

const BLEU_EPSILON: f64 = 0.1;
const METEOR_ALPHA: f64 = 0.9;
const METEOR_BETA: f64 = 3.0;
const METEOR_GAMMA: f64 = 0.5;

/// Per-metric corpus scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu1: f64,
    pub bleu2: f64,
    pub bleu4: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    #[serde(rename = "rougeL")]
    pub rouge_l: f64,
    #[serde(rename = "rougeLsum")]
    pub rouge_lsum: f64,
    pub meteor: f64,
    pub n_examples: usize,
}

impl MetricReport {
    /// Fixed-width table for terminal output.
    pub fn table(&self) -> String {
        let rows = [
            ("BLEU-1", self.bleu1),
            ("BLEU-2", self.bleu2),
            ("BLEU-4", self.bleu4),
            ("ROUGE-1", self.rouge1),
            ("ROUGE-2", self.rouge2),
            ("ROUGE-L", self.rouge_l),
            ("ROUGE-LSUM", self.rouge_lsum),
            ("METEOR", self.meteor),
        ];
        let mut out = String::from("metric        score\n");
        for (name, value) in rows {
            out.push_str(&format!("{name:<12}{value:>9.3}\n"));
        }
        out.push_str(&format!("n_examples  {:>9}\n", self.n_examples));
        out
    }
}

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("length mismatch: {hypotheses} hypotheses vs {references} references")]
    LengthMismatch {
        hypotheses: usize,
        references: usize,
    },
    #[error("no examples")]
    NoExamples,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("max_n must be at least 1")]
    BadOrder,
}

/// Lowercases and splits into word and punctuation tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.to_lowercase().chars() {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts: HashMap<&[String], u64> = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_overlap(hyp: &HashMap<&[String], u64>, reference: &HashMap<&[String], u64>) -> u64 {
    hyp.iter()
        .map(|(gram, count)| (*count).min(reference.get(gram).copied().unwrap_or(0)))
        .sum()
}

/// Corpus-level BLEU over aligned hypothesis/reference lists, scaled to
/// [0, 100].
pub fn bleu(hypotheses: &[String], references: &[String], max_n: usize) -> Result<f64, MetricError> {
    if max_n == 0 {
        return Err(MetricError::BadOrder);
    }
    if hypotheses.len() != references.len() {
        return Err(MetricError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(MetricError::NoExamples);
    }
    let mut totals = vec![0u64; max_n + 1];
    let mut matches = vec![0u64; max_n + 1];
    let mut hyp_len = 0u64;
    let mut ref_len = 0u64;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        let ht = tokenize(hyp);
        let rt = tokenize(reference);
        hyp_len += ht.len() as u64;
        ref_len += rt.len() as u64;
        for n in 1..=max_n {
            let h_counts = ngram_counts(&ht, n);
            let r_counts = ngram_counts(&rt, n);
            totals[n] += (ht.len() + 1).saturating_sub(n) as u64;
            matches[n] += clipped_overlap(&h_counts, &r_counts);
        }
    }
    if hyp_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    let mut included = 0u32;
    for n in 1..=max_n {
        if totals[n] == 0 {
            continue;
        }
        let m = if matches[n] == 0 {
            if n == 1 {
                return Ok(0.0);
            }
            BLEU_EPSILON
        } else {
            matches[n] as f64
        };
        log_sum += (m / totals[n] as f64).ln();
        included += 1;
    }
    if included == 0 {
        return Ok(0.0);
    }
    let bp = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(100.0 * bp * (log_sum / included as f64).exp())
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

fn rouge_n(hyp_tokens: &[String], ref_tokens: &[String], n: usize) -> f64 {
    let h_counts = ngram_counts(hyp_tokens, n);
    let r_counts = ngram_counts(ref_tokens, n);
    let h_total: u64 = h_counts.values().sum();
    let r_total: u64 = r_counts.values().sum();
    if h_total == 0 || r_total == 0 {
        return 0.0;
    }
    let overlap = clipped_overlap(&h_counts, &r_counts);
    100.0 * f1(overlap as f64 / h_total as f64, overlap as f64 / r_total as f64)
}

fn lcs_table(a: &[String], b: &[String]) -> Vec<Vec<u32>> {
    let mut dp = vec![vec![0u32; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            dp[i][j] = if a[i - 1] == b[j - 1] {
                dp[i - 1][j - 1] + 1
            } else {
                dp[i - 1][j].max(dp[i][j - 1])
            };
        }
    }
    dp
}

fn rouge_l(hyp_tokens: &[String], ref_tokens: &[String]) -> f64 {
    if hyp_tokens.is_empty() || ref_tokens.is_empty() {
        return 0.0;
    }
    let lcs = lcs_table(hyp_tokens, ref_tokens)[hyp_tokens.len()][ref_tokens.len()] as f64;
    100.0 * f1(lcs / hyp_tokens.len() as f64, lcs / ref_tokens.len() as f64)
}

/// Reference-token positions on one canonical LCS path.
fn lcs_ref_positions(ref_tokens: &[String], hyp_tokens: &[String]) -> Vec<usize> {
    let dp = lcs_table(ref_tokens, hyp_tokens);
    let mut positions = Vec::new();
    let (mut i, mut j) = (ref_tokens.len(), hyp_tokens.len());
    while i > 0 && j > 0 {
        if ref_tokens[i - 1] == hyp_tokens[j - 1] {
            positions.push(i - 1);
            i -= 1;
            j -= 1;
        } else if dp[i - 1][j] >= dp[i][j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    positions
}

fn rouge_lsum(hypothesis: &str, reference: &str) -> f64 {
    let ref_sents: Vec<Vec<String>> = split_sentences(reference)
        .into_iter()
        .map(tokenize)
        .collect();
    let hyp_sents: Vec<Vec<String>> = split_sentences(hypothesis)
        .into_iter()
        .map(tokenize)
        .collect();
    let ref_total: usize = ref_sents.iter().map(Vec::len).sum();
    let hyp_total: usize = hyp_sents.iter().map(Vec::len).sum();
    if ref_total == 0 || hyp_total == 0 {
        return 0.0;
    }
    let mut union_total = 0usize;
    for rs in &ref_sents {
        let mut union = vec![false; rs.len()];
        for hs in &hyp_sents {
            for position in lcs_ref_positions(rs, hs) {
                union[position] = true;
            }
        }
        union_total += union.iter().filter(|hit| **hit).count();
    }
    // Union-LCS can cross-count hypothesis tokens; clamp so scores stay in
    // [0, 100].
    let p = (union_total as f64 / hyp_total as f64).min(1.0);
    let r = (union_total as f64 / ref_total as f64).min(1.0);
    100.0 * f1(p, r)
}

/// ROUGE-1/2/L/LSUM F-scores for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScores {
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub rouge_lsum: f64,
}

pub fn rouge(hypothesis: &str, reference: &str) -> RougeScores {
    let ht = tokenize(hypothesis);
    let rt = tokenize(reference);
    RougeScores {
        rouge1: rouge_n(&ht, &rt, 1),
        rouge2: rouge_n(&ht, &rt, 2),
        rouge_l: rouge_l(&ht, &rt),
        rouge_lsum: rouge_lsum(hypothesis, reference),
    }
}

/// Minimal suffix-stripping stemmer (s/es/ed/ing), longest suffix first,
/// keeping at least two characters.
fn stem(token: &str) -> &str {
    for suffix in ["ing", "ed", "es", "s"] {
        if let Some(stripped) = token.strip_suffix(suffix) {
            if stripped.len() >= 2 {
                return stripped;
            }
        }
    }
    token
}

/// METEOR for one pair: staged unigram alignment (exact, stem, synonym via
/// the lexicon when given), recall-weighted F-mean, chunk fragmentation
/// penalty.
pub fn meteor(hypothesis: &str, reference: &str, lexicon: Option<&Lexicon>) -> f64 {
    let ht = tokenize(hypothesis);
    let rt = tokenize(reference);
    if ht.is_empty() || rt.is_empty() {
        return 0.0;
    }
    let mut used_h = vec![false; ht.len()];
    let mut used_r = vec![false; rt.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    let run_stage = |matches: &dyn Fn(&str, &str) -> bool,
                         used_h: &mut Vec<bool>,
                         used_r: &mut Vec<bool>,
                         pairs: &mut Vec<(usize, usize)>| {
        for i in 0..ht.len() {
            if used_h[i] {
                continue;
            }
            for j in 0..rt.len() {
                if used_r[j] {
                    continue;
                }
                if matches(&ht[i], &rt[j]) {
                    used_h[i] = true;
                    used_r[j] = true;
                    pairs.push((i, j));
                    break;
                }
            }
        }
    };

    run_stage(&|a, b| a == b, &mut used_h, &mut used_r, &mut pairs);
    run_stage(
        &|a, b| stem(a) == stem(b),
        &mut used_h,
        &mut used_r,
        &mut pairs,
    );
    if let Some(lexicon) = lexicon {
        run_stage(
            &|a, b| lexicon.are_synonyms(a, b),
            &mut used_h,
            &mut used_r,
            &mut pairs,
        );
    }

    let m = pairs.len();
    if m == 0 {
        return 0.0;
    }
    let p = m as f64 / ht.len() as f64;
    let r = m as f64 / rt.len() as f64;
    let fmean = p * r / (METEOR_ALPHA * p + (1.0 - METEOR_ALPHA) * r);
    pairs.sort_unstable();
    let mut chunks = 1usize;
    for window in pairs.windows(2) {
        let ((i1, j1), (i2, j2)) = (window[0], window[1]);
        if i2 != i1 + 1 || j2 != j1 + 1 {
            chunks += 1;
        }
    }
    let penalty = METEOR_GAMMA * (chunks as f64 / m as f64).powf(METEOR_BETA);
    100.0 * fmean * (1.0 - penalty)
}

/// Scores aligned in-memory corpora: corpus BLEU, mean ROUGE/METEOR.
pub fn score_pairs(
    hypotheses: &[String],
    references: &[String],
    lexicon: Option<&Lexicon>,
) -> Result<MetricReport, MetricError> {
    if hypotheses.len() != references.len() {
        return Err(MetricError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(MetricError::NoExamples);
    }
    let n = hypotheses.len() as f64;
    let mut rouge1 = 0.0;
    let mut rouge2 = 0.0;
    let mut rouge_l_sum = 0.0;
    let mut rouge_lsum = 0.0;
    let mut meteor_sum = 0.0;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        let scores = rouge(hyp, reference);
        rouge1 += scores.rouge1;
        rouge2 += scores.rouge2;
        rouge_l_sum += scores.rouge_l;
        rouge_lsum += scores.rouge_lsum;
        meteor_sum += meteor(hyp, reference, lexicon);
    }
    Ok(MetricReport {
        bleu1: bleu(hypotheses, references, 1)?,
        bleu2: bleu(hypotheses, references, 2)?,
        bleu4: bleu(hypotheses, references, 4)?,
        rouge1: rouge1 / n,
        rouge2: rouge2 / n,
        rouge_l: rouge_l_sum / n,
        rouge_lsum: rouge_lsum / n,
        meteor: meteor_sum / n,
        n_examples: hypotheses.len(),
    })
}

fn read_lines(path: &Path) -> Result<Vec<String>, MetricError> {
    let contents = fs::read_to_string(path).map_err(|source| MetricError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(contents.lines().map(str::to_string).collect())
}

/// Scores a predictions file against a references file (one example per
/// line, UTF-8).
pub fn score_files(
    pred_path: &Path,
    ref_path: &Path,
    lexicon: Option<&Lexicon>,
) -> Result<MetricReport, MetricError> {
    let hypotheses = read_lines(pred_path)?;
    let references = read_lines(ref_path)?;
    score_pairs(&hypotheses, &references, lexicon)
}
