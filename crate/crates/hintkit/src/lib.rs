//! Hint augmentation toolkit for contextual commonsense inference datasets.
//!
//! The crate covers the full offline pipeline around "hinting" — appending a
//! parenthesized, marker-tagged proper subset of a gold assertion to a model
//! input:
//!
//! - [`corpus`] — the story/assertion data model and ingestion of
//!   GLUCOSE-style and ParaCOMET-style datasets into canonical JSONL.
//! - [`hinting`] — gated sampling of hint subsets and the canonical
//!   marker-token rendering / parsing.
//! - [`lexsub`] — WordNet-backed synonym/antonym substitution over hints,
//!   producing `<|syn|>` / `<|ant|>` tagged variants.
//! - [`formats`] — bit-exact serialization into the three model I/O
//!   templates plus special-token vocabulary emission.
//! - [`metrics`] — reference BLEU / ROUGE / METEOR implementations.
//! - [`control`] — the controllability benchmark: forced-hint test suites
//!   and hint-element/output overlap scoring.
//!
//! Every sampling decision is a pure function of `(seed, epoch, record_id)`,
//! so augmentation runs are byte-reproducible regardless of parallelism.

pub mod control;
pub mod corpus;
pub mod formats;
pub mod hinting;
pub mod lexsub;
pub mod metrics;
pub mod rng;
mod text;

pub use corpus::{Assertion, CciRecord, DatasetKind, Dimension, Story};
pub use hinting::{Hint, HintElement, HintPolicy, Part, Scope, Slot};
pub use lexsub::{Lexicon, SubstKind, SubstPolicy, SubstitutedHint};
