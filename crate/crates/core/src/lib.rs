//! Discourse marker mining toolkit.
//!
//! The pipeline runs in stages that each consume and produce plain files:
//!
//! 1. [`filtering`] splits raw text into sentence pairs and keeps the clean ones.
//! 2. [`extraction`] finds second sentences opening with a single-word marker
//!    and a comma, strips the marker, and counts markers into a lexicon.
//! 3. [`linclass`] trains shallow bag-of-n-grams classifiers, used both for
//!    language identification and for out-of-fold marker predictions.
//! 4. [`datasets`] caps, balances, splits and perturbs the labelled instances.
//! 5. [`analysis`] reports accuracies, frequencies and marker embeddings.

mod binio;

pub mod analysis;
pub mod datasets;
pub mod error;
pub mod extraction;
pub mod filtering;
pub mod io;
pub mod linclass;
pub mod synthetic;
pub mod tagger;

pub use error::{Error, Result};
pub use extraction::{Instance, MarkerLexicon};
pub use filtering::SentencePair;
pub use linclass::LinearModel;
pub use tagger::TaggerModel;
