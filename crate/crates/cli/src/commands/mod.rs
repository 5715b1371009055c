mod corpus;
mod data;
mod models;
mod reports;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use markermine::io::{read_instances, InstanceFormat};
use markermine::{Error, Instance};
use serde::Serialize;

pub use corpus::{discover, filter};
pub use data::{build, shuffle};
pub use models::{classify_eval, classify_train, kfold, langid_train, tagger_train};
pub use reports::{export_embeddings, report, stats};

use crate::args::{ClassifierOptions, FilterOptions};
use crate::config::PipelineConfig;

pub(crate) fn ensure_parent(path: &Path) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    Ok(())
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    ensure_parent(path)?;
    let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(file))
}

pub(crate) fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

pub(crate) fn load_instances(path: &Path, format: InstanceFormat) -> Result<Vec<Instance>, Error> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_instances(BufReader::new(file), format, &path.display().to_string())
}

/// Pretty JSON with a trailing newline.
pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    let mut w = create(path)?;
    writeln!(w, "{text}")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub(crate) fn apply_filter_options(cfg: &mut PipelineConfig, o: &FilterOptions) {
    if let Some(v) = o.min_words {
        cfg.filter.min_words = v;
    }
    if let Some(v) = o.max_words {
        cfg.filter.max_words = v;
    }
    if let Some(v) = o.english_threshold {
        cfg.filter.english_threshold = v;
    }
    if let Some(v) = o.lowercase_ratio {
        cfg.filter.lowercase_ratio = v;
    }
    if o.no_balance_check {
        cfg.filter.require_balanced = false;
    }
}

pub(crate) fn apply_classifier_options(cfg: &mut PipelineConfig, o: &ClassifierOptions) {
    if let Some(v) = o.mode {
        cfg.classifier.mode = v.into();
    }
    if let Some(v) = o.buckets {
        cfg.classifier.buckets = v;
    }
    if let Some(v) = o.ngrams {
        cfg.classifier.ngrams = v;
    }
    if let Some(v) = o.dim {
        cfg.classifier.dim = v;
    }
    if let Some(v) = o.lr {
        cfg.classifier.lr = v;
    }
    if let Some(v) = o.epochs {
        cfg.classifier.epochs = v;
    }
}
