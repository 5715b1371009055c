//! Interchange formats: pair TSV, instance TSV / JSON lines, prediction TSV,
//! and raw document shards.

use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::Instance;
use crate::filtering::{normalize_text, split_sentences, SentencePair};
use crate::linclass::FoldPrediction;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceFormat {
    /// `s1 TAB s2_prime TAB marker`
    #[default]
    Tsv,
    /// One JSON object per line with fields `s1`, `s2_prime`, `marker`.
    Jsonl,
}

impl FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(InstanceFormat::Tsv),
            "jsonl" => Ok(InstanceFormat::Jsonl),
            other => Err(Error::Argument(format!("unknown instance format {other:?}"))),
        }
    }
}

fn write_err(e: std::io::Error) -> Error {
    Error::io("writing output", e)
}

pub fn write_instance<W: Write + ?Sized>(w: &mut W, instance: &Instance, format: InstanceFormat) -> Result<()> {
    match format {
        InstanceFormat::Tsv => writeln!(w, "{}\t{}\t{}", instance.s1, instance.s2_prime, instance.marker),
        InstanceFormat::Jsonl => {
            serde_json::to_writer(&mut *w, instance).map_err(|e| Error::Format(e.to_string()))?;
            writeln!(w)
        }
    }
    .map_err(write_err)
}

pub fn write_instances<W: Write>(mut w: W, instances: &[Instance], format: InstanceFormat) -> Result<()> {
    for i in instances {
        write_instance(&mut w, i, format)?;
    }
    w.flush().map_err(write_err)
}

pub fn parse_instance(line: &str, format: InstanceFormat) -> Result<Instance> {
    let instance = match format {
        InstanceFormat::Tsv => {
            let cols: Vec<&str> = line.split('\t').collect();
            let [s1, s2_prime, marker] = cols[..] else {
                return Err(Error::Format(format!(
                    "expected 3 tab-separated columns, got {}",
                    cols.len()
                )));
            };
            Instance {
                s1: s1.to_string(),
                s2_prime: s2_prime.to_string(),
                marker: marker.to_string(),
            }
        }
        InstanceFormat::Jsonl => serde_json::from_str(line).map_err(|e| Error::Format(e.to_string()))?,
    };
    if instance.s2_prime.trim().is_empty() || instance.marker.is_empty() {
        return Err(Error::Format("instance has an empty s2_prime or marker".into()));
    }
    Ok(instance)
}

/// Reads every instance; errors carry `source:line`.
pub fn read_instances<R: BufRead>(r: R, format: InstanceFormat, source: &str) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("{source}:{}", n + 1), e))?;
        if line.is_empty() {
            continue;
        }
        out.push(parse_instance(&line, format).map_err(|e| Error::Format(format!("{source}:{}: {e}", n + 1)))?);
    }
    Ok(out)
}

/// Parses `s1 TAB s2 [TAB source]`. A line of any other shape yields `None`.
pub fn parse_pair_line(line: &str) -> Option<SentencePair> {
    let mut cols = line.split('\t');
    let (s1, s2) = (cols.next()?, cols.next()?);
    let source = cols.next();
    if cols.next().is_some() {
        return None;
    }
    let pair = SentencePair::ingest(s1, s2);
    Some(match source {
        Some(src) if !src.is_empty() => pair.with_source(src),
        _ => pair,
    })
}

pub fn write_pair<W: Write + ?Sized>(w: &mut W, pair: &SentencePair) -> Result<()> {
    match &pair.source {
        Some(src) => writeln!(w, "{}\t{}\t{}", pair.s1, pair.s2, src),
        None => writeln!(w, "{}\t{}", pair.s1, pair.s2),
    }
    .map_err(write_err)
}

/// Consecutive sentence pairs of one document (one line of a raw shard).
pub fn document_pairs(document: &str) -> Vec<SentencePair> {
    let sentences: Vec<String> = split_sentences(&normalize_text(document));
    sentences
        .windows(2)
        .map(|w| SentencePair::ingest(&w[0], &w[1]))
        .collect()
}

/// `index TAB fold TAB gold TAB comma-separated top labels`
pub fn write_predictions<W: Write>(mut w: W, predictions: &[FoldPrediction]) -> Result<()> {
    for p in predictions {
        writeln!(w, "{}\t{}\t{}\t{}", p.index, p.fold, p.gold, p.top.join(",")).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

pub fn read_predictions<R: BufRead>(r: R, source: &str) -> Result<Vec<FoldPrediction>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let at = |msg: &str| Error::Format(format!("{source}:{}: {msg}", n + 1));
        let line = line.map_err(|e| Error::io(format!("{source}:{}", n + 1), e))?;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [index, fold, gold, top] = cols[..] else {
            return Err(at("expected 4 tab-separated columns"));
        };
        out.push(FoldPrediction {
            index: index.parse().map_err(|_| at("bad index"))?,
            fold: fold.parse().map_err(|_| at("bad fold"))?,
            gold: gold.to_string(),
            top: top.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect(),
        });
    }
    Ok(out)
}
