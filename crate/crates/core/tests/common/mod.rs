#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::OnceLock;

use markermine::extraction::bundled_pdtb_markers;
use markermine::filtering::{langid_feature_config, langid_train_config, parse_langid_tsv, train_langid};
use markermine::io::{document_pairs, read_instances, InstanceFormat};
use markermine::tagger::{read_tagged_corpus, train_tagger, TaggedSentence, TaggerTrainConfig};
use markermine::{Instance, LinearModel, SentencePair, TaggerModel};

pub const TAGGED: &str = include_str!("../../data/tagged_fixture.txt");
pub const LANGID: &str = include_str!("../../data/langid_train.tsv");
pub const DOCUMENTS: &str = include_str!("../../data/documents_fixture.txt");
pub const INSTANCES: &str = include_str!("../../data/instances_fixture.tsv");

pub fn tagged_corpus() -> Vec<TaggedSentence> {
    read_tagged_corpus(TAGGED).unwrap()
}

pub fn tagger() -> &'static TaggerModel {
    static MODEL: OnceLock<TaggerModel> = OnceLock::new();
    MODEL.get_or_init(|| train_tagger(&tagged_corpus(), &TaggerTrainConfig::default()).unwrap())
}

pub fn langid() -> &'static LinearModel {
    static MODEL: OnceLock<LinearModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let samples = parse_langid_tsv(LANGID, "langid_train.tsv").unwrap();
        train_langid(&samples, &langid_feature_config(), &langid_train_config(0)).unwrap()
    })
}

pub fn pdtb() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(bundled_pdtb_markers)
}

pub fn fixture_pairs() -> Vec<SentencePair> {
    DOCUMENTS
        .lines()
        .enumerate()
        .flat_map(|(d, doc)| {
            document_pairs(doc)
                .into_iter()
                .map(move |p| p.with_source(format!("doc{d}")))
        })
        .collect()
}

/// Instances whose marker is one of `markers`, `per` of each, with
/// marker-independent text.
pub fn plain_instances(markers: &[&str], per: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 0..per {
        for m in markers {
            out.push(Instance {
                s1: format!("the first sentence number {n} about {m}"),
                s2_prime: format!("The second sentence number {n}"),
                marker: m.to_string(),
            });
        }
    }
    out
}

/// Three markers with fifty instances each.
pub fn fixture_instances() -> Vec<Instance> {
    read_instances(INSTANCES.as_bytes(), InstanceFormat::Tsv, "instances_fixture.tsv").unwrap()
}
