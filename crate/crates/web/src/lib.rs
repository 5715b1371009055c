//! Browser demo. Models are trained from the bundled fixtures when the page
//! loads; every call returns a JSON string for the page script to render.

use std::collections::HashSet;

use markermine::analysis::{frequency_report, shallow_predictability, FrequencyReport, Predictability};
use markermine::extraction::{bundled_pdtb_markers, discover, make_instance, match_candidate, FrequencyMap, MatchKind};
use markermine::filtering::{
    english_probability, langid_feature_config, langid_train_config, parse_langid_tsv, train_langid, word_tokenize,
    FilterConfig, PairFilter,
};
use markermine::io::document_pairs;
use markermine::synthetic::{cue_corpus, cue_kfold_config, CueCorpusConfig};
use markermine::tagger::{read_tagged_corpus, train_tagger, TaggerTrainConfig};
use markermine::{Error, Instance, LinearModel, SentencePair, TaggerModel};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const TAGGED: &str = include_str!("../../core/data/tagged_fixture.txt");
const LANGID: &str = include_str!("../../core/data/langid_train.tsv");
const DOCUMENTS: &str = include_str!("../../core/data/documents_fixture.txt");

pub struct Pipeline {
    tagger: TaggerModel,
    langid: LinearModel,
    pdtb: HashSet<String>,
    frequencies: FrequencyMap,
}

#[derive(Debug, Serialize)]
pub struct Candidate {
    pub marker: String,
    pub seeded_only: bool,
}

#[derive(Debug, Serialize)]
pub struct PairAnalysis {
    /// `None` when the pair passes every filter.
    pub rejection: Option<String>,
    pub english: [f64; 2],
    pub tags: Vec<(String, String)>,
    pub candidate: Option<Candidate>,
    pub instance: Option<Instance>,
    pub instance_error: Option<String>,
}

impl Pipeline {
    pub fn train() -> Result<Self, Error> {
        let tagger = train_tagger(&read_tagged_corpus(TAGGED)?, &TaggerTrainConfig::default())?;
        let samples = parse_langid_tsv(LANGID, "langid_train.tsv")?;
        let langid = train_langid(&samples, &langid_feature_config(), &langid_train_config(0))?;
        let pdtb = bundled_pdtb_markers();
        let pairs: Vec<SentencePair> = DOCUMENTS.lines().flat_map(document_pairs).collect();
        let filter = PairFilter::new(FilterConfig::default(), &langid)?;
        let (_, frequencies, _) = discover(&pairs, &tagger, &pdtb, Some(filter));
        Ok(Pipeline {
            tagger,
            langid,
            pdtb,
            frequencies,
        })
    }

    pub fn analyze(&self, s1: &str, s2: &str) -> Result<PairAnalysis, Error> {
        let pair = SentencePair::ingest(s1, s2);
        let filter = PairFilter::new(FilterConfig::default(), &self.langid)?;
        let rejection = filter.check(&pair).err().map(|r| r.to_string());
        let english = [
            english_probability(&pair.s1, &self.langid)?,
            english_probability(&pair.s2, &self.langid)?,
        ];
        let tokens = word_tokenize(&pair.s2);
        let tags = tokens.iter().cloned().zip(self.tagger.tag(&tokens)).collect();
        let found = match_candidate(&tokens, &self.tagger, &self.pdtb);
        let (instance, instance_error) = match &found {
            Some(c) => match make_instance(&pair, &c.marker) {
                Ok(i) => (Some(i), None),
                Err(e) => (None, Some(e.to_string())),
            },
            None => (None, None),
        };
        Ok(PairAnalysis {
            rejection,
            english,
            tags,
            candidate: found.map(|c| Candidate {
                marker: c.marker,
                seeded_only: c.kind == MatchKind::Seeded,
            }),
            instance,
            instance_error,
        })
    }

    pub fn frequencies(&self, cap: u64) -> FrequencyReport {
        frequency_report(&self.frequencies, cap)
    }
}

/// k-fold accuracies on a synthetic corpus whose cue words appear in the
/// first sentence at `s1_rate` and in the second at `s2_rate`.
pub fn cue_experiment(s1_rate: f64, s2_rate: f64, instances: usize, seed: u64) -> Result<Predictability, Error> {
    let config = CueCorpusConfig {
        instances,
        s1_cue_rate: s1_rate,
        s2_cue_rate: s2_rate,
        seed,
        ..Default::default()
    };
    let data = cue_corpus(&config)?;
    shallow_predictability(&data, &cue_kfold_config(seed), seed.wrapping_add(1))
}

fn to_js<T: Serialize>(value: Result<T, Error>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub struct Demo {
    pipeline: Pipeline,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, JsError> {
        let pipeline = Pipeline::train().map_err(|e| JsError::new(&e.to_string()))?;
        Ok(Demo { pipeline })
    }

    #[wasm_bindgen(js_name = analyzePair)]
    pub fn analyze_pair(&self, s1: &str, s2: &str) -> Result<String, JsError> {
        to_js(self.pipeline.analyze(s1, s2))
    }

    #[wasm_bindgen(js_name = frequencyChart)]
    pub fn frequency_chart(&self, cap: u32) -> Result<String, JsError> {
        to_js(Ok(self.pipeline.frequencies(u64::from(cap.max(1)))))
    }
}

#[wasm_bindgen(js_name = cueExplorer)]
pub fn cue_explorer(s1_rate: f64, s2_rate: f64, instances: u32, seed: u32) -> Result<String, JsError> {
    to_js(cue_experiment(s1_rate, s2_rate, instances as usize, u64::from(seed)))
}
