//! Sentence-initial marker detection, instance construction and the marker
//! lexicon.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::{word_tokenize, PairFilter, RejectionReason, SentencePair};
use crate::tagger::{is_candidate_pos, TaggerModel};

/// Single-word PDTB connectives shipped with the crate, one per line.
pub const BUNDLED_PDTB_MARKERS: &str = include_str!("../data/pdtb_markers.txt");

/// Parses a marker list: one form per line, `#` comments and blanks ignored,
/// forms lowercased.
pub fn parse_marker_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn bundled_pdtb_markers() -> HashSet<String> {
    parse_marker_list(BUNDLED_PDTB_MARKERS)
}

/// A labeled triple: first sentence, second sentence without its marker, marker.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    pub s1: String,
    pub s2_prime: String,
    pub marker: String,
}

/// How a candidate matched the rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchKind {
    /// The tagger labelled the word as an adverb or conjunction.
    Tagged,
    /// Only membership in the seeded PDTB list admitted it.
    Seeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateMatch {
    pub marker: String,
    pub kind: MatchKind,
}

fn is_single_word(token: &str) -> bool {
    !token.is_empty() && token.chars().all(char::is_alphabetic)
}

/// Applies the candidate rule to a tokenized second sentence.
///
/// The first token must be a purely alphabetic word directly followed by a
/// comma token, and must be tagged as an adverb or conjunction in context or
/// appear in `pdtb_forms`.
pub fn match_candidate<S: AsRef<str>>(
    s2_tokens: &[S],
    tagger: &TaggerModel,
    pdtb_forms: &HashSet<String>,
) -> Option<CandidateMatch> {
    let [first, second, ..] = s2_tokens else {
        return None;
    };
    let first = first.as_ref();
    if second.as_ref() != "," || !is_single_word(first) {
        return None;
    }
    let marker = first.to_lowercase();
    if tagger.tag_first(s2_tokens).is_some_and(is_candidate_pos) {
        return Some(CandidateMatch {
            marker,
            kind: MatchKind::Tagged,
        });
    }
    pdtb_forms.contains(&marker).then_some(CandidateMatch {
        marker,
        kind: MatchKind::Seeded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceRejection {
    /// The second sentence does not start with the marker and a comma.
    PatternMismatch,
    /// Nothing is left after stripping the marker.
    EmptyRemainder,
    /// The remainder itself starts with the same marker and comma.
    RepeatedMarker,
}

impl fmt::Display for InstanceRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceRejection::PatternMismatch => "pattern_mismatch",
            InstanceRejection::EmptyRemainder => "empty_remainder",
            InstanceRejection::RepeatedMarker => "repeated_marker",
        })
    }
}

/// `text` with `marker`, optional whitespace, a comma and following
/// whitespace removed from its start, if it starts that way.
fn strip_marker<'a>(text: &'a str, marker: &str) -> Option<&'a str> {
    let text = text.trim_start();
    let word_end = text
        .char_indices()
        .find(|(_, c)| !c.is_alphabetic())
        .map_or(text.len(), |(i, _)| i);
    if text[..word_end].to_lowercase() != marker {
        return None;
    }
    let rest = text[word_end..].trim_start();
    rest.strip_prefix(',').map(str::trim_start)
}

fn capitalize_first_alpha(text: &str) -> String {
    match text.char_indices().find(|(_, c)| c.is_alphabetic()) {
        Some((i, c)) => {
            let mut out = String::with_capacity(text.len());
            out.push_str(&text[..i]);
            out.extend(c.to_uppercase());
            out.push_str(&text[i + c.len_utf8()..]);
            out
        }
        None => text.to_string(),
    }
}

/// Strips the marker and its comma from `pair.s2` and recapitalizes the remainder.
pub fn make_instance(pair: &SentencePair, marker: &str) -> Result<Instance, InstanceRejection> {
    let marker = marker.to_lowercase();
    let rest = strip_marker(&pair.s2, &marker).ok_or(InstanceRejection::PatternMismatch)?;
    let rest = rest.trim_end();
    if rest.is_empty() {
        return Err(InstanceRejection::EmptyRemainder);
    }
    if strip_marker(rest, &marker).is_some() {
        return Err(InstanceRejection::RepeatedMarker);
    }
    Ok(Instance {
        s1: pair.s1.clone(),
        s2_prime: capitalize_first_alpha(rest),
        marker,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerCount {
    pub count: u64,
    /// Occurrences admitted by the tagger rather than the seed list.
    pub tagged: u64,
}

/// Per-marker counts of emitted instances.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyMap {
    pub markers: BTreeMap<String, MarkerCount>,
}

impl FrequencyMap {
    pub fn record(&mut self, marker: &str, kind: MatchKind) {
        let entry = self.markers.entry(marker.to_string()).or_default();
        entry.count += 1;
        if kind == MatchKind::Tagged {
            entry.tagged += 1;
        }
    }

    /// Associative merge of shard-level maps.
    pub fn merge(&mut self, other: &FrequencyMap) {
        for (m, c) in &other.markers {
            let entry = self.markers.entry(m.clone()).or_default();
            entry.count += c.count;
            entry.tagged += c.tagged;
        }
    }

    pub fn total(&self) -> u64 {
        self.markers.values().map(|c| c.count).sum()
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn count(&self, marker: &str) -> u64 {
        self.markers.get(marker).map_or(0, |c| c.count)
    }

    /// Plain `marker -> count` view for reports.
    pub fn counts(&self) -> BTreeMap<String, u64> {
        self.markers.iter().map(|(m, c)| (m.clone(), c.count)).collect()
    }
}

/// Progress counters of a discovery pass.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveryStats {
    pub pairs: u64,
    pub passed_filter: u64,
    pub candidates: u64,
    pub instances: u64,
    pub rejected_instances: BTreeMap<String, u64>,
    pub filter_rejections: BTreeMap<RejectionReason, u64>,
}

impl DiscoveryStats {
    pub fn merge(&mut self, other: &DiscoveryStats) {
        self.pairs += other.pairs;
        self.passed_filter += other.passed_filter;
        self.candidates += other.candidates;
        self.instances += other.instances;
        for (k, v) in &other.rejected_instances {
            *self.rejected_instances.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.filter_rejections {
            *self.filter_rejections.entry(*k).or_default() += v;
        }
    }

    /// Fraction of processed pairs that yielded an instance.
    pub fn candidate_rate(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.instances as f64 / self.pairs as f64
        }
    }
}

/// Streaming discovery state: filter, match, strip, count.
pub struct Discoverer<'m> {
    filter: Option<PairFilter<'m>>,
    tagger: &'m TaggerModel,
    pdtb: &'m HashSet<String>,
    pub frequencies: FrequencyMap,
    pub stats: DiscoveryStats,
}

impl<'m> Discoverer<'m> {
    /// `filter = None` treats input pairs as already filtered.
    pub fn new(filter: Option<PairFilter<'m>>, tagger: &'m TaggerModel, pdtb: &'m HashSet<String>) -> Self {
        Discoverer {
            filter,
            tagger,
            pdtb,
            frequencies: FrequencyMap::default(),
            stats: DiscoveryStats::default(),
        }
    }

    pub fn process(&mut self, pair: &SentencePair) -> Option<Instance> {
        self.stats.pairs += 1;
        if let Some(filter) = &self.filter {
            if let Err(reason) = filter.check(pair) {
                *self.stats.filter_rejections.entry(reason).or_default() += 1;
                return None;
            }
        }
        self.stats.passed_filter += 1;
        // cheap pre-check before tokenizing: a comma must follow the first word
        let head = pair.s2.trim_start();
        let word_len = head
            .char_indices()
            .find(|(_, c)| !c.is_alphabetic())
            .map_or(head.len(), |(i, _)| i);
        if word_len == 0 || !head[word_len..].trim_start().starts_with(',') {
            return None;
        }
        let tokens = word_tokenize(&pair.s2);
        let found = match_candidate(&tokens, self.tagger, self.pdtb)?;
        self.stats.candidates += 1;
        match make_instance(pair, &found.marker) {
            Ok(instance) => {
                self.frequencies.record(&instance.marker, found.kind);
                self.stats.instances += 1;
                Some(instance)
            }
            Err(why) => {
                *self.stats.rejected_instances.entry(why.to_string()).or_default() += 1;
                None
            }
        }
    }
}

/// Runs discovery over an in-memory pair sequence.
pub fn discover<'a, I>(
    pairs: I,
    tagger: &TaggerModel,
    pdtb: &HashSet<String>,
    filter: Option<PairFilter<'_>>,
) -> (Vec<Instance>, FrequencyMap, DiscoveryStats)
where
    I: IntoIterator<Item = &'a SentencePair>,
{
    let mut d = Discoverer::new(filter, tagger, pdtb);
    let instances = pairs.into_iter().filter_map(|p| d.process(p)).collect();
    (instances, d.frequencies, d.stats)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerOrigin {
    Discovered,
    Pdtb,
    Both,
}

impl MarkerOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            MarkerOrigin::Discovered => "discovered",
            MarkerOrigin::Pdtb => "pdtb",
            MarkerOrigin::Both => "both",
        }
    }

    /// Found by the tagging rule, whether or not it is also seeded.
    pub fn is_discovered(self) -> bool {
        matches!(self, MarkerOrigin::Discovered | MarkerOrigin::Both)
    }
}

impl FromStr for MarkerOrigin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discovered" => Ok(MarkerOrigin::Discovered),
            "pdtb" => Ok(MarkerOrigin::Pdtb),
            "both" => Ok(MarkerOrigin::Both),
            other => Err(Error::Format(format!("unknown marker origin {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub form: String,
    pub origin: MarkerOrigin,
    pub count: u64,
}

/// Markers kept for dataset construction, by descending count then form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerLexicon {
    pub entries: Vec<LexiconEntry>,
}

impl MarkerLexicon {
    pub fn from_entries(mut entries: Vec<LexiconEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if e.form.is_empty() || e.form.contains(|c: char| c.is_whitespace() || c == ',') {
                return Err(Error::Format(format!("invalid marker form {:?}", e.form)));
            }
            if !seen.insert(e.form.as_str()) {
                return Err(Error::Format(format!("duplicate marker {:?}", e.form)));
            }
        }
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.form.cmp(&b.form)));
        Ok(MarkerLexicon { entries })
    }

    pub fn get(&self, form: &str) -> Option<&LexiconEntry> {
        self.entries.iter().find(|e| e.form == form)
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.form.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `form TAB origin TAB count` lines.
    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\t{}\n", e.form, e.origin.as_str(), e.count))
            .collect()
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split('\t').collect();
            let [form, origin, count] = cols[..] else {
                return Err(Error::Format(format!("lexicon line {}: expected 3 columns", i + 1)));
            };
            entries.push(LexiconEntry {
                form: form.to_string(),
                origin: origin.parse()?,
                count: count
                    .parse()
                    .map_err(|_| Error::Format(format!("lexicon line {}: bad count {count:?}", i + 1)))?,
            });
        }
        MarkerLexicon::from_entries(entries)
    }
}

/// Keeps markers seen at least `min_count` times and labels their origin.
/// An empty result is not an error; callers decide whether to warn.
pub fn build_lexicon(
    frequencies: &FrequencyMap,
    pdtb_forms: &HashSet<String>,
    min_count: u64,
) -> Result<MarkerLexicon> {
    if min_count < 1 {
        return Err(Error::Argument("min_count must be at least 1".into()));
    }
    let entries = frequencies
        .markers
        .iter()
        .filter(|(_, c)| c.count >= min_count)
        .map(|(form, c)| LexiconEntry {
            form: form.clone(),
            origin: match (c.tagged > 0, pdtb_forms.contains(form)) {
                (true, true) => MarkerOrigin::Both,
                (true, false) => MarkerOrigin::Discovered,
                (false, _) => MarkerOrigin::Pdtb,
            },
            count: c.count,
        })
        .collect();
    MarkerLexicon::from_entries(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(s1: &str, s2: &str) -> SentencePair {
        SentencePair::ingest(s1, s2)
    }

    #[test]
    fn table_one_instance() {
        let p = pair(
            "Paul Prudhomme's Louisiana Kitchen created a sensation when it was published in 1984.",
            "Happily, this family collective cookbook is just as good",
        );
        let inst = make_instance(&p, "happily").unwrap();
        assert_eq!(inst.s2_prime, "This family collective cookbook is just as good");
        assert_eq!(inst.marker, "happily");
        assert_eq!(inst.s1, p.s1);
    }

    #[test]
    fn strip_and_capitalize() {
        let inst = make_instance(&pair("x y z.", "However, it failed."), "however").unwrap();
        assert_eq!(inst.s2_prime, "It failed.");
        let inst = make_instance(&pair("x y z.", "So ,  \"quoted\" text."), "so").unwrap();
        assert_eq!(inst.s2_prime, "\"Quoted\" text.");
        let inst = make_instance(&pair("It's cold.", "Very, very cold."), "very").unwrap();
        assert_eq!(inst.s2_prime, "Very cold.");
    }

    #[test]
    fn rejections() {
        assert_eq!(
            make_instance(&pair("a.", "So,"), "so"),
            Err(InstanceRejection::EmptyRemainder)
        );
        assert_eq!(
            make_instance(&pair("a.", "So,   "), "so"),
            Err(InstanceRejection::EmptyRemainder)
        );
        assert_eq!(
            make_instance(&pair("a.", "But I'm often abroad."), "but"),
            Err(InstanceRejection::PatternMismatch)
        );
        assert_eq!(
            make_instance(&pair("a.", "Sure, sure, fine."), "sure"),
            Err(InstanceRejection::RepeatedMarker)
        );
        assert_eq!(
            make_instance(&pair("a.", "Soon, it ends."), "so"),
            Err(InstanceRejection::PatternMismatch)
        );
    }

    #[test]
    fn lexicon_origins_and_order() {
        let mut f = FrequencyMap::default();
        for _ in 0..5 {
            f.record("a", MatchKind::Tagged);
        }
        for _ in 0..5 {
            f.record("however", MatchKind::Tagged);
        }
        for _ in 0..4 {
            f.record("but", MatchKind::Seeded);
        }
        f.record("b", MatchKind::Tagged);
        let pdtb: HashSet<String> = ["however", "but"].iter().map(|s| s.to_string()).collect();
        let lex = build_lexicon(&f, &pdtb, 3).unwrap();
        let got: Vec<(&str, MarkerOrigin, u64)> = lex
            .entries
            .iter()
            .map(|e| (e.form.as_str(), e.origin, e.count))
            .collect();
        assert_eq!(
            got,
            vec![
                ("a", MarkerOrigin::Discovered, 5),
                ("however", MarkerOrigin::Both, 5),
                ("but", MarkerOrigin::Pdtb, 4),
            ]
        );
        assert_eq!(MarkerLexicon::from_tsv(&lex.to_tsv()).unwrap(), lex);
        assert!(build_lexicon(&f, &pdtb, 0).is_err());
        assert!(build_lexicon(&f, &pdtb, 100).unwrap().is_empty());
    }

    #[test]
    fn min_count_filter() {
        let mut f = FrequencyMap::default();
        for _ in 0..5 {
            f.record("a", MatchKind::Tagged);
        }
        f.record("b", MatchKind::Tagged);
        f.record("b", MatchKind::Tagged);
        let lex = build_lexicon(&f, &HashSet::new(), 3).unwrap();
        assert_eq!(lex.forms().collect::<Vec<_>>(), vec!["a"]);
    }

    #[test]
    fn lexicon_rejects_bad_forms() {
        let bad = |form: &str| LexiconEntry {
            form: form.into(),
            origin: MarkerOrigin::Pdtb,
            count: 1,
        };
        assert!(MarkerLexicon::from_entries(vec![bad("a b")]).is_err());
        assert!(MarkerLexicon::from_entries(vec![bad("so,")]).is_err());
        assert!(MarkerLexicon::from_entries(vec![bad("x"), bad("x")]).is_err());
    }

    #[test]
    fn bundled_list_is_lowercase_single_words() {
        let forms = bundled_pdtb_markers();
        assert!(forms.len() >= 60);
        assert!(forms.contains("however"));
        assert!(forms.iter().all(|f| f.chars().all(|c| c.is_lowercase())));
    }
}
