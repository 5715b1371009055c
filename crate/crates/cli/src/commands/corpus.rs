use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use markermine::datasets::{apply_min_count, CapSampler};
use markermine::extraction::DiscoveryStats;
use markermine::extraction::{build_lexicon, bundled_pdtb_markers, parse_marker_list, Discoverer, FrequencyMap};
use markermine::filtering::{FilterConfig, FilterStats, PairFilter, RejectionReason};
use markermine::io::{parse_instance, write_instance, write_pair, InstanceFormat};
use markermine::{Error, LinearModel, TaggerModel};
use serde::Serialize;

use super::{apply_filter_options, create, read_text, write_json};
use crate::args::{DiscoverArgs, FilterArgs};
use crate::config::{resolve_path, DiscoverConfig, PipelineConfig, ENV_LANGID, ENV_PDTB, ENV_TAGGER};
use crate::manifest::source_checksums;
use crate::shards::{concatenate, for_each_line, for_each_pair, run_sharded};

fn write_err(e: std::io::Error) -> Error {
    Error::io("writing shard output", e)
}

#[derive(Serialize)]
struct FilterSummary<'a> {
    stats: &'a FilterStats,
    acceptance_rate: f64,
    filter: &'a FilterConfig,
    sources: BTreeMap<String, String>,
}

pub fn filter(mut cfg: PipelineConfig, args: &FilterArgs) -> Result<(), Error> {
    apply_filter_options(&mut cfg, &args.filter);
    cfg.validate()?;
    let langid_path = resolve_path(args.langid.as_deref(), cfg.paths.langid.as_deref(), ENV_LANGID)
        .ok_or_else(|| Error::Argument(format!("no language identifier: pass --langid or set {ENV_LANGID}")))?;
    let langid = LinearModel::load(&langid_path)?;
    let filter = PairFilter::new(cfg.filter.clone(), &langid)?;
    let (parts, per_shard) = run_sharded(&args.inputs, cfg.effective_threads(), &args.output, |path, out| {
        let mut stats = FilterStats::default();
        for_each_pair(path, args.input_kind, |pair| {
            let verdict = match &pair {
                Some(p) => filter.check(p),
                None => Err(RejectionReason::Malformed),
            };
            stats.record(verdict);
            match pair {
                Some(p) if verdict.is_ok() => write_pair(out, &p),
                _ => Ok(()),
            }
        })?;
        Ok(stats)
    })?;
    concatenate(&parts, &args.output)?;
    let mut stats = FilterStats::default();
    for s in &per_shard {
        stats.merge(s);
    }
    eprintln!(
        "kept {} of {} pairs ({:.2}%)",
        stats.accepted,
        stats.total,
        100.0 * stats.acceptance_rate()
    );
    if let Some(path) = &args.stats {
        let summary = FilterSummary {
            stats: &stats,
            acceptance_rate: stats.acceptance_rate(),
            filter: &cfg.filter,
            sources: source_checksums(args.inputs.iter().map(|p| p.as_path()))?,
        };
        write_json(path, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscoverSummary<'a> {
    stats: &'a DiscoveryStats,
    candidate_rate: f64,
    malformed_lines: u64,
    instances_written: usize,
    lexicon_size: usize,
    discover: &'a DiscoverConfig,
    filter: Option<&'a FilterConfig>,
    sources: BTreeMap<String, String>,
}

fn load_pdtb(cfg: &PipelineConfig, flag: Option<&std::path::Path>) -> Result<HashSet<String>, Error> {
    match resolve_path(flag, cfg.paths.pdtb.as_deref(), ENV_PDTB) {
        Some(path) => Ok(parse_marker_list(&read_text(&path)?)),
        None => Ok(bundled_pdtb_markers()),
    }
}

pub fn discover(mut cfg: PipelineConfig, args: &DiscoverArgs) -> Result<(), Error> {
    apply_filter_options(&mut cfg, &args.filter);
    if let Some(v) = args.min_count {
        cfg.discover.min_count = v;
    }
    if let Some(v) = args.cap {
        cfg.discover.cap = v;
    }
    cfg.validate()?;
    let tagger_path = resolve_path(args.tagger.as_deref(), cfg.paths.tagger.as_deref(), ENV_TAGGER)
        .ok_or_else(|| Error::Argument(format!("no tagger model: pass --tagger or set {ENV_TAGGER}")))?;
    let tagger = TaggerModel::load(&tagger_path)?;
    let pdtb = load_pdtb(&cfg, args.pdtb.as_deref())?;
    // only an explicit flag turns filtering on; pairs are usually pre-filtered
    let langid = args.langid.as_deref().map(LinearModel::load).transpose()?;

    let (parts, per_shard) = run_sharded(&args.inputs, cfg.effective_threads(), &args.output, |path, out| {
        let filter = langid
            .as_ref()
            .map(|m| PairFilter::new(cfg.filter.clone(), m))
            .transpose()?;
        let mut d = Discoverer::new(filter, &tagger, &pdtb);
        let mut malformed = 0u64;
        for_each_pair(path, args.input_kind, |pair| {
            match pair {
                Some(p) => {
                    if let Some(instance) = d.process(&p) {
                        write_instance(out, &instance, InstanceFormat::Tsv)?;
                    }
                }
                None => malformed += 1,
            }
            Ok(())
        })?;
        out.flush().map_err(write_err)?;
        Ok((d.frequencies, d.stats, malformed))
    })?;

    let mut frequencies = FrequencyMap::default();
    let mut stats = DiscoveryStats::default();
    let mut malformed = 0;
    for (f, s, m) in &per_shard {
        frequencies.merge(f);
        stats.merge(s);
        malformed += m;
    }
    let mut sampler = CapSampler::new(cfg.discover.cap, cfg.seed)?;
    for part in &parts.paths {
        for_each_line(part, |_, line| {
            sampler.push(parse_instance(line, InstanceFormat::Tsv)?);
            Ok(())
        })?;
    }
    let lexicon = build_lexicon(&frequencies, &pdtb, cfg.discover.min_count)?;
    let instances = apply_min_count(sampler.finish(), &lexicon, cfg.discover.min_count);

    let format: InstanceFormat = args.format.into();
    let mut out = create(&args.output)?;
    for i in &instances {
        write_instance(&mut out, i, format)?;
    }
    out.flush().map_err(write_err)?;
    if let Some(path) = &args.lexicon {
        let mut w = create(path)?;
        w.write_all(lexicon.to_tsv().as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    if let Some(path) = &args.frequencies {
        write_json(path, &frequencies)?;
    }
    eprintln!(
        "{} instances from {} pairs; {} markers, {} meet min count {}",
        stats.instances,
        stats.pairs,
        frequencies.len(),
        lexicon.len(),
        cfg.discover.min_count
    );
    if let Some(path) = &args.stats {
        let summary = DiscoverSummary {
            stats: &stats,
            candidate_rate: stats.candidate_rate(),
            malformed_lines: malformed,
            instances_written: instances.len(),
            lexicon_size: lexicon.len(),
            discover: &cfg.discover,
            filter: langid.as_ref().map(|_| &cfg.filter),
            sources: source_checksums(args.inputs.iter().map(|p| p.as_path()))?,
        };
        write_json(path, &summary)?;
    }
    Ok(())
}
