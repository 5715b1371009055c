use std::path::Path;

use markermine::datasets::{
    build_dataset, shuffle_within_labels, write_dataset_dir, Proportions, VariantAux, VariantKind, VariantSpec,
};
use markermine::io::{read_predictions, write_instances};
use markermine::{Error, Instance, MarkerLexicon};

use super::{create, load_instances, read_text};
use crate::args::{BuildArgs, ShuffleArgs};
use crate::config::PipelineConfig;
use crate::manifest::source_checksums;

fn parse_split(text: &str) -> Result<Proportions, Error> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Argument(format!("split {text:?} is not three comma-separated numbers")))?;
    let [train, valid, test] = parts[..] else {
        return Err(Error::Argument(format!("split {text:?} needs exactly three shares")));
    };
    Ok(Proportions { train, valid, test })
}

/// Top-k lists ordered like `instances`, checked against their gold markers.
fn aligned_predictions(path: &Path, instances: &[Instance]) -> Result<Vec<Vec<String>>, Error> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let preds = read_predictions(std::io::BufReader::new(file), &path.display().to_string())?;
    if preds.len() != instances.len() {
        return Err(Error::Argument(format!(
            "{} has {} predictions for {} instances",
            path.display(),
            preds.len(),
            instances.len()
        )));
    }
    let mut top: Vec<Option<Vec<String>>> = vec![None; instances.len()];
    for p in preds {
        let slot = top
            .get_mut(p.index)
            .ok_or_else(|| Error::Argument(format!("prediction index {} out of range", p.index)))?;
        if slot.is_some() || instances[p.index].marker != p.gold {
            return Err(Error::Argument(format!(
                "prediction {} does not match instance {} ({:?})",
                p.index, p.index, instances[p.index].marker
            )));
        }
        *slot = Some(p.top);
    }
    Ok(top.into_iter().map(|t| t.expect("every index filled once")).collect())
}

pub fn build(mut cfg: PipelineConfig, args: &BuildArgs) -> Result<(), Error> {
    if let Some(v) = args.scale {
        cfg.build.scale = v;
    }
    if let Some(v) = args.per_marker {
        cfg.build.per_marker = Some(v);
    }
    if let Some(s) = &args.split {
        cfg.build.proportions = parse_split(s)?;
    }
    if let Some(f) = args.format {
        cfg.build.format = f.into();
    }
    cfg.validate()?;
    let kind: VariantKind = args.variant.into();
    let instances = load_instances(&args.instances, cfg.build.format)?;
    let predictions = args
        .predictions
        .as_deref()
        .map(|p| aligned_predictions(p, &instances))
        .transpose()?;
    let lexicon = args
        .lexicon
        .as_deref()
        .map(|p| MarkerLexicon::from_tsv(&read_text(p)?))
        .transpose()?;
    let spec = VariantSpec {
        kind,
        per_marker: cfg.build.per_marker,
        scale: cfg.build.scale,
        seed: cfg.seed,
    };
    let aux = VariantAux {
        lexicon: lexicon.as_ref(),
        predictions: predictions.as_deref(),
    };
    let mut built = build_dataset(&instances, &spec, &aux, &cfg.build.proportions)?;
    let sources = [
        Some(args.instances.as_path()),
        args.predictions.as_deref(),
        args.lexicon.as_deref(),
    ];
    built.manifest.sources = source_checksums(sources.into_iter().flatten())?;
    built.manifest.config = serde_json::to_value(&cfg).map_err(|e| Error::Format(e.to_string()))?;
    write_dataset_dir(&args.output, &built, cfg.build.format)?;
    for w in &built.manifest.variant.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "{kind}: {} markers x {} = {} instances ({} train, {} valid, {} test)",
        built.manifest.variant.markers.len(),
        built.manifest.variant.per_marker,
        built.split.len(),
        built.split.train.len(),
        built.split.valid.len(),
        built.split.test.len()
    );
    Ok(())
}

pub fn shuffle(cfg: PipelineConfig, args: &ShuffleArgs) -> Result<(), Error> {
    cfg.validate()?;
    let instances = load_instances(&args.input, args.format.into())?;
    let shuffled = shuffle_within_labels(&instances, cfg.seed);
    write_instances(create(&args.output)?, &shuffled, args.format.into())
}
