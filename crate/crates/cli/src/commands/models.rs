use markermine::analysis::{accuracy_report, extremes, ExtremesReport, Report};
use markermine::filtering::{parse_langid_tsv, train_langid};
use markermine::io::write_predictions;
use markermine::linclass::{instance_features, kfold_predictions, train_on_instances, FeaturizationMode};
use markermine::tagger::{read_tagged_corpus, token_accuracy, train_tagger};
use markermine::{Error, LinearModel};

use super::{apply_classifier_options, create, ensure_parent, load_instances, read_text, write_json};
use crate::args::{ClassifyEvalArgs, ClassifyTrainArgs, KfoldArgs, LangidTrainArgs, TaggerTrainArgs};
use crate::config::PipelineConfig;

pub fn tagger_train(mut cfg: PipelineConfig, args: &TaggerTrainArgs) -> Result<(), Error> {
    if let Some(v) = args.epochs {
        cfg.tagger.epochs = v;
    }
    cfg.validate()?;
    let corpus = read_tagged_corpus(&read_text(&args.corpus)?)
        .map_err(|e| Error::Format(format!("{}: {e}", args.corpus.display())))?;
    let model = train_tagger(&corpus, &cfg.tagger_train())?;
    ensure_parent(&args.output)?;
    model.save(&args.output)?;
    eprintln!(
        "tagger: {} sentences, {} tags, training accuracy {:.4}",
        corpus.len(),
        model.tagset().len(),
        token_accuracy(&model, &corpus)
    );
    Ok(())
}

pub fn langid_train(mut cfg: PipelineConfig, args: &LangidTrainArgs) -> Result<(), Error> {
    if let Some(v) = args.epochs {
        cfg.langid.epochs = v;
    }
    if let Some(v) = args.dim {
        cfg.langid.dim = v;
    }
    if let Some(v) = args.buckets {
        cfg.langid.buckets = v;
    }
    cfg.validate()?;
    let samples = parse_langid_tsv(&read_text(&args.input)?, &args.input.display().to_string())?;
    let model = train_langid(&samples, &cfg.langid_features(), &cfg.langid_train())?;
    ensure_parent(&args.output)?;
    model.save(&args.output)?;
    eprintln!(
        "language identifier: {} samples, labels {:?}",
        samples.len(),
        model.labels()
    );
    Ok(())
}

pub fn classify_train(mut cfg: PipelineConfig, args: &ClassifyTrainArgs) -> Result<(), Error> {
    apply_classifier_options(&mut cfg, &args.classifier);
    cfg.validate()?;
    let instances = load_instances(&args.instances, args.format.into())?;
    let model = train_on_instances(
        &instances,
        cfg.classifier.mode,
        &cfg.classifier_features(),
        &cfg.classifier_train(),
    )?;
    ensure_parent(&args.output)?;
    model.save(&args.output)?;
    eprintln!(
        "classifier: {} instances, {} labels",
        instances.len(),
        model.labels().len()
    );
    Ok(())
}

pub fn classify_eval(cfg: PipelineConfig, args: &ClassifyEvalArgs) -> Result<(), Error> {
    cfg.validate()?;
    let model = LinearModel::load(&args.model)?;
    let features = model.feature_config().clone();
    let mode = match args.mode {
        Some(m) => m.into(),
        None if features.side_prefixing => FeaturizationMode::Pair,
        None => FeaturizationMode::S2Only,
    };
    let instances = load_instances(&args.instances, args.format.into())?;
    let mut top = Vec::with_capacity(instances.len());
    for i in &instances {
        top.push(model.predict_topk(&instance_features(i, mode, &features)?, args.k));
    }
    let gold: Vec<&str> = instances.iter().map(|i| i.marker.as_str()).collect();
    let accuracy = accuracy_report(&top, &gold, args.k)?;
    let (bottom, best) = extremes(&accuracy, args.extremes);
    let report = Report {
        accuracy: Some(accuracy),
        extremes: Some(ExtremesReport {
            n: args.extremes,
            bottom,
            top: best,
        }),
        ..Report::new()
    };
    print!("{}", report.render());
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    Ok(())
}

pub fn kfold(mut cfg: PipelineConfig, args: &KfoldArgs) -> Result<(), Error> {
    apply_classifier_options(&mut cfg, &args.classifier);
    if let Some(v) = args.folds {
        cfg.kfold.folds = v;
    }
    if let Some(v) = args.top_k {
        cfg.kfold.top_k = v;
    }
    cfg.validate()?;
    let instances = load_instances(&args.instances, args.format.into())?;
    let preds = kfold_predictions(&instances, &cfg.kfold_config())?;
    write_predictions(create(&args.output)?, &preds)?;
    let hits = preds.iter().filter(|p| p.top.first() == Some(&p.gold)).count();
    eprintln!(
        "{} predictions over {} folds, top-1 accuracy {:.4}",
        preds.len(),
        cfg.kfold.folds,
        hits as f64 / preds.len() as f64
    );
    Ok(())
}
