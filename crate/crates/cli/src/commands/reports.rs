use markermine::analysis::{
    accuracy_report, export_marker_vectors, extremes, frequency_report, write_embeddings_tsv, ExtremesReport, Report,
};
use markermine::extraction::FrequencyMap;
use markermine::io::read_predictions;
use markermine::{Error, LinearModel};

use super::{create, read_text, write_json};
use crate::args::{ExportArgs, ReportArgs, StatsArgs};
use crate::config::PipelineConfig;

fn load_frequencies(path: &std::path::Path) -> Result<FrequencyMap, Error> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn stats(cfg: PipelineConfig, args: &StatsArgs) -> Result<(), Error> {
    cfg.validate()?;
    let frequencies = load_frequencies(&args.frequencies)?;
    let table = frequency_report(&frequencies, args.cap.unwrap_or(cfg.discover.cap));
    if let Some(path) = &args.tsv {
        let mut w = create(path)?;
        std::io::Write::write_all(&mut w, table.to_tsv().as_bytes())
            .and_then(|_| std::io::Write::flush(&mut w))
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    let report = Report {
        frequencies: Some(table),
        ..Report::new()
    };
    print!("{}", report.render());
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    Ok(())
}

pub fn report(cfg: PipelineConfig, args: &ReportArgs) -> Result<(), Error> {
    cfg.validate()?;
    let file = std::fs::File::open(&args.predictions)
        .map_err(|e| Error::io(format!("opening {}", args.predictions.display()), e))?;
    let preds = read_predictions(std::io::BufReader::new(file), &args.predictions.display().to_string())?;
    let top: Vec<&[String]> = preds.iter().map(|p| p.top.as_slice()).collect();
    let gold: Vec<&str> = preds.iter().map(|p| p.gold.as_str()).collect();
    let accuracy = accuracy_report(&top, &gold, args.k)?;
    let (bottom, best) = extremes(&accuracy, args.extremes);
    let frequencies = args
        .frequencies
        .as_deref()
        .map(|p| load_frequencies(p).map(|f| frequency_report(&f, cfg.discover.cap)))
        .transpose()?;
    let report = Report {
        accuracy: Some(accuracy),
        extremes: Some(ExtremesReport {
            n: args.extremes,
            bottom,
            top: best,
        }),
        frequencies,
        ..Report::new()
    };
    print!("{}", report.render());
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    Ok(())
}

pub fn export_embeddings(cfg: PipelineConfig, args: &ExportArgs) -> Result<(), Error> {
    cfg.validate()?;
    let model = LinearModel::load(&args.model)?;
    let vectors = export_marker_vectors(&model)?;
    write_embeddings_tsv(create(&args.output)?, &vectors)?;
    eprintln!("{} marker vectors of dimension {}", vectors.len(), model.dim());
    Ok(())
}
