use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use tablealign::ingest::{
    load_dataset, read_canonical_file, write_canonical_file, DatasetKind, DatasetManifest, RecordFailure,
};
use tablealign::metrics::{evaluate_corpus, format_metric_report};
use tablealign::pipeline::{format_report, run_pipeline, Mode, PipelineOptions, PipelineReport};
use tablealign::render::{find_table, parse_layers, render_svg};
use tablealign::stats::{dataset_stats, format_stats_table};

use crate::{EvaluateArgs, OptionOverrides, ProcessArgs, RenderArgs, StatsArgs};

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn pipeline_options(config: Option<&Path>, o: &OptionOverrides) -> Result<PipelineOptions> {
    let mut opts = match config {
        Some(p) => {
            let raw = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&raw).with_context(|| format!("parsing {}", p.display()))?
        }
        None => PipelineOptions::default(),
    };
    if let Some(v) = o.dot_leader_min_dots {
        opts.dot_leader_min_dots = v;
    }
    if let Some(v) = o.word_overlap_threshold {
        opts.word_overlap_threshold = v;
    }
    if let Some(v) = o.word_coverage_threshold {
        opts.word_coverage_threshold = v;
    }
    if let Some(v) = o.iteration_cap {
        opts.iteration_cap = v;
    }
    if let Some(v) = &o.currency_glyphs {
        opts.currency_glyphs = v.clone();
    }
    for (name, v) in [
        ("word_overlap_threshold", opts.word_overlap_threshold),
        ("word_coverage_threshold", opts.word_coverage_threshold),
    ] {
        if !(0.0..=1.0).contains(&v) {
            bail!("{name} must lie in [0, 1], got {v}");
        }
    }
    if opts.dot_leader_min_dots == 0 || opts.iteration_cap == 0 {
        bail!("dot_leader_min_dots and iteration_cap must be positive");
    }
    Ok(opts)
}

#[derive(Serialize)]
struct ProcessReport<'a> {
    #[serde(flatten)]
    pipeline: &'a PipelineReport,
    options: &'a PipelineOptions,
    parse_failures: &'a [RecordFailure],
}

pub fn process(a: &ProcessArgs) -> Result<ExitCode> {
    let opts = pipeline_options(a.config.as_deref(), &a.overrides)?;
    let manifest = DatasetManifest::load(&a.manifest)?;
    let mode = a.mode.unwrap_or(match manifest.kind {
        DatasetKind::Icdar => Mode::Icdar,
        _ => Mode::Standard,
    });
    let loaded = load_dataset(&manifest)?;
    log::info!(
        "{}: {} tables read, {} unreadable",
        manifest.name,
        loaded.tables.len(),
        loaded.failures.len()
    );
    let run = run_pipeline(&manifest.name, &loaded.tables, a.stage, mode, &opts, &loaded.corrections)?;

    create_dir(&a.out)?;
    for snap in &run.snapshots {
        let path = a.out.join(format!("{}.{}.jsonl", manifest.name, snap.stage));
        write_canonical_file(&path, &snap.tables)?;
        log::info!("wrote {} ({} tables)", path.display(), snap.tables.len());
    }
    write_json(
        &a.out.join("report.json"),
        &ProcessReport {
            pipeline: &run.report,
            options: &opts,
            parse_failures: &loaded.failures,
        },
    )?;
    let mut text = format_report(&run.report);
    text.push_str(&format!("\nunreadable records: {}\n", loaded.failures.len()));
    for f in &loaded.failures {
        text.push_str(&format!("  {} {}: [{}] {}\n", f.source, f.record, f.code, f.message));
    }
    write(&a.out.join("report.txt"), &text)?;
    print!("{text}");

    if loaded.failures.len() > a.max_parse_failures {
        eprintln!(
            "error: {} unreadable records exceed the limit of {}",
            loaded.failures.len(),
            a.max_parse_failures
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn evaluate(a: &EvaluateArgs) -> Result<ExitCode> {
    let gt = read_canonical_file(&a.gt)?;
    let pred = read_canonical_file(&a.pred)?;
    let report = evaluate_corpus(&gt, &pred)?;
    create_dir(&a.out)?;
    write_json(&a.out.join("metrics.json"), &report)?;
    let mut csv = csv::Writer::from_path(a.out.join("metrics.csv"))?;
    for row in &report.tables {
        csv.serialize(row)?;
    }
    csv.flush()?;
    let text = format_metric_report(&report);
    write(&a.out.join("metrics.txt"), &text)?;
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

pub fn stats(a: &StatsArgs) -> Result<ExitCode> {
    let tables = read_canonical_file(&a.input)?;
    let s = dataset_stats(&tables)?;
    let name = a
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    let text = format_stats_table(&[(name, s.clone())]);
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_json(&dir.join("stats.json"), &s)?;
        write(&dir.join("stats.txt"), &text)?;
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

pub fn render(a: &RenderArgs) -> Result<ExitCode> {
    let layers = parse_layers(&a.layers)?;
    let tables = read_canonical_file(&a.input)?;
    let svg = render_svg(find_table(&tables, &a.table)?, &layers);
    match &a.out {
        Some(path) => write(path, svg)?,
        None => std::io::stdout().write_all(svg.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}
