use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use darwinism::classifier::{classify, Overall, VerdictReport};
use darwinism::experiments::{
    metadata, run_sweep, run_with, write_decoherence_csv, write_plateau_csv, write_profile_csv, write_sweep_summary,
    ExperimentResult, InitialStateKind, RunOptions, SweepAxis, SweepMeasure, SweepOutcome,
};
use darwinism::{Error, Result};

use crate::cache::Cache;
use crate::config::{FileConfig, ModelArgs, ModelConfig, RunArgs, RunConfig};

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Profile CSV; a `.json` sidecar is written next to it. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// initial_state_kind, distribution_kind or replaced_unit_index.
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<String>>,
    /// `profile` or `decoherence[:I:J]` (pointer states I and J, default 0 and 1).
    #[arg(long)]
    pub measure: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Writes through a `.partial` sibling and renames, so readers never see half a file.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    let res = (|| {
        let mut w = BufWriter::new(File::create(&partial)?);
        body(&mut w)?;
        w.flush()?;
        drop(w);
        std::fs::rename(&partial, path)?;
        Ok(())
    })();
    if res.is_err() {
        let _ = std::fs::remove_file(&partial);
    }
    res
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{ext}"))
}

pub fn verdict_exit_code(overall: &Overall) -> i32 {
    match overall {
        Overall::SupportsQd => 0,
        Overall::FailsNoPointer | Overall::FailsMixing | Overall::FailsSupport => 2,
        Overall::StatePrepPrefix { .. } => 3,
    }
}

pub fn classify_cmd(args: &ClassifyArgs) -> Result<i32> {
    let file = FileConfig::load_opt(args.model.config.as_deref())?;
    let cfg = ModelConfig::resolve(&args.model, &file)?;
    let model = cfg.build()?;
    let verdict = classify(&model)?;
    let report = VerdictReport::new(&model.info.name, &verdict);
    match args.out.as_ref().or(file.out.as_ref()) {
        Some(path) => write_atomic(path, |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            Ok(writeln!(w)?)
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    for w in &verdict.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{}: {} ({})", report.model, report.verdict, report.reason);
    Ok(verdict_exit_code(&verdict.overall))
}

fn run_cached(cfg: &RunConfig) -> Result<ExperimentResult> {
    let spec = cfg.spec();
    let cache = Cache::from_env();
    if let Some(hit) = cache.as_ref().and_then(|c| c.get(&spec)) {
        return Ok(hit);
    }
    let result = run_with(&spec, RunOptions { workers: cfg.workers })?;
    if let Some(c) = &cache {
        if let Err(e) = c.put(&spec, &result) {
            eprintln!("warning: could not write cache entry: {e}");
        }
    }
    Ok(result)
}

fn sidecar(result: &ExperimentResult, cfg: &RunConfig) -> Result<serde_json::Value> {
    let mut meta = metadata(result, cfg.epsilon);
    meta["run_config"] = serde_json::to_value(cfg)?;
    Ok(meta)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        Ok(writeln!(w)?)
    })
}

/// Profile CSV, metadata sidecar and, if requested, plateau scores.
fn write_profile_outputs(result: &ExperimentResult, cfg: &RunConfig, csv_path: &Path) -> Result<()> {
    write_atomic(csv_path, |w| write_profile_csv(result, w))?;
    write_json(&with_extension(csv_path, "json"), &sidecar(result, cfg)?)?;
    if cfg.plateau_summary {
        let stem = csv_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let path = csv_path.with_file_name(format!("{stem}.plateau.csv"));
        write_atomic(&path, |w| write_plateau_csv(result, cfg.epsilon, w))?;
    }
    Ok(())
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<i32> {
    let file = FileConfig::load_opt(args.model.config.as_deref())?;
    let cfg = RunConfig::resolve(&args.model, &args.run, args.out.clone(), &file)?;
    let result = run_cached(&cfg)?;
    match &cfg.out {
        Some(path) => write_profile_outputs(&result, &cfg, path)?,
        None => {
            write_profile_csv(&result, std::io::stdout().lock())?;
            if cfg.plateau_summary {
                eprintln!("warning: --plateau-summary needs --out; skipped");
            }
        }
    }
    if let Some(v) = &result.verdict {
        eprintln!("{}: {}", result.model_name, v.verdict);
    }
    Ok(0)
}

fn parse_axis(name: &str, values: &[String]) -> Result<SweepAxis> {
    Ok(match name {
        "initial_state_kind" | "initial_state" => {
            SweepAxis::InitialStateKind(values.iter().map(|v| InitialStateKind::parse(v.trim())).collect::<Result<_>>()?)
        }
        "distribution_kind" | "coupling" => {
            SweepAxis::DistributionKind(values.iter().map(|v| v.trim().parse()).collect::<Result<_>>()?)
        }
        "replaced_unit_index" | "replaced_unit" => SweepAxis::ReplacedUnitIndex(
            values
                .iter()
                .map(|v| v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad unit index {v:?}"))))
                .collect::<Result<_>>()?,
        ),
        _ => return Err(Error::Parse(format!("unknown sweep axis {name:?}"))),
    })
}

fn parse_measure(s: &str) -> Result<SweepMeasure> {
    let mut parts = s.split(':');
    match parts.next() {
        Some("profile") if parts.next().is_none() => Ok(SweepMeasure::Profile),
        Some("decoherence") => {
            let rest: Vec<&str> = parts.collect();
            let idx = |v: &str| v.parse::<usize>().map_err(|_| Error::Parse(format!("bad pointer index in {s:?}")));
            let pair = match rest.as_slice() {
                [] => (0, 1),
                [i, j] => (idx(i)?, idx(j)?),
                _ => return Err(Error::Parse(format!("expected decoherence:I:J, got {s:?}"))),
            };
            Ok(SweepMeasure::Decoherence { pair })
        }
        _ => Err(Error::Parse(format!("unknown measure {s:?}"))),
    }
}

/// File-name-safe form of an axis label.
fn slug(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<i32> {
    let file = FileConfig::load_opt(args.model.config.as_deref())?;
    let cfg = RunConfig::resolve(&args.model, &args.run, args.out.clone(), &file)?;
    let axis_name = args.axis.clone().or_else(|| file.axis.clone()).ok_or_else(|| Error::Parse("--axis is required".into()))?;
    let values = args.values.clone().or_else(|| file.values.clone()).ok_or_else(|| Error::Parse("--values is required".into()))?;
    let axis = parse_axis(&axis_name, &values)?;
    let measure = parse_measure(args.measure.as_deref().or(file.measure.as_deref()).unwrap_or("profile"))?;
    let dir = cfg.out.clone().ok_or_else(|| Error::Parse("sweep needs --out DIR".into()))?;

    let result = run_sweep(&cfg.spec(), &axis, measure, RunOptions { workers: cfg.workers })?;
    std::fs::create_dir_all(&dir)?;
    for (k, entry) in result.entries.iter().enumerate() {
        let base = format!("{k:02}_{}", slug(&entry.label));
        match &entry.outcome {
            SweepOutcome::Profile(r) => write_profile_outputs(r, &cfg, &dir.join(format!("{base}.csv")))?,
            SweepOutcome::Decoherence(d) => {
                write_atomic(&dir.join(format!("{base}.decoherence.csv")), |w| write_decoherence_csv(d, w))?;
            }
        }
    }
    write_atomic(&dir.join("summary.csv"), |w| write_sweep_summary(&result, cfg.epsilon, w))?;
    write_json(&dir.join("sweep.json"), &serde_json::json!({ "axis": axis, "run_config": cfg }))?;
    eprintln!("wrote {} results to {}", result.entries.len(), dir.display());
    Ok(0)
}
