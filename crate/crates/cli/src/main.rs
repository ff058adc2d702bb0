//! Batch sonification front end: CSV table + job config in, WAV out.

use std::path::PathBuf;

use clap::Parser;

mod config;
mod error;
mod report;
mod table;

use config::{JobConfig, SourceKind};
use error::{CliError, CliResult};

use sonify_core::channels::make_bank;
use sonify_core::generator::{GeneratorKind, LoopMode, SampleBank};
use sonify_core::presets;
use sonify_core::render::{render, RenderPlan, SourceSet};
use sonify_core::score::{ChordSequence, ScoreSpec};
use sonify_core::sources::{build_event_set, build_object_source, Table};
use sonify_core::wav::{write_wav, WavEncoding};

/// Render a data table into a spatialized sonification.
#[derive(Parser, Debug)]
#[command(name = "sonify", version, about)]
struct Args {
    /// Input CSV table (header row, numeric body)
    #[arg(long)]
    data: PathBuf,

    /// Job configuration file (YAML)
    #[arg(long)]
    config: PathBuf,

    /// Output WAV path (overrides `render.out` in the config)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Generator preset name or file (overrides the config)
    #[arg(long)]
    preset: Option<String>,

    /// Output system: mono, stereo, 5.1, 7.1, ambiX<n> (overrides the config)
    #[arg(long)]
    system: Option<String>,

    /// Sonification duration in seconds (overrides the config)
    #[arg(long)]
    duration: Option<f64>,

    /// Master random seed (overridden by SONIFY_SEED)
    #[arg(long)]
    seed: Option<u64>,

    /// Verbose logging to stderr
    #[arg(long)]
    verbose: bool,

    /// Validate the whole plan and print it without rendering
    #[arg(long)]
    dry_run: bool,
}

fn main() {
    let args = Args::parse();
    env_logger::Builder::new()
        .filter_level(if args.verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .init();

    if let Err(err) = execute(&args) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}

fn build_sources(job: &JobConfig, table: &Table) -> CliResult<SourceSet> {
    match job.source.kind {
        SourceKind::Events => {
            if !job.source.statics.is_empty() {
                return Err(CliError::Config(
                    "`source.statics`: only object sources take static values".into(),
                ));
            }
            // A spectrum column with no mappings audifies the whole column
            // as a single event.
            if let Some(col) = &job.source.spectrum_column {
                let spectrum = table
                    .column(col)
                    .map_err(CliError::from_data_stage)?
                    .to_vec();
                if job.source.mappings.is_empty() {
                    let trigger = Table::from_columns(vec![("event".into(), vec![0.0])])
                        .map_err(CliError::from_data_stage)?;
                    let events = build_event_set(&trigger, &[])
                        .and_then(|e| e.with_spectra(vec![spectrum]))
                        .map_err(CliError::from_data_stage)?;
                    return Ok(SourceSet::Events(events));
                }
                let events = build_event_set(table, &job.source.mappings)
                    .map_err(CliError::from_data_stage)?;
                let spectra = vec![spectrum; events.count()];
                return Ok(SourceSet::Events(
                    events
                        .with_spectra(spectra)
                        .map_err(CliError::from_data_stage)?,
                ));
            }
            let events = build_event_set(table, &job.source.mappings)
                .map_err(CliError::from_data_stage)?;
            Ok(SourceSet::Events(events))
        }
        SourceKind::Object => {
            let time_column = job.source.time_column.as_deref().expect("checked at parse");
            let mut src = build_object_source(table, time_column, &job.source.mappings)
                .map_err(CliError::from_data_stage)?;
            for (param, value) in &job.source.statics {
                src.set_static(*param, *value)
                    .map_err(CliError::from_config_stage)?;
            }
            if let Some(col) = &job.source.spectrum_column {
                let spectrum = table
                    .column(col)
                    .map_err(CliError::from_data_stage)?
                    .to_vec();
                src.set_spectrum(spectrum);
            }
            Ok(SourceSet::Object(src))
        }
    }
}

fn resolve_seed(args: &Args, job: &JobConfig) -> CliResult<u64> {
    if let Ok(raw) = std::env::var("SONIFY_SEED") {
        return raw.trim().parse().map_err(|_| {
            CliError::Config(format!("SONIFY_SEED: `{raw}` is not a non-negative integer"))
        });
    }
    Ok(args.seed.unwrap_or(job.render.seed))
}

fn execute(args: &Args) -> CliResult<()> {
    let job = config::load_job(&args.config)?;

    // Fail fast: resolve every reference before rendering begins.
    let table = table::load_table(&args.data)?;
    let sources = build_sources(&job, &table)?;

    let preset_name = args.preset.clone().unwrap_or(job.generator.preset.clone());
    let tree = presets::load_preset(&preset_name).map_err(CliError::from_config_stage)?;
    let tree = match &job.generator.overrides_yaml {
        Some(yaml) => {
            let overrides =
                presets::parse_overrides(yaml).map_err(CliError::from_config_stage)?;
            presets::merge_overrides(&tree, &overrides).map_err(CliError::from_config_stage)?
        }
        None => tree,
    };
    let mut generator = presets::compile(&tree).map_err(CliError::from_config_stage)?;
    if let Some(kind) = &job.generator.kind {
        generator.kind = match kind.as_str() {
            "synthesiser" => GeneratorKind::Synthesiser,
            "sampler" => GeneratorKind::Sampler,
            "spectraliser" => GeneratorKind::Spectraliser,
            other => {
                return Err(CliError::Config(format!(
                    "`generator.kind`: unknown kind `{other}`"
                )))
            }
        };
    }

    let duration = args.duration.unwrap_or(job.score.duration);
    let chords = ChordSequence::parse(&job.score.chords).map_err(CliError::from_config_stage)?;
    let score = ScoreSpec::new(chords, duration).map_err(CliError::from_config_stage)?;

    let system = args.system.clone().unwrap_or(job.render.system.clone());
    let bank = make_bank(&system).map_err(CliError::from_config_stage)?;
    let encoding =
        WavEncoding::parse(&job.render.encoding).map_err(CliError::from_config_stage)?;

    let sample_bank = if generator.kind == GeneratorKind::Sampler {
        let dir = job.generator.sample_dir.as_ref().ok_or_else(|| {
            CliError::Config("`generator.sample_dir`: required for the sampler".into())
        })?;
        let loop_mode = match &job.generator.loop_mode {
            Some(name) => LoopMode::parse(name).map_err(CliError::from_config_stage)?,
            None => presets::sampler_loop_mode(&tree),
        };
        Some(
            SampleBank::from_dir(dir, job.render.sample_rate, loop_mode)
                .map_err(CliError::from_data_stage)?,
        )
    } else {
        None
    };

    let mut plan = RenderPlan::new(sources, score, generator, bank);
    plan.sample_bank = sample_bank;
    plan.sample_rate = job.render.sample_rate;
    plan.master_seed = resolve_seed(args, &job)?;
    if let Some(sustain) = job.render.event_sustain {
        plan.event_sustain = sustain;
    }
    plan.validate().map_err(CliError::from_config_stage)?;

    let out_path = args.out.clone().or(job.render.out.clone());
    if args.dry_run {
        report::print_dry_run(&plan, out_path.as_deref(), encoding.name());
        return Ok(());
    }
    let out_path = out_path.ok_or_else(|| {
        CliError::Config("no output path: pass --out or set `render.out`".into())
    })?;

    log::info!("rendering {} ...", out_path.display());
    let result = render(&plan).map_err(|e| match e {
        sonify_core::Error::Io(io) => CliError::Io(io.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    write_wav(&result.audio, &out_path, encoding)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_path.display())))?;

    report::print_report(&plan, &result, &out_path, encoding.name());
    Ok(())
}
