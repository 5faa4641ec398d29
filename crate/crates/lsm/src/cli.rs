//! Command-line interface.
//!
//! Every command loads and validates all inputs before it creates the output
//! directory. Failures print one line, `error: kind=<kind> code=<code>
//! msg=<json string>`, to stderr and exit with the code from
//! [`LsmError::exit_code`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use lsm_core::data::{gen_landmark_dataset, gen_sit_dataset, split_semi_supervised, Rows};
use lsm_core::metrics::MetricRecord;
use lsm_core::model::Term;
use lsm_core::train::{AblationId, History, TaskMetric};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{LsmError, Result};
use crate::experiment::{self, eval_records, SweepPlan};
use crate::format::{self, load_bundle, load_dataset, load_manifest, load_model, save_bundle, save_dataset, sha256_hex, write_json, MANIFEST};
use crate::import;
use crate::records::{read_records, write_records};
use crate::report::write_report;

#[derive(Debug, Parser)]
#[command(name = "lsm", version, about = "Latent space mapping: data generation, training, sweeps and reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic ring-on-texture segmentation dataset.
    GenSit {
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Image side length in pixels.
        #[arg(long, default_value_t = 32)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ring texture image; requires --texture-b.
        #[arg(long, requires = "texture_b")]
        texture_a: Option<PathBuf>,
        /// Background texture image; requires --texture-a.
        #[arg(long, requires = "texture_a")]
        texture_b: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate procedural face images with landmarks, or import a landmark CSV.
    GenLandmarks {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        size: usize,
        /// Landmarks per face.
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Import `path,x0,y0,...` rows instead of generating; --n, --k and --seed are ignored.
        #[arg(long)]
        from_csv: Option<PathBuf>,
        /// Eye landmark indices for imported data.
        #[arg(long, default_value = "0,1")]
        eyes: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a dataset into paired, unpaired, validation and test banks.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        /// Percentage of the first training half kept paired.
        #[arg(long)]
        n_percent: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model on a split dataset.
    Train {
        /// Bundle directory written by `split`.
        #[arg(long)]
        data: PathBuf,
        /// JSON run config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a trained model on a bundle (val and test) or a dataset (all pairs).
    Eval {
        /// Model directory, or a `train` output directory.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// auto, miou, nrmse or mse.
        #[arg(long, default_value = "auto")]
        metric: String,
        #[arg(long, default_value = "eval")]
        run_id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train over supervision levels and seeds; writes records and a report.
    Sweep {
        /// Dataset directory (unsplit).
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "100,60,20,5,3,1")]
        levels: String,
        #[arg(long, default_value = "1,2,3,4,5")]
        seeds: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Split seed shared by every run, fixing the test pairs per level.
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a set of loss ablations; rows of the report are ablation ids.
    Ablate {
        #[arg(long)]
        data: PathBuf,
        /// Digits: reconstruction x, reconstruction y, distance, confusion.
        #[arg(long, default_value = "0000,1000,1100,1110,1111")]
        ids: String,
        #[arg(long, default_value = "100,60,20,5,3,1")]
        levels: String,
        #[arg(long, default_value = "1,2,3")]
        seeds: String,
        /// Base config; each id switches its terms off on top of it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate a metric log into a table, a summary CSV and plots.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = LsmError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.one_line());
            return err.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.one_line());
            e.exit_code()
        }
    }
}

pub fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenSit {
            n,
            size,
            seed,
            texture_a,
            texture_b,
            out,
        } => {
            let textures = match (texture_a, texture_b) {
                (Some(a), Some(b)) => Some(import::load_texture_pair(&a, &b)?),
                _ => None,
            };
            let sit = gen_sit_dataset(n, size, seed, textures.as_ref()).map_err(usage)?;
            let mut params = Rows::empty(4);
            for p in &sit.params {
                params.push(&[p.cx, p.cy, p.r, p.t])?;
            }
            save_dataset(&out, &sit.dataset, &[("params", &params)])
        }
        Command::GenLandmarks {
            n,
            size,
            k,
            seed,
            from_csv,
            eyes,
            out,
        } => {
            let ds = match from_csv {
                Some(csv) => import::import_landmarks(&csv, size, parse_pair(&eyes)?)?,
                None => gen_landmark_dataset(n, size, k, seed).map_err(usage)?,
            };
            save_dataset(&out, &ds, &[])
        }
        Command::Split {
            input,
            n_percent,
            seed,
            out,
        } => {
            let ds = load_dataset(&input)?;
            let bundle = split_semi_supervised(&ds, n_percent, seed).map_err(usage)?;
            save_bundle(&out, &bundle)
        }
        Command::Train { data, config, seed, out } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let bundle = load_bundle(&data)?;
            let data_hash = manifest_hash(&data)?;
            let run = experiment::train_run(&bundle, &cfg)?;
            format::create_dir(&out)?;
            format::save_model(&out.join("model"), &run.outcome.model)?;
            write_records(&out.join("records.csv"), &run.records)?;
            write_history(&out.join("history.csv"), &run.outcome.history)?;
            let h = &run.outcome.history;
            write_json(
                &out.join("run.json"),
                &RunManifest {
                    kind: "train",
                    run_id: run.run_id.clone(),
                    config_hash: cfg.hash(),
                    config: cfg.clone(),
                    data_manifest_sha256: data_hash,
                    n_percent: bundle.n_percent,
                    metric: run.metric.name().into(),
                    monitor: h.monitor.clone(),
                    best_epoch: h.best_epoch,
                    best_value: h.best_value,
                    stopped_epoch: h.stopped_epoch(),
                    stop: h.stop.name().into(),
                    main_updates: h.main_updates,
                    dc_updates: h.dc_updates,
                    clamp_events: h.clamp_events,
                    warnings: h.warnings.clone(),
                },
            )
        }
        Command::Eval {
            model,
            data,
            metric,
            run_id,
            out,
        } => {
            if run_id.is_empty() || run_id.contains([',', '\n']) {
                return Err(LsmError::Usage("run id must be non-empty without ',' or newlines".into()));
            }
            let model_dir = if model.join("model").join("model.json").exists() {
                model.join("model")
            } else {
                model
            };
            let m = load_model(&model_dir)?;
            let model_hash = sha256_hex(&format::read_file(&model_dir.join("model.json"))?)[..16].to_string();
            let manifest = load_manifest(&data)?;
            let records = if manifest.kind == "bundle" {
                let bundle = load_bundle(&data)?;
                check_domains(&m, &bundle.x_spec, &bundle.y_spec)?;
                let metric = pick_metric(&metric, &bundle.y_spec, &bundle.info)?;
                eval_records(&m, &bundle, metric, &run_id, &model_hash, 0)?
            } else {
                let ds = load_dataset(&data)?;
                check_domains(&m, &ds.x_spec, &ds.y_spec)?;
                let metric = pick_metric(&metric, &ds.y_spec, &ds.info)?;
                let idx: Vec<usize> = (0..ds.len()).collect();
                let bank = lsm_core::data::PairBank::new(ds.x.clone(), ds.y.clone(), idx)?;
                lsm_core::train::evaluate(&m, &bank, metric)?
                    .map(|v| MetricRecord {
                        run_id: run_id.clone(),
                        config_hash: model_hash.clone(),
                        n_percent: 100,
                        epoch: 0,
                        split: "all".into(),
                        metric: metric.name().into(),
                        value: v,
                    })
                    .into_iter()
                    .collect()
            };
            format::create_dir(&out)?;
            write_records(&out.join("records.csv"), &records)?;
            write_json(
                &out.join("eval.json"),
                &EvalManifest {
                    kind: "eval",
                    run_id,
                    model_sha256: model_hash,
                    data_manifest_sha256: manifest_hash(&data)?,
                    records: records.len(),
                },
            )
        }
        Command::Sweep {
            data,
            levels,
            seeds,
            config,
            split_seed,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let plan = SweepPlan {
                configs: vec![cfg],
                levels: parse_list(&levels, "levels")?,
                seeds: parse_list(&seeds, "seeds")?,
                split_seed,
                threads: experiment::threads_from_env()?,
            };
            run_plan(&data, plan, "sweep", &out)
        }
        Command::Ablate {
            data,
            ids,
            levels,
            seeds,
            config,
            split_seed,
            out,
        } => {
            let base = load_config(config.as_deref())?;
            let ids: Vec<AblationId> = ids
                .split(',')
                .map(|s| s.trim().parse::<AblationId>().map_err(|e| LsmError::Usage(e.to_string())))
                .collect::<Result<_>>()?;
            let plan = SweepPlan {
                configs: experiment::ablation_configs(&base, &ids),
                levels: parse_list(&levels, "levels")?,
                seeds: parse_list(&seeds, "seeds")?,
                split_seed,
                threads: experiment::threads_from_env()?,
            };
            run_plan(&data, plan, "ablate", &out)
        }
        Command::Report { records, out } => {
            let recs = read_records(&records)?;
            write_report(&recs, &out).map(|_| ())
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    kind: &'static str,
    run_id: String,
    config_hash: String,
    config: RunConfig,
    data_manifest_sha256: String,
    n_percent: u32,
    metric: String,
    monitor: String,
    best_epoch: usize,
    best_value: Option<f64>,
    stopped_epoch: usize,
    stop: String,
    main_updates: usize,
    dc_updates: usize,
    clamp_events: usize,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct EvalManifest {
    kind: &'static str,
    run_id: String,
    model_sha256: String,
    data_manifest_sha256: String,
    records: usize,
}

#[derive(Serialize)]
struct SweepManifest {
    kind: &'static str,
    levels: Vec<u32>,
    seeds: Vec<u64>,
    split_seed: u64,
    configs: Vec<RunConfig>,
    config_hashes: Vec<String>,
    data_manifest_sha256: String,
    records: usize,
}

fn usage(e: lsm_core::Error) -> LsmError {
    LsmError::Usage(e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn manifest_hash(dir: &Path) -> Result<String> {
    Ok(sha256_hex(&format::read_file(&dir.join(MANIFEST))?))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| LsmError::Usage(format!("invalid {what} entry {v:?}")))
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    match parse_list::<usize>(s, "eye index")?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(LsmError::Usage(format!("expected two comma-separated indices, got {s:?}"))),
    }
}

fn pick_metric(name: &str, y: &lsm_core::model::DomainSpec, info: &lsm_core::data::DatasetInfo) -> Result<TaskMetric> {
    let cfg = RunConfig {
        metric: name.into(),
        ..RunConfig::default()
    };
    cfg.validate().map_err(LsmError::Usage)?;
    cfg.task_metric(y, info)
}

fn check_domains(m: &lsm_core::model::LsmModel, x: &lsm_core::model::DomainSpec, y: &lsm_core::model::DomainSpec) -> Result<()> {
    if &m.x != x || &m.y != y {
        return Err(LsmError::Usage("model domains do not match the data".into()));
    }
    Ok(())
}

fn run_plan(data: &Path, plan: SweepPlan, kind: &'static str, out: &Path) -> Result<()> {
    plan.validate()?;
    let ds = load_dataset(data)?;
    let data_hash = manifest_hash(data)?;
    let records = experiment::sweep(&ds, &plan)?;
    format::create_dir(out)?;
    write_records(&out.join("records.csv"), &records)?;
    write_json(
        &out.join(format!("{kind}.json")),
        &SweepManifest {
            kind,
            levels: plan.levels.clone(),
            seeds: plan.seeds.clone(),
            split_seed: plan.split_seed,
            config_hashes: plan.configs.iter().map(RunConfig::hash).collect(),
            configs: plan.configs,
            data_manifest_sha256: data_hash,
            records: records.len(),
        },
    )?;
    if !records.is_empty() {
        write_report(&records, &out.join("report"))?;
    }
    Ok(())
}

fn write_history(path: &Path, h: &History) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| LsmError::format(path, e.to_string()))?;
    let mut header = vec!["epoch", "main_loss", "monitored", "main_updates", "dc_updates"];
    header.extend(Term::ALL.iter().map(|t| t.name()));
    let err = |e: csv::Error| LsmError::format(path, e.to_string());
    w.write_record(&header).map_err(err)?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for e in &h.epochs {
        let mut row = vec![
            e.epoch.to_string(),
            opt(e.main_loss),
            opt(e.monitored),
            e.main_updates.to_string(),
            e.dc_updates.to_string(),
        ];
        row.extend(Term::ALL.iter().map(|&t| opt(e.term(t))));
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| LsmError::io(path, e))
}
