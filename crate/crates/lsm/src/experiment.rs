//! Training runs, supervision sweeps and loss ablations.
//!
//! A sweep splits the dataset once per supervision level with a fixed split
//! seed, so every run at a level sees the same test pairs. Run seeds vary
//! model initialization and batch order only. Runs are independent and may
//! execute on `LSM_THREADS` worker threads; records are collected and
//! returned in plan order, so output does not depend on scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use lsm_core::data::{split_semi_supervised, DatasetBundle, PairedDataset};
use lsm_core::metrics::MetricRecord;
use lsm_core::model::LsmModel;
use lsm_core::train::{evaluate, fit, ioda, AblationId, FitOutcome, Monitor, TaskMetric};

use crate::config::RunConfig;
use crate::error::{LsmError, Result};

pub const THREADS_ENV: &str = "LSM_THREADS";
pub const DEFAULT_LEVELS: [u32; 6] = [100, 60, 20, 5, 3, 1];

pub fn run_id(name: &str, n_percent: u32, seed: u64) -> String {
    format!("{name}/n{n_percent}/s{seed}")
}

/// Worker count from `LSM_THREADS`, at least 1.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| LsmError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(1),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub run_id: String,
    pub metric: TaskMetric,
    pub outcome: FitOutcome,
    /// Monitored value per epoch, then the best-epoch model on `val` and
    /// `test` when those banks are non-empty.
    pub records: Vec<MetricRecord>,
}

fn record(run_id: &str, hash: &str, n: u32, epoch: usize, split: &str, metric: TaskMetric, value: f64) -> MetricRecord {
    MetricRecord {
        run_id: run_id.into(),
        config_hash: hash.into(),
        n_percent: n,
        epoch,
        split: split.into(),
        metric: metric.name().into(),
        value,
    }
}

/// Scores `model` on the validation and test pairs of `bundle`.
pub fn eval_records(model: &LsmModel, bundle: &DatasetBundle, metric: TaskMetric, run_id: &str, hash: &str, epoch: usize) -> Result<Vec<MetricRecord>> {
    let mut out = Vec::new();
    for (split, bank) in [("val", &bundle.val), ("test", &bundle.test)] {
        if let Some(v) = evaluate(model, bank, metric)? {
            out.push(record(run_id, hash, bundle.n_percent, epoch, split, metric, v));
        }
    }
    Ok(out)
}

pub fn train_run(bundle: &DatasetBundle, cfg: &RunConfig) -> Result<RunOutput> {
    let metric = cfg.task_metric(&bundle.y_spec, &bundle.info)?;
    let tc = cfg.train_config(metric);
    let model = LsmModel::new(bundle.x_spec.clone(), bundle.y_spec.clone(), cfg.model.to_config(), cfg.seed)?;
    let outcome = match cfg.pretrain() {
        Some(p) => ioda(model, bundle, &tc, &p)?,
        None => fit(model, bundle, &tc)?,
    };
    let id = run_id(&cfg.name, bundle.n_percent, cfg.seed);
    let hash = cfg.hash();
    let monitor_split = match tc.monitor {
        Monitor::Validation => "val",
        Monitor::TrainPaired => "train",
    };
    let mut records = Vec::new();
    // Epochs scored by the fallback training loss are not task metrics.
    if outcome.history.monitor == metric.name() {
        for e in &outcome.history.epochs {
            if let Some(v) = e.monitored {
                records.push(record(&id, &hash, bundle.n_percent, e.epoch, monitor_split, metric, v));
            }
        }
    }
    let best = outcome.history.best_epoch;
    records.extend(eval_records(&outcome.model, bundle, metric, &id, &hash, best)?);
    Ok(RunOutput {
        run_id: id,
        metric,
        outcome,
        records,
    })
}

/// Runs `job(i)` for `i < count` on `threads` workers; results keep index
/// order and the first error by index wins.
pub fn run_parallel<T: Send>(count: usize, threads: usize, job: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..count).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, count.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let r = job(i);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    /// One entry per model; `name` labels its rows.
    pub configs: Vec<RunConfig>,
    pub levels: Vec<u32>,
    pub seeds: Vec<u64>,
    pub split_seed: u64,
    pub threads: usize,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.configs.is_empty() || self.levels.is_empty() || self.seeds.is_empty() {
            return Err(LsmError::Usage("a sweep needs at least one config, level and seed".into()));
        }
        if let Some(n) = self.levels.iter().find(|&&n| n > 100) {
            return Err(LsmError::Usage(format!("supervision level {n} exceeds 100")));
        }
        let mut names: Vec<&str> = self.configs.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.configs.len() {
            return Err(LsmError::Usage("config names must be distinct".into()));
        }
        for c in &self.configs {
            c.validate().map_err(LsmError::Usage)?;
        }
        Ok(())
    }

    pub fn run_count(&self) -> usize {
        self.configs.len() * self.levels.len() * self.seeds.len()
    }
}

/// Trains every (config, level, seed) combination and returns one test
/// record per run, ordered by config, then level, then seed.
pub fn sweep(ds: &PairedDataset, plan: &SweepPlan) -> Result<Vec<MetricRecord>> {
    plan.validate()?;
    let bundles = plan
        .levels
        .iter()
        .map(|&n| split_semi_supervised(ds, n, plan.split_seed))
        .collect::<lsm_core::Result<Vec<_>>>()?;
    let (nl, ns) = (plan.levels.len(), plan.seeds.len());
    let runs = run_parallel(plan.run_count(), plan.threads, |i| {
        let (c, l, s) = (i / (nl * ns), (i / ns) % nl, i % ns);
        let cfg = RunConfig {
            seed: plan.seeds[s],
            ..plan.configs[c].clone()
        };
        let out = train_run(&bundles[l], &cfg)?;
        Ok(out.records.into_iter().filter(|r| r.split == "test").collect::<Vec<_>>())
    })?;
    Ok(runs.into_iter().flatten().collect())
}

/// One config per ablation id, named by the id, over a shared base config.
pub fn ablation_configs(base: &RunConfig, ids: &[AblationId]) -> Vec<RunConfig> {
    ids.iter()
        .map(|id| RunConfig {
            name: id.to_string(),
            ablation: Some(id.to_string()),
            ..base.clone()
        })
        .collect()
}

pub fn default_ablation_ids() -> Vec<AblationId> {
    AblationId::DEFAULT_SET
        .iter()
        .map(|s| s.parse().expect("default ids are valid"))
        .collect()
}
