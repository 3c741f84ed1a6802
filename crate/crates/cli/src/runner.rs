use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use qkz_core::{QKZInstance, RMatrixFamily, Status};

use crate::cache;
use crate::config::{Fault, RunConfig, Suite};
use crate::report::{CheckRecord, Expect, Outcome, Report};
use crate::suites::{anchor, family_tasks, normalize_tasks, qkz_tasks, reps_tasks, Task};
use crate::CliError;

pub const DEFAULT_OUT: &str = "qkz-report.json";

/// Command-line options; each one overrides the matching config field.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub config: PathBuf,
    pub suite: Option<Suite>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub d_override: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

enum Item {
    Pending(Task),
    Done(CheckRecord),
}

fn internal(e: qkz_core::Error) -> CliError {
    CliError::Internal(e.to_string())
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn execute_task(t: &Task) -> Vec<CheckRecord> {
    let start = Instant::now();
    let result = (t.run)();
    let ms = elapsed_ms(start);
    t.records
        .iter()
        .enumerate()
        .map(|(k, (name, anchor, expected))| {
            let outcome = match &result {
                Ok(st) => st.get(k).map_or_else(|| Outcome::Error("missing status".into()), |s| Outcome::Done(*s)),
                Err(e) => Outcome::Error(e.to_string()),
            };
            CheckRecord::new(name.clone(), anchor, *expected, outcome, ms)
        })
        .collect()
}

fn skipped(name: &str, why: &str) -> Item {
    Item::Done(CheckRecord::new(name.into(), anchor::NORMALIZATION, Expect::ExactZero, Outcome::Skipped(why.into()), 0))
}

fn assemble(cfg: &RunConfig, cache_dir: Option<&Path>) -> Result<Report, CliError> {
    let suite = cfg.suite;
    let parsed = cfg.parsed_instances()?;
    let mut base = RMatrixFamily::build(cfg.descriptor()).map_err(internal)?;
    if cfg.fault == Some(Fault::PerturbR) {
        base = base.perturbed();
    }
    let base = Arc::new(base);
    let mut notes = Vec::new();
    let mut items: Vec<Item> = family_tasks(&base, suite, &mut notes).map_err(internal)?.into_iter().map(Item::Pending).collect();
    if suite.needs_normalization() {
        let start = Instant::now();
        let cache_dir = if base.is_perturbed() { None } else { cache_dir };
        match cache::load_or_compute(cache_dir, &base) {
            Ok((nf, _)) => {
                items.push(Item::Done(CheckRecord::new(
                    "normalization".into(),
                    anchor::NORMALIZATION,
                    Expect::ExactZero,
                    Outcome::Done(Status::ExactZero),
                    elapsed_ms(start),
                )));
                let nf = Arc::new(nf);
                let mut tasks = Vec::new();
                if suite.includes(Suite::Normalize) {
                    tasks.extend(normalize_tasks(&nf));
                }
                if suite.includes(Suite::Reps) {
                    tasks.extend(reps_tasks(&Arc::new(nf.rbar().clone())));
                }
                if suite.includes(Suite::Qkz) {
                    let instances = parsed
                        .into_iter()
                        .enumerate()
                        .map(|(k, p)| {
                            QKZInstance::new(nf.rbar().clone(), p.points, p.words, p.k)
                                .map(Arc::new)
                                .map_err(|e| CliError::Config(format!("instance {}: {e}", k + 1)))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    tasks.extend(qkz_tasks(&instances, cfg.fault));
                }
                items.extend(tasks.into_iter().map(Item::Pending));
            }
            Err(e) => {
                items.push(Item::Done(CheckRecord::new(
                    "normalization".into(),
                    anchor::NORMALIZATION,
                    Expect::ExactZero,
                    Outcome::Error(e.to_string()),
                    elapsed_ms(start),
                )));
                for (s, name) in [(Suite::Normalize, "normalize"), (Suite::Reps, "reps"), (Suite::Qkz, "qkz")] {
                    if suite.includes(s) {
                        items.push(skipped(&format!("{name}-suite"), "normalization failed"));
                    }
                }
            }
        }
    }
    let records: Vec<Vec<CheckRecord>> = items
        .par_iter()
        .map(|it| match it {
            Item::Pending(t) => execute_task(t),
            Item::Done(r) => vec![r.clone()],
        })
        .collect();
    Ok(Report::new(cfg.descriptor(), suite, cfg.fault, records.into_iter().flatten().collect(), notes))
}

/// Runs a validated config on a pool of `cfg.jobs` workers without touching
/// the report files.
pub fn run_config(cfg: &RunConfig, cache_dir: Option<&Path>) -> Result<Report, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| assemble(cfg, cache_dir))
}

/// Loads the config, applies overrides, runs, and writes the JSON report and
/// the text summary next to it. Returns the exit code.
pub fn execute(opts: &Options) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load(&opts.config)?;
    if let Some(s) = opts.suite {
        cfg.suite = s;
    }
    if let Some(o) = &opts.out {
        cfg.out = Some(o.clone());
    }
    if let Some(j) = opts.jobs {
        cfg.jobs = Some(j);
    }
    if let Some(d) = opts.d_override {
        cfg.d = d;
    }
    let report = run_config(&cfg, opts.cache_dir.as_deref())?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let summary = report.summary();
    let write = |p: &Path, s: &str| std::fs::write(p, s).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", p.display())));
    write(&out, &report.to_json())?;
    write(&out.with_extension("txt"), &summary)?;
    print!("{summary}");
    Ok(if report.all_pass() { 0 } else { 1 })
}

/// `execute` with errors and panics mapped to exit codes.
pub fn run(opts: &Options) -> i32 {
    match catch_unwind(AssertUnwindSafe(|| execute(opts))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure");
            3
        }
    }
}
