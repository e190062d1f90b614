use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Task, SCHEMA_VERSION};
use crate::error::CliError;
use crate::tasks::{run_task, Context, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskStatus {
    pub task: Task,
    pub status: Status,
    pub error: Option<String>,
    pub files: Vec<String>,
}

/// Deterministic run record. Wall-clock timings live in `timings.json` so
/// this file stays byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub tasks: Vec<TaskStatus>,
}

impl RunManifest {
    pub fn all_ok(&self) -> bool {
        self.tasks.iter().all(|t| t.status == Status::Ok)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskTiming {
    pub task: Task,
    pub millis: f64,
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

/// Runs `tasks` in parallel and writes their reports, the manifest and the
/// timings into `out`. A failing task is recorded and the others still run.
pub fn run(ctx: &Context, tasks: &[Task], out: &Path, jobs: Option<usize>) -> Result<RunManifest, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let tasks: Vec<Task> = tasks.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let work = || -> Vec<(Task, Result<Vec<Report>, CliError>, f64)> {
        tasks
            .par_iter()
            .map(|&t| {
                let start = Instant::now();
                let r = run_task(ctx, t);
                (t, r, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    };
    let results = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut statuses = Vec::new();
    let mut timings = Vec::new();
    for (task, result, millis) in results {
        timings.push(TaskTiming { task, millis });
        statuses.push(match result {
            Ok(reports) => {
                for r in &reports {
                    write(out, &r.name, &r.bytes)?;
                }
                TaskStatus {
                    task,
                    status: Status::Ok,
                    error: None,
                    files: reports.into_iter().map(|r| r.name).collect(),
                }
            }
            Err(e) => TaskStatus {
                task,
                status: Status::Failed,
                error: Some(e.to_string()),
                files: Vec::new(),
            },
        });
    }
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        config_hash: ctx.config_hash.clone(),
        seed: ctx.cfg.seed,
        version: swleak::VERSION.to_string(),
        tasks: statuses,
    };
    write(out, "manifest.json", &json_bytes(&manifest)?)?;
    write(out, "timings.json", &json_bytes(&timings)?)?;
    Ok(manifest)
}
