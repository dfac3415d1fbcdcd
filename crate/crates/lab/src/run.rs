//! End-to-end runs: config loading, command dispatch, the run directory
//! and its manifest.

use std::fs;
use std::path::{Path, PathBuf};

use crate::commands::{run_command, COMMANDS};
use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::manifest::{config_hash, now, write_run, RunManifest};
use crate::report::RunOutput;
use crate::suite::{run_suite, Fixtures, DEFAULT_FIXTURES};

pub const DEFAULT_OUT: &str = "out";

/// One invocation of the driver.
#[derive(Clone, Debug, Default)]
pub struct Invocation {
    pub command: String,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// What a run printed and where it wrote.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub exit_code: i32,
    pub out_dir: Option<PathBuf>,
    /// Lines for standard output.
    pub stdout: Vec<String>,
    /// A diagnostic for standard error.
    pub error: Option<String>,
}

fn load(inv: &Invocation) -> LabResult<(ExperimentConfig, Vec<u8>)> {
    match &inv.config {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
            let text = std::str::from_utf8(&bytes).map_err(|_| LabError::config("config is not UTF-8"))?;
            Ok((ExperimentConfig::from_json(text)?, bytes))
        }
        None if inv.command == "suite" => Ok((ExperimentConfig::default(), Vec::new())),
        None => Err(LabError::config("a config file is required")),
    }
}

fn suite_output(cfg: &ExperimentConfig, seed: u64, base: Option<&Path>) -> LabResult<(RunOutput, Vec<String>)> {
    let fixtures = match &cfg.params.fixtures {
        Some(p) => {
            let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
            let text = fs::read_to_string(&path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
            Fixtures::from_json(&text)?
        }
        None => Fixtures::from_json(DEFAULT_FIXTURES)?,
    };
    let report = run_suite(&fixtures, seed);
    let mut out = RunOutput::default();
    out.file("suite.txt", report.render_deterministic());
    for r in &report.results {
        for (name, body) in &r.files {
            out.file(name, body.clone());
        }
        out.note(r.line());
    }
    if !report.all_pass() {
        let failed: Vec<String> = report.results.iter().filter(|r| !r.pass).map(|r| r.id.to_string()).collect();
        out.gate_failure = Some(format!("failed criteria: {}", failed.join(", ")));
    }
    let lines = report.results.iter().map(|r| r.line()).collect();
    Ok((out, lines))
}

/// Runs `inv` and writes its directory. Exit codes: 0 success, 1 config
/// error, 2 gate failure, 3 cap exceeded.
pub fn execute(inv: &Invocation) -> RunResult {
    let fail = |e: LabError| RunResult { exit_code: e.exit_code(), out_dir: None, stdout: vec![], error: Some(e.to_string()) };
    if !COMMANDS.contains(&inv.command.as_str()) {
        return fail(LabError::Config(format!("unknown command '{}'", inv.command)));
    }
    let started = now();
    let (cfg, bytes) = match load(inv) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let seed = inv.seed.or(cfg.params.seed).unwrap_or(0);
    let out_dir = inv.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from)).unwrap_or_else(|| DEFAULT_OUT.into());
    let result = if inv.command == "suite" {
        let base = inv.config.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf);
        suite_output(&cfg, seed, base.as_deref())
    } else {
        run_command(&inv.command, &cfg, seed).map(|o| {
            let lines = o.summary.clone();
            (o, lines)
        })
    };
    let (output, mut stdout) = match result {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let mut error = output.gate_failure.clone().or_else(|| output.cap_hit.clone());
    let exit_code = output.exit_code();
    let manifest = RunManifest {
        command: inv.command.clone(),
        config_hash: config_hash(&bytes),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: now(),
        files: output.files.keys().cloned().collect(),
        summary: output.summary.clone(),
        exit_status: exit_code,
    };
    if let Err(e) = write_run(&out_dir, &output, &manifest) {
        return fail(LabError::Config(format!("{}: {e}", out_dir.display())));
    }
    if inv.command == "suite" && exit_code != 0 {
        error = Some("some acceptance criteria failed".into());
    }
    stdout.push(format!("wrote {}", out_dir.display()));
    RunResult { exit_code, out_dir: Some(out_dir), stdout, error }
}
