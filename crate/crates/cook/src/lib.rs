//! Driver for the Cook analysis: loading sources, reports, safe lists,
//! a multi-threaded Explore runner and a random program generator.

pub mod gen;
pub mod report;
pub mod runner;
pub mod safelist;

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use cook_core::cook::{BatchRunner, ExploreConfig, Sequential};
use cook_core::lang::{parse_unit, validate, ParseMode, Program};
use cook_core::{AnalysisConfig, AnalysisOutput, MethodId};

pub use report::{build_report, render_text, Report, ReportConfig};
pub use runner::Threads;

/// Parses every file and merges them into one validated program. All
/// syntax errors are reported together.
pub fn load_program(paths: &[impl AsRef<Path>]) -> Result<Program> {
    let mut program = Program::default();
    let mut errors = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        match parse_unit(&src, ParseMode::Source) {
            Ok(p) => program.extend(p),
            Err(e) => errors.push(format!("{}:{e}", path.display())),
        }
    }
    if !errors.is_empty() {
        bail!(errors.join("\n"));
    }
    validate(&program, false).map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(program)
}

pub fn analysis_config(cfg: &ReportConfig) -> AnalysisConfig {
    AnalysisConfig {
        safe_list: cfg.safe_list.iter().map(|s| MethodId::parse(s)).collect(),
        explore: ExploreConfig { swamp_test: cfg.swamp_test, ..Default::default() },
        ..Default::default()
    }
}

/// Runs the whole pipeline on `p` with `jobs` Landfall threads and
/// reports on it. Only Explore is timed.
pub fn analyze_program(p: &Program, cfg: &ReportConfig, jobs: usize) -> Result<(AnalysisOutput, Report)> {
    let prepared = cook_core::prepare(p, &analysis_config(cfg));
    let runner: Box<dyn BatchRunner> = if jobs > 1 { Box::new(Threads(jobs)) } else { Box::new(Sequential) };
    let start = Instant::now();
    let result = prepared.explore(runner.as_ref()).map_err(|e| anyhow::anyhow!("{e}"))?;
    let timing_ms = start.elapsed().as_secs_f64() * 1000.0;
    let out = AnalysisOutput { prepared, result };
    let report = build_report(p, &out, cfg, timing_ms);
    Ok((out, report))
}
