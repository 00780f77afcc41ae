//! Worldline simulation driver.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use cosserat::weyssenhoff::{integrate_worldline, Diagnostics, Trajectory, WeyssenhoffError, WorldlineConfig};
use serde::Serialize;

#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub steps: Option<usize>,
    pub dtau: Option<f64>,
}

/// Summary written next to the trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub kind: &'static str,
    pub c: f64,
    pub dtau: f64,
    pub steps: usize,
    pub records: usize,
    pub diagnostics: Diagnostics,
}

pub fn run(cfg: &WorldlineConfig, ov: Overrides) -> Result<(Trajectory, Summary), WeyssenhoffError> {
    let mut integ = cfg.integrator.clone();
    if let Some(n) = ov.steps {
        integ.steps = n;
    }
    if let Some(h) = ov.dtau {
        integ.dtau = h;
    }
    let init = cfg.initial_element()?;
    let tr = integrate_worldline(&init, cfg.c, &integ)?;
    let summary = Summary {
        kind: "weyssenhoff-worldline",
        c: cfg.c,
        dtau: integ.dtau,
        steps: integ.steps,
        records: tr.records.len(),
        diagnostics: tr.diagnostics,
    };
    Ok((tr, summary))
}

/// Path of the diagnostics file belonging to a trajectory file.
pub fn diagnostics_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trajectory".into());
    output.with_file_name(format!("{stem}.diagnostics.json"))
}

/// Writes the trajectory as JSON when `output` ends in `.json`, CSV otherwise,
/// plus the diagnostics summary alongside. Returns the summary path.
pub fn write(tr: &Trajectory, summary: &Summary, output: &Path) -> Result<PathBuf, WeyssenhoffError> {
    let out = BufWriter::new(File::create(output)?);
    if output.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        tr.write_json(out)?;
    } else {
        tr.write_csv(out)?;
    }
    let path = diagnostics_path(output);
    serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), summary)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_sits_next_to_trajectory() {
        assert_eq!(diagnostics_path(Path::new("out/run.csv")), PathBuf::from("out/run.diagnostics.json"));
    }
}
