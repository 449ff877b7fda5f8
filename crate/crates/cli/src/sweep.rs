//! Comparison sweeps over blend coefficients, slope compensation, seeds and
//! elevation-disturbance amplitudes.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::schema::{apply_override, ScenarioFile};
use crate::{output, CliError};
use stonewalk_core::sim::SimMetrics;

/// One point of the sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCase {
    pub alpha: Option<f64>,
    pub pslip: Option<bool>,
    pub seed: Option<u64>,
    pub zdist: Option<f64>,
}

impl SweepCase {
    pub fn label(&self, index: usize) -> String {
        let mut name = format!("run_{index:03}");
        if let Some(a) = self.alpha {
            let _ = write!(name, "_alpha{a}");
        }
        if let Some(p) = self.pslip {
            let _ = write!(name, "_pslip-{}", if p { "on" } else { "off" });
        }
        if let Some(s) = self.seed {
            let _ = write!(name, "_seed{s}");
        }
        if let Some(z) = self.zdist {
            let _ = write!(name, "_zdist{z}");
        }
        name
    }

    fn apply(&self, base: &ScenarioFile) -> Result<ScenarioFile, CliError> {
        let mut file = base.clone();
        if let Some(a) = self.alpha {
            file = apply_override(&file, "pendulum.alpha", &a.to_string())?;
        }
        if let Some(p) = self.pslip {
            file = apply_override(&file, "scenario.pslip_enabled", &p.to_string())?;
        }
        if let Some(s) = self.seed {
            file = apply_override(&file, "scenario.seed", &s.to_string())?;
        }
        if let Some(z) = self.zdist {
            file = apply_override(
                &file,
                "scenario.elevation",
                &format!("{{\"random\":{{\"amplitude\":{z}}}}}"),
            )?;
        }
        Ok(file)
    }
}

/// Cartesian product of the sweep axes; empty axes contribute the base value.
pub fn build_cases(
    alphas: &[f64],
    pslip_modes: &[bool],
    seeds: &[u64],
    zdists: &[f64],
) -> Vec<SweepCase> {
    let opt = |xs: &[f64]| -> Vec<Option<f64>> {
        if xs.is_empty() {
            vec![None]
        } else {
            xs.iter().map(|x| Some(*x)).collect()
        }
    };
    let alphas = opt(alphas);
    let zdists = opt(zdists);
    let pslips: Vec<Option<bool>> = if pslip_modes.is_empty() {
        vec![None]
    } else {
        pslip_modes.iter().map(|p| Some(*p)).collect()
    };
    let seeds: Vec<Option<u64>> = if seeds.is_empty() {
        vec![None]
    } else {
        seeds.iter().map(|s| Some(*s)).collect()
    };
    let mut cases = Vec::new();
    for a in &alphas {
        for p in &pslips {
            for z in &zdists {
                for s in &seeds {
                    cases.push(SweepCase { alpha: *a, pslip: *p, seed: *s, zdist: *z });
                }
            }
        }
    }
    cases
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub case: SweepCase,
    pub label: String,
    pub metrics: SimMetrics,
}

pub const COMPARISON_HEADER: &str =
    "run,alpha,pslip,seed,zdist,e_avg,e_max,pred_err_mean,steps_completed,fell,mean_solve_us";

pub fn comparison_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(COMPARISON_HEADER);
    out.push('\n');
    let opt_f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        let m = &row.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.9e},{:.9e},{:.9e},{},{},{:.3}",
            row.label,
            opt_f(row.case.alpha),
            row.case.pslip.map(|p| p.to_string()).unwrap_or_default(),
            row.case.seed.map(|s| s.to_string()).unwrap_or_default(),
            opt_f(row.case.zdist),
            m.e_avg,
            m.e_max,
            m.pred_err_mean,
            m.steps_completed,
            m.fell,
            m.mean_solve_us,
        );
    }
    out
}

/// Runs every case (in parallel), writes per-case outputs under
/// `out_dir/<label>/` plus `comparison.csv`, and returns the rows in case
/// order.
pub fn run_sweep(
    base: &ScenarioFile,
    cases: &[SweepCase],
    out_dir: &Path,
) -> Result<Vec<SweepRow>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let rows: Vec<Result<SweepRow, CliError>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let file = case.apply(base)?;
            let label = case.label(i);
            let trace = crate::execute(&file)?;
            output::write_run_outputs(&file, &trace, &out_dir.join(&label))?;
            Ok(SweepRow { case: case.clone(), label, metrics: trace.metrics })
        })
        .collect();
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_, _>>()?;
    let path = out_dir.join("comparison.csv");
    std::fs::write(&path, comparison_csv(&rows))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(rows)
}
