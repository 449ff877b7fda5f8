//! Plot-ready text outputs: the per-tick trace CSV, the step-event CSV and
//! the run summary JSON. Column order is fixed; floats carry nine
//! significant digits so reruns with equal inputs are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::schema::ScenarioFile;
use crate::CliError;
use stonewalk_core::sim::{SimMetrics, SimTrace};

fn fmt(v: f64) -> String {
    format!("{v:.8e}")
}

pub const TRACE_HEADER: &str = "t,x,y,z,vx,vy,vz,lcom_x,lcom_y,xi_x,xi_y,\
contact_x,contact_y,contact_z,side,step_index,active_kx,active_ky";

pub fn trace_csv(trace: &SimTrace) -> String {
    let mut out = String::with_capacity(trace.samples.len() * 200);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let st = &s.state;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt(s.t),
            fmt(st.x),
            fmt(st.y),
            fmt(st.z),
            fmt(st.vx),
            fmt(st.vy),
            fmt(st.vz),
            fmt(st.lcom_x),
            fmt(st.lcom_y),
            fmt(s.dcm.xi_x),
            fmt(s.dcm.xi_y),
            fmt(s.contact.sx),
            fmt(s.contact.sy),
            fmt(s.contact.sz),
            s.contact.side.letter(),
            s.step_index,
            fmt(s.active.kx()),
            fmt(s.active.ky()),
        );
    }
    out
}

pub const EVENTS_HEADER: &str = "index,touchdown_time,planned_duration,\
commanded_x,commanded_y,commanded_z,desired_x,desired_y,desired_z,deviation,infeasible";

pub fn events_csv(trace: &SimTrace) -> String {
    let mut out = String::new();
    out.push_str(EVENTS_HEADER);
    out.push('\n');
    for e in &trace.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            e.index,
            fmt(e.touchdown_time),
            fmt(e.planned_duration),
            fmt(e.commanded_position[0]),
            fmt(e.commanded_position[1]),
            fmt(e.commanded_position[2]),
            fmt(e.desired_position[0]),
            fmt(e.desired_position[1]),
            fmt(e.desired_position[2]),
            fmt(e.deviation),
            e.infeasible,
        );
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    config: &'a ScenarioFile,
    metrics: &'a SimMetrics,
    step_durations: Vec<f64>,
}

pub fn summary_json(file: &ScenarioFile, trace: &SimTrace) -> String {
    let summary = Summary {
        schema_version: crate::schema::SCHEMA_VERSION,
        config: file,
        metrics: &trace.metrics,
        step_durations: trace.events.iter().map(|e| e.planned_duration).collect(),
    };
    serde_json::to_string_pretty(&summary).expect("summary always serializes")
}

pub fn write_run_outputs(
    file: &ScenarioFile,
    trace: &SimTrace,
    out_dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let write = |name: &str, contents: String| -> Result<(), CliError> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    };
    write("trace.csv", trace_csv(trace))?;
    write("events.csv", events_csv(trace))?;
    write("summary.json", summary_json(file, trace))?;
    Ok(())
}
