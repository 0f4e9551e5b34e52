use super::{FlowEvent, RunRecord, RunStatus};
use crate::functionals::diagnostics_csv;
use crate::geometry::{fmt_f64, profile_to_json, write_atomic};
use crate::Result;
use serde::Serialize;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub t: f64,
    pub step: u64,
    pub file: String,
    pub heat_file: Option<String>,
}

/// Index of a written run record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub status: RunStatus,
    pub outer_bc: &'static str,
    pub t_final: f64,
    pub steps: u64,
    pub diagnostics: String,
    pub events: Vec<FlowEvent>,
    pub snapshots: Vec<SnapshotEntry>,
}

/// Writes `diagnostics.csv`, one profile document per snapshot under `snapshots/`
/// (plus the heat field as a JSON array when present) and `manifest.json`.
/// Every file is written atomically.
pub fn write_run_record(dir: &Path, rec: &RunRecord) -> Result<Manifest> {
    let snap_dir = dir.join("snapshots");
    std::fs::create_dir_all(&snap_dir)?;
    write_atomic(&dir.join("diagnostics.csv"), diagnostics_csv(&rec.rows).as_bytes())?;
    let mut entries = Vec::new();
    for (i, s) in rec.snapshots.iter().enumerate() {
        let file = format!("snapshots/snapshot_{i:05}.json");
        write_atomic(&dir.join(&file), profile_to_json(&s.profile).as_bytes())?;
        let heat_file = match &s.u_eps {
            Some(u) => {
                let name = format!("snapshots/heat_{i:05}.json");
                let body = format!(
                    "[{}]\n",
                    u.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
                );
                write_atomic(&dir.join(&name), body.as_bytes())?;
                Some(name)
            }
            None => None,
        };
        entries.push(SnapshotEntry {
            index: i,
            t: s.t,
            step: s.step,
            file,
            heat_file,
        });
    }
    let manifest = Manifest {
        status: rec.status,
        outer_bc: rec.outer_bc.name(),
        t_final: rec.t_final,
        steps: rec.steps,
        diagnostics: "diagnostics.csv".into(),
        events: rec.events.clone(),
        snapshots: entries,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&dir.join("manifest.json"), text.as_bytes())?;
    Ok(manifest)
}
