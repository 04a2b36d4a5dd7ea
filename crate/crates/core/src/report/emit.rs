use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DataMovementShare, GroupSummary, StackImpactTable};
use crate::cachesim::{Footprint, MissRatioCurve};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadCurve {
    pub workload: String,
    pub curve: MissRatioCurve,
    #[serde(default)]
    pub footprint: Option<Footprint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportArtifacts {
    pub summaries: Vec<GroupSummary>,
    pub stack_impact: Option<StackImpactTable>,
    pub data_movement: BTreeMap<String, DataMovementShare>,
    pub curves: Vec<WorkloadCurve>,
}

impl ReportArtifacts {
    pub fn is_empty(&self) -> bool {
        self.summaries.iter().all(|s| s.rows.is_empty())
            && self.stack_impact.as_ref().is_none_or(|t| t.rows.is_empty())
            && self.data_movement.is_empty()
            && self.curves.is_empty()
    }
}

/// Fixed 4-decimal rendering; negative zero prints as zero.
pub fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

pub fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            *v = serde_json::Number::from_f64(round4(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn summary_csv(s: &GroupSummary) -> String {
    let mut header = vec!["group".to_string(), "count".to_string()];
    header.extend(s.metrics.iter().cloned());
    let mut out = csv_line(&header);
    for row in &s.rows {
        let mut fields = vec![row.group.clone(), row.count.to_string()];
        fields.extend(s.metrics.iter().map(|m| fmt4(row.means[m])));
        out.push_str(&csv_line(&fields));
    }
    out
}

fn stack_impact_csv(t: &StackImpactTable) -> String {
    let mut header = vec!["algorithm".to_string(), "metric".to_string()];
    header.extend(t.stacks.iter().cloned());
    header.extend(["max_min_ratio".to_string(), "flag".to_string()]);
    let mut out = csv_line(&header);
    for row in &t.rows {
        let mut fields = vec![row.algorithm.clone(), row.metric.clone()];
        fields.extend(
            t.stacks
                .iter()
                .map(|s| row.values.get(s).map_or(String::new(), |&v| fmt4(v))),
        );
        fields.push(row.max_min_ratio.map_or("inf".to_string(), fmt4));
        fields.push(row.flag.as_str().to_string());
        out.push_str(&csv_line(&fields));
    }
    out
}

fn curve_csv(c: &MissRatioCurve) -> String {
    let mut out = csv_line(&["capacity_bytes".to_string(), "miss_ratio".to_string()]);
    for p in c.points() {
        out.push_str(&csv_line(&[p.capacity_bytes.to_string(), fmt4(p.miss_ratio)]));
    }
    out
}

fn write(out_dir: &Path, rel: &str, contents: &str, written: &mut Vec<String>) -> Result<()> {
    let path = out_dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(rel.to_string());
    Ok(())
}

/// Writes `summary_<grouping>.csv`, `stack_impact.csv`,
/// `curves/<workload>_<kind>.csv` and `bundle.json` under `out_dir`.
/// Returns the written paths relative to `out_dir`, sorted.
///
/// Output is byte-stable: keys are sorted and floats fixed at 4 decimals.
pub fn emit(artifacts: &ReportArtifacts, out_dir: &Path) -> Result<Vec<String>> {
    if artifacts.is_empty() {
        log::warn!("report input is empty; writing an empty bundle");
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let mut seen = std::collections::BTreeSet::new();
    for s in &artifacts.summaries {
        if !seen.insert(s.grouping) {
            return Err(Error::invalid(format!("grouping {:?} summarized twice", s.grouping)));
        }
        let rel = format!("summary_{}.csv", s.grouping.file_stem());
        write(out_dir, &rel, &summary_csv(s), &mut written)?;
    }
    if let Some(t) = &artifacts.stack_impact {
        write(out_dir, "stack_impact.csv", &stack_impact_csv(t), &mut written)?;
    }
    let mut curve_names = std::collections::BTreeSet::new();
    for c in &artifacts.curves {
        let rel = format!("curves/{}_{}.csv", file_safe(&c.workload), c.curve.kind().as_str());
        if !curve_names.insert(rel.clone()) {
            return Err(Error::invalid(format!("two curves map to `{rel}`")));
        }
        write(out_dir, &rel, &curve_csv(&c.curve), &mut written)?;
    }

    let mut bundle = serde_json::to_value(artifacts)?;
    round_floats(&mut bundle);
    let mut text = serde_json::to_string_pretty(&bundle)?;
    text.push('\n');
    write(out_dir, "bundle.json", &text, &mut written)?;

    written.sort();
    Ok(written)
}
