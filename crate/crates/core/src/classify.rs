//! Rule-based system-behavior and data-behavior labeling.
//!
//! All threshold comparisons are strict where the rule says "larger than" or
//! "less than"; a value sitting exactly on a threshold falls to the weaker
//! class.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    BehaviorLabels, Category, DataBand, DataVolumes, IntermediateBand, SystemBehavior,
    SystemBehaviorMetrics,
};

pub const CPU_INTENSIVE_UTIL: f64 = 0.85;
pub const IO_INTENSIVE_MAX_UTIL: f64 = 0.60;
pub const IO_WEIGHTED_RATIO: f64 = 10.0;
pub const IO_WAIT_RATIO: f64 = 0.20;

pub const BAND_MUCH_LESS: f64 = 0.01;
pub const BAND_EQUAL_LOW: f64 = 0.9;
pub const BAND_EQUAL_HIGH: f64 = 1.1;

/// 1. `cpu_util > 0.85` → CPU-intensive.
/// 2. `(weighted_io_ratio > 10 || io_wait > 0.20) && cpu_util < 0.60` → I/O-intensive.
/// 3. Anything else → hybrid.
pub fn classify_system_behavior(m: &SystemBehaviorMetrics) -> SystemBehavior {
    if m.cpu_util > CPU_INTENSIVE_UTIL {
        SystemBehavior::CpuIntensive
    } else if (m.weighted_io_ratio > IO_WEIGHTED_RATIO || m.io_wait > IO_WAIT_RATIO)
        && m.cpu_util < IO_INTENSIVE_MAX_UTIL
    {
        SystemBehavior::IoIntensive
    } else {
        SystemBehavior::Hybrid
    }
}

/// Band of a volume ratio: `[0, 0.01)`, `[0.01, 0.9)`, `[0.9, 1.1)`, `[1.1, inf)`.
pub fn ratio_band(ratio: f64) -> DataBand {
    if ratio < BAND_MUCH_LESS {
        DataBand::OutMuchLess
    } else if ratio < BAND_EQUAL_LOW {
        DataBand::OutLess
    } else if ratio < BAND_EQUAL_HIGH {
        DataBand::OutEqual
    } else {
        DataBand::OutGreater
    }
}

pub fn classify_data_behavior(v: &DataVolumes) -> Result<(DataBand, IntermediateBand)> {
    if v.input_bytes == 0 {
        return Err(Error::invalid("input volume is zero; data ratios are undefined"));
    }
    let input = v.input_bytes as f64;
    let out = ratio_band(v.output_bytes as f64 / input);
    let intermediate = if v.intermediate_bytes == 0 {
        IntermediateBand::NoIntermediate
    } else {
        IntermediateBand::Band(ratio_band(v.intermediate_bytes as f64 / input))
    };
    Ok((out, intermediate))
}

/// Combines both classifiers with the declared application category.
pub fn label_workload(
    m: &SystemBehaviorMetrics,
    v: &DataVolumes,
    category: Category,
) -> Result<BehaviorLabels> {
    m.validate()?;
    let (data_out, data_intermediate) = classify_data_behavior(v)?;
    Ok(BehaviorLabels {
        system: classify_system_behavior(m),
        data_out,
        data_intermediate,
        category,
    })
}

pub const BEHAVIOR_HEADER: [&str; 8] = [
    "workload",
    "cpu_util",
    "io_wait",
    "weighted_io_ratio",
    "input_bytes",
    "output_bytes",
    "intermediate_bytes",
    "category",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorRow {
    pub workload: String,
    pub metrics: SystemBehaviorMetrics,
    pub volumes: DataVolumes,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledWorkload {
    pub workload: String,
    pub labels: BehaviorLabels,
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the behavior CSV
/// (`workload,cpu_util,io_wait,weighted_io_ratio,input_bytes,output_bytes,intermediate_bytes,category`).
/// Bandwidth columns are not part of this format and read as zero.
pub fn parse_behavior_csv<R: Read>(input: R) -> Result<Vec<BehaviorRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != BEHAVIOR_HEADER {
        return Err(parse_err(1, format!("expected header `{}`", BEHAVIOR_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            parse_err(e.position().map(|p| p.line()).unwrap_or(0), e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let f = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| parse_err(line, format!("`{}` is not a number: `{}`", BEHAVIOR_HEADER[i], &record[i])))
        };
        let b = |i: usize| -> Result<u64> {
            record[i]
                .parse()
                .map_err(|_| parse_err(line, format!("`{}` is not a byte count: `{}`", BEHAVIOR_HEADER[i], &record[i])))
        };
        let metrics = SystemBehaviorMetrics {
            cpu_util: f(1)?,
            io_wait: f(2)?,
            weighted_io_ratio: f(3)?,
            disk_bw_bps: 0.0,
            net_bw_bps: 0.0,
        };
        metrics
            .validate()
            .map_err(|e| parse_err(line, e.to_string()))?;
        rows.push(BehaviorRow {
            workload: record[0].to_string(),
            metrics,
            volumes: DataVolumes {
                input_bytes: b(4)?,
                output_bytes: b(5)?,
                intermediate_bytes: b(6)?,
            },
            category: record[7].parse().map_err(|e: Error| parse_err(line, e.to_string()))?,
        });
    }
    Ok(rows)
}

pub fn label_rows(rows: &[BehaviorRow]) -> Result<Vec<LabeledWorkload>> {
    rows.iter()
        .map(|r| {
            label_workload(&r.metrics, &r.volumes, r.category)
                .map(|labels| LabeledWorkload {
                    workload: r.workload.clone(),
                    labels,
                })
                .map_err(|e| Error::invalid(format!("workload `{}`: {e}", r.workload)))
        })
        .collect()
}

/// Writes `workload,system,data_out,data_intermediate,category`.
pub fn write_labels_csv<W: Write>(out: W, labeled: &[LabeledWorkload]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::invalid(format!("writing labels: {e}"));
    w.write_record(["workload", "system", "data_out", "data_intermediate", "category"])
        .map_err(io)?;
    for l in labeled {
        w.write_record([
            l.workload.clone(),
            l.labels.system.to_string(),
            l.labels.data_out.to_string(),
            l.labels.data_intermediate.to_string(),
            l.labels.category.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::invalid(format!("writing labels: {e}")))?;
    Ok(())
}
