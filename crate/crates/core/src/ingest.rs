//! Counter-dump and telemetry parsing, warm-up trimming, and derivation of
//! metric vectors and system-behavior metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::events::canonical_event;
use crate::model::{
    validate_profile, Formula, MetricSchema, MetricVector, RawProfile, SystemBehaviorMetrics,
    SystemTelemetry, TelemetrySample,
};

pub const COUNTER_HEADER: [&str; 5] = ["workload", "node", "event", "count", "wall_time_s"];
pub const TELEMETRY_HEADER: [&str; 7] = [
    "workload",
    "t_s",
    "cpu_util",
    "io_wait",
    "weighted_io_time_ms",
    "disk_bw",
    "net_bw",
];

/// Warm-up window discarded before steady-state measurement, in seconds.
pub const DEFAULT_WARMUP_S: f64 = 30.0;

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        line,
        message: err.to_string(),
    }
}

fn check_header(headers: &csv::StringRecord, expected: &[&str], optional: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().collect();
    let ok = got.len() >= expected.len()
        && got.len() <= expected.len() + optional.len()
        && got[..expected.len()] == *expected
        && got[expected.len()..] == optional[..got.len() - expected.len()];
    if ok {
        Ok(())
    } else {
        Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`, got `{}`", expected.join(","), got.join(",")),
        })
    }
}

fn field<'a>(record: &'a csv::StringRecord, idx: usize, line: u64, name: &str) -> Result<&'a str> {
    match record.get(idx) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("missing `{name}`"),
        }),
    }
}

fn parse_num<T: std::str::FromStr>(raw: &str, line: u64, name: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{name}` is not a valid number: `{raw}`"),
    })
}

#[derive(Default)]
struct ProfileAcc {
    counters: BTreeMap<String, i64>,
    nodes: BTreeSet<String>,
    seen: BTreeSet<(String, String)>,
    wall_time_s: f64,
    stack: Option<String>,
}

/// Parses a counter dump with header `workload,node,event,count,wall_time_s`
/// (an optional trailing `stack` column is accepted).
///
/// Counts for the same workload and event are summed across nodes, wall time
/// is the maximum across nodes, and event names are mapped onto the canonical
/// vocabulary. Profiles come back sorted by workload id.
pub fn parse_counter_csv<R: Read>(input: R) -> Result<Vec<RawProfile>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(input);
    let headers = reader.headers().map_err(csv_error)?.clone();
    check_header(&headers, &COUNTER_HEADER, &["stack"])?;
    let has_stack = headers.len() == COUNTER_HEADER.len() + 1;

    let mut profiles: BTreeMap<String, ProfileAcc> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let workload = field(&record, 0, line, "workload")?;
        let node = field(&record, 1, line, "node")?;
        let event = canonical_event(field(&record, 2, line, "event")?);
        let count: u64 = parse_num(field(&record, 3, line, "count")?, line, "count")?;
        let count = i64::try_from(count).map_err(|_| Error::Parse {
            line,
            message: "count overflows a signed 64-bit integer".into(),
        })?;
        let wall: f64 = parse_num(field(&record, 4, line, "wall_time_s")?, line, "wall_time_s")?;
        if !(wall > 0.0 && wall.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("wall_time_s must be positive, got {wall}"),
            });
        }

        let acc = profiles.entry(workload.to_string()).or_default();
        if !acc.seen.insert((node.to_string(), event.clone())) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate row for workload `{workload}`, node `{node}`, event `{event}`"),
            });
        }
        acc.nodes.insert(node.to_string());
        acc.wall_time_s = acc.wall_time_s.max(wall);
        let slot = acc.counters.entry(event).or_insert(0);
        *slot = slot.checked_add(count).ok_or_else(|| Error::Parse {
            line,
            message: "summed count overflows".into(),
        })?;
        if has_stack {
            if let Some(stack) = record.get(5).filter(|s| !s.is_empty()) {
                acc.stack.get_or_insert_with(|| stack.to_string());
            }
        }
    }

    Ok(profiles
        .into_iter()
        .map(|(workload_id, acc)| RawProfile {
            workload_id,
            stack: acc.stack.unwrap_or_default(),
            counters: acc.counters,
            wall_time_s: acc.wall_time_s,
            node_count: acc.nodes.len() as u32,
        })
        .collect())
}

/// Parses telemetry with header
/// `workload,t_s,cpu_util,io_wait,weighted_io_time_ms,disk_bw,net_bw`.
/// Rows of one workload must appear in increasing time order.
pub fn parse_telemetry_csv<R: Read>(input: R) -> Result<Vec<SystemTelemetry>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers().map_err(csv_error)?.clone();
    check_header(&headers, &TELEMETRY_HEADER, &[])?;

    let mut series: BTreeMap<String, Vec<TelemetrySample>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let num = |idx: usize| -> Result<f64> {
            let name = TELEMETRY_HEADER[idx];
            parse_num(field(&record, idx, line, name)?, line, name)
        };
        let sample = TelemetrySample {
            t_s: num(1)?,
            cpu_util: num(2)?,
            io_wait: num(3)?,
            weighted_io_time_ms: num(4)?,
            disk_bw_bps: num(5)?,
            net_bw_bps: num(6)?,
        };
        series
            .entry(field(&record, 0, line, "workload")?.to_string())
            .or_default()
            .push(sample);
    }
    series
        .into_iter()
        .map(|(id, samples)| SystemTelemetry::new(id, samples))
        .collect()
}

/// Drops samples taken before `warmup_s`.
pub fn trim_ramp_up(telemetry: &SystemTelemetry, warmup_s: f64) -> Result<SystemTelemetry> {
    if !(warmup_s >= 0.0) || !warmup_s.is_finite() {
        return Err(Error::invalid(format!("warm-up must be >= 0, got {warmup_s}")));
    }
    let kept: Vec<TelemetrySample> = telemetry
        .samples()
        .iter()
        .filter(|s| s.t_s >= warmup_s)
        .copied()
        .collect();
    if kept.is_empty() {
        return Err(Error::NoSteadyState { warmup_s });
    }
    SystemTelemetry::new(telemetry.workload_id(), kept)
}

/// Trapezoidal weight of each sample over the sampled interval.
fn trapezoid_weights(samples: &[TelemetrySample]) -> Vec<f64> {
    let n = samples.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            let left = if i == 0 { samples[0].t_s } else { samples[i - 1].t_s };
            let right = if i + 1 == n { samples[n - 1].t_s } else { samples[i + 1].t_s };
            (right - left) / 2.0
        })
        .collect()
}

/// Time-weighted mean, computed as an offset from the first value so a
/// constant series reproduces its value bit for bit.
fn weighted_mean(values: impl Iterator<Item = f64> + Clone, weights: &[f64]) -> f64 {
    let mut iter = values.clone();
    let first = match iter.next() {
        Some(v) => v,
        None => return f64::NAN,
    };
    let total: f64 = weights.iter().sum();
    let offset: f64 = values
        .clone()
        .zip(weights)
        .map(|(v, w)| w * (v - first))
        .sum::<f64>()
        / total;
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    (first + offset).clamp(lo, hi)
}

/// Reduces a telemetry series to the metrics used for system-behavior
/// classification. `runtime_s` is the workload's running time.
pub fn aggregate_telemetry(telemetry: &SystemTelemetry, runtime_s: f64) -> Result<SystemBehaviorMetrics> {
    if !(runtime_s > 0.0) || !runtime_s.is_finite() {
        return Err(Error::invalid(format!("runtime must be positive, got {runtime_s}")));
    }
    let samples = telemetry.samples();
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Err(Error::invalid(format!(
                "telemetry `{}` has no samples",
                telemetry.workload_id()
            )))
        }
    };
    let weights = trapezoid_weights(samples);
    let mean = |get: fn(&TelemetrySample) -> f64| weighted_mean(samples.iter().map(get), &weights);

    let io_delta = last.weighted_io_time_ms - first.weighted_io_time_ms;
    if io_delta < 0.0 {
        return Err(Error::invalid(format!(
            "telemetry `{}`: weighted I/O time decreases",
            telemetry.workload_id()
        )));
    }
    let metrics = SystemBehaviorMetrics {
        cpu_util: mean(|s| s.cpu_util),
        io_wait: mean(|s| s.io_wait),
        weighted_io_ratio: io_delta / (runtime_s * 1000.0),
        disk_bw_bps: mean(|s| s.disk_bw_bps),
        net_bw_bps: mean(|s| s.net_bw_bps),
    };
    metrics.validate()?;
    Ok(metrics)
}

fn counter_sum(profile: &RawProfile, events: &[String]) -> f64 {
    events
        .iter()
        .map(|e| profile.counter(e).unwrap_or(0) as i128)
        .sum::<i128>() as f64
}

fn evaluate(name: &str, formula: &Formula, profile: &RawProfile) -> Result<f64> {
    match formula {
        Formula::Ratio {
            numerator,
            denominator,
            scale,
        } => {
            let den = counter_sum(profile, denominator);
            if den == 0.0 {
                return Err(Error::ZeroDenominator {
                    metric: name.to_string(),
                });
            }
            Ok(scale * counter_sum(profile, numerator) / den)
        }
        Formula::Remainder { total, parts } => {
            let total = profile.counter(total).unwrap_or(0) as i128;
            if total == 0 {
                return Err(Error::ZeroDenominator {
                    metric: name.to_string(),
                });
            }
            let covered: i128 = parts
                .iter()
                .map(|e| profile.counter(e).unwrap_or(0) as i128)
                .sum();
            Ok((total - covered) as f64 / total as f64)
        }
    }
}

/// Applies every formula of `schema` to the profile's counters.
///
/// IPC is retired instructions per cycle, MPKI is `1000 * misses / retired
/// instructions`, mix ratios divide by retired instructions.
pub fn derive_microarch_metrics(profile: &RawProfile, schema: &MetricSchema) -> Result<MetricVector> {
    let report = validate_profile(profile, schema);
    if !report.is_empty() {
        return Err(Error::InvalidProfile {
            workload: profile.workload_id.clone(),
            report,
        });
    }
    let values = schema
        .metrics()
        .iter()
        .map(|m| evaluate(&m.name, &m.formula, profile))
        .collect::<Result<Vec<f64>>>()?;
    MetricVector::new(profile.workload_id.clone(), values, schema)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerOpCounts {
    pub int_addr_calc: u64,
    pub fp_addr_calc: u64,
    pub other_calc: u64,
}

/// Shares of integer instructions spent on integer-array addressing,
/// floating-point-array addressing, and everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegerBreakdown {
    pub int_addr: f64,
    pub fp_addr: f64,
    pub other: f64,
}

pub fn integer_breakdown(counts: IntegerOpCounts) -> Result<IntegerBreakdown> {
    let total = counts.int_addr_calc as f64 + counts.fp_addr_calc as f64 + counts.other_calc as f64;
    if total == 0.0 {
        return Err(Error::invalid("integer breakdown needs at least one non-zero count"));
    }
    Ok(IntegerBreakdown {
        int_addr: counts.int_addr_calc as f64 / total,
        fp_addr: counts.fp_addr_calc as f64 / total,
        other: counts.other_calc as f64 / total,
    })
}
