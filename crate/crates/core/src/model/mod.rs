//! Data model shared by every stage: schemas, profiles, metric vectors,
//! telemetry and behavior labels.

pub mod events;
mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use schema::{
    default_schema, Formula, MetricDescriptor, MetricGroup, MetricSchema, MetricUnit,
    DEFAULT_SCHEMA_VERSION,
};

/// Raw counter totals for one workload run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawProfile {
    pub workload_id: String,
    #[serde(default)]
    pub stack: String,
    pub counters: BTreeMap<String, i64>,
    pub wall_time_s: f64,
    pub node_count: u32,
}

impl RawProfile {
    pub fn counter(&self, event: &str) -> Option<i64> {
        self.counters.get(event).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyWorkloadId,
    MissingCounter { event: String },
    NonPositiveCounter { event: String, value: i64 },
    NegativeCounter { event: String, value: i64 },
    NonPositiveWallTime { value: f64 },
    ZeroNodeCount,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyWorkloadId => write!(f, "workload id is empty"),
            Violation::MissingCounter { event } => write!(f, "counter `{event}` is absent"),
            Violation::NonPositiveCounter { event, value } => {
                write!(f, "counter `{event}` must be > 0, got {value}")
            }
            Violation::NegativeCounter { event, value } => {
                write!(f, "counter `{event}` is negative ({value})")
            }
            Violation::NonPositiveWallTime { value } => {
                write!(f, "wall time must be positive, got {value}")
            }
            Violation::ZeroNodeCount => write!(f, "node count is zero"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions_counter(&self, event: &str) -> bool {
        self.violations.iter().any(|v| match v {
            Violation::MissingCounter { event: e }
            | Violation::NonPositiveCounter { event: e, .. }
            | Violation::NegativeCounter { event: e, .. } => e == event,
            _ => false,
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks a profile against its own invariants and against the counters the
/// schema's formulas need. Violations are returned as data.
pub fn validate_profile(profile: &RawProfile, schema: &MetricSchema) -> ValidationReport {
    let mut violations = Vec::new();
    if profile.workload_id.trim().is_empty() {
        violations.push(Violation::EmptyWorkloadId);
    }
    for event in [events::INSTRUCTIONS, events::CYCLES] {
        match profile.counter(event) {
            None => violations.push(Violation::MissingCounter {
                event: event.to_string(),
            }),
            Some(value) if value <= 0 => violations.push(Violation::NonPositiveCounter {
                event: event.to_string(),
                value,
            }),
            Some(_) => {}
        }
    }
    for (event, &value) in &profile.counters {
        if value < 0 && event != events::INSTRUCTIONS && event != events::CYCLES {
            violations.push(Violation::NegativeCounter {
                event: event.clone(),
                value,
            });
        }
    }
    for event in schema.required_counters() {
        if event == events::INSTRUCTIONS || event == events::CYCLES {
            continue;
        }
        if !profile.counters.contains_key(event) {
            violations.push(Violation::MissingCounter {
                event: event.to_string(),
            });
        }
    }
    if !(profile.wall_time_s > 0.0 && profile.wall_time_s.is_finite()) {
        violations.push(Violation::NonPositiveWallTime {
            value: profile.wall_time_s,
        });
    }
    if profile.node_count == 0 {
        violations.push(Violation::ZeroNodeCount);
    }
    ValidationReport { violations }
}

/// One workload's metric values, aligned to a [`MetricSchema`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    workload_id: String,
    values: Vec<f64>,
    schema_version: String,
}

impl MetricVector {
    pub fn new(workload_id: impl Into<String>, values: Vec<f64>, schema: &MetricSchema) -> Result<Self> {
        let v = Self {
            workload_id: workload_id.into(),
            values,
            schema_version: schema.version().to_string(),
        };
        v.check_against(schema)?;
        Ok(v)
    }

    /// Re-checks alignment, finiteness and ratio ranges, e.g. after loading
    /// a vector from disk.
    pub fn check_against(&self, schema: &MetricSchema) -> Result<()> {
        if self.values.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                actual: self.values.len(),
            });
        }
        if self.schema_version != schema.version() {
            return Err(Error::Schema(format!(
                "vector `{}` has schema version `{}`, expected `{}`",
                self.workload_id,
                self.schema_version,
                schema.version()
            )));
        }
        for (value, desc) in self.values.iter().zip(schema.metrics()) {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    metric: desc.name.clone(),
                });
            }
            if desc.unit == MetricUnit::Ratio && !(0.0..=1.0).contains(value) {
                return Err(Error::RatioOutOfRange {
                    metric: desc.name.clone(),
                    value: *value,
                });
            }
        }
        Ok(())
    }

    pub fn workload_id(&self) -> &str {
        &self.workload_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn schema_version(&self) -> &str {
        &self.schema_version
    }

    pub fn get(&self, schema: &MetricSchema, name: &str) -> Option<f64> {
        schema.index_of(name).and_then(|i| self.values.get(i).copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub t_s: f64,
    pub cpu_util: f64,
    pub io_wait: f64,
    pub weighted_io_time_ms: f64,
    #[serde(rename = "disk_bw_Bps")]
    pub disk_bw_bps: f64,
    #[serde(rename = "net_bw_Bps")]
    pub net_bw_bps: f64,
}

/// OS-level time series for one workload run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTelemetry")]
pub struct SystemTelemetry {
    workload_id: String,
    samples: Vec<TelemetrySample>,
}

#[derive(Deserialize)]
struct RawTelemetry {
    workload_id: String,
    samples: Vec<TelemetrySample>,
}

impl TryFrom<RawTelemetry> for SystemTelemetry {
    type Error = Error;

    fn try_from(raw: RawTelemetry) -> Result<Self> {
        SystemTelemetry::new(raw.workload_id, raw.samples)
    }
}

impl SystemTelemetry {
    pub fn new(workload_id: impl Into<String>, samples: Vec<TelemetrySample>) -> Result<Self> {
        let workload_id = workload_id.into();
        for pair in samples.windows(2) {
            if !(pair[1].t_s > pair[0].t_s) {
                return Err(Error::invalid(format!(
                    "telemetry `{workload_id}`: t_s not strictly increasing at {}",
                    pair[1].t_s
                )));
            }
        }
        for s in &samples {
            let fractions_ok = (0.0..=1.0).contains(&s.cpu_util) && (0.0..=1.0).contains(&s.io_wait);
            if !fractions_ok || !s.t_s.is_finite() {
                return Err(Error::invalid(format!(
                    "telemetry `{workload_id}` at t={}: cpu_util/io_wait outside [0,1]",
                    s.t_s
                )));
            }
            if !(s.weighted_io_time_ms >= 0.0) {
                return Err(Error::invalid(format!(
                    "telemetry `{workload_id}` at t={}: negative weighted I/O time",
                    s.t_s
                )));
            }
        }
        Ok(Self {
            workload_id,
            samples,
        })
    }

    pub fn workload_id(&self) -> &str {
        &self.workload_id
    }

    pub fn samples(&self) -> &[TelemetrySample] {
        &self.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemBehaviorMetrics {
    pub cpu_util: f64,
    pub io_wait: f64,
    pub weighted_io_ratio: f64,
    #[serde(rename = "disk_bw_Bps")]
    pub disk_bw_bps: f64,
    #[serde(rename = "net_bw_Bps")]
    pub net_bw_bps: f64,
}

impl SystemBehaviorMetrics {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.cpu_util) || !(0.0..=1.0).contains(&self.io_wait) {
            return Err(Error::invalid("cpu_util and io_wait must lie in [0, 1]"));
        }
        if !(self.weighted_io_ratio >= 0.0) || !self.weighted_io_ratio.is_finite() {
            return Err(Error::invalid("weighted_io_ratio must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataVolumes {
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub intermediate_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SystemBehavior {
    CpuIntensive,
    IoIntensive,
    Hybrid,
}

/// Ratio band of a data volume relative to the input volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DataBand {
    OutMuchLess,
    OutLess,
    OutEqual,
    OutGreater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntermediateBand {
    NoIntermediate,
    #[serde(untagged)]
    Band(DataBand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    DataAnalysis,
    Service,
    InteractiveAnalysis,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::DataAnalysis,
        Category::Service,
        Category::InteractiveAnalysis,
    ];
}

impl SystemBehavior {
    pub const ALL: [SystemBehavior; 3] = [
        SystemBehavior::CpuIntensive,
        SystemBehavior::IoIntensive,
        SystemBehavior::Hybrid,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BehaviorLabels {
    pub system: SystemBehavior,
    pub data_out: DataBand,
    pub data_intermediate: IntermediateBand,
    pub category: Category,
}

macro_rules! display_from_debug {
    ($($ty:ty),*) => {$(
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Debug::fmt(self, f)
            }
        }
    )*};
}

display_from_debug!(SystemBehavior, DataBand, Category);

impl fmt::Display for IntermediateBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntermediateBand::NoIntermediate => f.write_str("NoIntermediate"),
            IntermediateBand::Band(b) => fmt::Display::fmt(b, f),
        }
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match squash(s).as_str() {
            "dataanalysis" => Ok(Category::DataAnalysis),
            "service" => Ok(Category::Service),
            "interactiveanalysis" => Ok(Category::InteractiveAnalysis),
            _ => Err(Error::invalid(format!("unknown application category `{s}`"))),
        }
    }
}

impl FromStr for SystemBehavior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match squash(s).as_str() {
            "cpuintensive" => Ok(SystemBehavior::CpuIntensive),
            "iointensive" => Ok(SystemBehavior::IoIntensive),
            "hybrid" => Ok(SystemBehavior::Hybrid),
            _ => Err(Error::invalid(format!("unknown system behavior `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn full_profile(schema: &MetricSchema) -> RawProfile {
        let mut counters: BTreeMap<String, i64> = schema
            .required_counters()
            .into_iter()
            .map(|e| (e.to_string(), 1))
            .collect();
        counters.insert(events::INSTRUCTIONS.into(), 1_000_000_000);
        counters.insert(events::CYCLES.into(), 800_000_000);
        RawProfile {
            workload_id: "w1".into(),
            stack: "hadoop".into(),
            counters,
            wall_time_s: 10.0,
            node_count: 1,
        }
    }

    #[test]
    fn complete_profile_validates_clean() {
        let schema = default_schema();
        let report = validate_profile(&full_profile(&schema), &schema);
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn missing_cycles_is_reported() {
        let schema = default_schema();
        let mut p = full_profile(&schema);
        p.counters.remove(events::CYCLES);
        let report = validate_profile(&p, &schema);
        assert!(report.mentions_counter("cycles"));
        assert!(report.violations.contains(&Violation::MissingCounter {
            event: "cycles".into()
        }));
    }

    #[test]
    fn negative_counter_is_reported() {
        let schema = default_schema();
        let mut p = full_profile(&schema);
        p.counters.insert(events::L1I_MISSES.into(), -5);
        let report = validate_profile(&p, &schema);
        assert_eq!(
            report.violations,
            vec![Violation::NegativeCounter {
                event: events::L1I_MISSES.into(),
                value: -5
            }]
        );
    }

    #[test]
    fn metric_vector_checks_alignment_and_ratio_range() {
        let schema = default_schema();
        assert!(matches!(
            MetricVector::new("w", vec![0.1; 44], &schema),
            Err(Error::DimensionMismatch { expected: 45, actual: 44 })
        ));
        let mut values = vec![0.5; 45];
        values[0] = 1.5;
        assert!(matches!(
            MetricVector::new("w", values, &schema),
            Err(Error::RatioOutOfRange { .. })
        ));
        let mut values = vec![0.5; 45];
        values[3] = f64::NAN;
        assert!(MetricVector::new("w", values, &schema).is_err());
        assert!(MetricVector::new("w", vec![0.5; 45], &schema).is_ok());
    }

    #[test]
    fn telemetry_rejects_non_increasing_time() {
        let s = |t| TelemetrySample {
            t_s: t,
            cpu_util: 0.5,
            io_wait: 0.1,
            weighted_io_time_ms: 0.0,
            disk_bw_bps: 0.0,
            net_bw_bps: 0.0,
        };
        assert!(SystemTelemetry::new("w", vec![s(0.0), s(0.0)]).is_err());
        assert!(SystemTelemetry::new("w", vec![s(0.0), s(1.0)]).is_ok());
        let json = r#"{"workload_id":"w","samples":[
            {"t_s":1,"cpu_util":2.0,"io_wait":0,"weighted_io_time_ms":0,"disk_bw_Bps":0,"net_bw_Bps":0}]}"#;
        assert!(serde_json::from_str::<SystemTelemetry>(json).is_err());
    }

    #[test]
    fn labels_serialize_with_flat_band_names() {
        let labels = BehaviorLabels {
            system: SystemBehavior::Hybrid,
            data_out: DataBand::OutEqual,
            data_intermediate: IntermediateBand::NoIntermediate,
            category: Category::DataAnalysis,
        };
        let text = serde_json::to_string(&labels).unwrap();
        assert_eq!(
            text,
            r#"{"system":"Hybrid","data_out":"OutEqual","data_intermediate":"NoIntermediate","category":"DataAnalysis"}"#
        );
        let band = serde_json::to_string(&IntermediateBand::Band(DataBand::OutLess)).unwrap();
        assert_eq!(band, "\"OutLess\"");
        assert_eq!(
            serde_json::from_str::<IntermediateBand>("\"OutLess\"").unwrap(),
            IntermediateBand::Band(DataBand::OutLess)
        );
    }

    #[test]
    fn category_parsing_is_lenient_on_spelling() {
        assert_eq!("data analysis".parse::<Category>().unwrap(), Category::DataAnalysis);
        assert_eq!("Interactive_Analysis".parse::<Category>().unwrap(), Category::InteractiveAnalysis);
        assert!("batch".parse::<Category>().is_err());
    }
}
