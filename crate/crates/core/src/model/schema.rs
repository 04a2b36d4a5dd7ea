use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::events::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricGroup {
    InstructionMix,
    Cache,
    #[serde(rename = "TLB")]
    Tlb,
    Branch,
    Pipeline,
    OffcoreSnoop,
    Parallelism,
    OperationIntensity,
}

impl MetricGroup {
    pub const ALL: [MetricGroup; 8] = [
        MetricGroup::InstructionMix,
        MetricGroup::Cache,
        MetricGroup::Tlb,
        MetricGroup::Branch,
        MetricGroup::Pipeline,
        MetricGroup::OffcoreSnoop,
        MetricGroup::Parallelism,
        MetricGroup::OperationIntensity,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricUnit {
    Ratio,
    PerKiloInstr,
    PerCycle,
    FlopsPerByte,
    Count,
}

/// Derivation rule from raw counters to one metric value.
///
/// `Ratio` evaluates `scale * sum(numerator) / sum(denominator)`.
/// `Remainder` evaluates `(total - sum(parts)) / total`, the share of `total`
/// that no listed category accounts for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Formula {
    Ratio {
        numerator: Vec<String>,
        denominator: Vec<String>,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
    Remainder {
        total: String,
        parts: Vec<String>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

impl Formula {
    pub fn ratio(numerator: &str, denominator: &str) -> Self {
        Formula::Ratio {
            numerator: vec![numerator.to_string()],
            denominator: vec![denominator.to_string()],
            scale: 1.0,
        }
    }

    pub fn per_kilo_instruction(event: &str) -> Self {
        Formula::Ratio {
            numerator: vec![event.to_string()],
            denominator: vec![INSTRUCTIONS.to_string()],
            scale: 1000.0,
        }
    }

    /// Counters this formula reads.
    pub fn required_counters(&self) -> Vec<&str> {
        match self {
            Formula::Ratio {
                numerator,
                denominator,
                ..
            } => numerator
                .iter()
                .chain(denominator.iter())
                .map(String::as_str)
                .collect(),
            Formula::Remainder { total, parts } => std::iter::once(total.as_str())
                .chain(parts.iter().map(String::as_str))
                .collect(),
        }
    }

    /// Stable textual identifier, e.g. `ratio(l1i_misses/instructions_retired)*1000`.
    pub fn formula_id(&self) -> String {
        match self {
            Formula::Ratio {
                numerator,
                denominator,
                scale,
            } => {
                let mut id = format!("ratio({}/{})", numerator.join("+"), denominator.join("+"));
                if *scale != 1.0 {
                    id.push_str(&format!("*{scale}"));
                }
                id
            }
            Formula::Remainder { total, parts } => {
                format!("remainder({}-{})", total, parts.join("-"))
            }
        }
    }

    fn output_unit_matches(&self, unit: MetricUnit) -> bool {
        match (self, unit) {
            (Formula::Remainder { .. }, MetricUnit::Ratio) => true,
            (Formula::Remainder { .. }, _) => false,
            (Formula::Ratio { scale, .. }, MetricUnit::Ratio) => *scale == 1.0,
            (
                Formula::Ratio {
                    denominator, scale, ..
                },
                MetricUnit::PerKiloInstr,
            ) => *scale == 1000.0 && denominator.len() == 1 && denominator[0] == INSTRUCTIONS,
            (Formula::Ratio { denominator, .. }, MetricUnit::PerCycle) => {
                denominator.len() == 1 && denominator[0] == CYCLES
            }
            (Formula::Ratio { .. }, MetricUnit::FlopsPerByte | MetricUnit::Count) => true,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.formula_id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDescriptor {
    pub name: String,
    pub group: MetricGroup,
    pub unit: MetricUnit,
    pub formula: Formula,
}

impl MetricDescriptor {
    pub fn new(name: &str, group: MetricGroup, unit: MetricUnit, formula: Formula) -> Self {
        Self {
            name: name.to_string(),
            group,
            unit,
            formula,
        }
    }
}

/// Ordered list of metric descriptors; vector indices follow this order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct MetricSchema {
    version: String,
    metrics: Vec<MetricDescriptor>,
}

#[derive(Deserialize)]
struct RawSchema {
    version: String,
    metrics: Vec<MetricDescriptor>,
}

impl TryFrom<RawSchema> for MetricSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        MetricSchema::new(raw.version, raw.metrics)
    }
}

impl MetricSchema {
    pub fn new(version: impl Into<String>, metrics: Vec<MetricDescriptor>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for m in &metrics {
            if m.name.trim().is_empty() {
                return Err(Error::Schema("metric name is empty".into()));
            }
            if !seen.insert(m.name.as_str()) {
                return Err(Error::Schema(format!("duplicate metric `{}`", m.name)));
            }
            if !m.formula.output_unit_matches(m.unit) {
                return Err(Error::Schema(format!(
                    "metric `{}`: unit {:?} does not match formula {}",
                    m.name, m.unit, m.formula
                )));
            }
        }
        Ok(Self {
            version: version.into(),
            metrics,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn metrics(&self) -> &[MetricDescriptor] {
        &self.metrics
    }

    pub fn len(&self) -> usize {
        self.metrics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metrics.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.metrics.iter().map(|m| m.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.metrics.iter().position(|m| m.name == name)
    }

    /// Union of every counter the schema's formulas read, sorted.
    pub fn required_counters(&self) -> BTreeSet<&str> {
        self.metrics
            .iter()
            .flat_map(|m| m.formula.required_counters())
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub const DEFAULT_SCHEMA_VERSION: &str = "wcr-default-45/1";

/// The built-in 45-metric schema.
///
/// Instruction mix (6), cache (6), TLB (5), branch (4), pipeline (12),
/// off-core requests and snoop responses (8), parallelism (2), operation
/// intensity (2). Operation intensity is floating-point operations per byte of
/// off-core traffic, counting 64 bytes per off-core request.
pub fn default_schema() -> MetricSchema {
    use MetricGroup as G;
    use MetricUnit as U;

    let ratio = |name: &str, group, num: &str, den: &str| {
        MetricDescriptor::new(name, group, U::Ratio, Formula::ratio(num, den))
    };
    let pki = |name: &str, group, event: &str| {
        MetricDescriptor::new(name, group, U::PerKiloInstr, Formula::per_kilo_instruction(event))
    };
    let per_cycle = |name: &str, num: &str| {
        MetricDescriptor::new(name, G::Pipeline, U::PerCycle, Formula::ratio(num, CYCLES))
    };
    let per_byte = |name: &str, unit, num: &str| {
        MetricDescriptor::new(
            name,
            G::OperationIntensity,
            unit,
            Formula::Ratio {
                numerator: vec![num.to_string()],
                denominator: vec![OFFCORE_ALL_REQUESTS.to_string()],
                scale: 1.0 / 64.0,
            },
        )
    };

    let metrics = vec![
        ratio("branch_ratio", G::InstructionMix, BRANCH_INSTRUCTIONS, INSTRUCTIONS),
        ratio("integer_ratio", G::InstructionMix, INT_INSTRUCTIONS, INSTRUCTIONS),
        ratio("fp_ratio", G::InstructionMix, FP_INSTRUCTIONS, INSTRUCTIONS),
        ratio("load_ratio", G::InstructionMix, LOAD_INSTRUCTIONS, INSTRUCTIONS),
        ratio("store_ratio", G::InstructionMix, STORE_INSTRUCTIONS, INSTRUCTIONS),
        MetricDescriptor::new(
            "other_ratio",
            G::InstructionMix,
            U::Ratio,
            Formula::Remainder {
                total: INSTRUCTIONS.to_string(),
                parts: [
                    BRANCH_INSTRUCTIONS,
                    INT_INSTRUCTIONS,
                    FP_INSTRUCTIONS,
                    LOAD_INSTRUCTIONS,
                    STORE_INSTRUCTIONS,
                ]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            },
        ),
        pki("l1i_mpki", G::Cache, L1I_MISSES),
        pki("l1d_mpki", G::Cache, L1D_MISSES),
        pki("l2_mpki", G::Cache, L2_MISSES),
        pki("l3_mpki", G::Cache, L3_MISSES),
        ratio("l2_miss_ratio", G::Cache, L2_MISSES, L2_REFERENCES),
        ratio("l3_miss_ratio", G::Cache, L3_MISSES, L3_REFERENCES),
        pki("itlb_mpki", G::Tlb, ITLB_MISSES),
        pki("dtlb_mpki", G::Tlb, DTLB_MISSES),
        pki("dtlb_store_mpki", G::Tlb, DTLB_STORE_MISSES),
        ratio("itlb_walk_cycle_ratio", G::Tlb, ITLB_WALK_CYCLES, CYCLES),
        ratio("dtlb_walk_cycle_ratio", G::Tlb, DTLB_WALK_CYCLES, CYCLES),
        ratio("branch_mispredict_ratio", G::Branch, BRANCH_MISSES, BRANCH_INSTRUCTIONS),
        pki("branch_mpki", G::Branch, BRANCH_MISSES),
        ratio("conditional_branch_share", G::Branch, CONDITIONAL_BRANCHES, BRANCH_INSTRUCTIONS),
        ratio("indirect_branch_share", G::Branch, INDIRECT_BRANCHES, BRANCH_INSTRUCTIONS),
        per_cycle("ipc", INSTRUCTIONS),
        per_cycle("uops_retired_per_cycle", UOPS_RETIRED),
        MetricDescriptor::new(
            "uops_issued_per_instruction",
            G::Pipeline,
            U::Count,
            Formula::ratio(UOPS_ISSUED, INSTRUCTIONS),
        ),
        ratio("frontend_stall_ratio", G::Pipeline, FRONTEND_STALL_CYCLES, CYCLES),
        ratio("backend_stall_ratio", G::Pipeline, BACKEND_STALL_CYCLES, CYCLES),
        ratio("resource_stall_ratio", G::Pipeline, RESOURCE_STALL_CYCLES, CYCLES),
        ratio("rob_full_ratio", G::Pipeline, ROB_FULL_CYCLES, CYCLES),
        ratio("rs_full_ratio", G::Pipeline, RS_FULL_CYCLES, CYCLES),
        ratio("load_buffer_full_ratio", G::Pipeline, LOAD_BUFFER_FULL_CYCLES, CYCLES),
        ratio("store_buffer_full_ratio", G::Pipeline, STORE_BUFFER_FULL_CYCLES, CYCLES),
        ratio("ifetch_stall_ratio", G::Pipeline, IFETCH_STALL_CYCLES, CYCLES),
        ratio("ild_stall_ratio", G::Pipeline, ILD_STALL_CYCLES, CYCLES),
        pki("offcore_data_rd_pki", G::OffcoreSnoop, OFFCORE_DATA_RD),
        pki("offcore_code_rd_pki", G::OffcoreSnoop, OFFCORE_CODE_RD),
        pki("offcore_rfo_pki", G::OffcoreSnoop, OFFCORE_RFO),
        pki("offcore_writeback_pki", G::OffcoreSnoop, OFFCORE_WRITEBACK),
        pki("snoop_hit_pki", G::OffcoreSnoop, SNOOP_HIT),
        pki("snoop_hite_pki", G::OffcoreSnoop, SNOOP_HITE),
        pki("snoop_hitm_pki", G::OffcoreSnoop, SNOOP_HITM),
        pki("snoop_miss_pki", G::OffcoreSnoop, SNOOP_MISS),
        MetricDescriptor::new(
            "uops_executed_per_active_cycle",
            G::Parallelism,
            U::Count,
            Formula::ratio(UOPS_EXECUTED, CYCLES_UOPS_EXECUTED),
        ),
        MetricDescriptor::new(
            "memory_level_parallelism",
            G::Parallelism,
            U::Count,
            Formula::ratio(L1D_PEND_MISS_OCCUPANCY, L1D_PEND_MISS_CYCLES),
        ),
        per_byte("operation_intensity", U::FlopsPerByte, FP_OPERATIONS),
        per_byte("integer_ops_per_byte", U::Count, INT_INSTRUCTIONS),
    ];

    MetricSchema::new(DEFAULT_SCHEMA_VERSION, metrics).expect("built-in schema is valid")
}
