//! Aggregation of characterized workloads into group summaries, data-movement
//! shares and cross-stack comparisons.

mod emit;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::IntegerBreakdown;
use crate::model::{BehaviorLabels, Category, SystemBehavior};

pub use emit::{emit, fmt4, round4, ReportArtifacts, WorkloadCurve};

/// One characterized workload as seen by the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadRecord {
    pub workload_id: String,
    #[serde(default)]
    pub stack: Option<String>,
    #[serde(default)]
    pub suite: Option<String>,
    #[serde(default)]
    pub algorithm: Option<String>,
    #[serde(default)]
    pub labels: Option<BehaviorLabels>,
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    /// Needed only for the data-movement share.
    #[serde(default)]
    pub integer_breakdown: Option<IntegerBreakdown>,
}

impl WorkloadRecord {
    pub fn new(workload_id: impl Into<String>) -> Self {
        Self {
            workload_id: workload_id.into(),
            stack: None,
            suite: None,
            algorithm: None,
            labels: None,
            metrics: BTreeMap::new(),
            integer_breakdown: None,
        }
    }

    /// Instruction mix read from the default-schema mix metrics, if present.
    pub fn instruction_mix(&self) -> Option<InstructionMix> {
        let g = |m: &str| self.metrics.get(m).copied();
        Some(InstructionMix {
            load: g("load_ratio")?,
            store: g("store_ratio")?,
            integer: g("integer_ratio")?,
            branch: g("branch_ratio")?,
            fp: g("fp_ratio").unwrap_or(0.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grouping {
    ApplicationCategory,
    SystemBehavior,
    Suite,
    Stack,
}

impl Grouping {
    pub const ALL: [Grouping; 4] = [
        Grouping::ApplicationCategory,
        Grouping::SystemBehavior,
        Grouping::Suite,
        Grouping::Stack,
    ];

    pub fn file_stem(&self) -> &'static str {
        match self {
            Grouping::ApplicationCategory => "application_category",
            Grouping::SystemBehavior => "system_behavior",
            Grouping::Suite => "suite",
            Grouping::Stack => "stack",
        }
    }

    fn key(&self, r: &WorkloadRecord) -> Result<String> {
        let missing = |what: &str| {
            Error::invalid(format!("workload `{}` has no {what}", r.workload_id))
        };
        match self {
            Grouping::ApplicationCategory => r
                .labels
                .map(|l| l.category.to_string())
                .ok_or_else(|| missing("labels")),
            Grouping::SystemBehavior => r
                .labels
                .map(|l| l.system.to_string())
                .ok_or_else(|| missing("labels")),
            Grouping::Suite => r.suite.clone().ok_or_else(|| missing("suite")),
            Grouping::Stack => r.stack.clone().ok_or_else(|| missing("stack")),
        }
    }

    /// Groups that exist a priori, so empty ones can be reported as omitted.
    fn known_groups(&self) -> Vec<String> {
        match self {
            Grouping::ApplicationCategory => Category::ALL.iter().map(|c| c.to_string()).collect(),
            Grouping::SystemBehavior => SystemBehavior::ALL.iter().map(|s| s.to_string()).collect(),
            Grouping::Suite | Grouping::Stack => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: String,
    pub count: usize,
    pub means: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub grouping: Grouping,
    pub metrics: Vec<String>,
    /// Sorted by group name.
    pub rows: Vec<GroupRow>,
    /// Known groups without members.
    pub omitted: Vec<String>,
}

/// Arithmetic mean that does not depend on the order of `values`.
fn stable_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unweighted per-group mean of each metric.
pub fn group_summary(
    records: &[WorkloadRecord],
    grouping: Grouping,
    metrics: &[String],
) -> Result<GroupSummary> {
    let mut groups: BTreeMap<String, Vec<&WorkloadRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(grouping.key(r)?).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for (group, members) in &groups {
        let mut means = BTreeMap::new();
        for m in metrics {
            let mut values = members
                .iter()
                .map(|r| {
                    r.metrics
                        .get(m)
                        .copied()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            Error::invalid(format!(
                                "workload `{}` lacks a finite value for `{m}`",
                                r.workload_id
                            ))
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            means.insert(m.clone(), stable_mean(&mut values));
        }
        rows.push(GroupRow {
            group: group.clone(),
            count: members.len(),
            means,
        });
    }
    let omitted: Vec<String> = grouping
        .known_groups()
        .into_iter()
        .filter(|g| !groups.contains_key(g))
        .collect();
    if !omitted.is_empty() {
        log::info!("{:?}: no members in {}", grouping, omitted.join(", "));
    }
    Ok(GroupSummary {
        grouping,
        metrics: metrics.to_vec(),
        rows,
        omitted,
    })
}

/// Instruction-mix fractions used by the data-movement computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstructionMix {
    pub load: f64,
    pub store: f64,
    pub integer: f64,
    pub branch: f64,
    #[serde(default)]
    pub fp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataMovementShare {
    pub without_branch: f64,
    pub with_branch: f64,
}

/// Share of instructions moving data or computing addresses:
/// `load + store + integer * (int_addr + fp_addr)`, then plus `branch`.
pub fn data_movement_share(mix: &InstructionMix, breakdown: &IntegerBreakdown) -> Result<DataMovementShare> {
    let fractions = [mix.load, mix.store, mix.integer, mix.branch, mix.fp];
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::invalid("instruction-mix fractions must lie in [0, 1]"));
    }
    if fractions.iter().sum::<f64>() > 1.0 + 1e-9 {
        return Err(Error::invalid("instruction-mix fractions sum above 1"));
    }
    let addr = breakdown.int_addr + breakdown.fp_addr;
    if !(0.0..=1.0 + 1e-9).contains(&addr) {
        return Err(Error::invalid("address-calculation shares must lie in [0, 1]"));
    }
    let without_branch = (mix.load + mix.store + mix.integer * addr).min(1.0);
    let with_branch = (without_branch + mix.branch).min(1.0);
    Ok(DataMovementShare {
        without_branch,
        with_branch,
    })
}

/// Ratio at or above which a cross-stack gap counts as an order of magnitude.
pub const ORDER_OF_MAGNITUDE: f64 = 10.0;
/// Gaps within a tenth of a decade of an order of magnitude (`10^0.9`, about
/// 7.94) are flagged as near one.
pub const NEAR_ORDER_OF_MAGNITUDE: f64 = 7.943_282_347_242_815;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GapFlag {
    None,
    NearOrderOfMagnitude,
    OrderOfMagnitude,
}

impl GapFlag {
    pub fn from_ratio(ratio: f64) -> Self {
        if ratio >= ORDER_OF_MAGNITUDE {
            GapFlag::OrderOfMagnitude
        } else if ratio >= NEAR_ORDER_OF_MAGNITUDE {
            GapFlag::NearOrderOfMagnitude
        } else {
            GapFlag::None
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GapFlag::None => "",
            GapFlag::NearOrderOfMagnitude => "near_order_of_magnitude",
            GapFlag::OrderOfMagnitude => "order_of_magnitude",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackImpactRow {
    pub algorithm: String,
    pub metric: String,
    /// Stack → value (mean if a stack has several records of the algorithm).
    pub values: BTreeMap<String, f64>,
    /// `max / min`; `None` when the minimum is zero and the maximum is not.
    pub max_min_ratio: Option<f64>,
    pub flag: GapFlag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackImpactTable {
    pub metrics: Vec<String>,
    pub stacks: Vec<String>,
    /// Sorted by (algorithm, metric order).
    pub rows: Vec<StackImpactRow>,
    /// Metric → stack → mean over every record on that stack.
    pub stack_means: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Compares each algorithm across the stacks implementing it. Algorithms
/// found on a single stack produce no rows.
pub fn stack_impact_table(records: &[WorkloadRecord], metrics: &[String]) -> Result<StackImpactTable> {
    let value = |r: &WorkloadRecord, m: &str| -> Result<f64> {
        r.metrics
            .get(m)
            .copied()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "workload `{}` lacks a finite non-negative `{m}`",
                    r.workload_id
                ))
            })
    };

    let on_stack: Vec<&WorkloadRecord> = records.iter().filter(|r| r.stack.is_some()).collect();
    let mut stacks: Vec<String> = on_stack.iter().filter_map(|r| r.stack.clone()).collect();
    stacks.sort();
    stacks.dedup();

    let mut stack_means = BTreeMap::new();
    for m in metrics {
        let mut per_stack: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in &on_stack {
            per_stack
                .entry(r.stack.clone().expect("filtered"))
                .or_default()
                .push(value(r, m)?);
        }
        let means = per_stack
            .into_iter()
            .map(|(s, mut v)| (s, stable_mean(&mut v)))
            .collect();
        stack_means.insert(m.clone(), means);
    }

    let mut by_algorithm: BTreeMap<&str, BTreeMap<&str, Vec<&WorkloadRecord>>> = BTreeMap::new();
    for r in &on_stack {
        if let (Some(a), Some(s)) = (&r.algorithm, &r.stack) {
            by_algorithm.entry(a).or_default().entry(s).or_default().push(r);
        }
    }
    let mut rows = Vec::new();
    for (algorithm, per_stack) in &by_algorithm {
        if per_stack.len() < 2 {
            log::debug!("algorithm `{algorithm}` runs on one stack; skipped");
            continue;
        }
        for m in metrics {
            let mut values = BTreeMap::new();
            for (stack, rs) in per_stack {
                let mut v = rs.iter().map(|r| value(r, m)).collect::<Result<Vec<_>>>()?;
                values.insert(stack.to_string(), stable_mean(&mut v));
            }
            let max = values.values().copied().fold(f64::MIN, f64::max);
            let min = values.values().copied().fold(f64::MAX, f64::min);
            let (max_min_ratio, flag) = if min > 0.0 {
                let r = max / min;
                (Some(r), GapFlag::from_ratio(r))
            } else if max == 0.0 {
                (Some(1.0), GapFlag::None)
            } else {
                (None, GapFlag::OrderOfMagnitude)
            };
            rows.push(StackImpactRow {
                algorithm: algorithm.to_string(),
                metric: m.clone(),
                values,
                max_min_ratio,
                flag,
            });
        }
    }
    Ok(StackImpactTable {
        metrics: metrics.to_vec(),
        stacks,
        rows,
        stack_means,
    })
}
