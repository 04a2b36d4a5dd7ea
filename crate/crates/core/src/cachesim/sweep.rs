use serde::{Deserialize, Serialize};

use super::{simulate, AccessTrace, CacheConfig, CurvePoint, KindFilter, MissRatioCurve};
use crate::error::{Error, Result};

/// Miss ratio below which a capacity is deemed to hold the working set.
pub const DEFAULT_KNEE_RATIO: f64 = 0.01;

/// 16 KB to 8192 KB in powers of two.
pub fn default_sizes() -> Vec<u64> {
    (0..10).map(|i| (16u64 << i) * 1024).collect()
}

/// Parses `32K`, `4M`, `512KB`, `1MiB` or a plain byte count.
pub fn parse_size(text: &str) -> Result<u64> {
    let t = text.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (digits, suffix) = t.split_at(split);
    let base: u64 = digits
        .parse()
        .map_err(|_| Error::invalid(format!("bad size `{text}`")))?;
    let mult = match suffix.trim().to_ascii_uppercase().as_str() {
        "" | "B" => 1,
        "K" | "KB" | "KIB" => 1 << 10,
        "M" | "MB" | "MIB" => 1 << 20,
        "G" | "GB" | "GIB" => 1 << 30,
        _ => return Err(Error::invalid(format!("bad size suffix in `{text}`"))),
    };
    base.checked_mul(mult)
        .ok_or_else(|| Error::invalid(format!("size `{text}` overflows")))
}

/// Simulates every capacity in `sizes` (cold cache per segment) and combines
/// segment miss ratios by segment weight.
pub fn sweep_capacities(
    trace: &AccessTrace,
    sizes: &[u64],
    template: &CacheConfig,
    filter: KindFilter,
) -> Result<MissRatioCurve> {
    if sizes.is_empty() {
        return Err(Error::invalid("no capacities to sweep"));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut points = Vec::with_capacity(sorted.len());
    for &capacity in &sorted {
        let config = template.with_capacity(capacity);
        let mut ratio = 0.0;
        for seg in trace.segments() {
            ratio += seg.weight * simulate(&seg.accesses, &config, filter)?.miss_ratio;
        }
        log::debug!("capacity {capacity}: miss ratio {ratio}");
        points.push(CurvePoint {
            capacity_bytes: capacity,
            miss_ratio: ratio.clamp(0.0, 1.0),
        });
    }
    MissRatioCurve::new(filter.curve_kind(), points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Footprint {
    Capacity(u64),
    /// No swept capacity brought the miss ratio under the knee.
    NotReached,
}

/// Smallest capacity whose miss ratio is strictly below `knee`.
pub fn estimate_footprint(curve: &MissRatioCurve, knee: f64) -> Footprint {
    curve
        .points()
        .iter()
        .find(|p| p.miss_ratio < knee)
        .map_or(Footprint::NotReached, |p| Footprint::Capacity(p.capacity_bytes))
}
