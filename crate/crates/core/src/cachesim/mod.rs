//! Trace-driven set-associative LRU cache simulation, miss-ratio curves and
//! footprint estimation.

mod oracle;
mod sim;
mod sweep;
pub mod trace_io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracle::{stack_distance_oracle, stack_distances};
pub use sim::{simulate, Cache, SimStats};
pub use sweep::{
    default_sizes, estimate_footprint, parse_size, sweep_capacities, Footprint,
    DEFAULT_KNEE_RATIO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessKind {
    IFetch,
    Load,
    Store,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Access {
    pub address: u64,
    pub kind: AccessKind,
}

impl Access {
    pub fn new(address: u64, kind: AccessKind) -> Self {
        Self { address, kind }
    }
}

/// Access kinds routed to the simulated cache; other kinds bypass it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KindFilter {
    pub ifetch: bool,
    pub load: bool,
    pub store: bool,
}

impl KindFilter {
    pub const INSTRUCTION: KindFilter = KindFilter {
        ifetch: true,
        load: false,
        store: false,
    };
    pub const DATA: KindFilter = KindFilter {
        ifetch: false,
        load: true,
        store: true,
    };
    pub const UNIFIED: KindFilter = KindFilter {
        ifetch: true,
        load: true,
        store: true,
    };

    pub fn accepts(&self, kind: AccessKind) -> bool {
        match kind {
            AccessKind::IFetch => self.ifetch,
            AccessKind::Load => self.load,
            AccessKind::Store => self.store,
        }
    }

    pub fn curve_kind(&self) -> CurveKind {
        match (self.ifetch, self.load || self.store) {
            (true, false) => CurveKind::Instruction,
            (false, true) => CurveKind::Data,
            _ => CurveKind::Unified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Associativity {
    Ways(u32),
    FullyAssociative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Replacement {
    Lru,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheConfig {
    pub capacity_bytes: u64,
    pub line_bytes: u64,
    pub associativity: Associativity,
    pub replacement: Replacement,
    /// Whether a store miss installs the line.
    pub write_allocate: bool,
}

impl Default for CacheConfig {
    /// 32 KB, 64-byte lines, 8-way, LRU, write-allocate.
    fn default() -> Self {
        Self {
            capacity_bytes: 32 * 1024,
            line_bytes: 64,
            associativity: Associativity::Ways(8),
            replacement: Replacement::Lru,
            write_allocate: true,
        }
    }
}

impl CacheConfig {
    pub fn with_capacity(&self, capacity_bytes: u64) -> Self {
        Self {
            capacity_bytes,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.line_bytes == 0 || !self.line_bytes.is_power_of_two() {
            return Err(Error::invalid(format!(
                "line size must be a positive power of two, got {}",
                self.line_bytes
            )));
        }
        if self.capacity_bytes == 0 || !self.capacity_bytes.is_multiple_of(self.line_bytes) {
            return Err(Error::invalid(format!(
                "capacity {} is not a positive multiple of the {}-byte line",
                self.capacity_bytes, self.line_bytes
            )));
        }
        if let Associativity::Ways(w) = self.associativity {
            if w == 0 || !self.capacity_bytes.is_multiple_of(self.line_bytes * w as u64) {
                return Err(Error::invalid(format!(
                    "capacity {} does not divide into {}-way sets of {}-byte lines",
                    self.capacity_bytes, w, self.line_bytes
                )));
            }
        }
        Ok(())
    }

    pub fn lines(&self) -> u64 {
        self.capacity_bytes / self.line_bytes
    }

    pub fn ways(&self) -> u64 {
        match self.associativity {
            Associativity::Ways(w) => w as u64,
            Associativity::FullyAssociative => self.lines(),
        }
    }

    pub fn set_count(&self) -> u64 {
        self.lines() / self.ways()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub weight: f64,
    pub accesses: Vec<Access>,
}

/// A trace split into weighted segments; weights sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessTrace {
    segments: Vec<Segment>,
}

impl AccessTrace {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("trace has no segments"));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.weight > 0.0) || !s.weight.is_finite() {
                return Err(Error::invalid(format!("segment {i} has non-positive weight {}", s.weight)));
            }
            if s.accesses.is_empty() {
                return Err(Error::invalid(format!("segment {i} is empty")));
            }
        }
        let total: f64 = segments.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("segment weights sum to {total}, not 1")));
        }
        Ok(Self { segments })
    }

    /// Rescales positive weights so they sum to 1.
    pub fn normalized(mut segments: Vec<Segment>) -> Result<Self> {
        let total: f64 = segments.iter().map(|s| s.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid("segment weights must be positive"));
        }
        for s in &mut segments {
            s.weight /= total;
        }
        Self::new(segments)
    }

    pub fn single(accesses: Vec<Access>) -> Result<Self> {
        Self::new(vec![Segment {
            weight: 1.0,
            accesses,
        }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_accesses(&self) -> usize {
        self.segments.iter().map(|s| s.accesses.len()).sum()
    }

    /// Drops the first `n` accesses of the concatenated trace. Segments left
    /// empty are removed and the remaining weights renormalized.
    pub fn skip(&self, n: usize) -> Result<Self> {
        let mut remaining = n;
        let mut out = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            if remaining >= s.accesses.len() {
                remaining -= s.accesses.len();
                continue;
            }
            out.push(Segment {
                weight: s.weight,
                accesses: s.accesses[remaining..].to_vec(),
            });
            remaining = 0;
        }
        if out.is_empty() {
            return Err(Error::invalid(format!("skipping {n} accesses leaves an empty trace")));
        }
        Self::normalized(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    Instruction,
    Data,
    Unified,
}

impl CurveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveKind::Instruction => "instruction",
            CurveKind::Data => "data",
            CurveKind::Unified => "unified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub capacity_bytes: u64,
    pub miss_ratio: f64,
}

/// Miss ratio as a function of capacity; capacities strictly increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct MissRatioCurve {
    kind: CurveKind,
    points: Vec<CurvePoint>,
}

#[derive(Deserialize)]
struct RawCurve {
    kind: CurveKind,
    points: Vec<CurvePoint>,
}

impl TryFrom<RawCurve> for MissRatioCurve {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        MissRatioCurve::new(raw.kind, raw.points)
    }
}

impl MissRatioCurve {
    pub fn new(kind: CurveKind, points: Vec<CurvePoint>) -> Result<Self> {
        if points
            .windows(2)
            .any(|w| w[1].capacity_bytes <= w[0].capacity_bytes)
        {
            return Err(Error::invalid("curve capacities must strictly increase"));
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.miss_ratio)) {
            return Err(Error::invalid(format!(
                "miss ratio {} at {} bytes lies outside [0, 1]",
                p.miss_ratio, p.capacity_bytes
            )));
        }
        Ok(Self { kind, points })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }
}
