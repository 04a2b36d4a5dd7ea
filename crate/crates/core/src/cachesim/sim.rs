use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Access, AccessKind, CacheConfig, KindFilter};
use crate::error::{Error, Result};

/// Sets with at most this many ways keep their lines in a recency-ordered
/// vector; wider sets use a stamp index.
const SMALL_SET_WAYS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub accesses: u64,
    pub misses: u64,
    pub miss_ratio: f64,
}

#[derive(Debug, Clone)]
enum Set {
    /// Most recently used first.
    Small(Vec<u64>),
    Wide {
        stamp_of: HashMap<u64, u64>,
        by_stamp: BTreeMap<u64, u64>,
    },
}

/// A set-associative LRU cache holding line tags.
#[derive(Debug, Clone)]
pub struct Cache {
    config: CacheConfig,
    line_shift: u32,
    set_count: u64,
    ways: usize,
    sets: Vec<Set>,
    clock: u64,
}

impl Cache {
    pub fn new(config: CacheConfig) -> Result<Self> {
        config.validate()?;
        let ways = config.ways();
        let set_count = config.set_count();
        let set = if ways <= SMALL_SET_WAYS {
            Set::Small(Vec::with_capacity(ways as usize))
        } else {
            Set::Wide {
                stamp_of: HashMap::new(),
                by_stamp: BTreeMap::new(),
            }
        };
        Ok(Self {
            config,
            line_shift: config.line_bytes.trailing_zeros(),
            set_count,
            ways: ways as usize,
            sets: vec![set; set_count as usize],
            clock: 0,
        })
    }

    pub fn config(&self) -> &CacheConfig {
        &self.config
    }

    /// Performs one access and returns true on a hit.
    pub fn access(&mut self, access: Access) -> bool {
        let line = access.address >> self.line_shift;
        let set_idx = (line % self.set_count) as usize;
        let allocate = self.config.write_allocate || access.kind != AccessKind::Store;
        self.clock += 1;
        let clock = self.clock;
        let ways = self.ways;
        match &mut self.sets[set_idx] {
            Set::Small(lines) => {
                if let Some(pos) = lines.iter().position(|&l| l == line) {
                    lines[..=pos].rotate_right(1);
                    true
                } else {
                    if allocate {
                        if lines.len() == ways {
                            lines.pop();
                        }
                        lines.insert(0, line);
                    }
                    false
                }
            }
            Set::Wide { stamp_of, by_stamp } => {
                if let Some(old) = stamp_of.insert(line, clock) {
                    by_stamp.remove(&old);
                    by_stamp.insert(clock, line);
                    true
                } else {
                    if allocate {
                        if by_stamp.len() == ways {
                            let (_, victim) = by_stamp.pop_first().expect("full set");
                            stamp_of.remove(&victim);
                        }
                        by_stamp.insert(clock, line);
                    } else {
                        stamp_of.remove(&line);
                    }
                    false
                }
            }
        }
    }
}

/// Runs the accesses admitted by `filter` through a cold cache.
pub fn simulate(accesses: &[Access], config: &CacheConfig, filter: KindFilter) -> Result<SimStats> {
    let mut cache = Cache::new(*config)?;
    let mut total = 0u64;
    let mut misses = 0u64;
    for &a in accesses.iter().filter(|a| filter.accepts(a.kind)) {
        total += 1;
        if !cache.access(a) {
            misses += 1;
        }
    }
    if total == 0 {
        return Err(Error::invalid("no accesses of the simulated kinds in segment"));
    }
    Ok(SimStats {
        accesses: total,
        misses,
        miss_ratio: misses as f64 / total as f64,
    })
}
