//! Reference miss counts from LRU stack distances, computed independently of
//! the simulator with a Fenwick tree over access positions.

use std::collections::HashMap;

use super::{Access, KindFilter};
use crate::error::{Error, Result};

struct Fenwick(Vec<i64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    fn add(&mut self, i: usize, delta: i64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `0..i`.
    fn prefix(&self, i: usize) -> i64 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// 1-based LRU stack depth of every filtered access within its set, `None` on
/// first touch. Output follows the order of the filtered accesses.
pub fn stack_distances(
    accesses: &[Access],
    line_bytes: u64,
    set_count: u64,
    filter: KindFilter,
) -> Result<Vec<Option<u64>>> {
    if line_bytes == 0 || !line_bytes.is_power_of_two() || set_count == 0 {
        return Err(Error::invalid("line size must be a power of two and set count positive"));
    }
    let shift = line_bytes.trailing_zeros();
    let lines: Vec<u64> = accesses
        .iter()
        .filter(|a| filter.accepts(a.kind))
        .map(|a| a.address >> shift)
        .collect();

    let mut per_set: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, &l) in lines.iter().enumerate() {
        per_set.entry(l % set_count).or_default().push(i);
    }

    let mut out = vec![None; lines.len()];
    for positions in per_set.values() {
        // a marker at t means the access at t is the latest touch of its line
        let mut tree = Fenwick::new(positions.len());
        let mut last: HashMap<u64, usize> = HashMap::new();
        for (t, &global) in positions.iter().enumerate() {
            let line = lines[global];
            if let Some(p) = last.insert(line, t) {
                let distinct_between = tree.prefix(t) - tree.prefix(p + 1);
                out[global] = Some(distinct_between as u64 + 1);
                tree.add(p, -1);
            }
            tree.add(t, 1);
        }
    }
    Ok(out)
}

/// Misses of a cold LRU cache with `capacity_lines` lines in `set_count` sets,
/// write-allocate. An access hits iff its stack depth is at most the number of
/// ways.
pub fn stack_distance_oracle(
    accesses: &[Access],
    line_bytes: u64,
    capacity_lines: u64,
    set_count: u64,
    filter: KindFilter,
) -> Result<u64> {
    if set_count == 0 || !capacity_lines.is_multiple_of(set_count) || capacity_lines == 0 {
        return Err(Error::invalid("capacity must be a positive multiple of the set count"));
    }
    let ways = capacity_lines / set_count;
    let distances = stack_distances(accesses, line_bytes, set_count, filter)?;
    Ok(distances
        .iter()
        .filter(|d| d.is_none_or(|d| d > ways))
        .count() as u64)
}
