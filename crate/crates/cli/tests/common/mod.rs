#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcr_core::model::{default_schema, events as ev};

/// Counter values for one synthetic workload that satisfy every range
/// constraint of the default schema.
pub fn synthetic_counters(rng: &mut ChaCha8Rng) -> Vec<(String, u64)> {
    let i: f64 = rng.gen_range(1.0e9..5.0e9);
    let ipc: f64 = rng.gen_range(0.5..2.0);
    let branch: f64 = i * rng.gen_range(0.15..0.22);
    let small = |rng: &mut ChaCha8Rng| i * rng.gen_range(0.001..0.1);
    let mut out: Vec<(String, u64)> = Vec::new();
    for name in default_schema().required_counters() {
        let v = match name {
            ev::INSTRUCTIONS => i,
            ev::CYCLES => i / ipc,
            ev::BRANCH_INSTRUCTIONS => branch,
            ev::INT_INSTRUCTIONS => i * rng.gen_range(0.25..0.32),
            ev::FP_INSTRUCTIONS => i * rng.gen_range(0.0..0.08),
            ev::LOAD_INSTRUCTIONS => i * rng.gen_range(0.18..0.26),
            ev::STORE_INSTRUCTIONS => i * rng.gen_range(0.06..0.10),
            ev::CONDITIONAL_BRANCHES => branch * rng.gen_range(0.6..0.9),
            ev::INDIRECT_BRANCHES => branch * rng.gen_range(0.01..0.1),
            _ => small(rng),
        };
        out.push((name.to_string(), v.round().max(1.0) as u64));
    }
    // mix shares stay below one in total so the remainder is non-negative
    // references must cover misses
    let get = |out: &[(String, u64)], n: &str| out.iter().find(|(k, _)| k == n).map(|(_, v)| *v).unwrap();
    let l2m = get(&out, ev::L2_MISSES);
    let l3m = get(&out, ev::L3_MISSES);
    for (k, v) in out.iter_mut() {
        if k == ev::L2_REFERENCES {
            *v = l2m * 3;
        } else if k == ev::L3_REFERENCES {
            *v = l3m * 2;
        }
    }
    out
}

pub fn counters_csv(workloads: &[&str], seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("workload,node,event,count,wall_time_s\n");
    for w in workloads {
        for (event, count) in synthetic_counters(&mut rng) {
            // split across two nodes to exercise aggregation
            let a = count / 2;
            writeln!(s, "{w},n1,{event},{a},120").unwrap();
            writeln!(s, "{w},n2,{event},{},118.5", count - a).unwrap();
        }
    }
    s
}

pub fn telemetry_csv(workloads: &[&str], seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("workload,t_s,cpu_util,io_wait,weighted_io_time_ms,disk_bw,net_bw\n");
    for w in workloads {
        let cpu: f64 = rng.gen_range(0.2..0.95);
        let iow: f64 = rng.gen_range(0.0..0.3);
        let mut wio = 0.0;
        for t in 0..=12 {
            wio += rng.gen_range(0.0..20_000.0);
            writeln!(s, "{w},{},{cpu:.3},{iow:.3},{wio:.1},1000000,2000000", t * 10).unwrap();
        }
    }
    s
}

pub fn behavior_csv(workloads: &[&str], seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cats = ["DataAnalysis", "Service", "InteractiveAnalysis"];
    let mut s = String::from(
        "workload,cpu_util,io_wait,weighted_io_ratio,input_bytes,output_bytes,intermediate_bytes,category\n",
    );
    for (n, w) in workloads.iter().enumerate() {
        writeln!(
            s,
            "{w},{:.2},{:.2},{:.1},1000000,{},{},{}",
            rng.gen_range(0.3..0.95),
            rng.gen_range(0.0..0.3),
            rng.gen_range(0.0..20.0),
            rng.gen_range(0..2_000_000u64),
            if n % 3 == 0 { 0 } else { rng.gen_range(0..2_000_000u64) },
            cats[n % 3]
        )
        .unwrap();
    }
    s
}

/// Text trace cycling over `lines` instruction lines `passes` times.
pub fn cyclic_text_trace(lines: u64, passes: usize) -> String {
    let mut s = String::new();
    for _ in 0..passes {
        for l in 0..lines {
            writeln!(s, "I {:#x}", 0x40_0000 + l * 64).unwrap();
        }
    }
    s
}

/// Recursively lists files under `root` as (relative path, bytes), sorted.
pub fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                let rel = p.strip_prefix(base).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}
