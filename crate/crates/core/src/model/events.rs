//! Canonical counter vocabulary and the alias table for vendor event names.

pub const INSTRUCTIONS: &str = "instructions_retired";
pub const CYCLES: &str = "cycles";

pub const BRANCH_INSTRUCTIONS: &str = "branch_instructions";
pub const INT_INSTRUCTIONS: &str = "int_instructions";
pub const FP_INSTRUCTIONS: &str = "fp_instructions";
pub const LOAD_INSTRUCTIONS: &str = "load_instructions";
pub const STORE_INSTRUCTIONS: &str = "store_instructions";

pub const L1I_MISSES: &str = "l1i_misses";
pub const L1D_MISSES: &str = "l1d_misses";
pub const L2_MISSES: &str = "l2_misses";
pub const L2_REFERENCES: &str = "l2_references";
pub const L3_MISSES: &str = "l3_misses";
pub const L3_REFERENCES: &str = "l3_references";

pub const ITLB_MISSES: &str = "itlb_misses";
pub const DTLB_MISSES: &str = "dtlb_misses";
pub const DTLB_STORE_MISSES: &str = "dtlb_store_misses";
pub const ITLB_WALK_CYCLES: &str = "itlb_walk_cycles";
pub const DTLB_WALK_CYCLES: &str = "dtlb_walk_cycles";

pub const BRANCH_MISSES: &str = "branch_misses";
pub const CONDITIONAL_BRANCHES: &str = "conditional_branches";
pub const INDIRECT_BRANCHES: &str = "indirect_branches";

pub const UOPS_RETIRED: &str = "uops_retired";
pub const UOPS_ISSUED: &str = "uops_issued";
pub const UOPS_EXECUTED: &str = "uops_executed";
pub const CYCLES_UOPS_EXECUTED: &str = "cycles_uops_executed";
pub const FRONTEND_STALL_CYCLES: &str = "frontend_stall_cycles";
pub const BACKEND_STALL_CYCLES: &str = "backend_stall_cycles";
pub const RESOURCE_STALL_CYCLES: &str = "resource_stall_cycles";
pub const ROB_FULL_CYCLES: &str = "rob_full_cycles";
pub const RS_FULL_CYCLES: &str = "rs_full_cycles";
pub const LOAD_BUFFER_FULL_CYCLES: &str = "load_buffer_full_cycles";
pub const STORE_BUFFER_FULL_CYCLES: &str = "store_buffer_full_cycles";
pub const IFETCH_STALL_CYCLES: &str = "ifetch_stall_cycles";
pub const ILD_STALL_CYCLES: &str = "ild_stall_cycles";

pub const OFFCORE_DATA_RD: &str = "offcore_data_rd";
pub const OFFCORE_CODE_RD: &str = "offcore_code_rd";
pub const OFFCORE_RFO: &str = "offcore_rfo";
pub const OFFCORE_WRITEBACK: &str = "offcore_writeback";
pub const OFFCORE_ALL_REQUESTS: &str = "offcore_all_requests";
pub const SNOOP_HIT: &str = "snoop_hit";
pub const SNOOP_HITE: &str = "snoop_hite";
pub const SNOOP_HITM: &str = "snoop_hitm";
pub const SNOOP_MISS: &str = "snoop_miss";

pub const L1D_PEND_MISS_OCCUPANCY: &str = "l1d_pend_miss_occupancy";
pub const L1D_PEND_MISS_CYCLES: &str = "l1d_pend_miss_cycles";
pub const FP_OPERATIONS: &str = "fp_operations";

/// Vendor and `perf` spellings, lower-cased, mapped onto canonical names.
const ALIASES: &[(&str, &str)] = &[
    ("instructions", INSTRUCTIONS),
    ("inst_retired.any", INSTRUCTIONS),
    ("cpu-cycles", CYCLES),
    ("cpu_clk_unhalted.thread", CYCLES),
    ("cpu_clk_unhalted.core", CYCLES),
    ("branches", BRANCH_INSTRUCTIONS),
    ("branch-instructions", BRANCH_INSTRUCTIONS),
    ("br_inst_retired.all_branches", BRANCH_INSTRUCTIONS),
    ("br_inst_retired.conditional", CONDITIONAL_BRANCHES),
    ("br_inst_exec.indirect_non_call", INDIRECT_BRANCHES),
    ("branch-misses", BRANCH_MISSES),
    ("br_misp_retired.all_branches", BRANCH_MISSES),
    ("mem_inst_retired.loads", LOAD_INSTRUCTIONS),
    ("mem_inst_retired.stores", STORE_INSTRUCTIONS),
    ("fp_comp_ops_exe.x87", FP_INSTRUCTIONS),
    ("l1-icache-load-misses", L1I_MISSES),
    ("l1i.misses", L1I_MISSES),
    ("l1-dcache-load-misses", L1D_MISSES),
    ("l1d.repl", L1D_MISSES),
    ("l2_rqsts.miss", L2_MISSES),
    ("l2_rqsts.references", L2_REFERENCES),
    ("llc-load-misses", L3_MISSES),
    ("longest_lat_cache.miss", L3_MISSES),
    ("llc-loads", L3_REFERENCES),
    ("longest_lat_cache.reference", L3_REFERENCES),
    ("itlb-load-misses", ITLB_MISSES),
    ("itlb_misses.any", ITLB_MISSES),
    ("itlb_misses.walk_cycles", ITLB_WALK_CYCLES),
    ("dtlb-load-misses", DTLB_MISSES),
    ("dtlb_misses.any", DTLB_MISSES),
    ("dtlb_misses.walk_cycles", DTLB_WALK_CYCLES),
    ("dtlb-store-misses", DTLB_STORE_MISSES),
    ("dtlb_store_misses.any", DTLB_STORE_MISSES),
    ("uops_retired.any", UOPS_RETIRED),
    ("uops_issued.any", UOPS_ISSUED),
    ("uops_executed.thread", UOPS_EXECUTED),
    ("uops_executed.core_active_cycles", CYCLES_UOPS_EXECUTED),
    ("stalled-cycles-frontend", FRONTEND_STALL_CYCLES),
    ("stalled-cycles-backend", BACKEND_STALL_CYCLES),
    ("resource_stalls.any", RESOURCE_STALL_CYCLES),
    ("resource_stalls.rob_full", ROB_FULL_CYCLES),
    ("resource_stalls.rs_full", RS_FULL_CYCLES),
    ("resource_stalls.load", LOAD_BUFFER_FULL_CYCLES),
    ("resource_stalls.store", STORE_BUFFER_FULL_CYCLES),
    ("ifu_ivc.full", IFETCH_STALL_CYCLES),
    ("ild_stall.any", ILD_STALL_CYCLES),
    ("offcore_requests.demand_read_data", OFFCORE_DATA_RD),
    ("offcore_requests.demand_read_code", OFFCORE_CODE_RD),
    ("offcore_requests.demand_rfo", OFFCORE_RFO),
    ("offcore_requests.l1d_writeback", OFFCORE_WRITEBACK),
    ("offcore_requests.any", OFFCORE_ALL_REQUESTS),
    ("snoop_response.hit", SNOOP_HIT),
    ("snoop_response.hite", SNOOP_HITE),
    ("snoop_response.hitm", SNOOP_HITM),
    ("l1d_pend_miss.pending", L1D_PEND_MISS_OCCUPANCY),
    ("l1d_pend_miss.pending_cycles", L1D_PEND_MISS_CYCLES),
];

/// Maps an event name onto the canonical vocabulary.
///
/// Lookup is case-insensitive and drops `perf` privilege modifiers (`:u`,
/// `:k`). Names with no alias keep their spelling.
pub fn canonical_event(name: &str) -> String {
    let trimmed = name.trim();
    let base = trimmed
        .split_once(':')
        .map(|(head, _)| head)
        .unwrap_or(trimmed);
    let lower = base.to_ascii_lowercase();
    ALIASES
        .iter()
        .find(|(alias, _)| *alias == lower)
        .map(|(_, canonical)| (*canonical).to_string())
        .unwrap_or_else(|| base.to_string())
}
