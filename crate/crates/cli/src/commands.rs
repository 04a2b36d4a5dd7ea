use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use wcr_core::cachesim::trace_io::{
    build_trace, parse_text_trace, read_binary_trace, read_curve_csv, write_curve_csv, SegmentSidecar,
};
use wcr_core::cachesim::{
    estimate_footprint, sweep_capacities, Associativity, CacheConfig, CurveKind, Footprint, KindFilter,
    MissRatioCurve,
};
use wcr_core::classify::{label_rows, parse_behavior_csv, write_labels_csv, LabeledWorkload};
use wcr_core::ingest::{
    aggregate_telemetry, derive_microarch_metrics, parse_counter_csv, parse_telemetry_csv, trim_ramp_up,
};
use wcr_core::model::{default_schema, MetricSchema, MetricVector, RawProfile, SystemBehaviorMetrics};
use wcr_core::reduction::{reduce_pipeline, reduce_vectors, ReductionConfig, ReductionResult};
use wcr_core::report::{
    data_movement_share, emit, group_summary, stack_impact_table, Grouping, ReportArtifacts, WorkloadCurve,
    WorkloadRecord,
};

use crate::config::RunConfig;
use crate::manifest::Manifest;
use crate::{CliError, Command, KindArg, TraceFormat};

pub fn dispatch(command: &Command, config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut manifest = Manifest::new(command.name(), config);
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let outputs = match command {
        Command::Ingest { counters, telemetry } => {
            ingest(counters, telemetry.as_deref(), config, out, &mut manifest)?
        }
        Command::Reduce { input } => reduce(input, config, out, &mut manifest)?,
        Command::Classify { input } => classify(input, out, &mut manifest)?,
        Command::Simulate {
            trace,
            segments,
            format,
            kind,
            line,
            ways,
            no_write_allocate,
            skip,
            workload,
        } => {
            let cache = cache_config(config, *line, ways.as_deref(), *no_write_allocate)?;
            let opts = SimulateOpts {
                segments: segments.as_deref(),
                format: *format,
                filter: filter_of(*kind),
                cache,
                skip: *skip,
                workload: workload.as_deref(),
            };
            simulate(trace, &opts, config, out, &mut manifest)?
        }
        Command::Footprint { curve, kind } => footprint(curve, *kind, config, out, &mut manifest)?,
        Command::Report {
            records,
            metrics,
            labels,
            meta,
            curve,
            metric,
        } => {
            let inputs = ReportInputs {
                records: records.as_deref(),
                metrics: metrics.as_deref(),
                labels: labels.as_deref(),
                meta: meta.as_deref(),
                curves: curve,
                metric_names: metric,
            };
            report(&inputs, config, out, &mut manifest)?
        }
    };
    manifest.write(out, &outputs)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn open(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| CliError::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_file(out: &Path, name: &str, contents: &[u8], outputs: &mut Vec<String>) -> Result<(), CliError> {
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    outputs.push(name.to_string());
    Ok(())
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T, outputs: &mut Vec<String>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    write_file(out, name, text.as_bytes(), outputs)
}

fn load_schema(config: &RunConfig, manifest: &mut Manifest) -> Result<MetricSchema, CliError> {
    match &config.schema_path {
        Some(p) => {
            manifest.add_input(p)?;
            Ok(MetricSchema::from_json(&read_text(p)?)?)
        }
        None => Ok(default_schema()),
    }
}

fn ingest(
    counters: &Path,
    telemetry: Option<&Path>,
    config: &RunConfig,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<Vec<String>, CliError> {
    let schema = load_schema(config, manifest)?;
    manifest.add_input(counters)?;
    let profiles = parse_counter_csv(open(counters)?)?;
    log::info!("read {} profiles", profiles.len());
    let vectors = profiles
        .iter()
        .map(|p| derive_microarch_metrics(p, &schema))
        .collect::<Result<Vec<_>, _>>()?;

    let mut outputs = Vec::new();
    write_json(out, "profiles.json", &profiles, &mut outputs)?;
    write_json(out, "metrics.json", &vectors, &mut outputs)?;

    if let Some(t) = telemetry {
        manifest.add_input(t)?;
        let wall: BTreeMap<&str, f64> = profiles
            .iter()
            .map(|p| (p.workload_id.as_str(), p.wall_time_s))
            .collect();
        let mut system: BTreeMap<String, SystemBehaviorMetrics> = BTreeMap::new();
        for series in parse_telemetry_csv(open(t)?)? {
            let steady = trim_ramp_up(&series, config.warmup_s)
                .map_err(|e| CliError::Data(format!("workload `{}`: {e}", series.workload_id())))?;
            let s = steady.samples();
            let span = s[s.len() - 1].t_s - s[0].t_s;
            let runtime = if span > 0.0 {
                span
            } else {
                wall.get(series.workload_id()).copied().unwrap_or(0.0)
            };
            let m = aggregate_telemetry(&steady, runtime)
                .map_err(|e| CliError::Data(format!("workload `{}`: {e}", series.workload_id())))?;
            system.insert(series.workload_id().to_string(), m);
        }
        write_json(out, "system_metrics.json", &system, &mut outputs)?;
    }
    Ok(outputs)
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum ReduceInput {
    Profiles(Vec<RawProfile>),
    Vectors(Vec<MetricVector>),
}

fn reduce(input: &Path, config: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Vec<String>, CliError> {
    let schema = load_schema(config, manifest)?;
    manifest.add_input(input)?;
    let rc = ReductionConfig {
        variance_target: config.variance_target,
        k: config.k_selection()?,
        seed: config.seed,
        restarts: config.restarts,
        ..ReductionConfig::default()
    };
    let result: ReductionResult = match read_json::<ReduceInput>(input)? {
        ReduceInput::Profiles(p) => reduce_pipeline(&p, &schema, &rc)?,
        ReduceInput::Vectors(v) => reduce_vectors(&v, &schema, &rc)?,
    };
    log::info!(
        "{} workloads reduced to {} representatives",
        result.assignments.len(),
        result.representatives.len()
    );

    let mut outputs = Vec::new();
    write_json(out, "reduction.json", &result, &mut outputs)?;

    let mut reps = String::from("cluster,representative,size\n");
    for (c, rep) in result.representatives.iter().enumerate() {
        reps.push_str(&format!("{c},{rep},{}\n", result.cluster_sizes[c]));
    }
    write_file(out, "representatives.csv", reps.as_bytes(), &mut outputs)?;

    let mut assign = String::from("workload,cluster\n");
    for (id, c) in &result.assignments {
        assign.push_str(&format!("{id},{c}\n"));
    }
    write_file(out, "assignments.csv", assign.as_bytes(), &mut outputs)?;
    write_file(out, "normalized.csv", result.normalized.to_csv().as_bytes(), &mut outputs)?;
    Ok(outputs)
}

fn classify(input: &Path, out: &Path, manifest: &mut Manifest) -> Result<Vec<String>, CliError> {
    manifest.add_input(input)?;
    let rows = parse_behavior_csv(open(input)?)?;
    let labeled = label_rows(&rows)?;
    let mut outputs = Vec::new();
    let mut csv = Vec::new();
    write_labels_csv(&mut csv, &labeled)?;
    write_file(out, "labels.csv", &csv, &mut outputs)?;
    write_json(out, "labels.json", &labeled, &mut outputs)?;
    Ok(outputs)
}

fn filter_of(kind: KindArg) -> KindFilter {
    match kind {
        KindArg::Instruction => KindFilter::INSTRUCTION,
        KindArg::Data => KindFilter::DATA,
        KindArg::Unified => KindFilter::UNIFIED,
    }
}

fn curve_kind_of(kind: KindArg) -> CurveKind {
    filter_of(kind).curve_kind()
}

fn cache_config(
    config: &RunConfig,
    line: Option<u64>,
    ways: Option<&str>,
    no_write_allocate: bool,
) -> Result<CacheConfig, CliError> {
    let ways = match ways {
        None => config.ways,
        Some(w) if w.eq_ignore_ascii_case("full") => None,
        Some(w) => Some(
            w.parse()
                .map_err(|_| CliError::Usage(format!("--ways expects an integer or `full`, got `{w}`")))?,
        ),
    };
    Ok(CacheConfig {
        line_bytes: line.unwrap_or(config.line_bytes),
        associativity: ways.map_or(Associativity::FullyAssociative, Associativity::Ways),
        write_allocate: config.write_allocate && !no_write_allocate,
        ..CacheConfig::default()
    })
}

struct SimulateOpts<'a> {
    segments: Option<&'a Path>,
    format: Option<TraceFormat>,
    filter: KindFilter,
    cache: CacheConfig,
    skip: usize,
    workload: Option<&'a str>,
}

fn simulate(
    trace_path: &Path,
    opts: &SimulateOpts<'_>,
    config: &RunConfig,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<Vec<String>, CliError> {
    manifest.add_input(trace_path)?;
    let format = opts.format.unwrap_or_else(|| {
        if trace_path.extension().is_some_and(|e| e == "bin") {
            TraceFormat::Binary
        } else {
            TraceFormat::Text
        }
    });
    let accesses = match format {
        TraceFormat::Binary => {
            read_binary_trace(&fs::read(trace_path).map_err(|e| CliError::io(trace_path, e))?)?
        }
        TraceFormat::Text => parse_text_trace(open(trace_path)?)?,
    };
    let sidecar: Option<SegmentSidecar> = match opts.segments {
        Some(p) => {
            manifest.add_input(p)?;
            Some(read_json(p)?)
        }
        None => None,
    };
    let mut trace = build_trace(accesses, sidecar.as_ref())?;
    if opts.skip > 0 {
        trace = trace.skip(opts.skip)?;
    }
    let sizes = config.size_bytes()?;
    let curve = sweep_capacities(&trace, &sizes, &opts.cache, opts.filter)?;

    let workload = match opts.workload {
        Some(w) => w.to_string(),
        None => trace_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trace".into()),
    };
    let stem = format!("{workload}_{}", curve.kind().as_str());
    let mut outputs = Vec::new();
    let mut csv = Vec::new();
    write_curve_csv(&mut csv, &curve)?;
    write_file(out, &format!("{stem}.csv"), &csv, &mut outputs)?;
    let wc = WorkloadCurve {
        workload,
        curve,
        footprint: None,
    };
    write_json(out, &format!("{stem}.json"), &wc, &mut outputs)?;
    Ok(outputs)
}

#[derive(Serialize)]
struct FootprintOutput {
    workload: Option<String>,
    kind: CurveKind,
    knee_ratio: f64,
    footprint: Footprint,
}

fn load_curve(path: &Path, kind: KindArg) -> Result<WorkloadCurve, CliError> {
    if path.extension().is_some_and(|e| e == "json") {
        read_json(path)
    } else {
        let curve: MissRatioCurve = read_curve_csv(open(path)?, curve_kind_of(kind))?;
        let workload = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(WorkloadCurve {
            workload,
            curve,
            footprint: None,
        })
    }
}

fn footprint(
    curve_path: &Path,
    kind: KindArg,
    config: &RunConfig,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<Vec<String>, CliError> {
    manifest.add_input(curve_path)?;
    let wc = load_curve(curve_path, kind)?;
    let fp = estimate_footprint(&wc.curve, config.knee_ratio);
    if fp == Footprint::NotReached {
        log::warn!("no swept capacity falls below the knee {}", config.knee_ratio);
    }
    let mut outputs = Vec::new();
    let result = FootprintOutput {
        workload: Some(wc.workload),
        kind: wc.curve.kind(),
        knee_ratio: config.knee_ratio,
        footprint: fp,
    };
    write_json(out, "footprint.json", &result, &mut outputs)?;
    Ok(outputs)
}

struct ReportInputs<'a> {
    records: Option<&'a Path>,
    metrics: Option<&'a Path>,
    labels: Option<&'a Path>,
    meta: Option<&'a Path>,
    curves: &'a [std::path::PathBuf],
    metric_names: &'a [String],
}

fn report(
    inputs: &ReportInputs<'_>,
    config: &RunConfig,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<Vec<String>, CliError> {
    let mut records: BTreeMap<String, WorkloadRecord> = BTreeMap::new();
    if let Some(p) = inputs.records {
        manifest.add_input(p)?;
        for r in read_json::<Vec<WorkloadRecord>>(p)? {
            if records.insert(r.workload_id.clone(), r).is_some() {
                return Err(CliError::Data(format!("{}: duplicate workload", p.display())));
            }
        }
    }
    if let Some(p) = inputs.metrics {
        let schema = load_schema(config, manifest)?;
        manifest.add_input(p)?;
        for v in read_json::<Vec<MetricVector>>(p)? {
            v.check_against(&schema)?;
            let r = records
                .entry(v.workload_id().to_string())
                .or_insert_with(|| WorkloadRecord::new(v.workload_id()));
            for (name, value) in schema.names().zip(v.values()) {
                r.metrics.insert(name.to_string(), *value);
            }
        }
    }
    if let Some(p) = inputs.labels {
        manifest.add_input(p)?;
        for l in read_json::<Vec<LabeledWorkload>>(p)? {
            records
                .entry(l.workload.clone())
                .or_insert_with(|| WorkloadRecord::new(&l.workload))
                .labels = Some(l.labels);
        }
    }
    if let Some(p) = inputs.meta {
        manifest.add_input(p)?;
        apply_meta(p, &mut records)?;
    }
    let records: Vec<WorkloadRecord> = records.into_values().collect();

    let metric_names: Vec<String> = if inputs.metric_names.is_empty() {
        common_metrics(&records)
    } else {
        inputs.metric_names.to_vec()
    };

    let mut artifacts = ReportArtifacts::default();
    if !records.is_empty() {
        for g in Grouping::ALL {
            let keyed = records.iter().filter(|r| has_key(r, g)).count();
            if keyed == records.len() {
                artifacts.summaries.push(group_summary(&records, g, &metric_names)?);
            } else if keyed > 0 {
                log::warn!("{g:?} summary skipped: {} of {} workloads lack the key", records.len() - keyed, records.len());
            }
        }
    }
    if records.iter().any(|r| r.stack.is_some() && r.algorithm.is_some()) {
        artifacts.stack_impact = Some(stack_impact_table(&records, &metric_names)?);
    }
    for r in &records {
        if let (Some(mix), Some(b)) = (r.instruction_mix(), r.integer_breakdown) {
            let share = data_movement_share(&mix, &b)
                .map_err(|e| CliError::Data(format!("workload `{}`: {e}", r.workload_id)))?;
            artifacts.data_movement.insert(r.workload_id.clone(), share);
        }
    }
    for p in inputs.curves {
        manifest.add_input(p)?;
        let mut wc: WorkloadCurve = read_json(p)?;
        wc.footprint.get_or_insert_with(|| estimate_footprint(&wc.curve, config.knee_ratio));
        artifacts.curves.push(wc);
    }
    artifacts
        .curves
        .sort_by(|a, b| (&a.workload, a.curve.kind().as_str()).cmp(&(&b.workload, b.curve.kind().as_str())));

    Ok(emit(&artifacts, out)?)
}

fn has_key(r: &WorkloadRecord, g: Grouping) -> bool {
    match g {
        Grouping::ApplicationCategory | Grouping::SystemBehavior => r.labels.is_some(),
        Grouping::Suite => r.suite.is_some(),
        Grouping::Stack => r.stack.is_some(),
    }
}

fn common_metrics(records: &[WorkloadRecord]) -> Vec<String> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    first
        .metrics
        .keys()
        .filter(|m| records.iter().all(|r| r.metrics.contains_key(*m)))
        .cloned()
        .collect()
}

fn apply_meta(path: &Path, records: &mut BTreeMap<String, WorkloadRecord>) -> Result<(), CliError> {
    const HEADER: [&str; 4] = ["workload", "stack", "suite", "algorithm"];
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let data_err = |m: String| CliError::Data(format!("{}: {m}", path.display()));
    let header = reader.headers().map_err(|e| data_err(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(data_err(format!("expected header `{}`", HEADER.join(","))));
    }
    for rec in reader.records() {
        let rec = rec.map_err(|e| data_err(e.to_string()))?;
        let opt = |i: usize| Some(rec[i].to_string()).filter(|s| !s.is_empty());
        let r = records
            .entry(rec[0].to_string())
            .or_insert_with(|| WorkloadRecord::new(&rec[0]));
        r.stack = opt(1).or(r.stack.take());
        r.suite = opt(2).or(r.suite.take());
        r.algorithm = opt(3).or(r.algorithm.take());
    }
    Ok(())
}
