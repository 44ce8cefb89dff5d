//! The `revigis` command line.
//!
//! Exit codes: 0 when the analysis found nothing to fix, 2 when it found
//! problems (and handled or reported them), 1 on any error.

mod report;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use report::{InputDigest, RunReport};

use crate::fitness::{rank_products, ProblemOntology, ProductOntology, UnknownPolicy};
use crate::flood::{FloodScene, RevisionStrategy};
use crate::format::to_canonical_json;
use crate::fusion::{
    classify_differences, compute_intersections, fuse, union_overlay, FeatureFile, FeatureKind, OverlayScene,
    TrustOrder,
};
use crate::translation::{
    contextual_compare, numeric_difference, ontological_compare, shipped_relation, shipped_taxonomy, LabelGrid, Lut,
    NumericGrid, Taxonomy, TranslationRelation,
};
use report::read_input;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FINDINGS: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "revigis", version, about = "Constraint reasoning for geographic information quality")]
pub struct Cli {
    /// Add wall-clock timing to the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReviseArg {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChangeMode {
    /// Cellwise |b - a| on numeric grids.
    Numeric,
    /// Look-up table distance between labels of one taxonomy.
    Lut,
    /// Comparison through the common ontology of two taxonomies.
    Onto,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate water-height intervals, revising inconsistent observations.
    Flood {
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        revise: ReviseArg,
        /// Also report the flow-blind neighbour-mean estimate for these parcels.
        #[arg(long = "baseline", value_name = "PARCEL")]
        baseline: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Overlay roads and streams and enforce the bridge rule.
    Fuse {
        #[arg(long)]
        roads: PathBuf,
        #[arg(long)]
        streams: PathBuf,
        #[arg(long)]
        bridges: PathBuf,
        /// Layers from most to least trusted.
        #[arg(long, default_value = "roads,streams,bridges")]
        trust: String,
        /// Point identity tolerance in metres.
        #[arg(long, default_value_t = crate::fusion::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Another version of the streams, to categorise against the streams file.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Matching tolerance in metres for `--compare`.
        #[arg(long, default_value_t = 10.0)]
        match_tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Detect change between two grids.
    Change {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum)]
        mode: ChangeMode,
        #[arg(long)]
        lut: Option<PathBuf>,
        /// Translation table; the shipped LCMGB90 to LCM2000 table by default.
        #[arg(long)]
        relation: Option<PathBuf>,
        /// Taxonomy files; by default the shipped taxonomy named by each grid.
        #[arg(long)]
        source_taxonomy: Option<PathBuf>,
        #[arg(long)]
        target_taxonomy: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Judge products against a problem ontology.
    Fitness {
        #[arg(long = "product", required = true)]
        products: Vec<PathBuf>,
        #[arg(long)]
        problem: PathBuf,
        /// Unknown requirements make a product unfit (default).
        #[arg(long, conflicts_with = "lenient")]
        strict: bool,
        /// Unknown requirements are tolerated.
        #[arg(long)]
        lenient: bool,
        /// Taxonomy whose class codes may appear as statement subjects.
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let started = Instant::now();
    let (mut report, code, out, figure) = match cli.command {
        Command::Flood { scene, revise, baseline, out, svg } => {
            let (r, c, fig) = cmd_flood(&scene, revise, &baseline, svg.is_some())?;
            (r, c, out, svg.zip(fig))
        }
        Command::Fuse { roads, streams, bridges, trust, tolerance, compare, match_tolerance, out, svg } => {
            let (r, c, fig) = cmd_fuse(&roads, &streams, &bridges, &trust, tolerance, compare.as_deref(), match_tolerance)?;
            (r, c, out, svg.zip(Some(fig)))
        }
        Command::Change { first, second, mode, lut, relation, source_taxonomy, target_taxonomy, out, svg } => {
            let opts = ChangeOptions { lut, relation, source_taxonomy, target_taxonomy };
            let (r, c, fig) = cmd_change(&first, &second, mode, &opts)?;
            (r, c, out, svg.zip(Some(fig)))
        }
        Command::Fitness { products, problem, strict: _, lenient, taxonomy, out } => {
            let policy = if lenient { UnknownPolicy::Lenient } else { UnknownPolicy::Strict };
            let (r, c) = cmd_fitness(&products, &problem, policy, taxonomy.as_deref())?;
            (r, c, out, None)
        }
    };
    if cli.timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    if let Some((path, text)) = figure {
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&to_canonical_json(&report), out.as_deref())?;
    Ok(code)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialise")
}

#[derive(Serialize)]
struct ParcelOut<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    observed: Option<crate::flood::HeightInterval>,
    interval: crate::flood::HeightInterval,
}

fn cmd_flood(
    path: &Path,
    revise: ReviseArg,
    baseline: &[String],
    want_svg: bool,
) -> anyhow::Result<(RunReport, i32, Option<String>)> {
    let mut report = RunReport::new("flood");
    let scene = FloodScene::from_json(&read_input(path, &mut report.inputs)?)?;
    let check = scene.check_consistency();
    let strategy = match revise {
        ReviseArg::Exact => RevisionStrategy::Exact,
        ReviseArg::Greedy => RevisionStrategy::Greedy,
    };
    let (result, revision, code) = if check.is_consistent() {
        let filled = scene.extrapolate().map_err(|e| anyhow::anyhow!("{e}"))?;
        (filled, serde_json::Value::Null, EXIT_OK)
    } else {
        let r = scene.revise(strategy);
        let rev = json!({ "strategy": to_value(&strategy), "retracted": r.retracted, "minimal": r.minimal });
        (r.revised_scene, rev, EXIT_FINDINGS)
    };
    let mut estimates = serde_json::Map::new();
    for id in baseline {
        match scene.baseline_interpolate(id) {
            Ok(iv) => {
                estimates.insert(id.clone(), to_value(&iv));
            }
            Err(e) => report.warnings.push(format!("baseline for `{id}`: {e}")),
        }
    }
    let parcels: Vec<ParcelOut> = result
        .parcels()
        .iter()
        .map(|p| ParcelOut { id: &p.id, observed: p.observed, interval: p.current })
        .collect();
    report.results = json!({
        "consistent": check.is_consistent(),
        "conflicts": to_value(&check.conflicts),
        "revision": revision,
        "parcels": to_value(&parcels),
        "baseline": estimates,
    });
    let fig = want_svg.then(|| svg::flood(&result));
    Ok((report, code, fig))
}

fn cmd_fuse(
    roads: &Path,
    streams: &Path,
    bridges: &Path,
    trust: &str,
    tolerance: f64,
    compare: Option<&Path>,
    match_tolerance: f64,
) -> anyhow::Result<(RunReport, i32, String)> {
    let mut report = RunReport::new("fuse");
    let trust: TrustOrder = trust.parse()?;
    let mut load = |p: &Path| -> anyhow::Result<FeatureFile> {
        Ok(FeatureFile::from_json(&read_input(p, &mut report.inputs)?).with_context(|| p.display().to_string())?)
    };
    let (road_file, stream_file, bridge_file) = (load(roads)?, load(streams)?, load(bridges)?);
    let other = compare.map(&mut load).transpose()?;
    for (file, expected, name) in [(&road_file, FeatureKind::Road, "roads"), (&stream_file, FeatureKind::Stream, "streams")] {
        if let Some(f) = file.features.iter().find(|f| f.kind != expected) {
            report.warnings.push(format!("{name} file holds {:?} `{}`", f.kind, f.id));
        }
    }
    let union = union_overlay(&road_file.features, &stream_file.features);
    let mut all_bridges = Vec::new();
    for b in road_file.bridges.iter().chain(&stream_file.bridges).chain(&bridge_file.bridges) {
        if !all_bridges.contains(b) {
            all_bridges.push(b.clone());
        }
    }
    let scene = OverlayScene::new(union.scene.roads, union.scene.streams, all_bridges, tolerance)?;
    let crossings = compute_intersections(&scene);
    let fused = fuse(&scene, &trust);
    let differences = other.map(|o| {
        let layer: Vec<_> = road_file.features.clone();
        classify_differences(&stream_file.features, &o.features, match_tolerance, &layer)
    });
    let code = if fused.initial.is_empty() { EXIT_OK } else { EXIT_FINDINGS };
    let fused_file = FeatureFile {
        format: None,
        features: fused.scene.features().cloned().collect(),
        bridges: fused.scene.bridges.clone(),
    };
    report.results = json!({
        "trust": trust.to_string(),
        "tolerance": tolerance,
        "renamed": to_value(&union.renamed),
        "intersections": to_value(&crossings.points),
        "overlaps": to_value(&crossings.overlaps),
        "violations": to_value(&fused.initial),
        "log": to_value(&fused.log),
        "unresolved": to_value(&fused.unresolved),
        "fused": to_value(&fused_file),
        "differences": to_value(&differences),
    });
    Ok((report, code, svg::overlay(&fused.scene)))
}

struct ChangeOptions {
    lut: Option<PathBuf>,
    relation: Option<PathBuf>,
    source_taxonomy: Option<PathBuf>,
    target_taxonomy: Option<PathBuf>,
}

fn taxonomy(path: Option<&Path>, name: &str, inputs: &mut Vec<InputDigest>) -> anyhow::Result<Taxonomy> {
    Ok(match path {
        Some(p) => Taxonomy::from_json(&read_input(p, inputs)?)?,
        None => shipped_taxonomy(name)?,
    })
}

fn cmd_change(
    first: &Path,
    second: &Path,
    mode: ChangeMode,
    opts: &ChangeOptions,
) -> anyhow::Result<(RunReport, i32, String)> {
    if opts.lut.is_some() != (mode == ChangeMode::Lut) {
        bail!("--lut is required by, and only accepted with, --mode lut");
    }
    if mode != ChangeMode::Onto
        && (opts.relation.is_some() || opts.source_taxonomy.is_some() || opts.target_taxonomy.is_some())
    {
        bail!("--relation and taxonomy files are only accepted with --mode onto");
    }
    let mut report = RunReport::new("change");
    let (results, fig) = match mode {
        ChangeMode::Numeric => {
            let a = NumericGrid::from_json(&read_input(first, &mut report.inputs)?)?;
            let b = NumericGrid::from_json(&read_input(second, &mut report.inputs)?)?;
            let d = numeric_difference(&a, &b)?;
            (json!({ "mode": "numeric", "width": d.width, "height": d.height, "cells": d.cells }), svg::numeric(&d))
        }
        ChangeMode::Lut => {
            let a = LabelGrid::from_json(&read_input(first, &mut report.inputs)?)?;
            let b = LabelGrid::from_json(&read_input(second, &mut report.inputs)?)?;
            let lut_path = opts.lut.as_deref().expect("checked above");
            let lut = Lut::from_json(&read_input(lut_path, &mut report.inputs)?)?;
            let d = contextual_compare(&a, &b, &lut)?;
            (json!({ "mode": "lut", "width": d.width, "height": d.height, "cells": d.cells }), svg::numeric(&d))
        }
        ChangeMode::Onto => {
            let a = LabelGrid::from_json(&read_input(first, &mut report.inputs)?)?;
            let b = LabelGrid::from_json(&read_input(second, &mut report.inputs)?)?;
            let r = match &opts.relation {
                Some(p) => TranslationRelation::from_json(&read_input(p, &mut report.inputs)?)?,
                None => shipped_relation()?,
            };
            let t1 = taxonomy(opts.source_taxonomy.as_deref(), &a.taxonomy, &mut report.inputs)?;
            let t2 = taxonomy(opts.target_taxonomy.as_deref(), &b.taxonomy, &mut report.inputs)?;
            let map = ontological_compare(&a, &b, &t1, &t2, &r)?;
            let mut v = to_value(&map);
            v.as_object_mut().expect("object").insert("mode".into(), json!("onto"));
            (v, svg::change_map(&map))
        }
    };
    report.results = results;
    Ok((report, EXIT_OK, fig))
}

fn cmd_fitness(
    products: &[PathBuf],
    problem: &Path,
    policy: UnknownPolicy,
    taxonomy: Option<&Path>,
) -> anyhow::Result<(RunReport, i32)> {
    let mut report = RunReport::new("fitness");
    let problem = ProblemOntology::from_json(&read_input(problem, &mut report.inputs)?)?;
    let taxonomy = taxonomy.map(|p| read_input(p, &mut report.inputs)).transpose()?;
    let taxonomy = taxonomy.map(|t| Taxonomy::from_json(&t)).transpose()?;
    let mut list = Vec::new();
    for p in products {
        let product = ProductOntology::from_json(&read_input(p, &mut report.inputs)?)
            .with_context(|| p.display().to_string())?;
        product.validate_subjects(taxonomy.as_ref())?;
        list.push(product);
    }
    let ranked = rank_products(&list, &problem, policy)?;
    let any_fit = ranked.iter().any(|r| r.report.fit);
    report.results = json!({ "policy": to_value(&policy), "ranking": to_value(&ranked) });
    Ok((report, if any_fit { EXIT_OK } else { EXIT_FINDINGS }))
}
