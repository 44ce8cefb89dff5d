//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use revigis::fitness::{conflate, ProblemOntology, ProductOntology, UnknownPolicy, Verdict};
use revigis::flood::{FloodScene, HeightInterval, RevisionStrategy};
use revigis::format::to_canonical_json;
use revigis::fusion::{
    check_bridge_bijection, classify_differences, fuse, BridgePoint, DifferenceCategory, FeatureFile, FeatureKind,
    LineFeature, OverlayScene, Point, QualityParameter as Q, TrustOrder,
};
use revigis::translation::{
    compose_relations, ontological_compare, shipped_relation, shipped_taxonomy, LabelGrid, Lut, NumericGrid,
    Taxonomy, TranslationRelation,
};
use revigis::GradeLattice;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

fn flood_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let (mut trees, mut consistent) = (0, 0);
    for k in 0..200 {
        let n = rng.gen_range(1..=6);
        let tree = k % 2 == 0;
        let spec = random_scene(&mut rng, n, (0, 50), 0.6, tree);
        let scene = spec.build();
        let oracle = brute_force_values(&spec);
        match (scene.propagate(), oracle) {
            (Err(_), None) => {}
            (Ok(_), None) => return Err(format!("scene {k}: propagated but has no solution")),
            (Err(e), Some(_)) => return Err(format!("scene {k}: {e} but a solution exists")),
            (Ok(out), Some(values)) => {
                consistent += 1;
                for (i, vals) in values.iter().enumerate() {
                    let iv = out.parcels()[i].current;
                    if !vals.iter().all(|&v| iv.contains(v)) {
                        return Err(format!("scene {k}: {iv} misses an attained value of parcel {i}"));
                    }
                    if spec.is_forest() {
                        let exact = HeightInterval::bounded(vals[0], *vals.last().unwrap()).unwrap();
                        let contiguous = vals.len() as i64 == vals.last().unwrap() - vals[0] + 1;
                        if iv != exact || !contiguous {
                            return Err(format!("scene {k}: tree parcel {i} is {iv}, attained {vals:?}"));
                        }
                    }
                }
                trees += spec.is_forest() as usize;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("200 scenes, {consistent} consistent ({trees} tree-shaped, exact)"))
}

fn revision_minimality() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2);
    let mut done = 0;
    let mut tried = 0;
    while done < 100 {
        tried += 1;
        let n = rng.gen_range(2..=12);
        let spec = random_scene(&mut rng, n, (0, 100), 1.0, false);
        if naive_consistent(&spec, &[]) {
            continue;
        }
        let scene = spec.build();
        let exact = scene.revise(RevisionStrategy::Exact);
        let (size, lexmin) = brute_force_min_retraction(&spec);
        ensure(exact.retracted.len() == size, || {
            format!("scene {tried}: retracted {:?}, minimum is {size}", exact.retracted)
        })?;
        ensure(exact.retracted == lexmin, || format!("scene {tried}: {:?} vs {lexmin:?}", exact.retracted))?;
        ensure(exact.revised_scene.check_consistency().is_consistent(), || format!("scene {tried}: still inconsistent"))?;
        done += 1;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("100 inconsistent scenes ({tried} drawn), sizes match the subset oracle"))
}

fn fixpoint_bytes(scene: &FloodScene, order: Vec<usize>) -> String {
    match scene.propagate_ordered(order) {
        Ok(s) => serde_json::to_string(&s.parcels().iter().map(|p| p.current).collect::<Vec<_>>()).unwrap(),
        Err(e) => serde_json::to_string(&e).unwrap(),
    }
}

fn confluence() -> Outcome {
    let mut rng = rng(3);
    for k in 0..20 {
        let n = rng.gen_range(2..=20);
        let spec = random_scene(&mut rng, n, (0, 100), 0.5, k % 3 == 0);
        let scene = spec.build();
        let mut order: Vec<usize> = (0..scene.flows().len()).collect();
        let reference = fixpoint_bytes(&scene, order.clone());
        for _ in 0..100 {
            order.shuffle(&mut rng);
            let got = fixpoint_bytes(&scene, order.clone());
            ensure(got == reference, || format!("scene {k}: order {order:?} gives a different fixpoint"))?;
        }
    }
    Ok("20 scenes x 100 orderings, identical fixpoints".into())
}

fn baseline_contrast() -> Outcome {
    let scene = FloodScene::from_json(&std::fs::read_to_string(example("flood_baseline.json")).unwrap())
        .map_err(|e| e.to_string())?;
    let upstream = scene.interval("U").unwrap();
    let baseline = scene.baseline_interpolate("T").map_err(|e| e.to_string())?;
    ensure(baseline.lo > upstream.hi, || format!("baseline {baseline} does not rise above upstream {upstream}"))?;
    let extrapolated = scene.extrapolate().map_err(|e| e.to_string())?.interval("T").unwrap();
    ensure(extrapolated.hi <= upstream.hi, || format!("extrapolated {extrapolated} above upstream"))?;

    let two = FloodScene::new(
        HeightInterval::bounded(0, 100).unwrap(),
        [
            ("X", None),
            ("N1", Some(HeightInterval::bounded(10, 30).unwrap())),
            ("N2", Some(HeightInterval::bounded(20, 50).unwrap())),
        ],
        Vec::new(),
        vec![("X".into(), "N1".into()), ("X".into(), "N2".into())],
    )
    .unwrap();
    let got = two.baseline_interpolate("X").map_err(|e| e.to_string())?;
    ensure(got == HeightInterval::bounded(15, 40).unwrap(), || format!("mean of [10,30] and [20,50] gave {got}"))?;
    Ok(format!("baseline {baseline} over upstream {upstream}, extrapolation {extrapolated}; mean = {got}"))
}

fn line(id: &str, kind: FeatureKind, pts: &[(f64, f64)]) -> LineFeature {
    LineFeature::new(id, kind, pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

fn params(ps: &[Q]) -> BTreeSet<Q> {
    ps.iter().copied().collect()
}

fn figure_scenarios() -> Outcome {
    let meander = line("s1", FeatureKind::Stream, &[(0., -10.), (20., 5.), (40., -5.), (60., 10.)]);

    let moved = classify_differences(&[meander.clone()], &[meander.translated(3.0, 0.0)], 10.0, &[]);
    ensure(moved.len() == 1 && moved[0].category == DifferenceCategory::Displacement, || format!("displacement: {moved:?}"))?;
    ensure(moved[0].implicated == params(&[Q::GeometricAccuracy]), || "displacement parameters".into())?;
    ensure((moved[0].magnitude.unwrap_or(0.0) - 3.0).abs() <= 0.01, || "displacement magnitude".into())?;

    let road = [line("r1", FeatureKind::Road, &[(0., 0.), (10., 0.)])];
    let twice = line("s1", FeatureKind::Stream, &[(4., -1.), (5., 1.), (6., -1.)]);
    let once = line("s1", FeatureKind::Stream, &[(4., -1.), (5., 1.), (5.2, 1.5)]);
    let merged = classify_differences(&[twice], &[once], 3.0, &road);
    ensure(merged.len() == 1 && merged[0].category == DifferenceCategory::ComplexMerge, || format!("merge: {merged:?}"))?;
    ensure(
        merged[0].implicated == params(&[Q::ThematicAccuracy, Q::LogicalConsistency, Q::GeometricAccuracy]),
        || format!("merge parameters {:?}", merged[0].implicated),
    )?;

    let a = [line("s1", FeatureKind::Stream, &[(0., 0.), (10., 0.)]), line("s2", FeatureKind::Stream, &[(0., 40.), (10., 40.)])];
    let b = [a[0].clone()];
    let card = classify_differences(&a, &b, 1.0, &[]);
    ensure(card.len() == 1 && card[0].category == DifferenceCategory::Cardinality, || format!("cardinality: {card:?}"))?;
    ensure(card[0].counts == Some([2, 1]), || "cardinality counts".into())?;
    ensure(card[0].implicated == params(&[Q::Completeness]), || "cardinality parameters".into())?;

    // Bridge layer form of the merge: two crossings, one bridge between them.
    let scene = OverlayScene::new(
        vec![line("r1", FeatureKind::Road, &[(0., 0.), (10., 0.)])],
        vec![line("s1", FeatureKind::Stream, &[(3.5, -1.), (4.5, 1.), (5., 1.), (6., -1.)])],
        vec![BridgePoint::new("b1", Point::new(4.75, 0.0))],
        1.0,
    )
    .unwrap();
    let rule = check_bridge_bijection(&scene);
    ensure(rule.len() == 1 && rule[0].counts == Some([1, 2]), || format!("bridge rule: {rule:?}"))?;
    Ok("displacement, complex merge and cardinality reproduced".into())
}

fn fusion_closure() -> Outcome {
    let mut rng = rng(6);
    let trust: TrustOrder = "roads,streams,bridges".parse().unwrap();
    let mut repaired = 0;
    for k in 0..100 {
        let scene = random_overlay(&mut rng, 30.0);
        let out = fuse(&scene, &trust);
        let residual = check_bridge_bijection(&out.scene);
        ensure(residual.is_empty() && out.unresolved.is_empty(), || format!("scene {k}: {residual:?}"))?;
        ensure(out.initial.is_empty() == out.log.is_empty(), || format!("scene {k}: log does not match violations"))?;
        repaired += !out.initial.is_empty() as usize;
    }
    // Bridges most trusted: a bridge over nothing cannot be repaired by
    // retracting roads or streams.
    let stubborn = OverlayScene::new(
        vec![line("r1", FeatureKind::Road, &[(0., 0.), (10., 0.)])],
        Vec::new(),
        vec![BridgePoint::new("b1", Point::new(5.0, 20.0))],
        1.0,
    )
    .unwrap();
    let out = fuse(&stubborn, &"bridges,roads,streams".parse().unwrap());
    ensure(!out.unresolved.is_empty(), || "irreparable scene reported as consistent".into())?;
    ensure(out.unresolved == check_bridge_bijection(&out.scene), || "unresolved list differs from the residual".into())?;
    Ok(format!("100 repairable scenes closed ({repaired} needed repair); irreparable case reported"))
}

fn taxonomy_counts() -> Outcome {
    let gb = shipped_taxonomy("LCMGB90").map_err(|e| e.to_string())?;
    let lcm = shipped_taxonomy("LCM2000").map_err(|e| e.to_string())?;
    let got = (gb.count_at("target"), lcm.count_at("target"), lcm.count_at("subclass"));
    ensure(got == (25, 16, 26), || format!("counts {got:?}"))?;
    Ok("LCMGB90 25 targets; LCM2000 16 targets, 26 subclasses".into())
}

fn metadata_reproduction() -> Outcome {
    let gb = shipped_taxonomy("LCMGB90").unwrap();
    let lcm = shipped_taxonomy("LCM2000").unwrap();
    let r = shipped_relation().unwrap();
    let a = LabelGrid::new(3, 1, "LCMGB90", vec!["16".into(), "24".into(), "16".into()]).unwrap();
    let b = LabelGrid::new(3, 1, "LCM2000", vec!["C".into(), "B".into(), "B".into()]).unwrap();
    let map = ontological_compare(&a, &b, &gb, &lcm, &r).map_err(|e| e.to_string())?;
    let cell = |i: usize| (map.cells[i].changed, map.cells[i].confidence.name().to_string(), map.cells[i].is_conflict());
    let want = [
        (false, "very_reliable".to_string(), false),
        (false, "tentative".to_string(), false),
        (true, "tentative".to_string(), false),
    ];
    for (i, w) in want.iter().enumerate() {
        ensure(&cell(i) == w, || format!("cell {i}: {:?}, expected {w:?}", cell(i)))?;
    }
    Ok("16/C unchanged at very_reliable, 24/B unchanged at tentative, 16/B changed at tentative".into())
}

fn codes(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn relation_algebra() -> Outcome {
    let mut rng = rng(9);
    let (a, b, c) = (codes("a", 3), codes("b", 3), codes("c", 3));
    for k in 0..100 {
        let r1 = random_relation(&mut rng, "a", "b", 3, 3);
        let r2 = random_relation(&mut rng, "b", "c", 3, 3);
        let got = compose_relations(&r1, &r2).map_err(|e| e.to_string())?;
        let got: Vec<(String, String, usize)> =
            got.graded_pairs().into_iter().map(|((x, z), g)| (x, z, g.rank())).collect();
        let want = brute_force_compose(&r1, &r2, &a, &b, &c);
        ensure(got == want, || format!("relation {k}: {got:?} vs {want:?}"))?;
    }
    for k in 0..50 {
        let r1 = random_relation(&mut rng, "a", "b", 3, 3);
        let r2 = random_relation(&mut rng, "b", "c", 3, 3);
        let r3 = random_relation(&mut rng, "c", "d", 3, 3);
        let left = compose_relations(&compose_relations(&r1, &r2).unwrap(), &r3).unwrap();
        let right = compose_relations(&r1, &compose_relations(&r2, &r3).unwrap()).unwrap();
        ensure(left == right, || format!("triple {k} is not associative"))?;
    }
    Ok("100 compositions match brute force; 50 triples associative".into())
}

const SUBJECTS: [&str; 3] = ["bridge", "road", "stream"];

fn random_ontologies(rng: &mut impl Rng) -> (ProductOntology, ProblemOntology) {
    let l = GradeLattice::default_chain();
    let names = l.names().to_vec();
    let mut product = ProductOntology::new("p", l.clone());
    let mut problem = ProblemOntology::new("q", l);
    for s in SUBJECTS {
        for q in Q::ALL {
            if rng.gen_bool(0.7) {
                product.state(s, q, names.choose(rng).unwrap()).unwrap();
            }
            if rng.gen_bool(0.5) {
                problem.require(s, q, names.choose(rng).unwrap(), names.choose(rng).unwrap()).unwrap();
            }
        }
    }
    (product, problem)
}

fn fitness_verdicts() -> Outcome {
    let load = |n: &str| std::fs::read_to_string(example(n)).unwrap();
    let product = ProductOntology::from_json(&load("product_bridges.json")).map_err(|e| e.to_string())?;
    let nav = ProblemOntology::from_json(&load("problem_navigation.json")).map_err(|e| e.to_string())?;
    let damage = ProblemOntology::from_json(&load("problem_damage.json")).map_err(|e| e.to_string())?;
    let strict = UnknownPolicy::Strict;
    ensure(conflate(&product, &nav, strict).unwrap().fit, || "navigation should be fit".into())?;
    ensure(!conflate(&product, &damage, strict).unwrap().fit, || "damage assessment should be unfit".into())?;

    let mut rng = rng(10);
    let l = GradeLattice::default_chain();
    for k in 0..200 {
        let (product, problem) = random_ontologies(&mut rng);
        for policy in [UnknownPolicy::Strict, UnknownPolicy::Lenient] {
            let before = conflate(&product, &problem, policy).unwrap();
            let pruned = conflate(&product, &problem.without_irrelevant(), policy).unwrap();
            ensure(before == pruned, || format!("case {k}: irrelevant requirements changed the report"))?;

            let Some(st) = product.statements().choose(&mut rng).cloned() else { continue };
            let raised = l.elements().filter(|g| l.leq(&st.grade, g).unwrap()).collect::<Vec<_>>();
            let mut better = product.clone();
            better.restate(&st.subject, st.parameter, raised.choose(&mut rng).unwrap().clone());
            let after = conflate(&better, &problem, policy).unwrap();
            for (x, y) in before.comparisons.iter().zip(&after.comparisons) {
                ensure(!(x.verdict == Verdict::Fit && y.verdict == Verdict::Unfit), || {
                    format!("case {k}: raising {} {} flipped a requirement to unfit", st.subject, st.parameter)
                })?;
            }
            ensure(!before.fit || after.fit, || format!("case {k}: raising a grade lost fitness"))?;
        }
    }
    Ok("navigation fit, damage unfit; 200 perturbations monotone and irrelevance-safe".into())
}

fn round_trip(name: &str, text: &str) -> Result<String, String> {
    let e = |x: &dyn std::fmt::Display| format!("{name}: {x}");
    Ok(if name.starts_with("flood_") {
        to_canonical_json(&FloodScene::from_json(text).map_err(|x| e(&x))?.to_file())
    } else if name.starts_with("roads_") || name.starts_with("streams_") || name.starts_with("bridges_") {
        to_canonical_json(&FeatureFile::from_json(text).map_err(|x| e(&x))?)
    } else if name.starts_with("grid_") {
        LabelGrid::from_json(text).map_err(|x| e(&x))?.to_json()
    } else if name.starts_with("heights_") {
        NumericGrid::from_json(text).map_err(|x| e(&x))?.to_json()
    } else if name.starts_with("lut_") {
        Lut::from_json(text).map_err(|x| e(&x))?.to_json()
    } else if name.starts_with("product_") {
        ProductOntology::from_json(text).map_err(|x| e(&x))?.to_json()
    } else if name.starts_with("problem_") {
        ProblemOntology::from_json(text).map_err(|x| e(&x))?.to_json()
    } else if name.contains('-') {
        TranslationRelation::from_json(text).map_err(|x| e(&x))?.to_json()
    } else {
        Taxonomy::from_json(text).map_err(|x| e(&x))?.to_json()
    })
}

fn cli_contract() -> Outcome {
    let dir = examples_dir();
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.extend(std::fs::read_dir(dir.parent().unwrap()).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_file()));
    files.sort();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(path).unwrap();
        if name == "roads_malformed.json" {
            ensure(FeatureFile::from_json(&text).is_err(), || "malformed polyline accepted".into())?;
            continue;
        }
        let out = round_trip(&name, &text)?;
        ensure(out == text, || format!("{name} does not round-trip byte-identically"))?;
    }

    let ex = example;
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["flood".into(), ex("flood_chain.json")], 0),
        (vec!["flood".into(), ex("flood_conflict.json")], 2),
        (vec!["flood".into(), ex("no_such_scene.json")], 1),
        (vec!["fuse".into(), "--roads".into(), ex("roads_cross.json"), "--streams".into(), ex("streams_cross.json"), "--bridges".into(), ex("bridges_cross.json")], 0),
        (vec!["fuse".into(), "--roads".into(), ex("roads_cross.json"), "--streams".into(), ex("streams_cross.json"), "--bridges".into(), ex("bridges_none.json")], 2),
        (vec!["fuse".into(), "--roads".into(), ex("roads_malformed.json"), "--streams".into(), ex("streams_cross.json"), "--bridges".into(), ex("bridges_none.json")], 1),
        (vec!["change".into(), ex("grid_1990_coniferous.json"), ex("grid_2000_coniferous.json"), "--mode".into(), "onto".into()], 0),
        (vec!["change".into(), ex("heights_a.json"), ex("heights_b.json"), "--mode".into(), "numeric".into()], 0),
        (vec!["change".into(), ex("grid_farm_a.json"), ex("grid_farm_b.json"), "--mode".into(), "lut".into(), "--lut".into(), ex("lut_farm_incomplete.json")], 1),
        (vec!["fitness".into(), "--product".into(), ex("product_bridges.json"), "--problem".into(), ex("problem_navigation.json")], 0),
        (vec!["fitness".into(), "--product".into(), ex("product_bridges.json"), "--problem".into(), ex("problem_damage.json")], 2),
        (vec!["fitness".into(), "--product".into(), ex("product_bridges.json"), "--problem".into(), ex("problem_other_scale.json")], 1),
    ];
    for (args, want) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, first, stderr) = run_cli(&args);
        ensure(code == *want, || format!("{} exited {code}, expected {want}: {stderr}", args.join(" ")))?;
        let (_, second, _) = run_cli(&args);
        ensure(first == second, || format!("{} is not deterministic", args.join(" ")))?;
    }

    let report = |args: &[&str]| -> serde_json::Value { serde_json::from_str(&run_cli(args).1).unwrap() };
    let chain = report(&["flood", &ex("flood_chain.json")]);
    ensure(chain["results"]["parcels"][1]["interval"] == serde_json::json!({"lo": 18, "hi": 20}), || "B is not [18,20]".into())?;
    let conflict = report(&["flood", &ex("flood_conflict.json")]);
    ensure(conflict["results"]["revision"]["retracted"] == serde_json::json!(["A"]), || "retracted is not [A]".into())?;
    let fused = report(&[
        "fuse", "--roads", &ex("roads_cross.json"), "--streams", &ex("streams_cross.json"), "--bridges", &ex("bridges_none.json"),
    ]);
    let synthesized = fused["results"]["log"].as_array().map_or(0, |l| l.iter().filter(|a| a["action"] == "synthesize_bridge").count());
    ensure(synthesized == 1, || format!("{synthesized} bridges synthesised"))?;
    let onto = report(&["change", &ex("grid_1990_coniferous.json"), &ex("grid_2000_coniferous.json"), "--mode", "onto"]);
    ensure(
        onto["results"]["cells"][0]["changed"] == false && onto["results"]["cells"][0]["confidence"] == "very_reliable",
        || "16/C cell wrong".into(),
    )?;
    let numeric = report(&["change", &ex("heights_a.json"), &ex("heights_b.json"), "--mode", "numeric"]);
    ensure(numeric["results"]["cells"].as_array().unwrap().iter().all(|v| v == 0.0), || "numeric diff not zero".into())?;
    let (_, _, lut_err) = run_cli(&[
        "change", &ex("grid_farm_a.json"), &ex("grid_farm_b.json"), "--mode", "lut", "--lut", &ex("lut_farm_incomplete.json"),
    ]);
    ensure(lut_err.contains("pasture") && lut_err.contains("arable"), || "LUT error does not name the pair".into())?;
    Ok(format!("{} files round-trip; 12 commands deterministic with expected exit codes", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("flood oracle equivalence", flood_oracle),
        ("revision minimality", revision_minimality),
        ("propagation confluence", confluence),
        ("baseline contrast", baseline_contrast),
        ("bridge rule scenarios", figure_scenarios),
        ("fusion closure", fusion_closure),
        ("taxonomy fidelity", taxonomy_counts),
        ("class quality metadata", metadata_reproduction),
        ("relation algebra", relation_algebra),
        ("fitness verdicts", fitness_verdicts),
        ("cli determinism and round-trip", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
