//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Tolerances are pinned in each check.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use leleec::cost::{format_decimal, Cost};
use leleec::decomposer::{build_graphs, decompose, decompose_lelele, decompose_monolithic, decompose_with, RunOptions};
use leleec::fixtures::{clique4_motif, merge_triangle, stitch_triangle};
use leleec::geometry::{rect_distance, Rect};
use leleec::ilp_model::{build_model_with_stitch, build_uncorrected, build_model_no_stitch, check_cut_rules};
use leleec::io::{read_layout, read_result};
use leleec::layout_graph::Feature;
use leleec::solver::{brute_force, solve, BRUTE_FORCE_CAP};
use leleec::synth::{gen_synthetic, SynthKind};
use leleec::verify::verify;
use leleec::Config;
use leleec_cli::run_cli_with;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rules() -> Config {
    Config::from_rules(10, 10)
}

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
}

fn run_cli(argv: &[&str]) -> i32 {
    run_cli_with(argv, &mut std::io::sink())
}

fn arg(p: &Path) -> String {
    p.to_str().expect("utf-8 path").to_owned()
}

/// Wires on 20 nm tracks with tip-to-tip gaps, plus the odd vertical wire,
/// so small layouts have odd cycles, end-cut candidates and stitches.
fn random_layout(rng: &mut ChaCha8Rng, max_features: usize) -> Vec<Feature> {
    let want = rng.gen_range(2..=max_features);
    let tracks = rng.gen_range(2..=4i64);
    let mut rects: Vec<Rect> = Vec::new();
    let mut attempts = 0;
    while rects.len() < want && attempts < 500 {
        attempts += 1;
        let r = if rng.gen_ratio(1, 6) {
            let x = rng.gen_range(0..=20) * 10;
            let y = rng.gen_range(-3..=0) * 20;
            Rect::from_coords(x, y, x + 10, y + rng.gen_range(4..=8) * 20 - 10)
        } else {
            let x = rng.gen_range(0..=20) * 10;
            let y = rng.gen_range(0..tracks) * 20;
            Rect::from_coords(x, y, x + rng.gen_range(3..=14) * 10, y + 10)
        };
        if rects.iter().all(|o| !o.interiors_overlap(&r) && rect_distance(o, &r) >= 100) {
            rects.push(r);
        }
    }
    rects.into_iter().enumerate().map(|(i, r)| Feature::rect(i, r)).collect()
}

fn c1_clique_contrast() -> Outcome {
    let cfg = rules();
    let ours = decompose(clique4_motif(), &cfg).unwrap();
    let base = decompose_lelele(clique4_motif(), &cfg, &RunOptions::default()).unwrap();
    let pass = base.result.conflicts.len() == 1 && ours.result.conflicts.is_empty() && ours.result.selected_cuts.len() >= 2;
    outcome(
        pass,
        format!(
            "baseline conflicts {} (want 1), end-cut conflicts {} (want 0), cuts selected {} (want >= 2), trim shapes {}",
            base.result.conflicts.len(),
            ours.result.conflicts.len(),
            ours.result.selected_cuts.len(),
            ours.result.trim_shapes.len()
        ),
    )
}

fn c2_merge_correction() -> Outcome {
    let (lg, eg) = merge_triangle();
    let corrected = build_model_no_stitch(&lg, &eg).unwrap();
    let uncorrected = build_uncorrected(&lg, &eg).unwrap();
    let a = corrected.objective_value(&solve(&corrected, None).unwrap().assignment);
    let b = uncorrected.objective_value(&solve(&uncorrected, None).unwrap().assignment);
    let (ba, bb) = (brute_force(&corrected).unwrap().1, brute_force(&uncorrected).unwrap().1);
    let pass = a.is_zero() && b == Cost::from_integer(1) && ba == a && bb == b;
    outcome(pass, format!("corrected {a} (want 0), uncorrected {b} (want 1), brute force {ba}/{bb}"))
}

fn c3_oracle() -> Outcome {
    let cfg = rules();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut mismatches, mut tried) = (0, Vec::new(), 0);
    while checked < 500 && tried < 20_000 {
        tried += 1;
        let features = random_layout(&mut rng, 6);
        let (lg, eg) = build_graphs(features, &cfg, false).unwrap();
        let model = build_model_with_stitch(&lg, &eg, cfg.alpha).unwrap();
        if model.num_vars() > BRUTE_FORCE_CAP || model.num_vars() < 3 {
            continue;
        }
        checked += 1;
        let fast = model.objective_value(&solve(&model, None).unwrap().assignment);
        let (_, exact) = brute_force(&model).unwrap();
        if fast != exact {
            mismatches.push(tried);
        }
    }
    outcome(
        checked >= 500 && mismatches.is_empty(),
        format!("{checked} models with <= {BRUTE_FORCE_CAP} variables, {} mismatches {mismatches:?}", mismatches.len()),
    )
}

fn c4_speedups() -> Outcome {
    let cfg = rules();
    let mut pre = cfg.clone();
    pre.enable_preselect = true;
    let opts = RunOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut mismatches, mut preselect_losses) = (Vec::new(), Vec::new());
    let runs = 200;
    for i in 0..runs {
        let features = random_layout(&mut rng, 12);
        let mono = decompose_monolithic(features.clone(), &cfg, &opts).unwrap().result.cost;
        let fast = decompose_with(features.clone(), &cfg, &opts).unwrap().result.cost;
        if fast != mono {
            mismatches.push(i);
        }
        let with_pre = decompose_with(features, &pre, &opts).unwrap().result.cost;
        if with_pre != mono {
            preselect_losses.push((i, with_pre - mono));
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{runs} layouts: components+bridges vs monolithic mismatches {}; finding: pre-selection (default off) lost optimality on {} layouts {:?}",
            mismatches.len(),
            preselect_losses.len(),
            preselect_losses.iter().take(5).map(|(i, d)| format!("#{i} +{d}")).collect::<Vec<_>>()
        ),
    )
}

fn c5_stitch_direction() -> Outcome {
    let mut worse = Vec::new();
    for path in corpus() {
        let layout = read_layout(&path).unwrap();
        let cfg = layout.config();
        let mut off = cfg.clone();
        off.enable_stitch = false;
        let with = decompose(layout.features.clone(), &cfg).unwrap().result.cost;
        let without = decompose(layout.features, &off).unwrap().result.cost;
        if with > without {
            worse.push(format!("{}: {with} > {without}", path.display()));
        }
    }
    let cfg = rules();
    let mut off = cfg.clone();
    off.enable_stitch = false;
    let with = decompose(stitch_triangle(), &cfg).unwrap().result.cost;
    let without = decompose(stitch_triangle(), &off).unwrap().result.cost;
    let strict = with == Cost::new(1, 10) && without == Cost::from_integer(1);
    outcome(
        worse.is_empty() && strict,
        format!("{} corpus files, regressions {worse:?}; stitch triangle {} -> {} (want 1 -> 0.1)", corpus().len(), format_decimal(&without), format_decimal(&with)),
    )
}

/// Decompose every corpus file through the CLI into `dir`.
fn run_corpus(dir: &Path) -> Result<(), String> {
    for path in corpus() {
        let stem = path.file_stem().unwrap().to_str().unwrap();
        let out = dir.join(format!("{stem}.result.json"));
        let svg = dir.join(format!("{stem}.svg"));
        let code = run_cli(&["leleec", "decompose", &arg(&path), "--out", &arg(&out), "--svg", &arg(&svg), "--report", "json"]);
        if code != 0 {
            return Err(format!("{stem}: exit {code}"));
        }
        let out = dir.join(format!("{stem}.baseline.json"));
        let code = run_cli(&["leleec", "baseline-lelele", &arg(&path), "--out", &arg(&out), "--report", "json"]);
        if code != 0 {
            return Err(format!("{stem} baseline: exit {code}"));
        }
    }
    Ok(())
}

fn c6_validity(dir: &Path) -> Outcome {
    if let Err(e) = run_corpus(dir) {
        return outcome(false, e);
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for path in corpus() {
        let stem = path.file_stem().unwrap().to_str().unwrap();
        let layout = read_layout(&path).unwrap();
        for kind in ["result", "baseline"] {
            let file = dir.join(format!("{stem}.{kind}.json"));
            let result = read_result(&file).unwrap();
            if let Err(e) = verify(&layout, &result) {
                failures.push(format!("{stem}.{kind}: {e}"));
            }
            if run_cli(&["leleec", "verify", &arg(&path), &arg(&file)]) != 0 {
                failures.push(format!("{stem}.{kind}: cli verify"));
            }
            checked += 1;
        }
        // Direct rule check on the in-memory result as well.
        let d = decompose(layout.features.clone(), &layout.config()).unwrap();
        if let Err(e) = check_cut_rules(&d.endcuts, &d.result.colors, &d.result.selected_cuts) {
            failures.push(format!("{stem}: {e}"));
        }
        let alpha = layout.config().alpha;
        let formula = Cost::from_integer(d.result.conflicts.len() as i64) + alpha * Cost::from_integer(d.result.stitches.len() as i64);
        if formula != d.result.cost {
            failures.push(format!("{stem}: cost {} vs formula {formula}", d.result.cost));
        }
    }
    outcome(failures.is_empty(), format!("{checked} result files verified, failures {failures:?}"))
}

fn c7_determinism(first: &Path, second: &Path) -> Outcome {
    if let Err(e) = run_corpus(second) {
        return outcome(false, e);
    }
    let mut names: Vec<PathBuf> = fs::read_dir(first).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|p| fs::read(p).ok() != fs::read(second.join(p.file_name().unwrap())).ok())
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    // Thread count must not change the answer either.
    let mut seq_diff = Vec::new();
    for path in corpus() {
        let stem = path.file_stem().unwrap().to_str().unwrap();
        let out = second.join(format!("{stem}.seq.json"));
        run_cli(&["leleec", "decompose", &arg(&path), "--out", &arg(&out), "--sequential", "--report", "json"]);
        if fs::read(&out).ok() != fs::read(first.join(format!("{stem}.result.json"))).ok() {
            seq_diff.push(stem.to_owned());
        }
    }
    outcome(
        differing.is_empty() && seq_diff.is_empty() && !names.is_empty(),
        format!("{} files compared, differing {differing:?}; sequential vs parallel differing {seq_diff:?}", names.len()),
    )
}

fn c8_scalability() -> Outcome {
    let cfg = rules();
    let layout = gen_synthetic(SynthKind::Grid, 32, 8, &cfg);
    let n = layout.features.len();
    let start = Instant::now();
    let d = decompose(layout.features, &cfg).unwrap();
    let elapsed = start.elapsed();
    let pass = n >= 1000 && d.proven_optimal && d.stats.len() >= 10 && elapsed <= Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{n} features, {} sub-problems, cost {}, proven optimal {}, {:.2?} (limit 60 s)",
            d.stats.len(),
            d.result.cost,
            d.proven_optimal,
            elapsed
        ),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let (first, second) = (tmp.path().join("run1"), tmp.path().join("run2"));
    fs::create_dir_all(&first).unwrap();
    fs::create_dir_all(&second).unwrap();

    type Check<'a> = (&'static str, Duration, Box<dyn FnOnce() -> Outcome + 'a>);
    let checks: Vec<Check> = vec![
        ("1 clique motif: baseline 1 conflict, end-cuts 0", Duration::from_secs(1), Box::new(c1_clique_contrast)),
        ("2 merge correction: corrected 0, uncorrected 1", Duration::from_secs(1), Box::new(c2_merge_correction)),
        ("3 solver equals brute force on 500 models", Duration::from_secs(60), Box::new(c3_oracle)),
        ("4 speedups keep optimality on 200 layouts", Duration::from_secs(120), Box::new(c4_speedups)),
        ("5 stitching never raises cost", Duration::from_secs(30), Box::new(c5_stitch_direction)),
        ("6 corpus results verify", Duration::from_secs(30), Box::new(|| c6_validity(&first))),
        ("7 reruns are byte-identical", Duration::from_secs(60), Box::new(|| c7_determinism(&first, &second))),
        ("8 1024-wire grid solved and split", Duration::from_secs(60), Box::new(c8_scalability)),
    ];

    let mut failed = 0;
    for (name, budget, check) in checks {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let pass = out.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} [{:.2?} of {:.0?}] {}",
            if pass { "PASS" } else { "FAIL" },
            took,
            budget,
            out.detail
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
