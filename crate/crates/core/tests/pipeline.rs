use leleec::cost::Cost;
use leleec::decomposer::{decompose, decompose_monolithic, decompose_with, RunOptions};
use leleec::geometry::{rect_distance, Rect};
use leleec::io::{emit_result, parse_result_str, LayoutFile, Mode, ResultFile};
use leleec::layout_graph::Feature;
use leleec::svg::render_svg;
use leleec::synth::{gen_synthetic, SynthKind};
use leleec::verify::verify;
use leleec::Config;
use proptest::prelude::*;

fn wires() -> impl Strategy<Value = Vec<Feature>> {
    prop::collection::vec((0i64..20, 0i64..4, 3i64..14, any::<bool>()), 1..10).prop_map(|specs| {
        let mut rects: Vec<Rect> = Vec::new();
        for (x, t, len, vertical) in specs {
            let r = if vertical {
                Rect::from_coords(x * 10, -40, x * 10 + 10, -40 + len * 10)
            } else {
                Rect::from_coords(x * 10, t * 20, x * 10 + len * 10, t * 20 + 10)
            };
            if rects.iter().all(|o| !o.interiors_overlap(&r) && rect_distance(o, &r) >= 100) {
                rects.push(r);
            }
        }
        rects.into_iter().enumerate().map(|(i, r)| Feature::rect(i, r)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_solve_matches_whole_solve_and_verifies(features in wires()) {
        let cfg = Config::from_rules(10, 10);
        let opts = RunOptions::default();
        let split = decompose_with(features.clone(), &cfg, &opts).unwrap();
        let whole = decompose_monolithic(features.clone(), &cfg, &opts).unwrap();
        prop_assert_eq!(split.result.cost, whole.result.cost);

        let layout = LayoutFile::new(10, 10, features);
        let file = ResultFile::from_decomposition(&split, &cfg, Mode::TwoMask);
        prop_assert!(verify(&layout, &file).is_ok());
        prop_assert_eq!(parse_result_str(&emit_result(&file)).unwrap(), file);
    }

    #[test]
    fn stitching_never_hurts(features in wires()) {
        let cfg = Config::from_rules(10, 10);
        let mut off = cfg.clone();
        off.enable_stitch = false;
        let with = decompose(features.clone(), &cfg).unwrap().result.cost;
        let without = decompose(features, &off).unwrap().result.cost;
        prop_assert!(with <= without);
    }
}

#[test]
fn every_synthetic_kind_decomposes_and_verifies() {
    let cfg = Config::from_rules(10, 10);
    for kind in SynthKind::ALL {
        let layout = gen_synthetic(kind, 8, 11, &cfg);
        let d = decompose(layout.features.clone(), &cfg).unwrap();
        assert!(d.proven_optimal, "{kind}");
        let file = ResultFile::from_decomposition(&d, &cfg, Mode::TwoMask);
        let summary = verify(&layout, &file).unwrap();
        assert_eq!(summary.cost, d.result.cost);
        let sum: Cost = d.stats.iter().map(|s| s.cost).sum();
        assert_eq!(sum, d.result.cost, "{kind}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = Config::from_rules(10, 10);
    let layout = gen_synthetic(SynthKind::Comb, 20, 5, &cfg);
    let run = |parallel| {
        let d = decompose_with(layout.features.clone(), &cfg, &RunOptions { time_limit: None, parallel }).unwrap();
        (emit_result(&ResultFile::from_decomposition(&d, &cfg, Mode::TwoMask)), render_svg(&d.graph, &d.endcuts, &d.result))
    };
    assert_eq!(run(false), run(true));
}
