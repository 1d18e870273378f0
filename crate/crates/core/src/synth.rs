//! Seeded synthetic layouts for benchmarks and smoke tests.
//!
//! Geometry is drawn on a unit of `k * 10` where `k` is the smallest
//! integer keeping every width and spacing legal under the given rules,
//! so the same seed yields the same topology at any rule scale.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::fixtures::clique4_motif;
use crate::geometry::{rect_distance, Polygon, Rect};
use crate::io::LayoutFile;
use crate::layout_graph::Feature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// `n` columns of `n` stacked wires; columns are far apart.
    Grid,
    /// Two interdigitated combs plus clusters of floating wires.
    Comb,
    /// The four-wire clique motif tiled `n` times.
    Clique4Array,
    /// `n` square contacts on a jittered dense lattice.
    ViaArray,
}

impl SynthKind {
    pub const ALL: [SynthKind; 4] = [SynthKind::Grid, SynthKind::Comb, SynthKind::Clique4Array, SynthKind::ViaArray];
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::Grid => "grid",
            SynthKind::Comb => "comb",
            SynthKind::Clique4Array => "clique4_array",
            SynthKind::ViaArray => "via_array",
        })
    }
}

impl FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SynthKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown layout kind {s:?} (expected grid, comb, clique4_array or via_array)"))
    }
}

fn rect(r: [i64; 4]) -> Rect {
    Rect::from_coords(r[0], r[1], r[2], r[3])
}

/// Carry over any rule the caller changed from its derived default.
fn layout_for(cfg: &Config, features: Vec<Feature>) -> LayoutFile {
    let base = Config::from_rules(cfg.w_min, cfg.s_min);
    let mut layout = LayoutFile::new(cfg.w_min, cfg.s_min, features);
    let differs = |a: i64, b: i64| (a != b).then_some(a);
    layout.dis_m = differs(cfg.dis_m, base.dis_m);
    layout.dis_c = differs(cfg.dis_c, cfg.dis_m);
    layout.w_th = differs(cfg.w_th, cfg.dis_m);
    layout.merge_gap = differs(cfg.merge_gap, base.merge_gap);
    layout.alpha = (cfg.alpha != base.alpha).then_some(cfg.alpha);
    layout
}

pub fn gen_synthetic(kind: SynthKind, n: usize, seed: u64, cfg: &Config) -> LayoutFile {
    let n = n.max(1);
    let k = (cfg.w_min.max(cfg.s_min) + 9) / 10;
    let u = 10 * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = match kind {
        SynthKind::Grid => grid(n, u, &mut rng),
        SynthKind::Comb => comb(n, u, &mut rng),
        SynthKind::Clique4Array => clique4_array(n, k),
        SynthKind::ViaArray => via_array(n, u, &mut rng),
    };
    layout_for(cfg, features)
}

fn side(n: usize) -> usize {
    (1..).find(|s| s * s >= n).unwrap()
}

// Rows 3u apart: neighbours sit 2u apart (conflict), next-but-one rows 5u
// apart, which is never below dis_m = 2w + 3s <= 5u. Each column is a path.
fn grid(n: usize, u: i64, rng: &mut ChaCha8Rng) -> Vec<Feature> {
    let mut out = Vec::with_capacity(n * n);
    for c in 0..n as i64 {
        for r in 0..n as i64 {
            let x = c * 26 * u + rng.gen_range(0..=4) * u;
            let len = rng.gen_range(10..=16) * u;
            let y = r * 3 * u;
            out.push(Feature::rect(out.len(), rect([x, y, x + len, y + u])));
        }
    }
    out
}

fn comb(n: usize, u: i64, rng: &mut ChaCha8Rng) -> Vec<Feature> {
    let tooth = 12 * u;
    let width = (4 * n as i64 - 1) * u;
    let mut lower = vec![rect([0, 0, width, u])];
    let mut upper = Vec::new();
    for i in 0..n as i64 {
        let x = 4 * i * u;
        lower.push(rect([x, u, x + u, u + tooth]));
        let x = x + 2 * u;
        if x + u <= width {
            upper.push(rect([x, 3 * u, x + u, 3 * u + tooth]));
        }
    }
    upper.push(rect([0, 3 * u + tooth, width, 4 * u + tooth]));
    let mut out = vec![
        Feature::new(0, Polygon::new(lower).expect("comb is connected")),
        Feature::new(1, Polygon::new(upper).expect("comb is connected")),
    ];

    // Floating wires in clusters of up to eight, four tracks per cluster,
    // below the combs.
    let mut placed = 0;
    let mut cluster = 0i64;
    while placed < n {
        let (bx, by) = ((cluster % 8) * 60 * u, -(cluster / 8 + 1) * 30 * u);
        let mut local: Vec<Rect> = Vec::new();
        let mut attempts = 0;
        while local.len() < 8 && placed < n && attempts < 200 {
            attempts += 1;
            let x = bx + rng.gen_range(0..=30) * u;
            let y = by + rng.gen_range(0..4) * 2 * u;
            let r = rect([x, y, x + rng.gen_range(4..=16) * u, y + u]);
            let gap = (u * u) as i128;
            if local.iter().all(|o| !o.interiors_overlap(&r) && rect_distance(o, &r) >= gap) {
                local.push(r);
                out.push(Feature::rect(out.len(), r));
                placed += 1;
            }
        }
        cluster += 1;
    }
    out
}

fn clique4_array(n: usize, k: i64) -> Vec<Feature> {
    let s = side(n) as i64;
    let mut out = Vec::with_capacity(4 * n);
    for i in 0..n as i64 {
        let (dx, dy) = ((i % s) * 400 * k, (i / s) * 150 * k);
        for f in clique4_motif() {
            let rects: Vec<Rect> = f
                .shape
                .rects()
                .iter()
                .map(|r| {
                    let [x0, y0, x1, y1] = r.coords();
                    rect([x0 * k + dx, y0 * k + dy, x1 * k + dx, y1 * k + dy])
                })
                .collect();
            out.push(Feature::new(out.len(), Polygon::new(rects).expect("scaled motif is valid")));
        }
    }
    out
}

// Lattice pitches between 2u and 3u: diagonal neighbours also conflict, so
// odd cycles are everywhere and contacts are too short for most cuts.
fn via_array(n: usize, u: i64, rng: &mut ChaCha8Rng) -> Vec<Feature> {
    let s = side(n);
    let mut pos = |count: usize| {
        let mut acc = 0;
        (0..count)
            .map(|_| {
                let p = acc;
                acc += rng.gen_range(20..=30) * u / 10;
                p
            })
            .collect::<Vec<i64>>()
    };
    let xs = pos(s);
    let ys = pos(s);
    (0..n)
        .map(|i| {
            let (x, y) = (xs[i % s], ys[i / s]);
            Feature::rect(i, rect([x, y, x + u, y + u]))
        })
        .collect()
}
