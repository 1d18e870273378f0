//! End-cut candidates and the end-cut graph.
//!
//! Every conflict edge gets at most one candidate: the edge-edge cut spanning
//! the gap between facing boundary edges when one is legal, otherwise the
//! smallest legal corner-corner cut. Candidates then relate pairwise through
//! solid (mutually exclusive) or dash (mergeable) edges.

use std::collections::BTreeSet;

use crate::config::Config;
use crate::geometry::{projection_interval, rect_distance, Axis, Interval, Polygon, Rect};
use crate::index::GridIndex;
use crate::layout_graph::LayoutGraph;
use crate::parallel::map_ordered;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutKind {
    EdgeEdge,
    CornerCorner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndCutCandidate {
    pub id: usize,
    /// Layout-graph vertices joined by the cut, `a < b`.
    pub a: usize,
    pub b: usize,
    pub feature_a: usize,
    pub feature_b: usize,
    pub rect: Rect,
    pub kind: CutKind,
}

impl EndCutCandidate {
    pub fn shared_vertex(&self, other: &EndCutCandidate) -> Option<usize> {
        [self.a, self.b]
            .into_iter()
            .find(|v| *v == other.a || *v == other.b)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EndCutGraph {
    pub nodes: Vec<EndCutCandidate>,
    /// Sorted `(p, q)` with `p < q`.
    pub solid_edges: Vec<(usize, usize)>,
    /// Sorted `(p, q)` with `p < q`.
    pub dash_edges: Vec<(usize, usize)>,
}

impl EndCutGraph {
    pub fn is_dash(&self, p: usize, q: usize) -> bool {
        self.dash_edges.binary_search(&(p.min(q), p.max(q))).is_ok()
    }

    pub fn is_solid(&self, p: usize, q: usize) -> bool {
        self.solid_edges.binary_search(&(p.min(q), p.max(q))).is_ok()
    }

    /// Number of solid edges at each candidate.
    pub fn solid_degree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(p, q) in &self.solid_edges {
            deg[p] += 1;
            deg[q] += 1;
        }
        deg
    }
}

/// Feature rectangles that end-cuts must not cut into.
pub struct Obstacles {
    index: GridIndex,
}

impl Obstacles {
    pub fn new(graph: &LayoutGraph, cell: i64) -> Self {
        let mut index = GridIndex::new(cell.max(1));
        for f in &graph.features {
            for r in f.shape.rects() {
                index.insert(f.id, *r);
            }
        }
        Self { index }
    }

    pub fn blocks(&self, r: &Rect) -> bool {
        !self.index.overlapping_owners(r).is_empty()
    }
}

/// Gap between two disjoint extents, oriented low to high. `None` when the
/// extents overlap with positive length.
fn gap_between(a: Interval, b: Interval) -> Option<Interval> {
    if a.hi <= b.lo {
        Some(Interval { lo: a.hi, hi: b.lo })
    } else if b.hi <= a.lo {
        Some(Interval { lo: b.hi, hi: a.lo })
    } else {
        None
    }
}

fn make_rect(axis: Axis, along: Interval, across: Interval) -> Option<Rect> {
    match axis {
        Axis::Horizontal => Rect::new(along.lo, across.lo, along.hi, across.hi).ok(),
        Axis::Vertical => Rect::new(across.lo, along.lo, across.hi, along.hi).ok(),
    }
}

/// Edge-edge cut: the gap between two facing edges, clipped to their
/// projection overlap, at least `w_th` wide and clear of every feature.
pub fn gen_edge_edge(a: &Polygon, b: &Polygon, obstacles: &Obstacles, cfg: &Config) -> Option<Rect> {
    let mut best: Option<((i64, i64, Rect), Rect)> = None;
    for ra in a.rects() {
        for rb in b.rects() {
            for axis in [Axis::Horizontal, Axis::Vertical] {
                let Some(overlap) = projection_interval(ra, rb, axis) else {
                    continue;
                };
                let Some(gap) = gap_between(ra.extent(axis.other()), rb.extent(axis.other())) else {
                    continue;
                };
                if gap.is_empty() || gap.len() >= cfg.dis_m || overlap.len() < cfg.w_th {
                    continue;
                }
                let Some(cut) = make_rect(axis, overlap, gap) else {
                    continue;
                };
                if obstacles.blocks(&cut) {
                    continue;
                }
                let rank = (gap.len(), -overlap.len(), cut);
                if best.as_ref().is_none_or(|(r, _)| rank < *r) {
                    best = Some((rank, cut));
                }
            }
        }
    }
    best.map(|(_, cut)| cut)
}

/// Corner-corner cut between the nearest pair of diagonally placed
/// rectangles.
///
/// The box spanned by the two nearest corners is thickened to `w_th` along
/// one axis, toward either side, giving four placements. Placements that cut
/// into a feature are dropped; the smallest survivor wins, ties going to the
/// lexicographically smallest corner.
pub fn gen_corner_corner(a: &Polygon, b: &Polygon, obstacles: &Obstacles, cfg: &Config) -> Option<Rect> {
    let mut spans = Vec::new();
    let mut nearest = i128::MAX;
    for ra in a.rects() {
        for rb in b.rects() {
            let gx = gap_between(ra.extent(Axis::Horizontal), rb.extent(Axis::Horizontal));
            let gy = gap_between(ra.extent(Axis::Vertical), rb.extent(Axis::Vertical));
            let (Some(gx), Some(gy)) = (gx, gy) else {
                continue;
            };
            let d = rect_distance(ra, rb);
            if d == 0 || d >= cfg.dis_m_sq() {
                continue;
            }
            if d < nearest {
                nearest = d;
                spans.clear();
            }
            if d == nearest {
                spans.push((gx, gy));
            }
        }
    }

    let mut best: Option<(i128, Rect)> = None;
    for (gx, gy) in spans {
        for axis in [Axis::Horizontal, Axis::Vertical] {
            let (thick, thin) = match axis {
                Axis::Horizontal => (gx, gy),
                Axis::Vertical => (gy, gx),
            };
            for toward_high in [false, true] {
                let widened = if thick.len() >= cfg.w_th {
                    thick
                } else if toward_high {
                    Interval {
                        lo: thick.lo,
                        hi: thick.lo + cfg.w_th,
                    }
                } else {
                    Interval {
                        lo: thick.hi - cfg.w_th,
                        hi: thick.hi,
                    }
                };
                let Some(cut) = make_rect(axis, widened, thin) else {
                    continue;
                };
                if cut.extent(axis).len() < cfg.w_th || obstacles.blocks(&cut) {
                    continue;
                }
                let key = (cut.area(), cut);
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
    }
    best.map(|(_, cut)| cut)
}

/// One candidate per conflict edge where a legal cut exists, ids assigned in
/// conflict-edge order.
pub fn generate_candidates(graph: &LayoutGraph, cfg: &Config, parallel: bool) -> Vec<EndCutCandidate> {
    let obstacles = Obstacles::new(graph, cfg.dis_m);
    let found = map_ordered(&graph.conflict_edges, parallel, |e| {
        let (pa, pb) = (&graph.vertices[e.u].shape, &graph.vertices[e.v].shape);
        gen_edge_edge(pa, pb, &obstacles, cfg)
            .map(|r| (r, CutKind::EdgeEdge))
            .or_else(|| gen_corner_corner(pa, pb, &obstacles, cfg).map(|r| (r, CutKind::CornerCorner)))
            .map(|(rect, kind)| (e.u, e.v, rect, kind))
    });
    found
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(id, (a, b, rect, kind))| EndCutCandidate {
            id,
            a,
            b,
            feature_a: graph.vertices[a].feature,
            feature_b: graph.vertices[b].feature,
            rect,
            kind,
        })
        .collect()
}

/// Relation between two candidates; `None` means unrelated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutRelation {
    Solid,
    Dash,
}

pub fn classify_pair(p: &EndCutCandidate, q: &EndCutCandidate, obstacles: &Obstacles, cfg: &Config) -> Option<CutRelation> {
    let d = rect_distance(&p.rect, &q.rect);
    // Mergeable cuts flank one shared vertex and their union box is itself
    // a legal trim shape.
    if p.shared_vertex(q).is_some() && d <= cfg.merge_gap_sq() && !obstacles.blocks(&p.rect.union_bbox(&q.rect)) {
        return Some(CutRelation::Dash);
    }
    (d < cfg.dis_c_sq()).then_some(CutRelation::Solid)
}

pub fn build_endcut_graph(candidates: Vec<EndCutCandidate>, graph: &LayoutGraph, cfg: &Config) -> EndCutGraph {
    let reach = cfg.dis_c.max(cfg.merge_gap);
    let obstacles = Obstacles::new(graph, cfg.dis_m);
    let mut index = GridIndex::new(reach);
    for c in &candidates {
        index.insert(c.id, c.rect);
    }
    let mut solid = BTreeSet::new();
    let mut dash = BTreeSet::new();
    for p in &candidates {
        for hit in index.query(&p.rect, reach) {
            let q = &candidates[index.entry(hit).0];
            if q.id <= p.id {
                continue;
            }
            match classify_pair(p, q, &obstacles, cfg) {
                Some(CutRelation::Solid) => {
                    solid.insert((p.id, q.id));
                }
                Some(CutRelation::Dash) => {
                    dash.insert((p.id, q.id));
                }
                None => {}
            }
        }
    }
    EndCutGraph {
        nodes: candidates,
        solid_edges: solid.into_iter().collect(),
        dash_edges: dash.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout_graph::{build_conflict_edges, Feature};
    use proptest::prelude::*;

    fn rects(list: &[[i64; 4]]) -> Vec<Feature> {
        list.iter()
            .enumerate()
            .map(|(i, r)| Feature::rect(i, Rect::from_coords(r[0], r[1], r[2], r[3])))
            .collect()
    }

    fn graph(list: &[[i64; 4]], cfg: &Config) -> LayoutGraph {
        build_conflict_edges(rects(list), cfg).unwrap()
    }

    fn poly(r: [i64; 4]) -> Polygon {
        Polygon::from_rect(Rect::from_coords(r[0], r[1], r[2], r[3]))
    }

    fn with_w_th(w_th: i64) -> Config {
        let mut cfg = Config::from_rules(10, 10);
        cfg.w_th = w_th;
        cfg
    }

    #[test]
    fn edge_edge_spans_projection() {
        let cfg = with_w_th(20);
        let (a, b) = ([0, 0, 10, 40], [16, 10, 26, 50]);
        let g = graph(&[a, b], &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        let cut = gen_edge_edge(&poly(a), &poly(b), &obstacles, &cfg).unwrap();
        assert_eq!(cut, Rect::from_coords(10, 10, 16, 40));
    }

    #[test]
    fn narrow_projection_is_forbidden() {
        let cfg = with_w_th(20);
        let (a, b) = ([0, 0, 10, 40], [16, 25, 26, 50]);
        let g = graph(&[a, b], &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        assert_eq!(gen_edge_edge(&poly(a), &poly(b), &obstacles, &cfg), None);
        // No diagonal rectangle pair either, so the edge stays unannotated.
        assert_eq!(gen_corner_corner(&poly(a), &poly(b), &obstacles, &cfg), None);
        assert!(generate_candidates(&g, &cfg, false).is_empty());
    }

    #[test]
    fn third_feature_in_gap_forbids_cut() {
        let cfg = with_w_th(20);
        let (a, b, blocker) = ([0, 0, 10, 40], [30, 10, 40, 50], [15, 20, 25, 30]);
        let g = graph(&[a, b, blocker], &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        assert_eq!(gen_edge_edge(&poly(a), &poly(b), &obstacles, &cfg), None);
    }

    #[test]
    fn corner_cut_on_diagonal_pair() {
        // Gap box [10,10]-[14,14]; every placement equals it when w_th = 4.
        let cfg = with_w_th(4);
        let (a, b) = ([0, 0, 10, 10], [14, 14, 24, 24]);
        let g = graph(&[a, b], &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        assert_eq!(gen_edge_edge(&poly(a), &poly(b), &obstacles, &cfg), None);
        let cut = gen_corner_corner(&poly(a), &poly(b), &obstacles, &cfg).unwrap();
        assert_eq!(cut, Rect::from_coords(10, 10, 14, 14));
    }

    #[test]
    fn symmetric_corner_tie_takes_smallest_corner() {
        // Placements, all of area 32: [6,10,14,14] [10,10,18,14] [10,6,14,14] [10,10,14,18].
        let cfg = with_w_th(8);
        let (a, b) = ([0, 0, 10, 10], [14, 14, 24, 24]);
        let g = graph(&[a, b], &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        let cut = gen_corner_corner(&poly(a), &poly(b), &obstacles, &cfg).unwrap();
        assert_eq!(cut, Rect::from_coords(6, 10, 14, 14));
    }

    #[test]
    fn asymmetric_corner_prefers_smaller_area() {
        // gx = 4, gy = 20: thickening x gives 8x20, thickening y gives 4x20.
        let cfg = with_w_th(8);
        let (a, b) = ([0, 0, 10, 10], [14, 30, 24, 40]);
        let g = graph(&[a, b], &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        let cut = gen_corner_corner(&poly(a), &poly(b), &obstacles, &cfg).unwrap();
        assert_eq!(cut, Rect::from_coords(10, 10, 14, 30));
    }

    #[test]
    fn corner_cut_blocked_everywhere() {
        let cfg = with_w_th(8);
        // Blockers hug every placement: left, right, below and above the gap box.
        let list = [
            [0, 0, 10, 10],
            [14, 14, 24, 24],
            [3, 11, 9, 13],
            [15, 11, 17, 13],
            [11, 3, 13, 9],
            [11, 15, 13, 17],
        ];
        let g = graph(&list, &cfg);
        let obstacles = Obstacles::new(&g, cfg.dis_m);
        assert_eq!(gen_corner_corner(&poly(list[0]), &poly(list[1]), &obstacles, &cfg), None);
    }

    #[test]
    fn far_apart_cuts_are_unrelated() {
        let cfg = with_w_th(50);
        // A long wire with a partner at each end, 400 apart.
        let g = graph(&[[0, 0, 600, 10], [0, 20, 100, 30], [500, 20, 600, 30]], &cfg);
        let cands = generate_candidates(&g, &cfg, false);
        assert_eq!(cands.len(), 2);
        let eg = build_endcut_graph(cands, &g, &cfg);
        assert!(eg.solid_edges.is_empty() && eg.dash_edges.is_empty());
    }

    #[test]
    fn abutting_cuts_around_shared_feature_merge() {
        // r3 above r1 and r2, which sit tip to tip: cuts r1-r3 and r2-r3 are
        // 10 apart and merge around r3.
        let cfg = Config::from_rules(10, 10);
        let g = graph(&[[0, 0, 140, 10], [150, 0, 300, 10], [0, 20, 300, 30]], &cfg);
        let cands = generate_candidates(&g, &cfg, false);
        assert_eq!(cands.len(), 2);
        assert_eq!((cands[0].a, cands[0].b), (0, 2));
        assert_eq!((cands[1].a, cands[1].b), (1, 2));
        let eg = build_endcut_graph(cands, &g, &cfg);
        assert_eq!(eg.dash_edges, vec![(0, 1)]);
        assert!(eg.solid_edges.is_empty());
    }

    #[test]
    fn close_cuts_without_shared_feature_conflict() {
        let cfg = Config::from_rules(10, 10);
        // Two wire pairs side by side; their cuts are 30 apart (< dis_c = 50)
        // while the diagonal pairs sit exactly dis_m apart.
        let g = graph(
            &[[0, 0, 100, 10], [0, 50, 100, 60], [130, 0, 230, 10], [130, 50, 230, 60]],
            &cfg,
        );
        let cands = generate_candidates(&g, &cfg, false);
        assert_eq!(cands.len(), 2);
        let eg = build_endcut_graph(cands, &g, &cfg);
        assert_eq!(eg.solid_edges, vec![(0, 1)]);
        assert!(eg.dash_edges.is_empty());
    }

    fn arb_layout() -> impl Strategy<Value = Vec<[i64; 4]>> {
        prop::collection::btree_set((0i64..5, 0i64..5), 2..12).prop_flat_map(|cells| {
            let cells: Vec<_> = cells.into_iter().collect();
            let n = cells.len();
            (Just(cells), prop::collection::vec((0i64..15, 0i64..15, 5i64..70, 5i64..70), n))
        })
        .prop_map(|(cells, dims)| {
            cells
                .iter()
                .zip(dims)
                .map(|(&(cx, cy), (ox, oy, w, h))| {
                    let (x, y) = (cx * 90 + ox, cy * 90 + oy);
                    [x, y, x + w.min(85 - ox), y + h.min(85 - oy)]
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn candidates_never_cut_features(list in arb_layout(), w_th in 5i64..60) {
            let cfg = with_w_th(w_th);
            let g = graph(&list, &cfg);
            for c in generate_candidates(&g, &cfg, false) {
                for f in &g.features {
                    prop_assert!(!f.shape.overlaps_rect(&c.rect));
                }
                prop_assert_eq!(rect_distance(&c.rect, &g.features[c.feature_a].shape.rects()[0]), 0);
                prop_assert_eq!(rect_distance(&c.rect, &g.features[c.feature_b].shape.rects()[0]), 0);
            }
        }

        #[test]
        fn classification_is_a_partition(list in arb_layout(), w_th in 5i64..60) {
            let cfg = with_w_th(w_th);
            let g = graph(&list, &cfg);
            let cands = generate_candidates(&g, &cfg, false);
            let eg = build_endcut_graph(cands.clone(), &g, &cfg);
            let obstacles = Obstacles::new(&g, cfg.dis_m);
            for p in &cands {
                for q in &cands {
                    if p.id >= q.id {
                        continue;
                    }
                    let expect = classify_pair(p, q, &obstacles, &cfg);
                    let (s, d) = (eg.is_solid(p.id, q.id), eg.is_dash(p.id, q.id));
                    prop_assert!(!(s && d));
                    prop_assert_eq!(s, expect == Some(CutRelation::Solid));
                    prop_assert_eq!(d, expect == Some(CutRelation::Dash));
                    if d {
                        prop_assert!(p.shared_vertex(q).is_some());
                        let merged = p.rect.union_bbox(&q.rect);
                        for f in &g.features {
                            prop_assert!(!f.shape.overlaps_rect(&merged));
                        }
                    }
                }
            }
        }

        #[test]
        fn translation_moves_cuts_rigidly(list in arb_layout(), w_th in 5i64..60, dx in -500i64..500, dy in -500i64..500) {
            let cfg = with_w_th(w_th);
            let moved: Vec<[i64; 4]> = list.iter().map(|r| [r[0] + dx, r[1] + dy, r[2] + dx, r[3] + dy]).collect();
            let base = generate_candidates(&graph(&list, &cfg), &cfg, false);
            let shifted = generate_candidates(&graph(&moved, &cfg), &cfg, true);
            prop_assert_eq!(base.len(), shifted.len());
            for (p, q) in base.iter().zip(&shifted) {
                prop_assert_eq!(p.rect.translate(dx, dy), q.rect);
                prop_assert_eq!((p.a, p.b, p.kind), (q.a, q.b, q.kind));
            }
        }
    }
}
