//! Small layouts and hand-built graphs with known optima.

use crate::endcut::{CutKind, EndCutCandidate, EndCutGraph};
use crate::geometry::{Polygon, Rect};
use crate::layout_graph::{annotate_end_cuts, ConflictEdge, Feature, LayoutGraph, Segment};

fn rect_feature(id: usize, r: [i64; 4]) -> Feature {
    Feature::rect(id, Rect::from_coords(r[0], r[1], r[2], r[3]))
}

fn l_feature(id: usize, a: [i64; 4], b: [i64; 4]) -> Feature {
    let shape = Polygon::new(vec![Rect::from_coords(a[0], a[1], a[2], a[3]), Rect::from_coords(b[0], b[1], b[2], b[3])])
        .expect("fixture polygon is valid");
    Feature::new(id, shape)
}

/// Four pairwise-conflicting wires (w_min = s_min = 10): two short wires
/// `a`, `c` tip to tip under a long wire `b`, with a second long wire `d`
/// above. Three colors cannot separate all four; with end-cuts, `a`, `b`, `c`
/// share a mask and the cuts under `b` merge into one trim shape.
pub fn clique4_motif() -> Vec<Feature> {
    vec![
        rect_feature(0, [0, 0, 140, 10]),
        rect_feature(1, [0, 20, 300, 30]),
        rect_feature(2, [150, 0, 300, 10]),
        rect_feature(3, [0, 40, 300, 50]),
    ]
}

/// Odd cycle of a straight wire and two L-shaped features with no end-cut
/// candidate anywhere (w_min = s_min = 10). Only a stitch in the middle of
/// the wire avoids the conflict.
pub fn stitch_triangle() -> Vec<Feature> {
    vec![
        rect_feature(0, [0, 0, 300, 10]),
        l_feature(1, [0, 20, 10, 100], [10, 90, 140, 100]),
        l_feature(2, [290, 20, 300, 100], [160, 90, 290, 100]),
    ]
}

/// Triangle 0-1-2 plus a vertex 3 conflicting with all three, so vertex 3
/// takes one mask and the triangle the other. Cuts: 0 on (0,1), 1 on (0,2),
/// 2 on (1,2). Cut 0 is solid with both others; cuts 1 and 2 may merge
/// around vertex 2, which is the only way to clear edge (0,1).
pub fn merge_triangle() -> (LayoutGraph, EndCutGraph) {
    abstract_graphs(
        4,
        &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)],
        &[(0, 1), (0, 2), (1, 2)],
        &[(0, 1), (0, 2)],
        &[(1, 2)],
    )
}

/// Hand-built graphs over `n` far-apart square vertices with the given
/// conflict edges, one candidate per listed cut edge, and explicit solid and
/// dash relations. Panics if a cut lies on an unlisted edge.
pub fn abstract_graphs(
    n: usize,
    edges: &[(usize, usize)],
    cuts: &[(usize, usize)],
    solid: &[(usize, usize)],
    dash: &[(usize, usize)],
) -> (LayoutGraph, EndCutGraph) {
    let features: Vec<Feature> = (0..n)
        .map(|i| Feature::rect(i, Rect::from_coords(i as i64 * 100, 0, i as i64 * 100 + 10, 10)))
        .collect();
    let vertices = features
        .iter()
        .map(|f| Segment {
            id: f.id,
            feature: f.id,
            shape: f.shape.clone(),
        })
        .collect();
    let mut conflict_edges: Vec<ConflictEdge> = edges
        .iter()
        .map(|&(u, v)| ConflictEdge {
            u: u.min(v),
            v: u.max(v),
            cut: None,
        })
        .collect();
    conflict_edges.sort_unstable();
    let lg = LayoutGraph {
        segments_of: (0..n).map(|i| vec![i]).collect(),
        features,
        vertices,
        conflict_edges,
        stitch_edges: Vec::new(),
    };
    let nodes: Vec<EndCutCandidate> = cuts
        .iter()
        .enumerate()
        .map(|(id, &(a, b))| EndCutCandidate {
            id,
            a: a.min(b),
            b: a.max(b),
            feature_a: a.min(b),
            feature_b: a.max(b),
            rect: Rect::from_coords(id as i64, 0, id as i64 + 1, 1),
            kind: CutKind::EdgeEdge,
        })
        .collect();
    let lg = annotate_end_cuts(lg, &nodes).unwrap();
    let norm = |v: &[(usize, usize)]| {
        let mut v: Vec<(usize, usize)> = v.iter().map(|&(p, q)| (p.min(q), p.max(q))).collect();
        v.sort_unstable();
        v
    };
    let eg = EndCutGraph {
        nodes,
        solid_edges: norm(solid),
        dash_edges: norm(dash),
    };
    (lg, eg)
}
