//! Layout graph: one vertex per feature (or per segment once stitch
//! candidates split a feature), conflict edges between vertices closer than
//! `dis_m`, and stitch edges between adjacent segments of one feature.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::endcut::EndCutCandidate;
use crate::geometry::{polygon_distance, Axis, Polygon, Rect};
use crate::index::GridIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("feature ids must be dense from 0: position {position} holds id {id}")]
    NonDenseIds { position: usize, id: usize },
    #[error("features {0} and {1} overlap or touch")]
    OverlappingInput(usize, usize),
    #[error("end-cut candidate {cut} joins vertices {a} and {b}, which share no conflict edge")]
    UnknownEdge { cut: usize, a: usize, b: usize },
    #[error("conflict edge {edge} already carries candidate {first}; candidate {second} maps to it too")]
    DuplicateCandidate { edge: usize, first: usize, second: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub id: usize,
    pub shape: Polygon,
}

impl Feature {
    pub fn new(id: usize, shape: Polygon) -> Self {
        Self { id, shape }
    }

    pub fn rect(id: usize, rect: Rect) -> Self {
        Self::new(id, Polygon::from_rect(rect))
    }
}

/// A layout-graph vertex: a whole feature, or one piece of a split feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: usize,
    pub feature: usize,
    pub shape: Polygon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConflictEdge {
    pub u: usize,
    pub v: usize,
    /// End-cut candidate that can remove this conflict.
    pub cut: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StitchEdge {
    pub u: usize,
    pub v: usize,
    /// The stitch splits the feature perpendicular to this axis at `at`.
    pub axis: Axis,
    pub at: i64,
}

/// Stable external name of a vertex: `"7"` for an unsplit feature, `"7.1"`
/// for the second segment of feature 7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexKey {
    pub feature: usize,
    pub segment: Option<usize>,
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.segment {
            None => write!(f, "{}", self.feature),
            Some(k) => write!(f, "{}.{}", self.feature, k),
        }
    }
}

impl FromStr for VertexKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid vertex name {s:?}");
        match s.split_once('.') {
            None => Ok(VertexKey {
                feature: s.parse().map_err(|_| bad())?,
                segment: None,
            }),
            Some((f, k)) => Ok(VertexKey {
                feature: f.parse().map_err(|_| bad())?,
                segment: Some(k.parse().map_err(|_| bad())?),
            }),
        }
    }
}

impl serde::Serialize for VertexKey {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for VertexKey {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutGraph {
    pub features: Vec<Feature>,
    pub vertices: Vec<Segment>,
    /// Vertex ids of each feature's segments, in spine order.
    pub segments_of: Vec<Vec<usize>>,
    /// Sorted by `(u, v)` with `u < v`.
    pub conflict_edges: Vec<ConflictEdge>,
    /// Sorted by `(u, v)` with `u < v`.
    pub stitch_edges: Vec<StitchEdge>,
}

impl LayoutGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.conflict_edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
    }

    /// Conflict-edge adjacency: `(neighbor, edge index)` sorted by neighbor.
    pub fn conflict_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.conflict_edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn vertex_key(&self, v: usize) -> VertexKey {
        let feature = self.vertices[v].feature;
        let segs = &self.segments_of[feature];
        VertexKey {
            feature,
            segment: (segs.len() > 1).then(|| segs.iter().position(|&s| s == v).unwrap()),
        }
    }

    pub fn vertex_by_key(&self, key: VertexKey) -> Option<usize> {
        let segs = self.segments_of.get(key.feature)?;
        match key.segment {
            None if segs.len() == 1 => Some(segs[0]),
            Some(k) if segs.len() > 1 => segs.get(k).copied(),
            _ => None,
        }
    }
}

fn check_ids(features: &[Feature]) -> Result<(), LayoutError> {
    for (position, f) in features.iter().enumerate() {
        if f.id != position {
            return Err(LayoutError::NonDenseIds { position, id: f.id });
        }
    }
    Ok(())
}

/// Vertex pairs within `dis_m`, found through a grid index with cell size
/// `dis_m`. Touching or overlapping shapes are an error.
fn conflict_pairs(shapes: &[&Polygon], cfg: &Config) -> Result<Vec<(usize, usize)>, (usize, usize)> {
    let mut index = GridIndex::new(cfg.dis_m);
    for (owner, shape) in shapes.iter().enumerate() {
        for r in shape.rects() {
            index.insert(owner, *r);
        }
    }
    let limit = cfg.dis_m_sq();
    let mut pairs = Vec::new();
    for (i, shape) in shapes.iter().enumerate() {
        let mut near: Vec<usize> = shape
            .rects()
            .iter()
            .flat_map(|r| index.query(r, cfg.dis_m))
            .map(|e| index.entry(e).0)
            .filter(|&j| j > i)
            .collect();
        near.sort_unstable();
        near.dedup();
        for j in near {
            let d = polygon_distance(shape, shapes[j]);
            if d == 0 {
                return Err((i, j));
            }
            if d < limit {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// One vertex per feature and the conflict edges among them.
pub fn build_conflict_edges(features: Vec<Feature>, cfg: &Config) -> Result<LayoutGraph, LayoutError> {
    cfg.validate()?;
    check_ids(&features)?;
    let shapes: Vec<&Polygon> = features.iter().map(|f| &f.shape).collect();
    let pairs = conflict_pairs(&shapes, cfg).map_err(|(a, b)| LayoutError::OverlappingInput(a, b))?;
    let vertices = features
        .iter()
        .map(|f| Segment {
            id: f.id,
            feature: f.id,
            shape: f.shape.clone(),
        })
        .collect();
    let segments_of = (0..features.len()).map(|i| vec![i]).collect();
    Ok(LayoutGraph {
        features,
        vertices,
        segments_of,
        conflict_edges: pairs
            .into_iter()
            .map(|(u, v)| ConflictEdge { u, v, cut: None })
            .collect(),
        stitch_edges: Vec::new(),
    })
}

/// Legal stitch positions along a single-rectangle feature: midpoints of the
/// maximal spine intervals (length >= `w_min`) not covered by any
/// `dis_m`-dilated neighbor rectangle that lies within `dis_m`.
pub fn stitch_positions(rect: &Rect, neighbors: &[&Polygon], cfg: &Config) -> (Axis, Vec<i64>) {
    let axis = if rect.width() >= rect.height() {
        Axis::Horizontal
    } else {
        Axis::Vertical
    };
    let spine = rect.extent(axis);
    let mut covered: Vec<(i64, i64)> = neighbors
        .iter()
        .flat_map(|p| p.rects().iter())
        .filter(|q| crate::geometry::rect_distance(rect, q) < cfg.dis_m_sq())
        .map(|q| {
            let e = q.extent(axis);
            (e.lo - cfg.dis_m, e.hi + cfg.dis_m)
        })
        .collect();
    covered.sort_unstable();

    let mut positions = Vec::new();
    let mut cursor = spine.lo;
    let consider = |a: i64, b: i64, out: &mut Vec<i64>| {
        if b - a >= cfg.w_min {
            let t = (a + b).div_euclid(2);
            if spine.lo < t && t < spine.hi {
                out.push(t);
            }
        }
    };
    for (lo, hi) in covered {
        if lo > cursor {
            consider(cursor, lo.min(spine.hi), &mut positions);
        }
        cursor = cursor.max(hi);
        if cursor >= spine.hi {
            break;
        }
    }
    if cursor < spine.hi {
        consider(cursor, spine.hi, &mut positions);
    }
    (axis, positions)
}

fn split_rect(rect: &Rect, axis: Axis, cuts: &[i64]) -> Vec<Rect> {
    let spine = rect.extent(axis);
    let mut bounds = vec![spine.lo];
    bounds.extend_from_slice(cuts);
    bounds.push(spine.hi);
    bounds
        .windows(2)
        .map(|w| match axis {
            Axis::Horizontal => Rect::from_coords(w[0], rect.lo.y, w[1], rect.hi.y),
            Axis::Vertical => Rect::from_coords(rect.lo.x, w[0], rect.hi.x, w[1]),
        })
        .collect()
}

/// Split conflicting single-rectangle features at their stitch positions and
/// re-express the conflict edges over the resulting segments.
///
/// Expects a graph straight out of [`build_conflict_edges`]; any end-cut
/// annotations are dropped because segment shapes replace feature shapes.
pub fn generate_stitch_candidates(graph: LayoutGraph, cfg: &Config) -> LayoutGraph {
    let feature_adj = graph.conflict_adjacency();
    let mut vertices = Vec::new();
    let mut segments_of = Vec::with_capacity(graph.features.len());
    let mut stitch_edges = Vec::new();

    for f in &graph.features {
        let rects = f.shape.rects();
        let mut pieces = vec![f.shape.clone()];
        let mut split = None;
        if rects.len() == 1 && !feature_adj[f.id].is_empty() {
            let neighbors: Vec<&Polygon> = feature_adj[f.id]
                .iter()
                .map(|&(g, _)| &graph.features[g].shape)
                .collect();
            let (axis, cuts) = stitch_positions(&rects[0], &neighbors, cfg);
            if !cuts.is_empty() {
                pieces = split_rect(&rects[0], axis, &cuts)
                    .into_iter()
                    .map(Polygon::from_rect)
                    .collect();
                split = Some((axis, cuts));
            }
        }
        let first = vertices.len();
        let ids: Vec<usize> = (first..first + pieces.len()).collect();
        for (shape, &id) in pieces.into_iter().zip(&ids) {
            vertices.push(Segment {
                id,
                feature: f.id,
                shape,
            });
        }
        if let Some((axis, cuts)) = split {
            for (k, &at) in cuts.iter().enumerate() {
                stitch_edges.push(StitchEdge {
                    u: ids[k],
                    v: ids[k + 1],
                    axis,
                    at,
                });
            }
        }
        segments_of.push(ids);
    }

    let limit = cfg.dis_m_sq();
    let mut conflict_edges = Vec::new();
    for e in &graph.conflict_edges {
        for &a in &segments_of[e.u] {
            for &b in &segments_of[e.v] {
                let d = polygon_distance(&vertices[a].shape, &vertices[b].shape);
                if d > 0 && d < limit {
                    conflict_edges.push(ConflictEdge {
                        u: a.min(b),
                        v: a.max(b),
                        cut: None,
                    });
                }
            }
        }
    }
    conflict_edges.sort_unstable();
    stitch_edges.sort_unstable();

    LayoutGraph {
        features: graph.features,
        vertices,
        segments_of,
        conflict_edges,
        stitch_edges,
    }
}

/// Label each conflict edge with the candidate that can remove it.
pub fn annotate_end_cuts(mut graph: LayoutGraph, candidates: &[EndCutCandidate]) -> Result<LayoutGraph, LayoutError> {
    for e in &mut graph.conflict_edges {
        e.cut = None;
    }
    for c in candidates {
        let edge = graph.edge_between(c.a, c.b).ok_or(LayoutError::UnknownEdge {
            cut: c.id,
            a: c.a,
            b: c.b,
        })?;
        let slot = &mut graph.conflict_edges[edge].cut;
        if let Some(first) = *slot {
            return Err(LayoutError::DuplicateCandidate {
                edge,
                first,
                second: c.id,
            });
        }
        *slot = Some(c.id);
    }
    Ok(graph)
}
