//! SVG rendering of a decomposition: one fill per mask, hatched trim
//! shapes on top, unresolved conflicts as red arrows.
//!
//! Output depends only on its inputs (fixed element order, integer
//! coordinates), so identical results render to identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::endcut::EndCutGraph;
use crate::geometry::{Axis, Rect};
use crate::ilp_model::DecompResult;
use crate::io::{write_file, IoError};
use crate::layout_graph::LayoutGraph;

const MARGIN: i64 = 20;
const MASK_FILLS: [&str; 3] = ["#4f81bd", "#f2a541", "#7fb069"];

pub fn render_svg(lg: &LayoutGraph, eg: &EndCutGraph, result: &DecompResult) -> String {
    let mut bbox: Option<Rect> = None;
    let mut grow = |r: &Rect| bbox = Some(bbox.map_or(*r, |b| b.union_bbox(r)));
    for f in &lg.features {
        for r in f.shape.rects() {
            grow(r);
        }
    }
    for &c in &result.selected_cuts {
        grow(&eg.nodes[c].rect);
    }
    let b = bbox.unwrap_or_else(|| Rect::from_coords(0, 0, 100, 100));
    let (x0, y1) = (b.lo.x - MARGIN, b.hi.y + MARGIN);
    let (w, h) = (b.width() + 2 * MARGIN, b.height() + 2 * MARGIN);
    // Layout y grows upward, SVG y downward.
    let px = |x: i64| x - x0;
    let py = |y: i64| y1 - y;
    let rect = |r: &Rect| {
        format!(
            "x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
            px(r.lo.x),
            py(r.hi.y),
            r.width(),
            r.height()
        )
    };
    let center = |v: usize| {
        let bb = lg.vertices[v].shape.bbox();
        // Doubled to stay in integers.
        (px(bb.lo.x) + px(bb.hi.x), py(bb.lo.y) + py(bb.hi.y))
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    out.push_str(
        "<defs>\n\
         <pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#000\" stroke-width=\"2\"/></pattern>\n\
         <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">\
         <path d=\"M0,0 L10,5 L0,10 z\" fill=\"#d62728\"/></marker>\n\
         </defs>\n",
    );
    let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");

    out.push_str("<g id=\"masks\" stroke=\"#333333\" stroke-width=\"1\">\n");
    for (v, seg) in lg.vertices.iter().enumerate() {
        let fill = MASK_FILLS[result.colors.get(v).copied().unwrap_or(0) as usize % MASK_FILLS.len()];
        for r in seg.shape.rects() {
            let _ = writeln!(out, "<rect {} fill=\"{fill}\" data-vertex=\"{}\"/>", rect(r), lg.vertex_key(v));
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"stitches\" stroke=\"#000000\" stroke-width=\"1\" stroke-dasharray=\"3,2\">\n");
    for &s in &result.stitches {
        let s = &lg.stitch_edges[s];
        let bb = lg.vertices[s.u].shape.bbox().union_bbox(&lg.vertices[s.v].shape.bbox());
        let (a, b) = match s.axis {
            Axis::Horizontal => ((px(s.at), py(bb.lo.y)), (px(s.at), py(bb.hi.y))),
            Axis::Vertical => ((px(bb.lo.x), py(s.at)), (px(bb.hi.x), py(s.at))),
        };
        let _ = writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", a.0, a.1, b.0, b.1);
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"trim\" fill=\"url(#hatch)\" stroke=\"#000000\" stroke-width=\"1\">\n");
    for r in &result.trim_shapes {
        let _ = writeln!(out, "<rect {}/>", rect(r));
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"conflicts\" stroke=\"#d62728\" stroke-width=\"2\" marker-start=\"url(#arrow)\" marker-end=\"url(#arrow)\">\n");
    let mut pairs: Vec<(usize, usize)> = result
        .conflicts
        .iter()
        .map(|&e| (lg.conflict_edges[e].u, lg.conflict_edges[e].v))
        .collect();
    pairs.sort_unstable();
    for (u, v) in pairs {
        let (a, b) = (center(u), center(v));
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            half(a.0),
            half(a.1),
            half(b.0),
            half(b.1)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Halve a doubled coordinate, keeping `.5` exact.
fn half(v: i64) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{}.5", v.div_euclid(2))
    }
}

pub fn emit_svg(lg: &LayoutGraph, eg: &EndCutGraph, result: &DecompResult, path: &Path) -> Result<(), IoError> {
    write_file(path, &render_svg(lg, eg, result))
}
