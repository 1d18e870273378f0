//! Layout and result files.
//!
//! Both are JSON laid out one record per line so fixtures stay readable and
//! diff cleanly. Layout files carry a `format: 1` field:
//!
//! ```text
//! {"format":1,"units":"nm","w_min":10,"s_min":10,
//! "features":[
//! {"id":0,"rects":[[0,0,140,10]]},
//! {"id":1,"rects":[[0,20,300,30]]}
//! ]}
//! ```
//!
//! Optional rule overrides: `dis_m`, `dis_c`, `w_th`, `merge_gap` (integers)
//! and `alpha` (a decimal or `"n/d"` string, or a JSON number).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::cost::{format_decimal, parse_decimal, Cost};
use crate::decomposer::{Decomposition, SubStats};
use crate::geometry::{Axis, Polygon, Rect};
use crate::layout_graph::{build_conflict_edges, Feature, LayoutError, VertexKey};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}, ")?;
        }
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid layout: {0}")]
    Validation(#[from] ValidationError),
}

/// A parsed and validated layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutFile {
    pub w_min: i64,
    pub s_min: i64,
    pub dis_m: Option<i64>,
    pub dis_c: Option<i64>,
    pub w_th: Option<i64>,
    pub merge_gap: Option<i64>,
    pub alpha: Option<Cost>,
    /// Sorted by id; ids are `0..n`.
    pub features: Vec<Feature>,
}

impl LayoutFile {
    pub fn new(w_min: i64, s_min: i64, features: Vec<Feature>) -> Self {
        Self {
            w_min,
            s_min,
            dis_m: None,
            dis_c: None,
            w_th: None,
            merge_gap: None,
            alpha: None,
            features,
        }
    }

    /// Rules with defaults filled in; unset `dis_c` and `w_th` follow
    /// `dis_m`.
    pub fn config(&self) -> Config {
        let mut cfg = Config::from_rules(self.w_min, self.s_min);
        if let Some(d) = self.dis_m {
            cfg.dis_m = d;
            cfg.dis_c = d;
            cfg.w_th = d;
        }
        if let Some(d) = self.dis_c {
            cfg.dis_c = d;
        }
        if let Some(w) = self.w_th {
            cfg.w_th = w;
        }
        if let Some(g) = self.merge_gap {
            cfg.merge_gap = g;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        cfg
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    format: u32,
    units: String,
    w_min: i64,
    s_min: i64,
    #[serde(default)]
    dis_m: Option<i64>,
    #[serde(default)]
    dis_c: Option<i64>,
    #[serde(default)]
    w_th: Option<i64>,
    #[serde(default)]
    merge_gap: Option<i64>,
    #[serde(default)]
    alpha: Option<serde_json::Value>,
    features: Vec<RawFeature>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeature {
    id: usize,
    rects: Vec<[i64; 4]>,
}

/// Line of the `k`-th `"id"` key: features are the only objects with one.
fn feature_line(text: &str, k: usize) -> Option<usize> {
    let mut seen = 0;
    for (i, line) in text.lines().enumerate() {
        for _ in line.matches("\"id\"") {
            if seen == k {
                return Some(i + 1);
            }
            seen += 1;
        }
    }
    None
}

fn field_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

pub fn parse_layout_str(text: &str) -> Result<LayoutFile, IoError> {
    let raw: RawLayout = serde_json::from_str(text).map_err(ParseError::from)?;
    let invalid = |line: Option<usize>, field: String, message: String| IoError::Validation(ValidationError { line, field, message });

    if raw.format != FORMAT_VERSION {
        return Err(invalid(field_line(text, "format"), "format".into(), format!("unsupported version {}", raw.format)));
    }
    if raw.units != "nm" {
        return Err(invalid(field_line(text, "units"), "units".into(), format!("expected \"nm\", got {:?}", raw.units)));
    }
    let alpha = match &raw.alpha {
        None => None,
        Some(v) => {
            let text_value = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => other.to_string(),
            };
            let a = parse_decimal(&text_value).ok_or_else(|| {
                invalid(field_line(text, "alpha"), "alpha".into(), format!("not a decimal or fraction: {text_value}"))
            })?;
            Some(a)
        }
    };

    let mut features = Vec::with_capacity(raw.features.len());
    let mut position_of = BTreeMap::new();
    for (k, f) in raw.features.iter().enumerate() {
        let line = feature_line(text, k);
        if let Some(prev) = position_of.insert(f.id, k) {
            return Err(invalid(line, format!("features[{k}].id"), format!("duplicate id {} (first at features[{prev}])", f.id)));
        }
        let mut rects = Vec::with_capacity(f.rects.len());
        for (j, r) in f.rects.iter().enumerate() {
            let rect = Rect::new(r[0], r[1], r[2], r[3]).map_err(|e| invalid(line, format!("features[{k}].rects[{j}]"), e.to_string()))?;
            rects.push(rect);
        }
        let shape = Polygon::new(rects).map_err(|e| invalid(line, format!("features[{k}].rects"), e.to_string()))?;
        features.push(Feature::new(f.id, shape));
    }
    features.sort_by_key(|f| f.id);
    if let Some(pos) = features.iter().enumerate().position(|(i, f)| f.id != i) {
        let k = position_of[&features[pos].id];
        return Err(invalid(
            feature_line(text, k),
            format!("features[{k}].id"),
            format!("ids must be 0..{} without gaps; {} is missing", features.len(), pos),
        ));
    }

    let layout = LayoutFile {
        w_min: raw.w_min,
        s_min: raw.s_min,
        dis_m: raw.dis_m,
        dis_c: raw.dis_c,
        w_th: raw.w_th,
        merge_gap: raw.merge_gap,
        alpha,
        features,
    };
    let cfg = layout.config();
    if let Err(e) = cfg.validate() {
        return Err(invalid(None, "rules".into(), e.to_string()));
    }
    match build_conflict_edges(layout.features.clone(), &cfg) {
        Ok(_) => Ok(layout),
        Err(LayoutError::OverlappingInput(a, b)) => Err(invalid(
            feature_line(text, position_of[&b]),
            "features".into(),
            format!("features {a} and {b} overlap or touch"),
        )),
        Err(e) => Err(invalid(None, "features".into(), e.to_string())),
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_layout(path: &Path) -> Result<LayoutFile, IoError> {
    parse_layout_str(&read(path)?)
}

/// Features and resolved rules of a layout file.
pub fn parse_layout(path: &Path) -> Result<(Vec<Feature>, Config), IoError> {
    let layout = read_layout(path)?;
    let cfg = layout.config();
    Ok((layout.features, cfg))
}

fn rect_json(r: &Rect) -> String {
    let [x0, y0, x1, y1] = r.coords();
    format!("[{x0},{y0},{x1},{y1}]")
}

pub fn emit_layout(layout: &LayoutFile) -> String {
    let mut out = format!("{{\"format\":{FORMAT_VERSION},\"units\":\"nm\",\"w_min\":{},\"s_min\":{}", layout.w_min, layout.s_min);
    for (key, value) in [
        ("dis_m", layout.dis_m),
        ("dis_c", layout.dis_c),
        ("w_th", layout.w_th),
        ("merge_gap", layout.merge_gap),
    ] {
        if let Some(v) = value {
            let _ = write!(out, ",\"{key}\":{v}");
        }
    }
    if let Some(a) = layout.alpha {
        let _ = write!(out, ",\"alpha\":\"{}\"", format_decimal(&a));
    }
    out.push_str(",\n\"features\":[\n");
    for (i, f) in layout.features.iter().enumerate() {
        let rects: Vec<String> = f.shape.rects().iter().map(rect_json).collect();
        let sep = if i + 1 == layout.features.len() { "" } else { "," };
        let _ = writeln!(out, "{{\"id\":{},\"rects\":[{}]}}{sep}", f.id, rects.join(","));
    }
    out.push_str("]}\n");
    out
}

/// Rules and switches a result was produced with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigRecord {
    pub w_min: i64,
    pub s_min: i64,
    pub dis_m: i64,
    pub dis_c: i64,
    pub w_th: i64,
    pub merge_gap: i64,
    pub alpha: String,
    pub stitch: bool,
    pub preselect: bool,
    pub bridges: bool,
}

impl ConfigRecord {
    pub fn from_config(cfg: &Config) -> Self {
        Self {
            w_min: cfg.w_min,
            s_min: cfg.s_min,
            dis_m: cfg.dis_m,
            dis_c: cfg.dis_c,
            w_th: cfg.w_th,
            merge_gap: cfg.merge_gap,
            alpha: format_decimal(&cfg.alpha),
            stitch: cfg.enable_stitch,
            preselect: cfg.enable_preselect,
            bridges: cfg.enable_bridges,
        }
    }

    pub fn to_config(&self) -> Option<Config> {
        let mut cfg = Config::from_rules(self.w_min, self.s_min);
        cfg.dis_m = self.dis_m;
        cfg.dis_c = self.dis_c;
        cfg.w_th = self.w_th;
        cfg.merge_gap = self.merge_gap;
        cfg.alpha = parse_decimal(&self.alpha)?;
        cfg.enable_stitch = self.stitch;
        cfg.enable_preselect = self.preselect;
        cfg.enable_bridges = self.bridges;
        Some(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Two masks plus trim mask.
    TwoMask,
    /// Three-color baseline.
    ThreeColor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutRecord {
    pub id: usize,
    pub between: [VertexKey; 2],
    pub rect: [i64; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StitchRecord {
    pub feature: usize,
    pub between: [VertexKey; 2],
    /// `"x"`: the stitch is the vertical line `x = at`; `"y"` likewise.
    pub axis: String,
    pub at: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatRecord {
    pub vertices: usize,
    pub variables: usize,
    pub constraints: usize,
    pub nodes: u64,
    pub cost: String,
    pub proven_optimal: bool,
}

impl StatRecord {
    fn from_stats(s: &SubStats) -> Self {
        Self {
            vertices: s.vertices,
            variables: s.variables,
            constraints: s.constraints,
            nodes: s.nodes_explored,
            cost: format_decimal(&s.cost),
            proven_optimal: s.proven_optimal,
        }
    }
}

/// Decomposition result as written to disk. Solve times are left out so
/// reruns produce identical files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub format: u32,
    pub mode: Mode,
    pub config: ConfigRecord,
    pub cost: String,
    pub proven_optimal: bool,
    /// Mask (1, 2; or color 1..=3 in three-color mode) per vertex.
    pub colors: BTreeMap<VertexKey, u8>,
    pub selected_cuts: Vec<CutRecord>,
    /// Trim-mask shapes with merged pairs as their union box.
    pub trim_cuts: Vec<[i64; 4]>,
    pub conflicts: Vec<[VertexKey; 2]>,
    pub stitches: Vec<StitchRecord>,
    pub stats: Vec<StatRecord>,
}

pub fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::Horizontal => "x",
        Axis::Vertical => "y",
    }
}

impl ResultFile {
    pub fn from_decomposition(d: &Decomposition, cfg: &Config, mode: Mode) -> Self {
        let lg = &d.graph;
        let key = |v: usize| lg.vertex_key(v);
        let r = &d.result;
        Self {
            format: FORMAT_VERSION,
            mode,
            config: ConfigRecord::from_config(cfg),
            cost: format_decimal(&r.cost),
            proven_optimal: d.proven_optimal,
            colors: (0..lg.vertex_count()).map(|v| (key(v), r.colors[v] + 1)).collect(),
            selected_cuts: r
                .selected_cuts
                .iter()
                .map(|&c| {
                    let n = &d.endcuts.nodes[c];
                    CutRecord {
                        id: c,
                        between: [key(n.a), key(n.b)],
                        rect: n.rect.coords(),
                    }
                })
                .collect(),
            trim_cuts: r.trim_shapes.iter().map(Rect::coords).collect(),
            conflicts: r
                .conflicts
                .iter()
                .map(|&e| {
                    let e = &lg.conflict_edges[e];
                    [key(e.u), key(e.v)]
                })
                .collect(),
            stitches: r
                .stitches
                .iter()
                .map(|&s| {
                    let s = &lg.stitch_edges[s];
                    StitchRecord {
                        feature: lg.vertices[s.u].feature,
                        between: [key(s.u), key(s.v)],
                        axis: axis_name(s.axis).to_string(),
                        at: s.at,
                    }
                })
                .collect(),
            stats: d.stats.iter().map(StatRecord::from_stats).collect(),
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("result records always serialize")
}

fn push_list<T: Serialize>(out: &mut String, key: &str, items: &[T], last: bool) {
    let _ = write!(out, "\"{key}\":[");
    for (i, item) in items.iter().enumerate() {
        let sep = if i + 1 == items.len() { "" } else { "," };
        let _ = write!(out, "\n{}{sep}", json(item));
    }
    if !items.is_empty() {
        out.push('\n');
    }
    out.push(']');
    out.push_str(if last { "\n" } else { ",\n" });
}

pub fn emit_result(r: &ResultFile) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "\"format\":{},", r.format);
    let _ = writeln!(out, "\"mode\":{},", json(&r.mode));
    let _ = writeln!(out, "\"config\":{},", json(&r.config));
    let _ = writeln!(out, "\"cost\":{},", json(&r.cost));
    let _ = writeln!(out, "\"proven_optimal\":{},", r.proven_optimal);
    out.push_str("\"colors\":{");
    for (i, (k, c)) in r.colors.iter().enumerate() {
        let sep = if i + 1 == r.colors.len() { "" } else { "," };
        let _ = write!(out, "\n\"{k}\":{c}{sep}");
    }
    if !r.colors.is_empty() {
        out.push('\n');
    }
    out.push_str("},\n");
    push_list(&mut out, "selected_cuts", &r.selected_cuts, false);
    push_list(&mut out, "trim_cuts", &r.trim_cuts, false);
    push_list(&mut out, "conflicts", &r.conflicts, false);
    push_list(&mut out, "stitches", &r.stitches, false);
    push_list(&mut out, "stats", &r.stats, true);
    out.push_str("}\n");
    out
}

pub fn parse_result_str(text: &str) -> Result<ResultFile, ParseError> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_result(path: &Path) -> Result<ResultFile, IoError> {
    Ok(parse_result_str(&read(path)?)?)
}

/// Short human-readable summary.
pub fn text_report(r: &ResultFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", json(&r.mode).trim_matches('"'));
    let _ = writeln!(out, "cost: {}", r.cost);
    let _ = writeln!(out, "conflicts: {}", r.conflicts.len());
    let _ = writeln!(out, "stitches: {}", r.stitches.len());
    let _ = writeln!(out, "trim cuts: {} ({} selected candidates)", r.trim_cuts.len(), r.selected_cuts.len());
    let _ = writeln!(out, "sub-problems: {}", r.stats.len());
    let _ = writeln!(out, "proven optimal: {}", r.proven_optimal);
    for (a, b) in r.conflicts.iter().map(|[a, b]| (a, b)) {
        let _ = writeln!(out, "  conflict {a} - {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposer::decompose;
    use crate::fixtures::{clique4_motif, stitch_triangle};
    use proptest::prelude::*;

    const MINIMAL: &str = "{\"format\":1,\"units\":\"nm\",\"w_min\":10,\"s_min\":10,\n\"features\":[\n{\"id\":0,\"rects\":[[0,0,100,10]]}\n]}\n";

    #[test]
    fn minimal_file_gets_default_rules() {
        let layout = parse_layout_str(MINIMAL).unwrap();
        assert_eq!(layout.features.len(), 1);
        let cfg = layout.config();
        assert_eq!(cfg.dis_m, 50);
        assert_eq!(cfg.w_th, 50);
        assert_eq!(cfg.dis_c, 50);
        assert_eq!(cfg.alpha, Cost::new(1, 10));
        assert_eq!(emit_layout(&layout), MINIMAL);
    }

    #[test]
    fn overrides_and_alpha_forms() {
        let text = MINIMAL.replace("\"s_min\":10", "\"s_min\":10,\"dis_m\":40,\"alpha\":0.25");
        let cfg = parse_layout_str(&text).unwrap().config();
        assert_eq!((cfg.dis_m, cfg.w_th, cfg.alpha), (40, 40, Cost::new(1, 4)));
        let text = MINIMAL.replace("\"s_min\":10", "\"s_min\":10,\"alpha\":\"1/3\"");
        assert_eq!(parse_layout_str(&text).unwrap().config().alpha, Cost::new(1, 3));
    }

    fn validation(text: &str) -> ValidationError {
        match parse_layout_str(text) {
            Err(IoError::Validation(v)) => v,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn overlapping_features_are_rejected_with_line() {
        let text = "{\"format\":1,\"units\":\"nm\",\"w_min\":10,\"s_min\":10,\n\"features\":[\n{\"id\":0,\"rects\":[[0,0,100,10]]},\n{\"id\":1,\"rects\":[[50,5,150,20]]}\n]}\n";
        let v = validation(text);
        assert_eq!(v.line, Some(4));
        assert!(v.message.contains("overlap"));
    }

    #[test]
    fn bad_rects_ids_and_syntax() {
        let bad_rect = MINIMAL.replace("[0,0,100,10]", "[100,0,0,10]");
        assert_eq!(validation(&bad_rect).field, "features[0].rects[0]");
        let dup = MINIMAL.replace(
            "{\"id\":0,\"rects\":[[0,0,100,10]]}",
            "{\"id\":0,\"rects\":[[0,0,100,10]]},\n{\"id\":0,\"rects\":[[0,100,100,110]]}",
        );
        let v = validation(&dup);
        assert!(v.message.contains("duplicate"));
        assert_eq!(v.line, Some(4));
        let gap = MINIMAL.replace("\"id\":0", "\"id\":3");
        assert!(validation(&gap).message.contains("without gaps"));
        let units = MINIMAL.replace("\"nm\"", "\"um\"");
        assert_eq!(validation(&units).field, "units");
        match parse_layout_str("{\"format\":1,\n\"units\":\"nm\",\n\"w_min\":\"x\"}") {
            Err(IoError::Parse(p)) => assert_eq!(p.line, 3),
            other => panic!("{other:?}"),
        }
        let unknown = MINIMAL.replace("\"w_min\"", "\"bogus\":1,\"w_min\"");
        assert!(matches!(parse_layout_str(&unknown), Err(IoError::Parse(_))));
    }

    #[test]
    fn result_round_trips() {
        let cfg = Config::from_rules(10, 10);
        for features in [clique4_motif(), stitch_triangle(), Vec::new()] {
            let d = decompose(features, &cfg).unwrap();
            let r = ResultFile::from_decomposition(&d, &cfg, Mode::TwoMask);
            let text = emit_result(&r);
            assert_eq!(parse_result_str(&text).unwrap(), r);
            assert_eq!(emit_result(&parse_result_str(&text).unwrap()), text);
        }
    }

    fn arb_layout() -> impl Strategy<Value = LayoutFile> {
        let feature = (0i64..20, 0i64..20, 1i64..60, 1i64..8, any::<bool>());
        (
            proptest::collection::vec(feature, 0..12),
            proptest::option::of(20i64..80),
            proptest::option::of((0i64..5, 1i64..20)),
        )
            .prop_map(|(specs, dis_m, alpha)| {
                let features = specs
                    .into_iter()
                    .enumerate()
                    .map(|(i, (cx, cy, w, h, ell))| {
                        let (x, y) = (i as i64 * 200 + cx, cy);
                        let base = Rect::from_coords(x, y, x + w, y + h);
                        let shape = if ell {
                            Polygon::new(vec![base, Rect::from_coords(x, y + h, x + 3, y + h + 40)]).unwrap()
                        } else {
                            Polygon::from_rect(base)
                        };
                        Feature::new(i, shape)
                    })
                    .collect();
                let mut l = LayoutFile::new(10, 10, features);
                l.dis_m = dis_m;
                l.alpha = alpha.map(|(n, d)| Cost::new(n, d));
                l
            })
    }

    proptest! {
        #[test]
        fn layout_round_trips(l in arb_layout()) {
            let text = emit_layout(&l);
            let back = parse_layout_str(&text).unwrap();
            prop_assert_eq!(&back, &l);
            prop_assert_eq!(emit_layout(&back), text);
        }
    }
}
