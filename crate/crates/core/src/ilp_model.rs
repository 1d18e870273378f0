//! 0-1 integer programs over the layout and end-cut graphs.
//!
//! Every row has the form `sum(coef * var) <= rhs` with integer coefficients.
//! Colors are `x = 0` (first mask) or `x = 1` (second mask). The objective
//! only charges conflict and stitch variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cost::{common_denominator, format_decimal, Cost};
use crate::decomposer::SubProblem;
use crate::endcut::EndCutGraph;
use crate::geometry::Rect;
use crate::layout_graph::LayoutGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("conflict edge {edge} refers to end-cut {cut}, which the end-cut graph does not hold for that edge")]
    InconsistentAnnotation { edge: usize, cut: usize },
    #[error("assignment has {got} values for {expected} variables")]
    WrongLength { expected: usize, got: usize },
    #[error("assignment violates row {row}: {what}")]
    InfeasibleAssignment { row: usize, what: String },
    #[error("objective value {model} disagrees with recomputed cost {recomputed}")]
    CostMismatch { model: String, recomputed: String },
}

/// What a variable stands for. Vertex and edge ids refer to the layout graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Color { vertex: usize },
    /// One of the two bits of a three-color vertex.
    ColorBit { vertex: usize, bit: u8 },
    Conflict { edge: usize, u: usize, v: usize },
    EndCut { cut: usize, u: usize, v: usize },
    /// Product of the cuts on `(u, k)` and `(v, k)` for conflict edge `(u, v)`.
    Merge { edge: usize, k: usize, cut_a: usize, cut_b: usize, u: usize, v: usize },
    Stitch { edge: usize, u: usize, v: usize },
}

impl VarKind {
    /// Family position in the branching order.
    pub fn family_rank(&self) -> u8 {
        match self {
            VarKind::Color { .. } | VarKind::ColorBit { .. } => 0,
            VarKind::EndCut { .. } => 1,
            VarKind::Merge { .. } => 2,
            VarKind::Conflict { .. } => 3,
            VarKind::Stitch { .. } => 4,
        }
    }

    /// Layout vertices the variable talks about.
    pub fn vertices(&self) -> Vec<usize> {
        match *self {
            VarKind::Color { vertex } | VarKind::ColorBit { vertex, .. } => vec![vertex],
            VarKind::Conflict { u, v, .. } | VarKind::EndCut { u, v, .. } | VarKind::Stitch { u, v, .. } => vec![u, v],
            VarKind::Merge { u, v, k, .. } => vec![u, v, k],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

/// Why a row exists; used to name violated constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Both ends of a conflict edge on the second mask.
    ConflictSecondMask { edge: usize },
    /// Both ends of a conflict edge on the first mask.
    ConflictFirstMask { edge: usize },
    SolidPair { p: usize, q: usize },
    /// A selected cut needs both ends on one mask.
    CutMasks { cut: usize },
    MergeAtLeast { var: usize },
    MergeBelowCut { var: usize, cut: usize },
    StitchSplit { edge: usize },
    /// Without stitching the segments of a feature share a mask.
    StitchTied { edge: usize },
    OneColor { vertex: usize },
    SameColor { edge: usize, color: u8 },
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowKind::ConflictSecondMask { edge } => write!(f, "conflict edge {edge} uncounted with both ends on mask 2"),
            RowKind::ConflictFirstMask { edge } => write!(f, "conflict edge {edge} uncounted with both ends on mask 1"),
            RowKind::SolidPair { p, q } => write!(f, "solid end-cut pair ({p}, {q}) both selected"),
            RowKind::CutMasks { cut } => write!(f, "end-cut {cut} selected across different masks"),
            RowKind::MergeAtLeast { var } => write!(f, "merge variable {var} below the product of its cuts"),
            RowKind::MergeBelowCut { var, cut } => write!(f, "merge variable {var} set without end-cut {cut}"),
            RowKind::StitchSplit { edge } => write!(f, "stitch edge {edge} splits masks without being counted"),
            RowKind::StitchTied { edge } => write!(f, "stitch edge {edge} splits masks while stitching is off"),
            RowKind::OneColor { vertex } => write!(f, "vertex {vertex} has both color bits set"),
            RowKind::SameColor { edge, color } => write!(f, "conflict edge {edge} uncounted with both ends on color {color}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub terms: Vec<(usize, i64)>,
    pub rhs: i64,
    pub kind: RowKind,
}

impl Constraint {
    pub fn activity(&self, assignment: &[u8]) -> i64 {
        self.terms.iter().map(|&(v, a)| a * assignment[v] as i64).sum()
    }

    pub fn holds(&self, assignment: &[u8]) -> bool {
        self.activity(assignment) <= self.rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Conflict rows forgive merged cut pairs.
    Corrected,
    /// Conflict rows only see the edge's own cut.
    Uncorrected,
    /// Three-color baseline without end-cuts or stitches.
    ThreeColor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<(usize, Cost)>,
    pub constraints: Vec<Constraint>,
    pub flavor: Flavor,
    /// Stitch weight, `None` when stitches are tied.
    pub alpha: Option<Cost>,
    /// Cuts applied up front by contraction; constant 1 in the model.
    pub fixed_cuts: Vec<usize>,
    /// Color variable (or first color bit) of every covered vertex,
    /// contracted vertices included.
    pub color_var: BTreeMap<usize, usize>,
    pub cut_var: BTreeMap<usize, usize>,
}

impl IlpModel {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, assignment: &[u8]) -> Cost {
        self.objective
            .iter()
            .filter(|(v, _)| assignment[*v] == 1)
            .map(|(_, w)| *w)
            .sum()
    }

    /// First violated row, if any.
    pub fn violated_row(&self, assignment: &[u8]) -> Option<usize> {
        self.constraints.iter().position(|c| !c.holds(assignment))
    }

    /// CPLEX LP text. Objective weights are scaled to integers by their
    /// common denominator, noted in a leading comment.
    pub fn to_lp(&self) -> String {
        let scale = common_denominator(self.objective.iter().map(|(_, w)| w));
        let mut out = String::new();
        let _ = writeln!(out, "\\ leleec model, objective scaled by {scale}");
        out.push_str("Minimize\n obj:");
        if self.objective.is_empty() {
            out.push_str(" 0");
        }
        for (i, (v, w)) in self.objective.iter().enumerate() {
            let coef = (*w * Cost::from_integer(scale)).to_integer();
            push_term(&mut out, coef, &self.variables[*v].name, i == 0);
        }
        out.push_str("\nSubject To\n");
        for (r, row) in self.constraints.iter().enumerate() {
            let _ = write!(out, " r{r}:");
            for (i, (v, a)) in row.terms.iter().enumerate() {
                push_term(&mut out, *a, &self.variables[*v].name, i == 0);
            }
            let _ = writeln!(out, " <= {}", row.rhs);
        }
        out.push_str("Binary\n");
        for v in &self.variables {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("End\n");
        out
    }
}

fn push_term(out: &mut String, coef: i64, name: &str, first: bool) {
    let sign = if coef < 0 { "-" } else if first { "" } else { "+" };
    let mag = coef.abs();
    let sep = if sign.is_empty() { "" } else { " " };
    if mag == 1 {
        let _ = write!(out, " {sign}{sep}{name}");
    } else {
        let _ = write!(out, " {sign}{sep}{mag} {name}");
    }
}

/// A model-level literal: a variable or the constant 1.
#[derive(Clone, Copy)]
enum Lit {
    Var(usize),
    One,
}

#[derive(Default)]
struct RowBuilder {
    terms: BTreeMap<usize, i64>,
    rhs: i64,
}

impl RowBuilder {
    fn new(rhs: i64) -> Self {
        Self { terms: BTreeMap::new(), rhs }
    }

    fn add(mut self, lit: Lit, coef: i64) -> Self {
        match lit {
            Lit::Var(v) => *self.terms.entry(v).or_insert(0) += coef,
            Lit::One => self.rhs -= coef,
        }
        self
    }

    /// `None` when the row can never be violated.
    fn finish(self, kind: RowKind) -> Option<Constraint> {
        let terms: Vec<(usize, i64)> = self.terms.into_iter().filter(|&(_, a)| a != 0).collect();
        let max_activity: i64 = terms.iter().map(|&(_, a)| a.max(0)).sum();
        (max_activity > self.rhs).then_some(Constraint {
            terms,
            rhs: self.rhs,
            kind,
        })
    }
}

/// Options shared by the model builders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelOptions {
    pub flavor: Flavor,
    /// Stitch weight; `None` ties every stitch edge.
    pub alpha: Option<Cost>,
}

struct Builder<'a> {
    sub: &'a SubProblem,
    model: IlpModel,
}

impl<'a> Builder<'a> {
    fn var(&mut self, name: String, kind: VarKind) -> usize {
        self.model.variables.push(Variable { name, kind });
        self.model.variables.len() - 1
    }

    fn row(&mut self, row: RowBuilder, kind: RowKind) {
        if let Some(c) = row.finish(kind) {
            self.model.constraints.push(c);
        }
    }

    fn color(&self, v: usize) -> Lit {
        Lit::Var(self.model.color_var[&self.sub.rep(v)])
    }

    fn cut(&self, cut: usize) -> Option<Lit> {
        if self.sub.preselected.binary_search(&cut).is_ok() {
            Some(Lit::One)
        } else {
            self.model.cut_var.get(&cut).map(|&v| Lit::Var(v))
        }
    }
}

fn check_annotations(lg: &LayoutGraph, eg: &EndCutGraph, edges: &[usize]) -> Result<(), ModelError> {
    for &e in edges {
        let edge = &lg.conflict_edges[e];
        if let Some(cut) = edge.cut {
            let ok = eg
                .nodes
                .get(cut)
                .is_some_and(|c| c.id == cut && (c.a, c.b) == (edge.u, edge.v));
            if !ok {
                return Err(ModelError::InconsistentAnnotation { edge: e, cut });
            }
        }
    }
    Ok(())
}

/// Two-mask model over one sub-problem.
pub fn build_for(lg: &LayoutGraph, eg: &EndCutGraph, sub: &SubProblem, opts: &ModelOptions) -> Result<IlpModel, ModelError> {
    if opts.flavor == Flavor::ThreeColor {
        return build_three_color(lg, sub);
    }
    check_annotations(lg, eg, &sub.conflict_edges)?;
    let mut b = Builder {
        sub,
        model: IlpModel {
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
            flavor: opts.flavor,
            alpha: opts.alpha,
            fixed_cuts: sub.preselected.clone(),
            color_var: BTreeMap::new(),
            cut_var: BTreeMap::new(),
        },
    };

    for &v in &sub.vertices {
        if sub.rep(v) == v {
            let key = lg.vertex_key(v);
            let x = b.var(format!("x{}", key.to_string().replace('.', "_")), VarKind::Color { vertex: v });
            b.model.color_var.insert(v, x);
        }
    }
    for &v in &sub.vertices {
        let r = sub.rep(v);
        if r != v {
            let x = b.model.color_var[&r];
            b.model.color_var.insert(v, x);
        }
    }

    // Conflict edges whose own cut is applied up front vanish.
    let live_edges: Vec<usize> = sub
        .conflict_edges
        .iter()
        .copied()
        .filter(|&e| !lg.conflict_edges[e].cut.is_some_and(|c| sub.preselected.binary_search(&c).is_ok()))
        .collect();

    let mut c_var = BTreeMap::new();
    for &e in &live_edges {
        let edge = &lg.conflict_edges[e];
        let c = b.var(format!("c{}_{}", edge.u, edge.v), VarKind::Conflict { edge: e, u: edge.u, v: edge.v });
        b.model.objective.push((c, Cost::one()));
        c_var.insert(e, c);
    }
    for &cut in &sub.cuts {
        if sub.preselected.binary_search(&cut).is_err() {
            let node = &eg.nodes[cut];
            let ec = b.var(format!("ec{cut}"), VarKind::EndCut { cut, u: node.a, v: node.b });
            b.model.cut_var.insert(cut, ec);
        }
    }

    // Merge products: for edge (u, v), any common neighbor k whose cuts on
    // (u, k) and (v, k) may merge.
    let mut adjacency: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for &e in &sub.conflict_edges {
        let edge = &lg.conflict_edges[e];
        adjacency.entry(edge.u).or_default().insert(edge.v, e);
        adjacency.entry(edge.v).or_default().insert(edge.u, e);
    }
    let mut forgive: BTreeMap<usize, Vec<Lit>> = BTreeMap::new();
    if opts.flavor == Flavor::Corrected {
        for &e in &live_edges {
            let edge = &lg.conflict_edges[e];
            let (Some(nu), Some(nv)) = (adjacency.get(&edge.u), adjacency.get(&edge.v)) else {
                continue;
            };
            for (&k, &euk) in nu {
                let Some(&evk) = nv.get(&k) else {
                    continue;
                };
                let (Some(p), Some(q)) = (lg.conflict_edges[euk].cut, lg.conflict_edges[evk].cut) else {
                    continue;
                };
                if !eg.is_dash(p, q) {
                    continue;
                }
                let (Some(lp), Some(lq)) = (b.cut(p), b.cut(q)) else {
                    continue;
                };
                let lit = match (lp, lq) {
                    (Lit::One, Lit::One) => Lit::One,
                    (Lit::One, other) | (other, Lit::One) => other,
                    (Lit::Var(_), Lit::Var(_)) => {
                        let g = b.var(
                            format!("g{}_{}_{}", edge.u, edge.v, k),
                            VarKind::Merge {
                                edge: e,
                                k,
                                cut_a: p,
                                cut_b: q,
                                u: edge.u,
                                v: edge.v,
                            },
                        );
                        b.row(RowBuilder::new(1).add(lp, 1).add(lq, 1).add(Lit::Var(g), -1), RowKind::MergeAtLeast { var: g });
                        b.row(RowBuilder::new(0).add(Lit::Var(g), 1).add(lp, -1), RowKind::MergeBelowCut { var: g, cut: p });
                        b.row(RowBuilder::new(0).add(Lit::Var(g), 1).add(lq, -1), RowKind::MergeBelowCut { var: g, cut: q });
                        Lit::Var(g)
                    }
                };
                forgive.entry(e).or_default().push(lit);
            }
        }
    }

    for &e in &live_edges {
        let edge = &lg.conflict_edges[e];
        let (xu, xv) = (b.color(edge.u), b.color(edge.v));
        let mut cover = vec![Lit::Var(c_var[&e])];
        if let Some(l) = edge.cut.and_then(|c| b.cut(c)) {
            cover.push(l);
        }
        cover.extend(forgive.get(&e).into_iter().flatten().copied());
        let mut second = RowBuilder::new(1).add(xu, 1).add(xv, 1);
        let mut first = RowBuilder::new(-1).add(xu, -1).add(xv, -1);
        for &l in &cover {
            second = second.add(l, -1);
            first = first.add(l, -1);
        }
        b.row(second, RowKind::ConflictSecondMask { edge: e });
        b.row(first, RowKind::ConflictFirstMask { edge: e });
    }

    let eg_cuts: BTreeSet<usize> = sub.cuts.iter().copied().collect();
    for &(p, q) in &eg.solid_edges {
        if !(eg_cuts.contains(&p) && eg_cuts.contains(&q)) {
            continue;
        }
        let (lp, lq) = (b.cut(p).unwrap(), b.cut(q).unwrap());
        b.row(RowBuilder::new(1).add(lp, 1).add(lq, 1), RowKind::SolidPair { p, q });
    }

    for &cut in &sub.cuts {
        let node = &eg.nodes[cut];
        let l = b.cut(cut).unwrap();
        let (xa, xb) = (b.color(node.a), b.color(node.b));
        b.row(RowBuilder::new(1).add(l, 1).add(xa, 1).add(xb, -1), RowKind::CutMasks { cut });
        b.row(RowBuilder::new(1).add(l, 1).add(xb, 1).add(xa, -1), RowKind::CutMasks { cut });
    }

    for &e in &sub.stitch_edges {
        let edge = &lg.stitch_edges[e];
        let (xu, xv) = (b.color(edge.u), b.color(edge.v));
        match opts.alpha {
            Some(alpha) => {
                let s = b.var(format!("s{}_{}", edge.u, edge.v), VarKind::Stitch { edge: e, u: edge.u, v: edge.v });
                if !alpha.is_zero() {
                    b.model.objective.push((s, alpha));
                }
                b.row(RowBuilder::new(0).add(xu, 1).add(xv, -1).add(Lit::Var(s), -1), RowKind::StitchSplit { edge: e });
                b.row(RowBuilder::new(0).add(xv, 1).add(xu, -1).add(Lit::Var(s), -1), RowKind::StitchSplit { edge: e });
            }
            None => {
                b.row(RowBuilder::new(0).add(xu, 1).add(xv, -1), RowKind::StitchTied { edge: e });
                b.row(RowBuilder::new(0).add(xv, 1).add(xu, -1), RowKind::StitchTied { edge: e });
            }
        }
    }

    Ok(b.model)
}

/// Two-mask model with merged-cut correction; stitch edges (if any) are tied.
pub fn build_model_no_stitch(lg: &LayoutGraph, eg: &EndCutGraph) -> Result<IlpModel, ModelError> {
    let opts = ModelOptions {
        flavor: Flavor::Corrected,
        alpha: None,
    };
    build_for(lg, eg, &SubProblem::whole(lg, eg), &opts)
}

/// Two-mask model charging `alpha` per stitch.
pub fn build_model_with_stitch(lg: &LayoutGraph, eg: &EndCutGraph, alpha: Cost) -> Result<IlpModel, ModelError> {
    let opts = ModelOptions {
        flavor: Flavor::Corrected,
        alpha: Some(alpha),
    };
    build_for(lg, eg, &SubProblem::whole(lg, eg), &opts)
}

/// The conflict rows without the merged-cut correction. Kept to demonstrate
/// the conflicts it over-reports.
pub fn build_uncorrected(lg: &LayoutGraph, eg: &EndCutGraph) -> Result<IlpModel, ModelError> {
    let opts = ModelOptions {
        flavor: Flavor::Uncorrected,
        alpha: None,
    };
    build_for(lg, eg, &SubProblem::whole(lg, eg), &opts)
}

/// Three-color model: bits `(b0, b1)` encode color 0 as `00`, 1 as `10` and
/// 2 as `01`; a conflict variable per edge absorbs same-color ends.
pub fn build_lelele_baseline(lg: &LayoutGraph) -> IlpModel {
    let sub = SubProblem::whole(lg, &EndCutGraph::default());
    build_three_color(lg, &sub).expect("three-color model has no annotations to check")
}

fn build_three_color(lg: &LayoutGraph, sub: &SubProblem) -> Result<IlpModel, ModelError> {
    let mut model = IlpModel {
        variables: Vec::new(),
        objective: Vec::new(),
        constraints: Vec::new(),
        flavor: Flavor::ThreeColor,
        alpha: None,
        fixed_cuts: Vec::new(),
        color_var: BTreeMap::new(),
        cut_var: BTreeMap::new(),
    };
    for &v in &sub.vertices {
        let first = model.variables.len();
        for bit in 0..2u8 {
            model.variables.push(Variable {
                name: format!("b{bit}_{v}"),
                kind: VarKind::ColorBit { vertex: v, bit },
            });
        }
        model.color_var.insert(v, first);
        model.constraints.push(Constraint {
            terms: vec![(first, 1), (first + 1, 1)],
            rhs: 1,
            kind: RowKind::OneColor { vertex: v },
        });
    }
    for &e in &sub.conflict_edges {
        let edge = &lg.conflict_edges[e];
        let c = model.variables.len();
        model.variables.push(Variable {
            name: format!("c{}_{}", edge.u, edge.v),
            kind: VarKind::Conflict { edge: e, u: edge.u, v: edge.v },
        });
        model.objective.push((c, Cost::one()));
        let (bu, bv) = (model.color_var[&edge.u], model.color_var[&edge.v]);
        let mut rows = vec![Constraint {
            terms: vec![(bu, -1), (bu + 1, -1), (bv, -1), (bv + 1, -1), (c, -1)],
            rhs: -1,
            kind: RowKind::SameColor { edge: e, color: 0 },
        }];
        for bit in 0..2 {
            let mut terms = vec![(bu + bit, 1), (bv + bit, 1), (c, -1)];
            terms.sort_unstable();
            rows.push(Constraint {
                terms,
                rhs: 1,
                kind: RowKind::SameColor {
                    edge: e,
                    color: bit as u8 + 1,
                },
            });
        }
        for row in &mut rows {
            row.terms.sort_unstable();
        }
        model.constraints.extend(rows);
    }
    Ok(model)
}

/// A decomposition: mask (or color) per layout vertex plus the trim mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompResult {
    /// `0`/`1` for the two masks; `0..=2` for the three-color baseline.
    pub colors: Vec<u8>,
    /// Sorted candidate ids.
    pub selected_cuts: Vec<usize>,
    /// Conflict-edge ids left unresolved.
    pub conflicts: Vec<usize>,
    /// Stitch-edge ids whose segments take different masks.
    pub stitches: Vec<usize>,
    pub cost: Cost,
    /// Trim-mask shapes, merged pairs drawn as their union box.
    pub trim_shapes: Vec<Rect>,
}

/// Conflicts and stitches of a coloring, counted from the geometry-derived
/// graphs rather than any model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub conflicts: Vec<usize>,
    pub stitches: Vec<usize>,
    pub cost: Cost,
}

/// Count unresolved conflicts: same-colored conflict edges not removed by
/// their own selected cut nor, when `merging`, by a selected mergeable pair
/// of cuts around a common neighbor.
pub fn evaluate(
    lg: &LayoutGraph,
    eg: &EndCutGraph,
    colors: &[u8],
    selected: &[usize],
    alpha: Cost,
    merging: bool,
) -> Evaluation {
    let chosen = |c: Option<usize>| c.is_some_and(|c| selected.binary_search(&c).is_ok());
    let adjacency = lg.conflict_adjacency();
    let mut conflicts = Vec::new();
    for (i, e) in lg.conflict_edges.iter().enumerate() {
        if colors[e.u] != colors[e.v] || chosen(e.cut) {
            continue;
        }
        let merged = merging
            && adjacency[e.u].iter().any(|&(k, euk)| {
                adjacency[e.v]
                    .binary_search_by(|probe| probe.0.cmp(&k))
                    .ok()
                    .map(|pos| adjacency[e.v][pos].1)
                    .is_some_and(|evk| {
                        let (p, q) = (lg.conflict_edges[euk].cut, lg.conflict_edges[evk].cut);
                        chosen(p) && chosen(q) && eg.is_dash(p.unwrap(), q.unwrap())
                    })
            });
        if !merged {
            conflicts.push(i);
        }
    }
    let stitches: Vec<usize> = lg
        .stitch_edges
        .iter()
        .enumerate()
        .filter(|(_, s)| colors[s.u] != colors[s.v])
        .map(|(i, _)| i)
        .collect();
    let cost = Cost::from_integer(conflicts.len() as i64) + alpha * Cost::from_integer(stitches.len() as i64);
    Evaluation {
        conflicts,
        stitches,
        cost,
    }
}

/// A broken end-cut rule in a claimed solution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleViolation {
    #[error("end-cut {0} does not exist")]
    UnknownCut(usize),
    #[error("solid end-cut pair ({0}, {1}) both selected")]
    SolidPair(usize, usize),
    #[error("end-cut {cut} selected across different masks ({a}: {ca}, {b}: {cb})")]
    CutAcrossMasks { cut: usize, a: usize, b: usize, ca: u8, cb: u8 },
}

/// Selection rules every two-mask solution must obey.
pub fn check_cut_rules(eg: &EndCutGraph, colors: &[u8], selected: &[usize]) -> Result<(), RuleViolation> {
    for &cut in selected {
        let node = eg.nodes.get(cut).ok_or(RuleViolation::UnknownCut(cut))?;
        if colors[node.a] != colors[node.b] {
            return Err(RuleViolation::CutAcrossMasks {
                cut,
                a: node.a,
                b: node.b,
                ca: colors[node.a],
                cb: colors[node.b],
            });
        }
    }
    for &(p, q) in &eg.solid_edges {
        if selected.binary_search(&p).is_ok() && selected.binary_search(&q).is_ok() {
            return Err(RuleViolation::SolidPair(p, q));
        }
    }
    Ok(())
}

/// Trim-mask shapes: each selected mergeable pair as its union box, every
/// other selected cut as is. Sorted and deduplicated.
pub fn trim_shapes(eg: &EndCutGraph, selected: &[usize]) -> Vec<Rect> {
    let mut paired = BTreeSet::new();
    let mut shapes = BTreeSet::new();
    for &(p, q) in &eg.dash_edges {
        if selected.binary_search(&p).is_ok() && selected.binary_search(&q).is_ok() {
            shapes.insert(eg.nodes[p].rect.union_bbox(&eg.nodes[q].rect));
            paired.insert(p);
            paired.insert(q);
        }
    }
    for &c in selected {
        if !paired.contains(&c) {
            shapes.insert(eg.nodes[c].rect);
        }
    }
    shapes.into_iter().collect()
}

/// Turn a feasible assignment of a whole-layout model into a result, after
/// re-deriving its cost from first principles.
pub fn extract_result(model: &IlpModel, assignment: &[u8], lg: &LayoutGraph, eg: &EndCutGraph) -> Result<DecompResult, ModelError> {
    if assignment.len() != model.num_vars() {
        return Err(ModelError::WrongLength {
            expected: model.num_vars(),
            got: assignment.len(),
        });
    }
    if let Some(row) = model.violated_row(assignment) {
        return Err(ModelError::InfeasibleAssignment {
            row,
            what: model.constraints[row].kind.to_string(),
        });
    }
    let mut colors = vec![0u8; lg.vertex_count()];
    for (&v, &x) in &model.color_var {
        colors[v] = match model.flavor {
            Flavor::ThreeColor => assignment[x] + 2 * assignment[x + 1],
            _ => assignment[x],
        };
    }
    let mut selected: Vec<usize> = model.fixed_cuts.clone();
    selected.extend(model.cut_var.iter().filter(|(_, &x)| assignment[x] == 1).map(|(&c, _)| c));
    selected.sort_unstable();
    selected.dedup();

    let alpha = model.alpha.unwrap_or_else(Cost::zero);
    let eval = evaluate(lg, eg, &colors, &selected, alpha, model.flavor == Flavor::Corrected);
    let claimed = model.objective_value(assignment);
    if claimed != eval.cost {
        return Err(ModelError::CostMismatch {
            model: format_decimal(&claimed),
            recomputed: format_decimal(&eval.cost),
        });
    }
    Ok(DecompResult {
        trim_shapes: trim_shapes(eg, &selected),
        colors,
        selected_cuts: selected,
        conflicts: eval.conflicts,
        stitches: eval.stitches,
        cost: eval.cost,
    })
}

/// Cheapest completion of a coloring and cut selection: merge products set
/// to the product, conflict and stitch variables to exactly what the rows
/// demand.
pub fn complete_assignment(model: &IlpModel, colors: &[u8], selected: &[usize]) -> Vec<u8> {
    let mut values = vec![0u8; model.num_vars()];
    for (&v, &x) in &model.color_var {
        if model.flavor == Flavor::ThreeColor {
            values[x] = u8::from(colors[v] == 1);
            values[x + 1] = u8::from(colors[v] == 2);
        } else {
            values[x] = colors[v];
        }
    }
    for (&c, &x) in &model.cut_var {
        values[x] = u8::from(selected.binary_search(&c).is_ok());
    }
    let fixed = |c: usize| model.fixed_cuts.binary_search(&c).is_ok() || selected.binary_search(&c).is_ok();
    for (i, var) in model.variables.iter().enumerate() {
        if let VarKind::Merge { cut_a, cut_b, .. } = var.kind {
            values[i] = u8::from(fixed(cut_a) && fixed(cut_b));
        }
    }
    // Conflict and stitch variables appear with coefficient -1 only, so
    // raising them to 1 is enough whenever a row is otherwise violated.
    for row in &model.constraints {
        if row.holds(&values) {
            continue;
        }
        for &(v, a) in &row.terms {
            let slack = matches!(model.variables[v].kind, VarKind::Conflict { .. } | VarKind::Stitch { .. });
            if slack && a < 0 && values[v] == 0 {
                values[v] = 1;
                if row.holds(&values) {
                    break;
                }
            }
        }
    }
    values
}
