//! Full pipeline: graphs, candidate cuts, splitting into independent
//! sub-problems, one exact solve per piece, and the merge back.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_traits::Zero;
use thiserror::Error;

use crate::config::Config;
use crate::cost::{format_decimal, Cost};
use crate::endcut::{build_endcut_graph, generate_candidates, EndCutGraph};
use crate::ilp_model::{
    build_for, complete_assignment, extract_result, DecompResult, Flavor, IlpModel, ModelError, ModelOptions,
};
use crate::layout_graph::{annotate_end_cuts, build_conflict_edges, generate_stitch_candidates, Feature, LayoutError, LayoutGraph};
use crate::parallel::{map_ordered, PARALLEL_AVAILABLE};
use crate::solver::{solve, SolveError};

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("sub-problem {piece}: {source}")]
    Solve { piece: usize, source: SolveError },
    #[error("merged cost {merged} differs from the sum of sub-problem costs {sum}")]
    MergeMismatch { sum: String, merged: String },
}

/// One independent piece of the layout.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubProblem {
    /// Sorted vertex ids, contracted vertices included.
    pub vertices: Vec<usize>,
    /// Conflict edges inside the piece, sorted.
    pub conflict_edges: Vec<usize>,
    pub stitch_edges: Vec<usize>,
    /// End-cut candidates on the piece's conflict edges, sorted.
    pub cuts: Vec<usize>,
    /// Cuts applied up front; their endpoints are contracted.
    pub preselected: Vec<usize>,
    /// Contracted vertex to its representative (the smallest id of its
    /// class); absent vertices represent themselves.
    pub contracted: BTreeMap<usize, usize>,
    /// Bridge edges cut away from this piece; their two sides are solved
    /// apart and reconciled by a mask flip.
    pub boundary: Vec<usize>,
}

impl SubProblem {
    pub fn whole(lg: &LayoutGraph, eg: &EndCutGraph) -> Self {
        Self {
            vertices: (0..lg.vertex_count()).collect(),
            conflict_edges: (0..lg.conflict_edges.len()).collect(),
            stitch_edges: (0..lg.stitch_edges.len()).collect(),
            cuts: (0..eg.nodes.len()).collect(),
            ..Self::default()
        }
    }

    pub fn rep(&self, v: usize) -> usize {
        self.contracted.get(&v).copied().unwrap_or(v)
    }

    fn min_vertex(&self) -> usize {
        self.vertices.first().copied().unwrap_or(usize::MAX)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins two classes; the smaller root survives.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Build the layout and end-cut graphs, with stitch candidates when enabled.
pub fn build_graphs(features: Vec<Feature>, cfg: &Config, parallel: bool) -> Result<(LayoutGraph, EndCutGraph), LayoutError> {
    let mut lg = build_conflict_edges(features, cfg)?;
    if cfg.enable_stitch {
        lg = generate_stitch_candidates(lg, cfg);
    }
    let candidates = generate_candidates(&lg, cfg, parallel);
    let eg = build_endcut_graph(candidates, &lg, cfg);
    let lg = annotate_end_cuts(lg, &eg.nodes)?;
    Ok((lg, eg))
}

/// Vertex groups into sub-problems, ordered by smallest vertex.
fn gather(lg: &LayoutGraph, eg: &EndCutGraph, groups: Vec<Vec<usize>>) -> Vec<SubProblem> {
    let mut owner = vec![usize::MAX; lg.vertex_count()];
    let mut subs: Vec<SubProblem> = groups
        .into_iter()
        .enumerate()
        .map(|(i, vertices)| {
            for &v in &vertices {
                owner[v] = i;
            }
            SubProblem {
                vertices,
                ..SubProblem::default()
            }
        })
        .collect();
    for (i, e) in lg.conflict_edges.iter().enumerate() {
        if owner[e.u] == owner[e.v] && owner[e.u] != usize::MAX {
            subs[owner[e.u]].conflict_edges.push(i);
        }
    }
    for (i, e) in lg.stitch_edges.iter().enumerate() {
        if owner[e.u] == owner[e.v] && owner[e.u] != usize::MAX {
            subs[owner[e.u]].stitch_edges.push(i);
        }
    }
    for c in &eg.nodes {
        if owner[c.a] != usize::MAX {
            subs[owner[c.a]].cuts.push(c.id);
        }
    }
    subs
}

/// Connected components of conflict and stitch edges, with an extra link
/// wherever two candidates are solid- or dash-related.
pub fn split_components(lg: &LayoutGraph, eg: &EndCutGraph) -> Vec<SubProblem> {
    let mut uf = UnionFind::new(lg.vertex_count());
    for e in &lg.conflict_edges {
        uf.union(e.u, e.v);
    }
    for e in &lg.stitch_edges {
        uf.union(e.u, e.v);
    }
    for &(p, q) in eg.solid_edges.iter().chain(&eg.dash_edges) {
        uf.union(eg.nodes[p].a, eg.nodes[q].a);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..lg.vertex_count() {
        groups.entry(uf.find(v)).or_default().push(v);
    }
    gather(lg, eg, groups.into_values().collect())
}

/// Apply every candidate without a solid neighbor up front by contracting
/// its two vertices.
///
/// Contraction forces the two vertices onto one mask, which can cost more
/// than leaving the cut optional: in a 4-cycle `i-k-l-j-i` whose only
/// candidate sits on `(i, j)`, merging `i` and `j` leaves an odd cycle behind.
/// The pipeline therefore only runs this when the config asks for it.
pub fn preselect_endcuts(sub: &SubProblem, eg: &EndCutGraph) -> SubProblem {
    let degree = eg.solid_degree();
    let mut out = sub.clone();
    let local: BTreeMap<usize, usize> = sub.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(sub.vertices.len());
    for (&v, &r) in &sub.contracted {
        uf.union(local[&v], local[&r]);
    }
    let mut pre: BTreeSet<usize> = sub.preselected.iter().copied().collect();
    for &c in &sub.cuts {
        if degree[c] == 0 {
            uf.union(local[&eg.nodes[c].a], local[&eg.nodes[c].b]);
            pre.insert(c);
        }
    }
    out.contracted.clear();
    for (i, &v) in sub.vertices.iter().enumerate() {
        let r = sub.vertices[uf.find(i)];
        if r != v {
            out.contracted.insert(v, r);
        }
    }
    out.preselected = pre.into_iter().collect();
    out
}

/// Bridges of an undirected multigraph given as `(a, b)` pairs over nodes
/// `0..n`; parallel edges are never bridges. Iterative, linear time.
pub fn find_bridges(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if a != b {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut bridges = Vec::new();
    // Stack entries: (vertex, edge used to enter it, next adjacency index).
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, via, next) = *top;
            if next < adj[v].len() {
                top.2 += 1;
                let (w, e) = adj[v][next];
                if e == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        bridges.push(via);
                    }
                }
            }
        }
    }
    bridges.sort_unstable();
    bridges
}

/// Cut the piece at its clean bridges: conflict-edge bridges without a
/// candidate, where no stitch edge or cut relation crosses. Stitch edges and
/// solid/dash relations enter the bridge search as extra edges, so any
/// crossing relation keeps the edge from being a bridge at all.
pub fn split_bridges(sub: &SubProblem, lg: &LayoutGraph, eg: &EndCutGraph) -> Vec<SubProblem> {
    let reps: Vec<usize> = sub.vertices.iter().copied().filter(|&v| sub.rep(v) == v).collect();
    let node_of: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let node = |v: usize| node_of[&sub.rep(v)];

    let mut edges = Vec::new();
    // Which multigraph edges are candidate-free conflict edges.
    let mut clean_edge = Vec::new();
    for &e in &sub.conflict_edges {
        let edge = &lg.conflict_edges[e];
        edges.push((node(edge.u), node(edge.v)));
        clean_edge.push((edge.cut.is_none()).then_some(e));
    }
    for &e in &sub.stitch_edges {
        let edge = &lg.stitch_edges[e];
        edges.push((node(edge.u), node(edge.v)));
        clean_edge.push(None);
    }
    let in_sub: BTreeSet<usize> = sub.cuts.iter().copied().collect();
    for &(p, q) in eg.solid_edges.iter().chain(&eg.dash_edges) {
        if in_sub.contains(&p) && in_sub.contains(&q) {
            edges.push((node(eg.nodes[p].a), node(eg.nodes[q].a)));
            clean_edge.push(None);
        }
    }

    let cut: Vec<usize> = find_bridges(reps.len(), &edges)
        .into_iter()
        .filter(|&i| clean_edge[i].is_some())
        .collect();
    if cut.is_empty() {
        return vec![sub.clone()];
    }
    let cut_set: BTreeSet<usize> = cut.iter().copied().collect();
    let mut uf = UnionFind::new(reps.len());
    for (i, &(a, b)) in edges.iter().enumerate() {
        if !cut_set.contains(&i) {
            uf.union(a, b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in &sub.vertices {
        groups.entry(uf.find(node(v))).or_default().push(v);
    }
    let mut pieces = gather(lg, eg, groups.into_values().collect());
    let bridge_edges: Vec<usize> = cut.iter().map(|&i| clean_edge[i].unwrap()).collect();
    for piece in &mut pieces {
        let members: BTreeSet<usize> = piece.vertices.iter().copied().collect();
        piece.contracted = sub
            .contracted
            .iter()
            .filter(|(v, _)| members.contains(v))
            .map(|(&v, &r)| (v, r))
            .collect();
        piece.preselected = sub
            .preselected
            .iter()
            .copied()
            .filter(|c| members.contains(&eg.nodes[*c].a))
            .collect();
        piece.boundary = bridge_edges
            .iter()
            .copied()
            .filter(|&e| members.contains(&lg.conflict_edges[e].u) || members.contains(&lg.conflict_edges[e].v))
            .collect();
        piece.boundary.extend(sub.boundary.iter().copied().filter(|&e| {
            members.contains(&lg.conflict_edges[e].u) || members.contains(&lg.conflict_edges[e].v)
        }));
        piece.boundary.sort_unstable();
    }
    pieces
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    /// Budget for the whole run; pieces still unsolved when it runs out keep
    /// their best assignment so far.
    pub time_limit: Option<Duration>,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            parallel: PARALLEL_AVAILABLE,
        }
    }
}

/// Per-piece solve record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubStats {
    pub vertices: usize,
    pub variables: usize,
    pub constraints: usize,
    pub nodes_explored: u64,
    pub cost: Cost,
    pub proven_optimal: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub graph: LayoutGraph,
    pub endcuts: EndCutGraph,
    /// Whole-layout model the merged result was validated against.
    pub model: IlpModel,
    pub result: DecompResult,
    pub stats: Vec<SubStats>,
    pub proven_optimal: bool,
}

struct PieceOutcome {
    colors: Vec<(usize, u8)>,
    selected: Vec<usize>,
    stats: SubStats,
}

fn solve_piece(
    lg: &LayoutGraph,
    eg: &EndCutGraph,
    piece: &SubProblem,
    index: usize,
    model_opts: &ModelOptions,
    deadline: Option<Instant>,
) -> Result<PieceOutcome, DecomposeError> {
    let start = Instant::now();
    let model = build_for(lg, eg, piece, model_opts)?;
    let budget = deadline.map(|d| d.saturating_duration_since(start));
    let (assignment, nodes, proven) = match solve(&model, budget) {
        Ok(s) => (s.assignment, s.stats.nodes_explored, true),
        Err(SolveError::TimeLimit { incumbent, stats }) => {
            // Without an incumbent every vertex takes mask 1 and no cut.
            let fallback = || {
                let colors = vec![0u8; lg.vertex_count()];
                complete_assignment(&model, &colors, &[])
            };
            (incumbent.unwrap_or_else(fallback), stats.nodes_explored, false)
        }
        Err(source) => return Err(DecomposeError::Solve { piece: index, source }),
    };
    let colors = piece
        .vertices
        .iter()
        .map(|&v| {
            let x = model.color_var[&v];
            let c = match model.flavor {
                Flavor::ThreeColor => assignment[x] + 2 * assignment[x + 1],
                _ => assignment[x],
            };
            (v, c)
        })
        .collect();
    let mut selected = model.fixed_cuts.clone();
    selected.extend(model.cut_var.iter().filter(|(_, &x)| assignment[x] == 1).map(|(&c, _)| c));
    selected.sort_unstable();
    Ok(PieceOutcome {
        colors,
        selected,
        stats: SubStats {
            vertices: piece.vertices.len(),
            variables: model.num_vars(),
            constraints: model.constraints.len(),
            nodes_explored: nodes,
            cost: model.objective_value(&assignment),
            proven_optimal: proven,
            elapsed: start.elapsed(),
        },
    })
}

/// Re-align masks across cut bridges: whenever a bridge's ends share a mask,
/// flip the smaller of the two sides (the side without the smallest vertex
/// on a tie). Bridges are handled in ascending edge order.
fn reconcile_bridges(lg: &LayoutGraph, pieces: &[SubProblem], colors: &mut [u8]) {
    let mut piece_of = BTreeMap::new();
    for (i, p) in pieces.iter().enumerate() {
        for &v in &p.vertices {
            piece_of.insert(v, i);
        }
    }
    let bridges: BTreeSet<usize> = pieces.iter().flat_map(|p| p.boundary.iter().copied()).collect();
    let mut tree: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pieces.len()];
    for &e in &bridges {
        let edge = &lg.conflict_edges[e];
        let (a, b) = (piece_of[&edge.u], piece_of[&edge.v]);
        tree[a].push((b, e));
        tree[b].push((a, e));
    }
    for &e in &bridges {
        let edge = &lg.conflict_edges[e];
        if colors[edge.u] != colors[edge.v] {
            continue;
        }
        let side = |start: usize| {
            let mut seen = BTreeSet::from([start]);
            let mut todo = vec![start];
            while let Some(p) = todo.pop() {
                for &(q, via) in &tree[p] {
                    if via != e && seen.insert(q) {
                        todo.push(q);
                    }
                }
            }
            seen
        };
        let (su, sv) = (side(piece_of[&edge.u]), side(piece_of[&edge.v]));
        let size = |s: &BTreeSet<usize>| s.iter().map(|&p| pieces[p].vertices.len()).sum::<usize>();
        let min_of = |s: &BTreeSet<usize>| s.iter().map(|&p| pieces[p].min_vertex()).min().unwrap_or(usize::MAX);
        let flip = match size(&su).cmp(&size(&sv)) {
            std::cmp::Ordering::Less => su,
            std::cmp::Ordering::Greater => sv,
            std::cmp::Ordering::Equal if min_of(&su) < min_of(&sv) => sv,
            std::cmp::Ordering::Equal => su,
        };
        for p in flip {
            for &v in &pieces[p].vertices {
                colors[v] ^= 1;
            }
        }
    }
}

fn model_options(cfg: &Config) -> ModelOptions {
    ModelOptions {
        flavor: Flavor::Corrected,
        alpha: cfg.enable_stitch.then_some(cfg.alpha),
    }
}

/// Split according to the config's speedup switches.
pub fn plan_pieces(lg: &LayoutGraph, eg: &EndCutGraph, cfg: &Config) -> Vec<SubProblem> {
    let mut pieces = Vec::new();
    for comp in split_components(lg, eg) {
        let comp = if cfg.enable_preselect {
            preselect_endcuts(&comp, eg)
        } else {
            comp
        };
        if cfg.enable_bridges {
            pieces.extend(split_bridges(&comp, lg, eg));
        } else {
            pieces.push(comp);
        }
    }
    pieces.sort_by_key(SubProblem::min_vertex);
    pieces
}

fn run_pieces(
    lg: LayoutGraph,
    eg: EndCutGraph,
    pieces: Vec<SubProblem>,
    model_opts: ModelOptions,
    opts: &RunOptions,
) -> Result<Decomposition, DecomposeError> {
    let deadline = opts.time_limit.map(|t| Instant::now() + t);
    let indexed: Vec<(usize, &SubProblem)> = pieces.iter().enumerate().collect();
    let outcomes = map_ordered(&indexed, opts.parallel, |&(i, piece)| {
        solve_piece(&lg, &eg, piece, i, &model_opts, deadline)
    });
    let outcomes: Vec<PieceOutcome> = outcomes.into_iter().collect::<Result<_, _>>()?;

    let mut colors = vec![0u8; lg.vertex_count()];
    let mut selected = Vec::new();
    for o in &outcomes {
        for &(v, c) in &o.colors {
            colors[v] = c;
        }
        selected.extend_from_slice(&o.selected);
    }
    selected.sort_unstable();
    if model_opts.flavor != Flavor::ThreeColor {
        reconcile_bridges(&lg, &pieces, &mut colors);
    }

    let whole = SubProblem::whole(&lg, &eg);
    let model = build_for(&lg, &eg, &whole, &model_opts)?;
    let assignment = complete_assignment(&model, &colors, &selected);
    let result = extract_result(&model, &assignment, &lg, &eg)?;
    let stats: Vec<SubStats> = outcomes.into_iter().map(|o| o.stats).collect();
    let proven_optimal = stats.iter().all(|s| s.proven_optimal);
    let sum: Cost = stats.iter().map(|s| s.cost).fold(Cost::zero(), |a, b| a + b);
    if proven_optimal && sum != result.cost {
        return Err(DecomposeError::MergeMismatch {
            sum: format_decimal(&sum),
            merged: format_decimal(&result.cost),
        });
    }
    Ok(Decomposition {
        graph: lg,
        endcuts: eg,
        model,
        result,
        stats,
        proven_optimal,
    })
}

/// Decompose with every speedup the config enables.
pub fn decompose_with(features: Vec<Feature>, cfg: &Config, opts: &RunOptions) -> Result<Decomposition, DecomposeError> {
    let (lg, eg) = build_graphs(features, cfg, opts.parallel)?;
    let pieces = plan_pieces(&lg, &eg, cfg);
    run_pieces(lg, eg, pieces, model_options(cfg), opts)
}

pub fn decompose(features: Vec<Feature>, cfg: &Config) -> Result<Decomposition, DecomposeError> {
    decompose_with(features, cfg, &RunOptions::default())
}

/// One model for the whole layout, no splitting or pre-selection.
pub fn decompose_monolithic(features: Vec<Feature>, cfg: &Config, opts: &RunOptions) -> Result<Decomposition, DecomposeError> {
    let (lg, eg) = build_graphs(features, cfg, opts.parallel)?;
    let whole = SubProblem::whole(&lg, &eg);
    run_pieces(lg, eg, vec![whole], model_options(cfg), opts)
}

/// Three-color baseline: no stitches, no end-cuts, split by component only.
pub fn decompose_lelele(features: Vec<Feature>, cfg: &Config, opts: &RunOptions) -> Result<Decomposition, DecomposeError> {
    let lg = build_conflict_edges(features, cfg)?;
    let eg = EndCutGraph::default();
    let pieces = split_components(&lg, &eg);
    let model_opts = ModelOptions {
        flavor: Flavor::ThreeColor,
        alpha: None,
    };
    run_pieces(lg, eg, pieces, model_opts, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::fixtures::abstract_graphs;

    fn wires(list: &[[i64; 4]]) -> Vec<Feature> {
        list.iter()
            .enumerate()
            .map(|(i, r)| Feature::rect(i, Rect::from_coords(r[0], r[1], r[2], r[3])))
            .collect()
    }

    fn cfg() -> Config {
        let mut c = Config::from_rules(10, 10);
        c.enable_stitch = false;
        c
    }

    #[test]
    fn distant_features_are_separate_pieces() {
        let f = wires(&[[0, 0, 100, 10], [1000, 0, 1100, 10]]);
        let (lg, eg) = build_graphs(f.clone(), &cfg(), false).unwrap();
        assert_eq!(split_components(&lg, &eg).len(), 2);
        let d = decompose(f, &cfg()).unwrap();
        assert_eq!(d.result.cost, Cost::zero());
        assert_eq!(d.stats.len(), 2);
    }

    #[test]
    fn related_cuts_keep_components_together() {
        // Two wire pairs whose cuts sit 30 apart: no conflict edge crosses,
        // but the solid relation does.
        let f = wires(&[[0, 0, 100, 10], [0, 50, 100, 60], [130, 0, 230, 10], [130, 50, 230, 60]]);
        let (lg, eg) = build_graphs(f, &cfg(), false).unwrap();
        assert_eq!(lg.conflict_edges.len(), 4);
        assert_eq!(eg.solid_edges, vec![(0, 1)]);
        assert_eq!(split_components(&lg, &eg).len(), 1);
    }

    #[test]
    fn bridges_of_a_path_and_a_cycle() {
        assert_eq!(find_bridges(3, &[(0, 1), (1, 2)]), vec![0, 1]);
        assert!(find_bridges(3, &[(0, 1), (1, 2), (2, 0)]).is_empty());
        assert!(find_bridges(2, &[(0, 1), (1, 0)]).is_empty());
        assert_eq!(find_bridges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3)]), vec![3]);
    }

    fn run_abstract(lg: LayoutGraph, eg: EndCutGraph, c: &Config) -> Decomposition {
        let pieces = plan_pieces(&lg, &eg, c);
        run_pieces(lg, eg, pieces, model_options(c), &RunOptions::default()).unwrap()
    }

    #[test]
    fn path_splits_at_clean_bridges() {
        let (lg, eg) = abstract_graphs(3, &[(0, 1), (1, 2)], &[], &[], &[]);
        let comps = split_components(&lg, &eg);
        assert_eq!(comps.len(), 1);
        let pieces = split_bridges(&comps[0], &lg, &eg);
        assert_eq!(pieces.len(), 3);
        assert_eq!(pieces[1].boundary, vec![0, 1]);
        let d = run_abstract(lg, eg, &cfg());
        assert_eq!(d.result.cost, Cost::zero());
        assert_ne!(d.result.colors[0], d.result.colors[1]);
        assert_ne!(d.result.colors[1], d.result.colors[2]);
    }

    #[test]
    fn long_path_merges_conflict_free() {
        let edges: Vec<(usize, usize)> = (0..199).map(|i| (i, i + 1)).collect();
        let (lg, eg) = abstract_graphs(200, &edges, &[], &[], &[]);
        let d = run_abstract(lg, eg, &cfg());
        assert_eq!(d.stats.len(), 200);
        assert_eq!(d.result.cost, Cost::zero());
    }

    #[test]
    fn odd_cycle_behind_a_bridge_keeps_its_conflict() {
        // Triangle 0-1-2 hanging off vertex 3 by a clean bridge.
        let (lg, eg) = abstract_graphs(4, &[(0, 1), (1, 2), (0, 2), (2, 3)], &[], &[], &[]);
        let d = run_abstract(lg, eg, &cfg());
        assert_eq!(d.stats.len(), 2);
        assert_eq!(d.result.cost, Cost::from_integer(1));
        assert_ne!(d.result.colors[2], d.result.colors[3]);
    }

    #[test]
    fn preselection_can_cost_optimality() {
        // 4-cycle 0-1-2-3-0 with a free cut on (0, 3) only: contracting 0
        // and 3 leaves the triangle 0-1-2.
        let (lg, eg) = abstract_graphs(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], &[(0, 3)], &[], &[]);
        let plain = run_abstract(lg.clone(), eg.clone(), &cfg());
        assert_eq!(plain.result.cost, Cost::zero());
        let mut c = cfg();
        c.enable_preselect = true;
        let pre = run_abstract(lg, eg, &c);
        assert_eq!(pre.result.cost, Cost::from_integer(1));
    }

    #[test]
    fn bridge_with_candidate_is_kept() {
        let f = wires(&[[0, 0, 100, 10], [0, 20, 100, 30]]);
        let (lg, eg) = build_graphs(f, &cfg(), false).unwrap();
        assert_eq!(eg.nodes.len(), 1);
        let comps = split_components(&lg, &eg);
        assert_eq!(split_bridges(&comps[0], &lg, &eg).len(), 1);
    }

    #[test]
    fn preselection_contracts_free_cut() {
        let f = wires(&[[0, 0, 100, 10], [0, 20, 100, 30]]);
        let (lg, eg) = build_graphs(f, &cfg(), false).unwrap();
        let comp = &split_components(&lg, &eg)[0];
        let pre = preselect_endcuts(comp, &eg);
        assert_eq!(pre.preselected, vec![0]);
        assert_eq!(pre.rep(1), 0);
    }

    #[test]
    fn empty_layout_decomposes_to_nothing() {
        let d = decompose(Vec::new(), &cfg()).unwrap();
        assert!(d.result.colors.is_empty());
        assert_eq!(d.result.cost, Cost::zero());
        assert!(d.stats.is_empty());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = wires(&[[0, 0, 100, 10], [0, 20, 100, 30], [0, 40, 100, 50], [500, 0, 600, 10], [500, 20, 600, 30]]);
        let seq = decompose_with(f.clone(), &cfg(), &RunOptions { time_limit: None, parallel: false }).unwrap();
        let par = decompose_with(f, &cfg(), &RunOptions { time_limit: None, parallel: true }).unwrap();
        assert_eq!(seq.result, par.result);
    }
}
