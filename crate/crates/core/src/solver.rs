//! Exact 0-1 branch-and-bound with row propagation, plus a brute-force
//! oracle for small models.
//!
//! The search is depth-first over a static variable order, tries 0 before 1
//! and prunes any node whose committed objective already reaches the
//! incumbent. A greedy dive along the same order seeds the incumbent.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use num_traits::Zero;
use thiserror::Error;

use crate::cost::{common_denominator, Cost};
use crate::ilp_model::{IlpModel, VarKind};

/// Largest model `brute_force` accepts.
pub const BRUTE_FORCE_CAP: usize = 24;

const TIME_CHECK_INTERVAL: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes_explored: u64,
    pub best_cost: Cost,
    pub proven_optimal: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("model is infeasible")]
    Infeasible,
    #[error("time limit reached after {} nodes", stats.nodes_explored)]
    TimeLimit { incumbent: Option<Vec<u8>>, stats: SolveStats },
    #[error("{vars} variables exceed the brute-force cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("objective coefficient on variable {0} is negative")]
    NegativeObjective(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Vec<u8>,
    pub stats: SolveStats,
}

/// Integer objective weights: the rational weights times their common
/// denominator.
fn scaled_weights(model: &IlpModel) -> Result<(Vec<i64>, i64), SolveError> {
    let scale = common_denominator(model.objective.iter().map(|(_, w)| w));
    let mut weights = vec![0i64; model.num_vars()];
    for &(v, w) in &model.objective {
        if w < Cost::zero() {
            return Err(SolveError::NegativeObjective(v));
        }
        weights[v] += (w * Cost::from_integer(scale)).to_integer();
    }
    Ok((weights, scale))
}

/// Family rank from which variables are pure cost-carrying slacks.
const SLACK_RANK: u8 = 3;

/// Static branching order.
///
/// Vertices are numbered breadth-first over the variables that join them;
/// each color, cut or merge variable waits for its last vertex, ties going
/// to colors, then cuts, then merges, then declaration order. Conflict and
/// stitch slacks come after everything else: propagation sets them as soon as
/// they are forced, so they still count towards the bound, and branching on
/// them early only repeats subtrees at a higher cost.
pub fn branching_order(model: &IlpModel) -> Vec<usize> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for var in &model.variables {
        let vs = var.kind.vertices();
        for &a in &vs {
            let entry = adj.entry(a).or_default();
            entry.extend(vs.iter().copied().filter(|&b| b != a));
        }
    }
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    let starts: Vec<usize> = adj.keys().copied().collect();
    for start in starts {
        if pos.contains_key(&start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        pos.insert(start, pos.len());
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if !pos.contains_key(&w) {
                    pos.insert(w, pos.len());
                    queue.push_back(w);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..model.num_vars()).collect();
    order.sort_by_key(|&i| {
        let kind = &model.variables[i].kind;
        let stage = kind.vertices().iter().map(|v| pos[v]).max().unwrap_or(0);
        let rank = kind.family_rank();
        (rank >= SLACK_RANK, stage, rank, i)
    });
    order
}

const FREE: i8 = -1;

struct Engine {
    rows: Vec<(Vec<(usize, i64)>, i64)>,
    cols: Vec<Vec<(usize, i64)>>,
    weight: Vec<i64>,
    val: Vec<i8>,
    /// Least activity each row can still reach.
    minact: Vec<i64>,
    trail: Vec<usize>,
    cost: i64,
    queue: Vec<usize>,
}

impl Engine {
    fn new(model: &IlpModel, weight: Vec<i64>) -> Self {
        let n = model.num_vars();
        let mut cols = vec![Vec::new(); n];
        let mut rows = Vec::with_capacity(model.constraints.len());
        let mut minact = Vec::with_capacity(model.constraints.len());
        for (r, c) in model.constraints.iter().enumerate() {
            for &(v, a) in &c.terms {
                cols[v].push((r, a));
            }
            minact.push(c.terms.iter().map(|&(_, a)| a.min(0)).sum());
            rows.push((c.terms.clone(), c.rhs));
        }
        Self {
            rows,
            cols,
            weight,
            val: vec![FREE; n],
            minact,
            trail: Vec::new(),
            cost: 0,
            queue: Vec::new(),
        }
    }

    fn assign(&mut self, v: usize, value: u8) {
        debug_assert_eq!(self.val[v], FREE);
        self.val[v] = value as i8;
        self.trail.push(v);
        if value == 1 {
            self.cost += self.weight[v];
        }
        for &(r, a) in &self.cols[v] {
            // Fixing a variable removes the optimistic choice from minact.
            let delta = match (a > 0, value) {
                (true, 1) => a,
                (false, 0) => -a,
                _ => 0,
            };
            if delta != 0 {
                self.minact[r] += delta;
                self.queue.push(r);
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let value = self.val[v] as u8;
            self.val[v] = FREE;
            if value == 1 {
                self.cost -= self.weight[v];
            }
            for &(r, a) in &self.cols[v] {
                let delta = match (a > 0, value) {
                    (true, 1) => a,
                    (false, 0) => -a,
                    _ => 0,
                };
                self.minact[r] -= delta;
            }
        }
        self.queue.clear();
    }

    /// Drain the row queue, fixing every variable a row forces. `false` on
    /// a row that can no longer hold.
    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            let slack = self.rows[r].1 - self.minact[r];
            if slack < 0 {
                self.queue.clear();
                return false;
            }
            for i in 0..self.rows[r].0.len() {
                let (v, a) = self.rows[r].0[i];
                if self.val[v] == FREE && a.abs() > slack {
                    self.assign(v, u8::from(a < 0));
                }
            }
        }
        true
    }

    fn try_value(&mut self, v: usize, value: u8) -> bool {
        self.assign(v, value);
        self.propagate()
    }

    fn snapshot(&self) -> Vec<u8> {
        self.val.iter().map(|&x| x as u8).collect()
    }
}

/// Conflict neighbors of each two-mask color variable, as variable ids.
fn color_neighbors(model: &IlpModel) -> Vec<Vec<usize>> {
    let mut nbrs = vec![Vec::new(); model.num_vars()];
    for var in &model.variables {
        if let VarKind::Conflict { u, v, .. } = var.kind {
            let (Some(&xu), Some(&xv)) = (model.color_var.get(&u), model.color_var.get(&v)) else {
                continue;
            };
            let is_color = |x: usize| matches!(model.variables[x].kind, VarKind::Color { .. });
            if xu != xv && is_color(xu) && is_color(xv) {
                nbrs[xu].push(xv);
                nbrs[xv].push(xu);
            }
        }
    }
    nbrs
}

/// One greedy pass down the branching order: each free variable takes the
/// value with the lower committed cost after propagation; colors break ties
/// away from already-colored neighbors, everything else toward 0.
fn dive(engine: &mut Engine, order: &[usize], nbrs: &[Vec<usize>], nodes: &mut u64) -> Option<(Vec<u8>, i64)> {
    let root = engine.trail.len();
    for &v in order {
        if engine.val[v] != FREE {
            continue;
        }
        *nodes += 1;
        let mut best: Option<((i64, usize, u8), u8)> = None;
        for value in [0u8, 1] {
            let mark = engine.trail.len();
            if engine.try_value(v, value) {
                let clash = nbrs[v]
                    .iter()
                    .filter(|&&w| engine.val[w] == value as i8 && w != v)
                    .count();
                let key = (engine.cost, clash, value);
                if best.is_none_or(|(k, _)| key < k) {
                    best = Some((key, value));
                }
            }
            engine.undo_to(mark);
        }
        let Some((_, value)) = best else {
            engine.undo_to(root);
            return None;
        };
        let ok = engine.try_value(v, value);
        debug_assert!(ok);
    }
    let found = (engine.snapshot(), engine.cost);
    engine.undo_to(root);
    Some(found)
}

/// Optimal assignment of `model`, or the incumbent when `time_limit` runs
/// out.
pub fn solve(model: &IlpModel, time_limit: Option<Duration>) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let (weight, scale) = scaled_weights(model)?;
    let n = model.num_vars();
    let order = branching_order(model);
    let mut engine = Engine::new(model, weight);
    let mut nodes: u64 = 0;

    engine.queue = (0..engine.rows.len()).collect();
    if !engine.propagate() {
        return Err(SolveError::Infeasible);
    }

    let mut incumbent = dive(&mut engine, &order, &color_neighbors(model), &mut nodes);
    let stats = |nodes: u64, incumbent: &Option<(Vec<u8>, i64)>, proven: bool| SolveStats {
        nodes_explored: nodes,
        best_cost: incumbent
            .as_ref()
            .map(|(_, c)| Cost::new(*c, scale))
            .unwrap_or_else(Cost::zero),
        proven_optimal: proven,
        elapsed: start.elapsed(),
    };

    struct Frame {
        pos: usize,
        mark: usize,
        next: u8,
    }
    let mut frames: Vec<Frame> = Vec::new();
    let mut pos = 0;
    let mut descend = true;
    loop {
        if incumbent.as_ref().is_some_and(|(_, c)| *c == 0) {
            break;
        }
        if descend {
            nodes += 1;
            if nodes.is_multiple_of(TIME_CHECK_INTERVAL) && time_limit.is_some_and(|t| start.elapsed() >= t) {
                return Err(SolveError::TimeLimit {
                    incumbent: incumbent.as_ref().map(|(a, _)| a.clone()),
                    stats: stats(nodes, &incumbent, false),
                });
            }
            let bound = incumbent.as_ref().map_or(i64::MAX, |(_, c)| *c);
            if engine.cost < bound {
                while pos < n && engine.val[order[pos]] != FREE {
                    pos += 1;
                }
                if pos == n {
                    incumbent = Some((engine.snapshot(), engine.cost));
                } else {
                    frames.push(Frame {
                        pos,
                        mark: engine.trail.len(),
                        next: 0,
                    });
                }
            }
        }
        // Next untried branch, deepest first.
        descend = false;
        while let Some(f) = frames.last_mut() {
            engine.undo_to(f.mark);
            if f.next > 1 {
                frames.pop();
                continue;
            }
            let value = f.next;
            f.next += 1;
            let p = f.pos;
            if engine.try_value(order[p], value) {
                pos = p + 1;
                descend = true;
                break;
            }
        }
        if !descend {
            break;
        }
    }

    match incumbent {
        Some((assignment, cost)) => Ok(Solution {
            stats: SolveStats {
                nodes_explored: nodes,
                best_cost: Cost::new(cost, scale),
                proven_optimal: true,
                elapsed: start.elapsed(),
            },
            assignment,
        }),
        None => Err(SolveError::Infeasible),
    }
}

/// Exhaustive minimum. Ties go to the smallest assignment read as a binary
/// number with variable 0 as the most significant bit.
pub fn brute_force(model: &IlpModel) -> Result<(Vec<u8>, Cost), SolveError> {
    let n = model.num_vars();
    if n > BRUTE_FORCE_CAP {
        return Err(SolveError::TooLarge {
            vars: n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let (weight, scale) = scaled_weights(model)?;
    let mut cols = vec![Vec::new(); n];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(v, a) in &c.terms {
            cols[v].push((r, a));
        }
    }
    let rhs: Vec<i64> = model.constraints.iter().map(|c| c.rhs).collect();
    let mut act = vec![0i64; rhs.len()];
    let mut violated = rhs.iter().filter(|&&b| b < 0).count();
    let mut cost = 0i64;
    // Gray-code walk: one variable flips per step.
    let mut code: u32 = 0;
    let mut best: Option<(i64, u32)> = (violated == 0).then_some((0, 0));
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros() as usize;
        let var = n - 1 - bit;
        code ^= 1 << bit;
        let sign = if code >> bit & 1 == 1 { 1 } else { -1 };
        cost += sign * weight[var];
        for &(r, a) in &cols[var] {
            let before = act[r] <= rhs[r];
            act[r] += sign * a;
            let after = act[r] <= rhs[r];
            match (before, after) {
                (true, false) => violated += 1,
                (false, true) => violated -= 1,
                _ => {}
            }
        }
        if violated == 0 && best.is_none_or(|b| (cost, code) < b) {
            best = Some((cost, code));
        }
    }
    let (cost, code) = best.ok_or(SolveError::Infeasible)?;
    let assignment = (0..n).map(|i| (code >> (n - 1 - i) & 1) as u8).collect();
    Ok((assignment, Cost::new(cost, scale)))
}
