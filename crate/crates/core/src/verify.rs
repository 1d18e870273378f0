//! Independent re-check of a result file against its layout.
//!
//! Graphs and candidates are rebuilt from the geometry; nothing from the
//! solver is trusted beyond the claimed masks and cut ids.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::cost::{format_decimal, parse_decimal, Cost};
use crate::decomposer::build_graphs;
use crate::endcut::EndCutGraph;
use crate::ilp_model::{check_cut_rules, evaluate, trim_shapes, RuleViolation};
use crate::io::{axis_name, LayoutFile, Mode, ResultFile};
use crate::layout_graph::{build_conflict_edges, LayoutError, LayoutGraph, VertexKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("layout cannot be rebuilt: {0}")]
    Layout(#[from] LayoutError),
    #[error("result rules differ from the layout's: {0}")]
    RuleMismatch(String),
    #[error("{0}")]
    Rule(#[from] RuleViolation),
    #[error("colors: {0}")]
    Colors(String),
    #[error("selected cut {id}: {what}")]
    Cut { id: usize, what: String },
    #[error("reported {what} differ from recomputed: missing {missing:?}, extra {extra:?}")]
    Listing { what: &'static str, missing: Vec<String>, extra: Vec<String> },
    #[error("cost {reported} does not equal |conflicts| + alpha * |stitches| = {recomputed}")]
    Cost { reported: String, recomputed: String },
    #[error("sub-problem costs sum to {sum}, not the reported {reported}")]
    Stats { sum: String, reported: String },
}

/// What a successful check established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifySummary {
    pub vertices: usize,
    pub conflicts: usize,
    pub stitches: usize,
    pub cost: Cost,
}

fn diff(what: &'static str, reported: &BTreeSet<String>, actual: &BTreeSet<String>) -> Result<(), VerifyError> {
    if reported == actual {
        return Ok(());
    }
    Err(VerifyError::Listing {
        what,
        missing: actual.difference(reported).cloned().collect(),
        extra: reported.difference(actual).cloned().collect(),
    })
}

fn pair_name(a: &VertexKey, b: &VertexKey) -> String {
    format!("{a}-{b}")
}

pub fn verify(layout: &LayoutFile, result: &ResultFile) -> Result<VerifySummary, VerifyError> {
    let claimed = result
        .config
        .to_config()
        .ok_or_else(|| VerifyError::RuleMismatch(format!("alpha {:?} is not a decimal", result.config.alpha)))?;
    let base = layout.config();
    let rules = |c: &crate::config::Config| (c.w_min, c.s_min, c.dis_m, c.dis_c, c.w_th, c.merge_gap);
    if rules(&claimed) != rules(&base) {
        return Err(VerifyError::RuleMismatch(format!("{:?} vs {:?}", rules(&claimed), rules(&base))));
    }

    let (lg, eg): (LayoutGraph, EndCutGraph) = match result.mode {
        Mode::TwoMask => build_graphs(layout.features.clone(), &claimed, false)?,
        Mode::ThreeColor => (build_conflict_edges(layout.features.clone(), &claimed)?, EndCutGraph::default()),
    };

    let palette = match result.mode {
        Mode::TwoMask => 2,
        Mode::ThreeColor => 3,
    };
    let expected_keys: BTreeSet<VertexKey> = (0..lg.vertex_count()).map(|v| lg.vertex_key(v)).collect();
    let given_keys: BTreeSet<VertexKey> = result.colors.keys().copied().collect();
    if expected_keys != given_keys {
        let missing: Vec<String> = expected_keys.difference(&given_keys).map(|k| k.to_string()).collect();
        let extra: Vec<String> = given_keys.difference(&expected_keys).map(|k| k.to_string()).collect();
        return Err(VerifyError::Colors(format!("vertex set differs: missing {missing:?}, extra {extra:?}")));
    }
    let mut colors = vec![0u8; lg.vertex_count()];
    for (key, &c) in &result.colors {
        if !(1..=palette).contains(&c) {
            return Err(VerifyError::Colors(format!("vertex {key} has color {c}, outside 1..={palette}")));
        }
        colors[lg.vertex_by_key(*key).expect("key set checked above")] = c - 1;
    }

    let mut selected = Vec::new();
    for cut in &result.selected_cuts {
        let node = eg.nodes.get(cut.id).ok_or_else(|| VerifyError::Cut {
            id: cut.id,
            what: "no such candidate".into(),
        })?;
        let between = [lg.vertex_key(node.a), lg.vertex_key(node.b)];
        if between != cut.between || node.rect.coords() != cut.rect {
            return Err(VerifyError::Cut {
                id: cut.id,
                what: format!("candidate is {} {:?}", pair_name(&between[0], &between[1]), node.rect.coords()),
            });
        }
        selected.push(cut.id);
    }
    let sorted: Vec<usize> = selected.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if sorted != selected {
        return Err(VerifyError::Cut {
            id: selected.first().copied().unwrap_or(0),
            what: "selected cuts must be sorted and unique".into(),
        });
    }
    check_cut_rules(&eg, &colors, &selected)?;

    let eval = evaluate(&lg, &eg, &colors, &selected, claimed.alpha, result.mode == Mode::TwoMask);
    let actual_conflicts: BTreeSet<String> = eval
        .conflicts
        .iter()
        .map(|&e| pair_name(&lg.vertex_key(lg.conflict_edges[e].u), &lg.vertex_key(lg.conflict_edges[e].v)))
        .collect();
    let reported_conflicts: BTreeSet<String> = result.conflicts.iter().map(|[a, b]| pair_name(a, b)).collect();
    diff("conflicts", &reported_conflicts, &actual_conflicts)?;

    let actual_stitches: BTreeSet<String> = eval
        .stitches
        .iter()
        .map(|&s| {
            let s = &lg.stitch_edges[s];
            format!("{} {}={}", pair_name(&lg.vertex_key(s.u), &lg.vertex_key(s.v)), axis_name(s.axis), s.at)
        })
        .collect();
    let reported_stitches: BTreeSet<String> = result
        .stitches
        .iter()
        .map(|s| format!("{} {}={}", pair_name(&s.between[0], &s.between[1]), s.axis, s.at))
        .collect();
    diff("stitches", &reported_stitches, &actual_stitches)?;

    let shapes: BTreeSet<String> = trim_shapes(&eg, &selected).iter().map(|r| format!("{:?}", r.coords())).collect();
    let reported_shapes: BTreeSet<String> = result.trim_cuts.iter().map(|r| format!("{r:?}")).collect();
    diff("trim cuts", &reported_shapes, &shapes)?;

    let reported = parse_decimal(&result.cost);
    let from_counts = Cost::from_integer(result.conflicts.len() as i64)
        + claimed.alpha * Cost::from_integer(result.stitches.len() as i64);
    if reported != Some(from_counts) || from_counts != eval.cost {
        return Err(VerifyError::Cost {
            reported: result.cost.clone(),
            recomputed: format_decimal(&eval.cost),
        });
    }
    if result.proven_optimal {
        let mut sum = Cost::zero();
        for s in &result.stats {
            sum += parse_decimal(&s.cost).unwrap_or_else(|| Cost::from_integer(i64::MAX));
        }
        if sum != eval.cost {
            return Err(VerifyError::Stats {
                sum: format_decimal(&sum),
                reported: result.cost.clone(),
            });
        }
    }

    Ok(VerifySummary {
        vertices: lg.vertex_count(),
        conflicts: eval.conflicts.len(),
        stitches: eval.stitches.len(),
        cost: eval.cost,
    })
}
