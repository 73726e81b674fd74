//! Built-in example processes on the fair-coin binary tree, plus ingestion of
//! custom processes described by explicit node values.
//!
//! On binary trees the first child of a node is the up-step (+1) and the
//! second the down-step (-1). The built-in processes are functions of the
//! resulting simple random walk `S`: its absolute value, its drawdown from
//! the running maximum, and its positive part. All three vanish at time zero
//! and their increasing parts grow only where the process sits at zero.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathspace::{AdaptedProcess, PathSpace};
use crate::rational::{parse_rational, rat, Rational};

/// Names of the built-in processes, plus `custom` for explicit values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    ReflectedSrw,
    Drawdown,
    PositivePart,
    Custom,
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ProcessKind::ReflectedSrw => "reflected_srw",
            ProcessKind::Drawdown => "drawdown",
            ProcessKind::PositivePart => "positive_part",
            ProcessKind::Custom => "custom",
        };
        f.write_str(name)
    }
}

/// Declarative description of a process, as ingested from JSON.
///
/// Rationals are carried as strings (`"p/q"` or `"p"`) so that values survive
/// serialization exactly. For `custom` specs, `values[d][i]` is the process
/// value at the `i`-th depth-`d` node; `edge_probs[d][i]` optionally lists the
/// child edge probabilities of that node (the nesting fixes the tree shape).
/// Without `edge_probs`, a custom spec lives on the fair binary tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_probs: Option<Vec<Vec<Vec<String>>>>,
}

impl ProcessSpec {
    /// Spec for a built-in process at the given horizon.
    pub fn gallery(kind: ProcessKind, horizon: usize) -> Self {
        assert!(kind != ProcessKind::Custom, "custom specs need values");
        Self {
            kind,
            horizon,
            values: None,
            edge_probs: None,
        }
    }

    pub fn custom(
        horizon: usize,
        values: Vec<Vec<String>>,
        edge_probs: Option<Vec<Vec<Vec<String>>>>,
    ) -> Self {
        Self {
            kind: ProcessKind::Custom,
            horizon,
            values: Some(values),
            edge_probs,
        }
    }

    /// Same spec at another horizon; only meaningful for gallery kinds.
    pub fn at_horizon(&self, horizon: usize) -> Result<Self> {
        if self.kind == ProcessKind::Custom {
            return Err(Error::MalformedSpec(
                "cannot override the horizon of a custom spec".to_string(),
            ));
        }
        let mut spec = self.clone();
        spec.horizon = horizon;
        Ok(spec)
    }
}

/// Builds the path space a spec lives on.
pub fn build_space(spec: &ProcessSpec) -> Result<Arc<PathSpace>> {
    if spec.horizon == 0 {
        return Err(Error::HorizonTooSmall);
    }
    match spec.kind {
        ProcessKind::Custom => match &spec.edge_probs {
            None => PathSpace::fair_binary(spec.horizon),
            Some(raw) => {
                let mut parsed = Vec::with_capacity(raw.len());
                for lists in raw {
                    let mut level = Vec::with_capacity(lists.len());
                    for probs in lists {
                        level.push(
                            probs
                                .iter()
                                .map(|s| parse_rational(s))
                                .collect::<Result<Vec<Rational>>>()?,
                        );
                    }
                    parsed.push(level);
                }
                PathSpace::from_child_probs(spec.horizon, &parsed)
            }
        },
        _ => {
            if spec.values.is_some() || spec.edge_probs.is_some() {
                return Err(Error::MalformedSpec(format!(
                    "{} specs take no explicit values or edge probabilities",
                    spec.kind
                )));
            }
            PathSpace::fair_binary(spec.horizon)
        }
    }
}

/// Walk state (position, running maximum) per node of a binary tree.
/// Parents precede children in index order, so one forward pass suffices.
fn walk_states(space: &PathSpace) -> Result<Vec<(i64, i64)>> {
    let mut states = vec![(0i64, 0i64); space.num_nodes()];
    for node in space.node_ids() {
        let here = states[space.node_index(node)];
        let kids: Vec<_> = space.children(node).collect();
        if space.depth(node) < space.horizon() && kids.len() != 2 {
            return Err(Error::MalformedSpec(
                "gallery processes need a binary tree".to_string(),
            ));
        }
        for (offset, child) in kids.iter().enumerate() {
            let step = if offset == 0 { 1 } else { -1 };
            let s = here.0 + step;
            states[space.node_index(*child)] = (s, here.1.max(s));
        }
    }
    Ok(states)
}

/// Builds the space and the process a spec describes.
pub fn make_process(spec: &ProcessSpec) -> Result<(Arc<PathSpace>, AdaptedProcess)> {
    let space = build_space(spec)?;
    let process = match spec.kind {
        ProcessKind::Custom => custom_process(spec, &space)?,
        kind => gallery_process(kind, &space)?,
    };
    Ok((space, process))
}

fn gallery_process(kind: ProcessKind, space: &Arc<PathSpace>) -> Result<AdaptedProcess> {
    let states = walk_states(space)?;
    let values = states
        .iter()
        .map(|&(s, m)| {
            let x = match kind {
                ProcessKind::ReflectedSrw => s.abs(),
                ProcessKind::Drawdown => m - s,
                ProcessKind::PositivePart => s.max(0),
                ProcessKind::Custom => unreachable!(),
            };
            rat(x)
        })
        .collect();
    AdaptedProcess::new(Arc::clone(space), values)
}

/// Walk positions per node of a binary tree (up-step first). Handy for
/// building custom processes that are functions of the walk.
pub fn walk_positions(space: &PathSpace) -> Result<Vec<i64>> {
    Ok(walk_states(space)?.into_iter().map(|(s, _)| s).collect())
}

fn custom_process(spec: &ProcessSpec, space: &Arc<PathSpace>) -> Result<AdaptedProcess> {
    let Some(rows) = &spec.values else {
        return Err(Error::MalformedSpec(
            "custom specs require explicit values".to_string(),
        ));
    };
    if rows.len() != spec.horizon + 1 {
        return Err(Error::MalformedSpec(format!(
            "expected values for depths 0..={}, got {} rows",
            spec.horizon,
            rows.len()
        )));
    }
    let mut values = Vec::with_capacity(space.num_nodes());
    for (depth, row) in rows.iter().enumerate() {
        let atoms = space.atoms(depth)?;
        if row.len() != atoms.len() {
            return Err(Error::MalformedSpec(format!(
                "depth {}: expected {} values, got {}",
                depth,
                atoms.len(),
                row.len()
            )));
        }
        for s in row {
            values.push(parse_rational(s)?);
        }
    }
    AdaptedProcess::new(Arc::clone(space), values)
}
