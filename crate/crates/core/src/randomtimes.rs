//! Random times on a path space: the first zero of a process strictly after
//! a fixed time, the last zero, and stopping a process at a random time.
//!
//! A random time assigns each leaf a value in `0..=H` or [`TimeValue::Never`].
//! `Never` is a single sentinel with two readings fixed by the operation:
//! for hitting times it means "never hits" (acts like plus infinity, so a
//! process stopped there keeps running), while for the last zero it means
//! "no zero at all" (acts like minus infinity, so such paths belong to every
//! event of the form "last zero before n").

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pathspace::{AdaptedProcess, PathSpace};
use crate::rational::Rational;

/// Value of a random time on one leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeValue {
    At(usize),
    Never,
}

impl TimeValue {
    pub fn is_never(self) -> bool {
        matches!(self, TimeValue::Never)
    }

    /// Read as a last-passage time: `Never` sits below every integer.
    pub fn last_zero_lt(self, n: usize) -> bool {
        match self {
            TimeValue::Never => true,
            TimeValue::At(k) => k < n,
        }
    }

    /// Read as a last-passage time: `Never` sits below every integer.
    pub fn last_zero_le(self, n: usize) -> bool {
        match self {
            TimeValue::Never => true,
            TimeValue::At(k) => k <= n,
        }
    }
}

/// A random time, one [`TimeValue`] per leaf in leaf order.
#[derive(Debug, Clone)]
pub struct RandomTime {
    space: Arc<PathSpace>,
    values: Vec<TimeValue>,
}

impl PartialEq for RandomTime {
    fn eq(&self, other: &Self) -> bool {
        self.space.space_id() == other.space.space_id() && self.values == other.values
    }
}

impl Eq for RandomTime {}

impl RandomTime {
    pub fn new(space: Arc<PathSpace>, values: Vec<TimeValue>) -> Result<Self> {
        if values.len() != space.num_leaves() {
            return Err(Error::WrongValueCount {
                expected: space.num_leaves(),
                got: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &Arc<PathSpace> {
        &self.space
    }

    pub fn values(&self) -> &[TimeValue] {
        &self.values
    }

    pub fn value_at(&self, leaf_position: usize) -> TimeValue {
        self.values[leaf_position]
    }

    /// Measurability check for stopping times: for every `n`, whether the
    /// time equals `n` must be decided uniformly on each depth-`n` atom.
    pub fn is_stopping_time(&self) -> bool {
        self.stopping_failure().is_none()
    }

    /// Depth of the first atom split by an occurrence event, if any.
    pub(crate) fn stopping_failure(&self) -> Option<usize> {
        for depth in 0..=self.space.horizon() {
            for atom in self.space.atoms(depth).expect("depth in range") {
                let mut leaves = self.space.leaf_range(atom);
                let first = self.values[leaves.next().expect("atoms cover leaves")];
                let here = first == TimeValue::At(depth);
                if leaves.any(|i| (self.values[i] == TimeValue::At(depth)) != here) {
                    return Some(depth);
                }
            }
        }
        None
    }
}

/// The first time the process vanishes strictly after time `n`, per leaf;
/// `Never` where no such zero exists by the horizon. Always a stopping time.
pub fn first_zero_after(x: &AdaptedProcess, n: usize) -> Result<RandomTime> {
    let space = x.space();
    let horizon = space.horizon();
    if n >= horizon {
        return Err(Error::DepthOutOfRange { depth: n, horizon });
    }
    // One forward pass: carry the first qualifying zero down the tree.
    let mut hit: Vec<Option<usize>> = vec![None; space.num_nodes()];
    for node in space.node_ids() {
        let depth = space.depth(node);
        let inherited = space.parent(node).and_then(|p| hit[space.node_index(p)]);
        hit[space.node_index(node)] = inherited.or_else(|| {
            (depth > n && x.value(node).is_zero()).then_some(depth)
        });
    }
    let values = space
        .leaves()
        .into_iter()
        .map(|leaf| match hit[space.node_index(leaf)] {
            Some(k) => TimeValue::At(k),
            None => TimeValue::Never,
        })
        .collect();
    let time = RandomTime::new(space.clone(), values)?;
    debug_assert!(time.is_stopping_time());
    Ok(time)
}

/// The last time the process vanishes, per leaf; `Never` on zero-free paths.
/// Generally not a stopping time, so no measurability check applies.
pub fn last_zero(x: &AdaptedProcess) -> RandomTime {
    let space = x.space();
    let mut last: Vec<TimeValue> = vec![TimeValue::Never; space.num_nodes()];
    for node in space.node_ids() {
        let i = space.node_index(node);
        last[i] = if x.value(node).is_zero() {
            TimeValue::At(space.depth(node))
        } else {
            match space.parent(node) {
                Some(p) => last[space.node_index(p)],
                None => TimeValue::Never,
            }
        };
    }
    let values = space
        .leaves()
        .into_iter()
        .map(|leaf| last[space.node_index(leaf)])
        .collect();
    RandomTime::new(space.clone(), values).expect("one value per leaf")
}

/// Freezes the process at a stopping time: below the point where the time
/// occurs, every node keeps the value of its frozen ancestor; elsewhere the
/// process is unchanged. `Never` never stops.
pub fn stop_process(x: &AdaptedProcess, tau: &RandomTime) -> Result<AdaptedProcess> {
    let space = x.space();
    if tau.space().space_id() != space.space_id() {
        return Err(Error::SpaceMismatch);
    }
    if let Some(depth) = tau.stopping_failure() {
        return Err(Error::NotStoppingTime { depth });
    }
    // frozen[v] = index of the ancestor at which the path stopped, if any.
    let mut frozen: Vec<Option<u32>> = vec![None; space.num_nodes()];
    let mut values: Vec<Rational> = Vec::with_capacity(space.num_nodes());
    for node in space.node_ids() {
        let i = space.node_index(node);
        if let Some(parent) = space.parent(node) {
            let pi = space.node_index(parent);
            frozen[i] = frozen[pi].or_else(|| {
                // Did the time fire at the parent? Uniform on its atom, so
                // one covered leaf decides.
                let leaf = space.leaf_range(parent).start;
                (tau.value_at(leaf) == TimeValue::At(space.depth(parent)))
                    .then_some(pi as u32)
            });
        }
        match frozen[i] {
            Some(ancestor) => values.push(values[ancestor as usize].clone()),
            None => values.push(x.value(node).clone()),
        }
    }
    AdaptedProcess::new(space.clone(), values)
}

/// Convenience: membership of each leaf in the event "last zero before `n`".
pub fn last_zero_before(g: &RandomTime, n: usize) -> Vec<bool> {
    g.values().iter().map(|v| v.last_zero_lt(n)).collect()
}
