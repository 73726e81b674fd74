//! Splitting a submartingale into a martingale part and a predictable
//! increasing part, and checking that the increasing part grows only while
//! the process sits at zero.
//!
//! The split is the usual one: the increasing part accumulates the one-step
//! conditional drifts along each path, assigning the step-`n` drift to every
//! child of the depth-`n` node (which makes it predictable), and the
//! martingale part is the remainder. On a finite tree both parts are exact
//! rationals and the split is unique.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pathspace::{AdaptedProcess, NodeId};
use crate::rational::{format_rational, Rational};

/// The two parts of a decomposed submartingale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    martingale: AdaptedProcess,
    compensator: AdaptedProcess,
}

impl Decomposition {
    /// Wraps externally constructed parts; no invariants are checked here,
    /// use [`check_sigma_class`] to verify them.
    pub fn from_parts(martingale: AdaptedProcess, compensator: AdaptedProcess) -> Result<Self> {
        if martingale.space().space_id() != compensator.space().space_id() {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            martingale,
            compensator,
        })
    }

    /// The martingale part.
    pub fn martingale(&self) -> &AdaptedProcess {
        &self.martingale
    }

    /// The predictable increasing part.
    pub fn compensator(&self) -> &AdaptedProcess {
        &self.compensator
    }

    pub fn into_parts(self) -> (AdaptedProcess, AdaptedProcess) {
        (self.martingale, self.compensator)
    }
}

/// Splits a submartingale into martingale part and compensator.
///
/// Fails with the first witnessing node (in level order) if some one-step
/// conditional drift is negative, i.e. `x` is not a submartingale.
pub fn doob_decompose(x: &AdaptedProcess) -> Result<Decomposition> {
    let space = x.space();
    let mut compensator = vec![Rational::zero(); space.num_nodes()];
    for depth in 0..space.horizon() {
        let conditional = x.conditional_expectation(depth)?;
        for (atom, expected) in space.atoms(depth)?.into_iter().zip(conditional) {
            let drift = expected - x.value(atom);
            if drift < Rational::zero() {
                return Err(Error::NotSubmartingale {
                    node: space.node_path(atom),
                    drift: format_rational(&drift),
                });
            }
            let next = &compensator[space.node_index(atom)] + &drift;
            for child in space.children(atom) {
                compensator[space.node_index(child)] = next.clone();
            }
        }
    }
    let martingale = space
        .node_ids()
        .map(|n| x.value(n) - &compensator[space.node_index(n)])
        .collect();
    Ok(Decomposition {
        martingale: AdaptedProcess::new(space.clone(), martingale)?,
        compensator: AdaptedProcess::new(space.clone(), compensator)?,
    })
}

/// True iff every one-step conditional expectation equals the current value.
pub fn is_martingale(process: &AdaptedProcess) -> bool {
    is_martingale_from(process, 0)
}

/// Martingale check restricted to steps taken at depths `>= from_depth`.
/// Used for processes that are only martingales after a stopping level.
pub fn is_martingale_from(process: &AdaptedProcess, from_depth: usize) -> bool {
    let space = process.space();
    for depth in from_depth..space.horizon() {
        let conditional = process.conditional_expectation(depth).expect("depth in range");
        for (atom, expected) in space.atoms(depth).expect("depth in range").into_iter().zip(conditional) {
            if expected != *process.value(atom) {
                return false;
            }
        }
    }
    true
}

/// True iff every one-step conditional expectation is at least the current value.
pub fn is_submartingale(x: &AdaptedProcess) -> bool {
    let space = x.space();
    for depth in 0..space.horizon() {
        let conditional = x.conditional_expectation(depth).expect("depth in range");
        for (atom, expected) in space.atoms(depth).expect("depth in range").into_iter().zip(conditional) {
            if expected < *x.value(atom) {
                return false;
            }
        }
    }
    true
}

/// One step at which the compensator grows although the process is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaViolation {
    /// The node where the process is nonzero.
    pub node: NodeId,
    /// The child carrying the grown compensator value.
    pub child: NodeId,
    /// The nonzero product (compensator increment) x (process value).
    pub product: Rational,
}

/// Outcome of checking the structure hypotheses on a decomposition.
///
/// The class condition holds iff every structural list is empty and the
/// compensator starts at zero; negative process values are reported but do
/// not fail the check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaClassReport {
    /// Steps where the compensator grows off the zero set of the process.
    pub growth_violations: Vec<SigmaViolation>,
    /// Nodes where martingale part + compensator differs from the process.
    pub sum_mismatches: Vec<NodeId>,
    /// Compensator value at the root (must be zero).
    pub compensator_root: Rational,
    /// Children whose compensator value drops below their parent's.
    pub decreasing_steps: Vec<NodeId>,
    /// Parents whose children disagree on the compensator value.
    pub unpredictable_nodes: Vec<NodeId>,
    /// Nodes where the process itself is negative (informational only).
    pub negative_nodes: Vec<NodeId>,
}

impl SigmaClassReport {
    /// True iff the decomposition satisfies all structure hypotheses.
    pub fn holds(&self) -> bool {
        self.growth_violations.is_empty()
            && self.sum_mismatches.is_empty()
            && self.compensator_root.is_zero()
            && self.decreasing_steps.is_empty()
            && self.unpredictable_nodes.is_empty()
    }

    /// First structural witness in level order, if any.
    pub fn first_witness(&self) -> Option<NodeId> {
        let mut candidates: Vec<NodeId> = Vec::new();
        candidates.extend(self.growth_violations.first().map(|v| v.node));
        candidates.extend(self.sum_mismatches.first());
        candidates.extend(self.decreasing_steps.first());
        candidates.extend(self.unpredictable_nodes.first());
        candidates.into_iter().min()
    }
}

/// Verifies the decomposition invariants and lists every step at which the
/// compensator grows while the process is nonzero. An empty report means the
/// submartingale is of the class whose increasing part is carried by its
/// zero set.
pub fn check_sigma_class(x: &AdaptedProcess, dec: &Decomposition) -> Result<SigmaClassReport> {
    let space = x.space();
    if dec.martingale.space().space_id() != space.space_id()
        || dec.compensator.space().space_id() != space.space_id()
    {
        return Err(Error::SpaceMismatch);
    }
    let a = &dec.compensator;
    let n = &dec.martingale;

    let mut report = SigmaClassReport {
        growth_violations: Vec::new(),
        sum_mismatches: Vec::new(),
        compensator_root: a.value(space.root()).clone(),
        decreasing_steps: Vec::new(),
        unpredictable_nodes: Vec::new(),
        negative_nodes: x.negative_nodes(),
    };

    for node in space.node_ids() {
        if n.value(node) + a.value(node) != *x.value(node) {
            report.sum_mismatches.push(node);
        }
        let kids: Vec<NodeId> = space.children(node).collect();
        if kids.windows(2).any(|w| a.value(w[0]) != a.value(w[1])) {
            report.unpredictable_nodes.push(node);
        }
        for child in kids {
            let increment = a.value(child) - a.value(node);
            if increment < Rational::zero() {
                report.decreasing_steps.push(child);
            }
            let product = &increment * x.value(node);
            if !product.is_zero() {
                report.growth_violations.push(SigmaViolation {
                    node,
                    child,
                    product,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{make_process, ProcessKind, ProcessSpec};
    use crate::pathspace::PathSpace;
    use crate::rational::{rat, ratio};

    fn gallery(kind: ProcessKind, horizon: usize) -> AdaptedProcess {
        make_process(&ProcessSpec::gallery(kind, horizon)).unwrap().1
    }

    #[test]
    fn zero_process_decomposes_to_zero_parts() {
        let space = PathSpace::fair_binary(3).unwrap();
        let x = AdaptedProcess::constant(&space, rat(0));
        let dec = doob_decompose(&x).unwrap();
        assert_eq!(*dec.martingale(), x);
        assert_eq!(*dec.compensator(), x);
    }

    #[test]
    fn constant_process_is_a_martingale() {
        let space = PathSpace::fair_binary(3).unwrap();
        let x = AdaptedProcess::constant(&space, rat(7));
        assert!(is_martingale(&x));
        assert!(is_submartingale(&x));
    }

    #[test]
    fn reflected_walk_is_a_submartingale_but_not_a_martingale() {
        let x = gallery(ProcessKind::ReflectedSrw, 3);
        assert!(is_submartingale(&x));
        assert!(!is_martingale(&x));
        assert!(!x.is_predictable());
    }

    #[test]
    fn negated_reflected_walk_is_not_a_submartingale() {
        let x = gallery(ProcessKind::ReflectedSrw, 3);
        let neg = AdaptedProcess::from_fn(x.space(), |_, n| -x.value(n));
        assert!(!is_submartingale(&neg));
        assert!(matches!(
            doob_decompose(&neg),
            Err(Error::NotSubmartingale { .. })
        ));
    }

    #[test]
    fn gallery_compensators_are_predictable_and_martingale_parts_check_out() {
        for kind in [
            ProcessKind::ReflectedSrw,
            ProcessKind::Drawdown,
            ProcessKind::PositivePart,
        ] {
            let x = gallery(kind, 4);
            let dec = doob_decompose(&x).unwrap();
            assert!(is_martingale(dec.martingale()), "{kind}");
            assert!(dec.compensator().is_predictable(), "{kind}");
            let report = check_sigma_class(&x, &dec).unwrap();
            assert!(report.holds(), "{kind}: {report:?}");
            assert!(report.negative_nodes.is_empty(), "{kind}");
        }
    }

    #[test]
    fn reflected_compensator_counts_zeros() {
        // The compensator at a depth-n node equals the number of times the
        // walk sat at zero strictly before n along that node's history.
        let x = gallery(ProcessKind::ReflectedSrw, 4);
        let space = x.space().clone();
        let dec = doob_decompose(&x).unwrap();
        for node in space.node_ids() {
            let mut zeros = 0;
            let mut cursor = node;
            while let Some(parent) = space.parent(cursor) {
                if x.value(parent).is_zero() {
                    zeros += 1;
                }
                cursor = parent;
            }
            assert_eq!(*dec.compensator().value(node), rat(zeros));
        }
    }

    #[test]
    fn drawdown_compensator_steps_by_half_off_zeros() {
        let x = gallery(ProcessKind::Drawdown, 4);
        let space = x.space().clone();
        let dec = doob_decompose(&x).unwrap();
        for node in space.node_ids() {
            for child in space.children(node) {
                let increment = dec.compensator().value(child) - dec.compensator().value(node);
                if x.value(node).is_zero() {
                    assert_eq!(increment, ratio(1, 2));
                } else {
                    assert!(increment.is_zero());
                }
            }
        }
    }

    #[test]
    fn drift_plus_depth_violates_the_class_everywhere_off_zero() {
        // |S_n| + n grows its compensator at every step, so every node with a
        // nonzero value witnesses a violation.
        let base = gallery(ProcessKind::ReflectedSrw, 4);
        let space = base.space().clone();
        let x = AdaptedProcess::from_fn(&space, |s, n| base.value(n) + rat(s.depth(n) as i64));
        let dec = doob_decompose(&x).unwrap();
        let report = check_sigma_class(&x, &dec).unwrap();
        assert!(!report.holds());
        let witnessed: std::collections::BTreeSet<_> =
            report.growth_violations.iter().map(|v| v.node).collect();
        let expected: std::collections::BTreeSet<_> = space
            .node_ids()
            .filter(|n| space.depth(*n) < space.horizon() && !x.value(*n).is_zero())
            .collect();
        assert_eq!(witnessed, expected);
    }

    #[test]
    fn check_rejects_foreign_spaces() {
        let x = gallery(ProcessKind::ReflectedSrw, 2);
        let other = gallery(ProcessKind::ReflectedSrw, 2);
        let dec = doob_decompose(&other).unwrap();
        assert_eq!(check_sigma_class(&x, &dec).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn corrupted_parts_are_reported_field_by_field() {
        let x = gallery(ProcessKind::ReflectedSrw, 3);
        let space = x.space().clone();
        let good = doob_decompose(&x).unwrap();

        // Break the sum at one node.
        let off = AdaptedProcess::from_fn(&space, |s, n| {
            good.martingale().value(n) + rat(u64::from(s.depth(n) == 1) as i64)
        });
        let dec = Decomposition::from_parts(off, good.compensator().clone()).unwrap();
        let report = check_sigma_class(&x, &dec).unwrap();
        assert!(!report.holds());
        assert!(!report.sum_mismatches.is_empty());

        // Make the compensator sibling-dependent and decreasing somewhere.
        let skew = AdaptedProcess::from_fn(&space, |s, n| match s.parent(n) {
            None => rat(0),
            Some(p) => {
                let first = s.children(p).next().unwrap();
                if n == first {
                    good.compensator().value(n) + rat(1)
                } else {
                    good.compensator().value(n) - rat(1)
                }
            }
        });
        let dec = Decomposition::from_parts(good.martingale().clone(), skew).unwrap();
        let report = check_sigma_class(&x, &dec).unwrap();
        assert!(!report.unpredictable_nodes.is_empty());
        assert!(!report.decreasing_steps.is_empty());
        assert!(report.first_witness().is_some());
    }

    #[test]
    fn negative_values_are_flagged_but_do_not_fail() {
        // The plain walk is a martingale (trivially a submartingale) that
        // goes negative; the report flags the nodes without failing.
        let space = PathSpace::fair_binary(2).unwrap();
        let positions = crate::gallery::walk_positions(&space).unwrap();
        let x = AdaptedProcess::from_fn(&space, |s, n| rat(positions[s.node_index(n)]));
        let dec = doob_decompose(&x).unwrap();
        let report = check_sigma_class(&x, &dec).unwrap();
        assert!(report.holds());
        assert!(!report.negative_nodes.is_empty());
    }
}
