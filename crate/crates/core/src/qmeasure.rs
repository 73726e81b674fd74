//! Construction of the level measures and the horizon slice of the measure
//! associated with a submartingale whose increasing part lives on its zero
//! set, together with exact checks of every identity the construction rests
//! on.
//!
//! For a level `n`, the level-`n` measure weighs each leaf by the path
//! probability times the process stopped at its first zero strictly after
//! `n`, evaluated at the horizon. Because the stopped process vanishes
//! whenever that zero exists, the same weights admit the closed form
//!
//! ```text
//! weight(leaf) = prob(leaf) * X_H(leaf) * 1{ last zero of the path <= n }
//! ```
//!
//! and the constructor computes both routes and insists they agree. The level
//! measures increase with `n` (for nonnegative processes), each one is the
//! restriction of any later one to the paths whose last zero fits under its
//! level, and their increasing limit is the horizon slice of the full
//! measure. Each check below exercises one link of that chain; on finite
//! trees each holds as an exact rational identity whenever the compensator
//! grows only at the zeros of the process, and the paired evaluation in
//! [`q_eval`] reports a witnessing atom whenever it does not.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pathspace::{validate_event, AdaptedProcess, NodeId, PathMeasure};
use crate::randomtimes::{first_zero_after, last_zero, stop_process, TimeValue};
use crate::rational::{format_rational, Rational};

/// Finite measure carrying the paths whose last zero is at most `level`,
/// with density given by the stopped process.
#[derive(Debug, Clone)]
pub struct QnMeasure {
    level: usize,
    process: AdaptedProcess,
    stopped: AdaptedProcess,
    measure: PathMeasure,
}

impl QnMeasure {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn measure(&self) -> &PathMeasure {
        &self.measure
    }

    /// The submartingale the measure was built from.
    pub fn process(&self) -> &AdaptedProcess {
        &self.process
    }

    /// The process stopped at its first zero strictly after the level.
    pub fn stopped(&self) -> &AdaptedProcess {
        &self.stopped
    }

    pub fn total(&self) -> Rational {
        self.measure.total()
    }

    /// Verifies the defining density at depth `p`: the mass of every depth-`p`
    /// atom must equal the base-probability expectation of the stopped
    /// process over that atom. Valid for `level + 1 <= p <= horizon`.
    pub fn density_check(&self, p: usize) -> Result<bool> {
        let space = self.process.space();
        let horizon = space.horizon();
        if p <= self.level || p > horizon {
            return Err(Error::DepthOutOfRange { depth: p, horizon });
        }
        for atom in space.atoms(p)? {
            let mass = self.measure.atom_mass(atom);
            let expectation = space.path_prob(atom) * self.stopped.value(atom);
            if mass != expectation {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff every leaf whose path still has a zero strictly after the
    /// level carries weight zero.
    pub fn kills_future_zeros(&self) -> bool {
        let d = first_zero_after(&self.process, self.level).expect("level validated at build");
        (0..self.process.space().num_leaves())
            .all(|pos| d.value_at(pos).is_never() || self.measure.weight(pos).is_zero())
    }
}

/// Builds the level-`n` measure of a process, computing the stopped-density
/// weights and the closed form and asserting their agreement.
pub fn build_qn(x: &AdaptedProcess, level: usize) -> Result<QnMeasure> {
    let space = x.space();
    let horizon = space.horizon();
    if level >= horizon {
        return Err(Error::DepthOutOfRange {
            depth: level,
            horizon,
        });
    }
    let d = first_zero_after(x, level)?;
    let stopped = stop_process(x, &d)?;
    let g = last_zero(x);
    let leaves = space.leaves();
    let weights: Vec<Rational> = leaves
        .iter()
        .map(|l| space.path_prob(*l) * stopped.value(*l))
        .collect();
    let closed_form: Vec<Rational> = leaves
        .iter()
        .enumerate()
        .map(|(pos, l)| {
            if g.value_at(pos).last_zero_le(level) {
                space.path_prob(*l) * x.value(*l)
            } else {
                Rational::zero()
            }
        })
        .collect();
    assert_eq!(
        weights, closed_form,
        "stopped-density weights disagree with the closed form"
    );
    Ok(QnMeasure {
        level,
        process: x.clone(),
        stopped,
        measure: PathMeasure::from_weights_unchecked(space.clone(), weights),
    })
}

/// True iff the lower-level measure is exactly the restriction of the
/// higher-level one to the paths whose last zero is at most the lower level.
pub fn restriction_check(lower: &QnMeasure, higher: &QnMeasure) -> Result<bool> {
    if lower.process.space().space_id() != higher.process.space().space_id() {
        return Err(Error::SpaceMismatch);
    }
    if lower.process != higher.process {
        return Err(Error::ProcessMismatch);
    }
    if lower.level > higher.level {
        return Err(Error::LevelOrder {
            lower: lower.level,
            higher: higher.level,
        });
    }
    let g = last_zero(&lower.process);
    for pos in 0..lower.process.space().num_leaves() {
        let restricted = if g.value_at(pos).last_zero_le(lower.level) {
            higher.measure.weight(pos).clone()
        } else {
            Rational::zero()
        };
        if *lower.measure.weight(pos) != restricted {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Horizon slice of the full measure: the increasing limit of the level
/// measures, annotated with the last zero of each path.
#[derive(Debug, Clone)]
pub struct QSlice {
    measure: PathMeasure,
    last_zero: Vec<TimeValue>,
}

impl QSlice {
    pub fn measure(&self) -> &PathMeasure {
        &self.measure
    }

    /// Last zero of the process along each leaf's path.
    pub fn last_zero(&self) -> &[TimeValue] {
        &self.last_zero
    }

    pub fn total(&self) -> Rational {
        self.measure.total()
    }
}

/// Leaf-wise maximum of the level measures over all levels. For nonnegative
/// processes the limit is attained at the top level and equals the closed
/// form `prob * X_H * 1{ last zero <= H - 1 }`, which is asserted.
pub fn q_limit(x: &AdaptedProcess) -> QSlice {
    let space = x.space();
    let horizon = space.horizon();
    let mut weights = build_qn(x, 0)
        .expect("horizon is at least 1")
        .measure
        .weights()
        .to_vec();
    for level in 1..horizon {
        let qn = build_qn(x, level).expect("level in range");
        for (w, v) in weights.iter_mut().zip(qn.measure.weights()) {
            if v > w {
                *w = v.clone();
            }
        }
    }
    let g = last_zero(x);
    if x.is_nonnegative() {
        for (pos, leaf) in space.leaves().iter().enumerate() {
            let closed = if g.value_at(pos).last_zero_le(horizon - 1) {
                space.path_prob(*leaf) * x.value(*leaf)
            } else {
                Rational::zero()
            };
            assert_eq!(weights[pos], closed, "limit disagrees with the closed form");
        }
    }
    QSlice {
        measure: PathMeasure::from_weights_unchecked(space.clone(), weights),
        last_zero: g.values().to_vec(),
    }
}

/// Evaluates the measure of an event of depth-`n` atoms intersected with
/// "last zero before n", via two independent routes:
///
/// 1. the base-probability expectation of the process over the event, and
/// 2. the mass of the event under the level-(n-1) measure, restricted to the
///    paths whose last zero lies before `n`.
///
/// Both are computed atom by atom; any disagreement is reported with the
/// witnessing atom and signals either corrupted inputs or a compensator that
/// grows off the zero set.
pub fn q_eval(x: &AdaptedProcess, n: usize, event: &[NodeId]) -> Result<Rational> {
    let space = x.space();
    let horizon = space.horizon();
    if n < 1 || n > horizon {
        return Err(Error::DepthOutOfRange { depth: n, horizon });
    }
    validate_event(space, event)?;
    if let Some(first) = event.first() {
        if space.depth(*first) != n {
            return Err(Error::BadEvent(format!(
                "event atoms have depth {}, expected {}",
                space.depth(*first),
                n
            )));
        }
    }
    let qn = build_qn(x, n - 1)?;
    let g = last_zero(x);
    let mut total = Rational::zero();
    for atom in event {
        let expectation_side = space.path_prob(*atom) * x.value(*atom);
        let measure_side: Rational = space
            .leaf_range(*atom)
            .filter(|pos| g.value_at(*pos).last_zero_lt(n))
            .map(|pos| qn.measure.weight(pos).clone())
            .sum();
        if expectation_side != measure_side {
            return Err(Error::IdentityMismatch {
                depth: n,
                atom: space.node_path(*atom),
                expectation_side: format_rational(&expectation_side),
                measure_side: format_rational(&measure_side),
            });
        }
        total += expectation_side;
    }
    Ok(total)
}

/// Distribution of the last zero under the limiting measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LastZeroLaw {
    /// `masses[n]` is the mass of "last zero exactly n", for `n < horizon`.
    pub masses: Vec<Rational>,
    /// Mass carried by paths on which the process never vanishes.
    pub zero_free: Rational,
}

impl LastZeroLaw {
    /// Mass of "last zero before n": zero-free component plus all masses
    /// strictly below `n`.
    pub fn mass_before(&self, n: usize) -> Rational {
        let capped = n.min(self.masses.len());
        self.masses[..capped]
            .iter()
            .fold(self.zero_free.clone(), |acc, m| acc + m)
    }
}

/// Reads the law of the last zero off the horizon slice. Fails on negative
/// masses, which signal a process that is not a nonnegative submartingale.
pub fn q_law_of_g(x: &AdaptedProcess) -> Result<LastZeroLaw> {
    let space = x.space();
    let horizon = space.horizon();
    let slice = q_limit(x);
    let mut masses = vec![Rational::zero(); horizon];
    let mut zero_free = Rational::zero();
    for pos in 0..space.num_leaves() {
        let w = slice.measure.weight(pos);
        match slice.last_zero[pos] {
            TimeValue::Never => zero_free += w,
            TimeValue::At(k) if k < horizon => masses[k] += w,
            // A last zero at the horizon means the process vanishes there,
            // so the slice already weighs the leaf zero.
            TimeValue::At(_) => debug_assert!(w.is_zero()),
        }
    }
    if zero_free < Rational::zero() {
        return Err(Error::NegativeMass {
            component: "zero-free".to_string(),
            mass: format_rational(&zero_free),
        });
    }
    for (n, mass) in masses.iter().enumerate() {
        if *mass < Rational::zero() {
            return Err(Error::NegativeMass {
                component: format!("g = {n}"),
                mass: format_rational(mass),
            });
        }
    }
    Ok(LastZeroLaw { masses, zero_free })
}

/// Reconstructs every level measure from nothing but the expectation data
/// `{ E_P[1_atom X_n] : n <= H, atom of depth n }` and the per-leaf last-zero
/// annotation, then compares with the direct construction.
///
/// The horizon-level data fixes candidate leaf weights outright; the
/// remaining equations form a triangular system as the depth-`n` atoms
/// intersected with "last zero before n" refine towards the leaves, and are
/// verified atom by atom. Returns true iff the system is consistent and the
/// reconstruction matches [`build_qn`] exactly at every level.
pub fn uniqueness_probe(x: &AdaptedProcess) -> bool {
    let space = x.space();
    let horizon = space.horizon();
    let g = last_zero(x);
    let candidate: Vec<Rational> = space
        .leaves()
        .iter()
        .enumerate()
        .map(|(pos, leaf)| {
            if g.value_at(pos).last_zero_lt(horizon) {
                space.path_prob(*leaf) * x.value(*leaf)
            } else {
                Rational::zero()
            }
        })
        .collect();
    for n in 1..=horizon {
        for atom in space.atoms(n).expect("depth in range") {
            let data = space.path_prob(atom) * x.value(atom);
            let refined: Rational = space
                .leaf_range(atom)
                .filter(|pos| g.value_at(*pos).last_zero_lt(n))
                .map(|pos| candidate[pos].clone())
                .sum();
            if refined != data {
                return false;
            }
        }
    }
    for level in 0..horizon {
        let qn = build_qn(x, level).expect("level in range");
        for (pos, cand) in candidate.iter().enumerate() {
            let reconstructed = if g.value_at(pos).last_zero_le(level) {
                cand.clone()
            } else {
                Rational::zero()
            };
            if *qn.measure.weight(pos) != reconstructed {
                return false;
            }
        }
    }
    true
}
