//! Brute-force oracles computed straight from enumerating plus/minus-one
//! step sequences. Nothing here touches the library's tree machinery, so
//! oracle results are an independent route to every expected value.

#![allow(dead_code)] // each integration test pulls in what it needs

use sigma_lab_core::gallery::ProcessKind;
use sigma_lab_core::pathspace::{NodeId, PathSpace};
use sigma_lab_core::rational::{rat, Rational};

/// All `2^n` step vectors, up-step first, matching the tree's leaf order.
pub fn all_step_vectors(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> (n - 1 - i) & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

/// Walk states `s_0..s_n` of a step vector.
pub fn walk(steps: &[i8]) -> Vec<i64> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    let mut s = 0i64;
    out.push(s);
    for step in steps {
        s += *step as i64;
        out.push(s);
    }
    out
}

/// Values of a gallery process along one path.
pub fn process_values(kind: ProcessKind, steps: &[i8]) -> Vec<i64> {
    let states = walk(steps);
    let mut max = 0i64;
    states
        .iter()
        .map(|&s| {
            max = max.max(s);
            match kind {
                ProcessKind::ReflectedSrw => s.abs(),
                ProcessKind::Drawdown => max - s,
                ProcessKind::PositivePart => s.max(0),
                ProcessKind::Custom => panic!("no closed form for custom processes"),
            }
        })
        .collect()
}

/// `E_P[X_n]` by enumerating every `n`-step prefix.
pub fn expected_value(kind: ProcessKind, n: usize) -> Rational {
    let mut total = rat(0);
    for steps in all_step_vectors(n) {
        total += rat(process_values(kind, &steps)[n]);
    }
    total / rat(1i64 << n)
}

/// One-step conditional expectation of the process after a given prefix.
pub fn conditional_after(kind: ProcessKind, prefix: &[i8]) -> Rational {
    let mut total = rat(0);
    for step in [1i8, -1] {
        let mut extended = prefix.to_vec();
        extended.push(step);
        total += rat(process_values(kind, &extended)[extended.len()]);
    }
    total / rat(2)
}

/// Index of the last zero along a value path, if any.
pub fn last_zero_time(values: &[i64]) -> Option<usize> {
    values.iter().rposition(|v| *v == 0)
}

/// First zero strictly after time `n` along a value path, if any.
pub fn first_zero_after_time(values: &[i64], n: usize) -> Option<usize> {
    (n + 1..values.len()).find(|k| values[*k] == 0)
}

/// Mass the level measure gives an atom (identified by its step prefix):
/// the sum, over full-path extensions carrying no zero strictly after the
/// level, of path probability times terminal value.
pub fn level_mass_of_prefix(kind: ProcessKind, h: usize, level: usize, prefix: &[i8]) -> Rational {
    let mut total = rat(0);
    for tail in all_step_vectors(h - prefix.len()) {
        let mut steps = prefix.to_vec();
        steps.extend_from_slice(&tail);
        let values = process_values(kind, &steps);
        if first_zero_after_time(&values, level).is_none() {
            total += rat(values[h]);
        }
    }
    total / rat(1i64 << h)
}

/// Law of the last zero by the difference route: the zero-free component is
/// enumerated directly, the mass at 0 is the one-step expectation less that
/// component, and each later mass is a difference of expectations.
pub fn law_by_differences(kind: ProcessKind, h: usize) -> (Vec<Rational>, Rational) {
    let mut zero_free = rat(0);
    for steps in all_step_vectors(h) {
        let values = process_values(kind, &steps);
        if last_zero_time(&values).is_none() {
            zero_free += rat(values[h]);
        }
    }
    zero_free /= rat(1i64 << h);
    let mut masses = vec![expected_value(kind, 1) - &zero_free];
    for n in 1..h {
        masses.push(expected_value(kind, n + 1) - expected_value(kind, n));
    }
    (masses, zero_free)
}

/// Exact mean absolute endpoint of a fair `k`-step walk, via a Pascal row.
pub fn exact_walk_mean_abs(k: usize) -> Rational {
    let mut row = vec![rat(1)];
    for _ in 0..k {
        let mut next = vec![rat(1)];
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(rat(1));
        row = next;
    }
    let mut total = rat(0);
    for (j, c) in row.iter().enumerate() {
        total += c * rat((2 * j as i64 - k as i64).abs());
    }
    let mut denom = rat(1);
    for _ in 0..k {
        denom *= rat(2);
    }
    total / denom
}

/// Conditional expectation of the depth-`n` marginal of a process, iterated
/// one step at a time down to the root.
pub fn iterated_expectation(x: &sigma_lab_core::AdaptedProcess, n: usize) -> Rational {
    let space = x.space();
    let mut level: Vec<Rational> = space
        .atoms(n)
        .unwrap()
        .iter()
        .map(|a| x.value(*a).clone())
        .collect();
    for depth in (0..n).rev() {
        let atoms = space.atoms(depth).unwrap();
        let mut folded = Vec::with_capacity(atoms.len());
        let mut cursor = 0usize;
        for atom in atoms {
            let mut acc = rat(0);
            for child in space.children(atom) {
                acc += space.edge_prob(child) * &level[cursor];
                cursor += 1;
            }
            folded.push(acc);
        }
        level = folded;
    }
    level[0].clone()
}

/// Tree atom addressed by a step prefix (up-step = first child).
pub fn atom_for_prefix(space: &PathSpace, prefix: &[i8]) -> NodeId {
    let mut node = space.root();
    for step in prefix {
        let mut kids = space.children(node);
        let first = kids.next().expect("internal node has children");
        node = if *step == 1 {
            first
        } else {
            kids.next().expect("binary node")
        };
    }
    node
}
