//! Compact enumeration oracle for the acceptance suite, computed from raw
//! step sequences without touching the library's tree machinery.

#![allow(dead_code)]

use sigma_lab_core::gallery::ProcessKind;
use sigma_lab_core::rational::{rat, Rational};

/// All `2^n` step vectors, up-step first (tree leaf order).
pub fn all_step_vectors(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> (n - 1 - i) & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

/// Values of a gallery process along one path.
pub fn process_values(kind: ProcessKind, steps: &[i8]) -> Vec<i64> {
    let mut s = 0i64;
    let mut max = 0i64;
    let mut out = vec![match kind {
        ProcessKind::ReflectedSrw | ProcessKind::Drawdown | ProcessKind::PositivePart => 0,
        ProcessKind::Custom => panic!("no closed form for custom processes"),
    }];
    for step in steps {
        s += *step as i64;
        max = max.max(s);
        out.push(match kind {
            ProcessKind::ReflectedSrw => s.abs(),
            ProcessKind::Drawdown => max - s,
            ProcessKind::PositivePart => s.max(0),
            ProcessKind::Custom => unreachable!(),
        });
    }
    out
}

/// `E_P[X_n]` by full enumeration of `n`-step prefixes.
pub fn expected_value(kind: ProcessKind, n: usize) -> Rational {
    let mut total = rat(0);
    for steps in all_step_vectors(n) {
        total += rat(process_values(kind, &steps)[n]);
    }
    total / rat(1i64 << n)
}

/// Exact mean absolute endpoint of a fair `k`-step walk, via a Pascal row.
pub fn exact_walk_mean_abs(k: usize) -> Rational {
    let mut row = vec![rat(1)];
    for _ in 0..k {
        let mut next = vec![rat(1)];
        for pair in row.windows(2) {
            next.push(&pair[0] + &pair[1]);
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
