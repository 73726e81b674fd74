//! Sampling estimates checked against the exact enumeration oracle.

mod support;

use sigma_lab_core::gallery::ProcessKind;
use sigma_lab_core::montecarlo::{
    estimate_mean, estimate_q_functional, estimate_q_g_tail, merge_estimates, MCEstimate,
    ScalingSpec,
};
use sigma_lab_core::rational::to_f64;

use support::{exact_walk_mean_abs, expected_value};

const COUNT: u64 = 100_000;
const SEED: u64 = 0x5EED;

fn within_band(estimate: &MCEstimate, exact: f64) {
    let band = 4.0 * estimate.std_error;
    assert!(
        (estimate.estimate - exact).abs() <= band,
        "estimate {} strays from {} by more than {}",
        estimate.estimate,
        exact,
        band
    );
}

#[test]
fn weighted_means_match_exact_expectations() {
    // E_P[X_n] for the reflected walk: 1, 1, 3/2 at n = 1, 2, 3. The first is
    // noise-free (|S_1| = 1 on every path), so the band there is zero wide.
    for (n, frozen) in [(1usize, 1.0f64), (2, 1.0), (3, 1.5)] {
        assert_eq!(to_f64(&expected_value(ProcessKind::ReflectedSrw, n)), frozen);
        let est = estimate_q_functional(
            |s| s[n].abs() as f64,
            |_| 1.0,
            n,
            COUNT,
            SEED,
            1,
        )
        .unwrap();
        within_band(&est, frozen);
    }
}

#[test]
fn indicator_functional_halves_the_mass() {
    // F = 1{S_1 > 0} with weight |S_1|: exactly 1/2 by symmetry.
    let est = estimate_q_functional(
        |s| s[1].abs() as f64,
        |s| if s[1] > 0 { 1.0 } else { 0.0 },
        1,
        COUNT,
        SEED + 1,
        1,
    )
    .unwrap();
    within_band(&est, 0.5);
    assert!(est.std_error > 0.0);
}

#[test]
fn partitioned_streams_agree_with_a_single_stream() {
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
        use rand_chacha::rand_core::RngCore;
        let mut s = 0i64;
        for _ in 0..4 {
            s += if rng.next_u32() & 1 == 1 { 1 } else { -1 };
        }
        s.abs() as f64
    };
    let single = estimate_mean(sample, COUNT, SEED, 1).unwrap();
    let split = estimate_mean(sample, COUNT, SEED, 4).unwrap();
    let joint = (single.std_error.powi(2) + split.std_error.powi(2)).sqrt();
    assert!((single.estimate - split.estimate).abs() <= 4.0 * joint);

    // Rebuilding each worker stream as its own single-stream run and merging
    // by sample size reproduces the split run bit for bit.
    let parts: Vec<MCEstimate> = (0..4u64)
        .map(|w| {
            let derived = sigma_lab_core::derive_stream_seed(SEED, w);
            estimate_mean(sample, COUNT / 4, derived, 1).unwrap()
        })
        .collect();
    let merged = merge_estimates(&parts, SEED);
    assert_eq!(merged.estimate, split.estimate);
    assert_eq!(merged.count, split.count);
    assert!((merged.std_error - split.std_error).abs() < 1e-15);
}

#[test]
fn scaling_probe_tracks_the_exact_walk_mean() {
    let scaling = ScalingSpec::new(1.0, 25).unwrap();
    let probe = estimate_q_g_tail(&scaling, 40_000, SEED + 2, 1).unwrap();
    assert_eq!(probe.steps, 25);
    let exact = to_f64(&exact_walk_mean_abs(25)) / 5.0;
    within_band(&probe.mc, exact);
    assert!((probe.gap - (probe.mc.estimate - probe.target)).abs() < 1e-15);
}

#[test]
fn four_unit_scaling_targets_root_eight_over_pi() {
    let scaling = ScalingSpec::new(4.0, 100).unwrap();
    assert_eq!(scaling.horizon_steps(), 400);
    let target = (8.0 / std::f64::consts::PI).sqrt();
    assert!((scaling.target() - target).abs() < 1e-15);
    let probe = estimate_q_g_tail(&scaling, 40_000, SEED + 3, 2).unwrap();
    // Walk mean at 400 steps, rescaled by 1/sqrt(100).
    let exact = to_f64(&exact_walk_mean_abs(400)) / 10.0;
    within_band(&probe.mc, exact);
    assert!((probe.mc.estimate - target).abs() <= 4.0 * probe.mc.std_error + 0.01);
}
