//! Random-time behaviour checked leaf by leaf against path enumeration.

mod support;

use sigma_lab_core::decomposition::is_martingale_from;
use sigma_lab_core::gallery::{make_process, ProcessKind, ProcessSpec};
use sigma_lab_core::pathspace::AdaptedProcess;
use sigma_lab_core::randomtimes::{first_zero_after, last_zero, stop_process, TimeValue};

use support::{all_step_vectors, first_zero_after_time, last_zero_time, process_values};

const GALLERY: [ProcessKind; 3] = [
    ProcessKind::ReflectedSrw,
    ProcessKind::Drawdown,
    ProcessKind::PositivePart,
];

fn gallery(kind: ProcessKind, h: usize) -> AdaptedProcess {
    make_process(&ProcessSpec::gallery(kind, h)).unwrap().1
}

fn as_time(t: Option<usize>) -> TimeValue {
    match t {
        Some(k) => TimeValue::At(k),
        None => TimeValue::Never,
    }
}

#[test]
fn hitting_and_last_zero_match_enumeration() {
    let h = 5;
    for kind in GALLERY {
        let x = gallery(kind, h);
        let space = x.space().clone();
        let g = last_zero(&x);
        let times: Vec<_> = (0..h).map(|n| first_zero_after(&x, n).unwrap()).collect();
        for (pos, steps) in all_step_vectors(h).iter().enumerate() {
            let values = process_values(kind, steps);
            assert_eq!(
                g.value_at(pos),
                as_time(last_zero_time(&values)),
                "{kind} last zero on {steps:?}"
            );
            for (n, d) in times.iter().enumerate() {
                assert_eq!(
                    d.value_at(pos),
                    as_time(first_zero_after_time(&values, n)),
                    "{kind} first zero after {n} on {steps:?}"
                );
            }
            assert_eq!(space.leaves()[pos], support::atom_for_prefix(&space, steps));
        }
    }
}

#[test]
fn no_zero_after_level_means_last_zero_at_most_level() {
    // The event identity the restriction chain rests on, leaf by leaf.
    for kind in GALLERY {
        let x = gallery(kind, 6);
        let g = last_zero(&x);
        for n in 0..6 {
            let d = first_zero_after(&x, n).unwrap();
            for pos in 0..x.space().num_leaves() {
                assert_eq!(
                    d.value_at(pos).is_never(),
                    g.value_at(pos).last_zero_le(n),
                    "{kind} at level {n}, leaf {pos}"
                );
            }
        }
    }
}

#[test]
fn stopping_at_first_zero_gives_a_martingale_beyond_each_level() {
    for kind in GALLERY {
        let x = gallery(kind, 6);
        for n in 0..6 {
            let d = first_zero_after(&x, n).unwrap();
            assert!(d.is_stopping_time());
            let stopped = stop_process(&x, &d).unwrap();
            assert!(
                is_martingale_from(&stopped, n + 1),
                "{kind} stopped after level {n}"
            );
        }
    }
}

#[test]
fn stopped_process_agrees_with_pathwise_stopping() {
    let h = 5;
    for kind in GALLERY {
        let x = gallery(kind, h);
        let space = x.space().clone();
        for n in 0..h {
            let d = first_zero_after(&x, n).unwrap();
            let stopped = stop_process(&x, &d).unwrap();
            for steps in all_step_vectors(h) {
                let values = process_values(kind, &steps);
                let cut = first_zero_after_time(&values, n).unwrap_or(usize::MAX);
                for p in 0..=h {
                    let node = support::atom_for_prefix(&space, &steps[..p]);
                    let expected = values[p.min(cut)];
                    assert_eq!(
                        *stopped.value(node),
                        sigma_lab_core::rational::rat(expected),
                        "{kind}, level {n}, prefix {:?}",
                        &steps[..p]
                    );
                }
            }
        }
    }
}
