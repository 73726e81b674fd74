//! The three driver commands: `decompose`, `qmeasure`, and `mc`.

use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

use sigma_lab_core::decomposition::{check_sigma_class, doob_decompose, is_martingale};
use sigma_lab_core::gallery::{make_process, ProcessKind, ProcessSpec};
use sigma_lab_core::montecarlo::{
    estimate_mean, estimate_q_functional, estimate_q_g_tail, uniform_unit, MCEstimate, ScalingSpec,
};
use sigma_lab_core::qmeasure::{build_qn, q_eval, q_law_of_g, restriction_check, uniqueness_probe};
use sigma_lab_core::rational::{format_rational, to_f64};
use sigma_lab_core::Error;

use crate::report::{CheckResult, ErrorReport, LawRow, McSection, NodeRow, Report};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Worker count for sampling streams, capped by SIGMA_LAB_THREADS (default 1).
fn worker_streams() -> usize {
    std::env::var("SIGMA_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| *n >= 1)
        .unwrap_or(1)
}

fn sha256_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let hex: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

struct LoadedSpec {
    spec: ProcessSpec,
    digest: String,
}

fn load_spec(command: &'static str, path: &Path) -> Result<LoadedSpec, u8> {
    let bytes = match std::fs::read(path) {
        Ok(bytes) => bytes,
        Err(error) => {
            ErrorReport {
                command,
                spec_digest: None,
                error: format!("cannot read {}: {error}", path.display()),
            }
            .emit();
            return Err(EXIT_USAGE);
        }
    };
    let digest = sha256_digest(&bytes);
    match serde_json::from_slice::<ProcessSpec>(&bytes) {
        Ok(spec) => Ok(LoadedSpec { spec, digest }),
        Err(error) => {
            ErrorReport {
                command,
                spec_digest: Some(digest),
                error: format!("spec parse error: {error}"),
            }
            .emit();
            Err(EXIT_USAGE)
        }
    }
}

fn usage_error(command: &'static str, digest: Option<String>, error: String) -> u8 {
    ErrorReport {
        command,
        spec_digest: digest,
        error,
    }
    .emit();
    EXIT_USAGE
}

fn finish(mut report: Report, started: Instant, csv: bool) -> u8 {
    report.timing_ms = started.elapsed().as_millis();
    report.emit_stdout(csv);
    report.emit_stderr();
    if report.passed() {
        0
    } else {
        EXIT_FAIL
    }
}

pub fn cmd_decompose(path: &Path, max_horizon: usize, csv: bool) -> u8 {
    let started = Instant::now();
    let loaded = match load_spec("decompose", path) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    if loaded.spec.horizon > max_horizon {
        return usage_error(
            "decompose",
            Some(loaded.digest),
            format!(
                "horizon {} exceeds the enumeration cap {}; raise --max-horizon or use `mc` for sampling estimates",
                loaded.spec.horizon, max_horizon
            ),
        );
    }
    let (space, x) = match make_process(&loaded.spec) {
        Ok(built) => built,
        Err(error) => return usage_error("decompose", Some(loaded.digest), error.to_string()),
    };
    let mut report = Report::new(
        "decompose",
        loaded.digest,
        loaded.spec.kind.to_string(),
        loaded.spec.horizon,
    );
    match doob_decompose(&x) {
        Err(Error::NotSubmartingale { node, drift }) => {
            report.push(CheckResult::fail(
                "submartingale",
                format!("one-step drift {drift} at node {node}"),
            ));
        }
        Err(other) => {
            report.push(CheckResult::fail("decomposition", other.to_string()));
        }
        Ok(dec) => {
            report.push(CheckResult::pass("submartingale"));
            report.push(CheckResult::of(
                "martingale_part",
                is_martingale(dec.martingale()),
                || "martingale part fails its one-step check".to_string(),
            ));
            let sigma = check_sigma_class(&x, &dec).expect("parts share the space");
            let witness = sigma
                .first_witness()
                .map(|n| format!("first witness at node {}", space.node_path(n)))
                .unwrap_or_else(|| "structure invariants violated".to_string());
            report.push(CheckResult::of("sigma_class", sigma.holds(), || witness));
            if sigma.negative_nodes.is_empty() {
                report.push(CheckResult::pass("nonnegative"));
            } else {
                report.push(CheckResult::flagged(
                    "nonnegative",
                    format!(
                        "{} nodes carry negative values (first at {})",
                        sigma.negative_nodes.len(),
                        space.node_path(sigma.negative_nodes[0])
                    ),
                ));
            }
            let rows = space
                .node_ids()
                .map(|n| NodeRow {
                    depth: space.depth(n),
                    node: space.node_path(n),
                    x: format_rational(x.value(n)),
                    martingale: format_rational(dec.martingale().value(n)),
                    compensator: format_rational(dec.compensator().value(n)),
                })
                .collect();
            report.process_table = Some(rows);
        }
    }
    finish(report, started, csv)
}

pub fn cmd_qmeasure(
    path: &Path,
    horizon_override: Option<usize>,
    all_checks: bool,
    max_horizon: usize,
    csv: bool,
) -> u8 {
    let started = Instant::now();
    let loaded = match load_spec("qmeasure", path) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let spec = match horizon_override {
        None => loaded.spec.clone(),
        Some(h) => match loaded.spec.at_horizon(h) {
            Ok(spec) => spec,
            Err(error) => return usage_error("qmeasure", Some(loaded.digest), error.to_string()),
        },
    };
    if spec.horizon > max_horizon {
        return usage_error(
            "qmeasure",
            Some(loaded.digest),
            format!(
                "horizon {} exceeds the enumeration cap {}; raise --max-horizon or use `mc` for sampling estimates",
                spec.horizon, max_horizon
            ),
        );
    }
    let (space, x) = match make_process(&spec) {
        Ok(built) => built,
        Err(error) => return usage_error("qmeasure", Some(loaded.digest), error.to_string()),
    };
    let horizon = space.horizon();
    let mut report = Report::new("qmeasure", loaded.digest, spec.kind.to_string(), horizon);

    let dec = match doob_decompose(&x) {
        Err(Error::NotSubmartingale { node, drift }) => {
            report.push(CheckResult::fail(
                "submartingale",
                format!("one-step drift {drift} at node {node}"),
            ));
            return finish(report, started, csv);
        }
        Err(other) => {
            report.push(CheckResult::fail("decomposition", other.to_string()));
            return finish(report, started, csv);
        }
        Ok(dec) => dec,
    };
    report.push(CheckResult::pass("submartingale"));
    report.push(CheckResult::of(
        "martingale_part",
        is_martingale(dec.martingale()),
        || "martingale part fails its one-step check".to_string(),
    ));
    let sigma = check_sigma_class(&x, &dec).expect("parts share the space");
    let witness = sigma
        .first_witness()
        .map(|n| format!("first witness at node {}", space.node_path(n)))
        .unwrap_or_else(|| "structure invariants violated".to_string());
    report.push(CheckResult::of("sigma_class", sigma.holds(), || witness));
    if sigma.negative_nodes.is_empty() {
        report.push(CheckResult::pass("nonnegative"));
    } else {
        report.push(CheckResult::flagged(
            "nonnegative",
            format!("{} nodes carry negative values", sigma.negative_nodes.len()),
        ));
    }

    // The paired-route identity on every atom of every depth.
    let mut identity = CheckResult::pass("identity_all_atoms");
    'outer: for n in 1..=horizon {
        let atoms = space.atoms(n).expect("depth in range");
        if let Err(error) = q_eval(&x, n, &atoms) {
            identity = CheckResult::fail("identity_all_atoms", error.to_string());
            break 'outer;
        }
    }
    report.push(identity);

    // Law of the last zero, plus its consistency with marginal expectations.
    match q_law_of_g(&x) {
        Err(error) => report.push(CheckResult::fail("law_of_g", error.to_string())),
        Ok(law) => {
            let mut consistent = CheckResult::pass("law_consistency");
            for m in 1..=horizon {
                let expected = x.expectation_p(m).expect("depth in range");
                if law.mass_before(m) != expected {
                    consistent = CheckResult::fail(
                        "law_consistency",
                        format!(
                            "mass before {m} is {}, expected {}",
                            format_rational(&law.mass_before(m)),
                            format_rational(&expected)
                        ),
                    );
                    break;
                }
            }
            report.push(consistent);
            let rows = (0..horizon)
                .map(|n| LawRow {
                    n,
                    e_p_x_n: format_rational(&x.expectation_p(n).expect("depth in range")),
                    q_g_n: format_rational(&law.masses[n]),
                })
                .collect();
            report.law_of_g = Some(rows);
            report.zero_free_mass = Some(format_rational(&law.zero_free));
            report.e_p_x_horizon = Some(format_rational(
                &x.expectation_p(horizon).expect("depth in range"),
            ));
        }
    }

    if all_checks {
        let measures: Vec<_> = (0..horizon)
            .map(|level| build_qn(&x, level).expect("level in range"))
            .collect();

        let mut density = CheckResult::pass("density_matrix");
        'density: for qn in &measures {
            for p in qn.level() + 1..=horizon {
                if !qn.density_check(p).expect("p in range") {
                    density = CheckResult::fail(
                        "density_matrix",
                        format!("level {} fails at depth {p}", qn.level()),
                    );
                    break 'density;
                }
            }
        }
        report.push(density);

        let mut kills = CheckResult::pass("kills_future_zeros");
        for qn in &measures {
            if !qn.kills_future_zeros() {
                kills = CheckResult::fail(
                    "kills_future_zeros",
                    format!("level {} keeps mass on a future zero", qn.level()),
                );
                break;
            }
        }
        report.push(kills);

        let mut restriction = CheckResult::pass("restriction_chain");
        'restriction: for m in 0..horizon {
            for n in m..horizon {
                if !restriction_check(&measures[m], &measures[n]).expect("levels ordered") {
                    restriction = CheckResult::fail(
                        "restriction_chain",
                        format!("levels ({m}, {n}) disagree"),
                    );
                    break 'restriction;
                }
            }
        }
        report.push(restriction);

        let mut monotone = CheckResult::pass("monotone_levels");
        'monotone: for pair in measures.windows(2) {
            for pos in 0..space.num_leaves() {
                if pair[0].measure().weight(pos) > pair[1].measure().weight(pos) {
                    monotone = CheckResult::fail(
                        "monotone_levels",
                        format!(
                            "leaf {} loses mass between levels {} and {}",
                            pos,
                            pair[0].level(),
                            pair[1].level()
                        ),
                    );
                    break 'monotone;
                }
            }
        }
        report.push(monotone);

        let mut totals = CheckResult::pass("level_totals");
        for qn in &measures {
            let expected = x.expectation_p(qn.level() + 1).expect("depth in range");
            if qn.total() != expected {
                totals = CheckResult::fail(
                    "level_totals",
                    format!(
                        "level {} has total {}, expected {}",
                        qn.level(),
                        format_rational(&qn.total()),
                        format_rational(&expected)
                    ),
                );
                break;
            }
        }
        report.push(totals);

        report.push(CheckResult::of("uniqueness_probe", uniqueness_probe(&x), || {
            "reconstruction from expectation data disagrees".to_string()
        }));
    }

    finish(report, started, csv)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_mc(
    path: &Path,
    n: Option<usize>,
    count: u64,
    seed: u64,
    scaling_m: Option<u32>,
    t: Option<f64>,
    max_horizon: usize,
    csv: bool,
) -> u8 {
    let started = Instant::now();
    let loaded = match load_spec("mc", path) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let streams = worker_streams();
    let mut report = Report::new(
        "mc",
        loaded.digest.clone(),
        loaded.spec.kind.to_string(),
        loaded.spec.horizon,
    );
    if count == 0 {
        return usage_error("mc", Some(loaded.digest), "--count must be at least 1".to_string());
    }
    if count == 1 {
        report
            .warnings
            .push("single-sample run: the standard error degenerates to 0".to_string());
    }

    let section = match (n, t, scaling_m) {
        (Some(_), Some(_), _) | (Some(_), None, Some(_)) => {
            return usage_error(
                "mc",
                Some(loaded.digest),
                "choose either --n (functional mode) or --t with --scaling-m (scaling mode)"
                    .to_string(),
            );
        }
        (None, None, None) => {
            return usage_error(
                "mc",
                Some(loaded.digest),
                "one of --n or --t with --scaling-m is required".to_string(),
            );
        }
        (None, Some(_), None) | (None, None, Some(_)) => {
            return usage_error(
                "mc",
                Some(loaded.digest),
                "scaling mode needs both --t and --scaling-m".to_string(),
            );
        }
        (None, Some(time), Some(m)) => {
            let scaling = match ScalingSpec::new(time, m) {
                Ok(scaling) => scaling,
                Err(error) => return usage_error("mc", Some(loaded.digest), error.to_string()),
            };
            let probe = match estimate_q_g_tail(&scaling, count, seed, streams) {
                Ok(probe) => probe,
                Err(error) => return usage_error("mc", Some(loaded.digest), error.to_string()),
            };
            let z = z_score(&probe.mc, Some(probe.target));
            McSection {
                mode: "scaling",
                estimate: probe.mc.estimate,
                std_error: probe.mc.std_error,
                count,
                seed,
                streams,
                n: None,
                time: Some(time),
                steps_per_unit: Some(m),
                steps: Some(probe.steps),
                target: Some(probe.target),
                z_score: z,
                gap: Some(probe.gap),
            }
        }
        (Some(n), None, None) => {
            if n == 0 {
                return usage_error("mc", Some(loaded.digest), "--n must be at least 1".to_string());
            }
            let estimate = match functional_estimate(&loaded.spec, n, count, seed, streams) {
                Ok(estimate) => estimate,
                Err(error) => return usage_error("mc", Some(loaded.digest), error.to_string()),
            };
            let target = exact_target(&loaded.spec, n, max_horizon);
            let z = z_score(&estimate, target);
            McSection {
                mode: "functional",
                estimate: estimate.estimate,
                std_error: estimate.std_error,
                count,
                seed,
                streams,
                n: Some(n),
                time: None,
                steps_per_unit: None,
                steps: Some(n),
                target,
                z_score: z,
                gap: target.map(|t| estimate.estimate - t),
            }
        }
    };
    if section.std_error == 0.0 && count > 1 {
        report
            .warnings
            .push("zero standard error: every sample took the same value".to_string());
    }
    if let Some(z) = section.z_score {
        report.push(CheckResult::of("z_within_4_se", z.abs() <= 4.0, || {
            format!("|z| = {} exceeds 4", z.abs())
        }));
    }
    report.mc = Some(section);
    finish(report, started, csv)
}

fn z_score(estimate: &MCEstimate, target: Option<f64>) -> Option<f64> {
    match target {
        Some(target) if estimate.std_error > 0.0 => {
            Some((estimate.estimate - target) / estimate.std_error)
        }
        _ => None,
    }
}

/// Sampling estimate of `E_P[X_n]` for the spec's process: gallery kinds run
/// on streamed fair walks, custom specs on their own tree.
fn functional_estimate(
    spec: &ProcessSpec,
    n: usize,
    count: u64,
    seed: u64,
    streams: usize,
) -> Result<MCEstimate, Error> {
    match spec.kind {
        ProcessKind::ReflectedSrw => {
            estimate_q_functional(|s| s[n].unsigned_abs() as f64, |_| 1.0, n, count, seed, streams)
        }
        ProcessKind::Drawdown => estimate_q_functional(
            |s| (s.iter().take(n + 1).copied().max().unwrap_or(0) - s[n]) as f64,
            |_| 1.0,
            n,
            count,
            seed,
            streams,
        ),
        ProcessKind::PositivePart => {
            estimate_q_functional(|s| s[n].max(0) as f64, |_| 1.0, n, count, seed, streams)
        }
        ProcessKind::Custom => {
            if spec.horizon < n {
                return Err(Error::MalformedSpec(format!(
                    "custom spec has horizon {}, cannot evaluate at time {n}",
                    spec.horizon
                )));
            }
            let (space, x) = make_process(spec)?;
            let edge: Vec<f64> = space
                .node_ids()
                .map(|node| to_f64(space.edge_prob(node)))
                .collect();
            estimate_mean(
                move |rng| {
                    let mut node = space.root();
                    for _ in 0..n {
                        let u = uniform_unit(rng);
                        let mut acc = 0.0;
                        let mut next = None;
                        for child in space.children(node) {
                            acc += edge[space.node_index(child)];
                            if u < acc {
                                next = Some(child);
                                break;
                            }
                        }
                        node = next
                            .or_else(|| space.children(node).last())
                            .expect("internal node has children");
                    }
                    to_f64(x.value(node))
                },
                count,
                seed,
                streams,
            )
        }
    }
}

/// Exact enumeration target when it stays under the cap.
fn exact_target(spec: &ProcessSpec, n: usize, max_horizon: usize) -> Option<f64> {
    let enumerable = match spec.kind {
        ProcessKind::Custom => n <= spec.horizon,
        _ => n <= max_horizon,
    };
    if !enumerable {
        return None;
    }
    let at_n = match spec.kind {
        ProcessKind::Custom => spec.clone(),
        _ => spec.at_horizon(n).expect("gallery kinds rescale"),
    };
    let (_, x) = make_process(&at_n).ok()?;
    Some(to_f64(&x.expectation_p(n).ok()?))
}
