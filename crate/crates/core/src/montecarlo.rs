//! Sampling-based estimation of measure functionals for horizons beyond
//! exact enumeration, and a diffusive-scaling probe of the continuous-time
//! identity using rescaled random walks.
//!
//! This is the one corner of the crate that works in double precision; the
//! exact tree construction serves as its oracle. Estimates are reproducible:
//! a run is determined by `(seed, count, streams)`, with per-stream seeds
//! derived from the base seed by a fixed hash, so partitioned runs merge to
//! the same bits regardless of how the streams are scheduled.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A sample-mean estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub estimate: f64,
    /// Bessel-corrected sample standard deviation over the square root of the
    /// sample count; zero for degenerate single-sample runs.
    pub std_error: f64,
    pub count: u64,
    pub seed: u64,
}

/// Running mean and sum of squared deviations of one stream.
#[derive(Debug, Clone, Copy)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn empty() -> Self {
        Moments {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Exact pooling of two disjoint streams.
    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.count as f64 / count as f64);
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64 / count as f64);
        Moments { count, mean, m2 }
    }

    fn estimate(&self, seed: u64) -> MCEstimate {
        let std_error = if self.count <= 1 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt() / (self.count as f64).sqrt()
        };
        MCEstimate {
            estimate: self.mean,
            std_error,
            count: self.count,
            seed,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of a worker stream: the SplitMix64 finalizer applied to the base
/// seed XOR the worker index times the 64-bit golden-ratio increment.
pub fn derive_stream_seed(seed: u64, worker: u64) -> u64 {
    splitmix64(seed ^ worker.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Merges per-stream estimates by sample size, pooling variances exactly.
/// The reported seed is the base seed of the partitioned run.
pub fn merge_estimates(parts: &[MCEstimate], seed: u64) -> MCEstimate {
    let merged = parts
        .iter()
        .map(|p| Moments {
            count: p.count,
            mean: p.estimate,
            m2: p.std_error * p.std_error * p.count as f64 * (p.count.saturating_sub(1)) as f64,
        })
        .fold(Moments::empty(), Moments::merge);
    merged.estimate(seed)
}

/// Mean of `count` draws of `sample`. A single-stream run consumes `seed`
/// directly; a run with `streams > 1` gives worker `w` the derived seed
/// [`derive_stream_seed`]`(seed, w)` and an equal share of the count (the
/// remainder going to the first workers), runs the streams on threads, and
/// merges the per-stream moments in worker order. A partitioned run is
/// therefore bit-reproducible stream by stream through single-stream runs.
pub fn estimate_mean<F>(sample: F, count: u64, seed: u64, streams: usize) -> Result<MCEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if count == 0 {
        return Err(Error::BadSampleCount);
    }
    let streams = (streams.max(1) as u64).min(count);
    let run_stream = |worker: u64| {
        let quota = count / streams + u64::from(worker < count % streams);
        let stream_seed = if streams == 1 {
            seed
        } else {
            derive_stream_seed(seed, worker)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
        let mut moments = Moments::empty();
        for _ in 0..quota {
            moments.push(sample(&mut rng));
        }
        moments
    };
    let merged = if streams == 1 {
        run_stream(0)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..streams)
                .map(|w| scope.spawn(move || run_stream(w)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampler panicked"))
                .fold(Moments::empty(), Moments::merge)
        })
    };
    Ok(merged.estimate(seed))
}

/// Uniform draw in `[0, 1)` with 53-bit resolution.
pub fn uniform_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// States `s_0..s_n` of a fair plus/minus-one walk, one low bit per step.
pub fn sample_walk(rng: &mut ChaCha8Rng, steps: usize) -> Vec<i64> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut s = 0i64;
    states.push(s);
    for _ in 0..steps {
        s += if rng.next_u32() & 1 == 1 { 1 } else { -1 };
        states.push(s);
    }
    states
}

/// Importance-weighted estimate of a measure functional: samples fair walks
/// under the base probability and averages `functional * weight`, both read
/// off the first `n` walk states. With the weight process evaluated at `n`,
/// the mean estimates the measure of the functional on "last zero before n".
pub fn estimate_q_functional<W, F>(
    weight: W,
    functional: F,
    n: usize,
    count: u64,
    seed: u64,
    streams: usize,
) -> Result<MCEstimate>
where
    W: Fn(&[i64]) -> f64 + Sync,
    F: Fn(&[i64]) -> f64 + Sync,
{
    estimate_mean(
        |rng| {
            let states = sample_walk(rng, n);
            functional(&states) * weight(&states)
        },
        count,
        seed,
        streams,
    )
}

/// Diffusive scaling: a target time and a number of walk steps per unit of
/// time; each step moves the rescaled walk by one over the square root of
/// the step rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSpec {
    pub time: f64,
    pub steps_per_unit: u32,
}

impl ScalingSpec {
    pub fn new(time: f64, steps_per_unit: u32) -> Result<Self> {
        if !time.is_finite() || time <= 0.0 {
            return Err(Error::BadScaling(format!("time {time} must be positive")));
        }
        if steps_per_unit == 0 {
            return Err(Error::BadScaling("steps per unit must be positive".to_string()));
        }
        let spec = ScalingSpec {
            time,
            steps_per_unit,
        };
        if spec.horizon_steps() == 0 {
            return Err(Error::BadScaling(format!(
                "time {time} rounds to zero steps at rate {steps_per_unit}"
            )));
        }
        Ok(spec)
    }

    /// Number of walk steps: the target time times the rate, rounded.
    pub fn horizon_steps(&self) -> usize {
        (self.time * self.steps_per_unit as f64).round() as usize
    }

    pub fn step_size(&self) -> f64 {
        1.0 / (self.steps_per_unit as f64).sqrt()
    }

    /// Closed-form continuum target: the mean absolute value of a centred
    /// Gaussian of variance `time`, namely sqrt(2 time / pi).
    pub fn target(&self) -> f64 {
        (2.0 * self.time / std::f64::consts::PI).sqrt()
    }
}

/// Scaling-probe estimate together with its continuum target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTailEstimate {
    pub mc: MCEstimate,
    /// Closed-form continuum value sqrt(2 time / pi).
    pub target: f64,
    /// Walk steps actually simulated.
    pub steps: usize,
    /// Discretization gap: estimate minus target.
    pub gap: f64,
}

/// Estimates the total mass identity at a fixed time via a rescaled fair
/// walk: the mean of the absolute rescaled endpoint, which approaches the
/// continuum target as the step rate grows. The residual discretization gap
/// is reported, not corrected.
pub fn estimate_q_g_tail(
    scaling: &ScalingSpec,
    count: u64,
    seed: u64,
    streams: usize,
) -> Result<GTailEstimate> {
    let steps = scaling.horizon_steps();
    let step_size = scaling.step_size();
    let mc = estimate_mean(
        |rng| {
            let mut s = 0i64;
            for _ in 0..steps {
                s += if rng.next_u32() & 1 == 1 { 1 } else { -1 };
            }
            s.abs() as f64 * step_size
        },
        count,
        seed,
        streams,
    )?;
    let target = scaling.target();
    Ok(GTailEstimate {
        mc,
        target,
        steps,
        gap: mc.estimate - target,
    })
}
