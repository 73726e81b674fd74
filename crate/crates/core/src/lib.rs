//! Exact construction, on finite discrete-time path spaces, of the
//! sigma-finite measure associated with a submartingale whose increasing
//! part is carried by its zero set.
//!
//! The crate provides:
//!
//! - [`pathspace`]: finite event trees with exact rational transition
//!   probabilities, adapted processes, conditional expectations, and
//!   leaf-weight measures;
//! - [`decomposition`]: the martingale/compensator split of a submartingale
//!   and the structural check that the compensator grows only at zeros;
//! - [`randomtimes`]: first zeros after a fixed time (stopping times), last
//!   zeros, and process stopping;
//! - [`qmeasure`]: the family of level measures, their restriction chain and
//!   increasing limit, the paired-route evaluation of the defining identity,
//!   the law of the last zero, and a uniqueness probe that reconstructs the
//!   measures from expectation data alone;
//! - [`gallery`]: built-in example processes (reflected walk, drawdown,
//!   positive part) and ingestion of custom specs;
//! - [`montecarlo`]: reproducible sampling estimates for horizons beyond
//!   enumeration and a diffusive-scaling probe of the continuum identity.
//!
//! Everything outside [`montecarlo`] computes in arbitrary-precision
//! rationals, so every identity is checked by exact equality.
//!
//! ```
//! use sigma_lab_core::gallery::{make_process, ProcessKind, ProcessSpec};
//! use sigma_lab_core::qmeasure::{q_eval, q_law_of_g};
//! use sigma_lab_core::rational::ratio;
//!
//! let spec = ProcessSpec::gallery(ProcessKind::ReflectedSrw, 4);
//! let (space, x) = make_process(&spec).unwrap();
//! let whole = space.atoms(3).unwrap();
//! assert_eq!(q_eval(&x, 3, &whole).unwrap(), ratio(3, 2));
//! assert_eq!(q_law_of_g(&x).unwrap().masses[2], ratio(1, 2));
//! ```

pub mod decomposition;
pub mod error;
pub mod gallery;
pub mod montecarlo;
pub mod pathspace;
pub mod qmeasure;
pub mod randomtimes;
pub mod rational;

pub use decomposition::{
    check_sigma_class, doob_decompose, is_martingale, is_martingale_from, is_submartingale,
    Decomposition, SigmaClassReport, SigmaViolation,
};
pub use error::{Error, Result};
pub use gallery::{build_space, make_process, ProcessKind, ProcessSpec};
pub use montecarlo::{
    derive_stream_seed, estimate_mean, estimate_q_functional, estimate_q_g_tail, merge_estimates,
    sample_walk, uniform_unit, GTailEstimate, MCEstimate, ScalingSpec,
};
pub use pathspace::{AdaptedProcess, NodeId, PathMeasure, PathSpace};
pub use qmeasure::{
    build_qn, q_eval, q_law_of_g, q_limit, restriction_check, uniqueness_probe, LastZeroLaw,
    QSlice, QnMeasure,
};
pub use randomtimes::{first_zero_after, last_zero, stop_process, RandomTime, TimeValue};
pub use rational::Rational;
