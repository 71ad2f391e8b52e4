//! Constructions of continuous, Riemann-integrable functions from [0, 1]
//! into the sequence spaces l_p (0 < p <= 1) whose integral averages
//! misbehave in every way local convexity would forbid: bounded but not
//! separately continuous, separately continuous but unbounded, or bounded
//! and separately continuous without joint continuity.
//!
//! The library builds the tent-sum functions exactly, evaluates their
//! averages in closed form, and verifies the decision criteria tying the
//! coefficient sequences to each behavior. The `lpave` binary drives the
//! same machinery from the command line and exports CSV/JSON artifacts.
//!
//! ```
//! use lp_averages::{average, ConstructionSpec, PExponent, Variant};
//!
//! let spec = ConstructionSpec::new(PExponent::new(0.5)?, Variant::Thm15)?;
//! // the average over the half-block span of block q reaches sqrt(q)
//! let q = 16;
//! let sample = average::ave(&spec, spec.node(q * q)?, spec.node(q * (q + 1))?)?;
//! assert!((sample.norm - 4.0).abs() < 1e-9);
//! # Ok::<(), lp_averages::Error>(())
//! ```

pub mod average;
pub mod block_index;
pub mod cli;
pub mod construction;
pub mod diagnostics;
pub mod error;
pub mod lp_space;
pub mod moduli;

pub use average::{
    ave, grid_scan, integral, primitive, riemann_sum, AverageSample, TaggedPartition,
};
pub use block_index::{coordinate, decode, encode, BlockCoordinates, Sign};
pub use construction::{AmplitudeRule, BetaRule, ConstructionSpec, SpecConfig, Variant};
pub use diagnostics::{classify, Classification, DiagnosticsReport, Verdict};
pub use error::{Error, Result};
pub use lp_space::{linear_combine, PExponent, SparseVector};
pub use moduli::{concavity_modulus, extremal_witness, modulus_sup_oracle, WitnessFamily};
