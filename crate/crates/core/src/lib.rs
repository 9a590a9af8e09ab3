//! Truncated Cramér-von Mises (TCVM) test for normality.
//!
//! The crate computes the statistic `T_n* = ∫_{-a_n}^{a_n} b̂_n(x)² / φ(x) dx`
//! over the window `a_n = Φ⁻¹(1 - 1/n)`, looks up critical values in an
//! embedded table, and provides the baseline statistics, alternative
//! samplers and Monte Carlo harness used to study the test's size and power.

pub mod alternatives;
pub mod baselines;
pub mod error;
pub mod mc;
pub mod normal;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod statistic;
pub mod table;

pub use alternatives::{parse_spec, AlternativeSpec, Family};
pub use baselines::{BaselineKind, StatisticSuite};
pub use error::{Error, Result, SpecError};
pub use quadrature::QuadratureConfig;
pub use statistic::{
    compute_tstar, compute_tstar_direct, run_test, standardize, standardize_with, tcvm_test,
    Sample, ScaleEstimator, StandardizedSample, TcvmKernel, TcvmResult, TestOutcome,
};
pub use table::{CriticalValueTable, Provenance, TableRow, TABLE_ALPHAS};
