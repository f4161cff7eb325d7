//! Decoherence analysis for discrete-spectrum quantum models, without full
//! time-evolution simulation.
//!
//! A discrete system's observable expectation values settle to their
//! diagonal (equilibrium) value when the off-diagonal phase contributions
//! interfere destructively. On a finite equidistant spectrum that
//! interference is governed by the phase sum
//! `R_D(t) = (1/N) sum_j f(j/N) e^{i (j/N) t}`, which is periodic and can
//! only stay small over a window. This crate decides whether that happens:
//!
//! - [`grid`]: equidistant grids, sampled functions, and the affine map
//!   between physical energies and the unit interval.
//! - [`quasicont`]: partition of the grid into components on which the
//!   function is nearly constant, with a machine-checkable certificate.
//! - [`rlsum`]: the phase sum, its pairwise-cancellation diagnostics,
//!   half-period residuals, recurrence times, and the decoherence verdict
//!   over the window `kappa pi <= t <= pi P`.
//! - [`dft`]: the same sum viewed as a discrete Fourier transform at
//!   continuous frequency, with batch sweeps and a gated fast path.
//! - [`model`]: application to density-matrix models — expectation
//!   dynamics, frequency-profile reduction, verdict mapping to physical
//!   time, and a brute-force evolution cross-check.
//! - [`generators`]: seeded model builders for reproducible experiments.

pub use nalgebra;

pub mod compensated;
pub mod dft;
pub mod generators;
pub mod grid;
pub mod model;
pub mod quasicont;
pub mod rlsum;
pub mod sampling;

pub use dft::{canonical_times, dft_at, sweep, sweep_canonical, DftError, TimeSeries};
pub use grid::{
    AffineEnergyMap, GridError, SampledFunction, UniformGrid, DEFAULT_EQUIDISTANCE_TOL,
};
pub use model::{
    DiscreteModel, EvolutionSummary, FrequencyProfile, ModelError, Prediction,
};
pub use quasicont::{decompose, DecompositionCertificate, QuasicontError};
pub use rlsum::{
    component_sum, decoherence_window, delta_profile, direct_sum, lemma_verdict, poincare_times,
    recombined_sum, residual_half_period, trig_split, CancellationReport, DecoherenceVerdict,
    HalfPeriodResidual, LemmaParams, PoincareTimes, RlsumError, TimeWindow, TrigSplit,
    VerdictReason, VerdictStatus,
};
