//! `R_D(t)` is the discrete Fourier transform of the samples evaluated at a
//! continuous frequency `t`. This module carries that identification:
//! single-point evaluation, batch sweeps over many times, and a fast
//! transform path for the canonical time grid, gated behind an equivalence
//! spot-check so a wrong plan can never silently corrupt a sweep.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::grid::SampledFunction;
use crate::rlsum::direct_sum;

/// Relative tolerance at which the fast path must reproduce the direct sum.
const FAST_PATH_TOL: f64 = 1e-10;
/// Number of spot-check times compared before trusting the fast path.
const SPOT_CHECKS: usize = 8;

#[derive(Debug, Error)]
pub enum DftError {
    #[error("time at index {0} is not finite")]
    NonFiniteTime(usize),
    #[error("times must be strictly increasing (violated at index {0})")]
    TimesNotIncreasing(usize),
}

/// Evaluation times paired with transform values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self, DftError> {
        validate_times(&times)?;
        assert_eq!(
            times.len(),
            values.len(),
            "times and values must have equal length"
        );
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV serialization: header `t,re,im,abs`, 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re,im,abs")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", t, v.re, v.im, v.norm())?;
        }
        Ok(())
    }
}

fn validate_times(times: &[f64]) -> Result<(), DftError> {
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() {
            return Err(DftError::NonFiniteTime(i));
        }
        if i > 0 && times[i - 1] >= t {
            return Err(DftError::TimesNotIncreasing(i));
        }
    }
    Ok(())
}

/// The transform at a single continuous time; by definition identical to
/// [`direct_sum`]. Exists to anchor the DFT identification and its property
/// set (linearity, shift rules) in one place.
pub fn dft_at(sf: &SampledFunction, t: f64) -> Complex64 {
    direct_sum(sf, t)
}

/// The canonical time grid `t_m = 2 pi m N / (N+1)`, `m = 0..=N`, on which
/// the transform collapses to a standard size-`N+1` discrete transform.
pub fn canonical_times(n_intervals: usize) -> Vec<f64> {
    let n = n_intervals as f64;
    (0..=n_intervals)
        .map(|m| std::f64::consts::TAU * m as f64 * n / (n + 1.0))
        .collect()
}

/// Batch evaluation of the transform over strictly increasing times.
///
/// Arbitrary times are evaluated directly (in parallel, with compensated
/// summation). When `times` is exactly the canonical grid of
/// [`canonical_times`], a fast transform is used instead, after spot-checking
/// eight values against direct evaluation; any disagreement falls back to
/// direct evaluation. Speed never changes the correctness contract.
pub fn sweep(sf: &SampledFunction, times: &[f64]) -> Result<TimeSeries, DftError> {
    validate_times(times)?;
    if times == canonical_times(sf.n_intervals()).as_slice() {
        if let Some(values) = fast_canonical(sf, times) {
            return Ok(TimeSeries {
                times: times.to_vec(),
                values,
            });
        }
    }
    let values: Vec<Complex64> = times.par_iter().map(|&t| direct_sum(sf, t)).collect();
    Ok(TimeSeries {
        times: times.to_vec(),
        values,
    })
}

/// Convenience wrapper: sweep over the canonical grid.
pub fn sweep_canonical(sf: &SampledFunction) -> TimeSeries {
    sweep(sf, &canonical_times(sf.n_intervals())).expect("canonical times are increasing")
}

/// Size-`N+1` inverse-direction transform divided by `N`; returns `None`
/// when the spot-check against the direct sum fails.
fn fast_canonical(sf: &SampledFunction, times: &[f64]) -> Option<Vec<Complex64>> {
    let len = sf.n_points();
    let mut buf: Vec<Complex64> = sf.values().to_vec();
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let n = sf.n_intervals() as f64;
    let values: Vec<Complex64> = buf.into_iter().map(|v| v / n).collect();

    // Deterministic spot-check indices from a small multiplicative hash.
    let scale = sf.l1_norm().max(1e-300);
    let mut state = 0x9E3779B97F4A7C15u64 ^ (len as u64);
    for _ in 0..SPOT_CHECKS.min(len) {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let m = (state >> 33) as usize % len;
        let reference = direct_sum(sf, times[m]);
        if (values[m] - reference).norm() > FAST_PATH_TOL * scale {
            return None;
        }
    }
    Some(values)
}
