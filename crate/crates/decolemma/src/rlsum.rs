//! The discrete phase sum `R_D(t) = (1/N) sum_j f(j/N) e^{i (j/N) t}`, its
//! cancellation diagnostics, and the decoherence verdict.
//!
//! On a finite grid the sum is periodic, so it cannot vanish for good; what
//! it can do is stay small over a window. Pairs of cosine terms half a
//! period apart cancel approximately for `pi <= t <= pi N`, the points left
//! over in a trailing half-period contribute at most `pi / t`, and for a
//! function that is nearly constant on each component of a class-1
//! partition the whole sum stays below `C * epsilon` on
//! `kappa pi <= t <= pi P`. [`lemma_verdict`] turns that chain into a
//! machine-checkable decision.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::compensated::{CompensatedSum, ComplexSum};
use crate::grid::{SampledFunction, UniformGrid};
use crate::quasicont::{decompose, DecompositionCertificate, QuasicontError};
use crate::sampling::log_spaced;

/// Relative slack on verdict comparisons; covers floating-point evaluation
/// of bounds that the analysis satisfies with equality at window edges.
const VERDICT_REL_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RlsumError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("time {t_over_pi}*pi lies outside the window (2n+1 <= N = {n_intervals})")]
    WindowViolation {
        t_over_pi: usize,
        n_intervals: usize,
    },
    #[error("decoherence window is empty: kappa = {kappa} exceeds P = {p}")]
    WindowEmpty { kappa: f64, p: usize },
    #[error("component index {k} out of range 1..={g}")]
    ComponentOutOfRange { k: usize, g: usize },
    #[error("certificate covers {cert_points} points but the function has {function_points}")]
    CertificateMismatch {
        cert_points: usize,
        function_points: usize,
    },
    #[error("parameter {name} is invalid: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("decomposition failed: {0}")]
    Decompose(QuasicontError),
}

/// `R_D(t)`: the discrete analogue of the oscillatory integral, evaluated
/// with compensated summation. Weight is `1/N` over `N+1` points.
pub fn direct_sum(sf: &SampledFunction, t: f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (&x, f) in sf.grid().points().iter().zip(sf.values()) {
        let (s, c) = (x * t).sin_cos();
        acc.add(Complex64::new(f.re * c - f.im * s, f.re * s + f.im * c));
    }
    acc.value() / sf.n_intervals() as f64
}

/// Cosine and sine halves of `R_D(t)`, applied to the full complex samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigSplit {
    /// `(1/N) sum f(x_j) cos(x_j t)`.
    pub cos_sum: Complex64,
    /// `(1/N) sum f(x_j) sin(x_j t)`.
    pub sin_sum: Complex64,
}

impl TrigSplit {
    /// Euler recombination `cos_sum + i sin_sum`, equal to [`direct_sum`].
    pub fn recombined(&self) -> Complex64 {
        self.cos_sum + Complex64::i() * self.sin_sum
    }
}

/// Splits the exponential into its cosine and sine sums.
pub fn trig_split(sf: &SampledFunction, t: f64) -> TrigSplit {
    let mut cos_acc = ComplexSum::new();
    let mut sin_acc = ComplexSum::new();
    for (&x, f) in sf.grid().points().iter().zip(sf.values()) {
        let (s, c) = (x * t).sin_cos();
        cos_acc.add(f * c);
        sin_acc.add(f * s);
    }
    let n = sf.n_intervals() as f64;
    TrigSplit {
        cos_sum: cos_acc.value() / n,
        sin_sum: sin_acc.value() / n,
    }
}

/// Pairing diagnostics behind the half-period cancellation argument.
#[derive(Debug, Clone, PartialEq)]
pub struct CancellationReport {
    /// `(i, k)` with `x_k` the grid point nearest to `x_i + pi/t`.
    pub pairs: Vec<(usize, usize)>,
    /// Indices whose half-period partner would fall beyond `x = 1`.
    pub uncancelled: Vec<usize>,
    /// Per-index `delta_i = x_k t - x_i t - pi`; `None` for uncancelled.
    pub deltas: Vec<Option<f64>>,
    /// Signed `delta` of smallest magnitude among paired points.
    pub delta_min: Option<f64>,
}

/// For each grid point, locates the partner that would cancel its cosine
/// term half a period later and records the phase defect `delta_i`.
///
/// Rejects `t <= 0`: at `t = 0` the defect degenerates to `-pi` and no
/// cancellation is possible.
pub fn delta_profile(grid: &UniformGrid, t: f64) -> Result<CancellationReport, RlsumError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(RlsumError::NonPositiveTime(t));
    }
    let n = grid.n_intervals();
    let points = grid.points();
    let mut pairs = Vec::new();
    let mut uncancelled = Vec::new();
    let mut deltas = Vec::with_capacity(points.len());
    let mut delta_min: Option<f64> = None;
    for (i, &x) in points.iter().enumerate() {
        let target = x + PI / t;
        if target > 1.0 {
            uncancelled.push(i);
            deltas.push(None);
            continue;
        }
        let k = ((target * n as f64).round() as usize).min(n);
        let delta = points[k] * t - x * t - PI;
        pairs.push((i, k));
        deltas.push(Some(delta));
        match delta_min {
            Some(d) if d.abs() <= delta.abs() => {}
            _ => delta_min = Some(delta),
        }
    }
    Ok(CancellationReport {
        pairs,
        uncancelled,
        deltas,
        delta_min,
    })
}

/// Residual of the uncancelled half-period at `t = (2n+1) pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPeriodResidual {
    /// `(1/N) sum of cos(x_i t)` over the half-period points.
    pub r_pi: f64,
    /// The asymptotic bound `pi / t = 1/(2n+1)`.
    pub paper_bound: f64,
    /// The exact count bound `ceil((N+1)/(2n+1)) / N`.
    pub count_bound: f64,
    /// Number of points in the half-period.
    pub n_points: usize,
    /// The evaluation time `(2n+1) pi`.
    pub t: f64,
}

/// Worst-case contribution of a whole uncancelled half-period, evaluated at
/// the odd multiples `t = (2n+1) pi` where it arises.
pub fn residual_half_period(
    grid: &UniformGrid,
    n: usize,
) -> Result<HalfPeriodResidual, RlsumError> {
    let n_intervals = grid.n_intervals();
    let odd = 2 * n + 1;
    if odd > n_intervals {
        return Err(RlsumError::WindowViolation {
            t_over_pi: odd,
            n_intervals,
        });
    }
    let t = odd as f64 * PI;
    let count = grid.n_points().div_ceil(odd); // ceil((N+1)/(2n+1))
    let mut acc = CompensatedSum::new();
    for &x in &grid.points()[..count] {
        acc.add((x * t).cos());
    }
    Ok(HalfPeriodResidual {
        r_pi: acc.value() / n_intervals as f64,
        paper_bound: PI / t,
        count_bound: count as f64 / n_intervals as f64,
        n_points: count,
        t,
    })
}

/// The two recurrence times attached to the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareTimes {
    /// `2 pi`: the recurrence of unit-spaced phases. Quoted for reference;
    /// it is exact only when every `x_j` is an integer.
    pub paper_tp: f64,
    /// `2 pi N`: the smallest `t > 0` with `e^{i x_j t} = 1` for every
    /// point of the grid `i/N`, hence the true recurrence of `R_D`.
    pub exact_recurrence: f64,
}

/// Reports both the nominal recurrence `2 pi` and the exact grid recurrence
/// `2 pi N`; they coincide only for `N = 1`.
pub fn poincare_times(grid: &UniformGrid) -> PoincareTimes {
    PoincareTimes {
        paper_tp: 2.0 * PI,
        exact_recurrence: 2.0 * PI * grid.n_intervals() as f64,
    }
}

/// Pure phase sum of component `k`: `(1/P) sum_{r=0}^{P} e^{i x_r t}` over
/// the component's grid points.
pub fn component_sum(
    cert: &DecompositionCertificate,
    sf: &SampledFunction,
    k: usize,
    t: f64,
) -> Result<Complex64, RlsumError> {
    if cert.n_points() != sf.n_points() {
        return Err(RlsumError::CertificateMismatch {
            cert_points: cert.n_points(),
            function_points: sf.n_points(),
        });
    }
    let range = cert.component_range(k).map_err(|_| RlsumError::ComponentOutOfRange {
        k,
        g: cert.g(),
    })?;
    let mut acc = ComplexSum::new();
    for &x in &sf.grid().points()[range] {
        let (s, c) = (x * t).sin_cos();
        acc.add(Complex64::new(c, s));
    }
    Ok(acc.value() / cert.p() as f64)
}

/// Reassembles `R_D(t)` from the certificate alone:
/// `sum_k (P/N) C_k R_D^{(k)}(t)`. For a function exactly constant on each
/// component this reproduces [`direct_sum`] term by term.
pub fn recombined_sum(cert: &DecompositionCertificate, t: f64) -> Complex64 {
    let n = cert.n_intervals() as f64;
    let width = cert.p() + 1;
    let mut acc = ComplexSum::new();
    for (k, c_k) in cert.constants().iter().enumerate() {
        for r in 0..width {
            let x = (k * width + r) as f64 / n;
            let (s, cos) = (x * t).sin_cos();
            acc.add(c_k * Complex64::new(cos, s));
        }
    }
    acc.value() / n
}

/// Dimensionless time window on which the verdict bound is claimed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    /// `kappa * pi`.
    pub t_low: f64,
    /// `pi * P`.
    pub t_high: f64,
    /// Margin multiplier standing in for the "much greater than" condition.
    pub kappa: f64,
}

/// Window `[kappa pi, pi P]` from a certificate; empty when `kappa > P`,
/// which is the small-grid regime where no suppression is claimed.
pub fn decoherence_window(
    cert: &DecompositionCertificate,
    kappa: f64,
) -> Result<TimeWindow, RlsumError> {
    if !(kappa.is_finite() && kappa >= 1.0) {
        return Err(RlsumError::InvalidParameter {
            name: "kappa",
            value: kappa,
        });
    }
    let p = cert.p();
    if kappa > p as f64 {
        return Err(RlsumError::WindowEmpty { kappa, p });
    }
    Ok(TimeWindow {
        t_low: kappa * PI,
        t_high: PI * p as f64,
        kappa,
    })
}

/// Analysis knobs for [`lemma_verdict`] and the model layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaParams {
    /// Flatness tolerance `eta` for the decomposition.
    pub flatness_tol: f64,
    /// Smallest acceptable component size parameter `P`.
    pub min_p: usize,
    /// Window margin: the sweep starts at `kappa * pi`.
    pub kappa: f64,
    /// Per-component cancellation tolerance `epsilon`.
    pub epsilon: f64,
    /// Log-spaced samples taken across the window.
    pub n_time_samples: usize,
}

impl Default for LemmaParams {
    fn default() -> Self {
        Self {
            flatness_tol: 0.05,
            min_p: 8,
            kappa: 10.0,
            epsilon: 0.1,
            n_time_samples: 512,
        }
    }
}

impl LemmaParams {
    fn validate(&self) -> Result<(), RlsumError> {
        if !(self.flatness_tol.is_finite() && self.flatness_tol > 0.0) {
            return Err(RlsumError::InvalidParameter {
                name: "flatness_tol",
                value: self.flatness_tol,
            });
        }
        if self.min_p == 0 {
            return Err(RlsumError::InvalidParameter {
                name: "min_p",
                value: 0.0,
            });
        }
        if !(self.kappa.is_finite() && self.kappa >= 1.0) {
            return Err(RlsumError::InvalidParameter {
                name: "kappa",
                value: self.kappa,
            });
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(RlsumError::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        if self.n_time_samples < 2 {
            return Err(RlsumError::InvalidParameter {
                name: "n_time_samples",
                value: self.n_time_samples as f64,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Decoheres,
    NoDecoherence,
    Inconclusive,
}

impl std::fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Decoheres => write!(f, "decoheres"),
            Self::NoDecoherence => write!(f, "no-decoherence"),
            Self::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Diagnostic code attached to every verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerdictReason {
    /// Sampled maximum stayed below the predicted bound.
    BoundHolds,
    /// Sampled maximum exceeded the predicted bound; the analysis neither
    /// confirms nor rules out decoherence.
    BoundExceeded,
    /// No admissible class-1 decomposition exists.
    NotInL1Class { best_p: usize, best_flatness: f64 },
    /// `kappa > P` (or the whole grid is smaller than `kappa`): the grid is
    /// too coarse for any suppression window.
    WindowEmpty { kappa: f64, max_p: usize },
    /// Fewer than two off-diagonal frequencies; no grid can be formed.
    SpectrumTooSmall { positive_bins: usize },
    /// The spectrum is not equidistant, so the partition machinery does not
    /// apply.
    NonEquidistant { max_rel_deviation: f64 },
}

impl VerdictReason {
    pub fn code(&self) -> &'static str {
        match self {
            Self::BoundHolds => "bound-holds",
            Self::BoundExceeded => "bound-exceeded",
            Self::NotInL1Class { .. } => "not-in-l1-class",
            Self::WindowEmpty { .. } => "window-empty",
            Self::SpectrumTooSmall { .. } => "spectrum-too-small",
            Self::NonEquidistant { .. } => "non-equidistant-spectrum",
        }
    }
}

impl std::fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Outcome of the window analysis.
///
/// `Decoheres` guarantees `window`, `predicted_bound`, `observed_max` and
/// `certificate` are present with `observed_max <= predicted_bound` (up to
/// floating-point slack).
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceVerdict {
    pub status: VerdictStatus,
    pub reason: VerdictReason,
    pub window: Option<TimeWindow>,
    /// `C eps + eta C (N+1)/N`: the lemma bound plus flatness slack.
    pub predicted_bound: Option<f64>,
    /// Max of `|R_D|` over the sampled window.
    pub observed_max: Option<f64>,
    pub certificate: Option<DecompositionCertificate>,
}

impl DecoherenceVerdict {
    pub(crate) fn negative(reason: VerdictReason) -> Self {
        Self {
            status: VerdictStatus::NoDecoherence,
            reason,
            window: None,
            predicted_bound: None,
            observed_max: None,
            certificate: None,
        }
    }
}

/// Full verdict pipeline: decompose, form the window, sweep `|R_D|` over it
/// and compare against the predicted bound.
///
/// All analysis outcomes are encoded in the verdict; `Err` is reserved for
/// invalid parameters.
pub fn lemma_verdict(
    sf: &SampledFunction,
    params: &LemmaParams,
) -> Result<DecoherenceVerdict, RlsumError> {
    params.validate()?;
    let n = sf.n_intervals();

    // Even the coarsest admissible partition (G = 1, P = N) cannot open a
    // window when kappa exceeds N: the small-grid case, independent of f.
    if params.kappa > n as f64 {
        return Ok(DecoherenceVerdict::negative(VerdictReason::WindowEmpty {
            kappa: params.kappa,
            max_p: n,
        }));
    }

    let cert = match decompose(sf, params.flatness_tol, params.min_p) {
        Ok(cert) => cert,
        Err(QuasicontError::NotInL1Class {
            best_p,
            best_flatness,
        }) => {
            return Ok(DecoherenceVerdict::negative(VerdictReason::NotInL1Class {
                best_p,
                best_flatness,
            }))
        }
        Err(e) => return Err(RlsumError::Decompose(e)),
    };

    let window = match decoherence_window(&cert, params.kappa) {
        Ok(w) => w,
        Err(RlsumError::WindowEmpty { kappa, p }) => {
            return Ok(DecoherenceVerdict::negative(VerdictReason::WindowEmpty {
                kappa,
                max_p: p,
            }))
        }
        Err(e) => return Err(e),
    };

    let c = cert.c_max();
    let slack = params.flatness_tol * c * (n as f64 + 1.0) / n as f64;
    let predicted_bound = c * params.epsilon + slack;

    let times = log_spaced(window.t_low, window.t_high, params.n_time_samples);
    let observed_max = times
        .par_iter()
        .map(|&t| direct_sum(sf, t).norm())
        .reduce(|| 0.0, f64::max);

    let holds = observed_max <= predicted_bound * (1.0 + VERDICT_REL_SLACK);
    Ok(DecoherenceVerdict {
        status: if holds {
            VerdictStatus::Decoheres
        } else {
            VerdictStatus::Inconclusive
        },
        reason: if holds {
            VerdictReason::BoundHolds
        } else {
            VerdictReason::BoundExceeded
        },
        window: Some(window),
        predicted_bound: Some(predicted_bound),
        observed_max: Some(observed_max),
        certificate: Some(cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ones(n: usize) -> SampledFunction {
        SampledFunction::constant(UniformGrid::new(n).unwrap(), Complex64::new(1.0, 0.0))
    }

    fn seeded(n: usize, seed: u64) -> SampledFunction {
        let grid = UniformGrid::new(n).unwrap();
        let vals = (0..=n)
            .map(|i| {
                let h = (i as u64 + 1).wrapping_mul(seed | 1).wrapping_mul(0x9E3779B97F4A7C15);
                let a = (h >> 11) as f64 / (1u64 << 53) as f64;
                let b = ((h.rotate_left(17) >> 11) as f64) / (1u64 << 53) as f64;
                Complex64::new(2.0 * a - 1.0, 2.0 * b - 1.0)
            })
            .collect();
        SampledFunction::new(grid, vals).unwrap()
    }

    #[test]
    fn direct_sum_at_zero_counts_weights() {
        // N+1 terms of weight 1/N.
        let v = direct_sum(&ones(4), 0.0);
        assert_relative_eq!(v.re, 1.25, epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn direct_sum_alternating_closed_form() {
        // t = 1000 pi on N = 1000: phases alternate sign, 501 - 500 = 1.
        let v = direct_sum(&ones(1000), 1000.0 * PI);
        assert!((v - Complex64::new(0.001, 0.0)).norm() < 1e-12, "v = {v}");
    }

    #[test]
    fn direct_sum_exact_recurrence_matches_t0() {
        for n in [16usize, 255, 1000] {
            let sf = seeded(n, 7);
            let a = direct_sum(&sf, 0.0);
            let b = direct_sum(&sf, 2.0 * PI * n as f64);
            assert!((a - b).norm() <= 1e-9 * sf.l1_norm(), "n = {n}");
        }
    }

    #[test]
    fn trig_split_t0() {
        let split = trig_split(&ones(4), 0.0);
        assert_relative_eq!(split.cos_sum.re, 1.25, epsilon = 1e-15);
        assert_eq!(split.sin_sum, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn trig_split_alternating() {
        let split = trig_split(&ones(1000), 1000.0 * PI);
        assert!((split.cos_sum.re - 0.001).abs() < 1e-12);
        assert!(split.sin_sum.norm() < 1e-12);
    }

    #[test]
    fn delta_profile_commensurate() {
        // t = 2 pi on N = 16: offset exactly 8, all defects vanish,
        // indices past x = 1/2 have no forward partner.
        let grid = UniformGrid::new(16).unwrap();
        let rep = delta_profile(&grid, 2.0 * PI).unwrap();
        assert_eq!(rep.pairs.len(), 9);
        for &(i, k) in &rep.pairs {
            assert_eq!(k - i, 8);
        }
        for d in rep.deltas.iter().flatten() {
            assert!(d.abs() < 1e-12);
        }
        assert_eq!(rep.uncancelled, (9..=16).collect::<Vec<_>>());
        assert!(rep.delta_min.unwrap().abs() < 1e-12);
    }

    #[test]
    fn delta_profile_non_commensurate() {
        // pi N / t = 16/3: rounds to offset 5, defect -pi/16 (frozen from
        // the nearest-index oracle: (5 - 16/3) * t/N).
        let grid = UniformGrid::new(16).unwrap();
        let rep = delta_profile(&grid, 3.0 * PI).unwrap();
        let dm = rep.delta_min.unwrap();
        assert!((dm + PI / 16.0).abs() < 1e-12, "delta_min = {dm}");
        for &(i, k) in &rep.pairs {
            assert_eq!(k - i, 5);
        }
        assert!(!rep.uncancelled.is_empty());
    }

    #[test]
    fn delta_profile_figure_two_tail() {
        // t = 4 pi on N = 16: offset 4; the last four points are the
        // uncancelled tail.
        let grid = UniformGrid::new(16).unwrap();
        let rep = delta_profile(&grid, 4.0 * PI).unwrap();
        assert_eq!(rep.uncancelled, vec![13, 14, 15, 16]);
        for d in rep.deltas.iter().flatten() {
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn delta_profile_rejects_nonpositive_time() {
        let grid = UniformGrid::new(8).unwrap();
        assert!(matches!(
            delta_profile(&grid, 0.0),
            Err(RlsumError::NonPositiveTime(_))
        ));
        assert!(matches!(
            delta_profile(&grid, -1.0),
            Err(RlsumError::NonPositiveTime(_))
        ));
    }

    #[test]
    fn half_period_small_case() {
        // N = 14, n = 1: five points, value frozen from direct evaluation.
        let grid = UniformGrid::new(14).unwrap();
        let res = residual_half_period(&grid, 1).unwrap();
        assert_eq!(res.n_points, 5);
        assert_relative_eq!(res.r_pi, 0.047821414957454796, epsilon = 1e-12);
        assert_relative_eq!(res.paper_bound, 1.0 / 3.0, epsilon = 1e-15);
        assert!(res.r_pi < 5.0 / 14.0);
    }

    #[test]
    fn half_period_degenerate_n0() {
        // t = pi: the "half-period" spans every point and the bound is 1,
        // which is why t >> pi is required.
        let grid = UniformGrid::new(14).unwrap();
        let res = residual_half_period(&grid, 0).unwrap();
        assert_eq!(res.n_points, 15);
        assert_relative_eq!(res.paper_bound, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn half_period_window_violation() {
        let grid = UniformGrid::new(14).unwrap();
        assert!(matches!(
            residual_half_period(&grid, 7),
            Err(RlsumError::WindowViolation {
                t_over_pi: 15,
                n_intervals: 14
            })
        ));
    }

    #[test]
    fn half_period_large_grid() {
        let grid = UniformGrid::new(999).unwrap();
        let res = residual_half_period(&grid, 49).unwrap();
        assert_eq!(res.n_points, 11);
        assert!(res.r_pi.abs() <= res.count_bound);
        assert_relative_eq!(res.paper_bound, 1.0 / 99.0, epsilon = 1e-15);
    }

    #[test]
    fn poincare_both_clocks() {
        let g100 = UniformGrid::new(100).unwrap();
        let times = poincare_times(&g100);
        assert_relative_eq!(times.paper_tp, 2.0 * PI, epsilon = 0.0);
        assert_relative_eq!(times.exact_recurrence, 200.0 * PI, epsilon = 0.0);
        // N = 1 is the one grid where the two coincide.
        let g1 = UniformGrid::new(1).unwrap();
        let t1 = poincare_times(&g1);
        assert_eq!(t1.paper_tp, t1.exact_recurrence);
        // Recurrence verified dynamically for random samples.
        let sf = seeded(100, 3);
        let d = (direct_sum(&sf, times.exact_recurrence) - direct_sum(&sf, 0.0)).norm();
        assert!(d < 1e-9);
    }

    #[test]
    fn component_sum_g1_matches_direct() {
        let sf = ones(99);
        let cert = decompose(&sf, 0.01, 4).unwrap();
        assert_eq!(cert.g(), 1);
        for t in [0.0, 1.3, 40.0] {
            let cs = component_sum(&cert, &sf, 1, t).unwrap();
            let ds = direct_sum(&sf, t);
            let ratio = sf.n_intervals() as f64 / cert.p() as f64;
            assert!((cs - ds * ratio).norm() < 1e-12);
        }
    }

    #[test]
    fn component_sum_t0_and_shift() {
        // Two-component certificate on a step function.
        let grid = UniformGrid::new(99).unwrap();
        let sf = SampledFunction::from_fn(grid, |x| {
            Complex64::new(if x < 0.5 { 1.0 } else { 3.0 }, 0.0)
        })
        .unwrap();
        let cert = decompose(&sf, 1e-9, 4).unwrap();
        assert_eq!(cert.g(), 2);
        let p = cert.p();
        // t=0: all phases are one.
        let c0 = component_sum(&cert, &sf, 1, 0.0).unwrap();
        assert!((c0 - Complex64::new((p as f64 + 1.0) / p as f64, 0.0)).norm() < 1e-12);
        // Component 2 is component 1 shifted by (P+1)/N: a pure phase.
        let t = 7.3;
        let n = sf.n_intervals() as f64;
        let shift = Complex64::from_polar(1.0, (p as f64 + 1.0) * t / n);
        let c1 = component_sum(&cert, &sf, 1, t).unwrap();
        let c2 = component_sum(&cert, &sf, 2, t).unwrap();
        assert!((c2 - shift * c1).norm() < 1e-12);
        assert!(matches!(
            component_sum(&cert, &sf, 3, t),
            Err(RlsumError::ComponentOutOfRange { k: 3, g: 2 })
        ));
    }

    #[test]
    fn recombined_equals_direct_for_piecewise_constant() {
        let grid = UniformGrid::new(99).unwrap();
        let sf = SampledFunction::from_fn(grid, |x| {
            Complex64::new(if x < 0.5 { 1.0 } else { 3.0 }, -0.25)
        })
        .unwrap();
        let cert = decompose(&sf, 1e-9, 4).unwrap();
        let scale = sf.l1_norm();
        for t in [0.0, 0.9, 12.0, 300.0] {
            let d = (recombined_sum(&cert, t) - direct_sum(&sf, t)).norm();
            assert!(d <= 1e-12 * scale, "t = {t}, d = {d}");
        }
    }

    #[test]
    fn recombined_tracks_direct_within_flatness_slack() {
        // Triangle inequality on per-point deviations.
        let grid = UniformGrid::new(1023).unwrap();
        let sf = SampledFunction::from_fn(grid, |x| {
            Complex64::new((-(x - 0.5).powi(2) / 0.125).exp(), 0.0)
        })
        .unwrap();
        let cert = decompose(&sf, 0.05, 8).unwrap();
        let n = sf.n_intervals() as f64;
        let slack = cert.flatness() * cert.c_max() * (n + 1.0) / n;
        for t in [0.0, 5.0, 31.4, 97.0] {
            let d = (recombined_sum(&cert, t) - direct_sum(&sf, t)).norm();
            assert!(d <= slack * (1.0 + 1e-9), "t = {t}: {d} vs {slack}");
        }
    }

    #[test]
    fn window_construction() {
        let sf = ones(1000);
        let cert = decompose(&sf, 0.01, 8).unwrap();
        assert_eq!(cert.p(), 1000);
        let w = decoherence_window(&cert, 10.0).unwrap();
        assert_relative_eq!(w.t_low, 10.0 * PI, epsilon = 0.0);
        assert_relative_eq!(w.t_high, 1000.0 * PI, epsilon = 0.0);

        let small = decompose(&ones(5), 0.01, 1).unwrap();
        assert!(matches!(
            decoherence_window(&small, 10.0),
            Err(RlsumError::WindowEmpty { p: 5, .. })
        ));

        let ten = decompose(&ones(10), 0.01, 1).unwrap();
        let degenerate = decoherence_window(&ten, 10.0).unwrap();
        assert_eq!(degenerate.t_low, degenerate.t_high);
    }

    #[test]
    fn verdict_constant_function_decoheres() {
        let sf = ones(1000);
        let params = LemmaParams::default();
        let v = lemma_verdict(&sf, &params).unwrap();
        assert_eq!(v.status, VerdictStatus::Decoheres);
        assert_eq!(v.reason, VerdictReason::BoundHolds);
        // The uncancelled-residual bound at the window edge.
        assert!(v.observed_max.unwrap() <= 0.1);
        assert!(v.observed_max.unwrap() <= v.predicted_bound.unwrap());
        assert_eq!(v.certificate.as_ref().unwrap().p(), 1000);
    }

    #[test]
    fn verdict_alternating_not_in_class() {
        let grid = UniformGrid::new(99).unwrap();
        let sf = SampledFunction::from_fn(grid, |x| {
            let i = (x * 99.0).round() as i64;
            Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        })
        .unwrap();
        let v = lemma_verdict(&sf, &LemmaParams::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::NoDecoherence);
        assert!(matches!(v.reason, VerdictReason::NotInL1Class { .. }));
    }

    #[test]
    fn verdict_square_wave_is_inconclusive() {
        // Exactly piecewise-constant (flatness 0, admissible at P = 63) but
        // with sign-alternating component constants: the square wave's
        // spectral peak at t ~ pi*1023/64 lands inside [10 pi, 63 pi] and
        // the sampled maximum (~0.64, from the divisor-scan oracle) blows
        // through the predicted bound (~0.15). The analysis must refuse to
        // certify rather than claim decoherence.
        let grid = UniformGrid::new(1023).unwrap();
        let values: Vec<Complex64> = (0..=1023)
            .map(|i| Complex64::new(if (i / 64) % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let sf = SampledFunction::new(grid, values).unwrap();
        let v = lemma_verdict(&sf, &LemmaParams::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert_eq!(v.reason, VerdictReason::BoundExceeded);
        let cert = v.certificate.as_ref().unwrap();
        assert_eq!((cert.g(), cert.p()), (16, 63));
        assert_eq!(cert.flatness(), 0.0);
        assert!(v.observed_max.unwrap() > v.predicted_bound.unwrap());
        assert!((v.observed_max.unwrap() - 0.6388).abs() < 0.01);
    }

    #[test]
    fn verdict_small_grid_window_empty_for_any_f() {
        let sf = seeded(8, 11);
        let v = lemma_verdict(&sf, &LemmaParams::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::NoDecoherence);
        assert!(matches!(
            v.reason,
            VerdictReason::WindowEmpty { max_p: 8, .. }
        ));
    }

    #[test]
    fn verdict_rejects_bad_params() {
        let sf = ones(100);
        let bad = LemmaParams {
            n_time_samples: 1,
            ..Default::default()
        };
        assert!(matches!(
            lemma_verdict(&sf, &bad),
            Err(RlsumError::InvalidParameter {
                name: "n_time_samples",
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn triangle_bound(seed in 1u64..500, n in 2usize..200, t in -200.0f64..200.0) {
            let sf = seeded(n, seed);
            prop_assert!(direct_sum(&sf, t).norm() <= sf.l1_norm() * (1.0 + 1e-12));
        }

        #[test]
        fn recurrence_shift(seed in 1u64..200, n in 2usize..120, t in -50.0f64..50.0) {
            let sf = seeded(n, seed);
            let a = direct_sum(&sf, t);
            let b = direct_sum(&sf, t + 2.0 * PI * n as f64);
            prop_assert!((a - b).norm() <= 1e-9 * sf.l1_norm().max(1e-3));
        }

        #[test]
        fn conjugate_symmetry_exact(seed in 1u64..200, n in 2usize..150, t in 0.0f64..300.0) {
            // For real-valued f the two half-axes are exact conjugates:
            // cos is even and sin is odd bit-for-bit.
            let grid = UniformGrid::new(n).unwrap();
            let vals: Vec<Complex64> = (0..=n)
                .map(|i| {
                    let h = (i as u64 + 1).wrapping_mul(seed).wrapping_mul(0x2545F4914F6CDD1D);
                    Complex64::new((h >> 11) as f64 / (1u64 << 53) as f64 - 0.5, 0.0)
                })
                .collect();
            let sf = SampledFunction::new(grid, vals).unwrap();
            let plus = direct_sum(&sf, t);
            let minus = direct_sum(&sf, -t);
            prop_assert_eq!(plus.re, minus.re);
            prop_assert_eq!(plus.im, -minus.im);
        }

        #[test]
        fn linearity(sa in 1u64..100, sb in 1u64..100, n in 2usize..100,
                     alpha in -3.0f64..3.0, beta in -3.0f64..3.0, t in -100.0f64..100.0) {
            let f = seeded(n, sa);
            let g = seeded(n, sb);
            let combined: Vec<Complex64> = f
                .values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| alpha * a + beta * b)
                .collect();
            let h = SampledFunction::new(f.grid().clone(), combined).unwrap();
            let lhs = direct_sum(&h, t);
            let rhs = alpha * direct_sum(&f, t) + beta * direct_sum(&g, t);
            let scale = f.l1_norm() * alpha.abs() + g.l1_norm() * beta.abs();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1e-6));
        }

        #[test]
        fn euler_consistency(seed in 1u64..300, n in 2usize..150, t in -300.0f64..300.0) {
            let sf = seeded(n, seed);
            let d = (trig_split(&sf, t).recombined() - direct_sum(&sf, t)).norm();
            prop_assert!(d <= 1e-12 * sf.l1_norm().max(1e-6));
        }

        #[test]
        fn unit_window_bound(n in 100usize..1200, frac in 0.0f64..1.0) {
            // |R_D^{(1)}(t)| <= pi/t on [10 pi, pi N]; geometric closed form
            // guarantees it, evaluation gets floating-point slack.
            let t = 10.0 * PI + frac * (PI * n as f64 - 10.0 * PI);
            let v = direct_sum(&ones(n), t).norm();
            prop_assert!(v <= (PI / t) * (1.0 + 1e-12), "n={} t={} v={}", n, t, v);
        }

        #[test]
        fn half_period_count_bound(n_grid in 3usize..400, n in 0usize..20) {
            let grid = UniformGrid::new(n_grid).unwrap();
            if 2 * n < n_grid {
                let r = residual_half_period(&grid, n).unwrap();
                prop_assert!(r.r_pi.abs() <= r.count_bound * (1.0 + 1e-12));
            }
        }
    }
}
