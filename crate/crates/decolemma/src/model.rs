//! Discrete quantum models: expectation-value dynamics, the equilibrium
//! (diagonal) value, reduction of the double frequency sum to a single
//! profile the window analysis can consume, and a brute-force evolution
//! cross-check.
//!
//! For Hermitian `rho` and `O` the expectation value
//! `sum_{ij} conj(rho_ij) O_ij e^{i (w_i - w_j) t / hbar}`
//! splits into its diagonal part plus twice the real part of a sum over
//! positive frequency gaps. Binning the kernel by gap index is exact for an
//! equidistant spectrum and is what makes the single-variable window
//! analysis applicable.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::compensated::{CompensatedSum, ComplexSum};
use crate::grid::{
    AffineEnergyMap, GridError, SampledFunction, UniformGrid, DEFAULT_EQUIDISTANCE_TOL,
};
use crate::rlsum::{
    lemma_verdict, DecoherenceVerdict, LemmaParams, RlsumError, VerdictReason, VerdictStatus,
};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
/// Imaginary residue allowed on expectation values, relative to the kernel
/// L1 mass.
const IMAG_RESIDUE_TOL: f64 = 1e-8;
/// Smallest admissible eigenvalue of `rho` (checked on demand).
const PSD_TOL: f64 = -1e-8;
/// Tolerance of the profile reconstruction self-check.
const PROFILE_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Rlsum(#[from] RlsumError),
    #[error("need at least two levels, got {0}")]
    TooFewLevels(usize),
    #[error("{what} must be {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{what}[{row},{col}] is not finite")]
    NonFiniteEntry {
        what: &'static str,
        row: usize,
        col: usize,
    },
    #[error("{what} is not Hermitian: max |A - A^dagger| = {max_deviation:.3e}")]
    NotHermitian {
        what: &'static str,
        max_deviation: f64,
    },
    #[error("rho must have unit trace, got {trace_re} + {trace_im}i")]
    TraceNotOne { trace_re: f64, trace_im: f64 },
    #[error("rho is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error(
        "expectation value has imaginary residue {imag_residue:.3e} \
         (scale {scale:.3e}); inputs are not Hermitian enough"
    )]
    HermiticityViolation { imag_residue: f64, scale: f64 },
    #[error("frequency profile failed its reconstruction self-check: max deviation {max_deviation:.3e}")]
    ProfileSelfCheck { max_deviation: f64 },
    #[error("spectrum has only {positive_bins} positive frequency gap(s); need at least 2")]
    SpectrumTooSmall { positive_bins: usize },
    #[error("evolution needs at least one time sample")]
    EmptyTimes,
    #[error("evolution time at index {0} is not finite")]
    NonFiniteTime(usize),
}

/// Energies, density matrix, observable and the action scale, immutable
/// after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    energies: Vec<f64>,
    rho: DMatrix<Complex64>,
    observable: DMatrix<Complex64>,
    hbar: f64,
    /// `sum_ij |conj(rho_ij) O_ij|`, the natural scale of the expectation.
    kernel_l1: f64,
    /// Same sum restricted to `i != j`.
    kernel_off_diagonal_l1: f64,
    /// Relative tolerance of the spectrum equidistance check.
    equidistance_tol: f64,
}

fn check_matrix(
    what: &'static str,
    m: &DMatrix<Complex64>,
    levels: usize,
) -> Result<(), ModelError> {
    if m.nrows() != levels || m.ncols() != levels {
        return Err(ModelError::DimensionMismatch {
            what,
            expected: levels,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut max_abs = 0.0f64;
    for i in 0..levels {
        for j in 0..levels {
            let v = m[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(ModelError::NonFiniteEntry {
                    what,
                    row: i,
                    col: j,
                });
            }
            max_abs = max_abs.max(v.norm());
        }
    }
    let mut max_deviation = 0.0f64;
    for i in 0..levels {
        for j in i..levels {
            max_deviation = max_deviation.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if max_deviation > HERMITICITY_TOL * max_abs.max(1.0) {
        return Err(ModelError::NotHermitian {
            what,
            max_deviation,
        });
    }
    Ok(())
}

impl DiscreteModel {
    pub fn new(
        energies: Vec<f64>,
        rho: DMatrix<Complex64>,
        observable: DMatrix<Complex64>,
        hbar: f64,
    ) -> Result<Self, ModelError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(GridError::InvalidHbar(hbar).into());
        }
        let levels = energies.len();
        if levels < 2 {
            return Err(ModelError::TooFewLevels(levels));
        }
        for (i, &e) in energies.iter().enumerate() {
            if !e.is_finite() {
                return Err(GridError::NonFiniteEnergy(i).into());
            }
        }
        for i in 1..levels {
            if energies[i] <= energies[i - 1] {
                return Err(GridError::NotStrictlyIncreasing(i).into());
            }
        }
        check_matrix("rho", &rho, levels)?;
        check_matrix("observable", &observable, levels)?;

        let mut trace = ComplexSum::new();
        for i in 0..levels {
            trace.add(rho[(i, i)]);
        }
        let tr = trace.value();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(ModelError::TraceNotOne {
                trace_re: tr.re,
                trace_im: tr.im,
            });
        }

        let mut total = CompensatedSum::new();
        let mut off = CompensatedSum::new();
        for i in 0..levels {
            for j in 0..levels {
                let mass = (rho[(i, j)].conj() * observable[(i, j)]).norm();
                total.add(mass);
                if i != j {
                    off.add(mass);
                }
            }
        }

        Ok(Self {
            energies,
            rho,
            observable,
            hbar,
            kernel_l1: total.value(),
            kernel_off_diagonal_l1: off.value(),
            equidistance_tol: DEFAULT_EQUIDISTANCE_TOL,
        })
    }

    /// Same model with a different equidistance tolerance for external
    /// energy tables.
    pub fn with_equidistance_tolerance(mut self, tolerance: f64) -> Result<Self, ModelError> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(GridError::InvalidTolerance(tolerance).into());
        }
        self.equidistance_tol = tolerance;
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn observable(&self) -> &DMatrix<Complex64> {
        &self.observable
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Mean level spacing in frequency units, `(w_max - w_min) / (N hbar)`.
    pub fn mean_gap_frequency(&self) -> f64 {
        let n = self.levels() - 1;
        (self.energies[n] - self.energies[0]) / (n as f64 * self.hbar)
    }

    /// Expectation value of the observable at time `t`.
    ///
    /// With `physical = false`, `t` is dimensionless time on the frequency
    /// profile's grid (requires an equidistant spectrum with at least two
    /// positive gaps). The result is the real part of the double sum; an
    /// imaginary residue beyond tolerance reports a Hermiticity violation.
    pub fn expectation(&self, t: f64, physical: bool) -> Result<f64, ModelError> {
        let t_phys = if physical {
            t
        } else {
            self.dimensionless_time_scale()? * t
        };
        let levels = self.levels();
        let mut acc = ComplexSum::new();
        for i in 0..levels {
            for j in 0..levels {
                let kernel = self.rho[(i, j)].conj() * self.observable[(i, j)];
                let phase = (self.energies[i] - self.energies[j]) * t_phys / self.hbar;
                let (s, c) = phase.sin_cos();
                acc.add(kernel * Complex64::new(c, s));
            }
        }
        let value = acc.value();
        let scale = self.kernel_l1.max(1e-300);
        if value.im.abs() > IMAG_RESIDUE_TOL * scale {
            return Err(ModelError::HermiticityViolation {
                imag_residue: value.im.abs(),
                scale,
            });
        }
        Ok(value.re)
    }

    /// The diagonal part `sum_i conj(rho_ii) O_ii`: the value expectation
    /// settles to if the off-diagonal phases interfere away.
    pub fn equilibrium_value(&self) -> f64 {
        let mut acc = ComplexSum::new();
        for i in 0..self.levels() {
            acc.add(self.rho[(i, i)].conj() * self.observable[(i, i)]);
        }
        acc.value().re
    }

    /// Physical seconds per dimensionless time unit of the profile grid.
    fn dimensionless_time_scale(&self) -> Result<f64, ModelError> {
        let bins = self.levels() - 1;
        if bins < 2 {
            return Err(ModelError::SpectrumTooSmall {
                positive_bins: bins,
            });
        }
        UniformGrid::from_energies(&self.energies, self.hbar, self.equidistance_tol)?;
        Ok(1.0 / ((bins - 1) as f64 * self.mean_gap_frequency()))
    }

    /// Collapses the double sum over `(i, j)` into amplitudes binned by the
    /// positive gap index `d = i - j`, with the `d = 0` term held separately.
    ///
    /// Requires an equidistant spectrum. The binned series is verified on
    /// construction: the reconstruction `diag + 2 Re(sum_d bin_d e^{i nu_d t})`
    /// must reproduce the double sum at sixteen scattered times.
    pub fn frequency_profile(&self) -> Result<FrequencyProfile, ModelError> {
        UniformGrid::from_energies(&self.energies, self.hbar, self.equidistance_tol)?;
        let levels = self.levels();
        let n = levels - 1;
        let nu_gap = self.mean_gap_frequency();

        let mut amplitudes = Vec::with_capacity(n);
        for d in 1..=n {
            let mut acc = ComplexSum::new();
            for j in 0..levels - d {
                acc.add(self.rho[(j + d, j)].conj() * self.observable[(j + d, j)]);
            }
            amplitudes.push(acc.value());
        }
        let mut diag = ComplexSum::new();
        for i in 0..levels {
            diag.add(self.rho[(i, i)].conj() * self.observable[(i, i)]);
        }

        let (sampled, map) = if n >= 2 {
            let nu: Vec<f64> = (1..=n).map(|d| d as f64 * nu_gap).collect();
            let (grid, map) = UniformGrid::from_energies(&nu, 1.0, DEFAULT_EQUIDISTANCE_TOL)?;
            (
                Some(SampledFunction::new(grid, amplitudes.clone())?),
                Some(map),
            )
        } else {
            (None, None)
        };

        let profile = FrequencyProfile {
            amplitudes,
            diagonal_part: diag.value(),
            nu_gap,
            sampled,
            map,
        };

        // Reconstruction self-check at sixteen scattered times over one
        // recurrence period.
        let recurrence = TAU / nu_gap;
        let mut state = 0x853C49E6748FEA9Bu64;
        let mut max_deviation = 0.0f64;
        for _ in 0..16 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let t = (state >> 11) as f64 / (1u64 << 53) as f64 * recurrence;
            let direct = self.expectation(t, true)?;
            let rebuilt = profile.reconstructed_expectation(t);
            max_deviation = max_deviation.max((direct - rebuilt).abs());
        }
        if max_deviation > PROFILE_CHECK_TOL * self.kernel_l1.max(1e-300) {
            return Err(ModelError::ProfileSelfCheck { max_deviation });
        }

        Ok(profile)
    }

    /// Runs the window analysis on the frequency profile and maps the
    /// verdict back to physical time.
    ///
    /// Every way the analysis can fail to apply (non-equidistant spectrum,
    /// too few gaps, no admissible partition, empty window) is returned as
    /// a verdict, not an error.
    pub fn predict(&self, params: &LemmaParams) -> Result<Prediction, ModelError> {
        let equilibrium = self.equilibrium_value();
        let profile = match self.frequency_profile() {
            Ok(p) => p,
            Err(ModelError::Grid(GridError::NonEquidistantSpectrum {
                max_rel_deviation,
                ..
            })) => {
                return Ok(Prediction {
                    verdict: DecoherenceVerdict::negative(VerdictReason::NonEquidistant {
                        max_rel_deviation,
                    }),
                    physical_window: None,
                    off_diagonal_mass: self.kernel_off_diagonal_l1,
                    deviation_bound: None,
                    equilibrium,
                    recurrence_time: None,
                })
            }
            Err(e) => return Err(e),
        };

        let mass = profile.off_diagonal_mass();
        let recurrence_time = Some(TAU / profile.nu_gap);

        let Some(sampled) = profile.sampled() else {
            return Ok(Prediction {
                verdict: DecoherenceVerdict::negative(VerdictReason::SpectrumTooSmall {
                    positive_bins: profile.amplitudes.len(),
                }),
                physical_window: None,
                off_diagonal_mass: mass,
                deviation_bound: None,
                equilibrium,
                recurrence_time,
            });
        };

        let verdict = lemma_verdict(sampled, params)?;
        let map = profile.map.expect("map exists whenever sampled does");
        let physical_window = verdict
            .window
            .map(|w| (map.time_to_physical(w.t_low), map.time_to_physical(w.t_high)));
        let deviation_bound = verdict.predicted_bound.map(|pb| pb * mass);

        Ok(Prediction {
            verdict,
            physical_window,
            off_diagonal_mass: mass,
            deviation_bound,
            equilibrium,
            recurrence_time,
        })
    }

    /// Brute-force evolution oracle: evaluates the expectation at each time
    /// by the full double sum, reporting the worst in-window deviation from
    /// equilibrium and the first post-window revival.
    pub fn evolve_and_check(
        &self,
        times: &[f64],
        window: Option<(f64, f64)>,
    ) -> Result<EvolutionSummary, ModelError> {
        if times.is_empty() {
            return Err(ModelError::EmptyTimes);
        }
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() {
                return Err(ModelError::NonFiniteTime(i));
            }
        }
        let expectations: Vec<f64> = times
            .par_iter()
            .map(|&t| self.expectation(t, true))
            .collect::<Result<_, _>>()?;
        let equilibrium = self.equilibrium_value();
        let deviations: Vec<f64> = expectations
            .iter()
            .map(|&e| (e - equilibrium).abs())
            .collect();
        let initial_deviation = deviations[0];

        let max_deviation_in_window = window.and_then(|(lo, hi)| {
            times
                .iter()
                .zip(&deviations)
                .filter(|(&t, _)| t >= lo && t <= hi)
                .map(|(_, &d)| d)
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
        });

        // Revival: first post-window time where the deviation climbs back
        // over half its initial value. A system that starts at equilibrium
        // has nothing to revive.
        let revival_time_estimate = window.and_then(|(_, hi)| {
            if initial_deviation == 0.0 {
                return None;
            }
            times
                .iter()
                .zip(&deviations)
                .find(|(&t, &d)| t > hi && d >= 0.5 * initial_deviation)
                .map(|(&t, _)| t)
        });

        Ok(EvolutionSummary {
            times: times.to_vec(),
            expectations,
            equilibrium,
            initial_deviation,
            max_deviation_in_window,
            revival_time_estimate,
        })
    }

    /// Smallest eigenvalue of `rho` via the real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]`. Cubic cost; intended for on-demand checks
    /// at moderate dimension.
    pub fn rho_min_eigenvalue(&self) -> f64 {
        let l = self.levels();
        let m = DMatrix::<f64>::from_fn(2 * l, 2 * l, |r, c| {
            let (i, j) = (r % l, c % l);
            let v = self.rho[(i, j)];
            match (r / l, c / l) {
                (0, 0) | (1, 1) => v.re,
                (0, 1) => -v.im,
                _ => v.im,
            }
        });
        m.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// On-demand positivity check of `rho`; returns the smallest eigenvalue.
    pub fn validate_positivity(&self) -> Result<f64, ModelError> {
        let min_eigenvalue = self.rho_min_eigenvalue();
        if min_eigenvalue < PSD_TOL {
            return Err(ModelError::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(min_eigenvalue)
    }
}

/// The kernel binned by positive frequency gap: amplitude
/// `sum_{i-j=d} conj(rho_ij) O_ij` per gap `d`, the `d = 0` diagonal held
/// separately. For at least two gaps the bins form a sampled function over
/// the gap frequencies mapped onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProfile {
    amplitudes: Vec<Complex64>,
    diagonal_part: Complex64,
    nu_gap: f64,
    sampled: Option<SampledFunction>,
    map: Option<AffineEnergyMap>,
}

impl FrequencyProfile {
    /// Binned amplitudes for `d = 1..=N`.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn diagonal_part(&self) -> Complex64 {
        self.diagonal_part
    }

    /// Gap frequency `(w_{i+1} - w_i) / hbar`.
    pub fn nu_gap(&self) -> f64 {
        self.nu_gap
    }

    /// The bins as a sampled function on the positive-gap grid; `None` when
    /// fewer than two gaps exist.
    pub fn sampled(&self) -> Option<&SampledFunction> {
        self.sampled.as_ref()
    }

    pub fn map(&self) -> Option<&AffineEnergyMap> {
        self.map.as_ref()
    }

    /// `2 sum_d |bin_d|`: total binned off-diagonal mass, which is also the
    /// tight bound on `|<O>(t) - <O>_eq|` and its value at `t = 0` when all
    /// bins align.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for a in &self.amplitudes {
            acc.add(a.norm());
        }
        2.0 * acc.value()
    }

    /// `diag + 2 Re(sum_d bin_d e^{i nu_d t})` at physical time `t`.
    pub fn reconstructed_expectation(&self, t: f64) -> f64 {
        let mut acc = ComplexSum::new();
        for (d, a) in self.amplitudes.iter().enumerate() {
            let phase = (d + 1) as f64 * self.nu_gap * t;
            let (s, c) = phase.sin_cos();
            acc.add(a * Complex64::new(c, s));
        }
        self.diagonal_part.re + 2.0 * acc.value().re
    }
}

/// Window-analysis outcome mapped back to physical time.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub verdict: DecoherenceVerdict,
    /// The dimensionless window scaled into physical time units.
    pub physical_window: Option<(f64, f64)>,
    /// `2 sum_d |bin_d|` (binned; raw kernel mass for non-equidistant
    /// spectra where no binning exists).
    pub off_diagonal_mass: f64,
    /// Predicted ceiling on `|<O>(t) - <O>_eq|` inside the window:
    /// verdict bound times off-diagonal mass.
    pub deviation_bound: Option<f64>,
    pub equilibrium: f64,
    /// Physical recurrence time `2 pi / nu_gap` of the gap phases.
    pub recurrence_time: Option<f64>,
}

impl Prediction {
    pub fn status(&self) -> VerdictStatus {
        self.verdict.status
    }
}

/// Brute-force evolution record.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSummary {
    pub times: Vec<f64>,
    pub expectations: Vec<f64>,
    pub equilibrium: f64,
    pub initial_deviation: f64,
    pub max_deviation_in_window: Option<f64>,
    pub revival_time_estimate: Option<f64>,
}
