//! The five subcommands and their reports.
//!
//! Exit codes are part of the interface: 0 success/decoheres, 2 input or
//! validation failure, 3 no-decoherence, 4 inconclusive. Reports are
//! line-oriented `key: value` text; data files are CSV with `#` metadata
//! headers. Identical invocations produce byte-identical output.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use decolemma::nalgebra::DMatrix;

use decolemma::model::{DiscreteModel, Prediction};
use decolemma::rlsum::{DecoherenceVerdict, LemmaParams, VerdictReason, VerdictStatus};
use decolemma::sampling::{lin_spaced, log_spaced};
use decolemma::{delta_profile, dft, generators, SampledFunction, UniformGrid};

use crate::io::{fail, fmt_float, open_output, read_model_file, read_values, CliError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_DECOHERENCE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn status_exit_code(status: VerdictStatus) -> i32 {
    match status {
        VerdictStatus::Decoheres => EXIT_OK,
        VerdictStatus::NoDecoherence => EXIT_NO_DECOHERENCE,
        VerdictStatus::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Analysis knobs shared by `analyze` and `model`.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Flatness tolerance eta of the decomposition
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    /// Smallest acceptable component size parameter P
    #[arg(long = "min-p", default_value_t = 8)]
    pub min_p: usize,
    /// Window margin: the sweep starts at kappa*pi
    #[arg(long, default_value_t = 10.0)]
    pub kappa: f64,
    /// Per-component cancellation tolerance epsilon
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Number of log-spaced samples across the window
    #[arg(long = "t-samples", default_value_t = 512)]
    pub t_samples: usize,
}

impl ParamArgs {
    fn to_lemma_params(&self) -> LemmaParams {
        LemmaParams {
            flatness_tol: self.eta,
            min_p: self.min_p,
            kappa: self.kappa,
            epsilon: self.epsilon,
            n_time_samples: self.t_samples,
        }
    }

    fn meta_lines(&self, out: &mut String) {
        out.push_str(&format!("# eta: {}\n", fmt_float(self.eta)));
        out.push_str(&format!("# min_p: {}\n", self.min_p));
        out.push_str(&format!("# kappa: {}\n", fmt_float(self.kappa)));
        out.push_str(&format!("# epsilon: {}\n", fmt_float(self.epsilon)));
        out.push_str(&format!("# t_samples: {}\n", self.t_samples));
    }
}

#[derive(Debug, Args)]
pub struct TimeRangeArgs {
    /// Lower end of the time range
    #[arg(long = "t-min", default_value_t = 0.0)]
    pub t_min: f64,
    /// Upper end of the time range
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of time samples
    #[arg(long = "t-samples", default_value_t = 512)]
    pub t_samples: usize,
    /// Space samples logarithmically (requires t-min > 0)
    #[arg(long = "log-times")]
    pub log_times: bool,
}

impl TimeRangeArgs {
    fn build_times(&self, t_max: f64) -> Result<Vec<f64>, CliError> {
        if !self.t_min.is_finite() || !t_max.is_finite() {
            return fail("time range must be finite");
        }
        if t_max < self.t_min {
            return fail(format!(
                "t-max ({}) must not be below t-min ({})",
                t_max, self.t_min
            ));
        }
        if self.t_samples == 0 {
            return fail("t-samples must be at least 1");
        }
        if self.t_min == t_max || self.t_samples == 1 {
            return Ok(vec![self.t_min]);
        }
        if self.log_times {
            if self.t_min <= 0.0 {
                return fail("--log-times requires t-min > 0");
            }
            Ok(log_spaced(self.t_min, t_max, self.t_samples))
        } else {
            Ok(lin_spaced(self.t_min, t_max, self.t_samples))
        }
    }
}

fn load_function(input: &Path) -> Result<SampledFunction, CliError> {
    let values = read_values(input)?;
    if values.len() < 2 {
        return fail(format!(
            "{}: need at least 2 samples, got {}",
            input.display(),
            values.len()
        ));
    }
    let grid = UniformGrid::new(values.len() - 1).map_err(|e| CliError::new(e.to_string()))?;
    SampledFunction::new(grid, values).map_err(|e| CliError::new(e.to_string()))
}

// ---------------------------------------------------------------------------
// sum
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SumArgs {
    /// CSV of sample values, one per line ('re' or 're,im')
    #[arg(long)]
    pub input: PathBuf,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub range: TimeRangeArgs,
}

pub fn cmd_sum(args: &SumArgs) -> Result<i32, CliError> {
    let sf = load_function(&args.input)?;
    let t_max = args
        .range
        .t_max
        .ok_or_else(|| CliError::new("--t-max is required for sum"))?;
    let times = args.range.build_times(t_max)?;
    let series = dft::sweep(&sf, &times).map_err(|e| CliError::new(e.to_string()))?;

    let mut w = open_output(&args.output)?;
    let write = |w: &mut dyn Write| -> std::io::Result<()> {
        writeln!(w, "# decolemma sum")?;
        writeln!(w, "# version: {VERSION}")?;
        writeln!(w, "# input: {}", args.input.display())?;
        writeln!(w, "# n_intervals: {}", sf.n_intervals())?;
        writeln!(w, "# t_min: {}", fmt_float(args.range.t_min))?;
        writeln!(w, "# t_max: {}", fmt_float(t_max))?;
        writeln!(w, "# t_samples: {}", args.range.t_samples)?;
        writeln!(w, "# log_times: {}", args.range.log_times)?;
        series.write_csv(w)
    };
    write(&mut w).map_err(|e| CliError::new(e.to_string()))?;
    w.flush().map_err(|e| CliError::new(e.to_string()))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV of sample values, one per line ('re' or 're,im')
    #[arg(long)]
    pub input: PathBuf,
    /// Output path for the report (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

fn verdict_report(out: &mut String, verdict: &DecoherenceVerdict) {
    out.push_str(&format!("status: {}\n", verdict.status));
    out.push_str(&format!("reason: {}\n", verdict.reason.code()));
    match verdict.reason {
        VerdictReason::NotInL1Class {
            best_p,
            best_flatness,
        } => {
            out.push_str(&format!("best_p: {best_p}\n"));
            out.push_str(&format!("best_flatness: {}\n", fmt_float(best_flatness)));
        }
        VerdictReason::WindowEmpty { kappa, max_p } => {
            out.push_str(&format!("kappa: {}\n", fmt_float(kappa)));
            out.push_str(&format!("max_p: {max_p}\n"));
        }
        VerdictReason::SpectrumTooSmall { positive_bins } => {
            out.push_str(&format!("positive_bins: {positive_bins}\n"));
        }
        VerdictReason::NonEquidistant { max_rel_deviation } => {
            out.push_str(&format!(
                "max_rel_gap_deviation: {}\n",
                fmt_float(max_rel_deviation)
            ));
        }
        _ => {}
    }
    if let Some(cert) = &verdict.certificate {
        out.push_str(&format!("g: {}\n", cert.g()));
        out.push_str(&format!("p: {}\n", cert.p()));
        out.push_str(&format!("eta_achieved: {}\n", fmt_float(cert.flatness())));
        out.push_str(&format!("c_max: {}\n", fmt_float(cert.c_max())));
    }
    if let Some(w) = &verdict.window {
        out.push_str(&format!("window_low: {}\n", fmt_float(w.t_low)));
        out.push_str(&format!("window_high: {}\n", fmt_float(w.t_high)));
    }
    if let Some(pb) = verdict.predicted_bound {
        out.push_str(&format!("predicted_bound: {}\n", fmt_float(pb)));
    }
    if let Some(obs) = verdict.observed_max {
        out.push_str(&format!("observed_max: {}\n", fmt_float(obs)));
    }
    if let Some(cert) = &verdict.certificate {
        for (k, c) in cert.constants().iter().enumerate() {
            out.push_str(&format!(
                "component_{}: {},{}\n",
                k + 1,
                fmt_float(c.re),
                fmt_float(c.im)
            ));
        }
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let sf = load_function(&args.input)?;
    let params = args.params.to_lemma_params();
    let verdict =
        decolemma::lemma_verdict(&sf, &params).map_err(|e| CliError::new(e.to_string()))?;

    let mut report = String::new();
    report.push_str("# decolemma analyze\n");
    report.push_str(&format!("# version: {VERSION}\n"));
    report.push_str(&format!("# input: {}\n", args.input.display()));
    args.params.meta_lines(&mut report);
    report.push_str(&format!("n_points: {}\n", sf.n_points()));
    report.push_str(&format!("n_intervals: {}\n", sf.n_intervals()));
    verdict_report(&mut report, &verdict);

    let mut w = open_output(&args.output)?;
    w.write_all(report.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::new(e.to_string()))?;
    Ok(status_exit_code(verdict.status))
}

// ---------------------------------------------------------------------------
// pairs
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// Number of grid intervals N
    #[arg(long)]
    pub n: usize,
    /// Evaluation time (must be positive)
    #[arg(long)]
    pub t: f64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_pairs(args: &PairsArgs) -> Result<i32, CliError> {
    if !(args.t.is_finite() && args.t > 0.0) {
        return fail(format!(
            "t must be positive and finite, got {} (no cancellation exists at t <= 0)",
            args.t
        ));
    }
    let grid = UniformGrid::new(args.n).map_err(|e| CliError::new(e.to_string()))?;
    let report = delta_profile(&grid, args.t).map_err(|e| CliError::new(e.to_string()))?;

    let mut partner_of = vec![None; grid.n_points()];
    for &(i, k) in &report.pairs {
        partner_of[i] = Some(k);
    }

    let mut out = String::new();
    out.push_str("# decolemma pairs\n");
    out.push_str(&format!("# version: {VERSION}\n"));
    out.push_str(&format!("# n: {}\n", args.n));
    out.push_str(&format!("# t: {}\n", fmt_float(args.t)));
    out.push_str("i,x_i,cos_xi_t,partner,delta_i\n");
    for (i, &x) in grid.points().iter().enumerate() {
        let cos = (x * args.t).cos();
        match (partner_of[i], report.deltas[i]) {
            (Some(k), Some(delta)) => out.push_str(&format!(
                "{},{},{},{},{}\n",
                i,
                fmt_float(x),
                fmt_float(cos),
                k,
                fmt_float(delta)
            )),
            _ => out.push_str(&format!("{},{},{},,\n", i, fmt_float(x), fmt_float(cos))),
        }
    }
    let uncancelled: Vec<String> = report.uncancelled.iter().map(|i| i.to_string()).collect();
    out.push_str(&format!("uncancelled: {}\n", uncancelled.join(",")));
    if let Some(dm) = report.delta_min {
        out.push_str(&format!("delta_min: {}\n", fmt_float(dm)));
    }

    let mut w = open_output(&args.output)?;
    w.write_all(out.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::new(e.to_string()))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file (sections: hbar, energies, rho, observable)
    #[arg(long, conflicts_with = "generate")]
    pub input: Option<PathBuf>,
    /// Built-in generator: gaussian-offdiag | two-level | diagonal | random-hermitian
    #[arg(long)]
    pub generate: Option<String>,
    /// Number of levels for generated models
    #[arg(long, default_value_t = 64)]
    pub levels: usize,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Action scale override (defaults to the file value or 1.0)
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Relative tolerance of the spectrum equidistance check
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also run the brute-force evolution and write its CSV to --output
    #[arg(long)]
    pub evolve: bool,
    /// Evolution start time (physical units)
    #[arg(long = "t-min", default_value_t = 0.0)]
    pub t_min: f64,
    /// Evolution end time; defaults to 1.05x the recurrence time
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of evolution samples
    #[arg(long = "evolve-samples", default_value_t = 2048)]
    pub evolve_samples: usize,
    /// Output path for the evolution CSV (report always goes to stdout)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn build_model(args: &ModelArgs) -> Result<(DiscreteModel, String), CliError> {
    let (model, source) = if let Some(name) = &args.generate {
        let model = match name.as_str() {
            "gaussian-offdiag" => generators::gaussian_off_diagonal(args.levels, args.seed),
            "two-level" => Ok(generators::two_level()),
            "diagonal" => generators::diagonal(args.levels, args.seed),
            "random-hermitian" => generators::random_hermitian(args.levels, args.seed),
            other => {
                return fail(format!(
                    "unknown generator '{other}' (expected gaussian-offdiag, two-level, \
                     diagonal or random-hermitian)"
                ))
            }
        }
        .map_err(|e| CliError::new(e.to_string()))?;
        let model = match args.hbar {
            Some(hbar) if hbar != model.hbar() => DiscreteModel::new(
                model.energies().to_vec(),
                model.rho().clone(),
                model.observable().clone(),
                hbar,
            )
            .map_err(|e| CliError::new(e.to_string()))?,
            _ => model,
        };
        (model, format!("generate:{name}"))
    } else if let Some(path) = &args.input {
        let file = read_model_file(path)?;
        let levels = file.energies.len();
        let rho = DMatrix::from_fn(levels, levels, |i, j| file.rho[i][j]);
        let obs = DMatrix::from_fn(levels, levels, |i, j| file.observable[i][j]);
        let hbar = args.hbar.or(file.hbar).unwrap_or(1.0);
        let model = DiscreteModel::new(file.energies, rho, obs, hbar)
            .map_err(|e| CliError::new(e.to_string()))?;
        (model, format!("input:{}", path.display()))
    } else {
        return fail("model needs either --input or --generate");
    };
    let model = model
        .with_equidistance_tolerance(args.tolerance)
        .map_err(|e| CliError::new(e.to_string()))?;
    Ok((model, source))
}

fn prediction_report(out: &mut String, model: &DiscreteModel, pred: &Prediction) {
    out.push_str(&format!("levels: {}\n", model.levels()));
    out.push_str(&format!("hbar: {}\n", fmt_float(model.hbar())));
    verdict_report(out, &pred.verdict);
    out.push_str(&format!("equilibrium: {}\n", fmt_float(pred.equilibrium)));
    out.push_str(&format!(
        "off_diagonal_mass: {}\n",
        fmt_float(pred.off_diagonal_mass)
    ));
    if let Some((lo, hi)) = pred.physical_window {
        out.push_str(&format!("window_low_phys: {}\n", fmt_float(lo)));
        out.push_str(&format!("window_high_phys: {}\n", fmt_float(hi)));
    }
    if let Some(bound) = pred.deviation_bound {
        out.push_str(&format!("deviation_bound: {}\n", fmt_float(bound)));
    }
    if let Some(rec) = pred.recurrence_time {
        out.push_str(&format!("recurrence_time_phys: {}\n", fmt_float(rec)));
    }
}

pub fn cmd_model(args: &ModelArgs) -> Result<i32, CliError> {
    let (model, source) = build_model(args)?;
    let params = args.params.to_lemma_params();
    let pred = model
        .predict(&params)
        .map_err(|e| CliError::new(e.to_string()))?;

    let mut report = String::new();
    report.push_str("# decolemma model\n");
    report.push_str(&format!("# version: {VERSION}\n"));
    report.push_str(&format!("# source: {source}\n"));
    if args.generate.is_some() {
        report.push_str(&format!("# levels: {}\n", args.levels));
        report.push_str(&format!("# seed: {}\n", args.seed));
    }
    args.params.meta_lines(&mut report);
    prediction_report(&mut report, &model, &pred);

    if args.evolve {
        let out_path = args
            .output
            .as_ref()
            .ok_or_else(|| CliError::new("--evolve requires --output for the evolution CSV"))?;
        let t_max = match args.t_max {
            Some(t) => t,
            None => match pred.recurrence_time {
                Some(rec) => 1.05 * rec,
                None => return fail("--evolve needs --t-max for this model"),
            },
        };
        if !(t_max.is_finite() && t_max > args.t_min) {
            return fail(format!("invalid evolution range [{}, {t_max}]", args.t_min));
        }
        if args.evolve_samples < 2 {
            return fail("--evolve-samples must be at least 2");
        }
        let times = lin_spaced(args.t_min, t_max, args.evolve_samples);
        let summary = model
            .evolve_and_check(&times, pred.physical_window)
            .map_err(|e| CliError::new(e.to_string()))?;

        report.push_str(&format!("evolution_samples: {}\n", times.len()));
        report.push_str(&format!("evolution_t_max: {}\n", fmt_float(t_max)));
        report.push_str(&format!(
            "initial_deviation: {}\n",
            fmt_float(summary.initial_deviation)
        ));
        if let Some(d) = summary.max_deviation_in_window {
            report.push_str(&format!("max_deviation_in_window: {}\n", fmt_float(d)));
        }
        if let Some(t) = summary.revival_time_estimate {
            report.push_str(&format!("revival_time: {}\n", fmt_float(t)));
        }
        report.push_str(&format!("evolution_csv: {}\n", out_path.display()));

        let mut w = open_output(&args.output)?;
        let write = |w: &mut dyn Write| -> std::io::Result<()> {
            writeln!(w, "# decolemma model --evolve")?;
            writeln!(w, "# version: {VERSION}")?;
            writeln!(w, "# source: {source}")?;
            writeln!(w, "# equilibrium: {}", fmt_float(summary.equilibrium))?;
            writeln!(w, "t_phys,expectation,deviation")?;
            for (t, e) in summary.times.iter().zip(&summary.expectations) {
                writeln!(
                    w,
                    "{},{},{}",
                    fmt_float(*t),
                    fmt_float(*e),
                    fmt_float((e - summary.equilibrium).abs())
                )?;
            }
            Ok(())
        };
        write(&mut w).map_err(|e| CliError::new(e.to_string()))?;
        w.flush().map_err(|e| CliError::new(e.to_string()))?;
    }

    print!("{report}");
    Ok(status_exit_code(pred.verdict.status))
}

// ---------------------------------------------------------------------------
// dft
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct DftArgs {
    /// CSV of sample values, one per line ('re' or 're,im')
    #[arg(long)]
    pub input: PathBuf,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Sweep the canonical grid t_m = 2 pi m N/(N+1) via the fast transform
    #[arg(long, conflicts_with_all = ["t_max", "log_times"])]
    pub canonical: bool,
    #[command(flatten)]
    pub range: TimeRangeArgs,
}

pub fn cmd_dft(args: &DftArgs) -> Result<i32, CliError> {
    let sf = load_function(&args.input)?;
    let series = if args.canonical {
        dft::sweep_canonical(&sf)
    } else {
        let t_max = args
            .range
            .t_max
            .ok_or_else(|| CliError::new("--t-max is required unless --canonical is given"))?;
        let times = args.range.build_times(t_max)?;
        dft::sweep(&sf, &times).map_err(|e| CliError::new(e.to_string()))?
    };

    let mut w = open_output(&args.output)?;
    let write = |w: &mut dyn Write| -> std::io::Result<()> {
        writeln!(w, "# decolemma dft")?;
        writeln!(w, "# version: {VERSION}")?;
        writeln!(w, "# input: {}", args.input.display())?;
        writeln!(w, "# n_intervals: {}", sf.n_intervals())?;
        writeln!(w, "# canonical: {}", args.canonical)?;
        series.write_csv(w)
    };
    write(&mut w).map_err(|e| CliError::new(e.to_string()))?;
    w.flush().map_err(|e| CliError::new(e.to_string()))?;
    Ok(EXIT_OK)
}
