//! File ingestion and report formatting.
//!
//! Inputs are deliberately plain: values come as CSV with one complex value
//! per line (`re` or `re,im`), models as a line-oriented sectioned file.
//! Every parse error carries the offending line number. Output floats use
//! 17 significant digits so runs diff cleanly.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

/// Any condition that must abort the run with exit code 2.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn fail<T>(message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::new(message))
}

/// 17 significant digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
    .trim()
}

fn parse_complex(path: &Path, lineno: usize, text: &str) -> Result<Complex64, CliError> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    let parse = |s: &str| -> Result<f64, CliError> {
        s.parse::<f64>().map_err(|_| {
            CliError::new(format!(
                "{}:{}: cannot parse '{}' as a number",
                path.display(),
                lineno,
                s
            ))
        })
    };
    match fields.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => fail(format!(
            "{}:{}: expected 're' or 're,im', got '{}'",
            path.display(),
            lineno,
            text
        )),
    }
}

/// Reads a sampled-function CSV: one complex value per line, `#` comments.
pub fn read_values(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("{}: {}", path.display(), e)))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        values.push(parse_complex(path, idx + 1, line)?);
    }
    if values.is_empty() {
        return fail(format!("{}: no values found", path.display()));
    }
    Ok(values)
}

/// Parsed model file: energies column, row-major `re,im` matrices, and an
/// optional `hbar:` header.
pub struct ModelFile {
    pub hbar: Option<f64>,
    pub energies: Vec<f64>,
    pub rho: Vec<Vec<Complex64>>,
    pub observable: Vec<Vec<Complex64>>,
}

enum Section {
    None,
    Energies,
    Rho,
    Observable,
}

/// Reads the sectioned model file:
///
/// ```text
/// hbar: 1.0
/// energies:
/// 0.0
/// 1.0
/// rho:
/// 0.5,0,0.5,0
/// 0.5,0,0.5,0
/// observable:
/// 0,0,1,0
/// 1,0,0,0
/// ```
pub fn read_model_file(path: &Path) -> Result<ModelFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("{}: {}", path.display(), e)))?;
    let mut model = ModelFile {
        hbar: None,
        energies: Vec::new(),
        rho: Vec::new(),
        observable: Vec::new(),
    };
    let mut section = Section::None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("hbar:") {
            model.hbar = Some(rest.trim().parse::<f64>().map_err(|_| {
                CliError::new(format!(
                    "{}:{}: cannot parse hbar value '{}'",
                    path.display(),
                    lineno,
                    rest.trim()
                ))
            })?);
            continue;
        }
        match line {
            "energies:" => {
                section = Section::Energies;
                continue;
            }
            "rho:" => {
                section = Section::Rho;
                continue;
            }
            "observable:" => {
                section = Section::Observable;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => {
                return fail(format!(
                    "{}:{}: content before any section header: '{}'",
                    path.display(),
                    lineno,
                    line
                ))
            }
            Section::Energies => {
                let e = line.parse::<f64>().map_err(|_| {
                    CliError::new(format!(
                        "{}:{}: cannot parse energy '{}'",
                        path.display(),
                        lineno,
                        line
                    ))
                })?;
                model.energies.push(e);
            }
            Section::Rho | Section::Observable => {
                let fields: Result<Vec<f64>, CliError> = line
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            CliError::new(format!(
                                "{}:{}: cannot parse matrix entry '{}'",
                                path.display(),
                                lineno,
                                s.trim()
                            ))
                        })
                    })
                    .collect();
                let fields = fields?;
                if fields.len() % 2 != 0 {
                    return fail(format!(
                        "{}:{}: matrix rows need an even number of fields (re,im pairs), got {}",
                        path.display(),
                        lineno,
                        fields.len()
                    ));
                }
                let row: Vec<Complex64> = fields
                    .chunks(2)
                    .map(|c| Complex64::new(c[0], c[1]))
                    .collect();
                match section {
                    Section::Rho => model.rho.push(row),
                    _ => model.observable.push(row),
                }
            }
        }
    }

    let levels = model.energies.len();
    if levels == 0 {
        return fail(format!("{}: missing 'energies:' section", path.display()));
    }
    for (name, rows) in [("rho", &model.rho), ("observable", &model.observable)] {
        if rows.len() != levels {
            return fail(format!(
                "{}: {} has {} rows, expected {}",
                path.display(),
                name,
                rows.len(),
                levels
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != levels {
                return fail(format!(
                    "{}: {} row {} has {} entries, expected {}",
                    path.display(),
                    name,
                    i + 1,
                    row.len(),
                    levels
                ));
            }
        }
    }
    Ok(model)
}

/// Writer for `--output PATH`, falling back to stdout.
pub fn open_output(output: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match output {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| CliError::new(format!("{}: {}", path.display(), e)))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
    }
}
