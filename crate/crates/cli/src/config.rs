//! Experiment configuration: a plain `key = value` file format.

use std::path::PathBuf;

use mclab_core::error::{Error, Result};
use mclab_core::SolverConfig;
use serde::Serialize;

/// Reveal-pattern families the experiment harness can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PatternFamily {
    HalfRows,
    Parity,
    Quasirandom,
    FromFile,
}

impl PatternFamily {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "halfRows" | "half-rows" => Some(Self::HalfRows),
            "parity" => Some(Self::Parity),
            "quasirandom" => Some(Self::Quasirandom),
            "fromFile" | "from-file" => Some(Self::FromFile),
            _ => None,
        }
    }
}

/// A full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub pattern_family: PatternFamily,
    /// Strictly increasing side lengths (ignored for `FromFile`).
    pub sizes: Vec<usize>,
    /// Hard rank bound for the synthesized ground truth.
    pub rank_bound: usize,
    /// Box bound `L` on ground-truth and estimate entries.
    pub box_bound: f64,
    pub solver: SolverConfig,
    pub seed: u64,
    /// Report base path; `.json` and `.csv` are appended.
    pub output_path: PathBuf,
    /// Reveal density for the quasirandom family.
    pub density: f64,
    /// Mask files for the `FromFile` family, in size order.
    pub mask_files: Vec<PathBuf>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| parse_err(line, format!("invalid value {raw:?} for {key}")))
}

/// Parses the `key = value` experiment format. Blank lines and `#` comments
/// are skipped; unknown or repeated keys are errors. Required keys:
/// `patternFamily`, `outputPath`, and `sizes` (or `maskFiles` when the
/// family is `fromFile`).
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let mut family: Option<(usize, PatternFamily)> = None;
    let mut sizes: Option<Vec<usize>> = None;
    let mut rank_bound = 2usize;
    let mut box_bound = 1.0f64;
    let mut solver = SolverConfig::default();
    let mut seed = 0u64;
    let mut output_path: Option<PathBuf> = None;
    let mut density = 0.5f64;
    let mut mask_files: Vec<PathBuf> = Vec::new();
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got {content:?}")))?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(parse_err(line, format!("key {key} given twice")));
        }
        seen.push(key.to_string());
        match key {
            "patternFamily" => {
                let fam = PatternFamily::parse(value)
                    .ok_or_else(|| parse_err(line, format!("unknown pattern family {value:?}")))?;
                family = Some((line, fam));
            }
            "sizes" => {
                let parsed: Result<Vec<usize>> = value
                    .split(',')
                    .map(|tok| parse_num(line, "sizes", tok.trim()))
                    .collect();
                sizes = Some(parsed?);
            }
            "rankBound" => rank_bound = parse_num(line, key, value)?,
            "boxBound" => box_bound = parse_num(line, key, value)?,
            "seed" => seed = parse_num(line, key, value)?,
            "outputPath" => output_path = Some(PathBuf::from(value)),
            "density" => density = parse_num(line, key, value)?,
            "maskFiles" => {
                mask_files = value
                    .split(',')
                    .map(|tok| PathBuf::from(tok.trim()))
                    .collect();
            }
            "rho" => solver.penalty = parse_num(line, key, value)?,
            "maxIters" => solver.max_iters = parse_num(line, key, value)?,
            "primalTol" => solver.primal_tol = parse_num(line, key, value)?,
            "dualTol" => solver.dual_tol = parse_num(line, key, value)?,
            "overRelaxation" => solver.over_relaxation = parse_num(line, key, value)?,
            _ => return Err(parse_err(line, format!("unknown key {key:?}"))),
        }
    }

    let (family_line, pattern_family) =
        family.ok_or_else(|| parse_err(0, "missing required key patternFamily"))?;
    let output_path = output_path.ok_or_else(|| parse_err(0, "missing required key outputPath"))?;

    let sizes = match pattern_family {
        PatternFamily::FromFile => {
            if mask_files.is_empty() {
                return Err(parse_err(
                    family_line,
                    "fromFile family requires the maskFiles key",
                ));
            }
            sizes.unwrap_or_default()
        }
        _ => sizes.ok_or_else(|| parse_err(0, "missing required key sizes"))?,
    };
    if pattern_family != PatternFamily::FromFile {
        if sizes.is_empty() {
            return Err(parse_err(0, "sizes must be non-empty"));
        }
        if sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(parse_err(0, "sizes must be strictly increasing"));
        }
    }
    if rank_bound < 1 {
        return Err(parse_err(0, "rankBound must be at least 1"));
    }
    if !(box_bound > 0.0) {
        return Err(parse_err(0, "boxBound must be positive"));
    }
    if !(density > 0.0 && density < 1.0) {
        return Err(parse_err(0, "density must lie strictly between 0 and 1"));
    }

    Ok(ExperimentConfig {
        pattern_family,
        sizes,
        rank_bound,
        box_bound,
        solver,
        seed,
        output_path,
        density,
        mask_files,
    })
}
