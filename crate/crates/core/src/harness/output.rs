use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::{fmt_f64, ExperimentConfig, HarnessError};
use crate::spectral::{GridSpec, SpectralState};

/// Header plus pre-formatted rows, written as comma-separated text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// CSV text without the named columns.
    pub fn to_csv_without(&self, skip: &[&str]) -> String {
        let keep: Vec<usize> = (0..self.header.len())
            .filter(|&i| !skip.contains(&self.header[i]))
            .collect();
        let pick = |cells: Vec<&str>| keep.iter().map(|&i| cells[i]).collect::<Vec<_>>().join(",");
        let mut out = pick(self.header.clone());
        out.push('\n');
        for row in &self.rows {
            out.push_str(&pick(row.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        out
    }
}

/// Provenance written next to every table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub pair_seed: Option<u64>,
    pub generator: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
}

impl Metadata {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        let pair_seed = match cfg.kind {
            super::ExperimentKind::Symplecticity => cfg.seed().map(|s| cfg.pair_seed.unwrap_or(s.wrapping_add(1))),
            _ => None,
        };
        Self {
            config_hash: cfg.hash(),
            seed: cfg.seed(),
            pair_seed,
            generator: crate::GENERATOR_ID,
            version: crate::VERSION,
            config: cfg.clone(),
        }
    }
}

/// `path` with its extension replaced by `suffix`, e.g. `run.csv` → `run.meta.json`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

const STATE_MAGIC: &str = "# kdv spectral state v1";

/// Text form of a state: a magic line, `M <modes>`, then one line
/// `<mode> <re> <im>` per Fourier slot in FFT order, with 17 significant digits.
pub fn format_state(state: &SpectralState) -> String {
    let grid = state.grid();
    let mut out = format!("{STATE_MAGIC}\nM {}\n", grid.modes());
    for (k, c) in state.coeffs().iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", grid.mode_of(k), fmt_f64(c.re), fmt_f64(c.im));
    }
    out
}

pub fn parse_state(text: &str) -> Result<SpectralState, HarnessError> {
    let bad = |msg: String| HarnessError::Config(format!("malformed state file: {msg}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(STATE_MAGIC) {
        return Err(bad("missing header".into()));
    }
    let modes: usize = lines
        .next()
        .and_then(|l| l.trim().strip_prefix("M "))
        .and_then(|m| m.trim().parse().ok())
        .ok_or_else(|| bad("missing mode count".into()))?;
    let grid = GridSpec::new(modes).map_err(|e| bad(e.to_string()))?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); modes];
    let mut seen = vec![false; modes];
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [m, re, im] = f[..] else {
            return Err(bad(format!("expected three fields in '{line}'")));
        };
        let m: i64 = m.parse().map_err(|_| bad(format!("bad mode '{m}'")))?;
        let k = grid.slot_of(m).ok_or_else(|| bad(format!("mode {m} outside the grid")))?;
        let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number '{s}'")));
        coeffs[k] = Complex64::new(parse(re)?, parse(im)?);
        seen[k] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(bad(format!("expected {modes} coefficients")));
    }
    SpectralState::from_coeffs(grid, coeffs).map_err(|e| bad(e.to_string()))
}

pub fn load_state(path: &Path) -> Result<SpectralState, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_state(&text)
}
