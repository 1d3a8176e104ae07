//! Experiment drivers shared by the `magic-mps` binary and the examples.
//!
//! Every driver takes a fully resolved [`RunConfig`] and returns a [`Report`]
//! (a table plus scalar summaries) that can be written as CSV or JSON. Both
//! formats embed the resolved configuration and the crate version.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::circuits::{
    apply_circuit, bloch_product_mps, imaginary_time_ground_state, random_clifford_circuit, t_state_density,
    t_state_mps, tebd_evolve, IsingParams, TebdSettings,
};
use crate::error::{ensure, Error, Result};
use crate::estimator::{
    error_bound_from_z, estimate, estimate_many, expected_z2, product_state_q2, z_statistic, ProductStateParams,
};
use crate::exact::{exact_evolve, exact_ground_state, exact_sre_many, StateVector, MAX_SRE_SITES};
use crate::mps::Mps;
use crate::sampler::{read_records_file, sample_batch, sample_string, write_records, SampleRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Offset between the sampling seed and the seed of any random circuit, so
/// that the two never share a ChaCha stream.
const CIRCUIT_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// `|m − m̃|` below which a zero error bar still counts as agreement.
pub const DEVIATION_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Estimate,
    TstateBench,
    ProductBench,
    GroundState,
    Quench,
    Bench,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Built-in states for `sample`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Zero,
    Ghz,
    #[default]
    Tstate,
    /// Bloch vector `(1, 1, 1)/√3` on every site.
    Product,
    /// Random right-normalized MPS of bond dimension `chi_max`.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Command>,
    pub n_sites: usize,
    pub renyi: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub chi_max: usize,
    pub cutoff: f64,
    pub phi: f64,
    pub field_h: f64,
    pub field_g: f64,
    pub dt: f64,
    pub t_max: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// MPS JSON for `sample`, record file for `estimate`.
    pub input: Option<PathBuf>,
    pub state: StateKind,
    /// Depth of the random Clifford circuit; `None` means 0 for `sample`
    /// and 10 for `tstate-bench`.
    pub clifford_depth: Option<usize>,
    pub phi_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    /// Spacing of quench output times; must be a multiple of `dt`.
    pub output_every: f64,
    pub repetitions: usize,
    pub chi_grid: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub bench_chi: usize,
    /// Minimum timed wall time per benchmark point.
    pub bench_min_seconds: f64,
    pub ground_state_tol: f64,
    /// Compare against the exact oracle when `n_sites` allows it.
    pub oracle: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            n_sites: 10,
            renyi: vec![1.0, 2.0],
            n_samples: 10_000,
            seed: 0,
            chi_max: 64,
            cutoff: 1e-10,
            phi: FRAC_PI_4,
            field_h: 0.5,
            field_g: 0.0,
            dt: 0.05,
            t_max: 2.0,
            format: OutputFormat::Csv,
            out: None,
            input: None,
            state: StateKind::Tstate,
            clifford_depth: None,
            phi_grid: (0..9).map(|k| k as f64 * FRAC_PI_2 / 8.0).collect(),
            h_grid: vec![0.3, 0.5, 1.0, 1.5],
            output_every: 0.5,
            repetitions: 200,
            chi_grid: vec![16, 32, 64, 128],
            n_grid: vec![16, 32, 64],
            bench_chi: 32,
            bench_min_seconds: 0.5,
            ground_state_tol: 1e-10,
            oracle: true,
        }
    }
}

/// Well-formed JSON with unknown keys or bad values is a contract violation;
/// malformed JSON stays a format error.
fn config_error(err: serde_json::Error) -> Error {
    match err.classify() {
        serde_json::error::Category::Data => Error::Contract(format!("invalid config: {err}")),
        _ => err.into(),
    }
}

impl RunConfig {
    /// Layers `overrides` over the config file text (if any) over the
    /// defaults. Unknown keys at either layer are contract violations.
    pub fn layered(file_text: Option<&str>, overrides: Map<String, Value>) -> Result<Self> {
        let base = match file_text {
            Some(text) => serde_json::from_str::<RunConfig>(text).map_err(config_error)?,
            None => RunConfig::default(),
        };
        let mut value = serde_json::to_value(base)?;
        let object = value.as_object_mut().expect("config serializes to an object");
        for (k, v) in overrides {
            object.insert(k, v);
        }
        let config: RunConfig = serde_json::from_value(value).map_err(config_error)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let config = RunConfig::layered(Some(&fs::read_to_string(path)?), Map::new())?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.n_sites >= 1, "n_sites must be positive");
        ensure!(self.n_samples >= 1, "n_samples must be positive");
        ensure!(self.chi_max >= 1, "chi_max must be positive");
        ensure!(self.repetitions >= 1, "repetitions must be positive");
        ensure!(self.bench_chi >= 1, "bench_chi must be positive");
        ensure!(!self.renyi.is_empty(), "at least one Rényi index is required");
        ensure!(
            self.renyi.iter().all(|n| n.is_finite() && *n >= 1.0),
            "Rényi indices must be finite and >= 1, got {:?}",
            self.renyi
        );
        ensure!(self.cutoff.is_finite() && self.cutoff >= 0.0, "cutoff must be finite and nonnegative");
        ensure!(self.dt.is_finite() && self.dt > 0.0, "dt must be positive");
        ensure!(self.t_max.is_finite() && self.t_max >= 0.0, "t_max must be nonnegative");
        ensure!(self.output_every.is_finite() && self.output_every > 0.0, "output_every must be positive");
        ensure!(self.phi.is_finite() && self.field_h.is_finite() && self.field_g.is_finite(), "model parameters must be finite");
        ensure!(!self.phi_grid.is_empty() && self.phi_grid.iter().all(|v| v.is_finite()), "phi_grid must be nonempty and finite");
        ensure!(!self.h_grid.is_empty() && self.h_grid.iter().all(|v| v.is_finite()), "h_grid must be nonempty and finite");
        ensure!(!self.chi_grid.is_empty() && self.chi_grid.iter().all(|&c| c >= 1), "chi_grid entries must be positive");
        ensure!(!self.n_grid.is_empty() && self.n_grid.iter().all(|&n| n >= 1), "n_grid entries must be positive");
        ensure!(self.bench_min_seconds.is_finite() && self.bench_min_seconds >= 0.0, "bench_min_seconds must be nonnegative");
        ensure!(self.ground_state_tol.is_finite() && self.ground_state_tol > 0.0, "ground_state_tol must be positive");
        Ok(())
    }

    fn provenance(&self) -> Value {
        json!({ "version": VERSION, "config": self })
    }

    fn circuit_seed(&self) -> u64 {
        self.seed.wrapping_add(CIRCUIT_SEED_OFFSET)
    }
}

/// A table cell. Floats are written with 17 significant digits.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Output of one driver: a table, scalar summaries, and the config that
/// produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Command,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, Value>,
}

impl Report {
    fn new(command: Command, config: &RunConfig, columns: &[&str]) -> Self {
        Self {
            command,
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value of `name` in row `row`.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column(name)?)?.as_f64()
    }

    /// All numeric values of one column, `None` for non-numeric cells.
    pub fn column_values(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(j) => self.rows.iter().map(|r| r[j].as_f64()).collect(),
            None => Vec::new(),
        }
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key)?.as_f64()
    }

    /// CSV with `#` comment lines for provenance and summaries, then a header.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# magic-mps {VERSION}").unwrap();
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?).unwrap();
        if !self.summary.is_empty() {
            writeln!(out, "# summary: {}", serde_json::to_string(&self.summary)?).unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Map<String, Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| Ok((c.clone(), serde_json::to_value(v)?)))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let mut doc = self.config.provenance();
        let object = doc.as_object_mut().expect("provenance is an object");
        object.insert("command".into(), serde_json::to_value(self.command)?);
        object.insert("columns".into(), serde_json::to_value(&self.columns)?);
        object.insert("rows".into(), serde_json::to_value(rows)?);
        object.insert("summary".into(), serde_json::to_value(&self.summary)?);
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn render(&self) -> Result<String> {
        match self.config.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Writes to `config.out`, or returns the rendered text when unset.
    pub fn emit(&self) -> Result<Option<String>> {
        let text = self.render()?;
        match &self.config.out {
            Some(path) => {
                fs::write(path, text)?;
                Ok(None)
            }
            None => Ok(Some(text)),
        }
    }
}

/// `(m_ref − m̃)/δm̃`, with zero error bars treated as exact agreement when
/// `|m_ref − m̃| ≤ DEVIATION_FLOOR`.
pub fn deviation(reference: f64, estimate: f64, std_error: f64) -> f64 {
    let diff = reference - estimate;
    if diff.abs() <= DEVIATION_FLOOR {
        0.0
    } else if std_error > 0.0 {
        diff / std_error
    } else {
        diff.signum() * f64::INFINITY
    }
}

fn index_label(n: f64) -> String {
    if n.fract() == 0.0 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

fn random_circuit_state(mps: &Mps, depth: usize, config: &RunConfig) -> Result<(Mps, f64)> {
    if depth == 0 {
        return Ok((mps.clone(), 0.0));
    }
    let circuit = random_clifford_circuit(mps.n_sites(), depth, config.circuit_seed())?;
    apply_circuit(mps, &circuit, config.chi_max, config.cutoff)
}

/// State selected by `config.input` (MPS JSON) or `config.state`, after the
/// optional random Clifford circuit.
pub fn prepare_state(config: &RunConfig) -> Result<(Mps, f64)> {
    let base = match &config.input {
        Some(path) => Mps::read_json(path)?,
        None => match config.state {
            StateKind::Zero => Mps::zero_state(config.n_sites)?,
            StateKind::Ghz => Mps::ghz(config.n_sites)?,
            StateKind::Tstate => t_state_mps(config.n_sites, config.phi)?,
            StateKind::Product => bloch_product_mps(config.n_sites, ProductStateParams::uniform().as_array())?,
            StateKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.circuit_seed());
                Mps::random(config.n_sites, config.chi_max, &mut rng)?
            }
        },
    };
    let base = if base.is_right_normalized() { base } else { base.right_normalize()? };
    random_circuit_state(&base, config.clifford_depth.unwrap_or(0), config)
}

/// Records and provenance of one `sample` run.
#[derive(Clone, Debug)]
pub struct SampleRun {
    pub records: Vec<SampleRecord>,
    pub sidecar: Value,
}

impl SampleRun {
    pub fn records_text(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_records(&self.records, &mut buf)?;
        Ok(String::from_utf8(buf).expect("record lines are ASCII"))
    }

    /// Records to `config.out` and the sidecar to `<out>.json`; without an
    /// output path, returns the record text.
    pub fn emit(&self, config: &RunConfig) -> Result<Option<String>> {
        match &config.out {
            Some(path) => {
                let mut file = fs::File::create(path)?;
                file.write_all(self.records_text()?.as_bytes())?;
                fs::write(sidecar_path(path), serde_json::to_string_pretty(&self.sidecar)?)?;
                Ok(None)
            }
            None => Ok(Some(self.records_text()?)),
        }
    }
}

pub fn sidecar_path(records: &Path) -> PathBuf {
    let mut name = records.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn cmd_sample(config: &RunConfig) -> Result<SampleRun> {
    config.validate()?;
    let start = Instant::now();
    let (mps, discarded) = prepare_state(config)?;
    let prepare_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let records = sample_batch(&mps, config.n_samples, config.seed)?;
    let sample_seconds = start.elapsed().as_secs_f64();
    let mut sidecar = config.provenance();
    let object = sidecar.as_object_mut().expect("provenance is an object");
    object.insert(
        "run".into(),
        json!({
            "seed": config.seed,
            "n_sites": mps.n_sites(),
            "n_samples": records.len(),
            "chi": mps.max_bond(),
            "bond_dims": mps.bond_dims(),
            "discarded_weight": discarded,
            "workers": rayon::current_num_threads(),
            "prepare_seconds": prepare_seconds,
            "sample_seconds": sample_seconds,
            "seconds_per_sample": sample_seconds / records.len() as f64,
        }),
    );
    Ok(SampleRun { records, sidecar })
}

pub fn cmd_estimate(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Error::Contract("estimate needs an input record file".into()))?;
    let records = read_records_file(path)?;
    ensure!(!records.is_empty(), "record file {} is empty", path.display());
    let n_sites = records[0].string.len();
    let mut report = Report::new(
        Command::Estimate,
        config,
        &["renyi_n", "q_estimate", "m_density", "std_error", "n_samples", "n_sites"],
    );
    for r in estimate_many(&records, &config.renyi, n_sites)? {
        report.push(vec![
            r.renyi_n.into(),
            r.q_estimate.into(),
            r.m_density.into(),
            r.std_error.into(),
            r.n_samples.into(),
            r.n_sites.into(),
        ]);
    }
    Ok(report)
}

/// `U_C |T_φ⟩^⊗N` over `phi_grid`, one random Clifford circuit for all `φ`.
pub fn cmd_tstate_bench(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let depth = config.clifford_depth.unwrap_or(10);
    let circuit = random_clifford_circuit(config.n_sites, depth, config.circuit_seed())?;
    let mut report = Report::new(
        Command::TstateBench,
        config,
        &["phi", "n", "m_density", "std_error", "m_analytic", "delta", "chi", "discarded_weight"],
    );
    let mut within = 0usize;
    for (k, &phi) in config.phi_grid.iter().enumerate() {
        let (mps, discarded) = apply_circuit(&t_state_mps(config.n_sites, phi)?, &circuit, config.chi_max, config.cutoff)?;
        let records = sample_batch(&mps, config.n_samples, config.seed.wrapping_add(k as u64))?;
        for r in estimate_many(&records, &config.renyi, config.n_sites)? {
            let analytic = t_state_density(phi, r.renyi_n);
            let delta = deviation(analytic, r.m_density, r.std_error);
            within += usize::from(delta.abs() <= 3.0);
            report.push(vec![
                phi.into(),
                r.renyi_n.into(),
                r.m_density.into(),
                r.std_error.into(),
                analytic.into(),
                delta.into(),
                mps.max_bond().into(),
                discarded.into(),
            ]);
        }
    }
    let rows = report.rows.len();
    report.summary.insert("clifford_depth".into(), json!(depth));
    report.summary.insert("fraction_within_3_sigma".into(), json!(within as f64 / rows as f64));
    Ok(report)
}

/// Repeated `m̃₂` estimates on the product state with `p = (1/3, 1/3, 1/3)`.
pub fn cmd_product_bench(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let params = ProductStateParams::uniform();
    let n = config.n_sites;
    let mps = bloch_product_mps(n, params.as_array())?;
    let q_exact = product_state_q2(&params, n);
    let m_exact = -q_exact.ln() / n as f64 - std::f64::consts::LN_2;
    let mut report = Report::new(
        Command::ProductBench,
        config,
        &["repetition", "m_density", "std_error", "rel_error", "q_estimate", "z"],
    );
    let (mut rel_sum, mut below, mut zs) = (0.0, 0usize, Vec::with_capacity(config.repetitions));
    for rep in 0..config.repetitions {
        let records = sample_batch(&mps, config.n_samples, config.seed.wrapping_add(rep as u64))?;
        let r = estimate(&records, 2.0, n)?;
        let rel = (r.m_density - m_exact).abs() / m_exact;
        let z = z_statistic(r.q_estimate, q_exact);
        rel_sum += rel;
        below += usize::from(rel < 0.05);
        zs.push(z);
        report.push(vec![rep.into(), r.m_density.into(), r.std_error.into(), rel.into(), r.q_estimate.into(), z.into()]);
    }
    let reps = config.repetitions as f64;
    let z_expected = expected_z2(&params, n, config.n_samples);
    let z_mean = zs.iter().sum::<f64>() / reps;
    let z_std_error = if zs.len() > 1 {
        (zs.iter().map(|z| (z - z_mean).powi(2)).sum::<f64>() / (reps - 1.0)).sqrt() / reps.sqrt()
    } else {
        f64::NAN
    };
    let bound = error_bound_from_z(z_expected, 2.0, n)?;
    report.summary.insert("m_exact".into(), json!(m_exact));
    report.summary.insert("mean_rel_error".into(), json!(rel_sum / reps));
    report.summary.insert("p_rel_error_below_5pct".into(), json!(below as f64 / reps));
    report.summary.insert("analytic_bound".into(), json!(bound));
    report.summary.insert("analytic_rel_bound".into(), json!(bound / m_exact));
    report.summary.insert("z_expected".into(), json!(z_expected));
    report.summary.insert("z_mean".into(), json!(z_mean));
    report.summary.insert("z_std_error".into(), json!(z_std_error));
    Ok(report)
}

/// Ising ground states over `h_grid` at `g = field_g`, with the exact
/// oracle when `n_sites` is small enough.
pub fn cmd_ground_state(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let n = config.n_sites;
    let oracle = config.oracle && n <= MAX_SRE_SITES;
    let mut report = Report::new(
        Command::GroundState,
        config,
        &["h", "g", "n", "m_density", "std_error", "m_exact", "delta", "energy", "energy_exact", "degenerate", "chi"],
    );
    for (k, &h) in config.h_grid.iter().enumerate() {
        let params = IsingParams::new(h, config.field_g);
        let run = imaginary_time_ground_state(n, &params, config.chi_max, config.cutoff, config.ground_state_tol)?;
        let records = sample_batch(&run.mps, config.n_samples, config.seed.wrapping_add(k as u64))?;
        let estimates = estimate_many(&records, &config.renyi, n)?;
        let (exact_m, exact_e, degenerate) = if oracle {
            let gs = exact_ground_state(n, &params)?;
            (Some(exact_sre_many(&gs.state, &config.renyi)?), Some(gs.energy), Some(gs.degenerate))
        } else {
            (None, None, None)
        };
        for (j, r) in estimates.iter().enumerate() {
            let m_exact = exact_m.as_ref().map_or(f64::NAN, |m| m[j]);
            report.push(vec![
                h.into(),
                config.field_g.into(),
                r.renyi_n.into(),
                r.m_density.into(),
                r.std_error.into(),
                m_exact.into(),
                if oracle { deviation(m_exact, r.m_density, r.std_error) } else { f64::NAN }.into(),
                run.energy.into(),
                exact_e.unwrap_or(f64::NAN).into(),
                degenerate.map_or(Cell::Text("unknown".into()), Cell::Bool),
                run.mps.max_bond().into(),
            ]);
        }
    }
    report.summary.insert("oracle".into(), json!(oracle));
    Ok(report)
}

/// Quench of `|+…+⟩` under `(field_h, field_g)`, sampled every `output_every`
/// up to `t_max`.
pub fn cmd_quench(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let n = config.n_sites;
    let steps_f = config.output_every / config.dt;
    ensure!(
        (steps_f - steps_f.round()).abs() <= 1e-9 * steps_f.max(1.0) && steps_f.round() >= 1.0,
        "output_every = {} is not a positive multiple of dt = {}",
        config.output_every,
        config.dt
    );
    let steps = steps_f.round() as usize;
    let n_outputs = (config.t_max / config.output_every + 1e-9).floor() as usize;
    let oracle = config.oracle && n <= MAX_SRE_SITES;
    let params = IsingParams::new(config.field_h, config.field_g);

    let labels: Vec<String> = config.renyi.iter().map(|&r| index_label(r)).collect();
    let mut columns = vec!["t".to_string()];
    columns.extend(labels.iter().map(|l| format!("m{l}")));
    columns.extend(labels.iter().map(|l| format!("dm{l}")));
    columns.extend(["S_half".to_string(), "max_discarded".to_string()]);
    if oracle {
        columns.extend(labels.iter().map(|l| format!("m{l}_exact")));
    }
    columns.push("chi".into());
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = Report::new(Command::Quench, config, &column_refs);

    let initial = t_state_mps(n, 0.0)?;
    let initial_exact = if oracle { Some(StateVector::from_mps(&initial)?) } else { None };
    let settings = TebdSettings::real_time(config.dt, steps).with_truncation(config.chi_max, config.cutoff);
    let mut mps = initial;
    let mut max_discarded = 0.0f64;
    for k in 0..=n_outputs {
        if k > 0 {
            let (next, diagnostics) = tebd_evolve(&mps, &params, &settings)?;
            mps = next;
            max_discarded = diagnostics.iter().fold(max_discarded, |a, d| a.max(d.max_discarded));
        }
        let t = k as f64 * steps as f64 * config.dt;
        let records = sample_batch(&mps, config.n_samples, config.seed.wrapping_add(k as u64))?;
        let estimates = estimate_many(&records, &config.renyi, n)?;
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend(estimates.iter().map(|r| Cell::from(r.m_density)));
        row.extend(estimates.iter().map(|r| Cell::from(r.std_error)));
        row.push(if n >= 2 { mps.entanglement_entropy(n / 2)? } else { 0.0 }.into());
        row.push(max_discarded.into());
        if let Some(psi0) = &initial_exact {
            let psi = exact_evolve(psi0, &params, t)?;
            row.extend(exact_sre_many(&psi, &config.renyi)?.into_iter().map(Cell::from));
        }
        row.push(mps.max_bond().into());
        report.push(row);
    }
    report.summary.insert("oracle".into(), json!(oracle));
    report.summary.insert("steps_per_output".into(), json!(steps));
    Ok(report)
}

/// Bond layout of the random benchmark states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchBonds {
    /// `χ` on every bond that right-normalization allows
    /// (`min(χ, 2^(N−j))`), so every site but a short right edge costs `χ³`.
    Uniform,
    /// Schmidt-rank bounded `min(χ, 2^j, 2^(N−j))`.
    Minimal,
}

impl BenchBonds {
    fn label(self) -> &'static str {
        match self {
            BenchBonds::Uniform => "uniform",
            BenchBonds::Minimal => "minimal",
        }
    }

    fn state(self, n_sites: usize, chi: usize, rng: &mut ChaCha8Rng) -> Result<Mps> {
        match self {
            BenchBonds::Minimal => Mps::random(n_sites, chi, rng),
            BenchBonds::Uniform => {
                let cap = |k: usize| if k >= 30 { usize::MAX } else { 1usize << k };
                let bonds: Vec<usize> =
                    (0..=n_sites).map(|j| if j == 0 { 1 } else { chi.min(cap(n_sites - j)) }).collect();
                Mps::random_with_bonds(&bonds, rng)
            }
        }
    }
}

/// Timing rounds per benchmark point; each point keeps its fastest round.
pub const BENCH_ROUNDS: usize = 5;

/// Mean single-thread time of `sample_string` over one batch lasting at
/// least `min_seconds` (at most `max_samples` draws).
fn time_batch(mps: &Mps, rng: &mut ChaCha8Rng, min_seconds: f64, max_samples: usize) -> Result<(f64, usize)> {
    let start = Instant::now();
    let mut count = 0usize;
    while count < max_samples.max(1) {
        sample_string(mps, rng)?;
        count += 1;
        if start.elapsed().as_secs_f64() >= min_seconds {
            break;
        }
    }
    Ok((start.elapsed().as_secs_f64() / count as f64, count))
}

/// Fastest per-sample time over `BENCH_ROUNDS` batches on a random MPS,
/// spending about `min_seconds` in total, and the number of timed draws.
pub fn time_per_sample(
    n_sites: usize,
    chi: usize,
    bonds: BenchBonds,
    min_seconds: f64,
    max_samples: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mps = bonds.state(n_sites, chi, &mut rng)?;
    sample_string(&mps, &mut rng)?;
    let (mut best, mut total) = (f64::INFINITY, 0);
    for _ in 0..BENCH_ROUNDS {
        let (t, c) = time_batch(&mps, &mut rng, min_seconds / BENCH_ROUNDS as f64, max_samples)?;
        best = best.min(t);
        total += c;
    }
    Ok((best, total))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Per-sample times over `chi_grid` at `n_sites` and over `n_grid` at
/// `bench_chi`, for both bond layouts, with fitted scaling exponents. All
/// points are timed round-robin so that load fluctuations hit them alike.
pub fn cmd_bench(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    struct Point {
        sweep: &'static str,
        bonds: BenchBonds,
        n_sites: usize,
        chi: usize,
        mps: Mps,
        rng: ChaCha8Rng,
        best: f64,
        samples: usize,
    }
    let mut points = Vec::new();
    for bonds in [BenchBonds::Uniform, BenchBonds::Minimal] {
        let sweeps = config
            .chi_grid
            .iter()
            .map(|&chi| ("chi", config.n_sites, chi))
            .chain(config.n_grid.iter().map(|&n| ("n", n, config.bench_chi)));
        for (sweep, n_sites, chi) in sweeps {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mps = bonds.state(n_sites, chi, &mut rng)?;
            sample_string(&mps, &mut rng)?;
            points.push(Point { sweep, bonds, n_sites, chi, mps, rng, best: f64::INFINITY, samples: 0 });
        }
    }
    let batch_seconds = config.bench_min_seconds / BENCH_ROUNDS as f64;
    for _ in 0..BENCH_ROUNDS {
        for p in &mut points {
            let (t, c) = time_batch(&p.mps, &mut p.rng, batch_seconds, config.n_samples)?;
            p.best = p.best.min(t);
            p.samples += c;
        }
    }

    let mut report =
        Report::new(Command::Bench, config, &["sweep", "bonds", "n_sites", "chi", "samples", "seconds_per_sample"]);
    for p in &points {
        report.push(vec![
            p.sweep.into(),
            p.bonds.label().into(),
            p.n_sites.into(),
            p.chi.into(),
            p.samples.into(),
            p.best.into(),
        ]);
    }
    let slope = |sweep: &str, bonds: BenchBonds| {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| p.sweep == sweep && p.bonds == bonds)
            .map(|p| (if sweep == "chi" { p.chi } else { p.n_sites } as f64, p.best))
            .collect();
        if pts.len() >= 2 { log_log_slope(&pts) } else { f64::NAN }
    };
    report.summary.insert("chi_exponent".into(), json!(slope("chi", BenchBonds::Uniform)));
    report.summary.insert("n_exponent".into(), json!(slope("n", BenchBonds::Uniform)));
    report.summary.insert("chi_exponent_minimal".into(), json!(slope("chi", BenchBonds::Minimal)));
    report.summary.insert("n_exponent_minimal".into(), json!(slope("n", BenchBonds::Minimal)));
    report.summary.insert("rounds".into(), json!(BENCH_ROUNDS));
    Ok(report)
}

/// Runs the command in `config.experiment`; `sample` yields no report.
pub fn run(config: &RunConfig) -> Result<Option<Report>> {
    let command = config
        .experiment
        .ok_or_else(|| Error::Contract("no experiment selected".into()))?;
    Ok(Some(match command {
        Command::Sample => return Ok(None),
        Command::Estimate => cmd_estimate(config)?,
        Command::TstateBench => cmd_tstate_bench(config)?,
        Command::ProductBench => cmd_product_bench(config)?,
        Command::GroundState => cmd_ground_state(config)?,
        Command::Quench => cmd_quench(config)?,
        Command::Bench => cmd_bench(config)?,
    }))
}
