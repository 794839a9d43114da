//! Runs scenarios through the full pipeline and writes CSV tables.
//!
//! Pipeline per point: weak measurement on the initial amplitudes, closed-form
//! evolution to `t`, density assembly, reversal, then negativity and success
//! probability.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::density::{DensityMatrix9, AC, BC, CA, CC};
use crate::dynamics::{evolve_amplitudes, AmplitudeSet, SystemParams};
use crate::entanglement::negativity;
use crate::error::{Error, Result};
use crate::measurement::{
    apply_reversal, assemble_density, prepare_initial, success_probability, MeasurementStrengths,
    Normalization,
};
use crate::oracle;
use crate::scenario::{preset, Curve, ScenarioConfig};

/// Tolerance on closed form vs oracle amplitudes in `--oracle-check` runs.
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Number of sampled points checked against the oracle per scenario.
pub const ORACLE_SAMPLES: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    params: SystemParams,
    strengths: MeasurementStrengths,
    measured: AmplitudeSet,
}

/// Everything computed at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub t: f64,
    /// Amplitudes after weak measurement and evolution.
    pub amplitudes: AmplitudeSet,
    /// State after the reversal, normalized.
    pub state: DensityMatrix9,
    pub negativity: f64,
    pub success_probability: f64,
}

impl Pipeline {
    pub fn new(
        params: SystemParams,
        strengths: MeasurementStrengths,
        initial: &AmplitudeSet,
        normalization: Normalization,
    ) -> Result<Self> {
        Ok(Self {
            params,
            strengths,
            measured: prepare_initial(initial, strengths.p(), normalization)?,
        })
    }

    pub fn for_curve(curve: &Curve, normalization: Normalization) -> Result<Self> {
        Self::new(curve.params, curve.strengths, &curve.initial, normalization)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// Initial amplitudes after the prior weak measurement.
    pub fn measured_initial(&self) -> &AmplitudeSet {
        &self.measured
    }

    pub fn amplitudes(&self, t: f64) -> AmplitudeSet {
        evolve_amplitudes(&self.measured, &self.params, t)
    }

    pub fn observe(&self, t: f64) -> Result<Observation> {
        let amplitudes = self.amplitudes(t);
        let rho = assemble_density(&amplitudes)?;
        let p_r = self.strengths.p_r();
        let state = apply_reversal(&rho, p_r)?;
        let negativity = negativity(&state)?.value();
        Ok(Observation {
            t,
            amplitudes,
            state,
            negativity,
            success_probability: success_probability(&amplitudes, p_r),
        })
    }

    pub fn negativity(&self, t: f64) -> Result<f64> {
        Ok(self.observe(t)?.negativity)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub curve_id: String,
    pub kappa: f64,
    pub theta: f64,
    pub delta: f64,
    pub p: f64,
    pub p_r: f64,
    pub t: f64,
    pub negativity: f64,
    pub success_prob: f64,
    pub rho11: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho77: f64,
    pub coherence34_abs: f64,
}

pub const CSV_HEADER: [&str; 14] = [
    "curve_id",
    "kappa",
    "theta",
    "delta",
    "p",
    "p_r",
    "t",
    "negativity",
    "success_prob",
    "rho11",
    "rho33",
    "rho44",
    "rho77",
    "coherence34_abs",
];

impl Row {
    fn new(curve: &Curve, obs: &Observation) -> Self {
        let s = &obs.state;
        Self {
            curve_id: curve.label.clone(),
            kappa: curve.params.kappa(),
            theta: curve.params.theta(),
            delta: curve.params.delta(),
            p: curve.strengths.p(),
            p_r: curve.strengths.p_r(),
            t: obs.t,
            negativity: obs.negativity,
            success_prob: obs.success_probability,
            rho11: s.get(CC, CC).re,
            rho33: s.get(CA, CA).re,
            rho44: s.get(BC, BC).re,
            rho77: s.get(AC, AC).re,
            coherence34_abs: s.get(CA, BC).norm(),
        }
    }

    fn numbers(&self) -> [f64; 13] {
        [
            self.kappa,
            self.theta,
            self.delta,
            self.p,
            self.p_r,
            self.t,
            self.negativity,
            self.success_prob,
            self.rho11,
            self.rho33,
            self.rho44,
            self.rho77,
            self.coherence34_abs,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub rows: Vec<Row>,
}

impl Table {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn extend(&mut self, other: Table) {
        self.rows.extend(other.rows);
    }

    /// Rows of one curve, in emission order.
    pub fn curve<'a>(&'a self, curve_id: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.curve_id == curve_id)
    }
}

fn evaluate(points: &[(usize, f64)], curves: &[Curve], pipes: &[Pipeline]) -> Result<Vec<Row>> {
    points
        .par_iter()
        .map(|&(c, t)| {
            pipes[c]
                .observe(t)
                .map(|obs| Row::new(&curves[c], &obs))
                .map_err(|e| e.at_point(&curves[c].label, t))
        })
        .collect()
}

fn pipelines(curves: &[Curve], normalization: Normalization) -> Result<Vec<Pipeline>> {
    curves
        .iter()
        .map(|c| Pipeline::for_curve(c, normalization).map_err(|e| e.at_point(&c.label, 0.0)))
        .collect()
}

/// Spot-checks up to `ORACLE_SAMPLES` evenly spaced points against the oracle.
fn oracle_check(points: &[(usize, f64)], curves: &[Curve], pipes: &[Pipeline]) -> Result<()> {
    if points.is_empty() {
        return Ok(());
    }
    let n = ORACLE_SAMPLES.min(points.len());
    let picks: Vec<(usize, f64)> = (0..n)
        .map(|k| {
            let idx = if n == 1 {
                0
            } else {
                k * (points.len() - 1) / (n - 1)
            };
            points[idx]
        })
        .collect();
    picks.par_iter().try_for_each(|&(c, t)| {
        let pipe = &pipes[c];
        let dt = oracle::DEFAULT_DT.min(oracle::max_step(pipe.params()));
        let report = oracle::compare(pipe.params(), pipe.measured_initial(), &[t], dt)
            .map_err(|e| e.at_point(&curves[c].label, t))?;
        if report.max() > ORACLE_TOLERANCE {
            return Err(Error::OracleMismatch {
                curve: curves[c].label.clone(),
                t,
                deviation: report.max(),
                tolerance: ORACLE_TOLERANCE,
            });
        }
        Ok(())
    })
}

/// One row per (curve, t) on the uniform grid, curve-major.
pub fn run_time_series(cfg: &ScenarioConfig) -> Result<Table> {
    let curves = cfg.curves()?;
    let pipes = pipelines(&curves, cfg.normalization)?;
    let grid = cfg.time_grid();
    let points: Vec<(usize, f64)> = (0..curves.len())
        .flat_map(|c| grid.iter().map(move |&t| (c, t)))
        .collect();
    let rows = evaluate(&points, &curves, &pipes)?;
    if cfg.oracle_check {
        oracle_check(&points, &curves, &pipes)?;
    }
    Ok(Table { rows })
}

/// One row per grid cell, evaluated at `eval_time` (or `t_max` if unset).
pub fn run_grid(cfg: &ScenarioConfig) -> Result<Table> {
    let t = cfg.eval_time.unwrap_or(cfg.t_max);
    let cells = cfg.grid_cells()?;
    let pipes = pipelines(&cells, cfg.normalization)?;
    let points: Vec<(usize, f64)> = (0..cells.len()).map(|c| (c, t)).collect();
    let rows = evaluate(&points, &cells, &pipes)?;
    if cfg.oracle_check {
        oracle_check(&points, &cells, &pipes)?;
    }
    Ok(Table { rows })
}

pub fn run(cfg: &ScenarioConfig) -> Result<Table> {
    if cfg.is_grid() {
        run_grid(cfg)
    } else {
        run_time_series(cfg)
    }
}

/// Runs every scenario of a preset and concatenates the tables.
pub fn run_preset(name: &str, normalization: Normalization, oracle_check: bool) -> Result<Table> {
    let mut table = Table::default();
    for mut cfg in preset(name)? {
        cfg.normalization = normalization;
        cfg.oracle_check = oracle_check;
        table.extend(run(&cfg)?);
    }
    Ok(table)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed).to_owned()
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(table: &Table, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for row in &table.rows {
        write!(out, "{}", row.curve_id)?;
        for v in row.numbers() {
            write!(out, ",{}", format_float(v))?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Writes `table` to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(table: &Table, path: Option<&Path>) -> Result<()> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    match path {
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.to_owned(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            write_csv(table, BufWriter::new(file)).map_err(io_err)
        }
        None => write_csv(table, io::stdout().lock()).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}
