//! Scenario descriptions: flat `key=value` config files and built-in presets.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::dynamics::{AmplitudeSet, SystemParams, C64};
use crate::measurement::{MeasurementStrengths, Normalization};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, got `{text}`")]
    Malformed { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },

    #[error("`{key}`: cannot parse `{value}` as {expected}")]
    InvalidValue {
        key: String,
        value: String,
        expected: &'static str,
    },

    #[error("`{key}` = {value} is out of range: requires {bound}")]
    OutOfRange {
        key: String,
        value: f64,
        bound: &'static str,
    },

    #[error("missing required key `{0}`")]
    Missing(&'static str),

    #[error("{0}")]
    Inconsistent(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// Parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKey {
    P,
    PR,
    Theta,
    Delta,
    Kappa,
}

impl SweepKey {
    pub fn name(self) -> &'static str {
        match self {
            SweepKey::P => "p",
            SweepKey::PR => "p_r",
            SweepKey::Theta => "theta",
            SweepKey::Delta => "delta",
            SweepKey::Kappa => "kappa",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "p" => SweepKey::P,
            "p_r" => SweepKey::PR,
            "theta" => SweepKey::Theta,
            "delta" => SweepKey::Delta,
            "kappa" => SweepKey::Kappa,
            _ => return None,
        })
    }
}

impl fmt::Display for SweepKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: SweepKey,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Bell,
    Product,
    Custom { c2a: C64, c1b: C64 },
}

impl InitialState {
    pub fn amplitudes(&self) -> AmplitudeSet {
        match *self {
            InitialState::Bell => AmplitudeSet::bell(),
            InitialState::Product => AmplitudeSet::product(),
            InitialState::Custom { c2a, c1b } => AmplitudeSet::initial(c2a, c1b),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            InitialState::Bell => "bell",
            InitialState::Product => "product",
            InitialState::Custom { .. } => "custom",
        }
    }
}

/// One sweep-point's fully resolved inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub params: SystemParams,
    pub strengths: MeasurementStrengths,
    pub initial: AmplitudeSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub gamma0: f64,
    pub kappa: f64,
    pub theta: f64,
    pub delta: f64,
    pub p: f64,
    pub p_r: f64,
    pub initial: InitialState,
    pub t_max: f64,
    pub steps: usize,
    pub sweeps: Vec<SweepAxis>,
    /// Evaluation time of a grid run; `None` means a time series.
    pub eval_time: Option<f64>,
    pub normalization: Normalization,
    pub oracle_check: bool,
    pub output_path: Option<PathBuf>,
}

pub const DEFAULT_STEPS: usize = 1000;

const KEYS: &[&str] = &[
    "gamma0",
    "kappa",
    "theta",
    "delta",
    "p",
    "p_r",
    "initial",
    "c2a_re",
    "c2a_im",
    "c1b_re",
    "c1b_im",
    "t_max",
    "steps",
    "sweep1_key",
    "sweep1_values",
    "sweep2_key",
    "sweep2_values",
    "eval_time",
];

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::InvalidValue {
            key: key.to_owned(),
            value: value.to_owned(),
            expected: "a finite number",
        })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let values = value
        .split(',')
        .map(|v| parse_f64(key, v.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(ConfigError::InvalidValue {
            key: key.to_owned(),
            value: value.to_owned(),
            expected: "a nonempty comma-separated list",
        });
    }
    Ok(values)
}

fn range_err(key: &str, value: f64, bound: &'static str) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_owned(),
        value,
        bound,
    }
}

fn check_value(key: SweepKey, v: f64) -> Result<(), ConfigError> {
    let name = key.name();
    match key {
        SweepKey::Kappa if !(v > 0.0) => Err(range_err(name, v, "kappa > 0")),
        SweepKey::Theta if !(v.abs() <= 1.0) => Err(range_err(name, v, "|theta| <= 1")),
        SweepKey::P if !(0.0..=1.0).contains(&v) => Err(range_err(name, v, "0 <= p <= 1")),
        SweepKey::PR if !(0.0..1.0).contains(&v) => Err(range_err(name, v, "0 <= p_r < 1")),
        _ => Ok(()),
    }
}

/// Parses a flat `key=value` scenario. `#` starts a comment.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut entries: Vec<(&str, &str)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: n + 1,
            text: raw.to_owned(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line: n + 1,
                key: key.to_owned(),
            });
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::DuplicateKey {
                line: n + 1,
                key: key.to_owned(),
            });
        }
        entries.push((key, value));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let num = |key: &str| get(key).map(|v| parse_f64(key, v)).transpose();

    let mut sweeps = Vec::new();
    for (key_name, values_name) in [
        ("sweep1_key", "sweep1_values"),
        ("sweep2_key", "sweep2_values"),
    ] {
        match (get(key_name), get(values_name)) {
            (None, None) => {}
            (Some(k), Some(v)) => {
                let key = SweepKey::parse(k).ok_or_else(|| ConfigError::InvalidValue {
                    key: key_name.to_owned(),
                    value: k.to_owned(),
                    expected: "one of p, p_r, theta, delta, kappa",
                })?;
                let values = parse_list(values_name, v)?;
                for &x in &values {
                    check_value(key, x)?;
                }
                sweeps.push(SweepAxis { key, values });
            }
            _ => {
                return Err(ConfigError::Inconsistent(format!(
                    "`{key_name}` and `{values_name}` must be given together"
                )))
            }
        }
    }
    if sweeps.len() == 1 && get("sweep2_key").is_some() {
        return Err(ConfigError::Inconsistent(
            "`sweep2_key` requires `sweep1_key`".into(),
        ));
    }
    if sweeps.len() == 2 && sweeps[0].key == sweeps[1].key {
        return Err(ConfigError::Inconsistent(format!(
            "both sweep axes use `{}`",
            sweeps[0].key
        )));
    }
    let swept = |k: SweepKey| sweeps.iter().any(|s| s.key == k);

    let gamma0 = num("gamma0")?.unwrap_or(1.0);
    if !(gamma0 > 0.0) {
        return Err(range_err("gamma0", gamma0, "gamma0 > 0"));
    }
    let kappa = match num("kappa")? {
        Some(k) => k,
        None if swept(SweepKey::Kappa) => sweeps
            .iter()
            .find(|s| s.key == SweepKey::Kappa)
            .map(|s| s.values[0])
            .unwrap_or(1.0),
        None => return Err(ConfigError::Missing("kappa")),
    };
    check_value(SweepKey::Kappa, kappa)?;
    let theta = num("theta")?.unwrap_or(1.0);
    check_value(SweepKey::Theta, theta)?;
    let delta = num("delta")?.unwrap_or(0.0);
    let p = num("p")?.unwrap_or(0.0);
    check_value(SweepKey::P, p)?;
    let p_r = num("p_r")?.unwrap_or(0.0);
    check_value(SweepKey::PR, p_r)?;

    let custom_keys = ["c2a_re", "c2a_im", "c1b_re", "c1b_im"];
    let has_custom = custom_keys.iter().any(|k| get(k).is_some());
    let initial = match (get("initial"), has_custom) {
        (Some(_), true) => {
            return Err(ConfigError::Inconsistent(
                "give either `initial` or explicit amplitudes, not both".into(),
            ))
        }
        (Some("bell"), false) => InitialState::Bell,
        (Some("product"), false) => InitialState::Product,
        (Some(other), false) => {
            return Err(ConfigError::InvalidValue {
                key: "initial".into(),
                value: other.to_owned(),
                expected: "`bell` or `product`",
            })
        }
        (None, true) => {
            let c2a = C64::new(num("c2a_re")?.unwrap_or(0.0), num("c2a_im")?.unwrap_or(0.0));
            let c1b = C64::new(num("c1b_re")?.unwrap_or(0.0), num("c1b_im")?.unwrap_or(0.0));
            let norm = c2a.norm_sqr() + c1b.norm_sqr();
            if norm > 1.0 + 1e-12 {
                return Err(range_err("|c2a|^2 + |c1b|^2", norm, "<= 1"));
            }
            InitialState::Custom { c2a, c1b }
        }
        (None, false) => return Err(ConfigError::Missing("initial")),
    };

    let t_max = num("t_max")?.ok_or(ConfigError::Missing("t_max"))?;
    if !(t_max > 0.0) {
        return Err(range_err("t_max", t_max, "t_max > 0"));
    }
    let steps = match get("steps") {
        None => DEFAULT_STEPS,
        Some(v) => v.parse::<usize>().map_err(|_| ConfigError::InvalidValue {
            key: "steps".into(),
            value: v.to_owned(),
            expected: "a nonnegative integer",
        })?,
    };
    if steps < 2 {
        return Err(range_err("steps", steps as f64, "steps >= 2"));
    }
    let eval_time = num("eval_time")?;
    if let Some(t) = eval_time {
        if !(t >= 0.0) {
            return Err(range_err("eval_time", t, "eval_time >= 0"));
        }
        if sweeps.is_empty() {
            return Err(ConfigError::Inconsistent(
                "a grid run (`eval_time`) needs at least one sweep axis".into(),
            ));
        }
    } else if sweeps.len() > 1 {
        return Err(ConfigError::Inconsistent(
            "a time series takes at most one sweep axis; set `eval_time` for a grid".into(),
        ));
    }

    Ok(ScenarioConfig {
        gamma0,
        kappa,
        theta,
        delta,
        p,
        p_r,
        initial,
        t_max,
        steps,
        sweeps,
        eval_time,
        normalization: Normalization::default(),
        oracle_check: false,
        output_path: None,
    })
}

/// Shortest decimal form that round-trips; used in curve labels.
fn label_number(v: f64) -> String {
    format!("{v}")
}

impl ScenarioConfig {
    pub fn is_grid(&self) -> bool {
        self.eval_time.is_some()
    }

    /// Uniform time grid `t_i = t_max * i / (steps - 1)`.
    pub fn time_grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.t_max * i as f64 / last)
            .collect()
    }

    fn resolve(&self, overrides: &[(SweepKey, f64)], label: String) -> crate::Result<Curve> {
        let mut kappa = self.kappa;
        let mut theta = self.theta;
        let mut delta = self.delta;
        let mut p = self.p;
        let mut p_r = self.p_r;
        for &(key, v) in overrides {
            match key {
                SweepKey::Kappa => kappa = v,
                SweepKey::Theta => theta = v,
                SweepKey::Delta => delta = v,
                SweepKey::P => p = v,
                SweepKey::PR => p_r = v,
            }
        }
        Ok(Curve {
            label,
            params: SystemParams::new(self.gamma0, kappa, theta, delta)?,
            strengths: MeasurementStrengths::new(p, p_r)?,
            initial: self.initial.amplitudes(),
        })
    }

    /// Time-series curves: one per value of the (optional) sweep axis.
    pub fn curves(&self) -> crate::Result<Vec<Curve>> {
        let tag = self.initial.tag();
        match self.sweeps.first() {
            None => Ok(vec![self.resolve(&[], tag.to_owned())?]),
            Some(axis) => axis
                .values
                .iter()
                .map(|&v| {
                    let label = format!("{tag}:{}={}", axis.key, label_number(v));
                    self.resolve(&[(axis.key, v)], label)
                })
                .collect(),
        }
    }

    /// Grid cells in row-major order (first axis slowest). All cells share
    /// the initial-state tag as their curve label.
    pub fn grid_cells(&self) -> crate::Result<Vec<Curve>> {
        let tag = self.initial.tag().to_owned();
        let mut cells = Vec::new();
        match self.sweeps.as_slice() {
            [] => cells.push(self.resolve(&[], tag)?),
            [a] => {
                for &x in &a.values {
                    cells.push(self.resolve(&[(a.key, x)], tag.clone())?);
                }
            }
            [a, b] => {
                for &x in &a.values {
                    for &y in &b.values {
                        cells.push(self.resolve(&[(a.key, x), (b.key, y)], tag.clone())?);
                    }
                }
            }
            _ => unreachable!("parser admits at most two sweep axes"),
        }
        Ok(cells)
    }
}

/// Every built-in preset name.
pub const PRESET_NAMES: &[&str] = &[
    "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d",
    "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b", "fig6c", "fig6d", "fig7a", "fig7b",
    "fig7c", "fig7d", "fig8a", "fig8b", "fig8c", "fig8d",
];

/// Points per axis in the measurement-strength grids.
pub const GRID_POINTS: usize = 51;
/// Largest reversal strength on the `p_r` grid.
pub const GRID_MAX_PR: f64 = 0.98;

fn grid_values(max: f64) -> String {
    (0..GRID_POINTS)
        .map(|i| label_number(max * i as f64 / (GRID_POINTS - 1) as f64))
        .collect::<Vec<_>>()
        .join(",")
}

/// Config text(s) for a preset; multi-scenario presets yield several texts.
pub fn preset_text(name: &str) -> Option<Vec<String>> {
    let (fig, panel) = name.strip_prefix("fig")?.split_at_checked(1)?;
    let panel = match panel {
        "a" => 0,
        "b" => 1,
        "c" => 2,
        "d" => 3,
        _ => return None,
    };
    let weak = panel < 2;
    let kappa = if weak { 10.0 } else { 0.1 };
    let reversal_panel = panel % 2 == 1;
    let p_r = if reversal_panel { 0.9 } else { 0.0 };
    let resonant_t_max = if weak { 20.0 } else { 100.0 };

    let texts = match fig {
        "2" => {
            if panel > 1 {
                return None;
            }
            let (key, values) = if panel == 0 {
                ("p", grid_values(1.0))
            } else {
                ("p_r", grid_values(GRID_MAX_PR))
            };
            ["bell", "product"]
                .iter()
                .map(|init| {
                    format!(
                        "# Negativity versus {key} at gamma0 t = 10, strong coupling\n\
                         kappa=0.1\ntheta=1\ndelta=0\np=0\np_r=0\ninitial={init}\n\
                         t_max=10\neval_time=10\nsweep1_key={key}\nsweep1_values={values}\n"
                    )
                })
                .collect()
        }
        "3" | "4" => {
            let init = if fig == "3" { "bell" } else { "product" };
            vec![format!(
                "kappa={kappa}\np=0\np_r={p_r}\ndelta=0\ninitial={init}\n\
                 t_max={resonant_t_max}\nsteps=1000\n\
                 sweep1_key=theta\nsweep1_values=0,0.3,0.7,1\n"
            )]
        }
        "5" | "6" => {
            let (init, theta) = if fig == "5" {
                ("bell", 1.0)
            } else {
                ("product", 0.7)
            };
            let key = if reversal_panel { "p_r" } else { "p" };
            vec![format!(
                "kappa={kappa}\ntheta={theta}\ndelta=0\np=0\np_r=0\ninitial={init}\n\
                 t_max={resonant_t_max}\nsteps=1000\n\
                 sweep1_key={key}\nsweep1_values=0,0.2,0.5,0.9\n"
            )]
        }
        "7" | "8" => {
            let init = if fig == "7" { "bell" } else { "product" };
            let t_max = if weak { 20.0 } else { 200.0 };
            vec![format!(
                "kappa={kappa}\ntheta=0\np=0\np_r={p_r}\ninitial={init}\n\
                 t_max={t_max}\nsteps=1000\n\
                 sweep1_key=delta\nsweep1_values=0,5,10\n"
            )]
        }
        _ => return None,
    };
    Some(texts)
}

pub fn preset(name: &str) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let texts = preset_text(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_owned()))?;
    texts.iter().map(|t| parse_scenario(t)).collect()
}
