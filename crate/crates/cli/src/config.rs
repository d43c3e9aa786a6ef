//! Run configuration.
//!
//! A config is a JSON object with up to four sections: `model` (parameter
//! overrides), `sweep` (grid axes), `run` (solver and output options) and
//! `notes` (free-form provenance strings, carried into the output metadata).
//! Frequencies and rates may be bare numbers in rad/s or tagged as
//! `{"value": 2.5, "unit": "eV"}`. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spaser::units::ev_to_angular;
use spaser::ModelParams;

use crate::presets::Preset;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Missing { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Syntax { path: PathBuf, source: serde_json::Error },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "rad/s")]
    RadPerSecond,
    #[serde(rename = "s^-1", alias = "1/s")]
    PerSecond,
    #[serde(rename = "eV")]
    ElectronVolt,
    #[serde(rename = "meV")]
    MilliElectronVolt,
    #[serde(rename = "s")]
    Second,
    #[serde(rename = "ps")]
    Picosecond,
    #[serde(rename = "fs")]
    Femtosecond,
}

/// A number with an optional unit tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Option<Unit>,
}

impl Quantity {
    /// Angular frequency or rate in rad/s.
    pub fn rate(&self, path: &str) -> Result<f64, ConfigError> {
        let v = self.value;
        match self.unit {
            None | Some(Unit::RadPerSecond) | Some(Unit::PerSecond) => Ok(v),
            Some(Unit::ElectronVolt) => Ok(ev_to_angular(v)),
            Some(Unit::MilliElectronVolt) => Ok(ev_to_angular(1e-3 * v)),
            Some(u) => Err(schema(path, format!("unit {u:?} is a time, expected a frequency or energy"))),
        }
    }

    /// Duration in seconds.
    pub fn time(&self, path: &str) -> Result<f64, ConfigError> {
        let v = self.value;
        match self.unit {
            None | Some(Unit::Second) => Ok(v),
            Some(Unit::Picosecond) => Ok(1e-12 * v),
            Some(Unit::Femtosecond) => Ok(1e-15 * v),
            Some(u) => Err(schema(path, format!("unit {u:?} is not a time"))),
        }
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct QVisitor;
        impl<'de> Visitor<'de> for QVisitor {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or {\"value\": number, \"unit\": string}")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
                Ok(Quantity { value: v, unit: None })
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
                Ok(Quantity { value: v as f64, unit: None })
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
                Ok(Quantity { value: v as f64, unit: None })
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Quantity, A::Error> {
                let (mut value, mut unit) = (None, None);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "value" => value = Some(map.next_value::<f64>()?),
                        "unit" => unit = Some(map.next_value::<Unit>()?),
                        other => return Err(de::Error::unknown_field(other, &["value", "unit"])),
                    }
                }
                let value = value.ok_or_else(|| de::Error::missing_field("value"))?;
                Ok(Quantity { value, unit })
            }
        }
        d.deserialize_any(QVisitor)
    }
}

/// Reference frequency of the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameMode {
    /// Closed-form spasing frequency of each grid point.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum RawFrameChoice {
    Auto(AutoKeyword),
    Fixed(Quantity),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGain {
    gamma21: Option<Quantity>,
    gamma31: Option<Quantity>,
    gamma32: Option<Quantity>,
    gamma_ph: Option<Quantity>,
    pump_g: Option<Quantity>,
    omega21: Option<Quantity>,
    omega32: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlasmon {
    omega_n: Option<Quantity>,
    gamma_n: Option<Quantity>,
    n_p: Option<f64>,
    omega_b_single: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    omega_a_rabi: Option<Quantity>,
    delta_a: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    nu_ref: Option<RawFrameChoice>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(default)]
    gain: RawGain,
    #[serde(default)]
    plasmon: RawPlasmon,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    frame: RawFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    path: String,
    unit: Option<Unit>,
    min: Option<f64>,
    max: Option<f64>,
    count: Option<usize>,
    #[serde(default)]
    scale: Scale,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Initial state of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    /// All chromophores in |1⟩, pump switched on at t = 0.
    #[default]
    Ground,
    /// Non-spasing steady state of the gain medium.
    Background,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    target_ratio: Option<f64>,
    drive: Option<Quantity>,
    bracket: Option<[Quantity; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    tol: Option<f64>,
    seed_amplitude: Option<f64>,
    t_end: Option<Quantity>,
    record_interval: Option<Quantity>,
    initial: Option<Initial>,
    g_bracket: Option<[Quantity; 2]>,
    #[serde(default)]
    calibration: RawCalibration,
    format: Option<Format>,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    sweep: Vec<RawAxis>,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    notes: BTreeMap<String, String>,
}

/// Parameters that a sweep axis may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamPath {
    #[serde(rename = "gain.gamma21")]
    Gamma21,
    #[serde(rename = "gain.gamma31")]
    Gamma31,
    #[serde(rename = "gain.gamma32")]
    Gamma32,
    #[serde(rename = "gain.gamma_ph")]
    GammaPh,
    #[serde(rename = "gain.pump_g")]
    Pump,
    #[serde(rename = "gain.omega21")]
    Omega21,
    #[serde(rename = "gain.omega32")]
    Omega32,
    #[serde(rename = "plasmon.omega_n")]
    OmegaN,
    #[serde(rename = "plasmon.gamma_n")]
    GammaN,
    #[serde(rename = "plasmon.n_p")]
    ChromophoreCount,
    #[serde(rename = "plasmon.omega_b_single")]
    Coupling,
    #[serde(rename = "drive.omega_a_rabi")]
    Drive,
    #[serde(rename = "drive.delta_a")]
    DriveDetuning,
}

impl ParamPath {
    pub const ALL: [ParamPath; 13] = [
        ParamPath::Gamma21,
        ParamPath::Gamma31,
        ParamPath::Gamma32,
        ParamPath::GammaPh,
        ParamPath::Pump,
        ParamPath::Omega21,
        ParamPath::Omega32,
        ParamPath::OmegaN,
        ParamPath::GammaN,
        ParamPath::ChromophoreCount,
        ParamPath::Coupling,
        ParamPath::Drive,
        ParamPath::DriveDetuning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamPath::Gamma21 => "gain.gamma21",
            ParamPath::Gamma31 => "gain.gamma31",
            ParamPath::Gamma32 => "gain.gamma32",
            ParamPath::GammaPh => "gain.gamma_ph",
            ParamPath::Pump => "gain.pump_g",
            ParamPath::Omega21 => "gain.omega21",
            ParamPath::Omega32 => "gain.omega32",
            ParamPath::OmegaN => "plasmon.omega_n",
            ParamPath::GammaN => "plasmon.gamma_n",
            ParamPath::ChromophoreCount => "plasmon.n_p",
            ParamPath::Coupling => "plasmon.omega_b_single",
            ParamPath::Drive => "drive.omega_a_rabi",
            ParamPath::DriveDetuning => "drive.delta_a",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn unit(self) -> &'static str {
        match self {
            ParamPath::ChromophoreCount => "",
            ParamPath::Gamma21
            | ParamPath::Gamma31
            | ParamPath::Gamma32
            | ParamPath::GammaPh
            | ParamPath::Pump
            | ParamPath::GammaN => "s^-1",
            _ => "rad/s",
        }
    }

    pub fn get(self, p: &ModelParams) -> f64 {
        match self {
            ParamPath::Gamma21 => p.gain.gamma21,
            ParamPath::Gamma31 => p.gain.gamma31,
            ParamPath::Gamma32 => p.gain.gamma32,
            ParamPath::GammaPh => p.gain.gamma_ph,
            ParamPath::Pump => p.gain.pump_g,
            ParamPath::Omega21 => p.gain.omega21,
            ParamPath::Omega32 => p.gain.omega32,
            ParamPath::OmegaN => p.plasmon.omega_n,
            ParamPath::GammaN => p.plasmon.gamma_n,
            ParamPath::ChromophoreCount => p.plasmon.n_p,
            ParamPath::Coupling => p.plasmon.omega_b_single,
            ParamPath::Drive => p.drive.omega_a_rabi,
            ParamPath::DriveDetuning => p.drive.delta_a,
        }
    }

    pub fn set(self, p: &mut ModelParams, v: f64) {
        let slot = match self {
            ParamPath::Gamma21 => &mut p.gain.gamma21,
            ParamPath::Gamma31 => &mut p.gain.gamma31,
            ParamPath::Gamma32 => &mut p.gain.gamma32,
            ParamPath::GammaPh => &mut p.gain.gamma_ph,
            ParamPath::Pump => &mut p.gain.pump_g,
            ParamPath::Omega21 => &mut p.gain.omega21,
            ParamPath::Omega32 => &mut p.gain.omega32,
            ParamPath::OmegaN => &mut p.plasmon.omega_n,
            ParamPath::GammaN => &mut p.plasmon.gamma_n,
            ParamPath::ChromophoreCount => &mut p.plasmon.n_p,
            ParamPath::Coupling => &mut p.plasmon.omega_b_single,
            ParamPath::Drive => &mut p.drive.omega_a_rabi,
            ParamPath::DriveDetuning => &mut p.drive.delta_a,
        };
        *slot = v;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub path: ParamPath,
    /// Grid values in rad/s (or bare, for the chromophore count).
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub target_ratio: f64,
    pub drive: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    /// Relative tolerance of the time integrator. Steady-state and
    /// relaxation tolerances are derived from it.
    pub tol: f64,
    pub seed_amplitude: f64,
    pub t_end: f64,
    pub record_interval: f64,
    pub initial: Initial,
    pub g_bracket: Option<(f64, f64)>,
    pub calibration: Calibration,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub workers: Option<usize>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelParams,
    pub frame: FrameMode,
    pub sweep: Vec<Axis>,
    pub run: RunOptions,
    pub notes: BTreeMap<String, String>,
}

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_SEED_AMPLITUDE: f64 = 1e-3;
pub const DEFAULT_T_END: f64 = 3e-12;
pub const MAX_AXES: usize = 3;

impl RunConfig {
    /// Parameters at one grid point, with the frame resolved.
    pub fn params_at(&self, point: &[f64]) -> ModelParams {
        let mut p = self.model;
        for (axis, &v) in self.sweep.iter().zip(point) {
            axis.path.set(&mut p, v);
        }
        match self.frame {
            FrameMode::Auto => p.with_spasing_frame(),
            FrameMode::Fixed(nu) => p.in_frame(nu),
        }
    }

    /// Grid points in lexicographic order, first axis slowest.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.sweep {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        points
    }
}

/// Reads a config file, layering it over an optional preset and under the
/// command-line `overrides` (a config fragment, `null` for none).
pub fn parse_config(path: &Path, preset: Option<Preset>, overrides: Value) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Missing { path: path.into(), source })?;
    let file: Value = serde_json::from_str(&text).map_err(|source| ConfigError::Syntax { path: path.into(), source })?;
    parse_layers(file, preset, overrides)
}

/// As [`parse_config`], from an already parsed JSON document and no overrides.
pub fn parse_value(file: Value, preset: Option<Preset>) -> Result<RunConfig, ConfigError> {
    parse_layers(file, preset, Value::Null)
}

fn parse_layers(file: Value, preset: Option<Preset>, overrides: Value) -> Result<RunConfig, ConfigError> {
    if !file.is_object() {
        return Err(schema(".", "top level must be an object"));
    }
    let mut merged = preset.map(Preset::overlay).unwrap_or_else(|| Value::Object(Default::default()));
    merge(&mut merged, file);
    if !overrides.is_null() {
        merge(&mut merged, overrides);
    }
    let raw: RawConfig = serde_path_to_error::deserialize(merged).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    resolve(raw)
}

/// Deep merge of JSON objects; everything else in `top` replaces `base`.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, top) => *slot = top,
    }
}

fn rate(q: &Option<Quantity>, path: &str, slot: &mut f64) -> Result<(), ConfigError> {
    if let Some(q) = q {
        *slot = q.rate(path)?;
    }
    Ok(())
}

fn resolve(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let mut p = ModelParams::default();
    let (g, pl, d) = (&raw.model.gain, &raw.model.plasmon, &raw.model.drive);
    rate(&g.gamma21, "model.gain.gamma21", &mut p.gain.gamma21)?;
    rate(&g.gamma31, "model.gain.gamma31", &mut p.gain.gamma31)?;
    rate(&g.gamma32, "model.gain.gamma32", &mut p.gain.gamma32)?;
    rate(&g.gamma_ph, "model.gain.gamma_ph", &mut p.gain.gamma_ph)?;
    rate(&g.pump_g, "model.gain.pump_g", &mut p.gain.pump_g)?;
    rate(&g.omega21, "model.gain.omega21", &mut p.gain.omega21)?;
    rate(&g.omega32, "model.gain.omega32", &mut p.gain.omega32)?;
    rate(&pl.omega_n, "model.plasmon.omega_n", &mut p.plasmon.omega_n)?;
    rate(&pl.gamma_n, "model.plasmon.gamma_n", &mut p.plasmon.gamma_n)?;
    rate(&pl.omega_b_single, "model.plasmon.omega_b_single", &mut p.plasmon.omega_b_single)?;
    if let Some(n) = pl.n_p {
        p.plasmon.n_p = n;
    }
    rate(&d.omega_a_rabi, "model.drive.omega_a_rabi", &mut p.drive.omega_a_rabi)?;
    rate(&d.delta_a, "model.drive.delta_a", &mut p.drive.delta_a)?;
    let frame = match raw.model.frame.nu_ref {
        None | Some(RawFrameChoice::Auto(_)) => FrameMode::Auto,
        Some(RawFrameChoice::Fixed(q)) => FrameMode::Fixed(q.rate("model.frame.nu_ref")?),
    };
    p = match frame {
        FrameMode::Auto => p.with_spasing_frame(),
        FrameMode::Fixed(nu) => p.in_frame(nu),
    };
    p.validate().map_err(|spaser::ParamError::Invalid { path, value, rule }| {
        schema(format!("model.{path}"), format!("{path} = {value:e} {rule}"))
    })?;

    if raw.sweep.len() > MAX_AXES {
        return Err(schema("sweep", format!("at most {MAX_AXES} axes, got {}", raw.sweep.len())));
    }
    let sweep = raw
        .sweep
        .iter()
        .enumerate()
        .map(|(i, a)| resolve_axis(a, &format!("sweep[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, a) in sweep.iter().enumerate() {
        if sweep[..i].iter().any(|b| b.path == a.path) {
            return Err(schema(format!("sweep[{i}].path"), format!("{} swept twice", a.path.name())));
        }
        for &v in &a.values {
            let mut q = p;
            a.path.set(&mut q, v);
            q.validate().map_err(|spaser::ParamError::Invalid { path, value, rule }| {
                schema(format!("sweep[{i}].values"), format!("{path} = {value:e} {rule}"))
            })?;
        }
    }

    let r = &raw.run;
    let tol = r.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(schema("run.tol", "must be in (0, 1)"));
    }
    let seed_amplitude = r.seed_amplitude.unwrap_or(DEFAULT_SEED_AMPLITUDE);
    if !(seed_amplitude > 0.0 && seed_amplitude.is_finite()) {
        return Err(schema("run.seed_amplitude", "must be > 0"));
    }
    let t_end = match &r.t_end {
        Some(q) => q.time("run.t_end")?,
        None => DEFAULT_T_END,
    };
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(schema("run.t_end", "must be > 0"));
    }
    let record_interval = match &r.record_interval {
        Some(q) => q.time("run.record_interval")?,
        None => t_end / 1000.0,
    };
    if !(record_interval >= 0.0) {
        return Err(schema("run.record_interval", "must be >= 0"));
    }
    let g_bracket = match &r.g_bracket {
        Some([lo, hi]) => Some(ordered_pair(lo.rate("run.g_bracket[0]")?, hi.rate("run.g_bracket[1]")?, "run.g_bracket")?),
        None => None,
    };
    let c = &r.calibration;
    let calibration = Calibration {
        target_ratio: c.target_ratio.unwrap_or(2.0),
        drive: match &c.drive {
            Some(q) => q.rate("run.calibration.drive")?,
            None => spaser::params::DEFAULT_DRIVE,
        },
        bracket: match &c.bracket {
            Some([lo, hi]) => ordered_pair(
                lo.rate("run.calibration.bracket[0]")?,
                hi.rate("run.calibration.bracket[1]")?,
                "run.calibration.bracket",
            )?,
            None => (1e11, 1e15),
        },
    };
    if !(calibration.target_ratio > 0.0) {
        return Err(schema("run.calibration.target_ratio", "must be > 0"));
    }
    if r.workers == Some(0) {
        return Err(schema("run.workers", "must be >= 1"));
    }

    Ok(RunConfig {
        model: p,
        frame,
        sweep,
        run: RunOptions {
            tol,
            seed_amplitude,
            t_end,
            record_interval,
            initial: r.initial.unwrap_or_default(),
            g_bracket,
            calibration,
            format: r.format.unwrap_or_default(),
            out: r.out.clone(),
            workers: r.workers,
        },
        notes: raw.notes,
    })
}

fn ordered_pair(lo: f64, hi: f64, path: &str) -> Result<(f64, f64), ConfigError> {
    if lo > 0.0 && lo < hi && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(schema(path, format!("need 0 < lo < hi, got [{lo:e}, {hi:e}]")))
    }
}

fn resolve_axis(a: &RawAxis, at: &str) -> Result<Axis, ConfigError> {
    let path = ParamPath::parse(&a.path).ok_or_else(|| {
        let known: Vec<_> = ParamPath::ALL.iter().map(|p| p.name()).collect();
        schema(format!("{at}.path"), format!("unknown parameter \"{}\"; expected one of {}", a.path, known.join(", ")))
    })?;
    let convert = |v: f64, key: &str| -> Result<f64, ConfigError> {
        let q = Quantity { value: v, unit: a.unit };
        if path == ParamPath::ChromophoreCount {
            return match a.unit {
                None => Ok(v),
                Some(_) => Err(schema(format!("{at}.unit"), "plasmon.n_p is dimensionless")),
            };
        }
        q.rate(&format!("{at}.{key}"))
    };
    let values = match (&a.values, a.min, a.max, a.count) {
        (Some(vs), None, None, None) => {
            if vs.is_empty() {
                return Err(schema(format!("{at}.values"), "must not be empty"));
            }
            vs.iter().map(|&v| convert(v, "values")).collect::<Result<Vec<_>, _>>()?
        }
        (None, Some(min), Some(max), Some(count)) => {
            if count < 1 {
                return Err(schema(format!("{at}.count"), "must be >= 1"));
            }
            if !(min <= max) {
                return Err(schema(format!("{at}.min"), format!("min {min:e} exceeds max {max:e}")));
            }
            if a.scale == Scale::Log && !(min > 0.0) {
                return Err(schema(format!("{at}.min"), "log scale needs min > 0"));
            }
            let (lo, hi) = (convert(min, "min")?, convert(max, "max")?);
            grid_values(lo, hi, count, a.scale)
        }
        _ => return Err(schema(at, "give either \"values\" or all of \"min\", \"max\", \"count\"")),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(schema(at, "values must be finite"));
    }
    Ok(Axis { path, values })
}

fn grid_values(lo: f64, hi: f64, count: usize, scale: Scale) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == 0 {
                return lo;
            }
            if i == count - 1 {
                return hi;
            }
            let t = i as f64 / last;
            match scale {
                Scale::Linear => lo + (hi - lo) * t,
                Scale::Log => (lo.ln() + (hi.ln() - lo.ln()) * t).exp(),
            }
        })
        .collect()
}
