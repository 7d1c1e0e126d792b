//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Physical keys carry their
//! unit in the name (`diameter_mm`, `k_tc_n_per_mm2`, ...) and are converted
//! to SI on load. Modes are numbered from 1 per axis:
//! `x_mode1_freq_hz`, `x_mode1_damping`, `x_mode1_stiffness_n_per_um`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chatter_core::cutting_force::{CuttingCoefficients, CuttingConditions, MillingDirection, ToolGeometry};
use chatter_core::nalgebra::Vector2;
use chatter_core::oracle::dde::MIN_SUBSTEPS;
use chatter_core::scenario::FlexibleAxes;
use chatter_core::stability::linspace;
use chatter_core::structural::{ModalAxis, Mode};
use chatter_core::{Error as CoreError, Hold, MillingScenario};

/// The benchmark configuration shipped with the binary.
pub const BENCHMARK: &str = include_str!("../benchmark.cfg");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` already set on line {first}")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("missing required key `{0}`")]
    Missing(String),
    /// A value that parsed but violates a constraint; `line` is 0 for command-line overrides.
    #[error("{}{key}: {constraint}", if *line > 0 { format!("line {line}: ") } else { String::new() })]
    Invalid { line: usize, key: String, constraint: String },
}

impl ConfigError {
    /// The offending key, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Syntax { .. } => None,
            ConfigError::UnknownKey { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::Invalid { key, .. } => Some(key),
            ConfigError::Missing(key) => Some(key),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", path.display())]
    Config { path: PathBuf, source: ConfigError },
}

/// An evenly spaced sweep `min..=max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: MillingScenario,
    pub hold: Hold,
    pub steps: usize,
    /// IMP resolution of the reference eigenvalue for `converge`.
    pub reference_steps: usize,
    pub converge_steps: Vec<usize>,
    /// rev/min.
    pub speeds: Sweep,
    /// m.
    pub depths: Sweep,
    pub margin: f64,
    pub periods: usize,
    pub substeps: usize,
    /// Initial modal displacement for `simulate`, m.
    pub initial_displacement: f64,
    pub out_dir: Option<PathBuf>,
}

const SCALAR_KEYS: &[&str] = &[
    "teeth_count",
    "diameter_mm",
    "direction",
    "immersion_ratio",
    "axial_depth_mm",
    "spindle_speed_rpm",
    "feed_x_mm_per_tooth",
    "feed_y_mm_per_tooth",
    "k_tc_n_per_mm2",
    "k_nc_n_per_mm2",
    "k_te_n_per_mm",
    "k_ne_n_per_mm",
    "flexible_axes",
    "modes_per_axis",
    "hold",
    "steps",
    "reference_steps",
    "converge_steps",
    "speed_min_rpm",
    "speed_max_rpm",
    "speed_count",
    "depth_min_mm",
    "depth_max_mm",
    "depth_count",
    "margin",
    "periods",
    "substeps",
    "initial_displacement_um",
    "out_dir",
];

const MODE_FIELDS: [&str; 3] = ["freq_hz", "damping", "stiffness_n_per_um"];

/// `(axis, index, field)` for keys like `y_mode2_damping`.
fn mode_key(key: &str) -> Option<(usize, usize, usize)> {
    let (axis, rest) = match key.split_at_checked(2)? {
        ("x_", rest) => (0, rest),
        ("y_", rest) => (1, rest),
        _ => return None,
    };
    let rest = rest.strip_prefix("mode")?;
    let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
    let index: usize = rest[..digits].parse().ok()?;
    let field = rest[digits..].strip_prefix('_')?;
    let f = MODE_FIELDS.iter().position(|&m| m == field)?;
    (index >= 1).then_some((axis, index, f))
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("expected `key = value`, got {content:?}"),
                });
            }
            if !SCALAR_KEYS.contains(&key) && mode_key(key).is_none() {
                return Err(ConfigError::UnknownKey { line, key: key.into() });
            }
            if let Some((first, _)) = map.get(key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.into(),
                    first: *first,
                });
            }
            map.insert(key.into(), (line, value.into()));
        }
        Ok(Self { map })
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| ConfigError::Invalid {
                line: *line,
                key: key.into(),
                constraint: format!("cannot parse {v:?} as {}", std::any::type_name::<T>()),
            }),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or_else(|| ConfigError::Missing(key.into()))
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn invalid(&self, key: &str, constraint: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            line: self.line(key),
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}

/// Maps a core validation error onto the configuration key it came from.
fn attribute(entries: &Entries, err: CoreError, keys: &[(&str, &str)]) -> ConfigError {
    match err {
        CoreError::Domain { field, detail } => {
            let key = keys.iter().find(|(f, _)| *f == field).map_or(field, |(_, k)| k);
            entries.invalid(key, detail)
        }
        other => entries.invalid("scenario", other.to_string()),
    }
}

fn parse_axis(entries: &Entries, axis: usize) -> Result<ModalAxis, ConfigError> {
    let prefix = ["x", "y"][axis];
    let mut indices: Vec<usize> = entries
        .map
        .keys()
        .filter_map(|k| mode_key(k))
        .filter(|&(a, _, _)| a == axis)
        .map(|(_, i, _)| i)
        .collect();
    indices.sort_unstable();
    indices.dedup();
    if indices.is_empty() {
        return Err(ConfigError::Missing(format!("{prefix}_mode1_freq_hz")));
    }
    let mut modes = Vec::new();
    for (expected, &index) in (1..).zip(&indices) {
        if index != expected {
            let key = format!("{prefix}_mode{index}_freq_hz");
            return Err(entries.invalid(&key, format!("modes must be numbered 1, 2, ... without gaps; mode {expected} is missing")));
        }
        let key = |f: &str| format!("{prefix}_mode{index}_{f}");
        let freq: f64 = entries.require(&key("freq_hz"))?;
        let damping: f64 = entries.require(&key("damping"))?;
        let stiffness: f64 = entries.require(&key("stiffness_n_per_um"))?;
        let (kf, kd, ks) = (key("freq_hz"), key("damping"), key("stiffness_n_per_um"));
        let mode = Mode::from_hz(freq, damping, stiffness * 1e6).map_err(|e| {
            attribute(
                entries,
                e,
                &[("natural_frequency", &kf), ("damping_ratio", &kd), ("stiffness", &ks)],
            )
        })?;
        modes.push(mode);
    }
    Ok(ModalAxis::new(modes).expect("at least one mode"))
}

fn parse_list(entries: &Entries, key: &str, default: &[usize]) -> Result<Vec<usize>, ConfigError> {
    let Some((_, raw)) = entries.raw(key) else {
        return Ok(default.to_vec());
    };
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| entries.invalid(key, format!("expected comma-separated integers, got {raw:?}")))
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let e = Entries::parse(text)?;

    let direction = match e.require::<String>("direction")?.to_ascii_lowercase().as_str() {
        "up" => MillingDirection::Up,
        "down" => MillingDirection::Down,
        other => return Err(e.invalid("direction", format!("expected up or down, got {other:?}"))),
    };
    let tool = ToolGeometry::new(e.require("teeth_count")?, e.require::<f64>("diameter_mm")? * 1e-3, direction)
        .map_err(|err| attribute(&e, err, &[("teeth_count", "teeth_count"), ("diameter", "diameter_mm")]))?;

    let coefficients = CuttingCoefficients::new(
        e.require::<f64>("k_tc_n_per_mm2")? * 1e6,
        e.require::<f64>("k_nc_n_per_mm2")? * 1e6,
        e.require::<f64>("k_te_n_per_mm")? * 1e3,
        e.require::<f64>("k_ne_n_per_mm")? * 1e3,
    )
    .map_err(|err| {
        attribute(
            &e,
            err,
            &[
                ("tangential_cutting", "k_tc_n_per_mm2"),
                ("normal_cutting", "k_nc_n_per_mm2"),
                ("tangential_edge", "k_te_n_per_mm"),
                ("normal_edge", "k_ne_n_per_mm"),
            ],
        )
    })?;

    let ratio: f64 = e.require("immersion_ratio")?;
    if !(0.0..=1.0).contains(&ratio) {
        return Err(e.invalid("immersion_ratio", format!("must lie in [0, 1], got {ratio}")));
    }
    let conditions = CuttingConditions::new(
        &tool,
        e.require::<f64>("axial_depth_mm")? * 1e-3,
        ratio * tool.diameter,
        e.require("spindle_speed_rpm")?,
        Vector2::new(
            e.require::<f64>("feed_x_mm_per_tooth")? * 1e-3,
            e.or("feed_y_mm_per_tooth", 0.0)? * 1e-3,
        ),
    )
    .map_err(|err| {
        attribute(
            &e,
            err,
            &[
                ("axial_depth", "axial_depth_mm"),
                ("radial_depth", "immersion_ratio"),
                ("spindle_speed", "spindle_speed_rpm"),
                ("feed", "feed_x_mm_per_tooth"),
            ],
        )
    })?;

    let flexible = match e.or("flexible_axes", "both".to_string())?.to_ascii_lowercase().as_str() {
        "both" => FlexibleAxes::Both,
        "x" => FlexibleAxes::X,
        "y" => FlexibleAxes::Y,
        other => return Err(e.invalid("flexible_axes", format!("expected both, x or y, got {other:?}"))),
    };

    let mut scenario = MillingScenario {
        tool,
        coefficients,
        x_axis: parse_axis(&e, 0)?,
        y_axis: parse_axis(&e, 1)?,
        conditions,
        flexible,
    };
    if let Some(n) = e.get::<usize>("modes_per_axis")? {
        scenario = scenario
            .with_modes(n)
            .map_err(|err| e.invalid("modes_per_axis", err.to_string()))?;
    }

    let hold = e
        .or("hold", "imp".to_string())?
        .parse::<Hold>()
        .map_err(|err| e.invalid("hold", err.to_string()))?;

    let config = RunConfig {
        scenario,
        hold,
        steps: e.or("steps", 40)?,
        reference_steps: e.or("reference_steps", 1000)?,
        converge_steps: parse_list(&e, "converge_steps", &[20, 40, 60, 80, 100])?,
        speeds: Sweep {
            min: e.or("speed_min_rpm", 3000.0)?,
            max: e.or("speed_max_rpm", 23000.0)?,
            count: e.or("speed_count", 41)?,
        },
        depths: Sweep {
            min: e.or("depth_min_mm", 0.0)? * 1e-3,
            max: e.or("depth_max_mm", 10.0)? * 1e-3,
            count: e.or("depth_count", 51)?,
        },
        margin: e.or("margin", 1e-6)?,
        periods: e.or("periods", 100)?,
        substeps: e.or("substeps", 1000)?,
        initial_displacement: e.or("initial_displacement_um", 1.0)? * 1e-6,
        out_dir: e.get::<String>("out_dir")?.map(PathBuf::from),
    };
    config.validate().map_err(|(key, constraint)| e.invalid(key, constraint))?;
    Ok(config)
}

impl RunConfig {
    /// Cross-field checks; returns the offending key and constraint.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = |key: &'static str, v: usize| {
            if v == 0 {
                Err((key, "must be at least 1".to_string()))
            } else {
                Ok(())
            }
        };
        positive("steps", self.steps)?;
        positive("reference_steps", self.reference_steps)?;
        positive("speed_count", self.speeds.count)?;
        positive("depth_count", self.depths.count)?;
        positive("periods", self.periods)?;
        if self.converge_steps.is_empty() || self.converge_steps.contains(&0) {
            return Err(("converge_steps", "needs one or more positive step counts".into()));
        }
        if let Some(&m) = self.converge_steps.iter().max() {
            if m > self.reference_steps {
                return Err((
                    "converge_steps",
                    format!("{m} exceeds reference_steps = {}", self.reference_steps),
                ));
            }
        }
        let sp = self.speeds;
        if !(sp.min.is_finite() && sp.min > 0.0 && sp.max >= sp.min && sp.max.is_finite()) {
            return Err(("speed_min_rpm", format!("need 0 < min <= max, got {}..{}", sp.min, sp.max)));
        }
        let dp = self.depths;
        if !(dp.min.is_finite() && dp.min >= 0.0 && dp.max >= dp.min && dp.max.is_finite()) {
            return Err((
                "depth_min_mm",
                format!("need 0 <= min <= max, got {}..{} mm", dp.min * 1e3, dp.max * 1e3),
            ));
        }
        if sp.count > 1 && sp.max == sp.min {
            return Err(("speed_max_rpm", "equals speed_min_rpm with more than one point".into()));
        }
        if dp.count > 1 && dp.max == dp.min {
            return Err(("depth_max_mm", "equals depth_min_mm with more than one point".into()));
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(("margin", format!("must be >= 0, got {}", self.margin)));
        }
        if self.substeps < MIN_SUBSTEPS {
            return Err(("substeps", format!("must be at least {MIN_SUBSTEPS}, got {}", self.substeps)));
        }
        if !self.initial_displacement.is_finite() {
            return Err(("initial_displacement_um", "must be finite".into()));
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|source| LoadError::Config {
        path: path.to_path_buf(),
        source,
    })
}

/// `WxH`: speed points by depth points.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().ok().filter(|&v| v > 0);
    match (parse(w), parse(h)) {
        (Some(w), Some(h)) => Ok((w, h)),
        _ => Err(format!("expected two positive integers in WxH, got {s:?}")),
    }
}

/// `lo:hi` or `lo:hi:unit` where `unit` must equal `unit`.
pub fn parse_range(s: &str, unit: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi] | [lo, hi, _] => {
            if parts.len() == 3 && parts[2] != unit {
                return Err(format!("range unit must be {unit}, got {:?}", parts[2]));
            }
            let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
            Ok((lo, hi))
        }
        _ => Err(format!("expected lo:hi[:{unit}], got {s:?}")),
    }
}
