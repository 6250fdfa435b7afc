//! `key = value` run configuration with `[section]` headers.
//!
//! Every key belongs to one section but may also be written at top level.
//! Omitted keys take their defaults. Values are in the units named by the key
//! suffix (`_mhz` is an ordinary frequency `Omega / 2pi`, `_pi` a phase in
//! units of pi).

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use tripod_memory::experiments::{Engine, ExperimentConfig, NumericParams, PhysicsParams, TimingParams};
use tripod_memory::{Error as CoreError, MagneticEnvironment};

const MHZ: f64 = 2.0 * PI * 1e6;

/// Configuration error, located at a line and key when possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            line,
            key: key.map(str::to_owned),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config")?;
        if let Some(line) = self.line {
            write!(f, " line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, " key `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

trait ConfigValue: Sized {
    fn from_toml(v: &toml::Value) -> Result<Self, String>;
    fn render(&self) -> Option<String>;
}

impl ConfigValue for f64 {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        match v {
            toml::Value::Float(x) => Ok(*x),
            toml::Value::Integer(i) => Ok(*i as f64),
            other => Err(format!("expected a number, found {}", other.type_str())),
        }
    }

    fn render(&self) -> Option<String> {
        Some(if self.is_nan() { "nan".into() } else { crate::output::format_float(*self) })
    }
}

fn non_negative_int(v: &toml::Value) -> Result<i64, String> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i),
        toml::Value::Integer(i) => Err(format!("expected a non-negative integer, found {i}")),
        other => Err(format!("expected an integer, found {}", other.type_str())),
    }
}

impl ConfigValue for usize {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        non_negative_int(v).and_then(|i| usize::try_from(i).map_err(|e| e.to_string()))
    }

    fn render(&self) -> Option<String> {
        Some(self.to_string())
    }
}

impl ConfigValue for u64 {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        non_negative_int(v).map(|i| i as u64)
    }

    fn render(&self) -> Option<String> {
        Some(self.to_string())
    }
}

impl ConfigValue for bool {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        v.as_bool().ok_or_else(|| format!("expected true or false, found {}", v.type_str()))
    }

    fn render(&self) -> Option<String> {
        Some(self.to_string())
    }
}

impl ConfigValue for String {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        v.as_str()
            .map(str::to_owned)
            .ok_or_else(|| format!("expected a string, found {}", v.type_str()))
    }

    fn render(&self) -> Option<String> {
        Some(toml::Value::String(self.clone()).to_string())
    }
}

impl ConfigValue for Engine {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        let s = String::from_toml(v)?;
        s.parse().map_err(|e| format!("unknown engine \"{s}\": {e}"))
    }

    fn render(&self) -> Option<String> {
        Some(format!("\"{self}\""))
    }
}

impl<T: ConfigValue> ConfigValue for Option<T> {
    fn from_toml(v: &toml::Value) -> Result<Self, String> {
        T::from_toml(v).map(Some)
    }

    fn render(&self) -> Option<String> {
        self.as_ref().and_then(T::render)
    }
}

macro_rules! config_keys {
    ($( [$section:literal] { $( $(#[doc = $doc:literal])* $field:ident : $ty:ty = $default:expr, )* } )*) => {
        /// Every configuration key in its file units, defaults applied.
        #[derive(Debug, Clone, PartialEq)]
        pub struct Values {
            $($( $(#[doc = $doc])* pub $field: $ty, )*)*
        }

        impl Default for Values {
            fn default() -> Self {
                Self { $($( $field: $default, )*)* }
            }
        }

        /// Section names with the keys they hold.
        pub const SECTIONS: &[(&str, &[&str])] = &[$( ($section, &[$(stringify!($field)),*]) ),*];

        impl Values {
            fn set(&mut self, key: &str, v: &toml::Value) -> Result<(), String> {
                match key {
                    $($( stringify!($field) => self.$field = ConfigValue::from_toml(v)?, )*)*
                    _ => return Err("unknown key".into()),
                }
                Ok(())
            }

            /// The values as a config file that parses back to `self`.
            pub fn render(&self) -> Vec<String> {
                let mut out = Vec::new();
                $(
                    out.push(concat!("[", $section, "]").to_owned());
                    $(
                        if let Some(v) = ConfigValue::render(&self.$field) {
                            out.push(format!("{} = {}", stringify!($field), v));
                        }
                    )*
                )*
                out
            }
        }
    };
}

config_keys! {
    ["physics"] {
        /// Larmor frequency, MHz. Mutually exclusive with `b_field_gauss`.
        larmor_mhz: Option<f64> = Some(0.21),
        b_field_gauss: Option<f64> = None,
        g_factor: f64 = 0.5,
        delta_w_pi: f64 = 0.5,
        /// Fixed read phase of uncompensated sweeps.
        delta_r_pi: f64 = 0.2,
        lifetime_us: f64 = 90.0,
        /// Single-channel efficiency `A`; sets the defaults of the two below.
        baseline_efficiency: f64 = 0.05,
        store_efficiency: Option<f64> = None,
        lambda_efficiency: Option<f64> = None,
        probe_fwhm_ns: f64 = 100.0,
        probe_energy: f64 = 1.0,
    }
    ["timing"] {
        tau_ns: f64 = 380.0,
        second_read_ns: f64 = 3400.0,
        sweep_start_us: f64 = 0.38,
        sweep_end_us: f64 = 100.0,
        oracle_tau_min_us: f64 = 0.4,
        oracle_tau_max_us: f64 = 5.0,
    }
    ["numeric"] {
        gn_mhz: f64 = 1000.0,
        gamma_e_mhz: f64 = 5.75,
        length: f64 = 1.0,
        nz: usize = 1,
        dt_ps: f64 = 12.0,
        write_rabi_mhz: f64 = 50.0,
        read_rabi_mhz: f64 = 150.0,
        write_duration_ns: f64 = 4.0,
        write_ramp_ns: f64 = 2.0,
        read_ramp_ns: f64 = 3.0,
        read_duration_ns: f64 = 12.0,
        probe_center_ns: f64 = 0.0,
        closed_system: bool = false,
    }
    ["run"] {
        scenario: Option<String> = None,
        engine: Engine = Engine::Analytic,
        out_dir: Option<String> = None,
        seed: u64 = 20_240_601,
        points: Option<usize> = None,
        oracle_cases: usize = 24,
    }
}

const DURATIONS: &[&str] = &[
    "lifetime_us",
    "probe_fwhm_ns",
    "tau_ns",
    "second_read_ns",
    "sweep_start_us",
    "sweep_end_us",
    "oracle_tau_min_us",
    "oracle_tau_max_us",
    "dt_ps",
    "write_duration_ns",
    "write_ramp_ns",
    "read_ramp_ns",
    "read_duration_ns",
];

/// A parsed, validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub values: Values,
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

impl RunConfig {
    /// Re-validate after changing `values`, e.g. from command-line overrides.
    pub fn from_values(values: Values) -> Result<Self, ConfigError> {
        resolve(values, &Locator::default())
    }

    /// Oracle storage-time range, s.
    pub fn oracle_tau_range(&self) -> (f64, f64) {
        (self.values.oracle_tau_min_us / 1e6, self.values.oracle_tau_max_us / 1e6)
    }
}

fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(s, _)| *s)
}

/// Maps keys to the line they were set on.
#[derive(Default)]
struct Locator {
    lines: Vec<(Option<String>, String, usize)>,
}

impl Locator {
    fn scan(text: &str) -> Self {
        let mut section = None;
        let mut lines = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('[') {
                section = rest.split(']').next().map(|s| s.trim().to_owned());
            } else if let Some((key, _)) = line.split_once('=') {
                let key = key.trim().trim_matches('"').to_owned();
                lines.push((section.clone(), key, k + 1));
            }
        }
        Self { lines }
    }

    fn line(&self, section: Option<&str>, key: &str) -> Option<usize> {
        self.lines
            .iter()
            .find(|(s, k, _)| k == key && s.as_deref() == section)
            .or_else(|| self.lines.iter().find(|(_, k, _)| k == key))
            .map(|(_, _, n)| *n)
    }

    fn section_line(&self, section: &str) -> Option<usize> {
        self.lines
            .iter()
            .find(|(s, _, _)| s.as_deref() == Some(section))
            .map(|(_, _, n)| n.saturating_sub(1).max(1))
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::new(self.line(section_of(key), key), Some(key), message)
    }
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError::new(line, None, e.message().trim().to_owned())
    })?;
    let locator = Locator::scan(text);

    let mut entries = Vec::new();
    for (name, value) in &table {
        match (value, SECTIONS.iter().find(|(s, _)| s == name)) {
            (toml::Value::Table(inner), Some((section, _))) => {
                entries.extend(inner.iter().map(|(k, v)| (Some(*section), k.as_str(), v)));
            }
            (toml::Value::Table(_), None) => {
                return Err(ConfigError::new(
                    locator.section_line(name),
                    Some(name),
                    "unknown section (expected physics, timing, numeric or run)",
                ));
            }
            _ => entries.push((None, name.as_str(), value)),
        }
    }

    let mut values = Values::default();
    let mut given = BTreeSet::new();
    for (section, key, value) in entries {
        let line = locator.line(section, key);
        let home = section_of(key);
        match (home, section) {
            (None, _) => return Err(ConfigError::new(line, Some(key), "unknown key")),
            (Some(h), Some(s)) if h != s => {
                return Err(ConfigError::new(line, Some(key), format!("unknown key in [{s}] (it belongs in [{h}])")));
            }
            _ => {}
        }
        if !given.insert(key) {
            return Err(ConfigError::new(line, Some(key), "key given more than once"));
        }
        values.set(key, value).map_err(|m| ConfigError::new(line, Some(key), m))?;
    }

    if given.contains("b_field_gauss") {
        if given.contains("larmor_mhz") {
            return Err(locator.error("b_field_gauss", "give either larmor_mhz or b_field_gauss, not both"));
        }
        values.larmor_mhz = None;
    }
    resolve(values, &locator)
}

fn resolve(mut values: Values, locator: &Locator) -> Result<RunConfig, ConfigError> {
    let v = &mut values;
    v.store_efficiency.get_or_insert(2.0 * v.baseline_efficiency);
    v.lambda_efficiency.get_or_insert(v.baseline_efficiency);
    let v = &values;

    let durations = [
        v.lifetime_us,
        v.probe_fwhm_ns,
        v.tau_ns,
        v.second_read_ns,
        v.sweep_start_us,
        v.sweep_end_us,
        v.oracle_tau_min_us,
        v.oracle_tau_max_us,
        v.dt_ps,
        v.write_duration_ns,
        v.write_ramp_ns,
        v.read_ramp_ns,
        v.read_duration_ns,
    ];
    for (key, d) in DURATIONS.iter().zip(durations) {
        if !(d >= 0.0) {
            return Err(locator.error(key, format!("durations must be >= 0, got {d}")));
        }
    }
    for (key, x) in [("b_field_gauss", v.b_field_gauss), ("larmor_mhz", v.larmor_mhz)] {
        if x.is_some_and(|x| !(x >= 0.0)) {
            return Err(locator.error(key, format!("must be >= 0, got {}", x.unwrap_or_default())));
        }
    }

    let core = |e: CoreError| match &e {
        CoreError::InvalidParameter { name, .. } => {
            let key = key_for(name).unwrap_or(name);
            locator.error(key, e.to_string())
        }
        _ => ConfigError::new(None, None, e.to_string()),
    };

    let env = match (v.larmor_mhz, v.b_field_gauss) {
        (_, Some(b)) => MagneticEnvironment::new(b, v.g_factor),
        (Some(l), None) => MagneticEnvironment::from_larmor(l * MHZ, v.g_factor),
        (None, None) => MagneticEnvironment::from_larmor(0.21 * MHZ, v.g_factor),
    }
    .map_err(core)?;

    let experiment = ExperimentConfig {
        physics: PhysicsParams {
            env,
            delta_w: v.delta_w_pi * PI,
            delta_r: v.delta_r_pi * PI,
            lifetime: v.lifetime_us / 1e6,
            store_efficiency: v.store_efficiency.unwrap_or_default(),
            lambda_efficiency: v.lambda_efficiency.unwrap_or_default(),
            probe_fwhm: v.probe_fwhm_ns / 1e9,
            probe_energy: v.probe_energy,
        },
        timing: TimingParams {
            tau: v.tau_ns / 1e9,
            second_read: v.second_read_ns / 1e9,
            sweep_start: v.sweep_start_us / 1e6,
            sweep_end: v.sweep_end_us / 1e6,
        },
        numeric: NumericParams {
            gn: v.gn_mhz * MHZ,
            gamma_e: v.gamma_e_mhz * MHZ,
            length: v.length,
            nz: v.nz,
            dt: v.dt_ps / 1e12,
            write_rabi: v.write_rabi_mhz * MHZ,
            read_rabi: v.read_rabi_mhz * MHZ,
            write_duration: v.write_duration_ns / 1e9,
            write_ramp: v.write_ramp_ns / 1e9,
            read_ramp: v.read_ramp_ns / 1e9,
            read_duration: v.read_duration_ns / 1e9,
            probe_center: v.probe_center_ns / 1e9,
            closed_system: v.closed_system,
        },
    };
    experiment.validate().map_err(core)?;

    let probe_end = experiment.probe().map_err(core)?.end();
    for (key, t) in [
        ("tau_ns", experiment.timing.tau),
        ("sweep_start_us", experiment.timing.sweep_start),
        ("oracle_tau_min_us", v.oracle_tau_min_us / 1e6),
    ] {
        if !(t > probe_end) {
            return Err(locator.error(
                key,
                format!("reads must start after the probe has passed ({} ns)", probe_end * 1e9),
            ));
        }
    }
    if !(v.oracle_tau_max_us > v.oracle_tau_min_us) {
        return Err(locator.error("oracle_tau_max_us", "must exceed oracle_tau_min_us"));
    }

    Ok(RunConfig {
        experiment,
        values: values.clone(),
    })
}

/// Config key for a core parameter name (`tau` -> `tau_ns`).
fn key_for(name: &str) -> Option<&'static str> {
    let special = match name {
        "larmor" => Some("larmor_mhz"),
        "b_field" => Some("b_field_gauss"),
        _ => None,
    };
    special.or_else(|| {
        SECTIONS.iter().flat_map(|(_, keys)| keys.iter().copied()).find(|k| {
            *k == name
                || k.strip_prefix(name)
                    .and_then(|rest| rest.strip_prefix('_'))
                    .is_some_and(|unit| matches!(unit, "pi" | "us" | "ns" | "ps" | "mhz" | "gauss"))
        })
    })
}
