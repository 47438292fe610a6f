//! Scenario configuration: a typed parameter schema per scenario, a
//! line-oriented `key = value` file format and command-line overrides.
//!
//! ```text
//! # vacuum-scaling.cfg
//! sites = 512
//! intervals = 8, 16, 32, 64
//! ```
//!
//! Every key must belong to the scenario's schema; anything else is rejected
//! before a single number is computed.

use std::collections::BTreeMap;
use std::fmt;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    VacuumScaling,
    MassiveSaturation,
    Commutators,
    CgPurity,
    NwConvergence,
    LocalizationFidelity,
    Singlet,
    Bounds,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::VacuumScaling,
        Scenario::MassiveSaturation,
        Scenario::Commutators,
        Scenario::CgPurity,
        Scenario::NwConvergence,
        Scenario::LocalizationFidelity,
        Scenario::Singlet,
        Scenario::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::VacuumScaling => "vacuum-scaling",
            Scenario::MassiveSaturation => "massive-saturation",
            Scenario::Commutators => "commutators",
            Scenario::CgPurity => "cg-purity",
            Scenario::NwConvergence => "nw-convergence",
            Scenario::LocalizationFidelity => "localization-fidelity",
            Scenario::Singlet => "singlet",
            Scenario::Bounds => "bounds",
        }
    }

    /// Accepted keys with their types and default values.
    pub fn schema(self) -> &'static [ParamSpec] {
        use Kind::*;
        const SEED: ParamSpec = ParamSpec::new("seed", Seed, "1", "random seed");
        match self {
            Scenario::VacuumScaling => const { &[
                ParamSpec::new("sites", Int, "512", "lattice sites N"),
                ParamSpec::new("mass", Float, "0", "m a; 0 selects the regulated massless field"),
                ParamSpec::new("zero_mode_regulator", Float, "1e-6", "m_reg a used when mass = 0"),
                ParamSpec::new("intervals", IntList, "8, 16, 32, 64", "interval lengths L"),
                ParamSpec::new("slope_min", Float, "0.3167", "lower edge of the accepted slope"),
                ParamSpec::new("slope_max", Float, "0.35", "upper edge of the accepted slope"),
                ParamSpec::new("rms_max", Float, "0.02", "largest accepted fit residual (nats)"),
                SEED,
            ] },
            Scenario::MassiveSaturation => const { &[
                ParamSpec::new("sites", Int, "512", "lattice sites N"),
                ParamSpec::new("mass", Float, "0.5", "m a"),
                ParamSpec::new("intervals", IntList, "8, 16, 32, 64", "interval lengths L"),
                ParamSpec::new("tolerance", Float, "1e-3", "largest change between the last two intervals (nats)"),
                SEED,
            ] },
            Scenario::Commutators => const { &[
                ParamSpec::new("sites", Int, "320", "lattice sites N"),
                ParamSpec::new("mass", Float, "1", "m a (sets the ladder mass)"),
                ParamSpec::new("epsilon", Float, "4", "profile width"),
                ParamSpec::new("spacing", Float, "40", "profile separation d"),
                ParamSpec::new("modes", Int, "8", "number of profiles M"),
                ParamSpec::new("diagonal_tol", Float, "1e-10", "allowed |G_jj - 1|"),
                ParamSpec::new("offdiag_rel_tol", Float, "0.05", "relative tolerance on the largest overlap"),
                SEED,
            ] },
            Scenario::CgPurity => const { &[
                ParamSpec::new("sites", Int, "256", "lattice sites N"),
                ParamSpec::new("epsilon", Float, "8", "profile width"),
                ParamSpec::new("mass_eps", FloatList, "0.5, 1, 2, 4, 8, 10", "sweep of m eps"),
                ParamSpec::new("check_mass_eps", Float, "10", "m eps at which purity is checked"),
                ParamSpec::new("purity_tol", Float, "1e-2", "largest accepted nu - 1/2"),
                SEED,
            ] },
            Scenario::NwConvergence => const { &[
                ParamSpec::new("epsilon", Float, "1", "profile width"),
                ParamSpec::new("mass_eps", FloatList, "0.5, 1, 2, 4, 8, 16", "sweep of m eps"),
                ParamSpec::new("ratio_tol", Float, "1e-2", "largest accepted ratio at the end of the sweep"),
                ParamSpec::new("gauss_tol", Float, "1e-3", "largest accepted Gaussian distance at the end of the sweep"),
                ParamSpec::new("scaling_tol", Float, "1e-8", "allowed change under (eps, m) -> (2 eps, m / 2)"),
                ParamSpec::new("fit_min", Float, "2", "smallest m eps in the power-law fit"),
                ParamSpec::new("fit_max", Float, "16", "largest m eps in the power-law fit"),
                ParamSpec::new("exponent", Float, "2", "expected decay exponent"),
                ParamSpec::new("exponent_tol", Float, "0.3", "allowed deviation of the fitted exponent"),
                SEED,
            ] },
            Scenario::LocalizationFidelity => const { &[
                ParamSpec::new("sites", Int, "256", "lattice sites hosting the profiles"),
                ParamSpec::new("epsilon", Float, "4", "profile width"),
                ParamSpec::new("spacing", Float, "2", "profile separation d"),
                ParamSpec::new("modes", Int, "64", "number of profiles M"),
                ParamSpec::new("packet_width", Float, "12", "spatial width of the Gaussian packet"),
                ParamSpec::new("mass_eps", FloatList, "0.2, 1, 10", "sweep of m eps"),
                ParamSpec::new("high_mass_eps", Float, "10", "m eps where high fidelity is required"),
                ParamSpec::new("low_mass_eps", Float, "0.2", "m eps where the fidelity must be lower"),
                ParamSpec::new("fidelity_min", Float, "0.99", "smallest accepted fidelity at high_mass_eps"),
                SEED,
            ] },
            Scenario::Singlet => const { &[
                ParamSpec::new("modes", Int, "2", "physical modes M"),
                ParamSpec::new("max_total", Int, "2", "occupation cutoff N"),
                ParamSpec::new("site_i", Int, "0", "first site"),
                ParamSpec::new("site_j", Int, "1", "second site"),
                ParamSpec::new("tolerance", Float, "1e-10", "allowed |S - ln 2|"),
                SEED,
            ] },
            Scenario::Bounds => const { &[
                ParamSpec::new("modes", Int, "4", "modes of the random states"),
                ParamSpec::new("max_total", Int, "2", "occupation cutoff of the random states"),
                ParamSpec::new("trials", Int, "1000", "number of random states"),
                ParamSpec::new("dim_max_modes", Int, "64", "largest M in the dimension identities"),
                ParamSpec::new("dim_max_total", Int, "6", "largest N in the dimension identities"),
                ParamSpec::new("saturation_modes", Int, "4", "modes of the saturating state"),
                ParamSpec::new("saturation_total", Int, "3", "cutoff of the saturating state"),
                ParamSpec::new("asymptotic_modes", Int, "1000", "M of the asymptotic check"),
                ParamSpec::new("asymptotic_total", Int, "2", "N of the asymptotic check"),
                ParamSpec::new("asymptotic_tol", Float, "0.15", "relative tolerance of ln D against N ln M"),
                SEED,
            ] },
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    IntList,
    FloatList,
    Seed,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::Int => "an integer",
            Kind::Float => "a number",
            Kind::IntList => "a comma-separated list of integers",
            Kind::FloatList => "a comma-separated list of numbers",
            Kind::Seed => "an unsigned 64-bit integer",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

impl ParamSpec {
    const fn new(key: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Self {
        Self {
            key,
            kind,
            default,
            help,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Seed(u64),
    Int(i64),
    Float(f64),
    IntList(Vec<i64>),
    FloatList(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("{}unknown key `{key}` for scenario {scenario}", location(*line))]
    UnknownKey {
        key: String,
        scenario: Scenario,
        line: Option<usize>,
    },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { key: String, line: usize },
    #[error("{}`{key}` must be {expected}, got `{value}`", location(*line))]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
        line: Option<usize>,
    },
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn location(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// A scenario with a complete, typed parameter map.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    params: BTreeMap<String, ParamValue>,
}

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let params = scenario
            .schema()
            .iter()
            .map(|spec| {
                let value = parse_value(spec, spec.default, None).expect("defaults parse");
                (spec.key.to_string(), value)
            })
            .collect();
        Self { scenario, params }
    }

    /// Defaults, then the config file, then `--set` overrides, then `--seed`.
    pub fn resolve(
        scenario: Scenario,
        file: Option<&str>,
        overrides: &[String],
        seed: Option<u64>,
    ) -> Result<Self, ConfigError> {
        let mut config = Self::defaults(scenario);
        if let Some(text) = file {
            config.apply_file(text)?;
        }
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::BadValue {
                key: item.clone(),
                value: String::new(),
                expected: "of the form key=value",
                line: None,
            })?;
            config.set(key.trim(), value.trim(), None)?;
        }
        if let Some(seed) = seed {
            config.params.insert("seed".into(), ParamValue::Seed(seed));
        }
        Ok(config)
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are ignored.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: raw.trim().to_string(),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.trim().to_string(),
                });
            }
            if seen.insert(key.to_string(), line).is_some() {
                return Err(ConfigError::Duplicate {
                    key: key.to_string(),
                    line,
                });
            }
            self.set(key, value.trim(), Some(line))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let spec = self
            .scenario
            .schema()
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| ConfigError::UnknownKey {
                key: key.to_string(),
                scenario: self.scenario,
                line,
            })?;
        let parsed = parse_value(spec, value, line)?;
        self.params.insert(key.to_string(), parsed);
        Ok(())
    }

    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.params
    }

    fn get(&self, key: &str) -> &ParamValue {
        self.params
            .get(key)
            .unwrap_or_else(|| panic!("`{key}` is not in the {} schema", self.scenario))
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.get(key) {
            ParamValue::Int(v) => *v,
            other => panic!("`{key}` is not an integer: {other:?}"),
        }
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.get(key) {
            ParamValue::Float(v) => *v,
            other => panic!("`{key}` is not a number: {other:?}"),
        }
    }

    pub fn ints(&self, key: &str) -> &[i64] {
        match self.get(key) {
            ParamValue::IntList(v) => v,
            other => panic!("`{key}` is not an integer list: {other:?}"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.get(key) {
            ParamValue::FloatList(v) => v,
            other => panic!("`{key}` is not a number list: {other:?}"),
        }
    }

    pub fn seed(&self) -> u64 {
        match self.get("seed") {
            ParamValue::Seed(v) => *v,
            other => panic!("seed has the wrong type: {other:?}"),
        }
    }

    /// Integer parameter that must lie in `min..=max`, as a `usize`.
    pub fn count(&self, key: &str, min: i64, max: i64) -> Result<usize, ConfigError> {
        let v = self.int(key);
        if v < min || v > max {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                reason: format!("must lie in [{min}, {max}], got {v}"),
            });
        }
        Ok(v as usize)
    }

    /// Number parameter that must be finite and strictly positive.
    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.float(key);
        if !(v.is_finite() && v > 0.0) {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                reason: format!("must be positive, got {v}"),
            });
        }
        Ok(v)
    }
}

fn parse_value(spec: &ParamSpec, raw: &str, line: Option<usize>) -> Result<ParamValue, ConfigError> {
    let bad = || ConfigError::BadValue {
        key: spec.key.to_string(),
        value: raw.to_string(),
        expected: spec.kind.describe(),
        line,
    };
    let float = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let items = || raw.split(',').map(str::trim).filter(|s| !s.is_empty());
    Ok(match spec.kind {
        Kind::Int => ParamValue::Int(raw.parse().map_err(|_| bad())?),
        Kind::Seed => ParamValue::Seed(raw.parse().map_err(|_| bad())?),
        Kind::Float => ParamValue::Float(float(raw).ok_or_else(bad)?),
        Kind::IntList => ParamValue::IntList(
            items()
                .map(|s| s.parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        ),
        Kind::FloatList => ParamValue::FloatList(
            items()
                .map(|s| float(s).ok_or_else(bad))
                .collect::<Result<_, _>>()?,
        ),
    })
}
