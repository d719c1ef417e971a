//! Run configuration: a flat JSON file of optional knobs, merged with
//! command-line overrides. Unknown keys are rejected by name, numeric
//! fields accept the literal strings "pi" and "e", and the merged result
//! is echoed next to the outputs so a run can be reproduced from its own
//! artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shared numeric parser for flags and config fields: a plain decimal
/// number, or one of the literals "pi" and "e".
pub fn parse_float(s: &str) -> Result<f64, String> {
    match s.trim() {
        "pi" => Ok(std::f64::consts::PI),
        "e" => Ok(std::f64::consts::E),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("expected a number or the literals \"pi\"/\"e\", got {other:?}")),
    }
}

fn flex_opt<'de, D>(d: D) -> Result<Option<f64>, D::Error>
where
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Num(x)) => Ok(Some(x)),
        Some(Raw::Str(s)) => parse_float(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

fn flex_vec_opt<'de, D>(d: D) -> Result<Option<Vec<f64>>, D::Error>
where
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Option::<Vec<Raw>>::deserialize(d)? {
        None => Ok(None),
        Some(items) => items
            .into_iter()
            .map(|r| match r {
                Raw::Num(x) => Ok(x),
                Raw::Str(s) => parse_float(&s).map_err(serde::de::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

/// Every field is optional; absent fields fall back to the subcommand's
/// defaults. Serialization skips absent fields, so the effective-config
/// echo round-trips through `load_config` unchanged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "flex_opt")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "flex_opt")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "flex_opt")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_n_max: Option<u32>,
    /// Derivative orders for the sweep subcommand. An empty list is a
    /// valid sweep with zero cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<u8>>,
    /// Horizon values for the sweep subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "flex_vec_opt")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Field-wise merge, `self` winning. Command-line flags go on the
    /// left, the config file on the right.
    pub fn or(self, fallback: RunConfig) -> RunConfig {
        RunConfig {
            master_seed: self.master_seed.or(fallback.master_seed),
            paths: self.paths.or(fallback.paths),
            t: self.t.or(fallback.t),
            dt: self.dt.or(fallback.dt),
            eps: self.eps.or(fallback.eps),
            bridge: self.bridge.or(fallback.bridge),
            growth_n_max: self.growth_n_max.or(fallback.growth_n_max),
            orders: self.orders.or(fallback.orders),
            times: self.times.or(fallback.times),
            out_dir: self.out_dir.or(fallback.out_dir),
        }
    }

    /// Rejects values no run could use, naming the violated constraint.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(ConfigError(format!(
                "field \"{name}\" must be a positive finite number, got {x}"
            ))),
            _ => Ok(()),
        };
        positive("t", self.t)?;
        positive("dt", self.dt)?;
        positive("eps", self.eps)?;
        if let Some(p) = self.paths {
            if p < 2 {
                return Err(ConfigError(format!(
                    "field \"paths\" must be at least 2, got {p}"
                )));
            }
        }
        if let (Some(dt), Some(t)) = (self.dt, self.t) {
            if dt > t {
                return Err(ConfigError(format!(
                    "constraint violated: dt must not exceed t (dt = {dt}, t = {t})"
                )));
            }
        }
        if let Some(orders) = &self.orders {
            for &k in orders {
                if !(1..=4).contains(&k) {
                    return Err(ConfigError(format!(
                        "field \"orders\" entries must lie in 1..=4, got {k}"
                    )));
                }
            }
        }
        if let Some(times) = &self.times {
            for &t in times {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(ConfigError(format!(
                        "field \"times\" entries must be positive finite numbers, got {t}"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| ConfigError(format!("config {}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the merged configuration next to the run outputs and returns
/// its path. The file is itself a valid config.
pub fn write_echo(cfg: &RunConfig, out_dir: &Path) -> Result<PathBuf, ConfigError> {
    let path = out_dir.join("effective_config.json");
    let body = serde_json::to_string_pretty(cfg).expect("config serializes");
    fs::write(&path, body + "\n")
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
