//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Unknown keys, duplicates,
//! missing required keys and malformed values are errors that name the line.

use kkp_core::model::zero_background_nu;
use kkp_core::spectral::{Background, Grid2D, Mode, SolverConfig};
use kkp_core::{KkpError, LineWave, ModelParams, Sigma};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<KkpError> for ConfigError {
    fn from(e: KkpError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

const REQUIRED: [&str; 9] = ["beta", "sigma", "mode", "nx", "ny", "lx", "ly", "dt", "t_end"];
const OPTIONAL: [&str; 13] = [
    "dealias",
    "snapshot_every",
    "initial",
    "wave",
    "mu",
    "nu",
    "x0",
    "background",
    "amplitude",
    "width_x",
    "width_y",
    "output_dir",
    "nonlinear",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    LineSoliton { wave: LineWave, x0: f64, background: Background },
    TiltedPacket { amplitude: f64, width_x: f64, width_y: f64, mu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub grid: Grid2D,
    pub initial: Initial,
    pub output_dir: Option<PathBuf>,
    /// Key/value pairs as written, in key order, for the manifest.
    pub entries: BTreeMap<String, String>,
}

struct Raw {
    values: BTreeMap<String, (usize, String)>,
}

impl Raw {
    fn get(&self, key: &'static str) -> Option<&(usize, String)> {
        self.values.get(key)
    }

    fn required(&self, key: &'static str) -> Result<&(usize, String), ConfigError> {
        self.get(key).ok_or(ConfigError::Missing(key))
    }

    fn parse<T: std::str::FromStr>(&self, key: &'static str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| ConfigError::Line { line: *line, message: format!("`{key}` must be {what}, got {v:?}") }),
        }
    }

    fn float(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.parse(key, "a number")?;
        if let Some(x) = v {
            if !x.is_finite() {
                let line = self.get(key).map(|e| e.0).unwrap_or(0);
                return Err(ConfigError::Line { line, message: format!("`{key}` must be finite") });
            }
        }
        Ok(v)
    }

    fn req_float(&self, key: &'static str) -> Result<f64, ConfigError> {
        self.required(key)?;
        Ok(self.float(key)?.expect("present"))
    }

    fn req_usize(&self, key: &'static str) -> Result<usize, ConfigError> {
        self.required(key)?;
        Ok(self.parse(key, "a non-negative integer")?.expect("present"))
    }

    fn line_err(&self, key: &'static str, message: String) -> ConfigError {
        match self.get(key) {
            Some((line, _)) => ConfigError::Line { line: *line, message },
            None => ConfigError::Invalid(message),
        }
    }

    fn choice(&self, key: &'static str, options: &[&str], default: &str) -> Result<String, ConfigError> {
        let v = self.get(key).map(|(_, v)| v.as_str()).unwrap_or(default);
        if options.contains(&v) {
            Ok(v.to_string())
        } else {
            Err(self.line_err(key, format!("`{key}` must be one of {}, got {v:?}", options.join(", "))))
        }
    }
}

fn tokenize(text: &str) -> Result<Raw, ConfigError> {
    let mut values = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Line { line, message: format!("expected `key = value`, got {content:?}") });
        };
        let (k, v) = (k.trim(), v.trim());
        if !REQUIRED.contains(&k) && !OPTIONAL.contains(&k) {
            return Err(ConfigError::Line { line, message: format!("unknown key `{k}`") });
        }
        if v.is_empty() {
            return Err(ConfigError::Line { line, message: format!("`{k}` has no value") });
        }
        if let Some((first, _)) = values.insert(k.to_string(), (line, v.to_string())) {
            return Err(ConfigError::Line { line, message: format!("`{k}` already set on line {first}") });
        }
    }
    Ok(Raw { values })
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = tokenize(text)?;
    for key in REQUIRED {
        raw.required(key)?;
    }

    let beta = raw.req_float("beta")?;
    if beta == 0.0 {
        return Err(raw.line_err("beta", "beta must be nonzero".into()));
    }
    let sigma_int: i64 = raw.parse("sigma", "+1 or -1")?.expect("present");
    let sigma = Sigma::from_int(sigma_int).map_err(|_| raw.line_err("sigma", "sigma must be +1 or -1".into()))?;
    let params = ModelParams::new(beta, sigma)?;

    let mode: Mode = raw.required("mode")?.1.parse().map_err(|e: KkpError| raw.line_err("mode", e.to_string()))?;
    let grid = Grid2D::new(raw.req_usize("nx")?, raw.req_usize("ny")?, raw.req_float("lx")?, raw.req_float("ly")?)?;

    let mut solver = SolverConfig::new(params, raw.req_float("dt")?, raw.req_float("t_end")?);
    solver.mode = mode;
    solver.dealias = raw.parse("dealias", "true or false")?.unwrap_or(true);
    solver.nonlinear = raw.parse("nonlinear", "true or false")?.unwrap_or(true);
    solver.snapshot_every = raw.parse("snapshot_every", "a positive integer")?.unwrap_or(100);
    solver.validate(&grid)?;

    let mu = raw.float("mu")?.unwrap_or(0.0);
    let initial = match raw.choice("initial", &["line_soliton", "tilted_packet"], "line_soliton")?.as_str() {
        "line_soliton" => {
            let wave = match raw.choice("wave", &["zero_background", "explicit"], "zero_background")?.as_str() {
                "zero_background" => {
                    if raw.get("nu").is_some() {
                        return Err(raw.line_err("nu", "`nu` is derived when wave = zero_background".into()));
                    }
                    LineWave::new(&params, mu, zero_background_nu(&params, mu)?)
                }
                _ => {
                    let nu = raw.float("nu")?.ok_or(ConfigError::Missing("nu"))?;
                    LineWave::new(&params, mu, nu)
                }
            };
            params.require_soliton()?;
            let background = match raw.choice("background", &["zero", "free"], "zero")?.as_str() {
                "free" => Background::Free,
                _ => Background::ZeroOnly,
            };
            Initial::LineSoliton { wave, x0: raw.float("x0")?.unwrap_or(0.0), background }
        }
        _ => Initial::TiltedPacket {
            amplitude: raw.float("amplitude")?.unwrap_or(0.5),
            width_x: raw.float("width_x")?.unwrap_or(3.0),
            width_y: raw.float("width_y")?.unwrap_or(4.0),
            mu,
        },
    };

    Ok(RunConfig {
        solver,
        grid,
        initial,
        output_dir: raw.get("output_dir").map(|(_, v)| PathBuf::from(v)),
        entries: raw.values.into_iter().map(|(k, (_, v))| (k, v)).collect(),
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# soliton run
beta = -1
sigma = 1
mode = kkp2d
nx = 64
ny = 4
lx = 200   # box
ly = 10
dt = 0.01
t_end = 1
";

    #[test]
    fn minimal_file() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.grid, Grid2D::new(64, 4, 200.0, 10.0).unwrap());
        assert_eq!(cfg.solver.snapshot_every, 100);
        assert!(cfg.solver.dealias);
        match cfg.initial {
            Initial::LineSoliton { wave, .. } => assert_eq!(wave.p, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_background_fills_nu() {
        let cfg = parse_config_str(&format!("{MINIMAL}mu = 0.5\nwave = zero_background\n")).unwrap();
        let params = ModelParams::new(-1.0, Sigma::Plus).unwrap();
        match cfg.initial {
            Initial::LineSoliton { wave, .. } => assert_eq!(wave.nu, zero_background_nu(&params, 0.5).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sigma_must_be_unit() {
        let err = parse_config_str(&MINIMAL.replace("sigma = 1", "sigma = 2")).unwrap_err();
        assert_eq!(err.to_string(), "line 3: sigma must be +1 or -1");
    }

    #[test]
    fn errors_name_lines() {
        let err = parse_config_str(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        assert_eq!(err.to_string(), "line 11: unknown key `colour`");
        let err = parse_config_str(&MINIMAL.replace("nx = 64", "nx = many")).unwrap_err();
        assert!(err.to_string().starts_with("line 5:"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("beta = -1", "beta = 0")).unwrap_err();
        assert_eq!(err.to_string(), "line 2: beta must be nonzero");
        let err = parse_config_str(&format!("{MINIMAL}beta = -2\n")).unwrap_err();
        assert!(err.to_string().contains("already set on line 2"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("dt = 0.01\n", "")).unwrap_err();
        assert_eq!(err.to_string(), "missing required key `dt`");
        let err = parse_config_str(&format!("{MINIMAL}just words\n")).unwrap_err();
        assert!(err.to_string().starts_with("line 11"), "{err}");
    }

    #[test]
    fn explicit_wave_needs_nu() {
        let err = parse_config_str(&format!("{MINIMAL}wave = explicit\n")).unwrap_err();
        assert_eq!(err.to_string(), "missing required key `nu`");
        let cfg = parse_config_str(&format!("{MINIMAL}wave = explicit\nnu = 0.3\nbackground = free\n")).unwrap();
        assert!(matches!(cfg.initial, Initial::LineSoliton { background: Background::Free, .. }));
    }
}
