//! Run configuration: a flat TOML document in which every key is optional.

use std::fs;
use std::path::{Path, PathBuf};

use raceway_core::hydro::{extinction_from_bottom_fraction, DEFAULT_BOTTOM_LIGHT_FRACTION};
use raceway_core::{EnvironmentConfig, HanParameters, OptimizeSettings};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "RACEWAY_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "Q0")]
    pub q0: f64,
    pub a0: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub g: f64,
    pub zb0: f64,
    #[serde(rename = "Is")]
    pub surface_light: f64,
    /// Share of the surface light reaching the flat bottom; sets `eps` unless given.
    pub bottom_light_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,

    pub kr: f64,
    pub kd: f64,
    pub tau: f64,
    pub sigma: f64,
    pub k: f64,
    #[serde(rename = "R")]
    pub respiration: f64,

    pub dt: f64,
    pub layers: usize,
    pub order: usize,
    pub tol: f64,
    pub rho: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    pub seed: u64,

    /// Random shapes in the layer-count sweep.
    pub n_random: usize,
    /// Largest layer count in the sweep, which covers `1..=nz_max`.
    pub nz_max: usize,
    /// Fourier orders in the order sweep.
    pub orders: Vec<usize>,
    /// Finite-difference step of the gradient check.
    pub fd_step: f64,
    /// Grid points of the topography dump, endpoints included.
    pub samples: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let opt = OptimizeSettings::default();
        Self {
            q0: env.q0,
            a0: env.a0,
            length: env.length,
            g: env.gravity,
            zb0: env.zb0,
            surface_light: env.surface_light,
            bottom_light_fraction: DEFAULT_BOTTOM_LIGHT_FRACTION,
            eps: None,
            kr: han.kr,
            kd: han.kd,
            tau: han.tau,
            sigma: han.sigma,
            k: han.k,
            respiration: han.respiration,
            dt: opt.dt,
            layers: opt.layers,
            order: opt.order,
            tol: opt.tol,
            rho: opt.rho,
            max_iter: opt.max_iter,
            max_backtracks: opt.max_backtracks,
            seed: opt.seed,
            n_random: 100,
            nz_max: 80,
            orders: vec![0, 5, 10, 15, 20],
            fd_step: 1e-7,
            samples: 201,
            output_dir: PathBuf::from("output"),
        }
    }
}

fn positive(key: &'static str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::validation(
            key,
            format!("{key} must be positive"),
        ))
    }
}

fn at_least_one(key: &'static str, value: usize) -> Result<(), ConfigError> {
    if value >= 1 {
        Ok(())
    } else {
        Err(ConfigError::validation(
            key,
            format!("{key} must be at least 1"),
        ))
    }
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            ConfigError::Parse {
                line,
                message: e.message().trim().to_string(),
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("Q0", self.q0)?;
        positive("a0", self.a0)?;
        positive("L", self.length)?;
        positive("g", self.g)?;
        positive("Is", self.surface_light)?;
        if !self.zb0.is_finite() {
            return Err(ConfigError::validation("zb0", "zb0 must be finite".into()));
        }
        if !(self.bottom_light_fraction > 0.0 && self.bottom_light_fraction < 1.0) {
            return Err(ConfigError::validation(
                "bottom_light_fraction",
                "bottom_light_fraction must lie in (0, 1)".into(),
            ));
        }
        if let Some(eps) = self.eps {
            positive("eps", eps)?;
        }
        positive("kr", self.kr)?;
        positive("kd", self.kd)?;
        positive("tau", self.tau)?;
        positive("sigma", self.sigma)?;
        positive("k", self.k)?;
        positive("R", self.respiration)?;
        positive("dt", self.dt)?;
        positive("tol", self.tol)?;
        positive("rho", self.rho)?;
        positive("fd_step", self.fd_step)?;
        at_least_one("layers", self.layers)?;
        at_least_one("max_iter", self.max_iter)?;
        at_least_one("n_random", self.n_random)?;
        at_least_one("nz_max", self.nz_max)?;
        if self.samples < 2 {
            return Err(ConfigError::validation(
                "samples",
                "samples must be at least 2".into(),
            ));
        }
        let env = self.env();
        if self.a0 <= env.critical_height() {
            return Err(ConfigError::validation(
                "a0",
                format!(
                    "a0 = {} must exceed the critical height h_c = {} (flat flow would be supercritical)",
                    self.a0,
                    env.critical_height()
                ),
            ));
        }
        Ok(())
    }

    pub fn extinction(&self) -> f64 {
        self.eps
            .unwrap_or_else(|| extinction_from_bottom_fraction(self.a0, self.bottom_light_fraction))
    }

    pub fn env(&self) -> EnvironmentConfig {
        EnvironmentConfig {
            q0: self.q0,
            a0: self.a0,
            length: self.length,
            gravity: self.g,
            zb0: self.zb0,
            surface_light: self.surface_light,
            extinction: self.extinction(),
        }
    }

    pub fn han(&self) -> HanParameters {
        HanParameters {
            kr: self.kr,
            kd: self.kd,
            tau: self.tau,
            sigma: self.sigma,
            k: self.k,
            respiration: self.respiration,
        }
    }

    pub fn settings(&self) -> OptimizeSettings {
        OptimizeSettings {
            tol: self.tol,
            rho: self.rho,
            max_iter: self.max_iter,
            max_backtracks: self.max_backtracks,
            dt: self.dt,
            layers: self.layers,
            order: self.order,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let config = RunConfig::from_toml("").unwrap();
        assert_eq!(config, RunConfig::default());
        assert_eq!(config.env(), EnvironmentConfig::default());
        assert_eq!(config.han(), HanParameters::default());
        assert_eq!(config.settings(), OptimizeSettings::default());
        assert!((config.extinction() - 10f64.ln() / 0.4).abs() < 1e-12);
    }

    #[test]
    fn negative_discharge_names_key() {
        let err = RunConfig::from_toml("Q0 = -1\n").unwrap_err();
        match err {
            ConfigError::Validation { key, ref message } => {
                assert_eq!(key, "Q0");
                assert_eq!(message, "Q0 must be positive");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn supercritical_mean_height_rejected() {
        let err = RunConfig::from_toml("a0 = 0.05\nQ0 = 0.04\n").unwrap_err();
        assert!(matches!(err, ConfigError::Validation { key: "a0", .. }));
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = RunConfig::from_toml("a0 = 0.4\n\nbogus = 3\n").unwrap_err();
        match err {
            ConfigError::Parse { line, message } => {
                assert_eq!(line, Some(3));
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_value_reports_line() {
        let err = RunConfig::from_toml("dt = 0.1\nlayers = \"many\"\n").unwrap_err();
        assert!(
            matches!(err, ConfigError::Parse { line: Some(2), .. }),
            "{err:?}"
        );
    }

    #[test]
    fn integers_accepted_for_reals() {
        let config = RunConfig::from_toml("L = 12\nIs = 1000\n").unwrap();
        assert_eq!(config.length, 12.0);
        assert_eq!(config.surface_light, 1000.0);
    }

    #[test]
    fn toml_round_trip() {
        let config = RunConfig {
            eps: Some(4.2),
            orders: vec![1, 2],
            ..Default::default()
        };
        assert_eq!(RunConfig::from_toml(&config.to_toml()).unwrap(), config);
    }
}
