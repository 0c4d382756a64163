//! Key-value run configuration.
//!
//! The file format is one `key = value` pair per line. Blank lines and lines
//! starting with `#` are ignored. Every key has a default, unknown or repeated
//! keys are errors. Output files echo the effective configuration as `#!`
//! lines, which [`RunConfig::from_header`] reads back.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key {key:?} given more than once")]
    DuplicateKey { line: usize, key: String },

    #[error("line {line}: bad value {value:?} for {key}: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },

    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn parse_value<T>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T: FromStr,
    T::Err: Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

macro_rules! run_config {
    ($( $(#[doc = $doc:literal])* $key:ident : $ty:ty = $default:expr, echo = $echo:literal; )*) => {
        /// Resolutions, tolerances and seeds shared by all subcommands.
        #[derive(Debug, Clone, PartialEq)]
        pub struct RunConfig {
            $( $(#[doc = $doc])* pub $key: $ty, )*
        }

        impl Default for RunConfig {
            fn default() -> Self {
                Self { $( $key: $default, )* }
            }
        }

        impl RunConfig {
            /// All recognized keys, in file order.
            pub const KEYS: &'static [&'static str] = &[$( stringify!($key), )*];

            /// Sets one key from its textual value.
            pub fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
                match key {
                    $( stringify!($key) => self.$key = parse_value(line, key, value)?, )*
                    _ => {
                        return Err(ConfigError::UnknownKey { line, key: key.to_string() })
                    }
                }
                Ok(())
            }

            /// `(key, value)` pairs that determine output content. The output
            /// directory is left out so that files written to different places
            /// stay identical.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                let mut out = Vec::new();
                $( if $echo { out.push((stringify!($key), self.$key.to_string())); } )*
                out
            }
        }
    };
}

run_config! {
    /// Quasi-momentum grid points `M`.
    k_points: usize = 2048, echo = true;
    /// Site cutoff for the site-space matrix; 0 picks the default from `d`.
    n_max: usize = 0, echo = true;
    /// Finite-difference stencil order for the k-space matrix (2 or 4).
    stencil_order: usize = 4, echo = true;
    /// Eigenvector tolerance relative to the matrix norm.
    eig_tol: f64 = 1e-12, echo = true;
    /// Impurity positions per scattering curve.
    n_theta: usize = 256, echo = true;
    /// Quadrature points for the aperiodic antiderivative.
    quad_resolution: usize = 4096, echo = true;
    /// Points on the `a_bar(0)` versus `lambda_L` inset curve.
    inset_points: usize = 41, echo = true;
    /// Largest `lambda_L` on the inset curve.
    inset_lambda_max: f64 = 2.0, echo = true;
    /// Pair-correlation mesh size per axis.
    pair_grid: usize = 64, echo = true;
    /// Cell refinement for quadrature pair correlations; 1 samples mesh nodes,
    /// an odd value above 1 averages over histogram cells.
    quad_refine: usize = 1, echo = true;
    /// Metropolis samples per run, split over chains.
    mc_samples: usize = 100_000, echo = true;
    /// Independent Metropolis chains.
    mc_chains: usize = 32, echo = true;
    /// Seed for every random draw.
    seed: u64 = 42, echo = true;
    /// Coefficient of the pair exponent in the many-body ground state.
    coeff_c: f64 = 1.0, echo = true;
    /// Finite-difference step for many-body derivatives.
    fd_step: f64 = 1e-5, echo = true;
    /// Random configurations for the annihilation residual.
    probe_points: usize = 100, echo = true;
    /// Mesh size per coordinate for the many-body energy check.
    energy_grid: usize = 24, echo = true;
    /// Grid points per axis for two-dimensional states.
    angular_points: usize = 256, echo = true;
    /// Seeded coherent-state amplitudes per check.
    coherent_alphas: usize = 20, echo = true;
    /// Largest `|alpha|` drawn for coherent states.
    alpha_max: f64 = 3.0, echo = true;
    /// Seeded random states for the uncertainty check.
    gup_states: usize = 50, echo = true;
    /// Tolerance on `|a psi_0| / |psi_0|`.
    tol_ground: f64 = 1e-10, echo = true;
    /// Tolerance on the minimal-uncertainty equality.
    tol_gup: f64 = 1e-8, echo = true;
    /// Tolerance on the coherent-state and angular-momentum residuals.
    tol_residual: f64 = 1e-8, echo = true;
    /// Tolerance on the lattice Hermite residual.
    tol_hermite: f64 = 1e-4, echo = true;
    /// Tolerance on the scattering closed forms.
    tol_scattering: f64 = 1e-9, echo = true;
    /// Tolerance on the many-body residual and energy.
    tol_manybody: f64 = 1e-8, echo = true;
    /// Directory for output files when `--out` is not given.
    out_dir: String = String::from("."), echo = false;
}

impl RunConfig {
    /// Parses configuration text over the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    /// Reads the `#!` lines from the comment header of an output file.
    pub fn from_header(text: &str) -> Result<Self, ConfigError> {
        Self::parse_lines(
            text.lines()
                .enumerate()
                .take_while(|(_, l)| l.starts_with('#'))
                .filter_map(|(i, l)| l.strip_prefix("#!").map(|rest| (i + 1, rest))),
        )
    }

    /// Loads a config file, or the header of a previous output file when the
    /// file starts with the tool banner.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if text.starts_with(crate::output::BANNER) {
            Self::from_header(&text)
        } else {
            Self::parse(&text)
        }
    }

    fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        for (line, raw) in lines {
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let (key, value) = text
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    text: text.to_string(),
                })?;
            let key = Self::KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
            if seen.contains(key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key);
            cfg.set(line, key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| ConfigError::BadValue {
            line: 0,
            key: key.to_string(),
            value,
            reason: reason.to_string(),
        };
        if !matches!(self.stencil_order, 2 | 4) {
            return Err(bad("stencil_order", self.stencil_order.to_string(), "must be 2 or 4"));
        }
        if self.quad_refine.is_multiple_of(2) {
            return Err(bad("quad_refine", self.quad_refine.to_string(), "must be 1 or odd"));
        }
        let positive = [
            ("eig_tol", self.eig_tol),
            ("inset_lambda_max", self.inset_lambda_max),
            ("coeff_c", self.coeff_c),
            ("fd_step", self.fd_step),
            ("alpha_max", self.alpha_max),
            ("tol_ground", self.tol_ground),
            ("tol_gup", self.tol_gup),
            ("tol_residual", self.tol_residual),
            ("tol_hermite", self.tol_hermite),
            ("tol_scattering", self.tol_scattering),
            ("tol_manybody", self.tol_manybody),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(key, v.to_string(), "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Renders the echoed entries as config text that [`RunConfig::parse`] accepts.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
