//! Parameter resolution: explicit flags override the JSON config file,
//! which overrides the built-in defaults.

use std::path::PathBuf;

use serde::Deserialize;

use crate::{CliError, CommonArgs, Format, Method};

/// Config-file schema: every field optional, same names as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub q: Option<u32>,
    pub alpha: Option<f64>,
    pub n_min: Option<i32>,
    pub n_max: Option<i32>,
    pub inputs: Option<Vec<PathBuf>>,
    pub u0_re: Option<f64>,
    pub u0_im: Option<f64>,
    pub dim: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub method: Option<Method>,
    pub max_iter: Option<usize>,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub q: Option<u32>,
    pub alpha: Option<f64>,
    pub n_min: Option<i32>,
    pub n_max: Option<i32>,
    pub inputs: Vec<PathBuf>,
    pub u0: ultrafrac::C64,
    pub dim: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub tol: f64,
    pub method: Method,
    pub max_iter: usize,
}

impl RunConfig {
    pub fn resolve(args: CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| {
                    CliError::usage(format!("malformed config {}: {e}", path.display()))
                })?
            }
            None => ConfigFile::default(),
        };

        let inputs = if args.inputs.is_empty() {
            file.inputs.unwrap_or_default()
        } else {
            args.inputs
        };
        let u0 = ultrafrac::C64::new(
            args.u0_re.or(file.u0_re).unwrap_or(0.0),
            args.u0_im.or(file.u0_im).unwrap_or(0.0),
        );
        Ok(Self {
            q: args.q.or(file.q),
            alpha: args.alpha.or(file.alpha),
            n_min: args.n_min.or(file.n_min),
            n_max: args.n_max.or(file.n_max),
            inputs,
            u0,
            dim: args.dim.or(file.dim),
            output: args.output.or(file.output),
            format: args.format.or(file.format).unwrap_or(Format::Json),
            tol: args.tol.or(file.tol).unwrap_or(1e-12),
            method: args.method.or(file.method).unwrap_or(Method::Direct),
            max_iter: args.max_iter.or(file.max_iter).unwrap_or(200),
        })
    }

    pub fn require_q(&self) -> Result<ultrafrac::FieldParams, CliError> {
        let q = self
            .q
            .ok_or_else(|| CliError::usage("missing --q (or \"q\" in the config/input document)"))?;
        Ok(ultrafrac::FieldParams::new(q)?)
    }

    pub fn require_alpha(&self) -> Result<ultrafrac::Alpha64, CliError> {
        let alpha = self.alpha.ok_or_else(|| {
            CliError::usage("missing --alpha (or \"alpha\" in the config/input document)")
        })?;
        Ok(ultrafrac::AlphaOrder::new(alpha)?)
    }

    pub fn require_range(&self) -> Result<ultrafrac::LevelGrid, CliError> {
        match (self.n_min, self.n_max) {
            (Some(lo), Some(hi)) => Ok(ultrafrac::LevelGrid::new(lo, hi)?),
            _ => Err(CliError::usage("missing --n-min / --n-max")),
        }
    }
}
