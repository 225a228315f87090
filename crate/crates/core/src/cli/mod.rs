//! Command-line surface: configuration files, flags, provenance headers and exit codes.
//!
//! Settings resolve in three layers: defaults, then a `key = value` config file, then
//! flags. Every output file starts with a provenance line (CSV) or carries a
//! `provenance` object (JSON) holding the version, the subcommand and a SHA-256 of
//! the resolved settings.

mod commands;
pub mod verify;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spectral::kernel::fmt17;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    /// Tabulated kernel F with its derivatives.
    Kernel,
    /// Linear eigenfunction ψ_k with eigenvalue and adjoint polynomial.
    Eigen,
    /// f₀ for n > 0, or f_k at n = 0.
    Shoot,
    /// The first n-branch from n = 1e−3 to --n.
    Branch,
    /// Branching quantities of the Lyapunov–Schmidt reduction.
    Lyapunov,
    /// Exponents and profile of the model with backward diffusion.
    Unstable,
    /// Rescaled convergence of the linear flow.
    Evolve,
    /// The acceptance criteria (all, or the one selected by --k).
    Verify,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::Kernel => "kernel",
            Self::Eigen => "eigen",
            Self::Shoot => "shoot",
            Self::Branch => "branch",
            Self::Lyapunov => "lyapunov",
            Self::Unstable => "unstable",
            Self::Evolve => "evolve",
            Self::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Option<Subcommand>,
    pub n: f64,
    /// Diffusion exponent of the unstable model; `None` selects p₀(n).
    pub p: Option<f64>,
    pub dim: usize,
    pub k: usize,
    pub y_max: f64,
    pub points: usize,
    pub ivp_tol: f64,
    pub shoot_tol: f64,
    /// Mobility regularization; `None` selects min(1e−10, 1e−8 n).
    pub delta: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            n: 1.0,
            p: None,
            dim: 1,
            k: 0,
            y_max: 150.0,
            points: 6001,
            ivp_tol: 1e-11,
            shoot_tol: 1e-10,
            delta: None,
            out: None,
            format: Format::Csv,
        }
    }
}

fn config_error<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn parse_float(key: &str, value: &str, line: usize) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("line {line}: `{key}` expects a number, got `{value}`")))
}

fn parse_int(key: &str, value: &str, line: usize) -> Result<i64> {
    value
        .parse::<i64>()
        .map_err(|_| Error::Config(format!("line {line}: `{key}` expects an integer, got `{value}`")))
}

fn non_negative(key: &str, v: i64, line: usize) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Config(format!("line {line}: `{key}` must be non-negative, got {v}")))
}

impl RunConfig {
    /// Applies one `key = value` entry; `line` is used in error messages.
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "subcommand" => {
                self.subcommand = Some(
                    Subcommand::from_str(value, true)
                        .map_err(|_| Error::Config(format!("line {line}: unknown subcommand `{value}`")))?,
                )
            }
            "n" => self.n = parse_float(key, value, line)?,
            "p" => self.p = Some(parse_float(key, value, line)?),
            "dim" => self.dim = non_negative(key, parse_int(key, value, line)?, line)?,
            "k" => self.k = non_negative(key, parse_int(key, value, line)?, line)?,
            "ymax" => self.y_max = parse_float(key, value, line)?,
            "points" => {
                let v = parse_int(key, value, line)?;
                if v < 64 {
                    return config_error(format!("line {line}: points = {v} must be at least 64"));
                }
                self.points = v as usize;
            }
            "tol" => self.ivp_tol = parse_float(key, value, line)?,
            "shoot_tol" | "shoot-tol" => self.shoot_tol = parse_float(key, value, line)?,
            "delta" => self.delta = Some(parse_float(key, value, line)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = Format::from_str(value, true)
                    .map_err(|_| Error::Config(format!("line {line}: `format` expects csv or json, got `{value}`")))?
            }
            other => return config_error(format!("line {line}: unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies the lines of a config file: `key = value`, `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return config_error(format!("line {}: expected `key = value`, got `{line}`", i + 1));
            };
            self.set(key.trim(), value.trim(), i + 1)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ivp_tol > 0.0 && self.shoot_tol > 0.0) {
            return config_error(format!("tolerances must be positive, got tol = {}, shoot_tol = {}", self.ivp_tol, self.shoot_tol));
        }
        if !(self.y_max > 0.0 && self.y_max.is_finite()) {
            return config_error(format!("ymax = {} must be positive", self.y_max));
        }
        if self.points < 64 {
            return config_error(format!("points = {} must be at least 64", self.points));
        }
        if !(1..=3).contains(&self.dim) {
            return config_error(format!("dim = {} must be 1, 2 or 3", self.dim));
        }
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return config_error(format!("n = {} must be a finite non-negative number", self.n));
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0 && d.is_finite()) {
                return config_error(format!("delta = {d} must be non-negative"));
            }
        }
        if let Some(p) = self.p {
            if !p.is_finite() {
                return config_error(format!("p = {p} must be finite"));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` rendering of everything that affects results.
    pub fn canonical(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fmt17);
        format!(
            "subcommand = {}\nn = {}\np = {}\ndim = {}\nk = {}\nymax = {}\npoints = {}\ntol = {}\nshoot_tol = {}\ndelta = {}\nformat = {}\n",
            self.subcommand.map_or("none", |s| s.name()),
            fmt17(self.n),
            opt(self.p),
            self.dim,
            self.k,
            fmt17(self.y_max),
            self.points,
            fmt17(self.ivp_tol),
            fmt17(self.shoot_tol),
            opt(self.delta),
            self.format
        )
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            tool: "tfe10",
            version: VERSION,
            subcommand: self.subcommand.map_or("none", |s| s.name()),
            config: self.hash(),
        }
    }
}

/// Defaults overlaid with the file at `path`, validated.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut config = RunConfig::default();
    config.apply_text(&text)?;
    config.validate()?;
    Ok(config)
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config: String,
}

impl Provenance {
    pub fn csv_header(&self) -> String {
        format!("# {} {} subcommand={} config={}\n", self.tool, self.version, self.subcommand, self.config)
    }
}

#[derive(Parser, Debug)]
#[command(name = "tfe10", version, about = "Self-similar solutions of the tenth-order thin film equation")]
struct Args {
    #[arg(value_enum)]
    subcommand: Option<Subcommand>,
    /// Mobility exponent.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<f64>,
    /// Diffusion exponent of the unstable model (default p₀(n)).
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Space dimension N.
    #[arg(long)]
    dim: Option<usize>,
    /// Eigenfunction index; selects one criterion for `verify`.
    #[arg(long)]
    k: Option<usize>,
    /// Grid extent.
    #[arg(long, allow_hyphen_values = true)]
    ymax: Option<f64>,
    /// Grid points (at least 64).
    #[arg(long)]
    points: Option<usize>,
    /// Relative tolerance of the integrator.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Newton tolerance of the shooting residuals.
    #[arg(long = "shoot-tol", allow_hyphen_values = true)]
    shoot_tol: Option<f64>,
    /// Mobility regularization δ.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Output file (default standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// `key = value` file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn resolve(args: &Args) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut c = RunConfig::default();
            c.apply_text(&text)?;
            c
        }
        None => RunConfig::default(),
    };
    if args.subcommand.is_some() {
        config.subcommand = args.subcommand;
    }
    macro_rules! overlay {
        ($($field:ident => $target:ident),*) => {
            $(if let Some(v) = args.$field.clone() { config.$target = v; })*
        };
    }
    overlay!(n => n, dim => dim, k => k, ymax => y_max, points => points, tol => ivp_tol, shoot_tol => shoot_tol, format => format);
    if args.p.is_some() {
        config.p = args.p;
    }
    if args.delta.is_some() {
        config.delta = args.delta;
    }
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Unsupported(_) | Error::Config(_) | Error::SingularExponent { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: String,
    subcommand: &'a str,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("tfe10: {e}");
            return EXIT_USAGE;
        }
    };
    let Some(sub) = config.subcommand else {
        eprintln!("tfe10: missing subcommand (kernel | eigen | shoot | branch | lyapunov | unstable | evolve | verify)");
        return EXIT_USAGE;
    };
    let outcome = match commands::execute(sub, &config) {
        Ok(o) => o,
        Err(e) => {
            let report = ErrorReport { error: e.to_string(), subcommand: sub.name() };
            eprintln!("{}", serde_json::to_string_pretty(&report).unwrap_or_else(|_| e.to_string()));
            return exit_code(&e);
        }
    };
    if let Err(e) = outcome.emit(config.out.as_deref()) {
        eprintln!("tfe10: {e}");
        return EXIT_NUMERICAL;
    }
    if outcome.ok {
        EXIT_OK
    } else {
        if let Some(d) = &outcome.diagnostics {
            eprintln!("{d}");
        }
        EXIT_NUMERICAL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_keeps_defaults() {
        let mut c = RunConfig::default();
        c.apply_text("# nothing here\n\n").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn values_override_defaults() {
        let mut c = RunConfig::default();
        c.apply_text("n = 0.5  # mobility\nformat = json\nshoot-tol = 1e-9").unwrap();
        assert_eq!((c.n, c.format, c.shoot_tol), (0.5, Format::Json, 1e-9));
    }

    #[test]
    fn errors_name_the_line_and_key() {
        let mut c = RunConfig::default();
        let e = c.apply_text("n = 1\npoints = -1").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("64"), "{e}");
        let e = RunConfig::default().apply_text("\nn = abc").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("number"), "{e}");
        let e = RunConfig::default().apply_text("colour = red").unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
    }

    #[test]
    fn hash_tracks_settings_but_not_the_output_path() {
        let a = RunConfig::default();
        let b = RunConfig { out: Some("x.csv".into()), ..RunConfig::default() };
        let c = RunConfig { n: 0.5, ..RunConfig::default() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(["tfe10", "kernel", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["tfe10", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["tfe10"]), EXIT_USAGE);
        assert_eq!(run(["tfe10", "kernel", "--points", "10"]), EXIT_USAGE);
    }
}
