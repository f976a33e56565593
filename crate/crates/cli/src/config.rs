//! Run configuration: flags over the JSON config file over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rotspec::approx::DEFAULT_MAX_Q;
use rotspec::{OperatorSpec, RealNumberInput};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

/// Mirror of the command-line options; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub theta: Option<String>,
    pub spec: Option<serde_json::Value>,
    pub spec_file: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    pub jobs: Option<usize>,
    pub max_q: Option<u64>,
    pub terms: Option<usize>,
    pub level: Option<usize>,
    pub epsilon: Option<f64>,
    pub resolution: Option<usize>,
    pub region: Option<[f64; 4]>,
    pub q_max: Option<u64>,
    pub denominators: Option<Vec<u64>>,
    pub levels: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Options shared by every subcommand, after resolution.
#[derive(Debug)]
pub struct Common {
    pub theta: RealNumberInput,
    pub spec: OperatorSpec,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub jobs: Option<usize>,
    pub max_q: u64,
}

impl Common {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

pub const DEFAULT_OUT_DIR: &str = "rotspec-out";

pub fn parse_theta(s: &str) -> Result<RealNumberInput, CliError> {
    s.parse().map_err(|e| CliError::Input(format!("--theta: {e}")))
}

pub fn parse_spec(json: &str) -> Result<OperatorSpec, CliError> {
    serde_json::from_str(json).map_err(|e| CliError::Input(format!("operator spec: {e}")))
}

fn read_spec_file(path: &Path) -> Result<OperatorSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_spec(&text)
}

pub struct CommonFlags<'a> {
    pub theta: Option<&'a str>,
    pub spec: Option<&'a str>,
    pub spec_file: Option<&'a Path>,
    pub out_dir: Option<&'a Path>,
    pub format: &'a [Format],
    pub jobs: Option<usize>,
    pub max_q: Option<u64>,
}

pub fn resolve(flags: CommonFlags<'_>, file: &ConfigFile) -> Result<Common, CliError> {
    let theta = match flags.theta.map(str::to_owned).or_else(|| file.theta.clone()) {
        Some(s) => parse_theta(&s)?,
        None => RealNumberInput::golden(),
    };
    // a spec given on the command line, in either form, shadows the config file
    let spec = if let Some(s) = flags.spec {
        parse_spec(s)?
    } else if let Some(p) = flags.spec_file {
        read_spec_file(p)?
    } else if let Some(v) = &file.spec {
        serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("operator spec: {e}")))?
    } else if let Some(p) = &file.spec_file {
        read_spec_file(p)?
    } else {
        OperatorSpec::almost_mathieu(1.0)
    };
    let formats = if !flags.format.is_empty() {
        flags.format.to_vec()
    } else {
        file.format.clone().unwrap_or_else(|| vec![Format::Csv, Format::Json])
    };
    let jobs = flags.jobs.or(file.jobs);
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let max_q = flags.max_q.or(file.max_q).unwrap_or(DEFAULT_MAX_Q);
    if max_q == 0 {
        return Err(CliError::Usage("--max-q must be at least 1".into()));
    }
    Ok(Common {
        theta,
        spec,
        out_dir: flags.out_dir.map(Path::to_path_buf).or_else(|| file.out_dir.clone()).unwrap_or(DEFAULT_OUT_DIR.into()),
        formats,
        jobs,
        max_q,
    })
}

/// `a..b` or `a..=b`, both inclusive, or a single level.
pub fn parse_levels(s: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse level range '{s}'; expected a..b"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let range = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let n = num(s)?;
            n..=n
        }
    };
    if *range.start() == 0 || range.start() > range.end() {
        return Err(bad());
    }
    Ok(range)
}
