//! The `rotspec` command line: continued fractions, certified spectra,
//! pseudospectrum grids, butterfly sweeps and convergence studies.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{resolve, CommonFlags, ConfigFile, Format};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rotspec", version, about = "Certified spectra of operators in irrational rotation algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// rational:<p>/<q>, surd:(<a>+<b>*sqrt(<d>))/<c> or decimal:<digits>[@<places>]
    #[arg(long, global = true)]
    pub theta: Option<String>,
    /// Operator spec as inline JSON
    #[arg(long, global = true, conflicts_with = "spec_file")]
    pub spec: Option<String>,
    /// Operator spec read from a JSON file
    #[arg(long, global = true)]
    pub spec_file: Option<PathBuf>,
    /// Output directory [default: rotspec-out]
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Outputs to write (comma separated)
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Worker threads; defaults to the number of cores
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Largest matrix order to build
    #[arg(long, global = true)]
    pub max_q: Option<u64>,
    /// JSON file with defaults for any of the options
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continued-fraction table with convergent gaps
    Expand {
        /// Partial quotients to compute [default: 10]
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Certified spectrum of a normal operator at level n
    Spectrum {
        /// Convergent index n [default: 5]
        #[arg(long)]
        level: Option<usize>,
    },
    /// Pseudospectrum grids of both models with the certified enclosure
    Pseudospectrum {
        /// Convergent index n [default: 5]
        #[arg(long)]
        level: Option<usize>,
        /// Target level, must be positive [default: 0.5]
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        /// re_min,re_max,im_min,im_max
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        /// Grid points per axis [default: 256]
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Eigenvalues at every reduced p/q with q <= q_max
    Butterfly {
        /// Largest denominator [default: 20]
        #[arg(long)]
        q_max: Option<u64>,
    },
    /// One-sided containment at denominators n (comma separated)
    Onesided {
        #[arg(long, value_delimiter = ',')]
        denominators: Vec<u64>,
        /// Level for grids of non-normal models [default: 0.5]
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        /// Grid points per axis for non-normal models [default: 256]
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Certified clouds over a range of levels against the deepest one
    Converge {
        /// a..b, inclusive [default: 3..9]
        #[arg(long)]
        levels: Option<String>,
    },
}

pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let common = resolve(
        CommonFlags {
            theta: cli.theta.as_deref(),
            spec: cli.spec.as_deref(),
            spec_file: cli.spec_file.as_deref(),
            out_dir: cli.out_dir.as_deref(),
            format: &cli.format,
            jobs: cli.jobs,
            max_q: cli.max_q,
        },
        &file,
    )?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Numerical(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Expand { terms } => commands::expand_cmd(&common, &file, *terms),
        Command::Spectrum { level } => commands::spectrum_cmd(&common, &file, *level),
        Command::Pseudospectrum { level, epsilon, region, resolution } => {
            commands::pseudospectrum_cmd(&common, &file, *level, *epsilon, region.as_deref(), *resolution)
        }
        Command::Butterfly { q_max } => commands::butterfly_cmd(&common, &file, *q_max),
        Command::Onesided { denominators, epsilon, resolution } => {
            commands::onesided_cmd(&common, &file, denominators, *epsilon, *resolution)
        }
        Command::Converge { levels } => commands::converge_cmd(&common, &file, levels.as_deref()),
    })
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("rotspec: {e}");
            e.exit_code()
        }
    }
}
