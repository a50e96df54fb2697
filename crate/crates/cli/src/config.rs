//! Command-line flags, the optional TOML config file, and their merge into a
//! validated [`RunConfig`]. Flags win over the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tableau_corners::enumerate::{Family, Statistic};
use tableau_corners::sampler::CACHE_ENV;

use crate::UserError;

#[derive(Debug, Parser)]
#[command(name = "tabcorn", version, about = "Corner statistics of permutation and tree-like tableaux")]
pub struct Cli {
    /// TOML file with defaults for any flag (same key names, underscores).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustive distribution of corners or unrestricted rows.
    Enum {
        /// Sizes: `5`, `1,3,5` or `1..7`.
        #[arg(long, value_parser = parse_size_flag)]
        n: Option<Sizes>,
        #[arg(long, value_parser = parse_family)]
        family: Option<Family>,
        #[arg(long, value_parser = parse_stat)]
        stat: Option<Statistic>,
        #[command(flatten)]
        common: Common,
    },
    /// Generating function of permutation tableaux by corners and unrestricted rows.
    Genfun {
        #[arg(long, value_parser = parse_size_flag)]
        n: Option<Sizes>,
        /// Print the coefficients c_{n,m}(z) of (x-1)^m instead of the monomial table.
        #[arg(long)]
        dump: bool,
        /// Print exact mean and variance per n instead.
        #[arg(long)]
        summary: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Exact standardized moments of the corner count.
    Moments {
        #[arg(long, value_parser = parse_size_flag)]
        n: Option<Sizes>,
        #[arg(long)]
        max_order: Option<usize>,
        /// Print mean and variance as exact fractions.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo corner statistics from the exact uniform sampler.
    Sample {
        #[arg(long, value_parser = parse_size_flag)]
        n: Option<Sizes>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for cached completion tables; also read from SAMPLER_CACHE_DIR.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Exclusion-process state, moves and activity of a tree-like tableau.
    Pasep {
        /// Tableau JSON file.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Rerun the enumeration oracles against the exact pipeline.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<SizesValue>,
    pub family: Option<Family>,
    pub stat: Option<Statistic>,
    pub max_order: Option<usize>,
    pub exact: Option<bool>,
    pub count: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub dump: Option<bool>,
    pub summary: Option<bool>,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum SizesValue {
    One(usize),
    List(Vec<usize>),
    Text(String),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UserError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UserError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UserError(format!("bad config {}: {e}", path.display())))
    }

    fn sizes(&self) -> Result<Option<Vec<usize>>, UserError> {
        match &self.n {
            None => Ok(None),
            Some(SizesValue::One(n)) => Ok(Some(vec![*n])),
            Some(SizesValue::List(v)) => Ok(Some(v.clone())),
            Some(SizesValue::Text(s)) => parse_sizes(s).map(Some).map_err(UserError),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Enum,
    Genfun,
    Moments,
    Sample,
    Pasep,
    Verify,
}

/// Everything a run depends on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: Task,
    pub n: Vec<usize>,
    pub family: Family,
    pub stat: Statistic,
    pub max_order: usize,
    pub exact: bool,
    pub count: u64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub dump: bool,
    pub summary: bool,
    pub input: Option<PathBuf>,
}

pub const DEFAULT_MAX_ORDER: usize = 4;
pub const DEFAULT_COUNT: u64 = 10_000;

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self, UserError> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let file_format = file
            .format
            .as_deref()
            .map(|f| Format::from_str(f, true).map_err(|_| UserError(format!("unknown format {f:?}"))))
            .transpose()?;
        let mut cfg = RunConfig {
            task: Task::Verify,
            n: file.sizes()?.unwrap_or_default(),
            family: file.family.unwrap_or(Family::Permutation),
            stat: file.stat.unwrap_or(Statistic::Corners),
            max_order: file.max_order.unwrap_or(DEFAULT_MAX_ORDER),
            exact: file.exact.unwrap_or(false),
            count: file.count.unwrap_or(DEFAULT_COUNT),
            seed: file.seed.unwrap_or(0),
            format: Format::Csv,
            out: file.out,
            threads: file.threads,
            cache_dir: file
                .cache_dir
                .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)),
            dump: file.dump.unwrap_or(false),
            summary: file.summary.unwrap_or(false),
            input: file.input,
        };
        let (task, common, default_format) = match cli.command {
            Command::Enum { n, family, stat, common } => {
                set(&mut cfg.n, n.map(|s| s.0));
                set(&mut cfg.family, family);
                set(&mut cfg.stat, stat);
                (Task::Enum, common, Format::Csv)
            }
            Command::Genfun { n, dump, summary, common } => {
                set(&mut cfg.n, n.map(|s| s.0));
                cfg.dump |= dump;
                cfg.summary |= summary;
                (Task::Genfun, common, Format::Csv)
            }
            Command::Moments { n, max_order, exact, common } => {
                set(&mut cfg.n, n.map(|s| s.0));
                set(&mut cfg.max_order, max_order);
                cfg.exact |= exact;
                (Task::Moments, common, Format::Csv)
            }
            Command::Sample { n, count, seed, cache_dir, common } => {
                set(&mut cfg.n, n.map(|s| s.0));
                set(&mut cfg.count, count);
                set(&mut cfg.seed, seed);
                if cache_dir.is_some() {
                    cfg.cache_dir = cache_dir;
                }
                (Task::Sample, common, Format::Csv)
            }
            Command::Pasep { input, common } => {
                if input.is_some() {
                    cfg.input = input;
                }
                (Task::Pasep, common, Format::Json)
            }
            Command::Verify { common } => (Task::Verify, common, Format::Text),
        };
        cfg.task = task;
        cfg.format = common.format.or(file_format).unwrap_or(default_format);
        if common.out.is_some() {
            cfg.out = common.out;
        }
        set(&mut cfg.threads, common.threads.map(Some));
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), UserError> {
        let needs_n = matches!(self.task, Task::Enum | Task::Genfun | Task::Moments | Task::Sample);
        if needs_n && self.n.is_empty() {
            return Err(UserError("--n is required".into()));
        }
        if self.task == Task::Pasep && self.input.is_none() {
            return Err(UserError("--in is required".into()));
        }
        if self.dump && self.summary {
            return Err(UserError("--dump and --summary are exclusive".into()));
        }
        if self.threads == Some(0) {
            return Err(UserError("--threads must be at least 1".into()));
        }
        if self.format == Format::Text && self.task != Task::Verify {
            return Err(UserError("text output is only available for verify".into()));
        }
        Ok(())
    }
}

/// A parsed `--n` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

fn parse_size_flag(s: &str) -> Result<Sizes, String> {
    parse_sizes(s).map(Sizes)
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

/// `7`, `1,3,5`, `1..7` (inclusive), or a comma list mixing both.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad size range {part:?}"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad size range {part:?}"))?;
            if a > b {
                return Err(format!("empty size range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad size {part:?}"))?);
        }
    }
    Ok(out)
}

fn parse_family(s: &str) -> Result<Family, String> {
    match s.to_ascii_lowercase().as_str() {
        "permutation" => Ok(Family::Permutation),
        "treelike" | "tree-like" => Ok(Family::Treelike),
        _ => Err(format!("unknown family {s:?} (permutation, treelike)")),
    }
}

fn parse_stat(s: &str) -> Result<Statistic, String> {
    match s.to_ascii_lowercase().as_str() {
        "corners" => Ok(Statistic::Corners),
        "unrestricted" => Ok(Statistic::Unrestricted),
        _ => Err(format!("unknown statistic {s:?} (corners, unrestricted)")),
    }
}
