//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check fails (conjecture mismatch, Monte
//! Carlo estimate beyond three standard errors, MUB test failure), 2 on usage
//! or input errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{classify, eigen_equation_residual, ChannelSpec};
use crate::error::{Error, Result};
use crate::geometry::Dims;
use crate::mub::{build_weyl_mubs, is_prime, verify_unbiased, UnbiasedReport};
use crate::rational::{parse_rational, rat, rational_decimal, Rational, DECIMAL_DIGITS};
use crate::regions::{chambers, ClassTag};
use crate::volume::{
    check_conjectures, class_volume_with, is_supported, mc_volume, ratio_row, Limits, McEstimate, NMode,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const CSV_HEADER: [&str; 6] = ["d", "N", "class", "num", "den", "decimal"];

#[derive(Debug, Parser)]
#[command(
    name = "pauli-volume",
    version,
    about = "Exact and Monte Carlo Hilbert-Schmidt volumes of generalized Pauli channels"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

/// Inclusive dimension range given as `5` or `2..5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DRange {
    pub lo: usize,
    pub hi: usize,
}

impl DRange {
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }

    fn is_single(self) -> bool {
        self.lo == self.hi
    }
}

impl FromStr for DRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected `d` or `a..b`, got `{s}`"));
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let range = match s.split_once("..") {
            Some((a, b)) => DRange {
                lo: parse(a)?,
                hi: parse(b.strip_prefix('=').unwrap_or(b))?,
            },
            None => {
                let d = parse(s)?;
                DRange { lo: d, hi: d }
            }
        };
        if range.lo > range.hi {
            return Err(bad());
        }
        Ok(range)
    }
}

impl fmt::Display for DRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct Space {
    /// Dimension, or an inclusive range such as `2..5`.
    #[arg(long)]
    pub d: DRange,
    /// Number of bases: `max` (N = d+1), `d` or `3`.
    #[arg(long, default_value = "max")]
    pub n_mode: NMode,
}

impl Space {
    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.d.iter().map(|d| (d, self.n_mode.n_for(d)))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// V_CP/V_P, V_G/V_CP and V_EB/V_G for each d.
    Ratios {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        output: Output,
    },
    /// Exact volumes of the selected classes.
    Volume {
        #[command(flatten)]
        space: Space,
        /// Comma-separated subset of p, cp, g, eb (default: all).
        #[arg(long = "class", value_delimiter = ',')]
        classes: Vec<ClassTag>,
        #[command(flatten)]
        output: Output,
    },
    /// Class membership of one channel given by its eigenvalues.
    Classify {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "max")]
        n_mode: NMode,
        /// Eigenvalues as `1/2,0,-1/4` or a JSON array such as `["1/2","0"]`.
        #[arg(long, allow_hyphen_values = true)]
        lambdas: String,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo estimates, checked against the exact volume when available.
    Mc {
        #[command(flatten)]
        space: Space,
        #[arg(long = "class", value_delimiter = ',', default_value = "cp")]
        classes: Vec<ClassTag>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Compare computed ratios with their closed forms.
    CheckConjectures {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        output: Output,
    },
    /// Print the integration chambers.
    DumpRegions {
        #[command(flatten)]
        space: Space,
        #[arg(long = "class", value_delimiter = ',', default_value = "cp")]
        classes: Vec<ClassTag>,
        #[command(flatten)]
        output: Output,
    },
    /// Check the Weyl MUBs and the channel eigen-equations.
    MubVerify {
        /// Prime dimension or range; non-prime values in a range are skipped.
        #[arg(long)]
        d: DRange,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::Ratios { output, .. }
            | Command::Volume { output, .. }
            | Command::Classify { output, .. }
            | Command::Mc { output, .. }
            | Command::CheckConjectures { output, .. }
            | Command::DumpRegions { output, .. }
            | Command::MubVerify { output, .. } => output,
        }
    }
}

/// Rendered output plus whether a check failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn passed(text: String) -> Self {
        Self { text, failed: false }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&config).and_then(|outcome| {
        emit(config.command.output(), &outcome.text)?;
        Ok(outcome)
    }) {
        Ok(outcome) if outcome.failed => EXIT_CHECK_FAILED,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ChamberInconsistency { .. } => EXIT_CHECK_FAILED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn emit(output: &Output, text: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn csv_table(rows: &[(usize, usize, String, Rational)]) -> Result<String> {
    let fail = |e: csv::Error| Error::InvalidArgument(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(fail)?;
    for (d, n, class, value) in rows {
        w.write_record([
            d.to_string(),
            n.to_string(),
            class.clone(),
            value.numer().to_string(),
            value.denom().to_string(),
            rational_decimal(value, DECIMAL_DIGITS),
        ])
        .map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json_only(output: &Output, command: &str) -> Result<()> {
    if output.format == Format::Csv {
        return Err(Error::InvalidArgument(format!(
            "`{command}` has no CSV form; CSV is available for ratios, volume and check-conjectures"
        )));
    }
    Ok(())
}

fn validate(limits: &Limits, space: &Space) -> Result<()> {
    for (d, n) in space.pairs() {
        Dims::new(d, n)?;
        limits.check(d, n)?;
    }
    Ok(())
}

fn execute(config: &RunConfig) -> Result<Outcome> {
    let limits = Limits::from_env()?;
    match &config.command {
        Command::Ratios { space, output } => {
            validate(&limits, space)?;
            let rows = space
                .pairs()
                .map(|(d, n)| ratio_row(&limits, d, n))
                .collect::<Result<Vec<_>>>()?;
            let text = match output.format {
                Format::Json => json(&rows)?,
                Format::Csv => csv_table(
                    &rows
                        .iter()
                        .flat_map(|r| {
                            r.entries()
                                .map(|(label, v)| (r.d, r.n, label.to_string(), v.clone()))
                        })
                        .collect::<Vec<_>>(),
                )?,
            };
            Ok(Outcome::passed(text))
        }
        Command::Volume { space, classes, output } => {
            validate(&limits, space)?;
            let classes = if classes.is_empty() { ClassTag::ALL.to_vec() } else { classes.clone() };
            let mut results = Vec::new();
            for (d, n) in space.pairs() {
                for &tag in &classes {
                    results.push(class_volume_with(&limits, d, n, tag)?);
                }
            }
            let text = match output.format {
                Format::Json => json(&results)?,
                Format::Csv => csv_table(
                    &results
                        .iter()
                        .map(|v| (v.d, v.n, v.class_tag.to_string(), v.lambda_volume.clone()))
                        .collect::<Vec<_>>(),
                )?,
            };
            Ok(Outcome::passed(text))
        }
        Command::Classify { d, n_mode, lambdas, output } => {
            json_only(output, "classify")?;
            let n = n_mode.n_for(*d);
            let dims = Dims::new(*d, n)?;
            let values = parse_lambdas(lambdas)?;
            let spec = if values.len() == dims.coords() {
                ChannelSpec::from_free(*d, n, values)?
            } else {
                ChannelSpec::new(*d, n, values)?
            };
            Ok(Outcome::passed(json(&classify(&spec))?))
        }
        Command::Mc { space, classes, samples, seed, output } => {
            json_only(output, "mc")?;
            validate(&limits, space)?;
            let mut reports = Vec::new();
            for (d, n) in space.pairs() {
                for &tag in classes {
                    reports.push(mc_report(&limits, d, n, tag, *samples, *seed)?);
                }
            }
            let failed = reports.iter().any(|r| r.consistent == Some(false));
            Ok(Outcome { text: json(&reports)?, failed })
        }
        Command::CheckConjectures { space, output } => {
            validate(&limits, space)?;
            let report = check_conjectures(&limits, space.d.iter(), space.n_mode)?;
            let text = match output.format {
                Format::Json => json(&report)?,
                Format::Csv => csv_table(
                    &report
                        .rows
                        .iter()
                        .map(|r| {
                            use crate::volume::ExactValue;
                            match &r.computed {
                                ExactValue::Rational(v) => (r.d, r.n, r.relation.to_string(), v.clone()),
                                // surds go out squared so the table stays rational
                                ExactValue::Surd(s) => (r.d, r.n, format!("{}^2", r.relation), s.square()),
                            }
                        })
                        .collect::<Vec<_>>(),
                )?,
            };
            Ok(Outcome { text, failed: !report.all_hold })
        }
        Command::DumpRegions { space, classes, output } => {
            json_only(output, "dump-regions")?;
            validate(&limits, space)?;
            let mut sets = Vec::new();
            for (d, n) in space.pairs() {
                for &tag in classes {
                    sets.push(chambers(d, n, tag)?);
                }
            }
            Ok(Outcome::passed(json(&sets)?))
        }
        Command::MubVerify { d, tolerance, seed, output } => {
            json_only(output, "mub-verify")?;
            let ds: Vec<usize> = if d.is_single() {
                vec![d.lo]
            } else {
                d.iter().filter(|&k| is_prime(k)).collect()
            };
            if ds.is_empty() {
                return Err(Error::Domain(format!("no prime dimension in {d}")));
            }
            let reports = ds
                .into_iter()
                .map(|d| mub_report(d, *tolerance, *seed))
                .collect::<Result<Vec<_>>>()?;
            let failed = reports.iter().any(|r| !r.passed);
            Ok(Outcome { text: json(&reports)?, failed })
        }
    }
}

/// Comma-separated rationals or a JSON array of strings or numbers.
pub fn parse_lambdas(text: &str) -> Result<Vec<Rational>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let items: Vec<serde_json::Value> = serde_json::from_str(trimmed)
            .map_err(|e| Error::InvalidArgument(format!("bad eigenvalue array: {e}")))?;
        items
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                other => Err(Error::ParseRational(other.to_string())),
            })
            .collect()
    } else {
        trimmed.split(',').map(parse_rational).collect()
    }
}

#[derive(Debug, Serialize)]
struct McReport {
    #[serde(flatten)]
    estimate: McEstimate,
    /// Exact volume as a decimal, when chambers exist for `(d, N)`.
    exact: Option<String>,
    sigmas: Option<f64>,
    consistent: Option<bool>,
}

fn mc_report(limits: &Limits, d: usize, n: usize, tag: ClassTag, samples: u64, seed: u64) -> Result<McReport> {
    let estimate = mc_volume(d, n, tag, samples, seed)?;
    if !is_supported(d, n) {
        return Ok(McReport { estimate, exact: None, sigmas: None, consistent: None });
    }
    let exact = class_volume_with(limits, d, n, tag)?;
    let sigmas = estimate.sigmas_from(exact.hs_volume.to_f64());
    Ok(McReport {
        estimate,
        exact: Some(exact.hs_volume_decimal),
        sigmas: Some(sigmas),
        consistent: Some(sigmas <= 3.0),
    })
}

#[derive(Debug, Serialize)]
struct MubReport {
    d: usize,
    unbiased: UnbiasedReport,
    /// Largest eigen-equation residual over a seeded random channel.
    eigen_equation_residual: f64,
    passed: bool,
}

fn mub_report(d: usize, tolerance: f64, seed: u64) -> Result<MubReport> {
    let m = build_weyl_mubs(d)?;
    let unbiased = verify_unbiased(&m, tolerance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = Dims::new(d, d + 1)?;
    let free = (0..dims.coords())
        .map(|_| rat(rng.random_range(-1000..=1000), 1000))
        .collect();
    let channel = ChannelSpec::from_free(d, d + 1, free)?;
    let residual = eigen_equation_residual(&channel, &m)?;
    Ok(MubReport {
        d,
        passed: unbiased.passed && residual <= 1e-9,
        unbiased,
        eigen_equation_residual: residual,
    })
}
