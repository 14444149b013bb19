//! Command-line front end. Every subcommand prints JSON.
//!
//! Exit codes: 0 when the computation ran (whatever the verdicts), 2 for
//! input errors, 3 when an internal invariant check fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{classify, WciSpec};
use crate::census::{run_census, write_census, write_jsonl, CensusBounds};
use crate::error::{Error, Result};
use crate::oracle::{probe_generic, quasi_smooth_probe, wf_witness_search, ProbeOptions, EXHAUSTIVE_LIMIT};
use crate::poly::{parse_poly, Field, PolySystem};
use crate::weights::{parse_int_list, singular_strata, well_form, Stratum, Weights};

/// Seed used for generic members when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wci", version, about = "Classify weighted complete intersections")]
pub struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Emit JSON (the only format; accepted for explicitness).
    #[arg(long, global = true)]
    json: bool,
    /// Progress and timing on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the general member of P(WEIGHTS) cut by the given degrees.
    Analyze {
        weights: String,
        #[arg(long)]
        degrees: String,
    },
    /// Normalize weights to a well-formed representative.
    Wellform { weights: String },
    /// List singular strata of a well-formed space.
    Strata {
        weights: String,
        /// Every singular index set rather than the maximal ones.
        #[arg(long)]
        all: bool,
    },
    /// Search a singular stratum for singular points of the affine cone.
    Witness {
        weights: String,
        #[arg(long)]
        degrees: String,
        #[command(flatten)]
        member: MemberArgs,
        #[arg(long)]
        prime: u64,
        /// Comma-separated coordinate indices; defaults to the largest
        /// maximal singular stratum.
        #[arg(long)]
        stratum: Option<String>,
    },
    /// Look for singular points of the affine cone over finite fields.
    Probe {
        weights: String,
        #[arg(long)]
        degrees: String,
        #[command(flatten)]
        member: MemberArgs,
        #[arg(long, default_value = "3,5,7")]
        primes: String,
        #[arg(long, default_value_t = EXHAUSTIVE_LIMIT)]
        max_points: u64,
        #[arg(long, default_value_t = 64)]
        max_witnesses: usize,
        #[arg(long)]
        allow_bad_characteristic: bool,
    },
    /// Classify every family within the bounds and write JSONL.
    Census(CensusArgs),
}

#[derive(Debug, Args)]
struct MemberArgs {
    /// One polynomial per line (blank lines and lines starting with '#'
    /// are skipped), in the order of the degrees.
    #[arg(long, conflicts_with = "seed")]
    poly_file: Option<PathBuf>,
    /// Seed for the generic member.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct CensusArgs {
    /// JSON file with the bounds; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_weight: Option<u64>,
    #[arg(long)]
    max_weight_sum: Option<u64>,
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long)]
    max_degree: Option<u64>,
    #[arg(long)]
    require_non_linear_cone: bool,
    #[arg(long)]
    min_dim: Option<usize>,
    /// Spot-probe consistent families over finite fields.
    #[arg(long)]
    probe: bool,
    #[arg(long, default_value = "3,5,7")]
    probe_primes: String,
    #[arg(long, default_value_t = 100_000)]
    probe_max_points: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let result = dispatch(&cli, stdout, stderr);
    if cli.verbose {
        let _ = writeln!(stderr, "finished in {:.3}s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit<T: Serialize>(cli: &Cli, value: &T, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(e.to_string()))? + "\n";
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn load_system(spec: &WciSpec, member: &MemberArgs, field: Field) -> Result<Option<PolySystem>> {
    let Some(path) = &member.poly_file else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.len() != spec.k() {
        return Err(Error::InvalidSpec(format!(
            "{} polynomials in {}, expected {}",
            lines.len(),
            path.display(),
            spec.k()
        )));
    }
    let polys = lines
        .iter()
        .zip(&spec.degrees)
        .map(|(l, &d)| parse_poly(l, &spec.weights, field)?.with_degree(d as i64))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(PolySystem::new(polys)?))
}

fn parse_primes(s: &str) -> Result<Vec<u32>> {
    parse_int_list(s)?
        .into_iter()
        .map(|p| Field::prime(p).map(|_| p as u32))
        .collect()
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Analyze { weights, degrees } => {
            let spec = WciSpec::parse(weights, degrees)?;
            emit(cli, &classify(&spec), stdout)?;
        }
        Command::Wellform { weights } => {
            let w: Weights = weights.parse()?;
            let (r, trace) = well_form(&w);
            if trace.replay(&w)? != r {
                return Err(Error::Invariant("normalization trace does not replay".into()));
            }
            emit(cli, &json!({ "weights": r.to_string(), "trace": trace }), stdout)?;
        }
        Command::Strata { weights, all } => {
            let w: Weights = weights.parse()?;
            let strata = singular_strata(&w, !all)?;
            emit(cli, &json!({ "weights": w.to_string(), "strata": strata }), stdout)?;
        }
        Command::Witness {
            weights,
            degrees,
            member,
            prime,
            stratum,
        } => {
            let spec = WciSpec::parse(weights, degrees)?;
            Field::prime(*prime)?;
            let p = *prime as u32;
            let sys = match load_system(&spec, member, Field::Rational)? {
                Some(s) => s,
                None => PolySystem::generic(&spec.weights, &spec.degrees, p, member.seed.unwrap_or(DEFAULT_SEED))?,
            };
            let stratum = match stratum {
                Some(j) => {
                    let idx = parse_int_list(j)
                        .map_err(|_| Error::InvalidStratum(format!("bad index list {j:?}")))?;
                    Stratum::new(&spec.weights, &idx.iter().map(|&i| i as usize).collect::<Vec<_>>())?
                }
                None => singular_strata(&spec.weights, true)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::InvalidStratum(format!("P({}) has no singular strata", spec.weights)))?,
            };
            let report = wf_witness_search(&spec, &sys, &stratum, p)?;
            if cli.verbose {
                let _ = writeln!(
                    stderr,
                    "r = {}, |Z \\ 0| = {}, |S| = {}",
                    report.r,
                    report.z_points.len(),
                    report.s_points.len()
                );
            }
            emit(cli, &report, stdout)?;
        }
        Command::Probe {
            weights,
            degrees,
            member,
            primes,
            max_points,
            max_witnesses,
            allow_bad_characteristic,
        } => {
            let spec = WciSpec::parse(weights, degrees)?;
            let opts = ProbeOptions {
                primes: parse_primes(primes)?,
                max_points: *max_points,
                seed: member.seed.unwrap_or(DEFAULT_SEED),
                allow_bad_characteristic: *allow_bad_characteristic,
                max_witnesses: *max_witnesses,
            };
            let verdict = match load_system(&spec, member, Field::Rational)? {
                Some(sys) => quasi_smooth_probe(&sys, &opts)?,
                None => probe_generic(&spec, &opts)?,
            };
            emit(cli, &verdict, stdout)?;
        }
        Command::Census(args) => return census(cli, args, stdout, stderr),
    }
    Ok(EXIT_OK)
}

fn census_bounds(args: &CensusArgs) -> Result<CensusBounds> {
    let mut b = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidBounds(format!("{}: {e}", path.display())))?
        }
        None => CensusBounds {
            max_n: 0,
            max_weight: 0,
            max_weight_sum: 0,
            max_k: 0,
            max_degree: 0,
            require_non_linear_cone: false,
            min_dim: 0,
        },
    };
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = args.$f { b.$f = v; } )* };
    }
    set!(max_n, max_weight, max_weight_sum, max_k, max_degree, min_dim);
    b.require_non_linear_cone |= args.require_non_linear_cone;
    b.validate()?;
    Ok(b)
}

fn census(cli: &Cli, args: &CensusArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let bounds = census_bounds(args)?;
    let probe = args
        .probe
        .then(|| -> Result<ProbeOptions> {
            Ok(ProbeOptions {
                primes: parse_primes(&args.probe_primes)?,
                max_points: args.probe_max_points,
                seed: args.seed,
                ..ProbeOptions::default()
            })
        })
        .transpose()?;
    if let Some(path) = &cli.output {
        check_writable(path)?;
    }
    let out = run_census(&bounds, probe.as_ref())?;
    if cli.verbose {
        let _ = writeln!(stderr, "{} records", out.summary.records);
    }
    match &cli.output {
        Some(path) => write_census(&out, path)?,
        None => {
            write_jsonl(&out.records, &mut *stdout)?;
            let summary = serde_json::to_string(&out.summary).map_err(|e| Error::Invariant(e.to_string()))?;
            let _ = writeln!(stderr, "{summary}");
        }
    }
    if !out.summary.structure_violations.is_empty() || !out.summary.refutations.is_empty() {
        let _ = writeln!(
            stderr,
            "internal invariant violated: {:?} {:?}",
            out.summary.structure_violations, out.summary.refutations
        );
        return Ok(EXIT_INTERNAL);
    }
    Ok(EXIT_OK)
}

// Fail before a long run rather than after it.
fn check_writable(path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(Error::Io(format!("output directory {} does not exist", dir.display())));
    }
    if path.is_dir() {
        return Err(Error::Io(format!("output path {} is a directory", path.display())));
    }
    Ok(())
}
