//! `marginal-udp` command line.
//!
//! Exit codes: 0 on success, 1 on argument or input errors, 2 when a
//! numerical verdict is `INCONCLUSIVE`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::certifier::{certify_with, CertifyOptions, Tolerances, Verdict};
use crate::error::{arg, Error, Result};
use crate::families::{default_verification, FamilyVerification};
use crate::sampling::{haar_state, haar_state_labeled, RandomSource};
use crate::search::{corollary_check_state, survey, CorollaryOptions, CorollaryReport, CorollaryVerdict, SearchOptions};
use crate::states::{marginal_set, parse_config, MarginalSetJson, PureState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "marginal-udp", version, about = "Uniqueness of pure states given two-body marginals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a Haar-random pure state and write it as JSON.
    Sample(SampleArgs),
    /// Reduced density matrices of a state file.
    Marginals(MarginalsArgs),
    /// Certify uniqueness of a four-party state from {AB, CD, X}.
    Certify(CertifyArgs),
    /// Check the explicit counterexample families.
    Families(FamiliesArgs),
    /// Search random states for distinct compatible partners.
    Survey(SurveyArgs),
    /// Reduce n-qubit states to certified four-party constituents.
    Corollary(CorollaryArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output path; standard output when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,2,2,2")]
    dims: Vec<usize>,
    /// Comma-separated labels; A, B, C, ... by default.
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct MarginalsArgs {
    state: PathBuf,
    #[arg(long)]
    config: String,
    /// Accept and rescale states whose norm is off.
    #[arg(long)]
    renormalize: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// State file; a Haar-random four-party state from `--seed` when absent.
    state: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    /// Local dimension of the sampled state.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value = "AB,CD,BD")]
    config: String,
    #[arg(long)]
    renormalize: bool,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 20)]
    oracle_restarts: usize,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    span_tol: Option<f64>,
    #[arg(long)]
    kernel_tol: Option<f64>,
    #[arg(long)]
    root_tol: Option<f64>,
    #[arg(long)]
    full_check_tol: Option<f64>,
    #[arg(long)]
    oracle_residual_tol: Option<f64>,
    #[arg(long)]
    phase_tol: Option<f64>,
    #[arg(long)]
    witness_marginal_tol: Option<f64>,
    #[arg(long)]
    witness_fidelity_tol: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamiliesAction {
    Verify,
}

#[derive(Args, Debug)]
struct FamiliesArgs {
    #[arg(value_enum, default_value = "verify")]
    action: FamiliesAction,
    /// Points on the phase grid.
    #[arg(long, default_value_t = crate::families::DEFAULT_GRID)]
    grid: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SurveyArgs {
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 20)]
    states: usize,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    /// Row k uses seed `seed + k`.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    mismatch_tol: Option<f64>,
    #[arg(long)]
    distinct_gap: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CorollaryArgs {
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Run k uses seed `seed + k`.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    fidelity_tol: Option<f64>,
    #[arg(long)]
    detection_tol: Option<f64>,
    #[command(flatten)]
    out: Output,
}

fn emit(out: &Output, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => arg("--jobs must be positive"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Argument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn read_state(path: &PathBuf, renormalize: bool) -> Result<PureState> {
    PureState::from_json(&fs::read_to_string(path)?, renormalize)
}

fn sample(a: &SampleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut rng = RandomSource::new(a.seed, 0);
    let state = match &a.labels {
        Some(l) => haar_state_labeled(l.clone(), &a.dims, &mut rng)?,
        None => haar_state(&a.dims, &mut rng)?,
    };
    emit(&a.out, &(state.to_json() + "\n"), stdout)?;
    Ok(EXIT_OK)
}

fn marginals(a: &MarginalsArgs, stdout: &mut dyn Write) -> Result<i32> {
    let state = read_state(&a.state, a.renormalize)?;
    let m = marginal_set(&state, &parse_config(&a.config)?)?;
    emit(&a.out, &(serde_json::to_string_pretty(&MarginalSetJson::from(&m))? + "\n"), stdout)?;
    Ok(EXIT_OK)
}

fn certify_cmd(a: &CertifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let state = match &a.state {
        Some(p) => read_state(p, a.renormalize)?,
        None => {
            if a.d < 2 {
                return arg("--d must be at least 2");
            }
            haar_state(&[a.d; 4], &mut RandomSource::new(a.seed, 0))?
        }
    };
    let mut tol = Tolerances::default();
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut tol.gap_tol, a.gap_tol);
    set(&mut tol.span_tol, a.span_tol);
    set(&mut tol.kernel_tol, a.kernel_tol);
    set(&mut tol.compatibility.root_tol, a.root_tol);
    set(&mut tol.compatibility.full_check_tol, a.full_check_tol);
    set(&mut tol.oracle.residual_tol, a.oracle_residual_tol);
    set(&mut tol.phase_tol, a.phase_tol);
    set(&mut tol.witness_marginal, a.witness_marginal_tol);
    set(&mut tol.witness_fidelity, a.witness_fidelity_tol);
    let opts = CertifyOptions {
        seed: a.seed,
        restarts: a.restarts,
        oracle_restarts: a.oracle_restarts,
        tolerances: tol,
        ..CertifyOptions::default()
    };
    let cert = certify_with(&state, &parse_config(&a.config)?, &opts)?;
    emit(&a.out, &(cert.to_json() + "\n"), stdout)?;
    Ok(if cert.verdict == Verdict::Inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

fn families_cmd(a: &FamiliesArgs, stdout: &mut dyn Write) -> Result<i32> {
    let FamiliesAction::Verify = a.action;
    if a.grid < 2 {
        return arg("--grid must be at least 2");
    }
    let rows: Vec<FamilyVerification> = default_verification(a.grid)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| Error::Argument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Argument(e.to_string()))?;
    emit(&a.out, &String::from_utf8_lossy(&bytes), stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SurveyJson<'a> {
    options: SearchOptions,
    restarts: usize,
    rows: &'a [crate::search::SurveyRow],
}

fn survey_cmd(a: &SurveyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = parse_config(&a.config)?;
    let mut opts = SearchOptions::default();
    if let Some(v) = a.mismatch_tol {
        opts.mismatch_tol = v;
    }
    if let Some(v) = a.distinct_gap {
        opts.distinct_gap = v;
    }
    let table = with_jobs(a.jobs, || survey(&config, a.states, a.restarts, a.seed, &opts))??;
    let text = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            String::from_utf8_lossy(&buf).into_owned()
        }
        Format::Json => {
            serde_json::to_string_pretty(&SurveyJson { options: opts, restarts: a.restarts, rows: &table.rows })? + "\n"
        }
    };
    emit(&a.out, &text, stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CorollaryRun {
    seed: u64,
    #[serde(flatten)]
    report: CorollaryReport,
}

#[derive(Serialize)]
struct CorollaryJson {
    options: CorollaryOptions,
    runs: Vec<CorollaryRun>,
}

fn corollary_cmd(a: &CorollaryArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(5..=6).contains(&a.n) {
        return arg("--n must be 5 or 6");
    }
    let mut base = CorollaryOptions::default();
    if let Some(v) = a.fidelity_tol {
        base.fidelity_tol = v;
    }
    if let Some(v) = a.detection_tol {
        base.detection_tol = v;
    }
    let n = a.n;
    let runs = with_jobs(a.jobs, || {
        (0..a.runs as u64)
            .into_par_iter()
            .map(|k| {
                let seed = a.seed + k;
                let state = haar_state(&vec![2; n], &mut RandomSource::new(seed, 0))?;
                let opts = CorollaryOptions { certify: CertifyOptions { seed, ..base.certify }, ..base };
                Ok(CorollaryRun { seed, report: corollary_check_state(&state, &opts)? })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let inconclusive = runs.iter().any(|r| r.report.verdict == CorollaryVerdict::Inconclusive);
    let doc = CorollaryJson { options: base, runs };
    emit(&a.out, &(serde_json::to_string_pretty(&doc)? + "\n"), stdout)?;
    Ok(if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

/// Parses `argv` (program name first) and runs the subcommand, writing
/// results to `stdout` unless `-o` is given and diagnostics to `stderr`.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGUMENT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => sample(a, stdout),
        Command::Marginals(a) => marginals(a, stdout),
        Command::Certify(a) => certify_cmd(a, stdout),
        Command::Families(a) => families_cmd(a, stdout),
        Command::Survey(a) => survey_cmd(a, stdout),
        Command::Corollary(a) => corollary_cmd(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ARGUMENT
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("marginal-udp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_argument_error() {
        let (code, out, err) = call(&["sample", "--seed", "1", "--bogus"]);
        assert_eq!(code, EXIT_ARGUMENT);
        assert!(out.is_empty());
        assert!(err.contains("Usage"));
    }

    #[test]
    fn missing_seed_is_argument_error() {
        assert_eq!(call(&["sample"]).0, EXIT_ARGUMENT);
        assert_eq!(call(&["certify"]).0, EXIT_ARGUMENT);
    }

    #[test]
    fn sample_is_deterministic() {
        let (c1, a, _) = call(&["sample", "--seed", "3"]);
        let (c2, b, _) = call(&["sample", "--seed", "3"]);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        assert!(PureState::from_json(&a, false).is_ok());
    }

    #[test]
    fn certify_reports_unique() {
        let (code, out, _) = call(&["certify", "--seed", "7", "--d", "2", "--config", "AB,CD,BD"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "UNIQUE");
        assert_eq!(v["options"]["tolerances"]["phase_tol"], 1e-6);
    }

    #[test]
    fn bad_config_is_argument_error() {
        let (code, _, err) = call(&["certify", "--seed", "7", "--config", "AB,AC"]);
        assert_eq!(code, EXIT_ARGUMENT);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("certify"));
    }
}
