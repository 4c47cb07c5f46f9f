//! The `qinfospec` command line: spectrum curves, rate estimates,
//! verification suites and convergence presets, written as CSV or JSON.
//!
//! Exit codes: 0 success (all checks pass), 1 check failure, 2 usage or
//! input error, 3 capacity error.

mod format;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use qinfospec::engine::{spectrum_curve, Functional, PairSequence};
use qinfospec::io::{load_positive, load_state};
use qinfospec::operator::DensityMatrix;
use qinfospec::rates::{
    entropic_rates, estimate_divergence_rates, fit_inverse_sqrt, relative_entropy, von_neumann_oracle,
    EntropicKind, EntropicSpec, RateEstimate, RateParams, RateQuery, StateSequence, DEFAULT_EPSILON,
    DEFAULT_GAMMA_TOL, SENSITIVITY_EPSILONS,
};
use qinfospec_verify::{render_table, run_suite, CheckDescriptor, CheckReport, VerifyError};

pub use format::num as format_number;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

pub const SPECTRUM_HEADER: &str = "n,gamma,f,functional,engine";
pub const RATE_HEADER: &str = "n,epsilon,sup_thresh,inf_thresh,midpoint,engine,kind";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{flag}: {source}")]
    Input {
        flag: String,
        #[source]
        source: qinfospec::Error,
    },

    #[error(transparent)]
    Core(#[from] qinfospec::Error),

    #[error(transparent)]
    Verify(#[from] VerifyError),

    #[error("{flag} {path}: {source}")]
    Io {
        flag: &'static str,
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let capacity = match self {
            CliError::Input { source, .. } | CliError::Core(source) => source.is_capacity(),
            CliError::Verify(e) => e.is_capacity(),
            _ => false,
        };
        if capacity {
            EXIT_CAPACITY
        } else {
            EXIT_USAGE
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn flag(name: &str) -> impl Fn(qinfospec::Error) -> CliError + '_ {
    move |source| CliError::Input {
        flag: name.to_string(),
        source,
    }
}

#[derive(Parser, Debug)]
#[command(name = "qinfospec", version, about = "Information-spectrum curves, rate estimates and inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tail functional f_n(gamma) on a gamma grid.
    Spectrum(SpectrumArgs),
    /// Finite-n divergence or entropic rate estimates.
    Rate(RateArgs),
    /// Run verification checks and write their reports as JSON.
    Verify(VerifyArgs),
    /// Run a preset convergence experiment against its von Neumann oracle.
    Converge(ConvergeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FunctionalArg {
    Positive,
    Rho,
    Omega,
}

impl From<FunctionalArg> for Functional {
    fn from(f: FunctionalArg) -> Self {
        match f {
            FunctionalArg::Positive => Functional::PositiveTail,
            FunctionalArg::Rho => Functional::RhoTail,
            FunctionalArg::Omega => Functional::OmegaTail,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Entropy,
    Conditional,
    Mutual,
}

impl From<KindArg> for EntropicKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Entropy => EntropicKind::Entropy,
            KindArg::Conditional => EntropicKind::Conditional,
            KindArg::Mutual => EntropicKind::Mutual,
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SpectrumArgs {
    /// State: JSON operator file or builtin (bell, ghz3, maxmixed:<d>, diag:<p,..>, classical:<p,..;p,..>).
    #[arg(long)]
    rho: String,
    /// Reference operator: `identity`, a builtin or a JSON file.
    #[arg(long, default_value = "identity")]
    omega: String,
    /// Blocklengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long)]
    gamma_min: f64,
    #[arg(long)]
    gamma_max: f64,
    #[arg(long, default_value_t = 101)]
    gamma_steps: usize,
    #[arg(long, value_enum, default_value = "positive")]
    functional: FunctionalArg,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[arg(long)]
    rho: String,
    /// Reference operator for a divergence rate; excludes --kind.
    #[arg(long)]
    omega: Option<String>,
    /// Entropic rate; the reference is built from --rho.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Subsystem split such as `A:B` or `A:BC` (entropic kinds only).
    #[arg(long)]
    split: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Threshold level in (0, 1/2); defaults to 0.01.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GAMMA_TOL)]
    gamma_tol: f64,
    /// Tail whose level sets define the thresholds.
    #[arg(long, value_enum, default_value = "positive")]
    functional: FunctionalArg,
    /// Also report epsilon = 0.001 and 0.05.
    #[arg(long)]
    sensitivity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// A check id or `all`.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Blocklength grid override.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA_TOL)]
    gamma_tol: f64,
    /// Output JSON (stdout when omitted; the table then goes to stderr).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Preset {
    /// i.i.d. (0.9, 0.1) against (0.5, 0.5).
    Stein,
    /// Entropy of diag(0.75, 0.25).
    Entropy,
    /// Conditional entropy S(A|B) of a Bell pair.
    BellConditional,
    /// Entropy of the maximally mixed qubit.
    Maxmixed,
}

impl Preset {
    fn default_n_max(self) -> usize {
        match self {
            Preset::Stein | Preset::Entropy => 1000,
            Preset::BellConditional => 6,
            Preset::Maxmixed => 10,
        }
    }
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Replaces `--args-file F` by the flags in `F`, one per line (`--flag value`
/// or `--flag=value`); blank lines and lines starting with `#` are skipped.
fn expand_args_file(argv: Vec<String>) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let path = if a == "--args-file" {
            it.next()
                .ok_or_else(|| CliError::Usage("--args-file needs a file path".into()))?
        } else if let Some(p) = a.strip_prefix("--args-file=") {
            p.to_string()
        } else {
            out.push(a);
            continue;
        };
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            flag: "--args-file",
            path: path.clone(),
            source,
        })?;
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once(char::is_whitespace) {
                Some((f, v)) => {
                    out.push(f.to_string());
                    out.push(v.trim().to_string());
                }
                None => out.push(line.to_string()),
            }
        }
    }
    Ok(out)
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = match expand_args_file(argv.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Spectrum(a) => spectrum(a).map(|_| EXIT_OK),
        Command::Rate(a) => rate(a).map(|_| EXIT_OK),
        Command::Verify(a) => verify(a),
        Command::Converge(a) => converge(a).map(|_| EXIT_OK),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            flag: "--out",
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_n(n: &[usize]) -> Result<()> {
    if n.is_empty() || n.contains(&0) {
        return Err(CliError::Usage(format!("--n: blocklengths must be positive integers, got {n:?}")));
    }
    Ok(())
}

fn gamma_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(CliError::Usage("--gamma-min/--gamma-max must be finite".into()));
    }
    match steps {
        0 => Err(CliError::Usage("--gamma-steps must be >= 1".into())),
        1 => Ok(vec![min]),
        _ if !(min < max) => Err(CliError::Usage(format!(
            "--gamma-min ({min}) must be below --gamma-max ({max})"
        ))),
        _ => Ok((0..steps)
            .map(|k| min + (max - min) * k as f64 / (steps - 1) as f64)
            .collect()),
    }
}

fn spectrum(a: SpectrumArgs) -> Result<()> {
    check_n(&a.n)?;
    let gammas = gamma_grid(a.gamma_min, a.gamma_max, a.gamma_steps)?;
    let (rho, _) = load_state::<f64>(&a.rho).map_err(flag("--rho"))?;
    let omega = load_positive::<f64>(&a.omega, rho.dim()).map_err(flag("--omega"))?;
    let seq = PairSequence::iid_quantum(rho, omega).map_err(flag("--omega"))?;
    let which = Functional::from(a.functional);
    let mut csv = format::Csv::new(SPECTRUM_HEADER);
    for &n in &a.n {
        let curve = spectrum_curve(&seq, n, &gammas, which).map_err(flag("--n"))?;
        for (g, f) in &curve.points {
            csv.row(&[
                n.to_string(),
                format_number(*g),
                format_number(*f),
                which.as_str().to_string(),
                curve.engine.as_str().to_string(),
            ]);
        }
    }
    emit(a.out.as_deref(), &csv.into_string())
}

fn rate_rows(csv: &mut format::Csv, est: &RateEstimate<f64>) {
    for p in &est.per_n {
        csv.row(&[
            p.n.to_string(),
            format_number(p.epsilon),
            format_number(p.sup_thresh),
            format_number(p.inf_thresh),
            format_number(p.midpoint),
            p.engine.as_str().to_string(),
            est.kind.as_str().to_string(),
        ]);
    }
}

fn epsilon_note() {
    eprintln!(
        "note: epsilon = {DEFAULT_EPSILON} is a finite-n convention for the limit levels 0 and 1; \
         vary it with --epsilon or --sensitivity"
    );
}

fn epsilons(base: f64, sensitivity: bool) -> Vec<f64> {
    let mut out = vec![base];
    if sensitivity {
        out.extend(SENSITIVITY_EPSILONS.iter().filter(|&&e| e != base));
    }
    out
}

fn rate(a: RateArgs) -> Result<()> {
    check_n(&a.n)?;
    if a.epsilon.is_none() {
        epsilon_note();
    }
    let params = RateParams {
        epsilon: a.epsilon.unwrap_or(DEFAULT_EPSILON),
        gamma_tol: a.gamma_tol,
        functional: a.functional.into(),
        ..RateParams::default()
    };
    if matches!(a.functional, FunctionalArg::Omega) {
        return Err(CliError::Usage("--functional: rates use the positive or rho tail".into()));
    }
    params.validate().map_err(flag("--epsilon/--gamma-tol"))?;
    let (rho, shape) = load_state::<f64>(&a.rho).map_err(flag("--rho"))?;
    let mut csv = format::Csv::new(RATE_HEADER);
    match (&a.omega, a.kind) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--omega and --kind are mutually exclusive".into()));
        }
        (None, None) => {
            return Err(CliError::Usage(
                "rate needs --omega (divergence rate) or --kind (entropic rate)".into(),
            ));
        }
        (Some(o), None) => {
            if a.split.is_some() {
                return Err(CliError::Usage("--split applies only with --kind".into()));
            }
            let omega = load_positive::<f64>(o, rho.dim()).map_err(flag("--omega"))?;
            let seq = PairSequence::iid_quantum(rho, omega).map_err(flag("--omega"))?;
            for e in epsilons(params.epsilon, a.sensitivity) {
                let q = RateQuery::new(seq.clone(), a.n.clone()).with_params(params.with_epsilon(e));
                rate_rows(&mut csv, &estimate_divergence_rates(&q).map_err(flag("--n"))?);
            }
        }
        (None, Some(k)) => {
            let spec = EntropicSpec::parse(k.into(), shape, a.split.as_deref()).map_err(flag("--split"))?;
            let states = StateSequence::Iid(rho);
            for e in epsilons(params.epsilon, a.sensitivity) {
                let est = entropic_rates(&states, &spec, &a.n, &params.with_epsilon(e)).map_err(flag("--n"))?;
                rate_rows(&mut csv, &est);
            }
        }
    }
    emit(a.out.as_deref(), &csv.into_string())
}

/// Floats rounded to twelve significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(x) if x.is_f64() => {
            let r: f64 = format_number(x.as_f64().expect("f64")).parse().expect("formatted float");
            if let Some(n) = serde_json::Number::from_f64(r) {
                *x = n;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn verify(a: VerifyArgs) -> Result<i32> {
    let desc = CheckDescriptor {
        check_id: a.suite.clone(),
        trials: a.trials,
        dims: a.dims,
        n_grid: a.n,
        seed: a.seed,
        tolerance: a.tolerance,
        epsilon: a.epsilon,
        gamma_tol: a.gamma_tol,
    };
    let reports = run_suite(&a.suite, &desc)?;
    let mut json = serde_json::to_value(&reports).expect("reports serialize");
    round_json(&mut json);
    let text = serde_json::to_string_pretty(&json).expect("json value serializes") + "\n";
    let table = render_table(&reports);
    match &a.out {
        Some(p) => {
            emit(Some(p), &text)?;
            print!("{table}");
        }
        None => {
            print!("{text}");
            eprint!("{table}");
        }
    }
    Ok(suite_exit_code(&reports))
}

fn suite_exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// `1..=min(n_max, 10)`, then the 1-2-5 series up to `n_max`, then `n_max`.
pub fn convergence_grid(n_max: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (1..=n_max.min(10)).collect();
    let mut decade = 10;
    'outer: loop {
        for m in [2, 5, 10] {
            let n = decade * m;
            if n >= n_max {
                break 'outer;
            }
            grid.push(n);
        }
        decade *= 10;
    }
    if grid.last() != Some(&n_max) {
        grid.push(n_max);
    }
    grid
}

fn converge(a: ConvergeArgs) -> Result<()> {
    let n_max = a.n_max.unwrap_or(a.preset.default_n_max());
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be >= 1".into()));
    }
    if a.epsilon.is_none() {
        epsilon_note();
    }
    let grid = convergence_grid(n_max);
    // The rho tail of a uniform spectrum is a single step, so every level
    // set of the maximally mixed preset sits exactly at ln d.
    let functional = match a.preset {
        Preset::Maxmixed => Functional::RhoTail,
        _ => Functional::PositiveTail,
    };
    let params = RateParams::default()
        .with_epsilon(a.epsilon.unwrap_or(DEFAULT_EPSILON))
        .with_functional(functional);
    params.validate().map_err(flag("--epsilon"))?;
    let eps_list = epsilons(params.epsilon, true);

    let (oracle, estimates) = match a.preset {
        Preset::Stein => {
            let (p, q) = (vec![0.9, 0.1], vec![0.5, 0.5]);
            let rp: DensityMatrix<f64> = DensityMatrix::from_probabilities(&p)?;
            let rq: DensityMatrix<f64> = DensityMatrix::from_probabilities(&q)?;
            let oracle = relative_entropy(&rp, &rq)?;
            let seq = PairSequence::iid_classical(p, q)?;
            let est = eps_list
                .iter()
                .map(|&e| {
                    let q = RateQuery::new(seq.clone(), grid.clone()).with_params(params.with_epsilon(e));
                    estimate_divergence_rates(&q).map_err(flag("--n-max"))
                })
                .collect::<Result<Vec<_>>>()?;
            (oracle, est)
        }
        preset => {
            let (source, kind, split) = match preset {
                Preset::Entropy => ("diag:0.75,0.25", EntropicKind::Entropy, None),
                Preset::BellConditional => ("bell", EntropicKind::Conditional, Some("A:B")),
                _ => ("maxmixed:2", EntropicKind::Entropy, None),
            };
            let (rho, shape) = load_state::<f64>(source)?;
            let spec = EntropicSpec::parse(kind, shape, split)?;
            let oracle = von_neumann_oracle(&rho, &spec)?;
            let states = StateSequence::Iid(rho);
            let est = eps_list
                .iter()
                .map(|&e| entropic_rates(&states, &spec, &grid, &params.with_epsilon(e)).map_err(flag("--n-max")))
                .collect::<Result<Vec<_>>>()?;
            (oracle, est)
        }
    };

    let mut csv = format::Csv::new(RATE_HEADER);
    estimates.iter().for_each(|e| rate_rows(&mut csv, e));
    emit(a.out.as_deref(), &csv.into_string())?;

    let name = a.preset.to_possible_value().expect("named preset");
    let mut summary = format!(
        "preset {} ({}): von Neumann oracle {}\n",
        name.get_name(),
        functional.as_str(),
        format_number(oracle)
    );
    for est in &estimates {
        let last = est.per_n.last().expect("nonempty grid");
        let _ = writeln!(
            summary,
            "  epsilon {}: n={} midpoint {} (|midpoint - oracle| = {}), inf {} sup {}",
            format_number(last.epsilon),
            last.n,
            format_number(last.midpoint),
            format_number((last.midpoint - oracle).abs()),
            format_number(last.inf_thresh),
            format_number(last.sup_thresh),
        );
    }
    let mids: Vec<(usize, f64)> = estimates[0].per_n.iter().map(|p| (p.n, p.midpoint)).collect();
    if let Some(fit) = fit_inverse_sqrt(&mids) {
        let _ = writeln!(
            summary,
            "  {} fit midpoint ~ a + b/sqrt(n): a = {}, b = {}",
            fit.label,
            format_number(fit.a),
            format_number(fit.b)
        );
    }
    // with the CSV on stdout the summary moves to stderr
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_reaches_n_max() {
        assert_eq!(convergence_grid(6), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(
            convergence_grid(1000),
            vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 50, 100, 200, 500, 1000]
        );
        assert_eq!(*convergence_grid(300).last().unwrap(), 300);
    }

    #[test]
    fn gamma_grid_is_inclusive() {
        let g = gamma_grid(-1.4, 0.0, 15).unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(g[0], -1.4);
        assert_eq!(g[14], 0.0);
        assert!(gamma_grid(0.0, -1.0, 3).is_err());
    }

    #[test]
    fn args_file_lines_become_flags() {
        let path = std::env::temp_dir().join(format!("qinfospec-args-{}.txt", std::process::id()));
        std::fs::write(&path, "# comment\n--suite lemma1_random\n\n--trials=3\n").unwrap();
        let argv = vec!["qinfospec".into(), "verify".into(), "--args-file".into(), path.display().to_string()];
        let got = expand_args_file(argv).unwrap();
        assert_eq!(got, ["qinfospec", "verify", "--suite", "lemma1_random", "--trials=3"]);
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn any_failing_report_gives_exit_one() {
        let report = |pass| CheckReport {
            check_id: "x".into(),
            pass,
            trials: 1,
            worst_slack: if pass { 0.0 } else { -1.0 },
            tolerance: 1e-9,
            level: qinfospec_verify::Level::Exact,
            witnesses: Vec::new(),
            wall_time_ms: 0,
        };
        assert_eq!(suite_exit_code(&[report(true), report(true)]), EXIT_OK);
        assert_eq!(suite_exit_code(&[report(true), report(false)]), EXIT_CHECK_FAILED);
    }

    #[test]
    fn json_floats_are_rounded() {
        let mut v = serde_json::json!({"x": 0.1234567890123456, "k": 3, "a": [1.0000000000001]});
        round_json(&mut v);
        assert_eq!(v["x"].as_f64().unwrap(), 0.123456789012);
        assert_eq!(v["k"].as_u64().unwrap(), 3);
        assert_eq!(v["a"][0].as_f64().unwrap(), 1.0);
    }
}
