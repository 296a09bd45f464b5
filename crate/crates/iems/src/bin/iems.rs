//! Command-line front end for the IEMS scheme toolkit.
//!
//! Subcommands: `scheme` (coefficient triads), `indicators` (σ_F, σ_E,
//! λ_I, 𝔍), `sweep` (parameter studies), `verify-toeplitz` (spectral
//! bounds), `curves` (θ-samples of the indicator integrands), `converge`
//! (temporal-order measurement on test problems), and `tables` (computed
//! vs closed-form indicator tables). Exit codes: 0 success, 1 usage or
//! config error, 2 numerical failure.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use iems::integrator::{
    convergence_study, preset, problem_from_json, stability_threshold_check, IntegratorError,
    ProblemSpec,
};
use iems::kernels::toeplitz_verify;
use iems::reference::{closed_forms, FormValue};
use iems::schemes::{make_scheme, param_range, Family, SchemeTriad};
use iems::symbolcalc::{indicator_sweep, indicators, theta_curves, IndicatorReport, DEFAULT_GRID};

/// Errors that map to exit code 1 (usage/config) vs 2 (numerical).
enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Numerical(_) => ExitCode::from(2),
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "iems",
    about = "Implicit-explicit multistep scheme analysis and integration",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Scheme selector shared by most subcommands.
#[derive(Args)]
struct SchemeArgs {
    /// Scheme family: wbdf | mbdf | gbdf | nimex | siems | bdf.
    #[arg(long)]
    family: String,
    /// Step count k.
    #[arg(long)]
    k: usize,
    /// Family parameter (α, s, β, δ, γ); defaults to a representative
    /// in-range value, ignored for bdf.
    #[arg(long)]
    param: Option<f64>,
}

impl SchemeArgs {
    fn build(&self) -> Result<SchemeTriad, CliError> {
        let family = Family::parse(&self.family)
            .ok_or_else(|| CliError::Usage(format!("unknown family '{}'", self.family)))?;
        let param = self
            .param
            .unwrap_or_else(|| iems::schemes::representative_param(family, self.k));
        make_scheme(family, self.k, param).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient triad of a scheme as JSON.
    Scheme(SchemeArgs),
    /// Compute the stability indicators of a scheme.
    Indicators {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Number of θ-sampling intervals on [0, π].
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Sweep the family parameter and report indicator extrema.
    Sweep {
        /// Scheme family.
        #[arg(long)]
        family: String,
        /// Step count k.
        #[arg(long)]
        k: usize,
        /// Parameter grid as lo:hi:n (n equally spaced values).
        #[arg(long = "param-grid")]
        param_grid: String,
        /// Optional CSV output path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the Toeplitz spectral bounds at size n.
    VerifyToeplitz {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Toeplitz size.
        #[arg(long, default_value_t = 128)]
        n: usize,
    },
    /// Emit θ-samples of 1/|a|, |c/a|, Re[b/a] as CSV.
    Curves {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Number of sample points on [0, π].
        #[arg(long, default_value_t = 513)]
        grid: usize,
        /// Optional CSV output path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a convergence study on a test problem.
    Converge {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Problem preset: p1 | p2 | p3.
        #[arg(long, default_value = "p1")]
        problem: String,
        /// JSON problem config path (overrides --problem).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated step sizes; default T/80,T/160,T/320,T/640.
        #[arg(long)]
        tau: Option<String>,
        /// Slope tolerance as a fraction of k.
        #[arg(long, default_value_t = 0.2)]
        tol: f64,
        /// Optional CSV output path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate computed indicators against closed forms.
    Tables {
        /// Scheme family.
        #[arg(long)]
        family: String,
        /// Restrict to one order (default: all orders of the family).
        #[arg(long)]
        k: Option<usize>,
        /// Single parameter value (default: a documented grid).
        #[arg(long)]
        param: Option<f64>,
        /// Optional CSV output path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn indicator_json(r: &IndicatorReport) -> serde_json::Value {
    serde_json::json!({
        "sigma_f": r.sigma_f,
        "sigma_e": r.sigma_e,
        "lambda_i": r.lambda_i,
        "intensity": r.intensity,
        "theta_f": r.theta_f,
        "theta_e": r.theta_e,
        "theta_i": r.theta_i,
        "grid_size": r.grid_size,
        "refined": r.refined,
    })
}

fn parse_param_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("param grid '{s}' is not lo:hi:n")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| CliError::Usage(format!("bad lo in '{s}'")))?;
    let hi: f64 = parts[1].parse().map_err(|_| CliError::Usage(format!("bad hi in '{s}'")))?;
    let n: usize = parts[2].parse().map_err(|_| CliError::Usage(format!("bad n in '{s}'")))?;
    if n < 1 || hi < lo {
        return Err(CliError::Usage(format!("empty param grid '{s}'")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn load_problem(problem: &str, config: &Option<PathBuf>) -> Result<ProblemSpec, CliError> {
    match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            problem_from_json(&text).map_err(|e| CliError::Usage(e.to_string()))
        }
        None => preset(problem).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn form_columns(form: Option<FormValue>) -> (String, String) {
    match form {
        Some(FormValue::Exact(v)) => (format!("{v:.12}"), String::new()),
        Some(FormValue::Bounds(lo, hi)) => (String::new(), format!("[{lo:.12};{hi:.12}]")),
        None => (String::new(), String::new()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scheme(args) => {
            let scheme = args.build()?;
            println!("{}", serde_json::to_string_pretty(&scheme.to_json()).unwrap());
            Ok(())
        }
        Command::Indicators { scheme, grid } => {
            let s = scheme.build()?;
            let r = indicators(&s, grid).map_err(|e| CliError::Numerical(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&indicator_json(&r)).unwrap());
            Ok(())
        }
        Command::Sweep { family, k, param_grid, out } => {
            let fam = Family::parse(&family)
                .ok_or_else(|| CliError::Usage(format!("unknown family '{family}'")))?;
            let grid = parse_param_grid(&param_grid)?;
            let sweep =
                indicator_sweep(fam, k, &grid).map_err(|e| CliError::Numerical(e.to_string()))?;
            let mut text = String::from("param,sigma_f,sigma_e,lambda_i,intensity\n");
            for (p, r) in &sweep.entries {
                text.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    p, r.sigma_f, r.sigma_e, r.lambda_i, r.intensity
                ));
            }
            text.push_str(&format!(
                "# max lambda_i = {:.12} at param {:.6}\n# max intensity = {:.12} at param {:.6}\n",
                sweep.max_lambda, sweep.argmax_lambda, sweep.max_intensity, sweep.argmax_intensity
            ));
            write_out(&out, &text)
        }
        Command::VerifyToeplitz { scheme, n } => {
            let s = scheme.build()?;
            let ind =
                indicators(&s, DEFAULT_GRID).map_err(|e| CliError::Numerical(e.to_string()))?;
            let rep =
                toeplitz_verify(&s, n, &ind).map_err(|e| CliError::Numerical(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
            if rep.bounds_hold {
                Ok(())
            } else {
                Err(CliError::Numerical(format!("spectral bounds violated at n = {n}")))
            }
        }
        Command::Curves { scheme, grid, out } => {
            let s = scheme.build()?;
            let curves =
                theta_curves(&s, grid).map_err(|e| CliError::Numerical(e.to_string()))?;
            write_out(&out, &curves.to_csv())
        }
        Command::Converge { scheme, problem, config, tau, tol, out } => {
            let s = scheme.build()?;
            let prob = load_problem(&problem, &config)?;
            let taus: Vec<f64> = match tau {
                Some(list) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Usage(format!("bad tau '{t}'")))
                    })
                    .collect::<Result<_, _>>()?,
                None => [80.0, 160.0, 320.0, 640.0]
                    .iter()
                    .map(|d| prob.t_final / d)
                    .collect(),
            };
            let threshold = stability_threshold_check(&prob, &s)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            if !threshold.satisfied {
                if let Some(reason) = &threshold.reason {
                    eprintln!(
                        "warning: intensity {:.4} vs threshold {:.4} — {}",
                        threshold.intensity, threshold.threshold, reason
                    );
                }
            }
            let study = convergence_study(&prob, &s, &taus).map_err(|e| match e {
                IntegratorError::BlowUp { .. } | IntegratorError::Numeric(_) => {
                    CliError::Numerical(e.to_string())
                }
                other => CliError::Usage(other.to_string()),
            })?;
            write_out(&out, &study.to_csv())?;
            if study.blowups == taus.len() {
                return Err(CliError::Numerical("all runs blew up".into()));
            }
            match study.slope {
                Some(slope) => {
                    let target = s.k as f64;
                    let ok = (slope - target).abs() <= tol * target;
                    println!(
                        "slope {:.3} target {:.0} {}",
                        slope,
                        target,
                        if ok { "PASS" } else { "FAIL" }
                    );
                    if ok {
                        Ok(())
                    } else {
                        Err(CliError::Numerical(format!(
                            "slope {slope:.3} outside ±{:.0}% of {target}",
                            tol * 100.0
                        )))
                    }
                }
                None => Err(CliError::Numerical("too few completed runs for a slope".into())),
            }
        }
        Command::Tables { family, k, param, out } => {
            let fam = Family::parse(&family)
                .ok_or_else(|| CliError::Usage(format!("unknown family '{family}'")))?;
            let (kmin, kmax) = fam
                .k_range()
                .ok_or_else(|| CliError::Usage(format!("family '{family}' has no catalog range")))?;
            let orders: Vec<usize> = match k {
                Some(kk) if kk >= kmin && kk <= kmax => vec![kk],
                Some(kk) => {
                    return Err(CliError::Usage(format!(
                        "k = {kk} outside [{kmin}, {kmax}] for {family}"
                    )))
                }
                None => (kmin..=kmax).collect(),
            };
            let mut text = String::from(
                "family,k,param,sigma_f,sigma_e,lambda_i,intensity,\
                 form_sigma_f,form_sigma_e,form_lambda_i,form_intensity,\
                 bounds_lambda_i,bounds_intensity,max_discrepancy\n",
            );
            for kk in orders {
                let params: Vec<f64> = match param {
                    Some(p) => vec![p],
                    None => match param_range(fam, kk) {
                        Some((lo, hi)) => {
                            (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
                        }
                        None => vec![0.0],
                    },
                };
                for p in params {
                    let scheme = make_scheme(fam, kk, p)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    let r = indicators(&scheme, DEFAULT_GRID)
                        .map_err(|e| CliError::Numerical(e.to_string()))?;
                    let forms = closed_forms(fam, kk, p);
                    let mut disc = 0.0f64;
                    for (form, value) in [
                        (forms.sigma_f, r.sigma_f),
                        (forms.sigma_e, r.sigma_e),
                        (forms.lambda_i, r.lambda_i),
                        (forms.intensity, r.intensity),
                    ] {
                        if let Some(FormValue::Exact(x)) = form {
                            disc = disc.max((value - x).abs());
                        }
                    }
                    let (ef, _) = form_columns(forms.sigma_f);
                    let (ee, _) = form_columns(forms.sigma_e);
                    let (el, bl) = form_columns(forms.lambda_i);
                    let (ej, bj) = form_columns(forms.intensity);
                    text.push_str(&format!(
                        "{},{},{:.6},{:.12},{:.12},{:.12},{:.12},{},{},{},{},{},{},{:.3e}\n",
                        fam.name(),
                        kk,
                        p,
                        r.sigma_f,
                        r.sigma_e,
                        r.lambda_i,
                        r.intensity,
                        ef,
                        ee,
                        el,
                        ej,
                        bl,
                        bj,
                        disc
                    ));
                }
            }
            write_out(&out, &text)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("IMEX_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
