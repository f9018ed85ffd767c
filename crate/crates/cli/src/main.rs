mod args;

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;
use coefasym_core::asymptotics::{estimate_general_with, AsymptoticEstimate, EstimateMethod, CSV_ESTIMATE_LIMIT};
use coefasym_core::charfn::{CharFn, CharFnSample, DEFAULT_CHARFN_TOL};
use coefasym_core::diagnostics::{clt_report_at_n, clt_report_with, CltReport};
use coefasym_core::saddle::{solve_saddle, tau_n, SaddleSolution};
use coefasym_core::series_core::ln_biguint;
use coefasym_core::{
    closed_form_q, distinct_partition_counts, estimate, expand_product, fmt_sig17, Error, FactorFamily, RadialParam,
};

use args::{Cli, Command, Diagnose, FamilySpec, MethodArg};

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|csv| emit(&cli, &csv)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: usage: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, csv: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| Failure::Domain(e.into())),
        None => std::io::stdout().write_all(csv.as_bytes()).map_err(|e| Failure::Domain(e.into())),
    }
}

fn load_family(spec: &FamilySpec) -> Result<FactorFamily, Error> {
    match spec {
        FamilySpec::Distinct => Ok(FactorFamily::DistinctParts),
        FamilySpec::Geometric => Ok(FactorFamily::GeometricParts),
        FamilySpec::Custom(path) => FactorFamily::from_json_path(path),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let family = load_family(&cli.family)?;
    let mut out = String::new();
    let common = format!("family={} tol={:e} quad_tol={:e}", cli.family, cli.tol, cli.quad_tol);
    match &cli.command {
        Command::Exact(a) => {
            let _ = writeln!(out, "# config: command=exact {common} n_max={}", a.n_max);
            out.push_str("n,coefficient\n");
            let table = expand_product(&family, a.n_max)?;
            for n in 0..=a.n_max {
                let _ = writeln!(out, "{n},{}", table.display(n).expect("n within table"));
            }
        }
        Command::Estimate(a) => {
            let method = match a.method {
                MethodArg::General => EstimateMethod::GeneralSaddle,
                MethodArg::Equivalents => EstimateMethod::Equivalents,
                MethodArg::Closed => EstimateMethod::ClosedForm,
            };
            let _ = writeln!(out, "# config: command=estimate {common} n={} method={method}", a.n);
            out.push_str(AsymptoticEstimate::<f64>::CSV_HEADER);
            out.push('\n');
            let est = match method {
                EstimateMethod::GeneralSaddle => estimate_general_with::<f64>(&family, a.n, cli.tol)?,
                _ => estimate::<f64>(&family, a.n, method)?,
            };
            out.push_str(&est.csv_row());
            out.push('\n');
        }
        Command::Compare(a) => {
            if a.n_max < a.start {
                return Err(Failure::Usage(format!("--n-max {} is below --start {}", a.n_max, a.start)));
            }
            if !matches!(family, FactorFamily::DistinctParts) {
                return Err(Error::Unsupported(format!("compare uses the closed form for distinct parts, not {family}")).into());
            }
            let stride = a.geometric_stride.map_or_else(|| "none".to_string(), |s| s.to_string());
            let _ = writeln!(
                out,
                "# config: command=compare {common} n_max={} start={} geometric_stride={stride}",
                a.n_max, a.start
            );
            out.push_str("n,exact,estimate_closed,ratio\n");
            let counts = distinct_partition_counts(usize::try_from(a.n_max).map_err(|_| Failure::Usage("--n-max too large".into()))?);
            let mut n = a.start;
            while n <= a.n_max {
                let exact = &counts[n as usize];
                let closed = closed_form_q::<f64>(n)?;
                let est = closed.log_estimate.exp();
                let est = if est.is_finite() && est <= CSV_ESTIMATE_LIMIT { fmt_sig17(est) } else { String::new() };
                let ratio = (ln_biguint(exact) - closed.log_estimate).exp();
                let _ = writeln!(out, "{n},{exact},{est},{}", fmt_sig17(ratio));
                n = match a.geometric_stride {
                    Some(s) => match n.checked_mul(s) {
                        Some(next) => next,
                        None => break,
                    },
                    None => n + 1,
                };
            }
        }
        Command::Saddle(a) => {
            let _ = writeln!(out, "# config: command=saddle {common} n={} exact={}", a.n, a.exact);
            out.push_str(SaddleSolution::<f64>::CSV_HEADER);
            out.push('\n');
            let sol = if a.exact {
                solve_saddle::<f64>(&family, a.n, cli.tol)?
            } else if matches!(family, FactorFamily::DistinctParts) {
                tau_n::<f64>(a.n)?
            } else {
                return Err(Error::Unsupported(format!(
                    "the closed-form saddle is specific to distinct parts; use --exact for {family}"
                ))
                .into());
            };
            out.push_str(&sol.csv_row());
            out.push('\n');
        }
        Command::Charfn(a) => {
            let _ = writeln!(
                out,
                "# config: command=charfn {common} r={:e} theta_max={:e} points={} charfn_tol={:e}",
                a.r, a.theta_max, a.points, DEFAULT_CHARFN_TOL
            );
            out.push_str(CharFnSample::<f64>::CSV_HEADER);
            out.push('\n');
            let rp = RadialParam::from_r(a.r)?;
            let cf = CharFn::new(&family, &rp, DEFAULT_CHARFN_TOL)?;
            let last = (a.points - 1) as f64;
            for i in 0..a.points {
                let theta = if i + 1 == a.points { a.theta_max } else { a.theta_max * i as f64 / last };
                out.push_str(&cf.phi_z(theta).csv_row());
                out.push('\n');
            }
        }
        Command::Diagnose(Diagnose::Clt(a)) => {
            let grid = match &a.n_grid {
                Some(ns) => format!("n_grid={}", join(ns)),
                None => format!("r_grid={}", join(&a.r_grid)),
            };
            let _ = writeln!(out, "# config: command=diagnose_clt {common} {grid}");
            out.push_str(CltReport::<f64>::CSV_HEADER);
            out.push('\n');
            match &a.n_grid {
                Some(ns) => {
                    for &n in ns {
                        out.push_str(&clt_report_at_n::<f64>(&family, n, cli.quad_tol)?.csv_row());
                        out.push('\n');
                    }
                }
                None => {
                    for &r in &a.r_grid {
                        let rp = RadialParam::from_r(r)?;
                        out.push_str(&clt_report_with(&family, &rp, cli.quad_tol, None)?.csv_row());
                        out.push('\n');
                    }
                }
            }
        }
    }
    Ok(out)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
