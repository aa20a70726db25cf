//! Command-line front end. Inputs arrive as inline JSON or @file references,
//! reports leave as JSON (default), a flat table, or CSV. Exit codes: 0 for
//! success or a PASS verdict, 1 for FAIL, 2 for errors of any kind, 3 for
//! UNDETERMINED or NOT_APPLICABLE verdicts.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use koenigslab_core::disc::{self, TaylorSeries};
use koenigslab_core::koenigs::{self, spectral};
use koenigslab_core::selftest;
use koenigslab_core::series::DirichletSeries;
use koenigslab_core::shifts::{self, ClassMode, WeightFamily};
use koenigslab_core::symbols::Symbol;
use koenigslab_core::{criteria, Cplx, Status, Verdict};

#[derive(Parser)]
#[command(
    name = "koenigslab",
    version,
    about = "Conjugacies, spectra, and commutant structure for composition \
             operators on truncated Dirichlet and Taylor series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Dirichlet truncation N; series and symbols are resized to it
    #[arg(long, global = true, default_value_t = 64)]
    trunc: usize,
    /// Taylor degree cap M for the disc subcommands
    #[arg(long = "taylor-trunc", global = true, default_value_t = 32)]
    taylor_trunc: usize,
    /// Tolerance for iterative schemes
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Iteration cap for fixed-point schemes
    #[arg(long = "max-iter", global = true, default_value_t = 10_000)]
    max_iter: usize,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Recurrence,
    Iterative,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ClosedForm,
    FiniteHorizon,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the conjugacy equation for a symbol
    Koenigs {
        /// Symbol as inline JSON or @file
        #[arg(long)]
        symbol: String,
        #[arg(long, value_enum, default_value_t = SchemeArg::Recurrence)]
        scheme: SchemeArg,
    },
    /// Spectrum of the composition operator of a symbol
    Spectrum {
        #[arg(long)]
        symbol: String,
        /// Enumerate point spectrum up to this index (default: truncation)
        #[arg(long = "m-max")]
        m_max: Option<u64>,
    },
    /// Commuting companion symbol with the given characteristic
    Companion {
        #[arg(long)]
        symbol: String,
        #[arg(short, long)]
        characteristic: u64,
    },
    /// Apply the resolvent (C_phi - lambda)^-1 to a series
    Resolvent {
        #[arg(long)]
        symbol: String,
        /// Dirichlet series as inline JSON or @file
        #[arg(long)]
        series: String,
        /// Complex number: "2", "-1", "0.5+0.5i", or "[re, im]"
        #[arg(long)]
        lambda: String,
    },
    /// Transported eigenfunction m^(-u) of a symbol's conjugacy map
    Eigenfunction {
        #[arg(long)]
        symbol: String,
        #[arg(short, long)]
        m: u64,
    },
    /// Cyclicity and commutant verdicts
    Criteria {
        #[command(subcommand)]
        which: CriteriaCmd,
    },
    /// Unit-disc conjugacies and self-map certificates
    Disc {
        #[command(subcommand)]
        which: DiscCmd,
    },
    /// Weighted-shift families: commutants, classes, Cesaro means
    Shifts {
        #[command(subcommand)]
        which: ShiftsCmd,
    },
    /// Run the deterministic acceptance criteria
    Selftest,
}

#[derive(Subcommand)]
enum CriteriaCmd {
    /// Cyclicity gate for a symbol
    Cyclic {
        #[arg(long)]
        symbol: String,
    },
    /// Sufficient condition for a minimal commutant
    Minimal {
        #[arg(long)]
        symbol: String,
        #[arg(long = "n-terms", default_value_t = 16)]
        n_terms: usize,
    },
    /// Two-term cyclicity bound at translation c1 and coefficient c2
    Example48 {
        #[arg(long)]
        c1: f64,
        /// Complex coefficient, e.g. "0.2" or "0.1+0.1i"
        #[arg(long)]
        c2: String,
    },
    /// Two-block commutant gate at drift a and off-term modulus b
    Example76 {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Commutant verdict for a characteristic-2 symbol
    Char2 {
        #[arg(long)]
        symbol: String,
    },
}

#[derive(Subcommand)]
enum DiscCmd {
    /// Superattracting conjugacy u with u(phi(z)) = lambda u(z)^p
    Boettcher {
        /// Taylor polynomial as inline JSON or @file
        #[arg(long)]
        taylor: String,
        #[arg(short, long)]
        p: u32,
        #[arg(long)]
        lambda: String,
        /// Also run the norm certificate and gate the exit code on it
        #[arg(long)]
        certify: bool,
    },
    /// Attracting conjugacy u with u(phi(z)) = phi'(0) u(z)
    Koenigs {
        #[arg(long)]
        taylor: String,
    },
    /// Starlikeness certificate for a conjugacy map
    Starlike {
        #[arg(long)]
        taylor: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Self-map certificate for phi(z) = lambda z (1 + psi(z))
    Check {
        #[arg(long)]
        lambda: String,
        /// Taylor polynomial psi as inline JSON or @file
        #[arg(long)]
        psi: String,
    },
}

#[derive(Subcommand)]
enum ShiftsCmd {
    /// Build the weight family of an affine symbol (or the alternating
    /// two-block example)
    Family {
        #[arg(long, default_value_t = 2)]
        c0: u64,
        #[arg(long, default_value = "1")]
        c1: String,
        #[arg(long = "m-max", default_value_t = 10)]
        m_max: u64,
        #[arg(short, long, default_value_t = 8)]
        k: usize,
        /// Emit the alternating-drift example instead (uses only --k)
        #[arg(long)]
        alternating: bool,
    },
    /// Brute-force commutant of the direct sum, block pair by block pair
    Commutant {
        /// Weight family as inline JSON or @file
        #[arg(long)]
        family: String,
    },
    /// Stability-filtered double commutant structure
    Double {
        #[arg(long)]
        family: String,
        #[arg(long = "growth-window", default_value_t = 5)]
        growth_window: usize,
    },
    /// Equivalence classes of block labels and the resulting verdict
    Classes {
        #[arg(long)]
        family: String,
        #[arg(long, value_enum, default_value_t = ModeArg::ClosedForm)]
        mode: ModeArg,
    },
    /// Cesaro means of the shift polynomial against the pattern operator
    Cesaro {
        #[arg(long)]
        family: String,
        /// Pattern coefficients as JSON [[re, im], ...] or @file
        #[arg(long)]
        pattern: String,
        #[arg(long = "l-max", default_value_t = 200)]
        l_max: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    if cli.trunc < 2 {
        eprintln!("error: --trunc must be at least 2");
        return 2;
    }
    if cli.taylor_trunc < 1 {
        eprintln!("error: --taylor-trunc must be at least 1");
        return 2;
    }
    if !(cli.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return 2;
    }
    if cli.max_iter == 0 {
        eprintln!("error: --max-iter must be at least 1");
        return 2;
    }
    match dispatch(&cli) {
        Ok((value, code)) => {
            let rendered = render(&value, cli.format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => println!("{rendered}"),
            }
            code
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn load(raw: &str) -> Result<String, String> {
    match raw.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
        }
        None => Ok(raw.to_string()),
    }
}

fn parse_symbol(raw: &str, trunc: usize) -> Result<Symbol, String> {
    let text = load(raw)?;
    let phi: Symbol = serde_json::from_str(&text).map_err(|e| format!("symbol: {e}"))?;
    Ok(phi.resized(trunc))
}

fn parse_series(raw: &str, trunc: usize) -> Result<DirichletSeries, String> {
    let text = load(raw)?;
    let f: DirichletSeries = serde_json::from_str(&text).map_err(|e| format!("series: {e}"))?;
    Ok(f.resized(trunc))
}

fn parse_taylor(raw: &str, trunc: usize) -> Result<TaylorSeries, String> {
    let text = load(raw)?;
    let f: TaylorSeries = serde_json::from_str(&text).map_err(|e| format!("taylor: {e}"))?;
    Ok(f.resized(trunc))
}

fn parse_family(raw: &str) -> Result<WeightFamily, String> {
    let text = load(raw)?;
    serde_json::from_str(&text).map_err(|e| format!("family: {e}"))
}

fn parse_pattern(raw: &str) -> Result<Vec<Cplx>, String> {
    let text = load(raw)?;
    let pairs: Vec<(f64, f64)> =
        serde_json::from_str(&text).map_err(|e| format!("pattern: {e}"))?;
    Ok(pairs.into_iter().map(|(re, im)| Cplx::new(re, im)).collect())
}

fn parse_cplx(raw: &str) -> Result<Cplx, String> {
    let s = raw.trim();
    if s.starts_with('[') {
        let v: Vec<f64> =
            serde_json::from_str(s).map_err(|e| format!("complex number: {e}"))?;
        if v.len() != 2 {
            return Err("complex number needs exactly [re, im]".into());
        }
        return Ok(Cplx::new(v[0], v[1]));
    }
    if let Ok(re) = s.parse::<f64>() {
        return Ok(Cplx::new(re, 0.0));
    }
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| format!("cannot parse complex number '{raw}'"))?;
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        if matches!(bytes[idx], b'+' | b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("", body),
    };
    let re: f64 = if re_str.is_empty() {
        0.0
    } else {
        re_str
            .parse()
            .map_err(|_| format!("cannot parse complex number '{raw}'"))?
    };
    let im: f64 = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other
            .parse()
            .map_err(|_| format!("cannot parse complex number '{raw}'"))?,
    };
    Ok(Cplx::new(re, im))
}

fn verdict_code(v: &Verdict) -> i32 {
    match v.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::NotApplicable | Status::Undetermined => 3,
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Result<Value, String> {
    serde_json::to_value(t).map_err(|e| e.to_string())
}

fn verdict_outcome(v: Verdict) -> Result<(Value, i32), String> {
    let code = verdict_code(&v);
    Ok((to_value(&v)?, code))
}

fn dispatch(cli: &Cli) -> Result<(Value, i32), String> {
    match &cli.command {
        Command::Koenigs { symbol, scheme } => {
            let phi = parse_symbol(symbol, cli.trunc)?;
            let result = match scheme {
                SchemeArg::Recurrence => koenigs::koenigs_recurrence(&phi),
                SchemeArg::Iterative => {
                    koenigs::koenigs_iterative(&phi, cli.tol, cli.max_iter)
                }
            }
            .map_err(|e| e.to_string())?;
            Ok((to_value(&result)?, 0))
        }
        Command::Spectrum { symbol, m_max } => {
            let phi = parse_symbol(symbol, cli.trunc)?;
            let result = spectral::spectrum_points(&phi, m_max.unwrap_or(cli.trunc as u64))
                .map_err(|e| e.to_string())?;
            Ok((to_value(&result)?, 0))
        }
        Command::Companion {
            symbol,
            characteristic,
        } => {
            let phi = parse_symbol(symbol, cli.trunc)?;
            let comp =
                koenigs::companion_symbol(&phi, *characteristic).map_err(|e| e.to_string())?;
            Ok((to_value(&comp)?, 0))
        }
        Command::Resolvent {
            symbol,
            series,
            lambda,
        } => {
            let phi = parse_symbol(symbol, cli.trunc)?;
            let g = parse_series(series, cli.trunc)?;
            let lambda = parse_cplx(lambda)?;
            let f = spectral::resolvent_apply(&phi, lambda, &g, cli.tol)
                .map_err(|e| e.to_string())?;
            Ok((to_value(&f)?, 0))
        }
        Command::Eigenfunction { symbol, m } => {
            let phi = parse_symbol(symbol, cli.trunc)?;
            let solved = koenigs::koenigs_recurrence(&phi).map_err(|e| e.to_string())?;
            let series = koenigs::eigenfunction(*m, &solved.u).map_err(|e| e.to_string())?;
            let mut value = json!({
                "m": m,
                "conjugacy": to_value(&solved)?,
                "series": to_value(&series)?,
            });
            if phi.c0() == 1 {
                let lambda = (-phi.c1() * (*m as f64).ln()).exp();
                value["eigenvalue"] = json!([lambda.re, lambda.im]);
            }
            Ok((value, 0))
        }
        Command::Criteria { which } => match which {
            CriteriaCmd::Cyclic { symbol } => {
                let phi = parse_symbol(symbol, cli.trunc)?;
                verdict_outcome(criteria::cyclicity_gate(&phi))
            }
            CriteriaCmd::Minimal { symbol, n_terms } => {
                let phi = parse_symbol(symbol, cli.trunc)?;
                verdict_outcome(criteria::minimal_commutant_sufficient(&phi, *n_terms))
            }
            CriteriaCmd::Example48 { c1, c2 } => {
                verdict_outcome(criteria::example48_check(*c1, parse_cplx(c2)?))
            }
            CriteriaCmd::Example76 { a, b } => {
                verdict_outcome(criteria::example76_check(*a, *b))
            }
            CriteriaCmd::Char2 { symbol } => {
                let phi = parse_symbol(symbol, cli.trunc)?;
                let v = criteria::char2_commutant_verdict(&phi).map_err(|e| e.to_string())?;
                verdict_outcome(v)
            }
        },
        Command::Disc { which } => match which {
            DiscCmd::Boettcher {
                taylor,
                p,
                lambda,
                certify,
            } => {
                let phi = parse_taylor(taylor, cli.taylor_trunc)?;
                let lambda = parse_cplx(lambda)?;
                let u = disc::boettcher(&phi, *p, lambda, cli.tol, cli.max_iter)
                    .map_err(|e| e.to_string())?;
                let mut value = json!({ "conjugacy": to_value(&u)? });
                let mut code = 0;
                if *certify {
                    let cert =
                        disc::boettcher_norm_check(&phi, *p, lambda).map_err(|e| e.to_string())?;
                    code = verdict_code(&cert);
                    value["certificate"] = to_value(&cert)?;
                }
                Ok((value, code))
            }
            DiscCmd::Koenigs { taylor } => {
                let phi = parse_taylor(taylor, cli.taylor_trunc)?;
                let u = disc::koenigs_disc(&phi, cli.tol, cli.max_iter)
                    .map_err(|e| e.to_string())?;
                Ok((to_value(&u)?, 0))
            }
            DiscCmd::Starlike { taylor, samples } => {
                let u = parse_taylor(taylor, cli.taylor_trunc)?;
                let v = disc::starlike_check(&u, *samples).map_err(|e| e.to_string())?;
                verdict_outcome(v)
            }
            DiscCmd::Check { lambda, psi } => {
                let lambda = parse_cplx(lambda)?;
                let psi = parse_taylor(psi, cli.taylor_trunc)?;
                let v = disc::cor89_check(lambda, &psi).map_err(|e| e.to_string())?;
                verdict_outcome(v)
            }
        },
        Command::Shifts { which } => match which {
            ShiftsCmd::Family {
                c0,
                c1,
                m_max,
                k,
                alternating,
            } => {
                let fam = if *alternating {
                    shifts::alternating_example(*k)
                } else {
                    shifts::canonical_family(*c0, parse_cplx(c1)?, *m_max, *k)
                        .map_err(|e| e.to_string())?
                };
                Ok((to_value(&fam)?, 0))
            }
            ShiftsCmd::Commutant { family } => {
                let fam = parse_family(family)?;
                let report = shifts::commutant_blocks(&fam).map_err(|e| e.to_string())?;
                Ok((to_value(&report)?, 0))
            }
            ShiftsCmd::Double {
                family,
                growth_window,
            } => {
                let fam = parse_family(family)?;
                let report = shifts::double_commutant_structure(&fam, *growth_window)
                    .map_err(|e| e.to_string())?;
                Ok((to_value(&report)?, 0))
            }
            ShiftsCmd::Classes { family, mode } => {
                let fam = parse_family(family)?;
                let mode = match mode {
                    ModeArg::ClosedForm => ClassMode::ClosedForm,
                    ModeArg::FiniteHorizon => ClassMode::FiniteHorizon,
                };
                let report =
                    shifts::equivalence_classes(&fam, mode).map_err(|e| e.to_string())?;
                let code = verdict_code(&report.verdict);
                Ok((to_value(&report)?, code))
            }
            ShiftsCmd::Cesaro {
                family,
                pattern,
                l_max,
            } => {
                let fam = parse_family(family)?;
                let a = parse_pattern(pattern)?;
                let report = shifts::cesaro_approximation(&fam, &a, *l_max, cli.tol)
                    .map_err(|e| e.to_string())?;
                Ok((to_value(&report)?, 0))
            }
        },
        Command::Selftest => {
            let report = selftest::run_selftest();
            let code = if report.all_pass { 0 } else { 1 };
            Ok((to_value(&report)?, code))
        }
    }
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize"),
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", value, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter()
                .map(|(k, v)| format!("{k:<width$}  {v}"))
                .collect::<Vec<_>>()
                .join("\n")
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", value, &mut rows);
            let mut out = String::from("field,value");
            for (k, v) in rows {
                out.push('\n');
                out.push_str(&csv_escape(&k));
                out.push(',');
                out.push_str(&csv_escape(&v));
            }
            out
        }
    }
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((
            prefix.to_string(),
            serde_json::to_string(other).expect("value serializes"),
        )),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
