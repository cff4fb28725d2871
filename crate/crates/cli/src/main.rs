use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use k2lab::euler::{to_precision, ProductKind};
use k2lab::lab::report::{write_csv, write_json};
use k2lab::lab::{
    comparison_table, mean_k2_experiment, mean_k2_trend, mean_l_experiment, rosen_experiment, rosen_trend,
    verify_kind, ExperimentReport, LabConfig, VerifyKind, VerifyParams,
};
use k2lab::rational::{exact_string, to_decimal, to_f64};
use k2lab::{
    k2_order, k2_order_any, kronecker, l_polynomial, l_polynomial_any, parse_poly, FieldSpec, Poly,
    SymbolPath,
};

/// Quadratic characters, L-polynomials and K2 orders over F_q[T].
///
/// Every flag can also be set through an environment variable named
/// K2LAB_<FLAG> (for example K2LAB_WORKERS); flags win over the environment.
#[derive(Parser, Debug)]
#[command(name = "k2lab", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads for experiments.
    #[arg(long, global = true, env = "K2LAB_WORKERS")]
    workers: Option<usize>,
    /// Refuse experiments needing more symbol evaluations than this.
    #[arg(long, global = true, env = "K2LAB_BUDGET", default_value_t = 1_000_000_000)]
    budget: u128,
    /// Relative error for Euler products.
    #[arg(long, global = true, env = "K2LAB_REL_ERR", default_value_t = 1e-12)]
    rel_err: f64,
    /// Tolerance on inverse root moduli.
    #[arg(long, global = true, env = "K2LAB_TOL", default_value_t = 1e-6)]
    tol: f64,
    /// Digits for rendered decimals.
    #[arg(long, global = true, env = "K2LAB_DECIMAL")]
    decimal: Option<usize>,
    /// Evaluate every symbol with the Euclidean algorithm instead of the sieve table.
    #[arg(long, global = true, env = "K2LAB_NO_SIEVE")]
    no_sieve: bool,
    /// Also write reports: `--out csv PATH` or `--out json PATH`.
    #[arg(long, global = true, num_args = 2, value_names = ["FORMAT", "PATH"])]
    out: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quadratic residue symbol (top/bottom).
    Symbol {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        #[arg(long)]
        top: String,
        #[arg(long)]
        bottom: String,
    },
    /// Coefficients c_0 .. c_2g of the L-polynomial of D.
    Lpoly {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        #[arg(long = "D")]
        d: String,
    },
    /// Order of K2 of the ring of integers attached to D.
    K2 {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        #[arg(long = "D")]
        d: String,
    },
    /// Truncated Euler product P(s) or c(2) with a rigorous tail bound.
    Euler {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        #[arg(long, default_value_t = 4)]
        s: u32,
        #[arg(long, value_enum, default_value_t = Which::P)]
        which: Which,
    },
    /// Run brute-force verifications.
    Verify {
        kind: String,
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, default_value_t = 2)]
        g_max: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Modulus for lemma1 and pv.
        #[arg(long)]
        f: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_deg_f: usize,
        /// How far past deg f the pv sweep goes.
        #[arg(long, default_value_t = 3)]
        extra: usize,
    },
    /// Average K2 order over monic squarefree D of degree 2g+1.
    Average {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        /// One genus, or a comma-separated list for a trend run.
        #[arg(long, value_delimiter = ',', required = true)]
        g: Vec<usize>,
        /// Also sum L(2, chi_D) over the family.
        #[arg(long)]
        l_sum: bool,
        /// Envelope constant C in |ratio - 1| <= C q^(1-g).
        #[arg(long, default_value_t = 5)]
        trend_constant: u32,
    },
    /// Average K2 order over all squarefree m of degree M.
    Rosen {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        /// One odd degree, or a comma-separated list for a trend run.
        #[arg(long = "M", value_delimiter = ',', required = true)]
        m: Vec<usize>,
    },
    /// Main-term constants side by side with empirical means.
    Table {
        #[arg(long, env = "K2LAB_Q")]
        q: u64,
        #[arg(long, default_value_t = 2)]
        g_max: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    P,
    C2,
}

#[derive(Clone, Copy, Debug)]
enum OutFormat {
    Csv,
    Json,
}

/// How a finished run ends.
enum Outcome {
    Done,
    Checked(bool),
}

fn poly(text: &str, spec: FieldSpec) -> Result<Poly> {
    Ok(parse_poly(text, spec)?)
}

fn out_target(global: &Global) -> Result<Option<(OutFormat, PathBuf)>> {
    let Some(v) = &global.out else { return Ok(None) };
    let fmt = match v[0].as_str() {
        "csv" => OutFormat::Csv,
        "json" => OutFormat::Json,
        other => {
            return Err(
                k2lab::Error::InvalidArgument(format!("output format {other:?} is not csv or json")).into()
            )
        }
    };
    Ok(Some((fmt, PathBuf::from(&v[1]))))
}

fn lab_config(global: &Global) -> Result<LabConfig> {
    let mut cfg = LabConfig {
        budget: global.budget,
        rel_err: global.rel_err,
        rh_tol: global.tol,
        path: if global.no_sieve { SymbolPath::Euclid } else { SymbolPath::Sieve },
        ..LabConfig::default()
    };
    if let Some(w) = global.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(reports: &[ExperimentReport], global: &Global) -> Result<Outcome> {
    let digits = global.decimal.unwrap_or(6);
    for r in reports {
        print!("{}", r.to_text(digits));
    }
    if let Some((fmt, path)) = out_target(global)? {
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let w = BufWriter::new(file);
        match fmt {
            OutFormat::Csv => write_csv(w, reports, digits)?,
            OutFormat::Json => write_json(w, reports, digits)?,
        }
    }
    Ok(Outcome::Checked(reports.iter().all(|r| r.pass)))
}

fn run(cli: Cli) -> Result<Outcome> {
    let global = &cli.global;
    // reject a bad --out before doing any work
    out_target(global)?;
    match cli.command {
        Command::Symbol { q, top, bottom } => {
            let spec = FieldSpec::new(q)?;
            println!("{}", kronecker(&poly(&top, spec)?, &poly(&bottom, spec)?)?);
            Ok(Outcome::Done)
        }
        Command::Lpoly { q, d } => {
            let d = poly(&d, FieldSpec::new(q)?)?;
            let l = if d.is_monic() { l_polynomial(&d)? } else { l_polynomial_any(&d)? };
            let cs: Vec<String> = l.coeffs().iter().map(|c| c.to_string()).collect();
            println!("{}", cs.join(" "));
            Ok(Outcome::Done)
        }
        Command::K2 { q, d } => {
            let d = poly(&d, FieldSpec::new(q)?)?;
            let k = if d.is_monic() { k2_order(&d)? } else { k2_order_any(&d)? };
            println!("{k}");
            Ok(Outcome::Done)
        }
        Command::Euler { q, s, which } => {
            let spec = FieldSpec::new(q)?;
            let kind = match which {
                Which::P => ProductKind::P(s),
                Which::C2 => ProductKind::C2,
            };
            if matches!(kind, ProductKind::P(s) if s < 2) {
                return Err(k2lab::Error::InvalidArgument(format!("s = {s} must be at least 2")).into());
            }
            let t = to_precision(spec, kind, global.rel_err)?;
            let digits = global.decimal.unwrap_or(15);
            println!("{} = {}", kind.name(), to_decimal(&t.value, digits));
            println!("N = {}", t.n);
            println!("tail_bound = {:.3e}", to_f64(&t.tail_bound));
            let exact = exact_string(&t.value);
            if t.is_exact() && exact.len() <= 120 {
                println!("exact = {exact}");
            }
            Ok(Outcome::Done)
        }
        Command::Verify { kind, q, g, g_max, n, n_max, f, max_deg_f, extra } => {
            let spec = FieldSpec::new(q)?;
            let kind: VerifyKind = kind.parse()?;
            let f = f.map(|t| poly(&t, spec)).transpose()?;
            let params = VerifyParams { g, g_max, n, n_max, f, max_deg_f, extra };
            let reports = verify_kind(kind, spec, &params, &lab_config(global)?)?;
            emit(&reports, global)
        }
        Command::Average { q, g, l_sum, trend_constant } => {
            let spec = FieldSpec::new(q)?;
            let cfg = LabConfig { trend_constant, ..lab_config(global)? };
            let mut reports = if g.len() == 1 {
                vec![mean_k2_experiment(spec, g[0], &cfg)?]
            } else {
                let (trend, mut runs) = mean_k2_trend(spec, &g, &cfg)?;
                runs.push(trend);
                runs
            };
            if l_sum {
                for &g in &g {
                    reports.push(mean_l_experiment(spec, g, &cfg)?);
                }
            }
            emit(&reports, global)
        }
        Command::Rosen { q, m } => {
            let spec = FieldSpec::new(q)?;
            let cfg = lab_config(global)?;
            let reports = if m.len() == 1 {
                vec![rosen_experiment(spec, m[0], &cfg)?]
            } else {
                let (trend, mut runs) = rosen_trend(spec, &m, &cfg)?;
                runs.push(trend);
                runs
            };
            emit(&reports, global)
        }
        Command::Table { q, g_max } => {
            let spec = FieldSpec::new(q)?;
            let report = comparison_table(spec, g_max, &lab_config(global)?)?;
            emit(&[report], global)
        }
    }
}

fn fail(kind: &str, msg: &str, code: u8) -> ExitCode {
    let msg = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
    eprintln!("k2lab: error[{kind}]: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // help and version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", &e.to_string(), 2),
    };
    match run(cli) {
        Ok(Outcome::Done) | Ok(Outcome::Checked(true)) => ExitCode::SUCCESS,
        Ok(Outcome::Checked(false)) => ExitCode::from(1),
        Err(e) => match e.downcast_ref::<k2lab::Error>() {
            Some(k @ k2lab::Error::WorkBudget { .. }) => fail(k.kind(), &k.to_string(), 3),
            Some(k) => fail(k.kind(), &k.to_string(), 2),
            None => fail("io", &format!("{e:#}"), 2),
        },
    }
}
