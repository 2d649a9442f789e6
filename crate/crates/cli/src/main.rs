//! `ncalc`: command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 when a specification is
//! not integrable or a linear map has no tensor representation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ncalc::algebra::{builtin, load_algebra_file, Algebra, Element};
use ncalc::checks::{algebra_checks, selftest, CheckResult};
use ncalc::expr::parse_expr;
use ncalc::form::{derivative, expressions_equal, simplify, taylor};
use ncalc::numeric::{fd_differential, tolerance, NumericMap};
use ncalc::ode::{integrate, Integration, SpecDocument};
use ncalc::scalar::{looks_decimal, parse_float_list, parse_rational_list, Rational, Scalar};
use ncalc::series::{exp, exp_sum_check, DEFAULT_ORDER};
use ncalc::tensor::{representation_basis, solve_components, LinearMapMatrix};
use ncalc::Error;

#[derive(Parser, Debug)]
#[command(name = "ncalc", version, about = "Gâteaux calculus over finite-dimensional algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct AlgebraArg {
    /// Builtin algebra: reals, complex, quaternions, octonions, matrices2, dual
    #[arg(short = 'a', long = "algebra", default_value = "quaternions")]
    algebra: String,
    /// Algebra spec file (TOML or JSON); overrides --algebra
    #[arg(long = "spec")]
    spec: Option<PathBuf>,
}

impl AlgebraArg {
    fn load(&self) -> Result<Algebra<Rational>, Error> {
        match &self.spec {
            Some(p) => load_algebra_file(p),
            None => builtin(&self.algebra),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension, verified flags and tensor representation data
    Algebra {
        #[command(flatten)]
        alg: AlgebraArg,
        /// Run the invariant suite on random elements
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Gâteaux derivative of an expression
    Diff {
        #[command(flatten)]
        alg: AlgebraArg,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(short = 'n', long = "order", default_value_t = 1)]
        order: usize,
        /// Point, comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Direction(s); repeat once per slot or give one for all slots
        #[arg(long = "dir", allow_hyphen_values = true)]
        dir: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Taylor polynomial of an expression at a point
    Taylor {
        #[command(flatten)]
        alg: AlgebraArg,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        json: bool,
    },
    /// Truncated exponent series; with --with, compares exp(a+b) and exp(a)exp(b)
    Exp {
        #[command(flatten)]
        alg: AlgebraArg,
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: String,
        #[arg(short = 'N', default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long = "with", allow_hyphen_values = true)]
        with: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Solve a differential specification file
    Integrate {
        #[arg(long = "spec")]
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Standard components of a linear map
    SolveTensor {
        #[command(flatten)]
        alg: AlgebraArg,
        /// A registered generator (e.g. conj) or `identity`
        #[arg(long, conflicts_with = "matrix")]
        map: Option<String>,
        /// Map matrix, rows separated by `;`, entries by `,`
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Quick pass over every subsystem
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::NoRepresentation { .. }) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Algebra { alg, check, seed, json } => cmd_algebra(&alg, check, seed, json),
        Command::Diff { alg, expr, order, at, dir, json } => {
            let alg = Arc::new(alg.load()?);
            let float = expr_is_decimal(&expr) || at.iter().chain(&dir).any(|s| coords_decimal(s));
            if float {
                cmd_diff(&Arc::new(alg.to_float()), &expr, order, at.as_deref(), &dir, json)
            } else {
                cmd_diff(&alg, &expr, order, at.as_deref(), &dir, json)
            }
        }
        Command::Taylor { alg, expr, at, json } => cmd_taylor(&Arc::new(alg.load()?), &expr, &at, json),
        Command::Exp { alg, x, order, with, tol, json } => {
            let alg = Arc::new(alg.load()?.to_float());
            cmd_exp(&alg, &x, order, with.as_deref(), tol, json)
        }
        Command::Integrate { spec, json } => cmd_integrate(&spec, json),
        Command::SolveTensor { alg, map, matrix, json } => cmd_solve_tensor(&alg, map.as_deref(), matrix.as_deref(), json),
        Command::Selftest { seed, json } => {
            let results = selftest(seed)?;
            Ok(report_checks(&results, json, json!({ "seed": seed })))
        }
    }
}

fn expr_is_decimal(e: &str) -> bool {
    let b = e.as_bytes();
    (1..b.len()).any(|i| b[i] == b'.' && (b[i - 1].is_ascii_digit() || b.get(i + 1).is_some_and(u8::is_ascii_digit)))
}

fn coords_decimal(s: &str) -> bool {
    s.split(',').any(|p| looks_decimal(p.trim()))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, message: msg.into() }
}

fn parse_coords<S: Scalar>(alg: &Arc<Algebra<S>>, s: &str) -> Result<Element<S>, Failure> {
    let coords: Vec<S> = if S::EXACT {
        parse_rational_list(s)?
            .ok_or_else(|| usage(format!("`{s}`: decimals need the floating path")))?
            .iter()
            .map(S::from_rational)
            .collect()
    } else {
        parse_float_list(s)?.into_iter().map(|v| S::parse_literal(&v.to_string())).collect::<Result<_, _>>()?
    };
    Ok(Element::new(alg, coords)?)
}

/// Parses an expression; parse errors show the input with a caret.
fn parse_input<S: Scalar>(text: &str, alg: &Arc<Algebra<S>>) -> Result<ncalc::Expr<S>, Failure> {
    parse_expr(text, alg).map_err(|e| match &e {
        Error::Parse { pos, .. } => {
            let col = text[..(*pos).min(text.len())].chars().count();
            usage(format!("{e}\n  {text}\n  {}^", " ".repeat(col)))
        }
        _ => e.into(),
    })
}

fn coords_json<S: Scalar>(e: &Element<S>) -> Value {
    if S::EXACT {
        Value::Array(e.coords().iter().map(|v| Value::String(v.to_string())).collect())
    } else {
        Value::Array(e.coords().iter().map(|v| json!(v.to_f64())).collect())
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn report_checks(results: &[CheckResult], json: bool, extra: Value) -> u8 {
    let passed = results.iter().all(|r| r.passed);
    if json {
        let mut v = extra;
        v["checks"] = serde_json::to_value(results).expect("serializable");
        v["passed"] = json!(passed);
        print_json(&v);
    } else {
        for r in results {
            println!("[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        }
    }
    if passed {
        0
    } else {
        1
    }
}

fn cmd_algebra(arg: &AlgebraArg, check: bool, seed: u64, json: bool) -> Outcome {
    let alg = Arc::new(arg.load()?);
    let f = alg.flags();
    let rep = representation_basis(&alg);
    let checks = if check { Some(algebra_checks(&alg, seed, 50)?) } else { None };
    let ok = checks.as_ref().is_none_or(|c| c.iter().all(|r| r.passed));
    if json {
        let mut v = json!({
            "name": alg.name(),
            "dim": alg.dim(),
            "basis": alg.basis(),
            "flags": {
                "unital": f.unital,
                "associative": f.associative,
                "division": f.division,
                "multiplicative_norm": f.multiplicative_norm,
            },
            "representation": rep,
            "representation_basis": rep.display_generators(),
        });
        if let Some(c) = &checks {
            v["checks"] = serde_json::to_value(c).expect("serializable");
            v["passed"] = json!(ok);
            v["seed"] = json!(seed);
        }
        print_json(&v);
    } else {
        println!("algebra      {}", alg.name());
        println!("dim          {}", alg.dim());
        println!("basis        {}", alg.basis().join(", "));
        println!("unital       {}", f.unital);
        println!("associative  {}", f.associative);
        println!("division     {}", f.division);
        println!("mult. norm   {}", f.multiplicative_norm);
        println!("B rank       {} of {}", rep.rank, rep.needed);
        print!("rep. basis   {}", rep.display_generators());
        if !rep.complete {
            print!(" (incomplete: spans {} of {})", rep.span_rank, rep.needed);
        }
        println!();
        if let Some(c) = &checks {
            report_checks(c, false, Value::Null);
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_diff<S: Scalar>(alg: &Arc<Algebra<S>>, text: &str, order: usize, at: Option<&str>, dirs: &[String], json: bool) -> Outcome {
    if order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let p = parse_input(text, alg)?;
    let form = derivative(&p, alg, order)?;
    let mut out = json!({
        "expression": p.to_string(),
        "order": order,
        "derivative": form.to_string(),
        "form": form.to_json(),
    });
    let mut lines = vec![form.to_string()];
    if let Some(at) = at {
        let x = parse_coords(alg, at)?;
        let hs: Vec<Element<S>> = match dirs.len() {
            0 => return Err(usage("--at needs --dir")),
            1 => vec![parse_coords(alg, &dirs[0])?; order],
            n if n == order => dirs.iter().map(|d| parse_coords(alg, d)).collect::<Result<_, _>>()?,
            n => return Err(usage(format!("{n} directions given for order {order}"))),
        };
        let value = form.eval(&x, &hs)?;
        out["value"] = coords_json(&value);
        lines.push(format!("value        {value}"));
        if order == 1 {
            let falg = Arc::new(alg.to_float());
            let fp = p.to_float(&falg);
            let fd = fd_differential(&NumericMap::from_expr(fp), &x.to_float(&falg), &hs[0].to_float(&falg))?;
            let err = value.to_float(&falg).sub(&fd.value)?.norm().value();
            let scale = value.to_float(&falg).norm().value();
            let pass = err <= (tolerance() * scale).max(ncalc::numeric::ABS_FLOOR);
            out["finite_difference"] = json!({
                "value": coords_json(&fd.value),
                "residual": fd.residual,
                "abs_error": err,
                "tolerance": tolerance(),
                "pass": pass,
            });
            lines.push(format!("fd check     {} (|symbolic - fd| = {err:.2e}, residual {:.2e})", if pass { "pass" } else { "FAIL" }, fd.residual));
        }
    }
    if json {
        print_json(&out);
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(0)
}

fn cmd_taylor(alg: &Arc<Algebra<Rational>>, text: &str, at: &str, json: bool) -> Outcome {
    if expr_is_decimal(text) || coords_decimal(at) {
        return Err(usage("taylor runs on exact rationals; decimals are not accepted"));
    }
    let p = parse_input(text, alg)?;
    let x0 = parse_coords(alg, at)?;
    let t = taylor(&p, &x0)?;
    let s = simplify(&t, alg)?;
    let equal = expressions_equal(&t, &p, alg)?;
    if json {
        print_json(&json!({
            "expression": p.to_string(),
            "at": coords_json(&x0),
            "taylor": t.to_string(),
            "simplified": s.to_string(),
            "equal": equal,
        }));
    } else {
        println!("{t}");
        println!("simplified   {s}");
        println!("equal to p   {equal}");
    }
    Ok(if equal { 0 } else { 1 })
}

fn cmd_exp<S: Scalar>(alg: &Arc<Algebra<S>>, x: &str, order: usize, with: Option<&str>, tol: f64, json: bool) -> Outcome {
    let a = parse_coords(alg, x)?;
    let r = exp(&a, order)?;
    let mut out = json!({
        "x": coords_json(&a),
        "value": coords_json(&r.value),
        "order": order,
        "remainder_bound": r.remainder_bound,
    });
    let mut lines = vec![format!("exp(x)       {}", r.value), format!("N            {order}"), format!("remainder    <= {:.3e}", r.remainder_bound)];
    if let Some(b) = with {
        let b = parse_coords(alg, b)?;
        let rep = exp_sum_check(&a, &b, order, tol)?;
        out["sum_check"] = serde_json::to_value(&rep).expect("serializable");
        lines.push(format!("exp sum      {rep}"));
    }
    if json {
        print_json(&out);
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(0)
}

fn cmd_integrate(path: &PathBuf, json: bool) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let doc = SpecDocument::parse(&text)?;
    let spec = doc.to_spec()?;
    let canonical = SpecDocument::from_spec(&spec, doc.algebra.clone());
    match integrate(&spec)? {
        Integration::Solved(y) => {
            if json {
                print_json(&json!({
                    "verdict": "integrable",
                    "solution": y.to_string(),
                    "spec": canonical,
                }));
            } else {
                println!("y = {y}");
            }
            Ok(0)
        }
        Integration::NotIntegrable(report) => {
            let w = report.witness.as_ref().expect("rejections carry a witness");
            if json {
                print_json(&json!({
                    "verdict": "not_integrable",
                    "witness": {
                        "order": w.order,
                        "transposition": [w.transposition.0, w.transposition.1],
                        "difference": w.difference.to_string(),
                        "difference_form": w.difference.to_json(),
                    },
                    "spec": canonical,
                }));
            } else {
                println!("{report}");
            }
            Ok(2)
        }
    }
}

fn parse_matrix(alg: &Arc<Algebra<Rational>>, s: &str) -> Result<LinearMapMatrix<Rational>, Failure> {
    let rows: Vec<Vec<Rational>> = s
        .split(';')
        .map(|r| parse_rational_list(r)?.ok_or(Error::ExactPathRequired("solve-tensor")))
        .collect::<Result<_, Error>>()?;
    let d = alg.dim();
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(usage(format!("matrix must be {d}x{d}")));
    }
    Ok(LinearMapMatrix { f: rows })
}

fn cmd_solve_tensor(arg: &AlgebraArg, map: Option<&str>, matrix: Option<&str>, json: bool) -> Outcome {
    let alg = Arc::new(arg.load()?);
    let (label, f) = match (map, matrix) {
        (Some("identity") | Some("id"), None) => ("identity".to_string(), LinearMapMatrix::identity(alg.dim())),
        (Some(name), None) => (name.to_string(), LinearMapMatrix::of_generator(&alg, name)?),
        (None, Some(m)) => (m.to_string(), parse_matrix(&alg, m)?),
        _ => return Err(usage("give exactly one of --map or --matrix")),
    };
    let rep = solve_components(&alg, &f)?;
    let pretty = rep.pretty(&alg);
    if json {
        print_json(&json!({
            "algebra": alg.name(),
            "map": label,
            "representation": pretty,
            "components": rep.components(),
        }));
    } else {
        println!("{pretty}");
    }
    Ok(0)
}
