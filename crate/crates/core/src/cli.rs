//! Command-line front end.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::free_algebra::{parse_rational, parse_word, LieExpression, NCPolynomial};
use crate::gl2::{self, Mat2};
use crate::timeordered::{self as to, Carrier, StepMeasure};
use crate::tolerances::Tolerances;
use crate::{bounds, lie_min, magnus_core, reproduce, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "magnus", version, about = "Magnus and BCH expansion machinery")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Overrides for the shipped tolerance file.
    #[arg(long, global = true)]
    pub tolerance_file: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on k for k!-sized enumerations.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Writes a run manifest (parameters, tolerances, outputs, wall time) as JSON.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Magnus commutator μ_k as a polynomial.
    Mu {
        #[arg(long)]
        k: usize,
    },
    /// Degree-n term of log(exp X exp Y).
    Bch {
        #[arg(long)]
        n: usize,
    },
    /// Goldberg coefficient of a word in X, Y.
    Goldberg {
        #[arg(long)]
        monomial: String,
    },
    /// Absolute characteristic Θ: one coefficient or a series.
    Theta {
        #[arg(long, conflicts_with = "series")]
        k: Option<usize>,
        #[arg(long)]
        series: Option<usize>,
    },
    /// λ-resolvent polynomial, or resolvent terms of a 2×2 step measure.
    Resolvent {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: Option<String>,
        /// Step measure file, one `a,b,c,d;duration` per line.
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// ℓ¹-minimal Lie presentation of μ_k.
    LieMin {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        certify: bool,
        /// File with `tree:p/q` lines to verify instead of solving.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Convergence constants and the H table.
    Bounds(BoundsArgs),
    /// Real 2×2 geometry.
    Gl2 {
        #[command(subcommand)]
        op: Gl2Op,
    },
    /// Left and right time-ordered exponentials of a step measure.
    Texp(MeasureArgs),
    /// Magnus terms of a step measure with a convergence diagnostic.
    MagnusSeries {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    /// Recomputes the reference constants and checks them against tolerances.
    Reproduce {
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_parser = ["delta", "c1", "delta2", "delta-plus-lhat", "method1", "method3", "method4", "method5", "h-pi"])]
    pub constant: Option<String>,
    #[arg(long, value_parser = ["h"])]
    pub table: Option<String>,
    /// `a:b:n`, n points from a to b inclusive.
    #[arg(long, default_value = "0.1:3.0:30")]
    pub p_grid: String,
}

#[derive(Args, Debug, Serialize)]
pub struct MeasureArgs {
    #[arg(long)]
    pub measure: PathBuf,
    /// Read `<polynomial>;duration` lines over the truncated free algebra.
    #[arg(long)]
    pub exact: bool,
    /// Truncation degree for `--exact`.
    #[arg(long, default_value_t = 5)]
    pub degree: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Gl2Op {
    Log(MatrixArg),
    Disk(MatrixArg),
    Mp(MatrixArg),
    Classify(MatrixArg),
    NormalForm(MatrixArg),
    Examples {
        #[arg(long)]
        name: String,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct MatrixArg {
    /// Row-major `a,b,c,d`.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
}

/// Rendered result in all three formats.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub csv: String,
    /// Nonzero when the computation ran but a check failed.
    pub status: i32,
}

impl Output {
    fn new(json: Value, text: String, csv: String) -> Self {
        Output { json, text, csv, status: 0 }
    }
    fn render(&self, f: Format) -> String {
        match f {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json values serialize") + "\n",
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone(),
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a Command,
    parameters: Value,
    tolerances: &'a Tolerances,
    outputs: &'a Value,
    wall_time_s: f64,
}

fn aligned(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn poly_output(p: &NCPolynomial) -> Output {
    let rows: Vec<(String, String)> = p.terms().iter().map(|(w, c)| (w.to_string(), c.to_string())).collect();
    let csv = std::iter::once("word,coefficient\n".to_string())
        .chain(rows.iter().map(|(w, c)| format!("{w},{c}\n")))
        .collect();
    let text = if rows.is_empty() { "0\n".into() } else { aligned(&rows) };
    Output::new(p.to_json(), text, csv)
}

fn kv_output(pairs: Vec<(&str, Value)>) -> Output {
    let rows: Vec<(String, String)> = pairs
        .iter()
        .map(|(k, v)| (k.to_string(), match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }))
        .collect();
    let csv = std::iter::once("key,value\n".to_string())
        .chain(rows.iter().map(|(k, v)| format!("{k},{}\n", v.replace(',', ";"))))
        .collect();
    let obj: serde_json::Map<String, Value> = pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Output::new(Value::Object(obj), aligned(&rows), csv)
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn mat_json(m: &Mat2) -> Value {
    json!([[m.a, m.b], [m.c, m.d]])
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid {s:?} is not a:b:n")));
    }
    let a: f64 = parts[0].parse().map_err(|e| Error::Parse(format!("grid start: {e}")))?;
    let b: f64 = parts[1].parse().map_err(|e| Error::Parse(format!("grid end: {e}")))?;
    let n: usize = parts[2].parse().map_err(|e| Error::Parse(format!("grid count: {e}")))?;
    if n == 0 {
        return Err(Error::Parse("grid needs at least one point".into()));
    }
    Ok((0..n).map(|i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
}

fn parse_lambda(s: &Option<String>) -> Result<crate::free_algebra::Q> {
    match s {
        Some(s) => parse_rational(s),
        None => Ok(crate::free_algebra::q(1, 2)),
    }
}

fn bounds_cmd(a: &BoundsArgs) -> Result<Output> {
    if let Some(c) = &a.constant {
        let (value, err): (f64, Option<f64>) = match c.as_str() {
            "delta" => {
                let r = bounds::blowup_radius(&bounds::IvpSystem::standard())?;
                (r.radius, Some(r.est_error))
            }
            "method1" | "method3" | "method4" | "method5" => {
                let r = bounds::blowup_radius(&bounds::IvpSystem::builtin(c).expect("validated name"))?;
                (r.radius, Some(r.est_error))
            }
            "c1" => (bounds::c1().1, None),
            "delta2" => (bounds::method2_radius()?, None),
            "delta-plus-lhat" => (bounds::delta_plus_lhat(), None),
            "h-pi" => (bounds::h_pi(), None),
            _ => unreachable!("clap validates the constant name"),
        };
        let mut pairs = vec![("constant", json!(c)), ("value", json!(value))];
        if let Some(e) = err {
            pairs.push(("est_error", json!(e)));
        }
        if c == "c1" {
            pairs.push(("lambda", json!(bounds::c1().0)));
        }
        return Ok(kv_output(pairs));
    }
    if a.table.is_some() {
        let grid = parse_grid(&a.p_grid)?;
        let mut rows = Vec::new();
        for p in grid {
            let (v, e) = bounds::h_estimate_err(p)?;
            rows.push((p, v, e));
        }
        let csv = std::iter::once("input,value,est_error\n".to_string())
            .chain(rows.iter().map(|(p, v, e)| format!("{p},{v},{e:e}\n")))
            .collect();
        let text = aligned(&rows.iter().map(|(p, v, e)| (format!("{p:.6}"), format!("{v:.12}  ±{e:.1e}"))).collect::<Vec<_>>());
        let json = Value::Array(rows.iter().map(|(p, v, e)| json!({"input": p, "value": v, "est_error": e})).collect());
        return Ok(Output::new(json, text, csv));
    }
    Err(Error::Usage("bounds needs --constant or --table".into()))
}

fn gl2_cmd(op: &Gl2Op) -> Result<Output> {
    let m = |a: &MatrixArg| Mat2::parse(&a.matrix);
    match op {
        Gl2Op::Log(a) => {
            let l = gl2::log2x2(&m(a)?)?;
            Ok(kv_output(vec![
                ("log", mat_json(&l)),
                ("norm", json!(gl2::norm2(&l))),
                ("conorm", json!(gl2::conorm_signed(&l))),
            ]))
        }
        Gl2Op::Disk(a) => {
            let a = m(a)?;
            let cd = gl2::chiral_disk(&a);
            let pd = gl2::principal_disk(&a);
            Ok(kv_output(vec![
                ("chiral", serde_json::to_value(cd).expect("disk serializes")),
                ("principal", serde_json::to_value(pd).expect("disk serializes")),
                ("norm", json!(gl2::norm2(&a))),
                ("conorm", json!(gl2::conorm_signed(&a))),
            ]))
        }
        Gl2Op::Mp(a) => {
            let r = gl2::magnus_exponent_disk(&gl2::chiral_disk(&m(a)?))?;
            Ok(kv_output(vec![("value", json!(r.value)), ("direction", json!(r.direction))]))
        }
        Gl2Op::Classify(a) => {
            let a = m(a)?;
            Ok(kv_output(vec![("class", json!(gl2::classify(&a)?.to_string())), ("gap", json!(gl2::classify_gap(&a)))]))
        }
        Gl2Op::NormalForm(a) => {
            let a = m(a)?;
            let nf = gl2::normal_form(&a)?;
            let back = gl2::nw_build(&nf);
            Ok(kv_output(vec![
                ("p1", json!(nf.p1)),
                ("p2", json!(nf.p2)),
                ("t", json!(nf.t)),
                ("beta", json!(nf.beta)),
                ("f_used", json!(nf.f_used)),
                ("roundtrip_error", json!(back.dist(&a))),
            ]))
        }
        Gl2Op::Examples { name } => {
            let t = gl2::example_asymptotics(name)?;
            let csv = std::iter::once("parameter,gap,value\n".to_string())
                .chain(t.rows.iter().map(|r| format!("{},{},{}\n", r.parameter, r.gap, r.value)))
                .collect();
            let mut text = aligned(&t.rows.iter().map(|r| (format!("{:.6e}", r.gap), format!("{:.10}", r.value))).collect::<Vec<_>>());
            text.push_str(&format!(
                "fit: value ≈ {:.6}·gap^(-{:.6}); expected exponent {:.6}{}\n",
                t.constant,
                t.exponent,
                t.expected_exponent,
                t.expected_constant.map(|c| format!(", constant {c:.6}")).unwrap_or_default()
            ));
            Ok(Output::new(serde_json::to_value(&t).expect("table serializes"), text, csv))
        }
    }
}

fn measure_mat(a: &MeasureArgs) -> Result<StepMeasure<Mat2>> {
    to::parse_mat2_measure(&read(&a.measure)?)
}

fn measure_poly(a: &MeasureArgs) -> Result<StepMeasure<NCPolynomial>> {
    to::parse_poly_measure(&read(&a.measure)?, a.degree)
}

fn texp_cmd(a: &MeasureArgs) -> Result<Output> {
    if a.exact {
        let phi = measure_poly(a)?;
        let l = to::lexp(&phi)?;
        let r = to::rexp(&phi)?;
        let text = format!("lexp  {l}\nrexp  {r}\n");
        let csv = format!("which,polynomial\nlexp,{l}\nrexp,{r}\n");
        return Ok(Output::new(json!({"lexp": l.to_json(), "rexp": r.to_json()}), text, csv));
    }
    let phi = measure_mat(a)?;
    let l = to::lexp(&phi)?;
    let r = to::rexp(&phi)?;
    Ok(kv_output(vec![
        ("lexp", mat_json(&l)),
        ("rexp", mat_json(&r)),
        ("total_variation", json!(phi.total_variation())),
    ]))
}

fn magnus_series_cmd(a: &MeasureArgs, kmax: usize, cap: usize) -> Result<Output> {
    if kmax > cap.max(Mat2::DEFAULT_CAP) && a.exact {
        return Err(Error::Resource(format!("k-max {kmax} exceeds the cap")));
    }
    if a.exact {
        let phi = measure_poly(a)?;
        let ps = to::magnus_partial_sum(&phi, kmax)?;
        let log = to::rexp(&phi)?.truncated_log(a.degree)?;
        let text = format!("sum  {}\nlog(rexp) - sum  {}\n", ps.sum, &log - &ps.sum);
        let csv = format!("which,polynomial\nsum,{}\n", ps.sum);
        return Ok(Output::new(
            json!({"sum": ps.sum.to_json(), "norms": ps.norms, "log_minus_sum": (&log - &ps.sum).to_json()}),
            text,
            csv,
        ));
    }
    let phi = measure_mat(a)?;
    let ps = to::magnus_partial_sum(&phi, kmax)?;
    let recon = ps.sum.exp().dist(&to::rexp(&phi)?);
    let mut out = kv_output(vec![
        ("sum", mat_json(&ps.sum)),
        ("norms", json!(ps.norms)),
        ("ratio", json!(ps.ratio)),
        ("total_variation", json!(phi.total_variation())),
        ("reconstruction_error", json!(recon)),
    ]);
    out.csv = std::iter::once("k,norm\n".to_string())
        .chain(ps.norms.iter().enumerate().map(|(i, n)| format!("{},{n}\n", i + 1)))
        .collect();
    Ok(out)
}

fn resolvent_cmd(k: usize, lambda: &Option<String>, measure: &Option<PathBuf>, cap: usize) -> Result<Output> {
    let lam = parse_lambda(lambda)?;
    if let Some(path) = measure {
        let phi = to::parse_mat2_measure(&read(path)?)?;
        let l = crate::timeordered::Scalar::to_f64(&lam);
        let terms = to::resolvent_terms(&phi, &l, k)?;
        let resid = to::resolvent_identity_check(&phi, &l, k)?;
        return Ok(kv_output(vec![
            ("lambda", json!(l)),
            ("norms", json!(terms.iter().map(|t| t.norm2()).collect::<Vec<_>>())),
            ("identity_residual", json!(resid)),
        ]));
    }
    let p = magnus_core::resolvent_poly_capped(k, cap)?;
    if lambda.is_some() {
        return Ok(poly_output(&p.eval(&lam)));
    }
    let rows: Vec<(String, String)> =
        p.coeffs.iter().enumerate().map(|(i, c)| (format!("lambda^{i}"), c.to_string())).collect();
    let csv = std::iter::once("power,polynomial\n".to_string())
        .chain(rows.iter().map(|(k, v)| format!("{k},{v}\n")))
        .collect();
    Ok(Output::new(p.to_json(), aligned(&rows), csv))
}

fn lie_min_cmd(k: usize, certify: bool, check: &Option<PathBuf>) -> Result<Output> {
    if let Some(path) = check {
        let e = LieExpression::parse_lines(&read(path)?)?;
        let r = lie_min::verify_presentation(&e, k)?;
        let mut out = kv_output(vec![("valid", json!(r.valid)), ("cost", json!(r.cost.to_string()))]);
        if !r.valid {
            out.status = 2;
        }
        return Ok(out);
    }
    let p = lie_min::theta_lie(k)?;
    let mut j = p.to_json();
    let mut text = format!("theta_lie  {}\nobjective  {}\n", p.theta_lie(), p.objective);
    if certify {
        let ok = lie_min::verify_dual(&p)?;
        j["certified"] = json!(ok);
        text.push_str(&format!("certified  {ok}\n"));
    }
    text.push_str(&format!("{}\n", p.presentation));
    let csv = std::iter::once("tree,coefficient\n".to_string())
        .chain(p.presentation.terms.iter().map(|(c, t)| format!("\"{t}\",{c}\n")))
        .collect();
    Ok(Output::new(j, text, csv))
}

fn reproduce_cmd(only: &Option<String>, emit: &Option<PathBuf>, tol: &Tolerances) -> Result<Output> {
    let rows = reproduce::reproduce(only.as_deref(), tol)?;
    let csv = reproduce::to_csv(&rows);
    if let Some(p) = emit {
        std::fs::write(p, &csv).map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display())))?;
    }
    let text = aligned(
        &rows
            .iter()
            .map(|r| {
                (
                    r.constant.clone(),
                    format!("{:<24} {:<24} {:<12} {}", r.reference, r.computed, r.tol, if r.pass { "PASS" } else { "FAIL" }),
                )
            })
            .collect::<Vec<_>>(),
    );
    let mut out = Output::new(serde_json::to_value(&rows).expect("rows serialize"), text, csv);
    if rows.iter().any(|r| !r.pass) {
        out.status = 5;
    }
    Ok(out)
}

pub fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<Output> {
    let cap = cli.cap.unwrap_or(magnus_core::DEFAULT_CAP);
    match &cli.command {
        Command::Mu { k } => Ok(poly_output(&magnus_core::magnus_commutator_direct_capped(*k, cap)?)),
        Command::Bch { n } => Ok(poly_output(&magnus_core::bch_term_capped(*n, cap)?)),
        Command::Goldberg { monomial } => {
            let w = parse_word(monomial)?;
            Ok(kv_output(vec![("monomial", json!(w.to_string())), ("coefficient", json!(magnus_core::goldberg_coefficient(&w)?.to_string()))]))
        }
        Command::Theta { k, series } => match (k, series) {
            (Some(k), None) => Ok(kv_output(vec![("k", json!(k)), ("coefficient", json!(magnus_core::theta_coefficient(*k).to_string()))])),
            (None, Some(n)) => {
                let s = magnus_core::theta_series(*n);
                let rows: Vec<(String, String)> = (1..=*n).map(|i| (format!("x^{i}"), s.coeff(i).to_string())).collect();
                let csv = std::iter::once("power,coefficient\n".to_string())
                    .chain((1..=*n).map(|i| format!("{i},{}\n", s.coeff(i))))
                    .collect();
                Ok(Output::new(json!(rows.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>()), aligned(&rows), csv))
            }
            _ => Err(Error::Usage("theta needs exactly one of --k or --series".into())),
        },
        Command::Resolvent { k, lambda, measure } => resolvent_cmd(*k, lambda, measure, cap),
        Command::LieMin { k, certify, check } => lie_min_cmd(*k, *certify, check),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Gl2 { op } => gl2_cmd(op),
        Command::Texp(a) => texp_cmd(a),
        Command::MagnusSeries { measure, k_max } => magnus_series_cmd(measure, *k_max, cap),
        Command::Reproduce { only, emit_csv } => reproduce_cmd(only, emit_csv, tol),
    }
}

/// Parses `args` (including the program name), runs, prints, and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let tol = match &cli.tolerance_file {
        Some(p) => match Tolerances::load(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        },
        None => Tolerances::default(),
    };
    let start = Instant::now();
    match dispatch(&cli, &tol) {
        Ok(out) => {
            print!("{}", out.render(cli.format));
            if let Some(path) = &cli.manifest {
                let m = RunManifest {
                    subcommand: &cli.command,
                    parameters: json!({"format": cli.format, "cap": cli.cap, "threads": cli.threads}),
                    tolerances: &tol,
                    outputs: &out.json,
                    wall_time_s: start.elapsed().as_secs_f64(),
                };
                let s = serde_json::to_string_pretty(&m).expect("manifest serializes");
                if let Err(e) = std::fs::write(path, s) {
                    eprintln!("error: cannot write manifest {}: {e}", path.display());
                    return 1;
                }
            }
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
