use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};

use fqapprox::approx::{
    dirichlet_test_bruteforce, dirichlet_test_cf, irrationality_measure, tail_minimum, uniform_exponent_estimate,
    PhiSpec, PsiSpec,
};
use fqapprox::construct::{
    certificate_verify_with, hyperplane_family, property_a_probe, singular_build, BuildConfig, ConstructedPoint,
    SurfaceDomain, VerifyOptions,
};
use fqapprox::contfrac::{best_approx_search, cf_convergents, cf_expand_prefix};
use fqapprox::intersect::{grid_completeness, parametrization_check, Hyperplane, Surface};
use fqapprox::parse::{parse_poly_vec, parse_value};
use fqapprox::selftest::selftest;
use fqapprox::{Error, Field, Value};

#[derive(Parser, Serialize)]
#[command(
    name = "fqapprox",
    version,
    about = "Exact Diophantine approximation over F_q((1/T))"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone)]
struct RunConfig {
    /// Field descriptor `p=<p>,r=<r>[,mod=<c0,...>]`.
    #[arg(long, global = true, default_value = "p=3,r=1")]
    field: String,
    /// Lowest certified exponent for series inputs.
    #[arg(long, global = true, default_value_t = -64, allow_hyphen_values = true)]
    floor: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Enumeration cap for exhaustive searches.
    #[arg(long, global = true, env = "FQAPPROX_MAX_ENUM", default_value_t = 10_000_000)]
    max_enum: u128,
}

#[derive(ValueEnum, Clone, Copy, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Continued fractions.
    #[command(subcommand)]
    Cf(CfCommand),
    /// Dirichlet improvability tests.
    #[command(subcommand)]
    Dirichlet(DirichletCommand),
    /// Irrationality measure `min_{Φ(q) ≤ e^t} |q·y + q0|`.
    Measure(MeasureArgs),
    /// Uniform exponent estimates for `m = 1..=m_max`.
    Exponent(ExponentArgs),
    /// Surface and hyperplane intersections.
    #[command(subcommand)]
    Intersect(IntersectCommand),
    /// Constructed singular points.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Re-check a constructed point's certificate.
    Verify(VerifyArgs),
    /// The deterministic subset of the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum CfCommand {
    /// Partial quotients of a value.
    Expand {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 32)]
        max_terms: usize,
    },
    /// Convergents `p_n/q_n`.
    Convergents {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 16)]
        max_terms: usize,
    },
    /// Exhaustive best approximation with `deg q ≤ deg_bound`.
    Best {
        #[arg(long)]
        x: String,
        #[arg(long)]
        deg_bound: i64,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum DirichletCommand {
    /// The continued-fraction test, one row per convergent.
    Test {
        #[arg(long, conflicts_with = "cf", required_unless_present = "cf")]
        x: Option<String>,
        /// Quotient stream `a0,a1,...`; a trailing `...` repeats the list.
        #[arg(long)]
        cf: Option<String>,
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Exhaustive search over `q` with `deg q_i ≤ m`.
    Brute {
        /// Coordinates separated by `;`.
        #[arg(long)]
        y: String,
        #[arg(long)]
        psi: String,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
    },
}

#[derive(Args, Serialize)]
struct MeasureArgs {
    /// Coordinates separated by `;`.
    #[arg(long)]
    y: String,
    #[arg(long, default_value = "sup")]
    phi: String,
    #[arg(long, allow_hyphen_values = true)]
    t: i64,
}

#[derive(Args, Serialize)]
struct ExponentArgs {
    #[arg(long)]
    y: String,
    #[arg(long)]
    m_max: i64,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum IntersectCommand {
    /// Classify `S ∩ A`.
    Classify {
        /// Surface JSON, inline or `@path`.
        #[arg(long)]
        surface: String,
        /// Hyperplane coefficients `a1,...,an,a_{n+1}`.
        #[arg(long)]
        hyperplane: String,
        /// Also run the substitution and grid checks.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        grid: u32,
        #[arg(long, default_value_t = 0, value_parser = parse_seed)]
        seed: u64,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum ConstructCommand {
    /// Build a point and its certificate.
    Build(BuildArgs),
    /// Re-check a certificate.
    Verify(VerifyArgs),
    /// Finite-resolution property probes of the axis family.
    Probe {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 4)]
        r: i64,
        #[arg(long, default_value_t = 6)]
        h: i64,
    },
}

#[derive(Args, Serialize)]
struct BuildArgs {
    /// Domain JSON (a surface, or `{"kind":"product","balls":[...]}`), inline or `@path`.
    #[arg(long)]
    surface: String,
    /// Rate `φ` in the psi syntax, e.g. `n=3`.
    #[arg(long)]
    phi: String,
    #[arg(long, default_value = "sup")]
    big_phi: String,
    #[arg(long)]
    stages: usize,
    /// Branch bits; accepts `0b`, `0x` or decimal.
    #[arg(long, default_value_t = 0, value_parser = parse_seed)]
    seed: u64,
    #[arg(long)]
    precision: i64,
    #[arg(long)]
    target_m: Option<i64>,
    #[arg(long, default_value_t = 2)]
    gap: i64,
    #[arg(long, default_value_t = 4)]
    guard_height: i64,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Constructed point JSON, inline or `@path`.
    #[arg(long)]
    point: String,
    #[arg(long = "M")]
    m: i64,
    #[arg(long = "H")]
    h: i64,
}

#[derive(Args, Serialize)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0, value_parser = parse_seed)]
    seed: u64,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.replace('_', "");
    let r = if let Some(b) = s.strip_prefix("0b") {
        u64::from_str_radix(b, 2)
    } else if let Some(h) = s.strip_prefix("0x") {
        u64::from_str_radix(h, 16)
    } else {
        s.parse()
    };
    r.map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Out = Result<Output, Failure>;

enum Output {
    Json(Json),
    Table {
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
        json: Json,
    },
}

/// Wraps parse failures of user input as usage errors.
fn arg<T>(what: &str, r: fqapprox::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("--{what}: {e}")))
}

fn read_json(what: &str, s: &str) -> Result<Json, Failure> {
    let text = match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--{what}: {path}: {e}")))?,
        None => s.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("--{what}: {e}")))
}

struct Ctx {
    field: Arc<Field>,
    floor: i64,
    cap: u128,
}

impl Ctx {
    fn value(&self, what: &str, s: &str) -> Result<Value, Failure> {
        arg(what, parse_value(&self.field, s, self.floor))
    }

    fn vector(&self, what: &str, s: &str) -> Result<Vec<Value>, Failure> {
        s.split(';').map(|p| self.value(what, p)).collect()
    }
}

fn run(cli: &Cli) -> Out {
    let field = arg("field", Field::parse_spec(&cli.run.field))?;
    let ctx = Ctx {
        field,
        floor: cli.run.floor,
        cap: cli.run.max_enum,
    };
    match &cli.command {
        Command::Cf(c) => cf(&ctx, c),
        Command::Dirichlet(c) => dirichlet(&ctx, c),
        Command::Measure(a) => {
            let y = ctx.vector("y", &a.y)?;
            let phi = arg("phi", PhiSpec::parse(&a.phi))?;
            let m = irrationality_measure(&y, &phi, a.t, ctx.cap)?;
            Ok(Output::Json(json!({
                "value_deg": m.value_deg,
                "q": m.q.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "q0": m.q0.to_string(),
            })))
        }
        Command::Exponent(a) => {
            let y = ctx.vector("y", &a.y)?;
            let om = uniform_exponent_estimate(&y, a.m_max, ctx.cap)?;
            let tail = tail_minimum(&om);
            let rows = om
                .iter()
                .zip(&tail)
                .enumerate()
                .map(|(i, (o, t))| vec![(i + 1).to_string(), o.to_string(), t.to_string()])
                .collect();
            Ok(Output::Table {
                header: vec!["m", "omega", "tail_min"],
                rows,
                json: json!({ "omega": om, "tail_minimum": tail }),
            })
        }
        Command::Intersect(IntersectCommand::Classify {
            surface,
            hyperplane,
            check,
            samples,
            grid,
            seed,
        }) => {
            let s = arg(
                "surface",
                Surface::from_json(&ctx.field, &read_json("surface", surface)?),
            )?;
            let a = arg(
                "hyperplane",
                parse_poly_vec(&ctx.field, hyperplane).and_then(|v| Hyperplane::new(&v)),
            )?;
            let c = s.classify(&a)?;
            let mut out = c.to_json();
            if *check {
                let pc = parametrization_check(&c, *samples, *seed, *grid)?;
                let gc = grid_completeness(&c, *grid)?;
                out["check"] = json!({ "parametrization": pc, "grid": gc });
            }
            Ok(Output::Json(out))
        }
        Command::Construct(ConstructCommand::Build(b)) => {
            let domain = arg(
                "surface",
                SurfaceDomain::from_json(&ctx.field, &read_json("surface", &b.surface)?),
            )?;
            let mut cfg = BuildConfig::new(arg("phi", PsiSpec::parse(&b.phi))?, b.stages, b.precision, b.seed);
            cfg.big_phi = arg("big-phi", PhiSpec::parse(&b.big_phi))?;
            cfg.target = b.target_m;
            cfg.gap = b.gap;
            cfg.guard_height = b.guard_height;
            cfg.cap = ctx.cap;
            Ok(Output::Json(singular_build(&domain, &cfg)?.to_json()))
        }
        Command::Construct(ConstructCommand::Verify(v)) | Command::Verify(v) => verify(&ctx, v),
        Command::Construct(ConstructCommand::Probe { surface, r, h }) => {
            let domain = arg(
                "surface",
                SurfaceDomain::from_json(&ctx.field, &read_json("surface", surface)?),
            )?;
            let fam = hyperplane_family(&domain, *h)?;
            let rep = property_a_probe(&fam, &domain, *r, *h)?;
            Ok(Output::Json(json!({ "family_size": fam.items.len(), "report": rep })))
        }
        Command::Selftest(a) => Ok(Output::Json(selftest(a.seed)?)),
    }
}

fn cf(ctx: &Ctx, c: &CfCommand) -> Out {
    match c {
        CfCommand::Expand { x, max_terms } => {
            let x = ctx.value("x", x)?;
            let (pq, err) = cf_expand_prefix(&x, *max_terms);
            if pq.terms.is_empty() {
                return Err(Failure::Domain(
                    err.unwrap_or_else(|| Error::Internal("no quotient".into())),
                ));
            }
            Ok(Output::Json(json!({
                "quotients": pq.terms.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "stopped": err.map(|e| json!({ "kind": e.kind(), "message": e.to_string() })),
            })))
        }
        CfCommand::Convergents { x, max_terms } => {
            let x = ctx.value("x", x)?;
            let (pq, _) = cf_expand_prefix(&x, *max_terms);
            let conv = cf_convergents(&pq);
            let rows: Vec<Vec<String>> = conv
                .pairs
                .iter()
                .enumerate()
                .map(|(n, (p, q))| vec![n.to_string(), p.to_string(), q.to_string()])
                .collect();
            let json = json!({
                "convergents": conv.pairs.iter().map(|(p, q)| json!({"p": p.to_string(), "q": q.to_string()})).collect::<Vec<_>>(),
                "determinant_holds": conv.determinant_holds(),
            });
            Ok(Output::Table {
                header: vec!["n", "p", "q"],
                rows,
                json,
            })
        }
        CfCommand::Best { x, deg_bound } => {
            let x = ctx.value("x", x)?;
            let b = best_approx_search(&x, *deg_bound, ctx.cap)?;
            Ok(Output::Json(
                json!({ "p": b.p.to_string(), "q": b.q.to_string(), "value_deg": b.value_deg }),
            ))
        }
    }
}

fn dirichlet(ctx: &Ctx, c: &DirichletCommand) -> Out {
    match c {
        DirichletCommand::Test { x, cf, psi, nmax } => {
            let psi = arg("psi", PsiSpec::parse(psi))?;
            let x = match (x, cf) {
                (Some(x), _) => ctx.value("x", x)?,
                (None, Some(s)) => ctx.value("cf", &format!("cf:{s}"))?,
                (None, None) => return Err(Failure::Usage("one of --x or --cf is required".into())),
            };
            let rows = dirichlet_test_cf(&x, &psi, *nmax)?;
            let all_fail = rows.iter().all(|r| !r.pass);
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.deg_q.to_string(),
                        r.lhs.to_string(),
                        r.threshold.to_string(),
                        r.pass.to_string(),
                        r.eq3.to_string(),
                    ]
                })
                .collect();
            Ok(Output::Table {
                header: vec!["n", "deg_q", "lhs", "threshold", "pass", "eq3"],
                rows: table,
                json: json!({ "rows": rows, "all_pass": rows.iter().all(|r| r.pass), "all_fail": all_fail }),
            })
        }
        DirichletCommand::Brute { y, psi, m } => {
            let y = ctx.vector("y", y)?;
            let psi = arg("psi", PsiSpec::parse(psi))?;
            Ok(Output::Json(
                serde_json::to_value(dirichlet_test_bruteforce(&y, &psi, *m, ctx.cap)?).expect("serialisable"),
            ))
        }
    }
}

fn verify(ctx: &Ctx, v: &VerifyArgs) -> Out {
    let doc = read_json("point", &v.point)?;
    // Accept a whole `construct build` document as well as the bare point.
    let doc = match doc.get("result") {
        Some(r) if doc.get("config").is_some() => r.clone(),
        _ => doc,
    };
    let pt = arg("point", ConstructedPoint::from_json(&doc))?;
    let opts = VerifyOptions {
        cap: ctx.cap,
        cross_cap: ctx.cap,
    };
    let verdict = certificate_verify_with(&pt, v.m, v.h, &opts)?;
    Ok(Output::Json(json!({ "pass": true, "verdict": verdict })))
}

fn emit(config: &Json, out: Output, format: Format) -> String {
    match (out, format) {
        (Output::Table { header, rows, .. }, Format::Tsv) => {
            let mut s = format!("# config {config}\n{}\n", header.join("\t"));
            for r in rows {
                s.push_str(&r.join("\t"));
                s.push('\n');
            }
            s
        }
        (Output::Table { json, .. }, Format::Json) | (Output::Json(json), _) => {
            let doc = json!({ "config": config, "result": json });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serialisable"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut config = serde_json::to_value(&cli).expect("serialisable");
    if let Ok(f) = Field::parse_spec(&cli.run.field) {
        config["run"]["field"] = json!(f.spec_string());
    }
    let mut stdout = std::io::stdout().lock();
    match run(&cli) {
        Ok(out) => {
            let _ = stdout.write_all(emit(&config, out, cli.run.format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            let record = json!({ "config": config, "error": { "kind": e.kind(), "message": e.to_string() } });
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&record).expect("serialisable")
            );
            ExitCode::from(1)
        }
    }
}
