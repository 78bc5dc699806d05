//! Command-line front end: every engine operation with JSON-first output.
//!
//! Exit codes: 0 on success, 1 on computation errors (domain, undecided,
//! precision), 2 on usage errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use germcalc::asymptotics::{
    alevel, classify, compare, decompose_ub, eh, eh_components, inverse_eh_bound, inverse_level,
    is_simple, level, limit, lm, Comparison, EhValue, Extended, LimitValue, Simplicity,
};
use germcalc::domain::{
    angle_bounded, domain_class, is_standard, nu_exp_class, nu_log_class, nu_mr, nu_pr,
    translate_sandwich, DomainSpec, Standardness,
};
use germcalc::lchart::{
    check_angle_positive, check_arg_distortion, check_dlipschitz, check_expansive,
    check_half_bounded, check_image_class, check_unit_at_infinity, eval_along_path,
    sample_domain, CheckParams, CheckReport, LPoint,
};
use germcalc::oracle;
use germcalc::term::{parse, Term};
use germcalc::{simplify, Error, Rational};

#[derive(Parser)]
#[command(
    name = "germcalc",
    about = "Asymptotic calculus for exp-log germs at +infinity",
    version
)]
struct Cli {
    /// Working precision in bits for numeric evaluation.
    #[arg(long, global = true, default_value_t = 256)]
    precision: usize,
    /// Maximal precision for escalating sign decisions.
    #[arg(long, global = true, default_value_t = 4096)]
    max_precision: usize,
    /// Plain text output instead of JSON.
    #[arg(long, global = true)]
    plain: bool,
    /// Seed for randomized property checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Check configuration JSON file (see docs/schemas/params.json).
    #[arg(long, global = true)]
    params: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and report its structure.
    Parse { expr: String },
    /// Rewrite an expression to normal form.
    Simplify { expr: String },
    /// Limit at +infinity.
    Limit { expr: String },
    /// Dominance comparison of two eventually positive germs.
    Cmp { f: String, g: String },
    /// Leading coefficient and monomial.
    Lm { expr: String },
    /// Germ class.
    Classify { expr: String },
    /// Growth level.
    Level { expr: String },
    /// Exponential height.
    Eh { expr: String },
    /// Angular level.
    Alevel { expr: String },
    /// Purely-infinite / bounded split.
    Decompose { expr: String },
    /// Summands grouped by exact height.
    Components { expr: String },
    /// Is the germ simple (eh = level)?
    Simple { expr: String },
    /// Height bound for g o f^{-1} from (eh g, eh f, level f).
    InvEhBound { eh_g: i64, eh_f: i64, level_f: i64 },
    /// Level of the compositional inverse.
    InvLevel { level_f: i64 },
    /// Domain arithmetic on real domains.
    #[command(subcommand)]
    Domain(DomainCmd),
    /// Numeric continuation checks on the surface.
    #[command(subcommand, name = "continue")]
    Continue(ContinueCmd),
    /// Brute-force numeric oracle.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion (1..10).
        #[arg(long)]
        criterion: Option<u32>,
    },
}

#[derive(Subcommand)]
enum DomainCmd {
    /// Angular-level class of U_h.
    Class { bound: String },
    /// Bound of the image under scalar multiplication m_r.
    NuMr { bound: String, r: String },
    /// Bound of the image under the power map p_r.
    NuPr { bound: String, r: String },
    /// Class and asymptotic template of the log image.
    NuLog { bound: String },
    /// Class of the exp image (standard domains only).
    NuExp { bound: String },
    /// Is U_h a standard domain?
    Standard { bound: String },
    /// Translation sandwich bounds h(x -+ eps).
    Sandwich { bound: String, eps: String },
    /// Is U_h angle-bounded?
    AngleBounded { bound: String },
}

#[derive(Args)]
struct CheckArgs {
    /// The germ under test.
    expr: String,
    /// Domain bound h for U_h.
    #[arg(long)]
    bound: String,
    /// Base radius of the domain.
    #[arg(long, default_value_t = 4.0)]
    radius: f64,
    /// Number of random sample pairs for pairwise statistics.
    #[arg(long, default_value_t = 2000)]
    pairs: usize,
    /// Write the sampled points and values as CSV.
    #[arg(long)]
    dump: Option<String>,
}

#[derive(Subcommand)]
enum ContinueCmd {
    /// Evaluate along a path `u:v;u:v;...` starting on the real axis.
    Eval {
        expr: String,
        /// Path, e.g. "2:0;2:1.5;3:3.0".
        #[arg(long)]
        path: String,
    },
    AnglePositive(CheckArgs),
    HalfBounded(CheckArgs),
    Expansive(CheckArgs),
    Dlipschitz(CheckArgs),
    ImageClass {
        #[command(flatten)]
        common: CheckArgs,
        /// Lower target bound g1.
        #[arg(long)]
        lower: String,
        /// Upper target bound g2.
        #[arg(long)]
        upper: String,
    },
    Unit(CheckArgs),
    ArgDistortion {
        #[command(flatten)]
        common: CheckArgs,
        /// The unit factor.
        #[arg(long)]
        unit: String,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Numeric limit estimate on a grid.
    Limit {
        expr: String,
        /// Comma-separated grid of x values; defaults to the standard grid.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Numeric level estimate by iterated-exponential sandwiches.
    Level {
        expr: String,
        #[arg(long, default_value_t = 2)]
        max_k: u32,
        #[arg(long, default_value_t = 4)]
        max_nu: u32,
    },
    /// Numeric dominance estimate.
    Cmp {
        f: String,
        g: String,
        #[arg(long)]
        grid: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Output::Json(v)) => {
            if cli.plain {
                println!("{}", plain_of(&v));
            } else {
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            }
            ExitCode::SUCCESS
        }
        Ok(Output::Selftest(ok)) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let v = json!({"status": "error", "code": e.code(), "message": e.to_string()});
            if cli.plain {
                eprintln!("error[{}]: {}", e.code(), e);
            } else {
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            }
            ExitCode::from(1)
        }
    }
}

enum Output {
    Json(Value),
    Selftest(bool),
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let params = load_params(cli)?;
    let v = match &cli.command {
        Command::Parse { expr } => {
            let t = parse(expr)?;
            json!({
                "parsed": format!("{t}"),
                "tower_height": t.tower_height(),
                "id": format!("{:016x}", t.id().0),
            })
        }
        Command::Simplify { expr } => {
            let t = simplify(&parse(expr)?);
            json!({"simplified": format!("{t}"), "id": format!("{:016x}", t.id().0)})
        }
        Command::Limit { expr } => json!({"limit": limit_json(&limit(&parse(expr)?)?)}),
        Command::Cmp { f, g } => {
            let verdict = compare(&parse(f)?, &parse(g)?)?;
            json!({"cmp": cmp_json(&verdict)})
        }
        Command::Lm { expr } => {
            let (c, m) = lm(&parse(expr)?)?;
            json!({"lm": {
                "coefficient": limit_json(&c),
                "monomial": format!("{m}"),
                "log_depth": m.log_depth(),
            }})
        }
        Command::Classify { expr } => {
            json!({"class": classify(&parse(expr)?)?.name()})
        }
        Command::Level { expr } => json!({"level": extended_json(&level(&parse(expr)?)?)}),
        Command::Eh { expr } => json!({"eh": eh_json(&eh(&parse(expr)?)?)}),
        Command::Alevel { expr } => json!({"alevel": alevel(&parse(expr)?)?}),
        Command::Decompose { expr } => {
            let (u, b) = decompose_ub(&parse(expr)?)?;
            json!({"purely_infinite": format!("{u}"), "bounded": format!("{b}")})
        }
        Command::Components { expr } => {
            let parts = eh_components(&parse(expr)?)?;
            json!({"components": parts.iter().map(|(k, t)| {
                json!({"eh": extended_json(k), "part": format!("{t}")})
            }).collect::<Vec<_>>()})
        }
        Command::Simple { expr } => {
            let s = is_simple(&parse(expr)?)?;
            json!({"simple": match s {
                Simplicity::Simple => json!(true),
                Simplicity::NotSimple => json!(false),
                Simplicity::Undecided => json!("undecided"),
            }})
        }
        Command::InvEhBound { eh_g, eh_f, level_f } => {
            json!({"bound": inverse_eh_bound(*eh_g, *eh_f, *level_f)})
        }
        Command::InvLevel { level_f } => json!({"level": inverse_level(*level_f)}),
        Command::Domain(cmd) => domain_cmd(cmd)?,
        Command::Continue(cmd) => continue_cmd(cmd, &params)?,
        Command::Oracle(cmd) => oracle_cmd(cmd, cli)?,
        Command::Selftest { criterion } => {
            let results = match criterion {
                Some(id) => vec![germcalc::accept::run_one(*id, cli.seed)],
                None => germcalc::accept::run_all(cli.seed),
            };
            let mut ok = true;
            for r in &results {
                println!("{}", r.line());
                ok &= r.passed;
            }
            return Ok(Output::Selftest(ok));
        }
    };
    Ok(Output::Json(v))
}

fn load_params(cli: &Cli) -> Result<CheckParams, Error> {
    let mut p = match &cli.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Syntax { pos: 0, msg: format!("params file: {e}") })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Syntax { pos: 0, msg: format!("params JSON: {e}") })?
        }
        None => CheckParams::default(),
    };
    if cli.params.is_none() {
        p.precision_bits = cli.precision;
    }
    Ok(p)
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = parse(s)?;
    match t.as_const().and_then(|c| c.as_rational().cloned()) {
        Some(q) => Ok(q),
        None => Err(Error::Syntax { pos: 0, msg: format!("`{s}` is not a rational") }),
    }
}

fn domain_cmd(cmd: &DomainCmd) -> Result<Value, Error> {
    Ok(match cmd {
        DomainCmd::Class { bound } => {
            let spec = DomainSpec::new(parse(bound)?, 0.0);
            let c = domain_class(&spec)?;
            let (w1, w2) = c.witnesses.clone().unwrap();
            json!({"class": c.k, "witnesses": [format!("{w1}"), format!("{w2}")]})
        }
        DomainCmd::NuMr { bound, r } => {
            let out = nu_mr(&parse(bound)?, &parse_rational(r)?)?;
            json!({"bound": format!("{out}")})
        }
        DomainCmd::NuPr { bound, r } => {
            let out = nu_pr(&parse(bound)?, &parse_rational(r)?)?;
            json!({"bound": format!("{out}")})
        }
        DomainCmd::NuLog { bound } => {
            let out = nu_log_class(&parse(bound)?)?;
            json!({"class": out.class, "asymptotic_form": format!("{}", out.asymptotic_form)})
        }
        DomainCmd::NuExp { bound } => {
            json!({"class": nu_exp_class(&parse(bound)?)?})
        }
        DomainCmd::Standard { bound } => {
            let s = is_standard(&parse(bound)?)?;
            json!({"standard": match s {
                Standardness::Standard => json!(true),
                Standardness::NotStandard => json!(false),
                Standardness::Undecided => json!("undecided"),
            }})
        }
        DomainCmd::Sandwich { bound, eps } => {
            let (lo, hi) = translate_sandwich(&parse(bound)?, &parse_rational(eps)?)?;
            json!({"lower": format!("{lo}"), "upper": format!("{hi}")})
        }
        DomainCmd::AngleBounded { bound } => {
            json!({"angle_bounded": angle_bounded(&parse(bound)?)?})
        }
    })
}

fn parse_path(text: &str) -> Result<Vec<LPoint>, Error> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (u, v) = part.split_once(':').ok_or_else(|| Error::Syntax {
            pos: 0,
            msg: format!("path point `{part}` is not `logmod:arg`"),
        })?;
        let u: f64 = u.trim().parse().map_err(|_| Error::Syntax {
            pos: 0,
            msg: format!("bad logmod `{u}`"),
        })?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Syntax {
            pos: 0,
            msg: format!("bad arg `{v}`"),
        })?;
        out.push(LPoint::new(u, v));
    }
    Ok(out)
}

fn continue_cmd(cmd: &ContinueCmd, params: &CheckParams) -> Result<Value, Error> {
    let report_json = |r: &CheckReport| serde_json::to_value(r).unwrap();
    Ok(match cmd {
        ContinueCmd::Eval { expr, path } => {
            let f = parse(expr)?;
            let pts = parse_path(path)?;
            let values = eval_along_path(&f, &pts, params.precision_bits)?;
            json!({"values": values})
        }
        ContinueCmd::AnglePositive(a) => {
            let (f, spec) = check_setup(a)?;
            let r = check_angle_positive(&f, &spec, params)?;
            maybe_dump(a, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
        ContinueCmd::HalfBounded(a) => {
            let (f, spec) = check_setup(a)?;
            let r = check_half_bounded(&f, &spec, params)?;
            maybe_dump(a, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
        ContinueCmd::Expansive(a) => {
            let (f, spec) = check_setup(a)?;
            let r = check_expansive(&f, &spec, params, a.pairs, 0)?;
            maybe_dump(a, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
        ContinueCmd::Dlipschitz(a) => {
            let (f, spec) = check_setup(a)?;
            let r = check_dlipschitz(&f, &spec, params, a.pairs, 0)?;
            maybe_dump(a, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
        ContinueCmd::ImageClass { common, lower, upper } => {
            let (f, spec) = check_setup(common)?;
            let g1 = parse(lower)?;
            let g2 = parse(upper)?;
            let r = check_image_class(&f, &spec, (&g1, &g2), params)?;
            maybe_dump(common, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
        ContinueCmd::Unit(a) => {
            let (f, spec) = check_setup(a)?;
            let r = check_unit_at_infinity(&f, &spec, params)?;
            maybe_dump(a, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
        ContinueCmd::ArgDistortion { common, unit } => {
            let (f, spec) = check_setup(common)?;
            let u = parse(unit)?;
            let r = check_arg_distortion(&f, &u, &spec, params)?;
            maybe_dump(common, &f, &spec, params)?;
            json!({"report": report_json(&r)})
        }
    })
}

fn check_setup(a: &CheckArgs) -> Result<(Term, DomainSpec), Error> {
    let f = parse(&a.expr)?;
    let spec = DomainSpec::new(parse(&a.bound)?, a.radius);
    Ok((f, spec))
}

fn maybe_dump(
    a: &CheckArgs,
    f: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
) -> Result<(), Error> {
    let Some(path) = &a.dump else { return Ok(()) };
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let mut csv = String::from("logmod,arg,f_logmod,f_arg\n");
    for s in &samples {
        match germcalc::lchart::eval_along_path(
            f,
            &[LPoint::on_axis(s.logmod), *s],
            params.precision_bits,
        ) {
            Ok(vals) => {
                let y = vals.last().unwrap();
                csv.push_str(&format!("{},{},{},{}\n", s.logmod, s.arg, y.logmod, y.arg));
            }
            Err(_) => csv.push_str(&format!("{},{},,\n", s.logmod, s.arg)),
        }
    }
    std::fs::write(path, csv)
        .map_err(|e| Error::PrecisionExhausted(format!("cannot write dump: {e}")))?;
    Ok(())
}

fn parse_grid(grid: &Option<String>) -> Result<Vec<f64>, Error> {
    match grid {
        None => Ok(oracle::default_grid()),
        Some(text) => text
            .split(',')
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| Error::Syntax {
                    pos: 0,
                    msg: format!("bad grid value `{p}`"),
                })
            })
            .collect(),
    }
}

fn oracle_cmd(cmd: &OracleCmd, cli: &Cli) -> Result<Value, Error> {
    Ok(match cmd {
        OracleCmd::Limit { expr, grid } => {
            let est = oracle::numeric_limit(&parse(expr)?, &parse_grid(grid)?, cli.precision)?;
            serde_json::to_value(&est).unwrap()
        }
        OracleCmd::Level { expr, max_k, max_nu } => {
            let est = oracle::numeric_level(&parse(expr)?, *max_k, *max_nu, cli.precision)?;
            serde_json::to_value(&est).unwrap()
        }
        OracleCmd::Cmp { f, g, grid } => {
            let est = oracle::numeric_compare(
                &parse(f)?,
                &parse(g)?,
                &parse_grid(grid)?,
                cli.precision,
            )?;
            serde_json::to_value(&est).unwrap()
        }
    })
}

fn extended_json(v: &Extended) -> Value {
    match v {
        Extended::NegInf => json!("-inf"),
        Extended::Int(n) => json!(n),
    }
}

fn eh_json(v: &EhValue) -> Value {
    match v {
        EhValue::Exact(e) => json!({"exact": extended_json(e)}),
        EhValue::Range { lo, hi } => json!({"range": [extended_json(lo), json!(hi)]}),
    }
}

fn limit_json(v: &LimitValue) -> Value {
    match v {
        LimitValue::PlusInfinity => json!("+inf"),
        LimitValue::MinusInfinity => json!("-inf"),
        LimitValue::Zero => json!(0),
        LimitValue::FiniteNonzero { sign, enclosure, exact } => json!({
            "finite": {
                "sign": sign,
                "enclosure": [enclosure.0, enclosure.1],
                "exact": exact.as_ref().map(|c| format!("{c}")),
            }
        }),
    }
}

fn cmp_json(v: &Comparison) -> Value {
    match v {
        Comparison::Less => json!("less"),
        Comparison::Greater => json!("greater"),
        Comparison::Comparable(r) => json!({"comparable": {"ratio": limit_json(r)}}),
    }
}

/// Rough plain-text rendering of a JSON payload value.
fn plain_of(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}: {}", plain_of(v)))
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Array(xs) => xs.iter().map(plain_of).collect::<Vec<_>>().join(", "),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
