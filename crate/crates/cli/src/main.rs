//! `corrbound` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 cache problem.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use corrbound::arith::{rational_to_decimal_ceil, rational_to_decimal_floor, Integer, Rational};
use corrbound::correlation::{GramCache, GramMeta, GramSystem, Parametrization, TruncationParams};
use corrbound::kernel2::{k00, kernel2_eval};
use corrbound::solver::{decimal, fraction_bound, optimize, BoundCertificate};
use corrbound::symmetry::{BasisFunction, InvariantBasis};
use corrbound::Error;

const DIGITS: usize = 9;

#[derive(Parser)]
#[command(name = "corrbound", version, about = "Certified bounds for correlation functionals")]
struct Cli {
    /// Directory of the Gram entry cache [default: ./corrbound-cache].
    #[arg(long, global = true, env = "CORRBOUND_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads for lattice sums (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify one bound.
    Bound(BoundArgs),
    /// Certify bounds over a range of d.
    Table(TableArgs),
    /// Evaluate the n = 2 reproducing kernel.
    Kernel2(Kernel2Args),
    /// Inspect or maintain the Gram cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Param {
    Poly,
    Shift,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: u32,
    #[arg(long, value_enum)]
    param: Param,
    /// Lattice box half-width (shift path). Defaults: 400 for n = 2, 200 for n = 3, 25 for n = 4.
    #[arg(long = "C")]
    c: Option<u32>,
    /// Working precision in bits.
    #[arg(long, default_value_t = 256)]
    prec: u32,
    /// Largest accepted tail radius relative to sqrt(A_ii A_jj).
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Neither read nor write the cache.
    #[arg(long)]
    no_cache: bool,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Polynomial path: the table index, i.e. twice the degree. Shift path: orbit radius.
    #[arg(long)]
    d: u32,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    sys: SystemArgs,
    #[arg(long, default_value_t = 0)]
    d_min: u32,
    #[arg(long)]
    d_max: u32,
    /// Defaults to 10 on the polynomial path and 1 on the shift path.
    #[arg(long)]
    step: Option<u32>,
}

#[derive(Args)]
struct Kernel2Args {
    #[arg(long)]
    m: u32,
    /// Rational `a/b` or exact decimal.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    x: Option<Rational>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    y: Option<Rational>,
    #[arg(long, default_value_t = 256)]
    prec: u32,
}

#[derive(Subcommand)]
enum CacheAction {
    List,
    /// Recompute a random sample of entries and compare.
    Verify {
        #[arg(long, default_value_t = 0.05)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Clear,
}

enum Failure {
    Config(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Lib(e) if e.is_numeric() => 2,
            Failure::Lib(e) if e.is_cache() || matches!(e, Error::Io(_)) => 3,
            Failure::Lib(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(s) => f.write_str(s),
            Failure::Lib(e) => write!(f, "{}", e),
        }
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    }
    let cache = GramCache::new(cli.cache_dir.clone().unwrap_or_else(|| PathBuf::from("corrbound-cache")));
    let result = match &cli.cmd {
        Command::Bound(a) => bound(&cache, a),
        Command::Table(a) => table(&cache, a),
        Command::Kernel2(a) => kernel2(a),
        Command::Cache { action } => cache_cmd(&cache, action),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f);
            ExitCode::from(f.code())
        }
    }
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let bad = || format!("expected a/b or a decimal, got {:?}", s);
    if s.contains('/') {
        return s.parse::<Rational>().map_err(|_| bad());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{}{}", ip, fp);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num: Integer = digits.parse().map_err(|_| bad())?;
    let q = Rational::from((num, Integer::from(Integer::u_pow_u(10, fp.len() as u32))));
    Ok(if neg { -q } else { q })
}

impl SystemArgs {
    fn parametrization(&self) -> Parametrization {
        match self.param {
            Param::Poly => Parametrization::Poly,
            Param::Shift => Parametrization::Shift,
        }
    }

    fn truncation(&self) -> std::result::Result<Option<TruncationParams>, Failure> {
        if self.param == Param::Poly {
            return Ok(None);
        }
        let c = self.c.unwrap_or(match self.n {
            2 => 400,
            3 => 200,
            _ => 25,
        });
        let mut t = TruncationParams::standard(self.n, self.m, c)?;
        if let Some(tol) = self.tail_tol {
            if !(tol > 0.0) {
                return Err(Failure::Config("--tail-tol must be positive".into()));
            }
            t.tail_tolerance = tol;
        }
        Ok(Some(t))
    }

    fn validate(&self) -> std::result::Result<(), Failure> {
        if self.m == 0 {
            return Err(Failure::Config("--m must be at least 1".into()));
        }
        match self.param {
            Param::Poly if (self.n, self.m) != (3, 1) => {
                Err(Failure::Config("the polynomial path supports only --n 3 --m 1".into()))
            }
            Param::Shift if !(2..=4).contains(&self.n) => {
                Err(Failure::Config("the shift path supports --n 2, 3 or 4".into()))
            }
            _ => Ok(()),
        }
    }

    /// Basis parameter for a printed index: the degree `d/2` on the
    /// polynomial path, the orbit radius itself on the shift path.
    fn basis_d(&self, d: u32) -> u32 {
        match self.param {
            Param::Poly => d / 2,
            Param::Shift => d,
        }
    }

    fn meta(&self, d: u32) -> std::result::Result<GramMeta, Failure> {
        Ok(GramMeta {
            n: self.n,
            m: self.m,
            parametrization: self.parametrization(),
            d: self.basis_d(d),
            truncation: self.truncation()?,
            prec: self.prec,
        })
    }

    fn config_json(&self, d: u32) -> Value {
        let t = self.truncation().ok().flatten();
        json!({
            "n": self.n,
            "m": self.m,
            "param": match self.param { Param::Poly => "poly", Param::Shift => "shift" },
            "d": d,
            "C": t.as_ref().map(|t| t.c),
            "tail_tol": t.as_ref().map(|t| t.tail_tolerance),
            "prec": self.prec,
        })
    }
}

fn system(cache: &GramCache, args: &SystemArgs, meta: &GramMeta) -> std::result::Result<(GramSystem, bool), Failure> {
    if args.no_cache {
        let basis = meta.basis()?;
        let sys = corrbound::correlation::assemble_gram(meta.n, meta.m, &basis, &meta.params()?, meta.prec)?;
        return Ok((sys, false));
    }
    Ok(cache.system(meta)?)
}

/// Orbit representatives (shift path) or polynomials (polynomial path).
fn basis_json(basis: &InvariantBasis) -> Vec<Value> {
    basis
        .functions
        .iter()
        .map(|f| match f {
            BasisFunction::Poly(p) => json!(p.to_string()),
            BasisFunction::Orbit { points, .. } => json!({ "representative": points[0], "size": points.len() }),
        })
        .collect()
}

struct Row {
    d: u32,
    size: usize,
    cert: BoundCertificate,
    time: f64,
}

impl Row {
    fn bound_upper(&self) -> String {
        rational_to_decimal_ceil(&self.cert.bound_upper(), DIGITS)
    }

    fn fraction_lower(&self) -> String {
        rational_to_decimal_floor(&self.cert.fraction_lower(), DIGITS)
    }

    fn radius(&self) -> String {
        format!("{:.2e}", self.cert.bound.rad_f64())
    }
}

const CSV_HEADER: &str = "n,m,param,d,basis_size,bound_upper,fraction_lower,bound_radius,dropped,time_s";

fn csv_row(args: &SystemArgs, r: &Row) -> String {
    let param = match args.param {
        Param::Poly => "poly",
        Param::Shift => "shift",
    };
    let dropped: Vec<String> = r.cert.dropped.iter().map(|i| i.to_string()).collect();
    format!(
        "{},{},{},{},{},{},{},{},{},{:.3}",
        args.n,
        args.m,
        param,
        r.d,
        r.size,
        r.bound_upper(),
        r.fraction_lower(),
        r.radius(),
        dropped.join(";"),
        r.time
    )
}

fn row_json(args: &SystemArgs, r: &Row, basis: &InvariantBasis) -> Value {
    let mut v = r.cert.to_json();
    let obj = v.as_object_mut().expect("certificate is an object");
    obj.insert("config".into(), args.config_json(r.d));
    obj.insert("basis".into(), json!(basis_json(basis)));
    obj.insert("bound_upper".into(), json!(r.bound_upper()));
    obj.insert("fraction_lower".into(), json!(r.fraction_lower()));
    obj.insert("time_s".into(), json!(r.time));
    v
}

fn bound(cache: &GramCache, a: &BoundArgs) -> Outcome {
    let args = &a.sys;
    args.validate()?;
    let start = Instant::now();
    let meta = args.meta(a.d)?;
    let basis = meta.basis()?;
    let (sys, hit) = system(cache, args, &meta)?;
    let cert = optimize(&sys)?;
    let row = Row { d: a.d, size: basis.len(), cert, time: start.elapsed().as_secs_f64() };
    match args.output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&row_json(args, &row, &basis)).unwrap()),
        Output::Csv => {
            println!("{}", CSV_HEADER);
            println!("{}", csv_row(args, &row));
        }
        Output::Text => {
            let what = match args.param {
                Param::Poly => format!("polynomial basis, degree {}", meta.d),
                Param::Shift => format!("shift basis, radius {}, C = {}", meta.d, meta.truncation.as_ref().unwrap().c),
            };
            println!("n = {}, m = {}, d = {} ({})", args.n, args.m, a.d, what);
            println!("basis size      {}", row.size);
            if !row.cert.dropped.is_empty() {
                println!("dropped         {:?}", row.cert.dropped);
            }
            println!("bound <=        {}", row.bound_upper());
            println!("fraction >=     {}", row.fraction_lower());
            if row.cert.bound.is_exact() {
                println!("enclosure       exact");
            } else {
                println!("enclosure       {:.12}", row.cert.bound);
            }
            println!("time            {:.3} s{}", row.time, if hit { " (cached Gram)" } else { "" });
        }
    }
    Ok(0)
}

fn table(cache: &GramCache, a: &TableArgs) -> Outcome {
    let args = &a.sys;
    args.validate()?;
    let step = a.step.unwrap_or(match args.param {
        Param::Poly => 10,
        Param::Shift => 1,
    });
    if step == 0 {
        return Err(Failure::Config("--step must be positive".into()));
    }
    let ds: Vec<u32> = (a.d_min..=a.d_max).step_by(step as usize).collect();
    match args.output {
        Output::Csv => println!("{}", CSV_HEADER),
        Output::Text => println!("{:>4} {:>5} {:>14} {:>14} {:>10} {:>9}", "d", "size", "bound<=", "fraction>=", "radius", "time_s"),
        Output::Json => {}
    }
    let Some(&d_top) = ds.last() else {
        return Ok(0);
    };

    // One assembly at the largest d serves every row through its leading block.
    let start = Instant::now();
    let shared = args.meta(d_top).and_then(|m| system(cache, args, &m));
    if let Err(e) = &shared {
        eprintln!("note: shared assembly at d = {} failed ({}); assembling rows separately", d_top, e);
    }
    let shared_time = start.elapsed().as_secs_f64();

    let mut failed = false;
    for &d in &ds {
        let start = Instant::now();
        let row = (|| -> std::result::Result<(Row, InvariantBasis), Failure> {
            let meta = args.meta(d)?;
            let basis = meta.basis()?;
            let sys = match &shared {
                Ok((big, _)) => {
                    let mut s = big.principal(basis.len());
                    s.meta = meta;
                    s
                }
                Err(_) => system(cache, args, &meta)?.0,
            };
            let cert = optimize(&sys)?;
            let mut time = start.elapsed().as_secs_f64();
            if d == d_top && shared.is_ok() {
                time += shared_time;
            }
            Ok((Row { d, size: basis.len(), cert, time }, basis))
        })();
        match row {
            Ok((r, basis)) => match args.output {
                Output::Csv => println!("{}", csv_row(args, &r)),
                Output::Json => println!("{}", serde_json::to_string(&row_json(args, &r, &basis)).unwrap()),
                Output::Text => println!(
                    "{:>4} {:>5} {:>14} {:>14} {:>10} {:>9.3}",
                    r.d,
                    r.size,
                    r.bound_upper(),
                    r.fraction_lower(),
                    r.radius(),
                    r.time
                ),
            },
            Err(e) => {
                failed = true;
                eprintln!("error: d = {}: {}", d, e);
            }
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn kernel2(a: &Kernel2Args) -> Outcome {
    if a.m == 0 {
        return Err(Failure::Config("--m must be at least 1".into()));
    }
    let (k, c) = k00(a.m, a.prec);
    let frac = fraction_bound(2, &c);
    println!("K(0,0)      {}", decimal(&k));
    println!("c_2,m       {}", decimal(&c));
    let note = if frac.to_f64() <= 0.0 { "vacuous" } else { "other methods give sharper n = 2 bounds" };
    println!("fraction    {}  (1 - c; {})", decimal(&frac), note);
    if a.x.is_some() || a.y.is_some() {
        let zero = Rational::new();
        let x = a.x.as_ref().unwrap_or(&zero);
        let y = a.y.as_ref().unwrap_or(&zero);
        let v = kernel2_eval(a.m, x, y, a.prec)?;
        println!("K({}, {})  {}", x, y, decimal(&v));
    }
    Ok(0)
}

fn cache_cmd(cache: &GramCache, action: &CacheAction) -> Outcome {
    match action {
        CacheAction::List => {
            let list = cache.list()?;
            if list.is_empty() {
                println!("cache at {} is empty", cache.dir().display());
            }
            for s in list {
                let c = s.meta.truncation.as_ref().map(|t| format!(" C={}", t.c)).unwrap_or_default();
                let p = match s.meta.parametrization {
                    Parametrization::Poly => "poly",
                    Parametrization::Shift => "shift",
                };
                println!(
                    "n={} m={} {} d={}{} prec={} records={}",
                    s.meta.n, s.meta.m, p, s.meta.d, c, s.meta.prec, s.records
                );
            }
            Ok(0)
        }
        CacheAction::Verify { fraction, seed } => {
            if !(*fraction > 0.0 && *fraction <= 1.0) {
                return Err(Failure::Config("--fraction must lie in (0, 1]".into()));
            }
            let report = cache.verify(*fraction, *seed)?;
            println!("checked {} entries, {} stale", report.checked, report.stale.len());
            for (meta, i, j) in &report.stale {
                println!("stale: n={} m={} d={} entry ({}, {})", meta.n, meta.m, meta.d, i, j);
            }
            Ok(if report.stale.is_empty() { 0 } else { 3 })
        }
        CacheAction::Clear => {
            let n = cache.clear()?;
            println!("removed {} records", n);
            Ok(0)
        }
    }
}
