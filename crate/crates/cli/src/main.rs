use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cuspforge::catalog::{self, Family, GridBounds};
use cuspforge::invariants::{CharacteristicExponents, CuspType, MultiplicitySequence, NewtonPairs};
use cuspforge::poly::Poly;
use cuspforge::projective::{
    analyze_parameter, certify_singular_points, AffineChart, ProjectiveParametrization, ProjectivePoint, XYZ,
};
use cuspforge::puiseux::analyze_origin;
use cuspforge::script::{self, corpus};
use cuspforge::series::default_precision;

const PRECISION_VAR: &str = "CUSPFORGE_PRECISION";

#[derive(Parser)]
#[command(name = "cuspforge", version, about = "Invariants, blow-up bookkeeping and construction replays for rational cuspidal plane curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Family catalog.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Converts between Newton pairs, characteristic exponents and multiplicity sequences.
    Convert(ConvertArgs),
    /// Executes a construction script.
    Run(RunArgs),
    /// Local branch analysis of a plane curve or a parametrization.
    Analyze(AnalyzeArgs),
    /// The shipped construction scripts.
    #[command(subcommand)]
    Scripts(ScriptsCmd),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Lists the families with their formulas.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Verifies every family member on a parameter grid.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict to one family (a1, a2, a3, a4, b, c, d1, d2, e, f).
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 6)]
    umax: u64,
    #[arg(long, default_value_t = 6)]
    lmax: u64,
    #[arg(long, default_value_t = 6)]
    mmax: u64,
    #[arg(long, default_value_t = 12)]
    kmax: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "encoding")]
struct ConvertInput {
    /// e.g. "(2,5)(3,1)"
    #[arg(long)]
    newton: Option<String>,
    /// e.g. "(6;15,16)"
    #[arg(long = "char")]
    char_exp: Option<String>,
    /// e.g. "[6_2,3_2]"
    #[arg(long)]
    multseq: Option<String>,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: ConvertInput,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Prints the configuration after every step.
    #[arg(long)]
    trace: bool,
    /// Writes one DOT file per step into this directory.
    #[arg(long)]
    dot_dir: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Homogeneous polynomial in x, y, z.
    #[arg(long, requires = "point", conflicts_with_all = ["param", "at"])]
    poly: Option<String>,
    /// Point of the plane, e.g. "[0:1:0]".
    #[arg(long)]
    point: Option<String>,
    /// Three binary forms in t, s separated by commas.
    #[arg(long, requires = "at")]
    param: Option<String>,
    /// Parameter value, e.g. "[0:1]"; repeat to analyse several.
    #[arg(long)]
    at: Vec<String>,
    /// With --param: check that the given values account for every singular point.
    #[arg(long, requires = "param")]
    certify: bool,
    /// Starting series precision (default: CUSPFORGE_PRECISION or 4 times the degree).
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ScriptsCmd {
    /// Executes the whole shipped corpus.
    Verify {
        #[arg(long)]
        json: bool,
    },
    /// Writes the corpus as .cfs files into a directory.
    Emit { dir: PathBuf },
}

/// Outcome of a command: 0 success, 1 failed verification, 2 bad input.
enum Failure {
    Verification,
    Input(String),
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Catalog(CatalogCmd::List { json }) => catalog_list(json),
        Command::Catalog(CatalogCmd::Verify(args)) => catalog_verify(&args),
        Command::Convert(args) => convert(&args),
        Command::Run(args) => run(&args),
        Command::Analyze(args) => analyze(&args),
        Command::Scripts(ScriptsCmd::Verify { json }) => scripts_verify(json),
        Command::Scripts(ScriptsCmd::Emit { dir }) => scripts_emit(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn catalog_list(json: bool) -> Outcome {
    let rows: Vec<Value> = Family::ALL
        .iter()
        .map(|f| {
            json!({
                "family": f.id(),
                "degree": f.degree_formula(),
                "cusps": f.cusp_formulas(),
                "newton": f.pair_formulas(),
                "remark": f.remark(),
            })
        })
        .collect();
    if json {
        print_json(&rows);
        return Ok(());
    }
    for f in Family::ALL {
        let [c1, c2] = f.cusp_formulas();
        let [n1, n2] = f.pair_formulas();
        println!("({f}) degree {}", f.degree_formula());
        println!("    {c1} and {c2}");
        println!("    {n1} and {n2}");
        if let Some(r) = f.remark() {
            println!("    note: {r}");
        }
    }
    Ok(())
}

fn catalog_verify(args: &VerifyArgs) -> Outcome {
    let families = match &args.family {
        Some(id) => vec![id.parse::<Family>().map_err(input)?],
        None => Family::ALL.to_vec(),
    };
    let bounds = GridBounds { umax: args.umax, lmax: args.lmax, mmax: args.mmax, kmax: args.kmax };
    let grid = catalog::grid(&families, bounds);
    let results = catalog::verify_grid(&families, bounds);
    let mut failed = 0;
    let mut rows = Vec::new();
    let mut text = String::new();
    for (params, r) in grid.iter().zip(&results) {
        match r {
            Ok(rep) => {
                if !rep.passed() {
                    failed += 1;
                }
                let seqs: Vec<String> = catalog::instantiate(params)
                    .map(|fi| fi.multseqs.iter().map(|m| m.to_string()).collect())
                    .unwrap_or_default();
                let genus = rep.genus.as_ref().map_or("-".to_string(), |g| g.to_string());
                let cbar = rep.cbar_squared.as_ref().map_or("-".to_string(), |c| c.to_string());
                let _ = writeln!(
                    text,
                    "{:<22} d={:<5} {:<40} genus {:<14} pairs {:<3} cbar^2 {:<5} {}",
                    params.to_string(),
                    rep.degree,
                    seqs.join(" "),
                    genus,
                    if rep.pairs_match.iter().all(|&b| b) { "ok" } else { "BAD" },
                    cbar,
                    if rep.passed() { "PASS" } else { "FAIL" }
                );
                for e in &rep.errors {
                    let _ = writeln!(text, "    {e}");
                }
                rows.push(json!({ "params": params, "report": rep, "multseqs": seqs, "passed": rep.passed() }));
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(text, "{:<22} ERROR {e}", params.to_string());
                rows.push(json!({ "params": params, "error": e.to_string(), "passed": false }));
            }
        }
    }
    if args.json {
        print_json(&json!({ "instances": rows, "total": grid.len(), "failed": failed }));
    } else {
        print!("{text}");
        println!("{} instances, {} failed", grid.len(), failed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn describe_cusp(c: &CuspType) -> Vec<(&'static str, String)> {
    vec![
        ("newton", c.newton.to_string()),
        ("char", c.char.to_string()),
        ("multseq", c.multseq.to_string()),
        ("shorthand", c.multseq.shorthand()),
        ("delta", c.delta().to_string()),
    ]
}

fn convert(args: &ConvertArgs) -> Outcome {
    let i = &args.input;
    let cusp = if let Some(s) = &i.newton {
        CuspType::from_newton(&NewtonPairs::parse(s).map_err(input)?)
    } else if let Some(s) = &i.char_exp {
        CuspType::from_char(&CharacteristicExponents::parse(s).map_err(input)?)
    } else if let Some(s) = &i.multseq {
        CuspType::from_multseq(&MultiplicitySequence::parse(s).map_err(input)?)
    } else {
        unreachable!("clap enforces one encoding")
    }
    .map_err(input)?;
    if args.json {
        print_json(&cusp);
    } else {
        for (k, v) in describe_cusp(&cusp) {
            println!("{k:<10} {v}");
        }
    }
    Ok(())
}

fn run(args: &RunArgs) -> Outcome {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", args.file.display())))?;
    let parsed = script::parse(&text).map_err(|e| Failure::Input(format!("{}:{e}", args.file.display())))?;
    if let Some(dir) = &args.dot_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut io_error = None;
    let report = script::execute_traced(&parsed, |i, cfg| {
        if args.trace && !args.json {
            println!("--- after step {i}");
            println!("{}", serde_json::to_string(cfg).expect("serializable"));
        }
        if let Some(dir) = &args.dot_dir {
            let path = dir.join(format!("step_{i:03}.dot"));
            if let Err(e) = std::fs::write(&path, cfg.to_dot()) {
                io_error.get_or_insert(format!("cannot write {}: {e}", path.display()));
            }
        }
    });
    if let Some(e) = io_error {
        return Err(Failure::Input(e));
    }
    if args.json {
        print_json(&json!({ "file": args.file.display().to_string(), "passed": report.passed(), "report": report }));
    } else {
        print!("{}", report.to_text());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn start_precision(flag: Option<u32>, degree: u32) -> Result<u32, Failure> {
    if let Some(p) = flag {
        return Ok(p.max(1));
    }
    match std::env::var(PRECISION_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .map(|p| p.max(1))
            .map_err(|_| Failure::Input(format!("{PRECISION_VAR}={v} is not a positive integer"))),
        Err(_) => Ok(default_precision(degree)),
    }
}

fn branch_json(ms: &MultiplicitySequence) -> (Value, String) {
    if ms.is_empty() {
        return (json!({ "smooth": true, "multseq": ms, "delta": 0 }), "smooth".to_string());
    }
    match CuspType::from_multseq(ms) {
        Ok(c) => {
            let text = describe_cusp(&c).into_iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(", ");
            (serde_json::to_value(&c).expect("serializable"), text)
        }
        Err(e) => (json!({ "multseq": ms, "error": e.to_string() }), format!("multseq {ms} ({e})")),
    }
}

fn analyze(args: &AnalyzeArgs) -> Outcome {
    if let Some(poly) = &args.poly {
        let f = Poly::parse(poly, &XYZ).map_err(input)?;
        if f.is_zero() || !f.is_homogeneous() {
            return Err(Failure::Input("the polynomial must be a nonzero form in x, y, z".into()));
        }
        let point_text = args.point.as_deref().expect("clap requires --point");
        let point = ProjectivePoint::parse(point_text).map_err(input)?;
        let chart = AffineChart::at(&point).map_err(input)?;
        let local = chart.localize(&f);
        if !num_traits::Zero::is_zero(&local.coeff(&[0, 0])) {
            return Err(Failure::Input(format!("{point} is not on the curve")));
        }
        let start = start_precision(args.precision, f.total_degree())?;
        let branches = analyze_origin(&local, start).map_err(|e| {
            eprintln!("analysis failed: {e}");
            Failure::Verification
        })?;
        let (u, v) = chart.local_names();
        let mut rows = Vec::new();
        if !args.json {
            println!("point {point}, chart coordinates ({u}, {v}), {} branch(es)", branches.len());
        }
        for (i, b) in branches.iter().enumerate() {
            let (j, text) = branch_json(&b.multseq);
            if !args.json {
                println!("  branch {}: {text}", i + 1);
            }
            rows.push(j);
        }
        if args.json {
            print_json(&json!({ "point": point.to_string(), "chart": [u, v], "branches": rows }));
        }
        return Ok(());
    }
    let param = args.param.as_deref().expect("clap requires --poly or --param");
    let p = ProjectiveParametrization::parse(param).map_err(input)?;
    let ats = args
        .at
        .iter()
        .map(|a| ProjectivePoint::parse(a).map_err(input))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = ats.iter().find(|a| a.dim() != 2) {
        return Err(Failure::Input(format!("{bad} is not a point of the projective line")));
    }
    let start = start_precision(args.precision, p.degree())?;
    let failed = |e: cuspforge::error::SeriesError| {
        eprintln!("analysis failed: {e}");
        Failure::Verification
    };
    let mut rows = Vec::new();
    for at in &ats {
        let r = analyze_parameter(&p, at, start).map_err(failed)?;
        let (j, text) = branch_json(&r.multseq);
        if !args.json {
            println!("[t:s] = {at} -> {}, preimages {}: {text}", r.image, r.fiber_size);
        }
        rows.push(json!({ "at": at.to_string(), "image": r.image.to_string(), "fiber_size": r.fiber_size, "branch": j }));
    }
    let mut out = json!({ "degree": p.degree(), "points": rows });
    let mut ok = true;
    if args.certify {
        let cert = certify_singular_points(&p, &ats, start).map_err(failed)?;
        ok = cert.exhaustive();
        if !args.json {
            println!(
                "degree {}, arithmetic genus {}, delta sum {}, birational {}, distinct images {}: {}",
                cert.degree,
                cert.arithmetic_genus,
                cert.delta_sum,
                cert.birational,
                cert.distinct_images,
                if ok { "these are all singular points" } else { "NOT certified" }
            );
        }
        out["certificate"] = json!({
            "arithmetic_genus": cert.arithmetic_genus.to_string(),
            "delta_sum": cert.delta_sum.to_string(),
            "birational": cert.birational,
            "distinct_images": cert.distinct_images,
            "exhaustive": ok,
        });
    }
    if args.json {
        print_json(&out);
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn scripts_verify(json: bool) -> Outcome {
    let scripts = corpus::shipped();
    let results = corpus::run_all(&scripts);
    let gated_failures = results.iter().filter(|r| r.gated && !r.passed()).count();
    if json {
        let rows: Vec<Value> = results
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "gated": r.gated,
                    "passed": r.passed(),
                    "matches_catalog": r.matches_catalog,
                    "report": r.report,
                })
            })
            .collect();
        print_json(&json!({ "scripts": rows, "gated_failures": gated_failures }));
    } else {
        for r in &results {
            let tag = if r.gated { "" } else { " (best effort)" };
            let fin: Vec<String> = r.report.finalized.iter().map(|f| format!("d={}", f.degree)).collect();
            println!(
                "{:<12} {:<5} {:>3} steps, {:>3} assertions, finalized {}{tag}",
                r.name,
                if r.passed() { "PASS" } else { "FAIL" },
                r.report.steps.len(),
                r.report.assertions,
                fin.join(" ")
            );
            for s in r.report.failures() {
                println!("    {} {}: {:?}", s.pos, s.text, s.outcome);
            }
        }
        println!("{} scripts, {} gated failures", results.len(), gated_failures);
    }
    if gated_failures == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn scripts_emit(dir: &Path) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    for s in corpus::shipped() {
        let path = dir.join(format!("{}.cfs", s.name));
        std::fs::write(&path, &s.text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}
