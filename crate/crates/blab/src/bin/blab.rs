//! Command-line front end: exact SPP verdicts, cube-independence
//! certificates, walk experiments, the built-in verification suite, and the
//! block-extraction pipeline. Exit codes: 0 = success or decided verdict,
//! 1 = usage/input error, 2 = undecided within budget.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::process::ExitCode;

use blab::config;
use blab::cube::{self, LatticeMask};
use blab::groups::{Family, GroupSpec, Homomorphism, Lamp};
use blab::laurent::LaurentPoly;
use blab::spp::{self, CertificateKind, SppVerdict};
use blab::{blocks, experiments};

#[derive(Parser)]
#[command(
    name = "blab",
    about = "Exact-arithmetic experiments on random walks over solvable matrix groups",
    version
)]
struct Cli {
    /// Worker threads for parallel sections (BLAB_THREADS as fallback).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide or refute the spaced polynomial property of a polynomial.
    Spp(SppArgs),
    /// Certify cube independence of conjugates over a sublattice.
    Cube(CubeArgs),
    /// Run the fresh-point entropy lower-bound experiment on an n-grid.
    Walk(WalkArgs),
    /// Re-run the built-in reference verifications.
    Verify(VerifyArgs),
    /// Extract basic blocks from generator matrices and search relations.
    Blocks(BlocksArgs),
}

#[derive(Args)]
struct SppArgs {
    /// Polynomial literal, e.g. "1 + x1 + x2" (variables inferred).
    #[arg(long)]
    poly: String,
    /// Power substitution constant for the counterexample search.
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Support box bound per variable for the search (exponents 0..=box).
    #[arg(long = "box", default_value_t = 2)]
    box_hi: u32,
}

#[derive(Args)]
struct CubeArgs {
    /// Experiment config file (group, measure, optional delta pair).
    #[arg(long)]
    group: String,
    /// Number of conjugators to sample.
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Seed for conjugator sampling (required for reproducibility).
    #[arg(long, required_unless_present = "demo")]
    seed: Option<u64>,
    /// Uniform sublattice modulus on every projection coordinate.
    #[arg(long)]
    n: Option<u32>,
    /// Per-coordinate sublattice moduli, e.g. "3,3,0" (0 = unconstrained).
    #[arg(long)]
    lattice: Option<String>,
    /// Built-in demonstrations: "torsion" (mod-2 lamp collapse witness).
    #[arg(long)]
    demo: Option<String>,
}

#[derive(Args)]
struct WalkArgs {
    /// Experiment config file.
    #[arg(long)]
    group: String,
    /// Comma-separated n grid, e.g. "500,1000,2000,4000".
    #[arg(long)]
    n: String,
    /// Trials per n.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Master seed (mandatory; no wall-clock seeding).
    #[arg(long)]
    seed: u64,
    /// Write the per-trial CSV here.
    #[arg(long)]
    csv: Option<String>,
    /// Write the JSON summary here (stdout otherwise).
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only one item: nine-product | flat-search | flat-sums |
    /// baumslag-relation.
    #[arg(long)]
    only: Option<String>,
    /// Negative control: deliberately tamper with the relation check.
    #[arg(long, hide = true, default_value_t = false)]
    tamper: bool,
}

#[derive(Args)]
struct BlocksArgs {
    /// Input JSON: generator matrices with polynomial-grammar entries.
    #[arg(long)]
    input: String,
    /// Total-degree bound for the relation search.
    #[arg(long, default_value_t = 4)]
    degree_bound: u32,
    /// Word-length bound for validity witnesses.
    #[arg(long, default_value_t = 6)]
    witness_bound: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("BLAB_THREADS").ok().and_then(|s| s.parse().ok()));
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match cli.command {
        Command::Spp(args) => cmd_spp(args),
        Command::Cube(args) => cmd_cube(args),
        Command::Walk(args) => cmd_walk(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Blocks(args) => cmd_blocks(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn flat_pattern_json(p: &blab::laurent::FlatPattern) -> serde_json::Value {
    let terms: Vec<serde_json::Value> =
        p.signed_support.iter().map(|(e, s)| json!([e.0, s])).collect();
    json!(terms)
}

fn verdict_json(v: &SppVerdict, irreducibility_note: bool) -> serde_json::Value {
    let mut out = match v {
        SppVerdict::HasSpp { n, certificate } => {
            let cert = match certificate {
                CertificateKind::LeadingObstruction => json!({"kind": "leading_obstruction"}),
                CertificateKind::RootModulus { modulus_estimate, graeffe_level } => json!({
                    "kind": "root_modulus",
                    "modulus_estimate": modulus_estimate,
                    "graeffe_level": graeffe_level,
                }),
                CertificateKind::ExhaustiveBound { candidates } => {
                    json!({"kind": "exhaustive_bound", "candidates": candidates.to_string()})
                }
            };
            json!({"status": "has_spp", "N": n, "certificate": cert, "counterexample": null})
        }
        SppVerdict::NoSpp { counterexample } => json!({
            "status": "no_spp",
            "N": null,
            "certificate": null,
            "counterexample": {
                "base": flat_pattern_json(&counterexample.base),
                "power_order": counterexample.power_order,
                "tested_N": counterexample.tested_n,
            },
        }),
        SppVerdict::UnknownUpToBound { bound, counterexample_at_n } => json!({
            "status": "unknown",
            "N": null,
            "certificate": null,
            "bound": bound.to_string(),
            "counterexample": counterexample_at_n.as_ref().map(|(n, p)| json!({
                "at_N": n,
                "pattern": flat_pattern_json(p),
            })),
        }),
    };
    if irreducibility_note {
        out["note"] =
            json!("irreducibility of the input is asserted by the caller, not verified");
    }
    out
}

fn cmd_spp(args: SppArgs) -> Result<ExitCode, String> {
    let p = config::parse_poly_inferred(&args.poly).map_err(|e| e.to_string())?;
    if p.is_zero() {
        return Err("the zero polynomial has no spaced-polynomial status".into());
    }
    let verdict = if p.num_vars() == 1 {
        spp::univariate_spp_decide(&p).map_err(|e| e.to_string())?
    } else {
        let points = ((args.box_hi + 1) as u128).pow(p.num_vars() as u32);
        let budget = 3u128.saturating_pow(points.min(64) as u32);
        spp::spp_certify_pair(&p, args.n, budget).map_err(|e| e.to_string())?
    };
    let code = match &verdict {
        SppVerdict::UnknownUpToBound { .. } => ExitCode::from(2),
        _ => ExitCode::from(0),
    };
    println!("{}", serde_json::to_string_pretty(&verdict_json(&verdict, true)).unwrap());
    Ok(code)
}

fn parse_lattice(args: &CubeArgs, rank: usize) -> LatticeMask {
    if let Some(text) = &args.lattice {
        let moduli: Vec<u32> = text.split(',').map(|t| t.trim().parse().unwrap_or(0)).collect();
        LatticeMask(moduli)
    } else {
        LatticeMask::uniform(rank, args.n.unwrap_or(3))
    }
}

fn cmd_cube(args: CubeArgs) -> Result<ExitCode, String> {
    if args.demo.as_deref() == Some("torsion") {
        // mod-2 lamp collapse: the same two-lamp element twice
        let spec = GroupSpec::lamplighter(1, Lamp::ZMod(2));
        let d = spec.generator("d").unwrap().clone();
        let m = spec.generator("m1").unwrap().clone();
        let two_lamps = spec.multiply(&d, &spec.conjugate(&m, &d));
        let rep = cube::check_cube_independent(
            &[two_lamps.clone(), two_lamps],
            &spec,
            cube::DEFAULT_BRUTE_CAP,
        )
        .map_err(|e| e.to_string())?;
        println!("{}", serde_json::to_string_pretty(&rep).unwrap());
        return Ok(ExitCode::from(0));
    }
    let setup = config::load_experiment(&args.group).map_err(|e| e.to_string())?;
    let spec = &setup.spec;
    let projection = match (&setup.pair, &spec.family) {
        (Some(p), _) => p.projection,
        (None, Family::BaumslagTF) => Homomorphism::Phi,
        _ => Homomorphism::Pi,
    };
    let rank = spec.projection_rank(projection).map_err(|e| e.to_string())?;
    let mask = parse_lattice(&args, rank);
    let h = cube::sample_sublattice_elements(
        spec,
        projection,
        &mask,
        args.k,
        args.seed.expect("seed required"),
    )
    .map_err(|e| e.to_string())?;
    let rep = match &setup.pair {
        Some(pair) => cube::check_cube_along_image(pair, &h, spec, cube::DEFAULT_BRUTE_CAP),
        None => {
            // conjugates of the unipotent generator
            let d = spec.generator("d").expect("unipotent generator").clone();
            let gamma: Vec<_> = h.iter().map(|hi| spec.conjugate(hi, &d)).collect();
            cube::check_cube_independent(&gamma, spec, cube::DEFAULT_BRUTE_CAP)
        }
    }
    .map_err(|e| e.to_string())?;
    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
    Ok(ExitCode::from(0))
}

fn cmd_walk(args: WalkArgs) -> Result<ExitCode, String> {
    let setup = config::load_experiment(&args.group).map_err(|e| e.to_string())?;
    let ns: Vec<usize> = args
        .n
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad n value `{t}`")))
        .collect::<Result<_, _>>()?;
    let (report, outcomes) = experiments::run_walk_grid(&setup, &ns, args.trials, args.seed)
        .map_err(|e| e.to_string())?;
    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_csv(&outcomes)).map_err(|e| e.to_string())?;
    }
    let json_text = serde_json::to_string_pretty(&report).unwrap();
    match &args.json {
        Some(path) => std::fs::write(path, json_text).map_err(|e| e.to_string())?,
        None => println!("{json_text}"),
    }
    Ok(ExitCode::from(0))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let items = experiments::run_verification(args.only.as_deref(), args.tamper);
    if items.is_empty() {
        return Err(format!("unknown verification item `{}`", args.only.unwrap_or_default()));
    }
    let mut all_ok = true;
    for item in &items {
        let status = if item.passed { "PASS" } else { "FAIL" };
        println!("{status} {} — {}", item.name, item.detail);
        all_ok &= item.passed;
    }
    Ok(ExitCode::from(if all_ok { 0 } else { 1 }))
}

#[derive(serde::Deserialize)]
struct BlocksInput {
    vars: Vec<String>,
    size: usize,
    /// Row-major upper-triangle entries in the polynomial grammar.
    generators: Vec<Vec<String>>,
    /// Optional diagonal values for the relation search, in their own
    /// variables.
    #[serde(default)]
    value_vars: Option<Vec<String>>,
    #[serde(default)]
    values: Option<Vec<String>>,
}

fn cmd_blocks(args: BlocksArgs) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| e.to_string())?;
    let input: BlocksInput = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let ctx = blab::laurent::VarContext::new(input.vars.clone());
    let parse = |s: &str| -> Result<LaurentPoly, String> {
        blab::laurent::parse(s, &ctx, blab::laurent::CoeffDomain::Integers)
            .map_err(|e| e.to_string())
    };
    let gens: Vec<blocks::UTMatrix> = input
        .generators
        .iter()
        .map(|entries| {
            let polys: Vec<LaurentPoly> =
                entries.iter().map(|s| parse(s)).collect::<Result<_, _>>()?;
            blocks::UTMatrix::new(input.size, polys).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let block_list =
        blocks::extract_blocks(&gens, args.witness_bound).map_err(|e| e.to_string())?;
    // optional relation search over supplied diagonal values
    let relation = match (&input.value_vars, &input.values) {
        (Some(vvars), Some(vals)) => {
            let vctx = blab::laurent::VarContext::new(vvars.clone());
            let values: Vec<LaurentPoly> = vals
                .iter()
                .map(|s| {
                    blab::laurent::parse(s, &vctx, blab::laurent::CoeffDomain::Integers)
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?;
            blocks::bounded_relation_search(&values, args.degree_bound)
                .map_err(|e| e.to_string())?
        }
        _ => None,
    };
    let gen_cyc = match &relation {
        Some(rel) => spp::detect_generalized_cyclotomic(rel)
            .map_err(|e| e.to_string())?
            .map(|d| json!({"cyclotomic_index": d.cyclotomic_index, "direction": d.direction})),
        None => None,
    };
    let out = json!({
        "blocks": block_list,
        "relation": relation.as_ref().map(|r| r.serialize()),
        "relation_generalized_cyclotomic": gen_cyc,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(ExitCode::from(0))
}
