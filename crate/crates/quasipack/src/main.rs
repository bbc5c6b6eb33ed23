//! Command-line front end. Exit codes are a stable contract:
//! 0 = success / condition holds, 1 = violated / proven none,
//! 2 = undetermined / budget exhausted, 3 = usage error, 4 = I/O error.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::BigRational;
use serde_json::json;

use quasipack::adapted::{
    find_certificate, grid_graph, verify_certificate, AdaptMode, SearchOutcome,
};
use quasipack::constructions::{
    default_density, gen_a, gen_gnp, gen_link_replacement, zero_color_layout, Coloring,
    GENERATOR_VERSION,
};
use quasipack::counting::{
    count_inj, embedding_bound, estimate_density, EmbedBoundParams, EmbeddingConstraints,
};
use quasipack::discrepancy::{
    check_witness, exhaustive_check, search_violation, DiscMode, DiscParams, DiscStatus,
    DiscVerdict, SearchBudget,
};
use quasipack::hypercore::{KGraph, VertexSet};
use quasipack::layouts::{Antichain, Layout};
use quasipack::packing::{
    absorb_pack, exact_perfect_packing, find_absorbers, is_absorber, is_perfect_packing,
    richness_estimate, AbsorbCheck, AbsorbPackConfig, AbsorbPackError, AbsorberParams,
    PackOutcome,
};
use quasipack::ratio::{format_ratio, parse_ratio};

const JSON_SCHEMA: &str = "quasipack/1";

#[derive(Parser)]
#[command(name = "quasipack", version, about = "Hypergraph quasirandomness toolkit")]
struct Cli {
    /// Emit the report as a single JSON object.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded construction and write it in graph format v1.
    Gen(GenArgs),
    /// Check or falsify the layout-discrepancy condition.
    CheckDisc(CheckDiscArgs),
    /// Search for (and verify) an adaptedness certificate.
    CheckAdapted(CheckAdaptedArgs),
    /// Count constrained edge-preserving injections exactly.
    Count(CountArgs),
    /// Monte Carlo estimate of the embedding density.
    Estimate(EstimateArgs),
    /// Find a perfect packing (absorbing pipeline or exact solver).
    Pack(PackArgs),
    /// Absorber checking, search, and richness diagnostics.
    Absorb(AbsorbArgs),
    /// Build the grid graph of a pattern.
    Grid(GridArgs),
    /// Re-derive a generated construction and verify it byte-for-byte.
    VerifyConstruction(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of: a (color-sum), gnp (binomial), link (link replacement).
    #[arg(long)]
    construction: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Edge probability "a/b" for gnp/link; defaults to (k-1)/k.
    #[arg(long)]
    p: Option<String>,
    /// Output path for the graph.
    #[arg(long)]
    out: String,
    /// Also write the coloring (a) or link coloring (link) here.
    #[arg(long)]
    coloring: Option<String>,
}

#[derive(Args)]
struct CheckDiscArgs {
    /// Host graph file.
    #[arg(long = "h", value_name = "FILE")]
    host: String,
    /// Antichain over [k], e.g. "1,2|1,3|2,3" ("e" for the empty set).
    #[arg(long)]
    i: String,
    #[arg(long)]
    p: String,
    #[arg(long)]
    mu: String,
    /// Bound the absolute deviation instead of the one-sided loss.
    #[arg(long)]
    two_sided: bool,
    /// Check one specific witness: a layout file, or a coloring file whose
    /// zero-color layout is meant.
    #[arg(long)]
    witness: Option<String>,
    /// Enumerate the whole layout space (tiny instances only).
    #[arg(long)]
    exhaustive: bool,
    /// Layout-space cap for --exhaustive.
    #[arg(long, default_value_t = 1 << 24)]
    cap: u128,
    /// Seed for the violation search (default mode).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    moves: usize,
    /// Write the violating layout here when one is found.
    #[arg(long)]
    witness_out: Option<String>,
}

#[derive(Args)]
struct CheckAdaptedArgs {
    /// Pattern graph file.
    #[arg(long = "f", value_name = "FILE")]
    pattern: String,
    /// Antichain over [k].
    #[arg(long)]
    i: String,
    /// Antichain over [k-1]; with it the special-vertex condition is
    /// required too.
    #[arg(long)]
    j: Option<String>,
    /// Comma-separated pinned vertices: check adaptedness at them (needs
    /// --j).
    #[arg(long)]
    at: Option<String>,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Write the certificate here on success.
    #[arg(long)]
    cert_out: Option<String>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long = "f", value_name = "FILE")]
    pattern: String,
    #[arg(long = "h", value_name = "FILE")]
    host: String,
    /// Pin a pattern vertex to a host vertex: "w=y". Repeatable.
    #[arg(long)]
    pin: Vec<String>,
    /// Restrict a pattern vertex to host vertices: "w=v1,v2,...".
    /// Repeatable.
    #[arg(long)]
    target: Vec<String>,
    /// With --gamma, also report the guaranteed lower bound for these
    /// densities.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Pinned-degree density for the bound (default 1/2).
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long = "f", value_name = "FILE")]
    pattern: String,
    #[arg(long = "h", value_name = "FILE")]
    host: String,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct PackArgs {
    #[arg(long = "h", value_name = "FILE")]
    host: String,
    #[arg(long = "f", value_name = "FILE")]
    pattern: String,
    /// Skip the absorbing pipeline and run the exact solver.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,
    /// Absorbed-set size (default: pattern order).
    #[arg(long)]
    b: Option<usize>,
    /// Absorbable fraction "a/b" (default: 1/(4f²)).
    #[arg(long)]
    omega: Option<String>,
    /// Write the packing here.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AbsorbArgs {
    #[arg(long = "h", value_name = "FILE")]
    host: String,
    #[arg(long = "f", value_name = "FILE")]
    pattern: String,
    /// Candidate absorber "v1,v2,...": check whether it absorbs --b.
    #[arg(long)]
    a: Option<String>,
    /// Absorbed set "v1,v2,...": search absorbers for it unless --a or
    /// --trials is given.
    #[arg(long)]
    b: Option<String>,
    /// Run the richness estimate with this many trials instead.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long = "f", value_name = "FILE")]
    pattern: String,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    construction: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    p: Option<String>,
    /// Graph file to verify.
    #[arg(long = "h", value_name = "FILE")]
    host: String,
    #[arg(long)]
    coloring: Option<String>,
}

/// Non-zero terminal outcomes that are not 0/1/2 verdicts.
enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn write_file(path: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn read_graph(path: &str) -> Result<KGraph, Failure> {
    KGraph::parse(&read_file(path)?).map_err(|e| usage(format!("{path}: {e}")))
}

fn parse_ratio_flag(s: &str, flag: &str) -> Result<BigRational, Failure> {
    parse_ratio(s).map_err(|e| usage(format!("--{flag}: {e}")))
}

fn parse_vertex_list(s: &str, flag: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<usize>, _>>()
        .map_err(|_| usage(format!("--{flag}: expected comma-separated vertices, got {s:?}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(3);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if json {
                let kind = match f {
                    Failure::Usage(_) => "usage",
                    Failure::Io(_) => "io",
                };
                let msg = match &f {
                    Failure::Usage(m) | Failure::Io(m) => m.clone(),
                };
                println!("{}", json!({"schema": JSON_SCHEMA, "error": kind, "message": msg}));
            } else {
                match &f {
                    Failure::Usage(m) => eprintln!("error: {m}"),
                    Failure::Io(m) => eprintln!("i/o error: {m}"),
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a, cli.json),
        Cmd::CheckDisc(a) => cmd_check_disc(a, cli.json),
        Cmd::CheckAdapted(a) => cmd_check_adapted(a, cli.json),
        Cmd::Count(a) => cmd_count(a, cli.json),
        Cmd::Estimate(a) => cmd_estimate(a, cli.json),
        Cmd::Pack(a) => cmd_pack(a, cli.json),
        Cmd::Absorb(a) => cmd_absorb(a, cli.json),
        Cmd::Grid(a) => cmd_grid(a, cli.json),
        Cmd::VerifyConstruction(a) => cmd_verify(a, cli.json),
    }
}

fn cmd_gen(a: GenArgs, json: bool) -> Result<u8, Failure> {
    let p = match &a.p {
        Some(s) => parse_ratio_flag(s, "p")?,
        None => default_density(a.k),
    };
    let mut report = json!({
        "schema": JSON_SCHEMA,
        "command": "gen",
        "construction": a.construction,
        "k": a.k, "n": a.n, "seed": a.seed,
        "generator_version": GENERATOR_VERSION,
    });
    let special: Option<usize>;
    let (graph, coloring) = match a.construction.as_str() {
        "a" => {
            let (g, c) = gen_a(a.k, a.n, a.seed).map_err(usage)?;
            special = None;
            (g, Some(c))
        }
        "gnp" => {
            let g = gen_gnp(a.k, a.n, &p, a.seed).map_err(usage)?;
            special = None;
            (g, None)
        }
        "link" => {
            let lr = gen_link_replacement(a.k, a.n, &p, a.seed).map_err(usage)?;
            special = Some(lr.special);
            report["special"] = json!(lr.special);
            (lr.graph, Some(lr.link_coloring))
        }
        other => {
            return Err(usage(format!(
                "--construction must be a, gnp, or link, got {other:?}"
            )))
        }
    };
    write_file(&a.out, &graph.serialize())?;
    report["edges"] = json!(graph.len());
    report["out"] = json!(a.out);
    if let Some(path) = &a.coloring {
        match &coloring {
            Some(c) => {
                write_file(path, &c.serialize())?;
                report["coloring"] = json!(path);
            }
            None => return Err(usage("--coloring is only meaningful for a and link")),
        }
    }
    if json {
        println!("{report}");
    } else {
        println!("wrote {} ({} edges)", a.out, graph.len());
        if let Some(x) = special {
            println!("special vertex {x}");
        }
    }
    Ok(0)
}

fn load_witness(path: &str, host_n: usize) -> Result<Layout, Failure> {
    let text = read_file(path)?;
    let head = text.trim_start();
    if head.starts_with("layout") {
        Layout::parse(&text).map_err(|e| usage(format!("{path}: {e}")))
    } else if head.starts_with("coloring") {
        let c = Coloring::parse(&text).map_err(|e| usage(format!("{path}: {e}")))?;
        if c.n() != host_n {
            return Err(usage(format!(
                "{path}: coloring on {} vertices, host has {host_n}",
                c.n()
            )));
        }
        zero_color_layout(&c).map_err(|e| usage(format!("{path}: {e}")))
    } else {
        Err(usage(format!("{path}: neither a layout nor a coloring file")))
    }
}

fn verdict_code(status: DiscStatus) -> u8 {
    match status {
        DiscStatus::SatisfiedExhaustive => 0,
        DiscStatus::Violated => 1,
        DiscStatus::Undetermined => 2,
    }
}

fn emit_verdict(
    v: &DiscVerdict,
    witness_out: Option<&str>,
    json: bool,
) -> Result<u8, Failure> {
    if let (Some(path), Some(w)) = (witness_out, &v.witness) {
        write_file(path, &w.serialize())?;
    }
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "check-disc",
                "status": match v.status {
                    DiscStatus::SatisfiedExhaustive => "satisfied-exhaustive",
                    DiscStatus::Violated => "violated",
                    DiscStatus::Undetermined => "undetermined",
                },
                "margin": v.margin.as_ref().map(format_ratio),
                "witness": v.witness.as_ref().map(|w| w.serialize()),
            })
        );
    } else {
        print!("{}", v.serialize());
    }
    Ok(verdict_code(v.status))
}

fn cmd_check_disc(a: CheckDiscArgs, json: bool) -> Result<u8, Failure> {
    let host = read_graph(&a.host)?;
    let anti = Antichain::parse(host.k(), &a.i).map_err(|e| usage(format!("--i: {e}")))?;
    let mode = if a.two_sided {
        DiscMode::TwoSided
    } else {
        DiscMode::Lower
    };
    let params = DiscParams::new(
        parse_ratio_flag(&a.p, "p")?,
        parse_ratio_flag(&a.mu, "mu")?,
        mode,
    )
    .map_err(usage)?;
    if let Some(path) = &a.witness {
        let layout = load_witness(path, host.n())?;
        if layout.antichain() != &anti {
            return Err(usage(format!(
                "{path}: witness antichain {} differs from --i {}",
                layout.antichain(),
                anti
            )));
        }
        let (holds, margin) = check_witness(&host, &layout, &params).map_err(usage)?;
        let v = DiscVerdict {
            status: if holds {
                DiscStatus::Undetermined // one layout cannot certify all
            } else {
                DiscStatus::Violated
            },
            witness: (!holds).then_some(layout),
            margin: Some(margin),
        };
        let code = emit_verdict(&v, a.witness_out.as_deref(), json)?;
        // a holding witness is a clean pass for this invocation
        return Ok(if holds { 0 } else { code });
    }
    let verdict = if a.exhaustive {
        exhaustive_check(&host, &anti, &params, a.cap).map_err(usage)?
    } else {
        let budget = SearchBudget {
            restarts: a.restarts,
            moves: a.moves,
            ..SearchBudget::default()
        };
        search_violation(&host, &anti, &params, &budget, a.seed, &[]).map_err(usage)?
    };
    emit_verdict(&verdict, a.witness_out.as_deref(), json)
}

fn cmd_check_adapted(a: CheckAdaptedArgs, json: bool) -> Result<u8, Failure> {
    let f = read_graph(&a.pattern)?;
    let anti = Antichain::parse(f.k(), &a.i).map_err(|e| usage(format!("--i: {e}")))?;
    let j = a
        .j
        .as_deref()
        .map(|s| Antichain::parse(f.k() - 1, s).map_err(|e| usage(format!("--j: {e}"))))
        .transpose()?;
    let mode = match (&j, &a.at) {
        (None, None) => AdaptMode::Adapted,
        (Some(j), None) => AdaptMode::IjAdapted(j.clone()),
        (Some(j), Some(at)) => AdaptMode::AdaptedAt(
            j.clone(),
            VertexSet::new(parse_vertex_list(at, "at")?),
        ),
        (None, Some(_)) => return Err(usage("--at requires --j")),
    };
    let outcome = find_certificate(&f, &anti, &mode, a.budget).map_err(usage)?;
    let (status, code, cert_text) = match &outcome {
        SearchOutcome::Found(cert) => {
            let ok = verify_certificate(&f, &anti, j.as_ref(), cert).map_err(usage)?;
            if !ok {
                return Err(usage("internal: produced certificate failed verification"));
            }
            ("adapted", 0u8, Some(cert.to_string()))
        }
        SearchOutcome::ProvenNone => ("not-adapted", 1, None),
        SearchOutcome::BudgetExceeded => ("budget-exceeded", 2, None),
    };
    if let (Some(path), Some(text)) = (&a.cert_out, &cert_text) {
        write_file(path, text)?;
    }
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "check-adapted",
                "status": status,
                "certificate": cert_text,
            })
        );
    } else {
        println!("{status}");
        if let Some(text) = cert_text {
            print!("{text}");
        }
    }
    Ok(code)
}

fn parse_constraints(a_pin: &[String], a_target: &[String]) -> Result<EmbeddingConstraints, Failure> {
    let mut c = EmbeddingConstraints::none();
    for pin in a_pin {
        let (w, y) = pin
            .split_once('=')
            .ok_or_else(|| usage(format!("--pin: expected w=y, got {pin:?}")))?;
        let w = w.trim().parse().map_err(|_| usage(format!("--pin: bad vertex in {pin:?}")))?;
        let y = y.trim().parse().map_err(|_| usage(format!("--pin: bad vertex in {pin:?}")))?;
        c = c.pin(w, y);
    }
    for t in a_target {
        let (w, vs) = t
            .split_once('=')
            .ok_or_else(|| usage(format!("--target: expected w=v1,v2,..., got {t:?}")))?;
        let w = w.trim().parse().map_err(|_| usage(format!("--target: bad vertex in {t:?}")))?;
        c = c.target(w, VertexSet::new(parse_vertex_list(vs, "target")?));
    }
    Ok(c)
}

fn cmd_count(a: CountArgs, json: bool) -> Result<u8, Failure> {
    let f = read_graph(&a.pattern)?;
    let h = read_graph(&a.host)?;
    let constraints = parse_constraints(&a.pin, &a.target)?;
    let count = count_inj(&f, &h, &constraints).map_err(usage)?;
    let bound = match (&a.p, &a.gamma) {
        (Some(p), Some(gamma)) => {
            let alpha = match &a.alpha {
                Some(s) => parse_ratio_flag(s, "alpha")?,
                None => parse_ratio("1/2").expect("constant"),
            };
            let params = EmbedBoundParams::new(
                alpha,
                parse_ratio_flag(p, "p")?,
                parse_ratio_flag(gamma, "gamma")?,
            )
            .map_err(usage)?;
            Some(embedding_bound(&f, &constraints, &params, h.n()).map_err(usage)?)
        }
        (None, None) => None,
        _ => return Err(usage("--p and --gamma must be given together")),
    };
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "count",
                "count": count.to_string(),
                "bound": bound.as_ref().map(format_ratio),
                "bound_met": bound.as_ref().map(|b| quasipack::ratio::ratio_int(count) >= *b),
            })
        );
    } else {
        println!("count {count}");
        if let Some(b) = bound {
            let met = quasipack::ratio::ratio_int(count) >= b;
            println!("bound {}", format_ratio(&b));
            println!("bound-met {met}");
        }
    }
    Ok(0)
}

fn cmd_estimate(a: EstimateArgs, json: bool) -> Result<u8, Failure> {
    let f = read_graph(&a.pattern)?;
    let h = read_graph(&a.host)?;
    let est = estimate_density(&f, &h, a.samples, a.seed).map_err(usage)?;
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "estimate",
                "density": format_ratio(&est.density),
                "std_error": est.std_error,
                "hits": est.hits,
                "degenerate_hits": est.degenerate_hits,
                "samples": est.samples,
            })
        );
    } else {
        println!(
            "density {} (std error {:.6}, {} hits / {} samples, {} degenerate)",
            format_ratio(&est.density),
            est.std_error,
            est.hits,
            est.samples,
            est.degenerate_hits
        );
    }
    Ok(0)
}

fn cmd_pack(a: PackArgs, json: bool) -> Result<u8, Failure> {
    let h = read_graph(&a.host)?;
    let f = read_graph(&a.pattern)?;
    let mut params = AbsorberParams::for_pattern(&f).map_err(usage)?;
    if let Some(b) = a.b {
        params = AbsorberParams::new(&f, params.a, b, params.epsilon.clone(), params.omega.clone())
            .map_err(usage)?;
    }
    if let Some(omega) = &a.omega {
        params.omega = parse_ratio_flag(omega, "omega")?;
    }
    let (status, code, packing) = if a.exact {
        match exact_perfect_packing(&h, &f, a.budget).map_err(usage)? {
            PackOutcome::Found(p) => ("found", 0u8, Some(p)),
            PackOutcome::ProvenNone => ("none", 1, None),
            PackOutcome::BudgetExceeded => ("budget-exceeded", 2, None),
        }
    } else {
        match absorb_pack(&h, &f, &params, a.seed, a.budget, &AbsorbPackConfig::default()) {
            Ok(p) => ("found", 0, Some(p)),
            Err(AbsorbPackError::Divisibility { .. }) | Err(AbsorbPackError::NoPacking) => {
                ("none", 1, None)
            }
            Err(AbsorbPackError::Pack(e)) => return Err(usage(e)),
            Err(_) => ("undetermined", 2, None),
        }
    };
    if let Some(p) = &packing {
        if !is_perfect_packing(&h, &f, p) {
            return Err(usage("internal: packing failed final verification"));
        }
        if let Some(path) = &a.out {
            write_file(path, &p.serialize())?;
        }
    }
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "pack",
                "status": status,
                "copies": packing.as_ref().map(|p| p.copies.len()),
                "packing": packing.as_ref().map(|p| p.serialize()),
            })
        );
    } else {
        println!("{status}");
        if let Some(p) = &packing {
            print!("{}", p.serialize());
        }
    }
    Ok(code)
}

fn cmd_absorb(a: AbsorbArgs, json: bool) -> Result<u8, Failure> {
    let h = read_graph(&a.host)?;
    let f = read_graph(&a.pattern)?;
    if let Some(trials) = a.trials {
        let params = AbsorberParams::for_pattern(&f).map_err(usage)?;
        let report = richness_estimate(&h, &f, &params, trials, a.seed).map_err(usage)?;
        if json {
            println!(
                "{}",
                json!({
                    "schema": JSON_SCHEMA,
                    "command": "absorb",
                    "mode": "richness",
                    "overall": format_ratio(&report.overall),
                    "per_b_min": format_ratio(&report.per_b_min),
                    "b_sets": report.b_sets,
                    "trials_per_b": report.trials_per_b,
                    "undetermined": report.undetermined,
                })
            );
        } else {
            println!(
                "richness {} (worst b-set {}, {} b-sets x {} trials, {} undetermined)",
                format_ratio(&report.overall),
                format_ratio(&report.per_b_min),
                report.b_sets,
                report.trials_per_b,
                report.undetermined
            );
        }
        return Ok(0);
    }
    let b = match &a.b {
        Some(s) => VertexSet::new(parse_vertex_list(s, "b")?),
        None => return Err(usage("--b (or --trials) is required")),
    };
    if let Some(s) = &a.a {
        let set = VertexSet::new(parse_vertex_list(s, "a")?);
        let check = is_absorber(&h, &f, &set, &b, a.budget).map_err(usage)?;
        let (status, code) = match check {
            AbsorbCheck::Absorbs => ("absorbs", 0u8),
            AbsorbCheck::Fails => ("fails", 1),
            AbsorbCheck::Undetermined => ("undetermined", 2),
        };
        if json {
            println!(
                "{}",
                json!({"schema": JSON_SCHEMA, "command": "absorb", "mode": "check", "status": status})
            );
        } else {
            println!("{status}");
        }
        return Ok(code);
    }
    let found = find_absorbers(&h, &f, &b, a.budget, a.seed).map_err(usage)?;
    if json {
        let sets: Vec<Vec<usize>> = found.iter().map(|s| s.as_slice().to_vec()).collect();
        println!(
            "{}",
            json!({"schema": JSON_SCHEMA, "command": "absorb", "mode": "search", "absorbers": sets})
        );
    } else {
        for set in &found {
            let mut line = String::new();
            for v in set.iter() {
                let _ = write!(line, "{v} ");
            }
            println!("{}", line.trim_end());
        }
        if found.is_empty() {
            println!("none");
        }
    }
    Ok(if found.is_empty() { 1 } else { 0 })
}

fn cmd_grid(a: GridArgs, json: bool) -> Result<u8, Failure> {
    let f = read_graph(&a.pattern)?;
    let g = grid_graph(&f).map_err(usage)?;
    write_file(&a.out, &g.graph.serialize())?;
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "grid",
                "vertices": g.graph.n(),
                "edges": g.graph.len(),
                "zeroth_row": g.zeroth_row,
                "column_copies": g.column_copies.len(),
                "row_copies": g.row_copies.len(),
                "out": a.out,
            })
        );
    } else {
        println!(
            "wrote {} ({} vertices, {} edges, {} column copies, {} row copies)",
            a.out,
            g.graph.n(),
            g.graph.len(),
            g.column_copies.len(),
            g.row_copies.len()
        );
        let row: Vec<String> = g.zeroth_row.iter().map(|v| v.to_string()).collect();
        println!("zeroth row {}", row.join(" "));
    }
    Ok(0)
}

fn cmd_verify(a: VerifyArgs, json: bool) -> Result<u8, Failure> {
    let recorded = read_graph(&a.host)?;
    let p = match &a.p {
        Some(s) => parse_ratio_flag(s, "p")?,
        None => default_density(a.k),
    };
    let (expected, coloring): (KGraph, Option<Coloring>) = match a.construction.as_str() {
        "a" => {
            let (g, c) = gen_a(a.k, a.n, a.seed).map_err(usage)?;
            (g, Some(c))
        }
        "gnp" => (gen_gnp(a.k, a.n, &p, a.seed).map_err(usage)?, None),
        "link" => {
            let lr = gen_link_replacement(a.k, a.n, &p, a.seed).map_err(usage)?;
            (lr.graph, Some(lr.link_coloring))
        }
        other => {
            return Err(usage(format!(
                "--construction must be a, gnp, or link, got {other:?}"
            )))
        }
    };
    let mut mismatches: Vec<String> = Vec::new();
    if recorded != expected {
        mismatches.push("graph differs from the regenerated construction".into());
    }
    if let Some(path) = &a.coloring {
        let text = read_file(path)?;
        let rec = Coloring::parse(&text).map_err(|e| usage(format!("{path}: {e}")))?;
        match coloring {
            Some(c) if c == rec => {}
            Some(_) => mismatches.push("coloring differs from the regenerated one".into()),
            None => return Err(usage("--coloring is only meaningful for a and link")),
        }
    }
    let ok = mismatches.is_empty();
    if json {
        println!(
            "{}",
            json!({
                "schema": JSON_SCHEMA,
                "command": "verify-construction",
                "status": if ok { "verified" } else { "mismatch" },
                "mismatches": mismatches,
            })
        );
    } else if ok {
        println!("verified");
    } else {
        for m in &mismatches {
            println!("mismatch: {m}");
        }
    }
    Ok(if ok { 0 } else { 1 })
}
