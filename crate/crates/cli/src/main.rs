use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nctx_core::invariants::{compute_invariants, uniform_q, InvariantBundle, QChoice};
use nctx_core::models::{
    classify_model, deterministic_models, extremal_partition, ks_colourable, max_expression, ModelJson, ModelSet,
    ProbModel,
};
use nctx_core::noncontextuality::{
    certify_trivial_povm_with, evaluate_nci, fcf_bound, violation_threshold_kcbs, NCIReport, Witness,
};
use nctx_core::quantum::{
    born_table, compute_corr, compute_r, fcf_measurement_residual, fcf_realization, kcbs_realization,
    trivial_povm_realization, SourceAssignment,
};
use nctx_core::rational::{self, Rational};
use nctx_core::scenario::io::{parse_scenario, parse_weighted_graph};
use nctx_core::scenario::library::{cega_18, cega_27, cega_expression, kcbs_g, library_scenario, LibraryName};
use nctx_core::scenario::{build_gamma_g, maximal_cliques, structural_specker_check, ContextualityScenario, SpeckerVerdict, WeightedGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_SEED: u64 = 20180;

#[derive(Parser, Debug)]
#[command(name = "nctx", version, about = "Noise-robust noncontextuality toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// RNG seed; NCTX_SEED overrides it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a scenario and report its structure.
    Analyze {
        /// Scenario JSON file or library name.
        scenario: String,
    },
    /// α, θ, α* and β for a Bell-KS subgraph.
    Invariants {
        scenario: String,
        /// Weighted subgraph JSON; defaults to the graph attached to a library scenario.
        #[arg(long)]
        subgraph: Option<PathBuf>,
        /// Comma-separated q over the hyperedges of Γ_G, e.g. "1/5,1/5,1/5,1/5,1/5".
        #[arg(long, conflicts_with = "optimal_q")]
        q: Option<String>,
        /// Use the q that minimizes β.
        #[arg(long)]
        optimal_q: bool,
    },
    /// Depolarized KCBS realization.
    Kcbs(KcbsArgs),
    /// Fair-coin-flip bound and trine realization.
    Fcf,
    /// Bounds of the three CEGA expressions over C, CE1 and G.
    Cega,
    /// Class flags and trivial-POVM certificate for a model.
    Certify {
        scenario: String,
        model: PathBuf,
        /// Weighted subgraph JSON when the scenario is not a library Γ_G.
        #[arg(long)]
        subgraph: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct KcbsArgs {
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    #[arg(long, default_value_t = 1.0)]
    r2: f64,
    /// Print the Born-rule data table as CSV instead of the report.
    #[arg(long)]
    table: bool,
    #[command(subcommand)]
    sweep: Option<KcbsCommand>,
}

#[derive(Subcommand, Debug)]
enum KcbsCommand {
    /// Grid over the product r1 r2 with r1 = r2.
    Sweep {
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
    },
}

/// Rendered command output.
struct Output {
    text: String,
    json: Value,
    csv: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let solver = e
                .chain()
                .filter_map(|c| c.downcast_ref::<nctx_core::Error>())
                .any(nctx_core::Error::is_solver_failure);
            ExitCode::from(if solver { 2 } else { 1 })
        }
    }
}

fn seed(cli: &Cli) -> Result<u64> {
    match std::env::var("NCTX_SEED") {
        Ok(v) => v.trim().parse().with_context(|| format!("NCTX_SEED={v:?} is not an integer")),
        Err(_) => Ok(cli.seed.unwrap_or(DEFAULT_SEED)),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let out = match &cli.command {
        Command::Analyze { scenario } => analyze(scenario)?,
        Command::Invariants {
            scenario,
            subgraph,
            q,
            optimal_q,
        } => invariants(scenario, subgraph.as_deref(), q.as_deref(), *optimal_q)?,
        Command::Kcbs(args) => match &args.sweep {
            Some(KcbsCommand::Sweep { steps, from, to }) => sweep(*steps, *from, *to)?,
            None => kcbs(args.r1, args.r2, args.table)?,
        },
        Command::Fcf => fcf()?,
        Command::Cega => cega()?,
        Command::Certify {
            scenario,
            model,
            subgraph,
        } => certify(scenario, model, subgraph.as_deref(), seed(cli)?)?,
    };
    let body = match cli.format {
        Format::Text => out.text,
        Format::Json => serde_json::to_string_pretty(&out.json)? + "\n",
        Format::Csv => out.csv.unwrap_or_else(|| flat_csv(&out.json)),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn sig(x: f64) -> String {
    rational::significant(x, 6)
}

fn exact(x: &Rational) -> String {
    rational::format(x)
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// `key,value` rows for nested JSON, keys joined with dots.
fn flat_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(items) => {
                for (i, x) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, out);
                }
            }
            Value::String(s) if s.contains(',') || s.contains('"') => {
                let _ = writeln!(out, "{prefix},\"{}\"", s.replace('"', "\"\""));
            }
            Value::String(s) => {
                let _ = writeln!(out, "{prefix},{s}");
            }
            other => {
                let _ = writeln!(out, "{prefix},{other}");
            }
        }
    }
    let mut out = String::from("key,value\n");
    walk("", v, &mut out);
    out
}

struct Loaded {
    scenario: ContextualityScenario,
    graph: Option<WeightedGraph>,
}

fn load_scenario(arg: &str) -> Result<Loaded> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let scenario = parse_scenario(&text).with_context(|| format!("validating {arg}"))?;
        return Ok(Loaded { scenario, graph: None });
    }
    let name: LibraryName = arg
        .parse()
        .with_context(|| format!("{arg} is neither a file nor a library scenario"))?;
    let item = library_scenario(name)?;
    Ok(Loaded {
        scenario: item.scenario,
        graph: item.graph,
    })
}

fn load_graph(loaded: &Loaded, subgraph: Option<&Path>) -> Result<WeightedGraph> {
    match subgraph {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_weighted_graph(&text, Some(&loaded.scenario.orthogonality_graph()))
                .with_context(|| format!("validating subgraph {}", p.display()))
        }
        None => loaded
            .graph
            .clone()
            .ok_or_else(|| anyhow!("no subgraph given and the scenario has none attached; pass --subgraph")),
    }
}

fn ids(s: &ContextualityScenario, members: &[usize]) -> Vec<String> {
    s.ids(members)
}

fn analyze(arg: &str) -> Result<Output> {
    let loaded = load_scenario(arg)?;
    let s = &loaded.scenario;
    let o = s.orthogonality_graph();
    let cliques = maximal_cliques(&o).context("maximal cliques of O(Γ)")?;
    let specker = structural_specker_check(s)?;
    let colouring = ks_colourable(s).context("KS-colourability")?;
    let counts = match extremal_partition(s) {
        Ok(ext) => json!({"deterministic": ext.deterministic.len(), "indeterministic": ext.indeterministic.len()}),
        Err(nctx_core::Error::TooLarge { what, size, limit }) => {
            json!({"unavailable": format!("{what} of size {size} exceeds {limit}")})
        }
        Err(e) => return Err(e).context("vertex enumeration of G(Γ)"),
    };
    let det_count = match deterministic_models(s) {
        Ok(d) => Some(d.len()),
        Err(nctx_core::Error::TooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let clique_ids: Vec<Vec<String>> = cliques.iter().map(|c| ids(s, c)).collect();
    let specker_json = match &specker {
        SpeckerVerdict::Holds => json!({"holds": true}),
        SpeckerVerdict::Violated { clique } => json!({"holds": false, "clique": ids(s, clique)}),
    };
    let colour_json = colouring.as_ref().map(|m| {
        let ones: Vec<String> = (0..s.num_vertices())
            .filter(|&v| rational::one() == *m.get(v))
            .map(|v| s.id(v).to_string())
            .collect();
        ones
    });
    let json = json!({
        "vertices": s.num_vertices(),
        "hyperedges": s.num_hyperedges(),
        "orthogonality_edges": o.num_edges(),
        "maximal_cliques": clique_ids,
        "structural_specker": specker_json,
        "ks_colourable": colouring.is_some(),
        "ks_colouring_true_events": colour_json,
        "deterministic_models": det_count,
        "general_polytope_vertices": counts,
    });
    let mut text = String::new();
    let _ = writeln!(text, "scenario: {} vertices, {} hyperedges", s.num_vertices(), s.num_hyperedges());
    let _ = writeln!(text, "orthogonality graph: {} edges, {} maximal cliques", o.num_edges(), cliques.len());
    match &specker {
        SpeckerVerdict::Holds => {
            let _ = writeln!(text, "structural Specker: holds");
        }
        SpeckerVerdict::Violated { clique } => {
            let _ = writeln!(text, "structural Specker: violated by {{{}}}", ids(s, clique).join(", "));
        }
    }
    let _ = writeln!(text, "KS-colourable: {}", if colouring.is_some() { "yes" } else { "no" });
    if let Some(n) = det_count {
        let _ = writeln!(text, "deterministic models: {n}");
    }
    match (&counts["deterministic"], &counts["indeterministic"]) {
        (Value::Number(d), Value::Number(i)) => {
            let _ = writeln!(text, "G(Γ) vertices: {d} deterministic, {i} indeterministic");
        }
        _ => {
            let _ = writeln!(text, "G(Γ) vertices: {}", counts["unavailable"].as_str().unwrap_or("unavailable"));
        }
    }
    Ok(Output { text, json, csv: None })
}

fn parse_q(text: &str) -> Result<Vec<Rational>> {
    text.split(',')
        .map(|t| rational::parse(t.trim()).map_err(|e| anyhow!("bad q entry {t:?}: {e}")))
        .collect()
}

fn bundle_text(inv: &InvariantBundle) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "alpha      = {}  (witness {{{}}})", exact(&inv.alpha), inv.alpha_witness.join(", "));
    let _ = writeln!(t, "theta      = {}  (± {})", sig(inv.theta), sig(inv.theta_tolerance));
    let _ = writeln!(t, "alpha*     = {}", exact(&inv.alpha_star));
    match &inv.beta {
        Some(b) => {
            let _ = writeln!(t, "beta       = {}", exact(b));
        }
        None => {
            let _ = writeln!(t, "beta       = undefined");
        }
    }
    let q: Vec<String> = inv.q_used.iter().map(exact).collect();
    let _ = writeln!(t, "q          = ({})", q.join(", "));
    if let (Some(d), Some(i)) = (inv.deterministic_vertices, inv.indeterministic_vertices) {
        let _ = writeln!(t, "G(Γ_G)     = {d} deterministic + {i} indeterministic vertices");
    }
    for n in &inv.notes {
        let _ = writeln!(t, "note: {n}");
    }
    t
}

fn invariants(arg: &str, subgraph: Option<&Path>, q: Option<&str>, optimal: bool) -> Result<Output> {
    let loaded = load_scenario(arg)?;
    let g = load_graph(&loaded, subgraph)?;
    let choice = match (q, optimal) {
        (Some(q), _) => QChoice::Given(parse_q(q)?),
        (None, true) => QChoice::Optimal,
        (None, false) => QChoice::Uniform,
    };
    let (_, inv) = compute_invariants(&g, &choice).context("computing invariants")?;
    Ok(Output {
        text: bundle_text(&inv),
        json: to_json(&inv),
        csv: None,
    })
}

fn kcbs_invariants() -> Result<InvariantBundle> {
    Ok(compute_invariants(&kcbs_g(), &QChoice::Uniform)
        .context("KCBS invariants")?
        .1)
}

fn kcbs_report(r1: f64, r2: f64, inv: &InvariantBundle) -> Result<NCIReport> {
    let real = kcbs_realization(r1, r2)?;
    let table = born_table(&real).context("Born table of the KCBS realization")?;
    let corr = compute_corr(&table, &uniform_q(&real.scenario))?;
    let r = compute_r(&table, &kcbs_g())?;
    let p0 = table.star.as_ref().map(|s| s.p0).unwrap_or(0.0);
    Ok(evaluate_nci(&corr, &r, &p0, inv)?)
}

fn verdict(w: Witness) -> &'static str {
    match w {
        Witness::Violation => "Violation",
        Witness::NoViolation => "NoViolation",
        Witness::TrivialBound => "TrivialBound",
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), sig)
}

const SWEEP_HEADER: &str = "r1,r2,corr,R,lhs,verdict\n";

fn sweep_row(r1: f64, r2: f64, rep: &NCIReport) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        r1,
        r2,
        rep.corr,
        rep.r_value,
        rep.lhs_nci3.map_or_else(String::new, |x| x.to_string()),
        verdict(rep.witness)
    )
}

fn report_text(rep: &NCIReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "Corr   = {}", sig(rep.corr));
    let _ = writeln!(t, "R      = {}", sig(rep.r_value));
    let _ = writeln!(t, "p0     = {}", sig(rep.p0));
    let _ = writeln!(t, "LHS    = {}", opt(rep.lhs_nci3));
    let _ = writeln!(t, "Corr bound (NCI1) = {}", opt(rep.bound_nci1));
    let _ = writeln!(t, "R bound (NCI2)    = {}", opt(rep.bound_nci2));
    let _ = writeln!(t, "saturation residual = {}", opt(rep.saturation_residual));
    let _ = writeln!(t, "verdict: {}", verdict(rep.witness));
    t
}

fn kcbs(r1: f64, r2: f64, table: bool) -> Result<Output> {
    if table {
        let t = born_table(&kcbs_realization(r1, r2)?)?;
        let csv = t.to_csv();
        let json = json!({ "csv": csv });
        return Ok(Output {
            text: csv.clone(),
            json,
            csv: Some(csv),
        });
    }
    let inv = kcbs_invariants()?;
    let rep = kcbs_report(r1, r2, &inv)?;
    let th = violation_threshold_kcbs();
    let mut text = format!("KCBS with r1 = {}, r2 = {}\n", sig(r1), sig(r2));
    text.push_str(&report_text(&rep));
    let _ = writeln!(text, "threshold: r1 r2 > {} = {}", th.product_expression, sig(th.product));
    let mut json = to_json(&rep);
    json["r1"] = json!(r1);
    json["r2"] = json!(r2);
    json["threshold"] = to_json(&th);
    Ok(Output {
        text,
        json,
        csv: Some(format!("{SWEEP_HEADER}{}", sweep_row(r1, r2, &rep))),
    })
}

fn sweep(steps: usize, from: f64, to: f64) -> Result<Output> {
    if steps < 2 {
        bail!("sweep needs at least 2 steps, got {steps}");
    }
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) {
        bail!("sweep range [{from}, {to}] must lie in [0, 1]");
    }
    let inv = kcbs_invariants()?;
    let rows: Vec<(f64, f64, NCIReport)> = (0..steps)
        .into_par_iter()
        .map(|k| {
            let x = from + (to - from) * k as f64 / (steps - 1) as f64;
            let r = x.sqrt();
            kcbs_report(r, r, &inv).map(|rep| (r, r, rep))
        })
        .collect::<Result<_>>()?;
    let th = violation_threshold_kcbs();
    let mut text = format!("{:>10} {:>10} {:>10} {:>10} {:>10}  verdict\n", "r1r2", "Corr", "R", "LHS", "sat");
    let mut csv = String::from(SWEEP_HEADER);
    let mut json_rows = Vec::with_capacity(rows.len());
    for (r1, r2, rep) in &rows {
        let _ = writeln!(
            text,
            "{:>10} {:>10} {:>10} {:>10} {:>10}  {}",
            sig(r1 * r2),
            sig(rep.corr),
            sig(rep.r_value),
            opt(rep.lhs_nci3),
            opt(rep.saturation_residual),
            verdict(rep.witness)
        );
        csv.push_str(&sweep_row(*r1, *r2, rep));
        json_rows.push(json!({
            "r1": r1, "r2": r2, "corr": rep.corr, "r_value": rep.r_value,
            "lhs_nci3": rep.lhs_nci3, "witness": rep.witness,
        }));
    }
    let _ = writeln!(text, "threshold: r1 r2 > {}", sig(th.product));
    Ok(Output {
        text,
        json: json!({ "threshold": to_json(&th), "rows": json_rows }),
        csv: Some(csv),
    })
}

fn fcf() -> Result<Output> {
    let bound = fcf_bound()?;
    let real = fcf_realization();
    let table = born_table(&real)?;
    let corr = compute_corr(&table, &uniform_q(&real.scenario))?;
    let mixture = fcf_measurement_residual(&real);
    let sources = real.source_equivalence_residual();
    let xi: Vec<String> = bound.vertex.iter().map(exact).collect();
    let mut text = String::new();
    let _ = writeln!(text, "noncontextual bound: Corr_fcf <= {}", exact(&bound.value));
    let _ = writeln!(text, "maximizing assignment xi(0|M_i) = ({})", xi.join(", "));
    let _ = writeln!(text, "trine realization: Corr_fcf = {}", sig(corr));
    let _ = writeln!(text, "measurement mixture residual = {:e}", mixture);
    let _ = writeln!(text, "source equivalence residual = {:e}", sources);
    let json = json!({
        "bound": to_json(&bound),
        "quantum_corr": corr,
        "measurement_mixture_residual": mixture,
        "source_equivalence_residual": sources,
        "violation": corr > rational::to_f64(&bound.value),
    });
    Ok(Output { text, json, csv: None })
}

fn cega() -> Result<Output> {
    let s18 = cega_18();
    let s27 = cega_27();
    let col18 = ks_colourable(&s18)?.is_some();
    let col27 = ks_colourable(&s27)?.is_some();
    let mut rows = Vec::new();
    for k in 1..=3 {
        let w = cega_expression(k)?;
        let mut vals = Vec::new();
        for class in [ModelSet::Classical, ModelSet::Ce1, ModelSet::General] {
            let b = max_expression(&s27, &w, class).with_context(|| format!("Expr{k} over {class:?}"))?;
            vals.push(b.value().map(exact).unwrap_or_else(|| "empty".into()));
        }
        rows.push((k, vals));
    }
    let mut text = format!("KS-colourable: Γ18 {}, Γ27 {}\n", yes(col18), yes(col27));
    let _ = writeln!(text, "{:<6} {:>6} {:>6} {:>6}", "", "C", "CE1", "G");
    let mut csv = String::from("expression,C,CE1,G\n");
    let mut json_rows = Vec::new();
    for (k, v) in &rows {
        let _ = writeln!(text, "{:<6} {:>6} {:>6} {:>6}", format!("Expr{k}"), v[0], v[1], v[2]);
        let _ = writeln!(csv, "Expr{k},{},{},{}", v[0], v[1], v[2]);
        json_rows.push(json!({"expression": format!("Expr{k}"), "C": v[0], "CE1": v[1], "G": v[2]}));
    }
    Ok(Output {
        text,
        json: json!({"ks_colourable_18": col18, "ks_colourable_27": col27, "bounds": json_rows}),
        csv: Some(csv),
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn certify(arg: &str, model_path: &Path, subgraph: Option<&Path>, seed: u64) -> Result<Output> {
    let loaded = load_scenario(arg)?;
    let s = &loaded.scenario;
    let text = std::fs::read_to_string(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let model = ModelJson::parse(&text)?
        .into_model(s)
        .with_context(|| format!("validating model {}", model_path.display()))?;
    let dets = deterministic_models(s)?;
    let class = classify_model(s, &model, &dets).context("classifying the model")?;

    let g = load_graph(&loaded, subgraph)?;
    let gamma_g = build_gamma_g(&g)?;
    let gs = &gamma_g.scenario;
    // carry the model over to Γ_G by vertex id
    let by_id: HashMap<String, Rational> = s
        .vertices()
        .iter()
        .cloned()
        .zip(model.values().iter().cloned())
        .collect();
    let values = gs
        .vertices()
        .iter()
        .map(|id| {
            by_id
                .get(id)
                .cloned()
                .ok_or_else(|| anyhow!("model has no probability for Γ_G vertex {id}; certify needs a model on Γ_G"))
        })
        .collect::<Result<Vec<_>>>()?;
    let gm = ProbModel::new(gs, values).context("model restricted to Γ_G")?;
    let (_, inv) = compute_invariants(&g, &QChoice::Uniform)?;
    let ext = extremal_partition(gs)?;
    let cert = certify_trivial_povm_with(&ext, &gm, &inv)?;

    // one seeded trivial-POVM realization as a numerical spot check
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sources = SourceAssignment::random(gs, 3, Some(1.0 / 3.0), &mut rng);
    let real = trivial_povm_realization(gs, &gm, sources)?;
    let table = born_table(&real)?;
    let corr = compute_corr(&table, &inv.q_used)?;
    let r = compute_r(&table, &g)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "classes: deterministic-extremal {}, indeterministic-extremal {}, C {}, CE1 {}, G {}",
        yes(class.deterministic_extremal),
        yes(class.indeterministic_extremal),
        yes(class.classical),
        yes(class.consistent_exclusivity),
        yes(class.general)
    );
    let _ = writeln!(
        out,
        "decomposition: Pr(det) = {}, Pr(ind) = {}",
        exact(&cert.weight_deterministic),
        exact(&cert.weight_indeterministic)
    );
    let _ = writeln!(out, "bounds: Corr <= {}, R <= {}", exact(&cert.corr_bound), exact(&cert.r_bound));
    for row in &cert.rows {
        let lhs = row.lhs_nci3.as_ref().map_or_else(|| "-".to_string(), exact);
        let _ = writeln!(out, "  p0 = {:<4} LHS = {:<10} {}", exact(&row.p0), lhs, verdict(row.witness));
    }
    let _ = writeln!(out, "seeded trivial realization: Corr = {}, R = {}", sig(corr), sig(r));
    let _ = writeln!(out, "certificate: {}", verdict(cert.verdict));
    let json = json!({
        "classes": to_json(&class),
        "invariants": to_json(&inv),
        "certificate": to_json(&cert),
        "seed": seed,
        "realized": {"corr": corr, "r_value": r, "p0": 1.0 / 3.0},
    });
    Ok(Output { text: out, json, csv: None })
}
