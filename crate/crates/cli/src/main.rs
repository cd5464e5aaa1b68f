//! `lpa` — analyze finite graphs and compute in their Leavitt path algebras.
//!
//! Exit codes: 0 success, 1 at least one check failed, 2 input error.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use lpa_core::dualgraph;
use lpa_core::element::{dimension, Element};
use lpa_core::expr;
use lpa_core::localglobal;
use lpa_core::quiver::{EdgeIx, Graph, GraphRef};
use lpa_core::report::Report;
use lpa_core::rewrite;
use lpa_core::scalar::FieldSpec;
use lpa_core::structure;

#[derive(Parser)]
#[command(name = "lpa", version, about = "Leavitt path algebra toolkit", disable_help_subcommand = true)]
struct Cli {
    /// Coefficient field: `rational` or `fp:<prime>`
    #[arg(long, global = true, default_value = "rational")]
    field: String,

    /// Seed for randomized searches
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Degree bound for bounded solves (default: derived from the inputs)
    #[arg(long, global = true)]
    bound: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Path to a graph file
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Full graph/algebra report: summary, properties, shape, relation checks
    Analyze(GraphArg),
    /// Build the companion graph of an edge set and emit it as a graph file
    Ef {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated edge ids (empty for the empty set)
        #[arg(long, default_value = "")]
        edges: String,
        /// Also verify the homomorphism into the base algebra
        #[arg(long)]
        verify: bool,
    },
    /// Reduce an expression to canonical normal form
    Reduce {
        #[command(flatten)]
        graph: GraphArg,
        /// Element expression, e.g. "y1* y1" or "2/3 v + 1/3 v"
        #[arg(long)]
        expr: String,
    },
    /// Build and verify the subalgebra decomposition of the given elements
    Subalg {
        #[command(flatten)]
        graph: GraphArg,
        /// File of element expressions, one per line
        #[arg(long)]
        exprs: Option<PathBuf>,
        /// Inline element expression (repeatable)
        #[arg(long = "expr")]
        inline: Vec<String>,
    },
    /// Emit the dual graph and compare invariants against the original
    Dual(GraphArg),
    /// Structure summary: acyclicity, exits, finiteness, regularity, shape
    Structure(GraphArg),
    /// Verify the companion-graph homomorphism for an edge set
    ThetaCheck {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated edge ids (empty for the empty set)
        #[arg(long, default_value = "")]
        edges: String,
    },
}

/// Input or usage problem: exit 2.
struct InputError(String);

macro_rules! input_error_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for InputError {
            fn from(e: $ty) -> Self {
                InputError(e.to_string())
            }
        }
    )*};
}

input_error_from!(
    lpa_core::GraphError,
    lpa_core::AlgebraError,
    lpa_core::LocalGlobalError,
    lpa_core::StructureError,
    lpa_core::DualError
);

fn parse_field(spec: &str) -> Result<FieldSpec, InputError> {
    if spec == "rational" {
        return Ok(FieldSpec::Rational);
    }
    if let Some(p) = spec.strip_prefix("fp:") {
        let p: u32 = p.parse().map_err(|_| InputError(format!("invalid prime `{p}`")))?;
        return Ok(FieldSpec::fp(p)?);
    }
    Err(InputError(format!("unknown field `{spec}` (use `rational` or `fp:<prime>`)")))
}

fn load_graph(path: &PathBuf) -> Result<GraphRef, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok(Arc::new(Graph::parse(&text)?))
}

fn parse_edge_list(g: &GraphRef, list: &str) -> Result<BTreeSet<EdgeIx>, InputError> {
    let mut out = BTreeSet::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let e = g.edge(name).ok_or_else(|| InputError(format!("unknown edge id `{name}`")))?;
        out.insert(e);
    }
    Ok(out)
}

fn print_report(report: &Report, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("report serializes"));
    } else {
        print!("{report}");
    }
}

fn run(cli: &Cli) -> Result<u8, InputError> {
    let field = parse_field(&cli.field)?;
    match &cli.command {
        Command::Analyze(arg) => {
            let g = load_graph(&arg.graph)?;
            let ck = rewrite::check_ck_relations(&g, field);
            let cofinal = g.is_cofinal();
            let summary = json!({
                "graph": {
                    "vertices": g.vertex_count(),
                    "edges": g.edge_count(),
                    "sinks": g.sinks().iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>(),
                    "sources": g.sources().iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>(),
                },
                "properties": {
                    "acyclic": g.is_acyclic(),
                    "cofinal": cofinal.is_cofinal(),
                    "no_exit": lpa_core::quiver::no_cycle_has_exit(&g),
                    "directly_finite": structure::directly_finite_decider(&g, field).is_directly_finite(),
                    "von_neumann_regular": g.is_acyclic(),
                    "dimension": dimension(&g).to_string(),
                },
                "shape": if lpa_core::quiver::no_cycle_has_exit(&g) {
                    structure::matricial_shape(&g).map(|s| s.to_json()).unwrap_or(json!(null))
                } else {
                    json!(null)
                },
                "checks": ck.to_json(),
            });
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("serializes"));
            } else {
                println!("vertices: {}  edges: {}", g.vertex_count(), g.edge_count());
                println!(
                    "sinks: [{}]  sources: [{}]",
                    g.sinks().iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>().join(", "),
                    g.sources().iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>().join(", ")
                );
                println!("acyclic: {}", g.is_acyclic());
                println!("cofinal: {} ({})", cofinal.is_cofinal(), cofinal.describe(&g));
                println!("no_exit: {}", lpa_core::quiver::no_cycle_has_exit(&g));
                println!(
                    "directly_finite: {}",
                    structure::directly_finite_decider(&g, field).is_directly_finite()
                );
                println!("von_neumann_regular: {}", g.is_acyclic());
                println!("dimension: {}", dimension(&g));
                if let Ok(shape) = structure::matricial_shape(&g) {
                    println!("shape: k_blocks {:?} laurent_blocks {:?}", shape.k_blocks, shape.laurent_blocks);
                }
                println!(
                    "ck_relations: {}",
                    if ck.all_passed() { "all pass" } else { "FAILURES" }
                );
            }
            Ok(if ck.all_passed() { 0 } else { 1 })
        }
        Command::Ef { graph, edges, verify } => {
            let g = load_graph(&graph.graph)?;
            let f = parse_edge_list(&g, edges)?;
            let ef = localglobal::build_ef(&g, &f)?;
            print!("{}", ef.graph().to_text());
            if *verify {
                let report = localglobal::verify_theta_homomorphism(&ef, field);
                print_report(&report, cli.json);
                return Ok(if report.all_passed() { 0 } else { 1 });
            }
            Ok(0)
        }
        Command::Reduce { graph, expr: expression } => {
            let g = load_graph(&graph.graph)?;
            let el = expr::parse_element(&g, field, expression)?;
            println!("{}", el.display());
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&el.to_json()).expect("serializes"));
            }
            Ok(0)
        }
        Command::Subalg { graph, exprs, inline } => {
            let g = load_graph(&graph.graph)?;
            let mut elements: Vec<Element> = Vec::new();
            if let Some(path) = exprs {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                for (_, el) in expr::parse_element_file(&g, field, &text)? {
                    elements.push(el);
                }
            }
            for s in inline {
                elements.push(expr::parse_element(&g, field, s)?);
            }
            if elements.is_empty() {
                return Err(InputError("no input elements (use --exprs or --expr)".into()));
            }
            if elements.iter().any(|e| e.is_zero()) {
                return Err(InputError("zero element in input".into()));
            }
            let b = localglobal::build_b(&elements)?;
            let bound = cli.bound.unwrap_or_else(|| b.default_bound(&elements));

            let part = &b.partition;
            let names = |set: &BTreeSet<lpa_core::quiver::VertexIx>| {
                set.iter().map(|&v| g.vertex_name(v).to_string()).collect::<Vec<_>>()
            };
            let f_names: Vec<String> =
                part.f.iter().map(|&e| g.edge_name(e).to_string()).collect();

            let mut report = localglobal::verify_decomposition(&b, bound);
            for (i, a) in elements.iter().enumerate() {
                let outcome = localglobal::membership(&b, a, bound)?;
                report.check(format!("membership(input {})", i + 1), outcome.is_in_span(), || {
                    "input not found in its own subalgebra at this bound".to_string()
                });
            }

            if cli.json {
                let theta_v: Vec<_> = b
                    .theta
                    .vertex_images()
                    .map(|(v, img)| {
                        json!({"vertex": b.ef.graph().vertex_name(*v), "image": img.to_json()})
                    })
                    .collect();
                let theta_e: Vec<_> = b
                    .theta
                    .edge_images_iter()
                    .map(|(e, img)| {
                        json!({"edge": b.ef.graph().edge_name(*e), "image": img.to_json()})
                    })
                    .collect();
                let out = json!({
                    "F": f_names,
                    "S1": names(&part.s1),
                    "S2": names(&part.s2),
                    "S3": names(&part.s3),
                    "S4": names(&part.s4),
                    "theta_vertex_images": theta_v,
                    "theta_edge_images": theta_e,
                    "u": b.s4_idempotents.iter().map(|(w, u)| json!({
                        "vertex": g.vertex_name(*w),
                        "element": u.to_json(),
                    })).collect::<Vec<_>>(),
                    "bound": bound,
                    "checks": report.to_json(),
                });
                println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
            } else {
                println!("F  = [{}]", f_names.join(", "));
                println!("S1 = [{}]", names(&part.s1).join(", "));
                println!("S2 = [{}]", names(&part.s2).join(", "));
                println!("S3 = [{}]", names(&part.s3).join(", "));
                println!("S4 = [{}]", names(&part.s4).join(", "));
                for (v, img) in b.theta.vertex_images() {
                    println!("theta({}) = {}", b.ef.graph().vertex_name(*v), img.display());
                }
                for (e, img) in b.theta.edge_images_iter() {
                    println!("theta({}) = {}", b.ef.graph().edge_name(*e), img.display());
                }
                for (w, u) in &b.s4_idempotents {
                    println!("u_{} = {}", g.vertex_name(*w), u.display());
                }
                println!("bound = {bound}");
                print!("{report}");
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Dual(arg) => {
            let g = load_graph(&arg.graph)?;
            let d = dualgraph::dual(&g)?;
            print!("{}", d.to_text());
            let report = dualgraph::compare_invariants(&g)?;
            print_report(&report, cli.json);
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Structure(arg) => {
            let g = load_graph(&arg.graph)?;
            let summary = structure::structure_summary(&g, field);
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializes"));
            Ok(0)
        }
        Command::ThetaCheck { graph, edges } => {
            let g = load_graph(&graph.graph)?;
            let f = parse_edge_list(&g, edges)?;
            let ef = localglobal::build_ef(&g, &f)?;
            let mut report = localglobal::verify_theta_homomorphism(&ef, field);
            report.extend(localglobal::acyclicity_transfer_check(&g, &f));
            print_report(&report, cli.json);
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

