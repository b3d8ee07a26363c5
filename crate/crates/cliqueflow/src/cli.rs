//! Command-line front end: graph ingestion, method dispatch, JSON report.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::{Parser, ValueEnum};

use crate::clique::{max_clique_exact, CliqueResult};
use crate::closed_form::{clique_optimum, edge_pair_optimum, general_optimum, motzkin_straus_bound};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphClass, LoadVector};
use crate::numeric::{
    projected_gradient_ascent, replicator_solve, SolverParams, DEFAULT_SUPPORT_THRESHOLD,
};
use crate::numeric::extract_clique_from_support;
use crate::oracle::grid_oracle;
use crate::report::{Method, SolveReport};
use crate::transforms::concentrate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Input graph encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Lines `u v` with 0-based endpoints; `#` comments; optional `n <count>` header.
    Edgelist,
    /// DIMACS: `c` comments, one `p edge <n> <m>` line, `e <u> <v>` with 1-based endpoints.
    Dimacs,
}

/// Graph plus non-fatal notes gathered while reading it.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

/// Picks a format from the filename when none is given: `.col`, `.clq` and
/// `.dimacs` read as DIMACS, anything else as an edge list.
pub fn infer_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("col") | Some("clq") | Some("dimacs") => InputFormat::Dimacs,
        _ => InputFormat::Edgelist,
    }
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a nonnegative integer, got `{token}`"),
    })
}

/// Parses a graph from text in the given format.
pub fn parse_graph(text: &str, format: InputFormat) -> Result<ParsedGraph> {
    match format {
        InputFormat::Edgelist => parse_edgelist(text),
        InputFormat::Dimacs => parse_dimacs(text),
    }
}

fn parse_edgelist(text: &str) -> Result<ParsedGraph> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut max_index: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.as_slice() {
            ["n", count] => {
                if declared.is_some() {
                    return Err(Error::Parse {
                        line,
                        message: "duplicate `n` header".into(),
                    });
                }
                declared = Some(parse_index(count, line)?);
            }
            [a, b] => {
                let u = parse_index(a, line)?;
                let v = parse_index(b, line)?;
                if let Some(n) = declared {
                    if u >= n || v >= n {
                        return Err(Error::Parse {
                            line,
                            message: format!("endpoint out of declared range 0..{n}"),
                        });
                    }
                }
                if u == v {
                    return Err(Error::Parse {
                        line,
                        message: format!("self-loop ({u}, {v})"),
                    });
                }
                max_index = Some(max_index.unwrap_or(0).max(u).max(v));
                edges.push((u, v));
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `u v` or `n <count>`, got `{trimmed}`"),
                })
            }
        }
    }
    let n = match (declared, max_index) {
        (Some(n), _) => n,
        (None, Some(max)) => max + 1,
        (None, None) => {
            return Err(Error::Parse {
                line: 0,
                message: "no edges and no `n` header".into(),
            })
        }
    };
    let graph = Graph::unit(n, &edges)?;
    Ok(ParsedGraph {
        graph,
        warnings: Vec::new(),
    })
}

fn parse_dimacs(text: &str) -> Result<ParsedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.as_slice() {
            ["p", kind, n, m] if *kind == "edge" || *kind == "col" => {
                if header.is_some() {
                    return Err(Error::Parse {
                        line,
                        message: "duplicate `p` line".into(),
                    });
                }
                header = Some((parse_index(n, line)?, parse_index(m, line)?));
            }
            ["e", a, b] => {
                let Some((n, _)) = header else {
                    return Err(Error::Parse {
                        line,
                        message: "edge before `p edge` header".into(),
                    });
                };
                let u = parse_index(a, line)?;
                let v = parse_index(b, line)?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::Parse {
                        line,
                        message: format!("endpoint out of declared range 1..={n}"),
                    });
                }
                edges.push((u - 1, v - 1));
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unrecognized line `{trimmed}`"),
                })
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::Parse {
            line: 0,
            message: "missing `p edge <n> <m>` header".into(),
        });
    };
    let graph = Graph::unit(n, &edges)?;
    let mut warnings = Vec::new();
    if graph.edge_count() != m {
        warnings.push(format!(
            "header declares {m} edges, input holds {} after deduplication",
            graph.edge_count()
        ));
    }
    Ok(ParsedGraph { graph, warnings })
}

/// Writes a graph as an edge list with an `n` header, inverse to
/// [`parse_graph`] with [`InputFormat::Edgelist`].
pub fn serialize_edgelist(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Writes a graph in DIMACS format, inverse to [`parse_graph`] with
/// [`InputFormat::Dimacs`].
pub fn serialize_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    ClosedForm,
    Transform,
    Qp,
    Replicator,
    Oracle,
}

#[derive(Debug, Parser)]
#[command(name = "cliqueflow", disable_help_flag = false)]
#[command(about = "Maximize the quadratic edge-interaction flow of a loaded graph")]
struct Args {
    /// Graph file to read.
    #[arg(long)]
    input: String,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// Total load budget D.
    #[arg(long, default_value_t = 1.0)]
    load: f64,
    /// Flow factor c applied to every edge product.
    #[arg(long, default_value_t = 1.0)]
    flow_factor: f64,
    /// Solution method.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Grid granularity for the oracle method.
    #[arg(long, default_value_t = 20)]
    granularity: usize,
    /// Number of solver restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Seed for the solver restarts.
    #[arg(long)]
    seed: Option<u64>,
    /// Include the transformation trace in the report.
    #[arg(long, default_value_t = false)]
    trace: bool,
    /// Starting load vector for the transform method, one value per line.
    #[arg(long)]
    initial: Option<String>,
}

fn format_number(x: f64) -> String {
    // 17 significant digits round-trip any f64
    format!("{x:.16e}")
}

fn render_report(report: &SolveReport, n: usize, edge_count: usize, omega: usize, bound: f64, with_trace: bool) -> String {
    let mut out = String::new();
    out.push('{');
    let _ = write!(out, "\"method\": \"{}\"", report.method.as_str());
    let _ = write!(out, ", \"n\": {n}");
    let _ = write!(out, ", \"edge_count\": {edge_count}");
    let _ = write!(out, ", \"omega\": {omega}");
    let _ = write!(out, ", \"flow\": {}", format_number(report.flow));
    out.push_str(", \"loads\": [");
    for (k, &v) in report.loads.values().iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(&format_number(v));
    }
    out.push(']');
    let _ = write!(out, ", \"bound\": {}", format_number(bound));
    if with_trace {
        if let Some(trace) = &report.trace {
            out.push_str(", \"trace\": [");
            for (k, step) in trace.steps.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(
                    out,
                    "{{\"from\": {}, \"to\": {}, \"amount\": {}, \"flow_before\": {}, \"flow_after\": {}, \"rule\": \"{}\"}}",
                    step.from,
                    step.to,
                    format_number(step.amount),
                    format_number(step.flow_before),
                    format_number(step.flow_after),
                    step.rule.as_str()
                );
            }
            out.push(']');
        }
    }
    let d = &report.diagnostics;
    let _ = write!(
        out,
        ", \"diagnostics\": {{\"iterations\": {}, \"restarts\": {}, \"converged\": {}}}",
        d.iterations, d.restarts, d.converged
    );
    out.push('}');
    out
}

fn read_initial_loads(path: &str, n: usize, total: f64) -> Result<LoadVector> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("expected a real number, got `{trimmed}`"),
        })?;
        values.push(value);
    }
    if values.len() != n {
        return Err(Error::InvalidArgument(format!(
            "initial loads hold {} entries, graph has {n} vertices",
            values.len()
        )));
    }
    let sum: f64 = values.iter().sum();
    if (sum - total).abs() > 1e-9 * total.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "initial loads sum to {sum}, expected the budget {total}"
        )));
    }
    // absorb rounding from the text encoding
    let scale = total / sum;
    LoadVector::with_total(values.iter().map(|v| v * scale).collect(), total)
}

fn solve(args: &Args, graph: &Graph) -> Result<(SolveReport, CliqueResult)> {
    let total = args.load;
    let params = SolverParams {
        restarts: args.restarts.unwrap_or(SolverParams::default().restarts),
        seed: args.seed.unwrap_or(0),
        ..SolverParams::default()
    };
    // exact clique backs both the reported omega and the bound
    let max_clique = max_clique_exact(graph);
    let report = match args.method {
        MethodArg::Auto => dispatch_auto(graph, total, &max_clique)?,
        MethodArg::ClosedForm => match graph.classify() {
            GraphClass::Complete => {
                clique_optimum(graph.n(), total, graph.flow_factor())?
            }
            GraphClass::SingleLevelTree | GraphClass::Bipartite | GraphClass::OddCycle => {
                edge_pair_optimum(graph, total)?
            }
            GraphClass::General => {
                return Err(Error::WrongClass { class: "general" });
            }
        },
        MethodArg::Transform => {
            let start = match &args.initial {
                Some(path) => read_initial_loads(path, graph.n(), total)?,
                None => LoadVector::uniform(graph.n(), total),
            };
            let trace = concentrate(graph, &start, &max_clique)?;
            let flow = graph.flow(&trace.final_loads)?;
            SolveReport {
                method: Method::Transform,
                loads: trace.final_loads.clone(),
                flow,
                clique: Some(max_clique.clone()),
                diagnostics: crate::report::Diagnostics {
                    iterations: trace.steps.len(),
                    restarts: 0,
                    converged: true,
                    stationarity: None,
                },
                trace: Some(trace),
            }
        }
        MethodArg::Qp => projected_gradient_ascent(graph, total, &params)?,
        MethodArg::Replicator => {
            let mut report = replicator_solve(graph, total, &params)?;
            if let Ok(clique) =
                extract_clique_from_support(graph, &report.loads, DEFAULT_SUPPORT_THRESHOLD)
            {
                report.clique = Some(clique);
            }
            report
        }
        MethodArg::Oracle => grid_oracle(graph, total, args.granularity)?,
    };
    Ok((report, max_clique))
}

fn dispatch_auto(graph: &Graph, total: f64, max_clique: &CliqueResult) -> Result<SolveReport> {
    if graph.edge_count() == 0 {
        // flow is identically zero; report the trivial optimum
        return general_optimum(graph, total, max_clique);
    }
    match graph.classify() {
        GraphClass::Complete => clique_optimum(graph.n(), total, graph.flow_factor()),
        GraphClass::SingleLevelTree | GraphClass::Bipartite | GraphClass::OddCycle => {
            edge_pair_optimum(graph, total)
        }
        GraphClass::General => general_optimum(graph, total, max_clique),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Io(_) => EXIT_PARSE,
        _ => EXIT_USAGE,
    }
}

/// Runs the command line given `argv` (including the program name), writing
/// one JSON document to `out` and messages to `err`. Returns the exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match run_parsed(&args, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn run_parsed(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if !(args.load.is_finite() && args.load > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "--load must be positive, got {}",
            args.load
        )));
    }
    if !(args.flow_factor.is_finite() && args.flow_factor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "--flow-factor must be positive, got {}",
            args.flow_factor
        )));
    }
    if args.granularity == 0 {
        return Err(Error::InvalidArgument("--granularity must be >= 1".into()));
    }
    if args.restarts == Some(0) {
        return Err(Error::InvalidArgument("--restarts must be >= 1".into()));
    }
    let path = Path::new(&args.input);
    let format = args.format.unwrap_or_else(|| infer_format(path));
    let text = std::fs::read_to_string(path)?;
    let parsed = parse_graph(&text, format)?;
    for warning in &parsed.warnings {
        let _ = writeln!(err, "warning: {warning}");
    }
    let graph = parsed.graph.with_flow_factor(args.flow_factor)?;
    let (report, max_clique) = solve(args, &graph)?;
    let bound = motzkin_straus_bound(max_clique.size(), args.load, args.flow_factor)?;
    let json = render_report(
        &report,
        graph.n(),
        graph.edge_count(),
        max_clique.size(),
        bound,
        args.trace,
    );
    let _ = writeln!(out, "{json}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dimacs_path() {
        let parsed = parse_graph("p edge 3 2\ne 1 2\ne 2 3\n", InputFormat::Dimacs).unwrap();
        assert_eq!(parsed.graph.n(), 3);
        assert_eq!(parsed.graph.edges(), &[(0, 1), (1, 2)]);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn parses_commented_edgelist() {
        let parsed = parse_graph("# triangle\n0 1\n1 2\n0 2\n", InputFormat::Edgelist).unwrap();
        assert_eq!(parsed.graph.n(), 3);
        assert_eq!(parsed.graph.edge_count(), 3);
    }

    #[test]
    fn reports_malformed_line_number() {
        let e = parse_graph("0 1\n1 x\n", InputFormat::Edgelist).unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dimacs_edge_count_mismatch_is_a_warning() {
        let parsed = parse_graph("p edge 3 5\ne 1 2\n", InputFormat::Dimacs).unwrap();
        assert_eq!(parsed.graph.edge_count(), 1);
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn dimacs_rejects_out_of_range_endpoints() {
        let e = parse_graph("p edge 3 1\ne 1 4\n", InputFormat::Dimacs).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn edgelist_header_fixes_vertex_count() {
        let parsed = parse_graph("n 5\n0 1\n", InputFormat::Edgelist).unwrap();
        assert_eq!(parsed.graph.n(), 5);
        let e = parse_graph("n 2\n0 3\n", InputFormat::Edgelist).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn round_trip_both_formats() {
        let g = Graph::petersen();
        let back = parse_graph(&serialize_edgelist(&g), InputFormat::Edgelist).unwrap();
        assert_eq!(back.graph.edges(), g.edges());
        assert_eq!(back.graph.n(), g.n());
        let back = parse_graph(&serialize_dimacs(&g), InputFormat::Dimacs).unwrap();
        assert_eq!(back.graph.edges(), g.edges());
        assert_eq!(back.graph.n(), g.n());
    }

    #[test]
    fn format_inference_from_extension() {
        assert_eq!(infer_format(Path::new("g.col")), InputFormat::Dimacs);
        assert_eq!(infer_format(Path::new("g.clq")), InputFormat::Dimacs);
        assert_eq!(infer_format(Path::new("g.txt")), InputFormat::Edgelist);
    }
}
