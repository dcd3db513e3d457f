//! Command-line front end for the metrized-graph engine.
//!
//! Subcommands parse graph or curve files, dispatch library computations,
//! and emit deterministic JSON or TSV. Numeric results are printed with 12
//! significant digits. Exit codes: 0 success, 1 domain error (the library
//! error name goes to stderr), 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;

use mgraph::degeneration::{continuity_probe, contract, phi_function, ProbeQuantity, ProbeReport};
use mgraph::graph::{dual_graph, polarized_genus};
use mgraph::invariants::{
    discretization_oracle, epsilon_invariant, green_constant, phi_invariant, richardson,
    GreenEvaluator,
};
use mgraph::measures::{admissible_measure, canonical_measure};
use mgraph::skeletal::{phi_asymptotic, SkeletalFunction};
use mgraph::{electric, io, GraphPoint, Polarization};

type Graph = mgraph::Graph64;

#[derive(Parser)]
#[command(
    name = "mgraph",
    version,
    about = "Analysis of polarized metrized graphs: resistance, Green functions, phi/epsilon invariants, degeneration, skeletal functions",
    after_help = "Points are written v<ID> for the vertex with file id <ID> and e<ID>:<OFFSET> \
                  for the position OFFSET from the source of edge <ID>.\n\
                  Graph files: {\"vertices\":[{\"id\":\"0\",\"q\":1}],\"edges\":[{\"id\":\"0\",\"s\":\"0\",\"t\":\"1\",\"length\":1.0}]}\n\
                  Curve files: {\"components\":[{\"id\":\"A\",\"genus\":1}],\"nodes\":[{\"a\":\"A\",\"b\":\"B\",\"length\":1.0}]}"
)]
struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Deviation tolerance used by `probe` pass/fail reporting.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Pieces per edge for the discretization oracle.
    #[arg(long = "oracle-k", global = true, default_value_t = 32)]
    oracle_k: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureKind {
    Admissible,
    Canonical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Phi,
    Epsilon,
}

#[derive(Subcommand)]
enum Command {
    /// Structural summary of a graph or curve file.
    ///
    /// Output: {"vertices", "edges", "genus", "polarized_genus",
    /// "canonical_degree", "total_length", "stable"}.
    Info {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// The phi-invariant of the polarized graph.
    ///
    /// Output: {"phi"}.
    Phi {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// The epsilon-invariant of the polarized graph.
    ///
    /// Output: {"epsilon"}.
    Epsilon {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Effective resistance between two points.
    ///
    /// Output: {"resistance"}.
    Resistance {
        #[arg(long)]
        graph: PathBuf,
        /// First point (v<ID> or e<ID>:<OFFSET>).
        #[arg(long)]
        from: String,
        /// Second point.
        #[arg(long)]
        to: String,
    },
    /// Green function g_mu(x, y) of the admissible or canonical measure.
    ///
    /// Output: {"green", "c_mu"}.
    Green {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value_t = MeasureKind::Admissible)]
        measure: MeasureKind,
    },
    /// Contract edges set to zero length and report the quotient.
    ///
    /// Output: {"vertices", "edges", "polarized_genus", "phi",
    /// "vertex_map"}, or the quotient graph file with --emit.
    Contract {
        #[arg(long)]
        graph: PathBuf,
        /// Length overrides, comma-separated id=value pairs; unlisted
        /// edges keep their template lengths.
        #[arg(long)]
        lengths: Option<String>,
        /// Comma-separated edge ids to contract (shorthand for id=0).
        #[arg(long)]
        zero: Option<String>,
        /// Emit the quotient as a graph file instead of a summary.
        #[arg(long)]
        emit: bool,
    },
    /// Continuity probe: shrink edges geometrically toward the quotient.
    ///
    /// Output: rows {"index", "lengths", "value", "deviation"} plus
    /// {"limit_value", "tail_deviation", "final_deviation",
    /// "within_tolerance"}; --tolerance sets the pass threshold.
    Probe {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated edge ids to shrink toward zero.
        #[arg(long)]
        shrink: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        factor: f64,
        #[arg(long, value_enum, default_value_t = Quantity::Phi)]
        quantity: Quantity,
    },
    /// Leading term of phi near the boundary of moduli, from a curve file
    /// and smoothing parameters u.
    ///
    /// Output: {"phi_leading"}. The sublinear error term is not computed.
    #[command(name = "phi-asymptotic")]
    PhiAsymptotic {
        #[arg(long)]
        curve: PathBuf,
        /// Comma-separated |u_i| values in (0, 1), one per node.
        #[arg(long)]
        u: String,
    },
    /// Evaluate a skeletal expression file (or min of monomials).
    ///
    /// Output: {"value"}.
    #[command(name = "skeletal-eval")]
    SkeletalEval {
        /// Expression file (kinds: linear, min, lincomb, graphphi).
        #[arg(long)]
        expr: Option<PathBuf>,
        /// Monomial exponent rows like "1,0;0,1" (min of linear forms).
        #[arg(long)]
        monomials: Option<String>,
        /// Evaluation point m >= 0, comma-separated.
        #[arg(long)]
        at: Option<String>,
        /// Polydisk moduli |t_i| in (0, 1); evaluates the Green function.
        #[arg(long = "green-at")]
        green_at: Option<String>,
    },
    /// Discretization-oracle estimates against the exact engine.
    ///
    /// Output: {"phi", "epsilon", "c_mu"} from the exact engine and
    /// "*_oracle" / "*_richardson" companions at --oracle-k pieces.
    Oracle {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(mgraph::Error),
}

impl From<mgraph::Error> for Failure {
    fn from(e: mgraph::Error) -> Self {
        Failure::Domain(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            println!("{}", output);
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {}", msg);
            ExitCode::from(2)
        }
        Err(Failure::Domain(err)) => {
            eprintln!("error: {}: {}", err.name(), err);
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Info { graph, curve } => {
            let (g, q) = load(graph, curve)?;
            let stable = q.validate(&g).is_ok();
            let degree: i64 = g
                .vertex_ids()
                .map(|v| g.valence(v) as i64 - 2 + 2 * q.weight(v) as i64)
                .sum();
            Ok(render(
                cli.format,
                &[
                    ("vertices", Value::Int(g.vertex_count() as i64)),
                    ("edges", Value::Int(g.edge_count() as i64)),
                    ("genus", Value::Int(g.genus() as i64)),
                    (
                        "polarized_genus",
                        Value::Int(g.genus() as i64 + q.total() as i64),
                    ),
                    ("canonical_degree", Value::Int(degree)),
                    ("total_length", Value::Num(g.total_length())),
                    ("stable", Value::Bool(stable)),
                ],
            ))
        }
        Command::Phi { graph, curve } => {
            let (g, q) = load(graph, curve)?;
            let phi = phi_invariant(&g, &q)?;
            Ok(render(cli.format, &[("phi", Value::Num(phi))]))
        }
        Command::Epsilon { graph, curve } => {
            let (g, q) = load(graph, curve)?;
            let eps = epsilon_invariant(&g, &q)?;
            Ok(render(cli.format, &[("epsilon", Value::Num(eps))]))
        }
        Command::Resistance { graph, from, to } => {
            let (g, _) = load(&Some(graph.clone()), &None)?;
            let x = parse_point(&g, from)?;
            let y = parse_point(&g, to)?;
            let r = electric::resistance(&g, x, y)?;
            Ok(render(cli.format, &[("resistance", Value::Num(r))]))
        }
        Command::Green {
            graph,
            x,
            y,
            measure,
        } => {
            let (g, q) = load(&Some(graph.clone()), &None)?;
            let mu = match measure {
                MeasureKind::Admissible => admissible_measure(&g, &q)?,
                MeasureKind::Canonical => canonical_measure(&g)?,
            };
            let ev = GreenEvaluator::new(&g, &mu)?;
            let px = parse_point(&g, x)?;
            let py = parse_point(&g, y)?;
            let value = ev.green(px, py)?;
            Ok(render(
                cli.format,
                &[
                    ("green", Value::Num(value)),
                    ("c_mu", Value::Num(ev.c_mu())),
                ],
            ))
        }
        Command::Contract {
            graph,
            lengths,
            zero,
            emit,
        } => {
            let (g, q) = load(&Some(graph.clone()), &None)?;
            let assignment = build_assignment(&g, lengths.as_deref(), zero.as_deref())?;
            let result = contract(&g, &q, &assignment)?;
            if *emit {
                return Ok(io::emit_graph(&result.graph, &result.polarization));
            }
            let map = g
                .vertex_ids()
                .map(|v| {
                    format!(
                        "{}->{}",
                        g.vertex_label(v),
                        result.graph.vertex_label(result.vertex_map[v.index()])
                    )
                })
                .collect::<Vec<_>>()
                .join(",");
            Ok(render(
                cli.format,
                &[
                    ("vertices", Value::Int(result.graph.vertex_count() as i64)),
                    ("edges", Value::Int(result.graph.edge_count() as i64)),
                    (
                        "polarized_genus",
                        Value::Int(polarized_genus(&result.graph, &result.polarization)? as i64),
                    ),
                    ("phi", Value::Num(phi_function(&g, &q, &assignment)?)),
                    ("vertex_map", Value::Str(map)),
                ],
            ))
        }
        Command::Probe {
            graph,
            shrink,
            steps,
            factor,
            quantity,
        } => {
            let (g, q) = load(&Some(graph.clone()), &None)?;
            if !(*factor > 0.0 && *factor < 1.0) {
                return Err(usage("--factor must lie in (0, 1)"));
            }
            if *steps == 0 {
                return Err(usage("--steps must be positive"));
            }
            let shrink_ids = parse_edge_list(&g, shrink)?;
            if shrink_ids.is_empty() {
                return Err(usage("--shrink needs at least one edge id"));
            }
            let template: Vec<f64> = g.edges().iter().map(|e| e.length()).collect();
            let mut limit = template.clone();
            for e in &shrink_ids {
                limit[e.index()] = 0.0;
            }
            let path: Vec<Vec<f64>> = (1..=*steps)
                .map(|i| {
                    let mut lengths = template.clone();
                    for e in &shrink_ids {
                        lengths[e.index()] *= factor.powi(i as i32);
                    }
                    lengths
                })
                .collect();
            let kind = match quantity {
                Quantity::Phi => ProbeQuantity::Phi,
                Quantity::Epsilon => ProbeQuantity::Epsilon,
            };
            let report = continuity_probe(&g, &q, &path, &limit, kind)?;
            Ok(render_probe(cli.format, &report, cli.tolerance))
        }
        Command::PhiAsymptotic { curve, u } => {
            let (g, q) = load(&None, &Some(curve.clone()))?;
            let moduli = parse_floats(u)?;
            let params: Vec<Complex<f64>> =
                moduli.into_iter().map(|m| Complex::new(m, 0.0)).collect();
            let leading = phi_asymptotic(&g, &q, &params)?;
            Ok(render(cli.format, &[("phi_leading", Value::Num(leading))]))
        }
        Command::SkeletalEval {
            expr,
            monomials,
            at,
            green_at,
        } => {
            let f = match (expr, monomials) {
                (Some(path), None) => {
                    let text = read_file(path)?;
                    let value: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| mgraph::Error::Parse(e.to_string()))?;
                    SkeletalFunction::<f64>::from_json(&value)?
                }
                (None, Some(rows_text)) => {
                    let rows = parse_monomials(rows_text)?;
                    SkeletalFunction::<f64>::from_monomials(&rows)?
                }
                _ => return Err(usage("provide exactly one of --expr or --monomials")),
            };
            let value = match (at, green_at) {
                (Some(m), None) => f.eval(&parse_floats(m)?)?,
                (None, Some(t)) => {
                    let params: Vec<Complex<f64>> = parse_floats(t)?
                        .into_iter()
                        .map(|x| Complex::new(x, 0.0))
                        .collect();
                    f.green_value(&params)?
                }
                _ => return Err(usage("provide exactly one of --at or --green-at")),
            };
            Ok(render(cli.format, &[("value", Value::Num(value))]))
        }
        Command::Oracle { graph, curve } => {
            let (g, q) = load(graph, curve)?;
            let k = cli.oracle_k.max(4);
            let coarse = discretization_oracle(&g, &q, k / 4)?;
            let mid = discretization_oracle(&g, &q, k / 2)?;
            let fine = discretization_oracle(&g, &q, k)?;
            let phi = phi_invariant(&g, &q)?;
            let eps = epsilon_invariant(&g, &q)?;
            let mu = admissible_measure(&g, &q)?;
            let c = green_constant(&g, &mu)?;
            Ok(render(
                cli.format,
                &[
                    ("phi", Value::Num(phi)),
                    ("epsilon", Value::Num(eps)),
                    ("c_mu", Value::Num(c)),
                    ("phi_oracle", Value::Num(fine.phi)),
                    ("epsilon_oracle", Value::Num(fine.epsilon)),
                    ("c_oracle", Value::Num(fine.c)),
                    (
                        "phi_richardson",
                        Value::Num(richardson(coarse.phi, mid.phi, fine.phi)),
                    ),
                    (
                        "epsilon_richardson",
                        Value::Num(richardson(coarse.epsilon, mid.epsilon, fine.epsilon)),
                    ),
                    (
                        "c_richardson",
                        Value::Num(richardson(coarse.c, mid.c, fine.c)),
                    ),
                ],
            ))
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {}", path.display(), e)))
}

fn load(
    graph: &Option<PathBuf>,
    curve: &Option<PathBuf>,
) -> Result<(Graph, Polarization), Failure> {
    match (graph, curve) {
        (Some(path), None) => {
            let text = read_file(path)?;
            Ok(io::parse_graph(&text)?)
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            let description = io::parse_curve(&text)?;
            Ok(dual_graph(&description)?)
        }
        _ => Err(usage("provide exactly one of --graph or --curve")),
    }
}

/// Point syntax: `v<ID>` or `e<ID>:<OFFSET>`.
fn parse_point(g: &Graph, text: &str) -> Result<GraphPoint<f64>, Failure> {
    if let Some(rest) = text.strip_prefix('v') {
        let v = g.vertex_by_label(rest)?;
        return Ok(GraphPoint::Vertex(v));
    }
    if let Some(rest) = text.strip_prefix('e') {
        let (id, offset) = rest
            .split_once(':')
            .ok_or_else(|| usage(format!("point {} needs e<ID>:<OFFSET>", text)))?;
        let e = g.edge_by_label(id)?;
        let offset: f64 = offset
            .parse()
            .map_err(|_| usage(format!("bad offset in point {}", text)))?;
        return Ok(g.point_on_edge(e, offset)?);
    }
    Err(usage(format!(
        "point {} must start with v (vertex) or e (edge)",
        text
    )))
}

fn parse_edge_list(g: &Graph, text: &str) -> Result<Vec<mgraph::EdgeId>, Failure> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|id| Ok(g.edge_by_label(id.trim())?))
        .collect()
}

fn parse_floats(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad number {}", s)))
        })
        .collect()
}

fn parse_monomials(text: &str) -> Result<Vec<Vec<u64>>, Failure> {
    text.split(';')
        .filter(|s| !s.is_empty())
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| usage(format!("bad exponent {}", x)))
                })
                .collect()
        })
        .collect()
}

fn build_assignment(
    g: &Graph,
    lengths: Option<&str>,
    zero: Option<&str>,
) -> Result<Vec<f64>, Failure> {
    let mut assignment: Vec<f64> = g.edges().iter().map(|e| e.length()).collect();
    if let Some(overrides) = lengths {
        for pair in overrides.split(',').filter(|s| !s.is_empty()) {
            let (id, value) = pair
                .split_once('=')
                .ok_or_else(|| usage(format!("--lengths entry {} needs id=value", pair)))?;
            let e = g.edge_by_label(id.trim())?;
            assignment[e.index()] = value
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad length {}", value)))?;
        }
    }
    if let Some(zeroed) = zero {
        for e in parse_edge_list(g, zeroed)? {
            assignment[e.index()] = 0.0;
        }
    }
    Ok(assignment)
}

enum Value {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

/// 12 significant digits.
fn sig(x: f64) -> String {
    format!("{:.11e}", x)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render(format: Format, fields: &[(&str, Value)]) -> String {
    match format {
        Format::Json => {
            let body = fields
                .iter()
                .map(|(k, v)| match v {
                    Value::Num(x) => format!("\"{}\": {}", k, sig(*x)),
                    Value::Int(i) => format!("\"{}\": {}", k, i),
                    Value::Str(s) => format!("\"{}\": \"{}\"", k, escape(s)),
                    Value::Bool(b) => format!("\"{}\": {}", k, b),
                })
                .collect::<Vec<_>>()
                .join(", ");
            format!("{{{}}}", body)
        }
        Format::Tsv => fields
            .iter()
            .map(|(k, v)| match v {
                Value::Num(x) => format!("{}\t{}", k, sig(*x)),
                Value::Int(i) => format!("{}\t{}", k, i),
                Value::Str(s) => format!("{}\t{}", k, s),
                Value::Bool(b) => format!("{}\t{}", k, b),
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn render_probe(format: Format, report: &ProbeReport<f64>, tolerance: f64) -> String {
    let passed = report.final_deviation < tolerance;
    match format {
        Format::Tsv => {
            let mut out = report.to_tsv();
            out.push_str(&format!("limit_value\t{}\n", sig(report.limit_value)));
            out.push_str(&format!("tail_deviation\t{}\n", sig(report.tail_deviation)));
            out.push_str(&format!(
                "final_deviation\t{}\n",
                sig(report.final_deviation)
            ));
            out.push_str(&format!("within_tolerance\t{}", passed));
            out
        }
        Format::Json => {
            let rows = report
                .rows
                .iter()
                .map(|row| {
                    let lengths = row
                        .lengths
                        .iter()
                        .map(|l| sig(*l))
                        .collect::<Vec<_>>()
                        .join(", ");
                    format!(
                        "{{\"index\": {}, \"lengths\": [{}], \"value\": {}, \"deviation\": {}}}",
                        row.index,
                        lengths,
                        sig(row.value),
                        sig(row.deviation)
                    )
                })
                .collect::<Vec<_>>()
                .join(", ");
            format!(
                "{{\"rows\": [{}], \"limit_value\": {}, \"tail_deviation\": {}, \"final_deviation\": {}, \"within_tolerance\": {}}}",
                rows,
                sig(report.limit_value),
                sig(report.tail_deviation),
                sig(report.final_deviation),
                passed
            )
        }
    }
}
