//! Degeneration of polarized metrized graphs: edge contraction with
//! polarization transfer, the phi-function on nonnegative length
//! assignments, and continuity probes.
//!
//! A length assignment sends each edge of a template graph to a
//! nonnegative real. Zero-length edges are contracted: every connected
//! component of the zero set collapses to one vertex, which receives the
//! sum of the collapsed polarization weights plus the first Betti number
//! of the collapsed subgraph. The polarized genus is preserved, and the
//! phi-invariant extends continuously to the boundary of the length cone.

use crate::error::{Error, Result};
use crate::graph::{
    polarized_genus, Edge, EdgeId, MetrizedGraph, Polarization, UnionFind, VertexId,
};
use crate::invariants::{epsilon_invariant, phi_invariant};
use crate::scalar::Scalar;

/// Result of contracting the zero-length edges of an assignment.
#[derive(Debug, Clone)]
pub struct ContractionResult<R> {
    pub graph: MetrizedGraph<R>,
    pub polarization: Polarization,
    /// Old vertex to quotient vertex.
    pub vertex_map: Vec<VertexId>,
    /// Old edge to surviving quotient edge; `None` for contracted edges.
    pub edge_map: Vec<Option<EdgeId>>,
}

fn check_assignment<R: Scalar>(g: &MetrizedGraph<R>, lengths: &[R]) -> Result<()> {
    if lengths.len() != g.edge_count() {
        return Err(Error::AssignmentMismatch(format!(
            "{} lengths for {} edges",
            lengths.len(),
            g.edge_count()
        )));
    }
    for e in g.edge_ids() {
        if lengths[e.index()] < R::zero() {
            return Err(Error::NegativeLength(g.edge_data(e).label().to_string()));
        }
    }
    Ok(())
}

fn is_zero<R: Scalar>(x: R, scale: R) -> bool {
    x.abs() <= R::comparison_tol() * scale.max(R::one())
}

/// Contracts the zero-length edges of `lengths` and transfers the
/// polarization by `q'(p') = Σ q + g(preimage)`. Surviving edges keep
/// their assigned positive lengths. The polarized genus is preserved.
pub fn contract<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
    lengths: &[R],
) -> Result<ContractionResult<R>> {
    g.validate()?;
    q.validate(g)?;
    check_assignment(g, lengths)?;
    let scale = lengths.iter().fold(R::zero(), |m, &x| m.max(x));
    let zero = |e: EdgeId| is_zero(lengths[e.index()], scale);
    if g.edge_count() > 0 && g.edge_ids().all(zero) {
        return Err(Error::TotalCollapse);
    }

    let mut dsu = UnionFind::new(g.vertex_count());
    for e in g.edge_ids() {
        if zero(e) {
            let edge = g.edge_data(e);
            dsu.union(edge.source().index(), edge.target().index());
        }
    }

    // Quotient vertices in order of first appearance of their class.
    let mut class_of = vec![usize::MAX; g.vertex_count()];
    let mut labels = Vec::new();
    let mut class_sizes = Vec::new();
    let mut vertex_map = Vec::with_capacity(g.vertex_count());
    for v in g.vertex_ids() {
        let root = dsu.find(v.index());
        if class_of[root] == usize::MAX {
            class_of[root] = labels.len();
            labels.push(g.vertex_label(v).to_string());
            class_sizes.push(0usize);
        }
        let class = class_of[root];
        class_sizes[class] += 1;
        vertex_map.push(VertexId(class));
    }

    // Transferred polarization: weight sum plus the genus of the
    // collapsed preimage component, |E0 ∩ class| - (|class| - 1).
    let mut weights: Vec<i64> = vec![0; labels.len()];
    for v in g.vertex_ids() {
        weights[vertex_map[v.index()].index()] += q.weight(v) as i64;
    }
    for (class, size) in class_sizes.iter().enumerate() {
        weights[class] -= *size as i64 - 1;
    }
    let mut edges = Vec::new();
    let mut edge_map = vec![None; g.edge_count()];
    for e in g.edge_ids() {
        let edge = g.edge_data(e);
        if zero(e) {
            weights[vertex_map[edge.source().index()].index()] += 1;
            continue;
        }
        edge_map[e.index()] = Some(EdgeId(edges.len()));
        edges.push(Edge {
            source: vertex_map[edge.source().index()],
            target: vertex_map[edge.target().index()],
            length: lengths[e.index()],
            label: edge.label().to_string(),
        });
    }
    let graph = MetrizedGraph::from_parts(labels, edges);
    graph.validate()?;
    let polarization = Polarization::new(
        weights
            .into_iter()
            .map(|w| u32::try_from(w).expect("transferred weights are nonnegative"))
            .collect(),
    );
    polarization.validate(&graph)?;
    Ok(ContractionResult {
        graph,
        polarization,
        vertex_map,
        edge_map,
    })
}

/// The phi-function on the closed length cone: contracts zero-length
/// edges and evaluates the phi-invariant of the quotient. The all-zeros
/// corner collapses the graph to a polarized point, whose phi-invariant
/// vanishes (no edges, identically zero Green function).
pub fn phi_function<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization, lengths: &[R]) -> Result<R> {
    evaluate_on_quotient(g, q, lengths, phi_invariant)
}

/// The epsilon-invariant along the same degeneration. Probe option; it
/// carries no fixed acceptance threshold.
pub fn epsilon_function<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
    lengths: &[R],
) -> Result<R> {
    evaluate_on_quotient(g, q, lengths, epsilon_invariant)
}

fn evaluate_on_quotient<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
    lengths: &[R],
    invariant: fn(&MetrizedGraph<R>, &Polarization) -> Result<R>,
) -> Result<R> {
    g.validate()?;
    q.validate(g)?;
    check_assignment(g, lengths)?;
    let scale = lengths.iter().fold(R::zero(), |m, &x| m.max(x));
    if g.edge_count() == 0 || g.edge_ids().all(|e| is_zero(lengths[e.index()], scale)) {
        let genus = polarized_genus(g, q)?;
        let mut b = MetrizedGraph::<R>::builder();
        b.labeled_vertex(g.vertex_label(VertexId(0)));
        let point = b.build()?;
        return invariant(&point, &Polarization::new(vec![genus as u32]));
    }
    let contraction = contract(g, q, lengths)?;
    invariant(&contraction.graph, &contraction.polarization)
}

/// Which invariant a continuity probe tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeQuantity {
    Phi,
    Epsilon,
}

/// One evaluated path point of a continuity probe.
#[derive(Debug, Clone)]
pub struct ProbeRow<R> {
    pub index: usize,
    pub lengths: Vec<R>,
    pub value: R,
    pub deviation: R,
}

/// Report of a continuity probe along a path of length assignments.
#[derive(Debug, Clone)]
pub struct ProbeReport<R> {
    pub rows: Vec<ProbeRow<R>>,
    pub limit_value: R,
    /// Maximum deviation over the last quarter of the path.
    pub tail_deviation: R,
    pub final_deviation: R,
}

impl<R: Scalar> ProbeReport<R> {
    /// Tabular serialization: one row per path point with index, lengths,
    /// value and deviation, tab-separated.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("index\tlengths\tvalue\tdeviation\n");
        for row in &self.rows {
            let lengths = row
                .lengths
                .iter()
                .map(|l| format!("{:.11e}", l))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!(
                "{}\t{}\t{:.11e}\t{:.11e}\n",
                row.index, lengths, row.value, row.deviation
            ));
        }
        out
    }
}

/// Evaluates the chosen invariant along `path` and at the declared limit
/// assignment, reporting the deviation of every path value from the limit
/// value.
pub fn continuity_probe<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
    path: &[Vec<R>],
    limit: &[R],
    quantity: ProbeQuantity,
) -> Result<ProbeReport<R>> {
    let eval = match quantity {
        ProbeQuantity::Phi => phi_function::<R>,
        ProbeQuantity::Epsilon => epsilon_function::<R>,
    };
    let limit_value = eval(g, q, limit)?;
    let mut rows = Vec::with_capacity(path.len());
    for (index, lengths) in path.iter().enumerate() {
        let value = eval(g, q, lengths)?;
        rows.push(ProbeRow {
            index,
            lengths: lengths.clone(),
            value,
            deviation: (value - limit_value).abs(),
        });
    }
    let tail_start = rows.len().saturating_sub(rows.len().div_ceil(4));
    let tail_deviation = rows[tail_start..]
        .iter()
        .fold(R::zero(), |m, r| m.max(r.deviation));
    let final_deviation = rows.last().map(|r| r.deviation).unwrap_or_else(R::zero);
    Ok(ProbeReport {
        rows,
        limit_value,
        tail_deviation,
        final_deviation,
    })
}
