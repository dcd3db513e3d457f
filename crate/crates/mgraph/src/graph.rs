//! Data model for (polarized) metrized graphs.
//!
//! A [`MetrizedGraph`] is a finite connected multigraph with a positive
//! length on every edge. Loops and parallel edges are allowed; loops count
//! twice toward valence. Every edge carries a fixed orientation given by
//! its stored `(source, target)` pair, and all signed quantities refer to
//! it. Graphs are immutable after construction: structural operations
//! (subdivision, contraction, refinement) return new graphs together with
//! relabeling maps.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index-based vertex handle, valid for the graph that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub(crate) usize);

/// Index-based edge handle, valid for the graph that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub(crate) usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// An edge with its fixed orientation and arc length.
#[derive(Debug, Clone)]
pub struct Edge<R> {
    pub(crate) source: VertexId,
    pub(crate) target: VertexId,
    pub(crate) length: R,
    pub(crate) label: String,
}

impl<R: Scalar> Edge<R> {
    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn length(&self) -> R {
        self.length
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A finite connected multigraph with positive edge lengths.
#[derive(Debug, Clone)]
pub struct MetrizedGraph<R> {
    vertex_labels: Vec<String>,
    edges: Vec<Edge<R>>,
}

/// Incremental constructor for [`MetrizedGraph`]; `build` validates the
/// connectivity and length invariants.
#[derive(Debug, Default)]
pub struct GraphBuilder<R> {
    vertex_labels: Vec<String>,
    edges: Vec<Edge<R>>,
}

impl<R: Scalar> GraphBuilder<R> {
    pub fn new() -> Self {
        GraphBuilder {
            vertex_labels: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Adds a vertex with an auto-generated label (its index).
    pub fn vertex(&mut self) -> VertexId {
        let label = self.vertex_labels.len().to_string();
        self.labeled_vertex(label)
    }

    pub fn labeled_vertex(&mut self, label: impl Into<String>) -> VertexId {
        let id = VertexId(self.vertex_labels.len());
        self.vertex_labels.push(label.into());
        id
    }

    /// Adds an oriented edge with an auto-generated label (its index).
    pub fn edge(&mut self, source: VertexId, target: VertexId, length: R) -> EdgeId {
        let label = self.edges.len().to_string();
        self.labeled_edge(label, source, target, length)
    }

    pub fn labeled_edge(
        &mut self,
        label: impl Into<String>,
        source: VertexId,
        target: VertexId,
        length: R,
    ) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge {
            source,
            target,
            length,
            label: label.into(),
        });
        id
    }

    pub fn build(self) -> Result<MetrizedGraph<R>> {
        let g = MetrizedGraph {
            vertex_labels: self.vertex_labels,
            edges: self.edges,
        };
        g.validate()?;
        Ok(g)
    }
}

impl<R: Scalar> MetrizedGraph<R> {
    pub fn builder() -> GraphBuilder<R> {
        GraphBuilder::new()
    }

    pub(crate) fn from_parts(vertex_labels: Vec<String>, edges: Vec<Edge<R>>) -> Self {
        MetrizedGraph {
            vertex_labels,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count()).map(EdgeId)
    }

    /// Vertex handle by index, checked.
    pub fn vertex(&self, index: usize) -> Result<VertexId> {
        if index < self.vertex_count() {
            Ok(VertexId(index))
        } else {
            Err(Error::UnknownVertex(index.to_string()))
        }
    }

    /// Edge handle by index, checked.
    pub fn edge(&self, index: usize) -> Result<EdgeId> {
        if index < self.edge_count() {
            Ok(EdgeId(index))
        } else {
            Err(Error::UnknownEdge(index.to_string()))
        }
    }

    pub fn edge_data(&self, e: EdgeId) -> &Edge<R> {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge<R>] {
        &self.edges
    }

    pub fn vertex_label(&self, v: VertexId) -> &str {
        &self.vertex_labels[v.0]
    }

    pub fn vertex_by_label(&self, label: &str) -> Result<VertexId> {
        self.vertex_labels
            .iter()
            .position(|l| l == label)
            .map(VertexId)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn edge_by_label(&self, label: &str) -> Result<EdgeId> {
        self.edges
            .iter()
            .position(|e| e.label == label)
            .map(EdgeId)
            .ok_or_else(|| Error::UnknownEdge(label.to_string()))
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.0.to_string()))
        }
    }

    pub(crate) fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e.0 < self.edge_count() {
            Ok(())
        } else {
            Err(Error::UnknownEdge(e.0.to_string()))
        }
    }

    /// Checks all structural invariants: nonempty vertex set, strictly
    /// positive lengths, connectivity.
    pub fn validate(&self) -> Result<()> {
        if self.vertex_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        for e in &self.edges {
            if !e.length.is_finite() || e.length <= R::zero() {
                return Err(Error::NonpositiveLength(e.label.clone()));
            }
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub(crate) fn is_connected(&self) -> bool {
        let mut dsu = UnionFind::new(self.vertex_count());
        for e in &self.edges {
            dsu.union(e.source.0, e.target.0);
        }
        let root = dsu.find(0);
        (0..self.vertex_count()).all(|v| dsu.find(v) == root)
    }

    /// Number of directions emanating from `v`; loops count twice.
    pub fn valence(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| (e.source == v) as usize + (e.target == v) as usize)
            .sum()
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn genus(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Sum of all edge lengths.
    pub fn total_length(&self) -> R {
        self.edges.iter().fold(R::zero(), |acc, e| acc + e.length)
    }

    /// Returns a copy with every edge length multiplied by `factor`.
    pub fn scaled(&self, factor: R) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.source,
                target: e.target,
                length: e.length * factor,
                label: e.label.clone(),
            })
            .collect();
        MetrizedGraph {
            vertex_labels: self.vertex_labels.clone(),
            edges,
        }
    }

    /// Validates a point against this graph and normalizes boundary
    /// offsets to the corresponding vertex.
    pub fn normalize_point(&self, p: GraphPoint<R>) -> Result<GraphPoint<R>> {
        match p {
            GraphPoint::Vertex(v) => {
                self.check_vertex(v)?;
                Ok(p)
            }
            GraphPoint::Interior(e, offset) => self.point_on_edge(e, offset),
        }
    }

    /// Point on edge `e` at `offset` from the source; offsets within the
    /// comparison tolerance of `0` or the length snap to the endpoints.
    pub fn point_on_edge(&self, e: EdgeId, offset: R) -> Result<GraphPoint<R>> {
        self.check_edge(e)?;
        let edge = &self.edges[e.0];
        let snap = R::comparison_tol() * edge.length;
        if offset.abs() <= snap {
            return Ok(GraphPoint::Vertex(edge.source));
        }
        if (edge.length - offset).abs() <= snap {
            return Ok(GraphPoint::Vertex(edge.target));
        }
        if offset < R::zero() || offset > edge.length {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside edge {} of length {}",
                offset, edge.label, edge.length
            )));
        }
        Ok(GraphPoint::Interior(e, offset))
    }

    /// Splits the graph at `p`. Interior points become a fresh vertex; the
    /// split edge keeps its id for the head segment and a new edge is
    /// appended for the tail. Vertex points leave the graph unchanged.
    ///
    /// Returns the new graph, the vertex realizing `p`, and the point
    /// relabeling map under which every analytical function is unchanged.
    pub fn subdivide(&self, p: GraphPoint<R>) -> Result<(Self, VertexId, PointMap<R>)> {
        match self.normalize_point(p)? {
            GraphPoint::Vertex(v) => Ok((self.clone(), v, PointMap::Identity)),
            GraphPoint::Interior(e, offset) => {
                let mut g = self.clone();
                let edge = g.edges[e.0].clone();
                let new_vertex = VertexId(g.vertex_labels.len());
                g.vertex_labels
                    .push(format!("{}@{}", edge.label, new_vertex.0));
                let tail_edge = EdgeId(g.edges.len());
                g.edges.push(Edge {
                    source: new_vertex,
                    target: edge.target,
                    length: edge.length - offset,
                    label: format!("{}@{}", edge.label, tail_edge.0),
                });
                g.edges[e.0].target = new_vertex;
                g.edges[e.0].length = offset;
                let map = PointMap::Split {
                    edge: e,
                    offset,
                    new_vertex,
                    tail_edge,
                };
                Ok((g, new_vertex, map))
            }
        }
    }

    /// Subdivides at every listed point in order, composing the relabeling
    /// maps. Points refer to `self`; the returned vertices realize them in
    /// the refined graph, and the composed map relocates further points.
    pub fn subdivide_all(
        &self,
        points: &[GraphPoint<R>],
    ) -> Result<(Self, Vec<VertexId>, Refinement<R>)> {
        let mut g = self.clone();
        let mut refinement = Refinement { steps: Vec::new() };
        let mut vertices = Vec::with_capacity(points.len());
        for &p in points {
            let p = self.normalize_point(p)?;
            let mapped = refinement.map_point(p);
            let (next, v, step) = g.subdivide(mapped)?;
            g = next;
            vertices.push(v);
            refinement.steps.push(step);
        }
        Ok((g, vertices, refinement))
    }
}

/// A point of a metrized graph: a vertex or an interior position on an
/// edge, measured from the edge source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphPoint<R> {
    Vertex(VertexId),
    Interior(EdgeId, R),
}

impl<R: Scalar> GraphPoint<R> {
    pub fn vertex(v: VertexId) -> Self {
        GraphPoint::Vertex(v)
    }
}

/// Relabeling map produced by a single subdivision.
#[derive(Debug, Clone)]
pub enum PointMap<R> {
    Identity,
    Split {
        edge: EdgeId,
        offset: R,
        new_vertex: VertexId,
        tail_edge: EdgeId,
    },
}

impl<R: Scalar> PointMap<R> {
    /// Relocates a point of the pre-subdivision graph.
    pub fn map_point(&self, p: GraphPoint<R>) -> GraphPoint<R> {
        match (self, p) {
            (PointMap::Identity, p) => p,
            (PointMap::Split { .. }, GraphPoint::Vertex(v)) => GraphPoint::Vertex(v),
            (
                PointMap::Split {
                    edge,
                    offset,
                    new_vertex,
                    tail_edge,
                },
                GraphPoint::Interior(e, t),
            ) => {
                if e != *edge {
                    return GraphPoint::Interior(e, t);
                }
                if t < *offset {
                    GraphPoint::Interior(e, t)
                } else if t > *offset {
                    GraphPoint::Interior(*tail_edge, t - *offset)
                } else {
                    GraphPoint::Vertex(*new_vertex)
                }
            }
        }
    }
}

/// Composition of subdivision maps.
#[derive(Debug, Clone)]
pub struct Refinement<R> {
    steps: Vec<PointMap<R>>,
}

impl<R: Scalar> Refinement<R> {
    pub fn map_point(&self, p: GraphPoint<R>) -> GraphPoint<R> {
        self.steps.iter().fold(p, |q, step| step.map_point(q))
    }
}

/// Nonnegative integer vertex weights; models geometric genera of the
/// components of a stable curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarization {
    weights: Vec<u32>,
}

impl Polarization {
    pub fn new(weights: Vec<u32>) -> Self {
        Polarization { weights }
    }

    /// The zero polarization on `n` vertices.
    pub fn zero(n: usize) -> Self {
        Polarization {
            weights: vec![0; n],
        }
    }

    pub fn weight(&self, v: VertexId) -> u32 {
        self.weights[v.0]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn total(&self) -> u32 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Checks the stability constraint `v(p) - 2 + 2 q(p) >= 0` at every
    /// vertex of `g`.
    pub fn validate<R: Scalar>(&self, g: &MetrizedGraph<R>) -> Result<()> {
        if self.weights.len() != g.vertex_count() {
            return Err(Error::DomainMismatch(format!(
                "polarization on {} vertices, graph has {}",
                self.weights.len(),
                g.vertex_count()
            )));
        }
        for v in g.vertex_ids() {
            let val = g.valence(v) as i64 - 2 + 2 * self.weight(v) as i64;
            if val < 0 {
                return Err(Error::UnstablePolarization(g.vertex_label(v).to_string()));
            }
        }
        Ok(())
    }
}

/// A finitely supported rational divisor on the graph.
#[derive(Debug, Clone)]
pub struct Divisor<R> {
    support: Vec<(GraphPoint<R>, Rational64)>,
}

impl<R: Scalar> Divisor<R> {
    pub fn new(support: Vec<(GraphPoint<R>, Rational64)>) -> Self {
        Divisor { support }
    }

    pub fn support(&self) -> &[(GraphPoint<R>, Rational64)] {
        &self.support
    }

    pub fn degree(&self) -> Rational64 {
        self.support
            .iter()
            .map(|(_, c)| *c)
            .fold(Rational64::from_integer(0), |a, b| a + b)
    }

    pub fn coefficient(&self, p: &GraphPoint<R>) -> Rational64 {
        self.support
            .iter()
            .filter(|(q, _)| q == p)
            .map(|(_, c)| *c)
            .fold(Rational64::from_integer(0), |a, b| a + b)
    }
}

/// Canonical divisor of `(g, q)`: coefficient `v(p) - 2 + 2 q(p)` at every
/// vertex. Its degree is `2 g(g, q) - 2`.
pub fn canonical_divisor<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization) -> Result<Divisor<R>> {
    q.validate(g)?;
    let support = g
        .vertex_ids()
        .map(|v| {
            let c = g.valence(v) as i64 - 2 + 2 * q.weight(v) as i64;
            (GraphPoint::Vertex(v), Rational64::from_integer(c))
        })
        .filter(|(_, c)| *c != Rational64::from_integer(0))
        .collect();
    Ok(Divisor { support })
}

/// Polarized genus `g(Γ) + Σ q(p)`.
pub fn polarized_genus<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization) -> Result<usize> {
    q.validate(g)?;
    Ok(g.genus() + q.total() as usize)
}

/// A cycle as a closed walk of signed edges; the sign records whether the
/// walk traverses the edge along its stored orientation.
pub type SignedCycle = Vec<(EdgeId, i8)>;

/// A basis of the cycle space: exactly `genus(g)` fundamental cycles of a
/// spanning tree, with linearly independent incidence vectors.
pub fn cycle_basis<R: Scalar>(g: &MetrizedGraph<R>) -> Vec<SignedCycle> {
    let n = g.vertex_count();
    // BFS spanning tree: parent edge and orientation toward the root.
    let mut parent: Vec<Option<(EdgeId, VertexId)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut in_tree = vec![false; g.edge_count()];
    let mut queue = std::collections::VecDeque::new();
    visited[0] = true;
    queue.push_back(VertexId(0));
    while let Some(v) = queue.pop_front() {
        for e in g.edge_ids() {
            let edge = g.edge_data(e);
            let next = if edge.source == v && !visited[edge.target.0] {
                Some(edge.target)
            } else if edge.target == v && !visited[edge.source.0] {
                Some(edge.source)
            } else {
                None
            };
            if let Some(w) = next {
                visited[w.0] = true;
                in_tree[e.0] = true;
                parent[w.0] = Some((e, v));
                depth[w.0] = depth[v.0] + 1;
                queue.push_back(w);
            }
        }
    }

    let mut cycles = Vec::new();
    for e in g.edge_ids() {
        if in_tree[e.0] {
            continue;
        }
        let edge = g.edge_data(e);
        let mut cycle: SignedCycle = vec![(e, 1)];
        if edge.is_loop() {
            cycles.push(cycle);
            continue;
        }
        // Tree path from target back to source, closing the walk.
        let (mut a, mut b) = (edge.target, edge.source);
        let mut from_target: Vec<(EdgeId, i8)> = Vec::new();
        let mut from_source: Vec<(EdgeId, i8)> = Vec::new();
        while depth[a.0] > depth[b.0] {
            let (pe, pv) = parent[a.0].expect("tree parent");
            from_target.push((pe, walk_sign(g, pe, a, pv)));
            a = pv;
        }
        while depth[b.0] > depth[a.0] {
            let (pe, pv) = parent[b.0].expect("tree parent");
            from_source.push((pe, walk_sign(g, pe, b, pv)));
            b = pv;
        }
        while a != b {
            let (pe, pv) = parent[a.0].expect("tree parent");
            from_target.push((pe, walk_sign(g, pe, a, pv)));
            a = pv;
            let (qe, qv) = parent[b.0].expect("tree parent");
            from_source.push((qe, walk_sign(g, qe, b, qv)));
            b = qv;
        }
        cycle.extend(from_target);
        cycle.extend(from_source.into_iter().rev().map(|(e, s)| (e, -s)));
        cycles.push(cycle);
    }
    cycles
}

// Sign of traversing edge `e` from `from` to `to` relative to its stored
// orientation.
fn walk_sign<R: Scalar>(g: &MetrizedGraph<R>, e: EdgeId, from: VertexId, to: VertexId) -> i8 {
    let edge = g.edge_data(e);
    if edge.source == from && edge.target == to {
        1
    } else {
        debug_assert!(edge.source == to && edge.target == from);
        -1
    }
}

/// Combinatorial description of a stable curve: components with geometric
/// genera, and nodes joining pairs of components (self-pairs allowed).
#[derive(Debug, Clone)]
pub struct StableCurveDescription<R> {
    pub components: Vec<CurveComponent>,
    pub nodes: Vec<CurveNode<R>>,
}

#[derive(Debug, Clone)]
pub struct CurveComponent {
    pub id: String,
    pub genus: u32,
}

#[derive(Debug, Clone)]
pub struct CurveNode<R> {
    pub a: String,
    pub b: String,
    pub length: Option<R>,
}

/// Dual graph of a stable curve: one vertex per component polarized by its
/// geometric genus, one edge per node (a loop for a self-node), lengths
/// from the description or `1`.
pub fn dual_graph<R: Scalar>(
    c: &StableCurveDescription<R>,
) -> Result<(MetrizedGraph<R>, Polarization)> {
    let mut builder = MetrizedGraph::<R>::builder();
    let mut ids = Vec::new();
    for comp in &c.components {
        ids.push((comp.id.clone(), builder.labeled_vertex(comp.id.clone())));
    }
    let find = |id: &str| -> Result<VertexId> {
        ids.iter()
            .find(|(label, _)| label == id)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    };
    for (i, node) in c.nodes.iter().enumerate() {
        let a = find(&node.a)?;
        let b = find(&node.b)?;
        let length = node.length.unwrap_or_else(R::one);
        builder.labeled_edge(i.to_string(), a, b, length);
    }
    let graph = builder.build()?;
    let q = Polarization::new(c.components.iter().map(|comp| comp.genus).collect());
    Ok((graph, q))
}

/// Table produced by [`refine_uniform`]: for each original edge, the chain
/// of grid vertices from source to target and the sub-edges covering it.
#[derive(Debug, Clone)]
pub struct RefinementTable {
    pub grid: Vec<Vec<VertexId>>,
    pub sub_edges: Vec<Vec<EdgeId>>,
}

/// Subdivides every edge into `pieces` equal segments via repeated
/// [`MetrizedGraph::subdivide`]. Original vertex ids are preserved.
pub fn refine_uniform<R: Scalar>(
    g: &MetrizedGraph<R>,
    pieces: usize,
) -> Result<(MetrizedGraph<R>, RefinementTable)> {
    assert!(pieces >= 1, "refinement needs at least one piece");
    let mut current = g.clone();
    let mut grid = Vec::with_capacity(g.edge_count());
    let mut sub_edges = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let edge = g.edge_data(e).clone();
        let mut chain_v = vec![edge.source];
        let mut chain_e = vec![e];
        let mut tail = e;
        let piece = edge.length / R::of_usize(pieces);
        for _ in 1..pieces {
            let p = GraphPoint::Interior(tail, piece);
            let (next, v, map) = current.subdivide(p)?;
            current = next;
            chain_v.push(v);
            tail = match map {
                PointMap::Split { tail_edge, .. } => tail_edge,
                PointMap::Identity => unreachable!("interior point always splits"),
            };
            chain_e.push(tail);
        }
        chain_v.push(edge.target);
        grid.push(chain_v);
        sub_edges.push(chain_e);
    }
    Ok((current, RefinementTable { grid, sub_edges }))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root so class representatives are the
            // first-seen vertices.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
