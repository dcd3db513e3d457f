//! Text file formats for graphs and stable-curve descriptions.
//!
//! Graph files carry the polarization on the vertices:
//! `{"vertices":[{"id":"0","q":1}],"edges":[{"id":"0","s":"0","t":"1","length":1.0}]}`.
//! Curve files list components and nodes:
//! `{"components":[{"id":"A","genus":1}],"nodes":[{"a":"A","b":"A","length":2.0}]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    CurveComponent, CurveNode, GraphBuilder, MetrizedGraph, Polarization, StableCurveDescription,
};
use crate::scalar::Scalar;

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexEntry>,
    edges: Vec<EdgeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    q: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeEntry {
    id: String,
    s: String,
    t: String,
    length: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveFile {
    components: Vec<ComponentEntry>,
    nodes: Vec<NodeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ComponentEntry {
    id: String,
    genus: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeEntry {
    a: String,
    b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
}

fn build_graph<R: Scalar>(file: GraphFile) -> Result<(MetrizedGraph<R>, Polarization)> {
    let mut builder = GraphBuilder::<R>::new();
    let mut ids = Vec::with_capacity(file.vertices.len());
    for v in &file.vertices {
        if ids.iter().any(|(id, _)| id == &v.id) {
            return Err(Error::Parse(format!("duplicate vertex id {}", v.id)));
        }
        ids.push((v.id.clone(), builder.labeled_vertex(v.id.clone())));
    }
    let find = |id: &str| {
        ids.iter()
            .find(|(label, _)| label == id)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    };
    let mut edge_ids: Vec<&str> = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        if edge_ids.contains(&e.id.as_str()) {
            return Err(Error::Parse(format!("duplicate edge id {}", e.id)));
        }
        edge_ids.push(&e.id);
        let s = find(&e.s)?;
        let t = find(&e.t)?;
        builder.labeled_edge(e.id.clone(), s, t, R::of(e.length));
    }
    let graph = builder.build()?;
    let q = Polarization::new(file.vertices.iter().map(|v| v.q).collect());
    Ok((graph, q))
}

/// Parses a graph file with its polarization.
pub fn parse_graph<R: Scalar>(text: &str) -> Result<(MetrizedGraph<R>, Polarization)> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    build_graph(file)
}

/// Parses a graph file from an already-decoded JSON value.
pub fn graph_from_value<R: Scalar>(
    value: &serde_json::Value,
) -> Result<(MetrizedGraph<R>, Polarization)> {
    let file: GraphFile =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    build_graph(file)
}

fn graph_file<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization) -> GraphFile {
    GraphFile {
        vertices: g
            .vertex_ids()
            .map(|v| VertexEntry {
                id: g.vertex_label(v).to_string(),
                q: q.weight(v),
            })
            .collect(),
        edges: g
            .edge_ids()
            .map(|e| {
                let edge = g.edge_data(e);
                EdgeEntry {
                    id: edge.label().to_string(),
                    s: g.vertex_label(edge.source()).to_string(),
                    t: g.vertex_label(edge.target()).to_string(),
                    length: edge.length().to_f64().expect("finite length"),
                }
            })
            .collect(),
    }
}

/// Serializes a polarized graph in the graph file format.
pub fn emit_graph<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization) -> String {
    serde_json::to_string_pretty(&graph_file(g, q)).expect("graph file serializes")
}

/// The graph file as a JSON value, for embedding into other documents.
pub fn graph_to_value<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization) -> serde_json::Value {
    serde_json::to_value(graph_file(g, q)).expect("graph file serializes")
}

/// Parses a stable-curve description file.
pub fn parse_curve<R: Scalar>(text: &str) -> Result<StableCurveDescription<R>> {
    let file: CurveFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut seen: Vec<&str> = Vec::new();
    for c in &file.components {
        if seen.contains(&c.id.as_str()) {
            return Err(Error::Parse(format!("duplicate component id {}", c.id)));
        }
        seen.push(&c.id);
    }
    Ok(StableCurveDescription {
        components: file
            .components
            .into_iter()
            .map(|c| CurveComponent {
                id: c.id,
                genus: c.genus,
            })
            .collect(),
        nodes: file
            .nodes
            .into_iter()
            .map(|n| CurveNode {
                a: n.a,
                b: n.b,
                length: n.length.map(R::of),
            })
            .collect(),
    })
}
