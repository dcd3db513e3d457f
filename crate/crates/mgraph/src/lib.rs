//! Electrical-network analysis on polarized metrized graphs.
//!
//! A metrized graph is a finite connected multigraph whose edges carry
//! positive lengths, viewed as a compact length space. This crate computes
//! the classical electrical quantities on such graphs (voltage and
//! resistance functions, canonical and admissible measures, Green
//! functions) together with the phi- and epsilon-invariants, supports
//! degeneration by edge contraction with polarization transfer, and
//! provides a calculus of skeletal functions (min-plus combinations of
//! linear forms) used to estimate phi-invariants near the boundary of
//! moduli.
//!
//! All metric computations are generic over the scalar type through the
//! [`Scalar`] trait (`f32` or `f64`); concrete aliases for the common
//! `f64` instantiation are exported at the crate root. The skeletal
//! calculus carries exact rational coefficients.

pub mod degeneration;
pub mod electric;
mod error;
pub mod graph;
pub mod invariants;
pub mod io;
mod linalg;
pub mod measures;
mod scalar;
pub mod simplex;
pub mod skeletal;
#[cfg(test)]
pub(crate) mod testgraphs;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use graph::{
    Divisor, Edge, EdgeId, GraphBuilder, GraphPoint, MetrizedGraph, Polarization,
    StableCurveDescription, VertexId,
};

/// Metrized graph over `f64`, the default instantiation.
pub type Graph64 = MetrizedGraph<f64>;
/// Metrized graph over `f32`.
pub type Graph32 = MetrizedGraph<f32>;
/// Measure over `f64`.
pub type Measure64 = measures::Measure<f64>;
/// Piecewise polynomial edge function over `f64`.
pub type EdgePoly64 = invariants::EdgePiecewisePoly<f64>;
/// Skeletal function over `f64`.
pub type Skeletal64 = skeletal::SkeletalFunction<f64>;
