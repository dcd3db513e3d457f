//! Skeletal functions: continuous, degree-1 homogeneous functions on the
//! nonnegative orthant, built from nonnegative linear forms under pointwise
//! minimum and rational linear combination, plus the phi-function of a
//! polarized graph template.
//!
//! A monomial exponent set `T` induces the skeletal function
//! `f(m) = min_{a in T} <a, m>`, the pull-back multiplicity of the
//! corresponding monomial-ideal model divisor along a disk hitting the
//! coordinate hyperplanes with multiplicities `m`. The associated Green
//! function on the punctured polydisk is `f(-log|t_1|, ..., -log|t_r|)`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::degeneration::phi_function;
use crate::error::{Error, Result};
use crate::graph::{polarized_genus, MetrizedGraph, Polarization, UnionFind};
use crate::io::{graph_from_value, graph_to_value};
use crate::scalar::Scalar;
use crate::simplex::{pl_decomposition, SimplexGrid};

/// Expression tree of a skeletal function.
///
/// Linear forms carry nonnegative rational coefficients; arbitrary
/// rational weights live in the combination nodes. `GraphPhi` evaluates
/// the phi-function of its template at the argument vector, one coordinate
/// per template edge in the stored edge order.
#[derive(Debug, Clone)]
pub enum SkeletalFunction<R> {
    LinearForm(Vec<BigRational>),
    Min(Vec<SkeletalFunction<R>>),
    LinComb(Vec<(BigRational, SkeletalFunction<R>)>),
    GraphPhi {
        graph: MetrizedGraph<R>,
        polarization: Polarization,
    },
}

impl<R: Scalar> SkeletalFunction<R> {
    /// Number of input coordinates.
    pub fn arity(&self) -> usize {
        match self {
            SkeletalFunction::LinearForm(coeffs) => coeffs.len(),
            SkeletalFunction::Min(children) => children[0].arity(),
            SkeletalFunction::LinComb(terms) => terms[0].1.arity(),
            SkeletalFunction::GraphPhi { graph, .. } => graph.edge_count(),
        }
    }

    /// A single nonnegative linear form.
    pub fn linear_form(coeffs: Vec<BigRational>) -> Result<Self> {
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_negative() {
                return Err(Error::NegativeInput(i));
            }
        }
        Ok(SkeletalFunction::LinearForm(coeffs))
    }

    /// `min_{a in T} <a, m>` for a finite exponent set `T`.
    pub fn from_monomials(exponents: &[Vec<u64>]) -> Result<Self> {
        let arity = check_exponents(exponents)?;
        let forms: Vec<SkeletalFunction<R>> = exponents
            .iter()
            .map(|row| {
                SkeletalFunction::LinearForm(row.iter().map(|&x| int_big(x as i64)).collect())
            })
            .collect();
        debug_assert!(forms.iter().all(|f| f.arity() == arity));
        if forms.len() == 1 {
            Ok(forms.into_iter().next().unwrap())
        } else {
            Ok(SkeletalFunction::Min(forms))
        }
    }

    /// Pointwise minimum of two skeletal functions of the same arity.
    pub fn min_of(a: Self, b: Self) -> Result<Self> {
        if a.arity() != b.arity() {
            return Err(Error::ArityMismatch {
                left: a.arity(),
                right: b.arity(),
            });
        }
        Ok(SkeletalFunction::Min(vec![a, b]))
    }

    /// Rational linear combination `a f1 + b f2`.
    pub fn lin_comb(a: BigRational, f1: Self, b: BigRational, f2: Self) -> Result<Self> {
        if f1.arity() != f2.arity() {
            return Err(Error::ArityMismatch {
                left: f1.arity(),
                right: f2.arity(),
            });
        }
        Ok(SkeletalFunction::LinComb(vec![(a, f1), (b, f2)]))
    }

    /// Evaluation on the nonnegative orthant.
    pub fn eval(&self, m: &[R]) -> Result<R> {
        if m.len() != self.arity() {
            return Err(Error::ArityMismatch {
                left: self.arity(),
                right: m.len(),
            });
        }
        for (i, &x) in m.iter().enumerate() {
            if x < R::zero() {
                return Err(Error::NegativeInput(i));
            }
        }
        self.eval_unchecked(m)
    }

    fn eval_unchecked(&self, m: &[R]) -> Result<R> {
        match self {
            SkeletalFunction::LinearForm(coeffs) => Ok(coeffs
                .iter()
                .zip(m)
                .fold(R::zero(), |acc, (c, &x)| acc + to_scalar::<R>(c) * x)),
            SkeletalFunction::Min(children) => {
                let mut best = R::infinity();
                for child in children {
                    best = best.min(child.eval_unchecked(m)?);
                }
                Ok(best)
            }
            SkeletalFunction::LinComb(terms) => {
                let mut acc = R::zero();
                for (w, child) in terms {
                    acc = acc + to_scalar::<R>(w) * child.eval_unchecked(m)?;
                }
                Ok(acc)
            }
            SkeletalFunction::GraphPhi {
                graph,
                polarization,
            } => phi_function(graph, polarization, m),
        }
    }

    /// Exact rational evaluation; `None` when the tree contains a
    /// `GraphPhi` node. No domain validation is applied.
    pub fn eval_exact(&self, m: &[BigRational]) -> Option<BigRational> {
        match self {
            SkeletalFunction::LinearForm(coeffs) => Some(
                coeffs
                    .iter()
                    .zip(m)
                    .map(|(c, x)| c * x)
                    .fold(BigRational::zero(), |a, b| a + b),
            ),
            SkeletalFunction::Min(children) => {
                let mut best: Option<BigRational> = None;
                for child in children {
                    let v = child.eval_exact(m)?;
                    best = Some(match best {
                        Some(b) if b <= v => b,
                        _ => v,
                    });
                }
                best
            }
            SkeletalFunction::LinComb(terms) => {
                let mut acc = BigRational::zero();
                for (w, child) in terms {
                    acc += w * child.eval_exact(m)?;
                }
                Some(acc)
            }
            SkeletalFunction::GraphPhi { .. } => None,
        }
    }

    /// Green-function value at a point of the punctured unit polydisk:
    /// `f(-log|t_1|, ..., -log|t_r|)`.
    pub fn green_value(&self, t: &[Complex<R>]) -> Result<R> {
        if t.len() != self.arity() {
            return Err(Error::ArityMismatch {
                left: self.arity(),
                right: t.len(),
            });
        }
        let mut m = Vec::with_capacity(t.len());
        for (i, z) in t.iter().enumerate() {
            let norm = z.norm();
            if norm.is_nan() || norm <= R::zero() || norm >= R::one() {
                return Err(Error::OutOfDomain(i));
            }
            m.push(-norm.ln());
        }
        self.eval(&m)
    }

    /// Structured serialization mirroring the node kinds.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        match self {
            SkeletalFunction::LinearForm(coeffs) => json!({
                "kind": "linear",
                "coefficients": coeffs.iter().map(|c| Value::String(c.to_string())).collect::<Vec<_>>(),
            }),
            SkeletalFunction::Min(children) => json!({
                "kind": "min",
                "children": children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
            SkeletalFunction::LinComb(terms) => json!({
                "kind": "lincomb",
                "terms": terms
                    .iter()
                    .map(|(w, c)| json!({"weight": w.to_string(), "child": c.to_json()}))
                    .collect::<Vec<_>>(),
            }),
            SkeletalFunction::GraphPhi {
                graph,
                polarization,
            } => json!({
                "kind": "graphphi",
                "graph": graph_to_value(graph, polarization),
            }),
        }
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Parse("skeletal node without kind".into()))?;
        match kind {
            "linear" => {
                let coeffs = value
                    .get("coefficients")
                    .and_then(|c| c.as_array())
                    .ok_or_else(|| Error::Parse("linear node without coefficients".into()))?
                    .iter()
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                SkeletalFunction::linear_form(coeffs)
            }
            "min" => {
                let children = value
                    .get("children")
                    .and_then(|c| c.as_array())
                    .ok_or_else(|| Error::Parse("min node without children".into()))?
                    .iter()
                    .map(Self::from_json)
                    .collect::<Result<Vec<_>>>()?;
                if children.is_empty() {
                    return Err(Error::Parse("min node with no children".into()));
                }
                let arity = children[0].arity();
                if children.iter().any(|c| c.arity() != arity) {
                    return Err(Error::ArityMismatch {
                        left: arity,
                        right: children.iter().map(|c| c.arity()).max().unwrap(),
                    });
                }
                Ok(SkeletalFunction::Min(children))
            }
            "lincomb" => {
                let terms = value
                    .get("terms")
                    .and_then(|c| c.as_array())
                    .ok_or_else(|| Error::Parse("lincomb node without terms".into()))?
                    .iter()
                    .map(|t| {
                        let w = parse_rational(
                            t.get("weight")
                                .ok_or_else(|| Error::Parse("term without weight".into()))?,
                        )?;
                        let child = Self::from_json(
                            t.get("child")
                                .ok_or_else(|| Error::Parse("term without child".into()))?,
                        )?;
                        Ok((w, child))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if terms.is_empty() {
                    return Err(Error::Parse("lincomb node with no terms".into()));
                }
                let arity = terms[0].1.arity();
                if terms.iter().any(|(_, c)| c.arity() != arity) {
                    return Err(Error::ArityMismatch {
                        left: arity,
                        right: terms.iter().map(|(_, c)| c.arity()).max().unwrap(),
                    });
                }
                Ok(SkeletalFunction::LinComb(terms))
            }
            "graphphi" => {
                let graph_value = value
                    .get("graph")
                    .ok_or_else(|| Error::Parse("graphphi node without graph".into()))?;
                let (graph, polarization) = graph_from_value::<R>(graph_value)?;
                let (f, _) = phi_skeletal(&graph, &polarization)?;
                Ok(f)
            }
            other => Err(Error::Parse(format!("unknown skeletal node kind {other}"))),
        }
    }
}

fn parse_rational(value: &serde_json::Value) -> Result<BigRational> {
    let text = value
        .as_str()
        .ok_or_else(|| Error::Parse("rational must be a string like \"3/4\"".into()))?;
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {s}: {e}")))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(text)?)),
    }
}

fn check_exponents(exponents: &[Vec<u64>]) -> Result<usize> {
    if exponents.is_empty() {
        return Err(Error::EmptyExponentSet);
    }
    let arity = exponents[0].len();
    for row in exponents {
        if row.len() != arity {
            return Err(Error::ArityMismatch {
                left: arity,
                right: row.len(),
            });
        }
        if row.iter().all(|&x| x == 0) {
            return Err(Error::ZeroExponent);
        }
    }
    Ok(arity)
}

fn int_big(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn to_scalar<R: Scalar>(x: &BigRational) -> R {
    R::of(x.to_f64().expect("rational fits in f64"))
}

/// Exact integer oracle for the pull-back multiplicity of a monomial
/// model divisor: `min_{a in T} <a, m>`.
pub fn monomial_multiplicity(exponents: &[Vec<u64>], m: &[u64]) -> Result<u128> {
    let arity = check_exponents(exponents)?;
    if m.len() != arity {
        return Err(Error::ArityMismatch {
            left: arity,
            right: m.len(),
        });
    }
    Ok(exponents
        .iter()
        .map(|row| {
            row.iter()
                .zip(m)
                .map(|(&a, &x)| a as u128 * x as u128)
                .sum::<u128>()
        })
        .min()
        .expect("nonempty exponent set"))
}

/// The phi-function of a polarized graph template as a skeletal function
/// with one coordinate per edge. Returns the function together with a
/// low-genus flag: polarized genus 1 is accepted, but the moduli
/// interpretation needs genus at least 2.
pub fn phi_skeletal<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
) -> Result<(SkeletalFunction<R>, bool)> {
    g.validate()?;
    let genus = polarized_genus(g, q)?;
    if genus == 0 {
        return Err(Error::GenusTooSmall(
            "phi skeletal function needs polarized genus >= 1".into(),
        ));
    }
    Ok((
        SkeletalFunction::GraphPhi {
            graph: g.clone(),
            polarization: q.clone(),
        },
        genus == 1,
    ))
}

/// Closed form of the phi-invariant of a tree: `Σ (2 j (g - j) / g) δ_j`
/// over edge types `(j, δ_j)` with `1 <= j <= g/2`.
pub fn phi_tree_closed_form<R: Scalar>(types: &[(usize, R)], genus: usize) -> Result<R> {
    if genus < 2 {
        return Err(Error::GenusTooSmall(
            "tree closed form needs genus >= 2".into(),
        ));
    }
    let mut total = R::zero();
    for &(j, delta) in types {
        if j < 1 || 2 * j > genus {
            return Err(Error::BadType(format!(
                "type {} outside 1..={}",
                j,
                genus / 2
            )));
        }
        if delta < R::zero() {
            return Err(Error::BadType(format!("negative type length {}", delta)));
        }
        let coeff = R::of(2.0) * R::of_usize(j) * R::of_usize(genus - j) / R::of_usize(genus);
        total = total + coeff * delta;
    }
    Ok(total)
}

/// Structural edge types of a polarized tree: removing an edge splits the
/// tree, and the type is the smaller polarized genus of the two sides.
pub fn tree_edge_types<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
) -> Result<Vec<(usize, R)>> {
    g.validate()?;
    q.validate(g)?;
    if g.genus() != 0 {
        return Err(Error::BadType("edge types are defined for trees".into()));
    }
    let total: usize = q.total() as usize;
    let mut types = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let mut dsu = UnionFind::new(g.vertex_count());
        for f in g.edge_ids() {
            if f != e {
                let data = g.edge_data(f);
                dsu.union(data.source().index(), data.target().index());
            }
        }
        let side_root = dsu.find(g.edge_data(e).source().index());
        let side_sum: usize = g
            .vertex_ids()
            .filter(|v| dsu.find(v.index()) == side_root)
            .map(|v| q.weight(v) as usize)
            .sum();
        let j = side_sum.min(total - side_sum);
        types.push((j, g.edge_data(e).length()));
    }
    Ok(types)
}

/// Leading term of the phi-invariant of a smoothing parametrized by disk
/// coordinates `u`: the skeletal phi-function evaluated at
/// `(-log|u_1|, ..., -log|u_r|)`. The sublinear error term is not
/// computed.
pub fn phi_asymptotic<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
    u: &[Complex<R>],
) -> Result<R> {
    if u.len() != g.edge_count() {
        return Err(Error::ArityMismatch {
            left: g.edge_count(),
            right: u.len(),
        });
    }
    let genus = polarized_genus(g, q)?;
    if genus < 2 {
        return Err(Error::GenusTooSmall(
            "phi asymptotics need polarized genus >= 2".into(),
        ));
    }
    let (f, _) = phi_skeletal(g, q)?;
    f.green_value(u)
}

/// Piecewise-linear approximation: builds a skeletal expression from
/// `LinearForm`, `Min` and `LinComb` nodes only, matching `samples` at the
/// grid points exactly and evaluating everywhere to the PL interpolant on
/// the Kuhn triangulation of the grid (extended homogeneously off the
/// simplex). `eps` is the caller's modulus-of-continuity budget at this
/// mesh; it is validated positive but otherwise only meaningful to the
/// caller's density argument.
pub fn approximate<R: Scalar>(
    grid: &SimplexGrid,
    samples: &[R],
    eps: R,
) -> Result<SkeletalFunction<R>> {
    if eps.is_nan() || eps <= R::zero() {
        return Err(Error::BadMesh("eps must be positive".into()));
    }
    if samples.len() != grid.len() {
        return Err(Error::BadMesh(format!(
            "{} samples for a grid of {} points",
            samples.len(),
            grid.len()
        )));
    }
    let rational_samples: Vec<BigRational> = samples
        .iter()
        .map(|s| {
            BigRational::from_float(s.to_f64().expect("finite sample"))
                .ok_or_else(|| Error::BadMesh("samples must be finite".into()))
        })
        .collect::<Result<_>>()?;
    let dec = pl_decomposition(grid, &rational_samples)?;

    if dec.cell_functionals.len() == 1 {
        return Ok(functional_node(&dec.cell_functionals[0]));
    }
    // f = max_c p_c - M Σ_w |h_w|
    //   = -min_c(-p_c) + M Σ_w min(h_w, -h_w).
    let negated: Vec<SkeletalFunction<R>> = dec
        .cell_functionals
        .iter()
        .map(|p| {
            let negative: Vec<BigRational> = p.iter().map(|c| -c.clone()).collect();
            functional_node(&negative)
        })
        .collect();
    let mut terms: Vec<(BigRational, SkeletalFunction<R>)> =
        vec![(-BigRational::one(), SkeletalFunction::Min(negated))];
    for normal in &dec.wall_normals {
        let plus = functional_node::<R>(normal);
        let negative: Vec<BigRational> = normal.iter().map(|c| -c.clone()).collect();
        let minus = functional_node::<R>(&negative);
        terms.push((
            dec.penalty.clone(),
            SkeletalFunction::Min(vec![plus, minus]),
        ));
    }
    Ok(SkeletalFunction::LinComb(terms))
}

// An arbitrary rational functional as a tree node: nonnegative functionals
// become a single linear form, mixed signs split into a difference.
fn functional_node<R: Scalar>(coeffs: &[BigRational]) -> SkeletalFunction<R> {
    let mut positive = Vec::with_capacity(coeffs.len());
    let mut negative = Vec::with_capacity(coeffs.len());
    let mut has_negative = false;
    for c in coeffs {
        if c.is_negative() {
            positive.push(BigRational::zero());
            negative.push(-c.clone());
            has_negative = true;
        } else {
            positive.push(c.clone());
            negative.push(BigRational::zero());
        }
    }
    if !has_negative {
        return SkeletalFunction::LinearForm(positive);
    }
    if positive.iter().all(|c| c.is_zero()) {
        return SkeletalFunction::LinComb(vec![(
            -BigRational::one(),
            SkeletalFunction::LinearForm(negative),
        )]);
    }
    SkeletalFunction::LinComb(vec![
        (BigRational::one(), SkeletalFunction::LinearForm(positive)),
        (-BigRational::one(), SkeletalFunction::LinearForm(negative)),
    ])
}
