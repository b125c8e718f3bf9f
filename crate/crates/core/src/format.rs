//! On-disk formats: the JSON graph document, series serialization (JSON and
//! text), and the invariants report.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Number;
use thiserror::Error;

use crate::character::{format_coords, AbelianGroup, Character, GroupRingElement};
use crate::graph::{Branch, ResolutionGraph, Vertex};
use crate::poincare::{EquivariantSeries, GraphInvariants, IntSeries};
use crate::series::{Coefficient, TruncatedSeries};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{context} refers to unknown vertex id {id:?}")]
    UnknownVertexId { context: String, id: String },
    #[error("series document: {0}")]
    Series(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDocument {
    pub id: String,
    pub self_intersection: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDocument {
    pub id: String,
    pub attached_to: String,
}

/// `{"vertices": [{"id", "self_intersection"}], "edges": [[id, id]],
/// "marked": [id], "branches": [{"id", "attached_to"}]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexDocument>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub marked: Vec<String>,
    #[serde(default)]
    pub branches: Vec<BranchDocument>,
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolves ids to indices. Structural problems (duplicate ids, cycles,
    /// bad self-intersections) are left for validation.
    pub fn to_graph(&self) -> Result<ResolutionGraph, FormatError> {
        let vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id.clone(),
                self_intersection: v.self_intersection,
            })
            .collect();
        let lookup = |context: &str, id: &str| {
            vertices
                .iter()
                .position(|v| v.id == id)
                .ok_or_else(|| FormatError::UnknownVertexId {
                    context: context.to_string(),
                    id: id.to_string(),
                })
        };
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((lookup("edge", a)?, lookup("edge", b)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let marked = self
            .marked
            .iter()
            .map(|id| lookup("marked", id))
            .collect::<Result<Vec<_>, _>>()?;
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    id: b.id.clone(),
                    attached_to: lookup(&format!("branch {:?}", b.id), &b.attached_to)?,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(ResolutionGraph {
            vertices,
            edges,
            marked,
            branches,
        })
    }

    pub fn from_graph(g: &ResolutionGraph) -> Self {
        let id = |i: usize| g.vertices[i].id.clone();
        GraphDocument {
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexDocument {
                    id: v.id.clone(),
                    self_intersection: v.self_intersection,
                })
                .collect(),
            edges: g.edges.iter().map(|&(a, b)| (id(a), id(b))).collect(),
            marked: g.marked.iter().map(|&i| id(i)).collect(),
            branches: g
                .branches
                .iter()
                .map(|b| BranchDocument {
                    id: b.id.clone(),
                    attached_to: id(b.attached_to),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Coefficient of one serialized term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientDocument {
    Integer(Number),
    /// `(coords, coefficient)` pairs sorted by coordinates.
    GroupRing(Vec<(Vec<u64>, Number)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub exponents: Vec<u64>,
    pub scale: u64,
    pub coefficient: CoefficientDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    pub kind: String,
    pub variables: Vec<String>,
    pub scale: u64,
    pub bound: u64,
    /// Present for group-ring coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant_factors: Option<Vec<u64>>,
    /// Sorted by total degree, then lexicographically.
    pub terms: Vec<TermDocument>,
}

fn number(x: &BigInt) -> Number {
    serde_json::from_str(&x.to_string()).expect("integer literal")
}

fn big(n: &Number) -> Result<BigInt, FormatError> {
    n.to_string()
        .parse()
        .map_err(|_| FormatError::Series(format!("coefficient {n} is not an integer")))
}

/// Conversion between coefficients and their serialized form.
pub trait CoefficientCodec: Coefficient {
    fn encode(&self) -> CoefficientDocument;
}

impl CoefficientCodec for BigInt {
    fn encode(&self) -> CoefficientDocument {
        CoefficientDocument::Integer(number(self))
    }
}

impl CoefficientCodec for GroupRingElement {
    fn encode(&self) -> CoefficientDocument {
        CoefficientDocument::GroupRing(
            self.terms()
                .map(|(k, v)| (k.to_vec(), number(v)))
                .collect(),
        )
    }
}

impl SeriesDocument {
    pub fn from_series<C: CoefficientCodec>(
        kind: &str,
        s: &TruncatedSeries<C>,
        invariant_factors: Option<Vec<u64>>,
    ) -> Self {
        SeriesDocument {
            kind: kind.to_string(),
            variables: s.variables().to_vec(),
            scale: s.scale(),
            bound: s.bound(),
            invariant_factors,
            terms: s
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermDocument {
                    exponents: e.clone(),
                    scale: s.scale(),
                    coefficient: c.encode(),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    fn check_term(&self, t: &TermDocument) -> Result<(), FormatError> {
        if t.scale != self.scale {
            return Err(FormatError::Series(format!(
                "term scale {} differs from series scale {}",
                t.scale, self.scale
            )));
        }
        Ok(())
    }

    pub fn to_int_series(&self) -> Result<IntSeries, FormatError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            self.check_term(t)?;
            match &t.coefficient {
                CoefficientDocument::Integer(n) => terms.push((t.exponents.clone(), big(n)?)),
                CoefficientDocument::GroupRing(_) => {
                    return Err(FormatError::Series("expected integer coefficients".into()))
                }
            }
        }
        TruncatedSeries::from_terms(self.variables.clone(), self.scale, self.bound, BigInt::from(1), terms)
            .map_err(|e| FormatError::Series(e.to_string()))
    }

    pub fn to_equivariant_series(&self, group: &Arc<AbelianGroup>) -> Result<EquivariantSeries, FormatError> {
        if self.invariant_factors.as_deref() != Some(group.invariant_factors()) {
            return Err(FormatError::Series(format!(
                "invariant factors {:?} do not match the group {:?}",
                self.invariant_factors,
                group.invariant_factors()
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            self.check_term(t)?;
            match &t.coefficient {
                CoefficientDocument::GroupRing(pairs) => {
                    let parsed = pairs
                        .iter()
                        .map(|(k, v)| Ok((k.clone(), big(v)?)))
                        .collect::<Result<Vec<_>, FormatError>>()?;
                    terms.push((t.exponents.clone(), GroupRingElement::from_terms(group, parsed)));
                }
                CoefficientDocument::Integer(_) => {
                    return Err(FormatError::Series("expected group-ring coefficients".into()))
                }
            }
        }
        TruncatedSeries::from_terms(
            self.variables.clone(),
            self.scale,
            self.bound,
            GroupRingElement::one(group),
            terms,
        )
        .map_err(|e| FormatError::Series(e.to_string()))
    }
}

/// Rotation numbers as `"p/q"` strings (`"0"` for zero).
pub fn character_to_json(ch: &Character) -> serde_json::Value {
    serde_json::Value::from(ch.rotation_strings())
}

/// `Z/2 + Z/6`, or `0` for the trivial group.
pub fn render_group(group: &AbelianGroup) -> String {
    if group.is_trivial() {
        return "0".to_string();
    }
    group
        .invariant_factors()
        .iter()
        .map(|n| format!("Z/{n}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Human-readable report of `d`, `m`, `G`, the orders `d_σ` and the
/// characters `α_σ`.
pub fn render_invariants(graph: &ResolutionGraph, inv: &GraphInvariants) -> String {
    let mut out = String::new();
    let n = graph.len();
    let _ = writeln!(out, "d = {}", inv.det);
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let cells: Vec<String> = inv.m.row(i).iter().map(|x| x.to_string()).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    let _ = writeln!(out, "m = [{}]", rows.join(","));
    let _ = writeln!(out, "G = {}", render_group(&inv.group));
    let orders: Vec<String> = inv.orders.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "orders = ({})", orders.join(","));
    for (v, alpha) in graph.vertices.iter().zip(&inv.alphas) {
        let _ = writeln!(
            out,
            "alpha[{}] = ({}) {}",
            v.id,
            alpha.rotation_strings().join(","),
            format_coords(&inv.group, alpha.coords())
        );
    }
    out
}
