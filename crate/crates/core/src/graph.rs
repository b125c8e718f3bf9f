//! Resolution dual graphs: validation, Euler characteristics of the smooth
//! parts of the components, and the Artin rationality test.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{self, IntMatrix};

/// One exceptional curve: an identifier and its self-intersection number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub self_intersection: i64,
}

/// Strict transform of a curve branch meeting one exceptional curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub id: String,
    /// Index into [`ResolutionGraph::vertices`].
    pub attached_to: usize,
}

/// Dual graph of a resolution. Vertex order is the input order and is used
/// for every matrix built from the graph.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ResolutionGraph {
    pub vertices: Vec<Vertex>,
    /// Pairs of vertex indices.
    pub edges: Vec<(usize, usize)>,
    /// Indices of the valuation components, in order.
    pub marked: Vec<usize>,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Divisorial,
    Curve,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Divisorial => f.write_str("divisorial"),
            Mode::Curve => f.write_str("curve"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge refers to unknown vertex index {0}")]
    UnknownVertex(usize),
    #[error("self-loop at vertex {0:?}")]
    SelfLoop(String),
    #[error("multiple edges between {0:?} and {1:?}")]
    MultiEdge(String, String),
    #[error("not a tree: {vertices} vertices, {edges} edges, unreachable from {root:?}: {unreachable:?}")]
    NotATree {
        vertices: usize,
        edges: usize,
        root: String,
        unreachable: Vec<String>,
    },
    #[error("non-negative self-intersection at {0:?}")]
    NonNegativeSelfIntersection(Vec<String>),
    #[error("intersection matrix is not negative definite (leading minor {minor} over {vertices:?} is not positive for -I)")]
    NotNegativeDefinite { minor: usize, vertices: Vec<String> },
    #[error("not rational: arithmetic genus of the fundamental cycle is {genus} (support {vertices:?})")]
    NotRational { genus: BigInt, vertices: Vec<String> },
    #[error("vertex {0:?} is marked more than once")]
    DuplicateMark(String),
    #[error("no marked components (divisorial mode needs at least one)")]
    EmptyMarkSet,
    #[error("duplicate branch id {0:?}")]
    DuplicateBranch(String),
    #[error("no branches (curve mode needs at least one)")]
    EmptyBranchSet,
}

/// Every violated invariant found by [`ResolutionGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub errors: Vec<GraphError>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationOptions {
    pub check_rationality: bool,
    /// Additionally require the marks (divisorial) or branches (curve).
    pub mode: Option<Mode>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            check_rationality: true,
            mode: None,
        }
    }
}

impl ValidationOptions {
    pub fn for_mode(mode: Mode) -> Self {
        Self {
            mode: Some(mode),
            ..Self::default()
        }
    }
}

/// A graph that passed [`ResolutionGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedGraph {
    graph: ResolutionGraph,
    /// `p_a(Z)`, when rationality was checked.
    genus: Option<BigInt>,
}

impl ValidatedGraph {
    pub fn graph(&self) -> &ResolutionGraph {
        &self.graph
    }

    pub fn arithmetic_genus(&self) -> Option<&BigInt> {
        self.genus.as_ref()
    }

    pub fn into_inner(self) -> ResolutionGraph {
        self.graph
    }
}

impl std::ops::Deref for ValidatedGraph {
    type Target = ResolutionGraph;
    fn deref(&self) -> &ResolutionGraph {
        &self.graph
    }
}

/// Integral divisor supported on the exceptional set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleVector(pub Vec<i64>);

impl CycleVector {
    /// `Z1 · Z2` with respect to the intersection form.
    pub fn dot(&self, graph: &ResolutionGraph, other: &CycleVector) -> i64 {
        let mut acc = 0;
        for (i, v) in graph.vertices.iter().enumerate() {
            acc += self.0[i] * other.0[i] * v.self_intersection;
        }
        for &(a, b) in &graph.edges {
            acc += self.0[a] * other.0[b] + self.0[b] * other.0[a];
        }
        acc
    }

    /// `Z · E_σ` for every σ.
    pub fn products_with_components(&self, graph: &ResolutionGraph) -> Vec<i64> {
        let mut out: Vec<i64> = graph
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| self.0[i] * v.self_intersection)
            .collect();
        for &(a, b) in &graph.edges {
            out[a] += self.0[b];
            out[b] += self.0[a];
        }
        out
    }
}

impl ResolutionGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == vertex || b == vertex)
            .count()
    }

    pub fn branches_at(&self, vertex: usize) -> usize {
        self.branches.iter().filter(|b| b.attached_to == vertex).count()
    }

    fn names(&self, idx: impl IntoIterator<Item = usize>) -> Vec<String> {
        idx.into_iter().map(|i| self.vertices[i].id.clone()).collect()
    }

    /// `-(E_σ ∘ E_δ)` in vertex order.
    pub fn neg_intersection_matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, v) in self.vertices.iter().enumerate() {
            m[(i, i)] = BigInt::from(-v.self_intersection);
        }
        for &(a, b) in &self.edges {
            m[(a, b)] = BigInt::from(-1);
            m[(b, a)] = BigInt::from(-1);
        }
        m
    }

    /// `(E_σ ∘ E_δ)` in vertex order.
    pub fn intersection_matrix(&self) -> IntMatrix {
        self.neg_intersection_matrix().neg()
    }

    /// Checks every structural invariant and collects all violations.
    pub fn validate(&self, opts: &ValidationOptions) -> Result<ValidatedGraph, ValidationReport> {
        let mut errors = Vec::new();
        let n = self.len();
        if n == 0 {
            errors.push(GraphError::Empty);
            return Err(ValidationReport { errors });
        }

        let mut seen = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if seen.insert(v.id.as_str(), i).is_some() {
                errors.push(GraphError::DuplicateVertex(v.id.clone()));
            }
        }

        let mut structural_ok = true;
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                errors.push(GraphError::UnknownVertex(a.max(b)));
                structural_ok = false;
                continue;
            }
            if a == b {
                errors.push(GraphError::SelfLoop(self.vertices[a].id.clone()));
                structural_ok = false;
                continue;
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                errors.push(GraphError::MultiEdge(
                    self.vertices[a].id.clone(),
                    self.vertices[b].id.clone(),
                ));
                structural_ok = false;
            }
        }
        for b in &self.branches {
            if b.attached_to >= n {
                errors.push(GraphError::UnknownVertex(b.attached_to));
                structural_ok = false;
            }
        }

        if structural_ok {
            let reachable = self.reachable_from(0);
            if self.edges.len() + 1 != n || reachable.len() != n {
                errors.push(GraphError::NotATree {
                    vertices: n,
                    edges: self.edges.len(),
                    root: self.vertices[0].id.clone(),
                    unreachable: self.names((0..n).filter(|i| !reachable.contains(i))),
                });
                structural_ok = false;
            }
        }

        let nonneg: Vec<String> = self
            .vertices
            .iter()
            .filter(|v| v.self_intersection >= 0)
            .map(|v| v.id.clone())
            .collect();
        if !nonneg.is_empty() {
            errors.push(GraphError::NonNegativeSelfIntersection(nonneg));
        }

        let mut marks = BTreeSet::new();
        for &m in &self.marked {
            if m >= n {
                errors.push(GraphError::UnknownVertex(m));
            } else if !marks.insert(m) {
                errors.push(GraphError::DuplicateMark(self.vertices[m].id.clone()));
            }
        }
        let mut branch_ids = BTreeSet::new();
        for b in &self.branches {
            if !branch_ids.insert(b.id.as_str()) {
                errors.push(GraphError::DuplicateBranch(b.id.clone()));
            }
        }
        match opts.mode {
            Some(Mode::Divisorial) if self.marked.is_empty() => errors.push(GraphError::EmptyMarkSet),
            Some(Mode::Curve) if self.branches.is_empty() => errors.push(GraphError::EmptyBranchSet),
            _ => {}
        }

        let mut genus = None;
        if structural_ok {
            let neg = self.neg_intersection_matrix();
            let failing = (1..=n).find(|&k| determinant_of_leading(&neg, k) <= BigInt::zero());
            if let Some(k) = failing {
                errors.push(GraphError::NotNegativeDefinite {
                    minor: k,
                    vertices: self.names(0..k),
                });
            } else if opts.check_rationality {
                let z = self.fundamental_cycle();
                let pa = self.arithmetic_genus(&z);
                if !pa.is_zero() {
                    errors.push(GraphError::NotRational {
                        genus: pa.clone(),
                        vertices: self.names((0..n).filter(|&i| z.0[i] > 1)),
                    });
                }
                genus = Some(pa);
            }
        }

        if errors.is_empty() {
            Ok(ValidatedGraph {
                graph: self.clone(),
                genus,
            })
        } else {
            Err(ValidationReport { errors })
        }
    }

    fn reachable_from(&self, root: usize) -> BTreeSet<usize> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = BTreeSet::from([root]);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Euler characteristic of the part of `E_σ` not met by other
    /// components (divisorial) or by other components and branches (curve).
    pub fn euler_smooth_part(&self, vertex: usize, mode: Mode) -> Result<i64, GraphError> {
        if vertex >= self.len() {
            return Err(GraphError::UnknownVertex(vertex));
        }
        let base = 2 - self.degree(vertex) as i64;
        Ok(match mode {
            Mode::Divisorial => base,
            Mode::Curve => base - self.branches_at(vertex) as i64,
        })
    }

    /// The rational cycle `K` with `K·E_σ = -E_σ² - 2` for all σ.
    ///
    /// Requires a nonsingular intersection matrix.
    pub fn canonical_cycle(&self) -> Vec<BigRational> {
        let inv = linalg::inverse(&self.intersection_matrix())
            .expect("canonical cycle of a degenerate intersection form");
        let rhs: Vec<BigRational> = self
            .vertices
            .iter()
            .map(|v| BigRational::from_integer(BigInt::from(-v.self_intersection - 2)))
            .collect();
        (0..self.len())
            .map(|i| {
                inv.row(i)
                    .iter()
                    .zip(&rhs)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Laufer's iteration: start from the reduced cycle and add `E_σ` while
    /// some `Z·E_σ > 0`. Terminates for negative definite forms.
    pub fn fundamental_cycle(&self) -> CycleVector {
        let mut z = CycleVector(vec![1; self.len()]);
        loop {
            let products = z.products_with_components(self);
            match products.iter().position(|&p| p > 0) {
                Some(i) => z.0[i] += 1,
                None => return z,
            }
        }
    }

    /// `p_a(Z) = 1 + (Z·Z + Z·K)/2`.
    pub fn arithmetic_genus(&self, z: &CycleVector) -> BigInt {
        let zz = z.dot(self, z);
        // Z·K = Σ z_σ (K·E_σ) with K·E_σ fixed by adjunction.
        let zk: i64 = self
            .vertices
            .iter()
            .zip(&z.0)
            .map(|(v, &c)| c * (-v.self_intersection - 2))
            .sum();
        let twice = 2 + zz + zk;
        debug_assert!(twice % 2 == 0, "Z·Z + Z·K must be even");
        BigInt::from(twice / 2)
    }

    /// Fundamental cycle and its arithmetic genus; rational iff the genus is 0.
    pub fn is_rational(&self) -> (bool, BigInt) {
        let z = self.fundamental_cycle();
        let pa = self.arithmetic_genus(&z);
        (pa.is_zero(), pa)
    }

    /// Chain `E_1 - E_2 - ... - E_k` with the given self-intersections and
    /// ids `E1..Ek`, nothing marked.
    pub fn chain(self_intersections: &[i64]) -> Self {
        let vertices = self_intersections
            .iter()
            .enumerate()
            .map(|(i, &s)| Vertex {
                id: format!("E{}", i + 1),
                self_intersection: s,
            })
            .collect();
        let edges = (1..self_intersections.len()).map(|i| (i - 1, i)).collect();
        ResolutionGraph {
            vertices,
            edges,
            marked: Vec::new(),
            branches: Vec::new(),
        }
    }

    pub fn with_marked(mut self, marked: Vec<usize>) -> Self {
        self.marked = marked;
        self
    }

    pub fn with_all_marked(mut self) -> Self {
        self.marked = (0..self.len()).collect();
        self
    }

    pub fn with_branch(mut self, id: &str, attached_to: usize) -> Self {
        self.branches.push(Branch {
            id: id.to_string(),
            attached_to,
        });
        self
    }
}

fn determinant_of_leading(m: &IntMatrix, k: usize) -> BigInt {
    linalg::determinant(&m.leading_minor(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(si: i64) -> ResolutionGraph {
        ResolutionGraph::chain(&[si]).with_all_marked()
    }

    fn star(center: i64, legs: &[i64]) -> ResolutionGraph {
        let mut g = ResolutionGraph::chain(&[center]);
        for (i, &s) in legs.iter().enumerate() {
            g.vertices.push(Vertex {
                id: format!("L{}", i + 1),
                self_intersection: s,
            });
            g.edges.push((0, i + 1));
        }
        g
    }

    fn e8() -> ResolutionGraph {
        let mut g = ResolutionGraph::chain(&[-2; 7]);
        g.vertices.push(Vertex {
            id: "E8".into(),
            self_intersection: -2,
        });
        g.edges.push((2, 7));
        g
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn validate_examples() {
        assert!(single(-2).validate(&ValidationOptions::default()).is_ok());

        let two = ResolutionGraph::chain(&[-1, -1]);
        let err = two.validate(&ValidationOptions::default()).unwrap_err();
        assert!(matches!(err.errors[..], [GraphError::NotNegativeDefinite { .. }]));

        let err = single(0).validate(&ValidationOptions::default()).unwrap_err();
        assert!(err
            .errors
            .contains(&GraphError::NonNegativeSelfIntersection(vec!["E1".into()])));
    }

    #[test]
    fn validate_reports_every_violation() {
        let mut g = ResolutionGraph::chain(&[0, -2, -2]);
        g.edges.push((0, 0));
        g.marked = vec![1, 1];
        let err = g.validate(&ValidationOptions::for_mode(Mode::Curve)).unwrap_err();
        assert!(err.errors.contains(&GraphError::SelfLoop("E1".into())));
        assert!(err
            .errors
            .contains(&GraphError::NonNegativeSelfIntersection(vec!["E1".into()])));
        assert!(err.errors.contains(&GraphError::DuplicateMark("E2".into())));
        assert!(err.errors.contains(&GraphError::EmptyBranchSet));
    }

    #[test]
    fn not_a_tree() {
        let mut g = ResolutionGraph::chain(&[-2, -2, -2]);
        g.edges.pop();
        let err = g.validate(&ValidationOptions::default()).unwrap_err();
        assert!(matches!(err.errors[0], GraphError::NotATree { ref unreachable, .. } if unreachable == &["E3".to_string()]));

        let mut g = ResolutionGraph::chain(&[-2, -2, -2]);
        g.edges.push((0, 2));
        let err = g.validate(&ValidationOptions::default()).unwrap_err();
        assert!(matches!(err.errors[0], GraphError::NotATree { .. }));
    }

    #[test]
    fn multi_edge_rejected() {
        let mut g = ResolutionGraph::chain(&[-2, -2]);
        g.edges.push((1, 0));
        let err = g.validate(&ValidationOptions::default()).unwrap_err();
        assert_eq!(err.errors[0], GraphError::MultiEdge("E2".into(), "E1".into()));
    }

    #[test]
    fn mark_set_requirements() {
        let g = ResolutionGraph::chain(&[-2]);
        let err = g.validate(&ValidationOptions::for_mode(Mode::Divisorial)).unwrap_err();
        assert_eq!(err.errors, vec![GraphError::EmptyMarkSet]);
        assert!(g.validate(&ValidationOptions::default()).is_ok());
    }

    #[test]
    fn rationality_can_be_skipped() {
        // minimally elliptic star (-1; -2, -3, -7), p_a(Z) = 1
        let g = star(-1, &[-2, -3, -7]);
        let err = g.validate(&ValidationOptions::default()).unwrap_err();
        assert!(matches!(err.errors[..], [GraphError::NotRational { .. }]));
        let opts = ValidationOptions {
            check_rationality: false,
            mode: None,
        };
        assert!(g.validate(&opts).is_ok());
    }

    #[test]
    fn validate_is_idempotent() {
        let v = e8().validate(&ValidationOptions::default()).unwrap();
        assert!(v.graph().validate(&ValidationOptions::default()).is_ok());
    }

    #[test]
    fn euler_examples() {
        let chain = ResolutionGraph::chain(&[-2, -2, -2]);
        assert_eq!(chain.euler_smooth_part(0, Mode::Divisorial), Ok(1));
        let s = star(-2, &[-2, -2, -2]);
        assert_eq!(s.euler_smooth_part(0, Mode::Divisorial), Ok(-1));
        let g = chain.with_branch("C1", 0);
        assert_eq!(g.euler_smooth_part(0, Mode::Curve), Ok(0));
        assert_eq!(g.euler_smooth_part(5, Mode::Curve), Err(GraphError::UnknownVertex(5)));
    }

    #[test]
    fn euler_sum_is_two() {
        for g in [e8(), star(-2, &[-2, -3, -2]), ResolutionGraph::chain(&[-3])] {
            let total: i64 = (0..g.len())
                .map(|v| g.euler_smooth_part(v, Mode::Divisorial).unwrap())
                .sum();
            assert_eq!(total, 2);
        }
    }

    #[test]
    fn canonical_cycle_examples() {
        assert_eq!(single(-2).canonical_cycle(), vec![rat(0, 1)]);
        assert_eq!(single(-3).canonical_cycle(), vec![rat(-1, 3)]);
        assert_eq!(
            ResolutionGraph::chain(&[-2, -2]).canonical_cycle(),
            vec![rat(0, 1), rat(0, 1)]
        );
    }

    #[test]
    fn canonical_cycle_satisfies_adjunction() {
        let g = star(-3, &[-2, -4, -2]);
        let k = g.canonical_cycle();
        let i = g.intersection_matrix();
        for s in 0..g.len() {
            let ke: BigRational = (0..g.len())
                .map(|t| &k[t] * BigRational::from_integer(i[(t, s)].clone()))
                .sum();
            let expected = -g.vertices[s].self_intersection - 2;
            assert_eq!(ke, BigRational::from_integer(expected.into()));
        }
    }

    #[test]
    fn fundamental_cycle_examples() {
        assert_eq!(single(-2).fundamental_cycle(), CycleVector(vec![1]));
        assert_eq!(
            ResolutionGraph::chain(&[-2, -2]).fundamental_cycle(),
            CycleVector(vec![1, 1])
        );
        // D4: 2 on the center
        assert_eq!(
            star(-2, &[-2, -2, -2]).fundamental_cycle(),
            CycleVector(vec![2, 1, 1, 1])
        );
        // E8 in this labelling: highest root
        assert_eq!(
            e8().fundamental_cycle(),
            CycleVector(vec![2, 4, 6, 5, 4, 3, 2, 3])
        );
    }

    #[test]
    fn rationality_examples() {
        assert_eq!(single(-2).is_rational(), (true, BigInt::zero()));
        assert!(e8().is_rational().0);
        for n in 1..=8 {
            let g = ResolutionGraph::chain(&vec![-2; n]);
            assert_eq!(g.fundamental_cycle(), CycleVector(vec![1; n]));
            assert!(g.is_rational().0);
        }
    }
}
