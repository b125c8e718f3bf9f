//! Brute-force checks against cyclic quotient singularities.
//!
//! For `C²/(Z/n)` with action `(x, y) ↦ (ζx, ζ^q y)` the invariant ring is
//! spanned by the monomials `x^a y^b` with `a + q·b ≡ 0 (mod n)`, and a
//! divisorial valuation along a component of the Hirzebruch–Jung chain is
//! monomial. Counting invariant monomials of each value gives the
//! one-index Poincaré series directly, independent of the product formula.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{Mode, ResolutionGraph, Vertex};
use crate::linalg;
use crate::poincare::{Discrepancy, EngineError, FiltrationSpec, IntSeries, PoincareEngine};
use crate::series::default_variables;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("invalid parameters n = {n}, q = {q}: need 1 <= q < n and gcd(n, q) = 1")]
    InvalidParameters { n: u64, q: u64 },
    #[error("chain {bs:?} has determinant {got}, expected {expected}")]
    DeterminantMismatch { bs: Vec<u64>, got: BigInt, expected: u64 },
    #[error("chain vertex {vertex} out of range for a chain of length {len}")]
    InvalidVertex { vertex: usize, len: usize },
    #[error("invariant monomial x^{a} y^{b} has non-integral value {numerator}/{n} at vertex {vertex}")]
    NonIntegralValuationOnInvariantMonomial {
        a: u64,
        b: u64,
        vertex: usize,
        numerator: u64,
        n: u64,
    },
    #[error("invalid family {0:?}")]
    InvalidFamilyIndex(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Which chain endpoint the strict transform of `{x = 0}` meets; `{y = 0}`
/// meets the other one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    First,
    Last,
}

/// Fixed by the `(5, 3)` check in the tests: with the action
/// `(ζx, ζ^q y)` and `n/q = [b_1, …, b_k]`, `{x = 0}` meets `E_k`.
pub const X_AXIS_ENDPOINT: Endpoint = Endpoint::Last;

/// `n/q = b_1 − 1/(b_2 − 1/(… − 1/b_k))` with every `b_i ≥ 2`.
pub fn hj_expansion(n: u64, q: u64) -> Result<Vec<u64>, OracleError> {
    if n < 2 || q == 0 || q >= n || n.gcd(&q) != 1 {
        return Err(OracleError::InvalidParameters { n, q });
    }
    let (mut num, mut den) = (n, q);
    let mut out = Vec::new();
    while den != 0 {
        let b = num.div_ceil(den);
        out.push(b);
        (num, den) = (den, b * den - num);
    }
    Ok(out)
}

/// Evaluates `[b_1, …, b_k]` back to a rational.
pub fn evaluate_continued_fraction(bs: &[u64]) -> BigRational {
    let mut acc: Option<BigRational> = None;
    for &b in bs.iter().rev() {
        let b = BigRational::from_integer(BigInt::from(b));
        acc = Some(match acc {
            None => b,
            Some(tail) => b - tail.recip(),
        });
    }
    acc.unwrap_or_else(BigRational::zero)
}

/// Chain with self-intersections `−b_1, …, −b_k`. When `expected_det` is
/// given, the determinant of `−I` is checked against it.
pub fn build_chain_graph(bs: &[u64], expected_det: Option<u64>) -> Result<ResolutionGraph, OracleError> {
    let selfint: Vec<i64> = bs.iter().map(|&b| -(b as i64)).collect();
    let g = ResolutionGraph::chain(&selfint);
    if let Some(n) = expected_det {
        let got = linalg::determinant(&g.neg_intersection_matrix());
        if got != BigInt::from(n) {
            return Err(OracleError::DeterminantMismatch {
                bs: bs.to_vec(),
                got,
                expected: n,
            });
        }
    }
    Ok(g)
}

/// A cyclic quotient singularity and one chain vertex carrying the valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicQuotientSpec {
    pub n: u64,
    pub q: u64,
    /// 0-based index into the chain.
    pub vertex: usize,
    pub degree_bound: u64,
}

impl CyclicQuotientSpec {
    pub fn chain(&self) -> Result<ResolutionGraph, OracleError> {
        let bs = hj_expansion(self.n, self.q)?;
        if self.vertex >= bs.len() {
            return Err(OracleError::InvalidVertex {
                vertex: self.vertex,
                len: bs.len(),
            });
        }
        build_chain_graph(&bs, Some(self.n))
    }
}

/// `Σ_v #{invariant x^a y^b of value v} t^v` up to the degree bound.
pub fn monomial_poincare_s1(spec: &CyclicQuotientSpec) -> Result<IntSeries, OracleError> {
    monomial_poincare_with(spec, X_AXIS_ENDPOINT)
}

fn monomial_poincare_with(spec: &CyclicQuotientSpec, x_axis: Endpoint) -> Result<IntSeries, OracleError> {
    let g = spec.chain()?;
    let n = spec.n;
    let k = g.len();
    let m = linalg::inverse(&g.neg_intersection_matrix()).map_err(EngineError::from)?;
    // integer weights: n·m, so that the value of x^a y^b is (a·wx + b·wy)/n
    let weight = |col: usize| -> u64 {
        (&m[(spec.vertex, col)] * BigRational::from_integer(BigInt::from(n)))
            .to_integer()
            .to_u64()
            .expect("positive weight")
    };
    let (x_col, y_col) = match x_axis {
        Endpoint::First => (0, k - 1),
        Endpoint::Last => (k - 1, 0),
    };
    let (wx, wy) = (weight(x_col), weight(y_col));
    let limit = spec.degree_bound * n;

    let mut counts = vec![0u64; spec.degree_bound as usize + 1];
    let mut a = 0;
    while a * wx <= limit {
        let mut b = 0;
        while a * wx + b * wy <= limit {
            if (a + spec.q * b).is_multiple_of(n) {
                let numerator = a * wx + b * wy;
                if numerator % n != 0 {
                    return Err(OracleError::NonIntegralValuationOnInvariantMonomial {
                        a,
                        b,
                        vertex: spec.vertex,
                        numerator,
                        n,
                    });
                }
                counts[(numerator / n) as usize] += 1;
            }
            b += 1;
        }
        a += 1;
    }
    let terms = counts
        .into_iter()
        .enumerate()
        .map(|(v, c)| (vec![v as u64], BigInt::from(c)));
    Ok(IntSeries::from_terms(
        default_variables("t", 1),
        1,
        spec.degree_bound,
        BigInt::one(),
        terms,
    )
    .map_err(EngineError::from)?)
}

/// Outcome of one oracle comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub spec: CyclicQuotientSpec,
    pub discrepancy: Option<Discrepancy>,
}

impl OracleVerdict {
    pub fn equal(&self) -> bool {
        self.discrepancy.is_none()
    }
}

/// Monomial count against `P` of the chain with the chosen vertex marked.
pub fn compare_with_formula(spec: &CyclicQuotientSpec) -> Result<OracleVerdict, OracleError> {
    let oracle = monomial_poincare_s1(spec)?;
    let graph = spec.chain()?.with_marked(vec![spec.vertex]);
    let engine = PoincareEngine::new(FiltrationSpec::new(&graph, Mode::Divisorial, spec.degree_bound)?)?;
    let formula = engine.p_series()?;
    let discrepancy = oracle.first_difference(&formula).map(|(exponent, l, r)| Discrepancy {
        exponent,
        lhs: l.cloned().unwrap_or_default(),
        rhs: r.cloned().unwrap_or_default(),
    });
    Ok(OracleVerdict {
        spec: *spec,
        discrepancy,
    })
}

/// Every chain vertex of `(n, q)` in order.
pub fn compare_all_vertices(n: u64, q: u64, degree_bound: u64) -> Result<Vec<OracleVerdict>, OracleError> {
    let len = hj_expansion(n, q)?.len();
    (0..len)
        .map(|vertex| {
            compare_with_formula(&CyclicQuotientSpec {
                n,
                q,
                vertex,
                degree_bound,
            })
        })
        .collect()
}

/// Every `(n, q)` with `2 <= n <= max_n`, `gcd(n, q) = 1`, every vertex.
pub fn sweep(max_n: u64, degree_bound: u64) -> Result<Vec<OracleVerdict>, OracleError> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for q in (1..n).filter(|q| n.gcd(q) == 1) {
            out.extend(compare_all_vertices(n, q, degree_bound)?);
        }
    }
    Ok(out)
}

/// The simply laced rational double point graphs, all curves `−2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdeType {
    A(usize),
    D(usize),
    E(usize),
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(n) => write!(f, "A_{n}"),
            AdeType::D(n) => write!(f, "D_{n}"),
            AdeType::E(n) => write!(f, "E_{n}"),
        }
    }
}

impl FromStr for AdeType {
    type Err = OracleError;

    /// `A3`, `A_3`, `d5`, `E_8`, …
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OracleError::InvalidFamilyIndex(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let rest = chars.as_str().trim_start_matches('_');
        let n: usize = rest.parse().map_err(|_| bad())?;
        let t = match letter {
            'A' => AdeType::A(n),
            'D' => AdeType::D(n),
            'E' => AdeType::E(n),
            _ => return Err(bad()),
        };
        ade_family(t)?;
        Ok(t)
    }
}

pub fn ade_family(t: AdeType) -> Result<ResolutionGraph, OracleError> {
    let invalid = || Err(OracleError::InvalidFamilyIndex(t.to_string()));
    let (chain_len, extra_at) = match t {
        AdeType::A(n) if n >= 1 => (n, None),
        // chain E1..E_{n-1}, last vertex attached to E_{n-2}
        AdeType::D(n) if n >= 4 => (n - 1, Some(n - 3)),
        // chain E1..E_{n-1}, last vertex attached to E3
        AdeType::E(n) if (6..=8).contains(&n) => (n - 1, Some(2)),
        _ => return invalid(),
    };
    let mut g = ResolutionGraph::chain(&vec![-2; chain_len]);
    if let Some(at) = extra_at {
        let idx = g.len();
        g.vertices.push(Vertex {
            id: format!("E{}", idx + 1),
            self_intersection: -2,
        });
        g.edges.push((at, idx));
    }
    Ok(g)
}
