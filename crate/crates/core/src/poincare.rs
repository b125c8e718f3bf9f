//! Assembly of the Poincaré series of a resolution graph:
//!
//! * `Q(t) = Π_σ (1 − t^{m_σ})^{−χ(Ė_σ)}`, a fractional series over scale `d`;
//! * `P`, the terms of `Q` with integral exponents in every coordinate of
//!   the dual lattice (with all vertices marked, simply `Int Q`);
//! * the equivariant `P^G(t) = Π_σ (1 − α_σ t^{d·m_σ})^{−χ(Ė_σ)}` with
//!   `(d·m_σ)_i = d_i m_{iσ}`;
//! * the curve version, where every component enters with `χ(E̊_i)` and
//!   `T_j` is replaced by the product of the branch variables on `E_j`.
//!
//! The identity `red P^G(t_1, …, t_s) = Q(t_1^{d_1}, …, t_s^{d_s})` and the
//! two descriptions of the orders `d_σ` are exposed as checks.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::character::{AbelianGroup, Character, CharacterError, GroupRingElement};
use crate::graph::{Mode, ResolutionGraph, ValidatedGraph, ValidationOptions, ValidationReport};
use crate::linalg::{self, IntMatrix, LinalgError, RatMatrix, SmithDecomposition};
use crate::series::{default_variables, Coefficient, Exponent, MonomialSubstitution, SeriesError, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid graph:\n{0}")]
    Validation(#[from] ValidationReport),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("exponent d_{row}·m[{row}][{col}] = {value} is not an integer")]
    NonIntegralEquivariantExponent {
        row: usize,
        col: usize,
        value: BigRational,
    },
    #[error("{requested} series requested on a {mode} filtration")]
    ModeMismatch { requested: &'static str, mode: Mode },
    #[error("determinant {0} does not fit in 64 bits")]
    DeterminantTooLarge(BigInt),
}

pub type IntSeries = TruncatedSeries<BigInt>;
pub type EquivariantSeries = TruncatedSeries<GroupRingElement>;

/// Everything derived from the intersection form alone.
#[derive(Clone, Debug)]
pub struct GraphInvariants {
    pub intersection: IntMatrix,
    pub neg_intersection: IntMatrix,
    /// `det(−I)`.
    pub det: BigInt,
    /// `m = (−I)^{−1}`.
    pub m: RatMatrix,
    /// Smith decomposition of `I` itself.
    pub smith: SmithDecomposition,
    pub group: Arc<AbelianGroup>,
    /// `d_σ` for every vertex.
    pub orders: Vec<u64>,
    /// `α_σ` for every vertex.
    pub alphas: Vec<Character>,
}

impl GraphInvariants {
    pub fn compute(graph: &ValidatedGraph) -> Result<Self, EngineError> {
        let intersection = graph.intersection_matrix();
        let neg_intersection = graph.neg_intersection_matrix();
        let det = linalg::determinant(&neg_intersection);
        let m = linalg::inverse(&neg_intersection)?;
        let smith = linalg::smith_normal_form(&intersection)?;
        let group = Arc::new(AbelianGroup::from_smith(&smith, &det)?);
        let orders = (0..graph.len())
            .map(|s| group.generator_order(&m, s))
            .collect::<Result<Vec<_>, _>>()?;
        let alphas = (0..graph.len())
            .map(|s| Character::alpha(&group, &m, &intersection, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            intersection,
            neg_intersection,
            det,
            m,
            smith,
            group,
            orders,
            alphas,
        })
    }

    pub fn det_u64(&self) -> Result<u64, EngineError> {
        self.det
            .to_u64()
            .ok_or_else(|| EngineError::DeterminantTooLarge(self.det.clone()))
    }

    /// `d_row · m[row][col]`, required to be an integer.
    pub fn equivariant_exponent(&self, row: usize, col: usize) -> Result<u64, EngineError> {
        let value = &self.m[(row, col)] * BigRational::from_integer(BigInt::from(self.orders[row]));
        if !value.is_integer() {
            return Err(EngineError::NonIntegralEquivariantExponent { row, col, value });
        }
        value
            .to_integer()
            .to_u64()
            .ok_or_else(|| EngineError::DeterminantTooLarge(value.to_integer()))
    }

    /// Checks `d_i·m_{iσ} ∈ Z` over the whole matrix.
    pub fn check_equivariant_integrality(&self) -> Result<(), EngineError> {
        let n = self.m.size();
        for i in 0..n {
            for s in 0..n {
                self.equivariant_exponent(i, s)?;
            }
        }
        Ok(())
    }

    fn unit(&self) -> GroupRingElement {
        GroupRingElement::one(&self.group)
    }
}

/// A graph, which valuations to use, and the truncation degree.
#[derive(Clone, Debug)]
pub struct FiltrationSpec {
    graph: ValidatedGraph,
    mode: Mode,
    bound: u64,
}

impl FiltrationSpec {
    pub fn new(graph: &ResolutionGraph, mode: Mode, bound: u64) -> Result<Self, EngineError> {
        Self::with_options(graph, mode, bound, true)
    }

    pub fn with_options(
        graph: &ResolutionGraph,
        mode: Mode,
        bound: u64,
        check_rationality: bool,
    ) -> Result<Self, EngineError> {
        let opts = ValidationOptions {
            check_rationality,
            mode: Some(mode),
        };
        Ok(Self {
            graph: graph.validate(&opts)?,
            mode,
            bound,
        })
    }

    pub fn graph(&self) -> &ValidatedGraph {
        &self.graph
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }
}

/// First coefficient where the two sides of an identity disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub exponent: Exponent,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub lhs: IntSeries,
    pub rhs: IntSeries,
    pub discrepancy: Option<Discrepancy>,
}

impl ReductionReport {
    pub fn holds(&self) -> bool {
        self.discrepancy.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderCheck {
    pub vertex: usize,
    pub from_m: u64,
    pub from_cokernel: u64,
    pub divides_det: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    pub checks: Vec<OrderCheck>,
}

impl OrderReport {
    pub fn holds(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.from_m == c.from_cokernel && c.divides_det)
    }
}

/// Computes the series of one filtration. Holds no state besides the
/// spec and its derived invariants.
#[derive(Clone, Debug)]
pub struct PoincareEngine {
    spec: FiltrationSpec,
    invariants: GraphInvariants,
}

impl PoincareEngine {
    pub fn new(spec: FiltrationSpec) -> Result<Self, EngineError> {
        let invariants = GraphInvariants::compute(&spec.graph)?;
        Ok(Self { spec, invariants })
    }

    pub fn spec(&self) -> &FiltrationSpec {
        &self.spec
    }

    pub fn invariants(&self) -> &GraphInvariants {
        &self.invariants
    }

    fn graph(&self) -> &ResolutionGraph {
        self.spec.graph.graph()
    }

    fn require(&self, mode: Mode, requested: &'static str) -> Result<(), EngineError> {
        if self.spec.mode != mode {
            return Err(EngineError::ModeMismatch {
                requested,
                mode: self.spec.mode,
            });
        }
        Ok(())
    }

    fn euler(&self, vertex: usize, mode: Mode) -> i64 {
        self.graph()
            .euler_smooth_part(vertex, mode)
            .expect("vertex of a validated graph")
    }

    /// `m_{iσ}·d` over the marked components `i`.
    fn q_exponents(&self, sigma: usize) -> Exponent {
        self.graph()
            .marked
            .iter()
            .map(|&i| {
                let scaled = &self.invariants.m[(sigma, i)] * BigRational::from_integer(self.invariants.det.clone());
                debug_assert!(scaled.is_integer(), "m entries lie in (1/d)Z");
                scaled.to_integer().to_u64().expect("positive m entry")
            })
            .collect()
    }

    /// `Π_σ (1 − c_σ t^{m_σ})^{−χ_σ}` over scale `d`.
    fn q_product<C: Coefficient>(&self, unit: C, coefficient: impl Fn(usize) -> C) -> Result<TruncatedSeries<C>, EngineError> {
        self.require(Mode::Divisorial, "Q")?;
        let d = self.invariants.det_u64()?;
        let vars = default_variables("t", self.graph().marked.len());
        let bound = self.spec.bound;
        let mut acc = TruncatedSeries::one(vars.clone(), d, bound, unit)?;
        for s in 0..self.graph().len() {
            let chi = self.euler(s, Mode::Divisorial);
            if chi == 0 {
                continue;
            }
            let factor = TruncatedSeries::expand_factor(vars.clone(), d, bound, &coefficient(s), &self.q_exponents(s), -chi)?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// `Q` over scale `d` with integer coefficients.
    pub fn q_series(&self) -> Result<IntSeries, EngineError> {
        self.q_product(BigInt::one(), |_| BigInt::one())
    }

    /// `Q` with each factor tagged by the class `α_σ` of the dual cycle
    /// `E*_σ` in `G`. Reducing the coefficients gives back `Q`.
    pub fn q_series_graded(&self) -> Result<EquivariantSeries, EngineError> {
        self.q_product(self.invariants.unit(), |s| GroupRingElement::from_character(&self.invariants.alphas[s]))
    }

    /// `P`: the terms of `Q` whose dual cycle `Σ n_σ E*_σ` is integral,
    /// i.e. whose class in `G` is trivial.
    ///
    /// Integrality of the marked exponents alone is weaker as soon as a
    /// vertex is unmarked (middle vertex of `A_3`: `Int Q = 1 + 3t + …`
    /// but `P = 1 + t + …`). With every vertex marked the two agree.
    pub fn p_series(&self) -> Result<IntSeries, EngineError> {
        let graded = self.q_series_graded()?;
        let trivial = vec![0; self.invariants.group.invariant_factors().len()];
        let p = graded.map_coefficients(BigInt::one(), |c| c.coefficient(&trivial));
        Ok(p.with_scale(1)?)
    }

    /// Exponent vector of the equivariant factor for `σ`, entry `i` being
    /// `d_i·m_{iσ}` over the marked components.
    pub fn equivariant_exponents(&self, sigma: usize) -> Result<Exponent, EngineError> {
        self.graph()
            .marked
            .iter()
            .map(|&i| self.invariants.equivariant_exponent(i, sigma))
            .collect()
    }

    /// Equivariant series over the marked components.
    pub fn pg_series(&self) -> Result<EquivariantSeries, EngineError> {
        self.require(Mode::Divisorial, "P^G")?;
        self.invariants.check_equivariant_integrality()?;
        let vars = default_variables("t", self.graph().marked.len());
        let bound = self.spec.bound;
        let mut acc = EquivariantSeries::one(vars.clone(), 1, bound, self.invariants.unit())?;
        for s in 0..self.graph().len() {
            let chi = self.euler(s, Mode::Divisorial);
            if chi == 0 {
                continue;
            }
            let exps = self.equivariant_exponents(s)?;
            let alpha = GroupRingElement::from_character(&self.invariants.alphas[s]);
            let factor = EquivariantSeries::expand_factor(vars.clone(), 1, bound, &alpha, &exps, -chi)?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// `T_j ↦ Π_{branches b on E_j} t_b`.
    pub fn branch_substitution(&self) -> MonomialSubstitution {
        let g = self.graph();
        let images = (0..g.len())
            .map(|j| {
                g.branches
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.attached_to == j)
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        MonomialSubstitution::new(default_variables("t", g.branches.len()), images)
            .expect("branch indices in range")
    }

    /// `T`-exponent of the curve factor for component `i`: `d_j·m_{ji}` on `T_j`.
    pub fn curve_factor_exponents(&self, i: usize) -> Result<Exponent, EngineError> {
        (0..self.graph().len())
            .map(|j| self.invariants.equivariant_exponent(j, i))
            .collect()
    }

    /// The curve-filtration series in the branch variables.
    ///
    /// Each factor's monomial is substituted before expansion, so that the
    /// truncation is taken in the grading of the branch variables.
    pub fn pg_curve_series(&self) -> Result<EquivariantSeries, EngineError> {
        self.require(Mode::Curve, "curve P^G")?;
        self.invariants.check_equivariant_integrality()?;
        let subst = self.branch_substitution();
        let vars = subst.targets.clone();
        let bound = self.spec.bound;
        let mut acc = EquivariantSeries::one(vars.clone(), 1, bound, self.invariants.unit())?;
        for i in 0..self.graph().len() {
            let chi = self.euler(i, Mode::Curve);
            if chi == 0 {
                continue;
            }
            let t_exps = subst.apply(&self.curve_factor_exponents(i)?)?;
            let alpha = GroupRingElement::from_character(&self.invariants.alphas[i]);
            let factor = EquivariantSeries::expand_factor(vars.clone(), 1, bound, &alpha, &t_exps, -chi)?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// The curve product before substitution, in `T_1 … T_|Γ|`, truncated
    /// at total `T`-degree `t_bound`.
    pub fn pg_curve_unsubstituted(&self, t_bound: u64) -> Result<EquivariantSeries, EngineError> {
        self.require(Mode::Curve, "curve P^G")?;
        let vars = default_variables("T", self.graph().len());
        let mut acc = EquivariantSeries::one(vars.clone(), 1, t_bound, self.invariants.unit())?;
        for i in 0..self.graph().len() {
            let chi = self.euler(i, Mode::Curve);
            if chi == 0 {
                continue;
            }
            let exps = self.curve_factor_exponents(i)?;
            let alpha = GroupRingElement::from_character(&self.invariants.alphas[i]);
            let factor = EquivariantSeries::expand_factor(vars.clone(), 1, t_bound, &alpha, &exps, -chi)?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// Compares `red P^G` with `Q(t_1^{d_1}, …, t_s^{d_s})`.
    ///
    /// Rescaling by `d_i ≥ 1` never lowers the total degree of a term, so
    /// every term of the rescaled `Q` of degree at most `N` comes from a
    /// term of `Q` of degree at most `N`: computing `Q` at the same bound
    /// loses nothing.
    pub fn check_reduction(&self) -> Result<ReductionReport, EngineError> {
        let lhs = self.pg_series()?.reduce_coefficients();
        let factors: Vec<u64> = self
            .graph()
            .marked
            .iter()
            .map(|&i| self.invariants.orders[i])
            .collect();
        let rhs = self.q_series()?.rescale_variables(&factors)?.with_scale(1)?;
        let discrepancy = lhs.first_difference(&rhs).map(|(exponent, l, r)| Discrepancy {
            exponent,
            lhs: l.cloned().unwrap_or_default(),
            rhs: r.cloned().unwrap_or_default(),
        });
        Ok(ReductionReport { lhs, rhs, discrepancy })
    }

    /// Recomputes every `d_σ` both ways and checks `d_σ | d`.
    pub fn check_orders(&self) -> Result<OrderReport, EngineError> {
        let inv = &self.invariants;
        let checks = (0..self.graph().len())
            .map(|s| {
                let from_m = inv.group.order_from_m(&inv.m, s)?;
                let from_cokernel = inv.group.order_in_cokernel(s)?;
                Ok(OrderCheck {
                    vertex: s,
                    from_m,
                    from_cokernel,
                    divides_det: inv.det.is_multiple_of(&BigInt::from(from_m)),
                })
            })
            .collect::<Result<Vec<_>, CharacterError>>()?;
        Ok(OrderReport { checks })
    }
}

impl EquivariantSeries {
    /// Every coefficient is an integer multiple of the trivial character.
    pub fn is_trivially_graded(&self) -> bool {
        self.terms().all(|(_, c)| c.terms().all(|(k, _)| k.iter().all(|&a| a == 0)))
    }
}
