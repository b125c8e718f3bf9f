//! The discriminant group `G = coker(I)`, its characters, and the
//! representation ring `R(G)` as the group ring on characters.
//!
//! Characters are stored exactly as rotation numbers in `Q/Z`: a character
//! `χ` with `χ(g) = exp(2πi·r)` is kept as the reduced fraction `r ∈ [0, 1)`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{IntMatrix, RatMatrix, SmithDecomposition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterError {
    #[error("product of invariant factors {product} differs from the determinant {det}")]
    OrderMismatch { product: BigInt, det: BigInt },
    #[error("invariant factor {0} does not fit in 64 bits")]
    GroupTooLarge(BigInt),
    #[error("order of g_{vertex}: {from_m} from the m-matrix but {from_cokernel} in the cokernel")]
    OrderDisagreement {
        vertex: usize,
        from_m: u64,
        from_cokernel: u64,
    },
    #[error("character alpha_{0} does not vanish on the image of I")]
    IllDefinedCharacter(usize),
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
}

/// `G ≅ ⊕ Z/n_j` together with the images of the basis vectors `e_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    invariant_factors: Vec<u64>,
    order: BigInt,
    /// `generator_coords[σ][j]`: the `j`-th coordinate of `g_σ`.
    generator_coords: Vec<Vec<u64>>,
    /// Preimage in `Z^Γ` of the `j`-th invariant-factor generator.
    lifts: Vec<Vec<BigInt>>,
}

impl AbelianGroup {
    /// Reads `G = Z^Γ / Im M` off a Smith decomposition `U·M·V = D`: the
    /// map `x ↦ U x` identifies the cokernel with `⊕ Z/D_jj`.
    pub fn from_smith(snf: &SmithDecomposition, det: &BigInt) -> Result<Self, CharacterError> {
        let diag = snf.diagonal();
        let positions: Vec<usize> = (0..diag.len()).filter(|&j| !diag[j].is_one()).collect();
        let invariant_factors = positions
            .iter()
            .map(|&j| {
                diag[j]
                    .to_u64()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| CharacterError::GroupTooLarge(diag[j].clone()))
            })
            .collect::<Result<Vec<u64>, _>>()?;
        let product: BigInt = invariant_factors.iter().map(|&n| BigInt::from(n)).product();
        if &product != det {
            return Err(CharacterError::OrderMismatch {
                product,
                det: det.clone(),
            });
        }
        let n = snf.u.ncols();
        let generator_coords = (0..n)
            .map(|s| {
                positions
                    .iter()
                    .zip(&invariant_factors)
                    .map(|(&j, &nj)| residue(&snf.u[(j, s)], nj))
                    .collect()
            })
            .collect();
        let lifts = positions.iter().map(|&j| snf.u_inv.column(j)).collect();
        Ok(Self {
            invariant_factors,
            order: det.clone(),
            generator_coords,
            lifts,
        })
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> &BigInt {
        &self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn num_generators(&self) -> usize {
        self.generator_coords.len()
    }

    pub fn generator_coords(&self, vertex: usize) -> &[u64] {
        &self.generator_coords[vertex]
    }

    /// Order of an element of `⊕ Z/n_j` given by its coordinates.
    pub fn element_order(&self, coords: &[u64]) -> u64 {
        self.invariant_factors
            .iter()
            .zip(coords)
            .fold(1, |acc, (&n, &c)| acc.lcm(&(n / n.gcd(&c))))
    }

    /// Lcm of the denominators of column σ of `m`.
    pub fn order_from_m(&self, m: &RatMatrix, vertex: usize) -> Result<u64, CharacterError> {
        if vertex >= m.size() {
            return Err(CharacterError::UnknownVertex(vertex));
        }
        let lcm = (0..m.size())
            .map(|r| m[(r, vertex)].denom().clone())
            .fold(BigInt::one(), |acc, q| acc.lcm(&q));
        lcm.to_u64().ok_or(CharacterError::GroupTooLarge(lcm))
    }

    /// Order of `g_σ` in `⊕ Z/n_j`.
    pub fn order_in_cokernel(&self, vertex: usize) -> Result<u64, CharacterError> {
        self.generator_coords
            .get(vertex)
            .map(|c| self.element_order(c))
            .ok_or(CharacterError::UnknownVertex(vertex))
    }

    /// Order `d_σ` of `g_σ`; both routes must agree.
    pub fn generator_order(&self, m: &RatMatrix, vertex: usize) -> Result<u64, CharacterError> {
        let from_m = self.order_from_m(m, vertex)?;
        let from_cokernel = self.order_in_cokernel(vertex)?;
        if from_m != from_cokernel {
            return Err(CharacterError::OrderDisagreement {
                vertex,
                from_m,
                from_cokernel,
            });
        }
        Ok(from_m)
    }
}

fn residue(x: &BigInt, n: u64) -> u64 {
    x.mod_floor(&BigInt::from(n))
        .to_u64()
        .expect("residue below a u64 modulus")
}

fn frac_part(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// A one-dimensional representation of `G`.
#[derive(Clone)]
pub struct Character {
    group: Arc<AbelianGroup>,
    /// Rotation number of the value on each `g_δ`, in `[0, 1)`.
    rotations: Vec<BigRational>,
    /// Value on the `j`-th invariant-factor generator is `exp(2πi·a_j/n_j)`.
    coords: Vec<u64>,
}

impl Character {
    pub fn trivial(group: &Arc<AbelianGroup>) -> Self {
        Self::from_coords(group, vec![0; group.invariant_factors.len()])
    }

    /// The character with the given canonical coordinates.
    pub fn from_coords(group: &Arc<AbelianGroup>, coords: Vec<u64>) -> Self {
        let rotations = (0..group.num_generators())
            .map(|s| {
                let g = &group.generator_coords[s];
                let r = group
                    .invariant_factors
                    .iter()
                    .zip(&coords)
                    .zip(g)
                    .fold(BigRational::zero(), |acc, ((&n, &a), &c)| {
                        acc + BigRational::new(BigInt::from(a) * c, BigInt::from(n))
                    });
                frac_part(&r)
            })
            .collect();
        let coords = coords
            .iter()
            .zip(&group.invariant_factors)
            .map(|(&a, &n)| a % n)
            .collect();
        Self {
            group: Arc::clone(group),
            rotations,
            coords,
        }
    }

    /// `α_σ` with `α_σ(g_δ) = exp(-2πi·m_{σδ})`.
    ///
    /// `intersection` is the matrix `I` whose cokernel is the group; it is
    /// used to check that the character vanishes on `Im I`.
    pub fn alpha(
        group: &Arc<AbelianGroup>,
        m: &RatMatrix,
        intersection: &IntMatrix,
        vertex: usize,
    ) -> Result<Self, CharacterError> {
        let n = m.size();
        if vertex >= n {
            return Err(CharacterError::UnknownVertex(vertex));
        }
        let rotations: Vec<BigRational> = (0..n).map(|d| frac_part(&-&m[(vertex, d)])).collect();

        // well-defined on the cokernel
        for rho in 0..n {
            let s: BigRational = (0..n)
                .map(|d| &rotations[d] * BigRational::from_integer(intersection[(d, rho)].clone()))
                .sum();
            if !s.is_integer() {
                return Err(CharacterError::IllDefinedCharacter(vertex));
            }
        }

        let mut coords = Vec::with_capacity(group.invariant_factors.len());
        for (lift, &nj) in group.lifts.iter().zip(&group.invariant_factors) {
            let value: BigRational = lift
                .iter()
                .zip(&rotations)
                .map(|(c, r)| r * BigRational::from_integer(c.clone()))
                .sum();
            let scaled = frac_part(&value) * BigRational::from_integer(BigInt::from(nj));
            if !scaled.is_integer() {
                return Err(CharacterError::IllDefinedCharacter(vertex));
            }
            coords.push(residue(&scaled.to_integer(), nj));
        }

        let ch = Self::from_coords(group, coords);
        if ch.rotations != rotations {
            return Err(CharacterError::IllDefinedCharacter(vertex));
        }
        Ok(ch)
    }

    pub fn group(&self) -> &Arc<AbelianGroup> {
        &self.group
    }

    pub fn rotations(&self) -> &[BigRational] {
        &self.rotations
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_trivial(&self) -> bool {
        self.coords.iter().all(|&a| a == 0)
    }

    pub fn order(&self) -> u64 {
        self.group.element_order(&self.coords)
    }

    /// Pointwise product: rotation numbers add modulo 1.
    pub fn mul(&self, other: &Character) -> Result<Character, CharacterError> {
        if !same_group(&self.group, &other.group) {
            return Err(CharacterError::GroupMismatch);
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(&self.group.invariant_factors)
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect();
        let rotations = self
            .rotations
            .iter()
            .zip(&other.rotations)
            .map(|(a, b)| frac_part(&(a + b)))
            .collect();
        Ok(Character {
            group: Arc::clone(&self.group),
            rotations,
            coords,
        })
    }

    /// Rotation numbers as reduced fractions, `"0"` for the trivial value.
    pub fn rotation_strings(&self) -> Vec<String> {
        self.rotations.iter().map(|r| r.to_string()).collect()
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.coords == other.coords
    }
}

impl Eq for Character {}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_coords(&self.group, &self.coords))
    }
}

fn same_group(a: &Arc<AbelianGroup>, b: &Arc<AbelianGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `[a_1/n_1,…]` with each fraction reduced; `0` for a zero coordinate.
pub fn format_coords(group: &AbelianGroup, coords: &[u64]) -> String {
    let parts: Vec<String> = coords
        .iter()
        .zip(&group.invariant_factors)
        .map(|(&a, &n)| {
            if a == 0 {
                "0".to_string()
            } else {
                let g = a.gcd(&n);
                format!("{}/{}", a / g, n / g)
            }
        })
        .collect();
    format!("[{}]", parts.join(","))
}

/// A virtual representation `Σ n_χ·χ`, zero coefficients never stored.
#[derive(Clone)]
pub struct GroupRingElement {
    group: Arc<AbelianGroup>,
    terms: BTreeMap<Vec<u64>, BigInt>,
}

impl GroupRingElement {
    pub fn zero(group: &Arc<AbelianGroup>) -> Self {
        Self {
            group: Arc::clone(group),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(group: &Arc<AbelianGroup>) -> Self {
        Self::from_character(&Character::trivial(group))
    }

    pub fn from_character(ch: &Character) -> Self {
        Self::from_terms(&ch.group, [(ch.coords.clone(), BigInt::one())])
    }

    /// Builds an element from `(coords, coefficient)` pairs; coordinates are
    /// reduced modulo the invariant factors and repeated keys are summed.
    pub fn from_terms(
        group: &Arc<AbelianGroup>,
        terms: impl IntoIterator<Item = (Vec<u64>, BigInt)>,
    ) -> Self {
        let mut out = Self::zero(group);
        for (coords, c) in terms {
            let coords = coords
                .iter()
                .zip(&group.invariant_factors)
                .map(|(&a, &n)| a % n)
                .collect();
            out.add_term(coords, c);
        }
        out
    }

    fn add_term(&mut self, coords: Vec<u64>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(coords) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn group(&self) -> &Arc<AbelianGroup> {
        &self.group
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms sorted lexicographically by coordinates.
    pub fn terms(&self) -> impl Iterator<Item = (&[u64], &BigInt)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, coords: &[u64]) -> BigInt {
        self.terms.get(coords).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(k, v)| v.is_one() && k.iter().all(|&a| a == 0))
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharacterError> {
        if !same_group(&self.group, &other.group) {
            return Err(CharacterError::GroupMismatch);
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scalar_mul(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(&self.group);
        }
        Self {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * n)).collect(),
        }
    }

    /// Convolution of coefficients over the character group.
    pub fn mul(&self, other: &Self) -> Result<Self, CharacterError> {
        if !same_group(&self.group, &other.group) {
            return Err(CharacterError::GroupMismatch);
        }
        let mut out = Self::zero(&self.group);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let key = ka
                    .iter()
                    .zip(kb)
                    .zip(&self.group.invariant_factors)
                    .map(|((&a, &b), &n)| (a + b) % n)
                    .collect();
                out.add_term(key, va * vb);
            }
        }
        Ok(out)
    }

    /// Dimension of the virtual representation: the sum of coefficients.
    pub fn reduce_dim(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// `Σ c·[a_1/n_1,…]` with unit coefficients shown as just the bracket.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, v)) in self.terms.iter().enumerate() {
            let bracket = format_coords(&self.group, k);
            let (neg, abs) = (v.is_negative(), v.abs());
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if abs.is_one() {
                out.push_str(&bracket);
            } else {
                out.push_str(&format!("{abs}·{bracket}"));
            }
        }
        out
    }
}

impl PartialEq for GroupRingElement {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.terms == other.terms
    }
}

impl Eq for GroupRingElement {}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::ResolutionGraph;
    use crate::linalg::{determinant, inverse, smith_normal_form};

    pub(crate) struct Fixture {
        pub group: Arc<AbelianGroup>,
        pub m: RatMatrix,
        pub i: IntMatrix,
    }

    pub(crate) fn fixture(g: &ResolutionGraph) -> Fixture {
        let neg = g.neg_intersection_matrix();
        let i = g.intersection_matrix();
        let d = determinant(&neg);
        let snf = smith_normal_form(&i).unwrap();
        let group = Arc::new(AbelianGroup::from_smith(&snf, &d).unwrap());
        let m = inverse(&neg).unwrap();
        Fixture { group, m, i }
    }

    fn e8() -> ResolutionGraph {
        let mut g = ResolutionGraph::chain(&[-2; 7]);
        g.vertices.push(crate::graph::Vertex {
            id: "E8".into(),
            self_intersection: -2,
        });
        g.edges.push((2, 7));
        g
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    /// Z/n with a single generator mapping to 1.
    fn cyclic(n: u64) -> Arc<AbelianGroup> {
        Arc::new(AbelianGroup {
            invariant_factors: vec![n],
            order: BigInt::from(n),
            generator_coords: vec![vec![1]],
            lifts: vec![vec![BigInt::one()]],
        })
    }

    #[test]
    fn group_structure_examples() {
        let a1 = fixture(&ResolutionGraph::chain(&[-2]));
        assert_eq!(a1.group.invariant_factors(), &[2]);
        assert_eq!(a1.group.generator_coords(0), &[1]);

        let a2 = fixture(&ResolutionGraph::chain(&[-2, -2]));
        assert_eq!(a2.group.invariant_factors(), &[3]);

        let e8 = fixture(&e8());
        assert!(e8.group.is_trivial());
        assert_eq!(e8.group.order(), &BigInt::one());
    }

    #[test]
    fn order_mismatch_detected() {
        let snf = smith_normal_form(&IntMatrix::from_rows(&[vec![-2]])).unwrap();
        let err = AbelianGroup::from_smith(&snf, &BigInt::from(3)).unwrap_err();
        assert!(matches!(err, CharacterError::OrderMismatch { .. }));
    }

    #[test]
    fn element_order_examples() {
        let a1 = fixture(&ResolutionGraph::chain(&[-2]));
        assert_eq!(a1.group.generator_order(&a1.m, 0), Ok(2));
        let a2 = fixture(&ResolutionGraph::chain(&[-2, -2]));
        assert_eq!(a2.group.generator_order(&a2.m, 0), Ok(3));
        assert_eq!(a2.group.generator_order(&a2.m, 1), Ok(3));
        let e8 = fixture(&e8());
        for s in 0..8 {
            assert_eq!(e8.group.generator_order(&e8.m, s), Ok(1));
        }
    }

    #[test]
    fn non_cyclic_group() {
        // D4: G = Z/2 + Z/2, leaves have order 2
        let mut g = ResolutionGraph::chain(&[-2, -2]);
        for id in ["L2", "L3"] {
            g.vertices.push(crate::graph::Vertex {
                id: id.into(),
                self_intersection: -2,
            });
        }
        g.edges.push((0, 2));
        g.edges.push((0, 3));
        let f = fixture(&g);
        assert_eq!(f.group.invariant_factors(), &[2, 2]);
        for s in 0..4 {
            let d = f.group.generator_order(&f.m, s).unwrap();
            assert_eq!(d, if s == 0 { 1 } else { 2 });
        }
    }

    #[test]
    fn alpha_examples() {
        let a1 = fixture(&ResolutionGraph::chain(&[-2]));
        let a = Character::alpha(&a1.group, &a1.m, &a1.i, 0).unwrap();
        assert_eq!(a.rotations(), &[rat(1, 2)]);
        assert!(!a.is_trivial());

        let a2 = fixture(&ResolutionGraph::chain(&[-2, -2]));
        let a = Character::alpha(&a2.group, &a2.m, &a2.i, 0).unwrap();
        assert_eq!(a.rotations(), &[rat(1, 3), rat(2, 3)]);
        assert_eq!(a.rotation_strings(), vec!["1/3", "2/3"]);

        let e8 = fixture(&e8());
        for s in 0..8 {
            let a = Character::alpha(&e8.group, &e8.m, &e8.i, s).unwrap();
            assert!(a.is_trivial());
            assert!(a.rotations().iter().all(|r| r.is_zero()));
        }
    }

    #[test]
    fn char_mul_examples() {
        let z2 = cyclic(2);
        let chi = Character::from_coords(&z2, vec![1]);
        assert!(chi.mul(&chi).unwrap().is_trivial());
        let triv = Character::trivial(&z2);
        assert_eq!(triv.mul(&chi).unwrap(), chi);

        let z3 = cyclic(3);
        let third = Character::from_coords(&z3, vec![1]);
        let sq = third.mul(&third).unwrap();
        assert_eq!(sq.rotations(), &[rat(2, 3)]);

        assert_eq!(chi.mul(&third).unwrap_err(), CharacterError::GroupMismatch);
    }

    #[test]
    fn group_ring_examples() {
        let z2 = cyclic(2);
        let one = BigInt::one();
        let x = GroupRingElement::from_terms(&z2, [(vec![0], one.clone()), (vec![1], one.clone())]);
        let sq = x.mul(&x).unwrap();
        assert_eq!(
            sq,
            GroupRingElement::from_terms(&z2, [(vec![0], BigInt::from(2)), (vec![1], BigInt::from(2))])
        );

        let unit = GroupRingElement::one(&z2);
        assert_eq!(x.mul(&unit).unwrap(), x);

        let y = GroupRingElement::from_terms(&z2, [(vec![0], one.clone()), (vec![1], -one)]);
        assert!(y.mul(&x).unwrap().is_zero());

        let other = GroupRingElement::one(&cyclic(3));
        assert_eq!(x.add(&other).unwrap_err(), CharacterError::GroupMismatch);
    }

    #[test]
    fn reduce_dim_examples() {
        let z2 = cyclic(2);
        let x = GroupRingElement::from_terms(&z2, [(vec![0], BigInt::from(2)), (vec![1], BigInt::from(3))]);
        assert_eq!(x.reduce_dim(), BigInt::from(5));
        assert_eq!(GroupRingElement::zero(&z2).reduce_dim(), BigInt::zero());
        let y = GroupRingElement::from_terms(&z2, [(vec![1], BigInt::from(-1))]);
        assert_eq!(y.reduce_dim(), BigInt::from(-1));
    }

    #[test]
    fn render_group_ring() {
        let z2 = cyclic(2);
        let x = GroupRingElement::from_terms(&z2, [(vec![0], BigInt::from(2)), (vec![1], BigInt::from(-1))]);
        assert_eq!(x.render(), "2·[0] - [1/2]");
        let z4 = cyclic(4);
        let y = GroupRingElement::from_terms(&z4, [(vec![2], BigInt::one())]);
        assert_eq!(y.render(), "[1/2]");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn group() -> Arc<AbelianGroup> {
            // Z/2 + Z/6 with two generators
            Arc::new(AbelianGroup {
                invariant_factors: vec![2, 6],
                order: BigInt::from(12),
                generator_coords: vec![vec![1, 0], vec![0, 1]],
                lifts: vec![
                    vec![BigInt::one(), BigInt::zero()],
                    vec![BigInt::zero(), BigInt::one()],
                ],
            })
        }

        fn coords() -> impl Strategy<Value = Vec<u64>> {
            (0u64..2, 0u64..6).prop_map(|(a, b)| vec![a, b])
        }

        fn element() -> impl Strategy<Value = Vec<(Vec<u64>, i64)>> {
            proptest::collection::vec((coords(), -3i64..=3), 0..5)
        }

        fn build(g: &Arc<AbelianGroup>, t: Vec<(Vec<u64>, i64)>) -> GroupRingElement {
            GroupRingElement::from_terms(g, t.into_iter().map(|(k, v)| (k, BigInt::from(v))))
        }

        proptest! {
            #[test]
            fn char_mul_assoc_comm(a in coords(), b in coords(), c in coords()) {
                let g = group();
                let (a, b, c) = (
                    Character::from_coords(&g, a),
                    Character::from_coords(&g, b),
                    Character::from_coords(&g, c),
                );
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                prop_assert_eq!(
                    a.mul(&b).unwrap().mul(&c).unwrap(),
                    a.mul(&b.mul(&c).unwrap()).unwrap()
                );
                prop_assert_eq!(Character::trivial(&g).mul(&a).unwrap(), a.clone());
                // rotations stay consistent with coordinates
                let prod = a.mul(&b).unwrap();
                let rebuilt = Character::from_coords(&g, prod.coords().to_vec());
                prop_assert_eq!(prod.rotations(), rebuilt.rotations());
            }

            #[test]
            fn reduce_dim_is_ring_hom(x in element(), y in element()) {
                let g = group();
                let (x, y) = (build(&g, x), build(&g, y));
                prop_assert_eq!(x.mul(&y).unwrap().reduce_dim(), x.reduce_dim() * y.reduce_dim());
                prop_assert_eq!(x.add(&y).unwrap().reduce_dim(), x.reduce_dim() + y.reduce_dim());
                prop_assert!(x.terms().all(|(_, v)| !v.is_zero()));
            }
        }
    }
}
