//! Sparse truncated power series in `t_1^{1/d}, …, t_s^{1/d}`.
//!
//! Exponents are stored as integer numerators over one scale `d` per series.
//! A term survives truncation iff the sum of its numerators is at most
//! `bound · d`, i.e. its total degree in the `t` variables is at most `bound`.
//! Coefficients are generic over [`Coefficient`]: plain integers for `P`
//! and `Q`, group-ring elements for the equivariant series.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::character::GroupRingElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("factor base has zero exponent vector")]
    ZeroExponentVector,
    #[error("series are incompatible: {0}")]
    IncompatibleSeries(String),
    #[error("exponent {numerator}/{scale} of {variable} is not an integer under substitution")]
    FractionalExponentUnderSubstitution {
        variable: String,
        numerator: u64,
        scale: u64,
    },
    #[error("exponent vector {exponents:?} has {got} entries, series has {expected} variables")]
    Arity {
        exponents: Vec<u64>,
        got: usize,
        expected: usize,
    },
    #[error("substitution target index {0} out of range")]
    UnknownTarget(usize),
    #[error("scale must be positive")]
    ZeroScale,
    #[error("exponent overflow")]
    Overflow,
}

/// Ring of coefficients a series can carry.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Same ambient ring (same group for group-ring elements).
    fn compatible(&self, other: &Self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, n: &BigInt) -> Self;
    /// Text form used inside series rendering.
    fn render(&self) -> String;
    fn is_negative_scalar(&self) -> bool {
        false
    }
}

impl Coefficient for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn compatible(&self, _: &Self) -> bool {
        true
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, n: &BigInt) -> Self {
        self * n
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn is_negative_scalar(&self) -> bool {
        self.is_negative()
    }
}

// Group mismatches are ruled out by `compatible` at series level.
impl Coefficient for GroupRingElement {
    fn is_zero(&self) -> bool {
        GroupRingElement::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        GroupRingElement::zero(self.group())
    }
    fn one_like(&self) -> Self {
        GroupRingElement::one(self.group())
    }
    fn compatible(&self, other: &Self) -> bool {
        self.zero_like() == other.zero_like()
    }
    fn add(&self, other: &Self) -> Self {
        GroupRingElement::add(self, other).expect("coefficients from one group")
    }
    fn mul(&self, other: &Self) -> Self {
        GroupRingElement::mul(self, other).expect("coefficients from one group")
    }
    fn scale(&self, n: &BigInt) -> Self {
        self.scalar_mul(n)
    }
    fn render(&self) -> String {
        GroupRingElement::render(self)
    }
}

/// Exponent numerators; the scale lives on the series.
pub type Exponent = Vec<u64>;

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    variables: Vec<String>,
    scale: u64,
    bound: u64,
    /// The unit of the coefficient ring, kept so that empty series still
    /// know their ring.
    unit: C,
    terms: BTreeMap<Exponent, C>,
}

/// `t1, …, ts`.
pub fn default_variables(prefix: &str, s: usize) -> Vec<String> {
    (1..=s).map(|i| format!("{prefix}{i}")).collect()
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn zero(variables: Vec<String>, scale: u64, bound: u64, unit: C) -> Result<Self, SeriesError> {
        if scale == 0 {
            return Err(SeriesError::ZeroScale);
        }
        Ok(Self {
            variables,
            scale,
            bound,
            unit,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(variables: Vec<String>, scale: u64, bound: u64, unit: C) -> Result<Self, SeriesError> {
        let mut s = Self::zero(variables, scale, bound, unit)?;
        let key = vec![0; s.variables.len()];
        let c = s.unit.clone();
        s.terms.insert(key, c);
        Ok(s)
    }

    /// Builds a series from explicit terms, truncating and merging repeats.
    pub fn from_terms(
        variables: Vec<String>,
        scale: u64,
        bound: u64,
        unit: C,
        terms: impl IntoIterator<Item = (Exponent, C)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(variables, scale, bound, unit)?;
        for (e, c) in terms {
            s.check_arity(&e)?;
            if !c.compatible(&s.unit) {
                return Err(SeriesError::IncompatibleSeries("coefficient ring".into()));
            }
            s.add_term(e, c);
        }
        Ok(s)
    }

    fn check_arity(&self, e: &[u64]) -> Result<(), SeriesError> {
        if e.len() != self.variables.len() {
            return Err(SeriesError::Arity {
                exponents: e.to_vec(),
                got: e.len(),
                expected: self.variables.len(),
            });
        }
        Ok(())
    }

    fn within_bound(&self, e: &[u64]) -> bool {
        let total: u64 = e.iter().sum();
        total <= self.bound * self.scale
    }

    fn add_term(&mut self, e: Exponent, c: C) {
        if c.is_zero() || !self.within_bound(&e) {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn unit(&self) -> &C {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u64]) -> Option<&C> {
        self.terms.get(e)
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    /// Terms ordered by total degree, then lexicographically.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| graded_cmp(a.0, b.0));
        v
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.variables != other.variables {
            return Err(SeriesError::IncompatibleSeries(format!(
                "variables {:?} vs {:?}",
                self.variables, other.variables
            )));
        }
        if self.scale != other.scale {
            return Err(SeriesError::IncompatibleSeries(format!(
                "scale {} vs {}",
                self.scale, other.scale
            )));
        }
        if self.bound != other.bound {
            return Err(SeriesError::IncompatibleSeries(format!(
                "bound {} vs {}",
                self.bound, other.bound
            )));
        }
        if !self.unit.compatible(&other.unit) {
            return Err(SeriesError::IncompatibleSeries("coefficient ring".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let limit = self.bound * self.scale;
        let mut out = self.empty_like();
        for (ea, ca) in &self.terms {
            let da: u64 = ea.iter().sum();
            for (eb, cb) in &other.terms {
                let db: u64 = eb.iter().sum();
                if da + db > limit {
                    continue;
                }
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.mul(cb));
            }
        }
        Ok(out)
    }

    fn empty_like(&self) -> Self {
        Self {
            variables: self.variables.clone(),
            scale: self.scale,
            bound: self.bound,
            unit: self.unit.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `(1 − c·t^m)^power`, truncated at `bound`.
    ///
    /// Negative powers expand as `Σ_k C(k − power − 1, k) c^k t^{k·m}`,
    /// nonnegative ones as the finite binomial sum.
    pub fn expand_factor(
        variables: Vec<String>,
        scale: u64,
        bound: u64,
        c: &C,
        exponents: &[u64],
        power: i64,
    ) -> Result<Self, SeriesError> {
        let mut out = Self::one(variables, scale, bound, c.one_like())?;
        out.check_arity(exponents)?;
        let step: u64 = exponents.iter().sum();
        if step == 0 {
            return Err(SeriesError::ZeroExponentVector);
        }
        let limit = bound * scale;
        let mut coeff_power = c.one_like();
        let mut k: u64 = 1;
        while k * step <= limit {
            if power >= 0 && k > power as u64 {
                break;
            }
            coeff_power = coeff_power.mul(c);
            let binom = if power < 0 {
                // C(k + |power| - 1, k)
                binomial(k + power.unsigned_abs() - 1, k)
            } else {
                let b = binomial(power as u64, k);
                if k % 2 == 1 {
                    -b
                } else {
                    b
                }
            };
            let e: Exponent = exponents.iter().map(|x| x * k).collect();
            out.add_term(e, coeff_power.scale(&binom));
            k += 1;
        }
        Ok(out)
    }

    /// `t_i ↦ t_i^{k_i}`, re-truncated at the same bound.
    pub fn rescale_variables(&self, factors: &[u64]) -> Result<Self, SeriesError> {
        self.check_arity(factors)?;
        let mut out = self.empty_like();
        for (e, c) in &self.terms {
            let e: Exponent = e.iter().zip(factors).map(|(x, k)| x * k).collect();
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    /// Re-expresses the series over another scale. Fails if some exponent is
    /// not a multiple of `1/new_scale`.
    pub fn with_scale(&self, new_scale: u64) -> Result<Self, SeriesError> {
        if new_scale == 0 {
            return Err(SeriesError::ZeroScale);
        }
        let mut out = self.empty_like();
        out.scale = new_scale;
        for (e, c) in &self.terms {
            let mut ne = Vec::with_capacity(e.len());
            for (i, &x) in e.iter().enumerate() {
                let num = x * new_scale;
                if !num.is_multiple_of(self.scale) {
                    return Err(SeriesError::FractionalExponentUnderSubstitution {
                        variable: self.variables[i].clone(),
                        numerator: x,
                        scale: self.scale,
                    });
                }
                ne.push(num / self.scale);
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Keeps exactly the terms with integer exponents, over scale 1.
    pub fn int_part(&self) -> Self {
        let mut out = self.empty_like();
        out.scale = 1;
        for (e, c) in &self.terms {
            if e.iter().all(|x| x % self.scale == 0) {
                out.add_term(e.iter().map(|x| x / self.scale).collect(), c.clone());
            }
        }
        out
    }

    /// Substitutes each source variable by a monomial in the target
    /// variables; the result has scale 1 and the given bound.
    pub fn substitute_monomials(
        &self,
        substitution: &MonomialSubstitution,
        bound: u64,
    ) -> Result<Self, SeriesError> {
        self.check_arity(&vec![0; substitution.images.len()])?;
        let mut out = Self::zero(substitution.targets.clone(), 1, bound, self.unit.clone())?;
        for (e, c) in &self.terms {
            let mut integral = Vec::with_capacity(e.len());
            for (i, &x) in e.iter().enumerate() {
                if x % self.scale != 0 {
                    return Err(SeriesError::FractionalExponentUnderSubstitution {
                        variable: self.variables[i].clone(),
                        numerator: x,
                        scale: self.scale,
                    });
                }
                integral.push(x / self.scale);
            }
            out.add_term(substitution.apply(&integral)?, c.clone());
        }
        Ok(out)
    }

    /// Re-truncates at a smaller bound.
    pub fn truncate(&self, bound: u64) -> Self {
        let mut out = self.empty_like();
        out.bound = bound.min(self.bound);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn map_coefficients<D: Coefficient>(&self, unit: D, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        let mut out = TruncatedSeries {
            variables: self.variables.clone(),
            scale: self.scale,
            bound: self.bound,
            unit,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// First exponent (in graded order) where the two series differ.
    pub fn first_difference<'a>(&'a self, other: &'a Self) -> Option<(Exponent, Option<&'a C>, Option<&'a C>)> {
        let mut keys: Vec<&Exponent> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort_by(|a, b| graded_cmp(a, b));
        keys.dedup();
        keys.into_iter()
            .find(|k| self.terms.get(*k) != other.terms.get(*k))
            .map(|k| (k.clone(), self.terms.get(k), other.terms.get(k)))
    }

    /// `1 + 2 t1^{1/2} + 3 t1`.
    pub fn render(&self) -> String {
        let sorted = self.sorted_terms();
        if sorted.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in sorted.into_iter().enumerate() {
            let monomial = render_monomial(&self.variables, e, self.scale);
            let constant = monomial.is_empty();
            let mut text = if constant && c == &self.unit {
                "1".to_string()
            } else {
                c.render()
            };
            let neg = c.is_negative_scalar();
            if neg {
                text.remove(0);
            }
            if !constant {
                let unit_scalar = c.is_negative_scalar() || c == &self.unit;
                if unit_scalar && text == "1" {
                    text = monomial;
                } else if text.contains(" + ") || text.contains(" - ") || text.starts_with('-') {
                    text = format!("({text}) {monomial}");
                } else {
                    text = format!("{text} {monomial}");
                }
            }
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&text);
        }
        out
    }
}

impl TruncatedSeries<GroupRingElement> {
    /// Applies the dimension map to every coefficient.
    pub fn reduce_coefficients(&self) -> TruncatedSeries<BigInt> {
        self.map_coefficients(BigInt::one(), |c| c.reduce_dim())
    }
}

impl<C: Coefficient> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(deg > {})", self.render(), self.bound)
    }
}

impl<C: Coefficient> fmt::Display for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Total degree first, then lexicographic.
pub fn graded_cmp(a: &[u64], b: &[u64]) -> Ordering {
    let ta: u64 = a.iter().sum();
    let tb: u64 = b.iter().sum();
    ta.cmp(&tb).then_with(|| a.cmp(b))
}

fn render_monomial(variables: &[String], e: &[u64], scale: u64) -> String {
    let mut parts = Vec::new();
    for (v, &x) in variables.iter().zip(e) {
        if x == 0 {
            continue;
        }
        let g = x.gcd(&scale);
        let (p, q) = (x / g, scale / g);
        parts.push(match (p, q) {
            (1, 1) => v.clone(),
            (p, 1) => format!("{v}^{p}"),
            (p, q) => format!("{v}^{{{p}/{q}}}"),
        });
    }
    parts.join(" ")
}

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `T_i ↦ Π_{j ∈ images[i]} t_j`; an empty image set maps `T_i` to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSubstitution {
    pub targets: Vec<String>,
    pub images: Vec<Vec<usize>>,
}

impl MonomialSubstitution {
    pub fn new(targets: Vec<String>, images: Vec<Vec<usize>>) -> Result<Self, SeriesError> {
        for &j in images.iter().flatten() {
            if j >= targets.len() {
                return Err(SeriesError::UnknownTarget(j));
            }
        }
        Ok(Self { targets, images })
    }

    /// Image of the monomial `T^e` (integer exponents) as a `t`-exponent.
    pub fn apply(&self, e: &[u64]) -> Result<Exponent, SeriesError> {
        if e.len() != self.images.len() {
            return Err(SeriesError::Arity {
                exponents: e.to_vec(),
                got: e.len(),
                expected: self.images.len(),
            });
        }
        let mut out = vec![0u64; self.targets.len()];
        for (x, image) in e.iter().zip(&self.images) {
            for &j in image {
                out[j] = out[j].checked_add(*x).ok_or(SeriesError::Overflow)?;
            }
        }
        Ok(out)
    }
}
