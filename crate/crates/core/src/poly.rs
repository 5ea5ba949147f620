//! Sparse multivariate polynomials in the jet variables `ξ_{j,i}` with the
//! weighted grading `weight(ξ_{j,i}) = j`.
//!
//! Variables are indexed by `(j - 1)·n + (i - 1)` for derivative order
//! `1 ≤ j ≤ k` and coordinate `1 ≤ i ≤ n`. Monomials order by weighted
//! degree first, then by exponent vector; this is the order of every
//! monomial basis and therefore of every kernel basis built on it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::rational::{format_rational, parse_rational, Rational};

/// Exponent vector tagged with its weighted degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    weight: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(n: usize, exps: Vec<u32>) -> Self {
        let weight = exps
            .iter()
            .enumerate()
            .map(|(v, &e)| var_weight(n, v) * e)
            .sum();
        Self { weight, exps }
    }

    pub fn one(nvars: usize) -> Self {
        Self {
            weight: 0,
            exps: vec![0; nvars],
        }
    }

    pub fn weighted_degree(&self) -> u32 {
        self.weight
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            weight: self.weight + other.weight,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Weight of variable index `v` when there are `n` coordinates.
pub fn var_weight(n: usize, v: usize) -> u32 {
    (v / n + 1) as u32
}

/// Index of `ξ_{j,i}` (both 1-based).
pub fn var_index(n: usize, j: usize, i: usize) -> usize {
    (j - 1) * n + (i - 1)
}

/// All monomials of weighted degree exactly `m` in the `n·k` variables,
/// ascending.
pub fn monomials(k: usize, n: usize, m: u32) -> Vec<Monomial> {
    let nvars = n * k;
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(v: usize, remaining: u32, n: usize, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if v == exps.len() {
            if remaining == 0 {
                out.push(Monomial::new(n, exps.clone()));
            }
            return;
        }
        let w = var_weight(n, v);
        for e in 0..=remaining / w {
            exps[v] = e;
            rec(v + 1, remaining - e * w, n, exps, out);
        }
        exps[v] = 0;
    }
    if nvars == 0 {
        return if m == 0 { vec![Monomial::one(0)] } else { vec![] };
    }
    rec(0, m, n, &mut exps, &mut out);
    out.sort();
    out
}

/// Number of weighted-degree-`m` monomials, without materializing them.
pub fn monomial_count(k: usize, n: usize, m: u32) -> usize {
    // counts[d] over the variables processed so far
    let m = m as usize;
    let mut counts = vec![0usize; m + 1];
    counts[0] = 1;
    for j in 1..=k {
        for _ in 0..n {
            for d in j..=m {
                counts[d] = counts[d].saturating_add(counts[d - j]);
            }
        }
    }
    counts[m]
}

/// Polynomial over ℚ in the variables `ξ_{j,i}`; zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPoly {
    k: usize,
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl WeightedPoly {
    pub fn zero(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(k: usize, n: usize, c: Rational) -> Self {
        let mut p = Self::zero(k, n);
        p.add_term(Monomial::one(n * k), c);
        p
    }

    /// The variable `ξ_{j,i}` (1-based).
    pub fn var(k: usize, n: usize, j: usize, i: usize) -> Self {
        Self::var_by_index(k, n, var_index(n, j, i))
    }

    pub fn var_by_index(k: usize, n: usize, v: usize) -> Self {
        let mut exps = vec![0; n * k];
        exps[v] = 1;
        let mut p = Self::zero(k, n);
        p.add_term(Monomial::new(n, exps), Rational::one());
        p
    }

    pub fn from_terms(
        k: usize,
        n: usize,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(k, n);
        for (mono, c) in terms {
            if mono.exps.len() != n * k {
                return Err(Error::DimensionMismatch(format!(
                    "monomial has {} exponents, expected {}",
                    mono.exps.len(),
                    n * k
                )));
            }
            p.add_term(mono, c);
        }
        Ok(p)
    }

    /// Linear combination of `basis` monomials with the given coefficients.
    pub fn from_coefficients(k: usize, n: usize, basis: &[Monomial], coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(k, n);
        for (mono, c) in basis.iter().zip(coeffs) {
            p.add_term(mono.clone(), c.clone());
        }
        p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n * self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
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

    /// Weighted degree when homogeneous, `None` otherwise (including zero).
    pub fn weighted_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::weighted_degree);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weighted_degree().is_some()
    }

    /// Splits into weighted-homogeneous components keyed by weighted degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, WeightedPoly> {
        let mut out: BTreeMap<u32, WeightedPoly> = BTreeMap::new();
        for (mono, c) in &self.terms {
            out.entry(mono.weight)
                .or_insert_with(|| Self::zero(self.k, self.n))
                .terms
                .insert(mono.clone(), c.clone());
        }
        out
    }

    /// Coordinates against a monomial basis; `None` if a term falls outside it.
    pub fn coefficients_in(&self, index: &HashMap<Monomial, usize>, len: usize) -> Option<Vec<Rational>> {
        let mut v = vec![Rational::zero(); len];
        for (mono, c) in &self.terms {
            v[*index.get(mono)?] = c.clone();
        }
        Some(v)
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            (self.k, self.n),
            (other.k, other.n),
            "polynomials over different variable sets"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.k, self.n);
        }
        Self {
            k: self.k,
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self {
            k: self.k,
            n: self.n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.k, self.n, Rational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Applies the derivation determined by `images[v] = D(ξ_v)`, given as
    /// sparse linear forms `(variable, coefficient)`.
    pub fn apply_linear_derivation(&self, images: &[Vec<(usize, Rational)>]) -> Self {
        let mut out = Self::zero(self.k, self.n);
        for (mono, c) in &self.terms {
            for (v, &e) in mono.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                for (w, dc) in &images[v] {
                    let mut exps = mono.exps.clone();
                    exps[v] -= 1;
                    exps[*w] += 1;
                    let coeff = c * dc * Rational::from_integer(e.into());
                    out.add_term(Monomial::new(self.n, exps), coeff);
                }
            }
        }
        out
    }

    /// Composes with the linear change of variables `ξ_v ↦ Σ_w L[w][v]·ξ_w`.
    pub fn substitute_linear(&self, l: &ExactMatrix) -> Result<Self> {
        Ok(LinearSubstitution::new(self.k, self.n, l)?.apply(self))
    }
}

/// A linear change of variables with cached powers of the variable images,
/// for applying the same substitution to many polynomials.
pub struct LinearSubstitution {
    k: usize,
    n: usize,
    images: Vec<WeightedPoly>,
    identity_vars: Vec<bool>,
    powers: HashMap<(usize, u32), WeightedPoly>,
}

impl LinearSubstitution {
    pub fn new(k: usize, n: usize, l: &ExactMatrix) -> Result<Self> {
        let nvars = n * k;
        if l.rows() != nvars || l.cols() != nvars {
            return Err(Error::DimensionMismatch(format!(
                "substitution must be {nvars}x{nvars}, got {}x{}",
                l.rows(),
                l.cols()
            )));
        }
        let mut images = Vec::with_capacity(nvars);
        let mut identity_vars = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut img = WeightedPoly::zero(k, n);
            let mut is_id = true;
            for w in 0..nvars {
                let c = l.get(w, v);
                if (w == v && !c.is_one()) || (w != v && !c.is_zero()) {
                    is_id = false;
                }
                if !c.is_zero() {
                    let mut exps = vec![0; nvars];
                    exps[w] = 1;
                    img.add_term(Monomial::new(n, exps), c.clone());
                }
            }
            images.push(img);
            identity_vars.push(is_id);
        }
        Ok(Self {
            k,
            n,
            images,
            identity_vars,
            powers: HashMap::new(),
        })
    }

    fn power(&mut self, v: usize, e: u32) -> &WeightedPoly {
        if !self.powers.contains_key(&(v, e)) {
            let p = if e == 1 {
                self.images[v].clone()
            } else {
                self.power(v, e - 1).clone().mul(&self.images[v])
            };
            self.powers.insert((v, e), p);
        }
        &self.powers[&(v, e)]
    }

    pub fn apply(&mut self, p: &WeightedPoly) -> WeightedPoly {
        assert_eq!((p.k, p.n), (self.k, self.n), "substitution over other variables");
        let nvars = self.n * self.k;
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (mono, c) in &p.terms {
            // Variables mapped to themselves stay in a fixed monomial factor.
            let mut fixed = vec![0u32; nvars];
            let mut prod: Vec<(Monomial, Rational)> = Vec::new();
            let mut started = false;
            for (v, &e) in mono.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if self.identity_vars[v] {
                    fixed[v] = e;
                    continue;
                }
                let pw = self.power(v, e).clone();
                if !started {
                    prod = pw.terms.into_iter().collect();
                    started = true;
                } else {
                    let mut next: HashMap<Monomial, Rational> = HashMap::new();
                    for (ma, ca) in &prod {
                        for (mb, cb) in &pw.terms {
                            *next.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
                        }
                    }
                    prod = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                }
            }
            let fixed = Monomial::new(self.n, fixed);
            if !started {
                prod = vec![(Monomial::one(nvars), Rational::one())];
            }
            for (m, pc) in prod {
                *acc.entry(m.mul(&fixed)).or_insert_with(Rational::zero) += c * pc;
            }
        }
        WeightedPoly {
            k: self.k,
            n: self.n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

/// `P` composed with the linear change of variables `L`, expanded.
pub fn poly_substitute_linear(p: &WeightedPoly, l: &ExactMatrix) -> Result<WeightedPoly> {
    p.substitute_linear(l)
}

impl fmt::Display for WeightedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in &self.terms {
            let mut factors = Vec::new();
            for (v, &e) in mono.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = format!("x{}_{}", v / self.n + 1, v % self.n + 1);
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (factors.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", factors.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    k: usize,
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for WeightedPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            k: self.k,
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    exponents: m.exps.clone(),
                    coeff: format_rational(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PolyRepr::deserialize(d)?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                let c = parse_rational(&t.coeff).map_err(D::Error::custom)?;
                Ok((Monomial::new(repr.n, t.exponents), c))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        WeightedPoly::from_terms(repr.k, repr.n, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    /// Brute-force count of partitions of `m` into parts of size at most `k`.
    fn partitions_bounded(m: u32, k: u32) -> usize {
        fn rec(m: u32, max: u32) -> usize {
            if m == 0 {
                return 1;
            }
            (1..=max.min(m)).map(|p| rec(m - p, p)).sum()
        }
        rec(m, k)
    }

    fn binom(n: u64, r: u64) -> u64 {
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monomial_examples() {
        let ms = monomials(1, 2, 2);
        assert_eq!(ms.len(), 3);
        let exps: Vec<_> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);

        let ms = monomials(2, 1, 2);
        let exps: Vec<_> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 1], vec![2, 0]]);

        assert_eq!(monomials(3, 1, 4).len(), partitions_bounded(4, 3));
        assert_eq!(partitions_bounded(4, 3), 4);
    }

    #[test]
    fn monomials_match_partition_oracle_for_n1() {
        for k in 1..=5 {
            for m in 0..=10 {
                assert_eq!(monomials(k, 1, m).len(), partitions_bounded(m, k as u32));
            }
        }
    }

    #[test]
    fn monomial_count_matches_enumeration() {
        for k in 1..=3 {
            for n in 1..=3 {
                for m in 0..=7 {
                    assert_eq!(monomial_count(k, n, m), monomials(k, n, m).len());
                }
            }
        }
    }

    #[test]
    fn k1_counts_are_binomial() {
        for n in 1..=4u64 {
            for m in 0..=6u64 {
                assert_eq!(
                    monomials(1, n as usize, m as u32).len() as u64,
                    binom(m + n - 1, n - 1)
                );
            }
        }
    }

    fn shift_2_to_1(k: usize, n: usize) -> ExactMatrix {
        // ξ_{2,1} ↦ ξ_{2,1} + ξ_{1,1}, all else fixed
        let mut l = ExactMatrix::identity(n * k);
        l.set(var_index(n, 1, 1), var_index(n, 2, 1), int(1));
        l
    }

    #[test]
    fn substitution_examples() {
        let (k, n) = (2, 1);
        let x1 = WeightedPoly::var(k, n, 1, 1);
        let x2 = WeightedPoly::var(k, n, 2, 1);
        let p = x1.mul(&x2).add(&x2.scale(&frac(1, 3)));
        assert_eq!(p.substitute_linear(&ExactMatrix::identity(2)).unwrap(), p);

        let l = shift_2_to_1(k, n);
        assert_eq!(x2.substitute_linear(&l).unwrap(), x2.add(&x1));
        assert_eq!(
            x1.mul(&x2).substitute_linear(&l).unwrap(),
            x1.mul(&x2).add(&x1.mul(&x1))
        );
    }

    #[test]
    fn substitution_rejects_bad_shape() {
        let p = WeightedPoly::var(2, 1, 1, 1);
        assert!(p.substitute_linear(&ExactMatrix::identity(3)).is_err());
    }

    #[test]
    fn components_and_display() {
        let (k, n) = (2, 1);
        let x1 = WeightedPoly::var(k, n, 1, 1);
        let p = x1.add(&x1.mul(&x1));
        let comps = p.homogeneous_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&1], x1);
        assert_eq!(p.weighted_degree(), None);
        assert_eq!(x1.pow(3).weighted_degree(), Some(3));
        assert_eq!(p.to_string(), "x1_1 + x1_1^2");
    }

    #[test]
    fn json_round_trip() {
        let (k, n) = (2, 2);
        let w = WeightedPoly::var(k, n, 1, 1)
            .mul(&WeightedPoly::var(k, n, 2, 2))
            .sub(&WeightedPoly::var(k, n, 1, 2).mul(&WeightedPoly::var(k, n, 2, 1)));
        let s = serde_json::to_string(&w).unwrap();
        let back: WeightedPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }

    fn poly_strategy(k: usize, n: usize) -> impl Strategy<Value = WeightedPoly> {
        let nvars = n * k;
        prop::collection::vec((prop::collection::vec(0u32..3, nvars), -4i64..=4), 0..5).prop_map(
            move |terms| {
                WeightedPoly::from_terms(
                    k,
                    n,
                    terms
                        .into_iter()
                        .map(|(e, c)| (Monomial::new(n, e), int(c))),
                )
                .unwrap()
            },
        )
    }

    fn matrix_strategy(size: usize) -> impl Strategy<Value = ExactMatrix> {
        prop::collection::vec(-2i64..=2, size * size).prop_map(move |v| {
            ExactMatrix::from_fn(size, size, |i, j| int(v[i * size + j]))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn substitution_composes(
            p in poly_strategy(2, 2),
            l1 in matrix_strategy(4),
            l2 in matrix_strategy(4),
        ) {
            let lhs = p.substitute_linear(&l1).unwrap().substitute_linear(&l2).unwrap();
            let rhs = p.substitute_linear(&(&l2 * &l1)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
