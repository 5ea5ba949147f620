//! The embedding of regular jets into `Grass(k, Sym^{≤k}ℂ^n)` and its
//! Plücker coordinates.
//!
//! Column `d` of `φ(J)` is `Σ_{i_1+…+i_s=d} f^(i_1)⋯f^(i_s)/(i_1!⋯i_s!)`,
//! which on Taylor coefficients `c_j = f^(j)/j!` is the sum over ordered
//! compositions of `d` of the symmetric products `c_{i_1}⋯c_{i_s}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::Reparam;
use crate::jets::{act, Jet};
use crate::matrix::ExactMatrix;
use crate::rational::{common_denominator, factorial, format_rational, Rational};
use crate::sampling::Sampler;

/// A monomial `e_{i_1}⋯e_{i_s}` of `Sym^{≤k}ℂ^n`, indices 1-based and
/// non-decreasing. Ordered by size, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymIndex(Vec<usize>);

impl SymIndex {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() || indices.contains(&0) {
            return Err(Error::InvalidArgument(
                "symmetric index needs at least one entry, all >= 1".into(),
            ));
        }
        indices.sort_unstable();
        Ok(Self(indices))
    }

    pub fn single(i: usize) -> Self {
        Self(vec![i])
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Self(v)
    }
}

impl Ord for SymIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SymIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SymIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// All multisets of sizes `1..=k` over `{1..n}` in canonical order.
pub fn sym_basis(n: usize, k: usize) -> Vec<SymIndex> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<SymIndex>) {
        if cur.len() == size {
            out.push(SymIndex(cur.clone()));
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i, n, size, cur, out);
            cur.pop();
        }
    }
    for s in 1..=k {
        rec(1, n, s, &mut Vec::new(), &mut out);
    }
    out
}

/// Sparse element of `Sym^{≤k}ℂ^n`; zero coordinates are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymVector {
    coords: BTreeMap<SymIndex, Rational>,
}

impl SymVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(idx: SymIndex) -> Self {
        let mut v = Self::zero();
        v.add_term(idx, Rational::one());
        v
    }

    /// The degree-one element `Σ_i x_i e_i`.
    pub fn linear(x: &[Rational]) -> Self {
        let mut v = Self::zero();
        for (i, c) in x.iter().enumerate() {
            v.add_term(SymIndex::single(i + 1), c.clone());
        }
        v
    }

    pub fn coords(&self) -> &BTreeMap<SymIndex, Rational> {
        &self.coords
    }

    pub fn get(&self, idx: &SymIndex) -> Rational {
        self.coords.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add_term(&mut self, idx: SymIndex, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.coords.entry(idx) {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.coords {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coords: self.coords.iter().map(|(i, v)| (i.clone(), v * c)).collect(),
        }
    }

    /// Product in the symmetric algebra.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.coords {
            for (b, y) in &other.coords {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    /// Component of a single size.
    pub fn part(&self, size: usize) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .filter(|(i, _)| i.size() == size)
                .map(|(i, v)| (i.clone(), v.clone()))
                .collect(),
        }
    }
}

impl Serialize for SymVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.coords.len()))?;
        for (i, v) in &self.coords {
            map.serialize_entry(&i.to_string(), &format_rational(v))?;
        }
        map.end()
    }
}

/// `φ(J)` as `k` columns, via `col_d = c_d + Σ_{i<d} c_i·col_{d−i}`, the
/// recursion satisfied by `Σ_{s≥1} F(t)^s` with `F = Σ c_j t^j`.
pub fn phi(jet: &Jet) -> Vec<SymVector> {
    let c: Vec<SymVector> = (0..jet.k())
        .map(|j| SymVector::linear(&jet.taylor().column(j)))
        .collect();
    let mut cols: Vec<SymVector> = Vec::with_capacity(jet.k());
    for d in 0..jet.k() {
        let mut col = c[d].clone();
        for i in 0..d {
            col = col.add(&c[i].mul(&cols[d - 1 - i]));
        }
        cols.push(col);
    }
    cols
}

/// Projective point of `∧^k Sym^{≤k}ℂ^n`, keyed by increasing `k`-tuples of
/// basis indices with no extra signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerVector {
    k: usize,
    coords: BTreeMap<Vec<SymIndex>, Rational>,
}

impl PluckerVector {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coords(&self) -> &BTreeMap<Vec<SymIndex>, Rational> {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.coords.len()
    }

    pub fn get(&self, key: &[SymIndex]) -> Rational {
        self.coords.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coordinate of an arbitrary ordered tuple: zero on repeats, otherwise
    /// the sorted coordinate times the permutation sign.
    pub fn signed(&self, tuple: &[SymIndex]) -> Rational {
        let mut v = tuple.to_vec();
        let mut sign = 1;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                match v[j].cmp(&v[j + 1]) {
                    Ordering::Equal => return Rational::zero(),
                    Ordering::Greater => {
                        v.swap(j, j + 1);
                        sign = -sign;
                    }
                    Ordering::Less => {}
                }
            }
        }
        let c = self.get(&v);
        if sign < 0 {
            -c
        } else {
            c
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            k: self.k,
            coords: if c.is_zero() {
                BTreeMap::new()
            } else {
                self.coords.iter().map(|(i, v)| (i.clone(), v * c)).collect()
            },
        }
    }
}

pub fn plucker_key(tuple: &[SymIndex]) -> String {
    tuple.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("|")
}

impl Serialize for PluckerVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coords<'a>(&'a BTreeMap<Vec<SymIndex>, Rational>);
        impl Serialize for Coords<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (key, v) in self.0 {
                    map.serialize_entry(&plucker_key(key), &format_rational(v))?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("k", &self.k)?;
        map.serialize_entry("zero", &self.is_zero())?;
        map.serialize_entry("coords", &Coords(&self.coords))?;
        map.end()
    }
}

/// Refusal bound on the number of minors a single Plücker vector may need.
pub const MAX_MINORS: u128 = 5_000_000;

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k × k` minors of the columns over their joint support.
///
/// Columns are scaled to integer vectors and the minors built column by
/// column with Laplace expansion along the last column.
pub fn plucker(cols: &[SymVector]) -> Result<PluckerVector> {
    let k = cols.len();
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one column".into()));
    }
    let rows: Vec<SymIndex> = cols
        .iter()
        .flat_map(|c| c.coords.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if cols.iter().any(SymVector::is_zero) || rows.len() < k {
        return Ok(PluckerVector {
            k,
            coords: BTreeMap::new(),
        });
    }
    if binomial(rows.len(), k) > MAX_MINORS {
        return Err(Error::InvalidArgument(format!(
            "{} Plücker coordinates exceed the bound {MAX_MINORS}",
            binomial(rows.len(), k)
        )));
    }

    let mut scale = Rational::one();
    let int_cols: Vec<Vec<BigInt>> = cols
        .iter()
        .map(|c| {
            let d = common_denominator(c.coords.values());
            scale *= Rational::from_integer(d.clone());
            rows.iter()
                .map(|r| (c.get(r) * Rational::from_integer(d.clone())).to_integer())
                .collect()
        })
        .collect();

    // minors[S] for |S| = j over the first j columns
    let mut minors: HashMap<Vec<u16>, BigInt> = HashMap::new();
    for (r, x) in int_cols[0].iter().enumerate() {
        if !x.is_zero() {
            minors.insert(vec![r as u16], x.clone());
        }
    }
    for (j, col) in int_cols.iter().enumerate().skip(1) {
        let mut next: HashMap<Vec<u16>, BigInt> = HashMap::new();
        for (sub, m) in &minors {
            for (r, x) in col.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let r = r as u16;
                let pos = match sub.binary_search(&r) {
                    Ok(_) => continue,
                    Err(p) => p,
                };
                // row r sits at position `pos` of the new subset, column j
                let mut key = sub.clone();
                key.insert(pos, r);
                let term = x * m;
                let e = next.entry(key).or_insert_with(BigInt::zero);
                if (pos + j) % 2 == 0 {
                    *e += term;
                } else {
                    *e -= term;
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        minors = next;
    }

    let coords = minors
        .into_iter()
        .map(|(sub, v)| {
            let key: Vec<SymIndex> = sub.iter().map(|&r| rows[r as usize].clone()).collect();
            (key, Rational::from_integer(v) / &scale)
        })
        .collect();
    Ok(PluckerVector { k, coords })
}

/// `p = c·q` for some nonzero rational `c`.
pub fn projective_equal(p: &PluckerVector, q: &PluckerVector) -> Result<bool> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPlucker);
    }
    if p.k != q.k || p.coords.len() != q.coords.len() {
        return Ok(false);
    }
    let (key, p0) = p.coords.iter().next().expect("nonzero");
    let q0 = q.get(key);
    if q0.is_zero() {
        return Ok(false);
    }
    Ok(p
        .coords
        .iter()
        .all(|(key, pv)| pv * &q0 == q.get(key) * p0))
}

/// `φ` of the jet with Taylor coefficients `c_j`, then Plücker.
pub fn plucker_of_jet(jet: &Jet) -> Result<PluckerVector> {
    plucker(&phi(jet))
}

/// The point `z_k`: Plücker vector of `φ` at the jet whose raw derivative
/// columns are `e_1, …, e_k`.
pub fn z_point(n: usize, k: usize) -> Result<PluckerVector> {
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    let derivs = ExactMatrix::from_fn(n, k, |i, j| {
        if i == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    plucker_of_jet(&Jet::from_derivatives(&derivs))
}

/// The same construction at the jet whose Taylor coefficients are
/// `e_1, …, e_k`; this is `e_1 ∧ (e_2 + e_1²) ∧ …`.
pub fn z_point_taylor(n: usize, k: usize) -> Result<PluckerVector> {
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    plucker_of_jet(&Jet::new(ExactMatrix::from_fn(n, k, |i, j| {
        if i == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    })))
}

/// Some coordinate indexed only by degree-one basis vectors is nonzero.
pub fn a_nk_membership(p: &PluckerVector) -> bool {
    p.coords
        .iter()
        .any(|(key, v)| !v.is_zero() && key.iter().all(|i| i.size() == 1))
}

/// `g` acting on `Sym^{≤k}ℂ^n` by `e_i ↦ Σ_r g_{ri} e_r`, multiplicatively.
pub fn gl_action(g: &ExactMatrix, cols: &[SymVector]) -> Result<Vec<SymVector>> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("g must be square".into()));
    }
    if g.inverse().is_none() {
        return Err(Error::Singular);
    }
    let n = g.rows();
    let images: Vec<SymVector> = (0..n)
        .map(|i| SymVector::linear(&g.column(i)))
        .collect();
    cols.iter()
        .map(|col| {
            let mut out = SymVector::zero();
            for (idx, c) in &col.coords {
                if idx.indices().iter().any(|&i| i > n) {
                    return Err(Error::DimensionMismatch(format!(
                        "index {idx} outside 1..={n}"
                    )));
                }
                let mut term = SymVector::basis(SymIndex(Vec::new()));
                for &i in idx.indices() {
                    term = term.mul(&images[i - 1]);
                }
                out = out.add(&term.scale(c));
            }
            Ok(out)
        })
        .collect()
}

/// Whether the `k`-plane spanned by `φ(J)` is unchanged by `φ_g`.
pub fn invariance_check(jet: &Jet, g: &Reparam) -> Result<bool> {
    if !jet.is_regular() {
        return Err(Error::NonRegularJet);
    }
    let moved = act(jet, g)?;
    projective_equal(&plucker_of_jet(&moved)?, &plucker_of_jet(jet)?)
}

/// Quadratic Plücker relations
/// `Σ_l (−1)^l p_{I ∪ j_l} p_{J ∖ j_l}` for `|I| = k−1`, `|J| = k+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub support_rows: usize,
    pub total_relations: u128,
    pub checked: usize,
    pub exhaustive: bool,
    pub violations: usize,
    pub decomposable: bool,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.decomposable
    }
}

/// Relations are enumerated when there are at most this many.
pub const RELATION_ENUMERATION_LIMIT: u128 = 20_000;
/// Sample size when enumeration is refused.
pub const RELATION_SAMPLE: usize = 2_000;

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

fn relation_value(p: &PluckerVector, i: &[SymIndex], j: &[SymIndex]) -> Rational {
    let mut acc = Rational::zero();
    for l in 0..j.len() {
        let mut left = i.to_vec();
        left.push(j[l].clone());
        let mut right = j.to_vec();
        right.remove(l);
        let a = p.signed(&left);
        if a.is_zero() {
            continue;
        }
        let term = a * p.get(&right);
        if l % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Rebuilds a `k`-plane from one nonzero coordinate and checks that its
/// Plücker vector is the given one; equivalent to all relations holding.
pub fn is_decomposable(p: &PluckerVector) -> Result<bool> {
    let Some((a, pa)) = p.coords.iter().next() else {
        return Err(Error::ZeroPlucker);
    };
    let rows: BTreeSet<SymIndex> = p.coords.keys().flatten().cloned().collect();
    let cols: Vec<SymVector> = (0..p.k)
        .map(|pos| {
            let mut v = SymVector::zero();
            for r in &rows {
                let mut t = a.clone();
                t[pos] = r.clone();
                v.add_term(r.clone(), p.signed(&t) / pa);
            }
            v
        })
        .collect();
    Ok(plucker(&cols)? == p.scale(&(Rational::one() / pa)))
}

pub fn plucker_relations(p: &PluckerVector, seed: u64) -> Result<RelationReport> {
    if p.is_zero() {
        return Err(Error::ZeroPlucker);
    }
    let k = p.k;
    let rows: Vec<SymIndex> = p
        .coords
        .keys()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let total = binomial(rows.len(), k - 1) * binomial(rows.len(), k + 1);
    let pick = |c: &[usize]| c.iter().map(|&x| rows[x].clone()).collect::<Vec<_>>();

    let (checked, violations, exhaustive) = if total <= RELATION_ENUMERATION_LIMIT {
        let is = combinations(rows.len(), k - 1);
        let js = combinations(rows.len(), k + 1);
        let mut violations = 0;
        for i in &is {
            for j in &js {
                if !relation_value(p, &pick(i), &pick(j)).is_zero() {
                    violations += 1;
                }
            }
        }
        (is.len() * js.len(), violations, true)
    } else {
        // Targeted sample: each I ∪ {j} is drawn from a nonzero coordinate.
        let keys: Vec<&Vec<SymIndex>> = p.coords.keys().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0;
        for _ in 0..RELATION_SAMPLE {
            let base = keys.choose(&mut rng).expect("nonzero");
            let drop = rand::Rng::gen_range(&mut rng, 0..k);
            let mut i = (*base).clone();
            i.remove(drop);
            let mut j_idx = rand::seq::index::sample(&mut rng, rows.len(), k + 1).into_vec();
            j_idx.sort_unstable();
            if !relation_value(p, &i, &pick(&j_idx)).is_zero() {
                violations += 1;
            }
        }
        (RELATION_SAMPLE, violations, false)
    };
    Ok(RelationReport {
        support_rows: rows.len(),
        total_relations: total,
        checked,
        exhaustive,
        violations,
        decomposable: is_decomposable(p)?,
    })
}

/// Seeded census of the embedding properties for one `(k, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingCensus {
    pub claim: &'static str,
    pub k: usize,
    pub n: usize,
    pub jets: usize,
    pub group_elements: usize,
    pub seed: u64,
    pub invariance_checks: usize,
    pub invariance_holds: usize,
    pub equivariance_checks: usize,
    pub equivariance_holds: usize,
    pub relation_checks: usize,
    pub relation_holds: usize,
    pub all_hold: bool,
}

pub fn embedding_census(
    k: usize,
    n: usize,
    jets: usize,
    group_elements: usize,
    seed: u64,
    bound: i64,
) -> Result<EmbeddingCensus> {
    let mut s = Sampler::new(seed, bound);
    let js: Vec<Jet> = (0..jets).map(|_| s.regular_jet(n, k)).collect();
    let gs: Vec<Reparam> = (0..group_elements).map(|_| s.reparam(k)).collect();
    let gls: Vec<ExactMatrix> = (0..jets).map(|_| s.invertible(n)).collect();

    let per_jet: Vec<(usize, bool, bool)> = js
        .par_iter()
        .zip(gls.par_iter())
        .enumerate()
        .map(|(idx, (j, g))| -> Result<(usize, bool, bool)> {
            let base = plucker_of_jet(j)?;
            let mut inv = 0;
            for phi_g in &gs {
                let moved = plucker_of_jet(&act(j, phi_g)?)?;
                if projective_equal(&moved, &base)? {
                    inv += 1;
                }
            }
            let equi = phi(&j.left_mul(g)?) == gl_action(g, &phi(j))?;
            let rel = plucker_relations(&base, seed ^ idx as u64)?.holds();
            Ok((inv, equi, rel))
        })
        .collect::<Result<_>>()?;

    let invariance_holds = per_jet.iter().map(|r| r.0).sum();
    let equivariance_holds = per_jet.iter().filter(|r| r.1).count();
    let relation_holds = per_jet.iter().filter(|r| r.2).count();
    Ok(EmbeddingCensus {
        claim: "jet-embedding-invariant",
        k,
        n,
        jets,
        group_elements,
        seed,
        invariance_checks: jets * group_elements,
        invariance_holds,
        equivariance_checks: jets,
        equivariance_holds,
        relation_checks: jets,
        relation_holds,
        all_hold: invariance_holds == jets * group_elements
            && equivariance_holds == jets
            && relation_holds == jets,
    })
}

/// Total count of `sym_basis(n, k)`.
pub fn sym_dimension(n: usize, k: usize) -> u128 {
    (1..=k).map(|s| binomial(n + s - 1, s)).sum()
}

/// Column `d` of `φ` straight from raw derivatives, for cross-checking.
pub fn phi_from_derivatives(derivs: &ExactMatrix) -> Vec<SymVector> {
    let k = derivs.cols();
    let mut cols = Vec::with_capacity(k);
    for d in 1..=k {
        let mut col = SymVector::zero();
        for s in 1..=d {
            for comp in crate::group::compositions(d, s) {
                let mut term = SymVector::basis(SymIndex(Vec::new()));
                let mut weight = Rational::one();
                for &i in &comp {
                    term = term.mul(&SymVector::linear(&derivs.column(i - 1)));
                    weight /= factorial(i);
                }
                col = col.add(&term.scale(&weight));
            }
        }
        cols.push(col);
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn idx(v: &[usize]) -> SymIndex {
        SymIndex::new(v.to_vec()).unwrap()
    }

    /// Independent oracle: minor by the Leibniz permutation formula.
    fn leibniz_minor(cols: &[SymVector], rows: &[SymIndex]) -> Rational {
        let k = cols.len();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut total = Rational::zero();
        fn heap(
            n: usize,
            perm: &mut Vec<usize>,
            cols: &[SymVector],
            rows: &[SymIndex],
            total: &mut Rational,
        ) {
            if n == 1 {
                let mut inv = 0;
                for a in 0..perm.len() {
                    for b in a + 1..perm.len() {
                        if perm[a] > perm[b] {
                            inv += 1;
                        }
                    }
                }
                let mut prod = Rational::one();
                for (c, &r) in perm.iter().enumerate() {
                    prod *= cols[c].get(&rows[r]);
                }
                if inv % 2 == 0 {
                    *total += prod;
                } else {
                    *total -= prod;
                }
                return;
            }
            for i in 0..n {
                heap(n - 1, perm, cols, rows, total);
                let j = if n.is_multiple_of(2) { i } else { 0 };
                perm.swap(j, n - 1);
            }
        }
        heap(k, &mut perm, cols, rows, &mut total);
        total
    }

    #[test]
    fn sym_basis_examples() {
        assert_eq!(sym_basis(1, 2), vec![idx(&[1]), idx(&[1, 1])]);
        assert_eq!(
            sym_basis(2, 2),
            vec![idx(&[1]), idx(&[2]), idx(&[1, 1]), idx(&[1, 2]), idx(&[2, 2])]
        );
        assert_eq!(sym_basis(2, 1), vec![idx(&[1]), idx(&[2])]);
        for n in 1..=4 {
            for k in 1..=4 {
                let b = sym_basis(n, k);
                assert_eq!(b.len() as u128, sym_dimension(n, k));
                assert!(b.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn phi_examples() {
        let j = Jet::from_values(2, 2, vec![int(1), int(2), int(3), int(4)]).unwrap();
        let cols = phi(&j);
        assert_eq!(cols[0], SymVector::linear(&[int(1), int(3)]));
        // c_2 + c_1²
        let expected = SymVector::linear(&[int(2), int(4)])
            .add(&SymVector::linear(&[int(1), int(3)]).mul(&SymVector::linear(&[int(1), int(3)])));
        assert_eq!(cols[1], expected);
        assert!(phi(&Jet::zero(3, 3)).iter().all(SymVector::is_zero));
    }

    #[test]
    fn phi_matches_raw_derivative_formula() {
        let mut s = Sampler::new(4, 9);
        for k in 1..=4 {
            for n in 1..=3 {
                let j = s.jet(n, k);
                let derivs = ExactMatrix::from_fn(n, k, |i, c| {
                    j.taylor().get(i, c) * factorial(c + 1)
                });
                assert_eq!(phi(&j), phi_from_derivatives(&derivs));
            }
        }
    }

    #[test]
    fn plucker_matches_leibniz_oracle() {
        let mut s = Sampler::new(6, 5);
        for (k, n) in [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let cols = phi(&s.regular_jet(n, k));
            let p = plucker(&cols).unwrap();
            let basis = sym_basis(n, k);
            let mut nonzero = 0;
            for c in combinations(basis.len(), k) {
                let rows: Vec<SymIndex> = c.iter().map(|&i| basis[i].clone()).collect();
                let m = leibniz_minor(&cols, &rows);
                assert_eq!(p.get(&rows), m);
                if !m.is_zero() {
                    nonzero += 1;
                }
            }
            assert_eq!(p.support_size(), nonzero);
        }
    }

    #[test]
    fn plucker_examples() {
        let v = SymVector::linear(&[int(1), int(2)]);
        assert!(plucker(&[v.clone(), v.scale(&int(3))]).unwrap().is_zero());
        let p = plucker(std::slice::from_ref(&v)).unwrap();
        assert_eq!(p.get(&[idx(&[1])]), int(1));
        assert_eq!(p.get(&[idx(&[2])]), int(2));
        assert_eq!(p.support_size(), 2);
        // non-regular jet: first column vanishes
        let j = Jet::from_values(2, 2, vec![int(0), int(1), int(0), int(5)]).unwrap();
        assert!(phi(&j)[0].is_zero());
        assert!(plucker_of_jet(&j).unwrap().is_zero());
    }

    #[test]
    fn z_point_fixtures() {
        let z = z_point(1, 1).unwrap();
        assert_eq!(z.coords().len(), 1);
        assert_eq!(z.get(&[idx(&[1])]), int(1));

        // raw derivatives e_1, e_2: columns e_1 and e_2/2 + e_1²
        let z = z_point(2, 2).unwrap();
        let expected: BTreeMap<Vec<SymIndex>, Rational> = [
            (vec![idx(&[1]), idx(&[2])], frac(1, 2)),
            (vec![idx(&[1]), idx(&[1, 1])], int(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(z.coords(), &expected);

        let z = z_point(3, 2).unwrap();
        assert_eq!(z.coords(), &expected);
        assert!(matches!(z_point(1, 2), Err(Error::KExceedsN { k: 2, n: 1 })));
    }

    #[test]
    fn displayed_z_form() {
        // e_1 ∧ (e_2 + e_1²) ∧ (e_3 + 2 e_1 e_2 + e_1³)
        let cols = vec![
            SymVector::basis(idx(&[1])),
            SymVector::basis(idx(&[2])).add(&SymVector::basis(idx(&[1, 1]))),
            SymVector::basis(idx(&[3]))
                .add(&SymVector::basis(idx(&[1, 2])).scale(&int(2)))
                .add(&SymVector::basis(idx(&[1, 1, 1]))),
        ];
        let displayed = plucker(&cols).unwrap();
        assert_eq!(z_point_taylor(3, 3).unwrap(), displayed);
        // the two conventions differ by diag(1/j!) in GL(n)
        let g = ExactMatrix::diagonal(&[int(1), frac(1, 2), frac(1, 6)]);
        let moved = plucker(&gl_action(&g, &cols).unwrap()).unwrap();
        assert!(projective_equal(&moved, &z_point(3, 3).unwrap()).unwrap());
        assert!(!projective_equal(&displayed, &z_point(3, 3).unwrap()).unwrap());
    }

    #[test]
    fn projective_equality() {
        let p = z_point(3, 2).unwrap();
        assert!(projective_equal(&p, &p).unwrap());
        assert!(projective_equal(&p, &p.scale(&int(3))).unwrap());
        assert!(projective_equal(&p, &p.scale(&frac(-2, 7))).unwrap());
        assert!(!projective_equal(&z_point(3, 3).unwrap(), &z_point_taylor(3, 3).unwrap()).unwrap());
        let zero = p.scale(&int(0));
        assert!(matches!(projective_equal(&zero, &p), Err(Error::ZeroPlucker)));
    }

    #[test]
    fn a_nk_examples() {
        for n in 1..=4 {
            for k in 1..=n {
                assert!(a_nk_membership(&z_point(n, k).unwrap()));
            }
        }
        let sq = plucker(&[
            SymVector::basis(idx(&[1, 1])),
            SymVector::basis(idx(&[1, 2])),
        ])
        .unwrap();
        assert!(!sq.is_zero());
        assert!(!a_nk_membership(&sq));
        assert!(a_nk_membership(&plucker(&[SymVector::basis(idx(&[1]))]).unwrap()));
    }

    #[test]
    fn gl_action_examples() {
        let cols = phi(&Sampler::new(2, 9).regular_jet(3, 3));
        assert_eq!(gl_action(&ExactMatrix::identity(3), &cols).unwrap(), cols);
        let singular = ExactMatrix::from_i64(&[&[1, 2, 0], &[2, 4, 0], &[0, 0, 1]]);
        assert!(matches!(gl_action(&singular, &cols), Err(Error::Singular)));

        let swap = ExactMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let z = phi(&Jet::from_derivatives(&ExactMatrix::identity(2)));
        let swapped = gl_action(&swap, &z).unwrap();
        let expected = vec![
            SymVector::basis(idx(&[2])),
            SymVector::basis(idx(&[1]))
                .scale(&frac(1, 2))
                .add(&SymVector::basis(idx(&[2, 2]))),
        ];
        assert_eq!(swapped, expected);
    }

    #[test]
    fn equivariance_on_samples() {
        let mut s = Sampler::new(10, 9);
        for k in 1..=3 {
            for n in 1..=3 {
                for _ in 0..3 {
                    let j = s.jet(n, k);
                    let g = s.invertible(n);
                    assert_eq!(phi(&j.left_mul(&g).unwrap()), gl_action(&g, &phi(&j)).unwrap());
                }
            }
        }
    }

    #[test]
    fn invariance_examples() {
        let mut s = Sampler::new(11, 9);
        for k in 1..=3 {
            for n in 1..=3 {
                let j = s.regular_jet(n, k);
                assert!(invariance_check(&j, &Reparam::identity(k)).unwrap());
                let lambda = s.nonzero_rational();
                assert!(invariance_check(&j, &Reparam::scaling(k, lambda).unwrap()).unwrap());
                assert!(invariance_check(&j, &s.unipotent(k)).unwrap());
                assert!(invariance_check(&j, &s.reparam(k)).unwrap());
            }
        }
        let bad = Jet::zero(2, 2);
        assert!(matches!(
            invariance_check(&bad, &Reparam::identity(2)),
            Err(Error::NonRegularJet)
        ));
    }

    #[test]
    fn relations_on_images_and_a_counterexample() {
        let mut s = Sampler::new(13, 9);
        for (k, n) in [(2, 2), (2, 3), (3, 2)] {
            let p = plucker_of_jet(&s.regular_jet(n, k)).unwrap();
            let r = plucker_relations(&p, 1).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        let p = plucker_of_jet(&s.regular_jet(4, 3)).unwrap();
        let r = plucker_relations(&p, 1).unwrap();
        assert!(!r.exhaustive);
        assert!(r.holds());

        // e1∧e2 + e3∧e4 is not decomposable
        let mut q = plucker(&[SymVector::basis(idx(&[1])), SymVector::basis(idx(&[2]))]).unwrap();
        q.coords.insert(vec![idx(&[3]), idx(&[4])], int(1));
        let r = plucker_relations(&q, 1).unwrap();
        assert!(r.exhaustive);
        assert!(r.violations > 0);
        assert!(!r.decomposable);
    }

    #[test]
    fn census_small() {
        let c = embedding_census(2, 2, 4, 4, 3, 9).unwrap();
        assert!(c.all_hold, "{c:?}");
        assert_eq!(c.invariance_checks, 16);
    }

    #[test]
    fn plucker_json_is_sparse_strings() {
        let v = serde_json::to_value(z_point(2, 2).unwrap()).unwrap();
        assert_eq!(v["k"], 2);
        assert_eq!(v["zero"], false);
        assert_eq!(v["coords"]["1|2"], "1/2");
        assert_eq!(v["coords"]["1|1.1"], "1/1");
    }
}
