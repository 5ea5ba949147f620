//! The group `G_k` of truncated reparametrizations `t ↦ a_1 t + … + a_k t^k`
//! of `(ℂ, 0)` and its upper-triangular matrix realization.
//!
//! Entry `(i, j)` of the matrix is the coefficient of `t^j` in `φ(t)^i`,
//! i.e. the sum of `a_{s_1}⋯a_{s_i}` over compositions `s_1 + … + s_i = j`.
//! Jets are row vectors of Taylor coefficients acted on from the right, and
//! with that orientation `M(φ ∘ ψ) = M(φ)·M(ψ)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::rational::{serde_str, Rational};

/// Coefficients `(a_1, …, a_k)` with `a_1 ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Reparam {
    #[serde(with = "serde_str::vec")]
    coeffs: Vec<Rational>,
}

impl Reparam {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        match coeffs.first() {
            None => Err(Error::EmptyReparam),
            Some(a1) if a1.is_zero() => Err(Error::NotGroupElement),
            Some(_) => Ok(Self { coeffs }),
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k.max(1)];
        coeffs[0] = Rational::one();
        Self { coeffs }
    }

    /// The torus element `t ↦ λt`.
    pub fn scaling(k: usize, lambda: Rational) -> Result<Self> {
        let mut coeffs = vec![Rational::zero(); k.max(1)];
        coeffs[0] = lambda;
        Self::new(coeffs)
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_unipotent(&self) -> bool {
        self.coeffs[0].is_one()
    }

    /// Group law `t ↦ φ(ψ(t)) mod t^{k+1}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        compose(self, other)
    }

    pub fn invert(&self) -> Self {
        invert(self).expect("a_1 ≠ 0 is an invariant of Reparam")
    }

    pub fn matrix(&self) -> GroupMatrix {
        group_matrix(self)
    }
}

/// The realizing matrix of a [`Reparam`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupMatrix {
    pub k: usize,
    pub matrix: ExactMatrix,
}

/// All compositions of `total` into exactly `parts` positive parts, in
/// lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if remaining < parts {
            return;
        }
        for s in 1..=remaining - (parts - 1) {
            cur.push(s);
            rec(remaining - s, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Entry `(i, j)` (1-based) as a polynomial in `a_1, …, a_k`: exponent
/// vectors mapped to positive integer multiplicities.
pub fn entry_polynomial(i: usize, j: usize, k: usize) -> BTreeMap<Vec<u32>, u64> {
    let mut out = BTreeMap::new();
    for comp in compositions(j, i) {
        let mut exps = vec![0u32; k];
        for s in comp {
            exps[s - 1] += 1;
        }
        *out.entry(exps).or_insert(0) += 1;
    }
    out
}

pub fn group_matrix(phi: &Reparam) -> GroupMatrix {
    let k = phi.k();
    let a = phi.coeffs();
    let mut m = ExactMatrix::zeros(k, k);
    for i in 1..=k {
        for j in i..=k {
            let entry = compositions(j, i)
                .iter()
                .map(|comp| {
                    comp.iter()
                        .fold(Rational::one(), |acc, &s| acc * &a[s - 1])
                })
                .fold(Rational::zero(), |acc, t| acc + t);
            m.set(i - 1, j - 1, entry);
        }
    }
    GroupMatrix { k, matrix: m }
}

/// Truncated product of two series without constant term, stored as
/// coefficients of `t^1 … t^k`.
fn series_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let k = a.len();
    let mut out = vec![Rational::zero(); k];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        // t^{i+1}·t^{j+1} = t^{i+j+2}, index i+j+1
        for (j, y) in b.iter().enumerate().take(k.saturating_sub(i + 1)) {
            out[i + j + 1] += x * y;
        }
    }
    out
}

pub fn compose(phi: &Reparam, psi: &Reparam) -> Result<Reparam> {
    let k = phi.k();
    if psi.k() != k {
        return Err(Error::OrderMismatch(k, psi.k()));
    }
    // φ(ψ) = Σ a_i ψ^i, powers of ψ by truncated series multiplication
    let mut power = psi.coeffs().to_vec();
    let mut out = vec![Rational::zero(); k];
    for (i, a) in phi.coeffs().iter().enumerate() {
        if i > 0 {
            power = series_mul(&power, psi.coeffs());
        }
        if a.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(&power) {
            *o += a * p;
        }
    }
    Reparam::new(out)
}

/// Two-sided inverse by solving `φ(ψ(t)) = t` one coefficient at a time.
pub fn invert(phi: &Reparam) -> Result<Reparam> {
    let a1 = &phi.coeffs()[0];
    if a1.is_zero() {
        return Err(Error::NotGroupElement);
    }
    let k = phi.k();
    let mut psi = vec![Rational::zero(); k];
    psi[0] = a1.recip();
    for j in 1..k {
        // coefficient of t^{j+1} in φ(ψ) with ψ_{j+1} still 0; the unknown
        // enters linearly as a_1·ψ_{j+1}
        let trial = Reparam { coeffs: psi.clone() };
        let partial = compose(phi, &trial)?;
        psi[j] = -&partial.coeffs()[j] / a1;
    }
    Reparam::new(psi)
}

pub fn is_unipotent(phi: &Reparam) -> bool {
    phi.is_unipotent()
}
