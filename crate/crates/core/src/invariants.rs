//! Demailly–Semple spaces `E_{k,m}`: polynomials in the jet coordinates of
//! weighted degree `m` that are invariant under the unipotent subgroup
//! `U_k`.
//!
//! `U_k` is not reductive, so there is no averaging operator. Invariance is
//! imposed infinitesimally: `E_{k,m}` is the common kernel of the
//! derivations `D_2, …, D_k` induced by `Ξ ↦ Ξ·e_l` on the generic jet
//! matrix `Ξ`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{group_matrix, Reparam};
use crate::lie::algebra;
use crate::linalg::{kernel_basis, rank_rows};
use crate::matrix::ExactMatrix;
use crate::poly::{monomial_count, monomials, var_index, LinearSubstitution, Monomial, WeightedPoly};
use crate::rational::Rational;
use crate::sampling::{Sampler, DEFAULT_BOX};

/// Default refusal bound on the number of weighted-degree-`m` monomials.
pub const DEFAULT_CAP: usize = 20_000;

/// `D_l(ξ_{j,i}) = (Ξ·e_l)_{i,j}`, stored per variable as a sparse linear
/// form and extended by the Leibniz rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    k: usize,
    n: usize,
    index: usize,
    images: Vec<Vec<(usize, Rational)>>,
}

impl Derivation {
    pub fn new(k: usize, n: usize, index: usize) -> Result<Self> {
        if index < 1 || index > k {
            return Err(Error::InvalidArgument(format!(
                "derivation index {index} outside 1..={k}"
            )));
        }
        let e = algebra(k).basis_matrix(index).clone();
        let mut images = vec![Vec::new(); n * k];
        for i in 1..=n {
            for j in 1..=k {
                // (Ξ·e)_{i,j} = Σ_r ξ_{r,i} e[r][j]
                let form = &mut images[var_index(n, j, i)];
                for r in 1..=k {
                    let c = e.get(r - 1, j - 1);
                    if !c.is_zero() {
                        form.push((var_index(n, r, i), c.clone()));
                    }
                }
            }
        }
        Ok(Self { k, n, index, images })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `D(ξ_{j,i})` as a polynomial.
    pub fn image(&self, j: usize, i: usize) -> WeightedPoly {
        let mut p = WeightedPoly::zero(self.k, self.n);
        for (w, c) in &self.images[var_index(self.n, j, i)] {
            p = p.add(&WeightedPoly::var_by_index(self.k, self.n, *w).scale(c));
        }
        p
    }

    pub fn images(&self) -> &[Vec<(usize, Rational)>] {
        &self.images
    }

    pub fn apply(&self, p: &WeightedPoly) -> WeightedPoly {
        p.apply_linear_derivation(&self.images)
    }
}

/// `D_2, …, D_k`; empty for `k = 1`.
pub fn unipotent_derivations(k: usize, n: usize) -> Vec<Derivation> {
    (2..=k)
        .map(|l| Derivation::new(k, n, l).expect("index in range"))
        .collect()
}

pub fn is_annihilated(p: &WeightedPoly) -> bool {
    unipotent_derivations(p.k(), p.n())
        .iter()
        .all(|d| d.apply(p).is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSpace {
    pub k: usize,
    pub n: usize,
    pub m: u32,
    pub monomial_count: usize,
    pub basis: Vec<WeightedPoly>,
}

impl InvariantSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn check_cap(k: usize, n: usize, m: u32, cap: usize) -> Result<usize> {
    let size = monomial_count(k, n, m);
    if size > cap {
        return Err(Error::CapExceeded {
            k,
            n,
            m: m as usize,
            size,
            cap,
        });
    }
    Ok(size)
}

pub fn invariant_basis(k: usize, n: usize, m: u32) -> Result<InvariantSpace> {
    invariant_basis_capped(k, n, m, DEFAULT_CAP)
}

/// Kernel of the stacked maps `P ↦ D_l(P)` on the weighted-degree-`m`
/// coefficient space.
pub fn invariant_basis_capped(k: usize, n: usize, m: u32, cap: usize) -> Result<InvariantSpace> {
    if m < 1 {
        return Err(Error::InvalidArgument("weighted degree m must be >= 1".into()));
    }
    if k < 1 || n < 1 {
        return Err(Error::InvalidArgument("k and n must be >= 1".into()));
    }
    check_cap(k, n, m, cap)?;
    let basis = monomials(k, n, m);
    let cols = basis.len();

    // One row per (derivation, target monomial).
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for d in unipotent_derivations(k, n) {
        // D_l lowers weighted degree by l − 1
        let Some(lowered) = (m + 1).checked_sub(d.index() as u32) else {
            continue;
        };
        let targets = monomials(k, n, lowered);
        let target_index: HashMap<&Monomial, usize> =
            targets.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut block = vec![vec![Rational::zero(); cols]; targets.len()];
        for (c, mono) in basis.iter().enumerate() {
            let image = d.apply(&WeightedPoly::from_terms(k, n, vec![(mono.clone(), Rational::one())])?);
            for (t, coeff) in image.terms() {
                block[target_index[t]][c] = coeff.clone();
            }
        }
        rows.extend(block.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())));
    }

    let kernel = if rows.is_empty() {
        (0..cols)
            .map(|c| {
                let mut v = vec![Rational::zero(); cols];
                v[c] = Rational::one();
                v
            })
            .collect()
    } else {
        let m = ExactMatrix::from_rows_with_cols(rows, cols)?;
        kernel_basis(&m)
    };
    Ok(InvariantSpace {
        k,
        n,
        m,
        monomial_count: cols,
        basis: kernel
            .iter()
            .map(|v| WeightedPoly::from_coefficients(k, n, &basis, v))
            .collect(),
    })
}

/// The substitution `ξ_{j,i} ↦ (Ξ·M)_{i,j}` on the jet variables.
pub fn jet_substitution_matrix(n: usize, m: &ExactMatrix) -> ExactMatrix {
    let k = m.rows();
    let mut l = ExactMatrix::zeros(n * k, n * k);
    for i in 1..=n {
        for j in 1..=k {
            for r in 1..=k {
                let c = m.get(r - 1, j - 1);
                if !c.is_zero() {
                    l.set(var_index(n, r, i), var_index(n, j, i), c.clone());
                }
            }
        }
    }
    l
}

/// `P ↦ P(Ξ·M(φ))` with cached powers, for checking many polynomials
/// against one group element.
pub struct GroupSubstitution {
    inner: LinearSubstitution,
}

impl GroupSubstitution {
    pub fn new(n: usize, phi: &Reparam) -> Self {
        let k = phi.k();
        let l = jet_substitution_matrix(n, &group_matrix(phi).matrix);
        Self {
            inner: LinearSubstitution::new(k, n, &l).expect("square substitution"),
        }
    }

    pub fn apply(&mut self, p: &WeightedPoly) -> WeightedPoly {
        self.inner.apply(p)
    }
}

pub fn act_on_poly(p: &WeightedPoly, phi: &Reparam) -> Result<WeightedPoly> {
    if p.k() != phi.k() {
        return Err(Error::OrderMismatch(p.k(), phi.k()));
    }
    Ok(GroupSubstitution::new(p.n(), phi).apply(p))
}

/// Exact check of `P(Ξ·M(u)) = P(Ξ)`.
pub fn verify_invariance(p: &WeightedPoly, u: &Reparam) -> Result<bool> {
    Ok(act_on_poly(p, u)? == *p)
}

/// `P(Ξ·M(λ,0,…,0)) = λ^m·P` for a weighted-degree-`m` polynomial.
pub fn scales_by_character(p: &WeightedPoly, lambda: &Rational) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    let Some(m) = p.weighted_degree() else {
        return Ok(false);
    };
    let s = Reparam::scaling(p.k(), lambda.clone())?;
    Ok(act_on_poly(p, &s)? == p.scale(&lambda.pow(m as i32)))
}

fn coefficient_rank(polys: &[WeightedPoly], basis: &[Monomial]) -> usize {
    let index: HashMap<Monomial, usize> =
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let rows: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| p.coefficients_in(&index, basis.len()).expect("degree matches basis"))
        .collect();
    if rows.is_empty() {
        0
    } else {
        rank_rows(&rows, basis.len())
    }
}

/// `dim Σ_{a ≤ m/2} E_a·E_{m−a}` given the bases of `E_1, …, E_{m−1}`
/// (`lower[a - 1]` is `E_a`).
pub fn product_span_dim(k: usize, n: usize, m: u32, lower: &[InvariantSpace]) -> usize {
    let mut products = Vec::new();
    for a in 1..=m / 2 {
        let (ea, eb) = (&lower[a as usize - 1], &lower[(m - a) as usize - 1]);
        for (x, p) in ea.basis.iter().enumerate() {
            for (y, q) in eb.basis.iter().enumerate() {
                if a == m - a && y < x {
                    continue;
                }
                products.push(p.mul(q));
            }
        }
    }
    coefficient_rank(&products, &monomials(k, n, m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub k: usize,
    pub n: usize,
    pub m: u32,
    pub monomial_count: usize,
    pub invariant_dim: usize,
    pub product_span_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionTable {
    pub rows: Vec<TableRow>,
    #[serde(skip)]
    pub spaces: Vec<InvariantSpace>,
}

pub const TABLE_HEADER: &str = "k,n,m,monomial_count,invariant_dim,product_span_dim";

impl DimensionTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{TABLE_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.k, r.n, r.m, r.monomial_count, r.invariant_dim, r.product_span_dim
            ));
        }
        out
    }

    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.invariant_dim).collect()
    }
}

/// `dim E_{k,m}` for `m = 1..=m_max`, each backed by its kernel basis.
pub fn dimension_table(k: usize, n: usize, m_max: u32, cap: usize) -> Result<DimensionTable> {
    for m in 1..=m_max {
        check_cap(k, n, m, cap)?;
    }
    let spaces: Vec<InvariantSpace> = (1..=m_max)
        .into_par_iter()
        .map(|m| invariant_basis_capped(k, n, m, cap))
        .collect::<Result<_>>()?;
    let spans: Vec<usize> = (1..=m_max)
        .into_par_iter()
        .map(|m| product_span_dim(k, n, m, &spaces[..m as usize - 1]))
        .collect();
    let rows = spaces
        .iter()
        .zip(spans)
        .map(|(s, p)| TableRow {
            k,
            n,
            m: s.m,
            monomial_count: s.monomial_count,
            invariant_dim: s.dim(),
            product_span_dim: p,
        })
        .collect();
    Ok(DimensionTable { rows, spaces })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub m: u32,
    pub invariant_dim: usize,
    pub product_span_dim: usize,
    pub new_generators: usize,
    pub needs_new_generators: bool,
}

/// Bounded-degree evidence about generation of `⊕_m E_{k,m}`: a degree is
/// flagged when products of lower-degree invariants do not fill it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationProfile {
    pub claim: &'static str,
    pub k: usize,
    pub n: usize,
    pub m_max: u32,
    pub degrees: Vec<ProfileRow>,
    pub flagged: Vec<u32>,
}

pub fn generation_profile(k: usize, n: usize, m_max: u32, cap: usize) -> Result<GenerationProfile> {
    let table = dimension_table(k, n, m_max, cap)?;
    let degrees: Vec<ProfileRow> = table
        .rows
        .iter()
        .map(|r| ProfileRow {
            m: r.m,
            invariant_dim: r.invariant_dim,
            product_span_dim: r.product_span_dim,
            new_generators: r.invariant_dim - r.product_span_dim,
            needs_new_generators: r.product_span_dim < r.invariant_dim,
        })
        .collect();
    let flagged = degrees
        .iter()
        .filter(|r| r.needs_new_generators)
        .map(|r| r.m)
        .collect();
    Ok(GenerationProfile {
        claim: "invariant-ring-generation",
        k,
        n,
        m_max,
        degrees,
        flagged,
    })
}

/// Splits `P` into weighted-homogeneous components and checks each one by
/// derivation annihilation and against `trials` seeded unipotent elements.
pub fn graded_component_invariance_check(p: &WeightedPoly, trials: usize, seed: u64) -> bool {
    let mut sampler = Sampler::new(seed, DEFAULT_BOX);
    let us: Vec<Reparam> = (0..trials).map(|_| sampler.unipotent(p.k())).collect();
    p.homogeneous_components().values().all(|c| {
        is_annihilated(c)
            && us.iter().all(|u| verify_invariance(c, u).expect("orders agree"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kernel_basis;
    use crate::rational::{frac, int};

    fn xi(k: usize, n: usize, j: usize, i: usize) -> WeightedPoly {
        WeightedPoly::var(k, n, j, i)
    }

    fn wronskian() -> WeightedPoly {
        xi(2, 2, 1, 1)
            .mul(&xi(2, 2, 2, 2))
            .sub(&xi(2, 2, 1, 2).mul(&xi(2, 2, 2, 1)))
    }

    /// Independent oracle: common kernel of `P ↦ P(Ξ·M(u)) − P` over a few
    /// seeded unipotent `u`, assembled from group substitutions only.
    fn group_kernel_dim(k: usize, n: usize, m: u32) -> usize {
        let basis = monomials(k, n, m);
        // unipotent substitutions only lower weights, so images stay in degree <= m
        let targets: Vec<Monomial> = (1..=m).flat_map(|d| monomials(k, n, d)).collect();
        let index: HashMap<Monomial, usize> =
            targets.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut sampler = Sampler::new(99, 7);
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for _ in 0..3 {
            let mut sub = GroupSubstitution::new(n, &sampler.unipotent(k));
            let images: Vec<Vec<Rational>> = basis
                .iter()
                .map(|mono| {
                    let p = WeightedPoly::from_terms(k, n, vec![(mono.clone(), int(1))]).unwrap();
                    sub.apply(&p).sub(&p).coefficients_in(&index, targets.len()).unwrap()
                })
                .collect();
            // transpose: one row per target monomial
            for t in 0..targets.len() {
                rows.push(images.iter().map(|col| col[t].clone()).collect());
            }
        }
        kernel_basis(&ExactMatrix::from_rows_with_cols(rows, basis.len()).unwrap()).len()
    }

    #[test]
    fn derivation_examples() {
        let d = &unipotent_derivations(2, 1)[0];
        assert_eq!(d.image(2, 1), xi(2, 1, 1, 1));
        assert!(d.image(1, 1).is_zero());
        for n in 1..=3 {
            assert!(unipotent_derivations(1, n).is_empty());
        }
        // k=3, n=1: D_2 ξ_3 = 2ξ_2, D_2 ξ_2 = ξ_1, D_3 ξ_3 = ξ_1
        let ds = unipotent_derivations(3, 1);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].image(3, 1), xi(3, 1, 2, 1).scale(&int(2)));
        assert_eq!(ds[0].image(2, 1), xi(3, 1, 1, 1));
        assert_eq!(ds[1].image(3, 1), xi(3, 1, 1, 1));
        assert!(ds[1].image(2, 1).is_zero());
    }

    #[test]
    fn derivation_obeys_leibniz() {
        let d = &unipotent_derivations(3, 2)[0];
        let p = xi(3, 2, 2, 1).mul(&xi(3, 2, 3, 2)).add(&xi(3, 2, 1, 2));
        let q = xi(3, 2, 3, 1).pow(2);
        let lhs = d.apply(&p.mul(&q));
        let rhs = d.apply(&p).mul(&q).add(&p.mul(&d.apply(&q)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn basis_examples() {
        let s = invariant_basis(2, 1, 2).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis[0], xi(2, 1, 1, 1).pow(2));

        let s = invariant_basis(2, 2, 3).unwrap();
        let w = wronskian();
        let mut with_w: Vec<WeightedPoly> = s.basis.clone();
        with_w.push(w.clone());
        let mono = monomials(2, 2, 3);
        assert_eq!(coefficient_rank(&with_w, &mono), s.dim());
        assert!(is_annihilated(&w));

        for n in 1..=3 {
            for m in 1..=4u32 {
                let expected = monomial_count(1, n, m);
                assert_eq!(invariant_basis(1, n, m).unwrap().dim(), expected);
            }
        }
        assert!(invariant_basis(2, 2, 0).is_err());
    }

    #[test]
    fn basis_elements_are_homogeneous_and_independent() {
        for (k, n, m) in [(2, 2, 4), (3, 1, 6), (3, 2, 4)] {
            let s = invariant_basis(k, n, m).unwrap();
            for p in &s.basis {
                assert_eq!(p.weighted_degree(), Some(m));
                assert!(p.is_homogeneous());
                assert!(is_annihilated(p));
            }
            assert_eq!(coefficient_rank(&s.basis, &monomials(k, n, m)), s.dim());
        }
    }

    #[test]
    fn dims_match_group_kernel_oracle() {
        for (k, n, mmax) in [(2, 1, 5), (2, 2, 4), (3, 1, 6), (3, 2, 3)] {
            for m in 1..=mmax {
                assert_eq!(
                    invariant_basis(k, n, m).unwrap().dim(),
                    group_kernel_dim(k, n, m),
                    "k={k} n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn k2_n2_table_fixture() {
        let t = dimension_table(2, 2, 4, DEFAULT_CAP).unwrap();
        assert_eq!(t.dims(), vec![2, 3, 5, 7]);
        let spans: Vec<usize> = t.rows.iter().map(|r| r.product_span_dim).collect();
        assert_eq!(spans, vec![0, 3, 4, 7]);
        assert!(t.to_csv().starts_with("k,n,m,monomial_count,invariant_dim,product_span_dim\n2,2,1,2,2,0\n"));
    }

    #[test]
    fn verify_examples() {
        let mut s = Sampler::new(3, 9);
        for _ in 0..10 {
            let u = s.unipotent(3);
            assert!(verify_invariance(&xi(3, 2, 1, 1), &u).unwrap());
        }
        for c in [int(1), int(-4), frac(2, 7)] {
            let u = Reparam::new(vec![int(1), c]).unwrap();
            assert!(verify_invariance(&wronskian(), &u).unwrap());
        }
        let u = Reparam::new(vec![int(1), int(1)]).unwrap();
        assert!(!verify_invariance(&xi(2, 1, 2, 1), &u).unwrap());
        assert_eq!(
            act_on_poly(&xi(2, 1, 2, 1), &u).unwrap(),
            xi(2, 1, 2, 1).add(&xi(2, 1, 1, 1))
        );
    }

    #[test]
    fn cap_is_enforced() {
        match invariant_basis_capped(3, 3, 6, 10) {
            Err(Error::CapExceeded { k: 3, n: 3, m: 6, size, cap: 10 }) => {
                assert_eq!(size, monomial_count(3, 3, 6))
            }
            other => panic!("expected cap error, got {other:?}"),
        }
        assert!(matches!(
            dimension_table(2, 2, 8, 20),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn generation_profile_examples() {
        for n in 1..=3 {
            assert_eq!(generation_profile(1, n, 4, DEFAULT_CAP).unwrap().flagged, vec![1]);
        }
        let p = generation_profile(2, 1, 5, DEFAULT_CAP).unwrap();
        assert_eq!(p.flagged, vec![1]);
        assert!(p.degrees.iter().all(|r| r.invariant_dim == 1));
        let p = generation_profile(2, 2, 4, DEFAULT_CAP).unwrap();
        assert_eq!(p.flagged, vec![1, 3]);
        assert_eq!(p.degrees[2].new_generators, 1);
    }

    #[test]
    fn graded_component_examples() {
        let p = xi(2, 1, 1, 1).add(&xi(2, 1, 1, 1).pow(2));
        assert!(graded_component_invariance_check(&p, 10, 1));
        assert!(graded_component_invariance_check(&wronskian().add(&xi(2, 2, 1, 1)), 10, 2));
        assert!(!graded_component_invariance_check(&xi(2, 1, 2, 1), 10, 3));
        assert!(graded_component_invariance_check(&wronskian(), 10, 4));
    }

    #[test]
    fn products_of_invariants_are_invariant() {
        let e1 = invariant_basis(3, 2, 1).unwrap();
        let e4 = invariant_basis(3, 2, 4).unwrap();
        for p in &e1.basis {
            for q in &e4.basis {
                let pq = p.mul(q);
                assert!(is_annihilated(&pq));
                assert_eq!(pq.weighted_degree(), Some(5));
            }
        }
    }

    #[test]
    fn scaling_character() {
        let mut s = Sampler::new(8, 9);
        for (k, n, m) in [(2, 2, 3), (3, 1, 4), (2, 1, 5)] {
            for p in invariant_basis(k, n, m).unwrap().basis {
                for _ in 0..5 {
                    assert!(scales_by_character(&p, &s.nonzero_rational()).unwrap());
                }
            }
        }
        // a non-invariant homogeneous polynomial also scales; inhomogeneous does not
        assert!(scales_by_character(&xi(2, 1, 2, 1), &int(3)).unwrap());
        assert!(!scales_by_character(&xi(2, 1, 2, 1).add(&xi(2, 1, 1, 1)), &int(3)).unwrap());
    }

    #[test]
    fn derivation_group_consistency() {
        let mut s = Sampler::new(12, 9);
        for (k, n, m) in [(2, 2, 3), (3, 1, 4), (3, 2, 3)] {
            let space = invariant_basis(k, n, m).unwrap();
            for p in &space.basis {
                for _ in 0..10 {
                    assert!(verify_invariance(p, &s.unipotent(k)).unwrap());
                }
            }
            // converse: monomials outside the kernel move under some u
            for mono in monomials(k, n, m) {
                let p = WeightedPoly::from_terms(k, n, vec![(mono, int(1))]).unwrap();
                if !is_annihilated(&p) {
                    assert!((0..10).any(|_| !verify_invariance(&p, &s.unipotent(k)).unwrap()));
                }
            }
        }
    }
}
