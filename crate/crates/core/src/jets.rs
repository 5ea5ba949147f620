//! The right action of `G_k` on `k`-jets `J_kℂ^n ≅ Hom(ℂ^k, ℂ^n)`.
//!
//! A jet is stored as the `n × k` matrix whose column `j` is the Taylor
//! coefficient `f^(j)(0)/j!`; acting by `φ` is the product `T·M(φ)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{group_matrix, Reparam};
use crate::lie::{algebra, Subalgebra};
use crate::linalg::{kernel_basis, rank, rank_rows};
use crate::matrix::ExactMatrix;
use crate::rational::{format_rational, parse_rational_list, Rational};
use crate::sampling::Sampler;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    taylor: ExactMatrix,
}

impl Jet {
    pub fn new(taylor: ExactMatrix) -> Self {
        Self { taylor }
    }

    pub fn zero(n: usize, k: usize) -> Self {
        Self::new(ExactMatrix::zeros(n, k))
    }

    /// Row-major `n × k` Taylor coefficients.
    pub fn from_values(n: usize, k: usize, values: Vec<Rational>) -> Result<Self> {
        if values.len() != n * k {
            return Err(Error::DimensionMismatch(format!(
                "jet needs {} entries (n={n}, k={k}), got {}",
                n * k,
                values.len()
            )));
        }
        Ok(Self::new(ExactMatrix::from_fn(n, k, |i, j| {
            values[i * k + j].clone()
        })))
    }

    pub fn parse(n: usize, k: usize, s: &str) -> Result<Self> {
        Self::from_values(n, k, parse_rational_list(s)?)
    }

    /// Jet from raw derivative columns `f^(j)(0)`, dividing column `j` by `j!`.
    pub fn from_derivatives(derivs: &ExactMatrix) -> Self {
        let k = derivs.cols();
        let mut t = derivs.clone();
        for j in 0..k {
            let f = crate::rational::factorial(j + 1);
            for i in 0..derivs.rows() {
                t.set(i, j, derivs.get(i, j) / &f);
            }
        }
        Self::new(t)
    }

    pub fn n(&self) -> usize {
        self.taylor.rows()
    }

    pub fn k(&self) -> usize {
        self.taylor.cols()
    }

    pub fn taylor(&self) -> &ExactMatrix {
        &self.taylor
    }

    /// Raw derivative column `f^(j)(0)` (1-based `j`).
    pub fn derivative(&self, j: usize) -> Vec<Rational> {
        let f = crate::rational::factorial(j);
        self.taylor.column(j - 1).iter().map(|v| v * &f).collect()
    }

    pub fn is_regular(&self) -> bool {
        (0..self.n()).any(|i| !self.taylor.get(i, 0).is_zero())
    }

    /// `g·J`, multiplying every column on the left by `g ∈ GL(n)`.
    pub fn left_mul(&self, g: &ExactMatrix) -> Result<Self> {
        Ok(Self::new(g.checked_mul(&self.taylor)?))
    }

    fn flatten(m: &ExactMatrix) -> Vec<Rational> {
        m.as_slice().to_vec()
    }
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.taylor.serialize(s)
    }
}

pub fn act(jet: &Jet, phi: &Reparam) -> Result<Jet> {
    if jet.k() != phi.k() {
        return Err(Error::OrderMismatch(jet.k(), phi.k()));
    }
    Ok(Jet::new(&jet.taylor * &group_matrix(phi).matrix))
}

pub fn is_regular(jet: &Jet) -> bool {
    jet.is_regular()
}

/// Differential of the orbit map at the identity: row `l` is `T·e_l`
/// flattened row-major, giving a `k × nk` matrix.
pub fn infinitesimal_action(jet: &Jet) -> ExactMatrix {
    let k = jet.k();
    let alg = algebra(k);
    let rows: Vec<Vec<Rational>> = alg
        .basis_matrices()
        .iter()
        .map(|e| Jet::flatten(&(&jet.taylor * e)))
        .collect();
    ExactMatrix::from_rows_with_cols(rows, jet.n() * k).expect("k rows of nk entries")
}

pub fn orbit_dim(jet: &Jet) -> usize {
    rank(&infinitesimal_action(jet))
}

/// `{ x ∈ g_k : T·x = 0 }`.
pub fn stabilizer_algebra(jet: &Jet) -> Subalgebra {
    let a = infinitesimal_action(jet);
    Subalgebra::span(jet.k(), &kernel_basis(&a.transpose()))
}

/// Elashvili criterion on `J_kℂ^n` at one jet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCertificate {
    pub claim: &'static str,
    pub k: usize,
    pub n: usize,
    pub jet: Jet,
    pub regular: bool,
    pub orbit_dim: usize,
    pub stabilizer_dim: usize,
    pub fixed_space_dim: usize,
    pub sum_dim: usize,
    pub elashvili_holds: bool,
}

/// Matrix of `v ↦ v·X` on row-major flattened `n × k` matrices.
fn right_mul_operator(n: usize, x: &ExactMatrix) -> ExactMatrix {
    let k = x.rows();
    let mut op = ExactMatrix::zeros(n * k, n * k);
    for i in 0..n {
        for j in 0..k {
            for r in 0..k {
                let c = x.get(r, j);
                if !c.is_zero() {
                    op.set(i * k + j, i * k + r, c.clone());
                }
            }
        }
    }
    op
}

pub fn elashvili_jet(jet: &Jet) -> OrbitCertificate {
    let (n, k) = (jet.n(), jet.k());
    let a = infinitesimal_action(jet);
    let orbit = rank(&a);
    let stab = stabilizer_algebra(jet);

    let mut stacked = ExactMatrix::zeros(0, n * k);
    for x in stab.basis() {
        stacked = stacked
            .vstack(&right_mul_operator(n, x.matrix()))
            .expect("nk columns");
    }
    let fixed = kernel_basis(&stacked);

    let mut rows = a.to_rows();
    rows.extend(fixed.iter().cloned());
    let sum_dim = rank_rows(&rows, n * k);

    OrbitCertificate {
        claim: "jet-action-generic-stabilizer",
        k,
        n,
        jet: jet.clone(),
        regular: jet.is_regular(),
        orbit_dim: orbit,
        stabilizer_dim: stab.dim(),
        fixed_space_dim: fixed.len(),
        sum_dim,
        elashvili_holds: sum_dim == n * k,
    }
}

fn jet_strings(j: &Jet) -> Vec<Vec<String>> {
    j.taylor
        .to_rows()
        .iter()
        .map(|r| r.iter().map(format_rational).collect())
        .collect()
}

/// `nk − max orbit dimension` over sampled jets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrdegReport {
    pub claim: &'static str,
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_orbit_dim: usize,
    pub trdeg: usize,
    pub witness_index: usize,
    pub witness: Vec<Vec<String>>,
}

fn sample_jets(k: usize, n: usize, samples: usize, seed: u64, bound: i64) -> Vec<Jet> {
    let mut s = Sampler::new(seed, bound);
    (0..samples).map(|_| s.jet(n, k)).collect()
}

pub fn trdeg(k: usize, n: usize, samples: usize, seed: u64, bound: i64) -> Result<TrdegReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let jets = sample_jets(k, n, samples, seed, bound);
    let dims: Vec<usize> = jets.par_iter().map(orbit_dim).collect();
    let (witness_index, &max) = dims
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty");
    Ok(TrdegReport {
        claim: "rosenlicht-transcendence-degree",
        k,
        n,
        samples,
        seed,
        max_orbit_dim: max,
        trdeg: n * k - max,
        witness_index,
        witness: jet_strings(&jets[witness_index]),
    })
}

/// Orbit-dimension census over generic samples, singular-locus samples and
/// the zero jet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrataReport {
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub generic: BTreeMap<usize, usize>,
    pub singular: BTreeMap<usize, usize>,
    pub combined: BTreeMap<usize, usize>,
}

impl StrataReport {
    /// CSV with header `orbit_dim,count` over the combined histogram.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("orbit_dim,count\n");
        for (d, c) in &self.combined {
            out.push_str(&format!("{d},{c}\n"));
        }
        out
    }
}

pub fn strata_histogram(k: usize, n: usize, samples: usize, seed: u64, bound: i64) -> StrataReport {
    let mut s = Sampler::new(seed, bound);
    let generic_jets: Vec<Jet> = (0..samples).map(|_| s.jet(n, k)).collect();
    let singular_jets: Vec<Jet> = (0..samples).map(|_| s.singular_jet(n, k)).collect();

    let histogram = |jets: &[Jet]| {
        let dims: Vec<usize> = jets.par_iter().map(orbit_dim).collect();
        let mut h = BTreeMap::new();
        for d in dims {
            *h.entry(d).or_insert(0) += 1;
        }
        h
    };
    let generic = histogram(&generic_jets);
    let mut singular = histogram(&singular_jets);
    *singular.entry(orbit_dim(&Jet::zero(n, k))).or_insert(0) += 1;

    let mut combined = generic.clone();
    for (d, c) in &singular {
        *combined.entry(*d).or_insert(0) += c;
    }
    StrataReport {
        k,
        n,
        samples,
        seed,
        generic,
        singular,
        combined,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodimReport {
    pub claim: &'static str,
    pub k: usize,
    pub n: usize,
    pub codim: usize,
    pub codim_at_least_two: bool,
}

/// Codimension of the non-regular locus `{ first column = 0 }`, as the rank
/// of its defining linear equations.
pub fn singular_locus_codim(k: usize, n: usize) -> CodimReport {
    let mut eqs = ExactMatrix::zeros(n, n * k);
    for i in 0..n {
        eqs.set(i, i * k, Rational::from_integer(1.into()));
    }
    let codim = rank(&eqs);
    CodimReport {
        claim: "singular-locus-codimension",
        k,
        n,
        codim,
        codim_at_least_two: codim >= 2,
    }
}

/// Stabilizer dimensions over seeded random regular jets, with every jet of
/// positive stabilizer dimension kept as a counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericStabilizerCensus {
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub trivial: usize,
    pub elashvili_holds: usize,
    pub rank_nullity_ok: bool,
    pub failures: Vec<OrbitCertificate>,
}

pub fn generic_stabilizer_census(
    k: usize,
    n: usize,
    samples: usize,
    seed: u64,
    bound: i64,
) -> GenericStabilizerCensus {
    let mut s = Sampler::new(seed, bound);
    let jets: Vec<Jet> = (0..samples).map(|_| s.regular_jet(n, k)).collect();
    let certs: Vec<OrbitCertificate> = jets.par_iter().map(elashvili_jet).collect();
    GenericStabilizerCensus {
        k,
        n,
        samples,
        seed,
        trivial: certs.iter().filter(|c| c.stabilizer_dim == 0).count(),
        elashvili_holds: certs.iter().filter(|c| c.elashvili_holds).count(),
        rank_nullity_ok: certs.iter().all(|c| c.orbit_dim + c.stabilizer_dim == k),
        failures: certs.into_iter().filter(|c| c.stabilizer_dim > 0).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::compose;
    use crate::lie::bracket;
    use crate::rational::{frac, int};

    fn jet(n: usize, k: usize, v: &[i64]) -> Jet {
        Jet::from_values(n, k, v.iter().map(|&x| int(x)).collect()).unwrap()
    }

    #[test]
    fn act_examples() {
        let j = jet(2, 3, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(act(&j, &Reparam::identity(3)).unwrap(), j);

        let lambda = frac(-2, 3);
        let s = Reparam::scaling(3, lambda.clone()).unwrap();
        let moved = act(&j, &s).unwrap();
        for i in 0..2 {
            for c in 0..3 {
                let expected = j.taylor().get(i, c) * lambda.pow(c as i32 + 1);
                assert_eq!(*moved.taylor().get(i, c), expected);
            }
        }

        let moved = act(&jet(1, 2, &[1, 0]), &Reparam::new(vec![int(1), int(1)]).unwrap()).unwrap();
        assert_eq!(moved, jet(1, 2, &[1, 1]));
        assert!(act(&j, &Reparam::identity(2)).is_err());
    }

    #[test]
    fn regularity() {
        assert!(jet(2, 2, &[1, 0, 0, 0]).is_regular());
        assert!(!Jet::zero(3, 2).is_regular());
        assert!(!jet(2, 2, &[0, 1, 0, 1]).is_regular());
    }

    #[test]
    fn infinitesimal_examples() {
        assert!(infinitesimal_action(&Jet::zero(2, 3)).is_zero());
        // k=2, n=2, columns e_1, e_2
        let j = jet(2, 2, &[1, 0, 0, 1]);
        assert_eq!(orbit_dim(&j), 2);
        // k=2, n=1, T = [a, b]: rows [a, 2b] and [0, a]
        let j = jet(1, 2, &[3, 5]);
        assert_eq!(
            infinitesimal_action(&j),
            ExactMatrix::from_i64(&[&[3, 10], &[0, 3]])
        );
        assert_eq!(orbit_dim(&j), 2);
    }

    #[test]
    fn orbit_and_stabilizer_examples() {
        for k in 1..=4 {
            let z = Jet::zero(2, k);
            assert_eq!(orbit_dim(&z), 0);
            assert_eq!(stabilizer_algebra(&z).dim(), k);
        }
        let j = jet(1, 2, &[1, 0]);
        assert_eq!(orbit_dim(&j), 2);
        assert_eq!(stabilizer_algebra(&j).dim(), 0);
    }

    #[test]
    fn stabilizer_is_a_subalgebra() {
        // a non-regular jet with a nontrivial stabilizer
        let j = jet(1, 3, &[0, 0, 1]);
        let s = stabilizer_algebra(&j);
        assert!(s.dim() > 0);
        assert!(s.is_closed());
        for x in s.basis() {
            assert!((&j.taylor * x.matrix()).is_zero());
        }
        for a in s.basis() {
            for b in s.basis() {
                assert!(s.contains(&bracket(a, b).unwrap()));
            }
        }
    }

    #[test]
    fn elashvili_jet_examples() {
        let c = elashvili_jet(&jet(2, 2, &[1, 0, 0, 1]));
        assert_eq!(c.stabilizer_dim, 0);
        assert_eq!(c.fixed_space_dim, 4);
        assert!(c.elashvili_holds);

        for (n, k) in [(1, 1), (2, 2), (1, 3), (3, 2)] {
            let c = elashvili_jet(&Jet::zero(n, k));
            assert_eq!(c.orbit_dim, 0);
            assert_eq!(c.stabilizer_dim, k);
            assert_eq!(c.fixed_space_dim, 0);
            assert!(!c.elashvili_holds);
        }

        for n in 1..=3 {
            let c = elashvili_jet(&Sampler::new(n as u64, 5).regular_jet(n, 1));
            assert!(c.elashvili_holds);
        }
    }

    #[test]
    fn trdeg_examples() {
        assert_eq!(trdeg(2, 2, 20, 7, 9).unwrap().trdeg, 2);
        assert_eq!(trdeg(2, 1, 20, 7, 9).unwrap().trdeg, 0);
        assert_eq!(trdeg(1, 1, 20, 7, 9).unwrap().trdeg, 0);
        assert!(trdeg(1, 1, 0, 7, 9).is_err());
    }

    #[test]
    fn strata_examples() {
        let r = strata_histogram(2, 3, 30, 1, 9);
        assert_eq!(r.generic.keys().copied().collect::<Vec<_>>(), vec![2]);
        let max = *r.combined.keys().max().unwrap();
        assert!(r.singular.keys().all(|&d| d < max));
        assert!(r.singular.contains_key(&0));
        assert_eq!(r.combined.values().sum::<usize>(), 61);
        assert!(r.to_csv().starts_with("orbit_dim,count\n"));
    }

    #[test]
    fn codim_examples() {
        for k in 1..=6 {
            let c = singular_locus_codim(k, 1);
            assert_eq!((c.codim, c.codim_at_least_two), (1, false));
            let c = singular_locus_codim(k, 2);
            assert_eq!((c.codim, c.codim_at_least_two), (2, true));
            assert_eq!(singular_locus_codim(k, 5).codim, 5);
        }
    }

    #[test]
    fn action_properties_on_samples() {
        let mut s = Sampler::new(5, 6);
        for k in 1..=4 {
            for n in 1..=3 {
                for _ in 0..8 {
                    let j = s.jet(n, k);
                    let (f, g) = (s.reparam(k), s.reparam(k));
                    let lhs = act(&act(&j, &f).unwrap(), &g).unwrap();
                    assert_eq!(lhs, act(&j, &compose(&f, &g).unwrap()).unwrap());
                    let moved = act(&j, &f).unwrap();
                    assert_eq!(moved.is_regular(), j.is_regular());
                    assert_eq!(orbit_dim(&moved), orbit_dim(&j));
                    assert_eq!(orbit_dim(&j) + stabilizer_algebra(&j).dim(), k);
                }
            }
        }
    }

    #[test]
    fn raw_derivatives_round_trip() {
        let d = ExactMatrix::from_i64(&[&[1, 2, 6], &[0, 4, 12]]);
        let j = Jet::from_derivatives(&d);
        assert_eq!(*j.taylor().get(1, 1), int(2));
        assert_eq!(*j.taylor().get(0, 2), int(1));
        assert_eq!(j.derivative(3), vec![int(6), int(12)]);
    }
}
