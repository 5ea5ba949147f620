//! The Lie algebra `g_k = Lie(G_k)` and its adjoint structure.
//!
//! The basis `e_1, …, e_k` is obtained by differentiating the symbolic entries
//! of the group matrix at the identity in the direction of `a_l`; this fixes
//! every structure constant without choosing an abstract presentation.
//! Concretely `e_l` has entry `i` at position `(i, i + l − 1)`, so
//! `e_1 = diag(1, …, k)`, and the matrix commutator gives
//! `[e_a, e_b] = (a − b)·e_{a+b−1}` (zero when `a + b − 1 > k`).
//!
//! Certificates (Elashvili criterion, Cartan, Weyl finiteness) are exact rank
//! computations at a probe point; whether a point is generic is only ever
//! reported from the computed data.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{entry_polynomial, group_matrix, Reparam};
use crate::linalg::{echelon_rows, kernel_basis, rank_rows, span_basis};
use crate::matrix::ExactMatrix;
use crate::rational::{format_rational, Rational};
use crate::sampling::Sampler;

/// Basis matrices of `g_k` and a precomputed coordinate solver.
#[derive(Debug)]
pub struct GkAlgebra {
    k: usize,
    basis: Vec<ExactMatrix>,
    // matrix positions (row-major index) on which the basis is independent
    probe_positions: Vec<usize>,
    // inverse of the basis restricted to those positions
    probe_inverse: ExactMatrix,
}

impl GkAlgebra {
    fn build(k: usize) -> Self {
        let basis = differentiate_group_matrix(k);
        let rows: Vec<Vec<Rational>> = basis.iter().map(|m| m.as_slice().to_vec()).collect();
        let ech = echelon_rows(&rows, k * k);
        assert_eq!(ech.rank(), k, "basis of g_k must be independent");
        let probe_positions = ech.pivots.clone();
        let restricted = ExactMatrix::from_fn(k, k, |l, p| rows[l][probe_positions[p]].clone());
        let probe_inverse = restricted.inverse().expect("independent on pivot positions");
        Self {
            k,
            basis,
            probe_positions,
            probe_inverse,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Basis matrix `e_l` (1-based).
    pub fn basis_matrix(&self, l: usize) -> &ExactMatrix {
        &self.basis[l - 1]
    }

    pub fn basis_matrices(&self) -> &[ExactMatrix] {
        &self.basis
    }

    pub fn matrix_of(&self, coords: &[Rational]) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(self.k, self.k);
        for (c, e) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                m = &m + &e.scale(c);
            }
        }
        m
    }

    /// Coordinates of `m` in the e-basis; fails when `m ∉ g_k`.
    pub fn coordinates(&self, m: &ExactMatrix) -> Result<Vec<Rational>> {
        if m.rows() != self.k || m.cols() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "expected {0}x{0} matrix",
                self.k
            )));
        }
        let restricted: Vec<Rational> = self
            .probe_positions
            .iter()
            .map(|&p| m.as_slice()[p].clone())
            .collect();
        let coords: Vec<Rational> = (0..self.k)
            .map(|l| {
                restricted
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (p, v)| {
                        acc + v * self.probe_inverse.get(p, l)
                    })
            })
            .collect();
        if self.matrix_of(&coords) != *m {
            return Err(Error::ClosureViolation { k: self.k });
        }
        Ok(coords)
    }
}

/// `d/ds M(identity + s·δ_l)` at `s = 0` for each `l`, from the symbolic
/// entry polynomials.
fn differentiate_group_matrix(k: usize) -> Vec<ExactMatrix> {
    (1..=k)
        .map(|l| {
            let mut m = ExactMatrix::zeros(k, k);
            for i in 1..=k {
                for j in i..=k {
                    let mut acc = 0u64;
                    for (exps, mult) in entry_polynomial(i, j, k) {
                        let e = exps[l - 1];
                        if e == 0 {
                            continue;
                        }
                        let mut rest = exps.clone();
                        rest[l - 1] -= 1;
                        // evaluate at a = (1, 0, …, 0)
                        if rest[1..].iter().all(|&x| x == 0) {
                            acc += mult * u64::from(e);
                        }
                    }
                    if acc != 0 {
                        m.set(i - 1, j - 1, Rational::from_integer(acc.into()));
                    }
                }
            }
            m
        })
        .collect()
}

/// Shared, lazily built algebra for order `k`.
pub fn algebra(k: usize) -> Arc<GkAlgebra> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GkAlgebra>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = cache.lock().expect("algebra cache").get(&k) {
        return a.clone();
    }
    let built = Arc::new(GkAlgebra::build(k));
    cache
        .lock()
        .expect("algebra cache")
        .entry(k)
        .or_insert(built)
        .clone()
}

/// Element `Σ b_l e_l` of `g_k`, carrying its realized matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    coords: Vec<Rational>,
    matrix: ExactMatrix,
}

impl LieElement {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("g_k needs k >= 1".into()));
        }
        let matrix = algebra(coords.len()).matrix_of(&coords);
        Ok(Self { coords, matrix })
    }

    pub fn zero(k: usize) -> Self {
        Self::new(vec![Rational::zero(); k]).expect("k >= 1")
    }

    /// Basis element `e_l`, 1-based.
    pub fn basis(k: usize, l: usize) -> Self {
        let mut c = vec![Rational::zero(); k];
        c[l - 1] = Rational::one();
        Self::new(c).expect("k >= 1")
    }

    pub fn from_matrix(m: &ExactMatrix) -> Result<Self> {
        let coords = algebra(m.rows()).coordinates(m)?;
        Ok(Self {
            coords,
            matrix: m.clone(),
        })
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let c = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Self::new(c).expect("same k")
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coords.iter().map(|a| a * s).collect()).expect("k >= 1")
    }
}

impl Serialize for LieElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords: Vec<String> = self.coords.iter().map(format_rational).collect();
        coords.serialize(s)
    }
}

/// `e_1, …, e_k`.
pub fn lie_basis(k: usize) -> Vec<LieElement> {
    (1..=k).map(|l| LieElement::basis(k, l)).collect()
}

/// Matrix commutator re-expressed in the e-basis.
pub fn bracket(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    if x.k() != y.k() {
        return Err(Error::OrderMismatch(x.k(), y.k()));
    }
    LieElement::from_matrix(&x.matrix.commutator(&y.matrix))
}

/// `ad(x)` in the e-basis: column `j` holds the coordinates of `[x, e_j]`.
pub fn ad_action_matrix(x: &LieElement) -> ExactMatrix {
    let k = x.k();
    let mut m = ExactMatrix::zeros(k, k);
    for (j, e) in lie_basis(k).iter().enumerate() {
        let b = bracket(x, e).expect("g_k is closed under the bracket");
        for (i, c) in b.coords().iter().enumerate() {
            m.set(i, j, c.clone());
        }
    }
    m
}

/// A linear subspace of `g_k` with a canonical (reduced echelon) basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subalgebra {
    k: usize,
    basis: Vec<LieElement>,
}

impl Subalgebra {
    /// Span of the given coordinate vectors.
    pub fn span(k: usize, vectors: &[Vec<Rational>]) -> Self {
        let basis = span_basis(vectors, k)
            .into_iter()
            .map(|c| LieElement::new(c).expect("k >= 1"))
            .collect();
        Self { k, basis }
    }

    /// Span that must be closed under the bracket.
    pub fn checked(k: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        let s = Self::span(k, vectors);
        if !s.is_closed() {
            return Err(Error::InvalidArgument("span is not closed under the bracket".into()));
        }
        Ok(s)
    }

    pub fn whole(k: usize) -> Self {
        Self {
            k,
            basis: lie_basis(k),
        }
    }

    pub fn zero(k: usize) -> Self {
        Self { k, basis: vec![] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LieElement] {
        &self.basis
    }

    fn coord_rows(&self) -> Vec<Vec<Rational>> {
        self.basis.iter().map(|b| b.coords().to_vec()).collect()
    }

    pub fn contains(&self, x: &LieElement) -> bool {
        let mut rows = self.coord_rows();
        rows.push(x.coords().to_vec());
        rank_rows(&rows, self.k) == self.dim()
    }

    pub fn is_commutative(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| bracket(a, b).expect("closed").is_zero())
        })
    }

    pub fn is_closed(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| self.contains(&bracket(a, b).expect("closed")))
        })
    }

    /// Dimensions of the lower central series `S ⊇ [S,S] ⊇ [S,[S,S]] ⊇ …`
    /// until it stabilizes.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let mut dims = vec![self.dim()];
        let mut current = self.clone();
        loop {
            let brackets: Vec<Vec<Rational>> = self
                .basis
                .iter()
                .flat_map(|s| {
                    current
                        .basis
                        .iter()
                        .map(move |c| bracket(s, c).expect("closed").coords().to_vec())
                })
                .collect();
            let next = Self::span(self.k, &brackets);
            let d = next.dim();
            if d == current.dim() {
                return dims;
            }
            dims.push(d);
            if d == 0 {
                return dims;
            }
            current = next;
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last() == Some(&0)
    }
}

impl Serialize for Subalgebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Subalgebra", 3)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("basis", &self.basis)?;
        st.end()
    }
}

fn kernel_subalgebra(k: usize, m: &ExactMatrix) -> Subalgebra {
    Subalgebra::span(k, &kernel_basis(m))
}

/// `z_g(x)`, the kernel of `ad(x)`.
pub fn centralizer(x: &LieElement) -> Subalgebra {
    kernel_subalgebra(x.k(), &ad_action_matrix(x))
}

/// `{ y : [c, y] = 0 for every c in S }`.
pub fn fixed_space(s: &Subalgebra) -> Subalgebra {
    let k = s.k();
    let mut stacked = ExactMatrix::zeros(0, k);
    for c in s.basis() {
        stacked = stacked.vstack(&ad_action_matrix(c)).expect("k columns");
    }
    kernel_subalgebra(k, &stacked)
}

/// `{ y : [y, s] ∈ S for all s ∈ S }`.
pub fn normalizer(s: &Subalgebra) -> Subalgebra {
    let k = s.k();
    // rows of `annihilator` cut out span(S)
    let span_rows = ExactMatrix::from_rows_with_cols(s.coord_rows(), k).expect("k columns");
    let annihilator = kernel_basis(&span_rows);
    if annihilator.is_empty() {
        return Subalgebra::whole(k);
    }
    let q = ExactMatrix::from_rows(annihilator).expect("rectangular");
    let mut stacked = ExactMatrix::zeros(0, k);
    for b in s.basis() {
        // [y, b] = −ad(b)·y, sign irrelevant for the kernel
        stacked = stacked.vstack(&(&q * &ad_action_matrix(b))).expect("k columns");
    }
    kernel_subalgebra(k, &stacked)
}

/// `[g_k, g_k]`, spanned by all brackets of basis elements.
pub fn derived_subalgebra(k: usize) -> Subalgebra {
    let basis = lie_basis(k);
    let brackets: Vec<Vec<Rational>> = basis
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            basis[i + 1..]
                .iter()
                .map(move |b| bracket(a, b).expect("closed").coords().to_vec())
        })
        .collect();
    Subalgebra::span(k, &brackets)
}

/// `M(g)·y·M(g)⁻¹`, re-expressed in the e-basis.
pub fn adjoint_conjugation(g: &Reparam, y: &LieElement) -> Result<LieElement> {
    if g.k() != y.k() {
        return Err(Error::OrderMismatch(g.k(), y.k()));
    }
    let m = group_matrix(g).matrix;
    let inv = m.inverse().ok_or(Error::Singular)?;
    LieElement::from_matrix(&(&(&m * y.matrix()) * &inv))
}

fn coord_strings(x: &LieElement) -> Vec<String> {
    x.coords().iter().map(format_rational).collect()
}

/// Elashvili criterion for the adjoint action at `x`:
/// `[g, x] + g^{z(x)} = g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElashviliAdjointCert {
    pub claim: &'static str,
    pub k: usize,
    pub probe_point: Vec<String>,
    pub bracket_image_dim: usize,
    pub centralizer_dim: usize,
    pub fixed_space_dim: usize,
    pub sum_dim: usize,
    pub holds: bool,
    pub centralizer_commutative: bool,
    /// `[g, x] ⊕ z(x) = g`
    pub direct_sum: bool,
}

pub fn elashvili_adjoint(x: &LieElement) -> ElashviliAdjointCert {
    let k = x.k();
    let ad = ad_action_matrix(x);
    // image of ad(x) = column space
    let image: Vec<Vec<Rational>> = ad.transpose().to_rows();
    let image_dim = rank_rows(&image, k);
    let z = centralizer(x);
    let fixed = fixed_space(&z);

    let mut sum_rows = image.clone();
    sum_rows.extend(fixed.coord_rows());
    let sum_dim = rank_rows(&sum_rows, k);

    let mut direct_rows = image;
    direct_rows.extend(z.coord_rows());
    let direct_sum = image_dim + z.dim() == k && rank_rows(&direct_rows, k) == k;

    ElashviliAdjointCert {
        claim: "adjoint-generic-stabilizer",
        k,
        probe_point: coord_strings(x),
        bracket_image_dim: image_dim,
        centralizer_dim: z.dim(),
        fixed_space_dim: fixed.dim(),
        sum_dim,
        holds: sum_dim == k,
        centralizer_commutative: z.is_commutative(),
        direct_sum,
    }
}

/// Whether `h = z(x)` is a Cartan subalgebra (nilpotent, self-normalizing)
/// and commutative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanCert {
    pub claim: &'static str,
    pub k: usize,
    pub probe_point: Vec<String>,
    pub dim: usize,
    pub commutative: bool,
    pub nilpotent: bool,
    pub normalizer_dim: usize,
    pub self_normalizing: bool,
    pub is_cartan: bool,
}

pub fn cartan_certificate(x: &LieElement) -> CartanCert {
    let h = centralizer(x);
    let n = normalizer(&h);
    let nilpotent = h.is_nilpotent();
    let self_normalizing = n.dim() == h.dim();
    CartanCert {
        claim: "cartan-subalgebras-commutative",
        k: x.k(),
        probe_point: coord_strings(x),
        dim: h.dim(),
        commutative: h.is_commutative(),
        nilpotent,
        normalizer_dim: n.dim(),
        self_normalizing,
        is_cartan: nilpotent && self_normalizing,
    }
}

/// Infinitesimal Weyl-finiteness certificate: `n_g(z(x)) = z(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeylCert {
    pub claim: &'static str,
    pub k: usize,
    pub probe_point: Vec<String>,
    pub cartan_precondition: bool,
    pub centralizer_dim: usize,
    pub normalizer_dim: usize,
    pub equality: bool,
}

pub fn weyl_finiteness_certificate(x: &LieElement) -> WeylCert {
    let cartan = cartan_certificate(x);
    WeylCert {
        claim: "adjoint-weyl-group-finite",
        k: x.k(),
        probe_point: cartan.probe_point.clone(),
        cartan_precondition: cartan.is_cartan,
        centralizer_dim: cartan.dim,
        normalizer_dim: cartan.normalizer_dim,
        equality: cartan.self_normalizing,
    }
}

/// How probe points for the adjoint certificates are chosen.
pub trait ProbeStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn probes(&self, k: usize, count: usize, seed: u64, bound: i64) -> Vec<LieElement>;
}

/// The semisimple element `e_1` only.
pub struct E1Probe;

/// `b_1·e_1 + Σ b_l e_l` with `b_1 ≠ 0` and random rational coefficients.
pub struct RandomDiagonalProbe;

impl ProbeStrategy for E1Probe {
    fn name(&self) -> &'static str {
        "e1"
    }

    fn probes(&self, k: usize, _count: usize, _seed: u64, _bound: i64) -> Vec<LieElement> {
        vec![LieElement::basis(k, 1)]
    }
}

impl ProbeStrategy for RandomDiagonalProbe {
    fn name(&self) -> &'static str {
        "random"
    }

    fn probes(&self, k: usize, count: usize, seed: u64, bound: i64) -> Vec<LieElement> {
        let mut s = Sampler::new(seed, bound);
        (0..count.max(1))
            .map(|_| {
                let mut c = vec![s.nonzero_rational()];
                c.extend((1..k).map(|_| s.rational()));
                LieElement::new(c).expect("k >= 1")
            })
            .collect()
    }
}

static PROBES: &[&dyn ProbeStrategy] = &[&E1Probe, &RandomDiagonalProbe];

pub fn probe_strategy(name: &str) -> Option<&'static dyn ProbeStrategy> {
    PROBES.iter().copied().find(|p| p.name() == name)
}

pub fn probe_strategy_names() -> Vec<&'static str> {
    PROBES.iter().map(|p| p.name()).collect()
}
