//! Exact elimination kernels.
//!
//! Every rank, kernel and span computation in the crate goes through an
//! [`Eliminator`]. Two are registered: `bareiss`, a fraction-free
//! Gauss–Jordan over ℤ (rows are cleared of denominators first and every
//! intermediate entry is a minor of the input, so the only divisions are
//! exact), and `gauss`, a plain rational Gauss–Jordan. Both return the unique
//! reduced row echelon form, which makes the second a drop-in oracle for the
//! first. `bareiss` is the default; coefficient growth in the invariant-space
//! kernels is what it exists for.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::rational::{common_denominator, Rational};

/// Reduced row echelon form: nonzero rows only, each with a leading 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub cols: usize,
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Null-space basis, one vector per free column in increasing order,
    /// normalized to 1 at its free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect()
    }
}

/// A strategy for exact row reduction.
pub trait Eliminator: Send + Sync {
    fn name(&self) -> &'static str;

    fn reduce_rows(&self, rows: &[Vec<Rational>], cols: usize) -> Echelon;

    fn reduce(&self, m: &ExactMatrix) -> Echelon {
        self.reduce_rows(&m.to_rows(), m.cols())
    }
}

/// Fraction-free Gauss–Jordan over the integers.
#[derive(Debug, Default, Clone, Copy)]
pub struct Bareiss;

/// Rational Gauss–Jordan with first-nonzero pivoting.
#[derive(Debug, Default, Clone, Copy)]
pub struct RationalGauss;

fn exact_div(v: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return v;
    }
    let (q, r) = v.div_rem(d);
    assert!(r.is_zero(), "fraction-free step produced an inexact division");
    q
}

impl Eliminator for Bareiss {
    fn name(&self) -> &'static str {
        "bareiss"
    }

    fn reduce_rows(&self, rows: &[Vec<Rational>], cols: usize) -> Echelon {
        let mut a: Vec<Vec<BigInt>> = rows
            .iter()
            .filter(|row| row.iter().any(|v| !v.is_zero()))
            .map(|row| {
                let den = common_denominator(row.iter());
                row.iter()
                    .map(|v| v.numer() * (&den / v.denom()))
                    .collect()
            })
            .collect();

        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == a.len() {
                break;
            }
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (head, tail) = a.split_at_mut(r);
            let (prow, rest) = tail.split_first_mut().expect("pivot row");
            let piv = prow[c].clone();
            let rescale = piv != prev;
            for row in head.iter_mut().chain(rest.iter_mut()) {
                let f = row[c].clone();
                if f.is_zero() {
                    if rescale {
                        for v in row.iter_mut() {
                            if !v.is_zero() {
                                *v = exact_div(&piv * &*v, &prev);
                            }
                        }
                    }
                    continue;
                }
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    let t = &piv * &*v - &f * pv;
                    *v = exact_div(t, &prev);
                }
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }

        let rows = a
            .into_iter()
            .take(r)
            .zip(&pivots)
            .map(|(row, &p)| {
                let lead = row[p].clone();
                row.into_iter()
                    .map(|v| Rational::new(v, lead.clone()))
                    .collect()
            })
            .collect();
        Echelon { cols, rows, pivots }
    }
}

impl Eliminator for RationalGauss {
    fn name(&self) -> &'static str {
        "gauss"
    }

    fn reduce_rows(&self, rows: &[Vec<Rational>], cols: usize) -> Echelon {
        let mut a: Vec<Vec<Rational>> = rows.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == a.len() {
                break;
            }
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for v in a[r].iter_mut() {
                *v *= &inv;
            }
            let prow = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Echelon {
            cols,
            rows: a,
            pivots,
        }
    }
}

static REGISTRY: &[&dyn Eliminator] = &[&Bareiss, &RationalGauss];

static ACTIVE: RwLock<&'static dyn Eliminator> = RwLock::new(&Bareiss);

/// Looks up a registered eliminator by name.
pub fn eliminator(name: &str) -> Option<&'static dyn Eliminator> {
    REGISTRY.iter().copied().find(|e| e.name() == name)
}

pub fn eliminator_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name()).collect()
}

/// Selects the process-wide eliminator used by [`rank`], [`kernel_basis`] and
/// everything built on them.
pub fn set_active_eliminator(name: &str) -> Result<()> {
    let e = eliminator(name).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown eliminator {name:?}; registered: {}",
            eliminator_names().join(", ")
        ))
    })?;
    *ACTIVE.write().expect("eliminator lock") = e;
    Ok(())
}

pub fn active_eliminator() -> &'static dyn Eliminator {
    *ACTIVE.read().expect("eliminator lock")
}

pub fn echelon(m: &ExactMatrix) -> Echelon {
    active_eliminator().reduce(m)
}

pub fn echelon_rows(rows: &[Vec<Rational>], cols: usize) -> Echelon {
    active_eliminator().reduce_rows(rows, cols)
}

/// Exact rank over ℚ.
pub fn rank(m: &ExactMatrix) -> usize {
    echelon(m).rank()
}

pub fn rank_rows(rows: &[Vec<Rational>], cols: usize) -> usize {
    echelon_rows(rows, cols).rank()
}

/// Exact null-space basis; `M·v = 0` for every returned `v`.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<Vec<Rational>> {
    echelon(m).kernel_basis()
}

/// Canonical basis (reduced echelon rows) of the span of `vectors`.
pub fn span_basis(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    echelon_rows(vectors, dim).rows
}

/// Matrix–vector product.
pub fn mat_vec(m: &ExactMatrix, v: &[Rational]) -> Vec<Rational> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}
