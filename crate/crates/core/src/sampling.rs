//! Seeded, reproducible sampling of rationals, group elements and jets.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::Reparam;
use crate::jets::Jet;
use crate::linalg::rank;
use crate::matrix::ExactMatrix;
use crate::rational::{frac, Rational};

pub const DEFAULT_BOX: i64 = 9;

/// Draws `p/q` with `p` uniform in `[-bound, bound]` and `q` uniform in
/// `[1, bound]`.
pub struct Sampler {
    rng: ChaCha8Rng,
    bound: i64,
}

impl Sampler {
    pub fn new(seed: u64, bound: i64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound: bound.max(1),
        }
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn integer(&mut self) -> i64 {
        self.rng.gen_range(-self.bound..=self.bound)
    }

    pub fn rational(&mut self) -> Rational {
        let p = self.integer();
        let q = self.rng.gen_range(1..=self.bound);
        frac(p, q)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn reparam(&mut self, k: usize) -> Reparam {
        let mut coeffs = vec![self.nonzero_rational()];
        coeffs.extend((1..k).map(|_| self.rational()));
        Reparam::new(coeffs).expect("a_1 nonzero")
    }

    pub fn unipotent(&mut self, k: usize) -> Reparam {
        let mut coeffs = vec![Rational::one()];
        coeffs.extend((1..k).map(|_| self.rational()));
        Reparam::new(coeffs).expect("a_1 = 1")
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.rational());
            }
        }
        m
    }

    pub fn jet(&mut self, n: usize, k: usize) -> Jet {
        Jet::new(self.matrix(n, k))
    }

    pub fn regular_jet(&mut self, n: usize, k: usize) -> Jet {
        loop {
            let j = self.jet(n, k);
            if j.is_regular() {
                return j;
            }
        }
    }

    /// A jet whose first column is forced to zero (singular locus).
    pub fn singular_jet(&mut self, n: usize, k: usize) -> Jet {
        let mut t = self.matrix(n, k);
        for i in 0..n {
            t.set(i, 0, Rational::zero());
        }
        Jet::new(t)
    }

    pub fn invertible(&mut self, n: usize) -> ExactMatrix {
        loop {
            let g = self.matrix(n, n);
            if rank(&g) == n {
                return g;
            }
        }
    }
}
