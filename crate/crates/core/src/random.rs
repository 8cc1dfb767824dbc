//! Seeded generators for the randomized suites. Every trial gets its own
//! ChaCha stream derived from `(seed, suite, trial)`, so results do not depend
//! on scheduling.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::family::{multi_indices, FamilySpec};
use crate::jet::{CurveGerm, JetContext, JetPoint};
use crate::matrix::Matrix;
use crate::poly::{Monomial, Polynomial, Variables};
use crate::rational::Rational;
use crate::reparam::Reparam;
use crate::series::TruncatedSeries;

fn fnv1a(text: &str) -> u64 {
    text.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64, suite: &str, trial: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&fnv1a(suite).to_le_bytes());
        key[16..24].copy_from_slice(&trial.to_le_bytes());
        Gen {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// `p/q` with `|p| ≤ 9`, `1 ≤ q ≤ 4`; integers two times out of three.
    pub fn rational(&mut self) -> Rational {
        let num = self.range(-9, 9);
        let den = if self.chance(0.66) { 1 } else { self.range(1, 4) };
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if !q.is_zero() {
                return q;
            }
        }
    }

    pub fn polynomial(&mut self, vars: &Variables, max_degree: u32, max_terms: usize) -> Polynomial {
        let nterms = self.usize_in(1, max_terms.max(1));
        let mut terms = Vec::with_capacity(nterms);
        for _ in 0..nterms {
            let degree = self.range(0, max_degree as i64) as u32;
            let mut exps = vec![0u32; vars.len()];
            for _ in 0..degree {
                if vars.is_empty() {
                    break;
                }
                let i = self.index(vars.len());
                exps[i] += 1;
            }
            terms.push((Monomial(exps), self.nonzero_rational()));
        }
        Polynomial::from_terms(vars.clone(), terms)
    }

    pub fn nonzero_polynomial(&mut self, vars: &Variables, max_degree: u32, max_terms: usize) -> Polynomial {
        loop {
            let p = self.polynomial(vars, max_degree, max_terms);
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn series(&mut self, order: usize) -> TruncatedSeries {
        TruncatedSeries::new((0..=order).map(|_| self.rational()).collect()).unwrap()
    }

    /// Series with zero constant term.
    pub fn series_at_zero(&mut self, order: usize) -> TruncatedSeries {
        let mut s = self.series(order);
        s.set_coeff(0, Rational::zero());
        s
    }

    pub fn curve(&mut self, ctx: &JetContext) -> CurveGerm {
        let comps = (0..ctx.n()).map(|_| self.series(ctx.k())).collect();
        CurveGerm::new(ctx, comps).unwrap()
    }

    pub fn reparam(&mut self, k: usize) -> Reparam {
        let mut coeffs = vec![self.nonzero_rational()];
        coeffs.extend((1..k).map(|_| self.rational()));
        Reparam::new(coeffs).unwrap()
    }

    pub fn jet_point(&mut self, ctx: &JetContext) -> JetPoint {
        JetPoint::new(ctx, (0..ctx.num_vars()).map(|_| self.rational()).collect()).unwrap()
    }

    pub fn rational_vec(&mut self, len: usize) -> Vec<Rational> {
        (0..len).map(|_| self.rational()).collect()
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix<Rational> {
        Matrix::from_fn(rows, cols, |_, _| self.rational())
    }

    /// Low-rank matrices show up often enough to exercise the degenerate case.
    pub fn matrix_maybe_deficient(&mut self, rows: usize, cols: usize) -> Matrix<Rational> {
        if rows >= 2 && self.chance(0.3) {
            let mut m = self.matrix(rows, cols);
            let (a, b) = (self.index(rows), self.index(rows));
            let c = self.rational();
            for j in 0..cols {
                let v = m.get(a, j) * &c;
                if a != b {
                    m.set(b, j, v);
                } else {
                    m.set(b, j, Rational::zero());
                }
            }
            m
        } else if self.chance(0.1) {
            Matrix::from_fn(rows, cols, |_, _| Rational::zero())
        } else {
            self.matrix(rows, cols)
        }
    }

    /// Affine-linear `τ_j` with nonzero constant terms, random `a_I` on a
    /// random subset of the index set (at least one).
    pub fn family(&mut self, ctx: &JetContext, big_n: usize, delta: u32, r: u32, a_degree: u32) -> FamilySpec {
        let vars = ctx.base_vars().clone();
        let tau: Vec<Polynomial> = (0..=big_n)
            .map(|_| loop {
                let linear = self.polynomial(&vars, 1, 2);
                let t = &linear + &Polynomial::constant(vars.clone(), self.nonzero_rational());
                if !t.is_zero() {
                    break t;
                }
            })
            .collect();
        let indices = multi_indices(big_n + 1, delta);
        let mut a = BTreeMap::new();
        for index in &indices {
            if self.chance(0.6) {
                a.insert(index.clone(), self.nonzero_polynomial(&vars, a_degree, 2));
            }
        }
        if a.is_empty() {
            let i = self.index(indices.len());
            a.insert(indices[i].clone(), self.nonzero_polynomial(&vars, a_degree, 2));
        }
        FamilySpec::new(ctx, delta, r, tau, a).unwrap()
    }
}
