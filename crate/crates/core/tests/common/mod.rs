//! Reference implementations used as oracles. They share no code with the
//! library beyond the rational type and the input containers.
#![allow(dead_code)]

use jetwronsk::poly::Polynomial;
use jetwronsk::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Q = Rational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn fact(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * q(i as i64))
}

/// Product of two coefficient vectors truncated after `t^order`.
pub fn series_mul(a: &[Q], b: &[Q], order: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn series_pow(a: &[Q], e: u32, order: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); order + 1];
    out[0] = Q::one();
    for _ in 0..e {
        out = series_mul(&out, a, order);
    }
    out
}

/// `f(γ_1(t), …, γ_n(t))` term by term.
pub fn compose_poly(f: &Polynomial, comps: &[Vec<Q>], order: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); order + 1];
    for (mono, c) in f.terms() {
        let mut term = vec![Q::zero(); order + 1];
        term[0] = c.clone();
        for (i, &e) in mono.0.iter().enumerate() {
            term = series_mul(&term, &series_pow(&comps[i], e, order), order);
        }
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    out
}

/// `outer(inner(t))` for `inner(0) = 0`, by summing powers.
pub fn compose_series(outer: &[Q], inner: &[Q], order: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); order + 1];
    let mut power = vec![Q::zero(); order + 1];
    power[0] = Q::one();
    for c in outer.iter().take(order + 1) {
        for (o, p) in out.iter_mut().zip(&power) {
            *o += c * p;
        }
        power = series_mul(&power, inner, order);
    }
    out
}

/// `[i][m] = m! · coeff_m(γ_i)`.
pub fn curve_derivatives(comps: &[Vec<Q>]) -> Vec<Vec<Q>> {
    comps
        .iter()
        .map(|c| c.iter().enumerate().map(|(m, x)| x * fact(m)).collect())
        .collect()
}

/// Determinant by the permutation expansion.
pub fn det_permutations(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Q::zero();
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, start: usize, m: &[Vec<Q>], total: &mut Q) {
    let n = perm.len();
    if start == n {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let mut prod = Q::one();
        for (row, &col) in perm.iter().enumerate() {
            prod *= &m[row][col];
        }
        if inversions % 2 == 0 {
            *total += prod;
        } else {
            *total -= prod;
        }
        return;
    }
    for i in start..n {
        perm.swap(start, i);
        permute(perm, start + 1, m, total);
        perm.swap(start, i);
    }
}

/// Rank by row reduction over `Q`.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pivot);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in 0..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// All `size`-subsets of `0..n`, increasing.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if n < size {
        return Vec::new();
    }
    let mut out = subsets(n - 1, size);
    for mut s in subsets(n - 1, size - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out.sort();
    out
}

/// Bell polynomial `B_{p,i}(x_1, …)` as a sum over set partitions of
/// `{1..p}` into `i` blocks: each block of size `j` contributes `x_j`.
pub fn bell_by_partitions(p: usize, i: usize, x: &[Q]) -> Q {
    fn go(next: usize, p: usize, blocks: &mut Vec<usize>, want: usize, x: &[Q], acc: &mut Q) {
        if next == p {
            if blocks.len() == want {
                *acc += blocks.iter().fold(Q::one(), |prod, &size| prod * &x[size - 1]);
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] += 1;
            go(next + 1, p, blocks, want, x, acc);
            blocks[b] -= 1;
        }
        if blocks.len() < want {
            blocks.push(1);
            go(next + 1, p, blocks, want, x, acc);
            blocks.pop();
        }
    }
    let mut acc = Q::zero();
    if p == 0 {
        return if i == 0 { Q::one() } else { Q::zero() };
    }
    go(0, p, &mut Vec::new(), i, x, &mut acc);
    acc
}
