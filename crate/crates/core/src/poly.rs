//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Polynomial`] carries its own ordered variable universe. Binary
//! operations between polynomials over different universes first align both
//! operands on the union of their variables (by name), so `z1 + z2` built from
//! two single-variable polynomials is well defined.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::TruncatedSeries;

/// Exponent vector, ordered graded-lexicographically: total degree first, then
/// lexicographic with the first variable as the most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Variables = Arc<[String]>;

pub fn variables<S: AsRef<str>>(names: &[S]) -> Variables {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    vars: Variables,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: Variables) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Variables, c: Rational) -> Self {
        let mut p = Polynomial::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn one(vars: Variables) -> Self {
        Polynomial::constant(vars, Rational::one())
    }

    /// The polynomial consisting of the single variable at `index`.
    pub fn var(vars: Variables, index: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        Polynomial::monomial(vars, Monomial(exps), Rational::one())
    }

    pub fn var_named(vars: Variables, name: &str) -> Result<Self> {
        let index = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variable {name}")))?;
        Ok(Polynomial::var(vars, index))
    }

    pub fn monomial(vars: Variables, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), vars.len(), "exponent vector length");
        let mut p = Polynomial::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from raw terms, dropping zeros and merging repeats.
    pub fn from_terms(vars: Variables, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), p.vars.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub fn variables(&self) -> &Variables {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Indices of variables that occur with a positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Re-expresses the polynomial over `universe`, which must contain every
    /// variable that actually occurs.
    pub fn with_variables(&self, universe: &Variables) -> Result<Polynomial> {
        if Arc::ptr_eq(&self.vars, universe) || self.vars[..] == universe[..] {
            return Ok(Polynomial {
                vars: universe.clone(),
                terms: self.terms.clone(),
            });
        }
        let mut map = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            match universe.iter().position(|u| u == name) {
                Some(j) => map.push(Some(j)),
                None if self.terms.keys().all(|m| m.0[i] == 0) => map.push(None),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "variable {name} is not in the target universe"
                    )))
                }
            }
        }
        let mut out = Polynomial::zero(universe.clone());
        for (m, c) in &self.terms {
            let mut exps = vec![0; universe.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    exps[j] += e;
                }
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Brings two polynomials onto a common universe (union by name).
    pub fn align(a: &Polynomial, b: &Polynomial) -> (Polynomial, Polynomial) {
        if Arc::ptr_eq(&a.vars, &b.vars) || a.vars[..] == b.vars[..] {
            return (a.clone(), b.with_variables(&a.vars).unwrap());
        }
        let mut names: Vec<String> = a.vars.to_vec();
        for v in b.vars.iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
        let universe: Variables = names.into();
        (
            a.with_variables(&universe).unwrap(),
            b.with_variables(&universe).unwrap(),
        )
    }

    fn same_universe(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars[..] == other.vars[..]
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.vars.clone());
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.vars.clone());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, index: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e > 0 {
                let mut exps = m.0.clone();
                exps[index] -= 1;
                out.add_term(Monomial(exps), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Exact evaluation at a point given in the polynomial's variable order.
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "point dimension");
        let mut total = Rational::zero();
        let mut cache: Vec<Vec<Rational>> = vec![vec![Rational::one()]; self.nvars()];
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap() * &point[i];
                    powers.push(next);
                }
                term *= &powers[e as usize];
            }
            total += term;
        }
        total
    }

    /// Composition `self(args)` with truncated power series, `args` in variable
    /// order.
    pub fn eval_series(&self, args: &[TruncatedSeries]) -> Result<TruncatedSeries> {
        if args.len() != self.nvars() {
            return Err(Error::InvalidInput(format!(
                "expected {} series, got {}",
                self.nvars(),
                args.len()
            )));
        }
        let order = args.first().map(|s| s.order()).unwrap_or(0);
        for s in args {
            if s.order() != order {
                return Err(Error::OrderMismatch(order, s.order()));
            }
        }
        let mut total = TruncatedSeries::zero(order);
        let mut cache: Vec<Vec<TruncatedSeries>> =
            vec![vec![TruncatedSeries::one(order)]; self.nvars()];
        for (m, c) in &self.terms {
            let mut term = TruncatedSeries::constant(c.clone(), order);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap().mul(&args[i])?;
                    powers.push(next);
                }
                term = term.mul(&powers[e as usize])?;
            }
            total = total.add(&term)?;
        }
        Ok(total)
    }

    /// Substitutes `images[i]` for variable `i`. All images must share one
    /// universe, which becomes the universe of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars() {
            return Err(Error::InvalidInput(format!(
                "expected {} images, got {}",
                self.nvars(),
                images.len()
            )));
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => self.vars.clone(),
        };
        let images: Vec<Polynomial> = images
            .iter()
            .map(|p| p.with_variables(&target))
            .collect::<Result<_>>()?;
        let mut cache: Vec<Vec<Polynomial>> =
            vec![vec![Polynomial::one(target.clone())]; self.nvars()];
        let mut total = Polynomial::zero(target.clone());
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap() * &images[i];
                    powers.push(next);
                }
                term = &term * &powers[e as usize];
            }
            total = &total + &term;
        }
        Ok(total)
    }

    /// Returns `q` with `q * den == num`, or [`Error::DivisionFails`].
    pub fn divide_exact(num: &Polynomial, den: &Polynomial) -> Result<Polynomial> {
        if den.is_zero() {
            return Err(Error::DivisionFails("division by the zero polynomial".into()));
        }
        let (mut rem, den) = Polynomial::align(num, den);
        let (lead_m, lead_c) = {
            let (m, c) = den.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        let mut quotient = Polynomial::zero(rem.vars.clone());
        while let Some((m, c)) = rem.leading_term() {
            let Some(qm) = m.div(&lead_m) else {
                return Err(Error::DivisionFails(format!(
                    "leading term of the remainder is not divisible by {}",
                    den
                )));
            };
            let qc = c / &lead_c;
            for (dm, dc) in &den.terms {
                rem.add_term(dm.mul(&qm), -(dc * &qc));
            }
            quotient.add_term(qm, qc);
        }
        Ok(quotient)
    }

    fn combine(&self, other: &Polynomial, negate: bool) -> Polynomial {
        if !self.same_universe(other) {
            let (a, b) = Polynomial::align(self, other);
            return a.combine(&b, negate);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), if negate { -c.clone() } else { c.clone() });
        }
        out
    }

    fn multiply(&self, other: &Polynomial) -> Polynomial {
        if !self.same_universe(other) {
            let (a, b) = Polynomial::align(self, other);
            return a.multiply(&b);
        }
        let mut out = Polynomial::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn fmt_monomial(&self, m: &Monomial) -> String {
        m.0.iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.vars[i].clone()
                } else {
                    format!("{}^{}", self.vars[i], e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.same_universe(other) {
            self.terms == other.terms
        } else {
            (self - other).is_zero()
        }
    }
}

impl Eq for Polynomial {}

/// Canonical form: terms in descending graded-lex order, explicit `*` and `^`,
/// coefficients as integers or `p/q`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (pos, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let mono = self.fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                let f: fn(&Polynomial, &Polynomial) -> Polynomial = $body;
                f(self, rhs)
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                $trait::$method(&self, rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.combine(b, false));
binop!(Sub, sub, |a, b| a.combine(b, true));
binop!(Mul, mul, |a, b| a.multiply(b));

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
