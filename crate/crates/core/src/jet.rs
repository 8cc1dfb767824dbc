//! Jet coordinates, total jet derivatives and jets of curve germs.
//!
//! A [`JetContext`] fixes `n` base coordinates and a jet order `k`. The jet
//! variables are `z_i^(m)` for `1 ≤ i ≤ n`, `0 ≤ m ≤ k`, printed as `zi`
//! followed by `m` primes. Within the variable universe they are ordered by
//! base index, then by decreasing derivative order, so that the canonical
//! printing of `d^[2](z1*z2)` reads `z1''*z2 + 2*z1'*z2' + z1*z2''`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, Variables};
use crate::rational::{factorial, parse_rational, Rational};
use crate::series::TruncatedSeries;

#[derive(Clone, Debug)]
pub struct JetContext {
    n: usize,
    k: usize,
    jet_vars: Variables,
    base_vars: Variables,
}

impl PartialEq for JetContext {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k
    }
}

impl Eq for JetContext {}

pub fn jet_var_name(i: usize, m: usize) -> String {
    format!("z{}{}", i + 1, "'".repeat(m))
}

impl JetContext {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("a jet context needs n >= 1".into()));
        }
        let mut names = Vec::with_capacity(n * (k + 1));
        for i in 0..n {
            for m in (0..=k).rev() {
                names.push(jet_var_name(i, m));
            }
        }
        Ok(JetContext {
            n,
            k,
            jet_vars: names.into(),
            base_vars: (0..n).map(|i| jet_var_name(i, 0)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_vars(&self) -> usize {
        self.n * (self.k + 1)
    }

    /// Universe `z1..zn` for base polynomials.
    pub fn base_vars(&self) -> &Variables {
        &self.base_vars
    }

    pub fn jet_vars(&self) -> &Variables {
        &self.jet_vars
    }

    /// Position of `z_i^(m)` (0-based `i`) in the jet universe.
    pub fn index(&self, i: usize, m: usize) -> usize {
        debug_assert!(i < self.n && m <= self.k);
        i * (self.k + 1) + (self.k - m)
    }

    /// Inverse of [`JetContext::index`].
    pub fn coordinate(&self, index: usize) -> (usize, usize) {
        (index / (self.k + 1), self.k - index % (self.k + 1))
    }

    /// Pulls a polynomial in `z1..zn` (or already in jet variables) into the
    /// jet universe.
    pub fn lift(&self, f: &Polynomial) -> Result<JetPolynomial> {
        let poly = f.with_variables(&self.jet_vars).map_err(|_| {
            Error::ContextMismatch(format!(
                "polynomial over {:?} does not fit a context with n = {}, k = {}",
                &f.variables()[..],
                self.n,
                self.k
            ))
        })?;
        Ok(JetPolynomial {
            ctx: self.clone(),
            poly,
        })
    }

    pub fn constant(&self, c: Rational) -> JetPolynomial {
        JetPolynomial {
            ctx: self.clone(),
            poly: Polynomial::constant(self.jet_vars.clone(), c),
        }
    }

    /// The jet variable `z_i^(m)` as a polynomial.
    pub fn variable(&self, i: usize, m: usize) -> JetPolynomial {
        JetPolynomial {
            ctx: self.clone(),
            poly: Polynomial::var(self.jet_vars.clone(), self.index(i, m)),
        }
    }
}

/// A polynomial function on the jet space of a [`JetContext`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPolynomial {
    ctx: JetContext,
    poly: Polynomial,
}

impl JetPolynomial {
    pub fn new(ctx: &JetContext, poly: Polynomial) -> Result<Self> {
        ctx.lift(&poly)
    }

    pub fn context(&self) -> &JetContext {
        &self.ctx
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Highest derivative order `m` of any variable that occurs.
    pub fn max_order(&self) -> Option<usize> {
        self.poly
            .support()
            .into_iter()
            .map(|idx| self.ctx.coordinate(idx).1)
            .max()
    }

    fn wrap(&self, poly: Polynomial) -> JetPolynomial {
        JetPolynomial {
            ctx: self.ctx.clone(),
            poly,
        }
    }

    fn check(&self, other: &JetPolynomial) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch("jet polynomials from different contexts".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &JetPolynomial) -> Result<JetPolynomial> {
        self.check(other)?;
        Ok(self.wrap(&self.poly + &other.poly))
    }

    pub fn sub(&self, other: &JetPolynomial) -> Result<JetPolynomial> {
        self.check(other)?;
        Ok(self.wrap(&self.poly - &other.poly))
    }

    pub fn mul(&self, other: &JetPolynomial) -> Result<JetPolynomial> {
        self.check(other)?;
        Ok(self.wrap(&self.poly * &other.poly))
    }

    pub fn scale(&self, c: &Rational) -> JetPolynomial {
        self.wrap(self.poly.scale(c))
    }

    pub fn pow(&self, e: u32) -> JetPolynomial {
        self.wrap(self.poly.pow(e))
    }

    pub fn divide_exact(&self, den: &JetPolynomial) -> Result<JetPolynomial> {
        self.check(den)?;
        Ok(self.wrap(Polynomial::divide_exact(&self.poly, &den.poly)?))
    }

    /// One application of the total derivative
    /// `Σ_{i,m} ∂f/∂z_i^(m) · z_i^(m+1)`.
    fn total_derivative(&self) -> JetPolynomial {
        let k = self.ctx.k;
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (mono, c) in self.poly.terms() {
            for (idx, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (_, m) = self.ctx.coordinate(idx);
                debug_assert!(m < k, "checked by jet_derivative");
                let mut exps = mono.0.clone();
                exps[idx] -= 1;
                // z_i^(m+1) sits just before z_i^(m).
                exps[idx - 1] += 1;
                let coeff = c * Rational::from_integer(e.into());
                let slot = terms.entry(Monomial(exps)).or_insert_with(Rational::zero);
                *slot += coeff;
            }
        }
        self.wrap(Polynomial::from_terms(self.ctx.jet_vars.clone(), terms))
    }
}

impl fmt::Display for JetPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// `d^[p] f`, the `p`-th total jet derivative.
pub fn jet_derivative(f: &JetPolynomial, p: usize) -> Result<JetPolynomial> {
    if p == 0 {
        return Ok(f.clone());
    }
    let needed = f.max_order().unwrap_or(0) + p;
    if needed > f.ctx.k {
        return Err(Error::OrderOverflow {
            needed,
            k: f.ctx.k,
        });
    }
    let mut current = f.clone();
    for _ in 0..p {
        current = current.total_derivative();
    }
    Ok(current)
}

/// The `n` component series of a curve germ `t ↦ γ(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveGerm {
    ctx: JetContext,
    components: Vec<TruncatedSeries>,
}

impl CurveGerm {
    pub fn new(ctx: &JetContext, components: Vec<TruncatedSeries>) -> Result<Self> {
        if components.len() != ctx.n {
            return Err(Error::ContextMismatch(format!(
                "expected {} components, got {}",
                ctx.n,
                components.len()
            )));
        }
        let order = components[0].order();
        if let Some(s) = components.iter().find(|s| s.order() != order) {
            return Err(Error::OrderMismatch(order, s.order()));
        }
        if order < ctx.k {
            return Err(Error::InvalidInput(format!(
                "germ truncated at order {order} cannot carry {}-jets",
                ctx.k
            )));
        }
        Ok(CurveGerm {
            ctx: ctx.clone(),
            components,
        })
    }

    pub fn context(&self) -> &JetContext {
        &self.ctx
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }

    /// The base point `γ(0)`.
    pub fn base_point(&self) -> Vec<Rational> {
        self.components.iter().map(|s| s.coeff(0).clone()).collect()
    }

    /// `f ∘ γ` for a base polynomial `f`.
    pub fn compose(&self, f: &Polynomial) -> Result<TruncatedSeries> {
        let f = f.with_variables(self.ctx.base_vars())?;
        f.eval_series(&self.components)
    }

    /// `γ ∘ φ` for a series `φ` with `φ(0) = 0` of the same order.
    pub fn reparametrize(&self, phi: &TruncatedSeries) -> Result<CurveGerm> {
        let components = self
            .components
            .iter()
            .map(|s| s.compose(phi))
            .collect::<Result<Vec<_>>>()?;
        CurveGerm::new(&self.ctx, components)
    }
}

/// A point of the jet space: a value for every `z_i^(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPoint {
    ctx: JetContext,
    values: Vec<Rational>,
}

impl JetPoint {
    /// `values` in jet-universe order (see [`JetContext::index`]).
    pub fn new(ctx: &JetContext, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ctx.num_vars() {
            return Err(Error::ContextMismatch(format!(
                "expected {} jet coordinates, got {}",
                ctx.num_vars(),
                values.len()
            )));
        }
        Ok(JetPoint {
            ctx: ctx.clone(),
            values,
        })
    }

    /// Builds a point from `derivs[i][m] = z_i^(m)`.
    pub fn from_derivatives(ctx: &JetContext, derivs: &[Vec<Rational>]) -> Result<Self> {
        if derivs.len() != ctx.n || derivs.iter().any(|d| d.len() != ctx.k + 1) {
            return Err(Error::ContextMismatch("derivative table has the wrong shape".into()));
        }
        let mut values = vec![Rational::zero(); ctx.num_vars()];
        for (i, row) in derivs.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                values[ctx.index(i, m)] = v.clone();
            }
        }
        JetPoint::new(ctx, values)
    }

    pub fn context(&self) -> &JetContext {
        &self.ctx
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `z_i^(m)` at this point (0-based `i`).
    pub fn get(&self, i: usize, m: usize) -> &Rational {
        &self.values[self.ctx.index(i, m)]
    }

    pub fn base_point(&self) -> Vec<Rational> {
        (0..self.ctx.n).map(|i| self.get(i, 0).clone()).collect()
    }

    /// `{"z1": "p/q", "z1'": ..., ...}` with keys in base-index, then order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for i in 0..self.ctx.n {
            for m in 0..=self.ctx.k {
                map.insert(jet_var_name(i, m), Value::String(self.get(i, m).to_string()));
            }
        }
        Value::Object(map)
    }

    pub fn from_json(ctx: &JetContext, value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("jet point must be a JSON object".into()))?;
        let mut values = vec![None; ctx.num_vars()];
        for (key, v) in obj {
            let idx = ctx
                .jet_vars()
                .iter()
                .position(|name| name == key)
                .ok_or_else(|| Error::InvalidInput(format!("unknown jet coordinate {key}")))?;
            let text = v
                .as_str()
                .ok_or_else(|| Error::InvalidInput(format!("{key}: expected a \"p/q\" string")))?;
            values[idx] = Some(parse_rational(text)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(idx, v)| {
                v.ok_or_else(|| {
                    Error::InvalidInput(format!("missing jet coordinate {}", ctx.jet_vars()[idx]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        JetPoint::new(ctx, values)
    }
}

/// `[γ]_k`: `z_i^(m) = m! · [t^m] γ_i`.
pub fn jet_of_curve(gamma: &CurveGerm) -> JetPoint {
    let ctx = &gamma.ctx;
    let mut values = vec![Rational::zero(); ctx.num_vars()];
    for (i, s) in gamma.components.iter().enumerate() {
        for m in 0..=ctx.k {
            values[ctx.index(i, m)] = s.coeff(m) * Rational::from_integer(factorial(m));
        }
    }
    JetPoint {
        ctx: ctx.clone(),
        values,
    }
}

pub fn evaluate(f: &JetPolynomial, w: &JetPoint) -> Result<Rational> {
    if f.ctx != w.ctx {
        return Err(Error::ContextMismatch("polynomial and point contexts differ".into()));
    }
    Ok(f.poly.evaluate(&w.values))
}

/// Checks `d^[p](fg) = Σ_i C(p,i) d^[i]f · d^[p-i]g` as a polynomial identity.
pub fn leibniz_check(f: &JetPolynomial, g: &JetPolynomial, p: usize) -> Result<bool> {
    let lhs = jet_derivative(&f.mul(g)?, p)?;
    let mut rhs = f.ctx.constant(Rational::zero());
    for i in 0..=p {
        let c = Rational::from_integer(crate::rational::binomial(p, i));
        let term = jet_derivative(f, i)?.mul(&jet_derivative(g, p - i)?)?;
        rhs = rhs.add(&term.scale(&c))?;
    }
    Ok(lhs.sub(&rhs)?.is_zero())
}
