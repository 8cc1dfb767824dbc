//! Fermat-type families `F(a) = Σ_I a_I τ^{(r+k)I}`, their factorized jet
//! derivatives, reduced Wronskians and curve germs inside hypersurfaces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{jet_derivative, CurveGerm, JetContext, JetPolynomial};
use crate::matrix::Matrix;
use crate::parse::parse_in;
use crate::poly::Polynomial;
use crate::rational::{binomial, Rational};
use crate::series::TruncatedSeries;

/// Default cap on `#𝕀 = C(N+δ, δ)`.
pub const DEFAULT_INDEX_CAP: usize = 3003;

/// Exponent tuple `(i_0, …, i_N)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, _)| j)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidInput(format!("multi-index {s:?} must look like (i0,...,iN)")))?;
        inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad multi-index entry in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

/// All multi-indices of length `len` and degree `degree`, in descending
/// lexicographic order (so `(δ,0,…,0)` comes first).
pub fn multi_indices(len: usize, degree: u32) -> Vec<MultiIndex> {
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    rec(0, degree, &mut vec![0; len], &mut out);
    out
}

/// The data `(n, N, k, δ, ε, r; τ_0..τ_N; a_I)` of a family member.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    ctx: JetContext,
    big_n: usize,
    delta: u32,
    r: u32,
    epsilon: u32,
    tau: Vec<Polynomial>,
    a: BTreeMap<MultiIndex, Polynomial>,
    index_cap: usize,
}

impl FamilySpec {
    pub fn new(
        ctx: &JetContext,
        delta: u32,
        r: u32,
        tau: Vec<Polynomial>,
        a: BTreeMap<MultiIndex, Polynomial>,
    ) -> Result<Self> {
        if tau.is_empty() {
            return Err(Error::InvalidInput("a family needs at least one tau section".into()));
        }
        let base = ctx.base_vars();
        let tau = tau
            .iter()
            .map(|t| t.with_variables(base))
            .collect::<Result<Vec<_>>>()?;
        if let Some(j) = tau.iter().position(Polynomial::is_zero) {
            return Err(Error::InvalidInput(format!("tau_{j} is the zero polynomial")));
        }
        let big_n = tau.len() - 1;
        let mut coeffs = BTreeMap::new();
        for (index, poly) in a {
            if index.len() != big_n + 1 || index.degree() != delta {
                return Err(Error::InvalidInput(format!(
                    "multi-index {index} must have length {} and degree {delta}",
                    big_n + 1
                )));
            }
            let poly = poly.with_variables(base)?;
            if !poly.is_zero() {
                coeffs.insert(index, poly);
            }
        }
        Ok(FamilySpec {
            ctx: ctx.clone(),
            big_n,
            delta,
            r,
            epsilon: 0,
            tau,
            a: coeffs,
            index_cap: DEFAULT_INDEX_CAP,
        })
    }

    pub fn with_epsilon(mut self, epsilon: u32) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_index_cap(mut self, cap: usize) -> Self {
        self.index_cap = cap;
        self
    }

    pub fn context(&self) -> &JetContext {
        &self.ctx
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn epsilon(&self) -> u32 {
        self.epsilon
    }

    pub fn tau(&self) -> &[Polynomial] {
        &self.tau
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiIndex, Polynomial> {
        &self.a
    }

    /// `a_I`, zero when absent.
    pub fn coefficient(&self, index: &MultiIndex) -> Polynomial {
        self.a
            .get(index)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.ctx.base_vars().clone()))
    }

    pub fn set_coefficient(&mut self, index: MultiIndex, poly: Polynomial) -> Result<()> {
        if index.len() != self.big_n + 1 || index.degree() != self.delta {
            return Err(Error::InvalidInput(format!("multi-index {index} does not belong to the family")));
        }
        let poly = poly.with_variables(self.ctx.base_vars())?;
        if poly.is_zero() {
            self.a.remove(&index);
        } else {
            self.a.insert(index, poly);
        }
        Ok(())
    }

    /// The ordered index set `𝕀`, refusing sizes above the cap.
    pub fn index_set(&self) -> Result<Vec<MultiIndex>> {
        let size = binomial(self.big_n + self.delta as usize, self.delta as usize);
        let size: usize = size.try_into().unwrap_or(usize::MAX);
        if size > self.index_cap {
            return Err(Error::IndexSetTooLarge {
                size,
                cap: self.index_cap,
            });
        }
        Ok(multi_indices(self.big_n + 1, self.delta))
    }

    /// `τ^{e·I} = Π_j τ_j^{e·i_j}`.
    pub fn tau_power(&self, index: &MultiIndex, e: u32) -> Polynomial {
        index.0.iter().zip(&self.tau).fold(
            Polynomial::one(self.ctx.base_vars().clone()),
            |acc, (&i, t)| if i == 0 { acc } else { &acc * &t.pow(i * e) },
        )
    }

    fn check_index(&self, index: &MultiIndex) -> Result<()> {
        if index.len() != self.big_n + 1 || index.degree() != self.delta {
            return Err(Error::InvalidInput(format!("multi-index {index} does not belong to the family")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> FamilySpecJson {
        FamilySpecJson {
            n: self.ctx.n(),
            big_n: self.big_n,
            k: self.ctx.k(),
            delta: self.delta,
            r: self.r,
            epsilon: Some(self.epsilon),
            tau: self.tau.iter().map(|t| t.to_string()).collect(),
            a: self.a.iter().map(|(i, p)| (i.to_string(), p.to_string())).collect(),
        }
    }
}

/// Serialized form of a [`FamilySpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpecJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub k: usize,
    pub delta: u32,
    pub r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<u32>,
    pub tau: Vec<String>,
    pub a: BTreeMap<String, String>,
}

impl FamilySpecJson {
    pub fn into_spec(self) -> Result<FamilySpec> {
        let ctx = JetContext::new(self.n, self.k)?;
        let vars = ctx.base_vars().clone();
        let tau = self
            .tau
            .iter()
            .map(|t| parse_in(t, &vars))
            .collect::<Result<Vec<_>>>()?;
        if tau.len() != self.big_n + 1 {
            return Err(Error::InvalidInput(format!(
                "N = {} requires {} tau expressions, got {}",
                self.big_n,
                self.big_n + 1,
                tau.len()
            )));
        }
        let a = self
            .a
            .iter()
            .map(|(key, expr)| Ok((key.parse::<MultiIndex>()?, parse_in(expr, &vars)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(FamilySpec::new(&ctx, self.delta, self.r, tau, a)?.with_epsilon(self.epsilon.unwrap_or(0)))
    }
}

/// `F(a) = Σ_I a_I τ^{(r+k)I}`.
pub fn assemble_f(spec: &FamilySpec) -> Polynomial {
    let e = spec.r + spec.ctx.k() as u32;
    spec.a.iter().fold(
        Polynomial::zero(spec.ctx.base_vars().clone()),
        |acc, (index, a)| &acc + &(a * &spec.tau_power(index, e)),
    )
}

/// `d^[p]_I(a)`: `d^[p](a τ^{(r+k)I})` divided exactly by `τ^{rI}`.
pub fn reduced_jet_derivative_of(
    spec: &FamilySpec,
    index: &MultiIndex,
    a: &Polynomial,
    p: usize,
) -> Result<JetPolynomial> {
    spec.check_index(index)?;
    let ctx = &spec.ctx;
    if p > ctx.k() {
        return Err(Error::OrderOverflow { needed: p, k: ctx.k() });
    }
    let twisted = a * &spec.tau_power(index, spec.r + ctx.k() as u32);
    let derived = jet_derivative(&ctx.lift(&twisted)?, p)?;
    let divisor = ctx.lift(&spec.tau_power(index, spec.r))?;
    derived.divide_exact(&divisor).map_err(|_| {
        Error::DivisionFails(format!("tau^(r*{index}) does not divide d^[{p}](a*tau^((r+k)*{index}))"))
    })
}

/// `d^[p]_I(a_I)` for the family's own coefficient `a_I`.
pub fn reduced_jet_derivative(spec: &FamilySpec, index: &MultiIndex, p: usize) -> Result<JetPolynomial> {
    reduced_jet_derivative_of(spec, index, &spec.coefficient(index), p)
}

/// `W_{I_0..I_k}`: the determinant of `(d^[p]_{I_j}(a_{I_j}))_{p,j}`.
pub fn reduced_wronskian(spec: &FamilySpec, indices: &[MultiIndex]) -> Result<JetPolynomial> {
    let k = spec.ctx.k();
    if indices.len() != k + 1 {
        return Err(Error::InvalidInput(format!(
            "a reduced Wronskian takes {} multi-indices, got {}",
            k + 1,
            indices.len()
        )));
    }
    let mut rows = vec![Vec::with_capacity(k + 1); k + 1];
    for index in indices {
        for (p, row) in rows.iter_mut().enumerate() {
            row.push(reduced_jet_derivative(spec, index, p)?.into_poly());
        }
    }
    spec.ctx.lift(&Matrix::from_rows(rows)?.determinant()?)
}

/// Builds `γ` with `γ(0) = x` and `F ∘ γ ≡ 0 mod t^{order+1}`.
///
/// The lowest-index variable with nonzero partial at `x` is solved for order
/// by order; every other coordinate moves linearly, `x_j + direction_j t`.
pub fn germ_in_hypersurface(
    ctx: &JetContext,
    f: &Polynomial,
    x: &[Rational],
    direction: &[Rational],
    order: usize,
) -> Result<CurveGerm> {
    let n = ctx.n();
    if x.len() != n || direction.len() != n {
        return Err(Error::InvalidInput(format!("base point and direction need {n} entries")));
    }
    let f = f.with_variables(ctx.base_vars())?;
    if !f.evaluate(x).is_zero() {
        return Err(Error::InvalidInput("the base point is not on the hypersurface".into()));
    }
    let (solved, slope) = (0..n)
        .map(|i| (i, f.partial(i).evaluate(x)))
        .find(|(_, d)| !d.is_zero())
        .ok_or(Error::SingularPoint)?;
    let mut components: Vec<TruncatedSeries> = (0..n)
        .map(|i| {
            let mut s = TruncatedSeries::constant(x[i].clone(), order);
            if i != solved && order >= 1 {
                s.set_coeff(1, direction[i].clone());
            }
            s
        })
        .collect();
    for m in 1..=order {
        let residual = f.eval_series(&components)?;
        let c = -residual.coeff(m) / &slope;
        components[solved].set_coeff(m, c);
    }
    CurveGerm::new(ctx, components)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumData {
    /// `N_x = #{j : τ_j(x) ≠ 0}`.
    pub n_x: usize,
    /// `𝕀_x = {I : τ^I(x) ≠ 0}` in index-set order.
    pub indices: Vec<MultiIndex>,
}

/// `C(N_x − 1 + δ, δ)`, with `N_x = 0` giving 1 if `δ = 0` and 0 otherwise.
pub fn stratum_count(n_x: usize, delta: u32) -> num_bigint::BigInt {
    if n_x == 0 {
        return if delta == 0 { 1.into() } else { 0.into() };
    }
    binomial(n_x - 1 + delta as usize, delta as usize)
}

pub fn stratum_data(spec: &FamilySpec, x: &[Rational]) -> Result<StratumData> {
    if x.len() != spec.ctx.n() {
        return Err(Error::InvalidInput(format!("base point needs {} entries", spec.ctx.n())));
    }
    let nonvanishing: Vec<bool> = spec.tau.iter().map(|t| !t.evaluate(x).is_zero()).collect();
    let n_x = nonvanishing.iter().filter(|&&b| b).count();
    let indices: Vec<MultiIndex> = spec
        .index_set()?
        .into_iter()
        .filter(|index| index.support().all(|j| nonvanishing[j]))
        .collect();
    let expected = stratum_count(n_x, spec.delta);
    if num_bigint::BigInt::from(indices.len()) != expected {
        return Err(Error::InvalidInput(format!(
            "#I_x = {} but C(N_x - 1 + delta, delta) = {expected}",
            indices.len()
        )));
    }
    Ok(StratumData { n_x, indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{evaluate, jet_of_curve};
    use crate::parse::parse_polynomial;
    use crate::rational::rat;
    use crate::wronskian::wronskian_of;

    fn p(ctx: &JetContext, text: &str) -> Polynomial {
        parse_polynomial(text, ctx.base_vars()).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn index_enumeration() {
        let all = multi_indices(3, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], mi(&[2, 0, 0]));
        assert_eq!(all[5], mi(&[0, 0, 2]));
        assert_eq!(multi_indices(2, 0), vec![mi(&[0, 0])]);
        assert_eq!("(1, 0,2)".parse::<MultiIndex>().unwrap(), mi(&[1, 0, 2]));
        assert!("1,0".parse::<MultiIndex>().is_err());
    }

    #[test]
    fn assemble_examples() {
        let ctx = JetContext::new(2, 1).unwrap();
        let tau = vec![p(&ctx, "z1"), p(&ctx, "z2")];
        let spec = FamilySpec::new(&ctx, 1, 1, tau.clone(), [(mi(&[1, 0]), p(&ctx, "1"))].into()).unwrap();
        assert_eq!(assemble_f(&spec).to_string(), "z1^2");
        let empty = FamilySpec::new(&ctx, 1, 1, tau.clone(), BTreeMap::new()).unwrap();
        assert!(assemble_f(&empty).is_zero());
        let two = FamilySpec::new(
            &ctx,
            1,
            1,
            tau,
            [(mi(&[1, 0]), p(&ctx, "z2")), (mi(&[0, 1]), p(&ctx, "3"))].into(),
        )
        .unwrap();
        let expected = &(&p(&ctx, "z2") * &p(&ctx, "z1^2")) + &p(&ctx, "3*z2^2");
        assert_eq!(assemble_f(&two), expected);
    }

    #[test]
    fn reduced_derivative_example() {
        let ctx = JetContext::new(2, 1).unwrap();
        let a = p(&ctx, "z1*z2 + 2*z2^2 - 1");
        let spec = FamilySpec::new(
            &ctx,
            1,
            1,
            vec![p(&ctx, "z1"), p(&ctx, "z2 + 1")],
            [(mi(&[1, 0]), a.clone())].into(),
        )
        .unwrap();
        let d1 = reduced_jet_derivative(&spec, &mi(&[1, 0]), 1).unwrap();
        let lifted_a = ctx.lift(&a).unwrap();
        let expected = ctx
            .lift(&p(&ctx, "z1"))
            .unwrap()
            .mul(&jet_derivative(&lifted_a, 1).unwrap())
            .unwrap()
            .add(&lifted_a.mul(&ctx.variable(0, 1)).unwrap().scale(&rat(2)))
            .unwrap();
        assert_eq!(d1, expected);

        let d0 = reduced_jet_derivative(&spec, &mi(&[1, 0]), 0).unwrap();
        assert_eq!(d0, ctx.lift(&(&a * &p(&ctx, "z1"))).unwrap());

        assert!(reduced_jet_derivative(&spec, &mi(&[0, 1]), 1).unwrap().is_zero());
        assert!(reduced_jet_derivative(&spec, &mi(&[1, 1]), 1).is_err());
    }

    #[test]
    fn reduced_wronskian_identity_small() {
        let ctx = JetContext::new(2, 1).unwrap();
        let spec = FamilySpec::new(
            &ctx,
            1,
            1,
            vec![p(&ctx, "z1 + z2"), p(&ctx, "z1 - 2*z2 + 1")],
            [(mi(&[1, 0]), p(&ctx, "z2^2 + 1")), (mi(&[0, 1]), p(&ctx, "3*z1"))].into(),
        )
        .unwrap();
        let indices = [mi(&[1, 0]), mi(&[0, 1])];
        let twisted: Vec<_> = indices
            .iter()
            .map(|i| ctx.lift(&(&spec.coefficient(i) * &spec.tau_power(i, 2))).unwrap())
            .collect();
        let lhs = wronskian_of(&ctx, &twisted).unwrap();
        let factor = ctx.lift(&(&spec.tau_power(&indices[0], 1) * &spec.tau_power(&indices[1], 1))).unwrap();
        let rhs = factor.mul(&reduced_wronskian(&spec, &indices).unwrap()).unwrap();
        assert_eq!(lhs, rhs);

        let repeated = reduced_wronskian(&spec, &[mi(&[1, 0]), mi(&[1, 0])]).unwrap();
        assert!(repeated.is_zero());
    }

    #[test]
    fn constant_coefficients_k1() {
        // a_I = c constant: columns are (c τ^I, c (d^[1] τ^{2I})/τ^I) = (c τ^I, 2 c τ^I' ).
        let ctx = JetContext::new(2, 1).unwrap();
        let spec = FamilySpec::new(
            &ctx,
            1,
            1,
            vec![p(&ctx, "z1"), p(&ctx, "z2")],
            [(mi(&[1, 0]), p(&ctx, "2")), (mi(&[0, 1]), p(&ctx, "5"))].into(),
        )
        .unwrap();
        let w = reduced_wronskian(&spec, &[mi(&[1, 0]), mi(&[0, 1])]).unwrap();
        // det [[2 z1, 5 z2], [4 z1', 10 z2']] = 20 z1 z2' - 20 z1' z2
        assert_eq!(w.to_string(), "-20*z1'*z2 + 20*z1*z2'");
    }

    #[test]
    fn germ_examples() {
        let ctx = JetContext::new(2, 2).unwrap();
        let f = p(&ctx, "z1 + z2^2");
        let g = germ_in_hypersurface(&ctx, &f, &[rat(0), rat(0)], &[rat(1), rat(1)], 2).unwrap();
        assert_eq!(g.components()[0].coeffs(), &[rat(0), rat(0), rat(-1)]);
        assert_eq!(g.components()[1].coeffs(), &[rat(0), rat(1), rat(0)]);

        let g = germ_in_hypersurface(&ctx, &p(&ctx, "z1"), &[rat(0), rat(0)], &[rat(1), rat(1)], 3).unwrap();
        assert!(g.components()[0].coeffs().iter().all(Zero::is_zero));
        assert_eq!(g.components()[1].coeffs(), &[rat(0), rat(1), rat(0), rat(0)]);

        assert_eq!(
            germ_in_hypersurface(&ctx, &p(&ctx, "z1^2 + z2^2"), &[rat(0), rat(0)], &[rat(1), rat(1)], 2),
            Err(Error::SingularPoint)
        );

        let f = p(&ctx, "z1^3 - z1*z2 + 2*z2^2 - 2");
        let g = germ_in_hypersurface(&ctx, &f, &[rat(0), rat(1)], &[rat(3), rat(-1)], 5).unwrap();
        assert!(g.compose(&f).unwrap().coeffs().iter().all(Zero::is_zero));
        let w = jet_of_curve(&g);
        for q in 0..=2 {
            let d = jet_derivative(&ctx.lift(&f).unwrap(), q).unwrap();
            assert!(evaluate(&d, &w).unwrap().is_zero());
        }
    }

    #[test]
    fn strata() {
        let ctx = JetContext::new(2, 1).unwrap();
        let tau = vec![p(&ctx, "z1"), p(&ctx, "z2"), p(&ctx, "z1 + z2")];
        for delta in 0..4 {
            let spec = FamilySpec::new(&ctx, delta, 1, tau.clone(), BTreeMap::new()).unwrap();
            let s = stratum_data(&spec, &[rat(1), rat(1)]).unwrap();
            assert_eq!(s.n_x, 3);
            assert_eq!(s.indices.len(), multi_indices(3, delta).len());
            let origin = stratum_data(&spec, &[rat(0), rat(0)]).unwrap();
            assert_eq!(origin.n_x, 0);
            assert_eq!(origin.indices.is_empty(), delta > 0);
        }
        let spec = FamilySpec::new(&ctx, 4, 1, tau, BTreeMap::new()).unwrap();
        // τ_2 = z1 + z2 vanishes at (1, -1).
        let s = stratum_data(&spec, &[rat(1), rat(-1)]).unwrap();
        assert_eq!((s.n_x, s.indices.len()), (2, 5));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"n":2,"N":1,"k":1,"delta":1,"r":1,"tau":["z1","z2 + 1"],"a":{"(1,0)":"z1*z2 - 1/2"}}"#;
        let parsed: FamilySpecJson = serde_json::from_str(json).unwrap();
        let spec = parsed.into_spec().unwrap();
        assert_eq!(spec.coefficient(&mi(&[1, 0])).to_string(), "z1*z2 - 1/2");
        assert_eq!(spec.to_json().into_spec().unwrap(), spec);
    }

    #[test]
    fn index_cap() {
        let ctx = JetContext::new(2, 1).unwrap();
        let tau = (0..10).map(|_| p(&ctx, "z1")).collect();
        let spec = FamilySpec::new(&ctx, 6, 1, tau, BTreeMap::new()).unwrap();
        assert!(matches!(spec.index_set(), Err(Error::IndexSetTooLarge { size: 5005, cap: 3003 })));
    }

    #[test]
    fn zero_section_rejected() {
        let ctx = JetContext::new(2, 1).unwrap();
        let tau = vec![p(&ctx, "z1"), p(&ctx, "z2 - z2")];
        assert!(matches!(FamilySpec::new(&ctx, 1, 1, tau, BTreeMap::new()), Err(Error::InvalidInput(_))));
    }
}
