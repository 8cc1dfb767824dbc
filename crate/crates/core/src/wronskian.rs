//! Wronskians of `k+1` functions in jet coordinates and their transformation
//! laws under reparametrization and change of trivialization.

use num_traits::One;

use crate::error::{Error, Result};
use crate::jet::{evaluate, jet_derivative, jet_of_curve, CurveGerm, JetContext, JetPoint, JetPolynomial};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::rational::{factorial, pow, Rational};
use crate::reparam::{act, Reparam};
use crate::series::TruncatedSeries;

/// `k' = k(k+1)/2`, the reparametrization weight of a `(k+1)`-ary Wronskian.
pub fn kprime(k: usize) -> usize {
    k * (k + 1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WronskianSpec {
    ctx: JetContext,
    inputs: Vec<Polynomial>,
    weight: usize,
}

impl WronskianSpec {
    /// `inputs` are `k+1` polynomials in the base coordinates `z1..zn`.
    pub fn new(ctx: &JetContext, inputs: Vec<Polynomial>) -> Result<Self> {
        if inputs.len() != ctx.k() + 1 {
            return Err(Error::InvalidInput(format!(
                "a Wronskian of order k = {} takes {} inputs, got {}",
                ctx.k(),
                ctx.k() + 1,
                inputs.len()
            )));
        }
        let inputs = inputs
            .iter()
            .map(|f| f.with_variables(ctx.base_vars()))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidInput("Wronskian inputs must be base polynomials".into()))?;
        Ok(WronskianSpec {
            ctx: ctx.clone(),
            weight: kprime(ctx.k()),
            inputs,
        })
    }

    pub fn context(&self) -> &JetContext {
        &self.ctx
    }

    pub fn inputs(&self) -> &[Polynomial] {
        &self.inputs
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    /// The same spec with every input multiplied by `s`.
    pub fn multiplied_by(&self, s: &Polynomial) -> Result<WronskianSpec> {
        let s = s.with_variables(self.ctx.base_vars())?;
        WronskianSpec::new(&self.ctx, self.inputs.iter().map(|f| &s * f).collect())
    }
}

/// The matrix `(d^[p] f_j)` with rows `p = 0..=k`.
pub fn wronskian_matrix(ctx: &JetContext, inputs: &[JetPolynomial]) -> Result<Matrix<Polynomial>> {
    let k = ctx.k();
    let mut rows = vec![Vec::with_capacity(inputs.len()); k + 1];
    for f in inputs {
        for (p, row) in rows.iter_mut().enumerate() {
            row.push(jet_derivative(f, p)?.into_poly());
        }
    }
    Matrix::from_rows(rows)
}

/// Determinant of `(d^[p] f_j)` for arbitrary jet polynomials `f_j`.
pub fn wronskian_of(ctx: &JetContext, inputs: &[JetPolynomial]) -> Result<JetPolynomial> {
    if inputs.len() != ctx.k() + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} functions, got {}",
            ctx.k() + 1,
            inputs.len()
        )));
    }
    ctx.lift(&wronskian_matrix(ctx, inputs)?.determinant()?)
}

pub fn wronskian(spec: &WronskianSpec) -> Result<JetPolynomial> {
    let lifted = spec
        .inputs
        .iter()
        .map(|f| spec.ctx.lift(f))
        .collect::<Result<Vec<_>>>()?;
    wronskian_of(&spec.ctx, &lifted)
}

/// `W(f_0, …, f_k)(w)`: each `d^[p] f_j` is evaluated first, so only a
/// numeric determinant is taken.
pub fn wronskian_at(spec: &WronskianSpec, w: &JetPoint) -> Result<Rational> {
    if spec.ctx != *w.context() {
        return Err(Error::ContextMismatch("Wronskian and jet point contexts differ".into()));
    }
    let k = spec.ctx.k();
    let mut columns = Vec::with_capacity(k + 1);
    for f in &spec.inputs {
        let lifted = spec.ctx.lift(f)?;
        columns.push(
            (0..=k)
                .map(|p| evaluate(&jet_derivative(&lifted, p)?, w))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Matrix::from_fn(k + 1, k + 1, |p, j| columns[j][p].clone()).determinant()
}

/// `W(φ·w) = φ'(0)^{k'} W(w)`, decided by exact evaluation on both sides.
pub fn invariance_check(spec: &WronskianSpec, phi: &Reparam, w: &JetPoint) -> Result<bool> {
    let moved = wronskian_at(spec, &act(phi, w)?)?;
    let original = wronskian_at(spec, w)?;
    Ok(moved == pow(phi.a1(), spec.weight as u32) * original)
}

/// Same as [`invariance_check`] with the Wronskian already expanded.
pub fn invariance_holds(w_poly: &JetPolynomial, weight: usize, phi: &Reparam, w: &JetPoint) -> Result<bool> {
    let moved = evaluate(w_poly, &act(phi, w)?)?;
    let original = evaluate(w_poly, w)?;
    Ok(moved == pow(phi.a1(), weight as u32) * original)
}

/// All exponents `e ≤ max_exp` with `W(λt · w) = λ^e W(w)` for `λ = 2`.
pub fn weight_exponent_search(w_poly: &JetPolynomial, w: &JetPoint, max_exp: u32) -> Result<Vec<u32>> {
    let k = w_poly.context().k();
    let phi = Reparam::scaling(k.max(1), Rational::from_integer(2.into()))?;
    let moved = evaluate(w_poly, &act(&phi, w)?)?;
    let original = evaluate(w_poly, w)?;
    Ok((0..=max_exp)
        .filter(|&e| moved == pow(phi.a1(), e) * &original)
        .collect())
}

/// `W(s f_0, …, s f_k) = s^{k+1} W(f_0, …, f_k)` as a polynomial identity.
pub fn multiplicativity_check(s: &Polynomial, spec: &WronskianSpec) -> Result<bool> {
    let lhs = wronskian(&spec.multiplied_by(s)?)?;
    let factor = spec.ctx.lift(s)?.pow(spec.ctx.k() as u32 + 1);
    let rhs = factor.mul(&wronskian(spec)?)?;
    Ok(lhs.sub(&rhs)?.is_zero())
}

/// Gluing law `W_{U1} = g^{k+1} W_{U2}` for a transition function `g`
/// relating two trivializations, `s_{U1} = g s_{U2}`.
pub fn cocycle_check(g: &Polynomial, spec: &WronskianSpec) -> Result<bool> {
    multiplicativity_check(g, spec)
}

#[derive(Clone, Debug)]
pub struct NondegeneracyWitness {
    pub spec: WronskianSpec,
    pub point: JetPoint,
    pub value: Rational,
}

/// `W(1, z1, z1²/2!, …, z1^k/k!)` at the jet of `t ↦ (t, 0, …, 0)`.
pub fn nondegeneracy_witness(ctx: &JetContext) -> Result<NondegeneracyWitness> {
    let k = ctx.k();
    let z1 = Polynomial::var(ctx.base_vars().clone(), 0);
    let inputs = (0..=k)
        .map(|j| z1.pow(j as u32).scale(&Rational::from_integer(factorial(j)).recip()))
        .collect();
    let spec = WronskianSpec::new(ctx, inputs)?;
    let components = (0..ctx.n())
        .map(|i| if i == 0 { TruncatedSeries::t(k) } else { TruncatedSeries::zero(k) })
        .collect();
    let point = jet_of_curve(&CurveGerm::new(ctx, components)?);
    let value = evaluate(&wronskian(&spec)?, &point)?;
    Ok(NondegeneracyWitness { spec, point, value })
}

/// Substitutes `z_i^(m) ↦ λ^m z_i^(m)` in the point.
pub fn rescale_point(w: &JetPoint, lambda: &Rational) -> Result<JetPoint> {
    let ctx = w.context();
    let mut derivs = Vec::with_capacity(ctx.n());
    for i in 0..ctx.n() {
        let mut row = Vec::with_capacity(ctx.k() + 1);
        let mut scale = Rational::one();
        for m in 0..=ctx.k() {
            row.push(w.get(i, m) * &scale);
            scale *= lambda;
        }
        derivs.push(row);
    }
    JetPoint::from_derivatives(ctx, &derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::rational::{frac, rat};

    fn base(ctx: &JetContext, text: &str) -> Polynomial {
        parse_polynomial(text, ctx.base_vars()).unwrap()
    }

    fn spec(ctx: &JetContext, inputs: &[&str]) -> WronskianSpec {
        WronskianSpec::new(ctx, inputs.iter().map(|t| base(ctx, t)).collect()).unwrap()
    }

    #[test]
    fn k1_example() {
        let ctx = JetContext::new(2, 1).unwrap();
        assert_eq!(wronskian(&spec(&ctx, &["1", "z1"])).unwrap().to_string(), "z1'");
    }

    #[test]
    fn k2_example() {
        let ctx = JetContext::new(2, 2).unwrap();
        let w = wronskian(&spec(&ctx, &["1", "z1", "1/2*z1^2"])).unwrap();
        assert_eq!(w.to_string(), "z1'^3");
    }

    #[test]
    fn alternating() {
        let ctx = JetContext::new(2, 2).unwrap();
        assert!(wronskian(&spec(&ctx, &["z1*z2", "z2 + 1", "z1*z2"])).unwrap().is_zero());
    }

    #[test]
    fn wrong_arity() {
        let ctx = JetContext::new(2, 2).unwrap();
        assert!(WronskianSpec::new(&ctx, vec![base(&ctx, "z1")]).is_err());
    }

    #[test]
    fn invariance_under_scaling_and_identity() {
        let ctx = JetContext::new(2, 2).unwrap();
        let s = spec(&ctx, &["1", "z1", "1/2*z1^2"]);
        let w = JetPoint::new(&ctx, (1..=6).map(|i| frac(i, 2)).collect()).unwrap();
        let phi = Reparam::scaling(2, rat(2)).unwrap();
        let wp = wronskian(&s).unwrap();
        let moved = evaluate(&wp, &act(&phi, &w).unwrap()).unwrap();
        assert_eq!(moved, rat(8) * evaluate(&wp, &w).unwrap());
        assert!(invariance_check(&s, &phi, &w).unwrap());
        assert!(invariance_check(&s, &Reparam::identity(2), &w).unwrap());
        let general = Reparam::new(vec![rat(-3), frac(1, 2)]).unwrap();
        assert!(invariance_check(&spec(&ctx, &["z2", "z1^2 - z2", "z1*z2"]), &general, &w).unwrap());
    }

    #[test]
    fn multiplicativity_examples() {
        let ctx = JetContext::new(2, 1).unwrap();
        let s = spec(&ctx, &["1", "z2"]);
        let lhs = wronskian(&s.multiplied_by(&base(&ctx, "z1")).unwrap()).unwrap();
        assert_eq!(lhs.to_string(), "z1^2*z2'");
        assert!(multiplicativity_check(&base(&ctx, "z1"), &s).unwrap());
        assert!(multiplicativity_check(&base(&ctx, "1"), &s).unwrap());
    }

    #[test]
    fn cocycle_examples() {
        let ctx = JetContext::new(2, 2).unwrap();
        let s = spec(&ctx, &["z1", "z2^2", "z1*z2 + 1"]);
        assert!(cocycle_check(&base(&ctx, "1"), &s).unwrap());
        assert!(cocycle_check(&base(&ctx, "z1"), &s).unwrap());
        let doubled = wronskian(&s.multiplied_by(&base(&ctx, "2")).unwrap()).unwrap();
        assert_eq!(doubled, wronskian(&s).unwrap().scale(&rat(8)));
    }

    #[test]
    fn nondegeneracy_values() {
        for (n, k) in [(2, 1), (2, 2), (3, 3)] {
            let w = nondegeneracy_witness(&JetContext::new(n, k).unwrap()).unwrap();
            assert_eq!(w.value, rat(1), "n={n} k={k}");
        }
    }

    #[test]
    fn cofactor_and_bareiss_agree_on_wronskians() {
        let ctx = JetContext::new(2, 2).unwrap();
        let s = spec(&ctx, &["z1^2 + z2", "z1*z2 - 3", "z2^3"]);
        let lifted: Vec<_> = s.inputs().iter().map(|f| ctx.lift(f).unwrap()).collect();
        let m = wronskian_matrix(&ctx, &lifted).unwrap();
        assert_eq!(m.det_cofactor().unwrap(), m.det_bareiss().unwrap());
    }

    #[test]
    fn exponent_search_finds_weight() {
        for k in 1..=3 {
            let ctx = JetContext::new(1, k).unwrap();
            let inputs: Vec<String> = (0..=k).map(|j| format!("z1^{j}")).collect();
            let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
            let wp = wronskian(&spec(&ctx, &refs)).unwrap();
            let w = JetPoint::new(&ctx, (0..=k).map(|i| rat(i as i64 + 1)).collect()).unwrap();
            assert_eq!(weight_exponent_search(&wp, &w, 10).unwrap(), vec![kprime(k) as u32]);
        }
    }

    #[test]
    fn pointwise_matches_symbolic() {
        let ctx = JetContext::new(2, 2).unwrap();
        let s = spec(&ctx, &["z1^2 + z2", "z1*z2 - 3", "z2^3"]);
        let w = JetPoint::new(&ctx, (1..=6).map(|i| frac(7 - i, i)).collect()).unwrap();
        assert_eq!(wronskian_at(&s, &w).unwrap(), evaluate(&wronskian(&s).unwrap(), &w).unwrap());
    }
}
