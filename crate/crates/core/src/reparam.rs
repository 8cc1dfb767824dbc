//! The group of `k`-jets of reparametrizations `t ↦ a1 t + … + ak t^k` and
//! its right action on jets.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{JetContext, JetPoint, JetPolynomial};
use crate::poly::Polynomial;
use crate::rational::{binomial, factorial, Rational};
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reparam {
    coeffs: Vec<Rational>,
}

impl Reparam {
    /// `coeffs = [a1, …, ak]`, `a1 ≠ 0`.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        match coeffs.first() {
            None => Err(Error::InvalidInput("a reparametrization needs k >= 1".into())),
            Some(a1) if a1.is_zero() => {
                Err(Error::InvalidInput("leading coefficient a1 must be nonzero".into()))
            }
            Some(_) => Ok(Reparam { coeffs }),
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k.max(1)];
        coeffs[0] = Rational::one();
        Reparam { coeffs }
    }

    /// `t ↦ λ t`.
    pub fn scaling(k: usize, lambda: Rational) -> Result<Self> {
        let mut coeffs = vec![Rational::zero(); k.max(1)];
        coeffs[0] = lambda;
        Reparam::new(coeffs)
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `φ'(0) = a1`.
    pub fn a1(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn as_series(&self) -> TruncatedSeries {
        let mut c = Vec::with_capacity(self.k() + 1);
        c.push(Rational::zero());
        c.extend(self.coeffs.iter().cloned());
        TruncatedSeries::new(c).unwrap()
    }

    fn from_series(s: &TruncatedSeries) -> Result<Self> {
        Reparam::new(s.coeffs()[1..].to_vec())
    }

    /// `self ∘ other` modulo `t^(k+1)`.
    pub fn compose(&self, other: &Reparam) -> Result<Reparam> {
        if self.k() != other.k() {
            return Err(Error::OrderMismatch(self.k(), other.k()));
        }
        Reparam::from_series(&self.as_series().compose(&other.as_series())?)
    }

    /// Compositional inverse, solved order by order.
    pub fn inverse(&self) -> Reparam {
        let k = self.k();
        let mut inv = vec![Rational::zero(); k];
        inv[0] = self.coeffs[0].recip();
        for m in 2..=k {
            // Coefficient of t^m in φ(ψ(t)) with ψ_m = 0 gives the residual;
            // the ψ_m contribution is a1 · ψ_m.
            let candidate = Reparam { coeffs: inv.clone() };
            let composed = self.as_series().compose(&candidate.as_series()).unwrap();
            inv[m - 1] = -composed.coeff(m) / self.a1();
        }
        Reparam { coeffs: inv }
    }

    /// Derivatives `φ^(j)(0) = j! a_j` for `j = 1..=k`.
    fn derivatives(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a * Rational::from_integer(factorial(j + 1)))
            .collect()
    }
}

impl fmt::Display for Reparam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// Table `P[p][i] = B_{p,i}(φ'(0), …, φ^(p-i+1)(0))` for `0 ≤ i ≤ p ≤ k`.
///
/// Uses the recurrence `B_{p,i} = Σ_{j=1}^{p-i+1} C(p-1, j-1) x_j B_{p-j,i-1}`,
/// which comes from differentiating the composition once more.
pub fn faa_di_bruno_table(phi: &Reparam) -> Vec<Vec<Rational>> {
    let k = phi.k();
    let x = phi.derivatives();
    let mut table: Vec<Vec<Rational>> = Vec::with_capacity(k + 1);
    table.push(vec![Rational::one()]);
    for p in 1..=k {
        let mut row = vec![Rational::zero(); p + 1];
        for (i, slot) in row.iter_mut().enumerate().skip(1) {
            let mut acc = Rational::zero();
            for j in 1..=(p - i + 1) {
                let prev = &table[p - j];
                if i - 1 < prev.len() && !prev[i - 1].is_zero() {
                    acc += Rational::from_integer(binomial(p - 1, j - 1)) * &x[j - 1] * &prev[i - 1];
                }
            }
            *slot = acc;
        }
        table.push(row);
    }
    table
}

/// `[P_{p,1}, …, P_{p,p}]`.
pub fn faa_di_bruno_coeffs(phi: &Reparam, p: usize) -> Result<Vec<Rational>> {
    if p > phi.k() {
        return Err(Error::OrderOverflow { needed: p, k: phi.k() });
    }
    Ok(faa_di_bruno_table(phi).swap_remove(p).split_off(1))
}

/// Right action `φ · [γ]_k = [γ ∘ φ]_k` on jet coordinates.
pub fn act(phi: &Reparam, w: &JetPoint) -> Result<JetPoint> {
    let ctx = w.context();
    check_orders(phi, ctx)?;
    let table = faa_di_bruno_table(phi);
    let derivs: Vec<Vec<Rational>> = (0..ctx.n())
        .map(|i| {
            (0..=ctx.k())
                .map(|p| {
                    if p == 0 {
                        return w.get(i, 0).clone();
                    }
                    (1..=p).map(|j| &table[p][j] * w.get(i, j)).sum()
                })
                .collect()
        })
        .collect();
    JetPoint::from_derivatives(ctx, &derivs)
}

/// Pullback of a jet polynomial along the action of `φ`, so that
/// `evaluate(act_symbolic(φ, f), w) = evaluate(f, act(φ, w))`.
pub fn act_symbolic(phi: &Reparam, f: &JetPolynomial) -> Result<JetPolynomial> {
    let ctx = f.context();
    check_orders(phi, ctx)?;
    let table = faa_di_bruno_table(phi);
    let vars = ctx.jet_vars().clone();
    let images: Vec<Polynomial> = (0..ctx.num_vars())
        .map(|idx| {
            let (i, p) = ctx.coordinate(idx);
            if p == 0 {
                return Polynomial::var(vars.clone(), idx);
            }
            (1..=p).fold(Polynomial::zero(vars.clone()), |acc, j| {
                &acc + &Polynomial::var(vars.clone(), ctx.index(i, j)).scale(&table[p][j])
            })
        })
        .collect();
    ctx.lift(&f.poly().substitute(&images)?)
}

fn check_orders(phi: &Reparam, ctx: &JetContext) -> Result<()> {
    if ctx.k() != phi.k() {
        return Err(Error::ContextMismatch(format!(
            "reparametrization of order {} acting on {}-jets",
            phi.k(),
            ctx.k()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{evaluate, jet_of_curve, CurveGerm};
    use crate::rational::{frac, rat};

    fn r(c: &[Rational]) -> Reparam {
        Reparam::new(c.to_vec()).unwrap()
    }

    #[test]
    fn composition_examples() {
        assert_eq!(r(&[rat(2)]).compose(&r(&[frac(1, 2)])).unwrap(), Reparam::identity(1));
        let psi = r(&[rat(3), frac(-1, 2), rat(4)]);
        assert_eq!(Reparam::identity(3).compose(&psi).unwrap(), psi);
        assert_eq!(
            r(&[rat(1), rat(1)]).compose(&r(&[rat(1), rat(1)])).unwrap(),
            r(&[rat(1), rat(2)])
        );
        assert!(Reparam::new(vec![rat(0), rat(1)]).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let phi = r(&[rat(2), rat(-1), frac(1, 3), rat(5)]);
        assert_eq!(phi.compose(&phi.inverse()).unwrap(), Reparam::identity(4));
        assert_eq!(phi.inverse().compose(&phi).unwrap(), Reparam::identity(4));
    }

    #[test]
    fn second_order_coefficients() {
        let (a1, a2) = (rat(3), frac(-2, 5));
        let p = faa_di_bruno_coeffs(&r(&[a1.clone(), a2.clone()]), 2).unwrap();
        assert_eq!(p, vec![&a2 * rat(2), &a1 * &a1]);
    }

    #[test]
    fn identity_has_unit_diagonal() {
        let id = Reparam::identity(5);
        for p in 1..=5 {
            let c = faa_di_bruno_coeffs(&id, p).unwrap();
            for (i, v) in c.iter().enumerate() {
                assert_eq!(*v, if i + 1 == p { rat(1) } else { rat(0) });
            }
        }
    }

    #[test]
    fn top_coefficient_is_power_of_a1() {
        let phi = r(&[frac(-3, 2), rat(1), rat(2), frac(1, 7)]);
        for p in 1..=4 {
            let c = faa_di_bruno_coeffs(&phi, p).unwrap();
            assert_eq!(c[p - 1], crate::rational::pow(phi.a1(), p as u32));
        }
    }

    #[test]
    fn scaling_action() {
        let ctx = JetContext::new(1, 1).unwrap();
        let w = JetPoint::new(&ctx, vec![rat(1), rat(0)]).unwrap(); // z1' = 1, z1 = 0
        let moved = act(&r(&[rat(2)]), &w).unwrap();
        assert_eq!(*moved.get(0, 0), rat(0));
        assert_eq!(*moved.get(0, 1), rat(2));
        assert_eq!(act(&Reparam::identity(1), &w).unwrap(), w);
    }

    #[test]
    fn action_matches_curve_reparametrization() {
        let ctx = JetContext::new(2, 3).unwrap();
        let s = |c: &[i64]| TruncatedSeries::new(c.iter().map(|&x| rat(x)).collect()).unwrap();
        let gamma = CurveGerm::new(&ctx, vec![s(&[1, 2, -1, 3]), s(&[0, 1, 4, -2])]).unwrap();
        let phi = r(&[rat(-2), rat(1), frac(1, 2)]);
        let lhs = act(&phi, &jet_of_curve(&gamma)).unwrap();
        let rhs = jet_of_curve(&gamma.reparametrize(&phi.as_series()).unwrap());
        assert_eq!(lhs, rhs);

        let f = ctx.lift(&crate::parse::parse_polynomial("z1*z2^2", ctx.base_vars()).unwrap()).unwrap();
        let d3 = crate::jet::jet_derivative(&f, 3).unwrap();
        let pulled = act_symbolic(&phi, &d3).unwrap();
        assert_eq!(
            evaluate(&pulled, &jet_of_curve(&gamma)).unwrap(),
            evaluate(&d3, &rhs).unwrap()
        );
    }
}
