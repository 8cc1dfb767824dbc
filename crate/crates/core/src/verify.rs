//! Randomized verification suites. Each trial draws its inputs from its own
//! seeded stream, runs a handful of named checks, and reports a witness for
//! anything that fails. Aggregation is in trial order.

use serde::Serialize;
use serde_json::{json, Value};

use num_traits::Zero;

use crate::bounds::{self, ParamSet};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::family::{
    assemble_f, germ_in_hypersurface, reduced_jet_derivative, reduced_jet_derivative_of, reduced_wronskian,
    stratum_data, FamilySpec, MultiIndex,
};
use crate::grassmann::{
    incidence_check, index_labels, local_frame_determinant, monomial_basis, plucker_of_with, LocalFrame,
};
use crate::jet::{evaluate, jet_derivative, jet_of_curve, leibniz_check, CurveGerm, JetContext, JetPoint};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::random::Gen;
use crate::rational::{factorial, pow, rat, Rational};
use crate::reparam::{act, faa_di_bruno_table, Reparam};
use crate::wronskian::{
    cocycle_check, kprime, multiplicativity_check, wronskian, wronskian_at, wronskian_of, WronskianSpec,
};

pub const SUITES: [&str; 11] = [
    "oracle",
    "leibniz",
    "faa-di-bruno",
    "invariance",
    "multiplicativity",
    "cocycle",
    "factorization",
    "incidence",
    "frame-determinant",
    "plucker",
    "bounds",
];

pub const DEFAULT_TRIALS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub trials: usize,
    pub failures: usize,
    /// Inputs of the first failing trial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

struct Outcome {
    name: &'static str,
    pass: bool,
    witness: Value,
}

type Trial = Vec<Outcome>;

fn record(out: &mut Trial, name: &'static str, result: Result<bool>, witness: impl FnOnce() -> Value) {
    match result {
        Ok(pass) => out.push(Outcome {
            name,
            pass,
            witness: if pass { Value::Null } else { witness() },
        }),
        Err(e) => {
            let mut w = witness();
            if let Value::Object(map) = &mut w {
                map.insert("error".into(), Value::String(e.to_string()));
            }
            out.push(Outcome { name, pass: false, witness: w });
        }
    }
}

pub fn run_suite(name: &str, seed: u64, trials: usize) -> Result<SuiteReport> {
    run_suite_with(name, seed, trials, ExecMode::default())
}

pub fn run_suite_with(name: &str, seed: u64, trials: usize, mode: ExecMode) -> Result<SuiteReport> {
    let trial_fn: fn(&mut Gen, usize) -> Trial = match name {
        "oracle" => oracle_trial,
        "leibniz" => leibniz_trial,
        "faa-di-bruno" => faa_di_bruno_trial,
        "invariance" => invariance_trial,
        "multiplicativity" => multiplicativity_trial,
        "cocycle" => cocycle_trial,
        "factorization" => factorization_trial,
        "incidence" => incidence_trial,
        "frame-determinant" => frame_trial,
        "plucker" => plucker_trial,
        "bounds" => bounds_trial,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    let results = exec::map_trials(mode, trials, |t| {
        let mut g = Gen::new(seed, name, t as u64);
        trial_fn(&mut g, t)
    });
    Ok(aggregate(name, seed, trials, results))
}

fn aggregate(name: &str, seed: u64, trials: usize, results: Vec<Trial>) -> SuiteReport {
    let mut checks: Vec<CheckResult> = Vec::new();
    for (t, outcomes) in results.into_iter().enumerate() {
        for o in outcomes {
            let pos = match checks.iter().position(|c| c.name == o.name) {
                Some(p) => p,
                None => {
                    checks.push(CheckResult {
                        name: o.name.to_string(),
                        pass: true,
                        trials: 0,
                        failures: 0,
                        witness: None,
                    });
                    checks.len() - 1
                }
            };
            let c = &mut checks[pos];
            c.trials += 1;
            if !o.pass {
                c.pass = false;
                c.failures += 1;
                if c.witness.is_none() {
                    let mut w = o.witness;
                    if let Value::Object(map) = &mut w {
                        map.insert("seed".into(), json!(seed));
                        map.insert("trial".into(), json!(t));
                    }
                    c.witness = Some(w);
                }
            }
        }
    }
    SuiteReport {
        suite: name.to_string(),
        seed,
        trials,
        checks,
    }
}

fn ctx(n: usize, k: usize) -> JetContext {
    JetContext::new(n, k).expect("n >= 1")
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

fn curve_json(gamma: &CurveGerm) -> Value {
    json!(strings(gamma.components()))
}

fn spec_json(spec: &FamilySpec) -> Value {
    serde_json::to_value(spec.to_json()).unwrap_or(Value::Null)
}

fn matrix_json(m: &Matrix<Rational>) -> Value {
    json!(m.to_rows().iter().map(|r| strings(r)).collect::<Vec<_>>())
}

/// `(n, k)` cycles through `{1,2,3} × {1,…,4}`.
pub fn oracle_shape(trial: usize) -> (usize, usize) {
    let c = trial % 12;
    (c / 4 + 1, c % 4 + 1)
}

fn oracle_trial(g: &mut Gen, trial: usize) -> Trial {
    let (n, k) = oracle_shape(trial);
    let c = ctx(n, k);
    let f = g.polynomial(c.base_vars(), 3, 4);
    let gamma = g.curve(&c);
    let mut out = Vec::new();
    let witness = |p: usize| json!({"n": n, "k": k, "f": f.to_string(), "gamma": curve_json(&gamma), "p": p});

    let w = jet_of_curve(&gamma);
    let composed = gamma.compose(&f);
    for p in 0..=k {
        let result = (|| {
            let lhs = evaluate(&jet_derivative(&c.lift(&f)?, p)?, &w)?;
            Ok(lhs == Rational::from_integer(factorial(p)) * composed.clone()?.coeff(p))
        })();
        record(&mut out, "oracle", result, || witness(p));
    }

    // Linearity and constants.
    let h = g.polynomial(c.base_vars(), 2, 3);
    let lambda = g.rational();
    let p = g.usize_in(0, k);
    let result = (|| {
        let combo = c.lift(&(&f + &h.scale(&lambda)))?;
        let lhs = jet_derivative(&combo, p)?;
        let rhs = jet_derivative(&c.lift(&f)?, p)?.add(&jet_derivative(&c.lift(&h)?, p)?.scale(&lambda))?;
        let constant = jet_derivative(&c.constant(lambda.clone()), p.max(1))?;
        Ok(lhs == rhs && constant.is_zero())
    })();
    record(&mut out, "linearity", result, || {
        json!({"n": n, "k": k, "f": f.to_string(), "g": h.to_string(), "lambda": lambda.to_string(), "p": p})
    });

    // Adding an element of (z - x)^{p+1} does not change d^[p] f over x.
    let x = w.base_point();
    let vars = c.base_vars().clone();
    let mut ideal = g.polynomial(&vars, 1, 2);
    for _ in 0..=p {
        let i = g.index(n);
        let shifted = &Polynomial::var(vars.clone(), i) - &Polynomial::constant(vars.clone(), x[i].clone());
        ideal = &ideal * &shifted;
    }
    let result = (|| {
        let before = evaluate(&jet_derivative(&c.lift(&f)?, p)?, &w)?;
        let after = evaluate(&jet_derivative(&c.lift(&(&f + &ideal))?, p)?, &w)?;
        Ok(before == after)
    })();
    record(&mut out, "jet-locality", result, || {
        json!({"n": n, "k": k, "f": f.to_string(), "added": ideal.to_string(), "gamma": curve_json(&gamma), "p": p})
    });
    out
}

fn leibniz_trial(g: &mut Gen, _trial: usize) -> Trial {
    let (n, k) = (g.usize_in(1, 3), g.usize_in(1, 4));
    let c = ctx(n, k);
    let f = g.polynomial(c.base_vars(), 2, 3);
    let h = g.polynomial(c.base_vars(), 2, 3);
    let mut out = Vec::new();
    for p in 0..=k {
        let result = (|| leibniz_check(&c.lift(&f)?, &c.lift(&h)?, p))();
        record(&mut out, "leibniz", result, || {
            json!({"n": n, "k": k, "f": f.to_string(), "g": h.to_string(), "p": p})
        });
    }
    out
}

fn faa_di_bruno_trial(g: &mut Gen, _trial: usize) -> Trial {
    let k = g.usize_in(1, 5);
    let phi = g.reparam(k);
    let psi = g.reparam(k);
    let chi = g.reparam(k);
    let h = g.series(k);
    let mut out = Vec::new();

    let table = faa_di_bruno_table(&phi);
    let composed = h.compose(&phi.as_series());
    for p in 1..=k {
        let result = composed.clone().map(|hc| {
            let lhs = Rational::from_integer(factorial(p)) * hc.coeff(p);
            let rhs: Rational = (1..=p)
                .map(|i| &table[p][i] * Rational::from_integer(factorial(i)) * h.coeff(i))
                .sum();
            lhs == rhs
        });
        record(&mut out, "faa-di-bruno", result, || {
            json!({"k": k, "h": h.to_string(), "phi": phi.to_string(), "p": p})
        });
    }

    let result = (|| {
        let assoc = phi.compose(&psi)?.compose(&chi)? == phi.compose(&psi.compose(&chi)?)?;
        let id = Reparam::identity(k);
        let unit = phi.compose(&id)? == phi && id.compose(&phi)? == phi;
        let inverse = phi.compose(&phi.inverse())? == id && phi.inverse().compose(&phi)? == id;
        Ok(assoc && unit && inverse)
    })();
    record(&mut out, "group-axioms", result, || {
        json!({"phi": phi.to_string(), "psi": psi.to_string(), "chi": chi.to_string()})
    });

    let n = g.usize_in(1, 3);
    let c = ctx(n, k);
    let gamma = g.curve(&c);
    let w = jet_of_curve(&gamma);
    let result = (|| Ok(act(&psi, &act(&phi, &w)?)? == act(&phi.compose(&psi)?, &w)?))();
    record(&mut out, "right-action", result, || {
        json!({"phi": phi.to_string(), "psi": psi.to_string(), "w": w.to_json()})
    });
    let result = (|| Ok(act(&phi, &w)? == jet_of_curve(&gamma.reparametrize(&phi.as_series())?)))();
    record(&mut out, "action-oracle", result, || {
        json!({"phi": phi.to_string(), "gamma": curve_json(&gamma)})
    });
    out
}

/// Random Wronskian inputs together with a point where the Wronskian is
/// nonzero, when one turns up within a few draws.
fn nondegenerate_setup(g: &mut Gen, c: &JetContext, degree: u32) -> (WronskianSpec, JetPoint, bool) {
    let k = c.k();
    let mut last = None;
    for _ in 0..8 {
        let inputs: Vec<Polynomial> = (0..=k).map(|_| g.nonzero_polynomial(c.base_vars(), degree, 3)).collect();
        let spec = WronskianSpec::new(c, inputs).expect("k+1 inputs");
        for _ in 0..4 {
            let w = g.jet_point(c);
            if matches!(wronskian_at(&spec, &w), Ok(v) if !v.is_zero()) {
                return (spec, w, true);
            }
            last = Some((spec.clone(), w));
        }
    }
    let (spec, w) = last.expect("at least one draw");
    (spec, w, false)
}

/// `k` cycles through `1, 2, 3`.
pub fn invariance_k(trial: usize) -> usize {
    trial % 3 + 1
}

fn invariance_trial(g: &mut Gen, trial: usize) -> Trial {
    let k = invariance_k(trial);
    let n = g.usize_in(1, 3);
    let c = ctx(n, k);
    let (spec, w, nondegenerate) = nondegenerate_setup(g, &c, k as u32 + 1);
    let phi = g.reparam(k);
    let witness = || {
        json!({"n": n, "k": k, "f": strings(spec.inputs()), "phi": phi.to_string(), "w": w.to_json()})
    };
    let mut out = Vec::new();
    record(&mut out, "invariance", crate::wronskian::invariance_check(&spec, &phi, &w), witness);

    let lambda = g.nonzero_rational();
    let result = (|| {
        let scaled = wronskian_at(&spec, &crate::wronskian::rescale_point(&w, &lambda)?)?;
        Ok(scaled == pow(&lambda, kprime(k) as u32) * wronskian_at(&spec, &w)?)
    })();
    record(&mut out, "weight-homogeneity", result, || {
        json!({"k": k, "f": strings(spec.inputs()), "lambda": lambda.to_string(), "w": w.to_json()})
    });

    if nondegenerate {
        let result = (|| {
            let base = wronskian_at(&spec, &w)?;
            let moved = wronskian_at(&spec, &act(&Reparam::scaling(k, rat(2))?, &w)?)?;
            let hits: Vec<u32> = (0..=10).filter(|&e| moved == pow(&rat(2), e) * &base).collect();
            Ok(hits == vec![kprime(k) as u32])
        })();
        record(&mut out, "weight-exponent", result, witness);
    }
    out
}

fn multiplicativity_trial(g: &mut Gen, trial: usize) -> Trial {
    let k = trial % 3 + 1;
    let n = g.usize_in(1, 2);
    let c = ctx(n, k);
    let vars = c.base_vars().clone();
    let inputs: Vec<Polynomial> = (0..=k).map(|_| g.polynomial(&vars, 2, 2)).collect();
    let spec = WronskianSpec::new(&c, inputs).expect("k+1 inputs");
    let s = g.polynomial(&vars, 1, 2);
    let mut out = Vec::new();
    record(&mut out, "multiplicativity", multiplicativity_check(&s, &spec), || {
        json!({"n": n, "k": k, "f": strings(spec.inputs()), "s": s.to_string()})
    });

    // Multilinearity in one slot and alternation under a transposition.
    let slot = g.index(k + 1);
    let extra = g.polynomial(&vars, 2, 2);
    let lambda = g.rational();
    let result = (|| {
        let mut combined = spec.inputs().to_vec();
        combined[slot] = &combined[slot] + &extra.scale(&lambda);
        let mut replaced = spec.inputs().to_vec();
        replaced[slot] = extra.clone();
        let lhs = wronskian(&WronskianSpec::new(&c, combined)?)?;
        let rhs = wronskian(&spec)?.add(&wronskian(&WronskianSpec::new(&c, replaced)?)?.scale(&lambda))?;
        let mut swapped = spec.inputs().to_vec();
        let other = (slot + 1) % (k + 1);
        swapped.swap(slot, other);
        let alt = wronskian(&WronskianSpec::new(&c, swapped)?)?.add(&wronskian(&spec)?)?;
        Ok(lhs == rhs && alt.is_zero())
    })();
    record(&mut out, "multilinear-alternating", result, || {
        json!({"k": k, "f": strings(spec.inputs()), "slot": slot, "g": extra.to_string(), "lambda": lambda.to_string()})
    });
    out
}

fn cocycle_trial(g: &mut Gen, trial: usize) -> Trial {
    let k = trial % 3 + 1;
    let n = g.usize_in(1, 2);
    let c = ctx(n, k);
    let vars = c.base_vars().clone();
    let inputs: Vec<Polynomial> = (0..=k).map(|_| g.polynomial(&vars, 1, 2)).collect();
    let spec = WronskianSpec::new(&c, inputs).expect("k+1 inputs");
    let s2 = g.nonzero_polynomial(&vars, 1, 2);
    let transition = g.nonzero_polynomial(&vars, 1, 2);
    let mut out = Vec::new();
    // s_U1 = g s_U2 on the overlap: W(s_U1 f) = g^{k+1} W(s_U2 f).
    let result = spec.multiplied_by(&s2).and_then(|local| cocycle_check(&transition, &local));
    record(&mut out, "cocycle", result, || {
        json!({"n": n, "k": k, "f": strings(spec.inputs()), "s": s2.to_string(), "g": transition.to_string()})
    });
    out
}

/// Random family with `n ≤ max_n`, `k ≤ max_k`, `δ ≤ max_delta`, `r ≤ max_r`
/// and `N ∈ {1, 2}`.
pub fn small_family(g: &mut Gen, max_n: usize, max_k: usize, max_delta: u32, max_r: u32) -> FamilySpec {
    let n = g.usize_in(1, max_n);
    let k = g.usize_in(1, max_k);
    let c = ctx(n, k);
    let big_n = g.usize_in(1, 2);
    let delta = g.range(1, max_delta as i64) as u32;
    let r = g.range(1, max_r as i64) as u32;
    g.family(&c, big_n, delta, r, 1)
}

/// The reduced-Wronskian identity
/// `W(a_{I_0} τ^{(r+k)I_0}, …) = τ^{r(I_0+…+I_k)} W_{I_0…I_k}` for the
/// family's first `k+1` indices (cycled when there are fewer).
pub fn reduced_wronskian_identity(spec: &FamilySpec, indices: &[MultiIndex]) -> Result<bool> {
    let c = spec.context();
    let k = c.k() as u32;
    let twisted = indices
        .iter()
        .map(|i| c.lift(&(&spec.coefficient(i) * &spec.tau_power(i, spec.r() + k))))
        .collect::<Result<Vec<_>>>()?;
    let lhs = wronskian_of(c, &twisted)?;
    let factor = indices.iter().fold(Polynomial::one(c.base_vars().clone()), |acc, i| {
        &acc * &spec.tau_power(i, spec.r())
    });
    let rhs = c.lift(&factor)?.mul(&reduced_wronskian(spec, indices)?)?;
    Ok(lhs == rhs)
}

fn factorization_trial(g: &mut Gen, trial: usize) -> Trial {
    let spec = small_family(g, 3, 3, 3, 3);
    let mut out = Vec::new();
    let support: Vec<MultiIndex> = spec.coefficients().keys().cloned().collect();
    let index = support[g.index(support.len())].clone();
    for p in 0..=spec.context().k() {
        let result = reduced_jet_derivative(&spec, &index, p).map(|_| true);
        record(&mut out, "divisibility", result, || json!({"spec": spec_json(&spec), "I": index.to_string(), "p": p}));
    }

    let vars = spec.context().base_vars().clone();
    let a = g.polynomial(&vars, 1, 2);
    let b = g.polynomial(&vars, 1, 2);
    let p = g.usize_in(0, spec.context().k());
    let result = (|| {
        let sum = reduced_jet_derivative_of(&spec, &index, &(&a + &b), p)?;
        let parts =
            reduced_jet_derivative_of(&spec, &index, &a, p)?.add(&reduced_jet_derivative_of(&spec, &index, &b, p)?)?;
        Ok(sum == parts)
    })();
    record(&mut out, "linearity", result, || {
        json!({"spec": spec_json(&spec), "I": index.to_string(), "a": a.to_string(), "b": b.to_string(), "p": p})
    });

    if trial % 4 == 0 {
        let small = small_family(g, 2, 1, 1, 2);
        let all = small.index_set().unwrap_or_default();
        let k = small.context().k();
        let picks: Vec<MultiIndex> = (0..=k).map(|_| all[g.index(all.len())].clone()).collect();
        record(&mut out, "reduced-wronskian", reduced_wronskian_identity(&small, &picks), || {
            json!({"spec": spec_json(&small), "indices": strings(&picks)})
        });
    }

    let x = g.rational_vec(spec.context().n());
    record(&mut out, "stratum-count", stratum_data(&spec, &x).map(|_| true), || {
        json!({"spec": spec_json(&spec), "x": strings(&x)})
    });
    out
}

/// Adjusts one coefficient by a constant so that `F(x) = 0`.
pub fn place_on_hypersurface(spec: &mut FamilySpec, x: &[Rational]) -> Result<()> {
    let k = spec.context().k() as u32;
    let e = spec.r() + k;
    let index = spec
        .coefficients()
        .keys()
        .find(|i| !spec.tau_power(i, e).evaluate(x).is_zero())
        .cloned()
        .ok_or_else(|| Error::InvalidInput("every twisted monomial vanishes at x".into()))?;
    let value = assemble_f(spec).evaluate(x);
    let fix = value / spec.tau_power(&index, e).evaluate(x);
    let vars = spec.context().base_vars().clone();
    let adjusted = &spec.coefficient(&index) - &Polynomial::constant(vars, fix);
    spec.set_coefficient(index, adjusted)
}

/// A family, a point `x` on `F = 0` where `F` is smooth, and a germ of order
/// `k` through `x` inside `F = 0`.
pub fn random_incidence_pair(g: &mut Gen) -> Result<(FamilySpec, CurveGerm)> {
    let mut last = Error::SingularPoint;
    for _ in 0..10 {
        let mut spec = small_family(g, 3, 2, 2, 2);
        let n = spec.context().n();
        let x = g.rational_vec(n);
        if let Err(e) = place_on_hypersurface(&mut spec, &x) {
            last = e;
            continue;
        }
        let direction = g.rational_vec(n);
        let f = assemble_f(&spec);
        match germ_in_hypersurface(spec.context(), &f, &x, &direction, spec.context().k()) {
            Ok(gamma) => return Ok((spec, gamma)),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Bumps the `t^k` coefficient of the first coordinate whose partial is
/// nonzero at the base point.
pub fn perturb_germ(spec: &FamilySpec, gamma: &CurveGerm, by: &Rational) -> Result<CurveGerm> {
    let f = assemble_f(spec);
    let x = gamma.base_point();
    let solved = (0..x.len())
        .find(|&i| !f.partial(i).evaluate(&x).is_zero())
        .ok_or(Error::SingularPoint)?;
    let mut comps = gamma.components().to_vec();
    let k = gamma.order();
    let top = comps[solved].coeff(k) + by;
    comps[solved].set_coeff(k, top);
    CurveGerm::new(spec.context(), comps)
}

fn incidence_trial(g: &mut Gen, _trial: usize) -> Trial {
    let mut out = Vec::new();
    let (spec, gamma) = match random_incidence_pair(g) {
        Ok(pair) => pair,
        Err(e) => {
            record(&mut out, "incidence", Err(e), || json!({}));
            return out;
        }
    };
    let witness = |gm: &CurveGerm| json!({"spec": spec_json(&spec), "gamma": curve_json(gm)});
    let composed = gamma.compose(&assemble_f(&spec)).map(|s| s.coeffs().iter().all(Zero::is_zero));
    record(&mut out, "germ-in-hypersurface", composed, || witness(&gamma));
    record(&mut out, "incidence", incidence_check(&spec, &gamma), || witness(&gamma));
    let by = g.nonzero_rational();
    let perturbed = perturb_germ(&spec, &gamma, &by);
    let result = perturbed.as_ref().map_err(Clone::clone).and_then(|p| incidence_check(&spec, p)).map(|ok| !ok);
    record(&mut out, "perturbed-fails", result, || {
        perturbed.as_ref().map(&witness).unwrap_or_else(|_| witness(&gamma))
    });
    out
}

pub struct FrameConfig {
    pub spec: FamilySpec,
    pub frame: Vec<Polynomial>,
    pub s: Polynomial,
    pub point: JetPoint,
}

/// A configuration meeting the frame preconditions: `det G ≠ 0`,
/// `s(x) ≠ 0` and `𝕀_x` nonempty.
pub fn random_frame_config(g: &mut Gen) -> Option<FrameConfig> {
    let n = g.usize_in(1, 3);
    let k = g.usize_in(1, 3);
    let c = ctx(n, k);
    for _ in 0..20 {
        let big_n = g.usize_in(1, 2);
        let delta = g.range(1, 2) as u32;
        let r = g.range(1, 2) as u32;
        let spec = g.family(&c, big_n, delta, r, 1);
        let frame: Vec<Polynomial> = (0..=k).map(|_| g.nonzero_polynomial(c.base_vars(), k as u32, 3)).collect();
        let s = g.nonzero_polynomial(c.base_vars(), 1, 2);
        let point = g.jet_point(&c);
        let x = point.base_point();
        if s.evaluate(&x).is_zero() {
            continue;
        }
        if !matches!(stratum_data(&spec, &x), Ok(d) if !d.indices.is_empty()) {
            continue;
        }
        if LocalFrame::new(&spec, &frame, &s, &point).is_ok() {
            return Some(FrameConfig { spec, frame, s, point });
        }
    }
    None
}

fn frame_trial(g: &mut Gen, _trial: usize) -> Trial {
    let mut out = Vec::new();
    let Some(cfg) = random_frame_config(g) else {
        record(&mut out, "frame-determinant", Err(Error::FrameDegenerate), || json!({}));
        return out;
    };
    let x = cfg.point.base_point();
    let indices = stratum_data(&cfg.spec, &x).map(|d| d.indices).unwrap_or_default();
    let index = indices[g.index(indices.len())].clone();
    let witness = |i: &MultiIndex| {
        json!({
            "spec": spec_json(&cfg.spec),
            "frame": strings(&cfg.frame),
            "s": cfg.s.to_string(),
            "w": cfg.point.to_json(),
            "I": i.to_string(),
        })
    };
    let result = local_frame_determinant(&cfg.spec, &index, &cfg.frame, &cfg.s, &cfg.point).map(|(l, r)| l == r);
    record(&mut out, "frame-determinant", result, || witness(&index));

    let k = cfg.spec.context().k();
    let basis = monomial_basis(&cfg.spec, k as u32);
    for i in indices.iter().take(4) {
        let result = LocalFrame::new(&cfg.spec, &cfg.frame, &cfg.s, &cfg.point)
            .and_then(|local| local.index_rank(i, &basis))
            .map(|rank| rank == k + 1);
        record(&mut out, "index-rank", result, || witness(i));
    }
    out
}

fn plucker_trial(g: &mut Gen, _trial: usize) -> Trial {
    let rows = g.usize_in(2, 3);
    let cols = g.usize_in(rows, 6);
    let m = g.matrix_maybe_deficient(rows, cols);
    let labels = index_labels(cols);
    let mut out = Vec::new();
    let image = plucker_of_with(&m, &labels, ExecMode::Sequential);
    let relations = image.as_ref().map_err(Clone::clone).map(|img| img.point().is_none_or(|p| p.relations_hold()));
    record(&mut out, "relations", relations, || json!({"matrix": matrix_json(&m)}));
    let degenerate = image.as_ref().map_err(Clone::clone).map(|img| img.is_degenerate() == (m.rank() < rows));
    record(&mut out, "degenerate-iff-rank-deficient", degenerate, || json!({"matrix": matrix_json(&m)}));

    // Row operations move the coordinates by the determinant only.
    let change = g.matrix(rows, rows);
    let moved = Matrix::from_fn(rows, cols, |i, j| (0..rows).map(|l| change.get(i, l) * m.get(l, j)).sum());
    let result = (|| {
        let invertible = !change.determinant()?.is_zero();
        let before = plucker_of_with(&m, &labels, ExecMode::Sequential)?;
        let after = plucker_of_with(&moved, &labels, ExecMode::Sequential)?;
        Ok(match (before.point(), after.point()) {
            (Some(a), Some(b)) => !invertible || a.projectively_equal(b),
            (None, None) => true,
            (Some(_), None) => !invertible,
            (None, Some(_)) => false,
        })
    })();
    record(&mut out, "row-change", result, || {
        json!({"matrix": matrix_json(&m), "change": matrix_json(&change)})
    });
    out
}

/// Parameters with `gcd(u, vδ) = 1`.
pub fn random_decomposition_params(g: &mut Gen) -> ParamSet {
    use num_integer::Integer;
    loop {
        let p = ParamSet {
            u: g.range(1, 9) as u64,
            v: g.range(1, 4) as u64,
            delta: g.range(1, 8) as u64,
            m_inf: g.range(0, 10) as u64,
            big_r: g.range(0, 20) as u64,
            k: g.range(0, 4) as u64,
            ..ParamSet::new(2, 2, 0, 1)
        };
        if p.u.gcd(&(p.v * p.delta)) == 1 {
            return p;
        }
    }
}

fn bounds_trial(g: &mut Gen, trial: usize) -> Trial {
    let mut out = Vec::new();
    let p = random_decomposition_params(g);
    let vd = p.v * p.delta;
    let result = bounds::d0(&p).and_then(|d0| {
        for d in d0..=d0 + 10 * vd {
            let dd = bounds::decompose_degree(&p, d)?;
            let hits = (p.m_inf..p.m_inf + vd)
                .filter(|&e| (d as i128 - (p.u * e) as i128).rem_euclid(vd as i128) == 0)
                .count();
            if !dd.is_valid_for(&p) || hits != 1 {
                return Ok(false);
            }
        }
        Ok(bounds::decompose_degree(&p, d0.wrapping_sub(1)).is_err() || d0 == 0)
    });
    record(&mut out, "decompose-degree", result, || json!({"params": p}));

    let mut q = p.clone();
    q.big_m = g.range(0, 5) as u64;
    q.epsilon = g.range(0, 20) as u64;
    let result = bounds::r_threshold_for(&q).map(|r| {
        let at_m = bounds::twist_exponent(&q, q.big_m, r) <= -1;
        let window = bounds::r_window_max(&q).map(|rm| rm >= r || q.epsilon >= q.m_inf + vd).unwrap_or(false);
        at_m && window
    });
    record(&mut out, "r-threshold", result, || json!({"params": q}));

    let n = 2 + (trial % 49) as u64;
    record(&mut out, "deng", bounds::deng_bound(n).map(|(d0, cap)| d0 <= cap), || json!({"n": n}));

    if trial == 0 {
        let result = (|| {
            for n in 1..=30 {
                for k in 0..=30 {
                    for delta in 0..=30 {
                        let rep = bounds::delta_conditions(&ParamSet::new(n, n, k, delta))?;
                        if rep.basic != (rep.estimation_margin < 0) {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        })();
        record(&mut out, "basic-iff-margin", result, || json!({}));
        let (d0, cap) = bounds::deng_bound(2).expect("n = 2");
        record(
            &mut out,
            "deng-n2",
            Ok(d0 == 12338.into() && cap == 59049.into()),
            || json!({"d0": d0.to_string(), "cap": cap.to_string()}),
        );
    }

    if trial < 3 {
        let k = trial + 1;
        let c = ctx(1, k);
        let z = Polynomial::var(c.base_vars().clone(), 0);
        let inputs = (0..=k).map(|j| z.pow(j as u32)).collect();
        let result = (|| {
            let spec = WronskianSpec::new(&c, inputs)?;
            let w = JetPoint::new(&c, (0..=k).map(|i| rat(i as i64 + 2)).collect())?;
            let found = crate::wronskian::weight_exponent_search(&wronskian(&spec)?, &w, 10)?;
            Ok(found == vec![kprime(k) as u32])
        })();
        record(&mut out, "kprime-weight", result, || json!({"k": k}));
    }
    out
}
