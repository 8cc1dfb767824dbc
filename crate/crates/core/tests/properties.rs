mod common;

use common::*;
use jetwronsk::jet::{evaluate, jet_derivative, jet_of_curve, JetContext};
use jetwronsk::parse::parse_in;
use jetwronsk::poly::{variables, Polynomial};
use jetwronsk::random::Gen;
use jetwronsk::reparam::{act, faa_di_bruno_table, Reparam};
use jetwronsk::series::TruncatedSeries;
use num_traits::Zero;
use proptest::prelude::*;

fn vars() -> jetwronsk::poly::Variables {
    variables(&["x", "y", "z"])
}

fn poly(seed: u64, trial: u64) -> Polynomial {
    Gen::new(seed, "prop-poly", trial).polynomial(&vars(), 3, 5)
}

fn small_q() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, d)| q(p) / q(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let (a, b, c) = (poly(seed, 0), poly(seed, 1), poly(seed, 2));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let a = poly(seed, 3);
        prop_assert_eq!(parse_in(&a.to_string(), &vars()).unwrap(), a);
    }

    #[test]
    fn exact_division_inverts_product(seed in any::<u64>()) {
        let mut g = Gen::new(seed, "prop-div", 0);
        let a = g.polynomial(&vars(), 2, 4);
        let b = g.nonzero_polynomial(&vars(), 2, 3);
        prop_assert_eq!(Polynomial::divide_exact(&(&a * &b), &b).unwrap(), a);
    }

    #[test]
    fn series_composition_is_associative(seed in any::<u64>(), order in 1usize..6) {
        let mut g = Gen::new(seed, "prop-series", 0);
        let f = g.series(order);
        let u = g.series_at_zero(order);
        let v = g.series_at_zero(order);
        let left = f.compose(&u).unwrap().compose(&v).unwrap();
        let right = f.compose(&u.compose(&v).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.coeffs().to_vec(), compose_series(f.coeffs(), u.compose(&v).unwrap().coeffs(), order));
    }

    #[test]
    fn series_product_matches_oracle(a in prop::collection::vec(small_q(), 5), b in prop::collection::vec(small_q(), 5)) {
        let s = TruncatedSeries::new(a.clone()).unwrap().mul(&TruncatedSeries::new(b.clone()).unwrap()).unwrap();
        prop_assert_eq!(s.coeffs().to_vec(), series_mul(&a, &b, 4));
    }

    #[test]
    fn reparametrizations_form_a_group(seed in any::<u64>(), k in 1usize..5) {
        let mut g = Gen::new(seed, "prop-group", 0);
        let (a, b, c) = (g.reparam(k), g.reparam(k), g.reparam(k));
        let id = Reparam::identity(k);
        prop_assert_eq!(a.compose(&id).unwrap(), a.clone());
        prop_assert_eq!(a.compose(&a.inverse()).unwrap(), id.clone());
        prop_assert_eq!(a.inverse().compose(&a).unwrap(), id);
        prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
    }

    #[test]
    fn action_is_right_action(seed in any::<u64>(), n in 1usize..3, k in 1usize..4) {
        let mut g = Gen::new(seed, "prop-action", 0);
        let ctx = JetContext::new(n, k).unwrap();
        let gamma = g.curve(&ctx);
        let (phi, psi) = (g.reparam(k), g.reparam(k));
        let w = jet_of_curve(&gamma);
        // (w·φ)·ψ = w·(φ∘ψ)
        let stepwise = act(&psi, &act(&phi, &w).unwrap()).unwrap();
        prop_assert_eq!(&stepwise, &act(&phi.compose(&psi).unwrap(), &w).unwrap());
        let direct = jet_of_curve(&gamma.reparametrize(&phi.as_series()).unwrap());
        prop_assert_eq!(act(&phi, &w).unwrap(), direct);
    }

    #[test]
    fn bell_recurrence_matches_partitions(x in prop::collection::vec(small_q(), 6)) {
        let k = x.len();
        // a_j = x_j / j!, so φ^(j)(0) = x_j.
        let coeffs: Vec<Q> = x.iter().enumerate().map(|(j, v)| v / fact(j + 1)).collect();
        prop_assume!(!coeffs[0].is_zero());
        let table = faa_di_bruno_table(&Reparam::new(coeffs).unwrap());
        for p in 0..=k {
            for i in 0..=p {
                prop_assert_eq!(&table[p][i], &bell_by_partitions(p, i, &x), "p={} i={}", p, i);
            }
        }
    }

    #[test]
    fn total_derivative_is_linear(seed in any::<u64>(), p in 0usize..4, c in small_q()) {
        let mut g = Gen::new(seed, "prop-linear", 0);
        let ctx = JetContext::new(2, 3).unwrap();
        let f = ctx.lift(&g.polynomial(ctx.base_vars(), 3, 3)).unwrap();
        let h = ctx.lift(&g.polynomial(ctx.base_vars(), 3, 3)).unwrap();
        let combo = f.add(&h.scale(&c)).unwrap();
        let lhs = jet_derivative(&combo, p).unwrap();
        let rhs = jet_derivative(&f, p).unwrap().add(&jet_derivative(&h, p).unwrap().scale(&c)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        let w = g.jet_point(&ctx);
        prop_assert_eq!(evaluate(&lhs, &w).unwrap(), evaluate(&rhs, &w).unwrap());
    }

    #[test]
    fn determinant_strategies_agree(seed in any::<u64>(), n in 1usize..7) {
        let m = Gen::new(seed, "prop-det", 0).matrix_maybe_deficient(n, n);
        let rows = m.to_rows();
        let oracle = det_permutations(&rows);
        prop_assert_eq!(m.det_bareiss().unwrap(), oracle.clone());
        if n <= 5 {
            prop_assert_eq!(m.det_cofactor().unwrap(), oracle.clone());
        }
        prop_assert_eq!(oracle.is_zero(), rank(&rows) < n);
    }
}
