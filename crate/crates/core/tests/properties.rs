use proptest::prelude::*;

use thomae_core::exact::{c_coefficients, int, pochhammer, rat, sigma_coefficients, sum, ParamPairs, Rational};
use thomae_core::poly::RationalPolynomial;
use thomae_core::series::{eval_terminating, WeightedSeriesSpec};
use thomae_core::transforms::contract_pairs_traced;

fn rational(max: i64) -> impl Strategy<Value = Rational> {
    (-max..=max, 1..=max).prop_map(|(n, d)| rat(n, d))
}

fn non_integer(max: i64) -> impl Strategy<Value = Rational> {
    (-max..=max, 2..=max)
        .prop_filter("not an integer", |(n, d)| n % d != 0)
        .prop_map(|(n, d)| rat(n, d))
}

fn pairs() -> impl Strategy<Value = ParamPairs> {
    prop::collection::vec((non_integer(9), 1u32..=3), 1..=3)
        .prop_filter_map("Λ = 0", |v| ParamPairs::new(v).ok())
}

fn falling(x: &Rational, k: usize) -> Rational {
    let sign = if k.is_multiple_of(2) { int(1) } else { int(-1) };
    sign * pochhammer(&-x.clone(), k)
}

proptest! {
    #[test]
    fn sigma_polynomial_is_the_product(pp in pairs(), x in rational(12)) {
        let sigma = RationalPolynomial::new(sigma_coefficients(&pp));
        prop_assert_eq!(sigma.eval(&x), pp.shifted_product(&x));
    }

    #[test]
    fn c_coefficients_expand_in_falling_factorials(pp in pairs(), x in rational(12)) {
        let c = c_coefficients(&pp);
        let expanded = sum(c.iter().enumerate().map(|(k, ck)| ck * falling(&x, k)));
        prop_assert_eq!(expanded, pp.shifted_product(&x) / pp.base_product());
    }

    #[test]
    fn shifted_pochhammer_ratio(a in non_integer(20), k in 0usize..12) {
        prop_assert_eq!(pochhammer(&(&a + int(1)), k) / pochhammer(&a, k), int(1) + int(k as i64) / &a);
    }

    #[test]
    fn contraction_preserves_value(
        n in 0i64..7,
        alpha in non_integer(9),
        gamma in non_integer(9),
        beta in non_integer(9),
        x in rational(5),
    ) {
        // w has one zero matching the denominator and one matching the numerator
        let g1 = &gamma - int(1);
        let factor = |z: &Rational| RationalPolynomial::new(vec![int(1), -(int(1) / z)]);
        let weight = &(&factor(&g1) * &factor(&alpha)) * &factor(&beta);
        let w = WeightedSeriesSpec::new(vec![-int(n), alpha.clone()], vec![gamma.clone()], weight, x).unwrap();
        let (contracted, trace) = contract_pairs_traced(&w);
        prop_assert!(trace.len() >= 2);
        prop_assert_eq!(eval_terminating(&contracted).unwrap(), eval_terminating(&w).unwrap());
    }
}
