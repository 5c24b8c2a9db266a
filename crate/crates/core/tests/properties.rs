use num_bigint::BigInt;
use num_traits::{One, Zero};
use omegalab::artin_hasse::{ah_exp_form, ah_product_form};
use omegalab::ball::BallReal;
use omegalab::diophantine::{cf_expand, cf_expand_interval, convergents, CfStop};
use omegalab::exact::{int, rat, Rational};
use omegalab::lambert::{w_eval_series, w_newton_real};
use omegalab::omega_real::{omega_iterate, omega_newton};
use omegalab::padic_omega::{omega_p_hensel, omega_p_series, verify_defining_identity};
use proptest::prelude::*;

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn omega_enclosures_nest_across_precisions(d in 5u32..200, seed in 0i64..=1) {
        let a = omega_iterate(d, Some(&int(seed))).unwrap();
        let b = omega_newton(d + 17, None).unwrap();
        prop_assert!(a.value.overlaps(&b.value));
        prop_assert!(a.certified_digits >= d);
        let s = a.value.to_decimal_string(d);
        prop_assert_eq!(b.value.to_decimal_string(d), s);
    }

    #[test]
    fn series_value_solves_defining_equation(num in -36i64..=36) {
        // |x| <= 36/100 < 1/e
        let x = rat(num, 100);
        let w = w_eval_series(&x, 1, 30).unwrap();
        prop_assert!(w.mul(&w.exp(160), 160).contains_rational(&x));
        let n = w_newton_real(&BallReal::from_rational(&x, 200), 30).unwrap();
        prop_assert!(n.overlaps(&w));
    }

    #[test]
    fn artin_hasse_forms_agree_and_are_integral(p in small_prime(), order in 1usize..60) {
        let a = ah_exp_form(p, order).unwrap();
        let b = ah_product_form(p, order).unwrap();
        prop_assert_eq!(&a.series, &b.series);
        prop_assert!(a.integrality().passed);
        prop_assert!(a.series.coeff(0).is_one());
    }

    #[test]
    fn padic_omega_methods_agree(p in small_prime(), n in 2u32..40) {
        let s = omega_p_series(p, n).unwrap();
        let h = omega_p_hensel(p, n).unwrap();
        prop_assert_eq!(&s.value, &h.value);
        prop_assert!(verify_defining_identity(p, &h.value).unwrap() >= n);
        // Omega_p is divisible by p exactly once
        prop_assert_eq!(h.value.valuation(), 1);
    }

    #[test]
    fn rational_expansion_terminates_at_value(num in 1i64..5000, den in 1i64..5000) {
        let x = rat(num, den);
        let cf = cf_expand_interval(&x, &x, 100);
        prop_assert_eq!(&cf.stop, &CfStop::Exact);
        let (p, q) = cf.convergents.last().unwrap();
        prop_assert_eq!(Rational::new(p.clone(), q.clone()), x);
    }

    #[test]
    fn convergents_alternate_and_have_unit_determinant(a in prop::collection::vec(1u32..50, 2..30)) {
        let pq: Vec<BigInt> = a.iter().map(|&v| BigInt::from(v)).collect();
        let c = convergents(&pq);
        for n in 1..c.len() {
            let det = &c[n].0 * &c[n - 1].1 - &c[n - 1].0 * &c[n].1;
            let expect = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            prop_assert_eq!(det, expect);
        }
    }

    #[test]
    fn expansion_is_consistent_with_enclosure(d in 20u32..120) {
        let om = omega_newton(d, None).unwrap().value;
        let cf = cf_expand(&om, 1000);
        prop_assert!(!cf.partial_quotients.is_empty());
        prop_assert!(cf.partial_quotients[0].is_zero());
        for (n, (p, q)) in cf.convergents.iter().enumerate() {
            let r = Rational::new(p.clone(), q.clone());
            let below = r < om.lower();
            let above = r > om.upper();
            // even convergents lie below, odd above, for n >= 1
            if n >= 1 {
                prop_assert!(if n % 2 == 0 { below } else { above }, "n = {}", n);
            }
        }
    }
}
