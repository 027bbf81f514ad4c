mod common;

use common::line_strategy;
use powercast::line_carry::{max_feasible_target, min_feasible_source, pull_carry, Direction};
use powercast::Scalar;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pull_then_push_reaches_the_target(c in line_strategy(1, 30), pk in 1i64..200, tk in 0i64..100) {
        let p = Scalar::ratio(pk, 4);
        let t = c.pos(c.n()) + &(&p * &Scalar::ratio(tk, 100));
        if let Ok(s) = min_feasible_source(&c, &t, &p, Direction::Forward) {
            if s <= t && pull_carry(&c, &s, &t, &p, Direction::Forward).is_ok() {
                if let Ok(reach) = max_feasible_target(&c, &s, &p, Direction::Forward) {
                    prop_assert!(reach >= t);
                }
            }
        }
    }

    #[test]
    fn pull_is_monotone_in_power(c in line_strategy(1, 30), pk in 1i64..200, extra in 1i64..50) {
        let p = Scalar::ratio(pk, 4);
        let s = c.pos(1).clone();
        let t = c.pos(c.n()).clone();
        if pull_carry(&c, &s, &t, &p, Direction::Forward).is_ok() {
            let q = &p + &Scalar::ratio(extra, 8);
            prop_assert!(pull_carry(&c, &s, &t, &q, Direction::Forward).is_ok());
        }
    }

    #[test]
    fn pull_commutes_with_reflection(c in line_strategy(1, 30), pk in 1i64..200) {
        let p = Scalar::ratio(pk, 4);
        let s = c.pos(1).clone();
        let t = c.pos(c.n()).clone();
        let fwd = pull_carry(&c, &s, &t, &p, Direction::Forward);
        let rev = pull_carry(&c.reflect(), &-&s, &-&t, &p, Direction::Reverse);
        prop_assert_eq!(fwd.is_ok(), rev.is_ok());
        if let (Ok(a), Ok(b)) = (fwd, rev) {
            let mirror = |v: &[Scalar]| v.iter().rev().map(|x| -x).collect::<Vec<_>>();
            prop_assert_eq!(a.b, mirror(&b.b));
            prop_assert_eq!(a.f, mirror(&b.f));
        }
    }
}
