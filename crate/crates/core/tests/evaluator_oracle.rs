mod common;

use common::{arb_bounded_formula, arb_formula, arb_string, close, Naive};
use fosuccinct::evaluator::{eval_fo, eval_mso, Assignment, Evaluator, MsoMode, Verdict};
use fosuccinct::{Formula, Guards, LabeledString, LinearOrder, Structure};
use proptest::prelude::*;
use std::collections::HashMap;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn orders_agree_with_naive(f in arb_formula(false, false), n in 0usize..6) {
        let s = Structure::Order(LinearOrder::new(n));
        let mut ev = Evaluator::new(&f, &s).unwrap();
        let naive = Naive { n, letters: None };
        for x in 0..=n {
            for y in 0..=n {
                for z in 0..=n {
                    let mut env: HashMap<String, usize> =
                        [("x", x), ("y", y), ("z", z)].map(|(v, a)| (v.to_string(), a)).into();
                    let want = naive.eval(&f, &mut env, &mut HashMap::new());
                    prop_assert_eq!(ev.holds_xyz([x, y, z]).unwrap(), want, "{} at {:?}", f, [x, y, z]);
                }
            }
        }
    }

    #[test]
    fn bounded_formulas_agree_with_naive(f in arb_bounded_formula(), n in 0usize..9) {
        let s = Structure::Order(LinearOrder::new(n));
        let mut ev = Evaluator::new(&f, &s).unwrap();
        let naive = Naive { n, letters: None };
        for x in 0..=n {
            for y in 0..=n {
                for z in 0..=n {
                    let mut env: HashMap<String, usize> =
                        [("x", x), ("y", y), ("z", z)].map(|(v, a)| (v.to_string(), a)).into();
                    let want = naive.eval(&f, &mut env, &mut HashMap::new());
                    prop_assert_eq!(ev.holds_xyz([x, y, z]).unwrap(), want, "{} at {:?}", f, [x, y, z]);
                }
            }
        }
    }

    #[test]
    fn strings_agree_with_naive(f in arb_formula(true, false), w in arb_string(8)) {
        let f = close(f);
        let s = LabeledString::new(1, w.clone()).unwrap();
        let naive = Naive { n: w.len() - 1, letters: Some(&w) };
        let got = eval_fo(&f, &Structure::String(s), &Assignment::new()).unwrap();
        prop_assert_eq!(got, naive.sentence(&f), "{}", f);
    }

    #[test]
    fn mso_agrees_with_naive(
        f in arb_formula(true, true),
        w in arb_string(6),
        kinds in prop::array::uniform2(any::<bool>()),
    ) {
        let mut f = close(f);
        for (name, exists) in ["Y", "X"].into_iter().zip(kinds) {
            f = if exists { Formula::exists_set(name, f) } else { Formula::forall_set(name, f) };
        }
        let s = LabeledString::new(1, w.clone()).unwrap();
        let naive = Naive { n: w.len() - 1, letters: Some(&w) };
        let got = eval_mso(&f, &Structure::String(s), &MsoMode::Exhaustive, &Guards::default()).unwrap();
        let want = if naive.sentence(&f) { Verdict::True } else { Verdict::False };
        prop_assert_eq!(got, want, "{}", f);
    }
}
