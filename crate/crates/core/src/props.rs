use proptest::prelude::*;
use rug::ops::Pow;
use rug::Integer;

use crate::budget::Budget;
use crate::error::Error;
use crate::expdio::{
    brute_count, brute_count_box, eval_poly, expand_squares, nonneg_singlefold_transform, witness,
    ExpPolynomial, Factor, Monomial, Square, SquareSystem,
};
use crate::generators::Generator;
use crate::mazzanti::{
    build_m, build_m_direct, choose_w, count_solutions, geo_sum, term_c, CountingInstance,
};
use crate::sequences::{
    crec_eval, crec_prefix, eval_at_n, extract_divmod_term, lehmer_s, CRecSpec,
};
use crate::term::{eval_with, expand_sugar, BinOp, Env, Term, UnOp};

fn small() -> Budget {
    Budget::default().with_bits(1 << 16)
}

fn env() -> Env {
    Env::from([
        ("n".to_string(), Integer::from(5)),
        ("x".to_string(), Integer::from(3)),
    ])
}

fn pure_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0u64..20).prop_map(Term::int),
        prop::sample::select(vec!["n", "x"]).prop_map(Term::var)
    ];
    let base: Vec<BinOp> = BinOp::ALL.into_iter().filter(|op| op.is_base()).collect();
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (
                prop::sample::select(base.clone()),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| Term::bin(op, l, r)),
            inner.prop_map(|a| Term::pow2(Term::rem(a, Term::int(12)))),
        ]
    })
}

fn sugar_term() -> impl Strategy<Value = Term> {
    let arg = |lo: u64| {
        prop_oneof![
            (lo..=12).prop_map(Term::int),
            prop::sample::select(vec!["n", "x"]).prop_map(Term::var)
        ]
    };
    let sugar_bin: Vec<BinOp> = BinOp::ALL
        .into_iter()
        .filter(|op| !op.is_base() && *op != BinOp::Gcd)
        .collect();
    let sugar_un: Vec<UnOp> = UnOp::ALL.into_iter().filter(|op| !op.is_base()).collect();
    prop_oneof![
        (prop::sample::select(sugar_bin), arg(0), arg(0))
            .prop_map(|(op, l, r)| Term::bin(op, l, r)),
        // the gcd formula needs both arguments positive
        (arg(1), arg(1)).prop_map(|(l, r)| Term::gcd(l, r)),
        (prop::sample::select(sugar_un), arg(0)).prop_map(|(op, a)| Term::un(op, a)),
    ]
}

fn monomial(k: usize, coeff: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Monomial> {
    (coeff, prop::collection::vec((1u32..=3, 0u32..=2), k)).prop_map(|(c, fs)| Monomial {
        coeff: Integer::from(c),
        factors: fs
            .into_iter()
            .map(|(v, r)| Factor {
                v: Integer::from(v),
                r,
            })
            .collect(),
    })
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("u{i}")).collect()
}

fn poly() -> impl Strategy<Value = ExpPolynomial> {
    (1usize..=3).prop_flat_map(|k| {
        prop::collection::vec(monomial(k, -4..=4), 1..=4)
            .prop_map(move |ms| ExpPolynomial::new(names(k), Vec::new(), ms))
    })
}

fn system() -> impl Strategy<Value = SquareSystem> {
    (1usize..=3).prop_flat_map(|k| {
        let side = move || prop::collection::vec(monomial(k, 1..=3), 0..=2);
        prop::collection::vec((side(), side()), 1..=3).prop_map(move |sq| {
            SquareSystem::new(
                names(k),
                Vec::new(),
                sq.into_iter().map(|(l, r)| Square { l, r }).collect(),
            )
            .unwrap()
        })
    })
}

fn point_witness(vars: &[String], point: &[u64]) -> crate::expdio::Witness {
    witness(vars.iter().cloned().zip(point.iter().copied()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pure_terms_stay_natural(t in pure_term()) {
        match eval_with(&t, &env(), small()) {
            Ok(v) => prop_assert!(v >= 0),
            Err(e) => prop_assert!(e.is_budget() || e == Error::DivisionByZero, "{e}"),
        }
    }

    #[test]
    fn sugar_expansion_preserves_value(t in sugar_term()) {
        let b = Budget::default().with_bits(1 << 20);
        if let Ok(v) = eval_with(&t, &env(), b) {
            match eval_with(&expand_sugar(&t), &env(), b) {
                Ok(e) => prop_assert_eq!(e, v),
                Err(e) => prop_assert!(e.is_budget(), "{e}"),
            }
        }
    }

    #[test]
    fn squares_are_nonnegative_and_vanish_exactly_on_solutions(s in system(), raw in prop::collection::vec(0u64..4, 3)) {
        let p = expand_squares(&s);
        let w = point_witness(&s.unknowns, &raw[..s.unknowns.len()]);
        let v = eval_poly(&p, &w, Budget::default()).unwrap();
        prop_assert!(v >= 0);
        let all_equal = s.residuals(&w, Budget::default()).unwrap().iter().all(|r| r.is_zero());
        prop_assert_eq!(v == 0, all_equal);
    }

    #[test]
    fn canonical_form_is_idempotent(s in system()) {
        let p = expand_squares(&s);
        let again = ExpPolynomial::new(p.unknowns.clone(), p.params.clone(), p.monomials.clone());
        prop_assert_eq!(again, p);
    }

    #[test]
    fn transform_preserves_solution_count(
        k in 1usize..=2,
        t in 1u64..=6,
        pos in prop::collection::vec((1i64..=2, prop::collection::vec((1u32..=2, 0u32..=1), 2)), 1..=2),
        neg in prop::collection::vec((1i64..=2, prop::collection::vec((1u32..=2, 0u32..=1), 2)), 0..=1),
    ) {
        let mono = |(c, fs): &(i64, Vec<(u32, u32)>)| Monomial {
            coeff: Integer::from(*c),
            factors: fs[..k].iter().map(|&(v, r)| Factor { v: Integer::from(v), r }).collect(),
        };
        let pos: Vec<Monomial> = pos.iter().map(mono).collect();
        let neg: Vec<Monomial> = neg.iter().map(mono).collect();
        let mut all = pos.clone();
        all.extend(neg.iter().map(|m| m.scaled(&Integer::from(-1))));
        let e = ExpPolynomial::new(names(k), Vec::new(), all);
        let f = expand_squares(&nonneg_singlefold_transform(&names(k), &pos, &neg).unwrap());
        let top: Vec<Integer> = vec![Integer::from(t - 1); k];
        let mut bounds = vec![t; k];
        bounds.extend(pos.iter().chain(&neg).map(|m| m.eval_at(&top).to_u64().unwrap() + 1));
        prop_assume!(bounds.iter().product::<u64>() <= 1_000_000);
        let b = Budget::default();
        prop_assert_eq!(brute_count_box(&f, &bounds, b).unwrap(), brute_count(&e, t, b).unwrap());
    }

    #[test]
    fn geometric_sums_match_direct(r in 0u32..=2, q in 0u32..=7, t in 0u64..=50) {
        let q = Integer::from(q);
        let direct: Integer = (0..t).map(|x| q.clone().pow(x as u32) * Integer::from(x).pow(r)).sum();
        prop_assert_eq!(geo_sum(r, &q, t), direct);
    }

    #[test]
    fn m_matches_direct_sum_and_counts_match_brute_force(p in poly(), t in 1u64..=5) {
        let w = choose_w(&p, t);
        let ci = CountingInstance::new(p.clone(), t, w).unwrap();
        let b = Budget::default();
        prop_assert_eq!(build_m(&ci, b).unwrap(), build_m_direct(&ci, b).unwrap());
        // counting needs f >= 0 on the cube
        let k = p.k() as u32;
        let nonneg = (0..t.pow(k)).all(|i| {
            let point: Vec<Integer> = (0..k).map(|j| Integer::from(i / t.pow(j) % t)).collect();
            p.eval_at(&point) >= 0
        });
        if nonneg {
            prop_assert_eq!(count_solutions(&ci, b).unwrap(), brute_count(&p, t, b).unwrap());
        }
    }

    #[test]
    fn c_term_divides_exactly(w in 1u64..=10, t in 1u64..=3, k in 1u32..=2, frac in 0.0f64..=1.0) {
        let c0 = Integer::from(((1u64 << w) as f64 * frac) as u64);
        prop_assert!(term_c(&c0, t, w, k).is_ok());
    }

    #[test]
    fn pell_doubling(n in 0u64..=100) {
        let x = |m| crec_eval(&CRecSpec::pell_x(), m);
        prop_assert_eq!(x(2 * n), x(n).pow(2u32) * 2u32 - 1u32);
    }

    #[test]
    fn lehmer_modular_agrees(n in 1u64..=20, p in 2u64..1_000_000) {
        let modulus = Integer::from(p);
        let full = lehmer_s(n, None, Budget::default()).unwrap();
        prop_assert_eq!(lehmer_s(n, Some(&modulus), Budget::default()).unwrap(), full % modulus);
    }

    #[test]
    fn extraction_matches_recurrence(
        a in prop::collection::vec(-3i64..=3, 1..=2),
        b1 in -4i64..=-1,
        b2 in -1i64..=1,
    ) {
        let ints = |v: &[i64]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
        let Ok(spec) = CRecSpec::new(ints(&a), ints(&[1, b1, b2]), None) else { return Ok(()) };
        let Ok(d) = extract_divmod_term(&spec) else { return Ok(()) };
        let want = crec_prefix(&spec, 51);
        for n in d.valid_from..=50 {
            if want[n as usize] < 0 {
                continue;
            }
            prop_assert_eq!(&eval_at_n(&d.term, n, Budget::default()).unwrap(), &want[n as usize], "n = {}", n);
        }
    }

    #[test]
    fn generator_terms_match_semantics(n in 0u64..=40) {
        for g in [Generator::Twin, Generator::Sophie] {
            prop_assert_eq!(g.term_eval(n, Budget::default()).unwrap(), g.semantic(n).unwrap());
        }
        if n <= 6 {
            for g in [Generator::Mersenne(1), Generator::Fermat(1)] {
                prop_assert_eq!(g.term_eval(n, Budget::default()).unwrap(), g.semantic(n).unwrap());
            }
        }
    }
}
