use std::sync::OnceLock;

use proptest::prelude::*;

use cylklrw::normal::Engine;
use cylklrw::operator::Mode;
use cylklrw::props;
use cylklrw::tableau::{diagonal_boxes, tableau_degree, MonopoleTableau};

fn plain() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(Mode::Plain))
}

fn deformed() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(Mode::Deformed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn local_rewrites_are_confluent(seed in any::<u64>()) {
        props::confluence(plain(), seed).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn deformed_rewrites_are_confluent(seed in any::<u64>()) {
        props::confluence(deformed(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn multiplication_is_associative(seed in any::<u64>()) {
        props::associativity(plain(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn deformed_multiplication_is_associative(seed in any::<u64>()) {
        props::associativity(deformed(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn reduction_preserves_gradings(seed in any::<u64>()) {
        props::grading_preservation(plain(), seed).map_err(TestCaseError::fail)?;
        props::grading_preservation(deformed(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn deformed_specializes_to_plain(seed in any::<u64>()) {
        props::specialization(plain(), deformed(), seed).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coulomb_endomorphisms_commute(seed in any::<u64>()) {
        props::commutativity(plain(), seed).map_err(TestCaseError::fail)?;
    }
}

fn tableau(shape: usize, raw: Vec<i32>) -> MonopoleTableau {
    let (k, n) = [(1, 3), (2, 4), (2, 5)][shape];
    let mut it = raw.into_iter();
    let diags: Vec<Vec<i32>> =
        (1..n).map(|m| diagonal_boxes(k, n, m).iter().map(|_| it.next().unwrap()).collect()).collect();
    MonopoleTableau::from_diagonals(k, n, &diags).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// A nonzero untwisted tableau has a largest entry that can be lowered, or
    /// a smallest one that can be raised, without raising the degree.
    #[test]
    fn some_box_decrements(shape in 0usize..3, raw in prop::collection::vec(-3i32..=3, 6)) {
        let t = tableau(shape, raw);
        let d = tableau_degree(&t, 0).unwrap();
        let (lo, hi) = t.rows.iter().flatten().fold((0, 0), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        prop_assume!(lo < 0 || hi > 0);
        prop_assert!(d > 0, "{t:?} has degree {d}");
        let mut ok = false;
        for i in 0..t.k {
            for j in 0..t.n - t.k {
                let a = t.rows[i][j];
                for (target, step) in [(hi, -1), (lo, 1)] {
                    if a != target || a == 0 {
                        continue;
                    }
                    let mut u = t.clone();
                    u.rows[i][j] += step;
                    if u.validate().is_ok() && tableau_degree(&u, 0).unwrap() <= d {
                        ok = true;
                    }
                }
            }
        }
        prop_assert!(ok, "no box of {t:?} moves towards zero without raising the degree");
    }
}

fn plucker_poly(terms: &[(i64, Vec<usize>)]) -> cylklrw::plucker::PluckerPoly {
    use cylklrw::plucker::PluckerPoly;
    terms.iter().fold(PluckerPoly::zero(), |acc, (c, vars)| {
        let m = vars.iter().fold(PluckerPoly::one(), |m, &v| m.mul(&PluckerPoly::var(v)));
        acc.add(&m.scale(*c))
    })
}

fn poly_terms() -> impl Strategy<Value = Vec<(i64, Vec<usize>)>> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0usize..6, 0..4)), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn plucker_reduction_is_a_ring_map(p in poly_terms(), q in poly_terms()) {
        use cylklrw::plucker::reduce_poly;
        let (p, q) = (plucker_poly(&p), plucker_poly(&q));
        let rp = reduce_poly(&p);
        prop_assert_eq!(reduce_poly(&rp), rp.clone());
        let rq = reduce_poly(&q);
        prop_assert_eq!(reduce_poly(&p.mul(&q)), reduce_poly(&rp.mul(&rq)));
        prop_assert_eq!(reduce_poly(&p.add(&q)), reduce_poly(&rp.add(&rq)));
    }
}
