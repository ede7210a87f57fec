mod common;

use hrrc_core::exhaustive::exists_strongly_stable;
use hrrc_core::generate::{enumerate_ppn, random_cnf, random_one_in_three, random_ppn};
use hrrc_core::reductions::{
    check_ppn, decode_matching, encode_assignment, parse_dimacs, reduce, reduce_ppn, sat_brute,
    satisfying_assignments, to_dimacs, to_ppn, CnfFormula, OccurrenceTable, ReductionVariant, SatMode,
};
use hrrc_core::SolveOutcome;
use proptest::prelude::*;
use rand::Rng;

/// Residents, hospitals and regions each construction is expected to build.
fn expected_counts(v: ReductionVariant, n: usize, m2: usize, m3: usize) -> (usize, usize, usize) {
    let m = m2 + m3;
    match v {
        ReductionVariant::Ppn223 => (
            2 * n + 2 * m2 + 4 * m3 + 3 * m,
            7 * n + 2 * m2 + 4 * m3 + 3 * m,
            3 * n + m2 + 2 * m3 + m,
        ),
        ReductionVariant::Ppn232 => (
            2 * n + 2 * m2 + 4 * m3 + 3 * m,
            5 * n + 2 * m2 + 4 * m3 + 2 * m,
            2 * n + m2 + 2 * m3 + m,
        ),
        ReductionVariant::Ppn322 => (
            4 * n + 3 * m2 + 6 * m3 + 2 * m,
            5 * n + 3 * m2 + 6 * m3 + 2 * m,
            n + m,
        ),
        ReductionVariant::OneInThree222 => unreachable!(),
    }
}

#[test]
fn counts_and_classes_over_random_shapes() {
    let mut rng = common::rng(41);
    for _ in 0..30 {
        let n = rng.gen_range(2..=10);
        // 3n = 2 m2 + 3 m3 with m3 of the parity of n.
        let m3 = 2 * rng.gen_range(0..=n / 2) + n % 2;
        let m2 = (3 * n - 3 * m3) / 2;
        let f = random_ppn(&mut rng, n, m3);
        for v in ReductionVariant::PPN {
            let inst = reduce(&f, v).unwrap().instance;
            let got = (inst.num_residents(), inst.num_hospitals(), inst.regions().len());
            assert_eq!(got, expected_counts(v, n, m2, m3), "{v} n={n} m2={m2} m3={m3}");
            let class = inst.classify();
            assert_eq!((class.alpha, class.beta, class.gamma), v.parameters(), "{v}");
            assert!(class.disjoint);
        }
    }
}

#[test]
fn every_two_variable_ppn_formula_round_trips() {
    for f in enumerate_ppn(2) {
        let sat = sat_brute(&f, SatMode::Ordinary).unwrap();
        for v in ReductionVariant::PPN {
            let red = reduce(&f, v).unwrap();
            let out = exists_strongly_stable(&red.instance);
            assert_eq!(out.found().is_some(), sat.is_some(), "{v}\n{f}");
            if let SolveOutcome::Found(m) = out {
                assert!(f.satisfied_by(&red.decode(&m), SatMode::Ordinary), "{v}\n{f}");
            }
        }
    }
}

#[test]
fn unsatisfiable_ppn_formula_has_no_strongly_stable_matching() {
    let f = CnfFormula::from_ints(4, &[&[-4, -3], &[-2, 4], &[-1, 3], &[1, 2], &[1, 3], &[2, 4]]).unwrap();
    assert!(check_ppn(&f).is_empty());
    assert_eq!(sat_brute(&f, SatMode::Ordinary).unwrap(), None);
    for v in ReductionVariant::PPN {
        let red = reduce(&f, v).unwrap();
        assert_eq!(
            exists_strongly_stable(&red.instance),
            SolveOutcome::NoneExists,
            "{v}"
        );
    }
}

#[test]
fn one_in_three_verdicts() {
    let sat = CnfFormula::from_ints(3, &[&[1, 2, 3]]).unwrap();
    let red = reduce(&sat, ReductionVariant::OneInThree222).unwrap();
    let out = exists_strongly_stable(&red.instance);
    let m = out.found().expect("satisfiable");
    assert!(sat.satisfied_by(&red.decode(m), SatMode::OneInThree));

    // Every 3-subset of 4 variables: any one true variable lies in three clauses.
    let unsat = CnfFormula::from_ints(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]).unwrap();
    assert_eq!(sat_brute(&unsat, SatMode::OneInThree).unwrap(), None);
    assert!(sat_brute(&unsat, SatMode::Ordinary).unwrap().is_some());
    let red = reduce(&unsat, ReductionVariant::OneInThree222).unwrap();
    assert_eq!(red.instance.num_residents(), 12);
    assert_eq!(red.instance.num_hospitals(), 12);
    assert_eq!(exists_strongly_stable(&red.instance), SolveOutcome::NoneExists);
}

#[test]
fn random_one_in_three_equisatisfiable() {
    let mut rng = common::rng(5);
    for _ in 0..40 {
        let n = rng.gen_range(3..=5);
        let m = rng.gen_range(1..=3);
        let f = random_one_in_three(&mut rng, n, m);
        let sat = sat_brute(&f, SatMode::OneInThree).unwrap();
        let red = reduce(&f, ReductionVariant::OneInThree222).unwrap();
        let out = exists_strongly_stable(&red.instance);
        assert_eq!(out.found().is_some(), sat.is_some(), "{f}");
        if let Some(m) = out.found() {
            assert!(f.satisfied_by(&red.decode(m), SatMode::OneInThree));
        }
        if let Some(a) = sat {
            let m = red.encode(&f, &a).unwrap();
            assert!(common::is_strongly_stable(&red.instance, &m), "{f}");
        }
    }
}

#[test]
fn non_ppn_input_rejected() {
    let f = CnfFormula::from_ints(2, &[&[1, 2, -1]]).unwrap();
    for v in ReductionVariant::PPN {
        assert!(reduce_ppn(&f, v).is_err());
    }
    let pos = CnfFormula::from_ints(3, &[&[1, 2, 3]]).unwrap();
    assert!(reduce(&pos, ReductionVariant::Ppn223).is_err());
    let a = sat_brute(&pos, SatMode::OneInThree).unwrap().unwrap();
    let mut wrong = a.clone();
    wrong.set(1, true);
    assert!(encode_assignment(&pos, &wrong, ReductionVariant::OneInThree222).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_decode_round_trip(seed in any::<u64>(), n in 2..=3usize, three in any::<bool>()) {
        let mut rng = common::rng(seed);
        let m3 = if n == 3 { if three { 3 } else { 1 } } else if three { 2 } else { 0 };
        let f = random_ppn(&mut rng, n, m3);
        for v in ReductionVariant::PPN {
            for a in satisfying_assignments(&f, SatMode::Ordinary, 20).unwrap() {
                let m = encode_assignment(&f, &a, v).unwrap();
                let red = reduce(&f, v).unwrap();
                prop_assert!(common::is_strongly_stable(&red.instance, &m), "{} {}", v, a);
                prop_assert_eq!(decode_matching(&f, &m, v).unwrap(), a);
            }
        }
    }

    #[test]
    fn normalization_preserves_verdict(seed in any::<u64>(), n in 1..=4usize, m in 1..=5usize) {
        let f = random_cnf(&mut common::rng(seed), n, m, 3);
        let (g, prov) = to_ppn(&f).unwrap();
        prop_assert!(check_ppn(&g).is_empty(), "{}", check_ppn(&g));
        let before = sat_brute(&f, SatMode::Ordinary).unwrap();
        let after = sat_brute(&g, SatMode::Ordinary).unwrap();
        prop_assert_eq!(before.is_some(), after.is_some());
        if let Some(a) = after {
            prop_assert!(f.satisfied_by(&prov.project(&a), SatMode::Ordinary));
        }
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), n in 1..=6usize, m in 0..=6usize) {
        let f = random_cnf(&mut common::rng(seed), n, m, 3);
        prop_assert_eq!(parse_dimacs(&to_dimacs(&f)).unwrap(), f);
    }

    #[test]
    fn occurrence_tables_are_consistent(seed in any::<u64>(), n in 2..=8usize) {
        let f = random_ppn(&mut common::rng(seed), n, n % 2);
        let t = OccurrenceTable::new(&f).unwrap();
        prop_assert!(t.is_consistent());
        for i in 1..=n {
            for k in 1..=3 {
                let s = t.slot(i, k);
                let lit = f.clause(s.clause)[s.position - 1];
                prop_assert_eq!(lit.var, i);
                prop_assert_eq!(lit.negated, k == 3);
            }
        }
        prop_assert_eq!(OccurrenceTable::from_json(&t.to_json()).unwrap(), t);
    }
}
