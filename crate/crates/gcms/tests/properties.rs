use proptest::prelude::*;

use gcms::config_space::{count_preimages, preimages, rules_check, BoundedConfig, Configuration, GroupWord};
use gcms::cylinder_algebra::{decompose, intersect, sample_configs, verify_identity, SubbasisElem};
use gcms::measures::{atomic_du_residual, measure_setexpr, y_measure, MeasureModel};
use gcms::series;
use gcms::shift_space::{Symbol, TransitionMatrix, Word};
use gcms::thermo::{self, Potential};

const BOUND: Symbol = 6;

fn matrix(i: usize) -> TransitionMatrix {
    match i {
        0 => TransitionMatrix::renewal(),
        1 => TransitionMatrix::pair_renewal(),
        _ => TransitionMatrix::prime_renewal(5),
    }
}

/// An admissible word steered by `choices`: each entry picks among the
/// allowed successors `≤ BOUND` of the previous symbol.
fn steer(m: &TransitionMatrix, choices: &[usize]) -> Word {
    let mut w: Vec<Symbol> = Vec::new();
    for &c in choices {
        let next: Vec<Symbol> = (1..=BOUND).filter(|&j| w.last().is_none_or(|&i| m.allows(i, j))).collect();
        if next.is_empty() {
            break;
        }
        w.push(next[c % next.len()]);
    }
    Word::from_slice(&w)
}

fn elem(m: &TransitionMatrix, kind: u8, choices: &[usize], j: Symbol) -> SubbasisElem {
    let w = steer(m, choices);
    match kind % 4 {
        0 => SubbasisElem::Cyl(w),
        1 => SubbasisElem::CylC(w),
        2 => SubbasisElem::InvCyl(w, j),
        _ => SubbasisElem::InvCylC(w, j),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn word_display_round_trips(v in prop::collection::vec(1u64..1000, 0..8)) {
        let w = Word::from_slice(&v);
        let back: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn intersection_agrees_with_membership(
        mi in 0usize..3,
        ka in 0u8..4, ca in prop::collection::vec(0usize..8, 1..4), ja in 1u64..=BOUND,
        kb in 0u8..4, cb in prop::collection::vec(0usize..8, 1..4), jb in 1u64..=BOUND,
    ) {
        let m = matrix(mi);
        let (a, b) = (elem(&m, ka, &ca, ja), elem(&m, kb, &cb, jb));
        let sample = sample_configs(&m, 5, BOUND, 40);
        let rhs = intersect(&m, &a, &b).unwrap();
        let rep = verify_identity(&m, (&a, &b), &rhs, &sample);
        prop_assert!(rep.passed(), "{:?}", rep.first_counterexample);
    }

    #[test]
    fn decomposition_agrees_with_membership(mi in 0usize..3, k in 0u8..4, c in prop::collection::vec(0usize..8, 0..4), j in 1u64..=BOUND) {
        let m = matrix(mi);
        let e = elem(&m, k, &c, j);
        let s = decompose(&m, &e).unwrap();
        for x in sample_configs(&m, 5, BOUND, 40) {
            prop_assert_eq!(s.containing_parts(&m, &x) == 1, e.contains(&m, &x), "{} at {}", e, x);
            prop_assert!(s.containing_parts(&m, &x) <= 1);
        }
    }

    #[test]
    fn configurations_satisfy_the_rules(mi in 0usize..3, c in prop::collection::vec(0usize..8, 0..5)) {
        let m = matrix(mi);
        let stem = steer(&m, &c);
        let root = m.catalog().iter().find(|col| stem.last().is_none_or(|l| col.terminal.contains(&l))).map(|col| col.id);
        prop_assume!(root.is_some());
        let x = Configuration::from(BoundedConfig::new(&m, stem, root.unwrap()).unwrap());
        prop_assert!(rules_check(&m, &x, 3, 5).passed());
        prop_assert!(x.eval(&m, &GroupWord::positive(Word::empty())));
    }

    #[test]
    fn preimage_count_dp_matches_enumeration(mi in 0usize..3, fam_pick in 0usize..4, n in 1usize..8) {
        let m = matrix(mi);
        let col = &m.catalog()[fam_pick % m.catalog().len()];
        let xi = BoundedConfig::empty_stem(&m, col.id).unwrap();
        let e = preimages(&m, &xi, n, n as Symbol + 7);
        prop_assert!(e.complete);
        prop_assert_eq!(e.items.len() as u128, count_preimages(&m, &xi, n));
    }

    #[test]
    fn partition_function_dp_matches_enumeration(mi in 0usize..2, beta in -1.0f64..2.0, n in 1usize..10, log in any::<bool>()) {
        let m = matrix(mi);
        let f = if log && mi == 0 { Potential::LogRatio } else { Potential::Constant(1.0) };
        let z = thermo::z_n(&m, &f, beta, 1, n, n as Symbol + 2);
        prop_assert!(z.complete);
        let dp = thermo::z_n_dp(&m, &f, beta, 1, n);
        prop_assert!((z.value - dp).abs() <= 1e-12 * dp.abs(), "{} vs {}", z.value, dp);
    }

    #[test]
    fn partition_function_is_supermultiplicative(mi in 0usize..2, beta in -1.0f64..2.0, a in 1usize..8, b in 1usize..8) {
        let m = matrix(mi);
        let f = Potential::Constant(1.0);
        let z = |n| thermo::z_n_dp(&m, &f, beta, 1, n);
        prop_assert!(z(a) * z(b) <= z(a + b) * (1.0 + 1e-12));
    }

    #[test]
    fn y_measures_are_conformal_probabilities(mi in 0usize..2, fam_pick in 0usize..2, beta in 1.0f64..3.0) {
        let m = matrix(mi);
        let col = &m.catalog()[fam_pick % m.catalog().len()];
        let y = y_measure(&m, col.id, &Potential::Constant(1.0), beta).unwrap();
        let t = y.total_mass();
        prop_assert!((t.value - 1.0).abs() <= 1e-9 && t.error <= 1e-9, "{:?}", t);
        prop_assert!(atomic_du_residual(&y, 4, BOUND) <= 1e-12);
    }

    #[test]
    fn cylinder_mass_splits_over_children(mi in 0usize..2, c in prop::collection::vec(0usize..8, 1..4), beta in 1.0f64..2.5) {
        let m = matrix(mi);
        let alpha = steer(&m, &c);
        let model = MeasureModel::YFamily(y_measure(&m, 1, &Potential::Constant(1.0), beta).unwrap());
        let parts = decompose(&m, &SubbasisElem::Cyl(alpha.clone())).unwrap();
        let whole = measure_setexpr(&model, &parts, 1e-9).unwrap();
        prop_assert!((whole.value - model.cylinder(&alpha)).abs() <= 1e-12 + whole.error);
    }

    #[test]
    fn zeta_tail_bounds_hold(s in 1.05f64..6.0, start in 1u64..50) {
        let t = series::power_tail(s, 1.0, start);
        const N: u64 = 20_000;
        // Σ_{k ≥ start} (k+1)^{-s}: a direct head plus an integral bound on the rest
        let head: f64 = (start..start + N).map(|k| ((k + 1) as f64).powf(-s)).rev().sum();
        let rest = ((start + N) as f64).powf(1.0 - s) / (s - 1.0);
        prop_assert!(head <= t.value + t.error + 1e-15);
        prop_assert!(t.value - t.error <= head + rest + 1e-15);
        prop_assert!(t.value >= 0.0 && t.error >= 0.0);
    }
}
