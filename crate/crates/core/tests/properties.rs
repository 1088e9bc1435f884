use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sbst_tune::operators::{apply_mutations, crossover, random_testcase, Archive};
use sbst_tune::param_space::{dynamosa_space, mio_space, ParamSpace};
use sbst_tune::stats::{a12, mann_whitney_u, relative_coverage};
use sbst_tune::subject::{GeneratorParams, Subject};
use sbst_tune::tuner::de_offspring;

fn spaces() -> impl Strategy<Value = ParamSpace> {
    prop_oneof![Just(dynamosa_space()), Just(mio_space())]
}

fn subject() -> impl Strategy<Value = Subject> {
    (any::<u64>(), 1usize..5, 1usize..5, 1usize..16).prop_map(|(seed, roots, max_depth, slot_span)| {
        let params = GeneratorParams {
            roots,
            max_depth,
            slot_span,
            ..GeneratorParams::default()
        };
        Subject::generate("p", seed, params).unwrap()
    })
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(0u8..6).prop_map(f64::from), 0.0..1.0f64], 1..12)
}

proptest! {
    #[test]
    fn decoded_configs_are_valid_and_round_trip(space in spaces(), raw in prop::collection::vec(-2.0..2.0f64, 8)) {
        // out to 1.5 widths past either bound
        let vector: Vec<f64> = space.bounds().iter().zip(&raw).map(|(&(lo, hi), r)| lo + (hi - lo) * (r + 0.5)).collect();
        let decoded = space.decode(&vector).unwrap();
        space.validate(&decoded.config).unwrap();
        let again = space.decode(&space.encode(&decoded.config).unwrap()).unwrap();
        prop_assert!(again.warnings.is_empty());
        prop_assert!(space.equivalent(&decoded.config, &again.config));
    }

    #[test]
    fn de_offspring_matches_formula(
        x in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64), 1..8),
        f in 0.0..2.0f64,
    ) {
        let (r, (s, t)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = x.iter().map(|&(a, b, c)| (a, (b, c))).unzip();
        let child = de_offspring(&r, &s, &t, f).unwrap();
        for k in 0..r.len() {
            prop_assert_eq!(child[k].to_bits(), (t[k] + f * (r[k] - s[k])).to_bits());
        }
    }

    #[test]
    fn variation_keeps_tests_valid(subject in subject(), seed in any::<u64>(), max_len in 1usize..30, count in 0usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_testcase(&subject, max_len, &mut rng);
        let b = random_testcase(&subject, max_len, &mut rng);
        prop_assert!(a.is_valid(max_len) && b.is_valid(max_len));
        let m = apply_mutations(&a, count, max_len, &subject, &mut rng);
        prop_assert!(m.is_valid(max_len));
        let (c, d) = crossover(&a, &b, max_len, &subject, &mut rng);
        prop_assert!(c.is_valid(max_len) && d.is_valid(max_len));
        let (same, _) = crossover(&a, &a, max_len, &subject, &mut rng);
        prop_assert_eq!(same, a);
    }

    #[test]
    fn archive_coverage_never_drops(subject in subject(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut archive = Archive::for_subject(&subject);
        let mut last = 0.0;
        for _ in 0..40 {
            let test = random_testcase(&subject, 8, &mut rng);
            let covered = subject.covered_goals(&subject.execute(&test));
            archive.update(&subject, &test);
            for goal in covered {
                prop_assert!(archive.witness(goal).unwrap().len() <= test.len());
            }
            prop_assert!(archive.coverage() >= last);
            last = archive.coverage();
        }
        for (goal, witness) in archive.entries() {
            prop_assert!(subject.covered_goals(&subject.execute(witness)).contains(&goal));
        }
    }

    #[test]
    fn a12_is_antisymmetric_and_rank_based(xs in sample(), ys in sample()) {
        let forward = a12(&xs, &ys).unwrap();
        prop_assert!((forward + a12(&ys, &xs).unwrap() - 1.0).abs() < 1e-12);
        let squash = |v: &[f64]| v.iter().map(|x| (3.0 * x + 1.0).ln()).collect::<Vec<_>>();
        prop_assert!((a12(&squash(&xs), &squash(&ys)).unwrap() - forward).abs() < 1e-12);

        let report = mann_whitney_u(&xs, &ys, 0.05).unwrap();
        prop_assert!((report.u_statistic - forward * (xs.len() * ys.len()) as f64).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&report.p_value));
        prop_assert_eq!(report.p_value, mann_whitney_u(&ys, &xs, 0.05).unwrap().p_value);
    }

    #[test]
    fn relative_coverage_stays_in_unit_interval(rows in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 4), 2..6)) {
        let rel = relative_coverage(&rows).unwrap();
        prop_assert_eq!(rel.len(), rows.len());
        for r in rel {
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }
}
