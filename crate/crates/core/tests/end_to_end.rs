use jplt_core::codes::GrsCode;
use jplt_core::protocols::{
    jplt1_grs_query_random, jplt1_query, jplt2_query, random_grs_generator, recover, server_answer, Dataset,
    Demand, Model,
};
use jplt_core::rng::seeded;
use jplt_core::verify::{check_feasibility, check_joint_privacy, check_recoverability, Enumeration};
use jplt_core::{Matrix, PrimeField};
use proptest::prelude::*;
use rand::seq::index;
use rand::Rng;

/// `V X_W` computed entry by entry.
fn naive_demand(x: &Matrix, support: &[usize], v: &Matrix) -> Vec<Vec<u64>> {
    let q = x.field().modulus() as u128;
    (0..v.rows())
        .map(|l| {
            (0..x.cols())
                .map(|n| {
                    let s: u128 = support
                        .iter()
                        .enumerate()
                        .map(|(j, &i)| v.get(l, j) as u128 * x.get(i, n) as u128)
                        .sum();
                    (s % q) as u64
                })
                .collect()
        })
        .collect()
}

fn random_support<R: Rng>(k: usize, d: usize, rng: &mut R) -> Vec<usize> {
    let mut w = index::sample(rng, k, d).into_vec();
    w.sort_unstable();
    w
}

fn random_full_rank<R: Rng>(f: PrimeField, l: usize, d: usize, rng: &mut R) -> Matrix {
    loop {
        let v = Matrix::random(f, l, d, rng);
        if v.rank() == l {
            return v;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn grs_protocol_recovers(seed in any::<u64>(), q in prop::sample::select(vec![11u64, 13, 101])) {
        let f = PrimeField::new(q).unwrap();
        let mut rng = seeded(seed);
        let k = rng.random_range(2..=10);
        let d = rng.random_range(1..=k.min(5));
        let l = rng.random_range(1..=d);
        let support = random_support(k, d, &mut rng);
        let points: Vec<u64> = index::sample(&mut rng, q as usize, d).into_iter().map(|p| p as u64).collect();
        let mults: Vec<u64> = (0..d).map(|_| rng.random_range(1..q)).collect();
        let code = GrsCode::new(f, mults, points, l).unwrap();
        let out = jplt1_grs_query_random(&support, &code, k, &mut rng).unwrap();
        prop_assert_eq!(out.query.g.rows(), k - d + l);
        prop_assert_eq!(out.query.g.rank(), k - d + l);
        let demand = Demand::new(support.clone(), jplt_core::codes::grs_generator(&code), Model::I).unwrap();
        let x = Dataset::random(f, k, 3, &mut rng).unwrap();
        let z = recover(&server_answer(&out.query, &x).unwrap(), &out.plan).unwrap();
        prop_assert_eq!(z.to_rows(), naive_demand(x.messages(), &support, demand.coefficients()));
        prop_assert!(check_recoverability(&out.query.g, &demand).unwrap());
        prop_assert!(check_feasibility(&out.query.g, &support, demand.coefficients()).unwrap());
    }

    #[test]
    fn augmented_protocol_recovers(seed in any::<u64>(), q in prop::sample::select(vec![11u64, 13, 101])) {
        let f = PrimeField::new(q).unwrap();
        let mut rng = seeded(seed);
        let k = rng.random_range(2..=10);
        let d = rng.random_range(1..=k.min(5));
        let l = rng.random_range(1..=d);
        let support = random_support(k, d, &mut rng);
        let v = random_full_rank(f, l, d, &mut rng);
        let demand = Demand::new(support.clone(), v.clone(), Model::II).unwrap();
        let out = jplt2_query(&demand, k, &mut rng).unwrap();
        prop_assert_eq!(out.query.g.rank(), k - d + l);
        let x = Dataset::random(f, k, 2, &mut rng).unwrap();
        let z = recover(&server_answer(&out.query, &x).unwrap(), &out.plan).unwrap();
        prop_assert_eq!(z.to_rows(), naive_demand(x.messages(), &support, &v));
        let report = check_joint_privacy(&out.query.g, d, l, Model::II, Enumeration::default()).unwrap();
        prop_assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn generic_protocol_recovers_and_is_private(seed in any::<u64>()) {
        let f = PrimeField::new(101).unwrap();
        let mut rng = seeded(seed);
        let k = rng.random_range(2..=9);
        let d = rng.random_range(1..=k.min(5));
        let l = rng.random_range(1..=d);
        let support = random_support(k, d, &mut rng);
        let v = random_grs_generator(f, l, d, &mut rng).unwrap();
        let demand = Demand::new(support.clone(), v.clone(), Model::I).unwrap();
        let out = jplt1_query(&demand, k, &mut rng).unwrap();
        prop_assert_eq!(out.query.g.rank(), k - d + l);
        let x = Dataset::random(f, k, 2, &mut rng).unwrap();
        let z = recover(&server_answer(&out.query, &x).unwrap(), &out.plan).unwrap();
        prop_assert_eq!(z.to_rows(), naive_demand(x.messages(), &support, &v));
        let report = check_joint_privacy(&out.query.g, d, l, Model::I, Enumeration::default()).unwrap();
        prop_assert!(report.passed, "{:?}", report.failures);
    }
}

#[test]
fn feasibility_matches_recoverability_on_random_codes() {
    let f = PrimeField::new(5).unwrap();
    let mut rng = seeded(11);
    for _ in 0..300 {
        let k = rng.random_range(2..=6);
        let rows = rng.random_range(1..=k);
        let g = Matrix::random(f, rows, k, &mut rng);
        let d = rng.random_range(1..=k);
        let l = rng.random_range(1..=d);
        let support = random_support(k, d, &mut rng);
        let v = random_full_rank(f, l, d, &mut rng);
        let demand = Demand::new(support.clone(), v.clone(), Model::II).unwrap();
        assert_eq!(
            check_recoverability(&g, &demand).unwrap(),
            check_feasibility(&g, &support, &v).unwrap(),
        );
    }
}
