use proptest::prelude::*;

use lpflats::grassmann::{
    dist_grassmann, principal_angles, random_subspace, random_tuple, recovery_distance, Geodesic, Subspace,
};
use lpflats::rng::rng_from;

/// (D, d, seed) with 1 ≤ d < D ≤ 6.
fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=6).prop_flat_map(|dd| (Just(dd), 1..dd, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_a_metric((dd, d, seed) in shape()) {
        let mut rng = rng_from(seed);
        let [a, b, c]: [Subspace; 3] = std::array::from_fn(|_| random_subspace(dd, d, &mut rng).unwrap());
        let ab = dist_grassmann(&a, &b).unwrap();
        prop_assert!(dist_grassmann(&a, &a).unwrap() < 1e-7);
        prop_assert_eq!(ab, dist_grassmann(&b, &a).unwrap());
        let detour = dist_grassmann(&a, &c).unwrap() + dist_grassmann(&c, &b).unwrap();
        prop_assert!(ab <= detour + 1e-10);
    }

    #[test]
    fn angles_lie_in_range_and_match_distance((dd, d, seed) in shape()) {
        let mut rng = rng_from(seed);
        let a = random_subspace(dd, d, &mut rng).unwrap();
        let b = random_subspace(dd, d, &mut rng).unwrap();
        let theta = principal_angles(&a, &b).unwrap();
        prop_assert_eq!(theta.as_slice().len(), d);
        prop_assert!(theta.as_slice().iter().all(|&t| (0.0..=std::f64::consts::FRAC_PI_2).contains(&t)));
        let norm = theta.as_slice().iter().map(|t| t * t).sum::<f64>().sqrt();
        prop_assert!((norm - dist_grassmann(&a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn geodesic_points_split_the_distance((dd, d, seed) in shape(), s in 0.0f64..=1.0) {
        let mut rng = rng_from(seed);
        let a = random_subspace(dd, d, &mut rng).unwrap();
        let b = random_subspace(dd, d, &mut rng).unwrap();
        let Ok(path) = Geodesic::between(&a, &b) else { return Ok(()) };
        prop_assume!(principal_angles(&a, &b).unwrap().largest() < 1.5);
        let t = s * path.length();
        let mid = path.at(t);
        prop_assert!((dist_grassmann(&a, &mid).unwrap() - t).abs() < 1e-8);
        prop_assert!((dist_grassmann(&mid, &b).unwrap() - (path.length() - t)).abs() < 1e-8);
    }

    #[test]
    fn recovery_distance_ignores_order(k in 1usize..=4, seed in any::<u64>(), rot in 0usize..4) {
        let mut rng = rng_from(seed);
        let a = random_tuple(k, 4, 2, &mut rng).unwrap();
        let b = random_tuple(k, 4, 2, &mut rng).unwrap();
        let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
        let (d, _) = recovery_distance(&a, &b).unwrap();
        let (dp, _) = recovery_distance(&a.permuted(&perm).unwrap(), &b).unwrap();
        prop_assert!((d - dp).abs() < 1e-12);
        prop_assert!(recovery_distance(&b, &b.permuted(&perm).unwrap()).unwrap().0 < 1e-7);
    }
}
