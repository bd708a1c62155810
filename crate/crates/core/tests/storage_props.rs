mod common;

use common::{brute_force_size, demand_generation, efficiency, power};
use hybrid_sizing::storage::{
    difference_matrix, find_critical_points, storage_size, storage_size_oracle,
    storage_size_streaming, unconstrained_profile, StorageParams, StorageSizing,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn critical_points_match_all_pairs((d, g) in demand_generation(2, 200), eta_c in efficiency(), eta_d in efficiency()) {
        let p = StorageParams::new(eta_c, eta_d, 1.0).unwrap();
        let profile = unconstrained_profile(&power(d), &power(g), &p).unwrap();
        let cps = find_critical_points(&profile);
        let (s0, st) = (profile.start_level(), profile.end_level());
        let via_matrix = storage_size(&difference_matrix(&cps, s0, st).unwrap(), s0, st).mwh();
        let streaming = storage_size_streaming(&cps, s0, st).mwh();
        let brute = brute_force_size(profile.levels());
        prop_assert!((via_matrix - brute).abs() <= 1e-9, "{via_matrix} vs {brute}");
        prop_assert!((streaming - brute).abs() <= 1e-9, "{streaming} vs {brute}");
        prop_assert!((storage_size_oracle(&profile).mwh() - brute).abs() <= 1e-9);
    }

    #[test]
    fn size_is_non_negative_and_bounded((d, g) in demand_generation(2, 120), eta in efficiency()) {
        let p = StorageParams::new(eta, eta, 1.0).unwrap();
        let s = StorageSizing::analyze(&power(d), &power(g), &p).unwrap();
        let levels = s.profile.levels();
        let range = levels.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - levels.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(s.size.mwh() >= 0.0);
        prop_assert!(s.size.mwh() <= range + (levels[levels.len() - 1]).abs() + 1e-9);
    }

    #[test]
    fn critical_points_are_sorted_extrema((d, g) in demand_generation(2, 120)) {
        let profile = unconstrained_profile(&power(d), &power(g), &StorageParams::ideal()).unwrap();
        let cps = find_critical_points(&profile);
        prop_assert_eq!(cps.times[0], 0);
        prop_assert_eq!(*cps.times.last().unwrap(), profile.horizon());
        prop_assert!(cps.times.windows(2).all(|w| w[0] < w[1]));
        let lv = profile.levels();
        for &t in &cps.times[1..cps.len() - 1] {
            let (a, b, c) = (lv[t - 1], lv[t], lv[t + 1]);
            prop_assert!((b >= a && b >= c) || (b <= a && b <= c));
        }
    }

    #[test]
    fn matrix_diagonal_is_zero_and_upper_entries_are_plain_differences((d, g) in demand_generation(2, 60)) {
        let profile = unconstrained_profile(&power(d), &power(g), &StorageParams::ideal()).unwrap();
        let cps = find_critical_points(&profile);
        let m = difference_matrix(&cps, profile.start_level(), profile.end_level()).unwrap();
        for i in 0..m.n() {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in i + 1..m.n() {
                prop_assert_eq!(m.get(i, j), cps.levels[j] - cps.levels[i]);
            }
        }
    }
}

#[test]
fn lossless_profile_is_cumulative_net() {
    let d = power(vec![1.0, 1.0, 1.0, 1.0]);
    let g = power(vec![0.0, 1.0, 2.0, 0.0]);
    let profile = unconstrained_profile(&d, &g, &StorageParams::ideal()).unwrap();
    assert_eq!(profile.levels(), &[0.0, -1.0, -1.0, 0.0, -1.0]);
}
