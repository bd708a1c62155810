#![allow(dead_code)]

use hybrid_sizing::HourlySeries;
use proptest::prelude::*;

pub fn power(v: Vec<f64>) -> HourlySeries {
    HourlySeries::power(v).unwrap()
}

/// Demand and generation series of equal length, values in MW. Some hours
/// are forced to exact balance so flat stretches of the profile appear.
pub fn demand_generation(
    min_len: usize,
    max_len: usize,
) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (min_len..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0..50.0f64, n),
            prop::collection::vec(0.0..80.0f64, n),
            prop::collection::vec(0u8..10, n),
        )
            .prop_map(|(d, mut g, tie)| {
                for (k, t) in tie.iter().enumerate() {
                    if *t == 0 {
                        g[k] = d[k];
                    }
                }
                (d, g)
            })
    })
}

pub fn efficiency() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(0.8), 0.5..1.0f64]
}

/// Size over every pair of hours, following the wrap rule: a later hour
/// compared with an earlier one sees the next period's offset.
pub fn brute_force_size(levels: &[f64]) -> f64 {
    let wrap = levels[levels.len() - 1] - levels[0];
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for i in 0..levels.len() {
        for j in 0..levels.len() {
            let d = if i > j {
                (levels[j] - levels[i]) + wrap
            } else {
                levels[j] - levels[i]
            };
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    let e = if wrap > 0.0 {
        -lo
    } else if wrap < 0.0 {
        hi
    } else {
        (-lo).max(hi)
    };
    e.max(0.0)
}
