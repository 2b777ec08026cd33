// SPDX-License-Identifier: Apache-2.0

use junta_core::best_fit::subsets;
use junta_core::ground_truth::{
    exact_correlation, exact_gap_value, exact_max_junta_corr_real, exact_max_within,
    DEFAULT_WORK_CAP,
};
use junta_core::spectrum::inverse_wht;
use junta_core::table::RealTable;
use junta_core::{wht, Execution};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn real_table(max_n: usize) -> impl Strategy<Value = RealTable> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..=1.0, 1 << n).prop_map(move |v| RealTable::new(n, v).unwrap())
    })
}

fn sign_table(max_n: usize) -> impl Strategy<Value = RealTable> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![Just(-1.0), Just(1.0)], 1 << n)
            .prop_map(move |v| RealTable::new(n, v).unwrap())
    })
}

fn any_table(max_n: usize) -> impl Strategy<Value = RealTable> {
    prop_oneof![real_table(max_n), sign_table(max_n)]
}

/// A ±1 junta on the first `k` of `n` coordinates, from its local table.
fn junta(n: usize, k: usize, local: &[bool]) -> RealTable {
    let mask = (1usize << k) - 1;
    RealTable::new(
        n,
        (0..1usize << n)
            .map(|x| if local[x & mask] { -1.0 } else { 1.0 })
            .collect(),
    )
    .unwrap()
}

fn norm(v: &[f64]) -> f64 {
    (v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64).sqrt()
}

fn epsilon() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.1), Just(0.25), Just(0.5), 0.01f64..0.99]
}

proptest! {
    #[test]
    fn smoothing_moves_juntas_little(
        (n, k) in (1usize..=6).prop_flat_map(|n| (Just(n), 1..=n.min(3))),
        local in prop::collection::vec(any::<bool>(), 8),
        f in prop::collection::vec(-1.0f64..=1.0, 64),
        eps in epsilon(),
    ) {
        let g = junta(n, k, &local);
        let s = eps / (2.0 * k as f64);
        let smooth = inverse_wht(&wht(g.values()).unwrap().apply_noise(1.0 - s));
        let diff: Vec<f64> = g.values().iter().zip(&smooth).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&diff) <= eps / 2.0 * norm(g.values()) + TOL);

        let f = RealTable::new(n, f[..1 << n].to_vec()).unwrap();
        let tf = RealTable::new(n, inverse_wht(&wht(f.values()).unwrap().apply_noise(1.0 - s))).unwrap();
        let moved = exact_correlation(&tf, &g).unwrap() - exact_correlation(&f, &g).unwrap();
        prop_assert!(moved.abs() <= eps / 2.0 + TOL);
    }

    #[test]
    fn smoothed_functions_have_bounded_influence(f in any_table(8), s in 0.01f64..1.0) {
        let smooth = wht(f.values()).unwrap().apply_noise(1.0 - s);
        prop_assert!(smooth.total_influence() <= 1.0 / (2.0 * s) + TOL);
        let heavy = smooth.influences().iter().filter(|&&v| v >= 2.0 * s).count() as f64;
        prop_assert!(heavy <= 1.0 / (4.0 * s * s) + TOL);
    }

    #[test]
    fn dropping_low_influence_coordinates_costs_at_most_root_tk(
        f in any_table(7),
        k in 1usize..=3,
        t in 0.0f64..0.6,
        extra in any::<u8>(),
    ) {
        let (all, within) = drop_cost(&f, k, t, extra);
        prop_assert!(all - within <= (t * k as f64).sqrt() + TOL);
        prop_assert!(within <= all + TOL);
    }

    #[test]
    fn dropping_low_influence_coordinates_of_a_sign_table_costs_at_most_tk(
        f in sign_table(8),
        k in 1usize..=3,
        t in 0.0f64..0.6,
        extra in any::<u8>(),
    ) {
        let (all, within) = drop_cost(&f, k, t, extra);
        prop_assert!(all - within <= t * k as f64 + TOL);
    }

    #[test]
    fn gap_value_of_a_sign_table_is_sandwiched(
        f in sign_table(8),
        k in 1usize..=3,
        eps in prop_oneof![Just(0.1), Just(0.25), Just(0.5), 0.01f64..=0.5],
    ) {
        let n = f.dimension();
        let k = k.min(n);
        let gap = exact_gap_value(&f, k, eps).unwrap();
        let lower = exact_max_junta_corr_real(&f, k, DEFAULT_WORK_CAP).unwrap().value;
        let upper = exact_max_junta_corr_real(&f, gap.k_prime, DEFAULT_WORK_CAP).unwrap().value;
        prop_assert!(gap.selected.len() <= gap.k_prime);
        prop_assert!(gap.value <= upper + TOL);
        prop_assert!(gap.value >= lower - 1.5 * eps - TOL);
    }
}

/// Best `k`-junta correlation over all coordinates, and over those of
/// influence at least `t` plus the ones flagged in `extra`.
fn drop_cost(f: &RealTable, k: usize, t: f64, extra: u8) -> (f64, f64) {
    let n = f.dimension();
    let k = k.min(n);
    let spec = wht(f.values()).unwrap();
    let kept: Vec<usize> = (0..n)
        .filter(|&i| spec.influence(i) >= t || extra >> i & 1 == 1)
        .collect();
    let all = exact_max_junta_corr_real(f, k, DEFAULT_WORK_CAP).unwrap().value;
    let within = exact_max_within(f, &kept, k, DEFAULT_WORK_CAP, Execution::Sequential)
        .unwrap()
        .value;
    (all, within)
}

#[test]
fn real_table_breaks_the_linear_drop_bound() {
    // Inf_0 ≈ 0.278 < t, yet dropping coordinate 0 costs ≈ 0.476 > tk.
    let f = RealTable::new(1, vec![0.47593825816839364, -0.578148404780992]).unwrap();
    let (all, within) = drop_cost(&f, 1, 0.3, 0);
    assert!(all - within > 0.3);
    assert!(all - within <= 0.3f64.sqrt());
}

#[test]
fn dictator_breaks_the_sandwich_at_large_epsilon() {
    // T_{0.7} x_0 has influence 0.49 < ε/k, so nothing is selected.
    let f = RealTable::new(1, vec![1.0, -1.0]).unwrap();
    let gap = exact_gap_value(&f, 1, 0.6).unwrap();
    assert!(gap.selected.is_empty());
    assert!(gap.value.abs() < TOL);
    assert!(gap.value < 1.0 - 1.5 * 0.6);
}

#[test]
fn every_selection_of_a_small_table_obeys_the_low_influence_bound() {
    // All 2^16 functions on four variables, every threshold set.
    for bits in 0u32..1 << 16 {
        let f = RealTable::new(
            4,
            (0..16).map(|x| if bits >> x & 1 == 1 { -1.0 } else { 1.0 }).collect(),
        )
        .unwrap();
        let spec = wht(f.values()).unwrap();
        let inf = spec.influences();
        for k in 1..=3 {
            let all = exact_max_junta_corr_real(&f, k, DEFAULT_WORK_CAP).unwrap().value;
            for size in 0..=4 {
                for kept in subsets(4, size) {
                    let t = (0..4)
                        .filter(|i| !kept.contains(i))
                        .map(|i| inf[i])
                        .fold(0.0, f64::max)
                        + 1e-12;
                    let within = exact_max_within(&f, &kept, k, DEFAULT_WORK_CAP, Execution::Sequential)
                        .unwrap()
                        .value;
                    assert!(all - within <= t * k as f64 + TOL, "{bits:#x} {kept:?} {k}");
                }
            }
        }
    }
}
