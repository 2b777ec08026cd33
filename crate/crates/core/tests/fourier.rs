// SPDX-License-Identifier: Apache-2.0

use junta_core::ground_truth::{
    exact_avg, exact_correlation, exact_hastad, exact_max_junta_corr, hastad_by_definition,
};
use junta_core::spectrum::inverse_wht;
use junta_core::table::RealTable;
use junta_core::{wht, NoiseVector, Point, Restriction, Sign, TruthTable};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn table_strategy(max_n: usize) -> impl Strategy<Value = TruthTable> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), 1 << n)
            .prop_map(move |bits| TruthTable::from_fn(n, |x| Sign::from_bit(bits[x as usize])).unwrap())
    })
}

fn pattern_strategy(n: usize) -> impl Strategy<Value = Restriction> {
    prop::collection::vec(-1i8..=1, n).prop_map(|p| Restriction::new(p).unwrap())
}

fn table_and_pattern(max_n: usize) -> impl Strategy<Value = (TruthTable, Restriction)> {
    table_strategy(max_n).prop_flat_map(|t| {
        let n = t.dimension();
        (Just(t), pattern_strategy(n))
    })
}

fn restricted_table(t: &TruthTable, xi: &Restriction) -> TruthTable {
    let survivors = xi.survivors();
    TruthTable::from_fn(survivors.len(), |y| {
        let local = Point::from_index(survivors.len(), y);
        t.eval(&xi.apply(&local))
    })
    .unwrap()
}

proptest! {
    #[test]
    fn parseval(t in table_strategy(8)) {
        let spec = wht(&t.to_reals()).unwrap();
        prop_assert!((spec.squared_norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn inverse_transform_reproduces_the_table(t in table_strategy(8)) {
        let spec = wht(&t.to_reals()).unwrap();
        let back = inverse_wht(&spec);
        for (a, b) in back.iter().zip(t.to_reals()) {
            prop_assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn restriction_spectrum_matches_the_restricted_table((t, xi) in table_and_pattern(7)) {
        let collapsed = wht(&t.to_reals()).unwrap().restrict(&xi);
        let direct = wht(&restricted_table(&t, &xi).to_reals()).unwrap();
        for (a, b) in collapsed.coefficients().iter().zip(direct.coefficients()) {
            prop_assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn derivative_is_the_restricted_singleton((t, xi) in table_and_pattern(7)) {
        let spec = wht(&t.to_reals()).unwrap();
        let restricted = wht(&restricted_table(&t, &xi).to_reals()).unwrap();
        let rho = xi.as_rho_point();
        for (pos, i) in xi.survivors().into_iter().enumerate() {
            let d = spec.discrete_derivative(i, &rho);
            prop_assert!((d - restricted.coefficient(1 << pos)).abs() < TOL);
        }
    }

    #[test]
    fn noise_operators_compose(t in table_strategy(7), a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
        let spec = wht(&t.to_reals()).unwrap();
        let twice = spec.apply_noise(a).apply_noise(b);
        let once = spec.apply_noise(a * b);
        for (x, y) in twice.coefficients().iter().zip(once.coefficients()) {
            prop_assert!((x - y).abs() < TOL);
        }
    }

    #[test]
    fn influence_under_noise(t in table_strategy(7), rho in -1.0f64..=1.0) {
        let spec = wht(&t.to_reals()).unwrap();
        let noisy = spec.apply_noise(rho);
        for i in 0..t.dimension() {
            let direct: f64 = spec
                .coefficients()
                .iter()
                .enumerate()
                .filter(|(s, _)| s >> i & 1 == 1)
                .map(|(s, c)| rho.powi(2 * s.count_ones() as i32) * c * c)
                .sum();
            prop_assert!((noisy.influence(i) - direct).abs() < TOL);
        }
    }

    #[test]
    fn hastad_spectrum_matches_the_triple_expectation(
        t in table_strategy(4),
        eta in prop::collection::vec(-1.0f64..=1.0, 4),
    ) {
        let eta = NoiseVector::new(eta[..t.dimension()].to_vec()).unwrap();
        let via_spectrum = exact_hastad(&t, &eta).unwrap();
        let by_definition = hastad_by_definition(&t, &eta).unwrap();
        for (a, b) in via_spectrum.values().iter().zip(by_definition.values()) {
            prop_assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn rounding_the_projection_attains_its_mean_absolute_value(
        t in table_strategy(8),
        mask in any::<u8>(),
    ) {
        let n = t.dimension();
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let avg = exact_avg(&t, &s).unwrap();
        let rounded = RealTable::new(
            n,
            (0..1u64 << n)
                .map(|x| {
                    let local = s
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (j, &c)| acc | ((x >> c & 1) << j));
                    Sign::of(avg.get(local)).value()
                })
                .collect(),
        )
        .unwrap();
        let corr = exact_correlation(&RealTable::from_truth_table(&t), &rounded).unwrap();
        let mean_abs = avg.values().iter().map(|v| v.abs()).sum::<f64>() / avg.values().len() as f64;
        prop_assert!((corr - mean_abs).abs() < TOL);
    }

    #[test]
    fn junta_maximum_is_monotone_in_k(t in table_strategy(7)) {
        let n = t.dimension();
        let mut last = -1.0;
        for k in 0..=n {
            let v = exact_max_junta_corr(&t, k).unwrap().value;
            prop_assert!(v >= last - TOL);
            last = v;
        }
        prop_assert!((last - 1.0).abs() < TOL);
    }
}

#[test]
fn hastad_identity_at_six_variables() {
    let mut rng = junta_core::rng_from_seed(6);
    for _ in 0..2 {
        let t = TruthTable::from_fn(6, |_| Sign::from_bit(rand::Rng::random::<bool>(&mut rng))).unwrap();
        let eta = NoiseVector::new((0..6).map(|i| 0.9 - 0.3 * i as f64).collect()).unwrap();
        let a = exact_hastad(&t, &eta).unwrap();
        let b = hastad_by_definition(&t, &eta).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < TOL);
        }
    }
}
