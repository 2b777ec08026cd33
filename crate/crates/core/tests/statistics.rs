// SPDX-License-Identifier: Apache-2.0

use junta_core::best_fit::{subsets, BucketTable};
use junta_core::coord::{sample_eta, CoordinateOracleSet};
use junta_core::functions::{tabulate, Dictator, Majority, Parity};
use junta_core::gap::{coordinate_projection, influence_testing_sample, walk_chain, WalkConfig};
use junta_core::ground_truth::{
    exact_restriction_hit_probability, hastad_spectrum, subset_correlation, DEFAULT_WORK_CAP,
};
use junta_core::spectrum::inverse_wht;
use junta_core::table::RealTable;
use junta_core::{rng_from_seed, wht, BooleanOracle, Point, Restriction, Sign, TruthTable};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn chain_states_are_uniform_off_the_oracle_coordinates() {
    let n = 10;
    let coords = [1, 4, 7];
    let free: Vec<usize> = (0..n).filter(|i| !coords.contains(i)).collect();
    let d = CoordinateOracleSet::exact(n, &coords);
    let cells = 1usize << free.len();
    let per_cell = 200;
    let thin = 8;
    let cfg = WalkConfig::with_steps(coords.len(), (cells * per_cell * thin) as u64, 0.1, 0.1);
    let mut rng = rng_from_seed(10);
    let x = Point::random(n, &mut rng);
    let mut counts = vec![0u64; cells];
    let mut step = 0;
    walk_chain(&x, &d, &cfg, &mut rng, |y, _| {
        if step % thin == 0 {
            let cell = free
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &c)| acc | (y.is_minus(c) as usize) << j);
            counts[cell] += 1;
        }
        step += 1;
        Ok(())
    })
    .unwrap();
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / cells as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    assert!(p > 1e-3, "chi-square {stat} p {p}");
}

#[test]
fn projections_land_within_gamma() {
    let gamma = 0.05;
    let mut rng = rng_from_seed(11);
    let maj = BooleanOracle::new(Majority {
        n: 8,
        coords: vec![0, 1, 2],
    });
    let par = BooleanOracle::new(Parity {
        n: 8,
        coords: vec![0, 1],
    });
    let cases: [(&BooleanOracle, Vec<usize>, fn(&Point) -> f64); 3] = [
        (&maj, vec![0], |x| x.get(0).value() / 2.0),
        (&par, vec![0, 1], |x| (x.get(0) * x.get(1)).value()),
        (&par, vec![0], |_| 0.0),
    ];
    let mut within = 0;
    let mut calls = 0;
    for (f, coords, exact) in &cases {
        let d = CoordinateOracleSet::exact(8, coords);
        let cfg = WalkConfig::new(coords.len(), gamma, 0.05, 8.0).unwrap();
        for _ in 0..30 {
            let x = Point::random(8, &mut rng);
            let v = coordinate_projection(*f, &x, &d, &cfg, &mut rng).unwrap();
            within += ((v - exact(&x)).abs() <= gamma) as u32;
            calls += 1;
        }
    }
    assert!(within as f64 >= 0.95 * calls as f64, "{within}/{calls}");
}

proptest! {
    #[test]
    fn influence_samples_flip_exactly_their_own_coordinate(
        seed in any::<u64>(),
        n in 4usize..=12,
        size in 1usize..=4,
    ) {
        let mut rng = rng_from_seed(seed);
        let mut coords: Vec<usize> = (0..n).collect();
        for i in 0..size {
            let j = rng.random_range(i..n);
            coords.swap(i, j);
        }
        coords.truncate(size);
        let d = CoordinateOracleSet::exact(n, &coords);
        let x = Point::random(n, &mut rng);
        let sample = influence_testing_sample(&x, &d, 16.0, &mut rng).unwrap();
        for (j, y) in sample.flipped.iter().enumerate() {
            for &c in &coords {
                prop_assert_eq!(y.get(c) != x.get(c), c == coords[j]);
            }
        }
    }
}

/// Fraction of η draws meeting the isolation margin for coordinate 0, and
/// the bound `p(1−p)^{64κ⁻⁶}` it must reach.
fn isolation_frequency(f: &TruthTable, kappa: f64, draws: usize, seed: u64) -> (f64, f64) {
    let n = f.dimension();
    let spec = wht(&f.to_reals()).unwrap();
    let alpha = kappa.powi(3) / 16.0;
    let p = kappa.powi(6) / 16.0;
    let f1 = spec.coefficient(1);
    let f0 = spec.coefficient(0);
    assert!(f1.abs() >= kappa);
    let margin = alpha / 4.0 * f1.abs().powi(3);
    let mut rng = rng_from_seed(seed);
    let mut hits = 0;
    for _ in 0..draws {
        let eta = sample_eta(kappa, n, &mut rng).unwrap();
        let has = inverse_wht(&hastad_spectrum(&spec, &eta).unwrap());
        let worst = has
            .iter()
            .enumerate()
            .map(|(x, h)| {
                let x1 = if x & 1 == 1 { -1.0 } else { 1.0 };
                (h - f0.powi(3) - alpha * f1.powi(3) * x1).abs()
            })
            .fold(0.0, f64::max);
        hits += (worst <= margin + 1e-12) as u32;
    }
    (hits as f64 / draws as f64, p * (1.0 - p).powf(64.0 * kappa.powi(-6)))
}

#[test]
fn isolation_margin_holds_often_enough() {
    let dict = tabulate(&Dictator::new(8, 0)).unwrap();
    let maj = tabulate(&Majority {
        n: 8,
        coords: vec![0, 1, 2],
    })
    .unwrap();
    for (f, kappa, draws) in [(&dict, 1.0, 1000), (&maj, 0.5, 20_000)] {
        let (freq, bound) = isolation_frequency(f, kappa, draws, 12);
        assert!(freq >= bound, "{freq} < {bound}");
    }
}

#[test]
fn enumerated_restriction_hits_reach_the_calibrated_bound() {
    let tables = [
        tabulate(&Dictator::new(3, 0)).unwrap(),
        tabulate(&Parity {
            n: 4,
            coords: vec![0, 1, 2, 3],
        })
        .unwrap(),
        tabulate(&Majority {
            n: 5,
            coords: vec![0, 1, 2, 3, 4],
        })
        .unwrap(),
    ];
    for t in &tables {
        let spec = wht(&t.to_reals()).unwrap();
        for k in 1..=4 {
            let tau = (k as f64 * spec.low_degree_influence(0, k).sqrt()).min(1.0);
            if tau == 0.0 {
                continue;
            }
            let p = exact_restriction_hit_probability(
                &spec,
                0,
                1.0 / k as f64,
                tau / (4.0 * k as f64),
                DEFAULT_WORK_CAP,
            )
            .unwrap();
            assert!(p >= (tau / k as f64).powi(4) - 1e-12, "k {k} p {p}");
        }
    }
}

#[test]
fn sampled_restrictions_hit_a_dictator_often_enough() {
    let (n, k, tau) = (16, 4, 1.0);
    let spec = wht(&tabulate(&Dictator::new(n, 0)).unwrap().to_reals()).unwrap();
    let mut rng = rng_from_seed(13);
    let draws = 1000;
    let hits = (0..draws)
        .filter(|_| {
            let rho = Restriction::sample(1.0 / k as f64, n, &mut rng).unwrap();
            spec.discrete_derivative(0, &rho.as_rho_point()).abs() >= tau / (4.0 * k as f64)
        })
        .count();
    assert!(hits as f64 / draws as f64 >= (tau / k as f64).powi(4));
}

fn coordinate_bits(points: &[u64], n: usize) -> Vec<Vec<u64>> {
    (0..n)
        .map(|i| {
            let mut bits = vec![0u64; points.len().div_ceil(64)];
            for (p, &x) in points.iter().enumerate() {
                if x >> i & 1 == 1 {
                    bits[p / 64] |= 1 << (p % 64);
                }
            }
            bits
        })
        .collect()
}

proptest! {
    #[test]
    fn exhaustive_buckets_give_the_projection_mass(
        bits in prop::collection::vec(any::<bool>(), 64),
        k in 0usize..=3,
    ) {
        let n = 6;
        let f = TruthTable::from_fn(n, |x| Sign::from_bit(bits[x as usize])).unwrap();
        let points: Vec<u64> = (0..1 << n).collect();
        let values: Vec<Sign> = points.iter().map(|&x| f.get(x)).collect();
        let oracle_bits = coordinate_bits(&points, n);
        let divisor = (1u64 << n) as f64 / (1u64 << k) as f64;
        let real = RealTable::from_truth_table(&f);
        for t in subsets(n, k) {
            let table = BucketTable::build(&values, &oracle_bits, &t, divisor);
            let exact = subset_correlation(&real, &t).unwrap();
            prop_assert!((table.correlation() - exact).abs() < 1e-9);
        }
    }
}

#[test]
fn poisson_buckets_are_unbiased() {
    let n = 6;
    let k = 2;
    let subset = [1, 3];
    let mut rng = rng_from_seed(14);
    let f = TruthTable::from_fn(n, |_| Sign::from_bit(rng.random::<bool>())).unwrap();
    let mut exact = vec![0.0; 1 << k];
    for x in 0..1u64 << n {
        let y = (x >> 1 & 1 | (x >> 3 & 1) << 1) as usize;
        exact[y] += f.get(x).value() / (1u64 << n) as f64 * (1 << k) as f64;
    }
    let target = 64.0;
    let reps = 4000;
    let poisson = Poisson::new(target).unwrap();
    let mut mean = vec![0.0; 1 << k];
    for _ in 0..reps {
        let m = poisson.sample(&mut rng) as usize;
        let points: Vec<u64> = (0..m).map(|_| rng.random_range(0..1u64 << n)).collect();
        let values: Vec<Sign> = points.iter().map(|&x| f.get(x)).collect();
        let table = BucketTable::build(&values, &coordinate_bits(&points, n), &subset, target / 4.0);
        for (acc, e) in mean.iter_mut().zip(table.estimates()) {
            *acc += e / reps as f64;
        }
    }
    // Each estimate has variance at most 2^k/target, so the mean of 4000 has
    // standard deviation below 0.004.
    for (m, e) in mean.iter().zip(&exact) {
        assert!((m - e).abs() < 0.02, "{mean:?} vs {exact:?}");
    }
}
