//! Cross-module properties over random inputs.

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use klsm::arith::{gcd, kronecker};
use klsm::exactsum::ExactExponentialSum;
use klsm::hecke::{dirichlet_convolve, dirichlet_inverse};
use klsm::kloosterman::cache::{decode, encode};
use klsm::kloosterman::oracle::{classical_sum_brute, dedekind_sum_direct, BruteTable};
use klsm::kloosterman::partial::{partial_sum_cached, partial_sum_with, CheckpointGrid, SumOptions};
use klsm::kloosterman::{classical_sum, eta_conj_sum, eta_sum, weil_ratio, SumKind};
use klsm::multiplier::{cocycle_defect, random_matrix, MultiplierSystem};
use klsm::rademacher::{dedekind_sum, partition_rademacher, partition_table};
use klsm::special::{transform_hat_with, HatForm, TestFunctionParams};

fn q(n: i64) -> num_rational::BigRational {
    num_rational::BigRational::from_integer(n.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eta_sum_matches_enumeration(m in -10_000i64..=10_000, n in -10_000i64..=10_000, c in 1u64..=60) {
        prop_assert!(eta_sum(m, n, c).exact_eq(&BruteTable::new(c).eta_sum(m, n)));
    }

    #[test]
    fn eta_sum_periodic_in_both_indices(m in -500i64..=500, n in -500i64..=500, c in 1u64..=80) {
        let s = eta_sum(m, n, c);
        prop_assert!(s.exact_eq(&eta_sum(m + c as i64, n, c)));
        prop_assert!(s.exact_eq(&eta_sum(m, n - c as i64, c)));
    }

    #[test]
    fn conjugation_identity(m in -10_000i64..=10_000, n in -10_000i64..=10_000, c in 1u64..=150) {
        prop_assert!(eta_sum(m, n, c).conjugate().exact_eq(&eta_conj_sum(1 - m, 1 - n, c)));
    }

    #[test]
    fn classical_symmetry_and_oracle(m in -300i64..=300, n in -300i64..=300, c in 1u64..=120, a in 1i64..50) {
        let s = classical_sum(m, n, c);
        prop_assert!(s.exact_eq(&classical_sum_brute(m, n, c)));
        prop_assert!(s.exact_eq(&classical_sum(n, m, c)));
        if gcd(a, c as i64) == 1 {
            prop_assert!(classical_sum(a * m, n, c).exact_eq(&classical_sum(m, a * n, c)));
        }
        prop_assert!(s.evaluate().im.abs() < 1e-9);
    }

    #[test]
    fn weil_ratios_at_most_one(m in -10_000i64..=10_000, n in -10_000i64..=10_000, c in 1u64..=700) {
        prop_assert!(weil_ratio(m, n, c, SumKind::Classical).unwrap() <= 1.0 + 1e-12);
        prop_assert!(weil_ratio(m, n, c, SumKind::Eta).unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn cocycle_defect_small(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g1, g2) = (random_matrix(&mut rng, 1000, 1), random_matrix(&mut rng, 1000, 1));
        prop_assert!(cocycle_defect(&MultiplierSystem::eta(), &g1, &g2, Complex64::new(0.3, 1.1)).unwrap() < 1e-10);
        let (g1, g2) = (random_matrix(&mut rng, 1000, 4), random_matrix(&mut rng, 1000, 4));
        prop_assert!(cocycle_defect(&MultiplierSystem::theta(), &g1, &g2, Complex64::new(-0.4, 0.7)).unwrap() < 1e-10);
    }

    #[test]
    fn dedekind_reciprocity_and_oracle(c in 1i64..2000, d in 1i64..2000) {
        prop_assume!(gcd(c, d) == 1);
        let s_dc = dedekind_sum(d, c).unwrap();
        let s_cd = dedekind_sum(c, d).unwrap();
        let (c128, d128) = (c as i128, d as i128);
        let rhs = Ratio::new(c128 * c128 + d128 * d128 + 1, 12 * c128 * d128) - Ratio::new(1, 4);
        prop_assert_eq!(s_dc + s_cd, rhs);
        if c <= 300 {
            let direct = dedekind_sum_direct(d, c);
            prop_assert_eq!(s_dc, Ratio::new(*direct.numer() as i128, *direct.denom() as i128));
        }
    }

    #[test]
    fn kronecker_periodic_in_top(a in -500i64..500, n in 1i64..200) {
        // (a/n) has period 4n in a for every n ≥ 1
        prop_assert_eq!(kronecker(a, n), kronecker(a + 4 * n, n));
    }

    #[test]
    fn dirichlet_inverse_is_two_sided(vals in proptest::collection::vec(-9i64..=9, 1..120)) {
        let mut f: Vec<_> = vals.iter().map(|&v| q(v)).collect();
        f[0] = q(1);
        let g = dirichlet_inverse(&f).unwrap();
        let fg = dirichlet_convolve(&f, &g);
        prop_assert!(fg[0].is_one() && fg[1..].iter().all(Zero::is_zero));
        prop_assert_eq!(dirichlet_convolve(&g, &f), fg);
    }

    #[test]
    fn cache_image_round_trip(m in any::<i64>(), n in any::<i64>(), bits in proptest::collection::vec(any::<(u64, u64)>(), 0..50)) {
        let vals: Vec<Complex64> = bits.iter().map(|&(a, b)| Complex64::new(f64::from_bits(a), f64::from_bits(b))).collect();
        let img = encode(m, n, SumKind::Eta, &vals);
        let (h, back) = decode(&img).unwrap();
        prop_assert_eq!((h.m, h.n, h.kind), (m, n, SumKind::Eta));
        prop_assert_eq!(back.len(), vals.len());
        for (x, y) in back.iter().zip(&vals) {
            prop_assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
        }
    }

    #[test]
    fn exact_sum_value_is_conjugation_equivariant(q in 1u64..200, ks in proptest::collection::vec(-1000i64..1000, 0..40)) {
        let s = ExactExponentialSum::from_exponents(q, ks);
        let a = s.evaluate().conj();
        let b = s.conjugate().evaluate();
        prop_assert!((a - b).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hat_and_con_forms_agree(r in 0.5f64..40.0, a in 2.0f64..100.0) {
        let p = TestFunctionParams::new(a, 10.0, 3.0).unwrap();
        let x = transform_hat_with(&p, r, HatForm::Hat).unwrap().value;
        let y = transform_hat_with(&p, r, HatForm::Con).unwrap().value;
        prop_assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()), "r={} a={}: {} vs {}", r, a, x, y);
    }

    #[test]
    fn thread_count_does_not_change_bits(m in -50i64..50, n in -50i64..50, x in 1100.0f64..3000.0) {
        let grid = CheckpointGrid::LogSpaced { x_min: 10.0, count: 7 };
        let one = partial_sum_with(m, n, x, &grid, &SumOptions { threads: Some(1), ..SumOptions::default() });
        let four = partial_sum_with(m, n, x, &grid, &SumOptions { threads: Some(4), ..SumOptions::default() });
        prop_assert_eq!(one.checkpoint_bytes(), four.checkpoint_bytes());
    }
}

#[test]
fn cached_and_recomputed_series_agree() {
    let dir = tempfile::tempdir().unwrap();
    let grid = CheckpointGrid::Dyadic;
    let opts = SumOptions::default();
    let direct = partial_sum_with(3, -2, 2500.0, &grid, &opts);
    // grow the cache in two steps, then read it back
    partial_sum_cached(3, -2, 700.0, &grid, &opts, dir.path()).unwrap();
    let extended = partial_sum_cached(3, -2, 2500.0, &grid, &opts, dir.path()).unwrap();
    let hit = partial_sum_cached(3, -2, 2500.0, &grid, &opts, dir.path()).unwrap();
    assert_eq!(direct.checkpoint_bytes(), extended.checkpoint_bytes());
    assert_eq!(direct.checkpoint_bytes(), hit.checkpoint_bytes());
    let shorter = partial_sum_cached(3, -2, 1000.0, &grid, &opts, dir.path()).unwrap();
    assert_eq!(shorter.last_value(), partial_sum_with(3, -2, 1000.0, &grid, &opts).last_value());
}

#[test]
fn rademacher_small_n_against_table() {
    let table = partition_table(120);
    for n in 1..=120usize {
        let r = partition_rademacher(n, 3 + (3.0 * (n as f64).sqrt()) as u64).unwrap();
        assert_eq!(r.exact, table[n], "n={n}");
        assert!(r.rounds_correctly(), "n={n}: {}", r.estimate);
    }
}
