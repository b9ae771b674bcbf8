use num_traits::{One, Zero};
use partdist_core::combinatorics::{
    count_confusion_matrices, enumerate_confusion_matrices, first_rows, folded_binomial_pmf, random_composition,
    sample_confusion_matrix, EnumerationCursor, SamplerConfig,
};
use partdist_core::extremes::{max_med, max_rd, nmed, nrd};
use partdist_core::{
    ard, brute_force_med, crosstab, expected_rd, hamming_empirical, med, pair_counts, population_dh, population_dm,
    rand_distance, solve_lsap, BigRational, ConfusionMatrix, CostMatrix, Labeling, MassMatrix, Rational,
};
use proptest::prelude::*;
use std::collections::HashSet;

fn canonical(max_dim: usize, max_cell: u64) -> impl Strategy<Value = ConfusionMatrix> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(move |(r, s)| (Just(r), Just(s), prop::collection::vec(0..=max_cell, r * s)))
        .prop_filter_map("margins must be positive", |(r, s, counts)| {
            ConfusionMatrix::new(r, s, counts).ok().filter(|m| m.is_canonical() && m.total() >= 2)
        })
}

fn permutation(len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<_>>()).prop_shuffle()
}

fn permuted(m: ConfusionMatrix) -> impl Strategy<Value = (ConfusionMatrix, ConfusionMatrix)> {
    let (r, s) = (m.rows(), m.cols());
    (permutation(r), permutation(s)).prop_map(move |(p, q)| (m.clone(), m.permuted(&p, &q)))
}

fn labels(n: usize, k: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..k, n)
}

proptest! {
    #[test]
    fn criteria_ignore_label_permutations((m, p) in canonical(5, 6).prop_flat_map(permuted)) {
        prop_assert_eq!(med(&m).unwrap().value, med(&p).unwrap().value);
        prop_assert_eq!(rand_distance(&m).unwrap(), rand_distance(&p).unwrap());
        prop_assert_eq!(ard(&m).ok(), ard(&p).ok());
    }

    #[test]
    fn criteria_are_symmetric(m in canonical(5, 6)) {
        let t = m.transpose();
        prop_assert_eq!(med(&m).unwrap().value, med(&t).unwrap().value);
        prop_assert_eq!(rand_distance(&m).unwrap(), rand_distance(&t).unwrap());
        prop_assert_eq!(ard(&m).ok(), ard(&t).ok());
        prop_assert_eq!(nmed(&m).ok(), nmed(&t).ok());
        prop_assert_eq!(nrd(&m).ok(), nrd(&t).ok());
    }

    #[test]
    fn exact_identities(m in canonical(5, 8)) {
        let n = m.total() as i128;
        let p = pair_counts(&m).unwrap();
        prop_assert_eq!(p.a + p.b + p.c + p.d, (m.total() * (m.total() - 1)) / 2);
        let rd = rand_distance(&m).unwrap();
        prop_assert_eq!(rd, hamming_empirical(&m).unwrap() * Rational::new(n, n - 1));
        if let Ok(value) = ard(&m) {
            prop_assert_eq!(value, rd / expected_rd(&m).unwrap());
        }
        let med_value = med(&m).unwrap().value;
        prop_assert!(med_value >= Rational::zero());
        prop_assert!(med_value <= max_med(m.rows(), m.cols(), m.total()).unwrap());
        if let Ok(bound) = max_rd(m.rows(), m.cols(), m.total()) {
            prop_assert!(rd <= bound);
        }
    }

    #[test]
    fn lsap_matches_brute_force(m in canonical(6, 9)) {
        let assignment = med(&m).unwrap();
        prop_assert_eq!(assignment.value, brute_force_med(&m).unwrap());
        prop_assert!(assignment.assignment.is_certified(&CostMatrix::from_confusion(&m)));
    }

    #[test]
    fn lsap_certificate_on_arbitrary_costs(size in 1usize..7, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = SamplerConfig::new(seed).rng();
        let costs: Vec<i64> = (0..size * size).map(|_| rng.random_range(-50i64..50)).collect();
        let matrix = CostMatrix::new(size, costs).unwrap();
        let assignment = solve_lsap(&matrix);
        prop_assert!(assignment.is_certified(&matrix));
        let mut seen: Vec<usize> = assignment.permutation.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..size).collect::<Vec<_>>());
    }

    #[test]
    fn padding_does_not_change_med(m in canonical(4, 6)) {
        let mut rows = m.to_rows();
        for row in &mut rows {
            row.push(0);
        }
        let padded = ConfusionMatrix::from_rows(&rows).unwrap();
        prop_assert_eq!(med(&m).unwrap().value, med(&padded).unwrap().value);
    }

    #[test]
    fn triangle_inequality(x in labels(24, 4), y in labels(24, 4), z in labels(24, 4)) {
        let l = |v: &Vec<u32>| Labeling::new(v.iter().copied()).unwrap();
        let (lx, ly, lz) = (l(&x), l(&y), l(&z));
        let d = |a: &Labeling<u32>, b: &Labeling<u32>| -> (Rational, Rational) {
            let m = crosstab(a, b).unwrap();
            (med(&m).unwrap().value, rand_distance(&m).unwrap())
        };
        let (xy, yz, xz) = (d(&lx, &ly), d(&ly, &lz), d(&lx, &lz));
        prop_assert!(xz.0 <= xy.0 + yz.0);
        prop_assert!(xz.1 <= xy.1 + yz.1);
    }

    #[test]
    fn plug_in_equals_empirical(m in canonical(4, 6)) {
        let mass = MassMatrix::empirical(&m).unwrap();
        prop_assert_eq!(population_dm(&mass).unwrap(), med(&m).unwrap().value);
        prop_assert_eq!(population_dh(&mass).unwrap(), hamming_empirical(&m).unwrap());
    }

    #[test]
    fn compositions_conserve_mass(n in 0u64..60, k in 1usize..12, seed in any::<u64>()) {
        let parts = random_composition(n, k, &mut SamplerConfig::new(seed).rng());
        prop_assert_eq!(parts.len(), k);
        prop_assert_eq!(parts.iter().sum::<u64>(), n);
    }

    #[test]
    fn folded_pmf_is_a_distribution(n in 1u64..200) {
        let total = folded_binomial_pmf(n).unwrap().into_iter().fold(BigRational::zero(), |a, p| a + p);
        prop_assert_eq!(total, BigRational::one());
    }
}

#[test]
fn enumeration_is_complete_and_distinct() {
    for (r, s, n) in [(1, 1, 5), (1, 3, 6), (2, 2, 9), (2, 3, 8), (3, 2, 7), (3, 3, 7), (2, 4, 7), (4, 4, 5)] {
        let all = enumerate_confusion_matrices(r, s, n, u64::MAX).unwrap().collect::<Vec<_>>();
        let expected: u64 = count_confusion_matrices(r, s, n).try_into().unwrap();
        assert_eq!(all.len() as u64, expected, "({r},{s},{n})");
        assert!(all.iter().all(|m| m.is_canonical() && m.total() == n));
        assert!(all.windows(2).all(|w| w[0].counts() < w[1].counts()));
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());

        let pieces: Vec<ConfusionMatrix> = first_rows(r, s, n)
            .iter()
            .flat_map(|row| EnumerationCursor::with_first_row(r, s, n, row))
            .collect();
        assert_eq!(pieces, all);
    }
}

#[test]
fn sampler_is_uniform_on_small_set() {
    let all = enumerate_confusion_matrices(2, 2, 6, u64::MAX).unwrap().collect::<Vec<_>>();
    assert_eq!(all.len(), 60);
    let index: std::collections::HashMap<_, _> = all.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let draws = 60_000;
    let mut counts = vec![0u64; all.len()];
    let mut rng = SamplerConfig::new(11).rng();
    for _ in 0..draws {
        let (m, _) = sample_confusion_matrix(2, 2, 6, &mut rng).unwrap();
        counts[index[&m]] += 1;
    }
    let expected = draws as f64 / all.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 59 degrees of freedom; 99.9% quantile is about 98.3
    assert!(chi2 < 98.3, "chi-square {chi2}");
}

#[test]
fn sampler_is_deterministic() {
    let draw = |cfg: SamplerConfig| {
        let mut rng = cfg.rng();
        (0..50).map(|_| sample_confusion_matrix(3, 3, 20, &mut rng).unwrap().0).collect::<Vec<_>>()
    };
    assert_eq!(draw(SamplerConfig::with_stream(42, 3)), draw(SamplerConfig::with_stream(42, 3)));
    assert_ne!(draw(SamplerConfig::with_stream(42, 3)), draw(SamplerConfig::with_stream(42, 4)));
}

#[test]
fn maximal_cells_in_small_sets() {
    for (r, s, n) in [(2, 2, 8), (2, 3, 9), (3, 3, 8)] {
        let all = enumerate_confusion_matrices(r, s, n, u64::MAX).unwrap().collect::<Vec<_>>();
        let best_med = all.iter().map(|m| med(m).unwrap().value).max().unwrap();
        assert_eq!(best_med, max_med(r, s, n).unwrap(), "({r},{s},{n})");
        let best_rd = all.iter().map(|m| rand_distance(m).unwrap()).max().unwrap();
        assert_eq!(best_rd, max_rd(r, s, n).unwrap(), "({r},{s},{n})");
    }
}
