//! PCA checked against an independent covariance eigendecomposition.

use embedlab_core::transforms::pca_transform;
use embedlab_core::{Embedding, EmbeddingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[path = "support/covariance.rs"]
mod covariance;

use covariance::{jacobi_eigen, oracle};

fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect()
}

fn to_set(rows: &[Vec<f64>]) -> EmbeddingSet {
    EmbeddingSet::from_embeddings(
        rows[0].len(),
        rows.iter()
            .enumerate()
            .map(|(i, r)| Embedding::new(format!("w{i}"), r.clone())),
    )
    .unwrap()
}

#[test]
fn jacobi_recovers_a_known_spectrum() {
    let (values, vectors) = jacobi_eigen(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    assert!((values[0] - 3.0).abs() < 1e-14 && (values[1] - 1.0).abs() < 1e-14);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((vectors[0][0].abs() - h).abs() < 1e-14 && (vectors[0][1].abs() - h).abs() < 1e-14);
}

#[test]
fn pca_matches_the_covariance_oracle_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for case in 0..100 {
        let n = rng.random_range(3..=20);
        let d = rng.random_range(2..=10);
        let rank = (n - 1).min(d);
        let k = rng.random_range(1..=rank);
        let rows = random_rows(&mut rng, n, d);
        let set = to_set(&rows);

        let got = pca_transform(&set, k).unwrap();
        let want = oracle(&rows, k);

        let variance = got.explained_variance.as_ref().unwrap();
        for (g, w) in variance.iter().zip(&want.variance) {
            assert!((g - w).abs() <= 1e-8 * w.abs().max(1.0), "case {case}: {g} vs {w}");
        }
        assert!(variance.windows(2).all(|w| w[0] >= w[1]), "case {case}");

        for (member, want_row) in got.members().zip(&want.coords) {
            for (g, w) in member.vector.as_slice().iter().zip(want_row) {
                assert!((g - w).abs() <= 1e-8, "case {case} {}: {g} vs {w}", member.name);
            }
        }

        for c in 0..k {
            let mean = got.members().map(|m| m.vector.as_slice()[c]).sum::<f64>() / n as f64;
            assert!(mean.abs() <= 1e-9, "case {case}: component {c} mean {mean}");
        }

        let dirs = got.directions.as_ref().unwrap();
        for (i, a) in dirs.iter().enumerate() {
            for (j, b) in dirs.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() <= 1e-9, "case {case}: <d{i}, d{j}> = {dot}");
            }
        }

        let full = pca_transform(&set, rank).unwrap();
        let sum: f64 = full.explained_variance.unwrap().iter().sum();
        assert!((sum - want.total_variance).abs() <= 1e-9 * want.total_variance.max(1.0), "case {case}");
    }
}

#[test]
fn toy_points_match_the_oracle() {
    let rows = vec![
        vec![0.5, 0.1],
        vec![0.5, 0.6],
        vec![0.7, 0.33],
        vec![0.7, 0.9],
    ];
    let got = pca_transform(&to_set(&rows), 2).unwrap();
    let want = oracle(&rows, 2);
    for (member, want_row) in got.members().zip(&want.coords) {
        for (g, w) in member.vector.as_slice().iter().zip(want_row) {
            assert!((g - w).abs() <= 1e-8, "{}: {g} vs {w}", member.name);
        }
    }
}
