//! Dimensionality reduction of embedding sets.
//!
//! Both transforms return the members re-expressed in component coordinates,
//! followed by one basis-vector pseudo-embedding per component (`pca_0`,
//! `mds_1`, ...). The pseudo-embeddings let a component serve as a plot axis.
//!
//! Eigenvectors are only defined up to sign. Every direction is flipped so
//! that its largest-magnitude entry is positive (first index wins on ties).

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::retrieval::{distance_matrix, Metric};
use crate::vecstore::{Embedding, EmbeddingSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Pca,
    Mds(Metric),
}

impl Method {
    pub fn prefix(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Mds(_) => "mds",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    /// Members in component coordinates, then the `k` axis pseudo-embeddings.
    pub reduced: EmbeddingSet,
    /// Variance captured by each component, descending. PCA only.
    pub explained_variance: Option<Vec<f64>>,
    /// Unit principal directions in the input space. PCA only.
    pub directions: Option<Vec<Vec<f64>>>,
    /// Number of leading entries of `reduced` that are input members.
    pub member_count: usize,
}

impl TransformResult {
    pub fn members(&self) -> impl Iterator<Item = &Embedding> {
        self.reduced.iter().take(self.member_count)
    }

    pub fn axes(&self) -> impl Iterator<Item = &Embedding> {
        self.reduced.iter().skip(self.member_count)
    }
}

pub fn transform(set: &EmbeddingSet, method: Method, k: usize) -> Result<TransformResult> {
    match method {
        Method::Pca => pca_transform(set, k),
        Method::Mds(metric) => mds_transform(set, k, metric),
    }
}

pub(crate) fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn assemble(
    set: &EmbeddingSet,
    prefix: &str,
    coords: &[Vec<f64>],
    k: usize,
) -> Result<EmbeddingSet> {
    let mut reduced = EmbeddingSet::new(k);
    for (member, row) in set.iter().zip(coords) {
        reduced.push(Embedding::new(member.name.clone(), row.clone()))?;
    }
    for i in 0..k {
        let mut basis = vec![0.0; k];
        basis[i] = 1.0;
        reduced.push(Embedding::new(format!("{prefix}_{i}"), basis))?;
    }
    Ok(reduced)
}

/// Centers the members on their mean and projects them onto the top `k`
/// principal directions. Never whitens.
pub fn pca_transform(set: &EmbeddingSet, k: usize) -> Result<TransformResult> {
    let n = set.len();
    let dim = set.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "PCA needs at least 2 members, got {n}"
        )));
    }
    if k == 0 || k > n.min(dim) {
        return Err(Error::InvalidArgument(format!(
            "k must be between 1 and {} for {n} members of dimension {dim}, got {k}",
            n.min(dim)
        )));
    }

    let mut mean = vec![0.0; dim];
    for e in set {
        mean.iter_mut()
            .zip(e.vector.as_slice())
            .for_each(|(m, x)| *m += x);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let rows: Vec<&[f64]> = set.iter().map(|e| e.vector.as_slice()).collect();
    let centered = DMatrix::from_fn(n, dim, |i, j| rows[i][j] - mean[j]);

    let svd = SVD::new(centered.clone(), false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));

    let s_max = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let tol = s_max * (n.max(dim) as f64) * f64::EPSILON;
    let rank = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > tol && s_max > 0.0)
        .count();
    if k > rank {
        return Err(Error::Rank { requested: k, rank });
    }

    let mut directions = Vec::with_capacity(k);
    let mut variance = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let mut dir: Vec<f64> = v_t.row(c).iter().copied().collect();
        normalize_sign(&mut dir);
        let s = svd.singular_values[c];
        variance.push(s * s / (n as f64 - 1.0));
        directions.push(dir);
    }

    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            directions
                .iter()
                .map(|d| (0..dim).map(|j| centered[(i, j)] * d[j]).sum())
                .collect()
        })
        .collect();

    Ok(TransformResult {
        reduced: assemble(set, "pca", &coords, k)?,
        explained_variance: Some(variance),
        directions: Some(directions),
        member_count: n,
    })
}

/// Classical (Torgerson) multidimensional scaling on the metric's pairwise
/// distances: double-center the squared distances, keep the top `k`
/// eigenpairs, and scale each eigenvector by the root of its eigenvalue.
pub fn mds_transform(set: &EmbeddingSet, k: usize, metric: Metric) -> Result<TransformResult> {
    let n = set.len();
    if k == 0 || n < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "MDS with k={k} needs at least {} members, got {n}",
            k.max(1) + 1
        )));
    }
    let d = distance_matrix(set, metric)?;
    let sq = DMatrix::from_fn(n, n, |i, j| d.values[i][j] * d.values[i][j]);
    let row_mean: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + grand);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }

    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = scale * n as f64 * f64::EPSILON;
    let rank = order.iter().take_while(|&&i| eig.eigenvalues[i] > tol).count();
    if k > rank {
        return Err(Error::Rank { requested: k, rank });
    }

    let mut columns = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        normalize_sign(&mut v);
        let root = eig.eigenvalues[c].sqrt();
        columns.push(v.into_iter().map(|x| x * root).collect::<Vec<_>>());
    }
    let coords: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();

    Ok(TransformResult {
        reduced: assemble(set, "mds", &coords, k)?,
        explained_variance: None,
        directions: None,
        member_count: n,
    })
}
