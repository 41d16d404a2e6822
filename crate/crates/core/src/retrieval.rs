//! Distance metrics and brute-force nearest-neighbor retrieval.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecstore::{check_dim, dot, Embedding, EmbeddingSet, EmbeddingSource, VectorStore};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Cosine,
    Euclidean,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::Euclidean => "euclidean",
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            Metric::Cosine => cosine_distance(a, b),
            Metric::Euclidean => euclidean_distance(a, b),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric {other:?} (expected cosine or euclidean)"
            ))),
        }
    }
}

// sqrt(aa * bb) rather than sqrt(aa) * sqrt(bb): identical inputs then give
// exactly 1 and a distance of exactly 0.
fn cosine_from_parts(ab: f64, aa: f64, bb: f64) -> f64 {
    (1.0 - ab / (aa * bb).sqrt()).clamp(0.0, 2.0)
}

/// `1 - cos(a, b)`, in `[0, 2]`. Zero-norm inputs are an error.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let (aa, bb) = (dot(a, a), dot(b, b));
    if aa == 0.0 {
        return Err(Error::ZeroNorm("left operand".into()));
    }
    if bb == 0.0 {
        return Err(Error::ZeroNorm("right operand".into()));
    }
    Ok(cosine_from_parts(dot(a, b), aa, bb))
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredNeighbor {
    pub embedding: Embedding,
    pub distance: f64,
}

/// Neighbors in ascending distance order, plus how many zero-norm entries
/// were skipped under the cosine metric.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ranking {
    pub neighbors: Vec<ScoredNeighbor>,
    pub skipped_zero_norm: usize,
}

impl Ranking {
    pub fn names(&self) -> Vec<&str> {
        self.neighbors.iter().map(|n| n.embedding.name.as_str()).collect()
    }
}

/// The `n` entries of `source` closest to `query`. Ties keep source order.
/// The query itself is not excluded.
pub fn score_similar<S: EmbeddingSource + ?Sized>(
    source: &S,
    query: &Embedding,
    n: usize,
    metric: Metric,
) -> Result<Ranking> {
    rank_excluding(source, query, n, metric, &HashSet::new())
}

/// Like [`score_similar`] but never returns entries whose name is in `exclude`.
pub fn rank_excluding<S: EmbeddingSource + ?Sized>(
    source: &S,
    query: &Embedding,
    n: usize,
    metric: Metric,
    exclude: &HashSet<&str>,
) -> Result<Ranking> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if source.is_empty() {
        return Err(Error::Empty("cannot search an empty source".into()));
    }
    check_dim(source.dim(), query.dim())?;
    let q = query.vector.as_slice();
    let qq = dot(q, q);
    if metric == Metric::Cosine && qq == 0.0 {
        return Err(Error::ZeroNorm(query.name.clone()));
    }

    let mut skipped = 0;
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(source.len());
    for i in 0..source.len() {
        if !exclude.is_empty() && exclude.contains(source.name_at(i)) {
            continue;
        }
        let v = source.vector_at(i);
        let d = match metric {
            Metric::Cosine => {
                let vv = dot(v, v);
                if vv == 0.0 {
                    skipped += 1;
                    continue;
                }
                cosine_from_parts(dot(q, v), qq, vv)
            }
            Metric::Euclidean => euclidean_distance(q, v)?,
        };
        scored.push((d, i));
    }

    let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if scored.len() > n {
        scored.select_nth_unstable_by(n - 1, by_key);
        scored.truncate(n);
    }
    scored.sort_unstable_by(by_key);

    Ok(Ranking {
        neighbors: scored
            .into_iter()
            .map(|(distance, i)| ScoredNeighbor {
                embedding: source.embedding_at(i),
                distance,
            })
            .collect(),
        skipped_zero_norm: skipped,
    })
}

/// Ranks the store against `Σ positive − Σ negative`. With `exclude_inputs`
/// none of the input tokens can appear in the result.
pub fn analogy<S: AsRef<str>>(
    store: &VectorStore,
    positive: &[S],
    negative: &[S],
    n: usize,
    metric: Metric,
    exclude_inputs: bool,
) -> Result<Ranking> {
    if positive.is_empty() {
        return Err(Error::Empty("analogy needs at least one positive token".into()));
    }
    store.require(positive.iter().chain(negative).map(AsRef::as_ref))?;

    let mut query = vec![0.0; store.dim()];
    let mut name = String::new();
    for (i, t) in positive.iter().enumerate() {
        let v = store.vector(t.as_ref()).unwrap();
        query.iter_mut().zip(v).for_each(|(q, x)| *q += x);
        name = if i == 0 {
            t.as_ref().to_string()
        } else {
            format!("({name} + {})", t.as_ref())
        };
    }
    for t in negative {
        let v = store.vector(t.as_ref()).unwrap();
        query.iter_mut().zip(v).for_each(|(q, x)| *q -= x);
        name = format!("({name} - {})", t.as_ref());
    }
    let query = Embedding::new(name.clone(), query).with_derivation(name);

    let exclude: HashSet<&str> = if exclude_inputs {
        positive.iter().chain(negative).map(AsRef::as_ref).collect()
    } else {
        HashSet::new()
    };
    rank_excluding(store, &query, n, metric, &exclude)
}

/// Square matrix of pairwise distances, labelled in set order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub metric: Metric,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Checks shape, symmetry and the zero diagonal within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.labels.len();
        if self.values.len() != n || self.values.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "distance matrix must be {n}x{n} to match its labels"
            )));
        }
        for i in 0..n {
            if !(self.values[i][i].abs() <= tol) {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry {i} is {} (expected 0)",
                    self.values[i][i]
                )));
            }
            for j in 0..i {
                let (a, b) = (self.values[i][j], self.values[j][i]);
                if !a.is_finite() || !b.is_finite() || (a - b).abs() > tol || a < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "entries ({i},{j}) and ({j},{i}) are not a valid distance pair"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn distance_matrix(set: &EmbeddingSet, metric: Metric) -> Result<DistanceMatrix> {
    if set.is_empty() {
        return Err(Error::Empty("cannot build a distance matrix of an empty set".into()));
    }
    let members: Vec<&Embedding> = set.iter().collect();
    if metric == Metric::Cosine {
        if let Some(z) = members.iter().find(|e| e.vector.norm_squared() == 0.0) {
            return Err(Error::ZeroNorm(z.name.clone()));
        }
    }
    let n = members.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let d = metric.distance(members[i].vector.as_slice(), members[j].vector.as_slice())?;
            values[i][j] = d;
            values[j][i] = d;
        }
    }
    Ok(DistanceMatrix {
        labels: members.iter().map(|e| e.name.clone()).collect(),
        values,
        metric,
    })
}
