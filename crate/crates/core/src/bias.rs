//! Bias directions from word pairs, projection-removal debiasing, and
//! neighborhood overlap as a residual-bias check.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{average, combine, reject, BinaryOp};
use crate::error::{Error, Result};
use crate::retrieval::{score_similar, Metric};
use crate::vecstore::{Embedding, EmbeddingSet, EmbeddingSource, VectorStore};

/// Mean of the `first - second` differences over a list of token pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasAxis {
    pub axis: Embedding,
    pub source_pairs: Vec<(String, String)>,
}

pub fn pair_difference_set<S: AsRef<str>>(
    store: &VectorStore,
    pairs: &[(S, S)],
) -> Result<EmbeddingSet> {
    store.require(pairs.iter().flat_map(|(a, b)| [a.as_ref(), b.as_ref()]))?;
    let mut set = EmbeddingSet::new(store.dim());
    for (a, b) in pairs {
        set.push(combine(
            &store.lookup(a.as_ref())?,
            BinaryOp::Sub,
            &store.lookup(b.as_ref())?,
        )?)?;
    }
    Ok(set)
}

pub fn build_bias_axis<S: AsRef<str>>(store: &VectorStore, pairs: &[(S, S)]) -> Result<BiasAxis> {
    if pairs.is_empty() {
        return Err(Error::Empty("a bias axis needs at least one pair".into()));
    }
    store.require(pairs.iter().flat_map(|(a, b)| [a.as_ref(), b.as_ref()]))?;
    // members are keyed by position so repeated pairs are kept
    let mut diffs = EmbeddingSet::new(store.dim());
    for (i, (a, b)) in pairs.iter().enumerate() {
        let d = store.lookup(a.as_ref())?.vector.sub(&store.lookup(b.as_ref())?.vector);
        diffs.push(Embedding::new(i.to_string(), d))?;
    }
    let mean = average(&diffs)?;
    let name = format!("bias_axis({} pairs)", pairs.len());
    if mean.vector.norm_squared() == 0.0 {
        return Err(Error::ZeroAxis(name));
    }
    let derivation = match pairs {
        [(a, b)] => Some(format!("({} - {})", a.as_ref(), b.as_ref())),
        _ => None,
    };
    Ok(BiasAxis {
        axis: Embedding {
            name,
            vector: mean.vector,
            derivation,
        },
        source_pairs: pairs
            .iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect(),
    })
}

/// Rejects every member on the axis. Members keep their names so they can
/// still be looked up by token; the derivation records the rejection when
/// the axis is expressible in the grammar.
pub fn debias_set(set: &EmbeddingSet, axis: &BiasAxis) -> Result<EmbeddingSet> {
    let mut out = EmbeddingSet::new(set.dim());
    for member in set {
        let rejected = reject(member, &axis.axis)?;
        out.push(Embedding {
            name: member.name.clone(),
            vector: rejected.vector,
            derivation: rejected.derivation,
        })?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub token: String,
    pub before: Vec<String>,
    pub after: Vec<String>,
    pub jaccard: f64,
}

/// Jaccard overlap of the top-`n` neighbors of `token` in two spaces. The
/// query itself counts as a neighbor.
pub fn neighborhood_overlap<B, A>(
    before: &B,
    after: &A,
    token: &str,
    n: usize,
    metric: Metric,
) -> Result<OverlapReport>
where
    B: EmbeddingSource + ?Sized,
    A: EmbeddingSource + ?Sized,
{
    let before_list = top_names(before, token, n, metric)?;
    let after_list = top_names(after, token, n, metric)?;
    Ok(OverlapReport {
        token: token.to_string(),
        jaccard: jaccard(&before_list, &after_list),
        before: before_list,
        after: after_list,
    })
}

fn top_names<S: EmbeddingSource + ?Sized>(
    space: &S,
    token: &str,
    n: usize,
    metric: Metric,
) -> Result<Vec<String>> {
    let query = space
        .get(token)
        .ok_or_else(|| Error::OutOfVocabulary(vec![token.to_string()]))?;
    Ok(score_similar(space, &query, n, metric)?
        .neighbors
        .into_iter()
        .map(|s| s.embedding.name)
        .collect())
}

pub fn jaccard<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let a: BTreeSet<&str> = a.iter().map(AsRef::as_ref).collect();
    let b: BTreeSet<&str> = b.iter().map(AsRef::as_ref).collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}
