//! Request bodies and the computations behind each endpoint.
//!
//! Every handler is a pure function of the loaded stores and the request and
//! returns canonical JSON, so identical requests give identical bytes.

use std::collections::HashSet;
use std::fmt;

use embedlab_core::algebra::{self, reject};
use embedlab_core::bias::{build_bias_axis, debias_set, neighborhood_overlap};
use embedlab_core::canonical::to_canonical_json;
use embedlab_core::plotspec::{arrow_plot, component_plot, heatmap, scatter_projection};
use embedlab_core::retrieval::{distance_matrix, rank_excluding, Ranking};
use embedlab_core::transforms::{transform, Method, TransformResult};
use embedlab_core::{Embedding, EmbeddingSet, EmbeddingSource, Metric, VectorStore};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A client fault, reported as `{"error": message}` with status 400.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestError(pub String);

impl fmt::Display for RequestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RequestError {}

impl From<embedlab_core::Error> for RequestError {
    fn from(e: embedlab_core::Error) -> Self {
        RequestError(e.to_string())
    }
}

pub type Response = Result<String, RequestError>;

/// Labelled stores fixed for the life of the service.
#[derive(Debug, Default)]
pub struct Stores {
    by_label: IndexMap<String, VectorStore>,
}

impl Stores {
    pub fn new(stores: impl IntoIterator<Item = VectorStore>) -> Result<Self, RequestError> {
        let mut by_label = IndexMap::new();
        for store in stores {
            let label = store.label().to_string();
            if by_label.insert(label.clone(), store).is_some() {
                return Err(RequestError(format!("two stores share the label {label:?}")));
            }
        }
        if by_label.is_empty() {
            return Err(RequestError("at least one store is required".into()));
        }
        Ok(Stores { by_label })
    }

    /// The store with this label, or the first loaded store when none is named.
    pub fn get(&self, label: Option<&str>) -> Result<&VectorStore, RequestError> {
        match label {
            None => self
                .by_label
                .values()
                .next()
                .ok_or_else(|| RequestError("no stores are loaded".into())),
            Some(l) => self.by_label.get(l).ok_or_else(|| {
                let known: Vec<&str> = self.by_label.keys().map(String::as_str).collect();
                RequestError(format!("unknown store {l:?}; loaded: {}", known.join(", ")))
            }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &VectorStore> {
        self.by_label.values()
    }
}

fn default_n() -> usize {
    10
}

fn default_k() -> usize {
    2
}

fn default_limit() -> usize {
    50
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct VocabQuery {
    pub store: Option<String>,
    #[serde(default)]
    pub prefix: String,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct EvalRequest {
    pub store: Option<String>,
    pub expr: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SimilarParams {
    pub expr: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub exclude_inputs: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SimilarRequest {
    pub store: Option<String>,
    #[serde(flatten)]
    pub params: SimilarParams,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PlotParams {
    pub x_axis: String,
    pub y_axis: String,
    #[serde(default)]
    pub show_axis_point: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct DistanceParams {
    #[serde(default)]
    pub metric: Metric,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Pca,
    Mds,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TransformParams {
    pub method: MethodName,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Distance used by MDS.
    #[serde(default)]
    pub metric: Metric,
}

#[derive(Clone, Debug, Deserialize)]
pub struct OverlapParams {
    pub token: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub metric: Metric,
}

/// Items evaluated against a store; shared by every set-based request.
#[derive(Clone, Debug, Deserialize)]
pub struct ItemsRequest<P> {
    pub store: Option<String>,
    pub items: Vec<String>,
    #[serde(flatten)]
    pub params: P,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct NoParams {}

/// The request to answer in the debiased space.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Then {
    Similar(SimilarParams),
    Distance(DistanceParams),
    Plot(PlotParams),
    Arrows(NoParams),
    Transform(TransformParams),
    Overlap(OverlapParams),
}

#[derive(Clone, Debug, Deserialize)]
pub struct DebiasParams {
    pub pairs: Vec<(String, String)>,
    pub then: Then,
}

#[derive(Serialize)]
struct StoreInfo<'a> {
    label: &'a str,
    dim: usize,
    size: usize,
}

#[derive(Serialize)]
struct EvalResponse<'a> {
    name: &'a str,
    dim: usize,
    vector: &'a [f64],
}

#[derive(Serialize)]
struct NeighborOut<'a> {
    name: &'a str,
    distance: f64,
}

pub fn stores(stores: &Stores) -> String {
    let info: Vec<StoreInfo> = stores
        .iter()
        .map(|s| StoreInfo {
            label: s.label(),
            dim: s.dim(),
            size: s.len(),
        })
        .collect();
    to_canonical_json(&info)
}

pub fn vocab(stores: &Stores, q: &VocabQuery) -> Response {
    let store = stores.get(q.store.as_deref())?;
    let tokens: Vec<&str> = store
        .tokens()
        .filter(|t| t.starts_with(q.prefix.as_str()))
        .take(q.limit)
        .collect();
    Ok(to_canonical_json(&tokens))
}

pub fn eval(stores: &Stores, req: &EvalRequest) -> Response {
    let store = stores.get(req.store.as_deref())?;
    Ok(embedding_json(&algebra::eval_str(&req.expr, store)?))
}

/// `{name, dim, vector}` with the vector in full.
pub fn embedding_json(e: &Embedding) -> String {
    to_canonical_json(&EvalResponse {
        name: &e.name,
        dim: e.dim(),
        vector: e.vector.as_slice(),
    })
}

fn input_tokens(expr: &str) -> Result<HashSet<String>, RequestError> {
    Ok(algebra::parse(expr)?
        .tokens()
        .into_iter()
        .map(str::to_string)
        .collect())
}

fn rank<S: EmbeddingSource + ?Sized>(
    source: &S,
    query: &Embedding,
    p: &SimilarParams,
) -> Result<Ranking, RequestError> {
    let excluded = if p.exclude_inputs {
        input_tokens(&p.expr)?
    } else {
        HashSet::new()
    };
    let excluded: HashSet<&str> = excluded.iter().map(String::as_str).collect();
    Ok(rank_excluding(source, query, p.n, p.metric, &excluded)?)
}

/// `[{name, distance}]` in rank order.
pub fn neighbors_json(ranking: &Ranking) -> String {
    let out: Vec<NeighborOut> = ranking
        .neighbors
        .iter()
        .map(|n| NeighborOut {
            name: &n.embedding.name,
            distance: n.distance,
        })
        .collect();
    to_canonical_json(&out)
}

pub fn similar(stores: &Stores, req: &SimilarRequest) -> Response {
    let store = stores.get(req.store.as_deref())?;
    let query = algebra::eval_str(&req.params.expr, store)?;
    Ok(neighbors_json(&rank(store, &query, &req.params)?))
}

fn items_set(store: &VectorStore, items: &[String]) -> Result<EmbeddingSet, RequestError> {
    Ok(store.get_set(items)?)
}

fn plot_json(set: &EmbeddingSet, store: &VectorStore, p: &PlotParams) -> Response {
    let spec = scatter_projection(set, &p.x_axis, &p.y_axis, Some(store), p.show_axis_point)?;
    Ok(to_canonical_json(&spec))
}

fn arrows_json(set: &EmbeddingSet) -> Response {
    Ok(to_canonical_json(&arrow_plot(set)?))
}

fn distance_json(set: &EmbeddingSet, p: &DistanceParams) -> Response {
    Ok(to_canonical_json(&heatmap(&distance_matrix(set, p.metric)?)?))
}

fn transform_json(set: &EmbeddingSet, p: &TransformParams) -> Response {
    let method = match p.method {
        MethodName::Pca => Method::Pca,
        MethodName::Mds => Method::Mds(p.metric),
    };
    Ok(component_chart_json(&transform(set, method, p.k)?))
}

/// The component scatter of a transform, plus `explained_variance` for PCA.
pub fn component_chart_json(result: &TransformResult) -> String {
    let mut value = serde_json::to_value(component_plot(result)).expect("plot specs serialize");
    if let (Some(variance), Value::Object(map)) = (&result.explained_variance, &mut value) {
        map.insert("explained_variance".into(), serde_json::json!(variance));
    }
    to_canonical_json(&value)
}

pub fn plot(stores: &Stores, req: &ItemsRequest<PlotParams>) -> Response {
    let store = stores.get(req.store.as_deref())?;
    plot_json(&items_set(store, &req.items)?, store, &req.params)
}

pub fn arrows(stores: &Stores, req: &ItemsRequest<NoParams>) -> Response {
    let store = stores.get(req.store.as_deref())?;
    arrows_json(&items_set(store, &req.items)?)
}

pub fn distance(stores: &Stores, req: &ItemsRequest<DistanceParams>) -> Response {
    let store = stores.get(req.store.as_deref())?;
    distance_json(&items_set(store, &req.items)?, &req.params)
}

pub fn transform_items(stores: &Stores, req: &ItemsRequest<TransformParams>) -> Response {
    let store = stores.get(req.store.as_deref())?;
    transform_json(&items_set(store, &req.items)?, &req.params)
}

/// Debiases the items on the axis built from `pairs`, then answers the nested
/// request within the debiased items. Neighbor searches run over the
/// debiased items, not the whole store.
pub fn debias(stores: &Stores, req: &ItemsRequest<DebiasParams>) -> Response {
    let store = stores.get(req.store.as_deref())?;
    let set = items_set(store, &req.items)?;
    let axis = build_bias_axis(store, &req.params.pairs)?;
    let debiased = debias_set(&set, &axis)?;
    match &req.params.then {
        Then::Similar(p) => {
            let query = match debiased.get(&p.expr) {
                Some(member) => member.clone(),
                None => reject(&algebra::eval_str(&p.expr, store)?, &axis.axis)?,
            };
            Ok(neighbors_json(&rank(&debiased, &query, p)?))
        }
        Then::Distance(p) => distance_json(&debiased, p),
        Then::Plot(p) => plot_json(&debiased, store, p),
        Then::Arrows(_) => arrows_json(&debiased),
        Then::Transform(p) => transform_json(&debiased, p),
        Then::Overlap(p) => {
            let report = neighborhood_overlap(&set, &debiased, &p.token, p.n, p.metric)?;
            Ok(to_canonical_json(&report))
        }
    }
}
