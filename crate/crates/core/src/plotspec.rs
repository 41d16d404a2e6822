//! Renderer-independent chart descriptions.
//!
//! A [`PlotSpec`] is either a scatter of axis projections or an arrow plot of
//! 2-d vectors. A [`HeatmapSpec`] carries a pairwise distance matrix. Both
//! serialize to a small fixed JSON schema via [`emit_json`].

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{eval_str, projection_coefficient};
use crate::canonical::to_canonical_json;
use crate::error::{Error, Result};
use crate::retrieval::DistanceMatrix;
use crate::transforms::TransformResult;
use crate::vecstore::{Embedding, EmbeddingSet, VectorStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Scatter,
    Arrows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub name: String,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub points: Vec<Point>,
    pub x_label: String,
    pub y_label: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeatmapKind {
    #[default]
    Heatmap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSpec {
    pub kind: HeatmapKind,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub metric: String,
}

/// Any chart the renderers accept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Chart {
    Plot(PlotSpec),
    Heatmap(HeatmapSpec),
}

impl From<PlotSpec> for Chart {
    fn from(p: PlotSpec) -> Self {
        Chart::Plot(p)
    }
}

impl From<HeatmapSpec> for Chart {
    fn from(h: HeatmapSpec) -> Self {
        Chart::Heatmap(h)
    }
}

/// An axis given as text names a set member when one has exactly that name
/// (so transform axes like `pca_0` work); otherwise it is an expression
/// evaluated against the store.
pub fn resolve_axis(expr: &str, set: &EmbeddingSet, store: Option<&VectorStore>) -> Result<Embedding> {
    if let Some(member) = set.get(expr) {
        return Ok(member.clone());
    }
    match store {
        Some(store) => eval_str(expr, store),
        None => Err(Error::OutOfVocabulary(vec![expr.to_string()])),
    }
}

/// Scatter of each member's projection coefficients on the two axes.
pub fn scatter_projection(
    set: &EmbeddingSet,
    x_axis: &str,
    y_axis: &str,
    store: Option<&VectorStore>,
    show_axis_point: bool,
) -> Result<PlotSpec> {
    let x = resolve_axis(x_axis, set, store)?;
    let y = resolve_axis(y_axis, set, store)?;
    scatter_on_axes(set, &x, &y, show_axis_point)
}

pub fn scatter_on_axes(
    set: &EmbeddingSet,
    x: &Embedding,
    y: &Embedding,
    show_axis_point: bool,
) -> Result<PlotSpec> {
    let coords = |e: &Embedding| -> Result<(f64, f64)> {
        Ok((
            projection_coefficient(e, x)?.value(),
            projection_coefficient(e, y)?.value(),
        ))
    };
    // zero axes fail here even for an empty set
    coords(x)?;

    let mut points = Vec::with_capacity(set.len() + 2);
    let mut seen = HashSet::new();
    for member in set {
        let (px, py) = coords(member)?;
        seen.insert(member.name.clone());
        points.push(Point {
            name: member.name.clone(),
            x: px,
            y: py,
            group: None,
        });
    }
    if show_axis_point {
        for axis in [x, y] {
            let name = axis.display_name().to_string();
            if seen.insert(name.clone()) {
                let (px, py) = coords(axis)?;
                points.push(Point {
                    name,
                    x: px,
                    y: py,
                    group: Some("axis".into()),
                });
            }
        }
    }
    Ok(PlotSpec {
        kind: PlotKind::Scatter,
        points,
        x_label: x.display_name().to_string(),
        y_label: y.display_name().to_string(),
    })
}

/// Arrow tips of 2-d embeddings, labelled with their derivations.
pub fn arrow_plot(set: &EmbeddingSet) -> Result<PlotSpec> {
    if set.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "arrow plots need 2-dimensional embeddings, got {}; apply a pca or mds transform with k=2 first",
            set.dim()
        )));
    }
    let mut seen = HashSet::new();
    let points = set
        .iter()
        .map(|e| {
            let label = if seen.insert(e.display_name().to_string()) {
                e.display_name()
            } else {
                &e.name
            };
            let v = e.vector.as_slice();
            Point {
                name: label.to_string(),
                x: v[0],
                y: v[1],
                group: None,
            }
        })
        .collect();
    Ok(PlotSpec {
        kind: PlotKind::Arrows,
        points,
        x_label: "dim_0".into(),
        y_label: "dim_1".into(),
    })
}

/// Scatter of a transform result on its first two components. Axis
/// pseudo-embeddings are included in group `axis`; with a single component
/// every point sits at y = 0.
pub fn component_plot(result: &TransformResult) -> PlotSpec {
    let k = result.reduced.dim();
    let coord = |e: &Embedding, i: usize| e.vector.as_slice().get(i).copied().unwrap_or(0.0);
    let mut points: Vec<Point> = result
        .members()
        .map(|e| Point {
            name: e.name.clone(),
            x: coord(e, 0),
            y: coord(e, 1),
            group: None,
        })
        .collect();
    points.extend(result.axes().take(2).map(|e| Point {
        name: e.name.clone(),
        x: coord(e, 0),
        y: coord(e, 1),
        group: Some("axis".into()),
    }));
    let label = |i: usize| result.axes().nth(i).map(|e| e.name.clone()).unwrap_or_default();
    PlotSpec {
        kind: PlotKind::Scatter,
        points,
        x_label: label(0),
        y_label: if k > 1 { label(1) } else { String::new() },
    }
}

pub fn heatmap(matrix: &DistanceMatrix) -> Result<HeatmapSpec> {
    matrix.validate(1e-12)?;
    Ok(HeatmapSpec {
        kind: HeatmapKind::Heatmap,
        labels: matrix.labels.clone(),
        values: matrix.values.clone(),
        metric: matrix.metric.to_string(),
    })
}

/// Canonical JSON for any chart: sorted keys, no whitespace.
pub fn emit_json<T: Serialize + ?Sized>(spec: &T) -> String {
    to_canonical_json(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{set_apply, BinaryOp};
    use crate::retrieval::{distance_matrix, Metric};
    use proptest::prelude::*;

    fn toy() -> VectorStore {
        VectorStore::from_rows(
            "toy",
            2,
            [
                ("man", vec![0.5, 0.1]),
                ("woman", vec![0.5, 0.6]),
                ("king", vec![0.7, 0.33]),
                ("queen", vec![0.7, 0.9]),
            ],
        )
        .unwrap()
    }

    fn point<'a>(p: &'a PlotSpec, name: &str) -> &'a Point {
        p.points.iter().find(|q| q.name == name).unwrap()
    }

    #[test]
    fn scatter_on_word_axes() {
        let s = toy();
        let set = s.get_set(&["man", "woman", "king", "queen"]).unwrap();
        let p = scatter_projection(&set, "man", "woman", Some(&s), false).unwrap();
        assert_eq!(p.kind, PlotKind::Scatter);
        assert_eq!(p.points.len(), 4);
        assert_eq!(point(&p, "man").x, 1.0);
        assert_eq!(point(&p, "woman").y, 1.0);
        let king = point(&p, "king");
        assert!((king.x - (0.35 + 0.033) / 0.26).abs() < 1e-12);
        assert!((king.x - 1.473077).abs() < 1e-6);
        assert!((king.y - (0.35 + 0.198) / 0.61).abs() < 1e-12);
        assert!((king.y - 0.898361).abs() < 1e-6);
        assert_eq!(p.x_label, "man");
        assert_eq!(p.y_label, "woman");
    }

    #[test]
    fn axis_points_are_appended_once() {
        let s = toy();
        let set = s.get_set(&["king", "queen"]).unwrap();
        let p = scatter_projection(&set, "man", "queen - king", Some(&s), true).unwrap();
        assert_eq!(p.points.len(), 4);
        let man = point(&p, "man");
        assert_eq!(man.x, 1.0);
        assert_eq!(man.group.as_deref(), Some("axis"));
        assert_eq!(point(&p, "(queen - king)").y, 1.0);
        assert_eq!(p.y_label, "(queen - king)");

        // member already named like the axis: no duplicate point
        let set = s.get_set(&["man", "king"]).unwrap();
        let p = scatter_projection(&set, "man", "man", Some(&s), true).unwrap();
        assert_eq!(p.points.len(), 2);
    }

    #[test]
    fn debiased_set_lies_on_zero() {
        let s = toy();
        let set = s.get_set(&["man", "woman", "king", "queen"]).unwrap();
        let axis = eval_str("man - woman", &s).unwrap();
        let rejected = set_apply(&set, BinaryOp::Reject, &axis).unwrap();
        let p = scatter_projection(&rejected, "man - woman", "king", Some(&s), false).unwrap();
        assert!(p.points.iter().all(|q| q.x.abs() <= 1e-9));
    }

    #[test]
    fn scatter_errors_propagate() {
        let s = toy();
        let set = s.get_set(&["man"]).unwrap();
        assert!(matches!(scatter_projection(&set, "man - man", "king", Some(&s), false), Err(Error::ZeroAxis(_))));
        assert!(matches!(scatter_projection(&set, "emperor", "king", Some(&s), false), Err(Error::OutOfVocabulary(_))));
        assert!(matches!(scatter_projection(&set, "king -", "king", Some(&s), false), Err(Error::Parse { .. })));
        assert!(scatter_projection(&set, "king", "man", None, false).is_err());
    }

    #[test]
    fn transform_axes_resolve_from_the_set() {
        let s = toy();
        let set = s.get_set(&["man", "woman", "king", "queen"]).unwrap();
        let r = crate::transforms::pca_transform(&set, 2).unwrap();
        let p = scatter_projection(&r.reduced, "pca_0", "pca_1", None, false).unwrap();
        for (pt, e) in p.points.iter().zip(r.reduced.iter()) {
            assert_eq!(pt.x, e.vector.as_slice()[0]);
            assert_eq!(pt.y, e.vector.as_slice()[1]);
        }
    }

    #[test]
    fn component_plot_reads_coordinates() {
        let s = toy();
        let set = s.get_set(&["man", "woman", "king", "queen"]).unwrap();
        let r = crate::transforms::pca_transform(&set, 2).unwrap();
        let p = component_plot(&r);
        assert_eq!(p.points.len(), 6);
        assert_eq!((p.x_label.as_str(), p.y_label.as_str()), ("pca_0", "pca_1"));
        let king = r.reduced.get("king").unwrap().vector.as_slice();
        assert_eq!((point(&p, "king").x, point(&p, "king").y), (king[0], king[1]));
        assert_eq!(point(&p, "pca_1").group.as_deref(), Some("axis"));

        let r = crate::transforms::pca_transform(&set, 1).unwrap();
        let p = component_plot(&r);
        assert_eq!(p.points.len(), 5);
        assert!(p.points.iter().all(|q| q.y == 0.0));
        assert_eq!(p.y_label, "");
    }

    #[test]
    fn toy_arrows() {
        let s = toy();
        let set = s
            .get_set(&["man", "woman", "king", "queen", "queen - king", "man | (queen - king)"])
            .unwrap();
        let p = arrow_plot(&set).unwrap();
        assert_eq!(p.kind, PlotKind::Arrows);
        assert_eq!(
            p.points.iter().map(|q| q.name.as_str()).collect::<Vec<_>>(),
            ["man", "woman", "king", "queen", "(queen - king)", "(man | (queen - king))"]
        );
        let diff = point(&p, "(queen - king)");
        assert!(diff.x.abs() < 1e-12 && (diff.y - 0.57).abs() < 1e-12);
        let orth = point(&p, "(man | (queen - king))");
        assert!((orth.x - 0.5).abs() < 1e-12 && orth.y.abs() < 1e-12);
    }

    #[test]
    fn arrow_edge_cases() {
        let p = arrow_plot(&EmbeddingSet::new(2)).unwrap();
        assert!(p.points.is_empty());
        let three = EmbeddingSet::from_embeddings(3, [Embedding::new("a", vec![1.0, 2.0, 3.0])]).unwrap();
        let err = arrow_plot(&three).unwrap_err();
        assert!(err.to_string().contains("transform"));
    }

    #[test]
    fn heatmap_copies_matrix() {
        let s = toy();
        let m = distance_matrix(&s.get_set(&["man", "woman"]).unwrap(), Metric::Cosine).unwrap();
        let h = heatmap(&m).unwrap();
        assert_eq!(h.labels, m.labels);
        assert_eq!(h.values, m.values);
        assert_eq!(h.metric, "cosine");

        let one = distance_matrix(&s.get_set(&["king"]).unwrap(), Metric::Euclidean).unwrap();
        let h = heatmap(&one).unwrap();
        assert_eq!(h.values, vec![vec![0.0]]);

        let bad = DistanceMatrix {
            labels: vec!["a".into(), "b".into()],
            values: vec![vec![0.0, 1.0], vec![2.0, 0.0]],
            metric: Metric::Euclidean,
        };
        assert!(heatmap(&bad).is_err());
    }

    #[test]
    fn json_schema_and_determinism() {
        let empty = PlotSpec {
            kind: PlotKind::Scatter,
            points: vec![],
            x_label: "man".into(),
            y_label: "woman".into(),
        };
        assert_eq!(
            emit_json(&empty),
            r#"{"kind":"scatter","points":[],"x_label":"man","y_label":"woman"}"#
        );

        let s = toy();
        let set = s.get_set(&["man", "king"]).unwrap();
        let p = scatter_projection(&set, "man", "woman", Some(&s), true).unwrap();
        let a = emit_json(&p);
        assert_eq!(a, emit_json(&p));
        let back: PlotSpec = serde_json::from_str(&a).unwrap();
        assert_eq!(back, p);

        let h = heatmap(&distance_matrix(&set, Metric::Cosine).unwrap()).unwrap();
        let text = emit_json(&h);
        assert!(text.starts_with(r#"{"kind":"heatmap","labels":["man","king"],"metric":"cosine","values":"#));
        let back: Chart = serde_json::from_str(&text).unwrap();
        assert_eq!(back, Chart::Heatmap(h));
    }

    fn arb_plot() -> impl Strategy<Value = PlotSpec> {
        prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6, prop::option::of("[a-z]{1,4}")), 0..8).prop_map(|pts| {
            PlotSpec {
                kind: PlotKind::Scatter,
                points: pts
                    .into_iter()
                    .enumerate()
                    .map(|(i, (x, y, group))| Point { name: format!("p{i}"), x, y, group })
                    .collect(),
                x_label: "x \"axis\"".into(),
                y_label: "ü".into(),
            }
        })
    }

    proptest! {
        #[test]
        fn emitted_json_is_a_fixpoint(p in arb_plot()) {
            let once = emit_json(&p);
            let parsed: PlotSpec = serde_json::from_str(&once).unwrap();
            prop_assert_eq!(&parsed, &p);
            prop_assert_eq!(emit_json(&parsed), once);
        }

        #[test]
        fn same_axes_put_points_on_diagonal(
            vs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..6),
            axis in prop::collection::vec(-3.0f64..3.0, 4),
        ) {
            prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-6);
            let set = EmbeddingSet::from_embeddings(
                4,
                vs.into_iter().enumerate().map(|(i, v)| Embedding::new(format!("m{i}"), v)),
            ).unwrap();
            let a = Embedding::new("axis", axis);
            let p = scatter_on_axes(&set, &a, &a, true).unwrap();
            for q in &p.points {
                prop_assert!((q.x - q.y).abs() <= 1e-12);
            }
        }

        #[test]
        fn scaling_an_axis_rescales_its_coordinate(
            vs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 1..6),
            axis in prop::collection::vec(-3.0f64..3.0, 3),
            c in 0.01f64..100.0,
        ) {
            prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-6);
            let set = EmbeddingSet::from_embeddings(
                3,
                vs.into_iter().enumerate().map(|(i, v)| Embedding::new(format!("m{i}"), v)),
            ).unwrap();
            let a = Embedding::new("a", axis.clone());
            let scaled = Embedding::new("ca", axis.iter().map(|v| v * c).collect::<Vec<_>>());
            let base = scatter_on_axes(&set, &a, &a, false).unwrap();
            let moved = scatter_on_axes(&set, &scaled, &a, false).unwrap();
            for (p, q) in base.points.iter().zip(&moved.points) {
                let want = p.x / c;
                prop_assert!((q.x - want).abs() <= 1e-9 * want.abs() + 1e-15);
            }
        }
    }
}
