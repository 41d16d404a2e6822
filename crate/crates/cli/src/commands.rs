use std::fmt::Write as _;
use std::net::SocketAddr;

use embedlab_core::algebra::{self, eval_str};
use embedlab_core::bias::{build_bias_axis, debias_set, neighborhood_overlap, pair_difference_set};
use embedlab_core::canonical::to_canonical_json;
use embedlab_core::plotspec::{
    arrow_plot, component_plot, emit_json, heatmap, scatter_projection, Chart, HeatmapKind, HeatmapSpec, PlotKind,
    PlotSpec,
};
use embedlab_core::retrieval::{analogy, distance_matrix, rank_excluding, Ranking};
use embedlab_core::svg::{render_heatmap_panels_svg, render_panels_svg, render_svg};
use embedlab_core::transforms::{transform, Method, TransformResult};
use embedlab_core::{Embedding, EmbeddingSet, Metric, StoreFormat, VectorStore};
use embedlab_server::api::{component_chart_json, embedding_json, neighbors_json};
use serde::Serialize;

use crate::args::{ChartSize, Cli, Command, PlotCommand, Words};
use crate::input;
use crate::Failure;

const HEAD: usize = 10;

/// What a command produced for stdout (or `--output`).
pub type Output = Result<Option<String>, Failure>;

struct Ctx<'a> {
    stores: &'a [VectorStore],
    store: &'a VectorStore,
    metric: Metric,
    json: bool,
}

pub fn run(cli: &Cli) -> Output {
    if let Command::Serve { port, host, static_dir } = &cli.command {
        let stores = input::load_stores(&cli.vectors, cli.format.into())?;
        return serve(stores, host, *port, static_dir.clone()).map(|_| None);
    }
    let stores = input::load_stores(&cli.vectors, cli.format.into())?;
    let ctx = Ctx {
        store: input::select(&stores, cli.store.as_deref())?,
        stores: &stores,
        metric: cli.metric.into(),
        json: cli.json,
    };
    match &cli.command {
        Command::Similar { expr, n, exclude_inputs } => similar(&ctx, expr, *n, *exclude_inputs),
        Command::Analogy { pos, neg, n, include_inputs } => {
            let ranking = analogy(ctx.store, pos, neg, *n, ctx.metric, !include_inputs)?;
            Ok(Some(ranking_text(&ctx, &ranking)))
        }
        Command::Eval { expr } => eval(&ctx, expr),
        Command::Distance { words, pairs_file, size } => {
            let set = match pairs_file {
                Some(path) => pair_difference_set(ctx.store, &input::pairs(path)?)?,
                None => ctx.store.get_set(&input::word_list(words)?)?,
            };
            distance(&ctx, &set, size)
        }
        Command::Plot { kind } => plot(&ctx, kind),
        Command::Pca { words, k, size } => reduce(&ctx, words, Method::Pca, *k, size),
        Command::Mds { words, k, size } => reduce(&ctx, words, Method::Mds(ctx.metric), *k, size),
        Command::Debias { words, pairs_file, report_token, n } => {
            debias(&ctx, words, &input::pairs(pairs_file)?, report_token.as_deref(), *n)
        }
        Command::Featurize { texts_file, out } => {
            let texts = input::texts(texts_file)?;
            let matrix = ctx.store.featurize(&texts)?;
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(out)
                .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            for row in matrix.row_iter() {
                writer
                    .write_record(row.iter().map(|v| format!("{v:?}")))
                    .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            }
            writer.flush().map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            eprintln!("wrote {} rows of dimension {} to {}", matrix.nrows(), matrix.ncols(), out.display());
            Ok(None)
        }
        Command::Convert { to } => {
            let mut buf = Vec::new();
            ctx.store
                .write_to(&mut buf, StoreFormat::from(*to))
                .map_err(|e| Failure::Data(e.to_string()))?;
            Ok(Some(String::from_utf8(buf).expect("stores hold UTF-8 tokens")))
        }
        Command::Compare { words, x_axis, y_axis, show_axis_point, distance, size } => {
            let items = input::word_list(words)?;
            if *distance {
                compare_heatmaps(&ctx, &items, size)
            } else {
                let x = x_axis.as_deref().expect("required by clap");
                let y = y_axis.as_deref().expect("required by clap");
                compare_scatters(&ctx, &items, x, y, *show_axis_point, size)
            }
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
}

fn ensure_one_format(ctx: &Ctx, size: &ChartSize) -> Result<(), Failure> {
    if ctx.json && size.svg {
        return Err(Failure::Usage("--json and --svg are mutually exclusive".into()));
    }
    Ok(())
}

fn head(v: &[f64]) -> String {
    let mut out = String::from("[");
    for (i, x) in v.iter().take(HEAD).enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if *x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
            let _ = write!(out, "{x:e}");
        } else {
            let _ = write!(out, "{x}");
        }
    }
    if v.len() > HEAD {
        let _ = write!(out, ", ... ({} more)", v.len() - HEAD);
    }
    out.push(']');
    out
}

fn ranking_text(ctx: &Ctx, ranking: &Ranking) -> String {
    if ranking.skipped_zero_norm > 0 {
        eprintln!(
            "warning: skipped {} zero-norm vector(s) under the cosine metric",
            ranking.skipped_zero_norm
        );
    }
    if ctx.json {
        return neighbors_json(ranking);
    }
    let mut out = String::new();
    for n in &ranking.neighbors {
        let _ = writeln!(out, "{}\t{}", n.embedding.name, n.distance);
    }
    out
}

fn similar(ctx: &Ctx, expr: &str, n: usize, exclude_inputs: bool) -> Output {
    let ast = algebra::parse(expr)?;
    let query = algebra::evaluate(&ast, ctx.store)?;
    let excluded = if exclude_inputs {
        ast.tokens().into_iter().collect()
    } else {
        Default::default()
    };
    let ranking = rank_excluding(ctx.store, &query, n, ctx.metric, &excluded)?;
    Ok(Some(ranking_text(ctx, &ranking)))
}

fn eval(ctx: &Ctx, expr: &str) -> Output {
    let e = eval_str(expr, ctx.store)?;
    if ctx.json {
        return Ok(Some(embedding_json(&e)));
    }
    Ok(Some(format!(
        "name: {}\ndim: {}\nvector: {}\n",
        e.name,
        e.dim(),
        head(e.vector.as_slice())
    )))
}

fn chart_output(ctx: &Ctx, chart: Chart, size: &ChartSize) -> Output {
    ensure_one_format(ctx, size)?;
    if size.svg {
        return Ok(Some(render_svg(&chart, size.width, size.height)?));
    }
    Ok(Some(emit_json(&chart)))
}

fn distance(ctx: &Ctx, set: &EmbeddingSet, size: &ChartSize) -> Output {
    let spec = heatmap(&distance_matrix(set, ctx.metric)?)?;
    if ctx.json || size.svg {
        return chart_output(ctx, spec.into(), size);
    }
    let mut out = String::new();
    let _ = writeln!(out, "\t{}", spec.labels.join("\t"));
    for (label, row) in spec.labels.iter().zip(&spec.values) {
        out.push_str(label);
        for v in row {
            let _ = write!(out, "\t{v:.6}");
        }
        out.push('\n');
    }
    Ok(Some(out))
}

fn plot(ctx: &Ctx, kind: &PlotCommand) -> Output {
    match kind {
        PlotCommand::Scatter { words, axes, size } => {
            let set = ctx.store.get_set(&input::word_list(words)?)?;
            let spec = scatter_projection(&set, &axes.x_axis, &axes.y_axis, Some(ctx.store), axes.show_axis_point)?;
            chart_output(ctx, spec.into(), size)
        }
        PlotCommand::Arrows { words, size } => {
            let set = ctx.store.get_set(&input::word_list(words)?)?;
            chart_output(ctx, arrow_plot(&set)?.into(), size)
        }
    }
}

fn reduce(ctx: &Ctx, words: &Words, method: Method, k: usize, size: &ChartSize) -> Output {
    ensure_one_format(ctx, size)?;
    let set = ctx.store.get_set(&input::word_list(words)?)?;
    let result = transform(&set, method, k)?;
    if ctx.json {
        return Ok(Some(component_chart_json(&result)));
    }
    if size.svg {
        return Ok(Some(render_svg(&component_plot(&result).into(), size.width, size.height)?));
    }
    Ok(Some(component_table(&result)))
}

fn component_table(result: &TransformResult) -> String {
    let mut out = String::from("name");
    for axis in result.axes() {
        let _ = write!(out, "\t{}", axis.name);
    }
    out.push('\n');
    for member in result.members() {
        out.push_str(&member.name);
        for v in member.vector.as_slice() {
            let _ = write!(out, "\t{v:.6}");
        }
        out.push('\n');
    }
    if let Some(variance) = &result.explained_variance {
        out.push_str("explained_variance");
        for v in variance {
            let _ = write!(out, "\t{v:.6}");
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct NamedVector<'a> {
    name: &'a str,
    vector: &'a [f64],
}

impl<'a> From<&'a Embedding> for NamedVector<'a> {
    fn from(e: &'a Embedding) -> Self {
        NamedVector {
            name: &e.name,
            vector: e.vector.as_slice(),
        }
    }
}

#[derive(Serialize)]
struct DebiasOut<'a> {
    axis: NamedVector<'a>,
    members: Vec<NamedVector<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlap: Option<embedlab_core::bias::OverlapReport>,
}

fn debias(ctx: &Ctx, words: &Words, pairs: &[(String, String)], token: Option<&str>, n: usize) -> Output {
    let set = ctx.store.get_set(&input::word_list(words)?)?;
    let axis = build_bias_axis(ctx.store, pairs)?;
    let debiased = debias_set(&set, &axis)?;
    let overlap = match token {
        Some(t) => Some(neighborhood_overlap(&set, &debiased, t, n, ctx.metric)?),
        None => None,
    };
    if ctx.json {
        let out = DebiasOut {
            axis: (&axis.axis).into(),
            members: debiased.iter().map(NamedVector::from).collect(),
            overlap,
        };
        return Ok(Some(to_canonical_json(&out)));
    }
    let mut out = String::new();
    let _ = writeln!(out, "axis {}: {}", axis.axis.name, head(axis.axis.vector.as_slice()));
    for member in &debiased {
        let _ = writeln!(out, "{}\t{}", member.name, head(member.vector.as_slice()));
    }
    if let Some(r) = overlap {
        let _ = writeln!(out, "overlap of {} (top {n}): jaccard {}", r.token, r.jaccard);
        let _ = writeln!(out, "before: {}", r.before.join(", "));
        let _ = writeln!(out, "after: {}", r.after.join(", "));
    }
    Ok(Some(out))
}

#[derive(Serialize)]
struct Panel<'a, T> {
    store: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    chart: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Comparison<'a, T> {
    charts: Vec<Panel<'a, T>>,
}

/// One panel per store in load order. A store that fails keeps its panel with
/// the error; the command fails only when every store fails.
fn panels<'a, T>(
    stores: &'a [VectorStore],
    build: impl Fn(&VectorStore) -> embedlab_core::Result<T>,
) -> Result<Vec<Panel<'a, T>>, Failure> {
    let panels: Vec<Panel<T>> = stores
        .iter()
        .map(|store| match build(store) {
            Ok(chart) => Panel {
                store: store.label(),
                chart: Some(chart),
                error: None,
            },
            Err(e) => Panel {
                store: store.label(),
                chart: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    for p in &panels {
        if let Some(e) = &p.error {
            eprintln!("{}: {e}", p.store);
        }
    }
    if panels.iter().all(|p| p.chart.is_none()) {
        return Err(Failure::Data("no store could produce the chart".into()));
    }
    Ok(panels)
}

fn panel_title<T>(p: &Panel<T>) -> String {
    match &p.error {
        Some(e) => format!("{} (error: {e})", p.store),
        None => p.store.to_string(),
    }
}

fn compare_scatters(ctx: &Ctx, items: &[String], x: &str, y: &str, show: bool, size: &ChartSize) -> Output {
    ensure_one_format(ctx, size)?;
    let panels = panels(ctx.stores, |store| {
        let set = store.get_set(items)?;
        scatter_projection(&set, x, y, Some(store), show)
    })?;
    if size.svg {
        let empty = PlotSpec {
            kind: PlotKind::Scatter,
            points: Vec::new(),
            x_label: x.to_string(),
            y_label: y.to_string(),
        };
        let titled: Vec<(String, &PlotSpec)> = panels
            .iter()
            .map(|p| (panel_title(p), p.chart.as_ref().unwrap_or(&empty)))
            .collect();
        let refs: Vec<(&str, &PlotSpec)> = titled.iter().map(|(t, c)| (t.as_str(), *c)).collect();
        return Ok(Some(render_panels_svg(&refs, size.width, size.height)?));
    }
    if ctx.json {
        return Ok(Some(to_canonical_json(&Comparison { charts: panels })));
    }
    let mut out = String::new();
    for p in &panels {
        let _ = writeln!(out, "== {} ==", p.store);
        match (&p.chart, &p.error) {
            (Some(chart), _) => {
                let _ = writeln!(out, "name\t{}\t{}", chart.x_label, chart.y_label);
                for q in &chart.points {
                    let _ = writeln!(out, "{}\t{:.6}\t{:.6}", q.name, q.x, q.y);
                }
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "error: {e}");
            }
            (None, None) => {}
        }
    }
    Ok(Some(out))
}

fn compare_heatmaps(ctx: &Ctx, items: &[String], size: &ChartSize) -> Output {
    ensure_one_format(ctx, size)?;
    let panels = panels(ctx.stores, |store| {
        let set = store.get_set(items)?;
        heatmap(&distance_matrix(&set, ctx.metric)?)
    })?;
    if size.svg {
        let empty = HeatmapSpec {
            kind: HeatmapKind::Heatmap,
            labels: Vec::new(),
            values: Vec::new(),
            metric: ctx.metric.to_string(),
        };
        let titled: Vec<(String, &HeatmapSpec)> = panels
            .iter()
            .map(|p| (panel_title(p), p.chart.as_ref().unwrap_or(&empty)))
            .collect();
        let refs: Vec<(&str, &HeatmapSpec)> = titled.iter().map(|(t, c)| (t.as_str(), *c)).collect();
        return Ok(Some(render_heatmap_panels_svg(&refs, size.width, size.height)?));
    }
    if ctx.json {
        return Ok(Some(to_canonical_json(&Comparison { charts: panels })));
    }
    let mut out = String::new();
    for p in &panels {
        let _ = writeln!(out, "== {} ==", p.store);
        match (&p.chart, &p.error) {
            (Some(chart), _) => {
                let _ = writeln!(out, "\t{}", chart.labels.join("\t"));
                for (label, row) in chart.labels.iter().zip(&chart.values) {
                    out.push_str(label);
                    for v in row {
                        let _ = write!(out, "\t{v:.6}");
                    }
                    out.push('\n');
                }
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "error: {e}");
            }
            (None, None) => {}
        }
    }
    Ok(Some(out))
}

fn serve(stores: Vec<VectorStore>, host: &str, port: u16, static_dir: Option<std::path::PathBuf>) -> Result<(), Failure> {
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| Failure::Usage(format!("invalid address {host}:{port}: {e}")))?;
    let stores = embedlab_server::Stores::new(stores).map_err(|e| Failure::Usage(e.0))?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Data(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::Data(format!("cannot listen on {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Failure::Data(e.to_string()))?;
        eprintln!("listening on http://{local}");
        embedlab_server::serve(listener, stores, static_dir)
            .await
            .map_err(|e| Failure::Data(e.to_string()))
    })
}
