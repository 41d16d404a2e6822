//! Static SVG rendering of chart specs.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::plotspec::{Chart, HeatmapSpec, PlotKind, PlotSpec};

const MARGIN: f64 = 48.0;

/// Closed interval mapped onto a pixel span.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    /// Data extent padded by 5% on both sides. A zero-width extent becomes a
    /// unit range centered on the value.
    pub fn padded(values: impl IntoIterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Range { lo: -0.5, hi: 0.5 };
        }
        let span = hi - lo;
        if span == 0.0 {
            return Range { lo: lo - 0.5, hi: hi + 0.5 };
        }
        Range {
            lo: lo - 0.05 * span,
            hi: hi + 0.05 * span,
        }
    }

    fn map(self, v: f64, from_px: f64, to_px: f64) -> f64 {
        from_px + (v - self.lo) / (self.hi - self.lo) * (to_px - from_px)
    }
}

/// Shared scales for one or more scatter/arrow panels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub x: Range,
    pub y: Range,
}

impl Bounds {
    pub fn of<'a>(plots: impl IntoIterator<Item = &'a PlotSpec>) -> Bounds {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for p in plots {
            if p.kind == PlotKind::Arrows {
                xs.push(0.0);
                ys.push(0.0);
            }
            xs.extend(p.points.iter().map(|q| q.x));
            ys.extend(p.points.iter().map(|q| q.y));
        }
        Bounds {
            x: Range::padded(xs),
            y: Range::padded(ys),
        }
    }
}

pub fn render_svg(chart: &Chart, width_px: u32, height_px: u32) -> Result<String> {
    check_size(width_px, height_px)?;
    let (w, h) = (width_px as f64, height_px as f64);
    let mut out = open_svg(w, h);
    match chart {
        Chart::Plot(p) => plot_body(&mut out, p, Bounds::of([p]), 0.0, w, h),
        Chart::Heatmap(hm) => heatmap_body(&mut out, hm, None, 0.0, w, h),
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Side-by-side panels sharing one pair of scales, each titled.
pub fn render_panels_svg(panels: &[(&str, &PlotSpec)], panel_width: u32, panel_height: u32) -> Result<String> {
    check_size(panel_width, panel_height)?;
    let (w, h) = (panel_width as f64, panel_height as f64);
    let bounds = Bounds::of(panels.iter().map(|(_, p)| *p));
    let mut out = open_svg(w * panels.len().max(1) as f64, h + 24.0);
    for (i, (title, plot)) in panels.iter().enumerate() {
        let dx = i as f64 * w;
        let _ = writeln!(
            out,
            r#"<text class="title" x="{:.2}" y="16" text-anchor="middle">{}</text>"#,
            dx + w / 2.0,
            escape(title)
        );
        let _ = writeln!(out, r#"<g transform="translate({dx:.2},24)">"#);
        plot_body(&mut out, plot, bounds, 0.0, w, h);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Side-by-side heatmaps shaded on one shared value range.
pub fn render_heatmap_panels_svg(
    panels: &[(&str, &HeatmapSpec)],
    panel_width: u32,
    panel_height: u32,
) -> Result<String> {
    check_size(panel_width, panel_height)?;
    let (w, h) = (panel_width as f64, panel_height as f64);
    let shared = Range::value_range(panels.iter().flat_map(|(_, hm)| hm.values.iter().flatten().copied()));
    let mut out = open_svg(w * panels.len().max(1) as f64, h + 24.0);
    for (i, (title, hm)) in panels.iter().enumerate() {
        let dx = i as f64 * w;
        let _ = writeln!(
            out,
            r#"<text class="title" x="{:.2}" y="16" text-anchor="middle">{}</text>"#,
            dx + w / 2.0,
            escape(title)
        );
        let _ = writeln!(out, r#"<g transform="translate({dx:.2},24)">"#);
        heatmap_body(&mut out, hm, Some(shared), 0.0, w, h);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

impl Range {
    /// Unpadded min..max, or a unit range centered on a constant value.
    fn value_range(values: impl IntoIterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if lo == hi {
            return Range { lo: lo - 0.5, hi: hi + 0.5 };
        }
        Range { lo, hi }
    }
}

fn check_size(w: u32, h: u32) -> Result<()> {
    if w == 0 || h == 0 {
        return Err(Error::InvalidArgument("SVG width and height must be positive".into()));
    }
    Ok(())
}

fn open_svg(w: f64, h: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#
    );
    out
}

fn plot_body(out: &mut String, plot: &PlotSpec, b: Bounds, x0: f64, w: f64, h: f64) {
    let (left, right) = (x0 + MARGIN, x0 + w - MARGIN / 2.0);
    let (top, bottom) = (MARGIN / 2.0, h - MARGIN);
    let px = |x: f64| b.x.map(x, left, right);
    let py = |y: f64| b.y.map(y, bottom, top);

    if plot.kind == PlotKind::Arrows {
        out.push_str(
            "<defs><marker id=\"arrowhead\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n",
        );
    }
    let _ = writeln!(
        out,
        r##"<path class="frame" d="M{left:.2},{top:.2} L{left:.2},{bottom:.2} L{right:.2},{bottom:.2}" fill="none" stroke="#999"/>"##
    );
    if b.x.lo <= 0.0 && 0.0 <= b.x.hi {
        let x = px(0.0);
        let _ = writeln!(out, r##"<path class="zero" d="M{x:.2},{top:.2} L{x:.2},{bottom:.2}" stroke="#ddd"/>"##);
    }
    if b.y.lo <= 0.0 && 0.0 <= b.y.hi {
        let y = py(0.0);
        let _ = writeln!(out, r##"<path class="zero" d="M{left:.2},{y:.2} L{right:.2},{y:.2}" stroke="#ddd"/>"##);
    }
    for (v, anchor) in [(b.x.lo, "start"), (b.x.hi, "end")] {
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
            px(v),
            bottom + 14.0,
            fmt_num(v)
        );
    }
    for v in [b.y.lo, b.y.hi] {
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 4.0,
            py(v) + 4.0,
            fmt_num(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        h - 8.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="12" y="{:.2}" text-anchor="middle" transform="rotate(-90 12 {:.2})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(&plot.y_label)
    );

    for p in &plot.points {
        let (x, y) = (px(p.x), py(p.y));
        match plot.kind {
            PlotKind::Arrows => {
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{x:.2}" y2="{y:.2}" stroke="#333" stroke-width="1.5" marker-end="url(#arrowhead)"/>"##,
                    px(0.0),
                    py(0.0)
                );
            }
            PlotKind::Scatter => {
                let fill = if p.group.is_some() { "#c0392b" } else { "#2c6fbb" };
                let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}"/>"#);
            }
        }
        let _ = writeln!(
            out,
            r#"<text class="label" x="{:.2}" y="{:.2}">{}</text>"#,
            x + 5.0,
            y - 5.0,
            escape(&p.name)
        );
    }
}

fn heatmap_body(out: &mut String, hm: &HeatmapSpec, shared: Option<Range>, x0: f64, w: f64, h: f64) {
    let n = hm.labels.len();
    let range = shared.unwrap_or_else(|| Range::value_range(hm.values.iter().flatten().copied()));
    let side = (w - 2.0 * MARGIN).min(h - 2.0 * MARGIN).max(1.0);
    let cell = side / n.max(1) as f64;
    let (left, top) = (x0 + 1.5 * MARGIN, MARGIN);

    for (i, label) in hm.labels.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 4.0,
            top + (i as f64 + 0.5) * cell + 4.0,
            escape(label)
        );
        let cx = left + (i as f64 + 0.5) * cell;
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{cx:.2}" y="{:.2}" text-anchor="start" transform="rotate(-45 {cx:.2} {:.2})">{}</text>"#,
            top - 4.0,
            top - 4.0,
            escape(label)
        );
    }
    for (i, row) in hm.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let t = ((v - range.lo) / (range.hi - range.lo)).clamp(0.0, 1.0);
            let g = (255.0 * (1.0 - t)).round() as u8;
            let (x, y) = (left + j as f64 * cell, top + i as f64 * cell);
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="rgb({g},{g},{g})"/>"#
            );
            let ink = if g < 128 { "#fff" } else { "#000" };
            let _ = writeln!(
                out,
                r#"<text class="cell-label" x="{:.2}" y="{:.2}" text-anchor="middle" fill="{ink}">{}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0 + 4.0,
                fmt_num(*v)
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">{} distance</text>"#,
        left + side / 2.0,
        top + side + 20.0,
        escape(&hm.metric)
    );
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plotspec::{arrow_plot, heatmap, scatter_projection, HeatmapKind, Point};
    use crate::retrieval::{distance_matrix, Metric};
    use crate::vecstore::VectorStore;

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

    fn parse(svg: &str) -> roxmltree::Document<'_> {
        roxmltree::Document::parse(svg).expect("well-formed SVG")
    }

    fn count(doc: &roxmltree::Document, tag: &str, pred: impl Fn(&roxmltree::Node) -> bool) -> usize {
        doc.descendants().filter(|n| n.has_tag_name(tag) && pred(n)).count()
    }

    #[test]
    fn toy_arrow_svg() {
        let s = toy();
        let set = s
            .get_set(&["man", "woman", "king", "queen", "queen - king", "man | (queen - king)"])
            .unwrap();
        let svg = render_svg(&arrow_plot(&set).unwrap().into(), 480, 480).unwrap();
        let doc = parse(&svg);
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert_eq!(count(&doc, "line", |n| n.attribute("marker-end").is_some()), 6);
        let labels: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("label"))
            .filter_map(|n| n.text())
            .collect();
        assert_eq!(labels, ["man", "woman", "king", "queen", "(queen - king)", "(man | (queen - king))"]);
    }

    #[test]
    fn svg_is_deterministic() {
        let s = toy();
        let set = s.get_set(&["man", "woman", "king"]).unwrap();
        let chart: Chart = scatter_projection(&set, "man", "woman", Some(&s), true).unwrap().into();
        assert_eq!(render_svg(&chart, 400, 300).unwrap(), render_svg(&chart, 400, 300).unwrap());
        let svg = render_svg(&chart, 400, 300).unwrap();
        let doc = parse(&svg);
        assert_eq!(count(&doc, "circle", |_| true), 3);
    }

    #[test]
    fn single_cell_heatmap() {
        let s = toy();
        let m = distance_matrix(&s.get_set(&["man"]).unwrap(), Metric::Cosine).unwrap();
        let svg = render_svg(&heatmap(&m).unwrap().into(), 300, 300).unwrap();
        let doc = parse(&svg);
        assert_eq!(count(&doc, "rect", |_| true), 1);
        let cells: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("cell-label"))
            .collect();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].text(), Some("0.00"));
    }

    #[test]
    fn heatmap_shading_spans_min_to_max() {
        let hm = HeatmapSpec {
            kind: HeatmapKind::Heatmap,
            labels: vec!["a".into(), "b<&>".into()],
            values: vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            metric: "euclidean".into(),
        };
        let svg = render_svg(&hm.into(), 300, 300).unwrap();
        let doc = parse(&svg);
        let fills: Vec<_> = doc.descendants().filter_map(|n| n.attribute("fill")).filter(|f| f.starts_with("rgb")).collect();
        assert_eq!(fills, ["rgb(255,255,255)", "rgb(0,0,0)", "rgb(0,0,0)", "rgb(255,255,255)"]);
        assert!(svg.contains("b&lt;&amp;&gt;"));
    }

    #[test]
    fn padded_ranges() {
        assert_eq!(Range::padded([0.0, 10.0]), Range { lo: -0.5, hi: 10.5 });
        assert_eq!(Range::padded([3.0, 3.0]), Range { lo: 2.5, hi: 3.5 });
        assert_eq!(Range::padded([]), Range { lo: -0.5, hi: 0.5 });
    }

    #[test]
    fn constant_data_still_renders() {
        let p = PlotSpec {
            kind: PlotKind::Scatter,
            points: vec![Point { name: "only".into(), x: 2.0, y: 2.0, group: None }],
            x_label: "x".into(),
            y_label: "y".into(),
        };
        let svg = render_svg(&p.into(), 200, 200).unwrap();
        parse(&svg);
        assert!(!svg.contains("NaN"));
        assert!(render_svg(&Chart::Plot(arrow_plot(&crate::vecstore::EmbeddingSet::new(2)).unwrap()), 0, 10).is_err());
    }

    #[test]
    fn panels_share_scale() {
        let a = PlotSpec {
            kind: PlotKind::Scatter,
            points: vec![Point { name: "p".into(), x: 0.0, y: 0.0, group: None }],
            x_label: "x".into(),
            y_label: "y".into(),
        };
        let mut b = a.clone();
        b.points[0].x = 10.0;
        let svg = render_panels_svg(&[("one", &a), ("two", &b)], 300, 300).unwrap();
        let doc = parse(&svg);
        assert_eq!(count(&doc, "g", |_| true), 2);
        let titles: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("title")).filter_map(|n| n.text()).collect();
        assert_eq!(titles, ["one", "two"]);
        let cx: Vec<f64> = doc.descendants().filter_map(|n| n.attribute("cx")).map(|v| v.parse().unwrap()).collect();
        assert!(cx[0] < cx[1]);

        let hm = HeatmapSpec {
            kind: HeatmapKind::Heatmap,
            labels: vec!["a".into()],
            values: vec![vec![0.0]],
            metric: "cosine".into(),
        };
        parse(&render_heatmap_panels_svg(&[("one", &hm), ("two", &hm)], 200, 200).unwrap());
    }
}
