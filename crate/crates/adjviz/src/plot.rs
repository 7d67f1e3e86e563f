//! SVG scatter plots of classifier embeddings.
//!
//! Circles mark classifiers, diamonds mark highlighted ones. Marker colour
//! follows a metadata attribute, with a legend listing attribute values in
//! order of first appearance. Both axes share one scale.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use adjviz_core::ClassifierMetadata;

use crate::files::{is_truthy, EmbeddingFile};
use crate::number::format_sig;

/// Categorical palette, assigned in first-appearance order of attribute values.
pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#393b79",
];
/// Colour of classifiers with no metadata or no value for the colour attribute.
pub const NEUTRAL: &str = "#b3b3b3";
pub const UNKNOWN: &str = "unknown";

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    /// Metadata attribute that selects marker colour.
    pub color_by: Option<String>,
    /// Metadata attribute read as a flag; set ⇒ diamond marker.
    pub highlight: String,
    /// Metadata attribute printed next to each marker.
    pub annotate: Option<String>,
    pub width: u32,
    pub height: u32,
    pub palette: Vec<String>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            color_by: None,
            highlight: "highlight".into(),
            annotate: None,
            width: 640,
            height: 480,
            palette: PALETTE.iter().map(|c| c.to_string()).collect(),
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

/// Colour assignment for one attribute over the plotted classifiers.
struct Legend {
    title: String,
    entries: Vec<(String, String)>,
}

impl Legend {
    fn build(ids: &[String], meta: &ClassifierMetadata, key: &str, palette: &[String]) -> Self {
        let mut entries: Vec<(String, String)> = Vec::new();
        let mut unknown = false;
        for id in ids {
            match meta.attribute(id, key) {
                Some(v) if !entries.iter().any(|(e, _)| e == v) => {
                    let color = palette[entries.len() % palette.len()].clone();
                    entries.push((v.to_string(), color));
                }
                Some(_) => {}
                None => unknown = true,
            }
        }
        if entries.len() > palette.len() {
            log::warn!(
                "attribute {key} has {} values but the palette only {} colours; colours repeat",
                entries.len(),
                palette.len()
            );
        }
        if unknown {
            entries.push((UNKNOWN.to_string(), NEUTRAL.to_string()));
        }
        Self {
            title: key.to_string(),
            entries,
        }
    }

    fn color_of(&self, value: Option<&str>) -> &str {
        let value = value.unwrap_or(UNKNOWN);
        self.entries
            .iter()
            .find(|(v, _)| v == value)
            .map_or(NEUTRAL, |(_, c)| c.as_str())
    }
}

const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 170.0;
const MARKER_RADIUS: f64 = 6.0;

/// Renders the first two embedding coordinates as a standalone SVG document.
pub fn render_svg(
    emb: &EmbeddingFile,
    meta: Option<&ClassifierMetadata>,
    spec: &PlotSpec,
) -> String {
    let legend = match (meta, &spec.color_by) {
        (Some(m), Some(key)) => Some(Legend::build(&emb.ids, m, key, &spec.palette)),
        _ => None,
    };
    if let Some(m) = meta {
        for id in &emb.ids {
            if m.get(id).is_none() {
                log::warn!("no metadata for classifier {id}; drawn in neutral colour");
            }
        }
    }

    let (w, h) = (f64::from(spec.width), f64::from(spec.height));
    let legend_w = if legend.is_some() { LEGEND_WIDTH } else { 0.0 };
    let side = (w - legend_w - 2.0 * MARGIN).min(h - 2.0 * MARGIN).max(1.0);
    let (x0, y0) = (MARGIN, (h - side) / 2.0);

    let coord = |p: &Vec<f64>, k: usize| p.get(k).copied().unwrap_or(0.0);
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &emb.points {
        min_x = min_x.min(coord(p, 0));
        max_x = max_x.max(coord(p, 0));
        min_y = min_y.min(coord(p, 1));
        max_y = max_y.max(coord(p, 1));
    }
    let span = (max_x - min_x).max(max_y - min_y);
    let span = if span > 0.0 { span * 1.1 } else { 1.0 };
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let scale = side / span;
    let to_px = |x: f64, y: f64| {
        (
            x0 + side / 2.0 + (x - cx) * scale,
            y0 + side / 2.0 - (y - cy) * scale,
        )
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="11">"#,
        spec.width, spec.height, spec.width, spec.height
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r##"<rect class="frame" x="{x0:.2}" y="{y0:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="#444444"/>"##
    )
    .unwrap();
    let (ox, oy) = to_px(0.0, 0.0);
    if (x0..=x0 + side).contains(&ox) {
        writeln!(
            svg,
            r##"<line class="axis" x1="{ox:.2}" y1="{y0:.2}" x2="{ox:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            y0 + side
        )
        .unwrap();
    }
    if (y0..=y0 + side).contains(&oy) {
        writeln!(
            svg,
            r##"<line class="axis" x1="{x0:.2}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}" stroke="#dddddd"/>"##,
            x0 + side
        )
        .unwrap();
    }

    for (id, p) in emb.ids.iter().zip(&emb.points) {
        let (px, py) = to_px(coord(p, 0), coord(p, 1));
        let color = match (&legend, meta, &spec.color_by) {
            (Some(l), Some(m), Some(key)) => l.color_of(m.attribute(id, key)),
            _ => NEUTRAL,
        };
        let highlighted = meta
            .and_then(|m| m.attribute(id, &spec.highlight))
            .is_some_and(is_truthy);
        let title = escape(id);
        if highlighted {
            let r = MARKER_RADIUS * 1.4;
            writeln!(
                svg,
                r#"<polygon class="marker diamond" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}" stroke="black"><title>{title}</title></polygon>"#,
                px, py - r, px + r, py, px, py + r, px - r, py
            )
            .unwrap();
        } else {
            writeln!(
                svg,
                r#"<circle class="marker circle" cx="{px:.2}" cy="{py:.2}" r="{MARKER_RADIUS}" fill="{color}" stroke="black"><title>{title}</title></circle>"#
            )
            .unwrap();
        }
        if let Some(text) = spec
            .annotate
            .as_deref()
            .and_then(|k| meta?.attribute(id, k))
        {
            let text = match text.parse::<f64>() {
                Ok(v) => format_sig(v, 3),
                Err(_) => text.to_string(),
            };
            writeln!(
                svg,
                r#"<text class="annotation" x="{:.2}" y="{:.2}">{}</text>"#,
                px + MARKER_RADIUS + 3.0,
                py - MARKER_RADIUS,
                escape(&text)
            )
            .unwrap();
        }
    }

    if let Some(l) = &legend {
        let lx = x0 + side + 20.0;
        let mut ly = y0 + 10.0;
        writeln!(svg, r#"<g class="legend">"#).unwrap();
        writeln!(
            svg,
            r#"<text class="legend-title" x="{lx:.2}" y="{ly:.2}" font-weight="bold">{}</text>"#,
            escape(&l.title)
        )
        .unwrap();
        for (value, color) in &l.entries {
            ly += 18.0;
            writeln!(
                svg,
                r#"<rect class="legend-swatch" x="{lx:.2}" y="{:.2}" width="12" height="12" fill="{color}" stroke="black"/>"#,
                ly - 10.0
            )
            .unwrap();
            writeln!(
                svg,
                r#"<text class="legend-label" x="{:.2}" y="{ly:.2}">{}</text>"#,
                lx + 18.0,
                escape(value)
            )
            .unwrap();
        }
        writeln!(svg, "</g>").unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Attribute value → colour, as the plot assigns them.
pub fn color_assignment(
    ids: &[String],
    meta: &ClassifierMetadata,
    key: &str,
    palette: &[String],
) -> BTreeMap<String, String> {
    Legend::build(ids, meta, key, palette)
        .entries
        .into_iter()
        .collect()
}
