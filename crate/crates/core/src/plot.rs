//! Static SVG output: persistence barcodes and classified scatter plots.

use std::fmt::Write as _;

use crate::classify::ConstellationReport;
use crate::geometry::PointCloud;
use crate::tda::PersistenceDiagram;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn header(out: &mut String, width: f64, height: f64) {
    let _ = write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
}

/// One bar per interval, dimension 0 above dimension 1, x axis in k units.
/// Infinite bars run to `k_max` and end in an arrowhead.
pub fn barcode_svg(diagram: &PersistenceDiagram) -> String {
    let k_max = diagram.k_max.max(1) as f64;
    let bars: Vec<_> = diagram.intervals.iter().collect();
    let bar_h = (600.0 / bars.len().max(1) as f64).clamp(0.2, 12.0);
    let plot_h = bar_h * bars.len() as f64 + 20.0;
    let height = plot_h + 2.0 * MARGIN;
    let span = WIDTH - 2.0 * MARGIN - 15.0;
    let x_of = |k: f64| MARGIN + span * k / k_max;

    let mut out = String::new();
    header(&mut out, WIDTH, height);
    out.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"1\" refY=\"5\" \
         markerWidth=\"4\" markerHeight=\"4\" orient=\"auto\">\
         <path d=\"M0,0 L10,5 L0,10 z\" fill=\"black\"/></marker></defs>\n",
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">kNN persistence barcode (k_max = {})</text>",
        WIDTH / 2.0,
        MARGIN / 2.0,
        diagram.k_max
    );
    let axis_y = MARGIN + plot_h;
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{axis_y}\" x2=\"{}\" y2=\"{axis_y}\" stroke=\"black\"/>",
        x_of(0.0),
        x_of(k_max)
    );
    for k in 0..=diagram.k_max {
        let x = x_of(k as f64);
        let _ = writeln!(
            out,
            "<line x1=\"{x}\" y1=\"{axis_y}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>\
             <text x=\"{x}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{k}</text>",
            axis_y + 5.0,
            axis_y + 18.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">k</text>",
        WIDTH / 2.0,
        axis_y + 35.0
    );
    out.push_str("<g stroke-linecap=\"butt\">\n");
    for (row, iv) in bars.iter().enumerate() {
        let y = MARGIN + 10.0 + bar_h * (row as f64 + 0.5);
        let colour = PALETTE[iv.dim as usize % PALETTE.len()];
        let x1 = x_of(iv.birth as f64);
        let x2 = x_of(iv.death.map_or(k_max, |d| d as f64));
        let marker = if iv.is_infinite() {
            " marker-end=\"url(#arrow)\""
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y:.2}\" x2=\"{x2:.2}\" y2=\"{y:.2}\" stroke=\"{colour}\" stroke-width=\"{:.2}\"{marker}/>",
            (bar_h * 0.7).max(0.2)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">H0</text>\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">H1</text>",
        WIDTH - MARGIN,
        MARGIN,
        PALETTE[0],
        WIDTH - MARGIN,
        MARGIN + 14.0,
        PALETTE[1]
    );
    out.push_str("</svg>\n");
    out
}

/// Scatter of the cloud coloured by fitted component, with fitted centres
/// marked and one-sigma circles drawn.
pub fn scatter_svg(cloud: &PointCloud, report: &ConstellationReport) -> String {
    let comps = &report.fit.components;
    let (lo, hi) = cloud.bounding_box().unwrap_or_default();
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (lo.x, lo.y, hi.x, hi.y);
    for c in comps {
        lo_x = lo_x.min(c.center.x);
        lo_y = lo_y.min(c.center.y);
        hi_x = hi_x.max(c.center.x);
        hi_y = hi_y.max(c.center.y);
    }
    let extent = (hi_x - lo_x).max(hi_y - lo_y).max(1e-12);
    let scale = (WIDTH - 2.0 * MARGIN) / extent;
    let sx = |x: f64| MARGIN + (x - lo_x) * scale;
    let sy = |y: f64| WIDTH - MARGIN - (y - lo_y) * scale;

    let mut out = String::new();
    header(&mut out, WIDTH, WIDTH);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{:?} constellation ({} points)</text>",
        WIDTH / 2.0,
        MARGIN / 2.0,
        report.category,
        cloud.len()
    );
    out.push_str("<g fill-opacity=\"0.6\">\n");
    for p in cloud.points() {
        let colour = PALETTE[report.fit.assign(p) % PALETTE.len()];
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\" fill=\"{colour}\"/>",
            sx(p.x),
            sy(p.y)
        );
    }
    out.push_str("</g>\n");
    for (k, c) in comps.iter().enumerate() {
        let (cx, cy) = (sx(c.center.x), sy(c.center.y));
        let colour = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"{colour}\" stroke-dasharray=\"4 3\"/>\
             <path d=\"M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}\" stroke=\"black\" stroke-width=\"2\"/>",
            c.sigma * scale,
            cx - 6.0,
            cy - 6.0,
            cx + 6.0,
            cy + 6.0,
            cx - 6.0,
            cy + 6.0,
            cx + 6.0,
            cy - 6.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Parses `svg` as XML; used as the output self-check.
pub fn validate_svg(svg: &str) -> Result<(), String> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| e.to_string())?;
    if doc.root_element().tag_name().name() != "svg" {
        return Err("root element is not <svg>".into());
    }
    Ok(())
}
