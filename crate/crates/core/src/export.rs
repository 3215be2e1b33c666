//! Text renderings: the skeleton as Graphviz DOT and the slit sheets as SVG.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_complex::Complex64;

use crate::sheet_complex::{Side, SideRef, SheetComplex};
use crate::skeleton::{Skeleton, VertexKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT graph. Core sheets are boxes, family tails are dashed
/// ellipses joined by dashed edges, completion points are small circles.
/// Edges are labelled with the id of their ramification point.
pub fn skeleton_dot(s: &Skeleton) -> String {
    let mut out = String::from("graph skeleton {\n  node [fontname=\"Helvetica\"];\n");
    for (i, v) in s.vertices.iter().enumerate() {
        let style = match v.kind {
            VertexKind::Sheet(_) => "shape=box",
            VertexKind::Tail(_) => "shape=ellipse, style=dashed",
            VertexKind::Completion(_) => "shape=circle, width=0.2",
        };
        writeln!(out, "  n{i} [label={}, {style}];", quote(&v.label)).unwrap();
    }
    for e in &s.edges {
        let dash = if e.periodic { ", style=dashed" } else { "" };
        writeln!(out, "  n{} -- n{} [label={}{dash}];", e.a, e.b, quote(&s.rams[e.ram])).unwrap();
    }
    out.push_str("}\n");
    out
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
const PANEL: f64 = 240.0;
const MARGIN: f64 = 24.0;

/// How one slit side is drawn.
enum Mark {
    Glued(usize),
    Family(usize),
}

/// One panel per core sheet, laid out on a grid. Every panel shows the
/// same window of the plane: the base point, the slit feet and the slit
/// rays running from each foot away from the base point. Each glued pair of
/// sides gets its own colour and is drawn as a line offset towards the side
/// it stands for; sides continuing into a periodic family carry a `×∞`
/// badge instead.
pub fn sheet_svg(c: &SheetComplex) -> String {
    let mut marks: BTreeMap<SideRef, Mark> = BTreeMap::new();
    for (i, (a, b)) in c.gluing().iter().enumerate() {
        marks.insert(*a, Mark::Glued(i));
        marks.insert(*b, Mark::Glued(i));
    }
    for (i, f) in c.families().iter().enumerate() {
        marks.insert(f.attach, Mark::Family(i));
    }

    let z0 = c.z0();
    let pts: Vec<Complex64> =
        std::iter::once(z0).chain(c.protos().iter().flat_map(|p| p.slits.iter().map(|s| s.foot))).collect();
    let (mut lo, mut hi) = (z0, z0);
    for p in &pts {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let pad = 0.5 * (hi.re - lo.re).max(hi.im - lo.im).max(1.0);
    let (lo, hi) = (lo - Complex64::new(pad, pad), hi + Complex64::new(pad, pad));
    let scale = (PANEL - 2.0 * MARGIN) / (hi.re - lo.re).max(hi.im - lo.im);

    let sheets = c.core_sheets();
    let cols = (sheets.len() as f64).sqrt().ceil().max(1.0) as usize;
    let rows = sheets.len().div_ceil(cols).max(1);
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica\" font-size=\"11\">",
        w = cols as f64 * PANEL,
        h = rows as f64 * PANEL
    )
    .unwrap();
    for (si, sheet) in sheets.iter().enumerate() {
        let (ox, oy) = ((si % cols) as f64 * PANEL, (si / cols) as f64 * PANEL);
        let map = |z: Complex64| (ox + MARGIN + (z.re - lo.re) * scale, oy + PANEL - MARGIN - (z.im - lo.im) * scale);
        writeln!(out, "<g id={}>", quote(&format!("sheet-{}", sheet.id))).unwrap();
        writeln!(out, "<rect x=\"{ox}\" y=\"{oy}\" width=\"{PANEL}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#999\"/>").unwrap();
        writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", ox + 6.0, oy + 14.0, xml(&sheet.id)).unwrap();
        let (bx, by) = map(z0);
        writeln!(out, "<circle cx=\"{bx:.2}\" cy=\"{by:.2}\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>").unwrap();
        for (slit_ix, slit) in c.protos()[sheet.proto].slits.iter().enumerate() {
            let d = c.ray_direction(slit.foot);
            let far = slit.foot + d * exit_time(slit.foot, d, lo, hi);
            let ((fx, fy), (ex, ey)) = (map(slit.foot), map(far));
            writeln!(out, "<line x1=\"{fx:.2}\" y1=\"{fy:.2}\" x2=\"{ex:.2}\" y2=\"{ey:.2}\" stroke=\"black\" stroke-width=\"0.8\"/>").unwrap();
            writeln!(out, "<circle cx=\"{fx:.2}\" cy=\"{fy:.2}\" r=\"2\" fill=\"black\"/>").unwrap();
            for side in [Side::Top, Side::Bottom] {
                // Top is to the left of the ray direction; screen y points down.
                let sign = if side == Side::Top { 1.0 } else { -1.0 };
                let (nx, ny) = (-d.im * sign * 3.0, -d.re * sign * 3.0);
                match marks.get(&SideRef { sheet: si, slit: slit_ix, side }) {
                    Some(Mark::Glued(i)) => {
                        writeln!(
                            out,
                            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"2\"/>",
                            fx + nx,
                            fy + ny,
                            ex + nx,
                            ey + ny,
                            PALETTE[i % PALETTE.len()]
                        )
                        .unwrap();
                    }
                    Some(Mark::Family(i)) => {
                        let (tx, ty) = (0.5 * (fx + ex) + 4.0 * nx, 0.5 * (fy + ey) + 4.0 * ny);
                        writeln!(
                            out,
                            "<text x=\"{tx:.2}\" y=\"{ty:.2}\" text-anchor=\"middle\" fill=\"#555\">×∞ {}</text>",
                            xml(&c.families()[*i].id)
                        )
                        .unwrap();
                    }
                    None => {}
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Parameter at which `foot + t d` leaves the box `[lo, hi]`.
fn exit_time(foot: Complex64, d: Complex64, lo: Complex64, hi: Complex64) -> f64 {
    let axis = |p: f64, v: f64, a: f64, b: f64| {
        if v > 0.0 {
            (b - p) / v
        } else if v < 0.0 {
            (a - p) / v
        } else {
            f64::INFINITY
        }
    };
    axis(foot.re, d.re, lo.re, hi.re).min(axis(foot.im, d.im, lo.im, hi.im)).max(0.0)
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
