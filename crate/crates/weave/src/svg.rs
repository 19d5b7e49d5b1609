//! Minimal SVG renderers. Only well-formedness is promised.

use std::fmt::Write;

use weave_core::weaver::WeavePlan;
use weave_core::DeviceLattice;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot of several series over a shared x axis.
pub fn line_plot(title: &str, x_label: &str, xs: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let (w, h, pad) = (720.0, 420.0, 50.0);
    let x0 = xs.first().copied().unwrap_or(0.0);
    let x1 = xs.last().copied().unwrap_or(1.0);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, ys) in series {
        for &y in ys {
            if y.is_finite() {
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
    }
    if !y0.is_finite() {
        y0 = 0.0;
        y1 = 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-300) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, w / 2.0, h - 12.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10">{y1:.4}</text>"#, 4.0, pad + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10">{y0:.4}</text>"#, 4.0, h - pad);
    for (k, (name, ys)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(_, y)| y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{colour}">{}</text>"#,
            w - pad + 4.0,
            pad + 14.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Grid picture of a plan: node qubits labelled with their vertex, static
/// connectors grey, dynamic connectors green, realized couplers drawn.
pub fn plan_layout(plan: &WeavePlan, device: &DeviceLattice) -> String {
    let cell = 60.0;
    let w = cell * device.cols() as f64 + cell;
    let h = cell * device.rows() as f64 + cell;
    let pos = |q: usize| {
        let qb = device.qubit(q);
        (cell * (qb.col as f64 + 1.0), cell * (qb.row as f64 + 1.0))
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for c in device.couplers() {
        let (a, b) = c.endpoints;
        let ((xa, ya), (xb, yb)) = (pos(a), pos(b));
        let _ = writeln!(s, r##"<line x1="{xa}" y1="{ya}" x2="{xb}" y2="{yb}" stroke="#dddddd" stroke-width="2"/>"##);
    }
    let draw = |edges: &[(usize, usize)], colour: &str, s: &mut String| {
        for &(a, b) in edges {
            let ((xa, ya), (xb, yb)) = (pos(a), pos(b));
            let _ = writeln!(s, r#"<line x1="{xa}" y1="{ya}" x2="{xb}" y2="{yb}" stroke="{colour}" stroke-width="4"/>"#);
        }
    };
    let direct: Vec<(usize, usize)> = plan
        .direct_edges
        .iter()
        .map(|&(u, v)| (plan.vertex_map[u], plan.vertex_map[v]))
        .collect();
    draw(&direct, "black", &mut s);
    for b in &plan.bridges {
        draw(&b.couplers(), if b.is_static() { "#555555" } else { "#2ca02c" }, &mut s);
    }
    for q in 0..device.qubit_count() {
        let (x, y) = pos(q);
        let (fill, label) = match plan.vertex_of(q) {
            Some(v) => ("#1f77b4", v.to_string()),
            None => match plan.bridges.iter().find(|b| b.connectors.contains(&q)) {
                Some(b) if b.is_static() => ("#ff7f0e", String::new()),
                Some(_) => ("#2ca02c", String::new()),
                None => ("#eeeeee", String::new()),
            },
        };
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="14" fill="{fill}" stroke="black"/>"#);
        if !label.is_empty() {
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" text-anchor="middle" font-size="12" fill="white">{label}</text>"#,
                y + 4.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
