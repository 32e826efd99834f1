use std::fmt::Write;

use rcs::{Point2, Scene};

/// Render the scene with one `<polygon>` per obstacle and one `<path>` per
/// route. The y axis points up.
pub fn render(scene: &Scene, routes: &[&[Point2]]) -> String {
    let (mut lo, mut hi) = scene.bounds();
    for p in routes.iter().flat_map(|r| r.iter()) {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = 0.05 * (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let stroke = w.max(h) / 400.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {w} {h}" width="800" height="{}">"#,
        lo.x - pad,
        -hi.y - pad,
        (800.0 * h / w).round()
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" stroke-width="{stroke}">"#);
    for poly in &scene.obstacles {
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#9aa5b1" stroke="#52606d"/>"##,
            points(poly)
        );
    }
    for route in routes {
        let mut d = String::new();
        for (i, p) in route.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, p.x, p.y);
        }
        let _ = writeln!(out, r##"<path d="{d}" fill="none" stroke="#d64545"/>"##);
    }
    let r = 3.0 * stroke;
    let _ = writeln!(
        out,
        r##"<circle cx="{}" cy="{}" r="{r}" fill="#2f8132"/>"##,
        scene.source.x, scene.source.y
    );
    if let Some(t) = scene.target {
        let _ = writeln!(out, r##"<circle cx="{}" cy="{}" r="{r}" fill="#1f5fa8"/>"##, t.x, t.y);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn points(poly: &[Point2]) -> String {
    poly.iter()
        .map(|p| format!("{},{}", p.x, p.y))
        .collect::<Vec<_>>()
        .join(" ")
}
