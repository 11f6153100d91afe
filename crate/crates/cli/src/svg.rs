//! Static picture of `W(A)` and `W_q(A)`: the hull of the numerical range
//! as a closed polyline and, for every shell sample `(z, h)`, the disk of
//! `W_q(A)` centered at `q z` with radius `sqrt(1-q^2) sqrt(h - |z|^2)`.

use std::fmt::Write;

use qopdist::quantcore::C64;

pub const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;
const MIN_RADIUS_PX: f64 = 1.5;

fn disk(z: C64, h: f64, q: f64) -> (C64, f64) {
    let qbar = (1.0 - q * q).max(0.0).sqrt();
    (z * q, qbar * (h - z.norm_sqr()).max(0.0).sqrt())
}

pub fn render(hull: &[C64], samples: &[(C64, f64, f64)], q: f64) -> String {
    let disks: Vec<(C64, f64)> = samples.iter().map(|&(z, h, _)| disk(z, h, q)).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut grow = |c: C64, r: f64| {
        x0 = x0.min(c.re - r);
        x1 = x1.max(c.re + r);
        y0 = y0.min(c.im - r);
        y1 = y1.max(c.im + r);
    };
    hull.iter().for_each(|&z| grow(z, 0.0));
    disks.iter().for_each(|&(c, r)| grow(c, r));
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let px = |z: C64| (SIZE / 2.0 + (z.re - cx) * scale, SIZE / 2.0 - (z.im - cy) * scale);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#).unwrap();
    writeln!(out, r#"<rect width="800" height="800" fill="white"/>"#).unwrap();
    writeln!(out, r##"<g fill="none" stroke="#1f77b4" stroke-opacity="0.25" stroke-width="1">"##).unwrap();
    let mut seen = std::collections::HashSet::new();
    for &(c, r) in &disks {
        let (x, y) = px(c);
        let circle = format!(r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#, (r * scale).max(MIN_RADIUS_PX));
        if seen.insert(circle.clone()) {
            writeln!(out, "{circle}").unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();
    let mut pts: Vec<String> = hull
        .iter()
        .map(|&z| {
            let (x, y) = px(z);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    if let Some(first) = pts.first().cloned() {
        pts.push(first);
    }
    writeln!(out, r#"<polyline fill="none" stroke="black" stroke-width="2" points="{}"/>"#, pts.join(" ")).unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
