//! Minimal SVG line plot of a response table.

use std::fmt::Write as _;

use crate::table::ResponseTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// Magnitude in dB against frequency in units of π, clipped to `[floor_db, top]`.
pub fn magnitude_svg(table: &ResponseTable, title: &str, floor_db: f64) -> String {
    let peak = table
        .rows
        .iter()
        .map(|r| r.magnitude_db)
        .fold(f64::NEG_INFINITY, f64::max);
    let top = (peak / 10.0).ceil() * 10.0;
    let top = if top.is_finite() {
        top.max(floor_db + 10.0)
    } else {
        0.0
    };
    let x = |w: f64| MARGIN + w * (WIDTH - 2.0 * MARGIN);
    let y = |db: f64| {
        let db = db.clamp(floor_db, top);
        MARGIN + (top - db) / (top - floor_db) * (HEIGHT - 2.0 * MARGIN)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let step = nice_step(top - floor_db);
    let mut db = top;
    while db >= floor_db - 1e-9 {
        let yy = y(db);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{db}</text>"##,
            WIDTH - MARGIN,
            MARGIN - 6.0,
            yy + 4.0
        );
        db -= step;
    }
    for i in 0..=10 {
        let w = i as f64 / 10.0;
        let xx = x(w);
        let _ = writeln!(
            s,
            r##"<line x1="{xx:.2}" y1="{MARGIN}" x2="{xx:.2}" y2="{:.2}" stroke="#ddd"/><text x="{xx:.2}" y="{:.2}" text-anchor="middle">{w:.1}</text>"##,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">ω / π</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">magnitude (dB)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let points: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", x(r.omega), y(r.magnitude_db)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f5fbf" stroke-width="1.5" points="{}"/>"##,
        points.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

fn nice_step(range: f64) -> f64 {
    [5.0, 10.0, 20.0, 25.0, 50.0, 100.0]
        .into_iter()
        .find(|&st| range / st <= 10.0)
        .unwrap_or(200.0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
