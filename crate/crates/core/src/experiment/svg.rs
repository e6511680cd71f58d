use std::fmt::Write as _;

use super::run::ResultRow;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Series {
    id: String,
    /// (x, mean, min, max) in sweep order.
    points: Vec<(f64, f64, f64, f64)>,
}

fn series(rows: &[ResultRow]) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let Ok(v) = r.values else { continue };
        let x = r.sweep_value.unwrap_or(0.0);
        let idx = match out.iter().position(|s| s.id == r.estimator_id) {
            Some(i) => i,
            None => {
                out.push(Series { id: r.estimator_id.clone(), points: Vec::new() });
                out.len() - 1
            }
        };
        let pts = &mut out[idx].points;
        match pts.last_mut() {
            Some(last) if last.0 == x => {
                last.1 += v.ir;
                last.2 = last.2.min(v.ir);
                last.3 = last.3.max(v.ir);
            }
            _ => pts.push((x, v.ir, v.ir, v.ir)),
        }
    }
    // Means: the second slot held a running sum.
    for s in &mut out {
        for p in &mut s.points {
            let count = rows
                .iter()
                .filter(|r| r.is_ok() && r.estimator_id == s.id && r.sweep_value.unwrap_or(0.0) == p.0)
                .count();
            p.1 /= count as f64;
        }
    }
    out
}

/// Line plot of the mean rate per estimator with a min/max band over seeds.
pub fn render_svg(rows: &[ResultRow], sweep_param: &str) -> String {
    let all = series(rows);
    let xs = all.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let ys = all.iter().flat_map(|s| s.points.iter().flat_map(|p| [p.2, p.3]));
    let (mut y0, mut y1) = ys.fold((0.0f64, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if !y1.is_finite() || y1 <= y0 {
        (y0, y1) = (y0.min(0.0), y0.max(0.0) + 1.0);
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    writeln!(s, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#).unwrap();
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{:.3}</text>"#, px(xv), b + 16.0, xv)
            .unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.3}</text>"#, l - 6.0, py(yv) + 4.0, yv)
            .unwrap();
    }
    writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{sweep_param}</text>"#, W / 2.0, H - 12.0)
        .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">bits per use</text>"#,
        H / 2.0,
        H / 2.0
    )
    .unwrap();
    for (k, ser) in all.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let upper = ser.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.3)));
        let lower = ser.points.iter().rev().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.2)));
        let band: Vec<String> = upper.chain(lower).collect();
        writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band.join(" ")).unwrap();
        let line: Vec<String> = ser.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, line.join(" ")).unwrap();
        let ly = t + 14.0 * k as f64;
        writeln!(s, r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{color}">{}</text>"#, r - 150.0, ser.id).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
