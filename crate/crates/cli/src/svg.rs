//! Minimal self-contained SVG line plots of the density.

use std::fmt::Write;

use talbot_core::{PlateauInterval, PlateauKind};

use crate::format::sig;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Density curve on `[0, 1/2]` with every plateau marked: a solid line at its
/// center and dashed lines at its endpoints.
pub fn density_plot(title: &str, xs: &[f64], ps: &[f64], plateaux: &[PlateauInterval]) -> String {
    let p_max = ps.iter().cloned().fold(0.0f64, f64::max);
    let y_top = if p_max > 0.0 { p_max * 1.05 } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / 0.5 * plot_w;
    let sy = |p: f64| TOP + plot_h * (1.0 - p / y_top);
    let px = |v: f64| format!("{v:.2}");

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (sx(0.0), sx(0.5), sy(0.0), sy(y_top));
    let _ = writeln!(
        out,
        r#"<path d="M{} {} L{} {} L{} {}" fill="none" stroke="black" stroke-width="1"/>"#,
        px(x0),
        px(y1),
        px(x0),
        px(y0),
        px(x1),
        px(y0)
    );
    for (x, label) in [(0.0, "0"), (0.25, "0.25"), (0.5, "0.5")] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            px(sx(x)),
            px(y0 + 16.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
        px(x0 - 6.0),
        px(y1 + 4.0),
        sig(y_top)
    );

    for i in plateaux {
        let (lo, hi) = (i.lo.to_f64(), i.hi.to_f64());
        let mid = i.midpoint().to_f64();
        let kind = match i.kind {
            PlateauKind::ZeroLevel => "zero",
            PlateauKind::Positive => "positive",
        };
        let _ = writeln!(
            out,
            r#"<g class="plateau" data-kind="{kind}" data-lo="{}" data-hi="{}" data-lo-decimal="{}" data-hi-decimal="{}">"#,
            i.lo,
            i.hi,
            sig(lo),
            sig(hi)
        );
        for x in [lo, hi] {
            let _ = writeln!(
                out,
                r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#555" stroke-width="1" stroke-dasharray="4 3"/>"##,
                px(sx(x)),
                px(y0),
                px(y1)
            );
        }
        let _ = writeln!(
            out,
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#c00" stroke-width="1"/>"##,
            px(sx(mid)),
            px(y0),
            px(y1)
        );
        let _ = writeln!(out, "</g>");
    }

    let points: Vec<String> = xs
        .iter()
        .zip(ps)
        .map(|(&x, &p)| format!("{},{}", px(sx(x)), px(sy(p))))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{}"/>"##,
        points.join(" ")
    );
    out.push_str("</svg>\n");
    out
}
