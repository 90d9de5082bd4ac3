//! Static SVG for the velocity diagram.

use std::fmt::Write as _;

use fkwave_core::analysis::Diagram;

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 56.0;

struct Axis {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Axis {
    fn map(&self, x: f64) -> f64 {
        self.a + (x - self.lo) / (self.hi - self.lo) * (self.b - self.a)
    }
}

/// Tick positions at 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn label(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

pub fn diagram_svg(d: &Diagram, sigma_bounds: (f64, f64)) -> String {
    let ok: Vec<_> = d.points.iter().filter(|p| p.ok()).collect();
    let mut c_lo = ok.iter().map(|p| p.c).fold(0.0f64, f64::min);
    let mut c_hi = ok.iter().map(|p| p.c).fold(0.0f64, f64::max);
    if let Some(cr) = &d.critical {
        c_lo = c_lo.min(cr.c_minus.bracket.0).min(cr.c_plus.bracket.0);
        c_hi = c_hi.max(cr.c_minus.bracket.1).max(cr.c_plus.bracket.1);
    }
    if c_hi - c_lo < 1e-9 {
        c_lo -= 1.0;
        c_hi += 1.0;
    }
    let pad = 0.06 * (c_hi - c_lo);
    let (s_lo, s_hi) = sigma_bounds;
    let sx = Axis { lo: s_lo, hi: s_hi, a: LEFT, b: W - RIGHT };
    let cy = Axis { lo: c_lo - pad, hi: c_hi + pad, a: H - BOTTOM, b: TOP };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    if let Some((a, b)) = d.plateau {
        let (x0, x1) = (sx.map(a), sx.map(b));
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.2}" y="{TOP}" width="{:.2}" height="{:.2}" fill="#dddddd"><title>pinned [{a}, {b}]</title></rect>"##,
            (x1 - x0).max(1.0),
            H - TOP - BOTTOM
        );
    }

    // Axes and ticks.
    let (x_axis_y, y_axis_x) = (H - BOTTOM, LEFT);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{x_axis_y} H{}" fill="none" stroke="black"/>"#,
        W - RIGHT
    );
    for t in ticks(sx.lo, sx.hi) {
        let x = sx.map(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{x_axis_y}" x2="{x:.2}" y2="{}" stroke="black"/>"#, x_axis_y + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, x_axis_y + 19.0, label(t));
    }
    for t in ticks(cy.lo, cy.hi) {
        let y = cy.map(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{y_axis_x}" y2="{y:.2}" stroke="black"/>"#, y_axis_x - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, y_axis_x - 8.0, y + 4.0, label(t));
    }
    let zero = cy.map(0.0);
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT}" y1="{zero:.2}" x2="{}" y2="{zero:.2}" stroke="#888888" stroke-dasharray="4 3"/>"##,
        W - RIGHT
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">σ</text>"#, 0.5 * (LEFT + W - RIGHT), H - 14.0);
    let _ = writeln!(s, r#"<text x="18" y="{}" text-anchor="middle">c</text>"#, 0.5 * (TOP + H - BOTTOM));

    // The curve.
    let pts: Vec<String> = ok.iter().map(|p| format!("{:.2},{:.2}", sx.map(p.sigma), cy.map(p.c))).collect();
    if !pts.is_empty() {
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }
    for p in &ok {
        let fill = if p.pinned { "#777777" } else { "#1f5fa8" };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{fill}"><title>σ = {}, c = {}</title></circle>"#,
            sx.map(p.sigma),
            cy.map(p.c),
            p.sigma,
            p.c
        );
    }
    for p in d.points.iter().filter(|p| !p.ok()) {
        let x = sx.map(p.sigma);
        let _ = writeln!(
            s,
            r##"<path d="M{:.2},{:.2} l6,6 m0,-6 l-6,6" stroke="#c0392b"><title>σ = {}: failed</title></path>"##,
            x - 3.0,
            zero - 3.0,
            p.sigma
        );
    }

    // Critical velocities at the ends, with their refinement brackets.
    if let Some(cr) = &d.critical {
        for (side, x_sigma, name, anchor, dx) in [
            (&cr.c_plus, s_hi, "c+", "end", -8.0),
            (&cr.c_minus, s_lo, "c-", "start", 8.0),
        ] {
            let x = sx.map(x_sigma);
            let (y0, y1) = (cy.map(side.bracket.0), cy.map(side.bracket.1));
            let _ = writeln!(
                s,
                r##"<path d="M{:.2},{y0:.2} h8 m-4,0 V{y1:.2} m-4,0 h8" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
                x - 4.0
            );
            let y = cy.map(side.last);
            let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#c0392b"/>"##);
            let _ = writeln!(
                s,
                r##"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}" fill="#c0392b">{name} = {:.4}</text>"##,
                x + dx,
                y + 4.0,
                side.last
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
