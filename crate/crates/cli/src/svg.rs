use std::fmt::Write;

use num_traits::ToPrimitive;

use staircase_core::scalar::IVec2;
use staircase_core::SpecializedQuad;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

fn unit(v: &IVec2) -> (f64, f64) {
    let (x, y) = (v.x.to_f64().unwrap_or(0.0), v.y.to_f64().unwrap_or(0.0));
    let n = x.hypot(y);
    if n == 0.0 {
        (0.0, 0.0)
    } else {
        (x / n, y / n)
    }
}

/// The quadrilateral `O X V Y` with its nodal rays drawn dashed.
pub fn render(q: &SpecializedQuad, k: usize) -> String {
    let f = q.to_f64();
    let (dx, dy) = unit(&q.dir_xv);
    let o = (0.0, 0.0);
    let x = (f.len_ox, 0.0);
    let v = (x.0 + f.len_xv * dx, x.1 + f.len_xv * dy);
    let y = (0.0, f.len_oy);
    let pts = [o, x, v, y];
    let extent = pts.iter().flat_map(|p| [p.0.abs(), p.1.abs()]).fold(f64::MIN_POSITIVE, f64::max);
    let ray_len = 0.2 * extent;
    let rays = [(x, &q.ray_x), (v, &q.ray_v), (y, &q.ray_y)].map(|(p, r)| {
        let (ux, uy) = unit(r);
        (p, (p.0 + ray_len * ux, p.1 + ray_len * uy))
    });
    let all = pts.iter().copied().chain(rays.iter().map(|r| r.1));
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (px, py) in all {
        lo_x = lo_x.min(px);
        lo_y = lo_y.min(py);
        hi_x = hi_x.max(px);
        hi_y = hi_y.max(py);
    }
    let scale = (SIZE - 2.0 * MARGIN) / (hi_x - lo_x).max(hi_y - lo_y).max(f64::MIN_POSITIVE);
    let map = |p: (f64, f64)| (MARGIN + (p.0 - lo_x) * scale, SIZE - MARGIN - (p.1 - lo_y) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>step {k}</title>");
    let poly: Vec<String> = pts.iter().map(|&p| {
        let (a, b) = map(p);
        format!("{a:.3},{b:.3}")
    }).collect();
    let _ = writeln!(s, r##"<polygon points="{}" fill="#e8eef7" stroke="black" stroke-width="1.5"/>"##, poly.join(" "));
    for (from, to) in rays {
        let (a, b) = map(from);
        let (c, d) = map(to);
        let _ = writeln!(
            s,
            r#"<line x1="{a:.3}" y1="{b:.3}" x2="{c:.3}" y2="{d:.3}" stroke="crimson" stroke-width="1.2" stroke-dasharray="6 4"/>"#
        );
    }
    for (label, p) in ["O", "X", "V", "Y"].iter().zip(pts) {
        let (a, b) = map(p);
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="12" font-family="sans-serif">{label}</text>"#, a + 4.0, b - 4.0);
    }
    s.push_str("</svg>\n");
    s
}
