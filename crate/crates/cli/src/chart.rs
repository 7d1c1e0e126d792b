//! Lobe diagram with the SLE colormap inside the stable region, as SVG.
//!
//! One `<rect class="cell">` per grid cell: stable cells take the colour of
//! their SLE band (grey when the SLE could not be computed), unstable cells are
//! white. Dashed paths mark interior band edges and carry the level in µm;
//! the solid line is the interpolated stability boundary.

use std::fmt::Write as _;

use chatter_core::fmt::significant;
use chatter_core::nalgebra::DMatrix;
use chatter_core::stability::SldGrid;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 730.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 490.0;

pub const UNSTABLE_FILL: &str = "#ffffff";
pub const MISSING_FILL: &str = "#bdbdbd";

const VIRIDIS: [(f64, f64, f64); 9] = [
    (68.0, 1.0, 84.0),
    (71.0, 44.0, 122.0),
    (59.0, 81.0, 139.0),
    (44.0, 113.0, 142.0),
    (33.0, 144.0, 141.0),
    (39.0, 173.0, 129.0),
    (92.0, 200.0, 99.0),
    (170.0, 220.0, 50.0),
    (253.0, 231.0, 37.0),
];

fn viridis(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (t.floor() as usize).min(VIRIDIS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Round step near `span / target` from the 1-2-2.5-5 sequence.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    if !(raw.is_finite() && raw > 0.0) {
        return 1.0;
    }
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw * (1.0 - 1e-12))
        .unwrap_or(10.0 * mag)
}

/// Band edges covering `[lo, hi]`.
pub fn levels(lo: f64, hi: f64, bands: usize) -> Vec<f64> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Vec::new();
    }
    if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return vec![lo - pad, hi + pad];
    }
    let step = nice_step(hi - lo, bands);
    let start = (lo / step).floor() as i64;
    let end = (hi / step).ceil() as i64;
    let decimals = (1 - step.log10().floor() as i32).max(0) as usize;
    (start..=end)
        .map(|k| format!("{:.*}", decimals, k as f64 * step).parse().unwrap_or(k as f64 * step))
        .collect()
}

fn band(value: f64, edges: &[f64]) -> usize {
    let n = edges.len() - 1;
    (0..n).find(|&b| value < edges[b + 1]).unwrap_or(n - 1)
}

/// Cell edges around ascending centres; a single centre gets a unit-relative width.
fn edges(centres: &[f64]) -> Vec<f64> {
    match centres.len() {
        0 => Vec::new(),
        1 => {
            let half = 0.5 * centres[0].abs().max(1.0) * 0.02;
            vec![centres[0] - half, centres[0] + half]
        }
        n => {
            let mut e = Vec::with_capacity(n + 1);
            e.push(centres[0] - 0.5 * (centres[1] - centres[0]));
            for w in centres.windows(2) {
                e.push(0.5 * (w[0] + w[1]));
            }
            e.push(centres[n - 1] + 0.5 * (centres[n - 1] - centres[n - 2]));
            e
        }
    }
}

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (RIGHT - LEFT)
    }

    fn y(&self, v: f64) -> f64 {
        BOTTOM - (v - self.y0) / (self.y1 - self.y0) * (BOTTOM - TOP)
    }
}

fn label(v: f64) -> String {
    significant(v, 4)
}

/// Marching-squares segments of `level` over squares whose corners are all stable with a finite SLE.
fn contour_segments(grid: &SldGrid, sle_um: &DMatrix<f64>, level: f64) -> Vec<[(f64, f64); 2]> {
    let (ns, nd) = grid.shape();
    let mut out = Vec::new();
    let usable = |i: usize, j: usize| grid.stable[(i, j)] && sle_um[(i, j)].is_finite();
    for i in 0..ns.saturating_sub(1) {
        for j in 0..nd.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if !corners.iter().all(|&(a, b)| usable(a, b)) {
                continue;
            }
            let pts: Vec<(f64, f64)> = corners.iter().map(|&(a, b)| (grid.speeds[a], grid.depths[b] * 1e3)).collect();
            let vals: Vec<f64> = corners.iter().map(|&(a, b)| sle_um[(a, b)]).collect();
            let mut crossings = Vec::new();
            for e in 0..4 {
                let (p, q) = (e, (e + 1) % 4);
                let (va, vb) = (vals[p], vals[q]);
                if (va < level) != (vb < level) {
                    let t = (level - va) / (vb - va);
                    crossings.push((
                        pts[p].0 + t * (pts[q].0 - pts[p].0),
                        pts[p].1 + t * (pts[q].1 - pts[p].1),
                    ));
                }
            }
            match crossings.len() {
                2 => out.push([crossings[0], crossings[1]]),
                // saddle: pair by the centre value
                4 => {
                    let centre = vals.iter().sum::<f64>() / 4.0;
                    if (centre < level) == (vals[0] < level) {
                        out.push([crossings[0], crossings[3]]);
                        out.push([crossings[1], crossings[2]]);
                    } else {
                        out.push([crossings[0], crossings[1]]);
                        out.push([crossings[2], crossings[3]]);
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Renders the chart. `sle` is in metres with `NaN` where undefined.
pub fn render(grid: &SldGrid, sle: &DMatrix<f64>, title: &str) -> String {
    let (ns, nd) = grid.shape();
    let sle_um = sle * 1e6;
    let valid: Vec<f64> = (0..ns)
        .flat_map(|i| (0..nd).map(move |j| (i, j)))
        .filter(|&(i, j)| grid.stable[(i, j)])
        .map(|(i, j)| sle_um[(i, j)])
        .filter(|v| v.is_finite())
        .collect();
    let lo = valid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = valid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let band_edges = levels(lo, hi, 8);
    let colour = |v: f64| -> String {
        if band_edges.len() < 2 || !v.is_finite() {
            return MISSING_FILL.into();
        }
        let n = band_edges.len() - 1;
        viridis((band(v, &band_edges) as f64 + 0.5) / n as f64)
    };

    let xs = edges(&grid.speeds);
    let ys: Vec<f64> = edges(&grid.depths).iter().map(|d| d * 1e3).collect();
    let axes = Axes {
        x0: xs.first().copied().unwrap_or(0.0),
        x1: xs.last().copied().unwrap_or(1.0),
        y0: ys.first().copied().unwrap_or(0.0),
        y1: ys.last().copied().unwrap_or(1.0),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"##
    );
    let _ = writeln!(s, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"##, 0.5 * (LEFT + RIGHT), xml(title));

    let _ = writeln!(s, r##"<g class="cells" shape-rendering="crispEdges">"##);
    for i in 0..ns {
        for j in 0..nd {
            // whole-pixel edges so neighbours meet without a seam
            let (x0, x1) = (axes.x(xs[i]).round(), axes.x(xs[i + 1]).round());
            let (y0, y1) = (axes.y(ys[j + 1]).round(), axes.y(ys[j]).round());
            let stable = grid.stable[(i, j)];
            let fill = if stable { colour(sle_um[(i, j)]) } else { UNSTABLE_FILL.into() };
            let _ = writeln!(
                s,
                r##"<rect class="cell" data-i="{i}" data-j="{j}" data-stable="{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"##,
                u8::from(stable),
                x0,
                y0,
                x1 - x0,
                y1 - y0
            );
        }
    }
    let _ = writeln!(s, "</g>");

    // interior band edges as labelled dashed contours
    if band_edges.len() > 2 {
        let _ = writeln!(s, r##"<g class="contours" fill="none" stroke="#222222" stroke-width="0.8" stroke-dasharray="4 3">"##);
        let mut labels = String::new();
        for &level in &band_edges[1..band_edges.len() - 1] {
            let segs = contour_segments(grid, &sle_um, level);
            if segs.is_empty() {
                continue;
            }
            let mut d = String::new();
            for [a, b] in &segs {
                let _ = write!(d, "M{:.2},{:.2}L{:.2},{:.2}", axes.x(a.0), axes.y(a.1), axes.x(b.0), axes.y(b.1));
            }
            let _ = writeln!(s, r##"<path class="contour" data-level="{}" d="{d}"/>"##, label(level));
            let [a, b] = segs[segs.len() / 2];
            let _ = writeln!(
                labels,
                r##"<text class="contour-label" x="{:.2}" y="{:.2}" font-size="10" fill="#111111">{}</text>"##,
                axes.x(0.5 * (a.0 + b.0)) + 2.0,
                axes.y(0.5 * (a.1 + b.1)) - 2.0,
                label(level)
            );
        }
        let _ = writeln!(s, "</g>");
        s.push_str(&labels);
    }

    // boundary
    if ns > 0 && nd > 0 {
        let boundary = grid.boundary();
        let mut d = String::new();
        for (i, b) in boundary.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, axes.x(grid.speeds[i]), axes.y(b * 1e3));
        }
        let _ = writeln!(s, r##"<path class="boundary" d="{d}" fill="none" stroke="#000000" stroke-width="1.5"/>"##);
    }

    // axes and ticks
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#000000"/>"##, RIGHT - LEFT, BOTTOM - TOP);
    let tick = |lo: f64, hi: f64| {
        let step = nice_step(hi - lo, 8);
        let mut v = (lo / step).ceil() * step;
        let mut out = Vec::new();
        while v <= hi + 1e-9 * step {
            out.push(v);
            v += step;
        }
        out
    };
    for v in tick(axes.x0, axes.x1) {
        let x = axes.x(v);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="#000000"/>"##, BOTTOM + 5.0);
        let _ = writeln!(s, r##"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##, BOTTOM + 19.0, label(v / 1e3));
    }
    for v in tick(axes.y0, axes.y1) {
        let y = axes.y(v);
        let _ = writeln!(s, r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000000"/>"##, LEFT - 5.0);
        let _ = writeln!(s, r##"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"##, LEFT - 8.0, y + 4.0, label(v));
    }
    let _ = writeln!(s, r##"<text x="{}" y="{}" text-anchor="middle">Spindle speed (krpm)</text>"##, 0.5 * (LEFT + RIGHT), BOTTOM + 40.0);
    let _ = writeln!(
        s,
        r##"<text transform="translate(28 {}) rotate(-90)" text-anchor="middle">Axial depth of cut (mm)</text>"##,
        0.5 * (TOP + BOTTOM)
    );

    // colour key, one block per band
    if band_edges.len() >= 2 {
        let n = band_edges.len() - 1;
        let (kx, kw) = (RIGHT + 40.0, 22.0);
        let kh = (BOTTOM - TOP) / n as f64;
        let _ = writeln!(s, r##"<text x="{kx}" y="{}">SLE (µm)</text>"##, TOP - 10.0);
        for b in 0..n {
            let y = BOTTOM - (b + 1) as f64 * kh;
            let _ = writeln!(
                s,
                r##"<rect class="key" x="{kx}" y="{y:.2}" width="{kw}" height="{kh:.2}" fill="{}" stroke="#000000" stroke-width="0.3"/>"##,
                viridis((b as f64 + 0.5) / n as f64)
            );
        }
        for (b, &e) in band_edges.iter().enumerate() {
            let y = BOTTOM - b as f64 * kh;
            let _ = writeln!(s, r##"<text x="{}" y="{:.2}">{}</text>"##, kx + kw + 6.0, y + 4.0, label(e));
        }
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn xml(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Reads back `(i, j, coloured)` for every cell rect, where coloured means a
/// non-white fill. Used to cross-check a chart against its lobe mask.
pub fn cell_mask(svg: &str) -> Vec<(usize, usize, bool)> {
    let attr = |tag: &str, name: &str| -> Option<String> {
        let key = format!(r##" {name}=""##);
        let start = tag.find(&key)? + key.len();
        let end = tag[start..].find('"')? + start;
        Some(tag[start..end].to_string())
    };
    svg.lines()
        .filter(|l| l.starts_with(r##"<rect class="cell""##))
        .filter_map(|tag| {
            let i = attr(tag, "data-i")?.parse().ok()?;
            let j = attr(tag, "data-j")?.parse().ok()?;
            let fill = attr(tag, "fill")?;
            Some((i, j, fill != UNSTABLE_FILL))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_levels() {
        assert_eq!(levels(0.0, 1.0, 5), vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
        let l = levels(-3.3, 7.1, 8);
        assert!(l[0] <= -3.3 && *l.last().unwrap() >= 7.1);
        assert_eq!(levels(2.0, 2.0, 8).len(), 2);
        assert!(levels(f64::INFINITY, f64::NEG_INFINITY, 8).is_empty());
    }

    #[test]
    fn bands_cover_edges() {
        let e = [0.0, 1.0, 2.0];
        assert_eq!(band(0.0, &e), 0);
        assert_eq!(band(1.0, &e), 1);
        assert_eq!(band(2.0, &e), 1);
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(viridis(0.0), "#440154");
        assert_eq!(viridis(1.0), "#fde725");
    }

    #[test]
    fn cell_edges() {
        assert_eq!(edges(&[1.0, 2.0, 4.0]), vec![0.5, 1.5, 3.0, 5.0]);
    }
}
