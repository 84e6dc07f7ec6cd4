//! Deterministic SVG rendering of a diagram scene. Element order is fixed
//! (background, regions, windows, cones, worldlines, collapse lines,
//! events, axes, captions) and every coordinate is written with three
//! decimals, so the same scene always produces the same bytes.

use std::fmt::Write;

use collapse_core::collapse_geometry::Region;
use collapse_core::Event;

use crate::diagram::{Scene, SegmentKind};

pub const WIDTH: f64 = 900.0;
pub const HEIGHT: f64 = 640.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 56.0;

const COLOR_UNCOLLAPSED: &str = "#f5d76e";
const COLOR_COLLAPSED_FIRST: &str = "#d66bc0";
const COLOR_COLLAPSED_SECOND: &str = "#6b9bd6";
const COLOR_COLLAPSED_BOTH: &str = "#79c279";
const COLOR_WINDOW: &str = "#f5a623";
const COLOR_DETECTOR: &str = "#1f3a5f";
const COLOR_PHOTON: &str = "#e0801a";
const COLOR_COLLAPSE_LINE: &str = "#c0392b";
const COLOR_CONE: &str = "#888888";

struct Mapper {
    ct_min: f64,
    ct_max: f64,
    x_min: f64,
    x_max: f64,
}

impl Mapper {
    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    // Screen y grows downward, ct grows upward.
    fn sy(&self, ct: f64) -> f64 {
        MARGIN_T
            + (self.ct_max - ct) / (self.ct_max - self.ct_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    fn pt(&self, e: Event) -> (f64, f64) {
        (self.sx(e.x), self.sy(e.ct))
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick label: plain decimal in a comfortable range, scientific outside it.
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e9 || a < 1e-3 {
        return format!("{:e}", v);
    }
    let s = format!("{:.4}", v);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn region_color(r: &Region, first_id: Option<&str>) -> &'static str {
    match r {
        Region::Uncollapsed => COLOR_UNCOLLAPSED,
        Region::CollapsedBy(id) => {
            if first_id == Some(id.as_str()) {
                COLOR_COLLAPSED_FIRST
            } else {
                COLOR_COLLAPSED_SECOND
            }
        }
        Region::CollapsedByBoth => COLOR_COLLAPSED_BOTH,
    }
}

fn line_el(out: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
    writeln!(
        out,
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {}/>"#,
        x1, y1, x2, y2, style
    )
    .unwrap();
}

pub fn render(scene: &Scene) -> String {
    let b = scene.bounds;
    let m = Mapper {
        ct_min: b.ct_min,
        ct_max: b.ct_max,
        x_min: b.x_min,
        x_max: b.x_max,
    };
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        WIDTH, HEIGHT, WIDTH, HEIGHT
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        WIDTH, HEIGHT
    )
    .unwrap();

    // Region cells, merged into horizontal runs of equal classification so
    // the file stays small at high resolution.
    if let Some(grid) = &scene.region_grid {
        let first_id = scene
            .measurements
            .first()
            .map(|s| s.detector_id.as_str().to_string());
        let d_ct = (b.ct_max - b.ct_min) / grid.n_ct() as f64;
        let d_x = (b.x_max - b.x_min) / grid.n_x() as f64;
        for i_ct in 0..grid.n_ct() {
            let ct_lo = b.ct_min + d_ct * i_ct as f64;
            let y = m.sy(ct_lo + d_ct);
            let h = m.sy(ct_lo) - y;
            let mut i_x = 0;
            while i_x < grid.n_x() {
                let region = grid.cell(i_ct, i_x);
                let mut run = 1;
                while i_x + run < grid.n_x() && grid.cell(i_ct, i_x + run) == region {
                    run += 1;
                }
                let x_lo = b.x_min + d_x * i_x as f64;
                let x = m.sx(x_lo);
                let w = m.sx(x_lo + d_x * run as f64) - x;
                writeln!(
                    out,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    x,
                    y,
                    w,
                    h,
                    region_color(region, first_id.as_deref())
                )
                .unwrap();
                i_x += run;
            }
        }
    }

    for w in &scene.windows {
        let pts: Vec<String> = w
            .vertices
            .iter()
            .map(|v| {
                let (x, y) = m.pt(*v);
                format!("{:.3},{:.3}", x, y)
            })
            .collect();
        writeln!(
            out,
            r#"<polygon points="{}" fill="{}" fill-opacity="0.45" stroke="none"/>"#,
            pts.join(" "),
            COLOR_WINDOW
        )
        .unwrap();
    }

    for c in &scene.light_cones {
        let (x1, y1) = m.pt(c.apex);
        let (x2, y2) = m.pt(c.end);
        line_el(
            &mut out,
            x1,
            y1,
            x2,
            y2,
            &format!(
                r#"stroke="{}" stroke-width="1.2" stroke-dasharray="3 3""#,
                COLOR_CONE
            ),
        );
    }

    for s in &scene.worldlines {
        let (x1, y1) = m.pt(s.a);
        let (x2, y2) = m.pt(s.b);
        let style = match s.kind {
            SegmentKind::Detector => format!(r#"stroke="{}" stroke-width="1.8""#, COLOR_DETECTOR),
            SegmentKind::Photon => format!(
                r#"stroke="{}" stroke-width="1.6" stroke-dasharray="6 3""#,
                COLOR_PHOTON
            ),
        };
        line_el(&mut out, x1, y1, x2, y2, &style);
    }

    for l in &scene.collapse_lines {
        if let Some((a, z)) = l.visible {
            let (x1, y1) = m.pt(a);
            let (x2, y2) = m.pt(z);
            line_el(
                &mut out,
                x1,
                y1,
                x2,
                y2,
                &format!(
                    r#"stroke="{}" stroke-width="1.8" stroke-dasharray="8 4""#,
                    COLOR_COLLAPSE_LINE
                ),
            );
        }
    }

    for e in &scene.events {
        let (x, y) = m.pt(e.event);
        writeln!(
            out,
            r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="#222222"/>"##,
            x, y
        )
        .unwrap();
        writeln!(
            out,
            r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12" fill="#222222">{}</text>"##,
            x + 6.0,
            y - 6.0,
            esc(&e.label)
        )
        .unwrap();
    }

    // Axes frame over the filled layers, then ticks and captions.
    writeln!(
        out,
        r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        MARGIN_L,
        MARGIN_T,
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    )
    .unwrap();
    const N_TICKS: usize = 5;
    for k in 0..N_TICKS {
        let f = k as f64 / (N_TICKS - 1) as f64;
        let xv = b.x_min + f * (b.x_max - b.x_min);
        let sx = m.sx(xv);
        line_el(
            &mut out,
            sx,
            HEIGHT - MARGIN_B,
            sx,
            HEIGHT - MARGIN_B + 5.0,
            r##"stroke="#333333" stroke-width="1""##,
        );
        writeln!(
            out,
            r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" fill="#333333" text-anchor="middle">{}</text>"##,
            sx,
            HEIGHT - MARGIN_B + 18.0,
            fmt_tick(xv)
        )
        .unwrap();
        let ctv = b.ct_min + f * (b.ct_max - b.ct_min);
        let sy = m.sy(ctv);
        line_el(
            &mut out,
            MARGIN_L - 5.0,
            sy,
            MARGIN_L,
            sy,
            r##"stroke="#333333" stroke-width="1""##,
        );
        writeln!(
            out,
            r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" fill="#333333" text-anchor="end">{}</text>"##,
            MARGIN_L - 8.0,
            sy + 4.0,
            fmt_tick(ctv)
        )
        .unwrap();
    }
    writeln!(
        out,
        r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="13" fill="#111111" text-anchor="middle">x [m]</text>"##,
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 14.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="16" y="{:.3}" font-family="sans-serif" font-size="13" fill="#111111" transform="rotate(-90 16 {:.3})" text-anchor="middle">ct [m]</text>"##,
        MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0,
        MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.3}" y="24" font-family="sans-serif" font-size="14" fill="#111111">frame {}</text>"##,
        MARGIN_L,
        esc(&scene.frame_label)
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}
