//! Escape-time images of multicorns and filled Julia sets, with polyline overlays.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{period1_arc_point, ComplexParam, RayTrace, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Overlay {
    Ray { trace: RayTrace, color: [u8; 3] },
    Polyline { points: Vec<[f64; 2]>, color: [u8; 3] },
    Marker { at: [f64; 2], radius: f64, color: [u8; 3] },
}

impl Overlay {
    pub fn ray(trace: RayTrace, color: [u8; 3]) -> Self {
        Overlay::Ray { trace, color }
    }

    pub fn polyline(points: &[C64], color: [u8; 3]) -> Self {
        Overlay::Polyline { points: points.iter().map(|z| [z.re, z.im]).collect(), color }
    }

    fn points(&self) -> Vec<C64> {
        match self {
            Overlay::Ray { trace, .. } => trace.samples.iter().map(|s| s.z).collect(),
            Overlay::Polyline { points, .. } => points.iter().map(|p| C64::new(p[0], p[1])).collect(),
            Overlay::Marker { at, .. } => vec![C64::new(at[0], at[1])],
        }
    }

    fn color(&self) -> [u8; 3] {
        match self {
            Overlay::Ray { color, .. } | Overlay::Polyline { color, .. } | Overlay::Marker { color, .. } => *color,
        }
    }
}

/// Closed polyline of the period-1 parabolic arcs `c(phi)`, `n` samples.
pub fn arc_polyline(d: u32, n: usize) -> Vec<C64> {
    (0..=n).map(|i| period1_arc_point(d, std::f64::consts::TAU * i as f64 / n as f64).c).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub center: C64,
    /// Width of the view in the complex plane.
    pub width: f64,
    pub pixels: (u32, u32),
    pub max_iter: usize,
    /// Bailout radius for coloring; a large value gives smooth bands.
    pub escape_radius: f64,
    pub palette: u32,
    pub overlays: Vec<Overlay>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            center: C64::new(0.0, 0.0),
            width: 4.5,
            pixels: (600, 600),
            max_iter: 1000,
            escape_radius: 1e3,
            palette: 0,
            overlays: Vec::new(),
        }
    }
}

impl RenderConfig {
    fn validate(&self) {
        assert!(self.pixels.0 > 0 && self.pixels.1 > 0, "pixel dimensions must be positive");
        assert!(self.width > 0.0, "width must be positive");
    }

    fn scale(&self) -> f64 {
        self.width / self.pixels.0 as f64
    }

    /// Complex coordinate of the centre of pixel `(i, j)`; rows run top to bottom.
    pub fn pixel_to_point(&self, i: u32, j: u32) -> C64 {
        let s = self.scale();
        C64::new(
            self.center.re + (i as f64 + 0.5 - self.pixels.0 as f64 / 2.0) * s,
            self.center.im - (j as f64 + 0.5 - self.pixels.1 as f64 / 2.0) * s,
        )
    }

    /// Continuous pixel coordinates of a point.
    pub fn point_to_pixel(&self, z: C64) -> (f64, f64) {
        let s = self.scale();
        (
            (z.re - self.center.re) / s + self.pixels.0 as f64 / 2.0,
            -(z.im - self.center.im) / s + self.pixels.1 as f64 / 2.0,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub data: Vec<[u8; 3]>,
}

impl Image {
    pub fn pixel(&self, i: u32, j: u32) -> [u8; 3] {
        self.data[(j * self.width + i) as usize]
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.data.len() * 3);
        for p in &self.data {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_ppm())
    }
}

const INTERIOR: [u8; 3] = [0, 0, 0];

/// Smooth escape value, or `None` for points that stay bounded.
fn escape_value(param: &ComplexParam, z0: C64, max_iter: usize, radius: f64) -> Option<f64> {
    let r2 = radius * radius;
    let mut z = z0;
    for n in 0..max_iter {
        if z.norm_sqr() > r2 {
            let d = param.d as f64;
            return Some(n as f64 + 1.0 - (z.norm().ln().ln() - radius.ln().ln()) / d.ln());
        }
        z = param.f(z);
    }
    None
}

fn color(value: Option<f64>, palette: u32) -> [u8; 3] {
    let Some(v) = value else { return INTERIOR };
    let t = (v.max(0.0) + 1.0).ln();
    match palette {
        1 => {
            let g = (255.0 * (0.5 + 0.5 * (t * 2.0).cos())) as u8;
            [g, g, g]
        }
        _ => {
            let r = 0.5 + 0.5 * (3.0 * t).cos();
            let g = 0.5 + 0.5 * (3.0 * t + 0.9).cos();
            let b = 0.5 + 0.5 * (3.0 * t + 1.9).cos();
            [(40.0 + 215.0 * r) as u8, (40.0 + 215.0 * g) as u8, (60.0 + 195.0 * b) as u8]
        }
    }
}

fn render_with<F: Fn(C64) -> Option<f64> + Sync>(config: &RenderConfig, value: F) -> (Image, OverlayReport) {
    config.validate();
    let (w, h) = config.pixels;
    let mut data = vec![INTERIOR; (w * h) as usize];
    data.par_chunks_mut(w as usize).enumerate().for_each(|(j, row)| {
        for (i, px) in row.iter_mut().enumerate() {
            *px = color(value(config.pixel_to_point(i as u32, j as u32)), config.palette);
        }
    });
    let mut img = Image { width: w, height: h, data };
    let report = overlay(&mut img, config, &config.overlays);
    (img, report)
}

/// Parameter plane: the critical orbit `0, c, ...` of `f_c`.
pub fn render_multicorn(d: u32, config: &RenderConfig) -> (Image, OverlayReport) {
    render_with(config, |c| {
        let p = ComplexParam::new(c, d);
        escape_value(&p, p.f(C64::new(0.0, 0.0)), config.max_iter, config.escape_radius.max(p.escape_radius()))
    })
}

/// Dynamical plane of `f_c`.
pub fn render_julia(c: C64, d: u32, config: &RenderConfig) -> (Image, OverlayReport) {
    let p = ComplexParam::new(c, d);
    let radius = config.escape_radius.max(p.escape_radius());
    render_with(config, |z| escape_value(&p, z, config.max_iter, radius))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlayReport {
    pub segments_drawn: usize,
    pub segments_clipped: usize,
}

fn blend(px: &mut [u8; 3], color: [u8; 3], alpha: f64) {
    for k in 0..3 {
        px[k] = (px[k] as f64 * (1.0 - alpha) + color[k] as f64 * alpha).round() as u8;
    }
}

/// Distance-based anti-aliased strokes; segments wholly outside the frame are
/// skipped and counted.
pub fn overlay(img: &mut Image, config: &RenderConfig, overlays: &[Overlay]) -> OverlayReport {
    let mut report = OverlayReport::default();
    let half = 0.75;
    let (w, h) = (img.width as f64, img.height as f64);
    for ov in overlays {
        let pts: Vec<(f64, f64)> = ov.points().into_iter().map(|z| config.point_to_pixel(z)).collect();
        let segs: Vec<((f64, f64), (f64, f64), f64)> = match ov {
            Overlay::Marker { radius, .. } => vec![(pts[0], pts[0], *radius / config.scale())],
            _ => pts.windows(2).map(|s| (s[0], s[1], half)).collect(),
        };
        for (p, q, width) in segs {
            let (x0, x1) = (p.0.min(q.0) - width - 1.0, p.0.max(q.0) + width + 1.0);
            let (y0, y1) = (p.1.min(q.1) - width - 1.0, p.1.max(q.1) + width + 1.0);
            if x1 < 0.0 || y1 < 0.0 || x0 > w || y0 > h || !(x0.is_finite() && y0.is_finite()) {
                report.segments_clipped += 1;
                continue;
            }
            report.segments_drawn += 1;
            let (ia, ib) = (x0.max(0.0) as u32, (x1.min(w - 1.0)) as u32);
            let (ja, jb) = (y0.max(0.0) as u32, (y1.min(h - 1.0)) as u32);
            for j in ja..=jb {
                for i in ia..=ib {
                    let dist = segment_distance((i as f64 + 0.5, j as f64 + 0.5), p, q);
                    let alpha = (width + 0.5 - dist).clamp(0.0, 1.0);
                    if alpha > 0.0 {
                        let idx = (j * img.width + i) as usize;
                        blend(&mut img.data[idx], ov.color(), alpha);
                    }
                }
            }
        }
    }
    report
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}
