use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{parabolic_data, ChartSettings, FatouChart, FatouError, FatouPair, ParabolicData};
use crate::angles::Angle;
use crate::dynamics::{period1_arc_point, trace_dynamical_ray, ComplexParam, StepPolicy, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightInterval {
    pub l: f64,
    pub u: f64,
}

impl HeightInterval {
    pub fn width(&self) -> f64 {
        self.u - self.l
    }

    /// `|l + u| / (u - l)`; zero for an interval of the form `[-h, h]`.
    pub fn asymmetry(&self) -> f64 {
        (self.l + self.u).abs() / self.width()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayProjection {
    pub c: C64,
    pub angle: Angle,
    pub z0: C64,
    pub interval: HeightInterval,
    /// `(r, z, psi)` for the samples covering one fundamental domain.
    pub samples: Vec<(f64, C64, C64)>,
    pub anchor: C64,
}

/// Potential reached by the traced ray, as the excess `r - 1`.
const RAY_DEPTH: f64 = 1e-10;

/// Projects the dynamical ray `R_c(t)` into the repelling Ecalle cylinder of
/// the parabolic point it lands on. The ray must be fixed by `f^{2k}`.
pub fn project_ray_to_cylinder(
    param: &ComplexParam,
    k: usize,
    t: &Angle,
    settings: ChartSettings,
) -> Result<RayProjection, FatouError> {
    let big_d = (param.d * param.d) as u64;
    let period_factor = big_d.pow(k as u32) as f64;
    if t.scale(&(big_d.pow(k as u32)).into()) != *t {
        return Err(FatouError::RayMissesPetal);
    }
    let policy = StepPolicy { fine_below: 4.0 * period_factor * RAY_DEPTH, ..StepPolicy::default() };
    let trace = trace_dynamical_ray(param, t, 1.0 + RAY_DEPTH, &policy)?;
    if !trace.completed() {
        return Err(FatouError::RayMissesPetal);
    }
    let end = trace.endpoint().ok_or(FatouError::RayMissesPetal)?;
    let data = parabolic_data(param, k, end)?;
    let chart = FatouChart::new(&data, super::ChartDirection::Repelling, settings)?;
    let mut samples = Vec::new();
    let mut first_re = None;
    for s in trace.samples.iter().rev() {
        let psi = chart.coordinate(s.z).map_err(|_| FatouError::RayMissesPetal)?;
        samples.push((s.r, s.z, psi));
        let r0 = *first_re.get_or_insert(psi.re);
        if psi.re - r0 >= 1.0 {
            break;
        }
    }
    let span = samples.last().map(|x| x.2.re).unwrap_or(0.0) - samples[0].2.re;
    if span < 1.0 {
        return Err(FatouError::RayMissesPetal);
    }
    let l = samples.iter().map(|x| x.2.im).fold(f64::INFINITY, f64::min);
    let u = samples.iter().map(|x| x.2.im).fold(f64::NEG_INFINITY, f64::max);
    Ok(RayProjection { c: param.c, angle: t.clone(), z0: data.z0, interval: HeightInterval { l, u }, samples, anchor: chart.anchor })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JuliaSettings {
    pub probes: usize,
    pub step: f64,
    pub max_height: f64,
    pub tolerance: f64,
    /// `|w|` of the deep petal point from which each probe point is pushed forward.
    pub depth: f64,
    pub max_iter: usize,
}

impl Default for JuliaSettings {
    fn default() -> Self {
        JuliaSettings { probes: 1024, step: 0.05, max_height: 8.0, tolerance: 1e-5, depth: 400.0, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuliaProjection {
    /// Smallest and largest first-crossing `|height|` over both boundary curves.
    pub h: f64,
    pub big_h: f64,
    /// `(x, upper crossing, lower crossing)` per probe.
    pub curves: Vec<(f64, f64, f64)>,
    /// `max |upper(x) + lower(x + 1/2)|`, zero for an exactly symmetric projection.
    pub mirror_error: f64,
}

/// Whether the orbit of the point of the repelling petal at cylinder
/// coordinate `zeta` escapes.
fn escapes(chart: &FatouChart, zeta: C64, js: &JuliaSettings) -> bool {
    let m = &chart.model;
    let target = zeta - chart.offset() - js.depth;
    // invert w - L log(-w) + c1/w = target far out in the repelling direction
    let mut w = target;
    for _ in 0..100 {
        let next = target + m.log_coefficient * (-w).ln() - m.c1 / w;
        let done = (next - w).norm() < 1e-14 * w.norm();
        w = next;
        if done {
            break;
        }
    }
    let data = &chart.data;
    let escape = data.param().escape_radius();
    let w_switch = 1.0 / (m.a.norm() * m.r_switch);
    let mut iter = 0;
    while w.norm() > w_switch && iter < js.max_iter {
        w = m.forward(w);
        iter += 1;
    }
    let mut z = m.to_z(w);
    while iter < js.max_iter {
        z = data.g(z);
        iter += 1;
        if !(z.norm() < escape) {
            return true;
        }
        let h = z - data.z0;
        if h.norm() < m.r_switch && m.to_w(z).re > 50.0 {
            return false;
        }
    }
    false
}

/// First height along the vertical line through `x` (upwards for `dir = 1`)
/// where the orbit stops escaping.
fn first_crossing(chart: &FatouChart, x: f64, dir: f64, js: &JuliaSettings) -> f64 {
    let mut lo = 0.0;
    let mut hi = None;
    let mut y = js.step;
    while y <= js.max_height {
        if !escapes(chart, C64::new(x, dir * y), js) {
            hi = Some(y);
            break;
        }
        lo = y;
        y += js.step;
    }
    let Some(mut hi) = hi else {
        return dir * js.max_height;
    };
    while hi - lo > js.tolerance {
        let mid = 0.5 * (lo + hi);
        if escapes(chart, C64::new(x, dir * mid), js) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    dir * 0.5 * (lo + hi)
}

/// Boundary curves of the escaping annulus around the equator in the
/// repelling cylinder, probed along vertical lines.
pub fn project_julia_to_cylinder(data: &ParabolicData, settings: ChartSettings, js: &JuliaSettings) -> Result<JuliaProjection, FatouError> {
    let chart = FatouChart::new(data, super::ChartDirection::Repelling, settings)?;
    if !escapes(&chart, C64::new(0.0, 0.0), js) {
        return Err(FatouError::NoConvergence("equator does not escape".into()));
    }
    let n = js.probes.max(2) & !1;
    let curves: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 / n as f64;
            (x, first_crossing(&chart, x, 1.0, js), first_crossing(&chart, x, -1.0, js))
        })
        .collect();
    let h = curves.iter().map(|c| c.1.min(-c.2)).fold(f64::INFINITY, f64::min);
    let big_h = curves.iter().map(|c| c.1.max(-c.2)).fold(0.0, f64::max);
    let mirror_error = (0..n).map(|j| (curves[j].1 + curves[(j + n / 2) % n].2).abs()).fold(0.0, f64::max);
    Ok(JuliaProjection { h, big_h, curves, mirror_error })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UndecoratedCertificate {
    pub c: C64,
    pub d: u32,
    pub phi: f64,
    pub h: f64,
    pub big_h: f64,
    /// Bounds `2h <= modulus <= 2H` for the escaping annulus.
    pub modulus_lower: f64,
    pub modulus_upper: f64,
    pub mirror_error: f64,
    pub floor: f64,
    pub positive: bool,
}

/// Angle `phi` of the period-1 arc point nearest to `c`.
pub fn nearest_arc_phi(c: C64, d: u32) -> f64 {
    let dist = |phi: f64| (period1_arc_point(d, phi).c - c).norm();
    let grid = 720;
    let mut best = (0..grid).map(|i| std::f64::consts::TAU * i as f64 / grid as f64).fold(0.0, |b, p| if dist(p) < dist(b) { p } else { b });
    let mut step = std::f64::consts::TAU / grid as f64;
    while step > 1e-15 {
        for cand in [best - step, best + step] {
            if dist(cand) < dist(best) {
                best = cand;
            }
        }
        step *= 0.5;
    }
    best
}

/// Locates `c` on the period-1 arc family and certifies a round sub-cylinder
/// of the escaping annulus of half-height at least `floor`.
pub fn undecorated_certificate(
    c: C64,
    d: u32,
    floor: f64,
    settings: ChartSettings,
    js: &JuliaSettings,
) -> Result<UndecoratedCertificate, FatouError> {
    let dist = |phi: f64| (period1_arc_point(d, phi).c - c).norm();
    let best = nearest_arc_phi(c, d);
    let arc = period1_arc_point(d, best);
    let data = parabolic_data(&ComplexParam::new(c, d), 1, arc.z0)?;
    if dist(best) > 1e-8 {
        return Err(FatouError::NotParabolic { fixed: dist(best), multiplier: (data.multiplier - 1.0).norm() });
    }
    let proj = project_julia_to_cylinder(&data, settings, js)?;
    Ok(UndecoratedCertificate {
        c,
        d,
        phi: best,
        h: proj.h,
        big_h: proj.big_h,
        modulus_lower: 2.0 * proj.h,
        modulus_upper: 2.0 * proj.big_h,
        mirror_error: proj.mirror_error,
        floor,
        positive: proj.h >= floor,
    })
}

impl FatouPair {
    pub fn parabolic(&self) -> &ParabolicData {
        &self.attracting.data
    }
}
