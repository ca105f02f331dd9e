use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::C64;

/// A point of the period-1 parabolic arc family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period1ArcPoint {
    pub phi: f64,
    pub z0: C64,
    pub c: C64,
}

fn rho(d: u32) -> f64 {
    (d as f64).powf(1.0 / (1.0 - d as f64))
}

pub fn period1_arc_point(d: u32, phi: f64) -> Period1ArcPoint {
    assert!(d >= 2);
    let z0 = C64::from_polar(rho(d), phi);
    let c = z0 - z0.conj().powu(d);
    Period1ArcPoint { phi, z0, c }
}

/// `dc/dphi = i rho e^{i phi} + i d rho^d e^{-i d phi}`.
pub fn arc_velocity(d: u32, phi: f64) -> C64 {
    let r = rho(d);
    let i = C64::new(0.0, 1.0);
    i * r * C64::from_polar(1.0, phi) + i * (d as f64) * r.powi(d as i32) * C64::from_polar(1.0, -(d as f64) * phi)
}

/// The `d + 1` zeros of the arc velocity in `[0, 2 pi)`.
///
/// Since `d rho^d = rho`, the velocity rotated by `i rho e^{i phi} e^{-i (d+1) phi / 2}`
/// is the real function `2 rho cos((d+1) phi / 2)`; its sign changes are bracketed on
/// a fine grid and bisected.
pub fn cusp_angles(d: u32) -> Vec<f64> {
    let n = d as f64 + 1.0;
    let g = |phi: f64| {
        let v = arc_velocity(d, phi);
        let rot = C64::new(0.0, rho(d)) * C64::from_polar(1.0, phi) * C64::from_polar(1.0, -n * phi / 2.0);
        (v / rot).re
    };
    let steps = 64 * (d as usize + 1);
    let h = TAU / steps as f64;
    let mut out = Vec::new();
    // start slightly below 0 so a root at 0 is not missed; none exists since cos(0) = 1
    for i in 0..steps {
        let (mut a, mut b) = (i as f64 * h, (i + 1) as f64 * h);
        let (fa, fb) = (g(a), g(b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (g(m) > 0.0) == (fa > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}
