//! Parabolic machinery for odd-period parabolic parameters: Fatou coordinates,
//! Ecalle heights, cylinder projections, gate transit and the fixed-point index.

mod chart;
mod cylinder;
mod gate;
mod series;

pub use chart::{arc_point_with_height, critical_ecalle_height, normalize_equator, ChartDirection, ChartSettings, FatouChart, FatouPair};
pub use cylinder::{
    nearest_arc_phi, project_julia_to_cylinder, project_ray_to_cylinder, undecorated_certificate, HeightInterval, JuliaProjection,
    JuliaSettings, RayProjection, UndecoratedCertificate,
};
pub use gate::{fixed_point_index, gate_transit, wiggle_metric, GateStats, IndexResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{ComplexParam, DynamicsError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FatouError {
    #[error("not parabolic: |g(z0) - z0| = {fixed:e}, |g'(z0) - 1| = {multiplier:e}")]
    NotParabolic { fixed: f64, multiplier: f64 },
    #[error("cusp detected: quadratic coefficient {a:e}")]
    CuspDetected { a: f64 },
    #[error("point is outside the petal")]
    OutsidePetal,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("inconsistent antiholomorphic constant (spread {spread:e})")]
    InconsistentKappa { spread: f64 },
    #[error("height {h} out of range [{lo}, {hi}]")]
    HeightOutOfRange { h: f64, lo: f64, hi: f64 },
    #[error("ray misses the repelling petal")]
    RayMissesPetal,
    #[error("orbit never crosses the gate")]
    NoTransit,
    #[error("index quadrature did not converge")]
    QuadratureNotConverged,
    #[error("another fixed point is enclosed by the contour")]
    OtherFixedPointEnclosed,
    #[error("tail too short: {0} samples")]
    TailTooShort(usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Order of the Taylor jet of the return map kept about the parabolic point.
const JET_ORDER: usize = 24;

/// A parabolic cycle point of odd period `k` and the local expansion of the
/// first holomorphic return map `g = f_c^{2k}` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicData {
    pub c: C64,
    pub d: u32,
    pub k: usize,
    pub z0: C64,
    pub q: u32,
    /// Quadratic and cubic coefficients of `g(z0 + h) - z0`.
    pub a: C64,
    pub b: C64,
    pub multiplier: C64,
    /// Antiholomorphic derivative of `f_c^k` at `z0`.
    pub sigma: C64,
    /// Taylor coefficients of `g(z0 + h) - z0`.
    pub jet: Vec<C64>,
}

impl ParabolicData {
    pub fn param(&self) -> ComplexParam {
        ComplexParam { c: self.c, d: self.d }
    }

    /// `f_c^{2k}`.
    pub fn g(&self, z: C64) -> C64 {
        let p = self.param();
        (0..self.k).fold(z, |w, _| p.p(w))
    }

    /// `f_c^{2k}` and its derivative.
    pub fn g_with_derivative(&self, z: C64) -> (C64, C64) {
        let p = self.param();
        let mut w = z;
        let mut dw = C64::new(1.0, 0.0);
        for _ in 0..self.k {
            let (pw, dp) = p.p_with_derivative(w);
            dw *= dp;
            w = pw;
        }
        (w, dw)
    }

    /// The antiholomorphic map `f_c^k`.
    pub fn sigma_map(&self, z: C64) -> C64 {
        let p = self.param();
        (0..self.k).fold(z, |w, _| p.f(w))
    }

    /// Fixed-point index `b / a^2` of the double fixed point.
    pub fn residue_index(&self) -> C64 {
        self.b / (self.a * self.a)
    }
}

/// Locates the parabolic point near `z_seed` and expands the return map there.
pub fn parabolic_data(param: &ComplexParam, k: usize, z_seed: C64) -> Result<ParabolicData, FatouError> {
    assert!(k % 2 == 1, "period must be odd");
    let mut z0 = z_seed;
    // Newton on g'(z) = 1; the root is simple when the fixed point is double.
    for _ in 0..100 {
        let j = series::jet(param, k, z0, 2);
        if j[2].norm() == 0.0 {
            break;
        }
        let dz = (j[1] - 1.0) / (2.0 * j[2]);
        if dz.norm() > 0.1 {
            break;
        }
        z0 -= dz;
        if dz.norm() < 1e-16 * z0.norm().max(1.0) {
            break;
        }
    }
    let jet = series::jet(param, k, z0, JET_ORDER);
    let fixed = (jet[0] - z0).norm();
    let multiplier = jet[1];
    let (w, sigma) = crate::dynamics::orbit_and_multiplier(param, z0, k);
    if fixed > 1e-8 || (multiplier - 1.0).norm() > 1e-6 || (w - z0).norm() > 1e-6 {
        return Err(FatouError::NotParabolic { fixed: fixed.max((w - z0).norm()), multiplier: (multiplier - 1.0).norm() });
    }
    let mut jet = jet;
    jet[0] = C64::new(0.0, 0.0);
    let a = jet[2];
    if a.norm() < 1e-6 {
        return Err(FatouError::CuspDetected { a: a.norm() });
    }
    Ok(ParabolicData { c: param.c, d: param.d, k, z0, q: 1, a, b: jet[3], multiplier, sigma, jet })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::period1_arc_point;

    #[test]
    fn quarter() {
        let p = ComplexParam::new(C64::new(0.25, 0.0), 2);
        let pd = parabolic_data(&p, 1, C64::new(0.45, 0.02)).unwrap();
        assert!((pd.z0 - C64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((pd.multiplier - 1.0).norm() < 1e-10);
        assert_eq!(pd.q, 1);
        assert!((pd.a - 2.0).norm() < 1e-10 && (pd.b - 2.0).norm() < 1e-10);
        assert!((pd.residue_index() - 0.5).norm() < 1e-10);
    }

    #[test]
    fn cusp_and_superattracting() {
        let arc = period1_arc_point(2, std::f64::consts::PI / 3.0);
        let p = ComplexParam::new(arc.c, 2);
        assert!(matches!(parabolic_data(&p, 1, arc.z0), Err(FatouError::CuspDetected { .. })));
        let p = ComplexParam::new(C64::new(0.0, 0.0), 2);
        assert!(matches!(parabolic_data(&p, 1, C64::new(0.0, 0.0)), Err(FatouError::NotParabolic { .. })));
    }

    #[test]
    fn arc_points_are_parabolic() {
        for d in 2..=4u32 {
            for phi in [0.0, 0.3, -0.5] {
                let arc = period1_arc_point(d, phi);
                let pd = parabolic_data(&ComplexParam::new(arc.c, d), 1, arc.z0).unwrap();
                assert!((pd.z0 - arc.z0).norm() < 1e-8);
                assert!((pd.sigma.norm() - 1.0).abs() < 1e-10);
            }
        }
    }
}
