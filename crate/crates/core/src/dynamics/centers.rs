use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::{solve_wirtinger, ComplexParam, DynamicsError, C64};

/// Solves `f_c^k(0) = 0` by Newton's method on `c` viewed as a point of R^2.
///
/// `f_c^k(0)` depends on both `c` and `conj(c)`, so the derivatives with
/// respect to each are carried along the orbit and the step solves
/// `A dc + B conj(dc) = -F`.
pub fn find_center(d: u32, k: usize, seed: C64) -> Result<C64, DynamicsError> {
    assert!(k >= 1);
    let mut c = seed;
    let mut residual = f64::INFINITY;
    for _ in 0..200 {
        let (z, a, b) = critical_orbit_with_derivatives(d, k, c);
        residual = z.norm();
        if residual < 1e-13 {
            return Ok(c);
        }
        let step = solve_wirtinger(a, b, -z).ok_or(DynamicsError::JacobianSingular { potential: 0.0 })?;
        // damp steps that would leave the region where centers live
        let lim = 0.5 * (1.0 + c.norm());
        c += if step.norm() > lim { step * (lim / step.norm()) } else { step };
        if !(c.re.is_finite() && c.im.is_finite()) {
            break;
        }
    }
    let (z, _, _) = critical_orbit_with_derivatives(d, k, c);
    if z.norm() < 1e-12 {
        return Ok(c);
    }
    Err(DynamicsError::NoConvergence { iterations: 200, residual })
}

/// `f_c^k(0)` with its derivatives in `c` and `conj(c)`.
fn critical_orbit_with_derivatives(d: u32, k: usize, c: C64) -> (C64, C64, C64) {
    let df = d as f64;
    let zero = C64::new(0.0, 0.0);
    let (mut z, mut dz, mut dzb) = (zero, zero, zero);
    for _ in 0..k {
        let w = df * z.conj().powu(d - 1);
        let ndz = w * dzb.conj() + 1.0;
        let ndzb = w * dz.conj();
        z = z.conj().powu(d) + c;
        dz = ndz;
        dzb = ndzb;
    }
    (z, dz, dzb)
}

/// A parameter on the boundary of an odd-period hyperbolic component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub c: C64,
    /// The periodic point continued from the critical point at the center.
    pub z: C64,
    pub period: usize,
    pub theta: f64,
    /// Antiholomorphic derivative of `f_c^k` at `z`; of modulus one on the boundary.
    pub multiplier: C64,
}

/// `f_c^k(z)` and the derivative `D_k` of `f_c^k` at `z` (with respect to `z`
/// or `conj(z)`, whichever is non-zero).
pub fn orbit_and_multiplier(param: &ComplexParam, z: C64, k: usize) -> (C64, C64) {
    let df = param.d as f64;
    let mut w = z;
    let mut dd = C64::new(1.0, 0.0);
    for _ in 0..k {
        dd = df * w.conj().powu(param.d - 1) * dd.conj();
        w = param.f(w);
    }
    (w, dd)
}

fn boundary_residual(d: u32, k: usize, target: C64, x: &Vector4<f64>) -> Vector4<f64> {
    let param = ComplexParam { c: C64::new(x[0], x[1]), d };
    let z = C64::new(x[2], x[3]);
    let (w, dd) = orbit_and_multiplier(&param, z, k);
    let e = w - z;
    let m = dd - target;
    Vector4::new(e.re, e.im, m.re, m.im)
}

/// Continues the system `f_c^k(z) = z`, `D_k(z) = s e^{i theta}` from the
/// center (`z = 0`, `s = 0`) out to `s = 1`.
///
/// The start relies on `D_k` vanishing to first order at the critical point,
/// which holds for `d = 2`.
pub fn parabolic_boundary_point(d: u32, k: usize, center: C64, theta: f64) -> Result<BoundaryPoint, DynamicsError> {
    let mut x = Vector4::new(center.re, center.im, 0.0, 0.0);
    let steps = 40;
    for i in 1..=steps {
        let s = i as f64 / steps as f64;
        let target = C64::from_polar(s, theta);
        x = newton4(|v| boundary_residual(d, k, target, v), x)?;
    }
    let c = C64::new(x[0], x[1]);
    let z = C64::new(x[2], x[3]);
    let (_, dd) = orbit_and_multiplier(&ComplexParam { c, d }, z, k);
    Ok(BoundaryPoint { c, z, period: k, theta, multiplier: dd })
}

fn newton4<F: Fn(&Vector4<f64>) -> Vector4<f64>>(f: F, mut x: Vector4<f64>) -> Result<Vector4<f64>, DynamicsError> {
    let mut r = f(&x);
    for _ in 0..60 {
        if r.norm() < 1e-14 {
            return Ok(x);
        }
        let mut jac = Matrix4::zeros();
        for j in 0..4 {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            jac.set_column(j, &((f(&xp) - f(&xm)) / (2.0 * h)));
        }
        let step = jac.lu().solve(&(-r)).ok_or(DynamicsError::JacobianSingular { potential: 0.0 })?;
        let mut t = 1.0;
        loop {
            let xn = x + step * t;
            let rn = f(&xn);
            if rn.norm() < r.norm() || t < 1e-3 {
                x = xn;
                r = rn;
                break;
            }
            t *= 0.5;
        }
    }
    if r.norm() < 1e-11 {
        Ok(x)
    } else {
        Err(DynamicsError::NoConvergence { iterations: 60, residual: r.norm() })
    }
}
