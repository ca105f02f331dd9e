//! Floating-point dynamics of `f_c(z) = conj(z)^d + c` and of its holomorphic
//! second iterate `P_c(z) = (z^d + conj(c))^d + c`.

mod arcs;
mod centers;
mod rays;

pub use arcs::{arc_velocity, cusp_angles, period1_arc_point, Period1ArcPoint};
pub use centers::{find_center, orbit_and_multiplier, parabolic_boundary_point, BoundaryPoint};
pub use rays::{trace_dynamical_ray, trace_parameter_ray, RayKind, RayStatus, RayTrace, Sample, StepPolicy};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("point does not escape")]
    NotEscaping,
    #[error("root branch of the Böttcher map could not be continued at level {level}")]
    BranchLost { level: usize },
    #[error("Newton iteration diverged at potential {potential:e}")]
    NewtonDiverged { potential: f64 },
    #[error("Jacobian singular at potential {potential:e}")]
    JacobianSingular { potential: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Parameter `c` together with the degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexParam {
    pub c: C64,
    pub d: u32,
}

impl ComplexParam {
    pub fn new(c: C64, d: u32) -> Self {
        assert!(d >= 2, "degree must be at least 2");
        assert!(c.re.is_finite() && c.im.is_finite(), "parameter must be finite");
        Self { c, d }
    }

    #[inline]
    pub fn f(&self, z: C64) -> C64 {
        z.conj().powu(self.d) + self.c
    }

    /// The holomorphic second iterate.
    #[inline]
    pub fn p(&self, z: C64) -> C64 {
        (z.powu(self.d) + self.c.conj()).powu(self.d) + self.c
    }

    /// `P_c(z)` and `P_c'(z)`.
    #[inline]
    pub fn p_with_derivative(&self, z: C64) -> (C64, C64) {
        let d = self.d as f64;
        let zd1 = z.powu(self.d - 1);
        let u = zd1 * z + self.c.conj();
        let ud1 = u.powu(self.d - 1);
        (ud1 * u + self.c, d * d * ud1 * zd1)
    }

    pub fn escape_radius(&self) -> f64 {
        let a = self.c.norm();
        4f64.max(a).max(2f64.powf(1.0 / (self.d as f64 - 1.0)) + a)
    }
}

/// Coefficients of the degree `d^2` polynomial `P_c`, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondIterate {
    pub coefficients: Vec<C64>,
}

impl SecondIterate {
    /// Expands `(z^d + conj c)^d + c` by the binomial theorem.
    pub fn new(param: &ComplexParam) -> Self {
        let d = param.d as usize;
        let mut coefficients = vec![C64::new(0.0, 0.0); d * d + 1];
        let mut binom = 1.0f64;
        for j in 0..=d {
            // term binom(d, j) z^{d j} conj(c)^{d - j}
            coefficients[d * j] += binom * param.c.conj().powu((d - j) as u32);
            binom = binom * (d - j) as f64 / (j + 1) as f64;
        }
        coefficients[0] += param.c;
        Self { coefficients }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IterateResult {
    Done(C64),
    Escaped { iteration: usize, z: C64 },
}

/// `n`-fold application of `f_c`; reports escape when `|z|` overflows.
pub fn iterate(z: C64, param: &ComplexParam, n: usize) -> IterateResult {
    let mut z = z;
    for i in 0..n {
        z = param.f(z);
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() > 1e300 {
            return IterateResult::Escaped { iteration: i + 1, z };
        }
    }
    IterateResult::Done(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    Escaped(usize),
}

/// Critical-orbit test for `c` in the multicorn.
pub fn multicorn_membership(c: C64, d: u32, max_iter: usize, escape_radius: Option<f64>) -> Membership {
    let param = ComplexParam::new(c, d);
    let r2 = escape_radius.unwrap_or_else(|| param.escape_radius()).powi(2);
    let mut z = C64::new(0.0, 0.0);
    for n in 0..max_iter {
        z = param.f(z);
        if z.norm_sqr() > r2 {
            return Membership::Escaped(n + 1);
        }
    }
    Membership::Inside
}

const BIG: f64 = 1e6;

/// Escape rate `lim d^{-2n} log|P_c^n(z)|`; zero on the filled Julia set.
pub fn green_potential(param: &ComplexParam, z: C64) -> f64 {
    let big_d = (param.d * param.d) as f64;
    let mut z = z;
    let mut scale = 1.0;
    for _ in 0..2000 {
        let r = z.norm();
        if r > BIG {
            // log|P(z)| = D log|z| + O(|c|/|z|^d); the remainder is below 1e-12 here.
            return scale * (r.ln() + log_correction(param, z));
        }
        z = param.p(z);
        scale /= big_d;
        if scale == 0.0 {
            break;
        }
    }
    0.0
}

/// `log|phi(z)| - log|z|` for large `|z|`, first order in `1/z^d`.
fn log_correction(param: &ComplexParam, z: C64) -> f64 {
    (param.c.conj() / (param.d as f64 * z.powu(param.d))).re
}

/// Böttcher coordinate tangent to the identity at infinity.
///
/// The orbit is pushed to `|z| > 1e6` and `d^2`-th roots are pulled back level
/// by level. Where the principal branch is provably continuous from infinity it
/// is used directly; otherwise the root closest in argument to the orbit point
/// is taken, and `BranchLost` is returned when that choice is not clear-cut.
pub fn bottcher(param: &ComplexParam, z: C64) -> Result<C64, DynamicsError> {
    let big_d = param.d * param.d;
    let mut orbit = vec![z];
    let mut cur = z;
    while cur.norm() <= BIG {
        if orbit.len() > 200 {
            return Err(DynamicsError::NotEscaping);
        }
        cur = param.p(cur);
        orbit.push(cur);
    }
    let last = *orbit.last().unwrap();
    // phi(z) = z exp(conj(c) / (d z^d) + O(|z|^{-2d}))
    let mut phi = last * (param.c.conj() / (param.d as f64 * last.powu(param.d))).exp();
    let dd = big_d as f64;
    let sector = std::f64::consts::TAU / dd;
    for level in (0..orbit.len() - 1).rev() {
        let zn = orbit[level];
        let base_arg = phi.arg() / dd;
        let modulus = phi.norm().powf(1.0 / dd);
        // candidate roots differ by multiples of 2 pi / D
        let offset = wrap_pi(zn.arg() - base_arg);
        let j = (offset / sector).round();
        let miss = (offset - j * sector).abs();
        if !branch_safe(param, zn) && miss > 0.8 * sector / 2.0 {
            return Err(DynamicsError::BranchLost { level });
        }
        phi = C64::from_polar(modulus, base_arg + j * sector);
    }
    Ok(phi)
}

/// Whether the principal root branch is continuous from infinity down to `|z|`.
fn branch_safe(param: &ComplexParam, z: C64) -> bool {
    let r = z.norm();
    let d = param.d as f64;
    let a = param.c.norm();
    a / r.powf(d) <= (0.4 * std::f64::consts::PI / d).sin() && a / r.powf(d * d) <= 0.1
}

pub(crate) fn wrap_pi(x: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let mut y = x % t;
    if y > std::f64::consts::PI {
        y -= t;
    } else if y <= -std::f64::consts::PI {
        y += t;
    }
    y
}

/// Solves `a x + b conj(x) = r` for `x`; `None` when `|a|^2 = |b|^2`.
pub(crate) fn solve_wirtinger(a: C64, b: C64, r: C64) -> Option<C64> {
    let det = a.norm_sqr() - b.norm_sqr();
    if det.abs() <= 1e-14 * (a.norm_sqr() + b.norm_sqr()) || !det.is_finite() {
        return None;
    }
    Some((a.conj() * r - b * r.conj()) / det)
}

/// `Phi(c) = phi_c(c)`, the uniformizing coordinate of the parameter exterior.
pub fn parameter_coordinate(c: C64, d: u32) -> Result<C64, DynamicsError> {
    bottcher(&ComplexParam::new(c, d), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn iterate_examples() {
        let p = ComplexParam::new(c(0.25, 0.0), 2);
        assert_eq!(iterate(c(0.0, 0.0), &p, 1), IterateResult::Done(c(0.25, 0.0)));
        let p = ComplexParam::new(c(-1.3, 0.0), 2);
        let mut z = c(0.7, 0.0);
        for _ in 0..50 {
            z = p.f(z);
            assert_eq!(z.im, 0.0);
        }
        let p = ComplexParam::new(c(3.0, 1.0), 2);
        assert!(matches!(iterate(c(0.0, 0.0), &p, 100), IterateResult::Escaped { .. }));
    }

    #[test]
    fn second_iterate_matches_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2u32, 3] {
            for _ in 0..500 {
                let cc = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
                let z = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
                if cc.norm() > 4.0 || z.norm() > 4.0 {
                    continue;
                }
                let p = ComplexParam::new(cc, d);
                let two = match iterate(z, &p, 2) {
                    IterateResult::Done(w) => w,
                    _ => unreachable!(),
                };
                let poly = SecondIterate::new(&p).eval(z);
                assert!((two - poly).norm() <= 1e-12 * two.norm().max(1.0), "{two} vs {poly}");
                assert!((two - p.p(z)).norm() <= 1e-12 * two.norm().max(1.0));
            }
        }
    }

    #[test]
    fn derivative_of_second_iterate() {
        let p = ComplexParam::new(c(-0.4, 0.6), 3);
        let z = c(0.3, -0.8);
        let h = 1e-6;
        let fd = (p.p(z + h) - p.p(z - h)) / (2.0 * h);
        assert!((fd - p.p_with_derivative(z).1).norm() < 1e-6);
    }

    #[test]
    fn green_examples() {
        let p0 = ComplexParam::new(c(0.0, 0.0), 2);
        assert!((green_potential(&p0, c(1e6, 0.0)) - 1e6f64.ln()).abs() < 1e-6);
        assert_eq!(green_potential(&p0, c(0.0, 0.0)), 0.0);
        let p = ComplexParam::new(c(-0.2, 0.5), 2);
        for z in [c(1.5, 0.2), c(-0.3, 1.4), c(2.0, -2.0)] {
            let g = green_potential(&p, z);
            let g1 = green_potential(&p, p.p(z));
            assert!((g1 - 4.0 * g).abs() < 1e-9 * g1.max(1.0), "{g} {g1}");
        }
    }

    #[test]
    fn bottcher_examples() {
        let p0 = ComplexParam::new(c(0.0, 0.0), 2);
        assert!((bottcher(&p0, c(2.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
        let p = ComplexParam::new(c(-0.3, 0.2), 2);
        for z in [c(3.0, 1.0), c(-2.0, 2.5), c(0.5, -3.0)] {
            let phi = bottcher(&p, z).unwrap();
            assert!((phi.norm().ln() - green_potential(&p, z)).abs() < 1e-9);
            let phi2 = bottcher(&p, p.p(z)).unwrap();
            assert!((phi2 - phi.powu(4)).norm() < 1e-8 * phi2.norm());
            let phif = bottcher(&p, p.f(z)).unwrap();
            assert!((phif - phi.conj().powu(2)).norm() < 1e-8 * phif.norm());
        }
        let pr = ComplexParam::new(c(0.3, 0.0), 2);
        let phi = bottcher(&pr, c(1.1, 0.0)).unwrap();
        assert!(phi.arg().abs() < 1e-12);
        assert_eq!(bottcher(&p0, c(0.5, 0.0)), Err(DynamicsError::NotEscaping));
    }

    #[test]
    fn membership_examples() {
        assert_eq!(multicorn_membership(c(0.0, 0.0), 2, 1000, None), Membership::Inside);
        assert_eq!(multicorn_membership(c(0.0, 0.0), 5, 1000, None), Membership::Inside);
        assert!(matches!(multicorn_membership(c(0.26, 0.0), 2, 100_000, None), Membership::Escaped(_)));
        assert!(matches!(multicorn_membership(c(2.1, 0.3), 2, 1000, None), Membership::Escaped(_)));
        assert_eq!(multicorn_membership(c(-2.0, 0.0), 2, 10_000, None), Membership::Inside);
        assert!(matches!(multicorn_membership(c(-2.01, 0.0), 2, 10_000, None), Membership::Escaped(_)));
    }

    #[test]
    fn real_slice_by_bisection() {
        // Right end of the real slice: the quadratic real slice ends at 1/4.
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            match multicorn_membership(c(mid, 0.0), 2, 200_000, None) {
                Membership::Inside => lo = mid,
                Membership::Escaped(_) => hi = mid,
            }
        }
        assert!((lo - 0.25).abs() < 2e-3, "{lo}");
    }

    #[test]
    fn membership_symmetries() {
        let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let cc = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let m = |x: C64| multicorn_membership(x, 2, 500, Some(4.0)) == Membership::Inside;
            assert_eq!(m(cc), m(cc.conj()));
            // Rotation changes only rounding, so compare on robust points.
            let (a, b) = (multicorn_membership(cc, 2, 500, Some(4.0)), multicorn_membership(w * cc, 2, 500, Some(4.0)));
            if let (Membership::Escaped(x), Membership::Escaped(y)) = (a, b) {
                assert!((x as i64 - y as i64).abs() <= 1);
            }
        }
    }

    #[test]
    fn wirtinger_solver() {
        let (a, b, x) = (c(1.3, -0.2), c(0.4, 0.9), c(-0.7, 2.2));
        let r = a * x + b * x.conj();
        assert!((solve_wirtinger(a, b, r).unwrap() - x).norm() < 1e-12);
        assert!(solve_wirtinger(c(1.0, 0.0), c(0.0, 1.0), r).is_none());
    }
}
