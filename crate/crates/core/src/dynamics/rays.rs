use num_bigint::BigInt;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use super::{solve_wirtinger, wrap_pi, ComplexParam, DynamicsError, C64};
use crate::angles::Angle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RayKind {
    Dynamical,
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RayStatus {
    Completed,
    Aborted(String),
}

/// One ray point: radius `r = |phi| > 1` and the point itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Sample {
    pub r: f64,
    pub z: C64,
}

impl From<[f64; 3]> for Sample {
    fn from(a: [f64; 3]) -> Self {
        Sample { r: a[0], z: C64::new(a[1], a[2]) }
    }
}

impl From<Sample> for [f64; 3] {
    fn from(s: Sample) -> Self {
        [s.r, s.z.re, s.z.im]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub angle: Angle,
    pub kind: RayKind,
    pub degree: u32,
    pub samples: Vec<Sample>,
    pub status: RayStatus,
}

impl RayTrace {
    pub fn completed(&self) -> bool {
        self.status == RayStatus::Completed
    }

    pub fn endpoint(&self) -> Option<C64> {
        self.samples.last().map(|s| s.z)
    }
}

/// Continuation schedule: the excess `r - 1` is divided by `ratio` at each
/// accepted sample; a rejected Newton solve halves the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub ratio: f64,
    /// Below this excess the finer `fine_ratio` is used.
    pub fine_below: f64,
    pub fine_ratio: f64,
    /// Excess `r - 1` of the first sample.
    pub start_excess: f64,
    pub max_rejects: usize,
    pub max_newton: usize,
    pub tolerance: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy { ratio: 1.1, fine_below: 0.0, fine_ratio: 1.01, start_excess: 100.0, max_rejects: 60, max_newton: 40, tolerance: 1e-11 }
    }
}

/// Log of the first orbit point far enough out, and Wirtinger derivatives of it.
struct LogEval {
    log: C64,
    a: C64,
    b: C64,
}

fn levels(big_d: f64, g: f64) -> u32 {
    let l = 23f64.min(600.0 / big_d);
    let mut m = 0;
    let mut v = g;
    while v < l {
        v *= big_d;
        m += 1;
    }
    m
}

fn log_with_correction(param: &ComplexParam, w: C64) -> C64 {
    // log phi(w) = log w + conj(c) / (d w^d) + ...
    w.ln() + param.c.conj() / (param.d as f64 * w.powu(param.d))
}

fn eval_dynamical(param: &ComplexParam, z: C64, m: u32) -> Option<LogEval> {
    let mut w = z;
    let mut dlog = C64::new(1.0, 0.0) / z;
    for _ in 0..m {
        let (pw, dp) = param.p_with_derivative(w);
        // d log P(w) = P'(w)/P(w) * dw, and dw = w * dlog
        dlog = dlog * w * dp / pw;
        w = pw;
    }
    finite(w).then(|| LogEval { log: log_with_correction(param, w), a: dlog, b: C64::new(0.0, 0.0) })
}

fn eval_parameter(c: C64, d: u32, m: u32) -> Option<LogEval> {
    let df = d as f64;
    let (mut w, mut wc, mut wcb) = (c, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    for _ in 0..m {
        let wd1 = w.powu(d - 1);
        let u = wd1 * w + c.conj();
        let uc = df * wd1 * wc;
        let ucb = df * wd1 * wcb + 1.0;
        let ud1 = u.powu(d - 1);
        w = ud1 * u + c;
        wc = df * ud1 * uc + 1.0;
        wcb = df * ud1 * ucb;
    }
    let param = ComplexParam { c, d };
    finite(w).then(|| LogEval { log: log_with_correction(&param, w), a: wc / w, b: wcb / w })
}

fn finite(w: C64) -> bool {
    w.re.is_finite() && w.im.is_finite() && w.norm_sqr() > 0.0
}

/// `log phi(x) - (log r + 2 pi i t)` pushed forward `m` levels, imaginary part wrapped.
struct Target {
    m: u32,
    re: f64,
    im: f64,
}

impl Target {
    fn new(t: &Angle, d: u32, g: f64) -> Self {
        let big_d = (d * d) as f64;
        let m = levels(big_d, g);
        let scale = BigInt::from(d * d).pow(m);
        let frac = t.scale(&scale).to_f64();
        Target { m, re: g * big_d.powi(m as i32), im: std::f64::consts::TAU * frac }
    }

    fn residual(&self, log: C64) -> C64 {
        C64::new(log.re - self.re, wrap_pi(log.im - self.im))
    }
}

fn newton<E: Fn(C64, u32) -> Option<LogEval>>(eval: &E, target: &Target, x0: C64, policy: &StepPolicy) -> Option<C64> {
    let mut x = x0;
    for _ in 0..policy.max_newton {
        let e = eval(x, target.m)?;
        let res = target.residual(e.log);
        if res.norm() < policy.tolerance * target.re.max(1.0) {
            return Some(x);
        }
        let dx = solve_wirtinger(e.a, e.b, -res)?;
        x += dx;
        if !finite(x) {
            return None;
        }
    }
    let e = eval(x, target.m)?;
    (target.residual(e.log).norm() < 1e3 * policy.tolerance * target.re.max(1.0)).then_some(x)
}

fn trace<E: Fn(C64, u32) -> Option<LogEval>>(
    eval: E,
    t: &Angle,
    d: u32,
    kind: RayKind,
    r_min: f64,
    policy: &StepPolicy,
) -> Result<RayTrace, DynamicsError> {
    assert!(r_min > 1.0, "r_min must exceed 1");
    let mut out = RayTrace { angle: t.clone(), kind, degree: d, samples: Vec::new(), status: RayStatus::Completed };
    let excess_min = r_min - 1.0;
    let mut excess = policy.start_excess.max(excess_min);
    let g0 = excess.ln_1p();
    let guess = C64::from_polar(1.0 + excess, std::f64::consts::TAU * t.to_f64());
    let target = Target::new(t, d, g0);
    let Some(mut x) = newton(&eval, &target, guess, policy) else {
        return Err(DynamicsError::NewtonDiverged { potential: g0 });
    };
    out.samples.push(Sample { r: 1.0 + excess, z: x });
    let mut last_move = f64::INFINITY;
    let mut rejects = 0;
    while excess > excess_min {
        let ratio = if excess <= policy.fine_below { policy.fine_ratio } else { policy.ratio };
        let mut next = (excess / ratio).max(excess_min);
        loop {
            let target = Target::new(t, d, next.ln_1p());
            let ok = newton(&eval, &target, x, policy).filter(|y| (y - x).norm() <= 8.0 * last_move + 1e-300);
            match ok {
                Some(y) => {
                    last_move = (y - x).norm().max(1e-300);
                    x = y;
                    excess = next;
                    out.samples.push(Sample { r: 1.0 + excess, z: x });
                    break;
                }
                None => {
                    rejects += 1;
                    if rejects > policy.max_rejects {
                        out.status = RayStatus::Aborted(format!("Newton diverged at potential {:e}", next.ln_1p()));
                        return Ok(out);
                    }
                    next = 0.5 * (excess + next);
                }
            }
        }
    }
    Ok(out)
}

/// Traces the `t`-ray of `f_c` (a Böttcher ray of `P_c`) down to `r_min`.
pub fn trace_dynamical_ray(param: &ComplexParam, t: &Angle, r_min: f64, policy: &StepPolicy) -> Result<RayTrace, DynamicsError> {
    let p = *param;
    trace(move |z, m| eval_dynamical(&p, z, m), t, param.d, RayKind::Dynamical, r_min, policy)
}

/// Traces the parameter ray `Phi^{-1}(r e^{2 pi i t})` down to `r_min`.
pub fn trace_parameter_ray(t: &Angle, d: u32, r_min: f64, policy: &StepPolicy) -> Result<RayTrace, DynamicsError> {
    trace(move |c, m| eval_parameter(c, d, m), t, d, RayKind::Parameter, r_min, policy)
}
