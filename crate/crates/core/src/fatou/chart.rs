use serde::{Deserialize, Serialize};

use super::{parabolic_data, series, FatouError, ParabolicData};
use crate::dynamics::{period1_arc_point, ComplexParam, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartDirection {
    Attracting,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartSettings {
    /// `|w|` at which the asymptotic expansion is first evaluated; it is
    /// re-evaluated at doubled depths until two successive values agree.
    pub depth: f64,
    pub tolerance: f64,
    pub max_steps: usize,
}

const MAX_DOUBLINGS: f64 = 64.0;

impl Default for ChartSettings {
    fn default() -> Self {
        ChartSettings { depth: 2000.0, tolerance: 1e-6, max_steps: 2_000_000 }
    }
}

/// The return map in the coordinate `w = -1/(a h)`, `h = z - z0`, near `w = infinity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct LocalModel {
    pub z0: C64,
    pub a: C64,
    /// `q(h) = sum_{j >= 2} g_j h^{j-2}`.
    pub q: Vec<C64>,
    /// Coefficient of `log w` in the Fatou coordinate, `1 - b/a^2`.
    pub log_coefficient: C64,
    pub c1: C64,
    pub r_switch: f64,
}

impl LocalModel {
    pub fn new(data: &ParabolicData) -> Self {
        let g = &data.jet;
        let a = g[2];
        let big_b = g[3] / (a * a);
        let big_e = g[4] / (a * a * a);
        let beta = 1.0 - big_b;
        let gamma = 1.0 + big_e - 2.0 * big_b;
        let c1 = gamma - beta * beta + beta / 2.0;
        // Keep the neglected tail of the jet below rounding relative to a h^2.
        let n = g.len() - 1;
        let mut r = 0.25 / a.norm();
        for (j, gj) in g.iter().enumerate().skip(n - 3) {
            if gj.norm() > 0.0 {
                r = r.min((1e-17 * a.norm() / gj.norm()).powf(1.0 / (j as f64 - 2.0)));
            }
        }
        LocalModel { z0: data.z0, a, q: g[2..].to_vec(), log_coefficient: beta, c1, r_switch: r }
    }

    fn increment(&self, w: C64) -> C64 {
        let h = -1.0 / (self.a * w);
        let q = series::eval(&self.q, h);
        (q / self.a) / (1.0 + h * q)
    }

    pub fn forward(&self, w: C64) -> C64 {
        w + self.increment(w)
    }

    pub fn backward(&self, w: C64) -> C64 {
        let mut v = w - 1.0;
        for _ in 0..60 {
            let next = w - self.increment(v);
            let done = (next - v).norm() <= 1e-16 * v.norm();
            v = next;
            if done {
                break;
            }
        }
        v
    }

    pub fn to_w(&self, z: C64) -> C64 {
        -1.0 / (self.a * (z - self.z0))
    }

    pub fn to_z(&self, w: C64) -> C64 {
        self.z0 - 1.0 / (self.a * w)
    }

    fn asymptotic(&self, w: C64, direction: ChartDirection) -> C64 {
        let log = match direction {
            ChartDirection::Attracting => w.ln(),
            ChartDirection::Repelling => (-w).ln(),
        };
        w - self.log_coefficient * log + self.c1 / w
    }
}

/// Fatou coordinate of one petal, `psi = raw + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FatouChart {
    pub direction: ChartDirection,
    pub data: ParabolicData,
    /// Marked petal point sent to real part 0.
    pub anchor: C64,
    /// Vertical shift making the antiholomorphic relation hold with constant 1/2.
    pub vertical_offset: f64,
    pub horizontal_offset: f64,
    /// `psi(f^k z) - conj(psi(z))` before and after normalization.
    pub kappa_raw: C64,
    pub kappa: C64,
    pub settings: ChartSettings,
    pub(crate) model: LocalModel,
}

enum State {
    Z(C64),
    W(C64),
}

impl FatouChart {
    /// Chart without normalization (offsets zero).
    pub fn raw(data: &ParabolicData, direction: ChartDirection, settings: ChartSettings) -> Self {
        let model = LocalModel::new(data);
        let w_anchor = match direction {
            ChartDirection::Attracting => 30.0,
            ChartDirection::Repelling => -30.0,
        };
        FatouChart {
            direction,
            data: data.clone(),
            anchor: model.to_z(C64::new(w_anchor, 0.0)),
            vertical_offset: 0.0,
            horizontal_offset: 0.0,
            kappa_raw: C64::new(f64::NAN, f64::NAN),
            kappa: C64::new(f64::NAN, f64::NAN),
            settings,
            model,
        }
    }

    pub fn new(data: &ParabolicData, direction: ChartDirection, settings: ChartSettings) -> Result<Self, FatouError> {
        let mut chart = Self::raw(data, direction, settings);
        normalize_equator(&mut chart)?;
        Ok(chart)
    }

    pub fn offset(&self) -> C64 {
        C64::new(self.horizontal_offset, self.vertical_offset)
    }

    pub fn coordinate(&self, z: C64) -> Result<C64, FatouError> {
        Ok(self.raw_coordinate(z)? + self.offset())
    }

    /// Petal points `z0 - 1/(a w)` for the given `w` (sign adjusted to the petal).
    pub fn petal_point(&self, w: C64) -> C64 {
        self.model.to_z(w)
    }

    pub fn raw_coordinate(&self, z: C64) -> Result<C64, FatouError> {
        let m = &self.model;
        let depth = self.settings.depth;
        let escape = self.data.param().escape_radius();
        let mut state = State::Z(z);
        let mut n = 0usize;
        let mut last: Option<C64> = None;
        let mut checkpoint = depth;
        let sign = match self.direction {
            ChartDirection::Attracting => 1.0,
            ChartDirection::Repelling => -1.0,
        };
        while n <= self.settings.max_steps {
            match state {
                State::Z(x) => {
                    if !(x.re.is_finite() && x.im.is_finite()) || x.norm() > escape {
                        return Err(FatouError::OutsidePetal);
                    }
                    if (x - m.z0).norm() < m.r_switch {
                        state = State::W(m.to_w(x));
                        continue;
                    }
                    let next = match self.direction {
                        ChartDirection::Attracting => self.data.g(x),
                        ChartDirection::Repelling => self.inverse(x)?,
                    };
                    state = State::Z(next);
                }
                State::W(w) => {
                    let wn = w.norm();
                    if wn >= checkpoint {
                        if sign * w.re <= 0.5 * wn {
                            return Err(FatouError::OutsidePetal);
                        }
                        let psi = m.asymptotic(w, self.direction) - sign * n as f64;
                        if let Some(p1) = last {
                            if (psi - p1).norm() <= self.settings.tolerance {
                                return Ok(psi);
                            }
                            if checkpoint >= depth * MAX_DOUBLINGS {
                                return Err(FatouError::NoConvergence(format!(
                                    "Richardson check moved the coordinate by {:e}",
                                    (psi - p1).norm()
                                )));
                            }
                        }
                        last = Some(psi);
                        checkpoint *= 2.0;
                    }
                    if 1.0 / (m.a.norm() * wn) >= m.r_switch {
                        state = State::Z(m.to_z(w));
                        continue;
                    }
                    state = State::W(match self.direction {
                        ChartDirection::Attracting => m.forward(w),
                        ChartDirection::Repelling => m.backward(w),
                    });
                }
            }
            n += 1;
        }
        Err(FatouError::NoConvergence(format!("orbit did not reach depth in {} steps", self.settings.max_steps)))
    }

    /// Preimage of `z` under `g` on the branch fixing `z0`, by Newton's method
    /// started from the backward Euler guess.
    fn inverse(&self, z: C64) -> Result<C64, FatouError> {
        let step = self.data.g(z) - z;
        let mut x = z - step;
        for _ in 0..60 {
            let (gx, dg) = self.data.g_with_derivative(x);
            let dx = (gx - z) / dg;
            x -= dx;
            if !(x.re.is_finite() && x.im.is_finite()) {
                return Err(FatouError::OutsidePetal);
            }
            if dx.norm() <= 1e-16 * x.norm().max(1.0) {
                break;
            }
        }
        if (x - z).norm() > 4.0 * step.norm() + 1e-12 {
            return Err(FatouError::OutsidePetal);
        }
        Ok(x)
    }

    /// Points of the petal used to measure the antiholomorphic constant.
    fn normalization_samples(&self) -> Vec<C64> {
        let s = match self.direction {
            ChartDirection::Attracting => 1.0,
            ChartDirection::Repelling => -1.0,
        };
        [(40.0, 0.0), (40.0, 10.0), (40.0, -10.0), (70.0, 5.0)]
            .iter()
            .map(|&(x, y)| self.model.to_z(C64::new(s * x, y)))
            .collect()
    }

    fn measure_kappa(&self) -> Result<(C64, f64), FatouError> {
        let mut ks = Vec::new();
        for z in self.normalization_samples() {
            let k = self.coordinate(self.data.sigma_map(z))? - self.coordinate(z)?.conj();
            ks.push(k);
        }
        let mean = ks.iter().sum::<C64>() / ks.len() as f64;
        let spread = ks.iter().map(|k| (k - mean).norm()).fold(0.0, f64::max);
        Ok((mean, spread))
    }
}

/// Measures `kappa = psi(f^k z) - conj(psi(z))` and shifts the chart vertically
/// by `-Im(kappa)/2`, so that the relation holds with constant `1/2`. The
/// horizontal offset puts the anchor at real part 0. Returns the vertical shift.
pub fn normalize_equator(chart: &mut FatouChart) -> Result<f64, FatouError> {
    chart.vertical_offset = 0.0;
    chart.horizontal_offset = 0.0;
    let (kappa, spread) = chart.measure_kappa()?;
    if spread > 10.0 * chart.settings.tolerance {
        return Err(FatouError::InconsistentKappa { spread });
    }
    if (kappa.re - 0.5).abs() > 10.0 * chart.settings.tolerance {
        return Err(FatouError::InconsistentKappa { spread: (kappa.re - 0.5).abs() });
    }
    chart.kappa_raw = kappa;
    chart.vertical_offset = -kappa.im / 2.0;
    chart.horizontal_offset = -chart.raw_coordinate(chart.anchor)?.re;
    chart.kappa = chart.measure_kappa()?.0;
    Ok(chart.vertical_offset)
}

/// Attracting and repelling charts of one parabolic point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FatouPair {
    pub attracting: FatouChart,
    pub repelling: FatouChart,
}

impl FatouPair {
    pub fn new(data: &ParabolicData, settings: ChartSettings) -> Result<Self, FatouError> {
        Ok(FatouPair {
            attracting: FatouChart::new(data, ChartDirection::Attracting, settings)?,
            repelling: FatouChart::new(data, ChartDirection::Repelling, settings)?,
        })
    }
}

/// Index `j` of the first critical orbit point `f^j(c)` attracted to `z0` under `g`.
fn first_orbit_point_in_basin(data: &ParabolicData) -> Result<(usize, C64), FatouError> {
    let p = data.param();
    let mut z = data.c;
    for j in 0..2 * data.k {
        let mut x = z;
        for _ in 0..20_000 {
            x = data.g(x);
        }
        if (x - data.z0).norm() < 0.05 {
            return Ok((j, z));
        }
        z = p.f(z);
    }
    Err(FatouError::OutsidePetal)
}

/// Height of the critical value in the normalized attracting chart.
pub fn critical_ecalle_height(chart: &FatouChart) -> Result<f64, FatouError> {
    let (j, z) = first_orbit_point_in_basin(&chart.data)?;
    let h = chart.coordinate(z)?.im;
    Ok(if j % 2 == 0 { h } else { -h })
}

fn arc_height(d: u32, phi: f64, settings: ChartSettings) -> Result<f64, FatouError> {
    let arc = period1_arc_point(d, phi);
    let data = parabolic_data(&ComplexParam::new(arc.c, d), 1, arc.z0)?;
    let chart = FatouChart::new(&data, ChartDirection::Attracting, settings)?;
    critical_ecalle_height(&chart)
}

/// Period-1 arc parameter whose critical value has Ecalle height `h`, found
/// by bisection in `phi` on the arc through `c_d`. The search stays within
/// 90% of the distance to the neighbouring cusps.
pub fn arc_point_with_height(d: u32, h: f64, settings: ChartSettings) -> Result<(f64, C64), FatouError> {
    let phi_max = 0.9 * std::f64::consts::PI / (d as f64 + 1.0);
    let (mut lo, mut hi) = (-phi_max, phi_max);
    let (h_lo, h_hi) = (arc_height(d, lo, settings)?, arc_height(d, hi, settings)?);
    let (min, max) = (h_lo.min(h_hi), h_lo.max(h_hi));
    if !(min..=max).contains(&h) {
        return Err(FatouError::HeightOutOfRange { h, lo: min, hi: max });
    }
    let increasing = h_hi > h_lo;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let hm = arc_height(d, mid, settings)?;
        if hm == h {
            lo = mid;
            hi = mid;
            break;
        }
        if (hm < h) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let phi = 0.5 * (lo + hi);
    Ok((phi, period1_arc_point(d, phi).c))
}
