use serde::{Deserialize, Serialize};

use super::{FatouError, FatouPair, ParabolicData};
use crate::dynamics::{ComplexParam, RayTrace, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateStats {
    /// Distance of the perturbed parameter from the reference arc point.
    pub s: f64,
    pub c_out: C64,
    /// Number of `f^{2k}` iterates inside the gate window.
    pub n: u64,
    pub phase: f64,
    pub exit_point: C64,
    pub gate_radius: f64,
    pub incoming_height: f64,
    pub outgoing_height: f64,
}

/// Follows the orbit of `z_start` (default: the critical value) under the
/// perturbed return map through the window `|z - z0| < 0.15/|a|` of the
/// reference parabolic point, measured with the reference charts.
pub fn gate_transit(reference: &FatouPair, c_out: C64, z_start: Option<C64>, max_steps: u64) -> Result<GateStats, FatouError> {
    let data = &reference.attracting.data;
    let model = &reference.attracting.model;
    let radius = 0.15 / data.a.norm();
    let param = ComplexParam::new(c_out, data.d);
    let start = z_start.unwrap_or(c_out);
    let escape = param.escape_radius();
    let g = |z: C64| (0..data.k).fold(z, |w, _| param.p(w));
    let mut z = start;
    let mut inside = 0u64;
    for _ in 0..max_steps {
        let is_in = (z - data.z0).norm() < radius;
        if is_in {
            inside += 1;
        } else if inside > 0 && model.to_w(z).re < 0.0 {
            let psi = reference.repelling.coordinate(z)?;
            let incoming_height = reference.attracting.coordinate(start)?.im;
            return Ok(GateStats {
                s: (c_out - data.c).norm(),
                c_out,
                n: inside,
                phase: psi.re - inside as f64,
                exit_point: z,
                gate_radius: radius,
                incoming_height,
                outgoing_height: psi.im,
            });
        }
        z = g(z);
        if !(z.norm() < escape) {
            return Err(FatouError::NoTransit);
        }
    }
    Err(FatouError::NoTransit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub iota: C64,
    pub radius: f64,
    pub nodes: usize,
    /// Change of the value under the last radius halving.
    pub change: f64,
    pub zeros_enclosed: i64,
}

fn contour(data: &ParabolicData, radius: f64, nodes: usize) -> (C64, f64) {
    let mut iota = C64::new(0.0, 0.0);
    let mut count = C64::new(0.0, 0.0);
    for j in 0..nodes {
        let e = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / nodes as f64);
        let z = data.z0 + radius * e;
        let (gz, dg) = data.g_with_derivative(z);
        let inv = 1.0 / (z - gz);
        iota += e * inv;
        count += e * (1.0 - dg) * inv;
    }
    let scale = radius / nodes as f64;
    (iota * scale, (count * scale).re)
}

/// Holomorphic fixed-point index of `f^{2k}` at the double fixed point, by the
/// trapezoid rule on circles about `z0`.
pub fn fixed_point_index(data: &ParabolicData) -> Result<IndexResult, FatouError> {
    let mut radius = 0.1f64.min(0.5 / data.a.norm());
    let mut nodes = 256;
    let mut zeros = 0i64;
    for _ in 0..40 {
        zeros = contour(data, radius, nodes).1.round() as i64;
        if zeros == 2 {
            break;
        }
        radius *= 0.5;
    }
    if zeros != 2 {
        return Err(FatouError::OtherFixedPointEnclosed);
    }
    let mut prev = contour(data, radius, nodes).0;
    for _ in 0..12 {
        radius *= 0.5;
        nodes *= 2;
        let (iota, z) = contour(data, radius, nodes);
        if z.round() as i64 != 2 {
            return Err(FatouError::OtherFixedPointEnclosed);
        }
        let change = (iota - prev).norm();
        if change < 1e-4 {
            return Ok(IndexResult { iota, radius, nodes, change, zeros_enclosed: 2 });
        }
        prev = iota;
    }
    Err(FatouError::QuadratureNotConverged)
}

/// Polyline length over diameter of the samples with `r <= r_cut`.
pub fn wiggle_metric(trace: &RayTrace, r_cut: f64) -> Result<f64, FatouError> {
    let tail: Vec<C64> = trace.samples.iter().filter(|s| s.r <= r_cut).map(|s| s.z).collect();
    if tail.len() < 50 {
        return Err(FatouError::TailTooShort(tail.len()));
    }
    let length: f64 = tail.windows(2).map(|p| (p[1] - p[0]).norm()).sum();
    let mut diameter = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            diameter = diameter.max((a - b).norm());
        }
    }
    if diameter == 0.0 {
        return Ok(1.0);
    }
    Ok(length / diameter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::Angle;
    use crate::dynamics::{period1_arc_point, RayKind, RayStatus, Sample};
    use crate::fatou::{parabolic_data, ChartSettings};

    fn quarter() -> ParabolicData {
        parabolic_data(&ComplexParam::new(C64::new(0.25, 0.0), 2), 1, C64::new(0.5, 0.0)).unwrap()
    }

    #[test]
    fn index_at_quarter() {
        let r = fixed_point_index(&quarter()).unwrap();
        assert!((r.iota - 0.5).norm() < 1e-4, "{:?}", r);
    }

    #[test]
    fn index_real_on_arc() {
        for phi in [0.3, -0.6, 0.8] {
            let arc = period1_arc_point(2, phi);
            let data = parabolic_data(&ComplexParam::new(arc.c, 2), 1, arc.z0).unwrap();
            let r = fixed_point_index(&data).unwrap();
            assert!(r.iota.im.abs() < 1e-3, "{phi} {:?}", r.iota);
            assert!((r.iota - data.residue_index()).norm() < 1e-4);
        }
    }

    #[test]
    fn gate_count_grows() {
        let pair = FatouPair::new(&quarter(), ChartSettings::default()).unwrap();
        let a = gate_transit(&pair, C64::new(0.25 + 1e-4, 0.0), None, 10_000_000).unwrap();
        let b = gate_transit(&pair, C64::new(0.25 + 1e-5, 0.0), None, 10_000_000).unwrap();
        assert!(b.n > a.n);
        assert!(b.phase < a.phase);
        let x = a.n as f64 * 1e-2;
        assert!((1.3..=1.9).contains(&x), "{x}");
        assert!(matches!(gate_transit(&pair, C64::new(0.2, 0.0), None, 100_000), Err(FatouError::NoTransit)));
    }

    fn synthetic(points: Vec<C64>) -> RayTrace {
        RayTrace {
            angle: Angle::zero(),
            kind: RayKind::Parameter,
            degree: 2,
            samples: points.into_iter().enumerate().map(|(i, z)| Sample { r: 1.0 + 1.0 / (i + 1) as f64, z }).collect(),
            status: RayStatus::Completed,
        }
    }

    #[test]
    fn wiggle_of_lines_and_zigzags() {
        let line = synthetic((0..100).map(|i| C64::new(i as f64, 2.0 * i as f64)).collect());
        assert!((wiggle_metric(&line, 10.0).unwrap() - 1.0).abs() < 1e-12);
        let zig = synthetic((0..100).map(|i| C64::new(i as f64 * 0.1, if i % 2 == 0 { 0.0 } else { 1.0 })).collect());
        assert!(wiggle_metric(&zig, 10.0).unwrap() > 5.0);
        let short = synthetic((0..10).map(|i| C64::new(i as f64, 0.0)).collect());
        assert_eq!(wiggle_metric(&short, 10.0), Err(FatouError::TailTooShort(10)));
    }
}
