//! Numerical witness bundle for a wiggling parameter ray: the traced ray, its
//! wiggle metric, and the Ecalle height interval of the corresponding
//! dynamical ray at the nearest parabolic parameter.

use serde::{Deserialize, Serialize};

use crate::angles::Angle;
use crate::classifier::{classification_report, ClassificationReport};
use crate::dynamics::{
    find_center, parabolic_boundary_point, period1_arc_point, trace_parameter_ray, BoundaryPoint, ComplexParam,
    StepPolicy, C64,
};
use crate::fatou::{nearest_arc_phi, project_ray_to_cylinder, wiggle_metric, ChartSettings, FatouError, HeightInterval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiggleReport {
    pub classification: ClassificationReport,
    pub r_min: f64,
    pub r_cut: f64,
    pub samples: usize,
    pub endpoint: Option<C64>,
    pub wiggle: Option<f64>,
    /// Parabolic parameter nearest to the end of the trace, with its period.
    pub arc_parameter: Option<C64>,
    pub arc_period: Option<usize>,
    pub interval: Option<HeightInterval>,
    pub interval_tolerance: f64,
    pub warnings: Vec<String>,
}

/// Boundary point of the period-`k` component with center near `seed`, at
/// multiplier argument `theta`.
pub fn component_boundary_point(d: u32, k: usize, seed: C64, theta: f64) -> Result<BoundaryPoint, FatouError> {
    let center = find_center(d, k, seed)?;
    Ok(parabolic_boundary_point(d, k, center, theta)?)
}

/// Boundary point of the period-`k` component nearest to `c` (degree 2 only).
pub fn nearest_boundary_point(d: u32, k: usize, c: C64) -> Result<BoundaryPoint, FatouError> {
    let center = find_center(d, k, c)?;
    let at = |theta: f64| parabolic_boundary_point(d, k, center, theta);
    let n = 72;
    let mut best = at(0.0)?;
    for i in 1..n {
        let p = at(std::f64::consts::TAU * i as f64 / n as f64)?;
        if (p.c - c).norm() < (best.c - c).norm() {
            best = p;
        }
    }
    let mut step = std::f64::consts::TAU / n as f64;
    while step > 1e-9 {
        for theta in [best.theta - step, best.theta + step] {
            let p = at(theta)?;
            if (p.c - c).norm() < (best.c - c).norm() {
                best = p;
            }
        }
        step *= 0.5;
    }
    Ok(best)
}

pub fn wiggle_report(t: &Angle, d: u32, r_min: f64, r_cut: f64) -> Result<WiggleReport, FatouError> {
    let classification = classification_report(t, d).map_err(|e| FatouError::NoConvergence(e.to_string()))?;
    let mut warnings = Vec::new();
    let period = classification.component_period;
    match &classification.class[..] {
        "WigglesRoot" | "WigglesCoRoot" => {}
        "LandsOnArcPoint" => warnings.push("classified as landing".to_string()),
        other => warnings.push(format!("classified as {other}; no wiggling expected")),
    }
    let trace = trace_parameter_ray(t, d, r_min, &StepPolicy::default())?;
    if !trace.completed() {
        warnings.push(format!("trace stopped early: {:?}", trace.status));
    }
    let wiggle = match wiggle_metric(&trace, r_cut) {
        Ok(w) => Some(w),
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    let endpoint = trace.endpoint();
    let settings = ChartSettings::default();
    let mut arc_parameter = None;
    let mut interval = None;
    if let (Some(k), Some(end)) = (period, endpoint) {
        let c = if k == 1 {
            Ok(period1_arc_point(d, nearest_arc_phi(end, d)).c)
        } else if d == 2 {
            nearest_boundary_point(d, k, end).map(|b| b.c)
        } else {
            Err(FatouError::NoConvergence("boundary continuation needs d = 2".into()))
        };
        match c.and_then(|c| {
            arc_parameter = Some(c);
            project_ray_to_cylinder(&ComplexParam::new(c, d), k, t, settings)
        }) {
            Ok(p) => interval = Some(p.interval),
            Err(e) => warnings.push(format!("height interval: {e}")),
        }
    }
    Ok(WiggleReport {
        classification,
        r_min,
        r_cut,
        samples: trace.samples.len(),
        endpoint,
        wiggle,
        arc_parameter,
        arc_period: period,
        interval,
        interval_tolerance: settings.tolerance,
        warnings,
    })
}
