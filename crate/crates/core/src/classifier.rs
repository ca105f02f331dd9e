//! Decides the fate of a rational parameter ray from the combinatorics of its angle.

use serde::{Deserialize, Serialize};

use crate::angles::{orbit_info, Angle, AngleError, AngleOrbitInfo, PeriodType};
use crate::portraits::{
    generate_candidate, reflection_invariance_check, validate, wake_index, Arc, FailureReason, OrbitPortrait,
    PortraitVerdict, WakeIndex,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum RayClass {
    /// Fixed angle `j/(d+1)`: lands on a period-1 parabolic arc.
    LandsOnArcPoint,
    LandsEvenParabolic { ray_period: usize },
    WigglesCoRoot { component_period: usize },
    WigglesRoot { component_period: usize },
    LandsMisiurewicz { preperiod: usize, period: usize },
}

impl RayClass {
    pub fn name(&self) -> &'static str {
        match self {
            RayClass::LandsOnArcPoint => "LandsOnArcPoint",
            RayClass::LandsEvenParabolic { .. } => "LandsEvenParabolic",
            RayClass::WigglesCoRoot { .. } => "WigglesCoRoot",
            RayClass::WigglesRoot { .. } => "WigglesRoot",
            RayClass::LandsMisiurewicz { .. } => "LandsMisiurewicz",
        }
    }

    pub fn wiggles(&self) -> bool {
        matches!(self, RayClass::WigglesCoRoot { .. } | RayClass::WigglesRoot { .. })
    }

    pub fn component_period(&self) -> Option<usize> {
        match *self {
            RayClass::WigglesCoRoot { component_period } | RayClass::WigglesRoot { component_period } => {
                Some(component_period)
            }
            RayClass::LandsOnArcPoint => Some(1),
            _ => None,
        }
    }

    pub fn ray_period(&self) -> Option<usize> {
        match *self {
            RayClass::LandsEvenParabolic { ray_period } => Some(ray_period),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayClassification {
    pub class: RayClass,
    pub orbit: AngleOrbitInfo,
    pub period_type: PeriodType,
    pub portrait: Option<OrbitPortrait>,
    pub verdict: Option<PortraitVerdict>,
}

pub fn classify(t: &Angle, d: u32) -> Result<RayClassification, AngleError> {
    let orbit = orbit_info(t, d)?;
    let period_type = PeriodType::from_orbit(orbit.preperiod, orbit.period);
    let mut portrait = None;
    let mut verdict = None;
    let class = match period_type {
        PeriodType::Fixed => RayClass::LandsOnArcPoint,
        PeriodType::Odd { k } => RayClass::WigglesCoRoot { component_period: k },
        PeriodType::FourFold { k } => RayClass::LandsEvenParabolic { ray_period: 4 * k },
        PeriodType::TwiceOdd { k } => {
            let p = generate_candidate(t, d).expect("period type already checked");
            let v = validate(&p, t);
            let class = if v.valid {
                RayClass::WigglesRoot { component_period: k }
            } else {
                RayClass::LandsEvenParabolic { ray_period: 2 * k }
            };
            portrait = Some(p);
            verdict = Some(v);
            class
        }
        PeriodType::Preperiodic { preperiod, period } => RayClass::LandsMisiurewicz { preperiod, period },
    };
    Ok(RayClassification {
        class,
        orbit,
        period_type,
        portrait,
        verdict,
    })
}

/// Flat, serializable evidence trail for one classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub angle: Angle,
    pub degree: u32,
    pub preperiod: usize,
    pub period: usize,
    pub class: String,
    pub component_period: Option<usize>,
    pub ray_period: Option<usize>,
    pub portrait: Option<OrbitPortrait>,
    pub characteristic_arc: Option<Arc>,
    pub failure_reason: Option<FailureReason>,
    pub period_type: PeriodType,
    pub cycle: Vec<Angle>,
    pub wake_index: Option<WakeIndex>,
    pub reflection_invariant: Option<bool>,
    pub notes: Vec<String>,
}

pub fn classification_report(t: &Angle, d: u32) -> Result<ClassificationReport, AngleError> {
    let c = classify(t, d)?;
    let mut notes = Vec::new();
    if let RayClass::LandsOnArcPoint = c.class {
        let deg = 360.0 / (d as f64 + 1.0);
        notes.push(format!(
            "(d+1)-fold rotational symmetry: omega = exp(2 pi i/{}) ({deg} degrees) maps the real 0-ray onto this ray",
            d + 1
        ));
    }
    if let RayClass::LandsEvenParabolic { .. } = c.class {
        if c.portrait.is_some() {
            notes.push("landing parameter is not determined combinatorially".to_string());
        }
    }
    let reflection_invariant = c.portrait.as_ref().map(|p| reflection_invariance_check(p, t));
    Ok(ClassificationReport {
        angle: t.clone(),
        degree: d,
        preperiod: c.orbit.preperiod,
        period: c.orbit.period,
        class: c.class.name().to_string(),
        component_period: c.class.component_period(),
        ray_period: c.class.ray_period(),
        characteristic_arc: c.verdict.as_ref().and_then(|v| v.characteristic_arc.clone()),
        failure_reason: c.verdict.as_ref().and_then(|v| v.failure_reason),
        portrait: c.portrait,
        period_type: c.period_type,
        cycle: c.orbit.cycle,
        wake_index: wake_index(t, d).ok(),
        reflection_invariant,
        notes,
    })
}
