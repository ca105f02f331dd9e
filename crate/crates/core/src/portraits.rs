//! Candidate orbit portraits generated from a seed angle, and the formal
//! portrait checks that decide root-arc accumulation.
//!
//! Everything here is exact; no floating point is involved.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{angle_map, angle_map_iter, orbit_info, Angle, AngleError, PeriodType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PortraitError {
    #[error("angle {angle} has period type {found:?}; expected period 2k with k odd")]
    WrongPeriodClass { angle: Angle, found: PeriodType },
    #[error("angle sets are not disjoint")]
    NotDisjoint,
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error("angle {angle} is fixed; it lies on a wake boundary")]
    FixedAngle { angle: Angle },
}

/// Cycle of finite angle sets `A_1 .. A_k` for the map `t -> -d t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPortrait {
    pub degree: u32,
    pub cycles: Vec<Vec<Angle>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    NotBijective,
    PeriodMismatch,
    Linked,
    CharacteristicArcMismatch,
    CharacteristicArcTie,
    ArcTooLong,
}

/// Open counterclockwise arc `(start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
}

impl Arc {
    pub fn length(&self) -> Angle {
        self.start.arc_length_to(&self.end)
    }

    /// Length as a fraction of the circle; a degenerate arc (`start == end`) is the full circle.
    fn length_cmp_key(&self) -> (bool, Angle) {
        (self.start == self.end, self.length())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicArc {
    pub arc: Arc,
    /// Index of the cycle the arc complements.
    pub cycle_index: usize,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitVerdict {
    pub valid: bool,
    pub failure_reason: Option<FailureReason>,
    pub characteristic_arc: Option<Arc>,
}

impl PortraitVerdict {
    fn fail(reason: FailureReason, arc: Option<Arc>) -> Self {
        Self {
            valid: false,
            failure_reason: Some(reason),
            characteristic_arc: arc,
        }
    }
}

/// Angles of a hyperbolic component of odd period as far as they follow from one member angle.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentAngles {
    pub k: usize,
    pub coroot_angles: Vec<Angle>,
    pub root_angles: Vec<Angle>,
}

/// `P = {A_1, .., A_k}` with `A_1 = {t, (-d)^k t}` and `A_{i+1} = -d A_i`.
pub fn generate_candidate(t: &Angle, d: u32) -> Result<OrbitPortrait, PortraitError> {
    let info = orbit_info(t, d)?;
    let ptype = PeriodType::from_orbit(info.preperiod, info.period);
    let k = match ptype {
        PeriodType::TwiceOdd { k } => k,
        found => {
            return Err(PortraitError::WrongPeriodClass {
                angle: t.clone(),
                found,
            })
        }
    };
    let partner = angle_map_iter(t, d, k as u32);
    let mut cycles = Vec::with_capacity(k);
    let mut set = vec![t.clone(), partner];
    for _ in 0..k {
        let next = set.iter().map(|s| angle_map(s, d)).collect();
        cycles.push(set);
        set = next;
    }
    Ok(OrbitPortrait { degree: d, cycles })
}

fn sorted(set: &[Angle]) -> Vec<Angle> {
    let mut v = set.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Complementary arcs of a finite angle set, in increasing order of start angle.
fn complementary_arcs(set: &[Angle]) -> Vec<Arc> {
    let s = sorted(set);
    (0..s.len())
        .map(|i| Arc {
            start: s[i].clone(),
            end: s[(i + 1) % s.len()].clone(),
        })
        .collect()
}

/// True iff `b` lies entirely in one complementary arc of `a`.
pub fn unlinked(a: &[Angle], b: &[Angle]) -> Result<bool, PortraitError> {
    if a.iter().any(|x| b.contains(x)) {
        return Err(PortraitError::NotDisjoint);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let arcs = complementary_arcs(a);
    let which = |x: &Angle| arcs.iter().position(|arc| Angle::in_open_arc(&arc.start, &arc.end, x));
    let first = which(&b[0]);
    Ok(b.iter().all(|x| which(x) == first))
}

/// Shortest complementary arc over all cycles; `tie` when the minimum is attained twice.
pub fn characteristic_arc(p: &OrbitPortrait) -> Option<CharacteristicArc> {
    let mut best: Option<(Arc, usize)> = None;
    let mut tie = false;
    for (j, set) in p.cycles.iter().enumerate() {
        for arc in complementary_arcs(set) {
            match &best {
                None => best = Some((arc, j)),
                Some((b, _)) => match arc.length_cmp_key().cmp(&b.length_cmp_key()) {
                    std::cmp::Ordering::Less => {
                        best = Some((arc, j));
                        tie = false;
                    }
                    std::cmp::Ordering::Equal => tie = true,
                    std::cmp::Ordering::Greater => {}
                },
            }
        }
    }
    best.map(|(arc, cycle_index)| CharacteristicArc { arc, cycle_index, tie })
}

/// Checks the five formal-portrait properties with characteristic angles `t` and `(-d)^k t`.
pub fn validate(p: &OrbitPortrait, t: &Angle) -> PortraitVerdict {
    use FailureReason::*;
    let d = p.degree;
    let k = p.cycles.len();

    // finite, nonempty
    if k == 0 || p.cycles.iter().any(|a| a.is_empty()) {
        return PortraitVerdict::fail(NotBijective, None);
    }
    // -d maps A_j bijectively onto A_{j+1}
    for j in 0..k {
        let image = sorted(&p.cycles[j].iter().map(|s| angle_map(s, d)).collect::<Vec<_>>());
        let target = sorted(&p.cycles[(j + 1) % k]);
        if image.len() != p.cycles[j].len() || image != target {
            return PortraitVerdict::fail(NotBijective, None);
        }
    }
    // common exact period 2k
    for a in p.cycles.iter().flatten() {
        match orbit_info(a, d) {
            Ok(o) if o.preperiod == 0 && o.period == 2 * k => {}
            _ => return PortraitVerdict::fail(PeriodMismatch, None),
        }
    }
    // pairwise unlinked
    for i in 0..k {
        for j in i + 1..k {
            match unlinked(&p.cycles[i], &p.cycles[j]) {
                Ok(true) => {}
                _ => return PortraitVerdict::fail(Linked, None),
            }
        }
    }
    // distinguished short characteristic arc bounded by t and (-d)^k t
    let Some(ch) = characteristic_arc(p) else {
        return PortraitVerdict::fail(NotBijective, None);
    };
    if ch.tie {
        return PortraitVerdict::fail(CharacteristicArcTie, Some(ch.arc));
    }
    let len = ch.arc.length();
    let bound = Angle::new(1u32, d).expect("d >= 2");
    if ch.arc.start == ch.arc.end || len >= bound {
        return PortraitVerdict::fail(ArcTooLong, Some(ch.arc));
    }
    let partner = angle_map_iter(t, d, k as u32);
    let ends = sorted(&[ch.arc.start.clone(), ch.arc.end.clone()]);
    if ends != sorted(&[t.clone(), partner]) {
        return PortraitVerdict::fail(CharacteristicArcMismatch, Some(ch.arc));
    }
    PortraitVerdict {
        valid: true,
        failure_reason: None,
        characteristic_arc: Some(ch.arc),
    }
}

/// Whether the co-landing relation recorded by `p` is preserved by `s -> 2t - s`.
pub fn reflection_invariance_check(p: &OrbitPortrait, t: &Angle) -> bool {
    let two_t = t.scale(&BigInt::from(2));
    let reflect = |s: &Angle| two_t.sub(s);
    let classes: Vec<Vec<Angle>> = p.cycles.iter().map(|a| sorted(a)).collect();
    classes.iter().all(|class| {
        let image = sorted(&class.iter().map(reflect).collect::<Vec<_>>());
        // Classes of size one impose no co-landing constraint.
        image.len() < 2 || classes.contains(&image)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WakeIndex {
    pub j: u32,
    /// `2t = (2j+1)/(d+1)`.
    pub midpoint: bool,
}

/// The `j` with `j/(d+1) < t < (j+1)/(d+1)`.
pub fn wake_index(t: &Angle, d: u32) -> Result<WakeIndex, PortraitError> {
    let scaled = t.num() * (d + 1u32);
    let (j, rem) = num_integer::Integer::div_rem(&scaled, t.den());
    if num_traits::Zero::is_zero(&rem) {
        return Err(PortraitError::FixedAngle { angle: t.clone() });
    }
    let j: u32 = num_traits::ToPrimitive::to_u32(&j).expect("j <= d");
    // 2t(d+1) == 2j+1
    let midpoint = &scaled * 2u32 == t.den() * (2 * j + 1);
    Ok(WakeIndex { j, midpoint })
}

/// Component angles derivable from a classified member angle.
pub fn component_angles(t: &Angle, d: u32) -> Result<ComponentAngles, PortraitError> {
    let info = orbit_info(t, d)?;
    match PeriodType::from_orbit(info.preperiod, info.period) {
        PeriodType::Odd { k } => Ok(ComponentAngles {
            k,
            coroot_angles: vec![t.clone()],
            root_angles: vec![],
        }),
        PeriodType::TwiceOdd { k } => {
            let p = generate_candidate(t, d)?;
            let v = validate(&p, t);
            let root_angles = if v.valid { sorted(&p.cycles[0]) } else { vec![] };
            Ok(ComponentAngles {
                k,
                coroot_angles: vec![],
                root_angles,
            })
        }
        found => Err(PortraitError::WrongPeriodClass {
            angle: t.clone(),
            found,
        }),
    }
}
