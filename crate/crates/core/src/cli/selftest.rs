use serde_json::{json, Value};

use crate::angles::Angle;
use crate::classifier::classify;
use crate::dynamics::{find_center, period1_arc_point, trace_dynamical_ray, trace_parameter_ray, ComplexParam, StepPolicy, C64};
use crate::fatou::{critical_ecalle_height, fixed_point_index, parabolic_data, ChartSettings, FatouPair};
use crate::render::{render_multicorn, RenderConfig};

fn angle(s: &str) -> Angle {
    s.parse().expect("literal angle")
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, String), String>) -> Value {
    let (passed, detail) = f().unwrap_or_else(|e| (false, e));
    json!({ "name": name, "passed": passed, "detail": detail })
}

/// Fast acceptance subset; the report carries `passed`.
pub(super) fn run() -> Value {
    let checks = vec![
        check("classifier verdicts", || {
            let expected = [("0", "LandsOnArcPoint"), ("3/7", "WigglesRoot"), ("4/7", "WigglesRoot"), ("1/7", "LandsEvenParabolic"), ("1/9", "WigglesCoRoot"), ("1/15", "LandsEvenParabolic"), ("1/2", "LandsMisiurewicz")];
            let mut bad = Vec::new();
            for (a, want) in expected {
                let got = classify(&angle(a), 2).map_err(|e| e.to_string())?.class.name();
                if got != want {
                    bad.push(format!("{a}: {got}"));
                }
            }
            Ok((bad.is_empty(), bad.join("; ")))
        }),
        check("period-1 arc anchors", || {
            let c2 = period1_arc_point(2, 0.0).c;
            let c3 = period1_arc_point(3, 0.0).c;
            let e3 = (c3 - 2.0 * 3f64.powf(-1.5)).norm();
            Ok((c2 == C64::new(0.25, 0.0) && e3 < 1e-12, format!("c_2 = {c2}, |c_3 - 2*3^-1.5| = {e3:e}")))
        }),
        check("quarter Fatou normalization", || {
            let data = parabolic_data(&ComplexParam::new(C64::new(0.25, 0.0), 2), 1, C64::new(0.5, 0.0)).map_err(|e| e.to_string())?;
            let pair = FatouPair::new(&data, ChartSettings::default()).map_err(|e| e.to_string())?;
            let h = critical_ecalle_height(&pair.attracting).map_err(|e| e.to_string())?;
            let k = pair.attracting.kappa.re;
            let iota = fixed_point_index(&data).map_err(|e| e.to_string())?.iota;
            let ok = (k - 0.5).abs() < 1e-8 && h.abs() < 1e-6 && (iota - 0.5).norm() < 1e-4;
            Ok((ok, format!("Re kappa = {k}, critical height = {h:e}, index = {iota}")))
        }),
        check("airplane co-landing 3/7, 4/7", || {
            let c = find_center(2, 3, C64::new(-1.7, 0.0)).map_err(|e| e.to_string())?;
            let p = ComplexParam::new(c, 2);
            let end = |a: &str| -> Result<C64, String> {
                let t = trace_dynamical_ray(&p, &angle(a), 1.0 + 1e-8, &StepPolicy::default()).map_err(|e| e.to_string())?;
                t.endpoint().ok_or_else(|| "empty trace".to_string())
            };
            let sep = (end("3/7")? - end("4/7")?).norm();
            Ok((sep < 1e-3, format!("center {c}, separation {sep:e}")))
        }),
        check("parameter ray 1/2 lands at -2", || {
            let t = trace_parameter_ray(&angle("1/2"), 2, 1.0 + 1e-6, &StepPolicy::default()).map_err(|e| e.to_string())?;
            let e = t.endpoint().ok_or("empty trace")?;
            Ok(((e + 2.0).norm() < 1e-2, format!("endpoint {e}")))
        }),
        check("multicorn mirror symmetry", || {
            let cfg = RenderConfig { pixels: (121, 121), max_iter: 300, ..RenderConfig::default() };
            let (img, _) = render_multicorn(2, &cfg);
            let mut same = 0;
            for j in 0..121 {
                for i in 0..121 {
                    same += (img.pixel(i, j) == img.pixel(i, 120 - j)) as usize;
                }
            }
            let frac = same as f64 / (121.0 * 121.0);
            Ok((frac >= 0.99, format!("agreement {frac}")))
        }),
    ];
    let passed = checks.iter().all(|c| c["passed"] == true);
    json!({ "checks": checks, "passed": passed })
}
