use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{selftest, Cli, Command, Failure, Output, RenderTarget, TraceKind};
use crate::angles::{orbit_info, Angle, PeriodType};
use crate::classifier::classification_report;
use crate::dynamics::{period1_arc_point, trace_dynamical_ray, trace_parameter_ray, ComplexParam, StepPolicy};
use crate::fatou::{
    arc_point_with_height, critical_ecalle_height, fixed_point_index, gate_transit, parabolic_data,
    project_ray_to_cylinder, undecorated_certificate, ChartSettings, FatouPair, JuliaSettings,
};
use crate::portraits::{characteristic_arc, component_angles, generate_candidate, reflection_invariance_check, validate, wake_index};
use crate::render::{render_julia, render_multicorn, Overlay, RenderConfig};
use crate::witness::wiggle_report;

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn check_degree(d: u32) -> Result<(), Failure> {
    if d < 2 {
        return Err(Failure::Usage(format!("--degree must be at least 2, got {d}")));
    }
    Ok(())
}

pub(super) fn execute(cli: &Cli, stderr: &mut String) -> Result<Output, Failure> {
    let settings = ChartSettings::default();
    let report = match &cli.command {
        Command::Classify { degree, angle } => {
            check_degree(*degree)?;
            value(&classification_report(angle, *degree)?)
        }
        Command::Orbit { degree, angle } => {
            check_degree(*degree)?;
            let info = orbit_info(angle, *degree)?;
            let pt = PeriodType::from_orbit(info.preperiod, info.period);
            json!({ "orbit": info, "period_type": pt })
        }
        Command::Portrait { degree, angle } => {
            check_degree(*degree)?;
            portrait(angle, *degree)?
        }
        Command::Trace { kind, degree, angle, param, rmin, ratio } => {
            check_degree(*degree)?;
            if *rmin <= 1.0 || *ratio <= 1.0 {
                return Err(Failure::Usage("--rmin and --ratio must exceed 1".into()));
            }
            let policy = StepPolicy { ratio: *ratio, ..StepPolicy::default() };
            let trace = match kind {
                TraceKind::Param => trace_parameter_ray(angle, *degree, *rmin, &policy)?,
                TraceKind::Dyn => {
                    let c = param.ok_or_else(|| Failure::Usage("--param re,im is required for --kind dyn".into()))?;
                    trace_dynamical_ray(&ComplexParam::new(c.0, *degree), angle, *rmin, &policy)?
                }
            };
            json!({
                "completed": trace.completed(),
                "endpoint": trace.endpoint(),
                "tolerance": policy.tolerance,
                "policy": policy,
                "trace": trace,
            })
        }
        Command::Fatou { degree, phi, height } => {
            check_degree(*degree)?;
            fatou(*degree, *phi, *height, settings)?
        }
        Command::Cylinder { degree, angle, param, period } => {
            check_degree(*degree)?;
            let c = match (param, period) {
                (Some(p), _) => p.0,
                (None, 1) => period1_arc_point(*degree, 0.0).c,
                (None, _) => return Err(Failure::Usage("--param is required when --period is not 1".into())),
            };
            if period % 2 == 0 {
                return Err(Failure::Usage("--period must be odd".into()));
            }
            let proj = project_ray_to_cylinder(&ComplexParam::new(c, *degree), *period, angle, settings)?;
            json!({ "projection": proj, "width": proj.interval.width(), "asymmetry": proj.interval.asymmetry(), "tolerance": settings.tolerance })
        }
        Command::Undecorated { degree, param, floor, probes } => {
            check_degree(*degree)?;
            let c = param.map(|p| p.0).unwrap_or_else(|| period1_arc_point(*degree, 0.0).c);
            let js = JuliaSettings { probes: *probes, ..JuliaSettings::default() };
            let cert = undecorated_certificate(c, *degree, *floor, settings, &js)?;
            let passed = cert.positive;
            json!({ "certificate": cert, "passed": passed, "tolerance": js.tolerance, "julia_settings": js })
        }
        Command::Gate { degree, s, phi } => {
            check_degree(*degree)?;
            gate(*degree, s, *phi, settings)?
        }
        Command::IndexScan { degree, phi_range } => {
            check_degree(*degree)?;
            return index_scan(*degree, &phi_range.values());
        }
        Command::WiggleReport { degree, angle, rmin, rcut } => {
            check_degree(*degree)?;
            let r = wiggle_report(angle, *degree, *rmin, *rcut)?;
            for w in &r.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            value(&r)
        }
        Command::Render { target, degree, param, center, width, px, max_iter, palette, overlay } => {
            check_degree(*degree)?;
            let overlays: Vec<Overlay> = match overlay {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
                None => Vec::new(),
            };
            let config = RenderConfig {
                center: center.0,
                width: *width,
                pixels: (px.0, px.1),
                max_iter: *max_iter,
                palette: *palette,
                overlays,
                ..RenderConfig::default()
            };
            let (img, rep) = match target {
                RenderTarget::Multicorn => render_multicorn(*degree, &config),
                RenderTarget::Julia => {
                    let c = param.ok_or_else(|| Failure::Usage("--param re,im is required for julia".into()))?;
                    render_julia(c.0, *degree, &config)
                }
            };
            if rep.segments_clipped > 0 {
                let _ = writeln!(stderr, "warning: OutOfFrame: {} overlay segments clipped", rep.segments_clipped);
            }
            let path = cli.out.clone().unwrap_or_else(|| format!("{}.ppm", if *target == RenderTarget::Julia { "julia" } else { "multicorn" }).into());
            img.write_ppm(&path)?;
            json!({ "image": path, "width": img.width, "height": img.height, "overlay": rep })
        }
        Command::Selftest => selftest::run(),
    };
    Ok(Output::Report(report))
}

fn portrait(angle: &Angle, d: u32) -> Result<Value, Failure> {
    let candidate = generate_candidate(angle, d)?;
    let verdict = validate(&candidate, angle);
    Ok(json!({
        "portrait": candidate,
        "verdict": verdict,
        "characteristic_arc": characteristic_arc(&candidate),
        "reflection_invariant": reflection_invariance_check(&candidate, angle),
        "wake_index": wake_index(angle, d).ok(),
        "component_angles": component_angles(angle, d).ok(),
    }))
}

fn fatou(d: u32, phi: Option<f64>, height: Option<f64>, settings: ChartSettings) -> Result<Value, Failure> {
    let phi = match (phi, height) {
        (Some(p), _) => p,
        (None, Some(h)) => arc_point_with_height(d, h, settings)?.0,
        (None, None) => 0.0,
    };
    let arc = period1_arc_point(d, phi);
    let data = parabolic_data(&ComplexParam::new(arc.c, d), 1, arc.z0)?;
    let pair = FatouPair::new(&data, settings)?;
    let height = critical_ecalle_height(&pair.attracting)?;
    let index = fixed_point_index(&data)?;
    Ok(json!({
        "phi": phi,
        "c": arc.c,
        "z0": data.z0,
        "multiplier": data.multiplier,
        "a": data.a,
        "b": data.b,
        "residue_index": data.residue_index(),
        "kappa_attracting": pair.attracting.kappa,
        "kappa_repelling": pair.repelling.kappa,
        "kappa_raw": [pair.attracting.kappa_raw, pair.repelling.kappa_raw],
        "vertical_offsets": [pair.attracting.vertical_offset, pair.repelling.vertical_offset],
        "anchors": [pair.attracting.anchor, pair.repelling.anchor],
        "critical_height": height,
        "index": index,
        "tolerance": settings.tolerance,
    }))
}

fn gate(d: u32, s: &[f64], phi: f64, settings: ChartSettings) -> Result<Value, Failure> {
    let arc = period1_arc_point(d, phi);
    let data = parabolic_data(&ComplexParam::new(arc.c, d), 1, arc.z0)?;
    let pair = FatouPair::new(&data, settings)?;
    let outward = arc.c / arc.c.norm();
    let mut rows = Vec::new();
    for &si in s {
        if si <= 0.0 {
            return Err(Failure::Usage("--s values must be positive".into()));
        }
        match gate_transit(&pair, arc.c + si * outward, None, 100_000_000) {
            Ok(g) => rows.push(json!({ "stats": g, "n_sqrt_s": g.n as f64 * si.sqrt() })),
            Err(e) => {
                return Err(Failure::Numeric { message: format!("s = {si}: {e}"), partial: json!({ "transits": rows }) })
            }
        }
    }
    Ok(json!({ "phi": phi, "c": arc.c, "transits": rows, "tolerance": settings.tolerance }))
}

fn index_scan(d: u32, phis: &[f64]) -> Result<Output, Failure> {
    let mut csv = String::from("phi,c_re,c_im,iota_re,iota_im,change,radius,nodes\n");
    for &phi in phis {
        let arc = period1_arc_point(d, phi);
        let data = parabolic_data(&ComplexParam::new(arc.c, d), 1, arc.z0)?;
        let r = fixed_point_index(&data)?;
        let _ = writeln!(
            csv,
            "{phi},{},{},{},{},{:e},{:e},{}",
            arc.c.re, arc.c.im, r.iota.re, r.iota.im, r.change, r.radius, r.nodes
        );
    }
    Ok(Output::Csv(csv))
}
