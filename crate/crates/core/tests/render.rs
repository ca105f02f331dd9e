use multicorn::angles::Angle;
use multicorn::dynamics::{find_center, trace_parameter_ray, StepPolicy, C64};
use multicorn::render::{render_multicorn, Overlay, RenderConfig};

#[test]
fn ray_overlay_enters_period_three_wake() {
    let trace = trace_parameter_ray(&"3/7".parse::<Angle>().unwrap(), 2, 1.0 + 1e-6, &StepPolicy::default()).unwrap();
    let center = find_center(2, 3, C64::new(-1.75, 0.0)).unwrap();
    let mut cfg = RenderConfig { center: C64::new(-1.5, 0.0), width: 1.5, pixels: (240, 240), max_iter: 500, ..RenderConfig::default() };
    let (plain, _) = render_multicorn(2, &cfg);
    cfg.overlays = vec![Overlay::ray(trace, [255, 255, 0])];
    let (drawn, rep) = render_multicorn(2, &cfg);
    assert!(rep.segments_drawn > 0);
    let touched: Vec<C64> = (0..240u32)
        .flat_map(|j| (0..240u32).map(move |i| (i, j)))
        .filter(|&(i, j)| plain.pixel(i, j) != drawn.pixel(i, j))
        .map(|(i, j)| cfg.pixel_to_point(i, j))
        .collect();
    let nearest = touched.iter().map(|z| (z - center).norm()).fold(f64::INFINITY, f64::min);
    assert!(nearest < 0.03, "closest overlay pixel is {nearest} from the period-3 center");
}
