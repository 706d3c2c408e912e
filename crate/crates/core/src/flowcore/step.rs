use std::f64::consts::PI;

use super::velocity::{cyclic_velocity, velocity_of};
use super::{FlowEvent, FlowEventKind, FlowState, StepControl};
use crate::curvegeom::{arc_conforms, arc_measures, resample_arc, validate_arc, ClosedPolyline, Point2, QuarterArc};
use crate::error::{Error, Result};

/// Area lost per unit time is `AREA_RATE_TURNS.0 * pi + AREA_RATE_TURNS.1 * alpha`:
/// the total turning of the smooth part of both lobes.
pub const AREA_RATE_TURNS: (f64, f64) = (2.0, 4.0);

/// Largest stable step: `safety * h_min^2 / 2`.
pub fn adaptive_dt(state: &FlowState, ctl: &StepControl) -> f64 {
    ctl.safety * state.h_min * state.h_min / 2.0
}

/// `t + A / (2 pi + 4 alpha)`: the time left if the current area-loss rate
/// persisted.
pub fn vanishing_time_from(t: f64, area: f64, alpha: f64) -> f64 {
    t + area / (AREA_RATE_TURNS.0 * PI + AREA_RATE_TURNS.1 * alpha)
}

pub fn estimate_vanishing_time(state: &FlowState) -> Result<f64> {
    let m = arc_measures(&state.arc)?;
    Ok(vanishing_time_from(state.t, m.area, m.alpha))
}

fn heun(v: &[Point2], dt: f64, velocity: impl Fn(&[Point2]) -> Result<Vec<Point2>>, constrain: impl Fn(&mut [Point2])) -> Result<Vec<Point2>> {
    let v0 = velocity(v)?;
    let mut pred: Vec<Point2> = v.iter().zip(&v0).map(|(&p, &w)| p + w * dt).collect();
    constrain(&mut pred);
    let v1 = velocity(&pred)?;
    let mut next: Vec<Point2> = v
        .iter()
        .zip(v0.iter().zip(&v1))
        .map(|(&p, (&a, &b))| p + (a + b) * (0.5 * dt))
        .collect();
    constrain(&mut next);
    Ok(next)
}

fn pin_ends(v: &mut [Point2]) {
    let n = v.len();
    v[0] = Point2::ORIGIN;
    v[n - 1].y = 0.0;
}

/// One Heun step of normal motion, then endpoint constraints, then a
/// redistribution if the arc violates the resampling policy.
pub fn csf_step(state: &FlowState, dt: f64, ctl: &StepControl) -> Result<FlowState> {
    let mut next = state.clone();
    advance(&mut next, dt, ctl)?;
    Ok(next)
}

/// In-place [`csf_step`]; `state` is untouched on error.
pub(crate) fn advance(state: &mut FlowState, dt: f64, ctl: &StepControl) -> Result<()> {
    let limit = adaptive_dt(state, ctl);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("dt = {dt} exceeds the stable step {limit}")));
    }
    let next = heun(state.arc.vertices(), dt, velocity_of, pin_ends)?;
    let t = state.t + dt;
    let step_index = state.step_index + 1;
    validate_arc(&next).map_err(|e| Error::ResolutionCollapse {
        t,
        step: step_index,
        reason: e.to_string(),
    })?;
    let mut arc = QuarterArc::from_trusted(next);
    let policy = ctl.policy_at(arc.half_width(), state.x_initial);
    if !arc_conforms(&arc, &policy) {
        let from = arc.len();
        arc = resample_arc(&arc, &policy)?;
        state.events.push(FlowEvent {
            step: step_index,
            t,
            kind: FlowEventKind::Resample { from, to: arc.len() },
        });
    }
    state.h_min = arc.min_segment();
    state.arc = arc;
    state.t = t;
    state.step_index = step_index;
    Ok(())
}

/// One Heun step of normal motion for a closed curve (cyclic stencils, no
/// boundary rules, no resampling).
pub fn csf_step_closed(poly: &ClosedPolyline, dt: f64) -> Result<ClosedPolyline> {
    let next = heun(poly.vertices(), dt, cyclic_velocity, |_| {})?;
    ClosedPolyline::new(next)
}

/// Steps a closed curve from `t = 0` to `t_end` with `dt = safety h_min^2 / 2`,
/// shortening the last step to land on `t_end`. `on_step` sees every
/// accepted state with its time.
pub fn evolve_closed(
    poly: &ClosedPolyline,
    safety: f64,
    t_end: f64,
    mut on_step: impl FnMut(f64, &ClosedPolyline),
) -> Result<ClosedPolyline> {
    let mut cur = poly.clone();
    let mut t = 0.0;
    while t < t_end {
        let h = cur.min_segment();
        let dt = (safety * h * h / 2.0).min(t_end - t);
        cur = csf_step_closed(&cur, dt)?;
        t = if t_end - t <= dt { t_end } else { t + dt };
        on_step(t, &cur);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::curvegeom::reconstruct_figure_eight;
    use crate::flowcore::{evolve, StopReason};
    use crate::seeds::{circle_polygon, lemniscate_arc};

    fn mean_radius(p: &ClosedPolyline) -> f64 {
        p.vertices().iter().map(|q| q.norm()).sum::<f64>() / p.len() as f64
    }

    /// Controls that never trigger a redistribution.
    fn frozen(ctl: StepControl) -> StepControl {
        StepControl { h_max: 1e9, dtheta_max: 1.5, coarsen_ratio: 0.0, ..ctl }
    }

    #[test]
    fn dt_formula() {
        let arc = lemniscate_arc(1.0, 64).unwrap();
        let mut state = FlowState::new(arc.clone());
        let ctl = StepControl::for_resolution(arc.length(), arc.len());
        state.h_min = 0.01;
        assert!((adaptive_dt(&state, &ctl) - 2e-5).abs() < 1e-18);
        state.h_min = 0.005;
        assert!((adaptive_dt(&state, &ctl) - 5e-6).abs() < 1e-18);
    }

    #[test]
    fn oversized_step_is_refused() {
        let arc = lemniscate_arc(1.0, 64).unwrap();
        let state = FlowState::new(arc.clone());
        let ctl = StepControl::for_resolution(arc.length(), arc.len());
        let dt = adaptive_dt(&state, &ctl) * 1.01;
        assert!(matches!(csf_step(&state, dt, &ctl), Err(Error::Precondition(_))));
    }

    #[test]
    fn circle_radius_after_one_step() {
        let dt = 1e-5;
        let p = csf_step_closed(&circle_polygon(1.0, 512).unwrap(), dt).unwrap();
        // R' = -1/R; the inscribed polygon moves with its exact Menger curvature
        let expected = (1.0f64 - 2.0 * dt).sqrt();
        assert!((mean_radius(&p) - expected).abs() <= 1e-12);
        assert!((mean_radius(&p) - (1.0 - dt)).abs() <= 2.0 * dt * dt);
    }

    #[test]
    fn circle_to_late_times() {
        for (t_end, r_end) in [(0.3, 0.4f64.sqrt()), (0.45, 0.1f64.sqrt())] {
            let p = evolve_closed(&circle_polygon(1.0, 512).unwrap(), 0.4, t_end, |_, _| {}).unwrap();
            let r_area = (p.signed_area() / PI).sqrt();
            assert!((r_area - r_end).abs() <= 1e-3, "{r_area} vs {r_end}");
            assert!((mean_radius(&p) - r_end).abs() <= 1e-3);
        }
    }

    #[test]
    fn halving_steps_agrees_to_second_order() {
        // one step of dt against two of dt/2, at two sizes of dt
        let start = circle_polygon(1.0, 64).unwrap();
        let gap = |dt: f64| {
            let one = csf_step_closed(&start, dt).unwrap();
            let half = csf_step_closed(&csf_step_closed(&start, dt / 2.0).unwrap(), dt / 2.0).unwrap();
            one.vertices()
                .iter()
                .zip(half.vertices())
                .map(|(a, b)| a.distance(*b))
                .fold(0.0, f64::max)
        };
        let dt0 = 2e-3;
        let c = gap(dt0) / (dt0 * dt0);
        let g1 = gap(dt0 / 2.0);
        assert!(g1 <= c * (dt0 / 2.0).powi(2), "{g1} vs {}", c * (dt0 / 2.0).powi(2));
        // a second-order method differs from itself by O(dt^3) per step
        assert!(gap(dt0) / g1 > 6.0);
    }

    #[test]
    fn ellipse_rounds_off() {
        let n = 256;
        let ellipse = ClosedPolyline::new(
            (0..n)
                .map(|i| {
                    let u = std::f64::consts::TAU * i as f64 / n as f64;
                    Point2::new(2.0 * u.cos(), u.sin())
                })
                .collect(),
        )
        .unwrap();
        let mut aspect = Vec::new();
        let mut k = 0;
        evolve_closed(&ellipse, 0.4, 0.8, |_, p| {
            k += 1;
            if k % 200 == 0 {
                let (x, y) = p.half_extents();
                aspect.push(x / y);
            }
        })
        .unwrap();
        assert!(aspect.windows(2).all(|w| w[1] < w[0]), "{aspect:?}");
        assert!(aspect[aspect.len() - 1] < 1.2);
    }

    #[test]
    fn rounded_square_loses_area_at_two_pi() {
        // unit square with corners of radius 0.2, traversed counterclockwise
        let r = 0.2;
        let mut v = Vec::new();
        let centres = [(0.3, 0.3), (-0.3, 0.3), (-0.3, -0.3), (0.3, -0.3)];
        for (k, (cx, cy)) in centres.iter().enumerate() {
            for j in 0..40 {
                let u = (k as f64 + j as f64 / 40.0) * FRAC_PI_2;
                v.push(Point2::new(cx + r * u.cos(), cy + r * u.sin()));
            }
            let u = (k as f64 + 1.0) * FRAC_PI_2;
            let (ex, ey) = (cx + r * u.cos(), cy + r * u.sin());
            let (nx, ny) = centres[(k + 1) % 4];
            let (sx, sy) = (nx + r * u.cos(), ny + r * u.sin());
            for j in 0..30 {
                let s = j as f64 / 30.0;
                v.push(Point2::new(ex + s * (sx - ex), ey + s * (sy - ey)));
            }
        }
        let poly = ClosedPolyline::new(v).unwrap();
        let mut samples = Vec::new();
        evolve_closed(&poly, 0.4, 0.04, |t, p| samples.push((t, p.signed_area()))).unwrap();
        let late: Vec<_> = samples.iter().filter(|s| s.0 >= 0.01).collect();
        let (a, b) = (late[0], late[late.len() - 1]);
        let rate = -(b.1 - a.1) / (b.0 - a.0);
        assert!((rate / (2.0 * PI) - 1.0).abs() <= 0.02, "{rate}");
    }

    #[test]
    fn vanishing_time_examples() {
        assert!((vanishing_time_from(0.0, PI, 0.0) - 0.5).abs() < 1e-15);
        let state = FlowState::new(lemniscate_arc(1.0, 800).unwrap());
        let t_hat = estimate_vanishing_time(&state).unwrap();
        // area 1 and alpha = pi/4: both lobes turn by 2 pi + 4 alpha = 3 pi
        assert!((t_hat - 1.0 / (3.0 * PI)).abs() <= 1e-3, "{t_hat}");
    }

    #[test]
    fn zero_step_budget_is_a_no_op() {
        let arc = lemniscate_arc(1.0, 64).unwrap();
        let mut ctl = StepControl::for_resolution(arc.length(), arc.len());
        ctl.max_steps = 0;
        let state = FlowState::new(arc);
        let out = evolve(state.clone(), &ctl, None).unwrap();
        assert_eq!(out.stop, StopReason::MaxSteps);
        assert_eq!(out.state, state);
    }

    #[test]
    fn quarter_step_matches_the_closed_step() {
        let arc = lemniscate_arc(1.0, 120).unwrap();
        let state = FlowState::new(arc.clone());
        let ctl = frozen(StepControl::for_resolution(arc.length(), arc.len()));
        let dt = adaptive_dt(&state, &ctl);
        let quarter = csf_step(&state, dt, &ctl).unwrap();
        assert!(quarter.events.is_empty());
        let closed = csf_step_closed(&reconstruct_figure_eight(&arc), dt).unwrap();
        let unfolded = reconstruct_figure_eight(&quarter.arc);
        for (p, q) in unfolded.vertices().iter().zip(closed.vertices()) {
            assert!(p.distance(*q) <= 1e-12, "{p:?} vs {q:?}");
        }
    }

    #[test]
    fn area_decreases_every_step() {
        let arc = lemniscate_arc(1.0, 200).unwrap();
        let ctl = StepControl::for_resolution(arc.length(), arc.len());
        let mut state = FlowState::new(arc);
        let mut area = arc_measures(&state.arc).unwrap().area;
        for _ in 0..2000 {
            let dt = adaptive_dt(&state, &ctl);
            advance(&mut state, dt, &ctl).unwrap();
            let a = arc_measures(&state.arc).unwrap().area;
            assert!(a < area);
            area = a;
        }
        assert!((state.h_min - state.arc.min_segment()).abs() <= 1e-12);
    }
}
