use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::trace::read_trace;
use crate::diagnostics::TraceRecord;
use crate::error::Result;
use crate::flowcore::evolve_closed;
use crate::seeds::circle_polygon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    InsufficientData,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::InsufficientData => "INSUFFICIENT DATA",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub results: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Pass)
    }

    /// 0 when every criterion passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn get(&self, id: u32) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let _ = writeln!(s, "{:>2}  {:<24} {:<17} {}", r.id, r.name, r.status.to_string(), r.detail);
        }
        s
    }
}

/// Closed-curve solver against the shrinking circle `R(t) = sqrt(1 - 2t)`.
///
/// Menger curvature is exact on any polygon inscribed in a circle, so the
/// vertices track `R(t)` to rounding; the polygon's equal-area radius
/// `sqrt(A / pi)` carries the second-order discretization error instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleOracle {
    pub n: usize,
    /// Largest `|sqrt(A/pi) - R(t)|` down to the final radius.
    pub max_error: f64,
    /// Same at `2n` vertices.
    pub max_error_refined: f64,
    /// Largest `|mean vertex radius - R(t)|` at `n` vertices.
    pub vertex_error: f64,
}

fn circle_errors(n: usize, r_end: f64) -> Result<(f64, f64)> {
    let poly = circle_polygon(1.0, n)?;
    let (mut area_err, mut vertex_err) = (0.0f64, 0.0f64);
    evolve_closed(&poly, 0.4, (1.0 - r_end * r_end) / 2.0, |t, p| {
        let r = (1.0 - 2.0 * t).sqrt();
        let mean = p.vertices().iter().map(|q| q.norm()).sum::<f64>() / n as f64;
        area_err = area_err.max(((p.signed_area() / PI).sqrt() - r).abs());
        vertex_err = vertex_err.max((mean - r).abs());
    })?;
    Ok((area_err, vertex_err))
}

/// Runs the circle oracle at `n` and `2n` vertices down to radius 0.3.
pub fn circle_oracle(n: usize) -> Result<CircleOracle> {
    let (max_error, vertex_error) = circle_errors(n, 0.3)?;
    let (max_error_refined, _) = circle_errors(2 * n, 0.3)?;
    Ok(CircleOracle { n, max_error, max_error_refined, vertex_error })
}

/// Late-time criteria need the run to get this close to the vanishing time,
/// relative to its start.
const LATE_PROGRESS: f64 = 1e-2;
/// Rows before `T_hat - t` halves count as the initial transient.
const TRANSIENT: f64 = 0.5;
const MIN_WINDOW_ROWS: usize = 3;

fn remaining(r: &TraceRecord) -> f64 {
    r.t_hat - r.t
}

fn tau(r: &TraceRecord) -> f64 {
    -remaining(r).ln()
}

/// Rows with `T_hat - t <= LATE_PROGRESS (T_hat - t)_0`.
fn late_window(rows: &[TraceRecord]) -> Option<&[TraceRecord]> {
    let cut = LATE_PROGRESS * remaining(rows.first()?);
    let k = rows.iter().position(|r| remaining(r) <= cut)?;
    (rows.len() - k >= MIN_WINDOW_ROWS).then(|| &rows[k..])
}

/// Rows within one decade of the final `T_hat - t`.
fn final_decade(rows: &[TraceRecord]) -> Option<&[TraceRecord]> {
    late_window(rows)?;
    let cut = 10.0 * remaining(rows.last()?);
    let k = rows.iter().position(|r| remaining(r) <= cut)?;
    (rows.len() - k >= MIN_WINDOW_ROWS).then(|| &rows[k..])
}

/// Negative least-squares slope against logarithmic time, and a last value
/// below the first.
fn decreasing_trend(rows: &[TraceRecord], value: impl Fn(&TraceRecord) -> f64) -> (bool, f64) {
    let n = rows.len() as f64;
    let (mx, my) = rows
        .iter()
        .fold((0.0, 0.0), |(a, b), r| (a + tau(r) / n, b + value(r) / n));
    let (sxy, sxx) = rows.iter().fold((0.0, 0.0), |(sxy, sxx), r| {
        let dx = tau(r) - mx;
        (sxy + dx * (value(r) - my), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    let ok = slope < 0.0 && value(&rows[rows.len() - 1]) < value(&rows[0]);
    (ok, slope)
}

struct Builder(Vec<CriterionResult>);

impl Builder {
    fn push(&mut self, id: u32, name: &str, status: Status, detail: String) {
        self.0.push(CriterionResult { id, name: name.into(), status, detail });
    }

    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        self.push(id, name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    fn missing(&mut self, id: u32, name: &str, what: &str) {
        self.push(id, name, Status::InsufficientData, what.into());
    }
}

const NO_LATE: &str = "trace does not reach the late-time window";

/// Evaluates every acceptance criterion on a trace (time-ordered rows), an
/// optional trace of the same run at a quarter of the resolution, and the
/// circle oracle.
pub fn evaluate(
    rows: &[TraceRecord],
    coarse: Option<&[TraceRecord]>,
    circle: &CircleOracle,
) -> VerifyReport {
    let mut b = Builder(Vec::new());

    let ratio = circle.max_error / circle.max_error_refined;
    b.check(
        1,
        "circle oracle",
        circle.max_error <= 1e-3 && ratio >= 3.5,
        format!(
            "max |R_num - R| = {:.3e} at n = {}, refinement ratio {:.2}, vertex radius error {:.1e}",
            circle.max_error, circle.n, ratio, circle.vertex_error
        ),
    );

    if rows.len() < 2 {
        for (id, name) in NAMES.iter().skip(1) {
            b.missing(*id, name, "trace has fewer than two rows");
        }
        return VerifyReport { results: b.0 };
    }
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let late = late_window(rows);
    let decade = final_decade(rows);

    // 2: area slope bracket everywhere, then A/(T_hat - t) near 2 pi at the end
    match decade {
        None => b.missing(2, NAMES[1].1, NO_LATE),
        Some(dec) => {
            let mut bad = Vec::new();
            for w in rows.windows(2) {
                let slope = -(w[1].area - w[0].area) / (w[1].t - w[0].t);
                let alpha = 0.5 * (w[0].alpha + w[1].alpha);
                let (lo, hi) = (2.0 * PI * 0.95, (2.0 * PI + 2.0 * alpha) * 1.05);
                if !(slope >= lo && slope <= hi) {
                    bad.push((w[1].t, slope, hi));
                }
            }
            let ratio_ok = dec
                .iter()
                .all(|r| (r.area / remaining(r) - 2.0 * PI).abs() <= 0.1 * 2.0 * PI);
            let end_ratio = last.area / remaining(last);
            let detail = match bad.first() {
                Some(&(t, s, hi)) => format!(
                    "{} of {} slopes outside the bracket (first at t = {t:.6}: {s:.4} > {hi:.4}); final A/(T_hat-t) = {end_ratio:.4}",
                    bad.len(),
                    rows.len() - 1
                ),
                None => format!("all slopes in bracket; final A/(T_hat-t) = {end_ratio:.4}"),
            };
            b.check(2, NAMES[1].1, bad.is_empty() && ratio_ok, detail);
        }
    }

    // 3: angle decay
    match late {
        None => b.missing(3, NAMES[2].1, NO_LATE),
        Some(_) => {
            let cut = TRANSIENT * remaining(first);
            let k = rows.iter().position(|r| remaining(r) <= cut).unwrap_or(0);
            let rises = rows[k..].windows(2).filter(|w| w[1].alpha > w[0].alpha).count();
            b.check(
                3,
                NAMES[2].1,
                rises == 0 && last.alpha <= first.alpha / 2.0,
                format!("alpha {:.4} -> {:.4}, {rises} increases after the transient", first.alpha, last.alpha),
            );
        }
    }

    // 4: Grim Reaper gaps
    match late {
        None => b.missing(4, NAMES[3].1, NO_LATE),
        Some(w) => {
            let (trend, slope) = decreasing_trend(w, |r| r.gr_gap_f);
            b.check(
                4,
                NAMES[3].1,
                trend && last.gr_gap_f <= 0.1 && last.gr_gap_ftheta <= 0.2,
                format!(
                    "gap_F {:.4} (trend slope {slope:.2e}), gap_Ftheta {:.4} at t_end",
                    last.gr_gap_f, last.gr_gap_ftheta
                ),
            );
        }
    }

    // 5: Y bound
    match late {
        None => b.missing(5, NAMES[4].1, NO_LATE),
        Some(_) => {
            let ky = last.kappa_right * last.y;
            b.check(
                5,
                NAMES[4].1,
                (0.85 * FRAC_PI_2..=1.15 * FRAC_PI_2).contains(&ky),
                format!("kappa_right Y = {ky:.4} at t_end (target pi/2 = {FRAC_PI_2:.4})"),
            );
        }
    }

    // 6: X bound
    match decade {
        None => b.missing(6, NAMES[5].1, NO_LATE),
        Some(d) => {
            let beta_min = d.iter().map(|r| r.beta).fold(f64::INFINITY, f64::min);
            let ell_up = d.windows(2).all(|w| w[1].ell > w[0].ell);
            b.check(
                6,
                NAMES[5].1,
                beta_min > 2.0 && ell_up,
                format!("min beta {beta_min:.4} over {} rows, ell increasing: {ell_up}", d.len()),
            );
        }
    }

    // 7: bowtie
    match late {
        None => b.missing(7, NAMES[6].1, NO_LATE),
        Some(w) => {
            let (trend, _) = decreasing_trend(w, |r| r.box_area);
            let ok = last.bowtie_dist < first.bowtie_dist
                && last.bowtie_dist <= 0.2
                && (2.0..=2.3).contains(&last.box_area)
                && trend;
            b.check(
                7,
                NAMES[6].1,
                ok,
                format!(
                    "bowtie distance {:.4} -> {:.4}; box area {:.4} at t_end (decreasing: {trend})",
                    first.bowtie_dist, last.bowtie_dist, last.box_area
                ),
            );
        }
    }

    // 8: migration
    match late {
        None => b.missing(8, NAMES[7].1, NO_LATE),
        Some(w) => {
            let dist = |r: &TraceRecord| (r.migration_x - 1.0).hypot(r.migration_y - 1.0);
            let (trend, slope) = decreasing_trend(w, dist);
            b.check(
                8,
                NAMES[7].1,
                trend,
                format!("|m - (1,1)| {:.4} -> {:.4} over the late window (slope {slope:.2e})", dist(&w[0]), dist(last)),
            );
        }
    }

    // 9: structure
    {
        let convex = rows.iter().all(|r| r.convex);
        let margin = rows.iter().map(|r| r.kappa_theta_margin).fold(f64::INFINITY, f64::min);
        let zeros_ok = rows.windows(2).all(|w| w[1].node_zero_count <= w[0].node_zero_count);
        b.check(
            9,
            NAMES[8].1,
            convex && margin > 0.0 && zeros_ok,
            format!(
                "convex: {convex}, min kappa_theta margin {margin:.3e}, node zeros {} -> {} (non-increasing: {zeros_ok})",
                first.node_zero_count, last.node_zero_count
            ),
        );
    }

    // 10: identities and their refinement
    {
        let sup = rows.iter().map(|r| r.support_residual).fold(0.0, f64::max);
        let int = rows.iter().map(|r| r.integral_residual).fold(0.0, f64::max);
        let bounded = sup <= 0.02 && int <= 0.02;
        match coarse.map(|c| refinement_ratios(rows, c)) {
            None => b.push(
                10,
                NAMES[9].1,
                if bounded { Status::InsufficientData } else { Status::Fail },
                format!("max residuals {sup:.2e} / {int:.2e}; no coarse trace for the refinement check"),
            ),
            Some(None) => b.push(
                10,
                NAMES[9].1,
                if bounded { Status::InsufficientData } else { Status::Fail },
                format!("max residuals {sup:.2e} / {int:.2e}; too few matching rows in the coarse trace"),
            ),
            Some(Some((rs, ri, matched))) => b.check(
                10,
                NAMES[9].1,
                bounded && rs >= 4.0 && ri >= 4.0,
                format!(
                    "max residuals {sup:.2e} / {int:.2e}; worst refinement gain {rs:.2} / {ri:.2} over {matched} rows"
                ),
            ),
        }
    }

    // 11: nodal estimate
    match late {
        None => b.missing(11, NAMES[10].1, NO_LATE),
        Some(w) => {
            let bad = w.iter().filter(|r| r.nodal_ok != Some(true)).count();
            b.check(11, NAMES[10].1, bad == 0, format!("{bad} of {} late rows fail P < K", w.len()));
        }
    }

    VerifyReport { results: b.0 }
}

const NAMES: [(u32, &str); 11] = [
    (1, "circle oracle"),
    (2, "area slope"),
    (3, "angle decay"),
    (4, "grim reaper"),
    (5, "y bound"),
    (6, "x bound"),
    (7, "bowtie"),
    (8, "migration"),
    (9, "structure"),
    (10, "identities"),
    (11, "nodal estimate"),
];

/// Smallest coarse/fine ratio of the support and integral residuals, matching
/// rows by half-width (interpolated in `ln X` on the coarse trace).
fn refinement_ratios(fine: &[TraceRecord], coarse: &[TraceRecord]) -> Option<(f64, f64, usize)> {
    let lx: Vec<f64> = coarse.iter().map(|r| r.x.ln()).collect();
    let (hi, lo) = (lx[0], lx[lx.len() - 1]);
    let mut worst = (f64::INFINITY, f64::INFINITY);
    let mut matched = 0;
    for r in fine {
        let x = r.x.ln();
        if !(x <= hi && x >= lo) {
            continue;
        }
        // coarse half-widths decrease along the trace
        let j = lx.partition_point(|&v| v > x).clamp(1, lx.len() - 1);
        let w = (x - lx[j - 1]) / (lx[j] - lx[j - 1]);
        let at = |f: fn(&TraceRecord) -> f64| f(&coarse[j - 1]) + w * (f(&coarse[j]) - f(&coarse[j - 1]));
        let cs = at(|r| r.support_residual);
        let ci = at(|r| r.integral_residual);
        worst.0 = worst.0.min(cs / r.support_residual);
        worst.1 = worst.1.min(ci / r.integral_residual);
        matched += 1;
    }
    (matched >= MIN_WINDOW_ROWS).then_some((worst.0, worst.1, matched))
}

/// Reads a trace (and optionally its coarse companion) and evaluates every
/// criterion.
pub fn verify(trace_path: &Path, coarse_path: Option<&Path>) -> Result<VerifyReport> {
    let rows = read_trace(trace_path)?;
    let coarse = coarse_path.map(read_trace).transpose()?;
    let circle = circle_oracle(512)?;
    Ok(evaluate(&rows, coarse.as_deref(), &circle))
}
