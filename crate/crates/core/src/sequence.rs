//! Whole-sequence diagnostics: uniform limits, `I_k` windows, H¹ and BV
//! norms, weak scalar curvature tests, tangent cones and pole volume ratios.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{linspace, simpson_samples, GridFunction};
use crate::math;
use crate::warping::WarpingFunction;

/// Default number of nodes on `[0, D]` for extended members.
pub const DEFAULT_SEQUENCE_GRID: usize = 4097;

/// Points of the window grid used for norms.
const WINDOW_GRID: usize = 2049;

/// A list of members `f_j`, all extended by zero to `[0, D]`.
#[derive(Debug, Clone)]
pub struct Sequence {
    indices: Vec<u32>,
    members: Vec<WarpingFunction>,
    d: f64,
    grid: usize,
}

impl Sequence {
    pub fn new(indices: Vec<u32>, members: Vec<WarpingFunction>, d: f64) -> Result<Self> {
        Self::with_grid(indices, members, d, DEFAULT_SEQUENCE_GRID)
    }

    pub fn with_grid(indices: Vec<u32>, members: Vec<WarpingFunction>, d: f64, grid: usize) -> Result<Self> {
        if indices.len() != members.len() || indices.is_empty() {
            return Err(Error::Shape { left: indices.len(), right: members.len() });
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::precondition("sequence indices must be strictly increasing"));
        }
        for m in &members {
            if m.domain_end() > d * (1.0 + 1e-12) {
                return Err(Error::Domain { what: "domain_end", value: m.domain_end(), lo: 0.0, hi: d });
            }
        }
        if grid < 16 {
            return Err(Error::precondition("sequence grid needs at least 16 nodes"));
        }
        Ok(Self { indices, members, d, grid })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn members(&self) -> &[WarpingFunction] {
        &self.members
    }

    pub fn common_interval_end(&self) -> f64 {
        self.d
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn last(&self) -> &WarpingFunction {
        &self.members[self.members.len() - 1]
    }

    pub fn extended(&self) -> Result<Vec<GridFunction>> {
        self.members.iter().map(|m| extend_by_zero(m, self.d, self.grid)).collect()
    }
}

/// `f` on `[0, L]` followed by zero on `[L, D]`, sampled at `n` nodes.
pub fn extend_by_zero(wf: &WarpingFunction, d: f64, n: usize) -> Result<GridFunction> {
    let l = wf.domain_end();
    if l > d * (1.0 + 1e-12) {
        return Err(Error::Domain { what: "domain_end", value: l, lo: 0.0, hi: d });
    }
    let end = wf.value_unchecked(l);
    if end.abs() > 1e-6 {
        return Err(Error::construction(format!("f(L) = {end} does not vanish")));
    }
    GridFunction::from_fn(0.0, d, n, |s| if s <= l { wf.value_unchecked(s).max(0.0) } else { 0.0 })
}

/// Max-norm distance of two grid functions on the same nodes.
pub fn uniform_distance(g1: &GridFunction, g2: &GridFunction) -> Result<f64> {
    crate::grid::uniform_distance(g1, g2)
}

/// Empirical limit of a convergent sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitProfile {
    pub f_inf: GridFunction,
    pub a_inf: f64,
    pub b_inf: f64,
    pub lipschitz_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LimitVerdict {
    Limit {
        limit: LimitProfile,
    },
    /// Sup norms decay to zero: the sequence collapses to the zero current.
    ZeroCurrent {
        last_sup: f64,
        decay_exponent: Option<f64>,
    },
    NonConvergent {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub indices: Vec<u32>,
    pub sup_norms: Vec<f64>,
    /// `‖f_{j_{i+1}} − f_{j_i}‖∞` for consecutive members.
    pub cauchy_distances: Vec<f64>,
    pub verdict: LimitVerdict,
}

impl LimitReport {
    pub fn limit(&self) -> Option<&LimitProfile> {
        match &self.verdict {
            LimitVerdict::Limit { limit } => Some(limit),
            _ => None,
        }
    }
}

/// Takes the last member as the limit after checking the tail is Cauchy.
pub fn extract_limit(seq: &Sequence) -> Result<LimitReport> {
    if seq.indices.len() < 3 {
        return Err(Error::precondition("limit extraction needs at least 3 members"));
    }
    let grids = seq.extended()?;
    let sup_norms: Vec<f64> = grids.iter().map(|g| g.max()).collect();
    let cauchy_distances: Vec<f64> = grids.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect::<Result<_>>()?;
    let indices = seq.indices.clone();
    let tol_pos = 1e-6 * seq.d;
    let report = |verdict| LimitReport {
        indices: indices.clone(),
        sup_norms: sup_norms.clone(),
        cauchy_distances: cauchy_distances.clone(),
        verdict,
    };

    let tiny = 1e-12;
    if let Some(i) = cauchy_distances.windows(2).position(|w| w[1] > 2.0 * w[0] + tiny) {
        return Ok(report(LimitVerdict::NonConvergent {
            reason: format!(
                "uniform distance grows from {:e} to {:e} after index {}",
                cauchy_distances[i],
                cauchy_distances[i + 1],
                indices[i + 1]
            ),
        }));
    }
    let first = cauchy_distances[0];
    let last = cauchy_distances[cauchy_distances.len() - 1];
    if first > tiny && last >= first {
        return Ok(report(LimitVerdict::NonConvergent {
            reason: format!("tail distance {last:e} does not improve on {first:e}"),
        }));
    }

    let last_sup = sup_norms[sup_norms.len() - 1];
    let decay_exponent = decay_exponent(&indices, &sup_norms);
    let decreasing = sup_norms.windows(2).all(|w| w[1] < w[0]);
    if last_sup <= tol_pos || (decreasing && decay_exponent.is_some_and(|p| p >= 0.5)) {
        return Ok(report(LimitVerdict::ZeroCurrent { last_sup, decay_exponent }));
    }

    let f_inf = grids[grids.len() - 1].clone();
    let (a_inf, b_inf) =
        support_ends(&f_inf, tol_pos).ok_or_else(|| Error::construction("limit has no positive region"))?;
    let h = f_inf.spacing();
    let lipschitz_constant = f_inf.samples().windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
    Ok(report(LimitVerdict::Limit { limit: LimitProfile { f_inf, a_inf, b_inf, lipschitz_constant } }))
}

// log-log slope of the sup norms between the last two members
fn decay_exponent(indices: &[u32], sups: &[f64]) -> Option<f64> {
    let n = sups.len();
    let (j0, j1) = (indices[n - 2] as f64, indices[n - 1] as f64);
    let (m0, m1) = (sups[n - 2], sups[n - 1]);
    if j0 <= 0.0 || m0 <= 0.0 || m1 <= 0.0 {
        return None;
    }
    Some(-math::ln(m1 / m0) / math::ln(j1 / j0))
}

// ends of the region where g > tol, refined by secant extrapolation
fn support_ends(g: &GridFunction, tol: f64) -> Option<(f64, f64)> {
    let v = g.samples();
    let first = v.iter().position(|&x| x > tol)?;
    let last = v.iter().rposition(|&x| x > tol)?;
    let h = g.spacing();
    let a = if first == 0 {
        g.lo()
    } else if first + 1 < v.len() && v[first + 1] > v[first] {
        let slope = (v[first + 1] - v[first]) / h;
        (g.x(first) - v[first] / slope).clamp(g.x(first - 1), g.x(first))
    } else {
        g.x(first - 1)
    };
    let b = if last + 1 == v.len() {
        g.hi()
    } else if last >= 1 && v[last - 1] > v[last] {
        let slope = (v[last - 1] - v[last]) / h;
        (g.x(last) + v[last] / slope).clamp(g.x(last), g.x(last + 1))
    } else {
        g.x(last + 1)
    };
    Some((a, b))
}

/// The window `I_k = {f_∞ ≥ 1/k} = [a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkWindow {
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

impl IkWindow {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Superlevel set of the limit at `1/k`, endpoints refined by bisection on
/// the local cubic interpolant.
pub fn ik_window(lim: &LimitProfile, k: u32) -> Result<IkWindow> {
    if k == 0 {
        return Err(Error::precondition("k must be positive"));
    }
    let g = &lim.f_inf;
    let level = 1.0 / k as f64;
    let max_f = g.max();
    if level >= max_f {
        return Err(Error::EmptyWindow { k, max_f });
    }
    let v = g.samples();
    let above: Vec<bool> = v.iter().map(|&x| x >= level).collect();
    let components = above.windows(2).filter(|w| w[1] && !w[0]).count() + usize::from(above[0]);
    if components > 1 {
        return Err(Error::DisconnectedWindow { k, components });
    }
    let first = above.iter().position(|&x| x).unwrap_or(0);
    let last = above.iter().rposition(|&x| x).unwrap_or(v.len() - 1);
    let crossing = |lo: f64, hi: f64| {
        let (mut lo, mut hi) = (lo, hi);
        let below_at_lo = g.eval_cubic(lo) < level;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g.eval_cubic(mid) < level) == below_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() <= 1e-15 * (1.0 + hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let a = if first == 0 { g.lo() } else { crossing(g.x(first - 1), g.x(first)) };
    let b = if last + 1 == v.len() { g.hi() } else { crossing(g.x(last + 1), g.x(last)) };
    Ok(IkWindow { k, a, b })
}

/// Norms of one member against the last member on the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberNorms {
    pub index: u32,
    /// `‖h_j′ − h_last′‖_{L²(I_k)}` with `h = f^{3/2}`.
    pub h1_diff: f64,
    /// `‖f_j′ − f_last′‖_{L²(I_k)}`.
    pub f1_diff: f64,
    pub sup_diff: f64,
    /// `‖h_j′‖_{BV(I_k)} = ∫|h_j″|`.
    pub bv: f64,
    pub bv_margin: f64,
    pub min_f: f64,
    pub above_floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub window: IkWindow,
    pub common_interval_end: f64,
    pub bv_bound: f64,
    pub members: Vec<MemberNorms>,
    /// Smallest `bound − BV` over the members.
    pub min_bv_margin: f64,
}

/// `(3/2)((2/3)(1/k)^{3/2})^{−1/3}(b_k − a_k) + 3(D/2)^{1/2}`.
pub fn bv_bound(k: u32, width: f64, d: f64) -> f64 {
    let inv_k = 1.0 / k as f64;
    1.5 * math::powf((2.0 / 3.0) * math::powf(inv_k, 1.5), -1.0 / 3.0) * width + 3.0 * math::sqrt(d / 2.0)
}

struct WindowSamples {
    f: Vec<f64>,
    d1: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
}

fn window_samples(wf: &WarpingFunction, xs: &[f64]) -> Result<WindowSamples> {
    let mut out = WindowSamples { f: vec![], d1: vec![], h1: vec![], h2: vec![] };
    for &s in xs {
        let f = wf.eval(s)?;
        let d1 = wf.derivative(s, 1)?;
        let d2 = wf.derivative(s, 2)?;
        let rf = math::sqrt(f.max(0.0));
        out.f.push(f);
        out.d1.push(d1);
        out.h1.push(1.5 * rf * d1);
        out.h2.push(if rf > 0.0 { 0.75 * d1 * d1 / rf + 1.5 * rf * d2 } else { 0.0 });
    }
    Ok(out)
}

/// H¹ and BV diagnostics for `h_j = f_j^{3/2}` on the window.
pub fn h1_convergence(seq: &Sequence, window: &IkWindow) -> Result<ConvergenceReport> {
    let xs = linspace(window.a, window.b, WINDOW_GRID);
    let dx = xs[1] - xs[0];
    let floor = 0.5 / window.k as f64;
    let n = seq.members.len();
    let samples: Vec<WindowSamples> = seq
        .members
        .iter()
        .map(|m| window_samples(m, &xs))
        .collect::<Result<_>>()
        .map_err(|_| Error::precondition("window not inside every member's domain"))?;
    let last = &samples[n - 1];
    let bound = bv_bound(window.k, window.width(), seq.d);
    let l2 = |a: &[f64], b: &[f64]| {
        let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
        math::sqrt(simpson_samples(&sq, dx))
    };
    let mut members = Vec::with_capacity(n);
    for (i, w) in samples.iter().enumerate() {
        let min_f = w.f.iter().copied().fold(f64::INFINITY, f64::min);
        let above_floor = min_f >= floor;
        if !above_floor && i >= n / 2 {
            return Err(Error::precondition(format!(
                "member {} drops to {min_f:e} < 1/(2k) on the window",
                seq.indices[i]
            )));
        }
        let abs_h2: Vec<f64> = w.h2.iter().map(|v| v.abs()).collect();
        let bv = simpson_samples(&abs_h2, dx);
        members.push(MemberNorms {
            index: seq.indices[i],
            h1_diff: l2(&w.h1, &last.h1),
            f1_diff: l2(&w.d1, &last.d1),
            sup_diff: w.f.iter().zip(&last.f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            bv,
            bv_margin: bound - bv,
            min_f,
            above_floor,
        });
    }
    let min_bv_margin = members.iter().map(|m| m.bv_margin).fold(f64::INFINITY, f64::min);
    Ok(ConvergenceReport { window: *window, common_interval_end: seq.d, bv_bound: bound, members, min_bv_margin })
}

/// Bump `u(s) = exp(1 − 1/(1 − t²))`, `t = (s − center)/radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub radius: f64,
}

impl TestFunction {
    pub fn value(&self, s: f64) -> f64 {
        let t = (s - self.center) / self.radius;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        math::exp(1.0 - 1.0 / (1.0 - t * t))
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let t = (s - self.center) / self.radius;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - t * t;
        self.value(s) * (-2.0 * t / (q * q)) / self.radius
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// 9 centres `a + w(i + 1)/10` with radii `{0.9, 0.5, 0.25}` times the
/// distance to the nearer window end.
pub fn default_battery(a: f64, b: f64) -> Vec<TestFunction> {
    let w = b - a;
    let mut out = Vec::with_capacity(27);
    for i in 0..9 {
        let c = a + w * (i + 1) as f64 / 10.0;
        let room = (c - a).min(b - c);
        for frac in [0.9, 0.5, 0.25] {
            out.push(TestFunction { center: c, radius: frac * room });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarTestResult {
    pub test: TestFunction,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Points per test support for the weak-form quadrature.
const TEST_QUADRATURE: usize = 4001;

/// Weak form of `Scalar ≥ 0`: `∫(1 + f′²)u ≥ −2∫f′f u′` for each bump.
/// Each entry fails with a precondition error when the bump leaves the
/// region where the profile is positive.
pub fn distributional_scalar_test(profile: &GridFunction, tests: &[TestFunction]) -> Vec<Result<ScalarTestResult>> {
    let d1 = GridFunction::new(profile.lo(), profile.hi(), profile.first_derivative());
    let tol_pos = 1e-6 * (profile.hi() - profile.lo());
    tests
        .iter()
        .map(|t| {
            let d1 = d1.as_ref().map_err(Clone::clone)?;
            let (lo, hi) = t.support();
            if !(t.radius > 0.0) || lo < profile.lo() || hi > profile.hi() {
                return Err(Error::precondition(format!("test at {} leaves the profile's interval", t.center)));
            }
            let xs = linspace(lo, hi, TEST_QUADRATURE);
            let f: Vec<f64> = xs.iter().map(|&s| profile.eval_cubic(s)).collect();
            if f.iter().any(|&v| v <= tol_pos) {
                return Err(Error::precondition(format!("test at {} meets a zero of the profile", t.center)));
            }
            let fp: Vec<f64> = xs.iter().map(|&s| d1.eval_cubic(s)).collect();
            let left: Vec<f64> = xs.iter().zip(&fp).map(|(&s, &p)| (1.0 + p * p) * t.value(s)).collect();
            let right: Vec<f64> =
                xs.iter().zip(fp.iter().zip(&f)).map(|(&s, (&p, &v))| -2.0 * p * v * t.derivative(s)).collect();
            let h = xs[1] - xs[0];
            let lhs = simpson_samples(&left, h);
            let rhs = simpson_samples(&right, h);
            let pass = lhs >= rhs - 1e-6 * (1.0 + lhs.abs());
            Ok(ScalarTestResult { test: *t, lhs, rhs, pass })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeClass {
    Euclidean,
    Corner,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeProbe {
    pub s: f64,
    /// `|right − left|` difference-quotient gap at scales `h, h/2, h/4`.
    pub gaps: [f64; 3],
    pub class: ConeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePortrait {
    pub probes: Vec<ConeProbe>,
    pub fraction_euclidean: f64,
    pub corners: Vec<f64>,
}

/// Agreement tolerance of one-sided difference quotients.
pub const TOL_CONE: f64 = 0.02;

/// Classifies `n_points` interior points of the limit by comparing left and
/// right difference quotients at three shrinking scales.
pub fn tangent_cone_portrait(lim: &LimitProfile, n_points: usize) -> Result<ConePortrait> {
    let g = &lim.f_inf;
    let h0 = 64.0 * g.spacing();
    let (lo, hi) = (lim.a_inf + h0, lim.b_inf - h0);
    if n_points == 0 || !(hi > lo) {
        return Err(Error::precondition("limit support too short for the cone portrait"));
    }
    let xs = if n_points == 1 { vec![0.5 * (lo + hi)] } else { linspace(lo, hi, n_points) };
    let probes: Vec<ConeProbe> = xs
        .iter()
        .map(|&s| {
            let fs = g.eval_cubic(s);
            let mut gaps = [0.0; 3];
            for (i, gap) in gaps.iter_mut().enumerate() {
                let h = h0 / (1u32 << i) as f64;
                let left = (fs - g.eval_cubic(s - h)) / h;
                let right = (g.eval_cubic(s + h) - fs) / h;
                *gap = (right - left).abs();
            }
            let class = if gaps[2] <= TOL_CONE {
                ConeClass::Euclidean
            } else if gaps[2] >= 0.5 * gaps[0] {
                ConeClass::Corner
            } else {
                ConeClass::Unresolved
            };
            ConeProbe { s, gaps, class }
        })
        .collect();
    let euclid = probes.iter().filter(|p| p.class == ConeClass::Euclidean).count();
    let corners = probes.iter().filter(|p| p.class == ConeClass::Corner).map(|p| p.s).collect();
    Ok(ConePortrait { fraction_euclidean: euclid as f64 / probes.len() as f64, probes, corners })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    Left,
    Right,
}

/// `(r³ − 3∫_{pole}^{pole ± r} f²)/r⁵`, which tends to `Scalar/30` at a
/// smooth pole.
pub fn pole_volume_ratio(lim: &LimitProfile, pole: Pole, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let half = 0.5 * (lim.b_inf - lim.a_inf);
    if radii.iter().any(|&r| !(r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::precondition("radii must be positive and decreasing"));
    }
    if let Some(&r) = radii.iter().find(|&&r| r >= half) {
        return Err(Error::Domain { what: "radius", value: r, lo: 0.0, hi: half });
    }
    let sq = lim.f_inf.map(|_, v| v * v)?;
    Ok(radii
        .iter()
        .map(|&r| {
            let vol = match pole {
                Pole::Left => sq.integrate_range(lim.a_inf, lim.a_inf + r),
                Pole::Right => sq.integrate_range(lim.b_inf - r, lim.b_inf),
            };
            (r, (r * r * r - 3.0 * vol) / (r * r * r * r * r))
        })
        .collect())
}

/// Polynomial extrapolation in `r²` to `r = 0` (Neville).
pub fn extrapolate_ratio(samples: &[(f64, f64)]) -> f64 {
    let x: Vec<f64> = samples.iter().map(|(r, _)| r * r).collect();
    let mut p: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

/// Checks `f_∞(s) ≤ s − a_∞` (and its mirror) on the first 5% of the
/// positive region at each end.
pub fn pole_cap_check(lim: &LimitProfile, tol: f64) -> bool {
    let g = &lim.f_inf;
    let span = 0.05 * (lim.b_inf - lim.a_inf);
    (0..g.len()).all(|i| {
        let s = g.x(i);
        let v = g.samples()[i];
        let left_ok = !(s >= lim.a_inf && s <= lim.a_inf + span) || v <= s - lim.a_inf + tol;
        let right_ok = !(s >= lim.b_inf - span && s <= lim.b_inf) || v <= lim.b_inf - s + tol;
        left_ok && right_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{collapsing_family, round_sphere, scaled_sine};
    use crate::math::PI;

    fn schedule(js: &[u32]) -> Sequence {
        let members = js.iter().map(|&j| scaled_sine(j as f64 / (j as f64 + 1.0), 1.0).unwrap()).collect();
        Sequence::new(js.to_vec(), members, PI).unwrap()
    }

    fn sine_limit() -> LimitProfile {
        let members = vec![round_sphere(1.0).unwrap(); 3];
        let r = extract_limit(&Sequence::new(vec![1, 2, 3], members, PI).unwrap()).unwrap();
        r.limit().unwrap().clone()
    }

    #[test]
    fn extension_by_zero() {
        let g = extend_by_zero(&round_sphere(1.0).unwrap(), 4.0, 401).unwrap();
        assert!(g.samples().iter().zip(g.xs()).all(|(v, x)| x <= PI || *v == 0.0));
        assert!(extend_by_zero(&round_sphere(1.0).unwrap(), 3.0, 401).is_err());
    }

    #[test]
    fn constant_sequence_limit() {
        let lim = sine_limit();
        assert_eq!(lim.a_inf, 0.0);
        assert_eq!(lim.b_inf, PI);
        assert!(lim.lipschitz_constant <= 1.0 + 1e-4);
    }

    #[test]
    fn collapsing_sequence_is_a_zero_current() {
        let js = [1u32, 2, 4, 10];
        let members = js.iter().map(|&j| collapsing_family(j).unwrap()).collect();
        let r = extract_limit(&Sequence::new(js.to_vec(), members, 2.0).unwrap()).unwrap();
        assert!(matches!(r.verdict, LimitVerdict::ZeroCurrent { .. }), "{:?}", r.verdict);
        for (s, j) in r.sup_norms.iter().zip(js) {
            assert!((s - 1.0 / (2 * j + 2) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn growing_distances_are_non_convergent() {
        let amps = [1.0, 0.99, 0.7, 1.3];
        let members = amps.iter().map(|&a| scaled_sine(a, 1.0).unwrap()).collect();
        let r = extract_limit(&Sequence::new(vec![1, 2, 3, 4], members, PI).unwrap()).unwrap();
        assert!(matches!(r.verdict, LimitVerdict::NonConvergent { .. }));
    }

    #[test]
    fn windows_of_the_sine() {
        let lim = sine_limit();
        let w = ik_window(&lim, 2).unwrap();
        assert!((w.a - PI / 6.0).abs() < 1e-12 && (w.b - 5.0 * PI / 6.0).abs() < 1e-12, "{w:?}");
        let w8 = ik_window(&lim, 8).unwrap();
        assert!(w8.a < w.a && w8.b > w.b);
        assert!(matches!(ik_window(&lim, 1), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn double_bump_is_disconnected() {
        let g = GridFunction::from_fn(0.0, 2.0 * PI, 1001, |s| math::sin(s).abs()).unwrap();
        let lim = LimitProfile { f_inf: g, a_inf: 0.0, b_inf: 2.0 * PI, lipschitz_constant: 1.0 };
        assert!(matches!(ik_window(&lim, 2), Err(Error::DisconnectedWindow { components: 2, .. })));
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn bv_bound_oracle() {
        let v = bv_bound(2, 2.0 * PI / 3.0, PI);
        assert!((v - 8.845_773_789_253_576_5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn h1_norms_decay() {
        let seq = schedule(&[2, 4, 8, 16]);
        let w = IkWindow { k: 2, a: PI / 6.0, b: 5.0 * PI / 6.0 };
        let rep = h1_convergence(&seq, &w).unwrap();
        let d: Vec<f64> = rep.members.iter().map(|m| m.h1_diff).collect();
        assert!(d.windows(2).all(|p| p[1] < p[0]));
        assert_eq!(d[3], 0.0);
        assert!(rep.min_bv_margin > 0.0);
        // BV of sin^{3/2}' on I₂
        let sine = Sequence::new(vec![1, 2], vec![round_sphere(1.0).unwrap(); 2], PI).unwrap();
        let rep = h1_convergence(&sine, &w).unwrap();
        assert!((rep.members[0].bv - 1.885_29).abs() < 1e-4, "{}", rep.members[0].bv);
    }

    #[test]
    fn weak_scalar_battery() {
        let sphere = GridFunction::from_fn(0.0, PI, 4097, math::sin).unwrap();
        let tests = default_battery(0.2, PI - 0.2);
        assert_eq!(tests.len(), 27);
        for r in distributional_scalar_test(&sphere, &tests) {
            let r = r.unwrap();
            assert!(r.pass && r.lhs > r.rhs);
        }
        let cone = GridFunction::from_fn(0.0, 1.0, 2049, |s| s).unwrap();
        for r in distributional_scalar_test(&cone, &default_battery(0.05, 0.95)) {
            let r = r.unwrap();
            assert!((r.lhs - r.rhs).abs() <= 1e-6, "{r:?}");
        }
        let bad = GridFunction::from_fn(0.0, PI, 4097, |s| math::sin(s) + 0.4 * math::sin(3.0 * s)).unwrap();
        let fails = distributional_scalar_test(&bad, &[TestFunction { center: PI / 2.0, radius: 0.3 }]);
        assert!(!fails[0].as_ref().unwrap().pass);
        let outside = distributional_scalar_test(&sphere, &[TestFunction { center: 0.1, radius: 0.2 }]);
        assert!(outside[0].is_err());
    }

    #[test]
    fn cone_portraits() {
        let lim = sine_limit();
        let p = tangent_cone_portrait(&lim, 41).unwrap();
        assert_eq!(p.fraction_euclidean, 1.0);
        let xs = linspace(0.0, 2.0, 4097);
        let tent: Vec<f64> = xs.iter().map(|&s| s.min(2.0 - s)).collect();
        let g = GridFunction::new(0.0, 2.0, crate::families::smooth_samples(&tent, 4)).unwrap();
        let lim = LimitProfile { f_inf: g, a_inf: 0.0, b_inf: 2.0, lipschitz_constant: 1.0 };
        let p = tangent_cone_portrait(&lim, 41).unwrap();
        assert_eq!(p.corners.len(), 1);
        assert!((p.corners[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pole_ratios() {
        let lim = sine_limit();
        let radii = [0.2, 0.1, 0.05, 0.025];
        let r = pole_volume_ratio(&lim, Pole::Left, &radii).unwrap();
        assert!((extrapolate_ratio(&r) - 0.2).abs() < 1e-3);
        let right = pole_volume_ratio(&lim, Pole::Right, &radii).unwrap();
        assert!((extrapolate_ratio(&right) - 0.2).abs() < 1e-3);
        let cap = LimitProfile {
            f_inf: GridFunction::from_fn(0.0, 2.0, 2001, |s| s.min(2.0 - s)).unwrap(),
            a_inf: 0.0,
            b_inf: 2.0,
            lipschitz_constant: 1.0,
        };
        for (_, v) in pole_volume_ratio(&cap, Pole::Left, &radii).unwrap() {
            assert!(v.abs() < 1e-10);
        }
        assert!(pole_cap_check(&cap, 1e-12));
        assert!(pole_volume_ratio(&lim, Pole::Left, &[2.0]).is_err());
    }
}
