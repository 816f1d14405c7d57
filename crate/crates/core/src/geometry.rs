//! Pointwise and integral geometry of `g = ds² + f(s)² g_{S²}` on the 3-sphere.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{simpson_samples, trapezoid_samples};
use crate::math::{self, PI};
use crate::warping::{DerivativeSource, NodeValues, WarpingFunction};

/// Area of the unit 2-sphere.
pub const UNIT_SPHERE_AREA: f64 = 4.0 * PI;

/// Default number of grid nodes for a manifold.
pub const DEFAULT_GRID: usize = 4096;

/// Numerical tolerances shared by the geometry routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance on `f(0)` and `f(L)`.
    pub endpoint: f64,
    /// Tolerance on `f′(0) = 1`, `f′(L) = −1` for analytic derivatives.
    pub endpoint_slope_analytic: f64,
    /// Same, for finite-difference derivatives.
    pub endpoint_slope_sampled: f64,
    /// `|f′|` allowed at a reported critical sphere.
    pub crit: f64,
    /// Relative slack on the scalar-curvature sign check.
    pub scalar: f64,
    /// Slack on the Lipschitz bound `|f′| <= 1`.
    pub lip: f64,
    /// Relative quadrature tolerance for closed forms.
    pub quad: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            endpoint: 1e-6,
            endpoint_slope_analytic: 1e-6,
            endpoint_slope_sampled: 1e-3,
            crit: 1e-6,
            scalar: 1e-6,
            lip: 1e-4,
            quad: 1e-8,
        }
    }
}

fn guard(wf: &WarpingFunction, s: f64) -> Result<(f64, f64, f64)> {
    let l = wf.domain_end();
    if !(s > 0.0 && s < l) {
        return Err(Error::Domain { what: "s", value: s, lo: 0.0, hi: l });
    }
    let f = wf.eval(s)?;
    if f <= wf.tol_pos() {
        return Err(Error::PoleProximity { s, f });
    }
    Ok((f, wf.derivative(s, 1)?, wf.derivative(s, 2)?))
}

/// `−4f″/f + 2(1 − f′²)/f²`.
#[inline]
pub fn scalar_from(f: f64, d1: f64, d2: f64) -> f64 {
    -4.0 * d2 / f + 2.0 * (1.0 - d1 * d1) / (f * f)
}

/// `(3/4) h^{−1/3} − h″` for `h = f^{3/2}`, with `h″` by the chain rule.
#[inline]
pub fn h_residual_from(f: f64, d1: f64, d2: f64) -> f64 {
    let root = math::sqrt(f);
    let h_pp = 0.75 * d1 * d1 / root + 1.5 * root * d2;
    // h^{-1/3} = f^{-1/2}
    0.75 / root - h_pp
}

/// Scalar curvature at an interior point.
pub fn scalar_curvature(wf: &WarpingFunction, s: f64) -> Result<f64> {
    let (f, d1, d2) = guard(wf, s)?;
    Ok(scalar_from(f, d1, d2))
}

/// Residual of the `h = f^{3/2}` criterion; same sign as the scalar curvature.
pub fn h_criterion_residual(wf: &WarpingFunction, s: f64) -> Result<f64> {
    let (f, d1, d2) = guard(wf, s)?;
    Ok(h_residual_from(f, d1, d2))
}

/// Mean curvature `2f′/f` of the sphere `{s = const}`.
pub fn mean_curvature(wf: &WarpingFunction, s: f64) -> Result<f64> {
    let (f, d1, _) = guard(wf, s)?;
    Ok(2.0 * d1 / f)
}

/// Results of the construction-time checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub f_at_start: f64,
    pub f_at_end: f64,
    pub endpoints_ok: bool,
    pub min_interior_f: f64,
    pub positive: bool,
    pub slope_at_start: f64,
    pub slope_at_end: f64,
    /// `f′(0) = 1` and `f′(L) = −1` within tolerance: the metric closes up smoothly.
    pub smooth: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    InteriorMin,
    InteriorMax,
    Plateau,
}

/// A sphere `{s = const}` with `f′(s) = 0`, hence minimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSphere {
    pub s: f64,
    pub area: f64,
    pub kind: CriticalKind,
}

/// Outcome of the hypothesis checks; a verdict, never an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub diameter: f64,
    pub diameter_cap: f64,
    pub diameter_ok: bool,
    pub min_scalar: f64,
    pub min_scalar_at: f64,
    pub scalar_ok: bool,
    pub sym_min_area: f64,
    pub area_floor: f64,
    pub min_area_ok: bool,
    /// `A/4π <= L²`.
    pub area_diameter_consistent: bool,
    pub max_abs_slope: f64,
    pub max_abs_slope_at: f64,
    pub lipschitz_ok: bool,
    /// Nonnegative scalar curvature (claimed or verified) together with
    /// `max |f′| > 1` is impossible; this flags that contradiction.
    pub lipschitz_inconsistent: bool,
    pub notes: Vec<String>,
}

impl HypothesisVerdict {
    pub fn all_pass(&self) -> bool {
        self.diameter_ok
            && self.scalar_ok
            && self.min_area_ok
            && self.area_diameter_consistent
            && self.lipschitz_ok
            && !self.lipschitz_inconsistent
    }
}

/// A validated warped-product 3-sphere with cached grid data.
#[derive(Debug, Clone)]
pub struct RotSymManifold {
    warping: WarpingFunction,
    nodes: NodeValues,
    validation: Validation,
    tol: Tolerances,
    volume: f64,
}

impl RotSymManifold {
    pub fn new(warping: WarpingFunction) -> Result<Self> {
        Self::with_options(warping, DEFAULT_GRID, Tolerances::default())
    }

    pub fn with_grid(warping: WarpingFunction, grid_resolution: usize) -> Result<Self> {
        Self::with_options(warping, grid_resolution, Tolerances::default())
    }

    pub fn with_options(warping: WarpingFunction, grid_resolution: usize, tol: Tolerances) -> Result<Self> {
        if grid_resolution < 8 {
            return Err(Error::precondition("grid resolution must be at least 8"));
        }
        let nodes = warping.node_values(grid_resolution);
        let validation = validate(&warping, &nodes, &tol);
        let mut violations = Vec::new();
        if !validation.endpoints_ok {
            violations.push(format!(
                "endpoint values f(0) = {:e}, f(L) = {:e} exceed {:e}",
                validation.f_at_start, validation.f_at_end, tol.endpoint
            ));
        }
        if !validation.positive {
            violations.push(format!("f not positive on the open interval (min {:e})", validation.min_interior_f));
        }
        if !violations.is_empty() {
            return Err(Error::Invalid { violations });
        }
        let sq: Vec<f64> = nodes.f.iter().map(|v| v * v).collect();
        let volume = UNIT_SPHERE_AREA * simpson_samples(&sq, nodes.spacing());
        Ok(Self { warping, nodes, validation, tol, volume })
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.warping
    }

    pub fn nodes(&self) -> &NodeValues {
        &self.nodes
    }

    pub fn validation(&self) -> &Validation {
        &self.validation
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn grid_resolution(&self) -> usize {
        self.nodes.len()
    }

    pub fn domain_end(&self) -> f64 {
        self.warping.domain_end()
    }

    /// Distance between the poles, which is also the diameter.
    pub fn diameter(&self) -> f64 {
        self.warping.domain_end()
    }

    /// `4π ∫₀ᴸ f²` by composite Simpson on the manifold grid.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Trapezoid volume on a grid of twice the resolution; used as a cross-check.
    pub fn volume_trapezoid_refined(&self) -> f64 {
        let fine = self.warping.node_values(2 * self.nodes.len() - 1);
        let sq: Vec<f64> = fine.f.iter().map(|v| v * v).collect();
        UNIT_SPHERE_AREA * trapezoid_samples(&sq, fine.spacing())
    }

    pub fn scalar_curvature(&self, s: f64) -> Result<f64> {
        scalar_curvature(&self.warping, s)
    }

    pub fn h_criterion_residual(&self, s: f64) -> Result<f64> {
        h_criterion_residual(&self.warping, s)
    }

    pub fn mean_curvature(&self, s: f64) -> Result<f64> {
        mean_curvature(&self.warping, s)
    }

    /// Is node `i` an interior node outside the pole guard?
    pub fn is_guarded_node(&self, i: usize) -> bool {
        i > 0 && i + 1 < self.nodes.len() && self.nodes.f[i] > self.warping.tol_pos()
    }

    /// Scalar curvature at every node, `None` at the poles and inside the guard.
    pub fn scalar_profile(&self) -> Vec<Option<f64>> {
        let n = &self.nodes;
        (0..n.len()).map(|i| self.is_guarded_node(i).then(|| scalar_from(n.f[i], n.d1[i], n.d2[i]))).collect()
    }

    /// `h`-criterion residual at every node, `None` where undefined.
    pub fn residual_profile(&self) -> Vec<Option<f64>> {
        let n = &self.nodes;
        (0..n.len()).map(|i| self.is_guarded_node(i).then(|| h_residual_from(n.f[i], n.d1[i], n.d2[i]))).collect()
    }

    /// Mean curvature at every node, `None` where undefined.
    pub fn mean_curvature_profile(&self) -> Vec<Option<f64>> {
        let n = &self.nodes;
        (0..n.len()).map(|i| self.is_guarded_node(i).then(|| 2.0 * n.d1[i] / n.f[i])).collect()
    }

    /// Nodes whose `|f′|` is below this band count as flat. Analytic data use
    /// exact signs; finite differences use a round-off estimate.
    fn flat_band(&self) -> f64 {
        match self.warping.derivative_source() {
            DerivativeSource::Analytic => 0.0,
            DerivativeSource::FiniteDifference => {
                let fmax = self.nodes.f.iter().copied().fold(0.0, f64::max);
                64.0 * f64::EPSILON * fmax / self.nodes.spacing()
            }
        }
    }

    fn slope_signs(&self) -> Vec<i8> {
        let band = self.flat_band();
        self.nodes
            .d1
            .iter()
            .map(|&d| {
                if d > band {
                    1
                } else if d < -band {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    /// Root of `f′` in `[lo, hi]`, where `f′` has opposite signs at the ends.
    fn slope_root(&self, lo: f64, hi: f64) -> f64 {
        let d = |s: f64| self.warping.derivative(s, 1).unwrap_or(0.0);
        let (mut a, mut b) = (lo, hi);
        let mut da = d(a);
        let target = 1e-10 * self.domain_end();
        while b - a > target {
            let m = 0.5 * (a + b);
            let dm = d(m);
            if dm == 0.0 {
                return m;
            }
            if (dm > 0.0) == (da > 0.0) {
                a = m;
                da = dm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    fn sphere_at(&self, s: f64, kind: CriticalKind) -> CriticalSphere {
        let f = self.warping.value_unchecked(s);
        CriticalSphere { s, area: UNIT_SPHERE_AREA * f * f, kind }
    }

    /// All symmetric minimal spheres, sorted by `s`.
    pub fn critical_spheres(&self) -> Vec<CriticalSphere> {
        let signs = self.slope_signs();
        let n = self.nodes.len();
        let s = &self.nodes.s;
        let mut out = Vec::new();
        let mut last: Option<(usize, i8)> = None;
        let mut i = 1;
        while i < n - 1 {
            if signs[i] == 0 {
                let start = i;
                while i < n - 1 && signs[i] == 0 {
                    i += 1;
                }
                let end = i - 1;
                if end - start + 1 >= 3 {
                    let best =
                        (start..=end).min_by(|&a, &b| self.nodes.f[a].total_cmp(&self.nodes.f[b])).unwrap_or(start);
                    out.push(self.sphere_at(s[best], CriticalKind::Plateau));
                    last = None;
                }
                continue;
            }
            if let Some((j, sign)) = last {
                if sign != signs[i] {
                    let root = self.slope_root(s[j], s[i]);
                    let kind = if sign > 0 { CriticalKind::InteriorMax } else { CriticalKind::InteriorMin };
                    out.push(self.sphere_at(root, kind));
                }
            }
            last = Some((i, signs[i]));
            i += 1;
        }
        if out.is_empty() {
            // degenerate sampling: fall back to the largest node
            let best = (1..n - 1).max_by(|&a, &b| self.nodes.f[a].total_cmp(&self.nodes.f[b])).unwrap_or(n / 2);
            out.push(self.sphere_at(s[best], CriticalKind::InteriorMax));
        }
        out
    }

    /// Smallest area among symmetric minimal spheres: a candidate upper bound
    /// for the minimal area over all closed embedded minimal surfaces.
    pub fn sym_min_area(&self) -> f64 {
        self.critical_spheres().iter().map(|c| c.area).fold(f64::INFINITY, f64::min)
    }

    /// `(A, B)`: end of the initial increasing stretch and start of the final
    /// decreasing stretch of `f`.
    pub fn monotonicity_marks(&self) -> (f64, f64) {
        let signs = self.slope_signs();
        let n = self.nodes.len();
        let s = &self.nodes.s;
        let a = self.scan_mark(&signs, (1..n - 1).collect(), 1).unwrap_or(s[n / 2]);
        let b = self.scan_mark(&signs, (1..n - 1).rev().collect(), -1).unwrap_or(s[n / 2]);
        (a, b.max(a))
    }

    // Walks `order` while the slope sign equals `expect`; returns where it stops.
    fn scan_mark(&self, signs: &[i8], order: Vec<usize>, expect: i8) -> Option<f64> {
        let s = &self.nodes.s;
        let mut k = 0;
        while k < order.len() {
            let i = order[k];
            if signs[i] == expect {
                k += 1;
                continue;
            }
            if signs[i] == -expect {
                let prev = order[k.saturating_sub(1)];
                let (lo, hi) = if prev < i { (s[prev], s[i]) } else { (s[i], s[prev]) };
                return Some(if k == 0 { s[i] } else { self.slope_root(lo, hi) });
            }
            // flat run
            let start = k;
            while k < order.len() && signs[order[k]] == 0 {
                k += 1;
            }
            let len = k - start;
            let next = order.get(k).map(|&j| signs[j]);
            if len >= 3 || next.is_none() {
                return Some(s[order[start]]);
            }
            if next == Some(-expect) {
                let before = order[start.saturating_sub(1)];
                let after = order[k];
                let (lo, hi) = if before < after { (s[before], s[after]) } else { (s[after], s[before]) };
                return Some(self.slope_root(lo, hi));
            }
        }
        None
    }

    /// Checks the diameter, scalar-curvature and minimal-area hypotheses plus
    /// their consequences. The scalar verdict from the grid is used as the claim.
    pub fn validate_hypotheses(&self, diameter_cap: f64, area_floor: f64) -> HypothesisVerdict {
        self.validate_hypotheses_with_claim(diameter_cap, area_floor, None)
    }

    /// As [`Self::validate_hypotheses`], with an externally asserted scalar sign.
    pub fn validate_hypotheses_with_claim(
        &self,
        diameter_cap: f64,
        area_floor: f64,
        scalar_claim: Option<bool>,
    ) -> HypothesisVerdict {
        let n = &self.nodes;
        let l = self.domain_end();
        let mut notes = Vec::new();

        let (mut min_scalar, mut min_at, mut scalar_ok) = (f64::INFINITY, 0.0, true);
        for (i, v) in self.scalar_profile().into_iter().enumerate() {
            if let Some(v) = v {
                if v < min_scalar {
                    min_scalar = v;
                    min_at = n.s[i];
                }
                if v < -self.tol.scalar * (1.0 + v.abs()) {
                    scalar_ok = false;
                }
            }
        }

        let (mut max_slope, mut max_slope_at) = (0.0f64, 0.0);
        for i in 1..n.len() - 1 {
            if n.d1[i].abs() > max_slope {
                max_slope = n.d1[i].abs();
                max_slope_at = n.s[i];
            }
        }
        let lipschitz_ok = max_slope <= 1.0 + self.tol.lip;
        let claim = scalar_claim.unwrap_or(scalar_ok);
        let lipschitz_inconsistent = claim && !lipschitz_ok;
        if lipschitz_inconsistent {
            notes.push(format!(
                "nonnegative scalar curvature forces |f'| <= 1, but |f'| = {max_slope} at s = {max_slope_at}"
            ));
        }
        if !self.validation.smooth {
            notes.push(String::from("endpoint slopes differ from +1/-1: metric has conical poles"));
        }

        let sym_min_area = self.sym_min_area();
        HypothesisVerdict {
            diameter: l,
            diameter_cap,
            diameter_ok: l <= diameter_cap,
            min_scalar,
            min_scalar_at: min_at,
            scalar_ok,
            sym_min_area,
            area_floor,
            min_area_ok: sym_min_area >= area_floor,
            area_diameter_consistent: area_floor / UNIT_SPHERE_AREA <= l * l,
            max_abs_slope: max_slope,
            max_abs_slope_at: max_slope_at,
            lipschitz_ok,
            lipschitz_inconsistent,
            notes,
        }
    }
}

/// Construction checks for a profile at its native resolution (sample count
/// for sampled profiles, [`DEFAULT_GRID`] otherwise).
pub fn validation_of(wf: &WarpingFunction, tol: &Tolerances) -> Validation {
    let n = match wf.representation() {
        crate::warping::Representation::Sampled(p) => p.grid().len(),
        _ => DEFAULT_GRID,
    };
    validate(wf, &wf.node_values(n), tol)
}

fn validate(wf: &WarpingFunction, nodes: &NodeValues, tol: &Tolerances) -> Validation {
    let n = nodes.len();
    let f_at_start = nodes.f[0];
    let f_at_end = nodes.f[n - 1];
    let endpoints_ok = f_at_start.abs() <= tol.endpoint && f_at_end.abs() <= tol.endpoint;
    let min_interior_f = nodes.f[1..n - 1].iter().copied().fold(f64::INFINITY, f64::min);
    let slope_tol = match wf.derivative_source() {
        DerivativeSource::Analytic => tol.endpoint_slope_analytic,
        DerivativeSource::FiniteDifference => tol.endpoint_slope_sampled,
    };
    let slope_at_start = nodes.d1[0];
    let slope_at_end = nodes.d1[n - 1];
    Validation {
        f_at_start,
        f_at_end,
        endpoints_ok,
        min_interior_f,
        positive: min_interior_f > 0.0,
        slope_at_start,
        slope_at_end,
        smooth: (slope_at_start - 1.0).abs() <= slope_tol && (slope_at_end + 1.0).abs() <= slope_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warping::ClosedForm;

    fn sphere() -> RotSymManifold {
        RotSymManifold::new(WarpingFunction::closed_form(ClosedForm::Sine { amplitude: 1.0, radius: 1.0 }).unwrap())
            .unwrap()
    }

    fn collapsing(j: u32) -> RotSymManifold {
        RotSymManifold::new(WarpingFunction::closed_form(ClosedForm::Collapsing { j }).unwrap()).unwrap()
    }

    fn cap() -> WarpingFunction {
        WarpingFunction::closed_form(ClosedForm::Linear { slope: 1.0, domain_end: 1.0 }).unwrap()
    }

    #[test]
    fn pointwise_formulas() {
        let m = sphere();
        assert!((m.scalar_curvature(1.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((m.mean_curvature(PI / 2.0).unwrap()).abs() < 1e-15);
        assert!((m.mean_curvature(PI / 4.0).unwrap() - 2.0).abs() < 1e-14);
        // residual = (3/8) f^{3/2} Scalar = 2.25 at the equator
        assert!((m.h_criterion_residual(PI / 2.0).unwrap() - 2.25).abs() < 1e-14);

        let c = cap();
        assert_eq!(scalar_curvature(&c, 0.5).unwrap(), 0.0);
        assert_eq!(h_criterion_residual(&c, 0.5).unwrap(), 0.0);
        assert!(mean_curvature(&c, 1.0).is_err());
        assert_eq!(mean_curvature(&c, 0.999_999).map(|h| (h - 2.0 / 0.999_999).abs() < 1e-12), Ok(true));
    }

    #[test]
    fn pole_guard_is_a_typed_error() {
        let m = sphere();
        assert!(matches!(m.scalar_curvature(1e-7), Err(Error::PoleProximity { .. })));
        assert!(matches!(m.scalar_curvature(0.0), Err(Error::Domain { .. })));
        assert!(matches!(m.mean_curvature(PI), Err(Error::Domain { .. })));
    }

    #[test]
    fn collapsing_scalar_nonnegative_at_sample_point() {
        let m = collapsing(2);
        let v = m.scalar_curvature(0.7).unwrap();
        // f = (1 - 0.3^6)/6, f' = 0.3^5, f'' = -5 * 0.3^4
        let f = (1.0 - 0.3f64.powi(6)) / 6.0;
        let expect = 4.0 * 5.0 * 0.3f64.powi(4) / f + 2.0 * (1.0 - 0.3f64.powi(10)) / (f * f);
        assert!((v - expect).abs() < 1e-9 * expect);
        assert!(v >= 0.0);
        assert!(m.h_criterion_residual(1.0).unwrap() > 0.0);
    }

    #[test]
    fn round_sphere_volume_and_diameter() {
        let m = sphere();
        assert!((m.volume() - 2.0 * PI * PI).abs() < 1e-8);
        assert_eq!(m.diameter(), PI);
        assert!((m.volume_trapezoid_refined() - m.volume()).abs() < 1e-8);
    }

    #[test]
    fn collapsing_volume_matches_polynomial_integral() {
        // 4π ∫₀² ((1 − (1 − s)⁴)/4)² ds = 16π/45
        let m = collapsing(1);
        assert!((m.volume() - 16.0 * PI / 45.0).abs() < 1e-10);
        for j in [1, 2, 4, 10] {
            let m = collapsing(j);
            assert!(m.volume() <= 8.0 * PI * m.warping().eval(1.0).unwrap());
        }
    }

    #[test]
    fn critical_spheres_of_closed_forms() {
        let cs = sphere().critical_spheres();
        assert_eq!(cs.len(), 1);
        assert!((cs[0].s - PI / 2.0).abs() < 1e-9);
        assert!((cs[0].area - 4.0 * PI).abs() < 1e-12);
        assert_eq!(cs[0].kind, CriticalKind::InteriorMax);

        for j in [1, 3, 4, 10] {
            let m = collapsing(j);
            let cs = m.critical_spheres();
            assert_eq!(cs.len(), 1, "j = {j}");
            assert!((cs[0].s - 1.0).abs() < 1e-8);
            let top = 1.0 / (2 * j + 2) as f64;
            assert!((m.sym_min_area() - 4.0 * PI * top * top).abs() < 1e-10);
        }
        assert!((collapsing(4).sym_min_area() - 4.0 * PI / 100.0).abs() < 1e-10);
    }

    #[test]
    fn marks_of_single_maximum() {
        let (a, b) = sphere().monotonicity_marks();
        assert!((a - PI / 2.0).abs() < 1e-9 && (b - PI / 2.0).abs() < 1e-9);
        let (a, b) = collapsing(3).monotonicity_marks();
        assert!((a - 1.0).abs() < 1e-8 && (b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hypotheses_on_calibration_shapes() {
        let v = sphere().validate_hypotheses(4.0, 1.0);
        assert!(v.all_pass(), "{v:?}");
        assert!((v.min_scalar - 6.0).abs() < 1e-8);

        let v = collapsing(10).validate_hypotheses(2.0, 1.0);
        assert!(!v.min_area_ok);
        assert!(v.scalar_ok && v.diameter_ok && v.lipschitz_ok);

        let steep = WarpingFunction::closed_form(ClosedForm::Sine { amplitude: 1.2, radius: 1.0 }).unwrap();
        let m = RotSymManifold::new(steep).unwrap();
        assert!(!m.validation().smooth);
        let v = m.validate_hypotheses_with_claim(4.0, 1.0, Some(true));
        assert!(v.lipschitz_inconsistent);
        assert!((v.max_abs_slope - 1.2).abs() < 1e-6);
        assert!(!m.validate_hypotheses(4.0, 1.0).scalar_ok);
    }

    #[test]
    fn construction_rejects_open_profiles() {
        assert!(matches!(RotSymManifold::new(cap()), Err(Error::Invalid { .. })));
    }
}
