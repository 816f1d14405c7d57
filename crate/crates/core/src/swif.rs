//! Upper bound on the intrinsic flat distance between two warped products
//! that agree up to a factor `(1 + ε)` on a shared window `W = I_k × S²`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use serde::{Deserialize, Serialize};

use crate::distance::{lambda_estimate, lambda_upper, DistortionSample};
use crate::error::{Error, Result};
use crate::geometry::RotSymManifold;
use crate::grid::{adaptive_simpson, linspace};
use crate::math::{self, PI};
use crate::sequence::IkWindow;

const WINDOW_GRID: usize = 2049;

/// `max(f₁/f₂, f₂/f₁) − 1` over the window: the metrics differ only in the
/// sphere factor, so this is the smallest `ε` with `g₁ ≤ (1 + ε)² g₂` and back.
pub fn epsilon_of_window(m1: &RotSymManifold, m2: &RotSymManifold, window: &IkWindow) -> Result<f64> {
    let mut eps: f64 = 0.0;
    for s in linspace(window.a, window.b, WINDOW_GRID) {
        let f1 = m1.warping().eval(s)?;
        let f2 = m2.warping().eval(s)?;
        if !(f1 > 0.0 && f2 > 0.0) {
            return Err(Error::precondition("warping function vanishes inside the window"));
        }
        eps = eps.max((f1 / f2).max(f2 / f1) - 1.0);
    }
    Ok(eps)
}

/// Volumes of one manifold over the window and their term bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowVolumes {
    pub vol_w: f64,
    pub area_bdry: f64,
    pub vol_excess: f64,
    /// `16πD/k² − vol_excess`.
    pub excess_margin: f64,
    /// `4πD³ − Vol(M)`.
    pub volume_margin: f64,
    /// `8πD² − area_bdry`.
    pub area_margin: f64,
}

impl WindowVolumes {
    pub fn margins_nonnegative(&self) -> bool {
        self.excess_margin >= 0.0 && self.volume_margin >= 0.0 && self.area_margin >= 0.0
    }
}

pub fn window_volumes(m: &RotSymManifold, window: &IkWindow, d: f64) -> Result<WindowVolumes> {
    let wf = m.warping();
    if window.a < 0.0 || window.b > m.domain_end() || !(window.a < window.b) {
        return Err(Error::Domain { what: "window", value: window.b, lo: 0.0, hi: m.domain_end() });
    }
    let sq = |s: f64| {
        let f = wf.value_unchecked(s);
        f * f
    };
    let vol_w = 4.0 * PI * adaptive_simpson(&sq, window.a, window.b, 1e-14);
    let fa = wf.eval(window.a)?;
    let fb = wf.eval(window.b)?;
    let area_bdry = 4.0 * PI * (fa * fa + fb * fb);
    let vol_excess = (m.volume() - vol_w).max(0.0);
    let k = window.k as f64;
    Ok(WindowVolumes {
        vol_w,
        area_bdry,
        vol_excess,
        excess_margin: 16.0 * PI * d / (k * k) - vol_excess,
        volume_margin: 4.0 * PI * d * d * d - m.volume(),
        area_margin: 8.0 * PI * d * d - area_bdry,
    })
}

/// Which `λ` enters the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// The certified upper value; the resulting bound is sound.
    #[default]
    Certified,
    /// The sampled lower estimate; exploratory only.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwifOptions {
    pub lambda_mode: LambdaMode,
    /// Sample the distortion on distance meshes (skipped for identical profiles).
    pub sample_lambda: bool,
    pub n_pairs: usize,
    pub resolution: usize,
}

impl Default for SwifOptions {
    fn default() -> Self {
        Self { lambda_mode: LambdaMode::Certified, sample_lambda: true, n_pairs: 512, resolution: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwifBoundReport {
    pub k: u32,
    pub window: IkWindow,
    pub epsilon: f64,
    pub lambda_lower: Option<f64>,
    pub lambda_argmax: Option<DistortionSample>,
    pub lambda_upper: f64,
    pub lambda_mode: LambdaMode,
    pub lambda_used: f64,
    /// Identical profiles: the identity is an isometry, so `λ = 0` is exact.
    pub isometric: bool,
    /// `sup |f₁ − f₂| < 1/(k(k + 1))` on the window.
    pub lemma55_hypothesis: bool,
    pub h: f64,
    pub h_bar: f64,
    pub a: f64,
    pub d0: f64,
    pub d_cap: f64,
    pub vol_w1: f64,
    pub vol_w2: f64,
    pub area_bdry_w1: f64,
    pub area_bdry_w2: f64,
    pub vol_excess_1: f64,
    pub vol_excess_2: f64,
    pub volumes_1: WindowVolumes,
    pub volumes_2: WindowVolumes,
    pub bound: f64,
    pub term_breakdown: BTreeMap<String, f64>,
}

impl SwifBoundReport {
    fn shared_volume(&self) -> f64 {
        self.vol_w1 + self.vol_w2 + self.area_bdry_w1 + self.area_bdry_w2
    }

    /// The bound with angle term `a` (any `a ≥ self.a` is admissible).
    pub fn bound_with_angle(&self, a: f64) -> f64 {
        (2.0 * self.h_bar + a) * self.shared_volume() + self.vol_excess_1 + self.vol_excess_2
    }
}

/// `h = √(λ(D₀ + λ/4))`.
pub fn neck_height(lambda: f64, d0: f64) -> f64 {
    math::sqrt(lambda * (d0 + 0.25 * lambda))
}

/// `h̄ = max(h, D₀√(ε² + 2ε))`.
pub fn h_bar(lambda: f64, epsilon: f64, d0: f64) -> f64 {
    neck_height(lambda, d0).max(d0 * math::sqrt(epsilon * epsilon + 2.0 * epsilon))
}

/// Smallest admissible angle term `arccos(1/(1 + ε))·D₀/π`.
pub fn angle_term(epsilon: f64, d0: f64) -> f64 {
    math::acos(1.0 / (1.0 + epsilon)) * d0 / PI
}

pub fn swif_upper_bound(
    m1: &RotSymManifold,
    m2: &RotSymManifold,
    window: &IkWindow,
    d_cap: f64,
    opts: &SwifOptions,
) -> Result<SwifBoundReport> {
    let d0 = m1.domain_end().max(m2.domain_end());
    if d0 > d_cap * (1.0 + 1e-12) {
        return Err(Error::precondition(alloc::format!("D0 = {d0} exceeds the diameter cap {d_cap}")));
    }
    let epsilon = epsilon_of_window(m1, m2, window)?;
    let isometric = m1.warping() == m2.warping();
    let lambda_upper = if isometric { 0.0 } else { lambda_upper(m1.domain_end(), m2.domain_end(), window.k)? };
    let (lambda_lower, lambda_argmax) = if opts.sample_lambda || opts.lambda_mode == LambdaMode::Sampled {
        let est = lambda_estimate(m1, m2, window, opts.n_pairs, opts.resolution)?;
        (Some(est.lower), est.argmax)
    } else {
        (None, None)
    };
    let lambda_used = match opts.lambda_mode {
        LambdaMode::Certified => lambda_upper,
        LambdaMode::Sampled => lambda_lower.unwrap_or(0.0),
    };
    let k = window.k as f64;
    let mut sup_diff: f64 = 0.0;
    for s in linspace(window.a, window.b, WINDOW_GRID) {
        sup_diff = sup_diff.max((m1.warping().value_unchecked(s) - m2.warping().value_unchecked(s)).abs());
    }
    let lemma55_hypothesis = sup_diff < 1.0 / (k * (k + 1.0));

    let v1 = window_volumes(m1, window, d_cap)?;
    let v2 = window_volumes(m2, window, d_cap)?;
    let h = neck_height(lambda_used, d0);
    let h_bar = h_bar(lambda_used, epsilon, d0);
    let a = angle_term(epsilon, d0);
    let shared = v1.vol_w + v2.vol_w + v1.area_bdry + v2.area_bdry;
    let bound = (2.0 * h_bar + a) * shared + v1.vol_excess + v2.vol_excess;
    let mut term_breakdown = BTreeMap::new();
    term_breakdown.insert(String::from("neck"), 2.0 * h_bar * shared);
    term_breakdown.insert(String::from("angle"), a * shared);
    term_breakdown.insert(String::from("excess_1"), v1.vol_excess);
    term_breakdown.insert(String::from("excess_2"), v2.vol_excess);
    Ok(SwifBoundReport {
        k: window.k,
        window: *window,
        epsilon,
        lambda_lower,
        lambda_argmax,
        lambda_upper,
        lambda_mode: opts.lambda_mode,
        lambda_used,
        isometric,
        lemma55_hypothesis,
        h,
        h_bar,
        a,
        d0,
        d_cap,
        vol_w1: v1.vol_w,
        vol_w2: v2.vol_w,
        area_bdry_w1: v1.area_bdry,
        area_bdry_w2: v2.area_bdry,
        vol_excess_1: v1.vol_excess,
        vol_excess_2: v2.vol_excess,
        volumes_1: v1,
        volumes_2: v2,
        bound,
        term_breakdown,
    })
}

/// `(1/√(k+i))[(4D₀ + 2D/√π)(8πD³ + 16πD²) + 8πD]`.
pub fn rate_certificate(d: f64, d0: f64, k: u32, i: u32) -> Result<f64> {
    if !(d > 0.0 && d0 > 0.0) {
        return Err(Error::precondition("diameters must be positive"));
    }
    if k < 2 {
        return Err(Error::precondition("k must be at least 2"));
    }
    let inner = (4.0 * d0 + 2.0 * d / math::sqrt(PI)) * (8.0 * PI * d * d * d + 16.0 * PI * d * d) + 8.0 * PI * d;
    Ok(inner / math::sqrt(k as f64 + i as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{round_sphere, scaled_sine};

    fn window(k: u32) -> IkWindow {
        let a = math::asin(1.0 / k as f64);
        IkWindow { k, a, b: PI - a }
    }

    #[test]
    fn sphere_window_volumes() {
        let m = RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap();
        let v = window_volumes(&m, &window(2), PI).unwrap();
        assert!((v.vol_w - 18.600_870_627_488_465).abs() < 1e-11, "{}", v.vol_w);
        assert!((v.area_bdry - 2.0 * PI).abs() < 1e-12);
        assert!(v.margins_nonnegative());
        let full = IkWindow { k: 2, a: 0.0, b: PI };
        assert!(window_volumes(&m, &full, PI).unwrap().vol_excess < 1e-10);
    }

    #[test]
    fn epsilon_of_scaled_profiles() {
        let m1 = RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap();
        let m2 = RotSymManifold::new(scaled_sine(1.25, 1.0).unwrap()).unwrap();
        assert_eq!(epsilon_of_window(&m1, &m1, &window(4)).unwrap(), 0.0);
        assert!((epsilon_of_window(&m1, &m2, &window(4)).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn self_distance_bound_decreases() {
        let m = RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap();
        let mut prev = f64::INFINITY;
        for k in [4u32, 8, 16, 32] {
            let r = swif_upper_bound(&m, &m, &window(k), PI, &SwifOptions::default()).unwrap();
            assert!(r.isometric && r.h_bar == 0.0 && r.a == 0.0);
            assert!(r.bound > 0.0 && r.bound < prev);
            prev = r.bound;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn scaled_pair_is_finite_and_decreasing() {
        let m1 = RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap();
        let opts = SwifOptions { sample_lambda: false, ..SwifOptions::default() };
        let mut prev = f64::INFINITY;
        for k in [4u32, 8, 16] {
            let m2 = RotSymManifold::new(scaled_sine(1.0 + 1.0 / k as f64, 1.0).unwrap()).unwrap();
            let r = swif_upper_bound(&m1, &m2, &window(k), 2.0 * PI, &opts).unwrap();
            assert!(r.bound.is_finite() && r.bound < prev);
            assert!(r.h <= math::sqrt(2.0 * r.lambda_used * r.d0) + 1e-15);
            assert!(r.bound_with_angle(2.0 * r.a) >= r.bound);
            prev = r.bound;
        }
    }

    #[test]
    fn rate_certificate_oracle() {
        let v = rate_certificate(2.0, 2.0, 4, 0).unwrap();
        assert!((v - 2_087.376_365_698_504_6).abs() < 1e-12 * v);
        assert!(rate_certificate(2.0, 2.0, 4, 1).unwrap() < v);
        assert!(rate_certificate(2.0, 2.0, 1, 0).is_err());
    }

    #[test]
    fn theorem_rate_neck_estimate() {
        // λ ≤ D₀/(k + 1) and ε = 1/k give h̄ ≤ 2D₀/√(k + 1)
        for k in [2u32, 5, 20, 100] {
            let d0 = PI;
            let kf = k as f64;
            let hb = h_bar(d0 / (kf + 1.0), 1.0 / kf, d0);
            assert!(hb <= 2.0 * d0 / math::sqrt(kf + 1.0));
        }
    }
}
