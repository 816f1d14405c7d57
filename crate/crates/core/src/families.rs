//! Generators for the standard profile families.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{validation_of, Tolerances, Validation};
use crate::grid::{adaptive_simpson, linspace};
use crate::math::{self, PI};
use crate::warping::{ClosedForm, WarpingFunction};

/// `f(s) = r·sin(s/r)` on `[0, πr]`: the round sphere of radius `r`.
pub fn round_sphere(radius: f64) -> Result<WarpingFunction> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain { what: "radius", value: radius, lo: 0.0, hi: f64::INFINITY });
    }
    WarpingFunction::closed_form(ClosedForm::Sine { amplitude: radius, radius })
}

/// `f(s) = amplitude·sin(s/radius)`; conical at the poles unless `amplitude = radius`.
pub fn scaled_sine(amplitude: f64, radius: f64) -> Result<WarpingFunction> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::Domain { what: "amplitude", value: amplitude, lo: 0.0, hi: f64::INFINITY });
    }
    WarpingFunction::closed_form(ClosedForm::Sine { amplitude, radius })
}

/// The collapsing family `f_j = (1 − (1 − s)^{2j+2})/(2j + 2)` on `[0, 2]`.
pub fn collapsing_family(j: u32) -> Result<WarpingFunction> {
    WarpingFunction::closed_form(ClosedForm::Collapsing { j })
}

/// Parameters of the thin-spline spheres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LakzianParams {
    /// Width of the spline, in `(0, 1)`.
    pub delta: f64,
    /// Nominal spline length.
    pub l_spline: f64,
    /// Number of samples of the generated profile.
    pub grid: usize,
}

impl LakzianParams {
    pub fn new(delta: f64, l_spline: f64) -> Self {
        Self { delta, l_spline, grid: 8192 }
    }
}

/// Number of knots of the arclength table on the blend region.
const ARCLENGTH_KNOTS: usize = 8192;

/// Hawking mass `m_H(r)` on `[0, 1]`: linear below `δ³`, cubic above `δ`,
/// and a C², strictly increasing blend in between.
///
/// The blend's slope is `A_L(1 + x)e^{−x} + c + A_R(1 + βy)e^{−y}` with
/// `x = (r − δ³)/w₁`, `y = (δ − r)/w₂`; widths and `c` are fixed so the slope
/// and curvature match at both ends and the total increase is `δ³ε²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HawkingMass {
    pub delta: f64,
    pub epsilon: f64,
    left_amp: f64,
    left_width: f64,
    right_amp: f64,
    right_width: f64,
    beta: f64,
    plateau_slope: f64,
}

impl HawkingMass {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        let d3 = delta * delta * delta;
        let rise = 0.5 * d3 * epsilon * epsilon;
        let left_amp = 0.5 * (1.0 - epsilon * epsilon);
        let right_amp = 1.5 * delta * delta;
        let left_width = rise / (6.0 * left_amp);
        let disc = 4.0 * right_amp * right_amp - 8.0 * right_amp * rise / (3.0 * delta);
        if disc < 0.0 {
            return Err(Error::construction("no admissible blend width at r = delta"));
        }
        let right_width = (2.0 * rise / 3.0) / (2.0 * right_amp + math::sqrt(disc));
        let beta = 1.0 - 2.0 * right_width / delta;
        let mut m = Self { delta, epsilon, left_amp, left_width, right_amp, right_width, beta, plateau_slope: 0.0 };
        let span = delta - d3;
        let used = m.layer_integral(delta);
        m.plateau_slope = (rise - used) / span;
        if m.plateau_slope < 0.0 {
            return Err(Error::construction(format!("blend overshoots the mass budget (slope {:e})", m.plateau_slope)));
        }
        Ok(m)
    }

    fn d3(&self) -> f64 {
        self.delta * self.delta * self.delta
    }

    // ∫_{δ³}^{r} of the two layer terms
    fn layer_integral(&self, r: f64) -> f64 {
        let x = (r - self.d3()) / self.left_width;
        let left = self.left_amp * self.left_width * (2.0 - (x + 2.0) * math::exp(-x));
        let y = (self.delta - r) / self.right_width;
        let y0 = (self.delta - self.d3()) / self.right_width;
        let b = self.beta;
        let right = self.right_amp
            * self.right_width
            * ((1.0 + b + b * y) * math::exp(-y) - (1.0 + b + b * y0) * math::exp(-y0));
        left + right
    }

    /// `∫_{δ³}^{r} m_H′` for `r` in the blend.
    fn blend_rise(&self, r: f64) -> f64 {
        self.layer_integral(r) + self.plateau_slope * (r - self.d3())
    }

    pub fn value(&self, r: f64) -> f64 {
        let d3 = self.d3();
        if r <= d3 {
            0.5 * r * (1.0 - self.epsilon * self.epsilon)
        } else if r >= self.delta {
            0.5 * r * r * r
        } else {
            0.5 * d3 * (1.0 - self.epsilon * self.epsilon) + self.blend_rise(r)
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        if r <= self.d3() {
            self.left_amp
        } else if r >= self.delta {
            1.5 * r * r
        } else {
            let x = (r - self.d3()) / self.left_width;
            let y = (self.delta - r) / self.right_width;
            self.left_amp * (1.0 + x) * math::exp(-x)
                + self.plateau_slope
                + self.right_amp * (1.0 + self.beta * y) * math::exp(-y)
        }
    }

    /// `r − 2m_H(r)`, evaluated without cancellation.
    pub fn gap(&self, r: f64) -> f64 {
        let d3 = self.d3();
        let e2 = self.epsilon * self.epsilon;
        if r <= d3 {
            r * e2
        } else if r >= self.delta {
            r * (1.0 - r * r)
        } else {
            (r - d3) + d3 * e2 - 2.0 * self.blend_rise(r)
        }
    }

    /// `z′(r) = √(2m_H / (r − 2m_H))`.
    pub fn z_prime(&self, r: f64) -> Result<f64> {
        let gap = self.gap(r);
        if !(gap > 0.0) {
            return Err(Error::construction(format!("2 m_H(r) >= r at r = {r}")));
        }
        Ok(math::sqrt(2.0 * self.value(r) / gap))
    }

    /// Scalar curvature of the metric at areal radius `r`: `4 m_H′(r)/r²`.
    pub fn scalar_curvature(&self, r: f64) -> f64 {
        4.0 * self.slope(r) / (r * r)
    }
}

/// A generated thin-spline sphere with its construction data.
#[derive(Debug, Clone)]
pub struct LakzianProfile {
    pub params: LakzianParams,
    pub epsilon: f64,
    pub mass: HawkingMass,
    /// Arclength where the linear (spline) stretch ends, `r = δ³`.
    pub s_neck: f64,
    /// Arclength where `r = δ`.
    pub s_delta: f64,
    /// Arclength of the equator `r = 1`.
    pub s_equator: f64,
    pub warping: WarpingFunction,
}

/// `ε` solving `δ³ √((1 − ε²)/ε²) = L`.
pub fn lakzian_epsilon(delta: f64, l_spline: f64) -> f64 {
    let d3 = delta * delta * delta;
    d3 / math::sqrt(l_spline * l_spline + d3 * d3)
}

/// Builds the thin-spline sphere in arclength form `ds² + f(s)² g_{S²}`.
pub fn lakzian_family(p: LakzianParams) -> Result<LakzianProfile> {
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::Domain { what: "delta", value: p.delta, lo: 0.0, hi: 1.0 });
    }
    if !(p.l_spline > 0.0 && p.l_spline.is_finite()) {
        return Err(Error::Domain { what: "l_spline", value: p.l_spline, lo: 0.0, hi: f64::INFINITY });
    }
    if p.grid < 64 {
        return Err(Error::precondition("lakzian grid needs at least 64 samples"));
    }
    let epsilon = lakzian_epsilon(p.delta, p.l_spline);
    let mass = HawkingMass::new(p.delta, epsilon)?;
    let d3 = p.delta * p.delta * p.delta;

    // monotonicity and the z′ condition, checked on a sample of r
    let probes = linspace(0.0, 1.0, 4001);
    for &r in probes.iter().chain(linspace(d3, p.delta, 4001).iter()) {
        if r > 0.0 && r < 1.0 {
            mass.z_prime(r)?;
        }
        if mass.slope(r) <= 0.0 {
            return Err(Error::construction(format!("m_H not increasing at r = {r}")));
        }
    }
    let ordered: Vec<f64> = probes.iter().map(|&r| mass.value(r)).collect();
    if ordered.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::construction("m_H fails sample-wise monotonicity"));
    }

    // arclength over the blend in v with r = δ³ + v², ds = 2v √(r / gap) dv
    let ds_dv = |v: f64| {
        let r = d3 + v * v;
        2.0 * v * math::sqrt(r / mass.gap(r))
    };
    let v_end = math::sqrt(p.delta - d3);
    let knots = linspace(0.0, v_end, ARCLENGTH_KNOTS);
    let mut cumulative = Vec::with_capacity(knots.len());
    let s_neck = d3 / epsilon;
    let mut acc = s_neck;
    cumulative.push(acc);
    for w in knots.windows(2) {
        acc += adaptive_simpson(&ds_dv, w[0], w[1], 1e-15);
        cumulative.push(acc);
    }
    let s_delta = acc;
    let s_equator = s_delta + (PI / 2.0 - math::asin(p.delta));
    let domain_end = s_equator + PI / 2.0;

    let invert_blend = |target: f64| -> f64 {
        let k = cumulative.partition_point(|&c| c <= target).clamp(1, knots.len() - 1) - 1;
        let (mut lo, mut hi) = (knots[k], knots[k + 1]);
        let base = cumulative[k];
        let mut v = 0.5 * (lo + hi);
        for _ in 0..60 {
            let value = base + adaptive_simpson(&ds_dv, knots[k], v, 1e-16) - target;
            if value > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let slope = ds_dv(v);
            let newton = v - value / slope;
            v = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 || value.abs() < 1e-15 {
                break;
            }
        }
        d3 + v * v
    };

    let xs = linspace(0.0, domain_end, p.grid);
    let mut samples: Vec<f64> = xs
        .iter()
        .map(|&s| {
            if s <= s_neck {
                epsilon * s
            } else if s <= s_delta {
                invert_blend(s)
            } else if s <= s_equator {
                math::sin(math::asin(p.delta) + (s - s_delta))
            } else {
                math::cos(s - s_equator)
            }
        })
        .collect();
    samples[0] = 0.0;
    let last = samples.len() - 1;
    samples[last] = 0.0;
    let warping = WarpingFunction::sampled(samples, domain_end)?;
    Ok(LakzianProfile { params: p, epsilon, mass, s_neck, s_delta, s_equator, warping })
}

/// A user-supplied profile with its validation record.
#[derive(Debug, Clone)]
pub struct CustomProfile {
    pub warping: WarpingFunction,
    pub validation: Validation,
}

/// Wraps samples on `[0, domain_end]`; endpoint and positivity violations
/// are reported field by field.
pub fn custom_profile(samples: Vec<f64>, domain_end: f64) -> Result<CustomProfile> {
    let warping = WarpingFunction::sampled(samples, domain_end)?;
    let tol = Tolerances::default();
    let validation = validation_of(&warping, &tol);
    let mut violations = Vec::new();
    if validation.f_at_start.abs() > tol.endpoint {
        violations.push(format!("f(0) = {} (must be 0 within {:e})", validation.f_at_start, tol.endpoint));
    }
    if validation.f_at_end.abs() > tol.endpoint {
        violations.push(format!("f(L) = {} (must be 0 within {:e})", validation.f_at_end, tol.endpoint));
    }
    if !validation.positive {
        violations.push(format!("min interior f = {} (must be > 0)", validation.min_interior_f));
    }
    if !violations.is_empty() {
        return Err(Error::Invalid { violations });
    }
    Ok(CustomProfile { warping, validation })
}

/// Mollifies samples with a compact bump kernel of half-width `half_width`
/// nodes. Odd reflection at both ends keeps `f(0)`, `f(L)` and the endpoint
/// slopes unchanged for profiles that are linear near the poles.
pub fn smooth_samples(samples: &[f64], half_width: usize) -> Vec<f64> {
    let n = samples.len();
    if half_width == 0 || n < 3 {
        return samples.to_vec();
    }
    // wider kernels would reflect past the opposite pole
    let w = half_width.min(n - 1) as isize;
    let weights: Vec<f64> = (-w..=w)
        .map(|k| {
            let t = k as f64 / (w + 1) as f64;
            math::exp(1.0 - 1.0 / (1.0 - t * t))
        })
        .collect();
    let norm: f64 = weights.iter().sum();
    let last = (n - 1) as isize;
    let at = |j: isize| -> f64 {
        if j < 0 {
            -samples[(-j).min(last) as usize]
        } else if j > last {
            -samples[(2 * last - j).max(0) as usize]
        } else {
            samples[j as usize]
        }
    };
    (0..n as isize)
        .map(|i| {
            // paired terms cancel exactly at the poles
            let mut acc = weights[w as usize] * at(i);
            for k in 1..=w {
                acc += weights[(w + k) as usize] * (at(i + k) + at(i - k));
            }
            acc / norm
        })
        .collect()
}
