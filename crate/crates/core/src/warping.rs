//! Warping functions `f` of the metric `ds² + f(s)² g_{S²}` on `[0, L]`.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::interp::MonotoneCubic;
use crate::math::{self, PI};

/// Closed-form profiles with analytic derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `amplitude · sin(s / radius)` on `[0, π·radius]`.
    Sine { amplitude: f64, radius: f64 },
    /// `Σ aᵢ sin(ωᵢ s)` on `[0, domain_end]`, terms given as `(aᵢ, ωᵢ)`.
    SineSeries { terms: Vec<(f64, f64)>, domain_end: f64 },
    /// `(1 − (1 − s)^{2j+2}) / (2j + 2)` on `[0, 2]`.
    Collapsing { j: u32 },
    /// `slope · s` on `[0, domain_end]`.
    Linear { slope: f64, domain_end: f64 },
}

impl ClosedForm {
    pub fn domain_end(&self) -> f64 {
        match self {
            ClosedForm::Sine { radius, .. } => PI * radius,
            ClosedForm::SineSeries { domain_end, .. } | ClosedForm::Linear { domain_end, .. } => *domain_end,
            ClosedForm::Collapsing { .. } => 2.0,
        }
    }

    fn value(&self, s: f64) -> f64 {
        match self {
            ClosedForm::Sine { amplitude, radius } => amplitude * math::sin(s / radius),
            ClosedForm::SineSeries { terms, .. } => terms.iter().map(|(a, w)| a * math::sin(w * s)).sum(),
            ClosedForm::Collapsing { j } => {
                let p = (2 * j + 2) as f64;
                1.0 / p - math::powf(1.0 - s, p) / p
            }
            ClosedForm::Linear { slope, .. } => slope * s,
        }
    }

    fn d1(&self, s: f64) -> f64 {
        match self {
            ClosedForm::Sine { amplitude, radius } => amplitude / radius * math::cos(s / radius),
            ClosedForm::SineSeries { terms, .. } => terms.iter().map(|(a, w)| a * w * math::cos(w * s)).sum(),
            ClosedForm::Collapsing { j } => math::powf(1.0 - s, (2 * j + 1) as f64),
            ClosedForm::Linear { slope, .. } => *slope,
        }
    }

    fn d2(&self, s: f64) -> f64 {
        match self {
            ClosedForm::Sine { amplitude, radius } => -amplitude / (radius * radius) * math::sin(s / radius),
            ClosedForm::SineSeries { terms, .. } => terms.iter().map(|(a, w)| -a * w * w * math::sin(w * s)).sum(),
            ClosedForm::Collapsing { j } => -((2 * j + 1) as f64) * math::powf(1.0 - s, (2 * j) as f64),
            ClosedForm::Linear { .. } => 0.0,
        }
    }
}

/// Where derivative values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// Sampled profile: node values, finite-difference derivatives at the nodes,
/// and a monotone cubic interpolant for off-node values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    grid: GridFunction,
    d1: GridFunction,
    d2: GridFunction,
    interp: MonotoneCubic,
}

impl SampledProfile {
    fn new(grid: GridFunction) -> Result<Self> {
        let d1 = GridFunction::new(grid.lo(), grid.hi(), grid.first_derivative())?;
        let d2 = GridFunction::new(grid.lo(), grid.hi(), grid.second_derivative())?;
        let interp = grid.interpolant();
        Ok(Self { grid, d1, d2, interp })
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }

    fn node_index(&self, s: f64) -> Option<usize> {
        let h = self.grid.spacing();
        let t = s / h;
        let i = math::round(t);
        if (t - i).abs() <= 1e-9 && i >= 0.0 && (i as usize) < self.grid.len() {
            Some(i as usize)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    ClosedForm(ClosedForm),
    Sampled(SampledProfile),
}

/// The profile `f` on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingFunction {
    domain_end: f64,
    repr: Representation,
}

impl WarpingFunction {
    pub fn closed_form(form: ClosedForm) -> Result<Self> {
        let domain_end = form.domain_end();
        if !(domain_end.is_finite() && domain_end > 0.0) {
            return Err(Error::Domain { what: "domain_end", value: domain_end, lo: 0.0, hi: f64::INFINITY });
        }
        match &form {
            ClosedForm::Sine { amplitude, radius } if !(*radius > 0.0 && amplitude.is_finite()) => {
                return Err(Error::Domain { what: "radius", value: *radius, lo: 0.0, hi: f64::INFINITY });
            }
            ClosedForm::Collapsing { j } if *j < 1 => {
                return Err(Error::Domain { what: "j", value: *j as f64, lo: 1.0, hi: f64::INFINITY });
            }
            _ => {}
        }
        Ok(Self { domain_end, repr: Representation::ClosedForm(form) })
    }

    /// Samples on `n` uniform nodes of `[0, domain_end]`.
    pub fn sampled(samples: Vec<f64>, domain_end: f64) -> Result<Self> {
        if !(domain_end.is_finite() && domain_end > 0.0) {
            return Err(Error::Domain { what: "domain_end", value: domain_end, lo: 0.0, hi: f64::INFINITY });
        }
        let grid = GridFunction::new(0.0, domain_end, samples)?;
        Ok(Self { domain_end, repr: Representation::Sampled(SampledProfile::new(grid)?) })
    }

    pub fn from_grid(grid: GridFunction) -> Result<Self> {
        if grid.lo() != 0.0 {
            return Err(Error::precondition("sampled warping functions start at s = 0"));
        }
        let domain_end = grid.hi();
        Ok(Self { domain_end, repr: Representation::Sampled(SampledProfile::new(grid)?) })
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        match self.repr {
            Representation::ClosedForm(_) => DerivativeSource::Analytic,
            Representation::Sampled(_) => DerivativeSource::FiniteDifference,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.repr, Representation::Sampled(_))
    }

    /// Pole guard: curvature queries with `f(s) <= tol_pos` are rejected.
    pub fn tol_pos(&self) -> f64 {
        1e-6 * self.domain_end
    }

    fn check_domain(&self, s: f64) -> Result<f64> {
        let slack = 1e-12 * self.domain_end;
        if !(s >= -slack && s <= self.domain_end + slack) {
            return Err(Error::Domain { what: "s", value: s, lo: 0.0, hi: self.domain_end });
        }
        Ok(s.clamp(0.0, self.domain_end))
    }

    /// `f(s)`; exact at sample nodes for sampled profiles.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let s = self.check_domain(s)?;
        Ok(self.value_unchecked(s))
    }

    pub(crate) fn value_unchecked(&self, s: f64) -> f64 {
        match &self.repr {
            Representation::ClosedForm(c) => c.value(s),
            Representation::Sampled(p) => match p.node_index(s) {
                Some(i) => p.grid.samples()[i],
                None => p.interp.eval(s),
            },
        }
    }

    /// `f′(s)` (order 1) or `f″(s)` (order 2).
    pub fn derivative(&self, s: f64, order: u8) -> Result<f64> {
        let s = self.check_domain(s)?;
        match (order, &self.repr) {
            (1, Representation::ClosedForm(c)) => Ok(c.d1(s)),
            (2, Representation::ClosedForm(c)) => Ok(c.d2(s)),
            (1, Representation::Sampled(p)) => Ok(sampled_derivative(p, &p.d1, s)),
            (2, Representation::Sampled(p)) => {
                if s <= 0.0 || s >= self.domain_end {
                    return Err(Error::UnsupportedPoint { s });
                }
                Ok(sampled_derivative(p, &p.d2, s))
            }
            _ => Err(Error::precondition("derivative order must be 1 or 2")),
        }
    }

    /// Values and first two derivatives at `n` uniform nodes of `[0, L]`.
    /// Second derivatives at the poles of sampled data are one-sided estimates.
    pub fn node_values(&self, n: usize) -> NodeValues {
        let xs = crate::grid::linspace(0.0, self.domain_end, n);
        match &self.repr {
            Representation::Sampled(p) if p.grid.len() == n => NodeValues {
                s: xs,
                f: p.grid.samples().to_vec(),
                d1: p.d1.samples().to_vec(),
                d2: p.d2.samples().to_vec(),
            },
            Representation::Sampled(p) => {
                let f = xs.iter().map(|&s| self.value_unchecked(s)).collect();
                let d1 = xs.iter().map(|&s| sampled_derivative(p, &p.d1, s)).collect();
                let d2 = xs.iter().map(|&s| sampled_derivative(p, &p.d2, s)).collect();
                NodeValues { s: xs, f, d1, d2 }
            }
            Representation::ClosedForm(c) => {
                let f = xs.iter().map(|&s| c.value(s)).collect();
                let d1 = xs.iter().map(|&s| c.d1(s)).collect();
                let d2 = xs.iter().map(|&s| c.d2(s)).collect();
                NodeValues { s: xs, f, d1, d2 }
            }
        }
    }
}

fn sampled_derivative(p: &SampledProfile, d: &GridFunction, s: f64) -> f64 {
    match p.node_index(s) {
        Some(i) => d.samples()[i],
        None => d.eval_cubic(s),
    }
}

/// Node coordinates with `f`, `f′`, `f″`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeValues {
    pub s: Vec<f64>,
    pub f: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl NodeValues {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.s[1] - self.s[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sphere_values() {
        let wf = WarpingFunction::closed_form(ClosedForm::Sine { amplitude: 1.0, radius: 1.0 }).unwrap();
        assert!((wf.eval(PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(wf.eval(0.0).unwrap(), 0.0);
        assert!(wf.derivative(PI / 2.0, 1).unwrap().abs() < 1e-15);
        assert!((wf.derivative(PI / 2.0, 2).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(wf.eval(3.2), Err(Error::Domain { .. })));
        assert!(wf.eval(-0.1).is_err());
    }

    #[test]
    fn collapsing_family_closed_form() {
        let wf = WarpingFunction::closed_form(ClosedForm::Collapsing { j: 1 }).unwrap();
        assert_eq!(wf.eval(1.0).unwrap(), 0.25);
        assert_eq!(wf.derivative(0.0, 1).unwrap(), 1.0);
        assert_eq!(wf.derivative(2.0, 1).unwrap(), -1.0);
        assert_eq!(wf.eval(2.0).unwrap(), 0.0);
    }

    #[test]
    fn sampled_is_exact_at_nodes_and_rejects_pole_second_derivative() {
        let n = 257;
        let xs = crate::grid::linspace(0.0, PI, n);
        let samples: Vec<f64> = xs.iter().map(|&s| math::sin(s)).collect();
        let wf = WarpingFunction::sampled(samples.clone(), PI).unwrap();
        for i in [0, 17, 128, 256] {
            assert_eq!(wf.eval(xs[i]).unwrap(), samples[i]);
        }
        assert!((wf.eval(1.0).unwrap() - math::sin(1.0)).abs() < 1e-6);
        assert!((wf.derivative(1.0, 1).unwrap() - math::cos(1.0)).abs() < 1e-7);
        assert!((wf.derivative(1.0, 2).unwrap() + math::sin(1.0)).abs() < 3e-5);
        assert_eq!(wf.derivative(0.0, 2), Err(Error::UnsupportedPoint { s: 0.0 }));
        assert_eq!(wf.derivative(PI, 2), Err(Error::UnsupportedPoint { s: PI }));
        assert!(wf.derivative(0.0, 1).is_ok());
    }
}
