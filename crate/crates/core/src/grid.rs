//! Uniform-grid samples, quadrature and finite differences.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::math;

/// Samples of a scalar function at `n` equally spaced points of `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::precondition("grid function needs at least 2 samples"));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Domain { what: "interval end", value: hi, lo, hi: f64::INFINITY });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::precondition(alloc::format!("sample {i} is not finite")));
        }
        Ok(Self { lo, hi, samples })
    }

    /// Samples `f` at `n` uniform nodes of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (hi - lo) / (n.max(2) - 1) as f64;
        let samples = (0..n).map(|i| f(node(lo, hi, h, n, i))).collect();
        Self::new(lo, hi, samples)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.samples.len() - 1) as f64
    }

    /// Coordinate of node `i`; the last node is exactly `hi`.
    pub fn x(&self, i: usize) -> f64 {
        node(self.lo, self.hi, self.spacing(), self.samples.len(), i)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map into a new grid function on the same nodes.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let samples = (0..self.len()).map(|i| f(self.x(i), self.samples[i])).collect();
        Self::new(self.lo, self.hi, samples)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len() && self.lo == other.lo && self.hi == other.hi
    }

    /// Composite Simpson integral over the whole interval.
    pub fn integral(&self) -> f64 {
        simpson_samples(&self.samples, self.spacing())
    }

    /// Integral over `[a, b] ⊆ [lo, hi]` using local cubic interpolation of the
    /// samples, integrated exactly by 3-point Gauss–Legendre on each cell.
    pub fn integrate_range(&self, a: f64, b: f64) -> f64 {
        let (a, b, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if b <= a {
            return 0.0;
        }
        let h = self.spacing();
        let n = self.len();
        let first = (((a - self.lo) / h) as usize).min(n - 2);
        let last = ((((b - self.lo) / h) as usize) + 1).min(n - 1);
        let mut total = 0.0;
        for cell in first..last {
            let x0 = self.x(cell);
            let x1 = self.x(cell + 1);
            let lo = a.max(x0);
            let hi = b.min(x1);
            if hi <= lo {
                continue;
            }
            let base = cell.saturating_sub(1).min(n.saturating_sub(4));
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (node, weight) in GAUSS3 {
                let x = mid + half * node;
                total += weight * half * self.lagrange(base, x);
            }
        }
        sign * total
    }

    fn lagrange(&self, base: usize, x: f64) -> f64 {
        let m = self.len().min(4);
        let mut acc = 0.0;
        for i in 0..m {
            let xi = self.x(base + i);
            let mut w = 1.0;
            for j in 0..m {
                if j != i {
                    let xj = self.x(base + j);
                    w *= (x - xj) / (xi - xj);
                }
            }
            acc += w * self.samples[base + i];
        }
        acc
    }

    /// Local cubic Lagrange interpolation through the four nearest nodes.
    pub fn eval_cubic(&self, x: f64) -> f64 {
        let n = self.len();
        let cell = (((x - self.lo) / self.spacing()).max(0.0) as usize).min(n - 2);
        let base = cell.saturating_sub(1).min(n.saturating_sub(4));
        self.lagrange(base, x)
    }

    pub fn interpolant(&self) -> MonotoneCubic {
        MonotoneCubic::new(self.xs(), self.samples.clone())
    }

    /// First derivative at every node.
    pub fn first_derivative(&self) -> Vec<f64> {
        first_derivative(&self.samples, self.spacing())
    }

    /// Second derivative at every node (endpoint values are one-sided).
    pub fn second_derivative(&self) -> Vec<f64> {
        second_derivative(&self.samples, self.spacing())
    }

    /// Max-norm of the difference; the grids must coincide.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::Shape { left: self.len(), right: other.len() });
        }
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

fn node(lo: f64, hi: f64, h: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + h * i as f64
    }
}

const GAUSS3: [(f64, f64); 3] =
    [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];

/// Composite Simpson rule on uniformly spaced samples. An odd number of
/// intervals is closed with Simpson's 3/8 rule on the last three.
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        4 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) { (n - 1, false) } else { (n - 4, true) };
            let mut acc = values[0] + values[simpson_end];
            for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = acc * h / 3.0;
            if tail {
                let v = &values[n - 4..];
                total += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}

/// Composite Simpson rule for a function on `[a, b]` with `intervals` cells
/// (rounded up to an even count).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid_samples(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (0.5 * (values[0] + values[values.len() - 1]) + inner)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// First derivative by finite differences: fourth-order central stencils in
/// the interior, fourth-order biased stencils at the first and last interior
/// nodes, second-order one-sided stencils at the two ends.
pub fn first_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = alloc::vec![0.0; n];
    if n < 2 {
        return d;
    }
    if n < 6 {
        for i in 0..n {
            d[i] = if i == 0 {
                if n >= 3 {
                    (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
                } else {
                    (v[1] - v[0]) / h
                }
            } else if i == n - 1 {
                if n >= 3 {
                    (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
                } else {
                    (v[1] - v[0]) / h
                }
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            };
        }
        return d;
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
    d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / (12.0 * h);
    for i in 2..n - 2 {
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    }
    d
}

/// Second derivative by finite differences: the three-point central stencil
/// at every interior node, second-order one-sided stencils at the ends.
///
/// The central value equals a hat-weighted average of the true `f″` over
/// `[x − h, x + h]`, so it never overshoots across jumps in `f″`.
pub fn second_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = alloc::vec![0.0; n];
    let h2 = h * h;
    if n < 3 {
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h2;
    }
    if n >= 4 {
        d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    } else {
        d[0] = d[1];
        d[n - 1] = d[n - 2];
    }
    d
}

/// `n` evenly spaced points of `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| node(a, b, h, n, i)).collect()
}

/// Max-norm of the difference of two grid functions sharing a grid.
pub fn uniform_distance(g1: &GridFunction, g2: &GridFunction) -> Result<f64> {
    g1.max_abs_diff(g2)
}

/// Discrete L² norm of the difference of two sample vectors with spacing `h`.
pub fn l2_distance(a: &[f64], b: &[f64], h: f64) -> f64 {
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    math::sqrt(simpson_samples(&sq, h).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, sin, PI};

    #[test]
    fn simpson_handles_both_parities() {
        for n in [5usize, 6, 101, 4096] {
            let g = GridFunction::from_fn(0.0, PI, n, sin).unwrap();
            let tol = match n {
                0..=9 => 1e-2,
                10..=999 => 1e-7,
                _ => 1e-12,
            };
            assert!((g.integral() - 2.0).abs() < tol, "n = {n}: {}", g.integral());
        }
    }

    #[test]
    fn first_derivative_is_fourth_order() {
        let err = |n: usize| {
            let g = GridFunction::from_fn(0.0, PI, n, sin).unwrap();
            let d = g.first_derivative();
            (1..n - 1).map(|i| (d[i] - cos(g.x(i))).abs()).fold(0.0, f64::max)
        };
        let ratio = err(101) / err(201);
        assert!(ratio > 14.0, "ratio {ratio}");
        let g = GridFunction::from_fn(0.0, PI, 201, sin).unwrap();
        let d2 = g.second_derivative();
        for (i, v) in d2.iter().enumerate().take(200).skip(1) {
            assert!((v + sin(g.x(i))).abs() < 3e-5);
        }
    }

    #[test]
    fn integrate_range_is_exact_for_cubics() {
        let g = GridFunction::from_fn(0.0, 2.0, 41, |x| x * x * x - x).unwrap();
        let exact = |x: f64| x.powi(4) / 4.0 - x * x / 2.0;
        let v = g.integrate_range(0.013, 1.377);
        assert!((v - (exact(1.377) - exact(0.013))).abs() < 1e-13);
        assert!((g.integrate_range(1.377, 0.013) + v).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(0.0, 1.0, alloc::vec![1.0]).is_err());
        assert!(GridFunction::new(1.0, 1.0, alloc::vec![1.0, 2.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, alloc::vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn adaptive_simpson_converges() {
        let v = adaptive_simpson(&|x: f64| crate::math::sqrt(x), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }
}
