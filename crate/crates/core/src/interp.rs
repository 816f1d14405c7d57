//! Shape-preserving (Fritsch–Carlson) cubic Hermite interpolation.
//!
//! The interpolant passes through every knot, is C¹, and is monotone on
//! each interval where the data are monotone, so sampled warping functions
//! never overshoot below zero near the poles.

use alloc::vec::Vec;

/// Monotone piecewise-cubic Hermite interpolant on strictly increasing knots.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. `xs` must be strictly increasing and the same
    /// length as `ys` (at least two knots).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 2, "need >= 2 matching knots");
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = alloc::vec![0.0; n];
        if n == 2 {
            slopes[0] = secants[0];
            slopes[1] = secants[0];
        } else {
            for i in 1..n - 1 {
                let (d0, d1) = (secants[i - 1], secants[i]);
                if d0 * d1 <= 0.0 {
                    slopes[i] = 0.0;
                } else {
                    // weighted harmonic mean (Fritsch–Butland)
                    let h0 = xs[i] - xs[i - 1];
                    let h1 = xs[i + 1] - xs[i];
                    let w1 = 2.0 * h1 + h0;
                    let w2 = h1 + 2.0 * h0;
                    slopes[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            slopes[0] = end_slope(xs[1] - xs[0], xs[2] - xs[1], secants[0], secants[1]);
            slopes[n - 1] = end_slope(xs[n - 1] - xs[n - 2], xs[n - 2] - xs[n - 3], secants[n - 2], secants[n - 3]);
        }
        Self { xs, ys, slopes }
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    fn locate(&self, x: f64) -> usize {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0;
        }
        if x >= self.xs[n - 1] {
            return n - 2;
        }
        // partition_point gives the first knot > x
        let i = self.xs.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(n - 2)
    }

    /// Value at `x`; `x` is clamped into the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    /// First derivative of the interpolant at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        (d00 * self.ys[i] + d01 * self.ys[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }
}

// three-point end formula, limited to keep monotonicity
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_at_knots() {
        let xs = vec![0.0, 0.5, 1.0, 2.0, 3.5];
        let ys = vec![0.0, 0.2, 0.9, 1.0, 0.1];
        let p = MonotoneCubic::new(xs.clone(), ys.clone());
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.eval(*x) - y).abs() < 1e-15);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| if x < 10.0 { 0.0 } else { 1.0 }).collect();
        let p = MonotoneCubic::new(xs, ys);
        let mut prev = p.eval(0.0);
        for i in 1..2000 {
            let v = p.eval(i as f64 * 19.0 / 2000.0);
            assert!(v >= prev - 1e-15);
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn reproduces_lines() {
        let xs: Vec<f64> = (0..7).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let p = MonotoneCubic::new(xs, ys);
        assert!((p.eval(0.77) - 0.54).abs() < 1e-14);
        assert!((p.derivative(1.1) - 2.0).abs() < 1e-12);
    }
}
