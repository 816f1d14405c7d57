//! Shortest paths on warped products by graph search.
//!
//! A point pair spans a totally geodesic surface `ds² + f(s)² dα²`, so every
//! distance query reduces to a 2D problem on `[0, L] × [0, Δθ]`. That strip is
//! meshed with rows in `s` and uniform columns in `α`, the two poles are
//! collapsed to single vertices, and Dijkstra runs over a 16-neighbour
//! stencil with edge lengths taken from the metric at the edge midpoint.
//! Rows whose cells are thin in `α` get extra long edges so the set of
//! physical edge directions stays evenly spread.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RotSymManifold;
use crate::math::{self, PI};
use crate::sequence::IkWindow;
use crate::warping::WarpingFunction;

/// Default rows (and column cap) of the distance mesh.
pub const DEFAULT_RESOLUTION: usize = 512;

/// Stencil offsets in (row, column); the mirrored half is added at run time.
const STENCIL: [(isize, isize); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (1, -2), (2, 1), (2, -1)];

/// A point of `[0, L] × S²`, the sphere factor stored as polar and azimuthal angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub s: f64,
    pub polar: f64,
    pub azimuth: f64,
}

impl SurfacePoint {
    pub fn new(s: f64, polar: f64, azimuth: f64) -> Self {
        Self { s, polar, azimuth }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let sp = math::sin(self.polar);
        [sp * math::cos(self.azimuth), sp * math::sin(self.azimuth), math::cos(self.polar)]
    }

    /// Angle in `[0, π]` between the sphere factors of two points.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let (u, v) = (self.unit_vector(), other.unit_vector());
        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let sin = math::sqrt(cross.iter().map(|c| c * c).sum::<f64>());
        let cos = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        math::atan2(sin, cos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceQuery {
    pub p: SurfacePoint,
    pub q: SurfacePoint,
    pub resolution: usize,
}

impl DistanceQuery {
    pub fn new(p: SurfacePoint, q: SurfacePoint) -> Self {
        Self { p, q, resolution: DEFAULT_RESOLUTION }
    }
}

/// One sampled pair of the distortion estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionSample {
    pub s_x: f64,
    pub s_y: f64,
    pub delta_theta: f64,
    pub d_in_first: f64,
    pub d_in_second: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    /// Largest sampled gap: a lower estimate of the supremum.
    pub lower: f64,
    /// `(L₁ + L₂ + 8π)/(k − 1)`.
    pub analytic_upper: f64,
    pub argmax: Option<DistortionSample>,
    pub n_pairs: usize,
}

/// Estimated relative error of a mesh distance: stencil anisotropy plus a
/// first-order term in the resolution.
pub fn mesh_error_bound(resolution: usize) -> f64 {
    stencil_anisotropy() + 2.0 / resolution as f64
}

/// Worst ratio `(|a| + |b|)/|a + b| − 1` over angularly adjacent stencil
/// directions on a square cell: the largest excess of a two-segment
/// zig-zag over the straight segment it approximates.
pub fn stencil_anisotropy() -> f64 {
    let dirs = [(1.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 1.0)];
    let norm = |(x, y): (f64, f64)| math::sqrt(x * x + y * y);
    dirs.windows(2)
        .map(|w| (norm(w[0]) + norm(w[1])) / norm((w[0].0 + w[1].0, w[0].1 + w[1].1)) - 1.0)
        .fold(0.0, f64::max)
}

/// Richardson extrapolation for a first-order method: `2 d_{2n} − d_n`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structured mesh of the strip `[0, L] × [0, α_max]`.
struct Mesh {
    rows: Vec<f64>,
    f_row: Vec<f64>,
    // f at midpoints between row i and rows i + 1, i + 2
    f_mid1: Vec<f64>,
    f_mid2: Vec<f64>,
    cols: usize,
    d_alpha: f64,
    // extra column offsets for edges between rows i and i + 1
    wide: Vec<Vec<isize>>,
}

impl Mesh {
    fn new(wf: &WarpingFunction, resolution: usize, alpha_max: f64, extra_rows: &[f64]) -> Result<Self> {
        let l = wf.domain_end();
        let snap = 1e-12 * l;
        let mut rows: Vec<f64> = crate::grid::linspace(0.0, l, resolution);
        for &s in extra_rows {
            rows.push(s.clamp(0.0, l));
        }
        rows.sort_by(f64::total_cmp);
        rows.dedup_by(|a, b| (*a - *b).abs() <= snap);
        let n = rows.len();
        let f_row: Vec<f64> = rows.iter().map(|&s| wf.value_unchecked(s)).collect();
        let mid = |step: usize| -> Vec<f64> {
            (0..n)
                .map(|i| if i + step < n { wf.value_unchecked(0.5 * (rows[i] + rows[i + step])) } else { 0.0 })
                .collect()
        };
        let f_mid1 = mid(1);
        let f_mid2 = mid(2);

        let h = l / (resolution - 1) as f64;
        let guard = 2.0 * h;
        let tol = wf.tol_pos();
        for (i, (&s, &f)) in rows.iter().zip(&f_row).enumerate() {
            if i > 0 && i + 1 < n && s > guard && s < l - guard && f <= tol {
                return Err(Error::Disconnected { s });
            }
        }

        let f_max = f_row.iter().copied().fold(0.0, f64::max);
        // square cells where the sphere factor is widest
        let cols = if alpha_max <= 0.0 {
            1
        } else {
            let want = math::ceil(alpha_max * f_max / h) as usize + 1;
            want.clamp(3, resolution.max(3))
        };
        let d_alpha = if cols > 1 { alpha_max / (cols - 1) as f64 } else { 0.0 };
        // Where cells are thin in α (near the poles) the base stencil only
        // sees near-vertical directions; add offsets whose physical slopes
        // are about 1/3, 1/2, 1, 2 and 3.
        let wide = (0..n)
            .map(|i| {
                if i + 1 >= n || d_alpha == 0.0 {
                    return Vec::new();
                }
                let ds = rows[i + 1] - rows[i];
                let rho = f_mid1[i] * d_alpha / ds;
                let mut extra: Vec<isize> = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0]
                    .iter()
                    .filter(|_| rho > 0.0)
                    .map(|k| math::round(k / rho))
                    .filter(|&c| c >= 3.0 && c < cols as f64)
                    .map(|c| c as isize)
                    .collect();
                extra.dedup();
                extra
            })
            .collect();
        Ok(Self { rows, f_row, f_mid1, f_mid2, cols, d_alpha, wide })
    }

    fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn south(&self) -> usize {
        0
    }

    fn north(&self) -> usize {
        1
    }

    fn vertex(&self, row: usize, col: usize) -> usize {
        if row == 0 {
            self.south()
        } else if row == self.n_rows() - 1 {
            self.north()
        } else {
            2 + (row - 1) * self.cols + col
        }
    }

    fn n_vertices(&self) -> usize {
        2 + (self.n_rows() - 2) * self.cols
    }

    fn row_index(&self, s: f64) -> usize {
        let i = self.rows.partition_point(|&r| r < s);
        if i == 0 {
            return 0;
        }
        if i >= self.n_rows() {
            return self.n_rows() - 1;
        }
        if (self.rows[i] - s).abs() <= (s - self.rows[i - 1]).abs() {
            i
        } else {
            i - 1
        }
    }

    fn edge(&self, r0: usize, dr: usize, dc: isize) -> f64 {
        let ds = self.rows[r0 + dr] - self.rows[r0];
        let f = match dr {
            0 => self.f_row[r0],
            1 => self.f_mid1[r0],
            _ => self.f_mid2[r0],
        };
        let da = dc as f64 * self.d_alpha * f;
        math::sqrt(ds * ds + da * da)
    }

    /// Single-source distances from `(row, col)` to every vertex.
    fn dijkstra(&self, row: usize, col: usize) -> Vec<f64> {
        let nv = self.n_vertices();
        let mut dist = alloc::vec![f64::INFINITY; nv];
        let mut heap = BinaryHeap::new();
        let src = self.vertex(row, col);
        dist[src] = 0.0;
        heap.push(Entry(0.0, src));
        let n = self.n_rows();
        let cols = self.cols as isize;
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            let mut relax = |w: usize, len: f64, heap: &mut BinaryHeap<Entry>| {
                let nd = d + len;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Entry(nd, w));
                }
            };
            if v == self.south() || v == self.north() {
                // a pole reaches every vertex of the next two rows radially
                let (r0, rows): (usize, [usize; 2]) =
                    if v == self.south() { (0, [1, 2]) } else { (n - 1, [n - 2, n - 3]) };
                for r in rows {
                    if r == 0 || r >= n - 1 {
                        let w = self.vertex(r, 0);
                        relax(w, (self.rows[r] - self.rows[r0]).abs(), &mut heap);
                        continue;
                    }
                    let len = (self.rows[r] - self.rows[r0]).abs();
                    for c in 0..self.cols {
                        relax(self.vertex(r, c), len, &mut heap);
                    }
                }
                continue;
            }
            let r = (v - 2) / self.cols + 1;
            let c = ((v - 2) % self.cols) as isize;
            let up = self.wide[r].iter().flat_map(|&w| [(1isize, w), (1, -w)]);
            let down = self.wide[r - 1].iter().flat_map(|&w| [(-1isize, w), (-1, -w)]);
            for (dr, dc) in up.chain(down) {
                let r2 = (r as isize + dr) as usize;
                let c2 = c + dc;
                if c2 < 0 || c2 >= cols {
                    continue;
                }
                let len = if r2 == 0 || r2 == n - 1 {
                    (self.rows[r2] - self.rows[r]).abs()
                } else {
                    self.edge(r.min(r2), 1, dc)
                };
                relax(self.vertex(r2, c2 as usize), len, &mut heap);
            }
            for &(dr, dc) in STENCIL.iter() {
                for sign in [1isize, -1] {
                    let (dr, dc) = (dr * sign, dc * sign);
                    let r2 = r as isize + dr;
                    let c2 = c + dc;
                    if r2 < 0 || r2 >= n as isize || c2 < 0 || c2 >= cols {
                        continue;
                    }
                    let r2 = r2 as usize;
                    let len = if r2 == 0 || r2 == n - 1 {
                        // edges into a pole are radial
                        (self.rows[r2] - self.rows[r]).abs()
                    } else {
                        let (lo, step) = if r2 >= r { (r, r2 - r) } else { (r2, r - r2) };
                        self.edge(lo, step, dc)
                    };
                    relax(self.vertex(r2, c2 as usize), len, &mut heap);
                }
            }
        }
        dist
    }

    /// Distance at `(row, α)` by linear interpolation between columns.
    fn read(&self, dist: &[f64], row: usize, alpha: f64) -> f64 {
        if row == 0 || row == self.n_rows() - 1 || self.cols == 1 {
            return dist[self.vertex(row, 0)];
        }
        let t = if self.d_alpha > 0.0 { alpha / self.d_alpha } else { 0.0 };
        let c0 = (math::floor(t) as usize).min(self.cols - 2);
        let w = (t - c0 as f64).clamp(0.0, 1.0);
        (1.0 - w) * dist[self.vertex(row, c0)] + w * dist[self.vertex(row, c0 + 1)]
    }
}

fn check_s(wf: &WarpingFunction, s: f64) -> Result<f64> {
    let l = wf.domain_end();
    if !(s >= -1e-12 * l && s <= l * (1.0 + 1e-12)) {
        return Err(Error::Domain { what: "s", value: s, lo: 0.0, hi: l });
    }
    Ok(s.clamp(0.0, l))
}

/// Distance between `(s_p, α = 0)` and `(s_q, α = Δθ)` on the meshed strip.
pub fn distance_along(m: &RotSymManifold, s_p: f64, s_q: f64, delta_theta: f64, resolution: usize) -> Result<f64> {
    if resolution < 64 {
        return Err(Error::precondition("distance resolution must be at least 64"));
    }
    let wf = m.warping();
    let s_p = check_s(wf, s_p)?;
    let s_q = check_s(wf, s_q)?;
    if !(0.0..=PI + 1e-12).contains(&delta_theta) {
        return Err(Error::Domain { what: "delta_theta", value: delta_theta, lo: 0.0, hi: PI });
    }
    if delta_theta == 0.0 {
        return Ok((s_p - s_q).abs());
    }
    let mesh = Mesh::new(wf, resolution, delta_theta, &[s_p, s_q])?;
    let (rp, rq) = (mesh.row_index(s_p), mesh.row_index(s_q));
    let dist = mesh.dijkstra(rp, 0);
    let d = dist[mesh.vertex(rq, mesh.cols - 1)];
    Ok(d.max((s_p - s_q).abs()))
}

/// Geodesic distance between two points of the manifold.
pub fn geodesic_distance(m: &RotSymManifold, q: &DistanceQuery) -> Result<f64> {
    let dtheta = q.p.angle_to(&q.q).clamp(0.0, PI);
    distance_along(m, q.p.s, q.q.s, dtheta, q.resolution)
}

/// `(analytic, sampled)` diameters. The sampled value is the largest mesh
/// distance among the poles and Fibonacci-sphere points at the quartiles.
pub fn diameter_check(m: &RotSymManifold, resolution: usize) -> Result<(f64, f64)> {
    let l = m.domain_end();
    let mut points = alloc::vec![SurfacePoint::new(0.0, 0.0, 0.0), SurfacePoint::new(l, 0.0, 0.0)];
    let golden = PI * (3.0 - math::sqrt(5.0));
    let per_level = 8;
    for q in 1..=3 {
        let s = l * q as f64 / 4.0;
        for i in 0..per_level {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / per_level as f64;
            points.push(SurfacePoint::new(s, math::acos(z), golden * i as f64));
        }
    }
    let levels: Vec<f64> = points.iter().map(|p| p.s).collect();
    let mesh = Mesh::new(m.warping(), resolution, PI, &levels)?;
    let mut sampled: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        let dist = mesh.dijkstra(mesh.row_index(p.s), 0);
        for q in &points[i + 1..] {
            let d = mesh.read(&dist, mesh.row_index(q.s), p.angle_to(q));
            sampled = sampled.max(d);
        }
    }
    Ok((l, sampled))
}

/// Radical inverse of `i` in `base`: the Halton sequence.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Lemma-style certified bound `(L₁ + L₂ + 8π)/(k − 1)` on the distortion.
pub fn lambda_upper(l1: f64, l2: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::precondition("k must be at least 2"));
    }
    Ok((l1 + l2 + 8.0 * PI) / (k - 1) as f64)
}

const LAMBDA_SOURCES: usize = 16;
const LAMBDA_TARGETS: usize = 32;

/// Sampled distance distortion between two manifolds over `window × S²`.
///
/// Pairs are seedless: sources and targets in `s` follow Halton sequences
/// in bases 2 and 3, the angle in base 5.
pub fn lambda_estimate(
    m1: &RotSymManifold,
    m2: &RotSymManifold,
    window: &IkWindow,
    n_pairs: usize,
    resolution: usize,
) -> Result<LambdaEstimate> {
    if n_pairs < 16 {
        return Err(Error::precondition("lambda estimate needs at least 16 pairs"));
    }
    let (a, b) = (window.a, window.b);
    for m in [m1, m2] {
        if a < 0.0 || b > m.domain_end() || !(a < b) {
            return Err(Error::Domain { what: "window", value: b, lo: 0.0, hi: m.domain_end() });
        }
    }
    let floor = 1.0 / window.k as f64;
    for m in [m1, m2] {
        for s in crate::grid::linspace(a, b, 257) {
            let f = m.warping().value_unchecked(s);
            if f < floor * (1.0 - 1e-9) {
                return Err(Error::precondition("warping function below 1/k inside the window"));
            }
        }
    }
    let analytic_upper = lambda_upper(m1.domain_end(), m2.domain_end(), window.k)?;
    if m1.warping() == m2.warping() {
        return Ok(LambdaEstimate { lower: 0.0, analytic_upper, argmax: None, n_pairs });
    }
    let sources: Vec<f64> = (1..=LAMBDA_SOURCES as u64).map(|i| a + (b - a) * halton(i, 2)).collect();
    let targets: Vec<f64> = (1..=LAMBDA_TARGETS as u64).map(|i| a + (b - a) * halton(i, 3)).collect();
    let mut rows = sources.clone();
    rows.extend_from_slice(&targets);
    let mesh1 = Mesh::new(m1.warping(), resolution, PI, &rows)?;
    let mesh2 = Mesh::new(m2.warping(), resolution, PI, &rows)?;

    let mut best: Option<DistortionSample> = None;
    for (si, &sx) in sources.iter().enumerate() {
        let d1 = mesh1.dijkstra(mesh1.row_index(sx), 0);
        let d2 = mesh2.dijkstra(mesh2.row_index(sx), 0);
        let mut j = si;
        while j < n_pairs {
            let sy = targets[(j / LAMBDA_SOURCES) % LAMBDA_TARGETS];
            let dtheta = PI * halton(j as u64 + 1, 5);
            let x1 = mesh1.read(&d1, mesh1.row_index(sy), dtheta).max((sx - sy).abs());
            let x2 = mesh2.read(&d2, mesh2.row_index(sy), dtheta).max((sx - sy).abs());
            let sample = DistortionSample {
                s_x: sx,
                s_y: sy,
                delta_theta: dtheta,
                d_in_first: x1,
                d_in_second: x2,
                gap: (x1 - x2).abs(),
            };
            if best.is_none_or(|b| sample.gap > b.gap) {
                best = Some(sample);
            }
            j += LAMBDA_SOURCES;
        }
    }
    Ok(LambdaEstimate { lower: best.map_or(0.0, |b| b.gap), analytic_upper, argmax: best, n_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{collapsing_family, round_sphere, scaled_sine};

    fn sphere() -> RotSymManifold {
        RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap()
    }

    #[test]
    fn anisotropy_constant() {
        let a = stencil_anisotropy();
        assert!((a - 0.02337).abs() < 1e-4, "{a}");
    }

    #[test]
    fn pole_to_pole_and_identity() {
        let m = sphere();
        let d = distance_along(&m, 0.0, PI, 1.0, 256).unwrap();
        assert!((d - PI).abs() < 1e-12);
        assert_eq!(distance_along(&m, 1.0, 1.0, 0.0, 256).unwrap(), 0.0);
        let p = SurfacePoint::new(1.2, 0.4, 2.0);
        assert_eq!(geodesic_distance(&m, &DistanceQuery::new(p, p)).unwrap(), 0.0);
    }

    #[test]
    fn equatorial_distance_is_the_angle() {
        let m = sphere();
        let d = distance_along(&m, PI / 2.0, PI / 2.0, 1.0, 512).unwrap();
        assert!((d - 1.0).abs() < 0.01, "{d}");
        // off-equator points: S³ inner product gives cos d = cos s_p cos s_q + sin s_p sin s_q cos Δθ
        let (sp, sq, dt) = (0.7, 2.1, 1.3);
        let exact = math::acos(math::cos(sp) * math::cos(sq) + math::sin(sp) * math::sin(sq) * math::cos(dt));
        let d = distance_along(&m, sp, sq, dt, 512).unwrap();
        assert!((d - exact).abs() < mesh_error_bound(512) * exact, "{d} vs {exact}");
    }

    #[test]
    fn bounds_from_the_length_functional() {
        let m = RotSymManifold::new(collapsing_family(2).unwrap()).unwrap();
        for (sp, sq, dt) in [(0.1, 1.9, 3.0), (0.5, 0.6, 2.0), (1.0, 1.0, PI)] {
            let d = distance_along(&m, sp, sq, dt, 128).unwrap();
            assert!(d >= (sp - sq) - 1e-15 && d >= sq - sp - 1e-15);
            assert!(d <= m.domain_end() + 1e-12);
        }
    }

    #[test]
    fn diameter_of_collapsing_member() {
        let m = RotSymManifold::new(collapsing_family(1).unwrap()).unwrap();
        let (analytic, sampled) = diameter_check(&m, 128).unwrap();
        assert_eq!(analytic, 2.0);
        assert!(sampled <= analytic * (1.0 + mesh_error_bound(128)));
        assert!(sampled >= 2.0 - 1e-12);
    }

    #[test]
    fn lambda_for_identical_and_scaled_spheres() {
        let k = 4;
        let a = math::asin(1.0 / k as f64);
        let w = IkWindow { k, a, b: PI - a };
        let m = sphere();
        let est = lambda_estimate(&m, &m, &w, 64, 128).unwrap();
        assert_eq!(est.lower, 0.0);
        let m2 = RotSymManifold::new(scaled_sine(1.25, 1.0).unwrap()).unwrap();
        let est = lambda_estimate(&m, &m2, &w, 64, 128).unwrap();
        let s = est.argmax.unwrap();
        assert!(est.lower > 0.0);
        assert!(est.lower <= 0.25 * s.d_in_first * (1.0 + 2.0 * mesh_error_bound(128)));
        assert!(est.lower <= est.analytic_upper);
        assert!((lambda_upper(PI, PI, 11).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn window_outside_domain_is_rejected() {
        let m = sphere();
        let w = IkWindow { k: 4, a: 0.3, b: 4.0 };
        assert!(matches!(lambda_estimate(&m, &m, &w, 32, 64), Err(Error::Domain { .. })));
    }
}
