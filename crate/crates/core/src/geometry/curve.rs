//! Closed polylines immersed in a 2-D metric: tangents, unit normals,
//! geodesic curvature, arclength quadrature and uniform resampling.
//!
//! Vertices sample the curve at a uniform auxiliary parameter; derivatives
//! are 4th-order centered differences in that parameter, converted with the
//! metric speed. The normal is the tangent rotated by +90 degrees in the
//! oriented chart, which makes `k > 0` for counterclockwise convex curves in
//! the flat plane and `+k nu` the shrinking direction; flipping both `nu` and
//! `k` together leaves every quadratic quantity unchanged.

use crate::error::GeometryError;
use crate::geometry::metricfield::MetricField;

/// How the curve was constructed; lets flows pick exact reductions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveKind {
    Generic,
    /// Chart circle (center, radius).
    Circle { center: [f64; 2], radius: f64 },
    /// Latitude circle `theta = theta0` on the sphere chart.
    Latitude { theta0: f64 },
}

/// A closed curve at one instant.
#[derive(Clone, Debug)]
pub struct CurveState {
    vertices: Vec<[f64; 2]>,
    pub t: f64,
    pub kind: CurveKind,
    /// Degeneracy threshold: 1e-3 x mean metric edge length at construction.
    pub eps_edge: f64,
}

/// Per-vertex differential data with respect to a metric snapshot.
#[derive(Clone, Debug)]
pub struct CurveGeometry {
    /// Unit tangent (chart components).
    pub tangent: Vec<[f64; 2]>,
    /// Unit normal, `g(nu, nu) = 1`, `g(nu, T) = 0`.
    pub normal: Vec<[f64; 2]>,
    /// Geodesic curvature.
    pub curvature: Vec<f64>,
    /// Arclength element per vertex (speed x parameter step).
    pub ds: Vec<f64>,
}

impl CurveGeometry {
    pub fn length(&self) -> f64 {
        self.ds.iter().sum()
    }
}

#[inline]
fn wrap_diff(d: f64, period: Option<f64>) -> f64 {
    match period {
        Some(l) => {
            let mut v = d.rem_euclid(l);
            if v > l / 2.0 {
                v -= l;
            }
            v
        }
        None => d,
    }
}

#[inline]
fn wrap_point(p: [f64; 2], periods: [Option<f64>; 2]) -> [f64; 2] {
    let mut q = p;
    for a in 0..2 {
        if let Some(l) = periods[a] {
            q[a] = q[a].rem_euclid(l);
        }
    }
    q
}

impl CurveState {
    pub fn new(
        vertices: Vec<[f64; 2]>,
        t: f64,
        kind: CurveKind,
        metric: &MetricField,
    ) -> Result<Self, GeometryError> {
        if vertices.len() < 8 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let mut c = CurveState {
            vertices,
            t,
            kind,
            eps_edge: 0.0,
        };
        let edges = c.edge_lengths(metric);
        let mean = edges.iter().sum::<f64>() / edges.len() as f64;
        c.eps_edge = 1e-3 * mean;
        c.check_edges(metric)?;
        Ok(c)
    }

    /// Counterclockwise chart circle.
    pub fn circle(
        center: [f64; 2],
        radius: f64,
        n: usize,
        t: f64,
        metric: &MetricField,
    ) -> Result<Self, GeometryError> {
        let verts = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        Self::new(verts, t, CurveKind::Circle { center, radius }, metric)
    }

    /// Latitude circle on the sphere chart, traversed in increasing phi.
    pub fn latitude(
        theta0: f64,
        n: usize,
        t: f64,
        metric: &MetricField,
    ) -> Result<Self, GeometryError> {
        let verts = (0..n)
            .map(|i| [theta0, std::f64::consts::TAU * i as f64 / n as f64])
            .collect();
        Self::new(verts, t, CurveKind::Latitude { theta0 }, metric)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Same curve data with a new time stamp / vertices (internal to flows).
    pub fn with_vertices(&self, vertices: Vec<[f64; 2]>, t: f64) -> CurveState {
        CurveState {
            vertices,
            t,
            kind: self.kind,
            eps_edge: self.eps_edge,
        }
    }

    /// Offset of vertex `i + k` relative to vertex `i`, accumulated through
    /// nearest-image steps so periodic seams never tear the stencil.
    fn rel_offset(&self, i: usize, k: isize, periods: [Option<f64>; 2]) -> [f64; 2] {
        let n = self.vertices.len() as isize;
        let mut acc = [0.0, 0.0];
        let step = if k >= 0 { 1 } else { -1 };
        let mut idx = i as isize;
        for _ in 0..k.abs() {
            let next = (idx + step).rem_euclid(n);
            let a = self.vertices[idx.rem_euclid(n) as usize];
            let b = self.vertices[next as usize];
            for ax in 0..2 {
                acc[ax] += step as f64 * wrap_diff((b[ax] - a[ax]) * step as f64, periods[ax]);
            }
            idx = next;
        }
        acc
    }

    /// Metric lengths of the polygon edges.
    pub fn edge_lengths(&self, metric: &MetricField) -> Vec<f64> {
        let periods = metric.periods();
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let d = self.rel_offset(i, 1, periods);
                let mid = wrap_point(
                    [
                        self.vertices[i][0] + 0.5 * d[0],
                        self.vertices[i][1] + 0.5 * d[1],
                    ],
                    periods,
                );
                let g = metric.metric_at(mid);
                (g[0][0] * d[0] * d[0] + 2.0 * g[0][1] * d[0] * d[1] + g[1][1] * d[1] * d[1])
                    .sqrt()
            })
            .collect()
    }

    pub fn total_edge_length(&self, metric: &MetricField) -> f64 {
        self.edge_lengths(metric).iter().sum()
    }

    fn check_edges(&self, metric: &MetricField) -> Result<(), GeometryError> {
        for (e, len) in self.edge_lengths(metric).iter().enumerate() {
            if *len < self.eps_edge {
                return Err(GeometryError::DegenerateCurve {
                    edge: e,
                    len: *len,
                    eps: self.eps_edge,
                });
            }
        }
        Ok(())
    }

    /// Tangent, unit normal, geodesic curvature and arclength element.
    pub fn geometry(&self, metric: &MetricField) -> Result<CurveGeometry, GeometryError> {
        self.check_edges(metric)?;
        let periods = metric.periods();
        let n = self.vertices.len();
        let dsig = 1.0 / n as f64;
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        let mut ds = Vec::with_capacity(n);

        for i in 0..n {
            let p1 = self.rel_offset(i, 1, periods);
            let p2 = self.rel_offset(i, 2, periods);
            let m1 = self.rel_offset(i, -1, periods);
            let m2 = self.rel_offset(i, -2, periods);
            // 4th-order centered first and second derivatives in sigma
            let mut d1 = [0.0, 0.0];
            let mut d2 = [0.0, 0.0];
            for a in 0..2 {
                d1[a] = (-p2[a] + 8.0 * p1[a] - 8.0 * m1[a] + m2[a]) / (12.0 * dsig);
                d2[a] = (-p2[a] + 16.0 * p1[a] + 16.0 * m1[a] - m2[a]) / (12.0 * dsig * dsig);
            }
            let x = self.vertices[i];
            let g = metric.metric_at(x);
            let gam = metric.christoffel_at(x);
            let v2 = g[0][0] * d1[0] * d1[0] + 2.0 * g[0][1] * d1[0] * d1[1] + g[1][1] * d1[1] * d1[1];
            let v = v2.sqrt();
            let tg = [d1[0] / v, d1[1] / v];
            // nu = T rotated by +90 deg: nu^a = (-(gT)_y, (gT)_x) / sqrt(det g)
            let gt = [
                g[0][0] * tg[0] + g[0][1] * tg[1],
                g[1][0] * tg[0] + g[1][1] * tg[1],
            ];
            let sdet = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).sqrt();
            let nu = [-gt[1] / sdet, gt[0] / sdet];
            // acceleration: gamma'' + Gamma(gamma', gamma')
            let mut acc = d2;
            for k in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        acc[k] += gam[k][a][b] * d1[a] * d1[b];
                    }
                }
            }
            let gacc = [
                g[0][0] * acc[0] + g[0][1] * acc[1],
                g[1][0] * acc[0] + g[1][1] * acc[1],
            ];
            let k = (gacc[0] * nu[0] + gacc[1] * nu[1]) / v2;
            tangent.push(tg);
            normal.push(nu);
            curvature.push(k);
            ds.push(v * dsig);
        }

        Ok(CurveGeometry {
            tangent,
            normal,
            curvature,
            ds,
        })
    }

    /// `int_gamma w ds`, one sample per vertex (periodic trapezoid rule).
    pub fn integral(
        &self,
        metric: &MetricField,
        samples: &[f64],
    ) -> Result<f64, GeometryError> {
        assert_eq!(samples.len(), self.vertices.len(), "one sample per vertex");
        let geo = self.geometry(metric)?;
        Ok(samples
            .iter()
            .zip(geo.ds.iter())
            .map(|(w, ds)| w * ds)
            .sum())
    }

    /// Redistribute the same number of vertices uniformly in arclength.
    pub fn resampled_uniform(&self, metric: &MetricField) -> CurveState {
        let periods = metric.periods();
        let n = self.vertices.len();
        // lifted polygon (continuous coordinates, seams unwrapped)
        let mut lifted = Vec::with_capacity(n + 1);
        lifted.push(self.vertices[0]);
        for i in 0..n {
            let d = self.rel_offset(i, 1, periods);
            let last = lifted[i];
            lifted.push([last[0] + d[0], last[1] + d[1]]);
        }
        let edges = self.edge_lengths(metric);
        let total: f64 = edges.iter().sum();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        for e in &edges {
            let last = *cum.last().unwrap();
            cum.push(last + e);
        }
        let mut out = Vec::with_capacity(n);
        let mut seg = 0usize;
        for j in 0..n {
            let target = total * j as f64 / n as f64;
            while seg + 1 < n && cum[seg + 1] < target {
                seg += 1;
            }
            let w = if edges[seg] > 0.0 {
                (target - cum[seg]) / edges[seg]
            } else {
                0.0
            };
            let a = lifted[seg];
            let b = lifted[seg + 1];
            out.push(wrap_point(
                [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])],
                periods,
            ));
        }
        self.with_vertices(out, self.t)
    }

    /// Insert chart midpoints between consecutive vertices (refinement probe).
    pub fn midpoint_refined(&self, metric: &MetricField) -> CurveState {
        let periods = metric.periods();
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            let d = self.rel_offset(i, 1, periods);
            let a = self.vertices[i];
            out.push(a);
            out.push(wrap_point([a[0] + 0.5 * d[0], a[1] + 0.5 * d[1]], periods));
        }
        self.with_vertices(out, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_circle_curvature_and_normal() {
        let m = MetricField::FlatPlane;
        let c = CurveState::circle([0.0, 0.0], 2.0, 128, 0.0, &m).unwrap();
        let geo = c.geometry(&m).unwrap();
        for i in 0..c.len() {
            assert!((geo.curvature[i] - 0.5).abs() < 1e-6, "k = {}", geo.curvature[i]);
            // normal is inward
            let v = c.vertices()[i];
            let dot = geo.normal[i][0] * v[0] + geo.normal[i][1] * v[1];
            assert!(dot < 0.0);
            // unit in the flat metric
            let n2 = geo.normal[i][0].powi(2) + geo.normal[i][1].powi(2);
            assert!((n2 - 1.0).abs() < 1e-10);
            let tn = geo.normal[i][0] * geo.tangent[i][0] + geo.normal[i][1] * geo.tangent[i][1];
            assert!(tn.abs() < 1e-10);
        }
    }

    #[test]
    fn flat_circle_length_high_accuracy() {
        let m = MetricField::FlatPlane;
        let c = CurveState::circle([0.0, 0.0], 1.5, 512, 0.0, &m).unwrap();
        let ones = vec![1.0; c.len()];
        let len = c.integral(&m, &ones).unwrap();
        assert!(
            (len - std::f64::consts::TAU * 1.5).abs() < 1e-6,
            "len = {len}"
        );
    }

    #[test]
    fn curvature_squared_integral_closed_form() {
        // int k^2 ds = 2 pi / r on a flat circle
        let m = MetricField::FlatPlane;
        let r = 0.8;
        let c = CurveState::circle([0.0, 0.0], r, 512, 0.0, &m).unwrap();
        let geo = c.geometry(&m).unwrap();
        let k2: Vec<f64> = geo.curvature.iter().map(|k| k * k).collect();
        let v = c.integral(&m, &k2).unwrap();
        assert!((v - std::f64::consts::TAU / r).abs() < 1e-5);
    }

    #[test]
    fn latitude_circle_on_sphere() {
        let rho: f64 = 1.7;
        let m = MetricField::Sphere { rho2: rho * rho };
        let theta0 = std::f64::consts::FRAC_PI_4;
        let c = CurveState::latitude(theta0, 256, 0.0, &m).unwrap();
        let geo = c.geometry(&m).unwrap();
        let k_expect = 1.0 / theta0.tan() / rho;
        for i in 0..c.len() {
            assert!(
                (geo.curvature[i] - k_expect).abs() < 1e-9,
                "k = {} vs {}",
                geo.curvature[i],
                k_expect
            );
            // normal points toward the pole (decreasing theta), unit in g
            assert!(geo.normal[i][0] < 0.0);
            assert!((geo.normal[i][0].powi(2) * rho * rho - 1.0).abs() < 1e-9);
        }
        // length = 2 pi rho sin theta0
        let ones = vec![1.0; c.len()];
        let len = c.integral(&m, &ones).unwrap();
        assert!((len - std::f64::consts::TAU * rho * theta0.sin()).abs() < 1e-6);
    }

    #[test]
    fn great_circle_is_geodesic() {
        let m = MetricField::Sphere { rho2: 2.0 };
        let c = CurveState::latitude(std::f64::consts::FRAC_PI_2, 128, 0.0, &m).unwrap();
        let geo = c.geometry(&m).unwrap();
        for k in &geo.curvature {
            assert!(k.abs() < 1e-10);
        }
    }

    #[test]
    fn integral_invariant_under_midpoint_doubling() {
        let m = MetricField::FlatPlane;
        let c = CurveState::circle([0.3, -0.1], 1.0, 128, 0.0, &m).unwrap();
        let v1 = c.integral(&m, &vec![1.0; c.len()]).unwrap();
        let c2 = c.midpoint_refined(&m);
        let v2 = c2.integral(&m, &vec![1.0; c2.len()]).unwrap();
        // second-order agreement under refinement
        assert!((v1 - v2).abs() < 1e-3 * v1);
    }

    #[test]
    fn resampling_preserves_circle() {
        let m = MetricField::FlatPlane;
        let c = CurveState::circle([0.0, 0.0], 1.0, 64, 0.0, &m).unwrap();
        let r = c.resampled_uniform(&m);
        for (a, b) in c.vertices().iter().zip(r.vertices()) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_curve_detected() {
        let m = MetricField::FlatPlane;
        let mut verts: Vec<[f64; 2]> = (0..32)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 32.0;
                [a.cos(), a.sin()]
            })
            .collect();
        verts[5] = verts[4]; // coincident adjacent vertices
        let e = CurveState::new(verts, 0.0, CurveKind::Generic, &m);
        assert!(matches!(e, Err(GeometryError::DegenerateCurve { .. })));
    }

    #[test]
    fn torus_curve_crossing_the_seam() {
        let m = MetricField::FlatTorus {
            lx: std::f64::consts::TAU,
            ly: std::f64::consts::TAU,
        };
        // circle centered at the chart origin wraps all four corners
        let c = CurveState::circle([0.0, 0.0], 1.0, 256, 0.0, &m).unwrap();
        let wrapped: Vec<[f64; 2]> = c
            .vertices()
            .iter()
            .map(|v| wrap_point(*v, m.periods()))
            .collect();
        let cw = CurveState::new(wrapped, 0.0, CurveKind::Generic, &m).unwrap();
        let geo = cw.geometry(&m).unwrap();
        for k in &geo.curvature {
            assert!((k - 1.0).abs() < 1e-6);
        }
    }
}
