//! Planar and spatial primitives: naturally parametrized polyline curves,
//! convex hulls, convex polygons and the curve generators used by the
//! diagnostics (circles, sphere sections).
//!
//! Curves are polylines; smooth-curve statements are realized by refinement
//! sequences, since all variation and turn quantities downstream are suprema
//! over finite partitions and polylines compute those directly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for geometric coincidence on unit-scale domains.
pub const COINCIDENCE_TOL: f64 = 1e-12;

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("consecutive points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("points have inconsistent dimensions")]
    MixedDimensions,
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("plane with offset {0} does not intersect the unit sphere")]
    NoIntersection(f64),
    #[error("curve is not a convex boundary traversed once")]
    NotConvexBoundary,
    #[error("projection onto coordinate plane ({0},{1}) is not a convex boundary")]
    NotCoordConvex(usize, usize),
}

// ---------------------------------------------------------------------------
// small vector helpers
// ---------------------------------------------------------------------------

#[inline]
pub fn dot2(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn sub2(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add2(a: Point2, b: Point2) -> Point2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale2(a: Point2, s: f64) -> Point2 {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn norm2(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

/// Counterclockwise quarter turn.
#[inline]
pub fn perp2(a: Point2) -> Point2 {
    [-a[1], a[0]]
}

/// z-component of the cross product of two planar vectors.
#[inline]
pub fn cross2(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

/// Membership tag for the curve classes used by the diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveClass {
    /// Origin-centered circle (possibly scaled).
    Circle,
    /// Boundary of a convex compact set in the plane, traversed once.
    ConvexBoundary,
    /// Intersection of a plane with the unit sphere.
    SphereSection,
    /// Closed curve whose projection onto every coordinate plane bounds a
    /// convex compact set (possibly degenerate).
    CoordConvex,
    /// No class claimed.
    Free,
}

/// Naturally parametrized polyline in ℝⁿ.
///
/// `cum_len[i]` is the arc length from the first point to point `i`; the last
/// entry is the total length. Closed curves store the closing point
/// explicitly, so the first and last points coincide.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Curve {
    dim: usize,
    points: Vec<f64>,
    cum_len: Vec<f64>,
    closed: bool,
    class: CurveClass,
}

impl Curve {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.cum_len.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cum_len(&self) -> &[f64] {
        &self.cum_len
    }

    pub fn total_length(&self) -> f64 {
        *self.cum_len.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn class(&self) -> CurveClass {
        self.class
    }

    /// Point at arc length `s`, clamped to `[0, T]`, written into `out`.
    pub fn sample_into(&self, s: f64, out: &mut [f64]) {
        let t = s.clamp(0.0, self.total_length());
        // cum_len is strictly increasing, so partition_point gives the first
        // index with cum_len > t.
        let hi = self.cum_len.partition_point(|&c| c <= t);
        if hi == 0 {
            out.copy_from_slice(self.point(0));
            return;
        }
        if hi == self.cum_len.len() {
            out.copy_from_slice(self.point(hi - 1));
            return;
        }
        let (lo, hi) = (hi - 1, hi);
        let seg = self.cum_len[hi] - self.cum_len[lo];
        let w = (t - self.cum_len[lo]) / seg;
        let a = self.point(lo);
        let b = self.point(hi);
        for k in 0..self.dim {
            out[k] = a[k] + w * (b[k] - a[k]);
        }
    }

    pub fn sample(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(s, &mut out);
        out
    }

    /// Claim a curve class, validating the corresponding invariant.
    pub fn with_class(mut self, class: CurveClass) -> Result<Curve, GeometryError> {
        match class {
            CurveClass::ConvexBoundary => {
                if self.dim != 2 || !self.closed || !is_convex_cycle(&self.points2()) {
                    return Err(GeometryError::NotConvexBoundary);
                }
            }
            CurveClass::CoordConvex => {
                if !self.closed {
                    return Err(GeometryError::NotConvexBoundary);
                }
                for i in 0..self.dim {
                    for j in (i + 1)..self.dim {
                        let proj: Vec<Point2> = (0..self.n_points())
                            .map(|k| [self.point(k)[i], self.point(k)[j]])
                            .collect();
                        if !is_convex_cycle_or_degenerate(&proj) {
                            return Err(GeometryError::NotCoordConvex(i, j));
                        }
                    }
                }
            }
            _ => {}
        }
        self.class = class;
        Ok(self)
    }

    fn points2(&self) -> Vec<Point2> {
        assert_eq!(self.dim, 2);
        (0..self.n_points())
            .map(|k| [self.point(k)[0], self.point(k)[1]])
            .collect()
    }
}

/// Build a [`Curve`] with exact cumulative chord lengths.
///
/// For closed curves the first point is appended at the end when the input
/// does not already close up, so `cum_len` includes the closing edge.
pub fn natural_parametrize<P: AsRef<[f64]>>(
    points: &[P],
    closed: bool,
) -> Result<Curve, GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let dim = points[0].as_ref().len();
    if dim == 0 || points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(GeometryError::MixedDimensions);
    }

    let mut flat: Vec<f64> = Vec::with_capacity((points.len() + 1) * dim);
    for p in points {
        flat.extend_from_slice(p.as_ref());
    }
    let n = points.len();
    let first = points[0].as_ref();
    let last = points[n - 1].as_ref();
    let mut n_total = n;
    if closed && dist(first, last) > COINCIDENCE_TOL {
        flat.extend_from_slice(first);
        n_total += 1;
    }

    let mut cum = Vec::with_capacity(n_total);
    cum.push(0.0);
    for i in 1..n_total {
        let a = &flat[(i - 1) * dim..i * dim];
        let b = &flat[i * dim..(i + 1) * dim];
        let step = dist(a, b);
        if step <= COINCIDENCE_TOL {
            return Err(GeometryError::DuplicatePoints(i - 1, i));
        }
        cum.push(cum[i - 1] + step);
    }

    Ok(Curve {
        dim,
        points: flat,
        cum_len: cum,
        closed,
        class: CurveClass::Free,
    })
}

/// Uniformly sampled circle of given radius around the origin.
pub fn circle_curve(radius: f64, samples: usize) -> Result<Curve, GeometryError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::BadRadius(radius));
    }
    if samples < 3 {
        return Err(GeometryError::TooFewPoints {
            needed: 3,
            got: samples,
        });
    }
    let pts: Vec<Point2> = (0..samples)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect();
    let curve = natural_parametrize(&pts, true)?;
    Ok(Curve {
        class: CurveClass::Circle,
        ..curve
    })
}

/// Circle cut out of the unit sphere by the plane `(x, normal) = offset`.
pub fn sphere_section_curve(
    normal: Point3,
    offset: f64,
    samples: usize,
) -> Result<Curve, GeometryError> {
    if offset.abs() >= 1.0 {
        return Err(GeometryError::NoIntersection(offset));
    }
    if samples < 3 {
        return Err(GeometryError::TooFewPoints {
            needed: 3,
            got: samples,
        });
    }
    let nn = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
    if nn <= COINCIDENCE_TOL {
        return Err(GeometryError::BadRadius(0.0));
    }
    let n = [normal[0] / nn, normal[1] / nn, normal[2] / nn];
    // pick the coordinate axis least aligned with n to build a stable frame
    let k = (0..3)
        .min_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).unwrap())
        .unwrap();
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let mut u = [
        e[1] * n[2] - e[2] * n[1],
        e[2] * n[0] - e[0] * n[2],
        e[0] * n[1] - e[1] * n[0],
    ];
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u = [u[0] / un, u[1] / un, u[2] / un];
    let v = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];

    let rho = (1.0 - offset * offset).sqrt();
    let pts: Vec<Point3> = (0..samples)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            let (c, s) = (t.cos(), t.sin());
            [
                offset * n[0] + rho * (c * u[0] + s * v[0]),
                offset * n[1] + rho * (c * u[1] + s * v[1]),
                offset * n[2] + rho * (c * u[2] + s * v[2]),
            ]
        })
        .collect();
    let curve = natural_parametrize(&pts, true)?;
    Ok(Curve {
        class: CurveClass::SphereSection,
        ..curve
    })
}

fn is_convex_cycle(pts: &[Point2]) -> bool {
    // pts includes the closing duplicate; drop it for the cross-product scan
    let n = pts.len().saturating_sub(1);
    if n < 3 {
        return false;
    }
    let mut sign = 0.0f64;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let c = pts[(i + 2) % n];
        let cr = cross2(sub2(b, a), sub2(c, b));
        if cr.abs() <= COINCIDENCE_TOL {
            continue;
        }
        if sign == 0.0 {
            sign = cr.signum();
        } else if cr.signum() != sign {
            return false;
        }
    }
    sign != 0.0
}

fn is_convex_cycle_or_degenerate(pts: &[Point2]) -> bool {
    let n = pts.len().saturating_sub(1);
    if n < 3 {
        return true;
    }
    let mut sign = 0.0f64;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let c = pts[(i + 2) % n];
        let cr = cross2(sub2(b, a), sub2(c, b));
        // scale-relative tolerance: projections may collapse to segments
        let scale = norm2(sub2(b, a)) * norm2(sub2(c, b));
        if cr.abs() <= 1e-9 * (1.0 + scale) {
            continue;
        }
        if sign == 0.0 {
            sign = cr.signum();
        } else if cr.signum() != sign {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// convex polygons
// ---------------------------------------------------------------------------

/// Convex polygon with counterclockwise vertices.
///
/// Degenerate hulls are allowed: a segment keeps its two endpoints and a
/// single point keeps one vertex. The perimeter is the closed traversal
/// length, so a segment has perimeter 2×length and a point 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        if n < 2 {
            return 0.0;
        }
        (0..n)
            .map(|i| norm2(sub2(self.vertices[(i + 1) % n], self.vertices[i])))
            .sum()
    }

    /// Support function value `max_v (v, d)`.
    pub fn support(&self, d: Point2) -> f64 {
        self.vertices
            .iter()
            .map(|&v| dot2(v, d))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertex average; coincides with the centroid for regular shapes and is
    /// well defined for degenerate hulls.
    pub fn vertex_mean(&self) -> Point2 {
        let n = self.vertices.len().max(1) as f64;
        let mut m = [0.0, 0.0];
        for v in &self.vertices {
            m = add2(m, *v);
        }
        scale2(m, 1.0 / n)
    }

    /// Area centroid (falls back to the vertex mean for degenerate hulls).
    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        if n < 3 {
            return self.vertex_mean();
        }
        let mut area2 = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let w = cross2(a, b);
            area2 += w;
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        if area2.abs() <= COINCIDENCE_TOL {
            return self.vertex_mean();
        }
        [cx / (3.0 * area2), cy / (3.0 * area2)]
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut area2 = 0.0;
        for i in 0..n {
            area2 += cross2(self.vertices[i], self.vertices[(i + 1) % n]);
        }
        area2.abs() / 2.0
    }

    /// True when `p` lies inside or on the boundary within `tol`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let n = self.vertices.len();
        match n {
            0 => false,
            1 => norm2(sub2(p, self.vertices[0])) <= tol,
            2 => {
                let a = self.vertices[0];
                let b = self.vertices[1];
                let ab = sub2(b, a);
                let len = norm2(ab);
                let t = (dot2(sub2(p, a), ab) / (len * len)).clamp(0.0, 1.0);
                norm2(sub2(p, add2(a, scale2(ab, t)))) <= tol
            }
            _ => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                cross2(sub2(b, a), sub2(p, a)) >= -tol
            }),
        }
    }

    /// Distance from an interior point to the boundary (0 outside).
    pub fn interior_distance(&self, p: Point2) -> f64 {
        let n = self.vertices.len();
        if n < 3 || !self.contains(p, COINCIDENCE_TOL) {
            return 0.0;
        }
        let mut d = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = sub2(b, a);
            let len = norm2(e);
            d = d.min(cross2(e, sub2(p, a)).abs() / len);
        }
        d
    }

    pub fn is_convex_ccw(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return n > 0;
        }
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            cross2(sub2(b, a), sub2(c, b)) >= -COINCIDENCE_TOL
        })
    }
}

/// Convex hull of a planar point set (monotone chain).
///
/// Collinear inputs yield a segment, a single distinct point yields one
/// vertex. Interior and duplicate points are dropped.
pub fn convex_hull_2d(points: &[Point2]) -> Polygon {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| norm2(sub2(*a, *b)) <= COINCIDENCE_TOL);
    let n = pts.len();
    if n <= 2 {
        return Polygon { vertices: pts };
    }

    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let a = lower[lower.len() - 2];
            let b = lower[lower.len() - 1];
            if cross2(sub2(b, a), sub2(p, a)) <= COINCIDENCE_TOL {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let a = upper[upper.len() - 2];
            let b = upper[upper.len() - 1];
            if cross2(sub2(b, a), sub2(p, a)) <= COINCIDENCE_TOL {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 2 {
        // all points collinear-degenerate after pruning
        return Polygon {
            vertices: vec![pts[0], pts[n - 1]],
        };
    }
    Polygon { vertices: lower }
}
