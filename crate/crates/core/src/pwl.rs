//! Piecewise-linear function representations.
//!
//! Two concrete forms are supported: [`TriangulatedPwl`], a PWL function on a
//! conforming triangulation of a convex planar region, and [`SectorFan`], a
//! positively homogeneous degree-1 PWL function on a fan of angular sectors
//! around the origin. Both expose cell gradients, dihedral-edge enumeration
//! with convex/concave/flat classification, and Lipschitz constants.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    add2, convex_hull_2d, cross2, dot2, norm2, perp2, scale2, sub2, Point2, Polygon,
};

/// Relative tolerance for interpolation consistency checks.
pub const EVAL_CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum PwlError {
    #[error("fan needs at least 3 rays, got {0}")]
    TooFewRays(usize),
    #[error("fan angles must be strictly increasing within one turn")]
    BadAngles,
    #[error("sector {0} spans an angle >= pi")]
    SectorTooWide(usize),
    #[error("sector {0} is numerically singular (nearly parallel rays)")]
    SingularSector(usize),
    #[error("ray/value count mismatch: {rays} rays, {values} values")]
    CountMismatch { rays: usize, values: usize },
    #[error("triangulation is not conforming: {0}")]
    NonConforming(String),
    #[error("triangle {0} is degenerate (area {1:.3e})")]
    DegenerateTriangle(usize, f64),
    #[error("point ({0}, {1}) is outside the domain")]
    OutOfDomain(f64, f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("file format error: {0}")]
    Format(#[from] serde_json::Error),
}

// ---------------------------------------------------------------------------
// dihedral edges
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Convex,
    Concave,
    Flat,
}

/// One interior kink of a PWL function: the gradients of the two adjacent
/// cells, their jump, and an anchor/direction for the edge line.
///
/// `jump = grad_right − grad_left` where "right" is the cell the in-plane
/// normal `n = perp(edge_dir)` points into. The jump is perpendicular to
/// `edge_dir` because both linear pieces agree along the edge, and the
/// classification reads the sign of `(jump, n)`; flipping the direction
/// convention flips both `jump` and `n`, so the kind is well defined.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DihedralEdge {
    pub kind: EdgeKind,
    pub grad_left: Point2,
    pub grad_right: Point2,
    pub jump: Point2,
    pub anchor: Point2,
    pub edge_dir: Point2,
    pub jump_norm: f64,
    /// Indices of the (left, right) cells in the owning representation.
    pub cells: [usize; 2],
}

// convex iff (jump, n) > eps with eps relative to the gradient magnitude;
// flat edges are excluded from both convex and concave sums
pub(crate) fn classify_jump(signed_jump: f64, grad_scale: f64) -> EdgeKind {
    let eps = 1e-9 * (1.0 + grad_scale);
    if signed_jump > eps {
        EdgeKind::Convex
    } else if signed_jump < -eps {
        EdgeKind::Concave
    } else {
        EdgeKind::Flat
    }
}

fn make_edge(
    grad_left: Point2,
    grad_right: Point2,
    anchor: Point2,
    edge_dir: Point2,
    cells: [usize; 2],
) -> DihedralEdge {
    let jump = sub2(grad_right, grad_left);
    let n = perp2(edge_dir);
    let scale = norm2(grad_left).max(norm2(grad_right));
    DihedralEdge {
        kind: classify_jump(dot2(jump, n), scale),
        grad_left,
        grad_right,
        jump,
        anchor,
        edge_dir,
        jump_norm: norm2(jump),
        cells,
    }
}

// ---------------------------------------------------------------------------
// sector fans
// ---------------------------------------------------------------------------

/// Positively homogeneous degree-1 PWL function on a fan of `m` sectors.
///
/// `angles` are the ray directions, strictly increasing within one turn;
/// sector `i` spans `[angles[i], angles[i+1])` (the last wraps). The value on
/// ray `i` at unit radius is `ray_values[i]`, and each sector carries the
/// gradient of its linear piece, solved from the two ray conditions
/// `(g, r(t_i)) = v_i`, `(g, r(t_{i+1})) = v_{i+1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectorFan {
    angles: Vec<f64>,
    ray_values: Vec<f64>,
    sector_gradients: Vec<Point2>,
}

/// Unit direction of angle `t`.
#[inline]
pub fn ray_dir(t: f64) -> Point2 {
    [t.cos(), t.sin()]
}

impl SectorFan {
    /// Build a fan from ray angles and ray values (the sector gradients are
    /// solved from the 2×2 ray system).
    pub fn from_samples(angles: Vec<f64>, values: Vec<f64>) -> Result<SectorFan, PwlError> {
        let m = angles.len();
        if m < 3 {
            return Err(PwlError::TooFewRays(m));
        }
        if values.len() != m {
            return Err(PwlError::CountMismatch {
                rays: m,
                values: values.len(),
            });
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        for i in 1..m {
            if !(angles[i] > angles[i - 1]) {
                return Err(PwlError::BadAngles);
            }
        }
        if !(angles[m - 1] - angles[0] < two_pi) {
            return Err(PwlError::BadAngles);
        }

        let mut gradients = Vec::with_capacity(m);
        for i in 0..m {
            let t0 = angles[i];
            let t1 = if i + 1 < m {
                angles[i + 1]
            } else {
                angles[0] + two_pi
            };
            let width = t1 - t0;
            if width >= std::f64::consts::PI {
                return Err(PwlError::SectorTooWide(i));
            }
            let g = solve_sector(t0, t1, values[i], values[(i + 1) % m])
                .ok_or(PwlError::SingularSector(i))?;
            gradients.push(g);
        }
        Ok(SectorFan {
            angles,
            ray_values: values,
            sector_gradients: gradients,
        })
    }

    /// Build a fan from a known gradient walk. The values and gradients must
    /// already be consistent: `(g_i, r(t_i)) = v_i = (g_{i-1}, r(t_i))`.
    pub(crate) fn from_gradient_walk(
        angles: Vec<f64>,
        ray_values: Vec<f64>,
        sector_gradients: Vec<Point2>,
    ) -> SectorFan {
        debug_assert_eq!(angles.len(), ray_values.len());
        debug_assert_eq!(angles.len(), sector_gradients.len());
        #[cfg(debug_assertions)]
        for i in 0..angles.len() {
            let r = ray_dir(angles[i]);
            let scale = 1.0 + ray_values[i].abs();
            debug_assert!((dot2(sector_gradients[i], r) - ray_values[i]).abs() < 1e-8 * scale);
        }
        SectorFan {
            angles,
            ray_values,
            sector_gradients,
        }
    }

    pub fn n_sectors(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn ray_values(&self) -> &[f64] {
        &self.ray_values
    }

    pub fn gradients(&self) -> &[Point2] {
        &self.sector_gradients
    }

    /// Index of the sector containing angle `t`.
    pub fn sector_of(&self, t: f64) -> usize {
        let two_pi = 2.0 * std::f64::consts::PI;
        let m = self.angles.len();
        let mut a = (t - self.angles[0]).rem_euclid(two_pi) + self.angles[0];
        if a >= self.angles[0] + two_pi {
            a -= two_pi;
        }
        // first ray strictly greater than a, minus one
        let hi = self.angles.partition_point(|&x| x <= a);
        if hi == 0 {
            m - 1
        } else {
            hi - 1
        }
    }

    /// Evaluate at an arbitrary point (positively homogeneous, exact).
    pub fn evaluate(&self, x: Point2) -> f64 {
        let r = norm2(x);
        if r == 0.0 {
            return 0.0;
        }
        let s = self.sector_of(x[1].atan2(x[0]));
        dot2(self.sector_gradients[s], x)
    }

    /// Value at the unit-circle point of angle `t`.
    pub fn circle_value(&self, t: f64) -> f64 {
        dot2(self.sector_gradients[self.sector_of(t)], ray_dir(t))
    }

    /// One dihedral edge per ray. Ray `i` separates sector `i-1` (left, lower
    /// angle) from sector `i` (right); the anchor is the origin.
    pub fn edges(&self) -> Vec<DihedralEdge> {
        let m = self.angles.len();
        (0..m)
            .map(|i| {
                let left = (i + m - 1) % m;
                make_edge(
                    self.sector_gradients[left],
                    self.sector_gradients[i],
                    [0.0, 0.0],
                    ray_dir(self.angles[i]),
                    [left, i],
                )
            })
            .collect()
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.sector_gradients
            .iter()
            .map(|&g| norm2(g))
            .fold(0.0, f64::max)
    }

    pub fn to_file(&self, path: &Path) -> Result<(), PwlError> {
        let file = FanFile {
            angles: self.angles.clone(),
            values: self.ray_values.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    /// Load a fan file and re-validate all invariants.
    pub fn from_file(path: &Path) -> Result<SectorFan, PwlError> {
        let file: FanFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        SectorFan::from_samples(file.angles, file.values)
    }
}

fn solve_sector(t0: f64, t1: f64, v0: f64, v1: f64) -> Option<Point2> {
    let r0 = ray_dir(t0);
    let r1 = ray_dir(t1);
    let det = cross2(r0, r1); // = sin(t1 - t0)
    if det.abs() < 1e-12 {
        return None;
    }
    Some([
        (v0 * r1[1] - v1 * r0[1]) / det,
        (v1 * r0[0] - v0 * r1[0]) / det,
    ])
}

/// Fan file format: `{"angles": [...], "values": [...]}`.
#[derive(Serialize, Deserialize)]
pub struct FanFile {
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
}

// ---------------------------------------------------------------------------
// triangulated PWL functions
// ---------------------------------------------------------------------------

/// PWL function on a conforming triangulation of a convex planar region.
#[derive(Clone, Debug)]
pub struct TriangulatedPwl {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    values: Vec<f64>,
    gradients: Vec<Point2>,
    domain_hull: Polygon,
    // interior edges as (vertex pair, [left cell, right cell])
    interior_edges: Vec<([usize; 2], [usize; 2])>,
    locator: CellLocator,
}

impl TriangulatedPwl {
    /// Build from vertices, triangles and per-vertex values, validating
    /// conformity and computing per-cell gradients.
    pub fn new(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        values: Vec<f64>,
    ) -> Result<TriangulatedPwl, PwlError> {
        if values.len() != vertices.len() {
            return Err(PwlError::CountMismatch {
                rays: vertices.len(),
                values: values.len(),
            });
        }
        if triangles.is_empty() {
            return Err(PwlError::NonConforming("no triangles".into()));
        }
        let bbox_scale = bbox_diag(&vertices).max(1.0);
        let area_eps = 1e-12 * bbox_scale * bbox_scale;

        // orient all triangles counterclockwise
        let mut triangles = triangles;
        for (idx, t) in triangles.iter_mut().enumerate() {
            for &v in t.iter() {
                if v >= vertices.len() {
                    return Err(PwlError::NonConforming(format!(
                        "triangle {idx} references missing vertex {v}"
                    )));
                }
            }
            let area2 = cross2(
                sub2(vertices[t[1]], vertices[t[0]]),
                sub2(vertices[t[2]], vertices[t[0]]),
            );
            if area2.abs() < 2.0 * area_eps {
                return Err(PwlError::DegenerateTriangle(idx, area2.abs() / 2.0));
            }
            if area2 < 0.0 {
                t.swap(1, 2);
            }
        }

        // each undirected edge must appear in at most two triangles
        let mut edge_cells: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
        for (idx, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                let key = [a.min(b), a.max(b)];
                edge_cells.entry(key).or_default().push(idx);
            }
        }
        let mut interior_edges = Vec::new();
        for (key, cells) in &edge_cells {
            match cells.len() {
                1 => {}
                2 => interior_edges.push((*key, [cells[0], cells[1]])),
                n => {
                    return Err(PwlError::NonConforming(format!(
                        "edge ({}, {}) is shared by {n} triangles",
                        key[0], key[1]
                    )))
                }
            }
        }
        // deterministic edge order
        interior_edges.sort_by_key(|(k, _)| *k);

        let gradients = triangles
            .iter()
            .map(|t| triangle_gradient(&vertices, t, &values))
            .collect::<Vec<_>>();

        // assign left/right by the centroid side of the directed edge
        let mut oriented = Vec::with_capacity(interior_edges.len());
        for &(key, cells) in &interior_edges {
            let dir = sub2(vertices[key[1]], vertices[key[0]]);
            let n = perp2(dir);
            let c0 = triangle_centroid(&vertices, &triangles[cells[0]]);
            let side0 = dot2(sub2(c0, vertices[key[0]]), n);
            let (left, right) = if side0 > 0.0 {
                (cells[1], cells[0])
            } else {
                (cells[0], cells[1])
            };
            oriented.push((key, [left, right]));
        }

        let domain_hull = convex_hull_2d(&vertices);
        let locator = CellLocator::build(&vertices, &triangles);
        Ok(TriangulatedPwl {
            vertices,
            triangles,
            values,
            gradients,
            domain_hull,
            interior_edges: oriented,
            locator,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradients(&self) -> &[Point2] {
        &self.gradients
    }

    pub fn domain_hull(&self) -> &Polygon {
        &self.domain_hull
    }

    /// Locate the containing cell (ties broken by lowest cell index).
    pub fn locate(&self, x: Point2) -> Option<usize> {
        self.locator.locate(&self.vertices, &self.triangles, x)
    }

    /// Evaluate the PWL interpolant. On shared edges adjacent cells agree
    /// within [`EVAL_CONSISTENCY_TOL`]; this is asserted in debug builds.
    pub fn evaluate(&self, x: Point2) -> Result<f64, PwlError> {
        let cell = self.locate(x).ok_or(PwlError::OutOfDomain(x[0], x[1]))?;
        let v = self.cell_value(cell, x);
        #[cfg(debug_assertions)]
        {
            let bc = barycentric(&self.vertices, &self.triangles[cell], x);
            if bc.iter().any(|&w| w.abs() < 1e-12) {
                for &(_, cells) in &self.interior_edges {
                    for &c in &cells {
                        if c != cell
                            && barycentric(&self.vertices, &self.triangles[c], x)
                                .iter()
                                .all(|&w| w >= -1e-9)
                        {
                            let other = self.cell_value(c, x);
                            let scale = 1.0 + v.abs();
                            debug_assert!(
                                (other - v).abs() <= EVAL_CONSISTENCY_TOL * scale,
                                "edge evaluation mismatch: {v} vs {other}"
                            );
                        }
                    }
                }
            }
        }
        Ok(v)
    }

    fn cell_value(&self, cell: usize, x: Point2) -> f64 {
        let t = self.triangles[cell];
        let g = self.gradients[cell];
        let p0 = self.vertices[t[0]];
        self.values[t[0]] + dot2(g, sub2(x, p0))
    }

    /// One dihedral edge per interior edge, anchored at the edge midpoint.
    pub fn edges(&self) -> Vec<DihedralEdge> {
        self.interior_edges
            .iter()
            .map(|&(key, [left, right])| {
                let a = self.vertices[key[0]];
                let b = self.vertices[key[1]];
                let dir = sub2(b, a);
                let len = norm2(dir);
                make_edge(
                    self.gradients[left],
                    self.gradients[right],
                    scale2(add2(a, b), 0.5),
                    scale2(dir, 1.0 / len),
                    [left, right],
                )
            })
            .collect()
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.gradients.iter().map(|&g| norm2(g)).fold(0.0, f64::max)
    }

    pub fn to_file(&self, path: &Path) -> Result<(), PwlError> {
        let file = MeshFile {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            values: self.values.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    /// Load a mesh file and re-validate all invariants.
    pub fn from_file(path: &Path) -> Result<TriangulatedPwl, PwlError> {
        let file: MeshFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        TriangulatedPwl::new(file.vertices, file.triangles, file.values)
    }
}

/// Mesh file format:
/// `{"vertices": [[x,y],...], "triangles": [[i,j,k],...], "values": [v,...]}`.
#[derive(Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    pub values: Vec<f64>,
}

fn bbox_diag(vertices: &[Point2]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in vertices {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    norm2(sub2(hi, lo))
}

/// Gradient of the linear interpolant of the three vertex values.
pub fn triangle_gradient(vertices: &[Point2], t: &[usize; 3], values: &[f64]) -> Point2 {
    let p0 = vertices[t[0]];
    let p1 = vertices[t[1]];
    let p2 = vertices[t[2]];
    let d1 = sub2(p1, p0);
    let d2 = sub2(p2, p0);
    let dv1 = values[t[1]] - values[t[0]];
    let dv2 = values[t[2]] - values[t[0]];
    let det = cross2(d1, d2);
    [
        (dv1 * d2[1] - dv2 * d1[1]) / det,
        (dv2 * d1[0] - dv1 * d2[0]) / det,
    ]
}

fn triangle_centroid(vertices: &[Point2], t: &[usize; 3]) -> Point2 {
    scale2(
        add2(add2(vertices[t[0]], vertices[t[1]]), vertices[t[2]]),
        1.0 / 3.0,
    )
}

pub(crate) fn barycentric(vertices: &[Point2], t: &[usize; 3], x: Point2) -> [f64; 3] {
    let p0 = vertices[t[0]];
    let p1 = vertices[t[1]];
    let p2 = vertices[t[2]];
    let area2 = cross2(sub2(p1, p0), sub2(p2, p0));
    [
        cross2(sub2(p2, p1), sub2(x, p1)) / area2,
        cross2(sub2(p0, p2), sub2(x, p2)) / area2,
        cross2(sub2(p1, p0), sub2(x, p0)) / area2,
    ]
}

// uniform-grid point locator; scan order inside a bucket is ascending cell
// index so ties resolve to the lowest index
#[derive(Clone, Debug)]
struct CellLocator {
    lo: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl CellLocator {
    fn build(vertices: &[Point2], triangles: &[[usize; 3]]) -> CellLocator {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let n = (triangles.len() as f64).sqrt().ceil().max(1.0) as usize;
        let (nx, ny) = (n, n);
        let wx = (hi[0] - lo[0]).max(1e-12);
        let wy = (hi[1] - lo[1]).max(1e-12);
        let cell = (wx / nx as f64).max(wy / ny as f64);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (idx, t) in triangles.iter().enumerate() {
            let xs = [vertices[t[0]][0], vertices[t[1]][0], vertices[t[2]][0]];
            let ys = [vertices[t[0]][1], vertices[t[1]][1], vertices[t[2]][1]];
            let x0 = (((xs.iter().cloned().fold(f64::INFINITY, f64::min) - lo[0]) / cell) as usize)
                .min(nx - 1);
            let x1 = (((xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - lo[0]) / cell)
                as usize)
                .min(nx - 1);
            let y0 = (((ys.iter().cloned().fold(f64::INFINITY, f64::min) - lo[1]) / cell) as usize)
                .min(ny - 1);
            let y1 = (((ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - lo[1]) / cell)
                as usize)
                .min(ny - 1);
            for gx in x0..=x1 {
                for gy in y0..=y1 {
                    buckets[gy * nx + gx].push(idx as u32);
                }
            }
        }
        for b in &mut buckets {
            b.sort_unstable();
        }
        CellLocator {
            lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn locate(&self, vertices: &[Point2], triangles: &[[usize; 3]], x: Point2) -> Option<usize> {
        let gx = ((x[0] - self.lo[0]) / self.cell).floor();
        let gy = ((x[1] - self.lo[1]) / self.cell).floor();
        if gx < -1.0 || gy < -1.0 {
            return None;
        }
        let gx = (gx.max(0.0) as usize).min(self.nx - 1);
        let gy = (gy.max(0.0) as usize).min(self.ny - 1);
        let mut best: Option<usize> = None;
        for &idx in &self.buckets[gy * self.nx + gx] {
            let t = &triangles[idx as usize];
            let bc = barycentric(vertices, t, x);
            if bc.iter().all(|&w| w >= -1e-9) {
                best = Some(best.map_or(idx as usize, |b| b.min(idx as usize)));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn diamond_fan() -> SectorFan {
        SectorFan::from_samples(
            vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0],
            vec![1.0, 1.0, 1.0, 1.0],
        )
        .unwrap()
    }

    /// Symmetric mesh for f = sign·|x|: one interior kink edge on x = 0 plus
    /// two flat diagonals.
    fn abs_x_mesh(sign: f64) -> TriangulatedPwl {
        let vertices: Vec<Point2> = vec![
            [-1.0, -1.0],
            [0.0, -1.0],
            [1.0, -1.0],
            [-1.0, 1.0],
            [0.0, 1.0],
            [1.0, 1.0],
        ];
        let triangles = vec![[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]];
        let values = vertices.iter().map(|p| sign * p[0].abs()).collect();
        TriangulatedPwl::new(vertices, triangles, values).unwrap()
    }

    // hand oracle for the 2x2 ray system, independent of solve_sector
    fn solve_by_elimination(t0: f64, t1: f64, v0: f64, v1: f64) -> Point2 {
        let (c0, s0) = (t0.cos(), t0.sin());
        let (c1, s1) = (t1.cos(), t1.sin());
        let gy = (v1 * c0 - v0 * c1) / (s1 * c0 - s0 * c1);
        let gx = if c0.abs() > c1.abs() {
            (v0 - s0 * gy) / c0
        } else {
            (v1 - s1 * gy) / c1
        };
        [gx, gy]
    }

    #[test]
    fn diamond_fan_gradients() {
        let fan = diamond_fan();
        let expect = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        for (g, e) in fan.gradients().iter().zip(expect.iter()) {
            assert_relative_eq!(g[0], e[0], max_relative = 1e-12);
            assert_relative_eq!(g[1], e[1], max_relative = 1e-12);
        }
        assert_relative_eq!(fan.evaluate([1.0, 1.0]), 2.0, max_relative = 1e-12);
        let oracle = solve_by_elimination(0.0, PI / 2.0, 1.0, 1.0);
        assert_relative_eq!(oracle[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(oracle[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn linear_values_reproduce_gradient() {
        let a = [0.7, -1.3];
        let m = 12;
        let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let values: Vec<f64> = angles.iter().map(|&t| dot2(a, ray_dir(t))).collect();
        let fan = SectorFan::from_samples(angles, values).unwrap();
        for g in fan.gradients() {
            assert_relative_eq!(g[0], a[0], epsilon = 1e-12);
            assert_relative_eq!(g[1], a[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn norm_fan_gradient_norms() {
        let m = 8;
        let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let values = vec![1.0; m];
        let fan = SectorFan::from_samples(angles, values).unwrap();
        let expected = 1.0 / (PI / 8.0).cos();
        for g in fan.gradients() {
            assert_relative_eq!(norm2(*g), expected, epsilon = 1e-12);
        }
        assert_relative_eq!(fan.lipschitz_constant(), expected, epsilon = 1e-12);
    }

    #[test]
    fn sector_too_wide_rejected() {
        let err = SectorFan::from_samples(vec![0.0, 0.1, 0.2], vec![1.0; 3]).unwrap_err();
        assert!(matches!(err, PwlError::SectorTooWide(2)));
    }

    #[test]
    fn diamond_edges_all_convex() {
        let fan = diamond_fan();
        let edges = fan.edges();
        assert_eq!(edges.len(), 4);
        for e in &edges {
            assert_eq!(e.kind, EdgeKind::Convex);
            assert_relative_eq!(e.jump_norm, 2.0, epsilon = 1e-12);
            assert!(dot2(e.jump, e.edge_dir).abs() <= 1e-9 * e.jump_norm);
        }
    }

    #[test]
    fn fan_evaluation_homogeneous() {
        let fan = diamond_fan();
        assert_eq!(fan.evaluate([0.0, 0.0]), 0.0);
        assert_relative_eq!(fan.evaluate([2.0, 2.0]), 4.0, max_relative = 1e-12);
        for &lambda in &[2.0, 0.5, 10.0] {
            let x = [0.3, -0.9];
            let lhs = fan.evaluate([lambda * x[0], lambda * x[1]]);
            let rhs = lambda * fan.evaluate(x);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs());
        }
    }

    #[test]
    fn mesh_plane_gradients() {
        // unit square split in two, values of x + y
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![[0, 1, 2], [0, 2, 3]];
        let values = vec![0.0, 1.0, 2.0, 1.0];
        let mesh = TriangulatedPwl::new(vertices, triangles, values).unwrap();
        for g in mesh.gradients() {
            assert_relative_eq!(g[0], 1.0, epsilon = 1e-12);
            assert_relative_eq!(g[1], 1.0, epsilon = 1e-12);
        }
        assert_relative_eq!(mesh.evaluate([0.3, 0.4]).unwrap(), 0.7, epsilon = 1e-12);
        assert_relative_eq!(mesh.lipschitz_constant(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mesh_abs_x_edge_classification() {
        let mesh = abs_x_mesh(1.0);
        let edges = mesh.edges();
        let kinks: Vec<_> = edges.iter().filter(|e| e.kind != EdgeKind::Flat).collect();
        assert_eq!(kinks.len(), 1);
        assert_eq!(kinks[0].kind, EdgeKind::Convex);
        assert_relative_eq!(kinks[0].jump_norm, 2.0, epsilon = 1e-12);

        let neg = abs_x_mesh(-1.0);
        let kinks: Vec<_> = neg
            .edges()
            .into_iter()
            .filter(|e| e.kind != EdgeKind::Flat)
            .collect();
        assert_eq!(kinks.len(), 1);
        assert_eq!(kinks[0].kind, EdgeKind::Concave);
        assert_relative_eq!(kinks[0].jump_norm, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn mesh_linear_reproduction() {
        let vertices = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0]];
        let triangles = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        let f = |p: Point2| 3.0 * p[0] - 2.0 * p[1] + 7.0;
        let values: Vec<f64> = vertices.iter().map(|&p| f(p)).collect();
        let mesh = TriangulatedPwl::new(vertices, triangles, values).unwrap();
        for g in mesh.gradients() {
            assert_relative_eq!(g[0], 3.0, epsilon = 1e-10);
            assert_relative_eq!(g[1], -2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn nonconforming_rejected() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        // edge (0,2) used by three triangles
        let triangles = vec![[0, 1, 2], [0, 2, 3], [0, 2, 1]];
        let err = TriangulatedPwl::new(vertices, triangles, vec![0.0; 4]).unwrap_err();
        assert!(matches!(err, PwlError::NonConforming(_)));
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        let err = TriangulatedPwl::new(vertices, vec![[0, 1, 2]], vec![0.0; 3]).unwrap_err();
        assert!(matches!(err, PwlError::DegenerateTriangle(..)));
    }

    #[test]
    fn out_of_domain_error() {
        let mesh = abs_x_mesh(1.0);
        assert!(matches!(
            mesh.evaluate([5.0, 5.0]),
            Err(PwlError::OutOfDomain(..))
        ));
    }

    #[test]
    fn gradient_recompute_matches() {
        let mesh = abs_x_mesh(1.0);
        for (i, t) in mesh.triangles().iter().enumerate() {
            let g = triangle_gradient(mesh.vertices(), t, mesh.values());
            assert!((g[0] - mesh.gradients()[i][0]).abs() < 1e-10);
            assert!((g[1] - mesh.gradients()[i][1]).abs() < 1e-10);
        }
    }

    #[test]
    fn fan_file_roundtrip() {
        let path = std::env::temp_dir().join("dcsplit_fan_roundtrip.json");
        let fan = diamond_fan();
        fan.to_file(&path).unwrap();
        let loaded = SectorFan::from_file(&path).unwrap();
        assert_eq!(loaded.ray_values(), fan.ray_values());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn convex_ph_fans_have_no_concave_edges() {
        for &m in &[6usize, 12, 48] {
            let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
            // euclidean norm
            let fan = SectorFan::from_samples(angles.clone(), vec![1.0; m]).unwrap();
            assert!(fan.edges().iter().all(|e| e.kind != EdgeKind::Concave));
            // max of linears
            let values: Vec<f64> = angles.iter().map(|&t| t.cos().max(t.sin())).collect();
            let fan = SectorFan::from_samples(angles, values).unwrap();
            assert!(fan.edges().iter().all(|e| e.kind != EdgeKind::Concave));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fan_jump_perpendicular_to_edge(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(3..24usize);
            let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
            let values: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let fan = SectorFan::from_samples(angles, values).unwrap();
            for e in fan.edges() {
                prop_assert!(dot2(e.jump, e.edge_dir).abs() <= 1e-9 * (1.0 + e.jump_norm));
            }
        }

        #[test]
        fn fan_evaluation_positively_homogeneous(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(3..16usize);
            let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
            let values: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let fan = SectorFan::from_samples(angles, values).unwrap();
            for _ in 0..20 {
                let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
                for &lambda in &[2.0, 0.5, 10.0] {
                    let lhs = fan.evaluate([lambda * x[0], lambda * x[1]]);
                    let rhs = lambda * fan.evaluate(x);
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
                }
            }
        }
    }
}
