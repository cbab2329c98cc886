//! Trim curves, reference subdomains, point classification and curve/grid
//! intersection.
//!
//! A reference subdomain is a region of the unit square bounded by oriented
//! loops of piecewise-polynomial curves (degree 1 or 2): the first loop runs
//! counter-clockwise and bounds the region, the remaining loops run
//! clockwise and bound holes. The loops may cut a background grid
//! arbitrarily; [`clip_to_cell`] recovers the oriented boundary of the
//! intersection with a single grid cell.

mod clip;
mod io;

pub use clip::{clip_to_cell, CellBox};
pub use io::{parse_subdomain, read_subdomain};

use crate::geometry::RefPoint;
use crate::{Error, Result};
use nalgebra::Vector2;

/// Coordinate snap tolerance against grid lines.
pub const SNAP_TOL: f64 = 1e-12;
/// Classification distance below which a point counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Relative area below which a cut is treated as empty.
pub const SLIVER_REL_AREA: f64 = 1e-12;

/// One polynomial curve piece `s in [0,1] -> R^2` of degree 1 or 2.
#[derive(Clone, Copy, Debug)]
pub struct TrimSegment {
    /// `coeffs[d][m]` multiplies `s^m` in coordinate `d`.
    coeffs: [[f64; 3]; 2],
    degree: usize,
}

impl TrimSegment {
    pub fn line(a: RefPoint, b: RefPoint) -> Self {
        TrimSegment {
            coeffs: [[a.x, b.x - a.x, 0.0], [a.y, b.y - a.y, 0.0]],
            degree: 1,
        }
    }

    /// Quadratic segment from monomial coefficients per coordinate.
    pub fn quadratic(cx: [f64; 3], cy: [f64; 3]) -> Self {
        TrimSegment {
            coeffs: [cx, cy],
            degree: 2,
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: [[f64; 3]; 2]) -> Result<Self> {
        if degree == 0 || degree > 2 {
            return Err(Error::UnsupportedDegree(degree));
        }
        Ok(TrimSegment { coeffs, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[[f64; 3]; 2] {
        &self.coeffs
    }

    pub fn eval(&self, s: f64) -> RefPoint {
        let c = &self.coeffs;
        RefPoint::new(
            c[0][0] + s * (c[0][1] + s * c[0][2]),
            c[1][0] + s * (c[1][1] + s * c[1][2]),
        )
    }

    pub fn deriv(&self, s: f64) -> Vector2<f64> {
        let c = &self.coeffs;
        Vector2::new(
            c[0][1] + 2.0 * s * c[0][2],
            c[1][1] + 2.0 * s * c[1][2],
        )
    }

    pub fn start(&self) -> RefPoint {
        self.eval(0.0)
    }

    pub fn end(&self) -> RefPoint {
        self.eval(1.0)
    }

    /// Restriction to `[a, b]`, reparametrized to `[0, 1]`.
    pub fn sub_segment(&self, a: f64, b: f64) -> TrimSegment {
        let k = b - a;
        let mut coeffs = [[0.0; 3]; 2];
        for d in 0..2 {
            let c = self.coeffs[d];
            coeffs[d][0] = c[0] + c[1] * a + c[2] * a * a;
            coeffs[d][1] = c[1] * k + 2.0 * c[2] * a * k;
            coeffs[d][2] = c[2] * k * k;
        }
        TrimSegment {
            coeffs,
            degree: self.degree,
        }
    }

    /// Parameters in `(0,1)` where coordinate `axis` equals `value`.
    /// Segments lying identically on the line yield no crossings.
    pub fn line_crossings(&self, axis: usize, value: f64) -> Vec<f64> {
        let c = self.coeffs[axis];
        let (c0, c1, c2) = (c[0] - value, c[1], c[2]);
        let mut out = Vec::new();
        if c2.abs() < 1e-14 {
            if c1.abs() < 1e-14 {
                return out; // constant in this axis: on the line or never crossing
            }
            let s = -c0 / c1;
            if s > SNAP_TOL && s < 1.0 - SNAP_TOL {
                out.push(s);
            }
        } else {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                // Numerically stable quadratic roots.
                let q = -0.5 * (c1 + c1.signum() * sq);
                let mut roots = [q / c2, if q.abs() > 0.0 { c0 / q } else { q / c2 }];
                if c1 == 0.0 {
                    roots = [sq / (2.0 * c2), -sq / (2.0 * c2)];
                }
                for s in roots {
                    if s.is_finite() && s > SNAP_TOL && s < 1.0 - SNAP_TOL {
                        out.push(s);
                    }
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() < SNAP_TOL);
        out
    }

    /// Distance from `p` to the segment.
    pub fn distance_to(&self, p: RefPoint) -> f64 {
        if self.degree == 1 {
            let a = self.start();
            let d = Vector2::new(self.coeffs[0][1], self.coeffs[1][1]);
            let len2 = d.norm_squared();
            if len2 == 0.0 {
                return (p - a).norm();
            }
            let t = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
            (p - self.eval(t)).norm()
        } else {
            // Sample, then polish the best candidate with Newton on the
            // squared-distance derivative.
            let mut best_s = 0.0;
            let mut best = f64::INFINITY;
            for k in 0..=16 {
                let s = k as f64 / 16.0;
                let d = (p - self.eval(s)).norm_squared();
                if d < best {
                    best = d;
                    best_s = s;
                }
            }
            let mut s = best_s;
            for _ in 0..20 {
                let r = self.eval(s) - p;
                let d1 = self.deriv(s);
                let d2 = Vector2::new(2.0 * self.coeffs[0][2], 2.0 * self.coeffs[1][2]);
                let f1 = r.dot(&d1);
                let f2 = d1.norm_squared() + r.dot(&d2);
                if f2.abs() < 1e-300 {
                    break;
                }
                let step = f1 / f2;
                s = (s - step).clamp(0.0, 1.0);
                if step.abs() < 1e-14 {
                    break;
                }
            }
            (p - self.eval(s)).norm()
        }
    }

    /// Parameter of the point on the segment closest to `p`.
    pub fn project(&self, p: RefPoint) -> f64 {
        if self.degree == 1 {
            let a = self.start();
            let d = Vector2::new(self.coeffs[0][1], self.coeffs[1][1]);
            let len2 = d.norm_squared();
            if len2 == 0.0 {
                return 0.0;
            }
            ((p - a).dot(&d) / len2).clamp(0.0, 1.0)
        } else {
            let mut best_s = 0.0;
            let mut best = f64::INFINITY;
            for k in 0..=32 {
                let s = k as f64 / 32.0;
                let d = (p - self.eval(s)).norm_squared();
                if d < best {
                    best = d;
                    best_s = s;
                }
            }
            let mut s = best_s;
            for _ in 0..30 {
                let r = self.eval(s) - p;
                let d1 = self.deriv(s);
                let d2 = Vector2::new(2.0 * self.coeffs[0][2], 2.0 * self.coeffs[1][2]);
                let f2 = d1.norm_squared() + r.dot(&d2);
                if f2.abs() < 1e-300 {
                    break;
                }
                let step = r.dot(&d1) / f2;
                s = (s - step).clamp(0.0, 1.0);
                if step.abs() < 1e-15 {
                    break;
                }
            }
            s
        }
    }
}

/// Parameters in `(0,1)` where the segment crosses any grid line of spacing
/// `h` (both axes), sorted and deduplicated.
pub fn gridline_intersections(seg: &TrimSegment, h: f64) -> Vec<f64> {
    let mut params = Vec::new();
    for axis in 0..2 {
        let c = seg.coeffs[axis];
        // Range of the coordinate over [0,1]; extrema of the quadratic
        // included.
        let mut lo = c[0].min(c[0] + c[1] + c[2]);
        let mut hi = c[0].max(c[0] + c[1] + c[2]);
        if c[2].abs() > 0.0 {
            let s_ext = -c[1] / (2.0 * c[2]);
            if s_ext > 0.0 && s_ext < 1.0 {
                let v = c[0] + s_ext * (c[1] + s_ext * c[2]);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let k_lo = (lo / h).floor() as i64;
        let k_hi = (hi / h).ceil() as i64;
        for k in k_lo..=k_hi {
            params.extend(seg.line_crossings(axis, k as f64 * h));
        }
    }
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    params.dedup_by(|a, b| (*a - *b).abs() < SNAP_TOL);
    params
}

/// Closed oriented chain of trim segments.
#[derive(Clone, Debug)]
pub struct TrimLoop {
    pub segments: Vec<TrimSegment>,
}

impl TrimLoop {
    pub fn new(segments: Vec<TrimSegment>) -> Result<Self> {
        let lp = TrimLoop { segments };
        lp.validate_closed()?;
        Ok(lp)
    }

    /// Axis-aligned rectangle as four counter-clockwise line segments.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        let p = [
            RefPoint::new(x0, y0),
            RefPoint::new(x1, y0),
            RefPoint::new(x1, y1),
            RefPoint::new(x0, y1),
        ];
        TrimLoop {
            segments: (0..4)
                .map(|k| TrimSegment::line(p[k], p[(k + 1) % 4]))
                .collect(),
        }
    }

    /// Convex polygon from counter-clockwise vertices.
    pub fn polygon(vertices: &[RefPoint]) -> Self {
        let n = vertices.len();
        TrimLoop {
            segments: (0..n)
                .map(|k| TrimSegment::line(vertices[k], vertices[(k + 1) % n]))
                .collect(),
        }
    }

    fn validate_closed(&self) -> Result<()> {
        let n = self.segments.len();
        for k in 0..n {
            let gap = (self.segments[k].end() - self.segments[(k + 1) % n].start()).norm();
            if gap > SNAP_TOL {
                return Err(Error::OpenLoop { segment: k, gap });
            }
        }
        Ok(())
    }

    /// Signed area by Green's formula; exact for degree <= 2 segments.
    pub fn signed_area(&self) -> f64 {
        // integrand x(s) y'(s) has degree <= 3: 2-point Gauss is exact.
        const GP: [f64; 2] = [0.211324865405187117745, 0.788675134594812882255];
        let mut area = 0.0;
        for seg in &self.segments {
            for &s in &GP {
                let p = seg.eval(s);
                let d = seg.deriv(s);
                area += 0.5 * p.x * d.y;
            }
        }
        area
    }

    pub fn start_points(&self) -> impl Iterator<Item = RefPoint> + '_ {
        self.segments.iter().map(|s| s.start())
    }
}

/// Point classification result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    Boundary,
}

/// Trimmed region of the unit square: one outer loop plus optional holes.
#[derive(Clone, Debug)]
pub struct RefSubdomain {
    pub loops: Vec<TrimLoop>,
}

impl RefSubdomain {
    pub fn new(loops: Vec<TrimLoop>) -> Result<Self> {
        for lp in &loops {
            lp.validate_closed()?;
        }
        if let Some(outer) = loops.first() {
            if outer.signed_area() <= 0.0 {
                return Err(Error::ClipFailure(
                    "outer loop must be counter-clockwise".into(),
                ));
            }
        }
        for hole in loops.iter().skip(1) {
            if hole.signed_area() >= 0.0 {
                return Err(Error::ClipFailure("hole loops must be clockwise".into()));
            }
        }
        Ok(RefSubdomain { loops })
    }

    pub fn unit_square() -> Self {
        RefSubdomain {
            loops: vec![TrimLoop::rectangle(0.0, 0.0, 1.0, 1.0)],
        }
    }

    pub fn area(&self) -> f64 {
        self.loops.iter().map(|l| l.signed_area()).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = &TrimSegment> {
        self.loops.iter().flat_map(|l| l.segments.iter())
    }

    pub fn distance_to_boundary(&self, p: RefPoint) -> f64 {
        self.segments()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding-parity classification with a boundary band of width
    /// [`BOUNDARY_TOL`]. Rays that graze a segment endpoint or run
    /// tangentially are retried in a rotated direction.
    pub fn contains(&self, p: RefPoint) -> Containment {
        if self.distance_to_boundary(p) < BOUNDARY_TOL {
            return Containment::Boundary;
        }
        'attempt: for attempt in 0..32 {
            let angle = 0.5417 + attempt as f64 * 2.399963; // golden-angle stride
            let dir = Vector2::new(angle.cos(), angle.sin());
            let mut crossings = 0usize;
            for seg in self.segments() {
                // cross(gamma(s) - p, dir) = 0
                let c = seg.coeffs;
                let c0 = (c[0][0] - p.x) * dir.y - (c[1][0] - p.y) * dir.x;
                let c1 = c[0][1] * dir.y - c[1][1] * dir.x;
                let c2 = c[0][2] * dir.y - c[1][2] * dir.x;
                let roots = quadratic_roots(c0, c1, c2);
                for s in roots {
                    if !(-1e-9..=1.0 + 1e-9).contains(&s) {
                        continue;
                    }
                    // A hit near a segment endpoint or a tangential hit is
                    // ambiguous: rotate the ray and retry.
                    if s < 1e-9 || s > 1.0 - 1e-9 {
                        continue 'attempt;
                    }
                    let slope = c1 + 2.0 * c2 * s;
                    if slope.abs() < 1e-9 {
                        continue 'attempt;
                    }
                    let t = (seg.eval(s) - p).dot(&dir);
                    if t > 0.0 {
                        crossings += 1;
                    }
                }
            }
            return if crossings % 2 == 1 {
                Containment::Inside
            } else {
                Containment::Outside
            };
        }
        Containment::Boundary
    }
}

/// Real roots of `c0 + c1 s + c2 s^2`.
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2.abs() < 1e-14 {
        if c1.abs() < 1e-14 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    if c1 == 0.0 {
        return vec![-sq / (2.0 * c2), sq / (2.0 * c2)];
    }
    let q = -0.5 * (c1 + c1.signum() * sq);
    let r1 = q / c2;
    let r2 = if q.abs() > 0.0 { c0 / q } else { r1 };
    vec![r1, r2]
}

/// Counter-clockwise square of side `scale`, rotated by `angle` about the
/// point `(0.5, 0.5) + shift`.
pub fn rotated_square(angle: f64, scale: f64, shift: Vector2<f64>) -> TrimLoop {
    let c = Vector2::new(0.5, 0.5) + shift;
    let r = nalgebra::Rotation2::new(angle);
    let corners: Vec<RefPoint> = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
        .iter()
        .map(|&(x, y)| RefPoint::from(c + r * (Vector2::new(x, y) * scale)))
        .collect();
    TrimLoop::polygon(&corners)
}

#[cfg(test)]
mod tests;
