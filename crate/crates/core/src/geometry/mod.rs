//! Patch mappings, the induced Riemannian metric and differential operators
//! in reference coordinates.
//!
//! A patch is the image of a trimmed subdomain of the unit square under a
//! smooth map `F`. All quantities needed by the discretization are expressed
//! through the first fundamental form `G = DF^T DF`: bulk integrals carry the
//! measure `|G|^(1/2)`, curve integrals carry the metric norm of the curve
//! tangent, gradients pull back as `G^(-1) grad`, and conormals follow from
//! the metric inverse applied to the Euclidean curve normal.

mod surfaces;

pub use surfaces::{
    flat_single_patch, flat_two_patch, sphere_cap, sphere_surface, torus_surface, BoundaryCurve,
    BoundaryKind, InterfaceCurve, Patch, Surface, TORUS_MAJOR, TORUS_MINOR,
};

use crate::{Error, Result};
use nalgebra::{Matrix2, Matrix3, Matrix3x2, Point2, Point3, Rotation2, Vector2, Vector3};

/// Point in the reference square `[0,1]^2`.
pub type RefPoint = Point2<f64>;
/// Point in the ambient space `R^3`.
pub type AmbientPoint = Point3<f64>;

/// Width of the extended reference domain on which maps stay valid; points
/// produced by inversion may lie up to this far outside the subdomain.
pub const EXTENSION_WIDTH: f64 = 0.1;

const SINGULAR_TOL: f64 = 1e-10;
const INVERT_TOL: f64 = 1e-12;
const INVERT_MAX_ITERS: usize = 50;

/// Smooth chart from the logical unit square into `R^3`.
///
/// Charts are always evaluated on "logical" coordinates; a [`Placement`]
/// composed in front of the chart decides where the trimmed subdomain sits
/// inside the reference square.
#[derive(Clone, Copy, Debug)]
pub enum Chart {
    /// Affine plane embedding `origin + y1 * a + y2 * b`.
    Flat {
        origin: Vector3<f64>,
        a: Vector3<f64>,
        b: Vector3<f64>,
    },
    /// Radial projection of an axis-aligned cube face of `[-1,1]^3` onto the
    /// unit sphere. `center` is the face center, `u`/`v` span the face.
    SphereFace {
        center: Vector3<f64>,
        u: Vector3<f64>,
        v: Vector3<f64>,
    },
    /// Window of the angular parametrization of a torus: `y1` sweeps the
    /// minor angle, `y2` the major angle.
    TorusWindow {
        minor: f64,
        major: f64,
        theta0: f64,
        theta_len: f64,
        phi0: f64,
        phi_len: f64,
    },
}

impl Chart {
    pub fn eval(&self, y: RefPoint) -> AmbientPoint {
        match *self {
            Chart::Flat { origin, a, b } => AmbientPoint::from(origin + y.x * a + y.y * b),
            Chart::SphereFace { center, u, v } => {
                let q = center + (2.0 * y.x - 1.0) * u + (2.0 * y.y - 1.0) * v;
                AmbientPoint::from(q / q.norm())
            }
            Chart::TorusWindow {
                minor,
                major,
                theta0,
                theta_len,
                phi0,
                phi_len,
            } => {
                let theta = theta0 + theta_len * y.x;
                let phi = phi0 + phi_len * y.y;
                let rho = major + minor * theta.cos();
                AmbientPoint::new(rho * phi.cos(), rho * phi.sin(), minor * theta.sin())
            }
        }
    }

    pub fn jacobian(&self, y: RefPoint) -> Matrix3x2<f64> {
        match *self {
            Chart::Flat { a, b, .. } => Matrix3x2::from_columns(&[a, b]),
            Chart::SphereFace { center, u, v } => {
                let q = center + (2.0 * y.x - 1.0) * u + (2.0 * y.y - 1.0) * v;
                let du = 2.0 * u;
                let dv = 2.0 * v;
                Matrix3x2::from_columns(&[sphere_dir_deriv(q, du), sphere_dir_deriv(q, dv)])
            }
            Chart::TorusWindow {
                minor,
                major,
                theta0,
                theta_len,
                phi0,
                phi_len,
            } => {
                let theta = theta0 + theta_len * y.x;
                let phi = phi0 + phi_len * y.y;
                let rho = major + minor * theta.cos();
                let d_theta = Vector3::new(
                    -minor * theta.sin() * phi.cos(),
                    -minor * theta.sin() * phi.sin(),
                    minor * theta.cos(),
                ) * theta_len;
                let d_phi = Vector3::new(-rho * phi.sin(), rho * phi.cos(), 0.0) * phi_len;
                Matrix3x2::from_columns(&[d_theta, d_phi])
            }
        }
    }

    /// Second derivatives: `out[d]` holds the symmetric 2x2 matrix of
    /// `d^2 F_d / dy_k dy_l`.
    pub fn hessian(&self, y: RefPoint) -> [Matrix2<f64>; 3] {
        match *self {
            Chart::Flat { .. } => [Matrix2::zeros(); 3],
            Chart::SphereFace { center, u, v } => {
                let q = center + (2.0 * y.x - 1.0) * u + (2.0 * y.y - 1.0) * v;
                let d = [2.0 * u, 2.0 * v];
                let mut out = [Matrix2::zeros(); 3];
                for k in 0..2 {
                    for l in k..2 {
                        let second = sphere_second_deriv(q, d[k], d[l]);
                        for c in 0..3 {
                            out[c][(k, l)] = second[c];
                            out[c][(l, k)] = second[c];
                        }
                    }
                }
                out
            }
            Chart::TorusWindow {
                minor,
                major,
                theta0,
                theta_len,
                phi0,
                phi_len,
            } => {
                let theta = theta0 + theta_len * y.x;
                let phi = phi0 + phi_len * y.y;
                let rho = major + minor * theta.cos();
                let f_tt = Vector3::new(
                    -minor * theta.cos() * phi.cos(),
                    -minor * theta.cos() * phi.sin(),
                    -minor * theta.sin(),
                ) * (theta_len * theta_len);
                let f_tp = Vector3::new(
                    minor * theta.sin() * phi.sin(),
                    -minor * theta.sin() * phi.cos(),
                    0.0,
                ) * (theta_len * phi_len);
                let f_pp =
                    Vector3::new(-rho * phi.cos(), -rho * phi.sin(), 0.0) * (phi_len * phi_len);
                let mut out = [Matrix2::zeros(); 3];
                for c in 0..3 {
                    out[c][(0, 0)] = f_tt[c];
                    out[c][(0, 1)] = f_tp[c];
                    out[c][(1, 0)] = f_tp[c];
                    out[c][(1, 1)] = f_pp[c];
                }
                out
            }
        }
    }
}

/// Derivative of `q/|q|` in direction `dq`.
fn sphere_dir_deriv(q: Vector3<f64>, dq: Vector3<f64>) -> Vector3<f64> {
    let r = q.norm();
    dq / r - q * (q.dot(&dq)) / (r * r * r)
}

/// Second derivative of `q/|q|` for constant directions `dk`, `dl`.
fn sphere_second_deriv(q: Vector3<f64>, dk: Vector3<f64>, dl: Vector3<f64>) -> Vector3<f64> {
    let r = q.norm();
    let r3 = r * r * r;
    let r5 = r3 * r * r;
    let qk = q.dot(&dk);
    let ql = q.dot(&dl);
    let kl = dk.dot(&dl);
    -dk * (ql / r3) - dl * (qk / r3) - q * (kl / r3) + q * (3.0 * qk * ql / r5)
}

/// Rigid motion (+ uniform shrink) placing the logical unit square inside the
/// reference square. The trimmed subdomain is the image of `[0,1]^2`; its
/// boundary cuts the background grid depending on the angle and shift.
#[derive(Clone, Copy, Debug)]
pub struct Placement {
    pub angle: f64,
    pub shift: Vector2<f64>,
    pub scale: f64,
}

impl Placement {
    pub const DEFAULT_SCALE: f64 = 0.8;

    /// Identity placement: the subdomain is the full unit square.
    pub fn identity() -> Self {
        Placement {
            angle: 0.0,
            shift: Vector2::zeros(),
            scale: 1.0,
        }
    }

    pub fn new(angle: f64, shift: Vector2<f64>) -> Self {
        Placement {
            angle,
            shift,
            scale: Self::DEFAULT_SCALE,
        }
    }

    /// Logical -> reference coordinates.
    pub fn to_reference(&self, y: RefPoint) -> RefPoint {
        let c = Vector2::new(0.5, 0.5);
        let r = Rotation2::new(self.angle);
        RefPoint::from(c + self.shift + r * ((y.coords - c) * self.scale))
    }

    /// Reference -> logical coordinates.
    pub fn to_logical(&self, x: RefPoint) -> RefPoint {
        let c = Vector2::new(0.5, 0.5);
        let r = Rotation2::new(-self.angle);
        RefPoint::from(c + (r * (x.coords - c - self.shift)) / self.scale)
    }

    /// Constant jacobian of [`Self::to_logical`].
    pub fn logical_jacobian(&self) -> Matrix2<f64> {
        Rotation2::new(-self.angle).matrix() / self.scale
    }

    /// True if the placed square stays inside the unit square with margin
    /// `tol` at all four corners.
    pub fn square_inside_unit(&self, tol: f64) -> bool {
        [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .all(|&(a, b)| {
                let p = self.to_reference(RefPoint::new(a, b));
                p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol
            })
    }
}

/// Diffeomorphism from reference coordinates to the ambient space, with
/// first and second derivatives. Composes the placement inverse with the
/// chart, so the same physical patch can sit anywhere in the reference
/// square.
#[derive(Clone, Copy, Debug)]
pub struct PatchMap {
    pub chart: Chart,
    pub placement: Placement,
}

impl PatchMap {
    pub fn new(chart: Chart, placement: Placement) -> Self {
        PatchMap { chart, placement }
    }

    pub fn eval(&self, x: RefPoint) -> AmbientPoint {
        self.chart.eval(self.placement.to_logical(x))
    }

    pub fn jacobian(&self, x: RefPoint) -> Matrix3x2<f64> {
        let y = self.placement.to_logical(x);
        self.chart.jacobian(y) * self.placement.logical_jacobian()
    }

    pub fn hessian(&self, x: RefPoint) -> [Matrix2<f64>; 3] {
        let y = self.placement.to_logical(x);
        let l = self.placement.logical_jacobian();
        let h = self.chart.hessian(y);
        [
            l.transpose() * h[0] * l,
            l.transpose() * h[1] * l,
            l.transpose() * h[2] * l,
        ]
    }

    /// True while the point stays within the extended domain around the
    /// placed square (the maps themselves are globally smooth; this is the
    /// validation bound for inversion results).
    pub fn in_extended_domain(&self, x: RefPoint) -> bool {
        let y = self.placement.to_logical(x);
        let margin = EXTENSION_WIDTH / self.placement.scale + 1e-9;
        y.x >= -margin && y.x <= 1.0 + margin && y.y >= -margin && y.y <= 1.0 + margin
    }
}

/// Metric tensor and derived quantities at one reference point.
#[derive(Clone, Copy, Debug)]
pub struct MetricData {
    pub g: Matrix2<f64>,
    pub g_inv: Matrix2<f64>,
    pub sqrt_det: f64,
    pub jac: Matrix3x2<f64>,
}

/// First fundamental form at `p`.
///
/// Errors when the jacobian columns are numerically dependent (smallest
/// singular value below `1e-10`).
pub fn metric_at(map: &PatchMap, p: RefPoint) -> Result<MetricData> {
    let jac = map.jacobian(p);
    metric_from_jacobian(jac, p)
}

pub(crate) fn metric_from_jacobian(jac: Matrix3x2<f64>, p: RefPoint) -> Result<MetricData> {
    let g = jac.transpose() * jac;
    let g = Matrix2::new(g[(0, 0)], 0.5 * (g[(0, 1)] + g[(1, 0)]), 0.5 * (g[(0, 1)] + g[(1, 0)]), g[(1, 1)]);
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(0, 1)];
    // Smallest singular value of the jacobian = sqrt of the smallest
    // eigenvalue of G.
    let tr = g[(0, 0)] + g[(1, 1)];
    let disc = (0.25 * (g[(0, 0)] - g[(1, 1)]).powi(2) + g[(0, 1)] * g[(0, 1)]).sqrt();
    let lambda_min = 0.5 * tr - disc;
    if lambda_min <= SINGULAR_TOL * SINGULAR_TOL {
        return Err(Error::SingularJacobian {
            sigma: lambda_min.max(0.0).sqrt(),
            x1: p.x,
            x2: p.y,
        });
    }
    let g_inv = Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(0, 1)], g[(0, 0)]) / det;
    Ok(MetricData {
        g,
        g_inv,
        sqrt_det: det.sqrt(),
        jac,
    })
}

/// Coefficients of the surface gradient in the map-jacobian basis:
/// `G^(-1)` applied to the reference gradient of the pullback.
pub fn surface_gradient_ref(metric: &MetricData, grad_ref: Vector2<f64>) -> Vector2<f64> {
    metric.g_inv * grad_ref
}

/// Metric norm of a curve tangent; for a Euclidean-unit tangent this is the
/// arclength scale factor between the reference curve and the surface curve.
pub fn curve_measure(metric: &MetricData, tangent_ref: Vector2<f64>) -> Result<f64> {
    if tangent_ref.norm_squared() == 0.0 {
        return Err(Error::ZeroTangent);
    }
    Ok((tangent_ref.dot(&(metric.g * tangent_ref))).sqrt())
}

/// Metric-unit conormal: `G^(-1) nu` normalized in the metric norm, for a
/// Euclidean-unit curve normal `nu`. The result is metric-orthogonal to the
/// curve tangent.
pub fn metric_normal(metric: &MetricData, nu_ref: Vector2<f64>) -> Vector2<f64> {
    let w = metric.g_inv * nu_ref;
    let norm = (w.dot(&(metric.g * w))).sqrt();
    w / norm
}

/// Scalar field on the reference square with first and second derivatives,
/// as consumed by [`laplace_beltrami_ref`].
pub trait RefField {
    fn value(&self, p: RefPoint) -> f64;
    fn gradient(&self, p: RefPoint) -> Vector2<f64>;
    fn hessian(&self, p: RefPoint) -> Matrix2<f64>;
}

/// Laplace-Beltrami operator applied to a pullback field, evaluated in
/// reference coordinates:
/// `|G|^(-1/2) div(|G|^(1/2) G^(-1) grad u)`,
/// expanded with the exact metric derivatives built from the map hessian.
pub fn laplace_beltrami_ref(map: &PatchMap, p: RefPoint, u: &dyn RefField) -> Result<f64> {
    let m = metric_at(map, p)?;
    let h = map.hessian(p);
    let jac = m.jac;

    // dg[k] = derivative of G in reference direction k.
    let mut dg = [Matrix2::zeros(); 2];
    for k in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for d in 0..3 {
                    s += h[d][(k, a)] * jac[(d, b)] + jac[(d, a)] * h[d][(k, b)];
                }
                dg[k][(a, b)] = s;
            }
        }
    }

    let det = m.sqrt_det * m.sqrt_det;
    let grad = u.gradient(p);
    let hess = u.hessian(p);
    let w = m.g_inv * grad;

    let mut div = 0.0;
    for k in 0..2 {
        let ddet = dg[k][(0, 0)] * m.g[(1, 1)] + m.g[(0, 0)] * dg[k][(1, 1)]
            - 2.0 * m.g[(0, 1)] * dg[k][(0, 1)];
        let dsqrt = 0.5 * ddet / m.sqrt_det;
        let dginv = -m.g_inv * dg[k] * m.g_inv;
        let dgrad = Vector2::new(hess[(0, k)], hess[(1, k)]);
        let dflux = dsqrt * w + m.sqrt_det * (dginv * grad + m.g_inv * dgrad);
        div += dflux[k];
    }
    let _ = det;
    Ok(div / m.sqrt_det)
}

/// Gauss-Newton inversion of the patch map: finds reference coordinates
/// whose image is closest to `target` in the tangent-plane sense.
///
/// Converges when the projected residual `|J^T (F(x) - target)|` drops below
/// `1e-12`; errors after 50 iterations or when the result leaves the
/// extended reference domain.
pub fn invert_map(map: &PatchMap, target: AmbientPoint, seed: RefPoint) -> Result<RefPoint> {
    let mut x = seed;
    for _ in 0..INVERT_MAX_ITERS {
        let r = map.eval(x) - target;
        let jac = map.jacobian(x);
        let projected = jac.transpose() * r;
        if projected.norm() < INVERT_TOL {
            if !map.in_extended_domain(x) {
                return Err(Error::OutOfDomain { x1: x.x, x2: x.y });
            }
            return Ok(x);
        }
        let gram = jac.transpose() * jac;
        let det = gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(1, 0)];
        if det.abs() < 1e-30 {
            return Err(Error::SingularJacobian {
                sigma: det.abs().sqrt(),
                x1: x.x,
                x2: x.y,
            });
        }
        let ginv = Matrix2::new(gram[(1, 1)], -gram[(0, 1)], -gram[(1, 0)], gram[(0, 0)]) / det;
        let step = ginv * projected;
        x -= step;
    }
    let residual = (map.jacobian(x).transpose() * (map.eval(x) - target)).norm();
    Err(Error::InversionDiverged {
        iters: INVERT_MAX_ITERS,
        residual,
    })
}

/// Pointwise correspondence between the reference representations of a
/// shared interface curve: maps a point on the curve in patch `i`
/// coordinates to patch `j` coordinates by going through the ambient space.
#[derive(Clone, Copy, Debug)]
pub struct InterfaceMap {
    pub patch_i: usize,
    pub patch_j: usize,
    pub map_i: PatchMap,
    pub map_j: PatchMap,
}

impl InterfaceMap {
    /// `F_j^(-1)(F_i(x))` with a caller-provided Newton seed on side `j`.
    pub fn forward(&self, x: RefPoint, seed: RefPoint) -> Result<RefPoint> {
        invert_map(&self.map_j, self.map_i.eval(x), seed)
    }

    /// `F_i^(-1)(F_j(x))` with a caller-provided Newton seed on side `i`.
    pub fn backward(&self, x: RefPoint, seed: RefPoint) -> Result<RefPoint> {
        invert_map(&self.map_i, self.map_j.eval(x), seed)
    }
}

/// Pullback of an ambient scalar field through a patch map, with exact
/// reference derivatives via the chain rule. Used for manufactured
/// solutions and oracle checks.
pub struct AmbientField<'a> {
    pub map: &'a PatchMap,
    pub value: &'a dyn Fn(AmbientPoint) -> f64,
    pub gradient: &'a dyn Fn(AmbientPoint) -> Vector3<f64>,
    pub hessian: &'a dyn Fn(AmbientPoint) -> Matrix3<f64>,
}

impl RefField for AmbientField<'_> {
    fn value(&self, p: RefPoint) -> f64 {
        (self.value)(self.map.eval(p))
    }

    fn gradient(&self, p: RefPoint) -> Vector2<f64> {
        let x = self.map.eval(p);
        self.map.jacobian(p).transpose() * (self.gradient)(x)
    }

    fn hessian(&self, p: RefPoint) -> Matrix2<f64> {
        let x = self.map.eval(p);
        let jac = self.map.jacobian(p);
        let h = self.map.hessian(p);
        let g = (self.gradient)(x);
        let hu = (self.hessian)(x);
        let mut out = jac.transpose() * hu * jac;
        for k in 0..2 {
            for l in 0..2 {
                let mut s = 0.0;
                for d in 0..3 {
                    s += g[d] * h[d][(k, l)];
                }
                out[(k, l)] += s;
            }
        }
        out
    }
}
