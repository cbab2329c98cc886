//! Tensor-product Lagrange shape functions on grid cells and global DOF
//! numbering over active meshes.
//!
//! Shape functions use equispaced nodes per cell; nodes on shared cell
//! faces coincide, so the per-patch space is continuous. Patches never
//! share DOFs: continuity across interfaces is enforced weakly.

use crate::geometry::RefPoint;
use crate::mesh::ActiveMesh;
use crate::{Error, Result};
use nalgebra::Vector2;

/// Nodal basis of `Q_p` on one cell, `p` in `1..=3`.
#[derive(Clone, Debug)]
pub struct ShapeSet {
    pub p: usize,
    /// Monomial coefficients of the 1D Lagrange polynomials on `[0,1]`.
    coeffs: Vec<[f64; 4]>,
}

impl ShapeSet {
    pub fn new(p: usize) -> Result<Self> {
        if !(1..=3).contains(&p) {
            return Err(Error::UnsupportedBasisOrder(p));
        }
        let nodes: Vec<f64> = (0..=p).map(|m| m as f64 / p as f64).collect();
        let mut coeffs = Vec::with_capacity(p + 1);
        for a in 0..=p {
            // Expand prod_{m != a} (x - x_m) / (x_a - x_m).
            let mut c = [0.0; 4];
            c[0] = 1.0;
            let mut deg = 0;
            let mut denom = 1.0;
            for (m, &xm) in nodes.iter().enumerate() {
                if m == a {
                    continue;
                }
                denom *= nodes[a] - xm;
                for k in (0..=deg).rev() {
                    c[k + 1] += c[k];
                    c[k] *= -xm;
                }
                deg += 1;
            }
            for k in 0..4 {
                c[k] /= denom;
            }
            coeffs.push(c);
        }
        Ok(ShapeSet { p, coeffs })
    }

    pub fn num_local(&self) -> usize {
        (self.p + 1) * (self.p + 1)
    }

    /// `d^k/dx^k` of the 1D Lagrange polynomial `a` at `x` (cell-local
    /// coordinates, unscaled).
    pub fn eval_1d(&self, a: usize, x: f64, k: usize) -> f64 {
        let c = &self.coeffs[a];
        // Differentiate the coefficient array k times, then Horner.
        let mut d = *c;
        for _ in 0..k {
            for i in 0..3 {
                d[i] = d[i + 1] * (i + 1) as f64;
            }
            d[3] = 0.0;
        }
        ((d[3] * x + d[2]) * x + d[1]) * x + d[0]
    }

    /// All local basis values (or mixed derivatives) at cell-local
    /// coordinates; derivative order `deriv = (kx, ky)` is scaled by
    /// `h^-(kx+ky)` for a cell of side `h`. Local index is `b*(p+1)+a` for
    /// node `(a, b)`.
    pub fn eval_shape(
        &self,
        local: RefPoint,
        deriv: (usize, usize),
        h: f64,
    ) -> Result<Vec<f64>> {
        if deriv.0 > self.p || deriv.1 > self.p {
            return Err(Error::DerivativeOrder {
                order: deriv.0.max(deriv.1),
                p: self.p,
            });
        }
        let scale = h.powi(-((deriv.0 + deriv.1) as i32));
        let m = self.p + 1;
        let fx: Vec<f64> = (0..m).map(|a| self.eval_1d(a, local.x, deriv.0)).collect();
        let fy: Vec<f64> = (0..m).map(|b| self.eval_1d(b, local.y, deriv.1)).collect();
        let mut out = Vec::with_capacity(m * m);
        for b in 0..m {
            for a in 0..m {
                out.push(scale * fx[a] * fy[b]);
            }
        }
        Ok(out)
    }

    /// Values and first gradients in one pass (the assembly hot path).
    pub fn values_and_gradients(
        &self,
        local: RefPoint,
        h: f64,
    ) -> (Vec<f64>, Vec<Vector2<f64>>) {
        let m = self.p + 1;
        let fx: Vec<f64> = (0..m).map(|a| self.eval_1d(a, local.x, 0)).collect();
        let fy: Vec<f64> = (0..m).map(|b| self.eval_1d(b, local.y, 0)).collect();
        let dx: Vec<f64> = (0..m).map(|a| self.eval_1d(a, local.x, 1)).collect();
        let dy: Vec<f64> = (0..m).map(|b| self.eval_1d(b, local.y, 1)).collect();
        let mut vals = Vec::with_capacity(m * m);
        let mut grads = Vec::with_capacity(m * m);
        for b in 0..m {
            for a in 0..m {
                vals.push(fx[a] * fy[b]);
                grads.push(Vector2::new(dx[a] * fy[b] / h, fx[a] * dy[b] / h));
            }
        }
        (vals, grads)
    }
}

/// Global numbering of the Lagrange nodes over the active cells of all
/// patches. Nodes shared by adjacent active cells within a patch get one
/// DOF; patches never share DOFs.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub p: usize,
    pub total: usize,
    lattice_width: Vec<usize>,
    node_ids: Vec<Vec<i64>>,
}

pub fn build_dofmap(meshes: &[ActiveMesh], p: usize) -> DofMap {
    let mut node_ids = Vec::with_capacity(meshes.len());
    let mut lattice_width = Vec::with_capacity(meshes.len());
    let mut next = 0i64;
    for mesh in meshes {
        let w = p * mesh.grid.n + 1;
        let mut ids = vec![-1i64; w * w];
        for &(i, j) in &mesh.cells {
            for bj in 0..=p {
                for bi in 0..=p {
                    let node = (p * j + bj) * w + (p * i + bi);
                    if ids[node] < 0 {
                        ids[node] = next;
                        next += 1;
                    }
                }
            }
        }
        node_ids.push(ids);
        lattice_width.push(w);
    }
    DofMap {
        p,
        total: next as usize,
        lattice_width,
        node_ids,
    }
}

impl DofMap {
    /// Global DOFs of one active cell, ordered like
    /// [`ShapeSet::eval_shape`].
    pub fn cell_dofs(&self, patch: usize, cell: (usize, usize)) -> Vec<usize> {
        let p = self.p;
        let w = self.lattice_width[patch];
        let ids = &self.node_ids[patch];
        let mut out = Vec::with_capacity((p + 1) * (p + 1));
        for bj in 0..=p {
            for bi in 0..=p {
                let node = (p * cell.1 + bj) * w + (p * cell.0 + bi);
                let id = ids[node];
                debug_assert!(id >= 0, "inactive cell queried for DOFs");
                out.push(id as usize);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_active_mesh, BackgroundGrid};
    use crate::trim::{RefSubdomain, TrimLoop};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bilinear_center_values() {
        let s = ShapeSet::new(1).unwrap();
        let vals = s.eval_shape(RefPoint::new(0.5, 0.5), (0, 0), 1.0).unwrap();
        for v in vals {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn kronecker_and_partition_of_unity() {
        for p in 1..=3 {
            let s = ShapeSet::new(p).unwrap();
            let m = p + 1;
            for b in 0..m {
                for a in 0..m {
                    let node = RefPoint::new(a as f64 / p as f64, b as f64 / p as f64);
                    let vals = s.eval_shape(node, (0, 0), 1.0).unwrap();
                    for (k, v) in vals.iter().enumerate() {
                        let expect = if k == b * m + a { 1.0 } else { 0.0 };
                        assert!((v - expect).abs() < 1e-12);
                    }
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..20 {
                let q = RefPoint::new(rng.gen::<f64>(), rng.gen::<f64>());
                let vals = s.eval_shape(q, (0, 0), 1.0).unwrap();
                assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                let gx = s.eval_shape(q, (1, 0), 1.0).unwrap();
                assert!(gx.iter().sum::<f64>().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_reproduction() {
        let s = ShapeSet::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let q = RefPoint::new(rng.gen::<f64>(), rng.gen::<f64>());
            // Interpolate u(x, y) = x: coefficients are the node x values.
            let coeff = [0.0, 1.0, 0.0, 1.0];
            let dx = s.eval_shape(q, (1, 0), 1.0).unwrap();
            let val: f64 = coeff.iter().zip(&dx).map(|(c, v)| c * v).sum();
            assert!((val - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives_match_divided_differences() {
        let s = ShapeSet::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eps = 1e-6;
        for _ in 0..50 {
            let q = RefPoint::new(rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
            let dx = s.eval_shape(q, (1, 0), 1.0).unwrap();
            let plus = s
                .eval_shape(RefPoint::new(q.x + eps, q.y), (0, 0), 1.0)
                .unwrap();
            let minus = s
                .eval_shape(RefPoint::new(q.x - eps, q.y), (0, 0), 1.0)
                .unwrap();
            for k in 0..dx.len() {
                let fd = (plus[k] - minus[k]) / (2.0 * eps);
                assert!((dx[k] - fd).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn derivative_scaling_and_order_limit() {
        let s = ShapeSet::new(2).unwrap();
        let q = RefPoint::new(0.3, 0.4);
        let unscaled = s.eval_shape(q, (2, 0), 1.0).unwrap();
        let scaled = s.eval_shape(q, (2, 0), 0.5).unwrap();
        for (u, v) in unscaled.iter().zip(&scaled) {
            assert!((v - u * 4.0).abs() < 1e-12);
        }
        assert!(s.eval_shape(q, (3, 0), 1.0).is_err());
    }

    #[test]
    fn dof_counts() {
        let dom = RefSubdomain::unit_square();
        let mesh = build_active_mesh(&dom, BackgroundGrid::new(2)).unwrap();
        assert_eq!(build_dofmap(std::slice::from_ref(&mesh), 1).total, 9);
        assert_eq!(build_dofmap(std::slice::from_ref(&mesh), 2).total, 25);
    }

    #[test]
    fn dof_count_l_shaped_two_patches() {
        // L-shape: drop the upper-right cell of a 2x2 grid.
        let lshape = TrimLoop::polygon(&[
            RefPoint::new(0.0, 0.0),
            RefPoint::new(1.0, 0.0),
            RefPoint::new(1.0, 0.5),
            RefPoint::new(0.5, 0.5),
            RefPoint::new(0.5, 1.0),
            RefPoint::new(0.0, 1.0),
        ]);
        let dom = RefSubdomain::new(vec![lshape]).unwrap();
        let mesh = build_active_mesh(&dom, BackgroundGrid::new(2)).unwrap();
        assert_eq!(mesh.num_active(), 3);
        let meshes = vec![mesh.clone(), mesh];
        let dofs = build_dofmap(&meshes, 1);
        // 8 nodes per patch, no sharing across patches.
        assert_eq!(dofs.total, 16);
    }

    #[test]
    fn interpolation_reproduces_tensor_polynomials() {
        for p in 1..=3usize {
            let s = ShapeSet::new(p).unwrap();
            let f = |x: f64, y: f64| (1.0 + x).powi(p as i32) * (0.5 + y).powi(p as i32);
            // Nodal coefficients on the unit cell.
            let m = p + 1;
            let mut coeff = Vec::new();
            for b in 0..m {
                for a in 0..m {
                    coeff.push(f(a as f64 / p as f64, b as f64 / p as f64));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..30 {
                let q = RefPoint::new(rng.gen::<f64>(), rng.gen::<f64>());
                let vals = s.eval_shape(q, (0, 0), 1.0).unwrap();
                let got: f64 = coeff.iter().zip(&vals).map(|(c, v)| c * v).sum();
                assert!((got - f(q.x, q.y)).abs() < 1e-12);
            }
        }
    }
}
