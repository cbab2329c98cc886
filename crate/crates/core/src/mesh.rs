//! Per-patch structured background meshes: active-cell extraction,
//! classification and the stabilized face set.
//!
//! A cell of the uniform grid on the unit square is active when its
//! intersection with the reference subdomain has positive area (slivers
//! below `1e-12 h^2` are treated as empty, consistently with the trim
//! module). Active cells fully covered by the subdomain are interior, the
//! rest are cut. Stabilization acts on every interior face with at least
//! one cut neighbor.

use crate::trim::{clip_to_cell, CellBox, RefSubdomain, TrimLoop};
use crate::{Error, Result};
use crate::geometry::RefPoint;
use std::collections::BTreeSet;

/// Uniform tensor-product grid on the unit square.
#[derive(Clone, Copy, Debug)]
pub struct BackgroundGrid {
    pub n: usize,
}

impl BackgroundGrid {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "grid needs at least one cell per side");
        BackgroundGrid { n }
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn cell_box(&self, cell: (usize, usize)) -> CellBox {
        let h = self.h();
        CellBox::new(
            cell.0 as f64 * h,
            cell.1 as f64 * h,
            (cell.0 + 1) as f64 * h,
            (cell.1 + 1) as f64 * h,
        )
    }

    /// Cell containing `p`, clamped into the grid when `p` sits on the
    /// outer boundary; `None` outside the unit square.
    pub fn locate(&self, p: RefPoint) -> Option<(usize, usize)> {
        let tol = 1e-12;
        if p.x < -tol || p.x > 1.0 + tol || p.y < -tol || p.y > 1.0 + tol {
            return None;
        }
        let n = self.n;
        let i = ((p.x * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
        let j = ((p.y * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
        Some((i, j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    Interior,
    Cut,
}

/// Interior face between two adjacent active cells. The fixed Euclidean
/// face normal points along `axis` from `cell_minus` to `cell_plus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub cell_minus: (usize, usize),
    pub cell_plus: (usize, usize),
    pub axis: usize,
}

/// Active part of a background grid for one patch.
#[derive(Clone, Debug)]
pub struct ActiveMesh {
    pub grid: BackgroundGrid,
    /// Active cells in lexicographic order.
    pub cells: Vec<(usize, usize)>,
    index: Vec<Option<u32>>,
    pub class: Vec<CellClass>,
    /// Boundary loops of `cell ∩ subdomain` per active cell (a full-cell
    /// rectangle for interior cells).
    pub cell_loops: Vec<Vec<TrimLoop>>,
    /// Intersection area per active cell.
    pub cell_areas: Vec<f64>,
    /// Interior faces with at least one cut neighbor.
    pub stab_faces: Vec<Face>,
}

impl ActiveMesh {
    pub fn cell_index(&self, cell: (usize, usize)) -> Option<usize> {
        let n = self.grid.n;
        if cell.0 >= n || cell.1 >= n {
            return None;
        }
        self.index[cell.1 * n + cell.0].map(|k| k as usize)
    }

    pub fn is_active(&self, cell: (usize, usize)) -> bool {
        self.cell_index(cell).is_some()
    }

    pub fn num_active(&self) -> usize {
        self.cells.len()
    }

    pub fn num_cut(&self) -> usize {
        self.class.iter().filter(|c| **c == CellClass::Cut).count()
    }

    pub fn num_interior(&self) -> usize {
        self.num_active() - self.num_cut()
    }

    /// Smallest intersection fraction `|cell ∩ domain| / h^2` over cut cells.
    pub fn min_cut_fraction(&self) -> f64 {
        let cell_area = self.grid.h() * self.grid.h();
        self.cells
            .iter()
            .zip(&self.class)
            .zip(&self.cell_areas)
            .filter(|((_, class), _)| **class == CellClass::Cut)
            .map(|((_, _), area)| area / cell_area)
            .fold(1.0, f64::min)
    }

    /// Active cell containing `p`, stepping to an active neighbor when `p`
    /// falls into a pruned sliver cell.
    pub fn locate_active(&self, p: RefPoint) -> Option<usize> {
        let cell = self.grid.locate(p)?;
        self.cell_index(cell)
    }
}

/// Classify the grid cells against the subdomain.
///
/// Errors when no cell is active.
pub fn build_active_mesh(dom: &RefSubdomain, grid: BackgroundGrid) -> Result<ActiveMesh> {
    let n = grid.n;
    let cell_area = grid.h() * grid.h();
    let mut cells = Vec::new();
    let mut class = Vec::new();
    let mut cell_loops = Vec::new();
    let mut cell_areas = Vec::new();
    let mut index = vec![None; n * n];

    for j in 0..n {
        for i in 0..n {
            let loops = clip_to_cell(dom, &grid.cell_box((i, j)))?;
            if loops.is_empty() {
                continue;
            }
            let area: f64 = loops.iter().map(|l| l.signed_area()).sum();
            index[j * n + i] = Some(cells.len() as u32);
            cells.push((i, j));
            class.push(if area >= cell_area * (1.0 - 1e-9) {
                CellClass::Interior
            } else {
                CellClass::Cut
            });
            cell_loops.push(loops);
            cell_areas.push(area);
        }
    }

    if cells.is_empty() {
        return Err(Error::EmptyActiveMesh);
    }

    let mut mesh = ActiveMesh {
        grid,
        cells,
        index,
        class,
        cell_loops,
        cell_areas,
        stab_faces: Vec::new(),
    };
    mesh.stab_faces = stabilization_faces(&mesh);
    Ok(mesh)
}

/// Interior faces of the active mesh with at least one cut neighbor.
fn stabilization_faces(mesh: &ActiveMesh) -> Vec<Face> {
    let mut faces = Vec::new();
    for &(i, j) in &mesh.cells {
        let this_cut = mesh.class[mesh.cell_index((i, j)).unwrap()] == CellClass::Cut;
        // Look at the two faces where this cell is the minus side.
        for (axis, neighbor) in [(0usize, (i + 1, j)), (1usize, (i, j + 1))] {
            if let Some(nb) = mesh.cell_index(neighbor) {
                if this_cut || mesh.class[nb] == CellClass::Cut {
                    faces.push(Face {
                        cell_minus: (i, j),
                        cell_plus: neighbor,
                        axis,
                    });
                }
            }
        }
    }
    faces
}

/// Cells within face-or-node graph distance `l` of `cell`, inside the
/// active set.
pub fn neighborhood(mesh: &ActiveMesh, cell: (usize, usize), l: usize) -> BTreeSet<(usize, usize)> {
    let mut current = BTreeSet::new();
    if !mesh.is_active(cell) {
        return current;
    }
    current.insert(cell);
    for _ in 0..l {
        let mut next = current.clone();
        for &(i, j) in &current {
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 {
                        continue;
                    }
                    let nb = (ni as usize, nj as usize);
                    if mesh.is_active(nb) {
                        next.insert(nb);
                    }
                }
            }
        }
        current = next;
    }
    current
}

/// Counters emitted into the stability-study CSV.
#[derive(Clone, Copy, Debug)]
pub struct MeshStats {
    pub active: usize,
    pub cut: usize,
    pub interior: usize,
    pub min_cut_fraction: f64,
}

pub fn mesh_stats(mesh: &ActiveMesh) -> MeshStats {
    MeshStats {
        active: mesh.num_active(),
        cut: mesh.num_cut(),
        interior: mesh.num_interior(),
        min_cut_fraction: mesh.min_cut_fraction(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trim::{rotated_square, Containment, TrimLoop};
    use nalgebra::Vector2;

    #[test]
    fn full_square_all_interior() {
        let dom = RefSubdomain::unit_square();
        let mesh = build_active_mesh(&dom, BackgroundGrid::new(4)).unwrap();
        assert_eq!(mesh.num_active(), 16);
        assert_eq!(mesh.num_cut(), 0);
        assert!(mesh.stab_faces.is_empty());
    }

    #[test]
    fn rotated_square_matches_dense_sampling() {
        let angle = std::f64::consts::PI / 6.0;
        let dom = RefSubdomain::new(vec![rotated_square(angle, 0.8, Vector2::zeros())]).unwrap();
        let grid = BackgroundGrid::new(8);
        let mesh = build_active_mesh(&dom, grid).unwrap();

        // Dense 100x100 sampling per cell; a cell is active when any sample
        // is inside (point sampling cannot see sliver intersections, which
        // the area rule prunes anyway).
        let mut expected = 0;
        for j in 0..8 {
            for i in 0..8 {
                let b = grid.cell_box((i, j));
                let mut hit = false;
                'scan: for a in 0..100 {
                    for c in 0..100 {
                        let p = RefPoint::new(
                            b.x0 + (a as f64 + 0.5) / 100.0 * b.width(),
                            b.y0 + (c as f64 + 0.5) / 100.0 * b.height(),
                        );
                        if dom.contains(p) == Containment::Inside {
                            hit = true;
                            break 'scan;
                        }
                    }
                }
                if hit {
                    expected += 1;
                }
            }
        }
        assert_eq!(mesh.num_active(), expected);
    }

    #[test]
    fn triangle_point_touch_is_inactive() {
        // Lower-left triangle x + y <= 1 on a 2x2 grid: the upper-right cell
        // touches only at the midpoint, which has zero area.
        let tri = TrimLoop::polygon(&[
            RefPoint::new(0.0, 0.0),
            RefPoint::new(1.0, 0.0),
            RefPoint::new(0.0, 1.0),
        ]);
        let dom = RefSubdomain::new(vec![tri]).unwrap();
        let mesh = build_active_mesh(&dom, BackgroundGrid::new(2)).unwrap();
        assert_eq!(mesh.num_active(), 3);
        assert!(!mesh.is_active((1, 1)));
    }

    #[test]
    fn neighborhood_examples() {
        let dom = RefSubdomain::unit_square();
        let mesh = build_active_mesh(&dom, BackgroundGrid::new(4)).unwrap();
        assert_eq!(neighborhood(&mesh, (1, 1), 0).len(), 1);
        assert_eq!(neighborhood(&mesh, (1, 1), 1).len(), 9);
        assert_eq!(neighborhood(&mesh, (0, 0), 1).len(), 4);
    }

    #[test]
    fn refinement_keeps_coverage() {
        let dom = RefSubdomain::new(vec![rotated_square(0.2, 0.8, Vector2::new(0.01, 0.02))])
            .unwrap();
        let coarse = build_active_mesh(&dom, BackgroundGrid::new(8)).unwrap();
        let fine = build_active_mesh(&dom, BackgroundGrid::new(16)).unwrap();
        // Every active fine cell lies inside an active coarse cell.
        for &(i, j) in &fine.cells {
            assert!(coarse.is_active((i / 2, j / 2)));
        }
    }

    #[test]
    fn every_cut_cell_has_a_stab_face() {
        for angle in [0.0, 0.13, 0.21] {
            let dom =
                RefSubdomain::new(vec![rotated_square(angle, 0.8, Vector2::new(0.01, -0.02))])
                    .unwrap();
            let mesh = build_active_mesh(&dom, BackgroundGrid::new(8)).unwrap();
            for (k, &cell) in mesh.cells.iter().enumerate() {
                if mesh.class[k] == CellClass::Cut {
                    let touched = mesh
                        .stab_faces
                        .iter()
                        .any(|f| f.cell_minus == cell || f.cell_plus == cell);
                    assert!(touched, "cut cell {cell:?} has no stabilized face");
                }
            }
        }
    }

    #[test]
    fn face_set_has_no_duplicates() {
        let dom = RefSubdomain::new(vec![rotated_square(0.15, 0.8, Vector2::zeros())]).unwrap();
        let mesh = build_active_mesh(&dom, BackgroundGrid::new(8)).unwrap();
        let mut seen = BTreeSet::new();
        for f in &mesh.stab_faces {
            assert!(seen.insert((f.cell_minus, f.cell_plus, f.axis)));
            // Adjacency along the stated axis.
            let (a, b) = (f.cell_minus, f.cell_plus);
            if f.axis == 0 {
                assert_eq!((a.0 + 1, a.1), b);
            } else {
                assert_eq!((a.0, a.1 + 1), b);
            }
        }
    }
}
