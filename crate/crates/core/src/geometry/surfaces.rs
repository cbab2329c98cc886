//! Built-in multipatch surfaces and the container tying patches, interface
//! curves and boundary curves together.
//!
//! The sphere is covered by six patches, each the radial projection of one
//! cube face; the torus by eight angular windows (two in the minor angle,
//! four in the major angle). Each patch map composes a placement in front of
//! the chart, so the trimmed subdomain is a shrunk, optionally rotated and
//! shifted square whose boundary cuts the background grid. Interface records
//! are built by matching the ambient images of logical square edges, which
//! works for any consistent set of charts without hand-coded adjacency.

use super::{AmbientPoint, Chart, PatchMap, Placement, RefPoint};
use crate::trim::{RefSubdomain, TrimLoop, TrimSegment};
use nalgebra::{Matrix2, Vector2, Vector3};

/// Minor radius of the built-in torus.
pub const TORUS_MINOR: f64 = 0.6;
/// Major radius of the built-in torus.
pub const TORUS_MAJOR: f64 = 1.0;

/// One patch: its map and the trimmed reference subdomain.
#[derive(Clone, Debug)]
pub struct Patch {
    pub map: PatchMap,
    pub subdomain: RefSubdomain,
}

/// A shared curve between two patches, stored in both reference
/// representations. Each side is oriented along its own subdomain loop
/// (counter-clockwise), so the outward normal on either side is the tangent
/// rotated by -90 degrees.
#[derive(Clone, Debug)]
pub struct InterfaceCurve {
    pub patch_i: usize,
    pub patch_j: usize,
    pub side_i: Vec<TrimSegment>,
    pub side_j: Vec<TrimSegment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// A patch-boundary curve that is part of the surface boundary.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pub patch: usize,
    pub kind: BoundaryKind,
    pub segments: Vec<TrimSegment>,
}

#[derive(Clone, Debug)]
pub struct Surface {
    pub patches: Vec<Patch>,
    pub interfaces: Vec<InterfaceCurve>,
    pub boundaries: Vec<BoundaryCurve>,
}

impl Surface {
    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn is_closed(&self) -> bool {
        self.boundaries.is_empty()
    }
}

/// The four edges of the logical unit square in counter-clockwise order.
fn logical_edges() -> [(RefPoint, RefPoint); 4] {
    let c = [
        RefPoint::new(0.0, 0.0),
        RefPoint::new(1.0, 0.0),
        RefPoint::new(1.0, 1.0),
        RefPoint::new(0.0, 1.0),
    ];
    [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
}

/// Reference-coordinate segments of a logical edge under a placement,
/// subdivided into `per_edge` equal pieces.
fn edge_segments(placement: &Placement, edge: (RefPoint, RefPoint), per_edge: usize) -> Vec<TrimSegment> {
    let (a, b) = edge;
    (0..per_edge)
        .map(|k| {
            let t0 = k as f64 / per_edge as f64;
            let t1 = (k + 1) as f64 / per_edge as f64;
            let pa = placement.to_reference(RefPoint::from(a.coords.lerp(&b.coords, t0)));
            let pb = placement.to_reference(RefPoint::from(a.coords.lerp(&b.coords, t1)));
            TrimSegment::line(pa, pb)
        })
        .collect()
}

fn placed_subdomain(placement: &Placement, per_edge: usize) -> RefSubdomain {
    let mut segments = Vec::with_capacity(4 * per_edge);
    for edge in logical_edges() {
        segments.extend(edge_segments(placement, edge, per_edge));
    }
    RefSubdomain::new(vec![TrimLoop::new(segments).expect("square loop closes")])
        .expect("placed square is a valid subdomain")
}

/// Build interface records by matching the ambient images of logical edges
/// across patches. Two edges match when their endpoint sets and midpoints
/// coincide. Unmatched edges are returned separately (surface boundary).
fn match_edges(
    maps: &[PatchMap],
    per_edge: usize,
) -> (Vec<InterfaceCurve>, Vec<(usize, usize)>) {
    let tol = 1e-9;
    let probes: Vec<[AmbientPoint; 3]> = maps
        .iter()
        .flat_map(|map| {
            logical_edges().into_iter().map(move |(a, b)| {
                let at = |t: f64| map.chart.eval(RefPoint::from(a.coords.lerp(&b.coords, t)));
                [at(0.0), at(0.5), at(1.0)]
            })
        })
        .collect();

    let matches = |p: &[AmbientPoint; 3], q: &[AmbientPoint; 3]| {
        let mid = (p[1] - q[1]).norm() < tol;
        let ends_fwd = (p[0] - q[0]).norm() < tol && (p[2] - q[2]).norm() < tol;
        let ends_rev = (p[0] - q[2]).norm() < tol && (p[2] - q[0]).norm() < tol;
        mid && (ends_fwd || ends_rev)
    };

    let n = maps.len();
    let mut partner: Vec<Option<usize>> = vec![None; 4 * n];
    for a in 0..4 * n {
        for b in (a + 1)..4 * n {
            if a / 4 == b / 4 {
                continue;
            }
            if matches(&probes[a], &probes[b]) {
                partner[a] = Some(b);
                partner[b] = Some(a);
            }
        }
    }

    let mut interfaces = Vec::new();
    let mut unmatched = Vec::new();
    for a in 0..4 * n {
        match partner[a] {
            Some(b) if a < b => {
                let (pi, ei) = (a / 4, a % 4);
                let (pj, ej) = (b / 4, b % 4);
                interfaces.push(InterfaceCurve {
                    patch_i: pi,
                    patch_j: pj,
                    side_i: edge_segments(&maps[pi].placement, logical_edges()[ei], per_edge),
                    side_j: edge_segments(&maps[pj].placement, logical_edges()[ej], per_edge),
                });
            }
            Some(_) => {}
            None => unmatched.push((a / 4, a % 4)),
        }
    }
    (interfaces, unmatched)
}

fn assemble_surface(
    maps: Vec<PatchMap>,
    per_edge: usize,
    classify: Option<&dyn Fn(AmbientPoint) -> BoundaryKind>,
) -> Surface {
    let (interfaces, unmatched) = match_edges(&maps, per_edge);
    let boundaries = unmatched
        .into_iter()
        .map(|(p, e)| {
            let edge = logical_edges()[e];
            let mid = maps[p]
                .chart
                .eval(RefPoint::from(edge.0.coords.lerp(&edge.1.coords, 0.5)));
            BoundaryCurve {
                patch: p,
                kind: classify.map(|c| c(mid)).unwrap_or(BoundaryKind::Dirichlet),
                segments: edge_segments(&maps[p].placement, edge, per_edge),
            }
        })
        .collect();
    let patches = maps
        .into_iter()
        .map(|map| Patch {
            subdomain: placed_subdomain(&map.placement, per_edge),
            map,
        })
        .collect();
    Surface {
        patches,
        interfaces,
        boundaries,
    }
}

/// The six cube-face charts of the unit sphere.
pub fn sphere_charts() -> [Chart; 6] {
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut charts = Vec::with_capacity(6);
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            charts.push(Chart::SphereFace {
                center: sign * e[axis],
                u: e[(axis + 1) % 3],
                v: e[(axis + 2) % 3],
            });
        }
    }
    charts.try_into().unwrap()
}

/// Unit sphere as six radially projected cube faces.
pub fn sphere_surface(placements: &[Placement], per_edge: usize) -> Surface {
    assert_eq!(placements.len(), 6, "sphere needs six placements");
    let maps = sphere_charts()
        .into_iter()
        .zip(placements)
        .map(|(chart, &placement)| PatchMap::new(chart, placement))
        .collect();
    assemble_surface(maps, per_edge, None)
}

/// Torus of radii ([`TORUS_MINOR`], [`TORUS_MAJOR`]) as eight angular
/// windows: two in the minor angle times four in the major angle.
pub fn torus_surface(placements: &[Placement], per_edge: usize) -> Surface {
    assert_eq!(placements.len(), 8, "torus needs eight placements");
    let tau = std::f64::consts::TAU;
    let mut maps = Vec::with_capacity(8);
    for a in 0..2 {
        for b in 0..4 {
            maps.push(PatchMap::new(
                Chart::TorusWindow {
                    minor: TORUS_MINOR,
                    major: TORUS_MAJOR,
                    theta0: a as f64 * tau / 2.0,
                    theta_len: tau / 2.0,
                    phi0: b as f64 * tau / 4.0,
                    phi_len: tau / 4.0,
                },
                placements[4 * a + b],
            ));
        }
    }
    assemble_surface(maps, per_edge, None)
}

/// Flat unit square split into two patches at `x = 1/2`, with boundary
/// curves classified by the ambient midpoint of each outer edge.
pub fn flat_two_patch(
    placements: &[Placement],
    per_edge: usize,
    classify: &dyn Fn(AmbientPoint) -> BoundaryKind,
) -> Surface {
    assert_eq!(placements.len(), 2, "flat two-patch needs two placements");
    let maps = vec![
        PatchMap::new(
            Chart::Flat {
                origin: Vector3::zeros(),
                a: Vector3::new(0.5, 0.0, 0.0),
                b: Vector3::new(0.0, 1.0, 0.0),
            },
            placements[0],
        ),
        PatchMap::new(
            Chart::Flat {
                origin: Vector3::new(0.5, 0.0, 0.0),
                a: Vector3::new(0.5, 0.0, 0.0),
                b: Vector3::new(0.0, 1.0, 0.0),
            },
            placements[1],
        ),
    ];
    assemble_surface(maps, per_edge, Some(classify))
}

/// Single flat patch covering the unit square (identity embedding).
pub fn flat_single_patch(placement: Placement, per_edge: usize) -> Surface {
    let maps = vec![PatchMap::new(
        Chart::Flat {
            origin: Vector3::zeros(),
            a: Vector3::x(),
            b: Vector3::y(),
        },
        placement,
    )];
    assemble_surface(maps, per_edge, None)
}

/// One cube-sphere face as a surface with boundary; `kinds[e]` sets the
/// condition on logical edge `e`.
pub fn sphere_cap(placement: Placement, per_edge: usize, kinds: [BoundaryKind; 4]) -> Surface {
    let chart = sphere_charts()[4]; // +z face
    let map = PatchMap::new(chart, placement);
    let boundaries = logical_edges()
        .into_iter()
        .enumerate()
        .map(|(e, edge)| BoundaryCurve {
            patch: 0,
            kind: kinds[e],
            segments: edge_segments(&placement, edge, per_edge),
        })
        .collect();
    Surface {
        patches: vec![Patch {
            map,
            subdomain: placed_subdomain(&placement, per_edge),
        }],
        interfaces: Vec::new(),
        boundaries,
    }
}

/// Minor/major torus angles at a reference point of a torus-window patch.
pub fn torus_angles(map: &PatchMap, p: RefPoint) -> Option<(f64, f64)> {
    match map.chart {
        Chart::TorusWindow {
            theta0,
            theta_len,
            phi0,
            phi_len,
            ..
        } => {
            let y = map.placement.to_logical(p);
            Some((theta0 + theta_len * y.x, phi0 + phi_len * y.y))
        }
        _ => None,
    }
}

/// Constant jacobian `d(theta, phi)/d(reference)` of a torus-window patch.
pub fn torus_angle_jacobian(map: &PatchMap) -> Option<Matrix2<f64>> {
    match map.chart {
        Chart::TorusWindow {
            theta_len, phi_len, ..
        } => {
            let scale = Matrix2::new(theta_len, 0.0, 0.0, phi_len);
            Some(scale * map.placement.logical_jacobian())
        }
        _ => None,
    }
}

/// Fixed generic placements for convergence studies: small distinct angles
/// and shifts so every patch boundary cuts its grid away from grid lines.
pub fn default_placements(count: usize) -> Vec<Placement> {
    (0..count)
        .map(|k| {
            let angle = 0.11 + 0.017 * k as f64;
            let shift = Vector2::new(
                0.013 - 0.003 * (k % 5) as f64,
                -0.009 + 0.004 * (k % 3) as f64,
            );
            let p = Placement::new(angle, shift);
            debug_assert!(p.square_inside_unit(-1e-3));
            p
        })
        .collect()
}

/// Translation-only placements (no rotation): reference coordinate axes stay
/// aligned with the logical ones, which keeps tensor-product polynomials
/// reproducible. Used by the flat patch tests.
pub fn translated_placements(count: usize) -> Vec<Placement> {
    (0..count)
        .map(|k| {
            Placement::new(
                0.0,
                Vector2::new(
                    0.0137 - 0.0071 * (k % 4) as f64,
                    -0.0149 + 0.0083 * (k % 3) as f64,
                ),
            )
        })
        .collect()
}

/// Random placements for the cut-robustness studies. Angles are sampled in
/// a window where the shrunk square provably stays inside the unit square
/// (a 0.8-scaled square leaves it for rotations beyond about 17 degrees),
/// and the joint angle/shift draw is rejected if any corner leaves the
/// square with margin.
pub fn random_placements(rng: &mut impl rand::Rng, count: usize) -> Vec<Placement> {
    (0..count)
        .map(|_| loop {
            let angle = rng.gen_range(-0.25..0.25);
            let shift = Vector2::new(rng.gen_range(-0.04..0.04), rng.gen_range(-0.04..0.04));
            let p = Placement::new(angle, shift);
            if p.square_inside_unit(-1e-3) {
                break p;
            }
        })
        .collect()
}
