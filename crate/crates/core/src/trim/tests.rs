use super::*;
use crate::trim::clip::CellBox;
use nalgebra::{Rotation2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rotated_square_oracle(p: RefPoint, angle: f64, scale: f64) -> Option<bool> {
    // Analytic membership: rotate back, compare with the half side length.
    let c = Vector2::new(0.5, 0.5);
    let local = Rotation2::new(-angle) * (p.coords - c);
    let m = local.x.abs().max(local.y.abs());
    let half = 0.5 * scale;
    if (m - half).abs() < 1e-9 {
        None
    } else {
        Some(m < half)
    }
}

#[test]
fn contains_unit_square() {
    let dom = RefSubdomain::unit_square();
    assert_eq!(dom.contains(RefPoint::new(0.5, 0.5)), Containment::Inside);
    assert_eq!(dom.contains(RefPoint::new(1.5, 0.5)), Containment::Outside);
    assert_eq!(dom.contains(RefPoint::new(1.0, 0.5)), Containment::Boundary);
}

#[test]
fn contains_rotated_square_matches_halfplane_oracle() {
    let angle = std::f64::consts::PI / 6.0;
    let dom = RefSubdomain::new(vec![rotated_square(angle, 0.8, Vector2::zeros())]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..1000 {
        let p = RefPoint::new(rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2));
        if let Some(expect_inside) = rotated_square_oracle(p, angle, 0.8) {
            let got = dom.contains(p);
            assert_ne!(got, Containment::Boundary, "point {p:?} misclassified");
            assert_eq!(got == Containment::Inside, expect_inside, "point {p:?}");
            checked += 1;
        }
    }
    assert!(checked > 900);
}

#[test]
fn contains_invariant_under_cyclic_reordering() {
    let angle = 0.3;
    let base = rotated_square(angle, 0.8, Vector2::new(0.02, -0.03));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for shift in 0..4 {
        let mut segs = base.segments.clone();
        segs.rotate_left(shift);
        let dom = RefSubdomain::new(vec![TrimLoop::new(segs).unwrap()]).unwrap();
        let reference = RefSubdomain::new(vec![base.clone()]).unwrap();
        for _ in 0..100 {
            let p = RefPoint::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            assert_eq!(dom.contains(p), reference.contains(p));
        }
    }
}

#[test]
fn contains_respects_holes() {
    let outer = TrimLoop::rectangle(0.0, 0.0, 1.0, 1.0);
    // Clockwise hole.
    let hole = TrimLoop::polygon(&[
        RefPoint::new(0.4, 0.4),
        RefPoint::new(0.4, 0.6),
        RefPoint::new(0.6, 0.6),
        RefPoint::new(0.6, 0.4),
    ]);
    assert!(hole.signed_area() < 0.0);
    let dom = RefSubdomain::new(vec![outer, hole]).unwrap();
    assert_eq!(dom.contains(RefPoint::new(0.5, 0.5)), Containment::Outside);
    assert_eq!(dom.contains(RefPoint::new(0.2, 0.2)), Containment::Inside);
}

#[test]
fn gridline_intersections_linear_hand_values() {
    let seg = TrimSegment::line(RefPoint::new(0.1, 0.5), RefPoint::new(0.9, 0.5));
    let s = gridline_intersections(&seg, 0.25);
    // The segment runs along y = 0.5 (a grid line for h = 1/4): only the
    // x-crossings at 0.25, 0.5, 0.75 count.
    assert_eq!(s.len(), 3);
    for (got, expect) in s.iter().zip([0.1875, 0.5, 0.8125]) {
        assert!((got - expect).abs() < 1e-13, "{got} vs {expect}");
    }
}

#[test]
fn gridline_intersections_inside_one_cell() {
    let seg = TrimSegment::line(RefPoint::new(0.26, 0.26), RefPoint::new(0.49, 0.3));
    assert!(gridline_intersections(&seg, 0.25).is_empty());
}

#[test]
fn gridline_intersections_quadratic_matches_bisection() {
    let seg = TrimSegment::quadratic([0.05, 0.9, 0.0], [0.51, 0.3, -0.35]);
    let h = 0.125;
    let got = gridline_intersections(&seg, h);

    // Brute-force oracle: scan 1e4 intervals for sign changes per grid line
    // and bisect each bracket.
    let mut expect: Vec<f64> = Vec::new();
    for axis in 0..2 {
        for k in -2..12 {
            let v = k as f64 * h;
            let f = |s: f64| {
                let p = seg.eval(s);
                (if axis == 0 { p.x } else { p.y }) - v
            };
            let n = 10_000;
            for i in 0..n {
                let (mut a, mut b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
                if f(a) == 0.0 && a > 0.0 {
                    expect.push(a);
                    continue;
                }
                if f(a) * f(b) < 0.0 {
                    for _ in 0..60 {
                        let m = 0.5 * (a + b);
                        if f(a) * f(m) <= 0.0 {
                            b = m;
                        } else {
                            a = m;
                        }
                    }
                    let s = 0.5 * (a + b);
                    if s > 1e-9 && s < 1.0 - 1e-9 {
                        expect.push(s);
                    }
                }
            }
        }
    }
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    expect.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    assert_eq!(got.len(), expect.len(), "{got:?} vs {expect:?}");
    for (g, e) in got.iter().zip(expect.iter()) {
        assert!((g - e).abs() < 1e-9, "{g} vs {e}");
    }
}

#[test]
fn clip_cell_fully_inside() {
    let dom = RefSubdomain::unit_square();
    let cell = CellBox::new(0.25, 0.25, 0.5, 0.5);
    let loops = clip_to_cell(&dom, &cell).unwrap();
    assert_eq!(loops.len(), 1);
    assert_eq!(loops[0].segments.len(), 4);
    assert!((loops[0].signed_area() - cell.area()).abs() < 1e-14);
    for seg in &loops[0].segments {
        assert_eq!(seg.degree(), 1);
    }
}

#[test]
fn clip_cell_fully_outside() {
    let dom =
        RefSubdomain::new(vec![rotated_square(0.1, 0.5, Vector2::zeros())]).unwrap();
    let cell = CellBox::new(0.0, 0.0, 0.125, 0.125);
    assert!(clip_to_cell(&dom, &cell).unwrap().is_empty());
}

#[test]
fn clip_triangle_cut() {
    // Unit cell cut by x + y <= 1.
    let tri = TrimLoop::polygon(&[
        RefPoint::new(0.0, 0.0),
        RefPoint::new(1.0, 0.0),
        RefPoint::new(0.0, 1.0),
    ]);
    let dom = RefSubdomain::new(vec![tri]).unwrap();
    let cell = CellBox::new(0.0, 0.0, 1.0, 1.0);
    let loops = clip_to_cell(&dom, &cell).unwrap();
    assert_eq!(loops.len(), 1);
    assert!((loops[0].signed_area() - 0.5).abs() < 1e-13);
}

#[test]
fn clip_edge_on_gridline() {
    // Subdomain edge coincides with the cell edge.
    let dom = RefSubdomain::unit_square();
    let cell = CellBox::new(0.0, 0.0, 0.25, 0.25);
    let loops = clip_to_cell(&dom, &cell).unwrap();
    assert_eq!(loops.len(), 1);
    assert!((loops[0].signed_area() - cell.area()).abs() < 1e-14);
}

#[test]
fn clip_rotated_square_area_additivity() {
    let angle = std::f64::consts::PI / 6.0;
    let dom = RefSubdomain::new(vec![rotated_square(angle, 0.8, Vector2::zeros())]).unwrap();
    let n = 8;
    let h = 1.0 / n as f64;
    let mut total = 0.0;
    // The rotated square may poke outside the unit square; include a ring of
    // cells around it.
    for i in -2..(n + 2) {
        for j in -2..(n + 2) {
            let cell = CellBox::new(
                i as f64 * h,
                j as f64 * h,
                (i + 1) as f64 * h,
                (j + 1) as f64 * h,
            );
            for lp in clip_to_cell(&dom, &cell).unwrap() {
                total += lp.signed_area();
            }
        }
    }
    assert!((total - 0.64).abs() < 1e-10, "total area {total}");
}

#[test]
fn clip_loops_positively_oriented() {
    let dom = RefSubdomain::new(vec![rotated_square(0.22, 0.8, Vector2::new(0.03, 0.01))])
        .unwrap();
    let n = 8;
    let h = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            let cell = CellBox::new(
                i as f64 * h,
                j as f64 * h,
                (i + 1) as f64 * h,
                (j + 1) as f64 * h,
            );
            for lp in clip_to_cell(&dom, &cell).unwrap() {
                assert!(lp.signed_area() > 0.0);
            }
        }
    }
}

#[test]
fn clip_hole_crossing_cell() {
    let outer = TrimLoop::rectangle(0.0, 0.0, 1.0, 1.0);
    let hole = TrimLoop::polygon(&[
        RefPoint::new(0.3, 0.3),
        RefPoint::new(0.3, 0.7),
        RefPoint::new(0.7, 0.7),
        RefPoint::new(0.7, 0.3),
    ]);
    let dom = RefSubdomain::new(vec![outer, hole]).unwrap();
    // Cell partially covered by the hole.
    let cell = CellBox::new(0.25, 0.25, 0.5, 0.5);
    let loops = clip_to_cell(&dom, &cell).unwrap();
    let area: f64 = loops.iter().map(|l| l.signed_area()).sum();
    // Cell area minus hole overlap: 0.0625 - 0.04 = 0.0225.
    assert!((area - 0.0225).abs() < 1e-12, "area {area}");

    // Cell entirely within the hole.
    let cell = CellBox::new(0.4, 0.4, 0.6, 0.6);
    assert!(clip_to_cell(&dom, &cell).unwrap().is_empty());
}

#[test]
fn clip_subdomain_inside_single_cell() {
    let dom =
        RefSubdomain::new(vec![rotated_square(0.4, 0.5, Vector2::zeros())]).unwrap();
    let cell = CellBox::new(0.0, 0.0, 1.0, 1.0);
    let loops = clip_to_cell(&dom, &cell).unwrap();
    assert_eq!(loops.len(), 1);
    assert!((loops[0].signed_area() - 0.25).abs() < 1e-12);
}

#[test]
fn parse_subdomain_roundtrip() {
    let text = "\
# outer loop: unit square
1  0 1  0 0
1  1 0  0 1
1  1 -1  1 0
1  0 0  1 -1
";
    let dom = parse_subdomain(text).unwrap();
    assert_eq!(dom.loops.len(), 1);
    assert!((dom.area() - 1.0).abs() < 1e-14);
    assert_eq!(dom.contains(RefPoint::new(0.5, 0.5)), Containment::Inside);
}

#[test]
fn parse_subdomain_rejects_garbage() {
    assert!(parse_subdomain("3 0 0 0 0 0 0 0 0").is_err());
    assert!(parse_subdomain("1 0 1 0").is_err());
    assert!(parse_subdomain("").is_err());
}
