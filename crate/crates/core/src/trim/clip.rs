//! Clipping of a trimmed subdomain against one background-grid cell.
//!
//! The boundary of the intersection is reconstructed by a perimeter walk:
//! trim segments are split at their crossings with the four cell lines, the
//! pieces inside the cell are chained, and open chains are closed with
//! counter-clockwise runs along the cell boundary. Orientation is inherited
//! from the subdomain loops, so holes that cross the cell come out with the
//! region on the correct side without special cases.

use super::{Containment, RefSubdomain, TrimLoop, TrimSegment, SLIVER_REL_AREA, SNAP_TOL};
use crate::geometry::RefPoint;
use crate::{Error, Result};

/// Axis-aligned box, normally one cell of the background grid.
#[derive(Clone, Copy, Debug)]
pub struct CellBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl CellBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        CellBox { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> RefPoint {
        RefPoint::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn corner(&self, k: usize) -> RefPoint {
        match k % 4 {
            0 => RefPoint::new(self.x0, self.y0),
            1 => RefPoint::new(self.x1, self.y0),
            2 => RefPoint::new(self.x1, self.y1),
            _ => RefPoint::new(self.x0, self.y1),
        }
    }

    fn contains_closed(&self, p: RefPoint, tol: f64) -> bool {
        p.x >= self.x0 - tol && p.x <= self.x1 + tol && p.y >= self.y0 - tol && p.y <= self.y1 + tol
    }

    pub fn as_loop(&self) -> TrimLoop {
        TrimLoop::rectangle(self.x0, self.y0, self.x1, self.y1)
    }

    /// Perimeter coordinate of a point on the cell boundary, walking
    /// counter-clockwise from the lower-left corner.
    fn perimeter_coord(&self, p: RefPoint) -> Result<f64> {
        let (w, h) = (self.width(), self.height());
        let candidates = [
            ((p.y - self.y0).abs(), (p.x - self.x0).clamp(0.0, w)),
            ((p.x - self.x1).abs(), w + (p.y - self.y0).clamp(0.0, h)),
            ((p.y - self.y1).abs(), w + h + (self.x1 - p.x).clamp(0.0, w)),
            ((p.x - self.x0).abs(), 2.0 * w + h + (self.y1 - p.y).clamp(0.0, h)),
        ];
        let (dist, tau) = candidates
            .iter()
            .cloned()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap();
        if dist > 1e-6 * (w + h) {
            return Err(Error::ClipFailure(format!(
                "chain endpoint ({:.12}, {:.12}) is not on the cell boundary",
                p.x, p.y
            )));
        }
        let total = 2.0 * (w + h);
        Ok(tau.rem_euclid(total))
    }

    fn corner_coords(&self) -> [f64; 4] {
        let (w, h) = (self.width(), self.height());
        [0.0, w, w + h, 2.0 * w + h]
    }
}

struct Chain {
    arcs: Vec<TrimSegment>,
    closed: bool,
}

impl Chain {
    fn start(&self) -> RefPoint {
        self.arcs[0].start()
    }

    fn end(&self) -> RefPoint {
        self.arcs.last().unwrap().end()
    }
}

/// Oriented boundary loops of the intersection between the subdomain and the
/// cell. Returns the cell's own boundary when the cell sits fully inside,
/// an empty list when the intersection is empty or a sliver below
/// `1e-12 * cell area`.
pub fn clip_to_cell(dom: &RefSubdomain, cell: &CellBox) -> Result<Vec<TrimLoop>> {
    let mut chains: Vec<Chain> = Vec::new();

    for lp in &dom.loops {
        collect_chains(lp, cell, &mut chains);
    }

    let mut out: Vec<TrimLoop> = Vec::new();
    let mut open: Vec<Chain> = Vec::new();
    for ch in chains {
        if ch.closed {
            out.push(TrimLoop {
                segments: ch.arcs,
            });
        } else {
            open.push(ch);
        }
    }

    if open.is_empty() {
        // No boundary piece inside the cell: the cell is entirely inside or
        // outside the subdomain. A closed chain from a loop contained in the
        // cell decides nothing about the cell boundary itself, so test a
        // point on it.
        let mut probe = Containment::Boundary;
        for k in 0..4 {
            probe = dom.contains(cell.corner(k));
            if probe != Containment::Boundary {
                break;
            }
        }
        if probe == Containment::Inside {
            out.insert(0, cell.as_loop());
        } else if out.iter().map(|l| l.signed_area()).sum::<f64>() <= 0.0 {
            // Only hole loops (or nothing) inside an exterior cell.
            return Ok(Vec::new());
        }
    } else {
        close_chains(cell, open, &mut out)?;
    }

    // Prune slivers.
    let threshold = SLIVER_REL_AREA * cell.area();
    out.retain(|l| l.signed_area().abs() >= threshold);
    let total: f64 = out.iter().map(|l| l.signed_area()).sum();
    if total < threshold {
        return Ok(Vec::new());
    }
    Ok(out)
}

/// Split one loop at the cell lines and collect the maximal chains of
/// pieces lying inside the cell, in traversal order.
fn collect_chains(lp: &TrimLoop, cell: &CellBox, chains: &mut Vec<Chain>) {
    let mut pieces: Vec<TrimSegment> = Vec::new();
    let mut kept: Vec<bool> = Vec::new();

    for seg in &lp.segments {
        let mut params = vec![0.0];
        for (axis, value) in [
            (0usize, cell.x0),
            (0, cell.x1),
            (1, cell.y0),
            (1, cell.y1),
        ] {
            params.extend(seg.line_crossings(axis, value));
        }
        params.push(1.0);
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        params.dedup_by(|a, b| (*a - *b).abs() < SNAP_TOL);
        for w in params.windows(2) {
            let piece = seg.sub_segment(w[0], w[1]);
            let mid = piece.eval(0.5);
            pieces.push(piece);
            kept.push(cell.contains_closed(mid, SNAP_TOL));
        }
    }

    let n = pieces.len();
    if n == 0 {
        return;
    }
    if kept.iter().all(|&k| k) {
        chains.push(Chain {
            arcs: pieces,
            closed: true,
        });
        return;
    }
    if kept.iter().all(|&k| !k) {
        return;
    }

    // Start at a piece whose predecessor is dropped, then sweep once around.
    let start = (0..n)
        .find(|&i| kept[i] && !kept[(i + n - 1) % n])
        .unwrap();
    let mut current: Vec<TrimSegment> = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        if kept[i] {
            current.push(pieces[i]);
        } else if !current.is_empty() {
            chains.push(Chain {
                arcs: std::mem::take(&mut current),
                closed: false,
            });
        }
    }
    if !current.is_empty() {
        chains.push(Chain {
            arcs: current,
            closed: false,
        });
    }
}

/// Close open chains with counter-clockwise runs along the cell boundary.
fn close_chains(cell: &CellBox, open: Vec<Chain>, out: &mut Vec<TrimLoop>) -> Result<()> {
    let total = 2.0 * (cell.width() + cell.height());
    let entries: Vec<f64> = open
        .iter()
        .map(|c| cell.perimeter_coord(c.start()))
        .collect::<Result<_>>()?;
    let exits: Vec<f64> = open
        .iter()
        .map(|c| cell.perimeter_coord(c.end()))
        .collect::<Result<_>>()?;

    let mut used = vec![false; open.len()];
    for first in 0..open.len() {
        if used[first] {
            continue;
        }
        let mut segments: Vec<TrimSegment> = Vec::new();
        let mut cur = first;
        loop {
            used[cur] = true;
            segments.extend(open[cur].arcs.iter().cloned());
            // Next entry in counter-clockwise perimeter order after this
            // chain's exit.
            let tau = exits[cur];
            let mut best: Option<(f64, usize)> = None;
            for (k, &tau_in) in entries.iter().enumerate() {
                if used[k] && k != first {
                    continue;
                }
                let mut d = (tau_in - tau).rem_euclid(total);
                if k == first && d < 1e-12 * total {
                    d = 0.0; // closing straight back onto the loop start
                }
                match best {
                    Some((bd, _)) if bd <= d => {}
                    _ => best = Some((d, k)),
                }
            }
            let (dist, next) = best.ok_or_else(|| {
                Error::ClipFailure("perimeter walk found no entry point".into())
            })?;
            // Emit the perimeter run, inserting cell corners passed on the
            // way. Endpoints reuse the exact chain coordinates.
            let from = open[cur].end();
            let to = open[next].start();
            let mut stops: Vec<(f64, RefPoint)> = Vec::new();
            for (k, &ctau) in cell.corner_coords().iter().enumerate() {
                let d = (ctau - tau).rem_euclid(total);
                if d > 1e-12 * total && d < dist - 1e-12 * total {
                    stops.push((d, cell.corner(k)));
                }
            }
            stops.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut prev = from;
            for (_, corner) in stops {
                if (corner - prev).norm() > SNAP_TOL {
                    segments.push(TrimSegment::line(prev, corner));
                    prev = corner;
                }
            }
            if (to - prev).norm() > SNAP_TOL {
                segments.push(TrimSegment::line(prev, to));
            }
            if next == first {
                break;
            }
            cur = next;
        }
        out.push(TrimLoop { segments });
    }
    Ok(())
}
