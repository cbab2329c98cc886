//! Plain-text reader for trim loops.
//!
//! Format, one segment per line: the degree followed by the monomial
//! coefficients of both coordinates, low order first,
//!
//! ```text
//! # comment
//! 1  x0 x1  y0 y1        (line: x0 + x1 s, y0 + y1 s)
//! 2  x0 x1 x2  y0 y1 y2  (quadratic)
//! loop                   (starts the next loop; first loop is the outer one)
//! ```

use super::{RefSubdomain, TrimLoop, TrimSegment};
use crate::{Error, Result};
use std::path::Path;

pub fn parse_subdomain(text: &str) -> Result<RefSubdomain> {
    let mut loops: Vec<Vec<TrimSegment>> = vec![Vec::new()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case("loop") {
            loops.push(Vec::new());
            continue;
        }
        let mut fields = line.split_whitespace();
        let bad = |msg: &str| Error::TrimFile {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let degree: usize = fields
            .next()
            .ok_or_else(|| bad("missing degree"))?
            .parse()
            .map_err(|_| bad("degree is not an integer"))?;
        if degree == 0 || degree > 2 {
            return Err(bad("degree must be 1 or 2"));
        }
        let expected = 2 * (degree + 1);
        let values: Vec<f64> = fields
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("coefficient is not a number"))?;
        if values.len() != expected {
            return Err(bad(&format!(
                "expected {expected} coefficients for degree {degree}, got {}",
                values.len()
            )));
        }
        let mut coeffs = [[0.0; 3]; 2];
        for d in 0..2 {
            for m in 0..=degree {
                coeffs[d][m] = values[d * (degree + 1) + m];
            }
        }
        loops
            .last_mut()
            .unwrap()
            .push(TrimSegment::from_coeffs(degree, coeffs)?);
    }
    loops.retain(|l| !l.is_empty());
    if loops.is_empty() {
        return Err(Error::TrimFile {
            line: 0,
            msg: "file contains no segments".into(),
        });
    }
    RefSubdomain::new(
        loops
            .into_iter()
            .map(|segments| TrimLoop::new(segments))
            .collect::<Result<_>>()?,
    )
}

pub fn read_subdomain(path: &Path) -> Result<RefSubdomain> {
    parse_subdomain(&std::fs::read_to_string(path)?)
}
