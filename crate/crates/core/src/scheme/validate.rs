//! Validation report: simplicity, disjointness, fullness and generator consistency.

use super::{truncate_depth, FoldingScheme, Multipolygon, Polygon};
use crate::rational::{fmt_rat, Rat};

/// Expansion depths at which declared singular parameters must border a gap.
pub const ACCUMULATION_DEPTHS: std::ops::RangeInclusive<usize> = 1..=3;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub total_pairing_length: Rat,
    pub half_boundary: Rat,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, result: Result<String, String>) -> Check {
    match result {
        Ok(detail) => Check { name, passed: true, detail },
        Err(detail) => Check { name, passed: false, detail },
    }
}

fn interval(lo: &Rat, hi: &Rat) -> String {
    format!("[{}, {}]", fmt_rat(lo), fmt_rat(hi))
}

/// First pair of closed intervals with overlapping interiors, with the overlap.
fn first_overlap(items: &mut [(usize, Rat, Rat, String)]) -> Option<String> {
    items.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    for w in items.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        if x.0 == y.0 && y.1 < x.2 {
            let hi = x.2.min(y.2);
            return Some(format!("{} and {} overlap on {}", x.3, y.3, interval(&y.1, &hi)));
        }
    }
    None
}

fn disjointness(scheme: &FoldingScheme) -> Result<String, String> {
    let g = &scheme.generator;
    let mut segs = Vec::new();
    for (i, p) in g.base.iter().enumerate() {
        segs.push((p.poly, p.a0, p.a1, format!("pairing {i} segment {}", interval(&p.a0, &p.a1))));
        segs.push((p.poly, p.b0, p.b1, format!("pairing {i} segment {}", interval(&p.b0, &p.b1))));
    }
    let mut dst = Vec::new();
    for r in &g.rules {
        let mut src = Vec::new();
        for piece in &r.pieces {
            dst.push((r.poly, piece.dst_lo, piece.dst_hi, format!("rule {} image {}", r.id, interval(&piece.dst_lo, &piece.dst_hi))));
            src.push((r.poly, piece.src_lo, piece.src_hi, format!("rule {} source {}", r.id, interval(&piece.src_lo, &piece.src_hi))));
        }
        if let Some(m) = first_overlap(&mut src) {
            return Err(m);
        }
    }
    let mut all = segs.clone();
    all.extend(dst.iter().cloned());
    if let Some(m) = first_overlap(&mut all) {
        return Err(m);
    }
    Ok(format!("{} base segments and {} rule images are interior disjoint; rules preserve nesting", segs.len(), dst.len()))
}

fn accumulation(scheme: &FoldingScheme) -> Result<String, String> {
    if scheme.generator.singular.is_empty() {
        return Ok("no singular set declared".into());
    }
    for depth in ACCUMULATION_DEPTHS {
        let fs = truncate_depth(scheme, depth).map_err(|e| e.to_string())?;
        for s in &scheme.generator.singular {
            for t in s.representatives() {
                let ok = fs.gaps.iter().any(|gap| gap.poly == s.poly() && gap.lo <= t && t <= gap.hi);
                if !ok {
                    return Err(format!("singular parameter {} is not adjacent to a gap at depth {depth}", fmt_rat(&t)));
                }
            }
        }
    }
    Ok(format!("declared singular parameters border gaps at depths {ACCUMULATION_DEPTHS:?}"))
}

/// Runs every structural check; failures are report entries, never errors.
pub fn validate(scheme: &FoldingScheme) -> ValidationReport {
    let mp = &scheme.multipolygon;
    let simple = mp
        .polygons
        .iter()
        .enumerate()
        .try_for_each(|(i, p)| Polygon::new(i, p.vertices.clone()).map(|_| ()))
        .map(|_| format!("{} simple positively oriented polygon(s)", mp.polygons.len()))
        .map_err(|e| e.to_string());
    let disjoint_polys = Multipolygon::new(mp.polygons.clone()).map(|_| "polygons pairwise disjoint".to_string()).map_err(|e| e.to_string());
    let total = scheme.total_pairing_length();
    let half = mp.boundary_length() / Rat::from_integer(2);
    let full = if total == half {
        Ok(format!("total pairing length {} equals |∂P|/2", fmt_rat(&total)))
    } else {
        Err(format!("total pairing length {} differs from |∂P|/2 = {}", fmt_rat(&total), fmt_rat(&half)))
    };
    ValidationReport {
        checks: vec![
            check("simplicity", simple),
            check("polygon_disjointness", disjoint_polys),
            check("interior_disjointness", disjointness(scheme)),
            check("fullness", full),
            check("generator_consistency", accumulation(scheme)),
        ],
        total_pairing_length: total,
        half_boundary: half,
    }
}
