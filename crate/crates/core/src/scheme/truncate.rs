//! Finite truncations of a scheme: expanded pairings, unpaired gaps and tail groups.
//!
//! Gaps joined by an unexpanded pairing are placed in the same tail group; collapsing each
//! group to a point then only adds identifications, so tree distances remain lower bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use num_traits::Zero;

use super::generator::Origin;
use super::{FoldingScheme, GenPairing};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};

/// Upper bound on the number of expanded pairings.
pub const MAX_PAIRINGS: usize = 3_000_000;

/// Generations of unexpanded descendants inspected when linking gaps into groups.
const LINK_DEPTH: usize = 3;

/// An unpaired boundary interval of a truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub poly: usize,
    pub lo: Rat,
    pub hi: Rat,
    /// Tail group index.
    pub group: usize,
}

impl Gap {
    pub fn length(&self) -> Rat {
        self.hi - self.lo
    }
}

/// A finite set of pairings plus the unpaired gaps, tiling ∂P exactly.
#[derive(Clone, Debug)]
pub struct FiniteScheme {
    pub scheme: Arc<FoldingScheme>,
    pub pairings: Vec<GenPairing>,
    pub gaps: Vec<Gap>,
    /// Total gap length.
    pub tail_measure: Rat,
    pub group_count: usize,
    /// Whether the tail grouping was unchanged by the last inspected generation.
    pub grouping_stable: bool,
}

struct Cand(GenPairing, Rat);

impl PartialEq for Cand {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cand {}
impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1.cmp(&other.1).then_with(|| other.0.pairing.poly.cmp(&self.0.pairing.poly)).then_with(|| other.0.pairing.a0.cmp(&self.0.pairing.a0))
    }
}

fn base_items(scheme: &FoldingScheme) -> Vec<GenPairing> {
    scheme.generator.base.iter().enumerate().map(|(i, p)| GenPairing { pairing: p.clone(), origin: Origin::Base(i), family: i, depth: 0 }).collect()
}

/// Expands pairings by decreasing length (ties: smaller start first) until the gaps total at most `eps`.
pub fn truncate(scheme: &FoldingScheme, eps: &Rat) -> Result<FiniteScheme> {
    if *eps <= Rat::zero() {
        return Err(Error::OutOfRange(format!("truncation eps must be positive, got {}", fmt_rat(eps))));
    }
    if scheme.generator.is_finite() {
        return finish(scheme, base_items(scheme), Vec::new());
    }
    let boundary = scheme.multipolygon.boundary_length();
    let mut heap: BinaryHeap<Cand> = base_items(scheme)
        .into_iter()
        .map(|g| {
            let l = g.pairing.length();
            Cand(g, l)
        })
        .collect();
    let mut included = Vec::new();
    let mut covered = Rat::zero();
    while boundary - covered * Rat::from_integer(2) > *eps {
        let Some(Cand(g, len)) = heap.pop() else { break };
        covered += len;
        for c in scheme.mass.children(&scheme.generator.rules, &g) {
            let l = c.pairing.length();
            heap.push(Cand(c, l));
        }
        included.push(g);
        if included.len() > MAX_PAIRINGS {
            return Err(Error::Budget(format!("more than {MAX_PAIRINGS} pairings needed for eps = {}", fmt_rat(eps))));
        }
    }
    finish(scheme, included, heap.into_vec().into_iter().map(|c| c.0).collect())
}

/// Expands every pairing produced by at most `depth` rule applications.
pub fn truncate_depth(scheme: &FoldingScheme, depth: usize) -> Result<FiniteScheme> {
    let mut included = Vec::new();
    let mut layer = base_items(scheme);
    for d in 0..=depth {
        let mut next = Vec::new();
        for g in &layer {
            next.extend(scheme.mass.children(&scheme.generator.rules, g));
        }
        included.append(&mut layer);
        if included.len() > MAX_PAIRINGS {
            return Err(Error::Budget(format!("more than {MAX_PAIRINGS} pairings at depth {d}")));
        }
        layer = next;
    }
    finish(scheme, included, layer)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
        a != b
    }
}

fn gap_of(gaps: &[Gap], poly: usize, lo: &Rat, hi: &Rat) -> Option<usize> {
    let idx = gaps.partition_point(|g| (g.poly, &g.lo) <= (poly, lo));
    let i = idx.checked_sub(1)?;
    let g = &gaps[i];
    (g.poly == poly && g.lo <= *lo && *hi <= g.hi).then_some(i)
}

fn finish(scheme: &FoldingScheme, pairings: Vec<GenPairing>, frontier: Vec<GenPairing>) -> Result<FiniteScheme> {
    let polys = &scheme.multipolygon.polygons;
    let mut segs: Vec<(usize, Rat, Rat)> = Vec::with_capacity(2 * pairings.len());
    for g in &pairings {
        let p = &g.pairing;
        segs.push((p.poly, p.a0, p.a1));
        segs.push((p.poly, p.b0, p.b1));
    }
    segs.sort();
    let mut gaps = Vec::new();
    let mut wrap_pairs = Vec::new();
    for (pi, poly) in polys.iter().enumerate() {
        let start = gaps.len();
        let mut cursor = Rat::zero();
        for (_, lo, hi) in segs.iter().filter(|s| s.0 == pi) {
            if *lo < cursor {
                return Err(Error::InvalidScheme(format!("pairing segments overlap on [{}, {}]", fmt_rat(lo), fmt_rat(&cursor))));
            }
            if *lo > cursor {
                gaps.push(Gap { poly: pi, lo: cursor, hi: *lo, group: 0 });
            }
            cursor = *hi;
        }
        if cursor < poly.length {
            gaps.push(Gap { poly: pi, lo: cursor, hi: poly.length, group: 0 });
        }
        let end = gaps.len();
        if end - start >= 2 && gaps[start].lo.is_zero() && gaps[end - 1].hi == poly.length {
            wrap_pairs.push((start, end - 1));
        }
    }
    let tail_measure: Rat = gaps.iter().map(|g| g.length()).sum();

    let mut dsu = Dsu((0..gaps.len()).collect());
    for (a, b) in wrap_pairs {
        dsu.union(a, b);
    }
    let rules = &scheme.generator.rules;
    let mut layer = frontier;
    let mut merges_in_last = 0;
    for d in 0..=LINK_DEPTH {
        merges_in_last = 0;
        let mut next = Vec::new();
        for g in &layer {
            let p = &g.pairing;
            let ga = gap_of(&gaps, p.poly, &p.a0, &p.a1);
            let gb = gap_of(&gaps, p.poly, &p.b0, &p.b1);
            let (Some(ga), Some(gb)) = (ga, gb) else {
                return Err(Error::InvalidScheme(format!(
                    "unexpanded pairing [{}, {}] [{}, {}] is not inside the gaps",
                    fmt_rat(&p.a0),
                    fmt_rat(&p.a1),
                    fmt_rat(&p.b0),
                    fmt_rat(&p.b1)
                )));
            };
            if dsu.union(ga, gb) {
                merges_in_last += 1;
            }
            if d < LINK_DEPTH {
                next.extend(scheme.mass.children(rules, g));
            }
        }
        layer = next;
    }
    let mut group_of_root = std::collections::HashMap::new();
    for i in 0..gaps.len() {
        let r = dsu.find(i);
        let next = group_of_root.len();
        gaps[i].group = *group_of_root.entry(r).or_insert(next);
    }
    Ok(FiniteScheme { scheme: Arc::new(scheme.clone()), pairings, gaps, tail_measure, group_count: group_of_root.len(), grouping_stable: merges_in_last == 0 })
}

impl FiniteScheme {
    pub fn boundary_length(&self) -> Rat {
        self.scheme.multipolygon.boundary_length()
    }

    /// Gaps of one tail group.
    pub fn group_gaps(&self, group: usize) -> impl Iterator<Item = &Gap> {
        self.gaps.iter().filter(move |g| g.group == group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scheme::builtin_example;

    #[test]
    fn seq_truncation_tiles_the_boundary() {
        let s = builtin_example("seq").unwrap();
        let fs = truncate(&s, &rat(1, 64)).unwrap();
        assert!(fs.tail_measure <= rat(1, 64));
        let covered: Rat = fs.pairings.iter().map(|g| g.pairing.length() * int(2)).sum();
        assert_eq!(covered + fs.tail_measure, int(4));
        assert!(fs.grouping_stable);
    }

    #[test]
    fn truncation_refines() {
        let s = builtin_example("cantor").unwrap();
        let coarse = truncate(&s, &rat(1, 8)).unwrap();
        let fine = truncate(&s, &rat(1, 32)).unwrap();
        for g in &coarse.pairings {
            assert!(fine.pairings.iter().any(|h| h.pairing == g.pairing));
        }
    }

    #[test]
    fn rejects_non_positive_eps() {
        let s = builtin_example("seq").unwrap();
        assert!(truncate(&s, &int(0)).is_err());
    }
}
