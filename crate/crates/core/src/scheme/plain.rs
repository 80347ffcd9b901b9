//! Plainness: a single polygon whose pairings are pairwise unlinked.

use super::{truncate_depth, FoldingScheme, SegmentPairing};

/// Expansion depth used for the finite unlinkedness scan of generators.
const PLAIN_CHECK_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum PlainnessResult {
    Plain,
    MultiplePolygons(usize),
    /// Two pairings whose endpoint pairs interleave on the boundary circle.
    Linked(SegmentPairing, SegmentPairing),
    /// The rules could not be checked (the expansion failed); carries the reason.
    Undecided(String),
}

impl PlainnessResult {
    pub fn is_plain(&self) -> bool {
        matches!(self, PlainnessResult::Plain)
    }
}

/// Indices of two interleaving pairings, found by a balanced-parenthesis scan.
///
/// Pairings must lie on one polygon with interior-disjoint segments.
pub fn linked_pair(pairings: &[SegmentPairing]) -> Option<(usize, usize)> {
    let mut tokens: Vec<(&crate::rational::Rat, usize, bool)> = Vec::with_capacity(2 * pairings.len());
    for (i, p) in pairings.iter().enumerate() {
        tokens.push((&p.a0, i, true));
        tokens.push((&p.b0, i, false));
    }
    tokens.sort_by(|x, y| x.0.cmp(y.0).then(x.2.cmp(&y.2)));
    let mut stack: Vec<usize> = Vec::new();
    for (_, i, opens) in tokens {
        if opens {
            stack.push(i);
        } else {
            match stack.last() {
                Some(&top) if top == i => {
                    stack.pop();
                }
                Some(&top) => return Some((top.min(i), top.max(i))),
                None => return Some((i, i)),
            }
        }
    }
    None
}

/// Decides plainness; generators are scanned on their expansion to a fixed depth, which
/// suffices because validated rules map into single complementary gaps of the base pairings.
pub fn is_plain(scheme: &FoldingScheme) -> PlainnessResult {
    let n = scheme.multipolygon.polygons.len();
    if n != 1 {
        return PlainnessResult::MultiplePolygons(n);
    }
    let fs = match truncate_depth(scheme, PLAIN_CHECK_DEPTH) {
        Ok(fs) => fs,
        Err(e) => return PlainnessResult::Undecided(e.to_string()),
    };
    let pairings: Vec<SegmentPairing> = fs.pairings.iter().map(|g| g.pairing.clone()).collect();
    match linked_pair(&pairings) {
        None => PlainnessResult::Plain,
        Some((i, j)) => PlainnessResult::Linked(pairings[i].clone(), pairings[j].clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::scheme::{builtin_example, parse_scheme};

    #[test]
    fn builtins_are_plain() {
        for name in ["seq", "cantor", "seqpoly"] {
            assert_eq!(is_plain(&builtin_example(name).unwrap()), PlainnessResult::Plain, "{name}");
        }
    }

    #[test]
    fn torus_is_linked() {
        let s = parse_scheme("polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1 2 3\npair 0 1 2 3 4\n").unwrap();
        match is_plain(&s) {
            PlainnessResult::Linked(a, b) => {
                assert_eq!((a.a0, b.a0), (int(0), int(1)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_polygons_are_not_plain() {
        let s = parse_scheme("polygon 0 0 0 1 0 1 1 0 1\npolygon 1 2 0 3 0 3 1 2 1\npair 0 0 1 1 2\npair 0 2 3 3 4\npair 1 0 1 1 2\npair 1 2 3 3 4\n").unwrap();
        assert_eq!(is_plain(&s), PlainnessResult::MultiplePolygons(2));
    }
}
