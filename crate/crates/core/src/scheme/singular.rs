//! Symbolic descriptions of the declared singular set.

use num_traits::{One, Zero};

use super::{Multipolygon, Rule};
use crate::rational::Rat;

const ORBIT_DEPTH: usize = 64;
const SEARCH_BUDGET: usize = 20_000;

/// A declared piece of the singular set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Singular {
    /// A boundary parameter together with all its images under the rules.
    Point { poly: usize, t: Rat },
    /// Cantor set in `[lo, hi]` keeping the outer fraction `ratio` on each side at every step.
    Cantor { poly: usize, lo: Rat, hi: Rat, ratio: Rat },
}

impl Singular {
    pub fn poly(&self) -> usize {
        match self {
            Singular::Point { poly, .. } | Singular::Cantor { poly, .. } => *poly,
        }
    }

    pub(crate) fn in_range(&self, mp: &Multipolygon) -> bool {
        let Some(p) = mp.polygons.get(self.poly()) else { return false };
        let zero = Rat::zero();
        match self {
            Singular::Point { t, .. } => *t >= zero && *t < p.length,
            Singular::Cantor { lo, hi, ratio, .. } => *lo >= zero && lo < hi && *hi <= p.length && *ratio > zero && *ratio * Rat::from_integer(2) < Rat::one(),
        }
    }

    /// Parameters certainly in the set, used for accumulation checks.
    pub fn representatives(&self) -> Vec<Rat> {
        match self {
            Singular::Point { t, .. } => vec![*t],
            Singular::Cantor { lo, hi, .. } => vec![*lo, *hi],
        }
    }

    pub fn contains(&self, poly: usize, t: &Rat, rules: &[Rule]) -> bool {
        if poly != self.poly() {
            return false;
        }
        match self {
            Singular::Point { t: p, .. } => orbit_contains(p, t, poly, rules, ORBIT_DEPTH),
            Singular::Cantor { lo, hi, ratio, .. } => cantor_contains(&((t - lo) / (hi - lo)), ratio),
        }
    }

    /// Whether the closed interval `[lo, hi]` meets the set.
    pub fn meets(&self, poly: usize, lo: &Rat, hi: &Rat, rules: &[Rule]) -> bool {
        if poly != self.poly() {
            return false;
        }
        match self {
            Singular::Point { t: p, .. } => {
                let mut budget = SEARCH_BUDGET;
                orbit_meets(p, lo, hi, poly, rules, ORBIT_DEPTH, &mut budget)
            }
            Singular::Cantor { lo: c0, hi: c1, ratio, .. } => {
                let w = c1 - c0;
                cantor_meets((lo - c0) / w, (hi - c0) / w, ratio)
            }
        }
    }
}

fn orbit_contains(p: &Rat, t: &Rat, poly: usize, rules: &[Rule], depth: usize) -> bool {
    if t == p {
        return true;
    }
    if depth == 0 {
        return false;
    }
    for r in rules.iter().filter(|r| r.poly == poly) {
        for (k, piece) in r.pieces.iter().enumerate() {
            if piece.dst_lo <= *t && *t <= piece.dst_hi {
                let pre = r.inverse(k, t);
                if pre != *t && orbit_contains(p, &pre, poly, rules, depth - 1) {
                    return true;
                }
            }
        }
    }
    false
}

fn orbit_meets(p: &Rat, lo: &Rat, hi: &Rat, poly: usize, rules: &[Rule], depth: usize, budget: &mut usize) -> bool {
    if lo <= p && p <= hi {
        return true;
    }
    if depth == 0 || *budget == 0 {
        return false;
    }
    *budget -= 1;
    for r in rules.iter().filter(|r| r.poly == poly) {
        for (k, piece) in r.pieces.iter().enumerate() {
            let l = (*lo).max(piece.dst_lo);
            let h = (*hi).min(piece.dst_hi);
            if l <= h {
                let (pl, ph) = (r.inverse(k, &l), r.inverse(k, &h));
                if (pl != l || ph != h) && orbit_meets(p, &pl, &ph, poly, rules, depth - 1, budget) {
                    return true;
                }
            }
        }
    }
    false
}

fn cantor_contains(x: &Rat, ratio: &Rat) -> bool {
    let (zero, one) = (Rat::zero(), Rat::one());
    let mut x = *x;
    let mut seen = Vec::new();
    for _ in 0..256 {
        if x < zero || x > one {
            return false;
        }
        if x == zero || x == one || seen.contains(&x) {
            return true;
        }
        seen.push(x);
        if x <= *ratio {
            x /= ratio;
        } else if x >= one - ratio {
            x = (x - (one - ratio)) / ratio;
        } else {
            return false;
        }
    }
    false
}

fn cantor_meets(mut x0: Rat, mut x1: Rat, ratio: &Rat) -> bool {
    let (zero, one) = (Rat::zero(), Rat::one());
    for _ in 0..128 {
        if x1 < zero || x0 > one {
            return false;
        }
        if x0 <= zero || x1 >= one {
            return true;
        }
        let right = one - ratio;
        if x1 <= *ratio {
            x0 /= ratio;
            x1 /= ratio;
        } else if x0 >= right {
            x0 = (x0 - right) / ratio;
            x1 = (x1 - right) / ratio;
        } else {
            return x0 <= *ratio || x1 >= right;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn cantor() -> Singular {
        Singular::Cantor { poly: 0, lo: rat(2, 3), hi: int(1), ratio: rat(1, 3) }
    }

    #[test]
    fn cantor_membership() {
        let c = cantor();
        assert!(c.contains(0, &rat(2, 3), &[]));
        assert!(c.contains(0, &rat(8, 9), &[]));
        assert!(c.contains(0, &rat(3, 4), &[]));
        assert!(!c.contains(0, &rat(5, 6), &[]));
        assert!(!c.contains(0, &rat(1, 2), &[]));
    }

    #[test]
    fn cantor_interval_meeting() {
        let c = cantor();
        assert!(c.meets(0, &rat(7, 9), &rat(8, 9), &[]));
        assert!(!c.meets(0, &(rat(7, 9) + rat(1, 100)), &(rat(8, 9) - rat(1, 100)), &[]));
        assert!(c.meets(0, &rat(1, 2), &rat(2, 3), &[]));
    }
}
