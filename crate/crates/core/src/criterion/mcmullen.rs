//! Nested annulus systems around the singular set, one level per merge window.

use std::collections::BTreeSet;

use num_traits::One;

use super::divergence::window_radii;
use super::{integral_lower_bound, Analysis, GoodnessProfile};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, to_f64, Rat};
use crate::scar::ScarPoint;
use crate::scheme::BoundaryParam;

/// Finest dyadic subdivision tried when looking for a planar inset.
const MAX_DYADIC: u32 = 40;

/// One equivalence class at one level with its annulus.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusClass {
    pub rep: BoundaryParam,
    /// Collapsed-scar nodes of the singular points in the class.
    pub members: Vec<usize>,
    pub eps: Rat,
    pub inner: Rat,
    pub outer: Rat,
    /// Lower bound of `∫ ι_Λ` over `[inner, outer]`.
    pub bound: f64,
    /// Lower bound of `∫ ι_Λ` over the whole window.
    pub window_bound: f64,
    /// Index of the enclosing class one level up.
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusLevel {
    pub k: usize,
    pub r_lo: Rat,
    pub r_hi: Rat,
    pub classes: Vec<AnnulusClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McMullenFlags {
    /// Annuli of one level are disjoint and each bounds a single component.
    pub unnested: bool,
    /// Every annulus sits inside the hole of an annulus one level up.
    pub nested: bool,
    /// Chain sums dominate the sum of window bounds less the inset losses.
    pub sums: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusSystem {
    pub levels: Vec<AnnulusLevel>,
    pub flags: McMullenFlags,
    /// Smallest sum of bounds along a chain from the first to the last level.
    pub chain_min: f64,
    /// `Σ_k (min_class window bound − 1/2^(k−1))`.
    pub chain_target: f64,
}

/// Largest dyadic inset keeping both annulus radii planar for this class.
fn choose_eps(prof: &GoodnessProfile, lo: &Rat, hi: &Rat, cap: &Rat, level: usize) -> Result<Rat> {
    let width = hi - lo;
    let mut blocking = String::new();
    for m in 2..=MAX_DYADIC {
        let eps = width / Rat::from_integer(1i128 << m);
        if eps > *cap {
            continue;
        }
        let a = lo + eps;
        let b = hi - eps;
        let planar = |s: &Rat| prof.pieces.iter().any(|p| p.certified && p.lo < *s && *s < p.hi);
        if planar(&a) && planar(&b) {
            return Ok(eps);
        }
        blocking = format!("radius {} or {}", fmt_rat(&a), fmt_rat(&b));
    }
    Err(Error::NoEpsilon { level, blocking: if blocking.is_empty() { "cap".into() } else { blocking } })
}

/// Annulus system for levels `first..=last`, where level `k` spans `[r_{k+1}, r_k]` and `r_1 = r̄`.
pub fn mcmullen_system(an: &Analysis, first: usize, last: usize) -> Result<AnnulusSystem> {
    if first == 0 || first > last {
        return Err(Error::OutOfRange(format!("levels {first}..{last}")));
    }
    let radii = window_radii(an);
    if radii.len() < last + 1 {
        return Err(Error::OutOfRange(format!("only {} merge windows below r̄", radii.len() - 1)));
    }
    let m = an.params.m;
    let sweep = &an.sweep_c;
    let mut levels: Vec<AnnulusLevel> = Vec::new();
    for k in first..=last {
        let (r_hi, r_lo) = (radii[k - 1], radii[k]);
        let mid = (r_lo + r_hi) / Rat::from_integer(2);
        let cap = (r_lo / (Rat::from_integer(1i128 << (k - 1)) * m)).min((r_hi - r_lo) / Rat::from_integer(3));
        let mut classes = Vec::new();
        for (_, seed) in sweep.components_at(&mid) {
            let rep = an.pair.collapse.representative(&ScarPoint::Node(seed));
            let prof = an.singular_profile(&rep, &r_lo, &r_hi)?;
            let eps = choose_eps(&prof, &r_lo, &r_hi, &cap, k)?;
            let inner = r_lo + eps;
            let outer = r_hi - eps;
            let bound = integral_lower_bound(&prof, &inner, &outer, true)?.scaled;
            let window_bound = integral_lower_bound(&prof, &r_lo, &r_hi, true)?.scaled;
            let members = sweep.members_at(seed, &mid);
            classes.push(AnnulusClass { rep, members, eps, inner, outer, bound, window_bound, parent: None });
        }
        levels.push(AnnulusLevel { k, r_lo, r_hi, classes });
    }

    let mut unnested = true;
    for lvl in &levels {
        let mut seen = BTreeSet::new();
        for c in &lvl.classes {
            let seed = c.members[0];
            let at = |s: &Rat| sweep.members_at(seed, s);
            unnested &= at(&c.inner) == c.members && at(&c.outer) == c.members;
            unnested &= c.members.iter().all(|x| seen.insert(*x));
        }
    }

    let mut nested = true;
    for i in 1..levels.len() {
        let (up, down) = levels.split_at_mut(i);
        let parent_level = &up[i - 1];
        for c in &mut down[0].classes {
            let parent = parent_level.classes.iter().position(|p| c.members.iter().all(|x| p.members.contains(x)));
            nested &= parent.is_some_and(|p| c.outer <= parent_level.classes[p].inner);
            c.parent = parent;
        }
    }

    let target: f64 = levels
        .iter()
        .map(|l| {
            let w = l.classes.iter().map(|c| c.window_bound).fold(f64::INFINITY, f64::min);
            w - 1.0 / to_f64(&Rat::from_integer(1i128 << (l.k - 1)))
        })
        .sum();
    let mut chain_min = f64::INFINITY;
    let mut sums = true;
    if let Some(deepest) = levels.last() {
        for i in 0..deepest.classes.len() {
            let mut total = 0.0;
            let mut cur = Some(i);
            for lvl in levels.iter().rev() {
                let Some(j) = cur else { break };
                total += lvl.classes[j].bound;
                cur = lvl.classes[j].parent;
            }
            chain_min = chain_min.min(total);
        }
    }
    for lvl in &levels {
        let loss = Rat::one() / Rat::from_integer(1i128 << (lvl.k - 1));
        sums &= lvl.classes.iter().all(|c| c.bound >= c.window_bound - to_f64(&loss));
    }
    sums &= chain_min >= target;
    Ok(AnnulusSystem { levels, flags: McMullenFlags { unnested, nested, sums }, chain_min, chain_target: target })
}
