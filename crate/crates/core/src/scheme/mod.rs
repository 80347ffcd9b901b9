//! Paper-folding schemes: polygons, segment pairings, self-similar generators.

mod builtin;
mod generator;
mod pfs;
mod plain;
mod polygon;
mod singular;
mod truncate;
mod validate;

pub use builtin::{builtin_example, BUILTIN_NAMES};
pub use generator::{GenPairing, MassSystem};
pub use pfs::{parse_scheme, serialize_scheme};
pub use plain::{is_plain, linked_pair, PlainnessResult};
pub use polygon::{segments_intersect, Multipolygon, Point, Polygon};
pub use singular::Singular;
pub use truncate::{truncate, truncate_depth, FiniteScheme, Gap};
pub use validate::{validate, Check, ValidationReport};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};

/// A point of ∂P given by polygon index and arc-length parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryParam {
    pub poly: usize,
    pub t: Rat,
}

impl BoundaryParam {
    pub fn new(poly: usize, t: Rat) -> Self {
        BoundaryParam { poly, t }
    }
}

/// Two boundary segments `[a0,a1]` and `[b0,b1]` of one polygon glued by `a0+s ↔ b1-s`.
///
/// Stored normalized with `a0 < b0`; the gluing is symmetric so this loses nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SegmentPairing {
    pub poly: usize,
    pub a0: Rat,
    pub a1: Rat,
    pub b0: Rat,
    pub b1: Rat,
}

impl SegmentPairing {
    pub fn new(poly: usize, a0: Rat, a1: Rat, b0: Rat, b1: Rat) -> Result<Self> {
        if a1 <= a0 || b1 <= b0 {
            return Err(Error::InvalidScheme(format!(
                "pairing segments must have positive length and increasing endpoints: [{}, {}] [{}, {}]",
                fmt_rat(&a0),
                fmt_rat(&a1),
                fmt_rat(&b0),
                fmt_rat(&b1)
            )));
        }
        if a1 - a0 != b1 - b0 {
            return Err(Error::LengthMismatch { line: None, a_len: fmt_rat(&(a1 - a0)), b_len: fmt_rat(&(b1 - b0)) });
        }
        let (a0, a1, b0, b1) = if a0 <= b0 { (a0, a1, b0, b1) } else { (b0, b1, a0, a1) };
        if a1 > b0 {
            return Err(Error::InvalidScheme(format!(
                "the two segments of a pairing overlap: [{}, {}] [{}, {}]",
                fmt_rat(&a0),
                fmt_rat(&a1),
                fmt_rat(&b0),
                fmt_rat(&b1)
            )));
        }
        Ok(SegmentPairing { poly, a0, a1, b0, b1 })
    }

    pub fn length(&self) -> Rat {
        self.a1 - self.a0
    }

    pub fn segments(&self) -> [(Rat, Rat); 2] {
        [(self.a0, self.a1), (self.b0, self.b1)]
    }

    /// The two segments share an endpoint on the boundary circle of length `l`.
    pub fn is_fold(&self, l: &Rat) -> bool {
        self.a1 == self.b0 || (self.a0.is_zero() && &self.b1 == l)
    }

    /// Partner parameter of `t` under the gluing, if `t` lies on one of the segments.
    pub fn partner(&self, t: &Rat) -> Option<Rat> {
        if *t >= self.a0 && *t <= self.a1 {
            Some(self.b1 - (t - self.a0))
        } else if *t >= self.b0 && *t <= self.b1 {
            Some(self.a1 - (t - self.b0))
        } else {
            None
        }
    }
}

/// One affine piece `[src_lo,src_hi] → [dst_lo,dst_hi]` of a rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RulePiece {
    pub src_lo: Rat,
    pub src_hi: Rat,
    pub dst_lo: Rat,
    pub dst_hi: Rat,
}

/// An affine self-similarity with contraction `sigma`, made of one or more increasing pieces.
///
/// The rule replicates every pairing whose two segments each lie in some source piece.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: usize,
    pub poly: usize,
    pub sigma: Rat,
    pub pieces: Vec<RulePiece>,
}

impl Rule {
    pub fn map(&self, piece: usize, x: &Rat) -> Rat {
        let p = &self.pieces[piece];
        p.dst_lo + self.sigma * (x - p.src_lo)
    }

    pub fn inverse(&self, piece: usize, y: &Rat) -> Rat {
        let p = &self.pieces[piece];
        p.src_lo + (y - p.dst_lo) / self.sigma
    }

    /// Source piece containing the closed interval `[lo, hi]`.
    pub fn source_piece(&self, lo: &Rat, hi: &Rat) -> Option<usize> {
        self.pieces.iter().position(|p| p.src_lo <= *lo && *hi <= p.src_hi)
    }

    /// Image of a pairing, with the source pieces used for its two segments.
    pub fn apply(&self, p: &SegmentPairing) -> Option<SegmentPairing> {
        if p.poly != self.poly {
            return None;
        }
        let ia = self.source_piece(&p.a0, &p.a1)?;
        let ib = self.source_piece(&p.b0, &p.b1)?;
        let (a0, a1) = (self.map(ia, &p.a0), self.map(ia, &p.a1));
        let (b0, b1) = (self.map(ib, &p.b0), self.map(ib, &p.b1));
        let (a0, a1, b0, b1) = if a0 <= b0 { (a0, a1, b0, b1) } else { (b0, b1, a0, a1) };
        Some(SegmentPairing { poly: p.poly, a0, a1, b0, b1 })
    }
}

/// Base pairings plus replication rules plus the declared singular set.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PairingGenerator {
    pub base: Vec<SegmentPairing>,
    pub rules: Vec<Rule>,
    pub singular: Vec<Singular>,
}

impl PairingGenerator {
    pub fn is_finite(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Scheme name and optional overrides for the injectivity radius and collar height.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Meta {
    pub name: String,
    pub rbar: Option<Rat>,
    pub hbar: Option<Rat>,
}

/// A multipolygon together with a full, interior-disjoint collection of segment pairings.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldingScheme {
    pub multipolygon: Multipolygon,
    pub generator: PairingGenerator,
    pub meta: Meta,
    pub mass: MassSystem,
}

impl FoldingScheme {
    /// Assembles a scheme, checking ranges, rule consistency and exact fullness.
    pub fn new(multipolygon: Multipolygon, generator: PairingGenerator, meta: Meta) -> Result<Self> {
        let np = multipolygon.polygons.len();
        let in_range = |poly: usize, t: &Rat| poly < np && !t.is_negative() && *t <= multipolygon.polygons[poly].length;
        for p in &generator.base {
            if !in_range(p.poly, &p.a0) || !in_range(p.poly, &p.b1) {
                return Err(Error::OutOfRange(format!(
                    "pairing [{}, {}] [{}, {}] on polygon {}",
                    fmt_rat(&p.a0),
                    fmt_rat(&p.a1),
                    fmt_rat(&p.b0),
                    fmt_rat(&p.b1),
                    p.poly
                )));
            }
        }
        for r in &generator.rules {
            if r.sigma <= Rat::zero() || r.sigma >= Rat::one() {
                return Err(Error::InvalidScheme(format!("rule {} has contraction {} outside (0,1)", r.id, fmt_rat(&r.sigma))));
            }
            for piece in &r.pieces {
                let ok = in_range(r.poly, &piece.src_lo)
                    && in_range(r.poly, &piece.src_hi)
                    && in_range(r.poly, &piece.dst_lo)
                    && in_range(r.poly, &piece.dst_hi)
                    && piece.src_lo < piece.src_hi
                    && piece.dst_lo < piece.dst_hi;
                if !ok {
                    return Err(Error::OutOfRange(format!(
                        "rule {} piece [{}, {}] -> [{}, {}]",
                        r.id,
                        fmt_rat(&piece.src_lo),
                        fmt_rat(&piece.src_hi),
                        fmt_rat(&piece.dst_lo),
                        fmt_rat(&piece.dst_hi)
                    )));
                }
                if piece.dst_hi - piece.dst_lo != r.sigma * (piece.src_hi - piece.src_lo) {
                    return Err(Error::InvalidScheme(format!(
                        "rule {} piece [{}, {}] -> [{}, {}] does not scale by {}",
                        r.id,
                        fmt_rat(&piece.src_lo),
                        fmt_rat(&piece.src_hi),
                        fmt_rat(&piece.dst_lo),
                        fmt_rat(&piece.dst_hi),
                        fmt_rat(&r.sigma)
                    )));
                }
            }
        }
        for s in &generator.singular {
            if !s.in_range(&multipolygon) {
                return Err(Error::OutOfRange(format!("singular description {s:?}")));
            }
        }
        let mass = MassSystem::build(&generator)?;
        let total = mass.total_length(&generator);
        let expected = multipolygon.boundary_length() / Rat::from_integer(2);
        if total != expected {
            return Err(Error::Fullness { total: fmt_rat(&total), expected: fmt_rat(&expected) });
        }
        Ok(FoldingScheme { multipolygon, generator, meta, mass })
    }

    pub fn polygon_length(&self, poly: usize) -> &Rat {
        &self.multipolygon.polygons[poly].length
    }

    /// Total pairing length of the full expansion, exact.
    pub fn total_pairing_length(&self) -> Rat {
        self.mass.total_length(&self.generator)
    }

    /// Whether `t` on polygon `poly` belongs to the declared singular set.
    pub fn is_singular(&self, poly: usize, t: &Rat) -> bool {
        self.generator.singular.iter().any(|s| s.contains(poly, t, &self.generator.rules))
    }

    /// Whether the closed interval `[lo, hi]` meets the declared singular set.
    pub fn interval_meets_singular(&self, poly: usize, lo: &Rat, hi: &Rat) -> bool {
        self.generator.singular.iter().any(|s| s.meets(poly, lo, hi, &self.generator.rules))
    }
}
