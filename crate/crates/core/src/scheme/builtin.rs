//! Built-in schemes: the sequence-of-singularities square, the Cantor square, and a
//! polynomially shrinking variant of the former.

use super::{FoldingScheme, Meta, Multipolygon, PairingGenerator, Point, Polygon, Rule, RulePiece, SegmentPairing, Singular};
use crate::error::{Error, Result};
use crate::rational::{int, rat, Rat};

pub const BUILTIN_NAMES: [&str; 3] = ["seq", "cantor", "seqpoly"];

/// Number of explicit blocks in `seqpoly` before the self-similar tail.
const SEQPOLY_BLOCKS: i128 = 16;

fn unit_square() -> Multipolygon {
    let v = [(0, 0), (1, 0), (1, 1), (0, 1)].iter().map(|&(x, y)| Point::new(int(x), int(y))).collect();
    Multipolygon::new(vec![Polygon::new(0, v).expect("unit square is simple")]).expect("single polygon")
}

fn pair(a0: Rat, a1: Rat, b0: Rat, b1: Rat) -> SegmentPairing {
    SegmentPairing::new(0, a0, a1, b0, b1).expect("builtin pairing is well formed")
}

fn simple_rule(id: usize, src: (Rat, Rat), dst: (Rat, Rat), sigma: Rat) -> Rule {
    Rule { id, poly: 0, sigma, pieces: vec![RulePiece { src_lo: src.0, src_hi: src.1, dst_lo: dst.0, dst_hi: dst.1 }] }
}

/// Vertical sides glued to each other and the top side folded at its midpoint.
fn square_frame() -> Vec<SegmentPairing> {
    vec![pair(int(1), int(2), int(3), int(4)), pair(int(2), rat(5, 2), rat(5, 2), int(3))]
}

/// Returns the named built-in scheme.
pub fn builtin_example(name: &str) -> Result<FoldingScheme> {
    match name {
        "seq" => seq(),
        "cantor" => cantor(),
        "seqpoly" => seqpoly(),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Bottom side: blocks `[1/2^{j+1}, 1/2^j]`, each carrying one arc pairing and a
/// sequence of folds halving towards the block's hub.
fn seq() -> Result<FoldingScheme> {
    let mut base = square_frame();
    base.push(pair(rat(1, 2), rat(5, 8), rat(7, 8), int(1)));
    base.push(pair(rat(3, 4), rat(13, 16), rat(13, 16), rat(7, 8)));
    let rules =
        vec![simple_rule(1, (int(0), int(1)), (int(0), rat(1, 2)), rat(1, 2)), simple_rule(2, (rat(5, 8), rat(7, 8)), (rat(5, 8), rat(3, 4)), rat(1, 2))];
    let singular = vec![Singular::Point { poly: 0, t: int(0) }, Singular::Point { poly: 0, t: rat(5, 8) }];
    FoldingScheme::new(unit_square(), PairingGenerator { base, rules, singular }, Meta { name: "seq".into(), rbar: None, hbar: None })
}

/// Bottom side: `[0, 2/3]` carries the Cantor construction intervals, each split in quarters
/// whose outer quarters are glued into `[2/3, 1]` and whose inner quarters form a fold.
fn cantor() -> Result<FoldingScheme> {
    let mut base = square_frame();
    base.push(pair(rat(2, 9), rat(5, 18), rat(5, 6), rat(8, 9)));
    base.push(pair(rat(5, 18), rat(1, 3), rat(1, 3), rat(7, 18)));
    base.push(pair(rat(7, 18), rat(4, 9), rat(7, 9), rat(5, 6)));
    let third = rat(1, 3);
    let rules = vec![
        Rule {
            id: 1,
            poly: 0,
            sigma: third,
            pieces: vec![
                RulePiece { src_lo: int(0), src_hi: rat(2, 3), dst_lo: int(0), dst_hi: rat(2, 9) },
                RulePiece { src_lo: rat(2, 3), src_hi: int(1), dst_lo: rat(8, 9), dst_hi: int(1) },
            ],
        },
        Rule {
            id: 2,
            poly: 0,
            sigma: third,
            pieces: vec![
                RulePiece { src_lo: int(0), src_hi: rat(2, 3), dst_lo: rat(4, 9), dst_hi: rat(2, 3) },
                RulePiece { src_lo: rat(2, 3), src_hi: int(1), dst_lo: rat(2, 3), dst_hi: rat(7, 9) },
            ],
        },
    ];
    let singular = vec![Singular::Cantor { poly: 0, lo: rat(2, 3), hi: int(1), ratio: rat(1, 3) }];
    FoldingScheme::new(unit_square(), PairingGenerator { base, rules, singular }, Meta { name: "cantor".into(), rbar: Some(rat(1, 6)), hbar: Some(rat(1, 4)) })
}

/// Like `seq`, but block `j` is `[1/(j+2), 1/(j+1)]`, so hub distances shrink like `1/j^2`.
/// After the explicit blocks the whole bottom side is replicated into `[0, 1/(J+1)]`.
fn seqpoly() -> Result<FoldingScheme> {
    let mut base = square_frame();
    let mut rules = Vec::new();
    let mut singular = vec![Singular::Point { poly: 0, t: int(0) }];
    for j in 0..SEQPOLY_BLOCKS {
        let lo = rat(1, j + 2);
        let w = rat(1, (j + 1) * (j + 2));
        let phi = |x: Rat| lo + w * x;
        base.push(pair(phi(int(0)), phi(rat(1, 4)), phi(rat(3, 4)), phi(int(1))));
        base.push(pair(phi(rat(1, 2)), phi(rat(5, 8)), phi(rat(5, 8)), phi(rat(3, 4))));
        rules.push(simple_rule(j as usize + 1, (phi(rat(1, 4)), phi(rat(3, 4))), (phi(rat(1, 4)), phi(rat(1, 2))), rat(1, 2)));
        singular.push(Singular::Point { poly: 0, t: phi(rat(1, 4)) });
    }
    let tail = rat(1, SEQPOLY_BLOCKS + 1);
    rules.push(simple_rule(SEQPOLY_BLOCKS as usize + 1, (int(0), int(1)), (int(0), tail), tail));
    FoldingScheme::new(unit_square(), PairingGenerator { base, rules, singular }, Meta { name: "seqpoly".into(), rbar: None, hbar: None })
}
