//! Finite-state description of rule expansion and exact total-length computation.
//!
//! A generated pairing is characterised, for the purpose of further replication, by the rule
//! that produced it and the destination pieces holding its two segments. Because every
//! destination piece lies either inside one source piece of each rule or away from all of them,
//! these triples form a finite automaton and the total generated length solves a linear system.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{PairingGenerator, Rule, SegmentPairing};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};

/// Replication state of a generated pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Base(usize),
    State(usize),
}

/// A pairing of the expansion together with its replication state.
#[derive(Clone, Debug, PartialEq)]
pub struct GenPairing {
    pub pairing: SegmentPairing,
    pub origin: Origin,
    /// Index of the base pairing this one descends from.
    pub family: usize,
    /// Number of rule applications from the base pairing.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassSystem {
    nest: Vec<Vec<Vec<Option<usize>>>>,
    base_app: Vec<Vec<Option<(usize, usize)>>>,
    states: Vec<(usize, usize, usize)>,
    state_index: HashMap<(usize, usize, usize), usize>,
    /// Total expansion length per unit length of a pairing in each state (the pairing included).
    pub factor: Vec<Rat>,
    /// Same factor for each base pairing.
    pub base_factor: Vec<Rat>,
}

fn interiors_meet(lo1: &Rat, hi1: &Rat, lo2: &Rat, hi2: &Rat) -> bool {
    lo1 < hi2 && lo2 < hi1
}

fn ordered(rule: &Rule, qa: usize, qb: usize) -> (usize, usize) {
    if qa == qb || rule.pieces[qa].dst_lo < rule.pieces[qb].dst_lo {
        (qa, qb)
    } else {
        (qb, qa)
    }
}

impl MassSystem {
    pub fn build(generator: &PairingGenerator) -> Result<Self> {
        let rules = &generator.rules;
        let mut nest = Vec::with_capacity(rules.len());
        for r in rules {
            let mut per_piece = Vec::with_capacity(r.pieces.len());
            for p in &r.pieces {
                let mut per_rule = Vec::with_capacity(rules.len());
                for i in rules {
                    if i.poly != r.poly {
                        per_rule.push(None);
                        continue;
                    }
                    let inside = i.source_piece(&p.dst_lo, &p.dst_hi);
                    if inside.is_none() && i.pieces.iter().any(|q| interiors_meet(&p.dst_lo, &p.dst_hi, &q.src_lo, &q.src_hi)) {
                        return Err(Error::InvalidScheme(format!(
                            "rule {} maps onto [{}, {}], which straddles a source boundary of rule {}",
                            r.id,
                            fmt_rat(&p.dst_lo),
                            fmt_rat(&p.dst_hi),
                            i.id
                        )));
                    }
                    per_rule.push(inside);
                }
                per_piece.push(per_rule);
            }
            nest.push(per_piece);
        }
        let base_app: Vec<Vec<Option<(usize, usize)>>> = generator
            .base
            .iter()
            .map(|b| {
                rules
                    .iter()
                    .map(|i| {
                        if i.poly != b.poly {
                            return None;
                        }
                        let qa = i.source_piece(&b.a0, &b.a1)?;
                        let qb = i.source_piece(&b.b0, &b.b1)?;
                        Some(ordered(i, qa, qb))
                    })
                    .collect()
            })
            .collect();

        let mut sys = MassSystem { nest, base_app, states: Vec::new(), state_index: HashMap::new(), factor: Vec::new(), base_factor: Vec::new() };
        let mut queue: Vec<(usize, usize, usize)> = Vec::new();
        for b in 0..generator.base.len() {
            for (i, app) in sys.base_app[b].iter().enumerate() {
                if let Some((qa, qb)) = app {
                    queue.push((i, *qa, *qb));
                }
            }
        }
        while let Some(s) = queue.pop() {
            if sys.state_index.contains_key(&s) {
                continue;
            }
            sys.state_index.insert(s, sys.states.len());
            sys.states.push(s);
            for (i, rule) in rules.iter().enumerate() {
                if let Some(c) = sys.child_key(s, i, rule) {
                    queue.push(c);
                }
            }
        }

        let n = sys.states.len();
        let mut m: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n + 1]; n];
        for (k, &s) in sys.states.iter().enumerate() {
            m[k][k] += Rat::one();
            m[k][n] = Rat::one();
            for (i, rule) in rules.iter().enumerate() {
                if let Some(c) = sys.child_key(s, i, rule) {
                    let j = sys.state_index[&c];
                    m[k][j] -= &rule.sigma;
                }
            }
        }
        let x = solve(m).ok_or_else(|| Error::InvalidScheme("rules generate unbounded total pairing length".into()))?;
        if x.iter().any(|v| *v < Rat::one()) {
            return Err(Error::InvalidScheme("rules generate unbounded total pairing length".into()));
        }
        sys.factor = x;
        sys.base_factor = (0..generator.base.len())
            .map(|b| {
                let mut f = Rat::one();
                for (i, app) in sys.base_app[b].iter().enumerate() {
                    if let Some((qa, qb)) = app {
                        f += rules[i].sigma * sys.factor[sys.state_index[&(i, *qa, *qb)]];
                    }
                }
                f
            })
            .collect();
        Ok(sys)
    }

    fn child_key(&self, s: (usize, usize, usize), i: usize, rule: &Rule) -> Option<(usize, usize, usize)> {
        let qa = self.nest[s.0][s.1][i]?;
        let qb = self.nest[s.0][s.2][i]?;
        let (qa, qb) = ordered(rule, qa, qb);
        Some((i, qa, qb))
    }

    /// Exact total length of the full expansion.
    pub fn total_length(&self, generator: &PairingGenerator) -> Rat {
        generator.base.iter().zip(&self.base_factor).map(|(b, f)| b.length() * f).sum()
    }

    /// Total length of a pairing's subtree in the expansion, the pairing itself included.
    pub fn subtree_length(&self, gp: &GenPairing) -> Rat {
        let f = match gp.origin {
            Origin::Base(b) => &self.base_factor[b],
            Origin::State(s) => &self.factor[s],
        };
        gp.pairing.length() * f
    }

    /// Direct replications of `gp`, in rule order.
    pub fn children(&self, rules: &[Rule], gp: &GenPairing) -> Vec<GenPairing> {
        let mut out = Vec::new();
        for (i, rule) in rules.iter().enumerate() {
            let key = match gp.origin {
                Origin::Base(b) => self.base_app[b][i].map(|(qa, qb)| (i, qa, qb)),
                Origin::State(s) => self.child_key(self.states[s], i, rule),
            };
            if let Some(key) = key {
                let pairing = rule.apply(&gp.pairing).expect("automaton and rule application agree");
                out.push(GenPairing { pairing, origin: Origin::State(self.state_index[&key]), family: gp.family, depth: gp.depth + 1 });
            }
        }
        out
    }
}

/// Gauss-Jordan elimination on an augmented matrix; `None` if singular.
fn solve(mut m: Vec<Vec<Rat>>) -> Option<Vec<Rat>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = Rat::one() / m[col][col];
        for c in col..=n {
            m[col][c] *= inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in col..=n {
                    let delta = f * m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn solves_small_system() {
        let m = vec![vec![rat(2, 1), rat(1, 1), rat(3, 1)], vec![rat(1, 1), rat(3, 1), rat(5, 1)]];
        assert_eq!(solve(m).unwrap(), vec![rat(4, 5), rat(7, 5)]);
    }
}
