//! Injectivity radius, goodness profiles and certified lower bounds for the divergence integral.
//!
//! Profiles are read off the radius sweeps of both scar realizations. On a subinterval where
//! the collapsed and free sweeps report the same affine measure and the same frontier count,
//! and no frontier point sits on an unexpanded gap, the truncation has resolved the component
//! and the profile is certified there. Elsewhere the goodness function is taken to be zero,
//! which keeps every integral a lower bound.

mod divergence;
mod mcmullen;

pub use divergence::{divergence_report, DivergenceCertificate, Hypothesis, Verdict, WindowBound};
pub use mcmullen::{mcmullen_system, AnnulusClass, AnnulusLevel, AnnulusSystem, McMullenFlags};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, ln_ratio, to_f64, Rat};
use crate::scar::{classify_point, Agg, EdgeKind, PointClass, ScarPair, ScarPoint, ScarTree, Sweep};
use crate::scheme::BoundaryParam;

/// Relative shrink applied to every floating-point integral so it stays a lower bound.
pub const ROUNDING_MARGIN: f64 = 1e-12;

/// The injectivity radius and the goodness constant `M = (1/5)·min(r̄/h̄, h̄/r̄)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionParams {
    pub rbar: Rat,
    pub hbar: Rat,
    pub m: Rat,
}

impl CriterionParams {
    pub fn new(rbar: Rat, hbar: Rat) -> Result<Self> {
        if rbar <= Rat::zero() || hbar <= Rat::zero() {
            return Err(Error::OutOfRange(format!("r̄ = {} and h̄ = {} must be positive", fmt_rat(&rbar), fmt_rat(&hbar))));
        }
        let m = (rbar / hbar).min(hbar / rbar) / Rat::from_integer(5);
        Ok(CriterionParams { rbar, hbar, m })
    }
}

/// Longest chain of scar edges through planar points, as (length, first edge).
fn longest_planar_chain(tree: &ScarTree) -> Option<(Rat, usize)> {
    let g = &tree.graph;
    let planar_node = |n: usize| classify_point(tree, &ScarPoint::Node(n)) == PointClass::Planar;
    let planar_edge = |e: usize| {
        matches!(tree.kinds[e], EdgeKind::Pairing(_))
            && tree.tail_distance(&ScarPoint::Edge { edge: e, offset: g.edges[e].length / Rat::from_integer(2) }).is_none_or(|d| d > tree.fs.tail_measure)
    };
    let mut seen = vec![false; g.edges.len()];
    let mut best: Option<(Rat, usize)> = None;
    for start in 0..g.edges.len() {
        if seen[start] || !planar_edge(start) {
            continue;
        }
        seen[start] = true;
        let mut total = g.edges[start].length;
        let mut broken = false;
        for first in [g.edges[start].u, g.edges[start].v] {
            let (mut node, mut prev) = (first, start);
            while planar_node(node) {
                let next = g.adj[node].iter().copied().find(|&e| e != prev);
                let Some(e) = next else { break };
                if seen[e] || !planar_edge(e) {
                    broken |= seen[e];
                    break;
                }
                seen[e] = true;
                total += g.edges[e].length;
                node = g.edges[e].other(node);
                prev = e;
            }
        }
        if broken {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, start));
        }
    }
    best
}

/// Injectivity radius: one third of the longest certified-planar chain, or the scheme override.
pub fn injectivity_radius(pair: &ScarPair) -> Result<Rat> {
    let tree = &pair.collapse;
    if let Some(r) = &tree.fs.scheme.meta.rbar {
        check_injectivity(pair, r)?;
        return Ok(*r);
    }
    let (len, _) = longest_planar_chain(tree).ok_or(Error::NoPlanarEdge)?;
    let r = len / Rat::from_integer(3);
    check_injectivity(pair, &r)?;
    Ok(r)
}

/// Every ball component below `r` must be a proper part of the scar.
fn check_injectivity(pair: &ScarPair, r: &Rat) -> Result<()> {
    if *r <= Rat::zero() {
        return Err(Error::OutOfRange(format!("injectivity radius {} must be positive", fmt_rat(r))));
    }
    let tree = &pair.collapse;
    let seeds = tree.singular_points();
    if seeds.is_empty() {
        return Ok(());
    }
    let sweep = Sweep::run(tree, &seeds, &[], &(r + r));
    for (_, q) in sweep.components_at(r) {
        if let Some(agg) = sweep.agg_at(q, r) {
            if agg.cm(r) >= tree.total_measure {
                return Err(Error::OutOfRange(format!("radius {} covers the whole scar", fmt_rat(r))));
            }
        }
    }
    Ok(())
}

/// Which goodness function a profile describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `ι_Λ`: components of the ball around the singular set.
    Singular,
    /// `ι`: balls around one non-singular point.
    Point,
}

/// One subinterval `(lo, hi]` with `cm(s) = a + slope·s` and constant frontier count.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: Rat,
    pub hi: Rat,
    pub a: Rat,
    pub slope: i128,
    pub cn: i64,
    pub certified: bool,
}

impl Piece {
    pub fn cm(&self, s: &Rat) -> Rat {
        self.a + Rat::from_integer(self.slope) * s
    }

    /// `∫ ds / (cm(s) + s·cn)` over `[u, v] ⊂ [lo, hi]`, exact up to rounding.
    pub fn integral(&self, u: &Rat, v: &Rat) -> f64 {
        if u >= v {
            return 0.0;
        }
        let k = Rat::from_integer(self.slope + self.cn as i128);
        if k.is_zero() {
            return to_f64(&((v - u) / self.a));
        }
        let du = self.a + k * u;
        let dv = self.a + k * v;
        ln_ratio(&dv, &du) / to_f64(&k)
    }
}

/// Goodness data of one point on a radius window.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodnessProfile {
    pub q: BoundaryParam,
    pub flavor: Flavor,
    pub window: (Rat, Rat),
    pub m: Rat,
    pub pieces: Vec<Piece>,
    /// Interior radii where the component or its frontier changes.
    pub breakpoints: Vec<Rat>,
}

impl GoodnessProfile {
    pub fn is_approximate(&self) -> bool {
        self.pieces.iter().any(|p| !p.certified)
    }

    fn piece_at(&self, s: &Rat) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.lo < *s && *s < p.hi)
    }

    /// `ι(s) = M/(cm + s·cn)` where certified, zero otherwise and at breakpoints.
    pub fn iota(&self, s: &Rat) -> f64 {
        match self.piece_at(s) {
            Some(p) if p.certified => to_f64(&self.m) / to_f64(&(p.cm(s) + Rat::from_integer(p.cn as i128) * s)),
            _ => 0.0,
        }
    }
}

/// A certified lower bound for `∫ ι` together with its unscaled form `∫ 1/(cm + r·cn)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralBound {
    pub unnormalized: f64,
    pub scaled: f64,
    /// Total length of uncertified subintervals, which contribute zero.
    pub uncertified: Rat,
}

/// Lower bound of `∫_a^b ι` from a profile; uncertified pieces are refused unless allowed.
pub fn integral_lower_bound(profile: &GoodnessProfile, a: &Rat, b: &Rat, allow_approximate: bool) -> Result<IntegralBound> {
    if a > b || *a < profile.window.0 || *b > profile.window.1 {
        return Err(Error::OutOfRange(format!("[{}, {}] is not inside the profile window", fmt_rat(a), fmt_rat(b))));
    }
    let mut total = 0.0;
    let mut uncertified = Rat::zero();
    for p in &profile.pieces {
        let u = (*a).max(p.lo);
        let v = (*b).min(p.hi);
        if u >= v {
            continue;
        }
        if p.certified {
            total += p.integral(&u, &v);
        } else {
            uncertified += v - u;
        }
    }
    if !uncertified.is_zero() && !allow_approximate {
        return Err(Error::Approximate(format!("{} of [{}, {}]", fmt_rat(&uncertified), fmt_rat(a), fmt_rat(b))));
    }
    let unnormalized = total * (1.0 - ROUNDING_MARGIN);
    Ok(IntegralBound { unnormalized, scaled: unnormalized * to_f64(&profile.m) * (1.0 - ROUNDING_MARGIN), uncertified })
}

/// Combines the timelines of the collapsed and free sweeps into certified pieces on `(a, b]`.
fn merge_timelines(tc: &[(Rat, Agg)], tf: &[(Rat, Agg)], a: &Rat, b: &Rat) -> Vec<Piece> {
    let mut cuts: Vec<Rat> = vec![*a];
    cuts.extend(tc.iter().chain(tf).map(|(t, _)| *t).filter(|t| t > a && t < b));
    cuts.push(*b);
    cuts.sort();
    cuts.dedup();
    let state = |tl: &[(Rat, Agg)], u: &Rat| -> Option<Agg> {
        let k = tl.partition_point(|(t, _)| t <= u);
        k.checked_sub(1).map(|k| tl[k].1.clone())
    };
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (u, v) = (&w[0], &w[1]);
        let c = state(tc, u);
        let f = state(tf, u);
        let (piece_a, slope, cn, certified) = match (&c, &f) {
            (Some(c), Some(f)) => {
                let same = c.a == f.a && c.slope == f.slope && c.cn == f.cn;
                (c.a, c.slope, c.cn, same && c.gap_sides == 0 && f.gap_sides == 0)
            }
            (Some(c), None) => (c.a, c.slope, c.cn, false),
            _ => (Rat::zero(), 0, 0, false),
        };
        out.push(Piece { lo: *u, hi: *v, a: piece_a, slope, cn, certified });
    }
    out
}

/// Radius sweeps around one non-singular point in both realizations.
#[derive(Clone, Debug)]
pub struct PointSweeps {
    pub q: BoundaryParam,
    pub c: Sweep,
    pub f: Sweep,
}

impl PointSweeps {
    /// Distance to the nearest singular node in the collapsed and the free realization,
    /// and that node in the collapsed one.
    pub fn singular_distance(&self, pair: &ScarPair) -> Option<(Rat, Rat, usize)> {
        let nearest =
            |sweep: &Sweep, tree: &ScarTree| tree.nodes.iter().enumerate().filter(|(_, n)| n.singular).filter_map(|(i, _)| sweep.dist[i].map(|d| (d, i))).min();
        let (lo, node) = nearest(&self.c, &pair.collapse)?;
        let (hi, _) = nearest(&self.f, &pair.free)?;
        Some((lo, hi.max(lo), node))
    }
}

/// Radius sweeps of the singular set in both realizations, shared by all profile queries.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub pair: ScarPair,
    pub params: CriterionParams,
    pub sweep_c: Sweep,
    pub sweep_f: Sweep,
}

impl Analysis {
    /// Sweeps radii up to `limit` (at least r̄) around the declared singular set.
    pub fn new(pair: ScarPair, params: CriterionParams, limit: &Rat) -> Result<Analysis> {
        let seeds_c = pair.collapse.singular_points();
        if seeds_c.is_empty() {
            return Err(Error::Domain("the declared singular set is empty".into()));
        }
        let limit = (*limit).max(params.rbar);
        let sweep_c = Sweep::run(&pair.collapse, &seeds_c, &[], &limit);
        let sweep_f = Sweep::run(&pair.free, &pair.free.singular_points(), &[], &limit);
        Ok(Analysis { pair, params, sweep_c, sweep_f })
    }

    fn check_window(&self, a: &Rat, b: &Rat) -> Result<()> {
        if *a <= Rat::zero() || a > b || *b > self.sweep_c.limit {
            return Err(Error::OutOfRange(format!("window [{}, {}] outside (0, {}]", fmt_rat(a), fmt_rat(b), fmt_rat(&self.sweep_c.limit))));
        }
        Ok(())
    }

    fn seed_node(tree: &ScarTree, sweep: &Sweep, q: &BoundaryParam) -> Result<Option<usize>> {
        match tree.locate(q)? {
            ScarPoint::Node(n) if sweep.is_seed[n] => Ok(Some(n)),
            _ => Ok(None),
        }
    }

    /// Profile of `ι_Λ(q; ·)` on `[a, b]` for `q` in the singular set.
    pub fn singular_profile(&self, q: &BoundaryParam, a: &Rat, b: &Rat) -> Result<GoodnessProfile> {
        self.check_window(a, b)?;
        let qc = Self::seed_node(&self.pair.collapse, &self.sweep_c, q)?
            .ok_or_else(|| Error::Domain(format!("parameter {} is not in the singular set", fmt_rat(&q.t))))?;
        let tc = self.sweep_c.timeline(qc, a, b);
        let tf = match Self::seed_node(&self.pair.free, &self.sweep_f, q)? {
            Some(qf) => self.sweep_f.timeline(qf, a, b),
            None => Vec::new(),
        };
        Ok(self.profile(q, Flavor::Singular, tc, tf, a, b))
    }

    /// Radius sweeps around one point outside the singular set, valid below `limit`.
    pub fn point_sweeps(&self, q: &BoundaryParam, limit: &Rat) -> Result<PointSweeps> {
        let xc = self.pair.collapse.locate(q)?;
        if classify_point(&self.pair.collapse, &xc) == PointClass::DeclaredSingular {
            return Err(Error::Domain(format!("parameter {} is in the singular set", fmt_rat(&q.t))));
        }
        let xf = self.pair.free.locate(q)?;
        let limit = limit + Rat::one();
        let c = Sweep::run(&self.pair.collapse, std::slice::from_ref(&xc), &[], &limit);
        let f = Sweep::run(&self.pair.free, std::slice::from_ref(&xf), &[], &limit);
        Ok(PointSweeps { q: q.clone(), c, f })
    }

    /// Profile of `ι(q; ·)` on `[a, b]` from precomputed point sweeps.
    pub fn point_profile_from(&self, ps: &PointSweeps, a: &Rat, b: &Rat) -> Result<GoodnessProfile> {
        if *a <= Rat::zero() || a > b || *b >= ps.c.limit {
            return Err(Error::OutOfRange(format!("window [{}, {}]", fmt_rat(a), fmt_rat(b))));
        }
        let tc = ps.c.timeline(ps.c.point_nodes[0], a, b);
        let tf = ps.f.timeline(ps.f.point_nodes[0], a, b);
        Ok(self.profile(&ps.q, Flavor::Point, tc, tf, a, b))
    }

    /// Profile of `ι(q; ·)` on `[a, b]` for a point `q` outside the singular set.
    pub fn point_profile(&self, q: &BoundaryParam, a: &Rat, b: &Rat) -> Result<GoodnessProfile> {
        let ps = self.point_sweeps(q, b)?;
        self.point_profile_from(&ps, a, b)
    }

    fn profile(&self, q: &BoundaryParam, flavor: Flavor, tc: Vec<(Rat, Agg)>, tf: Vec<(Rat, Agg)>, a: &Rat, b: &Rat) -> GoodnessProfile {
        let pieces = merge_timelines(&tc, &tf, a, b);
        let breakpoints = pieces.iter().skip(1).map(|p| p.lo).collect();
        GoodnessProfile { q: q.clone(), flavor, window: (*a, *b), m: self.params.m, pieces, breakpoints }
    }

    /// Radii in `[a, b]` where the number of singular-set components drops, from the collapsed sweep.
    pub fn merge_radii(&self, a: &Rat, b: &Rat) -> Vec<Rat> {
        self.sweep_c.merge_radii().into_iter().filter(|t| t >= a && t <= b).collect()
    }

    /// Merge radii together with the distances from the singular set to special scar points.
    pub fn breakpoints(&self, a: &Rat, b: &Rat) -> Result<Vec<Rat>> {
        if *a <= Rat::zero() || a > b || *b > self.params.rbar {
            return Err(Error::OutOfRange(format!("window [{}, {}] outside (0, r̄]", fmt_rat(a), fmt_rat(b))));
        }
        let mut out = self.merge_radii(a, b);
        let g = &self.sweep_c.graph;
        for (w, d) in self.sweep_c.dist.iter().enumerate() {
            if let Some(d) = d {
                if g.special[w] && d >= a && d <= b && !self.sweep_c.is_seed[w] {
                    out.push(*d);
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Number of singular-set components at radius `r`.
    pub fn component_count(&self, r: &Rat) -> usize {
        self.sweep_c.component_count(r)
    }

    /// A parameter of each singular component at radius `r`.
    pub fn component_representatives(&self, r: &Rat) -> Vec<BoundaryParam> {
        self.sweep_c.components_at(r).into_iter().map(|(_, q)| self.pair.collapse.representative(&ScarPoint::Node(q))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scheme::{builtin_example, truncate};

    fn seq_analysis() -> Analysis {
        let s = builtin_example("seq").unwrap();
        let pair = ScarPair::build(truncate(&s, &rat(1, 4096)).unwrap()).unwrap();
        let rbar = injectivity_radius(&pair).unwrap();
        Analysis::new(pair, CriterionParams::new(rbar, rat(9, 40)).unwrap(), &rbar).unwrap()
    }

    #[test]
    fn params_match_closed_form() {
        let p = CriterionParams::new(rat(1, 6), rat(1, 4)).unwrap();
        assert_eq!(p.m, rat(2, 15));
    }

    #[test]
    fn seq_injectivity_radius_is_a_third() {
        let an = seq_analysis();
        assert_eq!(an.params.rbar, rat(1, 3));
    }

    #[test]
    fn seq_first_window_matches_closed_form() {
        let an = seq_analysis();
        let s = BoundaryParam::new(0, int(0));
        let prof = an.singular_profile(&s, &rat(1, 16), &rat(1, 8)).unwrap();
        assert!(!prof.is_approximate());
        let b = integral_lower_bound(&prof, &rat(1, 16), &rat(1, 8), false).unwrap();
        let exact = (22.0f64 / 19.0).ln() / 3.0;
        assert!((b.unnormalized - exact).abs() < 1e-12, "{b:?}");
        assert!(b.unnormalized <= exact);
    }

    #[test]
    fn seq_merge_radii() {
        let an = seq_analysis();
        let nc = an.merge_radii(&rat(1, 64), &rat(1, 8));
        assert_eq!(nc, vec![rat(1, 64), rat(1, 32), rat(1, 16)]);
    }
}
