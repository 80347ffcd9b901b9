//! The scar of a truncated scheme: the quotient of ∂P realized as a metric graph.
//!
//! Two realizations bracket the true quotient metric. `Collapse` contracts each tail group of
//! gaps to a single node, which only adds identifications and so never increases distances.
//! `Free` keeps each gap as an unglued arc, which removes identifications and never decreases
//! them.

mod ball;
mod classify;
mod graph;
mod sweep;

pub use ball::{ball_component, Base, Cn, ComponentInfo};
pub use classify::{classify_point, PointClass};
pub use graph::{GraphEdge, MetricGraph};
pub use sweep::{Agg, Sweep};

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, to_f64, Rat};
use crate::scheme::{is_plain, BoundaryParam, FiniteScheme, PlainnessResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TailMode {
    Collapse,
    Free,
}

/// What a graph edge of the scar realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Elementary piece of the pairing with this index in the truncation.
    Pairing(usize),
    /// Elementary piece of the gap with this index.
    Gap(usize),
}

/// A class of identified boundary points.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub fiber: Vec<BoundaryParam>,
    /// Length of collapsed gaps carried by the node.
    pub tail_mass: Rat,
    pub tail: bool,
    /// Some fiber parameter bounds a gap.
    pub gap_adjacent: bool,
    pub polygon_vertex: bool,
    /// The fiber meets the declared singular set, or a collapsed gap does.
    pub singular: bool,
    /// Sum of the polygon angles at the fiber parameters.
    pub cone_angle: f64,
}

impl Node {
    pub fn valence(&self) -> usize {
        self.fiber.len()
    }
}

/// A point of the scar: a node or an interior point of an edge at `offset` from its `u` end.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScarPoint {
    Node(usize),
    Edge { edge: usize, offset: Rat },
}

#[derive(Clone, Copy, Debug)]
enum Elem {
    Edge { edge: usize, reversed: bool },
    Node(usize),
}

/// Finite metric graph realizing the scar of a truncation in one tail mode.
#[derive(Clone, Debug)]
pub struct ScarTree {
    pub mode: TailMode,
    pub fs: Arc<FiniteScheme>,
    pub nodes: Vec<Node>,
    pub kinds: Vec<EdgeKind>,
    pub graph: MetricGraph,
    /// m_G of the whole scar, equal to |∂P|.
    pub total_measure: Rat,
    breaks: Vec<Vec<Rat>>,
    break_node: Vec<Vec<usize>>,
    elems: Vec<Vec<Elem>>,
    /// Distance from each node to the nearest tail node or gap endpoint.
    tail_dist: Vec<Option<Rat>>,
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

fn index_of(breaks: &[Rat], t: &Rat) -> usize {
    breaks.binary_search(t).expect("endpoint is a breakpoint")
}

/// Builds the scar graph of a truncation.
pub fn build_scar(fs: Arc<FiniteScheme>, mode: TailMode) -> Result<ScarTree> {
    let scheme = fs.scheme.clone();
    let polys = &scheme.multipolygon.polygons;

    // Refinement of ∂P closed under the pairing maps.
    let mut sets: Vec<BTreeSet<Rat>> = polys.iter().map(|p| p.offsets.iter().cloned().collect()).collect();
    for g in &fs.pairings {
        let p = &g.pairing;
        let s = &mut sets[p.poly];
        for t in [&p.a0, &p.a1, &p.b0, &p.b1] {
            s.insert(*t);
        }
    }
    for gap in &fs.gaps {
        sets[gap.poly].insert(gap.lo);
        sets[gap.poly].insert(gap.hi);
    }
    for g in &fs.pairings {
        let p = &g.pairing;
        let s = &sets[p.poly];
        let mut images: Vec<Rat> = Vec::new();
        for t in s.range((std::ops::Bound::Excluded(&p.a0), std::ops::Bound::Excluded(&p.a1))) {
            images.push(p.partner(t).expect("inside segment"));
        }
        for t in s.range((std::ops::Bound::Excluded(&p.b0), std::ops::Bound::Excluded(&p.b1))) {
            images.push(p.partner(t).expect("inside segment"));
        }
        sets[p.poly].extend(images);
    }
    let breaks: Vec<Vec<Rat>> = sets.into_iter().zip(polys).map(|(s, poly)| s.into_iter().filter(|t| *t < poly.length).collect()).collect();
    let base: Vec<usize> = breaks
        .iter()
        .scan(0, |acc, b| {
            let v = *acc;
            *acc += b.len();
            Some(v)
        })
        .collect();
    let total_breaks: usize = breaks.iter().map(|b| b.len()).sum();
    let gid = |poly: usize, i: usize| base[poly] + (i % breaks[poly].len());

    // Identifications made by the pairings alone.
    let mut dsu = Dsu((0..total_breaks).collect());
    let mut pair_pieces: Vec<(usize, usize, usize, usize, usize)> = Vec::new();
    for (pi, g) in fs.pairings.iter().enumerate() {
        let p = &g.pairing;
        let b = &breaks[p.poly];
        let l = &polys[p.poly].length;
        let end = |t: &Rat| if t == l { b.len() } else { index_of(b, t) };
        let (ia, ja) = (index_of(b, &p.a0), end(&p.a1));
        let (ib, jb) = (index_of(b, &p.b0), end(&p.b1));
        if ja - ia != jb - ib {
            return Err(Error::Structural(format!("pairing {pi} refines unevenly")));
        }
        for k in 0..(ja - ia) {
            let a_lo = ia + k;
            let b_hi = jb - k;
            dsu.union(gid(p.poly, a_lo), gid(p.poly, b_hi));
            dsu.union(gid(p.poly, a_lo + 1), gid(p.poly, b_hi - 1));
            pair_pieces.push((pi, p.poly, a_lo, b_hi - 1, 0));
        }
    }

    // The pairing skeleton must be a forest.
    let mut forest = Dsu((0..total_breaks).collect());
    for &(pi, poly, a_lo, _, _) in &pair_pieces {
        let x = dsu.find(gid(poly, a_lo));
        let y = dsu.find(gid(poly, a_lo + 1));
        if !forest.union(x, y) {
            let p = &fs.pairings[pi].pairing;
            let reason = match is_plain(&scheme) {
                PlainnessResult::Linked(a, b) => format!(
                    "pairings [{}, {}]~[{}, {}] and [{}, {}]~[{}, {}] are linked",
                    fmt_rat(&a.a0),
                    fmt_rat(&a.a1),
                    fmt_rat(&a.b0),
                    fmt_rat(&a.b1),
                    fmt_rat(&b.a0),
                    fmt_rat(&b.a1),
                    fmt_rat(&b.b0),
                    fmt_rat(&b.b1)
                ),
                _ => format!("cycle through pairing [{}, {}]~[{}, {}]", fmt_rat(&p.a0), fmt_rat(&p.a1), fmt_rat(&p.b0), fmt_rat(&p.b1)),
            };
            return Err(Error::Structural(reason));
        }
    }

    // Gap elementary intervals.
    let mut gap_pieces: Vec<(usize, usize, usize)> = Vec::new();
    for (gi, gap) in fs.gaps.iter().enumerate() {
        let b = &breaks[gap.poly];
        let l = &polys[gap.poly].length;
        let lo = index_of(b, &gap.lo);
        let hi = if gap.hi == *l { b.len() } else { index_of(b, &gap.hi) };
        for k in lo..hi {
            gap_pieces.push((gi, gap.poly, k));
        }
    }
    let mut group_anchor: Vec<Option<usize>> = vec![None; fs.group_count];
    if mode == TailMode::Collapse {
        for &(gi, poly, k) in &gap_pieces {
            let group = fs.gaps[gi].group;
            let anchor = *group_anchor[group].get_or_insert(gid(poly, k));
            dsu.union(anchor, gid(poly, k));
            dsu.union(anchor, gid(poly, k + 1));
        }
    }

    // Node classes.
    let mut node_of_root = vec![usize::MAX; total_breaks];
    let mut nodes: Vec<Node> = Vec::new();
    let mut break_node: Vec<Vec<usize>> = breaks.iter().map(|b| vec![0; b.len()]).collect();
    for (poly, b) in breaks.iter().enumerate() {
        for (i, t) in b.iter().enumerate() {
            let r = dsu.find(gid(poly, i));
            if node_of_root[r] == usize::MAX {
                node_of_root[r] = nodes.len();
                nodes.push(Node {
                    fiber: Vec::new(),
                    tail_mass: Rat::zero(),
                    tail: false,
                    gap_adjacent: false,
                    polygon_vertex: false,
                    singular: false,
                    cone_angle: 0.0,
                });
            }
            let n = node_of_root[r];
            break_node[poly][i] = n;
            let node = &mut nodes[n];
            node.fiber.push(BoundaryParam::new(poly, *t));
            let vertex = polys[poly].vertex_at(t);
            if let Some(v) = vertex {
                node.polygon_vertex = true;
                node.cone_angle += polys[poly].interior_angle(v);
            } else {
                node.cone_angle += std::f64::consts::PI;
            }
            if scheme.is_singular(poly, t) {
                node.singular = true;
            }
        }
    }
    for gap in &fs.gaps {
        let b = &breaks[gap.poly];
        for t in [&gap.lo, &gap.hi] {
            let i = if *t == polys[gap.poly].length { 0 } else { index_of(b, t) };
            nodes[break_node[gap.poly][i]].gap_adjacent = true;
        }
    }
    if mode == TailMode::Collapse {
        for (group, anchor) in group_anchor.iter().enumerate() {
            let Some(anchor) = anchor else { continue };
            let n = node_of_root[dsu.find(*anchor)];
            nodes[n].tail = true;
            for gap in fs.group_gaps(group) {
                nodes[n].tail_mass += gap.length();
                if scheme.interval_meets_singular(gap.poly, &gap.lo, &gap.hi) {
                    nodes[n].singular = true;
                }
            }
        }
    }

    let mut graph = MetricGraph::default();
    for n in &nodes {
        let special = n.valence() != 2 || n.polygon_vertex || n.tail;
        graph.add_node(n.tail_mass, special, n.tail);
    }
    let mut kinds = Vec::new();
    let mut elems: Vec<Vec<Elem>> = breaks.iter().map(|b| vec![Elem::Node(usize::MAX); b.len()]).collect();
    let node_at = |poly: usize, i: usize| break_node[poly][i % breaks[poly].len()];
    let upper = |poly: usize, i: usize| -> Rat {
        if i + 1 < breaks[poly].len() {
            breaks[poly][i + 1]
        } else {
            polys[poly].length
        }
    };
    for &(pi, poly, a_lo, b_lo, _) in &pair_pieces {
        let length = upper(poly, a_lo) - breaks[poly][a_lo];
        let e = graph.add_edge(GraphEdge { u: node_at(poly, a_lo), v: node_at(poly, a_lo + 1), length, density: 2, gap: false });
        kinds.push(EdgeKind::Pairing(pi));
        elems[poly][a_lo] = Elem::Edge { edge: e, reversed: false };
        elems[poly][b_lo] = Elem::Edge { edge: e, reversed: true };
    }
    for &(gi, poly, k) in &gap_pieces {
        match mode {
            TailMode::Collapse => elems[poly][k] = Elem::Node(node_at(poly, k)),
            TailMode::Free => {
                let length = upper(poly, k) - breaks[poly][k];
                let e = graph.add_edge(GraphEdge { u: node_at(poly, k), v: node_at(poly, k + 1), length, density: 1, gap: true });
                kinds.push(EdgeKind::Gap(gi));
                elems[poly][k] = Elem::Edge { edge: e, reversed: false };
            }
        }
    }
    if !graph.is_connected() {
        return Err(Error::Structural("the quotient of the truncation is disconnected".into()));
    }
    let sources: Vec<(usize, Rat)> = nodes.iter().enumerate().filter(|(_, n)| n.tail || n.gap_adjacent).map(|(i, _)| (i, Rat::zero())).collect();
    let tail_dist = graph.dijkstra(&sources);
    let total_measure = scheme.multipolygon.boundary_length();
    Ok(ScarTree { mode, fs, nodes, kinds, graph, total_measure, breaks, break_node, elems, tail_dist })
}

/// Distance bounds `lo ≤ d_G ≤ hi` from the collapsed and free realizations.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceBounds {
    pub lo: Rat,
    pub hi: Rat,
}

impl DistanceBounds {
    pub fn gap(&self) -> Rat {
        self.hi - self.lo
    }
}

/// Both realizations of one truncation.
#[derive(Clone, Debug)]
pub struct ScarPair {
    pub collapse: ScarTree,
    pub free: ScarTree,
}

impl ScarPair {
    pub fn build(fs: FiniteScheme) -> Result<ScarPair> {
        let fs = Arc::new(fs);
        Ok(ScarPair { collapse: build_scar(fs.clone(), TailMode::Collapse)?, free: build_scar(fs, TailMode::Free)? })
    }

    pub fn fs(&self) -> &FiniteScheme {
        &self.collapse.fs
    }

    /// Two-sided bounds on the quotient distance between two boundary points.
    pub fn distance(&self, x: &BoundaryParam, y: &BoundaryParam) -> Result<DistanceBounds> {
        Ok(DistanceBounds { lo: self.collapse.distance(x, y)?, hi: self.free.distance(x, y)? })
    }
}

impl ScarTree {
    /// Projection of a boundary parameter to the scar.
    pub fn locate(&self, p: &BoundaryParam) -> Result<ScarPoint> {
        let polys = &self.fs.scheme.multipolygon.polygons;
        if p.poly >= polys.len() || p.t < Rat::zero() || p.t > polys[p.poly].length {
            return Err(Error::OutOfRange(format!("boundary parameter {} on polygon {}", fmt_rat(&p.t), p.poly)));
        }
        let b = &self.breaks[p.poly];
        let t = if p.t == polys[p.poly].length { Rat::zero() } else { p.t };
        match b.binary_search(&t) {
            Ok(i) => Ok(ScarPoint::Node(self.break_node[p.poly][i])),
            Err(i) => {
                let k = i - 1;
                match self.elems[p.poly][k] {
                    Elem::Node(n) => Ok(ScarPoint::Node(n)),
                    Elem::Edge { edge, reversed } => {
                        let offset = if reversed {
                            let hi = if k + 1 < b.len() { b[k + 1] } else { polys[p.poly].length };
                            hi - t
                        } else {
                            t - b[k]
                        };
                        Ok(ScarPoint::Edge { edge, offset })
                    }
                }
            }
        }
    }

    /// Boundary parameters projecting to a scar point.
    pub fn fiber(&self, x: &ScarPoint) -> Vec<BoundaryParam> {
        match x {
            ScarPoint::Node(n) => self.nodes[*n].fiber.clone(),
            ScarPoint::Edge { edge, offset } => {
                let mut out = Vec::new();
                for (poly, row) in self.elems.iter().enumerate() {
                    for (k, el) in row.iter().enumerate() {
                        if let Elem::Edge { edge: e, reversed } = el {
                            if e == edge {
                                let b = &self.breaks[poly];
                                let t = if *reversed {
                                    let hi = if k + 1 < b.len() { b[k + 1] } else { self.fs.scheme.multipolygon.polygons[poly].length };
                                    hi - offset
                                } else {
                                    b[k] + offset
                                };
                                out.push(BoundaryParam::new(poly, t));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Sources for a shortest-path search started at a scar point.
    pub fn sources(&self, x: &ScarPoint) -> Vec<(usize, Rat)> {
        match x {
            ScarPoint::Node(n) => vec![(*n, Rat::zero())],
            ScarPoint::Edge { edge, offset } => {
                let e = &self.graph.edges[*edge];
                vec![(e.u, *offset), (e.v, e.length - offset)]
            }
        }
    }

    /// Distance from a precomputed node-distance field to a scar point.
    pub fn distance_to(&self, dist: &[Option<Rat>], y: &ScarPoint) -> Option<Rat> {
        match y {
            ScarPoint::Node(n) => dist[*n],
            ScarPoint::Edge { edge, offset } => {
                let e = &self.graph.edges[*edge];
                let a = dist[e.u].as_ref().map(|d| d + offset);
                let b = dist[e.v].as_ref().map(|d| d + e.length - offset);
                match (a, b) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            }
        }
    }

    /// Graph distance between two scar points.
    pub fn point_distance(&self, x: &ScarPoint, y: &ScarPoint) -> Rat {
        let dist = self.graph.dijkstra(&self.sources(x));
        let mut d = self.distance_to(&dist, y).expect("scar is connected");
        if let (ScarPoint::Edge { edge: e1, offset: o1 }, ScarPoint::Edge { edge: e2, offset: o2 }) = (x, y) {
            if e1 == e2 {
                let direct = if o1 > o2 { o1 - o2 } else { o2 - o1 };
                d = d.min(direct);
            }
        }
        d
    }

    /// Graph distance between the projections of two boundary parameters.
    pub fn distance(&self, x: &BoundaryParam, y: &BoundaryParam) -> Result<Rat> {
        Ok(self.point_distance(&self.locate(x)?, &self.locate(y)?))
    }

    /// Nodes in the declared singular set (and, collapsed, tails that meet it).
    pub fn singular_points(&self) -> Vec<ScarPoint> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.singular).map(|(i, _)| ScarPoint::Node(i)).collect()
    }

    /// Distance from a scar point to the nearest tail node or gap endpoint.
    pub fn tail_distance(&self, x: &ScarPoint) -> Option<Rat> {
        self.distance_to(&self.tail_dist, x)
    }

    /// A boundary parameter projecting to `x`.
    pub fn representative(&self, x: &ScarPoint) -> BoundaryParam {
        self.fiber(x).into_iter().next().expect("fibers are nonempty")
    }

    /// Euler characteristic of the cell structure of S: scar nodes, scar edges, one face per polygon.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.graph.node_count() as i64;
        let e = self.graph.edges.len() as i64;
        v - e + self.fs.scheme.multipolygon.polygons.len() as i64
    }

    /// Total length of all edges.
    pub fn total_length(&self) -> f64 {
        self.graph.edges.iter().map(|e| to_f64(&e.length)).sum()
    }
}

/// Euler characteristic of a plain scheme's quotient at a truncation, with tails collapsed.
pub fn euler_check(fs: &FiniteScheme) -> Result<i64> {
    match is_plain(&fs.scheme) {
        PlainnessResult::Plain => {}
        other => return Err(Error::NotPlain(format!("{other:?}"))),
    }
    let tree = build_scar(Arc::new(fs.clone()), TailMode::Collapse)?;
    Ok(tree.euler_characteristic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scheme::{builtin_example, parse_scheme, truncate, truncate_depth};

    const PILLOW: &str = "polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1/2 1/2 1\npair 0 1 3/2 3/2 2\npair 0 2 5/2 5/2 3\npair 0 3 7/2 7/2 4\n";

    fn bp(t: Rat) -> BoundaryParam {
        BoundaryParam::new(0, t)
    }

    #[test]
    fn pillowcase_is_a_four_star() {
        let s = parse_scheme(PILLOW).unwrap();
        let fs = truncate(&s, &int(1)).unwrap();
        let tree = build_scar(Arc::new(fs.clone()), TailMode::Free).unwrap();
        assert_eq!(tree.graph.node_count(), 5);
        assert_eq!(tree.graph.edges.len(), 4);
        assert_eq!(euler_check(&fs).unwrap(), 2);
        assert_eq!(tree.distance(&bp(rat(1, 2)), &bp(rat(3, 2))).unwrap(), int(1));
        assert_eq!(tree.distance(&bp(rat(1, 4)), &bp(rat(3, 4))).unwrap(), int(0));
    }

    #[test]
    fn seq_hub_distance() {
        let s = builtin_example("seq").unwrap();
        let pair = ScarPair::build(truncate(&s, &rat(1, 256)).unwrap()).unwrap();
        let d = pair.distance(&bp(rat(1, 2)), &bp(rat(5, 8))).unwrap();
        assert_eq!(d, DistanceBounds { lo: rat(1, 8), hi: rat(1, 8) });
        let d = pair.distance(&bp(rat(13, 16)), &bp(rat(3, 4))).unwrap();
        assert_eq!(d.lo, rat(1, 16));
        assert_eq!(pair.distance(&bp(rat(1, 3)), &bp(rat(1, 3))).unwrap().hi, int(0));
    }

    #[test]
    fn cantor_truncation_has_euler_characteristic_two() {
        let s = builtin_example("cantor").unwrap();
        assert_eq!(euler_check(&truncate_depth(&s, 3).unwrap()).unwrap(), 2);
    }

    #[test]
    fn torus_is_rejected() {
        let s = parse_scheme("polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1 2 3\npair 0 1 2 3 4\n").unwrap();
        let fs = truncate(&s, &int(1)).unwrap();
        assert!(matches!(build_scar(Arc::new(fs.clone()), TailMode::Free), Err(Error::Structural(_))));
        assert!(matches!(euler_check(&fs), Err(Error::NotPlain(_))));
    }
}
