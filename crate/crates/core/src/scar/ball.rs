//! Direct evaluation of one ball component at a fixed radius.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{ScarPoint, ScarTree};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};

/// Centre set of the ball.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    /// The declared singular set as realized in the tree.
    Singular,
    /// A single point.
    Point(ScarPoint),
}

/// Number of frontier points, when it is a well-defined count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cn {
    Count(usize),
    /// The frontier passes through a vertex or two frontier sides meet: not a planar radius.
    Breakpoint,
    /// The frontier meets an unexpanded tail.
    Unknown,
}

/// The component of `B(base; r)` containing `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentInfo {
    /// m_G-measure of the component.
    pub cm: Rat,
    /// Frontier points at distance exactly `r` from the base.
    pub cc_points: Vec<ScarPoint>,
    pub cn: Cn,
    /// Base points inside the component.
    pub members: Vec<ScarPoint>,
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
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Component of the open ball of radius `r` around `base` that contains `q`.
pub fn ball_component(tree: &ScarTree, base: &Base, q: &ScarPoint, r: &Rat) -> Result<ComponentInfo> {
    if *r <= Rat::zero() {
        return Err(Error::OutOfRange(format!("radius {} must be positive", fmt_rat(r))));
    }
    let seeds: Vec<ScarPoint> = match base {
        Base::Singular => tree.singular_points(),
        Base::Point(p) => vec![p.clone()],
    };
    if !seeds.contains(q) {
        return Err(Error::Domain("query point is not in the base set".into()));
    }
    let cuts: Vec<(usize, Rat)> = seeds
        .iter()
        .filter_map(|p| match p {
            ScarPoint::Edge { edge, offset } => Some((*edge, *offset)),
            ScarPoint::Node(_) => None,
        })
        .collect();
    let (g, cut_nodes) = tree.graph.subdivide(&cuts);
    let mut k = 0;
    let seed_nodes: Vec<usize> = seeds
        .iter()
        .map(|p| match p {
            ScarPoint::Node(n) => *n,
            ScarPoint::Edge { .. } => {
                k += 1;
                cut_nodes[k - 1]
            }
        })
        .collect();
    let q_node = seed_nodes[seeds.iter().position(|p| p == q).expect("checked above")];
    let dist = g.dijkstra(&seed_nodes.iter().map(|&s| (s, Rat::zero())).collect::<Vec<_>>());
    let two = Rat::from_integer(2);
    let active: Vec<bool> = dist.iter().map(|d| d.as_ref().is_some_and(|d| d < r)).collect();
    let mut dsu = Dsu((0..g.node_count()).collect());
    let mut full = vec![false; g.edges.len()];
    for (i, e) in g.edges.iter().enumerate() {
        if let (Some(du), Some(dv)) = (&dist[e.u], &dist[e.v]) {
            if (du + dv + e.length) / two < *r {
                full[i] = true;
                dsu.union(e.u, e.v);
            }
        }
    }
    let root = dsu.find(q_node);
    let mut cm = Rat::zero();
    let mut breakpoint = false;
    let mut unknown = false;
    let mut frontier: BTreeMap<(usize, Rat), ScarPoint> = BTreeMap::new();
    let mut node_frontier: BTreeMap<usize, usize> = BTreeMap::new();
    for w in 0..g.node_count() {
        if active[w] && dsu.find(w) == root {
            cm += &g.mass[w];
        }
    }
    for (i, e) in g.edges.iter().enumerate() {
        let dens = Rat::from_integer(e.density);
        if full[i] {
            if dsu.find(e.u) == root {
                cm += dens * e.length;
            }
            continue;
        }
        let ends: &[(usize, bool)] = if e.u == e.v { &[(e.u, false), (e.u, true)] } else { &[(e.u, false), (e.v, true)] };
        for &(w, from_v) in ends {
            if !active[w] || dsu.find(w) != root {
                continue;
            }
            let d = dist[w].as_ref().expect("active");
            let reach = r - d;
            cm += dens * reach;
            if e.gap {
                unknown = true;
            }
            let other = if from_v { e.u } else { e.v };
            if reach == e.length {
                *node_frontier.entry(other).or_insert(0) += 1;
            } else {
                let offset = if from_v { e.length - reach } else { reach };
                let meet = dist[other].as_ref().is_some_and(|d2| (d + d2 + e.length) / two == *r);
                if meet {
                    breakpoint = true;
                }
                frontier.insert((i, offset), ScarPoint::Edge { edge: i, offset });
            }
        }
    }
    for (&w, &hits) in &node_frontier {
        if g.tail[w] {
            unknown = true;
        } else if g.special[w] || hits > 1 {
            breakpoint = true;
        }
    }
    let cn_count = frontier.len() + node_frontier.len();
    let cn = if unknown {
        Cn::Unknown
    } else if breakpoint {
        Cn::Breakpoint
    } else {
        Cn::Count(cn_count)
    };
    // Report frontier points in the coordinates of the original tree.
    let mut cc_points: Vec<ScarPoint> = Vec::new();
    for (w, _) in node_frontier {
        if w < tree.graph.node_count() {
            cc_points.push(ScarPoint::Node(w));
        }
    }
    for ((i, offset), _) in frontier {
        cc_points.push(original_point(tree, &cuts, i, offset));
    }
    let members = seeds.iter().zip(&seed_nodes).filter(|(_, &n)| dsu.find(n) == root).map(|(p, _)| p.clone()).collect();
    Ok(ComponentInfo { cm, cc_points, cn, members })
}

/// Maps a point of a subdivided edge back to the undivided tree.
fn original_point(tree: &ScarTree, cuts: &[(usize, Rat)], edge: usize, offset: Rat) -> ScarPoint {
    if cuts.is_empty() {
        return ScarPoint::Edge { edge, offset };
    }
    // Subdivision keeps edge order: walk the original edges and their pieces.
    let mut by_edge: Vec<Vec<Rat>> = vec![Vec::new(); tree.graph.edges.len()];
    for (e, o) in cuts {
        by_edge[*e].push(*o);
    }
    let mut idx = 0;
    for (e, _) in tree.graph.edges.iter().enumerate() {
        let mut offs = by_edge[e].clone();
        offs.sort();
        offs.dedup();
        let mut starts = vec![Rat::zero()];
        starts.extend(offs);
        for s in starts {
            if idx == edge {
                return ScarPoint::Edge { edge: e, offset: s + offset };
            }
            idx += 1;
        }
    }
    unreachable!("piece index within subdivided graph")
}
