//! Radius sweep: every component of the ball `B(base; s)` as `s` grows.
//!
//! A node joins the ball when `s` passes its distance `d_w`; an edge is fully covered once
//! `s` passes `(d_u + d_v + len)/2`. Between consecutive event radii the measure of each
//! component is affine in `s` and the number of frontier points is constant.

use std::collections::HashSet;

use num_traits::Zero;

use super::graph::MetricGraph;
use super::{ScarPoint, ScarTree};
use crate::rational::Rat;

/// State of one component on an open interval of radii: `cm(s) = a + slope·s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Agg {
    pub a: Rat,
    pub slope: i128,
    /// Frontier points, one per partially covered edge side.
    pub cn: i64,
    /// Frontier points lying on unpaired gap arcs.
    pub gap_sides: i64,
    /// Collapsed tail nodes inside the component.
    pub tail_nodes: i64,
    /// Base points inside the component.
    pub seeds: i64,
}

impl Agg {
    pub fn cm(&self, s: &Rat) -> Rat {
        self.a + Rat::from_integer(self.slope) * s
    }

    fn absorb(&mut self, o: &Agg) {
        self.a += &o.a;
        self.slope += o.slope;
        self.cn += o.cn;
        self.gap_sides += o.gap_sides;
        self.tail_nodes += o.tail_nodes;
        self.seeds += o.seeds;
    }
}

/// Result of sweeping all radii below `limit` for one base set.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub graph: MetricGraph,
    pub dist: Vec<Option<Rat>>,
    pub is_seed: Vec<bool>,
    pub limit: Rat,
    parent: Vec<usize>,
    join: Vec<Option<Rat>>,
    rank: Vec<u32>,
    history: Vec<Vec<(Rat, Agg)>>,
    /// Event radii with the number of components just after each.
    pub batches: Vec<(Rat, usize)>,
    /// Graph node of each seed followed by each extra point.
    pub point_nodes: Vec<usize>,
    seed_nodes: Vec<usize>,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    Activate(usize),
    Full(usize),
}

impl Sweep {
    /// Sweeps the ball around `seeds`; `extra` points are made into graph nodes for queries.
    pub fn run(tree: &ScarTree, seeds: &[ScarPoint], extra: &[ScarPoint], limit: &Rat) -> Sweep {
        let all: Vec<&ScarPoint> = seeds.iter().chain(extra.iter()).collect();
        let cuts: Vec<(usize, Rat)> = all
            .iter()
            .filter_map(|p| match p {
                ScarPoint::Edge { edge, offset } => Some((*edge, *offset)),
                ScarPoint::Node(_) => None,
            })
            .collect();
        let (graph, cut_nodes) = tree.graph.subdivide(&cuts);
        let mut next_cut = 0;
        let point_nodes: Vec<usize> = all
            .iter()
            .map(|p| match p {
                ScarPoint::Node(n) => *n,
                ScarPoint::Edge { .. } => {
                    next_cut += 1;
                    cut_nodes[next_cut - 1]
                }
            })
            .collect();
        let seed_nodes: Vec<usize> = point_nodes[..seeds.len()].to_vec();
        Self::run_graph(graph, seed_nodes, point_nodes, limit)
    }

    fn run_graph(graph: MetricGraph, seed_nodes: Vec<usize>, point_nodes: Vec<usize>, limit: &Rat) -> Sweep {
        let n = graph.node_count();
        let sources: Vec<(usize, Rat)> = seed_nodes.iter().map(|&s| (s, Rat::zero())).collect();
        let dist = graph.dijkstra(&sources);
        let mut is_seed = vec![false; n];
        for &s in &seed_nodes {
            is_seed[s] = true;
        }
        let mut events: Vec<(Rat, Event)> = Vec::new();
        for (w, d) in dist.iter().enumerate() {
            if let Some(d) = d {
                if d < limit {
                    events.push((*d, Event::Activate(w)));
                }
            }
        }
        for (i, e) in graph.edges.iter().enumerate() {
            if let (Some(du), Some(dv)) = (&dist[e.u], &dist[e.v]) {
                let m = (du + dv + e.length) / Rat::from_integer(2);
                if m < *limit {
                    events.push((m, Event::Full(i)));
                }
            }
        }
        events.sort();

        let mut sweep = Sweep {
            dist,
            is_seed,
            limit: *limit,
            parent: (0..n).collect(),
            join: vec![None; n],
            rank: vec![0; n],
            history: vec![Vec::new(); n],
            batches: Vec::new(),
            point_nodes,
            seed_nodes,
            graph,
        };
        let mut agg: Vec<Agg> = vec![Agg::default(); n];
        let mut active = vec![false; n];
        let mut full = vec![false; sweep.graph.edges.len()];
        let mut count = 0usize;
        let mut i = 0;
        while i < events.len() {
            let t = events[i].0;
            let mut touched: HashSet<usize> = HashSet::new();
            while i < events.len() && events[i].0 == t {
                match events[i].1 {
                    Event::Activate(w) => {
                        active[w] = true;
                        count += 1;
                        let g = &sweep.graph;
                        let mut st = Agg { a: g.mass[w], tail_nodes: g.tail[w] as i64, seeds: sweep.is_seed[w] as i64, ..Agg::default() };
                        for &e in &g.adj[w] {
                            if full[e] {
                                continue;
                            }
                            let edge = &g.edges[e];
                            let sides = if edge.u == edge.v { 2 } else { 1 };
                            for _ in 0..sides {
                                st.a -= Rat::from_integer(edge.density) * t;
                                st.slope += edge.density;
                                st.cn += 1;
                                st.gap_sides += edge.gap as i64;
                            }
                        }
                        agg[w] = st;
                        touched.insert(w);
                    }
                    Event::Full(e) => {
                        full[e] = true;
                        let edge = sweep.graph.edges[e].clone();
                        let dens = Rat::from_integer(edge.density);
                        for end in [edge.u, edge.v] {
                            let r = sweep.find(end);
                            let d = sweep.dist[end].expect("reached");
                            let st = &mut agg[r];
                            st.a += dens * d;
                            st.slope -= edge.density;
                            st.cn -= 1;
                            st.gap_sides -= edge.gap as i64;
                        }
                        let (ru, rv) = (sweep.find(edge.u), sweep.find(edge.v));
                        let root = if ru != rv {
                            count -= 1;
                            let (root, child) = sweep.link(ru, rv, &t);
                            let moved = std::mem::take(&mut agg[child]);
                            agg[root].absorb(&moved);
                            touched.remove(&child);
                            root
                        } else {
                            ru
                        };
                        agg[root].a += dens * edge.length;
                        touched.insert(root);
                    }
                }
                i += 1;
            }
            let roots: HashSet<usize> = touched.iter().map(|&w| sweep.find(w)).collect();
            let mut roots: Vec<usize> = roots.into_iter().collect();
            roots.sort_unstable();
            for r in roots {
                sweep.history[r].push((t, agg[r].clone()));
            }
            sweep.batches.push((t, count));
        }
        let _ = active;
        sweep
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn link(&mut self, a: usize, b: usize, t: &Rat) -> (usize, usize) {
        let (root, child) = if self.rank[a] > self.rank[b] || (self.rank[a] == self.rank[b] && a < b) { (a, b) } else { (b, a) };
        if self.rank[root] == self.rank[child] {
            self.rank[root] += 1;
        }
        self.parent[child] = root;
        self.join[child] = Some(*t);
        (root, child)
    }

    /// Root of the component containing node `x` for radii just above events `< s`.
    pub fn root_at(&self, mut x: usize, s: &Rat) -> usize {
        while self.parent[x] != x && self.join[x].as_ref().is_some_and(|j| j < s) {
            x = self.parent[x];
        }
        x
    }

    /// Component state containing node `x` at radius `s` (events strictly below `s`).
    pub fn agg_at(&self, x: usize, s: &Rat) -> Option<&Agg> {
        if self.dist[x].as_ref().is_none_or(|d| d >= s) {
            return None;
        }
        let r = self.root_at(x, s);
        let h = &self.history[r];
        let k = h.partition_point(|(t, _)| t < s);
        k.checked_sub(1).map(|k| &h[k].1)
    }

    /// Piecewise-constant states of the component of `x` on `(lo, hi]`: entry `(t_i, agg_i)`
    /// holds on `(max(t_i, lo), t_{i+1}]`.
    pub fn timeline(&self, x: usize, lo: &Rat, hi: &Rat) -> Vec<(Rat, Agg)> {
        let mut entries: Vec<(Rat, Agg)> = Vec::new();
        let mut node = x;
        let mut since: Option<Rat> = None;
        loop {
            let until = self.join[node];
            for (t, a) in &self.history[node] {
                if since.as_ref().is_some_and(|s| t < s) {
                    continue;
                }
                if until.as_ref().is_some_and(|u| t >= u) {
                    continue;
                }
                entries.push((*t, a.clone()));
            }
            if self.parent[node] == node {
                break;
            }
            since = until;
            node = self.parent[node];
        }
        entries.sort_by_key(|a| a.0);
        let start = entries.partition_point(|(t, _)| t <= lo);
        let mut out = Vec::new();
        if start > 0 {
            out.push(entries[start - 1].clone());
        }
        for e in &entries[start..] {
            if e.0 >= *hi {
                break;
            }
            out.push(e.clone());
        }
        out
    }

    /// Radii at which the number of components drops.
    pub fn merge_radii(&self) -> Vec<Rat> {
        let mut prev = 0usize;
        let mut out = Vec::new();
        for (t, c) in &self.batches {
            if *c < prev {
                out.push(*t);
            }
            prev = *c;
        }
        out
    }

    /// Number of components at radius `s`.
    pub fn component_count(&self, s: &Rat) -> usize {
        let k = self.batches.partition_point(|(t, _)| t < s);
        k.checked_sub(1).map_or(0, |k| self.batches[k].1)
    }

    /// One seed node per component at radius `s`, ordered by root.
    pub fn components_at(&self, s: &Rat) -> Vec<(usize, usize)> {
        let mut seen = std::collections::BTreeMap::new();
        for &q in &self.seed_nodes {
            seen.entry(self.root_at(q, s)).or_insert(q);
        }
        seen.into_iter().collect()
    }

    /// All event radii in `(lo, hi)`.
    pub fn event_radii(&self, lo: &Rat, hi: &Rat) -> Vec<Rat> {
        self.batches.iter().map(|(t, _)| t).filter(|t| *t > lo && *t < hi).cloned().collect()
    }

    /// Seeds sharing the component of `x` at radius `s`.
    pub fn members_at(&self, x: usize, s: &Rat) -> Vec<usize> {
        let r = self.root_at(x, s);
        self.seed_nodes.iter().copied().filter(|&q| self.root_at(q, s) == r).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scar::graph::GraphEdge;

    #[test]
    fn sweep_of_a_star() {
        let mut g = MetricGraph::default();
        for _ in 0..4 {
            g.add_node(int(0), false, false);
        }
        for (v, l) in [(1, rat(1, 2)), (2, rat(1, 4)), (3, int(1))] {
            g.add_edge(GraphEdge { u: 0, v, length: l, density: 2, gap: false });
        }
        let s = Sweep::run_graph(g, vec![0, 2], vec![0, 2], &int(10));
        // Separate until the two seeds meet at 1/8.
        assert_eq!(s.merge_radii(), vec![rat(1, 8)]);
        let early = s.agg_at(0, &rat(1, 16)).unwrap();
        assert_eq!(early.cn, 3);
        assert_eq!(early.cm(&rat(1, 16)), rat(6, 16));
        let mid = s.agg_at(0, &rat(1, 5)).unwrap();
        // Edge to node 2 full (mass 1/2); two partial sides of density 2 from the hub.
        assert_eq!(mid.cn, 2);
        assert_eq!(mid.cm(&rat(1, 5)), rat(1, 2) + rat(4, 5));
        let tl = s.timeline(2, &rat(1, 16), &rat(1, 2));
        assert_eq!(tl.len(), 2);
        assert_eq!(tl[1].0, rat(1, 8));
    }
}
