//! Metric graphs with exact edge lengths, multi-source shortest paths and edge subdivision.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::rational::Rat;

/// An edge carrying measure `density` per unit of length.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub length: Rat,
    /// 2 for a paired arc (two boundary sides), 1 for an unpaired gap arc.
    pub density: i128,
    pub gap: bool,
}

impl GraphEdge {
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected metric graph with point masses on nodes.
#[derive(Clone, Debug, Default)]
pub struct MetricGraph {
    pub mass: Vec<Rat>,
    /// Nodes where the frontier of a ball cannot be counted as a planar cross-cut.
    pub special: Vec<bool>,
    /// Nodes standing for collapsed unexpanded tails.
    pub tail: Vec<bool>,
    pub edges: Vec<GraphEdge>,
    pub adj: Vec<Vec<usize>>,
}

impl MetricGraph {
    pub fn node_count(&self) -> usize {
        self.mass.len()
    }

    pub fn add_node(&mut self, mass: Rat, special: bool, tail: bool) -> usize {
        self.mass.push(mass);
        self.special.push(special);
        self.tail.push(tail);
        self.adj.push(Vec::new());
        self.mass.len() - 1
    }

    pub fn add_edge(&mut self, e: GraphEdge) -> usize {
        let id = self.edges.len();
        self.adj[e.u].push(id);
        if e.v != e.u {
            self.adj[e.v].push(id);
        }
        self.edges.push(e);
        id
    }

    /// Shortest distances from the given sources with initial offsets.
    pub fn dijkstra(&self, sources: &[(usize, Rat)]) -> Vec<Option<Rat>> {
        let mut dist: Vec<Option<Rat>> = vec![None; self.node_count()];
        let mut heap = BinaryHeap::new();
        for (s, d0) in sources {
            if dist[*s].as_ref().is_none_or(|d| d0 < d) {
                dist[*s] = Some(*d0);
                heap.push(Reverse((*d0, *s)));
            }
        }
        while let Some(Reverse((d, w))) = heap.pop() {
            if dist[w].as_ref() != Some(&d) {
                continue;
            }
            for &e in &self.adj[w] {
                let edge = &self.edges[e];
                let x = edge.other(w);
                let nd = d + edge.length;
                if dist[x].as_ref().is_none_or(|old| nd < *old) {
                    dist[x] = Some(nd);
                    heap.push(Reverse((nd, x)));
                }
            }
        }
        dist
    }

    /// Splits edges at interior points `(edge, offset from u)`; returns the new graph and the
    /// node standing for each requested point.
    pub fn subdivide(&self, points: &[(usize, Rat)]) -> (MetricGraph, Vec<usize>) {
        let mut g = MetricGraph {
            mass: self.mass.clone(),
            special: self.special.clone(),
            tail: self.tail.clone(),
            edges: Vec::new(),
            adj: vec![Vec::new(); self.node_count()],
        };
        let mut by_edge: Vec<Vec<(Rat, usize)>> = vec![Vec::new(); self.edges.len()];
        for (i, (e, off)) in points.iter().enumerate() {
            by_edge[*e].push((*off, i));
        }
        let mut node_of = vec![usize::MAX; points.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            let cuts = &mut by_edge[e];
            if cuts.is_empty() {
                g.add_edge(edge.clone());
                continue;
            }
            cuts.sort();
            let mut prev_node = edge.u;
            let mut prev_off = Rat::zero();
            for (off, i) in cuts.iter() {
                if *off == prev_off && prev_node != edge.u {
                    node_of[*i] = prev_node;
                    continue;
                }
                let w = g.add_node(Rat::zero(), false, false);
                g.add_edge(GraphEdge { u: prev_node, v: w, length: off - prev_off, density: edge.density, gap: edge.gap });
                node_of[*i] = w;
                prev_node = w;
                prev_off = *off;
            }
            g.add_edge(GraphEdge { u: prev_node, v: edge.v, length: edge.length - prev_off, density: edge.density, gap: edge.gap });
        }
        (g, node_of)
    }

    /// Whether every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        if self.node_count() == 0 {
            return true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(w) = stack.pop() {
            for &e in &self.adj[w] {
                let x = self.edges[e].other(w);
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
