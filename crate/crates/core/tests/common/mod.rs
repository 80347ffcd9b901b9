//! Shared oracles for the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use paperfold::rational::{fmt_rat, rat, Rat};
use paperfold::scheme::{truncate_depth, BoundaryParam, FoldingScheme};

/// Dense boundary graph: grid points `i / 2^k` joined to their neighbours by edges of one grid
/// unit and to the rounded partner of every pairing that covers them by edges of length zero.
pub struct DenseOracle {
    pub scale: i128,
    pub n: usize,
    adj: Vec<Vec<u32>>,
}

impl DenseOracle {
    /// Single-polygon schemes only; pairings shorter than one grid unit are ignored.
    pub fn new(scheme: &FoldingScheme, depth: usize, log2_step: u32) -> DenseOracle {
        assert_eq!(scheme.multipolygon.polygons.len(), 1, "oracle handles one polygon");
        let scale: i128 = 1 << log2_step;
        let len = scheme.multipolygon.polygons[0].length;
        assert!(len.is_integer());
        let n = (*len.numer() * scale) as usize;
        let mut adj = vec![Vec::new(); n];
        let fs = truncate_depth(scheme, depth).expect("oracle truncation");
        let s = Rat::from_integer(scale);
        let half = rat(1, 2);
        for gp in &fs.pairings {
            let p = &gp.pairing;
            if p.length() * s < Rat::from_integer(1) {
                continue;
            }
            let a0 = p.a0 * s;
            let lo = *a0.floor().numer() + i128::from(!a0.is_integer());
            let hi = *(p.a1 * s).floor().numer();
            for i in lo..=hi {
                let partner = p.partner(&rat(i, scale)).expect("point on segment");
                let j = *((partner * s) + half).floor().numer();
                let (i, j) = (i as usize % n, j as usize % n);
                if i != j {
                    adj[i].push(j as u32);
                    adj[j].push(i as u32);
                }
            }
        }
        DenseOracle { scale, n, adj }
    }

    pub fn index(&self, p: &BoundaryParam) -> usize {
        let x = p.t * Rat::from_integer(self.scale);
        assert!(x.is_integer(), "oracle queries must lie on the grid");
        *x.numer() as usize % self.n
    }

    /// Distances in grid units from `src` to every grid point (0-1 BFS).
    pub fn distances(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut dq = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = dq.pop_front() {
            let d = dist[u];
            for &v in &self.adj[u] {
                if dist[v as usize] > d {
                    dist[v as usize] = d;
                    dq.push_front(v as usize);
                }
            }
            for v in [(u + 1) % self.n, (u + self.n - 1) % self.n] {
                if dist[v] > d + 1 {
                    dist[v] = d + 1;
                    dq.push_back(v);
                }
            }
        }
        dist
    }

    pub fn to_rat(&self, units: u32) -> Rat {
        rat(units as i128, self.scale)
    }
}

/// PFS text for `2n` equal segments on the unit square glued by a non-crossing matching.
///
/// The open/close sequence is steered by `bits` wherever both moves keep it balanced.
pub fn matching_scheme(n: usize, bits: &[bool]) -> String {
    let len = rat(2, n as i128);
    let (mut open, mut close) = (n, n);
    let mut stack = Vec::new();
    let mut text = String::from("polygon 0 0 0 1 0 1 1 0 1\n");
    for i in 0..2 * n {
        let choose_open = open > 0 && (close == open || bits[i % bits.len().max(1)]);
        if choose_open {
            open -= 1;
            stack.push(i);
        } else {
            close -= 1;
            let j = stack.pop().expect("balanced");
            let (a0, b0) = (len * Rat::from_integer(j as i128), len * Rat::from_integer(i as i128));
            text.push_str(&format!("pair 0 {} {} {} {}\n", fmt_rat(&a0), fmt_rat(&(a0 + len)), fmt_rat(&b0), fmt_rat(&(b0 + len))));
        }
    }
    text
}
