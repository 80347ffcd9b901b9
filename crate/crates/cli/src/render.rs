//! Byte-deterministic SVG 1.1 scenes.
//!
//! The geometry panel shows the multipolygon with optional layers on top. When the scar layer
//! is on, a second panel to the right holds a radial layout of the collapse tree.

use std::collections::VecDeque;
use std::fmt::Write;

use paperfold::collar::{Collar, DiskBoundary};
use paperfold::rational::{to_f64, Rat};
use paperfold::scar::ScarTree;
use paperfold::scheme::{FiniteScheme, Point, Polygon};

const PANEL: f64 = 400.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 10] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Optional layers drawn over the polygon outline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Layers {
    pub pairings: bool,
    pub scar: bool,
    pub collar: bool,
    pub annuli: bool,
}

/// A disk boundary tagged with the level that colours it.
#[derive(Clone, Debug)]
pub struct Annulus {
    pub level: usize,
    pub boundary: DiskBoundary,
}

pub struct SceneData<'a> {
    pub fs: &'a FiniteScheme,
    pub layers: Layers,
    pub scar: Option<&'a ScarTree>,
    pub collar: Option<(&'a Collar, Rat)>,
    pub annuli: Vec<Annulus>,
}

impl<'a> SceneData<'a> {
    pub fn new(fs: &'a FiniteScheme) -> Self {
        SceneData { fs, layers: Layers::default(), scar: None, collar: None, annuli: Vec::new() }
    }
}

/// Maps plane coordinates into the geometry panel, y pointing up.
struct Frame {
    min: (f64, f64),
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(polys: &[Polygon]) -> Frame {
        let pts: Vec<(f64, f64)> = polys.iter().flat_map(|p| p.vertices.iter().map(Point::to_f64)).collect();
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
        Frame { min: (x0, y0), max_y: y1, scale: (PANEL - 2.0 * MARGIN) / span }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (MARGIN + (x - self.min.0) * self.scale, MARGIN + (self.max_y - y) * self.scale)
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn points_attr(frame: &Frame, pts: impl IntoIterator<Item = (f64, f64)>) -> String {
    pts.into_iter().map(|p| frame.map(p)).map(|(x, y)| format!("{},{}", num(x), num(y))).collect::<Vec<_>>().join(" ")
}

/// Boundary polyline of `poly` between parameters `a < b`, through intermediate vertices.
fn boundary_path(poly: &Polygon, a: &Rat, b: &Rat) -> Vec<(f64, f64)> {
    let mut pts = vec![poly.point_at(a).to_f64()];
    for (v, off) in poly.vertices.iter().zip(&poly.offsets) {
        if off > a && off < b {
            pts.push(v.to_f64());
        }
    }
    pts.push(poly.point_at(b).to_f64());
    pts
}

fn centroid(poly: &Polygon) -> (f64, f64) {
    let n = poly.vertices.len() as f64;
    let (sx, sy) = poly.vertices.iter().map(Point::to_f64).fold((0.0, 0.0), |(ax, ay), (x, y)| (ax + x, ay + y));
    (sx / n, sy / n)
}

fn midpoint(poly: &Polygon, a: &Rat, b: &Rat) -> (f64, f64) {
    poly.point_at(&((a + b) / Rat::from_integer(2))).to_f64()
}

fn outline(out: &mut String, frame: &Frame, polys: &[Polygon]) {
    writeln!(out, "<g id=\"polygons\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\">").ok();
    for p in polys {
        writeln!(out, "<polygon points=\"{}\"/>", points_attr(frame, p.vertices.iter().map(Point::to_f64))).ok();
    }
    writeln!(out, "</g>").ok();
}

fn pairings(out: &mut String, frame: &Frame, fs: &FiniteScheme) {
    let polys = &fs.scheme.multipolygon.polygons;
    writeln!(out, "<g id=\"pairings\" fill=\"none\" stroke-width=\"1.5\">").ok();
    for gp in &fs.pairings {
        let sp = &gp.pairing;
        let poly = &polys[sp.poly];
        let color = PALETTE[gp.family % PALETTE.len()];
        writeln!(out, "<g stroke=\"{color}\">").ok();
        for (lo, hi) in sp.segments() {
            writeln!(out, "<polyline points=\"{}\"/>", points_attr(frame, boundary_path(poly, &lo, &hi))).ok();
        }
        let (ma, mb) = (frame.map(midpoint(poly, &sp.a0, &sp.a1)), frame.map(midpoint(poly, &sp.b0, &sp.b1)));
        let c = frame.map(centroid(poly));
        let ctrl = ((ma.0 + mb.0) / 4.0 + c.0 / 2.0, (ma.1 + mb.1) / 4.0 + c.1 / 2.0);
        writeln!(out, "<path stroke-width=\"0.5\" d=\"M {} {} Q {} {} {} {}\"/>", num(ma.0), num(ma.1), num(ctrl.0), num(ctrl.1), num(mb.0), num(mb.1)).ok();
        writeln!(out, "</g>").ok();
    }
    writeln!(out, "</g>").ok();
}

fn collar_layer(out: &mut String, frame: &Frame, collar: &Collar, h: &Rat) {
    writeln!(out, "<g id=\"collar\" fill=\"#dddddd\" fill-opacity=\"0.5\" stroke=\"#888888\" stroke-width=\"0.5\">").ok();
    for poly in collar.trapezoids(h) {
        for t in poly {
            writeln!(out, "<polygon points=\"{}\"/>", points_attr(frame, t.corners.iter().map(Point::to_f64))).ok();
        }
    }
    writeln!(out, "</g>").ok();
}

fn annuli_layer(out: &mut String, frame: &Frame, annuli: &[Annulus]) {
    writeln!(out, "<g id=\"annuli\" fill=\"none\" stroke-width=\"1\">").ok();
    for a in annuli {
        let color = PALETTE[a.level % PALETTE.len()];
        writeln!(out, "<g stroke=\"{color}\">").ok();
        for hz in &a.boundary.horizontals {
            writeln!(out, "<polyline points=\"{}\"/>", points_attr(frame, hz.iter().map(Point::to_f64))).ok();
        }
        for pair in &a.boundary.verticals {
            for v in pair {
                writeln!(out, "<polyline points=\"{}\"/>", points_attr(frame, v.iter().map(Point::to_f64))).ok();
            }
        }
        writeln!(out, "</g>").ok();
    }
    writeln!(out, "</g>").ok();
}

/// Radial layout: each subtree gets an angular wedge proportional to its leaf count and
/// nodes sit at their tree distance from the root.
fn scar_layout(tree: &ScarTree) -> Vec<(f64, f64)> {
    let g = &tree.graph;
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let root = (0..n).find(|&i| tree.nodes.get(i).is_some_and(|nd| nd.singular)).unwrap_or(0);
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &e in &g.adj[u] {
            let v = g.edges[e].other(u);
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                depth[v] = depth[u] + to_f64(&g.edges[e].length);
                queue.push_back(v);
            }
        }
    }
    let mut leaves = vec![0usize; n];
    for &u in order.iter().rev() {
        leaves[u] = leaves[u].max(1);
        if parent[u] != usize::MAX {
            leaves[parent[u]] += leaves[u];
        }
    }
    let mut wedge = vec![(0.0, std::f64::consts::TAU); n];
    for &u in &order {
        let (start, width) = wedge[u];
        let mut cursor = start;
        let kids: Vec<usize> = g.adj[u].iter().map(|&e| g.edges[e].other(u)).filter(|&v| parent[v] == u).collect();
        let total: usize = kids.iter().map(|&v| leaves[v]).sum();
        for v in kids {
            let w = width * leaves[v] as f64 / total.max(1) as f64;
            wedge[v] = (cursor, w);
            cursor += w;
        }
    }
    let far = depth.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let radius = PANEL / 2.0 - MARGIN;
    (0..n)
        .map(|u| {
            let (s, w) = wedge[u];
            let a = s + w / 2.0;
            let r = radius * depth[u] / far;
            (PANEL * 1.5 + r * a.cos(), PANEL / 2.0 - r * a.sin())
        })
        .collect()
}

fn scar_layer(out: &mut String, tree: &ScarTree) {
    let pos = scar_layout(tree);
    writeln!(out, "<g id=\"scar\" stroke=\"#333333\" stroke-width=\"0.75\">").ok();
    for e in &tree.graph.edges {
        let (a, b) = (pos[e.u], pos[e.v]);
        let dash = if e.gap { " stroke-dasharray=\"2,2\"" } else { "" };
        writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{dash}/>", num(a.0), num(a.1), num(b.0), num(b.1)).ok();
    }
    for (i, nd) in tree.nodes.iter().enumerate() {
        if nd.singular {
            let p = pos[i];
            writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"#d62728\" stroke=\"none\"/>", num(p.0), num(p.1)).ok();
        }
    }
    writeln!(out, "</g>").ok();
}

/// The SVG document for a scene. Layers without data are skipped.
pub fn render_scene(scene: &SceneData) -> String {
    let polys = &scene.fs.scheme.multipolygon.polygons;
    let frame = Frame::fit(polys);
    let with_scar = scene.layers.scar && scene.scar.is_some();
    let width = if with_scar { 2.0 * PANEL } else { PANEL };
    let mut out = String::new();
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").ok();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(width),
        h = num(PANEL)
    )
    .ok();
    if let (true, Some((collar, h))) = (scene.layers.collar, &scene.collar) {
        collar_layer(&mut out, &frame, collar, h);
    }
    outline(&mut out, &frame, polys);
    if scene.layers.pairings {
        pairings(&mut out, &frame, scene.fs);
    }
    if scene.layers.annuli {
        annuli_layer(&mut out, &frame, &scene.annuli);
    }
    if let (true, Some(tree)) = (with_scar, scene.scar) {
        scar_layer(&mut out, tree);
    }
    writeln!(out, "</svg>").ok();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use paperfold::rational::rat;
    use paperfold::scheme::{parse_scheme, truncate};

    fn square() -> FiniteScheme {
        let s = parse_scheme("polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1 2 3\npair 0 1 2 3 4\n").unwrap();
        truncate(&s, &rat(1, 64)).unwrap()
    }

    #[test]
    fn empty_layers_give_outline_only() {
        let fs = square();
        let svg = render_scene(&SceneData::new(&fs));
        assert!(svg.contains("<g id=\"polygons\""));
        assert!(svg.contains("points=\"20,380 380,380 380,20 20,20\""), "{svg}");
        assert!(!svg.contains("pairings") && !svg.contains("scar"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn number_formatting_is_canonical() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-0.0001), "0");
        assert_eq!(num(2.5), "2.5");
    }
}
