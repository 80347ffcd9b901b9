//! Boundaries of collar disks around ball components, and annulus module bounds.

use std::f64::consts::PI;

use num_traits::Zero;

use super::{interior_vertices, Collar};
use crate::criterion::{integral_lower_bound, GoodnessProfile};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};
use crate::scar::{ball_component, Base, Cn, ScarPoint, ScarTree};
use crate::scheme::{BoundaryParam, Point};

/// Tolerance of the Gauss–Bonnet closure check.
const TURNING_TOLERANCE: f64 = 1e-9;

/// The boundary of the collar disk over one ball component, as plane polylines.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskBoundary {
    pub height: Rat,
    /// Boundary arcs `(poly, from, to)` of the component's preimage, in walk order.
    pub arcs: Vec<(usize, Rat, Rat)>,
    /// Horizontal leaf over each arc, from its start to its end.
    pub horizontals: Vec<Vec<Point>>,
    /// For each frontier point, the vertical leaves at its two boundary parameters.
    pub verticals: Vec<[Vec<Point>; 2]>,
    /// The arcs and cross-cuts chain into one closed curve.
    pub closed: bool,
    /// Total geodesic turning plus interior cone defects; `2π` for a disk. Finite schemes only.
    pub turning: Option<f64>,
}

/// Signed turning at `b` of the path `a → b → c`.
fn turn(a: &(f64, f64), b: &(f64, f64), c: &(f64, f64)) -> f64 {
    let (ux, uy) = (b.0 - a.0, b.1 - a.1);
    let (vx, vy) = (c.0 - b.0, c.1 - b.1);
    (ux * vy - uy * vx).atan2(ux * vx + uy * vy)
}

/// Boundary of the collar disk of height `h(r)` over the component of `B(base; r)` containing `q`.
pub fn disk_boundary(tree: &ScarTree, collar: &Collar, base: &Base, q: &ScarPoint, r: &Rat) -> Result<DiskBoundary> {
    let height = collar.height_for(r);
    if height > collar.hbar {
        return Err(Error::OutOfRange(format!("radius {} exceeds 2r̄", fmt_rat(r))));
    }
    let info = ball_component(tree, base, q, r)?;
    match info.cn {
        Cn::Count(0) => return Err(Error::Domain("the ball covers the whole scar".into())),
        Cn::Count(_) => {}
        Cn::Breakpoint => return Err(Error::NonPlanarRadius(fmt_rat(r))),
        Cn::Unknown => return Err(Error::TailContact(fmt_rat(r))),
    }
    let seeds: Vec<ScarPoint> = match base {
        Base::Singular => tree.singular_points(),
        Base::Point(p) => vec![p.clone()],
    };
    let sources: Vec<(usize, Rat)> = seeds.iter().flat_map(|p| tree.sources(p)).collect();
    let dist = tree.graph.dijkstra(&sources);
    let inside = |x: &ScarPoint| {
        let direct = seeds.iter().any(|s| match (s, x) {
            (ScarPoint::Edge { edge: e1, offset: o1 }, ScarPoint::Edge { edge: e2, offset: o2 }) => e1 == e2 && (o1 - o2).abs() < *r,
            _ => false,
        });
        direct || tree.distance_to(&dist, x).is_some_and(|d| d < *r)
    };

    // Each frontier point has two parameters: one ends an inside arc, the other starts one.
    let mut starts: Vec<(BoundaryParam, usize)> = Vec::new();
    let mut ends: Vec<(BoundaryParam, usize)> = Vec::new();
    let mut verticals = Vec::new();
    for (fi, x) in info.cc_points.iter().enumerate() {
        let ScarPoint::Edge { edge, offset } = x else {
            return Err(Error::NonPlanarRadius(fmt_rat(r)));
        };
        let fiber = tree.fiber(x);
        if fiber.len() != 2 {
            return Err(Error::NonPlanarRadius(fmt_rat(r)));
        }
        let len = &tree.graph.edges[*edge].length;
        let delta = (*offset).min(len - offset) / Rat::from_integer(2);
        let mut legs = Vec::new();
        for p in &fiber {
            let pg = &collar.polygons[p.poly];
            let ahead = BoundaryParam::new(p.poly, pg.wrap(&(p.t + delta)));
            if inside(&tree.locate(&ahead)?) {
                starts.push((p.clone(), fi));
            } else {
                ends.push((p.clone(), fi));
            }
            legs.push(vec![collar.point(p, &Rat::zero())?, collar.point(p, &height)?]);
        }
        let second = legs.pop().expect("two legs");
        verticals.push([legs.pop().expect("two legs"), second]);
    }
    if starts.len() != ends.len() || starts.len() != info.cc_points.len() {
        return Err(Error::NonPlanarRadius(fmt_rat(r)));
    }

    // Pair each start with the next end forward along its polygon.
    let next_end = |s: &BoundaryParam| -> Option<usize> {
        let len = &collar.polygons[s.poly].length;
        ends.iter()
            .enumerate()
            .filter(|(_, (e, _))| e.poly == s.poly)
            .min_by_key(|(_, (e, _))| {
                let d = e.t - s.t;
                if d.is_positive() {
                    d
                } else {
                    d + len
                }
            })
            .map(|(i, _)| i)
    };
    let mut arcs = Vec::new();
    let mut arc_ends = Vec::new();
    for (s, _) in &starts {
        let e = next_end(s).ok_or_else(|| Error::NonPlanarRadius(fmt_rat(r)))?;
        arcs.push((s.poly, s.t, ends[e].0.t));
        arc_ends.push(e);
    }

    // Walk: arc end -> partner parameter of the same frontier point -> arc starting there.
    let n = arcs.len();
    let mut order = Vec::new();
    let mut cur = 0;
    let mut seen = vec![false; n];
    while !seen[cur] {
        seen[cur] = true;
        order.push(cur);
        let fi = ends[arc_ends[cur]].1;
        match starts.iter().position(|(_, f)| *f == fi) {
            Some(next) => cur = next,
            None => break,
        }
    }
    let closed = order.len() == n && cur == order[0];
    let arcs: Vec<_> = order.iter().map(|&i| arcs[i]).collect();
    let horizontals = arcs.iter().map(|(p, a, b)| collar.horizontal(*p, a, b, &height)).collect::<Result<Vec<_>>>()?;

    let turning = if tree.fs.gaps.is_empty() && closed { Some(gauss_bonnet(tree, collar, &arcs, &height)?) } else { None };
    Ok(DiskBoundary { height, arcs, horizontals, verticals, closed, turning })
}

/// Corner turning of the disk boundary plus the cone defects of scar nodes it encloses.
fn gauss_bonnet(tree: &ScarTree, collar: &Collar, arcs: &[(usize, Rat, Rat)], h: &Rat) -> Result<f64> {
    let mut total = 0.0;
    let n = arcs.len();
    let mut bottoms = vec![(0.0, 0.0); n];
    for (k, (poly, a, b)) in arcs.iter().enumerate() {
        let pg = &collar.polygons[*poly];
        let b_un = if b <= a { b + pg.length } else { *b };
        let verts = interior_vertices(pg, a, &b_un);
        let at = |t: &Rat, hh: &Rat| collar.point(&BoundaryParam::new(*poly, *t), hh).map(|p| p.to_f64());
        // Region over the arc, counterclockwise: along the boundary, up, back along the leaf, down.
        let mut ring = vec![at(a, &Rat::zero())?];
        for t in &verts {
            ring.push(at(t, &Rat::zero())?);
        }
        ring.push(at(&b_un, &Rat::zero())?);
        let bottom_end = ring.len() - 1;
        ring.push(at(&b_un, h)?);
        for t in verts.iter().rev() {
            ring.push(at(t, h)?);
        }
        ring.push(at(a, h)?);
        let m = ring.len();
        let tau = |i: usize| turn(&ring[(i + m - 1) % m], &ring[i], &ring[(i + 1) % m]);
        for i in bottom_end + 1..m {
            total += tau(i);
        }
        bottoms[k].0 = tau(0);
        bottoms[k].1 = tau(bottom_end);
    }
    // At each frontier point the arc ending there meets the next arc's start.
    for k in 0..n {
        total += bottoms[k].1 + bottoms[(k + 1) % n].0 - PI;
    }
    // Scar nodes lying over the arcs are interior to the disk.
    let covered = |p: &BoundaryParam| {
        arcs.iter().any(|(poly, a, b)| {
            if *poly != p.poly {
                return false;
            }
            let len = &collar.polygons[*poly].length;
            let b = if b <= a { b + len } else { *b };
            let t = if p.t < *a { p.t + len } else { p.t };
            t > *a && t < b
        })
    };
    for node in &tree.nodes {
        if covered(&node.fiber[0]) {
            total += 2.0 * PI - node.cone_angle;
        }
    }
    Ok(total)
}

impl DiskBoundary {
    /// Gauss–Bonnet closure holds for a topological disk.
    pub fn is_disk(&self) -> Option<bool> {
        self.turning.map(|t| self.closed && (t - 2.0 * PI).abs() < TURNING_TOLERANCE)
    }
}

/// Lower bound for the module of the annulus between leaf heights `h(r)` and `h(s)`.
pub fn annulus_module_bound(profile: &GoodnessProfile, r: &Rat, s: &Rat, allow_approximate: bool) -> Result<f64> {
    if r >= s || r.is_zero() || r.is_negative() {
        return Err(Error::OutOfRange(format!("need 0 < r < s, got r = {}, s = {}", fmt_rat(r), fmt_rat(s))));
    }
    Ok(integral_lower_bound(profile, r, s, allow_approximate)?.scaled)
}

/// Module of the Grötzsch extremal annulus separating two points inside a disk of radius `R`.
pub fn grotzsch_bound(radius: f64, z1: (f64, f64), z2: (f64, f64)) -> Result<f64> {
    let d = (z1.0 - z2.0).hypot(z1.1 - z2.1);
    if d == 0.0 || !(radius > 0.0) {
        return Err(Error::Domain("points must be distinct and the radius positive".into()));
    }
    Ok((8.0 * radius / d).ln() / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collar::build_collar;
    use crate::rational::{int, rat};
    use crate::scar::ScarPair;
    use crate::scheme::{builtin_example, parse_scheme, truncate};

    #[test]
    fn grotzsch_closed_form() {
        let m = grotzsch_bound(1.0, (0.0, 0.0), (8.0, 0.0)).unwrap();
        assert!(m.abs() < 1e-15);
        assert!(grotzsch_bound(1.0, (0.5, 0.0), (0.5, 0.0)).is_err());
    }

    #[test]
    fn pillowcase_disk_is_a_disk() {
        let src = "polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1/2 1/2 1\npair 0 1 3/2 3/2 2\npair 0 2 5/2 5/2 3\npair 0 3 7/2 7/2 4\n";
        let s = parse_scheme(src).unwrap();
        let pair = ScarPair::build(truncate(&s, &rat(1, 8)).unwrap()).unwrap();
        let tree = &pair.collapse;
        let collar = build_collar(&s.multipolygon, &rat(1, 4), None).unwrap();
        let q = tree.locate(&BoundaryParam::new(0, rat(1, 4))).unwrap();
        let d = disk_boundary(tree, &collar, &Base::Point(q.clone()), &q, &rat(1, 16)).unwrap();
        assert_eq!(d.verticals.len(), 2);
        assert!(d.closed);
        assert_eq!(d.is_disk(), Some(true), "{:?}", d.turning);
        // A larger ball swallows the fold point at the side midpoint.
        let d = disk_boundary(tree, &collar, &Base::Point(q.clone()), &q, &rat(3, 8)).unwrap();
        assert_eq!(d.is_disk(), Some(true), "{:?}", d.turning);
    }

    #[test]
    fn seq_disk_has_one_crosscut() {
        let s = builtin_example("seq").unwrap();
        let pair = ScarPair::build(truncate(&s, &rat(1, 1024)).unwrap()).unwrap();
        let tree = &pair.collapse;
        let collar = build_collar(&s.multipolygon, &rat(1, 3), None).unwrap();
        let q = tree.locate(&BoundaryParam::new(0, int(0))).unwrap();
        let d = disk_boundary(tree, &collar, &Base::Singular, &q, &rat(1, 10)).unwrap();
        assert_eq!(d.verticals.len(), 1);
        assert!(d.closed);
    }
}
