//! Trapezoid collars of polygon boundaries and their vertical/horizontal leaf coordinates.
//!
//! Over each side sits a trapezoid bounded by the side, the two inward angle bisectors at its
//! ends and a parallel top edge at height `h`. The corner of the top edge at vertex `v` is
//! `v + h·(n₁ + n₂)/(1 + n₁·n₂)` for the inward unit normals of the two sides, which is exact
//! because side directions are rational.

mod disk;

pub use disk::{annulus_module_bound, disk_boundary, grotzsch_bound, DiskBoundary};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};
use crate::scheme::{segments_intersect, BoundaryParam, Multipolygon, Point, Polygon};

/// Bisection steps of the automatic height search.
const BISECTION_STEPS: usize = 40;
/// Denominator of the grid the supremum is rounded down to.
const ROUND_DENOM: i128 = 1024;

fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Offset of each vertex's bisector point per unit of height.
fn bisector_steps(p: &Polygon) -> Result<Vec<(Rat, Rat)>> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let (ax, ay) = p.direction((i + n - 1) % n);
            let (bx, by) = p.direction(i);
            let (n1x, n1y) = (-ay, ax);
            let (n2x, n2y) = (-by, bx);
            let denom = Rat::one() + n1x * n2x + n1y * n2y;
            if denom.is_zero() {
                return Err(Error::Domain(format!("vertex {i} has a zero angle")));
            }
            Ok(((n1x + n2x) / denom, (n1y + n2y) / denom))
        })
        .collect()
}

/// The collar trapezoid over one side at height `h`, counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Trapezoid {
    pub poly: usize,
    pub side: usize,
    pub corners: [Point; 4],
}

fn shifted(v: &Point, step: &(Rat, Rat), h: &Rat) -> Point {
    Point::new(v.x + step.0 * h, v.y + step.1 * h)
}

fn trapezoids(mp: &Multipolygon, steps: &[Vec<(Rat, Rat)>], h: &Rat) -> Vec<Vec<Trapezoid>> {
    mp.polygons
        .iter()
        .enumerate()
        .map(|(pi, p)| {
            let n = p.len();
            (0..n)
                .map(|i| {
                    let j = (i + 1) % n;
                    let (a, b) = (&p.vertices[i], &p.vertices[j]);
                    Trapezoid { poly: pi, side: i, corners: [a.clone(), b.clone(), shifted(b, &steps[pi][j], h), shifted(a, &steps[pi][i], h)] }
                })
                .collect()
        })
        .collect()
}

fn convex_contains(q: &[Point; 4], x: &Point) -> bool {
    (0..4).all(|k| !cross(&q[k], &q[(k + 1) % 4], x).is_negative())
}

fn quads_disjoint(a: &[Point; 4], b: &[Point; 4]) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            if segments_intersect(&a[i], &a[(i + 1) % 4], &b[j], &b[(j + 1) % 4]) {
                return false;
            }
        }
    }
    !convex_contains(a, &b[0]) && !convex_contains(b, &a[0])
}

/// Both collar conditions at height `h`, or the first violation.
fn check_height(mp: &Multipolygon, steps: &[Vec<(Rat, Rat)>], h: &Rat) -> std::result::Result<(), String> {
    let traps = trapezoids(mp, steps, h);
    let two = Rat::from_integer(2);
    for (pi, (p, row)) in mp.polygons.iter().zip(&traps).enumerate() {
        let n = p.len();
        for (i, t) in row.iter().enumerate() {
            let (dx, dy) = p.direction(i);
            let top = (t.corners[2].x - t.corners[3].x) * dx + (t.corners[2].y - t.corners[3].y) * dy;
            if top * two < p.sides[i] || top > p.sides[i] * two {
                return Err(format!("polygon {pi} side {i}: top edge out of ratio"));
            }
            if !p.contains(&t.corners[3]) {
                return Err(format!("polygon {pi} vertex {i}: bisector leaves the polygon"));
            }
            // Adjacent trapezoids lie on opposite sides of their shared bisector.
            let next = &row[(i + 1) % n];
            let (o, e) = (&t.corners[1], &t.corners[2]);
            let mine = [cross(o, e, &t.corners[0]), cross(o, e, &t.corners[3])];
            let theirs = [cross(o, e, &next.corners[1]), cross(o, e, &next.corners[2])];
            if !(mine.iter().all(|c| c.is_positive()) && theirs.iter().all(|c| c.is_negative())) {
                return Err(format!("polygon {pi}: trapezoids {i} and {} overlap", (i + 1) % n));
            }
        }
    }
    let all: Vec<&Trapezoid> = traps.iter().flatten().collect();
    for (a, ta) in all.iter().enumerate() {
        for tb in &all[a + 1..] {
            let n = mp.polygons[ta.poly].len();
            let adjacent = ta.poly == tb.poly && ((ta.side + 1) % n == tb.side || (tb.side + 1) % n == ta.side);
            if !adjacent && !quads_disjoint(&ta.corners, &tb.corners) {
                return Err(format!("trapezoids on polygon {} side {} and polygon {} side {} meet", ta.poly, ta.side, tb.poly, tb.side));
            }
        }
    }
    Ok(())
}

/// Largest height (to bisection precision) at which the collar conditions hold.
pub fn hbar_supremum(mp: &Multipolygon) -> Result<Rat> {
    let steps: Vec<_> = mp.polygons.iter().map(bisector_steps).collect::<Result<_>>()?;
    let longest = mp.polygons.iter().flat_map(|p| p.sides.iter()).max().cloned().unwrap_or_else(Rat::one);
    let mut hi = Rat::one();
    while hi < longest {
        hi *= Rat::from_integer(2);
    }
    let mut lo = Rat::zero();
    for _ in 0..BISECTION_STEPS {
        let mid = (lo + hi) / Rat::from_integer(2);
        if check_height(mp, &steps, &mid).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo.is_zero() {
        return Err(Error::Domain("no positive collar height satisfies the trapezoid conditions".into()));
    }
    Ok(lo)
}

/// A collar of height `hbar`, with leaf heights `h(r) = (h̄/2r̄)·r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Collar {
    pub polygons: Vec<Polygon>,
    pub hbar: Rat,
    pub rbar: Rat,
    steps: Vec<Vec<(Rat, Rat)>>,
}

/// Builds a collar, taking the override when it satisfies the conditions and otherwise
/// 9/10 of the supremum rounded down to a multiple of 1/1024.
pub fn build_collar(mp: &Multipolygon, rbar: &Rat, hbar: Option<Rat>) -> Result<Collar> {
    if *rbar <= Rat::zero() {
        return Err(Error::OutOfRange(format!("r̄ = {} must be positive", fmt_rat(rbar))));
    }
    let steps: Vec<_> = mp.polygons.iter().map(bisector_steps).collect::<Result<_>>()?;
    let hbar = match hbar {
        Some(h) => {
            if h <= Rat::zero() {
                return Err(Error::OutOfRange(format!("h̄ = {} must be positive", fmt_rat(&h))));
            }
            check_height(mp, &steps, &h).map_err(|e| Error::Domain(format!("h̄ = {}: trapezoid conditions fail: {e}", fmt_rat(&h))))?;
            h
        }
        None => {
            let sup = hbar_supremum(mp)?;
            let grid = Rat::from_integer(ROUND_DENOM);
            let rounded = (sup * grid).floor() / grid;
            let base = if rounded.is_zero() { sup } else { rounded };
            base * Rat::new(9, 10)
        }
    };
    Ok(Collar { polygons: mp.polygons.clone(), hbar, rbar: *rbar, steps })
}

impl Collar {
    /// Leaf height used for balls of radius `r`.
    pub fn height_for(&self, r: &Rat) -> Rat {
        self.hbar / (Rat::from_integer(2) * self.rbar) * r
    }

    pub fn trapezoids(&self, h: &Rat) -> Vec<Vec<Trapezoid>> {
        trapezoids(&Multipolygon { polygons: self.polygons.clone() }, &self.steps, h)
    }

    fn top_corner(&self, poly: usize, v: usize, h: &Rat) -> Point {
        shifted(&self.polygons[poly].vertices[v], &self.steps[poly][v], h)
    }

    /// Point at height `h` on the vertical leaf through boundary parameter `p`.
    pub fn point(&self, p: &BoundaryParam, h: &Rat) -> Result<Point> {
        let poly = self.polygons.get(p.poly).ok_or_else(|| Error::OutOfRange(format!("polygon {}", p.poly)))?;
        if h.is_negative() || *h > self.hbar {
            return Err(Error::OutOfRange(format!("height {} outside [0, {}]", fmt_rat(h), fmt_rat(&self.hbar))));
        }
        let t = poly.wrap(&p.t);
        let i = poly.side_of(&t);
        let j = (i + 1) % poly.len();
        let lambda = (t - poly.offsets[i]) / poly.sides[i];
        let base = poly.point_at(&t);
        let (a, b) = (self.top_corner(p.poly, i, &self.hbar), self.top_corner(p.poly, j, &self.hbar));
        let top = Point::new(a.x + (b.x - a.x) * lambda, a.y + (b.y - a.y) * lambda);
        let f = h / self.hbar;
        Ok(Point::new(base.x + (top.x - base.x) * f, base.y + (top.y - base.y) * f))
    }

    /// Slides a collar point along its vertical leaf from height `h` to `h2`.
    pub fn retract(&self, p: &BoundaryParam, h: &Rat, h2: &Rat) -> Result<Point> {
        self.point(p, h)?;
        self.point(p, h2)
    }

    /// Horizontal leaf at height `h` from parameter `a` forward to `b` on one polygon, wrapping once.
    pub fn horizontal(&self, poly: usize, a: &Rat, b: &Rat, h: &Rat) -> Result<Vec<Point>> {
        let pg = self.polygons.get(poly).ok_or_else(|| Error::OutOfRange(format!("polygon {poly}")))?;
        let a = pg.wrap(a);
        let mut b = pg.wrap(b);
        if b <= a {
            b += &pg.length;
        }
        let mut out = vec![self.point(&BoundaryParam::new(poly, a), h)?];
        for t in interior_vertices(pg, &a, &b) {
            out.push(self.point(&BoundaryParam::new(poly, t), h)?);
        }
        out.push(self.point(&BoundaryParam::new(poly, b), h)?);
        Ok(out)
    }
}

/// Vertex parameters strictly between `a` and `b` (with `b` possibly past one wrap).
fn interior_vertices(p: &Polygon, a: &Rat, b: &Rat) -> Vec<Rat> {
    let mut out = Vec::new();
    for wrap in [Rat::zero(), p.length] {
        for o in &p.offsets {
            let t = o + wrap;
            if t > *a && t < *b {
                out.push(t);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn poly(pts: &[(i128, i128)]) -> Multipolygon {
        let v = pts.iter().map(|&(x, y)| Point::new(int(x), int(y))).collect();
        Multipolygon::new(vec![Polygon::new(0, v).unwrap()]).unwrap()
    }

    #[test]
    fn unit_square_height() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(hbar_supremum(&sq).unwrap(), rat(1, 4));
        let c = build_collar(&sq, &rat(1, 3), None).unwrap();
        assert_eq!(c.hbar, rat(9, 40));
    }

    #[test]
    fn override_must_satisfy_conditions() {
        let tri = poly(&[(0, 0), (4, 0), (0, 3)]);
        assert!(build_collar(&tri, &rat(1, 3), Some(int(10))).is_err());
        assert!(build_collar(&tri, &rat(1, 3), Some(rat(1, 10))).is_ok());
    }

    #[test]
    fn leaf_points_are_exact() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let c = build_collar(&sq, &rat(1, 3), Some(rat(1, 4))).unwrap();
        let p = c.point(&BoundaryParam::new(0, rat(1, 2)), &rat(1, 8)).unwrap();
        assert_eq!(p, Point::new(rat(1, 2), rat(1, 8)));
        let corner = c.point(&BoundaryParam::new(0, int(1)), &rat(1, 4)).unwrap();
        assert_eq!(corner, Point::new(rat(3, 4), rat(1, 4)));
        let back = c.retract(&BoundaryParam::new(0, rat(1, 3)), &rat(1, 5), &int(0)).unwrap();
        assert_eq!(back, Point::new(rat(1, 3), int(0)));
    }

    #[test]
    fn horizontal_leaf_bends_at_corners() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let c = build_collar(&sq, &rat(1, 3), Some(rat(1, 4))).unwrap();
        let h = c.horizontal(0, &rat(7, 2), &rat(1, 2), &rat(1, 8)).unwrap();
        assert_eq!(h, vec![Point::new(rat(1, 8), rat(1, 2)), Point::new(rat(1, 8), rat(1, 8)), Point::new(rat(1, 2), rat(1, 8))]);
    }
}
