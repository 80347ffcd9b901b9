//! Rational polygons: arc-length parameterization, simplicity and disjointness predicates.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{exact_sqrt, fmt_rat, to_f64, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    cross(a, b, p).is_zero() && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    let opposite = |x: &Rat, y: &Rat| (x.is_positive() && y.is_negative()) || (x.is_negative() && y.is_positive());
    if opposite(&d1, &d2) && opposite(&d3, &d4) {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// A simple, positively oriented polygon with rational vertices and rational side lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<Point>,
    /// Length of side `i`, from vertex `i` to vertex `i+1`.
    pub sides: Vec<Rat>,
    /// Arc-length parameter of vertex `i`.
    pub offsets: Vec<Rat>,
    pub length: Rat,
}

impl Polygon {
    pub fn new(index: usize, vertices: Vec<Point>) -> Result<Self> {
        let err = |detail: String| Error::Polygon { polygon: index, detail };
        let n = vertices.len();
        if n < 3 {
            return Err(err(format!("needs at least 3 vertices, got {n}")));
        }
        let mut sides = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
            let sq = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
            if sq.is_zero() {
                return Err(err(format!("side {i} has zero length")));
            }
            let len = exact_sqrt(&sq).ok_or_else(|| err(format!("side {i} has irrational length sqrt({})", fmt_rat(&sq))))?;
            sides.push(len);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                let (c, d) = (&vertices[j], &vertices[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent sides share one vertex; they overlap only when folding back on a line.
                    let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    let dot = (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y);
                    if cross(shared, p, q).is_zero() && dot.is_positive() {
                        return Err(err(format!("sides {i} and {j} overlap")));
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Err(err(format!("sides {i} and {j} intersect; polygon is not simple")));
                }
            }
        }
        let mut area2 = Rat::zero();
        for i in 0..n {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
            area2 += a.x * b.y - b.x * a.y;
        }
        if !area2.is_positive() {
            return Err(err("vertices must be listed counterclockwise".to_string()));
        }
        let mut offsets = Vec::with_capacity(n);
        let mut acc = Rat::zero();
        for s in &sides {
            offsets.push(acc);
            acc += s;
        }
        Ok(Polygon { vertices, sides, offsets, length: acc })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Reduces `t` into `[0, L)`.
    pub fn wrap(&self, t: &Rat) -> Rat {
        let mut t = *t;
        while t >= self.length {
            t -= &self.length;
        }
        while t.is_negative() {
            t += &self.length;
        }
        t
    }

    /// Index of the side containing `t`, with `t` in `[offset_i, offset_{i+1})`.
    pub fn side_of(&self, t: &Rat) -> usize {
        let t = self.wrap(t);
        match self.offsets.binary_search(&t) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Vertex index if `t` is a vertex parameter.
    pub fn vertex_at(&self, t: &Rat) -> Option<usize> {
        self.offsets.binary_search(&self.wrap(t)).ok()
    }

    /// Unit direction of side `i` (exact, since side lengths are rational).
    pub fn direction(&self, i: usize) -> (Rat, Rat) {
        let n = self.len();
        let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
        ((b.x - a.x) / self.sides[i], (b.y - a.y) / self.sides[i])
    }

    /// Plane point at arc-length parameter `t`.
    pub fn point_at(&self, t: &Rat) -> Point {
        let t = self.wrap(t);
        let i = self.side_of(&t);
        let (dx, dy) = self.direction(i);
        let s = t - self.offsets[i];
        let v = &self.vertices[i];
        Point::new(v.x + dx * s, v.y + dy * s)
    }

    /// Interior angle at vertex `i`, in radians.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let (ix, iy) = self.direction((i + n - 1) % n);
        let (ox, oy) = self.direction(i);
        let turn = (to_f64(&(ix * oy - iy * ox))).atan2(to_f64(&(ix * ox + iy * oy)));
        std::f64::consts::PI - turn
    }

    /// Point-in-polygon by exact ray crossing; boundary points count as inside.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            if on_segment(p, a, b) {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// A disjoint union of polygons.
#[derive(Clone, Debug, PartialEq)]
pub struct Multipolygon {
    pub polygons: Vec<Polygon>,
}

impl Multipolygon {
    pub fn new(polygons: Vec<Polygon>) -> Result<Self> {
        for i in 0..polygons.len() {
            for j in (i + 1)..polygons.len() {
                if !disjoint(&polygons[i], &polygons[j]) {
                    return Err(Error::Polygon { polygon: j, detail: format!("meets polygon {i}") });
                }
            }
        }
        Ok(Multipolygon { polygons })
    }

    /// Total boundary length |∂P|.
    pub fn boundary_length(&self) -> Rat {
        self.polygons.iter().map(|p| p.length).sum()
    }
}

fn disjoint(p: &Polygon, q: &Polygon) -> bool {
    let (n, m) = (p.len(), q.len());
    for i in 0..n {
        for j in 0..m {
            if segments_intersect(&p.vertices[i], &p.vertices[(i + 1) % n], &q.vertices[j], &q.vertices[(j + 1) % m]) {
                return false;
            }
        }
    }
    !p.contains(&q.vertices[0]) && !q.contains(&p.vertices[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pts(c: &[(i128, i128)]) -> Vec<Point> {
        c.iter().map(|&(x, y)| Point::new(int(x), int(y))).collect()
    }

    #[test]
    fn unit_square_parameterization() {
        let sq = Polygon::new(0, pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        assert_eq!(sq.length, int(4));
        assert_eq!(sq.point_at(&rat(5, 2)), Point::new(rat(1, 2), int(1)));
        assert_eq!(sq.point_at(&rat(7, 2)), Point::new(int(0), rat(1, 2)));
        assert_eq!(sq.side_of(&int(2)), 2);
        assert_eq!(sq.vertex_at(&int(4)), Some(0));
        assert!((sq.interior_angle(1) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_clockwise_bowtie_and_irrational_sides() {
        assert!(Polygon::new(0, pts(&[(0, 0), (0, 1), (1, 1), (1, 0)])).is_err());
        assert!(Polygon::new(0, pts(&[(0, 0), (1, 1), (1, 0), (0, 1)])).is_err());
        assert!(Polygon::new(0, pts(&[(0, 0), (1, 0), (0, 1)])).is_err());
        assert!(Polygon::new(0, pts(&[(0, 0), (4, 0), (0, 3)])).is_ok());
    }

    #[test]
    fn multipolygon_disjointness() {
        let a = Polygon::new(0, pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        let b = Polygon::new(1, pts(&[(2, 0), (3, 0), (3, 1), (2, 1)])).unwrap();
        let c = Polygon::new(1, pts(&[(1, 0), (2, 0), (2, 1), (1, 1)])).unwrap();
        assert!(Multipolygon::new(vec![a.clone(), b]).is_ok());
        assert!(Multipolygon::new(vec![a, c]).is_err());
    }
}
