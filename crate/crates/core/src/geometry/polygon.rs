use std::fmt::Write as _;

use super::{orient, Circle, Point, Segment};
use crate::{Error, Result};

/// A simple polygon with counter-clockwise vertices (positive signed area).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<Point>,
}

impl Polygon2D {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let poly = Self { vertices };
        if !(poly.signed_area() > 0.0) {
            return Err(Error::InvalidPolygon(
                "signed area must be positive (counter-clockwise order)".into(),
            ));
        }
        if !poly.is_simple() {
            return Err(Error::InvalidPolygon("polygon self-intersects".into()));
        }
        Ok(poly)
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    /// Parses one `x y` vertex per line. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut coord = || -> Result<f64> {
                let field = fields
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `x y`", lineno + 1)))?;
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number `{field}`", lineno + 1)))
            };
            let (x, y) = (coord()?, coord()?);
            if fields.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing fields", lineno + 1)));
            }
            vertices.push(Point::new(x, y));
        }
        Self::new(vertices)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.vertices {
            let _ = writeln!(out, "{} {}", p.x, p.y);
        }
        out
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.len()).map(move |i| Segment::new(self.vertex(i), self.vertex(i + 1)))
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn diagonal_length(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.dist(hi)
    }

    pub fn centroid(&self) -> Point {
        let n = self.len();
        let mut acc = Point::default();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            acc = acc + (a + b) * a.cross(b);
        }
        acc * (1.0 / (6.0 * self.signed_area()))
    }

    pub fn translated(&self, v: Point) -> Polygon2D {
        Polygon2D {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
        }
    }

    /// Convex when no turn is clockwise. Collinear runs are tolerated.
    pub fn is_convex(&self) -> bool {
        let scale = self.diagonal_length().max(f64::MIN_POSITIVE);
        let eps = 1e-12 * scale * scale;
        (0..self.len()).all(|i| orient(self.vertex(i), self.vertex(i + 1), self.vertex(i + 2)) >= -eps)
    }

    fn is_simple(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            if self.vertex(i) == self.vertex(i + 1) {
                return false;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                // adjacent edges share exactly one vertex
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (self.vertex(i), self.vertex(i + 1));
                let (c, d) = (self.vertex(j), self.vertex(j + 1));
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Even-odd containment test; boundary points may go either way.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges().map(|e| e.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    fn require_convex(&self) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(Error::NonConvexPolygon)
        }
    }
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// All vertex pairs that are not polygon edges, ordered by `(i, j)` with `i < j`.
pub fn polygon_diagonals(poly: &Polygon2D) -> Result<Vec<Segment>> {
    poly.require_convex()?;
    let n = poly.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(3) / 2);
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            out.push(Segment::new(poly.vertex(i), poly.vertex(j)));
        }
    }
    Ok(out)
}

/// Interior angle bisector of every vertex, clipped where it exits the polygon.
pub fn angle_bisectors(poly: &Polygon2D) -> Result<Vec<Segment>> {
    poly.require_convex()?;
    let n = poly.len();
    let scale = poly.diagonal_length();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = poly.vertex(i);
        let prev = poly.vertex(i + n - 1);
        let next = poly.vertex(i + 1);
        let u1 = (prev - v) * (1.0 / prev.dist(v));
        let u2 = (next - v) * (1.0 / next.dist(v));
        let mut dir = u1 + u2;
        if dir.norm() < 1e-12 {
            // straight angle: bisector is the inward normal
            dir = Point::new(-u2.y, u2.x);
        }
        let dir = dir * (1.0 / dir.norm());

        let mut best_t = f64::INFINITY;
        for j in 0..n {
            if j == i || (j + 1) % n == i {
                continue;
            }
            let (a, b) = (poly.vertex(j), poly.vertex(j + 1));
            let e = b - a;
            let denom = dir.cross(e);
            if denom.abs() < 1e-15 {
                continue;
            }
            let w = a - v;
            let t = w.cross(e) / denom;
            let s = w.cross(dir) / denom;
            if t > 1e-12 * scale && (-1e-12..=1.0 + 1e-12).contains(&s) && t < best_t {
                best_t = t;
            }
        }
        if !best_t.is_finite() {
            return Err(Error::DegenerateInput(format!("bisector at vertex {i} never exits")));
        }
        out.push(Segment::new(v, v + dir * best_t));
    }
    Ok(out)
}

/// Largest inscribed circle of a convex polygon (Chebyshev center).
///
/// Bisects on the radius: the polygon shrunk by `r` (every edge moved
/// inward by `r`) is non-empty exactly when `r` is attainable. The optimal
/// centers form a point or a segment; the center returned is the midpoint
/// of the two farthest-apart vertices of the last non-empty shrunk region,
/// i.e. the segment midpoint when the optimum is not unique (rectangles).
pub fn incircle(poly: &Polygon2D) -> Result<Circle> {
    poly.require_convex()?;
    let diag = poly.diagonal_length();
    let (mut lo, mut hi) = (0.0, diag);
    let mut region = poly.vertices().to_vec();
    while hi - lo > 1e-10 * diag {
        let mid = 0.5 * (lo + hi);
        let shrunk = shrink(poly, mid);
        if shrunk.is_empty() {
            hi = mid;
        } else {
            lo = mid;
            region = shrunk;
        }
    }
    let mut far = (region[0], region[0], 0.0);
    for (i, &p) in region.iter().enumerate() {
        for &q in &region[i + 1..] {
            let d = p.dist(q);
            if d > far.2 {
                far = (p, q, d);
            }
        }
    }
    let center = (far.0 + far.1) * 0.5;
    let radius = poly.boundary_distance(center);
    Ok(Circle::new(center, radius))
}

/// Clips the polygon against every edge's half-plane moved inward by `r`.
fn shrink(poly: &Polygon2D, r: f64) -> Vec<Point> {
    let mut region = poly.vertices().to_vec();
    for edge in poly.edges() {
        let d = edge.b - edge.a;
        let normal = Point::new(-d.y, d.x) * (1.0 / d.norm());
        let offset = normal.dot(edge.a) + r;
        let inside = |p: Point| normal.dot(p) - offset;
        let mut next = Vec::with_capacity(region.len() + 1);
        for k in 0..region.len() {
            let (p, q) = (region[k], region[(k + 1) % region.len()]);
            let (fp, fq) = (inside(p), inside(q));
            if fp >= 0.0 {
                next.push(p);
            }
            if (fp >= 0.0) != (fq >= 0.0) {
                let t = fp / (fp - fq);
                next.push(p + (q - p) * t);
            }
        }
        region = next;
        if region.is_empty() {
            break;
        }
    }
    region
}
