use std::fmt::Write as _;

use super::{
    angle_bisectors, delaunay, incircle, min_enclosing_circle, polygon_diagonals, Circle, Point, Polygon2D, Segment,
};
use crate::image::{ColorRGB, Image, Rgba};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSet {
    pub segments: Vec<Segment>,
    pub circles: Vec<Circle>,
    pub stroke_width: f64,
    pub stroke_color: ColorRGB,
}

impl PrimitiveSet {
    pub fn new(stroke_width: f64, stroke_color: ColorRGB) -> Self {
        Self {
            segments: Vec::new(),
            circles: Vec::new(),
            stroke_width: stroke_width.max(1.0),
            stroke_color,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty() && self.circles.is_empty()
    }

    /// Human-readable listing, one primitive per line.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            let _ = writeln!(out, "segment {} {} {} {}", s.a.x, s.a.y, s.b.x, s.b.y);
        }
        for c in &self.circles {
            let _ = writeln!(out, "circle {} {} {}", c.center.x, c.center.y, c.radius);
        }
        out
    }
}

/// Which primitive kinds a geometric complement includes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementConfig {
    pub edges: bool,
    pub diagonals: bool,
    pub bisectors: bool,
    pub incircle: bool,
    pub circumcircle: bool,
    pub delaunay: bool,
    /// Side of the interior sample grid added to the Delaunay point set.
    pub delaunay_grid: usize,
    pub stroke_width: f64,
    pub stroke_color: ColorRGB,
}

impl Default for ComplementConfig {
    fn default() -> Self {
        Self {
            edges: true,
            diagonals: true,
            bisectors: true,
            incircle: true,
            circumcircle: true,
            delaunay: false,
            delaunay_grid: 0,
            stroke_width: 1.0,
            stroke_color: ColorRGB::WHITE,
        }
    }
}

impl ComplementConfig {
    pub fn none() -> Self {
        Self {
            edges: false,
            diagonals: false,
            bisectors: false,
            incircle: false,
            circumcircle: false,
            delaunay: false,
            ..Self::default()
        }
    }

    pub fn all() -> Self {
        Self {
            delaunay: true,
            ..Self::default()
        }
    }

    /// Delaunay mesh over the boundary plus an `n x n` interior grid.
    pub fn wireframe(grid: usize) -> Self {
        Self {
            delaunay: true,
            delaunay_grid: grid,
            ..Self::none()
        }
    }
}

/// Points of an `n x n` lattice over the bounding box that fall strictly
/// inside the polygon.
fn interior_grid(poly: &Polygon2D, n: usize) -> Vec<Point> {
    let (lo, hi) = poly.bounding_box();
    let mut out = Vec::with_capacity(n * n);
    for j in 1..=n {
        for i in 1..=n {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * i as f64 / (n + 1) as f64,
                lo.y + (hi.y - lo.y) * j as f64 / (n + 1) as f64,
            );
            if poly.contains(p) && poly.boundary_distance(p) > 1e-9 {
                out.push(p);
            }
        }
    }
    out
}

pub fn geometric_complement(poly: &Polygon2D, config: &ComplementConfig) -> Result<PrimitiveSet> {
    let mut set = PrimitiveSet::new(config.stroke_width, config.stroke_color);
    if config.edges {
        set.segments.extend(poly.edges());
    }
    if config.diagonals {
        set.segments.extend(polygon_diagonals(poly)?);
    }
    if config.bisectors {
        set.segments.extend(angle_bisectors(poly)?);
    }
    if config.delaunay {
        let mut pts = poly.vertices().to_vec();
        pts.extend(interior_grid(poly, config.delaunay_grid));
        set.segments.extend(delaunay(&pts)?.edge_segments());
    }
    if config.incircle {
        set.circles.push(incircle(poly)?);
    }
    if config.circumcircle {
        set.circles.push(min_enclosing_circle(poly.vertices())?);
    }
    Ok(set)
}

/// Hard-edged stroke rasterization: a pixel is opaque when its center lies
/// within `stroke_width / 2` of a segment or of a circle's locus.
pub fn rasterize(prims: &PrimitiveSet, width: usize, height: usize) -> Image {
    let mut img = Image::transparent(width, height);
    let half = prims.stroke_width / 2.0;
    let ink = Rgba::opaque(prims.stroke_color);

    let mut paint = |lo: Point, hi: Point, hit: &dyn Fn(Point) -> bool| {
        let x0 = (lo.x - half).floor().max(0.0);
        let y0 = (lo.y - half).floor().max(0.0);
        let x1 = (hi.x + half).ceil().min(width as f64 - 1.0);
        let y1 = (hi.y + half).ceil().min(height as f64 - 1.0);
        if !(x0 <= x1 && y0 <= y1) {
            return;
        }
        for y in y0 as usize..=y1 as usize {
            for x in x0 as usize..=x1 as usize {
                if hit(Point::new(x as f64, y as f64)) {
                    img.set(x, y, ink);
                }
            }
        }
    };

    for s in &prims.segments {
        let lo = Point::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y));
        let hi = Point::new(s.a.x.max(s.b.x), s.a.y.max(s.b.y));
        paint(lo, hi, &|p| s.distance_to(p) <= half);
    }
    for c in &prims.circles {
        let r = Point::new(c.radius, c.radius);
        paint(c.center - r, c.center + r, &|p| {
            (p.dist(c.center) - c.radius).abs() <= half
        });
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon2D {
        Polygon2D::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn edges_only() {
        let cfg = ComplementConfig {
            edges: true,
            ..ComplementConfig::none()
        };
        let set = geometric_complement(&square(), &cfg).unwrap();
        assert_eq!(set.segments.len(), 4);
        assert!(set.circles.is_empty());
    }

    #[test]
    fn all_flags_counts() {
        let set = geometric_complement(&square(), &ComplementConfig::all()).unwrap();
        // constituent counts: 4 edges, 2 diagonals, 4 bisectors, 5 unique mesh edges
        let mesh = delaunay(square().vertices()).unwrap();
        assert_eq!(mesh.triangles.len(), 2);
        assert_eq!(set.segments.len(), 4 + 2 + 4 + mesh.edges().len());
        assert_eq!(mesh.edges().len(), 5);
        assert_eq!(set.circles.len(), 2);
    }

    #[test]
    fn triangle_diagonals_only_is_empty() {
        let tri = Polygon2D::new(vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.0, 3.0)]).unwrap();
        let cfg = ComplementConfig {
            diagonals: true,
            ..ComplementConfig::none()
        };
        assert!(geometric_complement(&tri, &cfg).unwrap().is_empty());
    }

    #[test]
    fn empty_set_is_transparent() {
        let img = rasterize(&PrimitiveSet::new(1.0, ColorRGB::WHITE), 5, 4);
        assert!(img.pixels().iter().all(|p| p.a == 0.0));
    }

    #[test]
    fn horizontal_segment_row() {
        let mut set = PrimitiveSet::new(1.0, ColorRGB::new(1.0, 0.0, 0.0));
        set.segments
            .push(Segment::new(Point::new(2.0, 5.0), Point::new(9.0, 5.0)));
        let img = rasterize(&set, 12, 10);
        for y in 0..10 {
            for x in 0..12 {
                let p = Point::new(x as f64, y as f64);
                let want = set.segments[0].distance_to(p) <= 0.5;
                assert_eq!(img.get(x, y).a == 1.0, want, "({x},{y})");
                assert_eq!(want, y == 5 && (2..=9).contains(&x));
            }
        }
        assert_eq!(img.get(3, 5), Rgba::new(1.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn circle_ring_within_band() {
        let mut set = PrimitiveSet::new(2.0, ColorRGB::WHITE);
        let c = Circle::new(Point::new(15.5, 15.5), 9.0);
        set.circles.push(c);
        let img = rasterize(&set, 32, 32);
        let mut opaque = 0;
        for y in 0..32 {
            for x in 0..32 {
                if img.get(x, y).a > 0.0 {
                    opaque += 1;
                    let d = (Point::new(x as f64, y as f64).dist(c.center) - c.radius).abs();
                    assert!(d <= 1.0 + 0.75);
                }
            }
        }
        assert!(opaque > 50);
    }

    #[test]
    fn clipped_to_frame() {
        let mut set = PrimitiveSet::new(3.0, ColorRGB::WHITE);
        set.segments
            .push(Segment::new(Point::new(-50.0, -5.0), Point::new(-10.0, 200.0)));
        set.circles.push(Circle::new(Point::new(100.0, 100.0), 3.0));
        let img = rasterize(&set, 8, 8);
        assert!(img.pixels().iter().all(|p| p.a == 0.0));
    }
}
