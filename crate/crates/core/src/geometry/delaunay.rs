use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use super::{orient, Circle, Point, Segment};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    /// Input points with exact duplicates removed (first occurrence kept).
    pub points: Vec<Point>,
    /// Counter-clockwise vertex-index triples.
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    /// Unique undirected edges as sorted index pairs, in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                set.insert((a.min(b), a.max(b)));
            }
        }
        set.into_iter().collect()
    }

    pub fn edge_segments(&self) -> Vec<Segment> {
        self.edges()
            .into_iter()
            .map(|(a, b)| Segment::new(self.points[a], self.points[b]))
            .collect()
    }

    pub fn circumcircle(&self, t: usize) -> Option<Circle> {
        let [a, b, c] = self.triangles[t];
        super::circle::circumcircle(self.points[a], self.points[b], self.points[c])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient(self.points[a], self.points[b], self.points[c])
    }
}

/// Delaunay triangulation by lexicographic sweep followed by Lawson edge flips.
///
/// Cocircular quadrilaterals keep the diagonal whose endpoint pair is
/// lexicographically smaller, so degenerate inputs (grids, regular
/// polygons) triangulate deterministically.
pub fn delaunay(points: &[Point]) -> Result<Triangulation> {
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::DegenerateInput("non-finite coordinate".into()));
    }
    let mut unique: Vec<Point> = Vec::with_capacity(points.len());
    let mut seen = BTreeSet::new();
    for p in points {
        if seen.insert((p.x.to_bits(), p.y.to_bits())) {
            unique.push(*p);
        }
    }
    if unique.len() < 3 {
        return Err(Error::DegenerateInput("need at least 3 distinct points".into()));
    }
    let triangles = sweep(&unique)?;
    let mut tri = Triangulation {
        points: unique,
        triangles,
    };
    legalize(&mut tri);
    Ok(tri)
}

fn sweep(points: &[Point]) -> Result<Vec<[usize; 3]>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]));

    let left_of = |a: usize, b: usize, c: usize| -> f64 {
        let (pa, pb, pc) = (points[a], points[b], points[c]);
        let o = orient(pa, pb, pc);
        let tol = 1e-12 * pa.dist(pb) * pa.dist(pc);
        if o.abs() <= tol {
            0.0
        } else {
            o
        }
    };

    let apex_pos = (2..order.len())
        .find(|&k| left_of(order[0], order[1], order[k]) != 0.0)
        .ok_or_else(|| Error::DegenerateInput("all points are collinear".into()))?;
    let apex = order[apex_pos];
    let chain = &order[..apex_pos];

    let mut triangles = Vec::with_capacity(2 * points.len());
    let ccw = left_of(chain[0], chain[chain.len() - 1], apex) > 0.0;
    for w in chain.windows(2) {
        triangles.push(if ccw { [w[0], w[1], apex] } else { [w[1], w[0], apex] });
    }
    let mut hull: Vec<usize> = if ccw {
        chain.iter().copied().chain([apex]).collect()
    } else {
        [chain[0], apex]
            .into_iter()
            .chain(chain[1..].iter().rev().copied())
            .collect()
    };

    for &p in &order[apex_pos + 1..] {
        let h = hull.len();
        let visible: Vec<bool> = (0..h).map(|i| left_of(hull[i], hull[(i + 1) % h], p) < 0.0).collect();
        let Some(start) = (0..h).find(|&i| visible[i] && !visible[(i + h - 1) % h]) else {
            // duplicate-free lexicographic order keeps every new point outside the hull
            return Err(Error::DegenerateInput("point not outside current hull".into()));
        };
        hull.rotate_left(start);
        let count = (0..h).take_while(|&i| visible[(start + i) % h]).count();
        for i in 0..count {
            triangles.push([hull[i + 1], hull[i], p]);
        }
        let mut next = Vec::with_capacity(h + 1);
        next.push(hull[0]);
        next.push(p);
        next.extend_from_slice(&hull[count..]);
        hull = next;
    }
    Ok(triangles)
}

/// `Greater` when `d` lies strictly inside the circumcircle of CCW `(a, b, c)`,
/// `Equal` when cocircular within rounding.
fn in_circle(a: Point, b: Point, c: Point, d: Point) -> Ordering {
    let (ad, bd, cd) = (a - d, b - d, c - d);
    let (al, bl, cl) = (ad.dot(ad), bd.dot(bd), cd.dot(cd));
    let t1 = al * bd.cross(cd);
    let t2 = bl * cd.cross(ad);
    let t3 = cl * ad.cross(bd);
    let det = t1 + t2 + t3;
    let magnitude = al * (bd.x * cd.y).abs().max((bd.y * cd.x).abs())
        + bl * (cd.x * ad.y).abs().max((cd.y * ad.x).abs())
        + cl * (ad.x * bd.y).abs().max((ad.y * bd.x).abs());
    if det.abs() <= 1e-12 * magnitude {
        Ordering::Equal
    } else if det > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn diagonal_key(points: &[Point], a: usize, b: usize) -> (Point, Point) {
    let (p, q) = (points[a], points[b]);
    if p.lex_cmp(&q) == Ordering::Greater {
        (q, p)
    } else {
        (p, q)
    }
}

fn key_less(x: (Point, Point), y: (Point, Point)) -> bool {
    x.0.lex_cmp(&y.0).then(x.1.lex_cmp(&y.1)) == Ordering::Less
}

fn legalize(tri: &mut Triangulation) {
    let points = &tri.points;
    let tris = &mut tri.triangles;
    // directed edge -> owning triangle
    let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(tris.len() * 3);
    for (t, v) in tris.iter().enumerate() {
        for k in 0..3 {
            owner.insert((v[k], v[(k + 1) % 3]), t);
        }
    }
    let mut stack: Vec<(usize, usize)> = owner.keys().copied().collect();
    stack.sort_unstable();
    let budget = 64 * points.len() * points.len() + 1024;
    let mut flips = 0;

    while let Some((a, b)) = stack.pop() {
        let (Some(&t1), Some(&t2)) = (owner.get(&(a, b)), owner.get(&(b, a))) else {
            continue;
        };
        let c = opposite(&tris[t1], a, b);
        let d = opposite(&tris[t2], b, a);
        let (pa, pb, pc, pd) = (points[a], points[b], points[c], points[d]);
        let flip = match in_circle(pa, pb, pc, pd) {
            Ordering::Greater => true,
            Ordering::Equal => key_less(diagonal_key(points, c, d), diagonal_key(points, a, b)),
            Ordering::Less => false,
        };
        if !flip || orient(pc, pa, pd) <= 0.0 || orient(pd, pb, pc) <= 0.0 {
            continue;
        }
        flips += 1;
        if flips > budget {
            break;
        }
        for (x, y) in [(a, b), (b, c), (c, a), (b, a), (a, d), (d, b)] {
            owner.remove(&(x, y));
        }
        tris[t1] = [c, a, d];
        tris[t2] = [d, b, c];
        for (t, v) in [(t1, tris[t1]), (t2, tris[t2])] {
            for k in 0..3 {
                owner.insert((v[k], v[(k + 1) % 3]), t);
            }
        }
        stack.extend([(a, d), (d, b), (b, c), (c, a)]);
    }
}

fn opposite(t: &[usize; 3], a: usize, b: usize) -> usize {
    *t.iter()
        .find(|&&v| v != a && v != b)
        .expect("triangle has three vertices")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let t = delaunay(&pts).unwrap();
        assert_eq!(t.triangles.len(), 1);
        assert!(t.area(0) > 0.0);
    }

    #[test]
    fn square_uses_lexicographically_smaller_diagonal() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let t = delaunay(&pts).unwrap();
        assert_eq!(t.triangles.len(), 2);
        let edges = t.edges();
        assert!(edges.contains(&(0, 2)), "{edges:?}");
        assert!(!edges.contains(&(1, 3)));

        // input order must not matter
        let rev: Vec<Point> = pts.iter().rev().copied().collect();
        let t = delaunay(&rev).unwrap();
        // (0,0) is index 3 and (1,1) is index 1 here
        assert!(t.edges().contains(&(1, 3)));
    }

    #[test]
    fn collinear_rejected() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, i as f64)).collect();
        assert!(delaunay(&pts).is_err());
        assert!(delaunay(&pts[..2]).is_err());
    }

    #[test]
    fn duplicates_are_dropped() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 2.0),
        ];
        let t = delaunay(&pts).unwrap();
        assert_eq!(t.points.len(), 3);
        assert_eq!(t.triangles.len(), 1);
    }

    #[test]
    fn collinear_prefix_then_apex() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 2.0),
            Point::new(0.0, 3.0),
            Point::new(1.0, 1.5),
        ];
        let t = delaunay(&pts).unwrap();
        assert_eq!(t.triangles.len(), 3);
        for i in 0..t.triangles.len() {
            assert!(t.area(i) > 0.0);
        }
    }
}
