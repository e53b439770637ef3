use super::{Circle, Point};
use crate::{Error, Result};

/// Smallest circle enclosing every point (Welzl's incremental form).
///
/// Points are processed in input order; the result is deterministic.
pub fn min_enclosing_circle(points: &[Point]) -> Result<Circle> {
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::DegenerateInput("non-finite coordinate".into()));
    }
    let first = points
        .first()
        .ok_or_else(|| Error::DegenerateInput("no points".into()))?;
    if points.iter().all(|p| p == first) {
        return Err(Error::DegenerateInput("need at least 2 distinct points".into()));
    }
    let scale = points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max);
    let tol = 1e-12 * scale;

    let mut c = Circle::new(points[0], 0.0);
    for i in 1..points.len() {
        if c.contains(points[i], tol) {
            continue;
        }
        c = Circle::new(points[i], 0.0);
        for j in 0..i {
            if c.contains(points[j], tol) {
                continue;
            }
            c = diameter_circle(points[i], points[j]);
            for k in 0..j {
                if !c.contains(points[k], tol) {
                    c = circumcircle(points[i], points[j], points[k])
                        .unwrap_or_else(|| widest_pair(points[i], points[j], points[k]));
                }
            }
        }
    }
    Ok(c)
}

pub(crate) fn diameter_circle(a: Point, b: Point) -> Circle {
    let center = (a + b) * 0.5;
    Circle::new(center, center.dist(a).max(center.dist(b)))
}

/// Circle through three points, `None` when they are (nearly) collinear.
pub(crate) fn circumcircle(a: Point, b: Point, c: Point) -> Option<Circle> {
    let (ab, ac) = (b - a, c - a);
    let d = 2.0 * ab.cross(ac);
    let scale = ab.dot(ab).max(ac.dot(ac));
    if d.abs() <= 1e-14 * scale {
        return None;
    }
    let (b2, c2) = (ab.dot(ab), ac.dot(ac));
    let ux = (ac.y * b2 - ab.y * c2) / d;
    let uy = (ab.x * c2 - ac.x * b2) / d;
    let center = a + Point::new(ux, uy);
    let radius = center.dist(a).max(center.dist(b)).max(center.dist(c));
    Some(Circle::new(center, radius))
}

fn widest_pair(a: Point, b: Point, c: Point) -> Circle {
    [diameter_circle(a, b), diameter_circle(a, c), diameter_circle(b, c)]
        .into_iter()
        .max_by(|x, y| x.radius.total_cmp(&y.radius))
        .expect("three candidates")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let c = min_enclosing_circle(&[Point::new(0.0, 0.0), Point::new(2.0, 0.0)]).unwrap();
        assert_eq!(c.center, Point::new(1.0, 0.0));
        assert_eq!(c.radius, 1.0);
    }

    #[test]
    fn obtuse_triangle_uses_diameter() {
        let pts = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 1.0)];
        let c = min_enclosing_circle(&pts).unwrap();
        assert!(c.center.dist(Point::new(1.0, 0.0)) < 1e-12);
        assert!((c.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_corners() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        let c = min_enclosing_circle(&pts).unwrap();
        assert!(c.center.dist(Point::new(1.0, 1.0)) < 1e-12);
        assert!((c.radius - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(min_enclosing_circle(&[]).is_err());
        assert!(min_enclosing_circle(&[Point::new(1.0, 1.0)]).is_err());
        assert!(min_enclosing_circle(&[Point::new(1.0, 1.0); 4]).is_err());
    }

    #[test]
    fn collinear_points() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        let c = min_enclosing_circle(&pts).unwrap();
        assert!(c.center.dist(Point::new(2.0, 4.0)) < 1e-12);
        assert!((c.radius - 20f64.sqrt()).abs() < 1e-12);
    }
}
