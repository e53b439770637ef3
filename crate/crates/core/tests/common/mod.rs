//! Independent reference implementations used by the integration tests.
//!
//! Everything here is deliberately naive: direct sums, power iteration,
//! exhaustive enumeration and grid search.
#![allow(dead_code)]

use std::f64::consts::PI;

use comptex::geometry::{Circle, Point};
use comptex::quat::{Quat, QuatImage};
use comptex::{Image, Rgba};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quat_image(rng: &mut impl Rng, w: usize, h: usize) -> QuatImage {
    let values = (0..w * h)
        .map(|_| {
            Quat::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    QuatImage::new(w, h, values)
}

pub fn random_unit_axis(rng: &mut impl Rng) -> Quat {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0f64),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return Quat::pure(v[0] / n, v[1] / n, v[2] / n);
        }
    }
}

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize, with_alpha: bool) -> Image {
    Image::from_fn(w, h, |_, _| Rgba {
        r: rng.gen(),
        g: rng.gen(),
        b: rng.gen(),
        a: if with_alpha { rng.gen() } else { 1.0 },
    })
}

/// `F(u, v) = sum_{x, y} exp(-axis 2 pi (u x / W + v y / H)) q(x, y)`.
pub fn direct_qdft(q: &QuatImage, axis: Quat) -> QuatImage {
    let (w, h) = (q.width(), q.height());
    let mut out = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let mut acc = Quat::ZERO;
            for y in 0..h {
                for x in 0..w {
                    let phase = 2.0 * PI * ((u * x) as f64 / w as f64 + (v * y) as f64 / h as f64);
                    acc = acc + Quat::exp_axis(axis, -phase) * q.get(x, y);
                }
            }
            out.push(acc);
        }
    }
    QuatImage::new(w, h, out)
}

pub fn max_abs_diff(a: &QuatImage, b: &QuatImage) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(p, q)| (*p - *q).norm())
        .fold(0.0, f64::max)
}

pub fn rms_diff(a: &QuatImage, b: &QuatImage) -> f64 {
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(p, q)| (*p - *q).norm_sqr())
        .sum();
    (sum / a.values().len() as f64).sqrt()
}

/// Principal eigenvector of the color covariance by power iteration, with
/// the same sign convention as the library.
pub fn power_iteration_axis(q: &QuatImage) -> [f64; 3] {
    let n = q.values().len() as f64;
    let mut mean = [0.0; 3];
    for v in q.values() {
        mean[0] += v.x / n;
        mean[1] += v.y / n;
        mean[2] += v.z / n;
    }
    let mut cov = [[0.0; 3]; 3];
    for v in q.values() {
        let d = [v.x - mean[0], v.y - mean[1], v.z - mean[2]];
        for r in 0..3 {
            for c in 0..3 {
                cov[r][c] += d[r] * d[c] / n;
            }
        }
    }
    let mut x = [1.0, 0.7, 0.3];
    for _ in 0..5000 {
        let mut y = [0.0; 3];
        for r in 0..3 {
            for c in 0..3 {
                y[r] += cov[r][c] * x[c];
            }
        }
        let len = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        x = [y[0] / len, y[1] / len, y[2] / len];
    }
    let sum = x[0] + x[1] + x[2];
    let flip = if sum.abs() > 1e-12 {
        sum < 0.0
    } else {
        x.iter().find(|c| c.abs() > 1e-12).is_some_and(|&c| c < 0.0)
    };
    if flip {
        x = [-x[0], -x[1], -x[2]];
    }
    x
}

pub fn circle_through(a: Point, b: Point, c: Point) -> Option<Circle> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-12 {
        return None;
    }
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    Some(Circle::new(center, center.dist(a)))
}

/// Smallest circle among all pair-diameter and triple circumcircles that
/// contains every point.
pub fn mec_enumeration(points: &[Point]) -> f64 {
    let scale = points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let covers = |c: &Circle| points.iter().all(|p| c.center.dist(*p) <= c.radius + tol);
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (a, b) = (points[i], points[j]);
            let c = Circle::new(Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0), a.dist(b) / 2.0);
            if c.radius < best && covers(&c) {
                best = c.radius;
            }
            for &c3 in &points[j + 1..] {
                if let Some(c) = circle_through(a, b, c3) {
                    if c.radius < best && covers(&c) {
                        best = c.radius;
                    }
                }
            }
        }
    }
    best
}

/// Convex hull by monotone chain, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Minimum signed distance to the edge lines of a CCW convex polygon;
/// positive inside.
fn inset(poly: &[Point], p: Point) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            (b - a).cross(p - a) / a.dist(b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest inscribed radius of a CCW convex polygon by grid search.
///
/// Starts from a 64x64 grid of cells over the bounding box and refines
/// best-first: the inset function is 1-Lipschitz, so a cell can beat the
/// best sample only if its center value plus half its diagonal does.
/// Cells are split into quarters until the remaining gap is below
/// `1e-7` times the box diagonal. Returns the best sample, its inset and
/// the certified gap.
pub fn incircle_grid(poly: &[Point]) -> (Point, f64, f64) {
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Cell {
        upper: f64,
        center: Point,
        half: (f64, f64),
    }
    impl Eq for Cell {}
    impl PartialOrd for Cell {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Cell {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.upper.total_cmp(&o.upper)
        }
    }

    const N: usize = 64;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in poly {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let tol = 1e-7 * (x1 - x0).hypot(y1 - y0);
    let mut best = (Point::new(x0, y0), f64::NEG_INFINITY);
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Cell>, best: &mut (Point, f64), center: Point, half: (f64, f64)| {
        let d = inset(poly, center);
        if d > best.1 {
            *best = (center, d);
        }
        heap.push(Cell {
            upper: d + half.0.hypot(half.1),
            center,
            half,
        });
    };
    let half = ((x1 - x0) / (2 * N) as f64, (y1 - y0) / (2 * N) as f64);
    for j in 0..N {
        for i in 0..N {
            let c = Point::new(x0 + half.0 * (2 * i + 1) as f64, y0 + half.1 * (2 * j + 1) as f64);
            push(&mut heap, &mut best, c, half);
        }
    }
    while let Some(cell) = heap.pop() {
        if cell.upper - best.1 <= tol {
            return (best.0, best.1, cell.upper - best.1);
        }
        let h = (cell.half.0 / 2.0, cell.half.1 / 2.0);
        for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let c = Point::new(cell.center.x + sx * h.0, cell.center.y + sy * h.1);
            push(&mut heap, &mut best, c, h);
        }
    }
    (best.0, best.1, 0.0)
}

/// Random convex polygon: hull of points scattered in a random box.
pub fn random_convex_polygon(rng: &mut impl Rng) -> Vec<Point> {
    loop {
        let n = rng.gen_range(3..16);
        let (cx, cy) = (rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        let (sx, sy) = (rng.gen_range(1.0..60.0), rng.gen_range(1.0..60.0));
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new(cx + rng.gen_range(-sx..sx), cy + rng.gen_range(-sy..sy)))
            .collect();
        let hull = convex_hull(&pts);
        if hull.len() >= 3 && polygon_area(&hull) > 1e-3 * sx * sy {
            return hull;
        }
    }
}

pub fn random_points(rng: &mut impl Rng, n: usize, span: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(-span..span), rng.gen_range(-span..span)))
        .collect()
}

/// Points of `pts` strictly inside the circle through `a, b, c`, by exact
/// determinant sign with a relative tolerance.
pub fn strictly_inside_circumcircle(a: Point, b: Point, c: Point, pts: &[Point]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &d) in pts.iter().enumerate() {
        if d == a || d == b || d == c {
            continue;
        }
        let rows = [a - d, b - d, c - d];
        let lift = |p: Point| p.x * p.x + p.y * p.y;
        let det = rows[0].x * (rows[1].y * lift(rows[2]) - lift(rows[1]) * rows[2].y)
            - rows[0].y * (rows[1].x * lift(rows[2]) - lift(rows[1]) * rows[2].x)
            + lift(rows[0]) * (rows[1].x * rows[2].y - rows[1].y * rows[2].x);
        let mag = rows.iter().map(|r| lift(*r)).fold(0.0, f64::max);
        if det > 1e-10 * mag * mag {
            out.push(i);
        }
    }
    out
}
