//! Quaternion algebra, quaternion color images and the left-sided
//! quaternion discrete Fourier transform.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, SymmetricEigen};
use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::image::Image;

/// `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn pure(x: f64, y: f64, z: f64) -> Self {
        Self::new(0.0, x, y, z)
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn scale(&self, s: f64) -> Quat {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn is_pure(&self) -> bool {
        self.w == 0.0
    }

    /// `exp(axis * theta) = cos(theta) + axis sin(theta)` for a unit pure axis.
    pub fn exp_axis(axis: Quat, theta: f64) -> Quat {
        let (s, c) = theta.sin_cos();
        Quat::new(c, axis.x * s, axis.y * s, axis.z * s)
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        self.scale(-1.0)
    }
}

/// Hamilton product.
impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuatImage {
    width: usize,
    height: usize,
    values: Vec<Quat>,
}

impl QuatImage {
    pub fn new(width: usize, height: usize, values: Vec<Quat>) -> Self {
        assert!(width >= 1 && height >= 1, "dimensions must be positive");
        assert_eq!(values.len(), width * height, "value count must match dimensions");
        Self { width, height, values }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![Quat::ZERO; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Quat] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> Quat {
        self.values[y * self.width + x]
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(Quat::norm_sqr).sum()
    }
}

/// Pure quaternion color embedding `R i + G j + B k` of alpha-premultiplied pixels.
pub fn to_quaternion_image(img: &Image) -> QuatImage {
    let values = img
        .pixels()
        .iter()
        .map(|p| Quat::pure(p.r * p.a, p.g * p.a, p.b * p.a))
        .collect();
    QuatImage::new(img.width(), img.height(), values)
}

/// Fallback axis for images without color variance.
pub fn gray_axis() -> Quat {
    let c = 1.0 / 3f64.sqrt();
    Quat::pure(c, c, c)
}

/// Unit pure quaternion along the principal eigenvector of the 3x3
/// covariance of the vector parts.
///
/// The sign is fixed so the component sum is non-negative (first non-zero
/// component positive when the sum vanishes). Images with no variance get
/// the gray axis.
pub fn eigen_axis(qimg: &QuatImage) -> Quat {
    let n = qimg.values.len() as f64;
    let mut mean = [0.0; 3];
    let mut mean_sq = 0.0;
    for q in &qimg.values {
        for (m, v) in mean.iter_mut().zip(q.vector()) {
            *m += v;
        }
        mean_sq += q.x * q.x + q.y * q.y + q.z * q.z;
    }
    mean.iter_mut().for_each(|m| *m /= n);
    mean_sq /= n;

    let mut cov = Matrix3::<f64>::zeros();
    for q in &qimg.values {
        let d = [q.x - mean[0], q.y - mean[1], q.z - mean[2]];
        for r in 0..3 {
            for c in 0..3 {
                cov[(r, c)] += d[r] * d[c];
            }
        }
    }
    cov /= n;

    let eig = SymmetricEigen::new(cov);
    let (best, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three eigenvalues");
    if !(lambda > 1e-15 * mean_sq) || lambda <= f64::MIN_POSITIVE {
        return gray_axis();
    }
    let v = eig.eigenvectors.column(best);
    let mut axis = [v[0], v[1], v[2]];
    let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    axis.iter_mut().for_each(|c| *c /= len);
    fix_sign(&mut axis);
    Quat::pure(axis[0], axis[1], axis[2])
}

pub(crate) fn fix_sign(v: &mut [f64; 3]) {
    let sum: f64 = v.iter().sum();
    let flip = if sum.abs() > 1e-12 {
        sum < 0.0
    } else {
        v.iter().find(|c| c.abs() > 1e-12).is_some_and(|&c| c < 0.0)
    };
    if flip {
        v.iter_mut().for_each(|c| *c = -*c);
    }
}

/// Orthonormal frame `(mu, nu, mu * nu)` of pure unit quaternions.
fn frame(axis: Quat) -> (Quat, Quat, Quat) {
    let n = axis.norm();
    let mu = axis.scale(1.0 / n);
    // cross with the basis vector least aligned with mu
    let m = mu.vector();
    let pick = (0..3)
        .min_by(|&a, &b| m[a].abs().total_cmp(&m[b].abs()))
        .expect("three components");
    let mut e = [0.0; 3];
    e[pick] = 1.0;
    let c = [
        m[1] * e[2] - m[2] * e[1],
        m[2] * e[0] - m[0] * e[2],
        m[0] * e[1] - m[1] * e[0],
    ];
    let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let nu = Quat::pure(c[0] / cn, c[1] / cn, c[2] / cn);
    (mu, nu, mu * nu)
}

/// Left-sided quaternion DFT with exponential axis `axis`:
/// `F(u, v) = sum exp(-axis 2 pi (u x / W + v y / H)) q(x, y)`.
///
/// Evaluated as two complex 2D FFTs via the symplectic split
/// `q = (a + b mu) + (c + d mu) nu`.
pub fn qdft(qimg: &QuatImage, axis: Quat) -> QuatImage {
    transform(qimg, axis, FftDirection::Forward)
}

/// Inverse of [`qdft`]: `+axis` in the exponent and a `1 / (W H)` factor.
pub fn iqdft(spec: &QuatImage, axis: Quat) -> QuatImage {
    let mut out = transform(spec, axis, FftDirection::Inverse);
    let s = 1.0 / (out.width * out.height) as f64;
    out.values.iter_mut().for_each(|q| *q = q.scale(s));
    out
}

fn transform(qimg: &QuatImage, axis: Quat, direction: FftDirection) -> QuatImage {
    let (mu, nu, xi) = frame(axis);
    let dot = |q: &Quat, e: &Quat| q.x * e.x + q.y * e.y + q.z * e.z;
    let mut simplex: Vec<Complex64> = Vec::with_capacity(qimg.values.len());
    let mut perplex: Vec<Complex64> = Vec::with_capacity(qimg.values.len());
    for q in &qimg.values {
        simplex.push(Complex64::new(q.w, dot(q, &mu)));
        perplex.push(Complex64::new(dot(q, &nu), dot(q, &xi)));
    }
    let (w, h) = (qimg.width, qimg.height);
    let mut planner = FftPlanner::new();
    fft_2d(&mut planner, w, h, &mut simplex, direction);
    fft_2d(&mut planner, w, h, &mut perplex, direction);

    let values = simplex
        .iter()
        .zip(&perplex)
        .map(|(a, b)| Quat::new(a.re, 0.0, 0.0, 0.0) + mu.scale(a.im) + nu.scale(b.re) + xi.scale(b.im))
        .collect();
    QuatImage::new(w, h, values)
}

fn fft_2d(planner: &mut FftPlanner<f64>, width: usize, height: usize, data: &mut [Complex64], direction: FftDirection) {
    let row_fft = planner.plan_fft(width, direction);
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft(height, direction);
    let mut column = vec![Complex64::default(); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = data[y * width + x];
        }
        col_fft.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            data[y * width + x] = *c;
        }
    }
}

/// Norm below which (relative to the largest coefficient) a coefficient is treated as zero.
pub const PHASE_EPSILON: f64 = 1e-12;

/// Normalizes every coefficient to unit quaternion norm.
///
/// Coefficients whose norm is below `PHASE_EPSILON` times the largest
/// norm in the spectrum are set to zero, so exact spectral zeros stay zero
/// instead of amplifying rounding noise.
pub fn phase_only(spec: &QuatImage) -> QuatImage {
    let max = spec.values.iter().map(Quat::norm).fold(0.0, f64::max);
    let floor = PHASE_EPSILON * max;
    let values = spec
        .values
        .iter()
        .map(|q| {
            let n = q.norm();
            if n <= floor || n == 0.0 {
                Quat::ZERO
            } else {
                q.scale(1.0 / n)
            }
        })
        .collect();
    QuatImage::new(spec.width, spec.height, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Rgba;

    #[test]
    fn hamilton_units() {
        let i = Quat::pure(1.0, 0.0, 0.0);
        let j = Quat::pure(0.0, 1.0, 0.0);
        let k = Quat::pure(0.0, 0.0, 1.0);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, Quat::new(-1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn quaternion_embedding() {
        let img = Image::from_fn(2, 1, |x, _| {
            if x == 0 {
                Rgba::new(1.0, 0.0, 0.0, 1.0)
            } else {
                Rgba::new(0.2, 0.4, 0.6, 0.5)
            }
        });
        let q = to_quaternion_image(&img);
        assert_eq!(q.get(0, 0), Quat::pure(1.0, 0.0, 0.0));
        let p = q.get(1, 0);
        assert!(p.is_pure());
        assert!((p - Quat::pure(0.1, 0.2, 0.3)).norm() < 1e-15);
        let black = to_quaternion_image(&Image::filled(3, 3, Rgba::new(0.0, 0.0, 0.0, 1.0)));
        assert!(black.values().iter().all(|q| *q == Quat::ZERO));
    }

    #[test]
    fn eigen_axis_red_only() {
        let img = Image::from_fn(4, 4, |x, y| Rgba::new(((x + y) % 3) as f64 / 2.0, 0.3, 0.3, 1.0));
        let axis = eigen_axis(&to_quaternion_image(&img));
        assert!((axis - Quat::pure(1.0, 0.0, 0.0)).norm() < 1e-12, "{axis:?}");
    }

    #[test]
    fn eigen_axis_constant_falls_back_to_gray() {
        let img = Image::filled(5, 3, Rgba::new(0.1, 0.7, 0.3, 1.0));
        assert_eq!(eigen_axis(&to_quaternion_image(&img)), gray_axis());
    }

    #[test]
    fn sign_rule() {
        let mut v = [-0.5, 0.1, 0.2];
        fix_sign(&mut v);
        assert_eq!(v, [0.5, -0.1, -0.2]);
        let mut tie = [0.0, -1.0, 1.0];
        fix_sign(&mut tie);
        assert_eq!(tie, [0.0, 1.0, -1.0]);
    }

    #[test]
    fn frame_is_orthonormal() {
        for axis in [gray_axis(), Quat::pure(1.0, 0.0, 0.0), Quat::pure(0.0, 0.6, 0.8)] {
            let (mu, nu, xi) = frame(axis);
            for q in [mu, nu, xi] {
                assert!(q.is_pure());
                assert!((q.norm() - 1.0).abs() < 1e-15);
            }
            let d = |a: Quat, b: Quat| a.x * b.x + a.y * b.y + a.z * b.z;
            assert!(d(mu, nu).abs() < 1e-15 && d(mu, xi).abs() < 1e-15 && d(nu, xi).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_image_is_dc_only() {
        let c = Quat::pure(0.2, 0.5, 0.1);
        let img = QuatImage::new(4, 3, vec![c; 12]);
        let spec = qdft(&img, gray_axis());
        for (idx, f) in spec.values().iter().enumerate() {
            if idx == 0 {
                assert!((*f - c.scale(12.0)).norm() < 1e-12);
            } else {
                assert!(f.norm() < 1e-12, "{idx}: {f:?}");
            }
        }
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let mut values = vec![Quat::ZERO; 6 * 5];
        values[0] = Quat::pure(0.0, 1.0, 0.0);
        let spec = qdft(&QuatImage::new(6, 5, values), gray_axis());
        for f in spec.values() {
            assert!((f.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_only_examples() {
        let img = QuatImage::new(
            3,
            1,
            vec![Quat::new(3.0, 4.0, 0.0, 0.0), Quat::ZERO, Quat::pure(0.0, 0.0, 1.0)],
        );
        let p = phase_only(&img);
        assert!((p.get(0, 0) - Quat::new(0.6, 0.8, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.get(1, 0), Quat::ZERO);
        let again = phase_only(&p);
        for (a, b) in again.values().iter().zip(p.values()) {
            assert!((*a - *b).norm() < 1e-12);
        }
        let zeros = phase_only(&QuatImage::zeros(2, 2));
        assert!(zeros.values().iter().all(|q| *q == Quat::ZERO));
    }
}
