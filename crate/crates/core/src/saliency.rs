//! Eigen-axis phase quaternion Fourier transform (Eigen-PQFT) saliency.
//!
//! Pipeline: resize so the larger side equals `work_max_dim`, embed colors
//! as pure quaternions, transform along the principal color axis, keep only
//! the spectral phase, transform back, take the squared norm per pixel and
//! smooth with a Gaussian. The map is returned unnormalized so that metrics
//! from different poses of one sweep stay comparable.

use std::io::Write;

use crate::image::{quantize, write_png, Image};
use crate::quat::{eigen_axis, iqdft, phase_only, qdft, to_quaternion_image, Quat, QuatImage};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaliencyParams {
    pub work_max_dim: usize,
    pub sigma: f64,
}

impl Default for SaliencyParams {
    fn default() -> Self {
        Self {
            work_max_dim: 128,
            sigma: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SaliencyMetrics {
    pub integral: f64,
    pub max: f64,
}

impl SaliencyMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width * height, "value count must match dimensions");
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Position of the largest value (first in row-major order on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        metrics(self).integral / self.values.len() as f64
    }

    /// Visualization only: grayscale PNG scaled so the maximum maps to white.
    pub fn encode_heatmap_png(&self, writer: impl Write) -> Result<()> {
        let max = metrics(self).max;
        let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
        let data: Vec<u8> = self.values.iter().map(|v| quantize(v * scale)).collect();
        write_png(writer, self.width, self.height, png::ColorType::Grayscale, &data)
    }

    pub fn heatmap_png_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_heatmap_png(&mut out)
            .expect("encoding into memory cannot fail");
        out
    }
}

/// Total (compensated) sum and maximum of the map.
pub fn metrics(map: &SaliencyMap) -> SaliencyMetrics {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut max: f64 = 0.0;
    for &v in &map.values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
        max = max.max(v);
    }
    SaliencyMetrics {
        integral: sum + comp,
        max,
    }
}

pub fn saliency_map(img: &Image, params: &SaliencyParams) -> SaliencyMap {
    let qimg = resize(&to_quaternion_image(img), params.work_max_dim);
    let axis = eigen_axis(&qimg);
    let phase = phase_only(&qdft(&qimg, axis));
    let recon = iqdft(&phase, axis);
    let energy: Vec<f64> = recon.values().iter().map(Quat::norm_sqr).collect();
    let values = gaussian_blur(&energy, recon.width(), recon.height(), params.sigma);
    SaliencyMap::new(recon.width(), recon.height(), values)
}

/// Working resolution for an input of the given size.
pub fn working_size(width: usize, height: usize, work_max_dim: usize) -> (usize, usize) {
    let longest = width.max(height);
    if longest == work_max_dim || work_max_dim == 0 {
        return (width, height);
    }
    let s = work_max_dim as f64 / longest as f64;
    let w = ((width as f64 * s).round() as usize).max(1);
    let h = ((height as f64 * s).round() as usize).max(1);
    (w, h)
}

/// Bilinear resize with pixel-center alignment and clamped borders.
fn resize(src: &QuatImage, work_max_dim: usize) -> QuatImage {
    let (sw, sh) = (src.width(), src.height());
    let (dw, dh) = working_size(sw, sh, work_max_dim);
    if (dw, dh) == (sw, sh) {
        return src.clone();
    }
    let (fx, fy) = (sw as f64 / dw as f64, sh as f64 / dh as f64);
    let mut values = Vec::with_capacity(dw * dh);
    for y in 0..dh {
        let v = ((y as f64 + 0.5) * fy - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = v.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let ty = v - y0 as f64;
        for x in 0..dw {
            let u = ((x as f64 + 0.5) * fx - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = u.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let tx = u - x0 as f64;
            let top = src.get(x0, y0).scale(1.0 - tx) + src.get(x1, y0).scale(tx);
            let bottom = src.get(x0, y1).scale(1.0 - tx) + src.get(x1, y1).scale(tx);
            values.push(top.scale(1.0 - ty) + bottom.scale(ty));
        }
    }
    QuatImage::new(dw, dh, values)
}

/// Half-sample symmetric reflection of `i` into `0..n`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Separable Gaussian blur truncated at `3 sigma` with reflective borders.
pub fn gaussian_blur(values: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    if !(sigma > 0.0) {
        return values.to_vec();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0; values.len()];
    for y in 0..height {
        let row = &values[y * width..(y + 1) * width];
        for x in 0..width {
            tmp[y * width + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * row[reflect(x as isize + k as isize - radius, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; values.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * tmp[reflect(y as isize + k as isize - radius, height) * width + x])
                .sum::<f64>()
                .max(0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Rgba;

    #[test]
    fn metrics_examples() {
        let zero = SaliencyMap::new(3, 2, vec![0.0; 6]);
        assert_eq!(
            metrics(&zero),
            SaliencyMetrics {
                integral: 0.0,
                max: 0.0
            }
        );
        let mut one = vec![0.0; 6];
        one[4] = 2.5;
        let m = metrics(&SaliencyMap::new(3, 2, one));
        assert_eq!((m.integral, m.max), (2.5, 2.5));
        let m = metrics(&SaliencyMap::new(3, 2, vec![0.25; 6]));
        assert_eq!((m.integral, m.max), (1.5, 0.25));
    }

    #[test]
    fn reflection_indices() {
        let got: Vec<usize> = (-3..7).map(|i| reflect(i, 4)).collect();
        assert_eq!(got, vec![2, 1, 0, 0, 1, 2, 3, 3, 2, 1]);
        assert_eq!(reflect(-1, 1), 0);
        assert_eq!(reflect(5, 1), 0);
    }

    #[test]
    fn blur_preserves_sum_and_constants() {
        let vals: Vec<f64> = (0..35).map(|i| ((i * 7) % 11) as f64).collect();
        let out = gaussian_blur(&vals, 7, 5, 3.0);
        let (a, b): (f64, f64) = (vals.iter().sum(), out.iter().sum());
        assert!((a - b).abs() < 1e-9 * a);
        let flat = gaussian_blur(&[2.0; 12], 4, 3, 1.5);
        assert!(flat.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn working_sizes() {
        assert_eq!(working_size(128, 128, 128), (128, 128));
        assert_eq!(working_size(256, 128, 128), (128, 64));
        assert_eq!(working_size(32, 16, 128), (128, 64));
        assert_eq!(working_size(1000, 1, 128), (128, 1));
    }

    #[test]
    fn constant_image_gives_uniform_map() {
        let img = Image::filled(40, 30, Rgba::new(0.3, 0.6, 0.2, 1.0));
        let map = saliency_map(&img, &SaliencyParams::default());
        let spread = (metrics(&map).max - map.min()) / map.mean();
        assert!(spread <= 1e-6, "{spread}");
    }

    #[test]
    fn impulse_argmax() {
        let img = Image::from_fn(32, 32, |x, y| {
            if (x, y) == (11, 20) {
                Rgba::new(1.0, 1.0, 1.0, 1.0)
            } else {
                Rgba::new(0.0, 0.0, 0.0, 1.0)
            }
        });
        let params = SaliencyParams {
            work_max_dim: 32,
            sigma: 3.0,
        };
        assert_eq!(saliency_map(&img, &params).argmax(), (11, 20));
    }

    #[test]
    fn heatmap_is_grayscale_png() {
        let map = SaliencyMap::new(2, 1, vec![0.5, 1.0]);
        let img = Image::decode_png(map.heatmap_png_bytes().as_slice()).unwrap();
        assert_eq!(img.get(1, 0), Rgba::new(1.0, 1.0, 1.0, 1.0));
        assert!((img.get(0, 0).r - 128.0 / 255.0).abs() < 1e-12);
    }
}
