//! Photometric complementary textures.
//!
//! A photometric complement is rendered on the virtual replica so that,
//! once it overlaps the real texture exactly, the combination reads as a
//! homogeneous (or deliberately re-patterned) surface.

use crate::image::{ColorRGB, Image, Mask, Rgba};
use crate::{Error, Result};

pub const DEFAULT_HISTOGRAM_BINS: usize = 8;
pub const DEFAULT_VST_TOLERANCE: f64 = 0.1;

/// Additive inversion: each channel becomes `target - c`, clamped to `[0, 1]`.
/// Alpha is copied.
///
/// With an optical see-through display the replica light adds to the real
/// surface, so wherever `c <= target` the overlap sums to exactly `target`.
pub fn invert_complement(tex: &Image, target: ColorRGB) -> Image {
    tex.map(|p| {
        Rgba::new(
            (target.r - p.r).clamp(0.0, 1.0),
            (target.g - p.g).clamp(0.0, 1.0),
            (target.b - p.b).clamp(0.0, 1.0),
            p.a,
        )
    })
}

/// Color of the most populated cell of an alpha-weighted RGB histogram.
///
/// Returns the alpha-weighted mean of the pixels that fell into the winning
/// cell. Ties go to the cell with the smallest `(r, g, b)` index. Pixels are
/// sorted before accumulation, so the result does not depend on pixel order.
pub fn predominant_color(tex: &Image, bins_per_channel: usize) -> Result<ColorRGB> {
    if bins_per_channel < 2 {
        return Err(Error::InvalidArgument(format!(
            "bins_per_channel must be >= 2, got {bins_per_channel}"
        )));
    }
    let bin_of = |v: f64| ((v * bins_per_channel as f64) as usize).min(bins_per_channel - 1);
    let mut samples: Vec<(usize, Rgba)> = tex
        .pixels()
        .iter()
        .filter(|p| p.a > 0.0)
        .map(|&p| {
            let cell = (bin_of(p.r) * bins_per_channel + bin_of(p.g)) * bins_per_channel + bin_of(p.b);
            (cell, p)
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyImage);
    }
    samples.sort_by(|(ca, pa), (cb, pb)| {
        ca.cmp(cb)
            .then(pa.a.total_cmp(&pb.a))
            .then(pa.r.total_cmp(&pb.r))
            .then(pa.g.total_cmp(&pb.g))
            .then(pa.b.total_cmp(&pb.b))
    });

    // (cell, weight, weighted rgb sums) of the best run so far
    let mut best: Option<(usize, f64, [f64; 3])> = None;
    for run in samples.chunk_by(|a, b| a.0 == b.0) {
        let mut weight = 0.0;
        let mut sums = [0.0; 3];
        for (_, p) in run {
            weight += p.a;
            sums[0] += p.a * p.r;
            sums[1] += p.a * p.g;
            sums[2] += p.a * p.b;
        }
        // runs arrive in ascending cell order, so strict `>` keeps the smaller index on ties
        if best.is_none_or(|(_, w, _)| weight > w) {
            best = Some((run[0].0, weight, sums));
        }
    }
    let (_, weight, sums) = best.expect("at least one run");
    Ok(ColorRGB::new(
        (sums[0] / weight).clamp(0.0, 1.0),
        (sums[1] / weight).clamp(0.0, 1.0),
        (sums[2] / weight).clamp(0.0, 1.0),
    ))
}

/// Occlusion complement for video see-through displays.
///
/// Pixels farther than `tol` (Euclidean RGB) from `predominant` are painted
/// opaque in the predominant color; everything else is fully transparent, so
/// the real texture shows through where it already matches.
pub fn vst_complement(tex: &Image, predominant: ColorRGB, tol: f64) -> Result<Image> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 0, got {tol}")));
    }
    Ok(tex.map(|p| {
        if p.rgb().distance(&predominant) > tol {
            Rgba::opaque(predominant)
        } else {
            Rgba::TRANSPARENT
        }
    }))
}

/// Non-homogeneous complement: inside `roi` the replica shows `patch`,
/// outside it is transparent.
pub fn patch_complement(tex: &Image, roi: &Mask, patch: &Image) -> Result<Image> {
    tex.ensure_same_size(roi.dimensions())?;
    tex.ensure_same_size(patch.dimensions())?;
    Ok(Image::from_fn(tex.width(), tex.height(), |x, y| {
        if roi.get(x, y) {
            patch.get(x, y)
        } else {
            Rgba::TRANSPARENT
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: Rgba) -> Image {
        Image::filled(1, 1, p)
    }

    #[test]
    fn inversion_examples() {
        let cases = [
            ([0.0, 0.0, 0.0], ColorRGB::WHITE, [1.0, 1.0, 1.0]),
            ([1.0, 1.0, 1.0], ColorRGB::WHITE, [0.0, 0.0, 0.0]),
            ([0.3, 0.7, 0.5], ColorRGB::WHITE, [0.7, 0.3, 0.5]),
            ([0.8, 0.2, 0.2], ColorRGB::gray(0.5), [0.0, 0.3, 0.3]),
        ];
        for (input, target, expected) in cases {
            let img = single(Rgba::new(input[0], input[1], input[2], 0.25));
            let out = invert_complement(&img, target).get(0, 0);
            for (got, want) in out.rgb().array().iter().zip(expected) {
                assert!((got - want).abs() < 1e-12, "{input:?} -> {out:?}");
            }
            assert_eq!(out.a, 0.25);
        }
    }

    #[test]
    fn predominant_mode_dominates() {
        let img = Image::from_fn(10, 10, |x, y| {
            if y * 10 + x < 90 {
                Rgba::new(1.0, 0.0, 0.0, 1.0)
            } else {
                Rgba::new(0.0, 0.0, 1.0, 1.0)
            }
        });
        assert_eq!(predominant_color(&img, 8).unwrap(), ColorRGB::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn predominant_uniform() {
        let img = Image::filled(4, 3, Rgba::new(0.5, 0.5, 0.5, 1.0));
        assert_eq!(predominant_color(&img, 8).unwrap(), ColorRGB::gray(0.5));
    }

    #[test]
    fn predominant_tie_prefers_smaller_cell() {
        let img = Image::from_fn(2, 1, |x, _| {
            if x == 0 {
                Rgba::new(0.9, 0.0, 0.0, 1.0)
            } else {
                Rgba::new(0.0, 0.9, 0.0, 1.0)
            }
        });
        // (0,7,0) sorts before (7,0,0)
        assert_eq!(predominant_color(&img, 8).unwrap(), ColorRGB::new(0.0, 0.9, 0.0));
    }

    #[test]
    fn predominant_ignores_transparent_and_errors_when_empty() {
        let empty = Image::transparent(3, 3);
        assert!(matches!(predominant_color(&empty, 8), Err(Error::EmptyImage)));
        assert!(matches!(
            predominant_color(&single(Rgba::new(0.0, 0.0, 0.0, 1.0)), 1),
            Err(Error::InvalidArgument(_))
        ));
        let img = Image::from_fn(3, 1, |x, _| match x {
            0 => Rgba::new(0.0, 0.0, 0.0, 1.0),
            _ => Rgba::new(1.0, 1.0, 1.0, 0.0),
        });
        assert_eq!(predominant_color(&img, 8).unwrap(), ColorRGB::BLACK);
    }

    #[test]
    fn vst_examples() {
        let white = ColorRGB::WHITE;
        let same = vst_complement(&single(Rgba::new(1.0, 1.0, 1.0, 1.0)), white, 0.1).unwrap();
        assert_eq!(same.get(0, 0).a, 0.0);
        let black = vst_complement(&single(Rgba::new(0.0, 0.0, 0.0, 1.0)), white, 0.1).unwrap();
        assert_eq!(black.get(0, 0), Rgba::new(1.0, 1.0, 1.0, 1.0));
        assert!(vst_complement(&single(Rgba::TRANSPARENT), white, -1.0).is_err());
    }

    #[test]
    fn vst_checkerboard_paints_black_cells() {
        let checker = Image::from_fn(8, 8, |x, y| {
            let v = ((x + y) % 2) as f64;
            Rgba::new(v, v, v, 1.0)
        });
        let out = vst_complement(&checker, ColorRGB::WHITE, 0.1).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let p = out.get(x, y);
                let src = checker.get(x, y);
                // brute-force classification of the source pixel
                let far = src.rgb().distance(&ColorRGB::WHITE) > 0.1;
                assert_eq!(far, src.r == 0.0);
                if far {
                    assert_eq!(p, Rgba::new(1.0, 1.0, 1.0, 1.0));
                } else {
                    assert_eq!(p.a, 0.0);
                }
            }
        }
    }

    #[test]
    fn patch_examples() {
        let tex = Image::filled(4, 2, Rgba::new(0.2, 0.2, 0.2, 1.0));
        let patch = Image::filled(4, 2, Rgba::new(0.0, 1.0, 0.0, 1.0));
        let none = patch_complement(&tex, &Mask::new(4, 2, false), &patch).unwrap();
        assert!(none.pixels().iter().all(|p| p.a == 0.0));
        let all = patch_complement(&tex, &Mask::new(4, 2, true), &patch).unwrap();
        assert_eq!(all, patch);
        let half = patch_complement(&tex, &Mask::from_fn(4, 2, |x, _| x < 2), &patch).unwrap();
        for y in 0..2 {
            for x in 0..4 {
                let expected = if x < 2 { patch.get(x, y) } else { Rgba::TRANSPARENT };
                assert_eq!(half.get(x, y), expected);
            }
        }
        let err = patch_complement(&tex, &Mask::new(3, 2, true), &patch).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
