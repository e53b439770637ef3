mod common;

use comptex::saliency::{metrics, saliency_map, SaliencyParams};
use comptex::{Image, Rgba};

const WORK32: SaliencyParams = SaliencyParams {
    work_max_dim: 32,
    sigma: 3.0,
};

fn impulse(w: usize, h: usize, at: (usize, usize)) -> Image {
    Image::from_fn(w, h, |x, y| {
        if (x, y) == at {
            Rgba::opaque(comptex::ColorRGB::WHITE)
        } else {
            Rgba::opaque(comptex::ColorRGB::BLACK)
        }
    })
}

#[test]
fn constant_images_give_uniform_maps() {
    for (w, h, v) in [(32, 32, 0.5), (17, 9, 0.2), (128, 64, 1.0), (40, 40, 0.0)] {
        let img = Image::filled(w, h, Rgba::opaque(comptex::ColorRGB::gray(v)));
        let map = saliency_map(&img, &SaliencyParams::default());
        let m = metrics(&map);
        if m.max > 0.0 {
            assert!((m.max - map.min()) / map.mean() <= 1e-6);
        }
    }
}

#[test]
fn impulse_argmax_tracks_the_impulse() {
    // at least 3 sigma from the reflective border
    for at in [(11, 20), (9, 9), (22, 22), (16, 12), (9, 21)] {
        let map = saliency_map(&impulse(32, 32, at), &WORK32);
        assert_eq!(map.argmax(), at);
    }
}

#[test]
fn impulse_maps_are_translation_covariant_in_the_interior() {
    let a = saliency_map(&impulse(32, 32, (12, 12)), &WORK32);
    let b = saliency_map(&impulse(32, 32, (17, 14)), &WORK32);
    // away from the reflective border the blurred maps are shifted copies
    for y in 6..18 {
        for x in 6..18 {
            let (p, q) = (a.get(x, y), b.get(x + 5, y + 2));
            assert!((p - q).abs() <= 1e-9 * a.get(12, 12), "({x}, {y})");
        }
    }
}

#[test]
fn cyclic_channel_permutation_leaves_the_map_unchanged() {
    let mut rng = common::rng(31);
    for _ in 0..5 {
        let img = common::random_image(&mut rng, 24, 20, true);
        let rotated = img.map(|p| Rgba::new(p.b, p.r, p.g, p.a));
        let a = saliency_map(&img, &SaliencyParams::default());
        let b = saliency_map(&rotated, &SaliencyParams::default());
        let scale = metrics(&a).max;
        for (p, q) in a.values().iter().zip(b.values()) {
            assert!((p - q).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn map_is_finite_and_non_negative() {
    let mut rng = common::rng(32);
    for (w, h) in [(1, 1), (1, 7), (5, 3), (64, 40), (200, 130)] {
        let img = common::random_image(&mut rng, w, h, true);
        let map = saliency_map(&img, &SaliencyParams::default());
        assert!(map.values().iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}

#[test]
fn heatmap_is_a_decodable_png() {
    let map = saliency_map(&impulse(32, 32, (4, 9)), &WORK32);
    let png = map.heatmap_png_bytes();
    let img = Image::decode_png(png.as_slice()).unwrap();
    assert_eq!(img.dimensions(), (32, 32));
    assert_eq!(img.get(4, 9), Rgba::opaque(comptex::ColorRGB::WHITE));
}
