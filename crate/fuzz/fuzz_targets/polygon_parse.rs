#![no_main]
use comptex::geometry::{incircle, min_enclosing_circle, Polygon2D};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(poly) = Polygon2D::parse(text) {
        assert!(poly.vertices().len() >= 3);
        assert!(poly.vertices().iter().all(|p| p.x.is_finite() && p.y.is_finite()));
        let _ = incircle(&poly);
        let _ = min_enclosing_circle(poly.vertices());
    }
});
