#![no_main]
use comptex::sweep::SweepAxis;
use comptex::{BlendMode, ColorRGB, VisMode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = s.parse::<ColorRGB>() {
        assert!(c.array().iter().all(|v| (0.0..=1.0).contains(v)));
    }
    if let Ok(m) = s.parse::<VisMode>() {
        assert_eq!(m.to_string().parse::<VisMode>().unwrap(), m);
    }
    if let Ok(b) = s.parse::<BlendMode>() {
        assert_eq!(b.to_string().parse::<BlendMode>().unwrap(), b);
    }
    if let Ok(a) = s.parse::<SweepAxis>() {
        assert_eq!(a.to_string().parse::<SweepAxis>().unwrap(), a);
    }
});
