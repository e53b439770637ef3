#![no_main]
use comptex::Image;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = Image::decode_png(data) {
        let again = Image::decode_png(img.to_png_bytes().as_slice()).unwrap();
        assert_eq!(img.dimensions(), again.dimensions());
        assert_eq!(again.to_png_bytes(), img.to_png_bytes());
    }
});
