#![no_main]
use comptex::scene::SceneManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = SceneManifest::parse(text);
    }
});
