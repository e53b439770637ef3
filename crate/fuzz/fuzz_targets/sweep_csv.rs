#![no_main]
use comptex::sweep::{format_csv, parse_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(result) = parse_csv(text) {
        let once = format_csv(&result);
        let reparsed = parse_csv(&once).expect("formatted output must parse");
        assert_eq!(format_csv(&reparsed), once);
    }
});
