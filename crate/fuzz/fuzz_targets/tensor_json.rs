#![no_main]
use fpm_core::appell::C64;
use fpm_core::tensor::json::{from_json, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = from_json::<f64>(s) {
        let back = from_json::<f64>(&to_json(&t)).expect("re-parse");
        assert_eq!(to_json(&back), to_json(&t));
    }
    let _ = from_json::<C64>(s);
});
