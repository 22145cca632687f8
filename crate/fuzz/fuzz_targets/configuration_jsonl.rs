#![no_main]
use fpm_core::process::Configuration;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cs) = Configuration::from_jsonl(s) {
        for c in cs {
            let dim = c.points.first().map(Vec::len);
            let again = Configuration::from_json_line(&c.to_json_line(), dim).expect("re-parse");
            assert_eq!(again.points, c.points);
        }
    }
});
