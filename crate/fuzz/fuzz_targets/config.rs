#![no_main]
use fpm_cli::config::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(c) = Config::parse(s) {
            for k in c.keys() {
                assert!(c.get(k).is_some());
            }
        }
    }
});
