#![no_main]
use fpm_cli::parse::{parse_grid, parse_pairs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_grid(s) {
        assert!(g.step > 0.0 && g.lo <= g.hi);
        // short grids are cheap enough to expand
        if (g.hi - g.lo) / g.step < 1000.0 {
            let _ = fpm_core::fpm2d::beta_grid(g.lo, g.hi, g.step);
        }
    }
    if let Ok(p) = parse_pairs(s) {
        assert!(!p.is_empty());
    }
});
