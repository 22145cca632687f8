//! Replays the checked-in fuzz corpus through the same entry points as the
//! fuzz targets.

use std::path::PathBuf;

use fpm_cli::config::Config;
use fpm_cli::parse::{parse_grid, parse_pairs};
use fpm_core::appell::C64;
use fpm_core::process::Configuration;
use fpm_core::tensor::json::{from_json, to_json};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("config") {
        let ok = Config::parse(&text).is_ok();
        assert_eq!(ok, !matches!(name.as_str(), "duplicate" | "bad_line"), "{name}");
    }
}

#[test]
fn grid_pairs_seeds() {
    for (name, text) in seeds("grid_pairs") {
        let g = parse_grid(&text);
        let p = parse_pairs(&text);
        match name.as_str() {
            "grid_default" | "single_point" => assert!(g.is_ok()),
            "pairs_default" => assert_eq!(p.unwrap().len(), 3),
            _ => assert!(g.is_err() && p.is_err(), "{name}"),
        }
    }
}

#[test]
fn tensor_json_seeds() {
    for (name, text) in seeds("tensor_json") {
        let real = from_json::<f64>(&text);
        let cplx = from_json::<C64>(&text);
        match name.as_str() {
            "real_deg2" | "scalar" => {
                let t = real.unwrap();
                assert_eq!(to_json(&from_json::<f64>(&to_json(&t)).unwrap()), to_json(&t));
            }
            "complex_deg1" => assert!(cplx.is_ok()),
            _ => assert!(real.is_err() && cplx.is_err(), "{name}"),
        }
    }
}

#[test]
fn configuration_jsonl_seeds() {
    for (name, text) in seeds("configuration_jsonl") {
        let r = Configuration::from_jsonl(&text);
        if name == "two_dim" {
            let cs = r.unwrap();
            assert_eq!(cs.len(), 3);
            for c in cs {
                let again = Configuration::from_json_line(&c.to_json_line(), Some(2)).unwrap();
                assert_eq!(again, c);
            }
        } else {
            assert!(r.is_err(), "{name}");
        }
    }
}
