//! Parsers for the scalar and list values accepted on the command line and
//! in config files. Lists are separated by commas and/or whitespace.

use std::str::FromStr;

use fpm_core::appell::C64;

use crate::error::{config_err, CliResult};

/// Cap on list lengths and grid sizes.
pub const MAX_ITEMS: usize = 100_000;

pub fn parse_f64(key: &str, s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| config_err(format!("{key}: {s:?} is not a number")))?;
    if !v.is_finite() {
        return Err(config_err(format!("{key}: {s:?} is not finite")));
    }
    Ok(v)
}

pub fn parse_usize(key: &str, s: &str) -> CliResult<usize> {
    s.trim()
        .parse()
        .map_err(|_| config_err(format!("{key}: {s:?} is not a nonnegative integer")))
}

pub fn parse_u64(key: &str, s: &str) -> CliResult<u64> {
    s.trim()
        .parse()
        .map_err(|_| config_err(format!("{key}: {s:?} is not a nonnegative integer")))
}

fn items(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

fn parse_list<T>(key: &str, s: &str, one: impl Fn(&str, &str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let mut out = Vec::new();
    for t in items(s) {
        if out.len() == MAX_ITEMS {
            return Err(config_err(format!("{key}: more than {MAX_ITEMS} values")));
        }
        out.push(one(key, t)?);
    }
    if out.is_empty() {
        return Err(config_err(format!("{key}: empty list")));
    }
    Ok(out)
}

pub fn parse_f64_list(key: &str, s: &str) -> CliResult<Vec<f64>> {
    parse_list(key, s, parse_f64)
}

pub fn parse_usize_list(key: &str, s: &str) -> CliResult<Vec<usize>> {
    parse_list(key, s, parse_usize)
}

/// Complex literals such as `1.5`, `-2i`, `0.3+0.1i`.
pub fn parse_complex(key: &str, s: &str) -> CliResult<C64> {
    let v = C64::from_str(s.trim()).map_err(|_| config_err(format!("{key}: {s:?} is not a complex number")))?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(config_err(format!("{key}: {s:?} is not finite")));
    }
    Ok(v)
}

pub fn parse_complex_list(key: &str, s: &str) -> CliResult<Vec<C64>> {
    parse_list(key, s, parse_complex)
}

/// `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

pub fn parse_grid(s: &str) -> CliResult<Grid> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 3 {
        return Err(config_err(format!("grid: expected lo:hi:step, got {s:?}")));
    }
    let lo = parse_f64("grid", parts[0])?;
    let hi = parse_f64("grid", parts[1])?;
    let step = parse_f64("grid", parts[2])?;
    if !(step > 0.0 && lo <= hi) {
        return Err(config_err(format!("grid: need lo <= hi and step > 0, got {s:?}")));
    }
    if (hi - lo) / step > MAX_ITEMS as f64 {
        return Err(config_err(format!("grid: more than {MAX_ITEMS} points")));
    }
    Ok(Grid { lo, hi, step })
}

/// Whitespace-separated `a,b` pairs, e.g. `1,1 2,3 1,2`.
pub fn parse_pairs(s: &str) -> CliResult<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let (a, b) = tok
            .split_once(',')
            .ok_or_else(|| config_err(format!("pairs: expected a,b, got {tok:?}")))?;
        if out.len() == MAX_ITEMS {
            return Err(config_err(format!("pairs: more than {MAX_ITEMS} pairs")));
        }
        out.push((parse_f64("pairs", a)?, parse_f64("pairs", b)?));
    }
    if out.is_empty() {
        return Err(config_err("pairs: empty list"));
    }
    Ok(out)
}

/// Seeds are decimal `u64`.
pub fn parse_seed(s: &str) -> CliResult<u64> {
    parse_u64("seed", s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_f64("x", " 2.5 ").unwrap(), 2.5);
        assert!(parse_f64("x", "nan").is_err());
        assert!(parse_f64("x", "inf").is_err());
        assert!(parse_usize("n", "-1").is_err());
        assert_eq!(parse_complex("z", "0.3+0.1i").unwrap(), C64::new(0.3, 0.1));
        assert_eq!(parse_complex("z", "-2").unwrap(), C64::new(-2.0, 0.0));
        assert!(parse_complex("z", "1+").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_f64_list("m", "1, 2 3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_f64_list("m", " , ").is_err());
        assert_eq!(parse_usize_list("c", "2,2").unwrap(), vec![2, 2]);
        assert_eq!(
            parse_complex_list("w", "1,0.5-1i").unwrap(),
            vec![C64::new(1.0, 0.0), C64::new(0.5, -1.0)]
        );
    }

    #[test]
    fn grids_and_pairs() {
        assert_eq!(
            parse_grid("0.1:1.0:0.05").unwrap(),
            Grid {
                lo: 0.1,
                hi: 1.0,
                step: 0.05
            }
        );
        assert!(parse_grid("0.1:1.0").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1:1e-300").is_err());
        assert_eq!(parse_pairs("1,1 2,3  1,2").unwrap(), vec![(1.0, 1.0), (2.0, 3.0), (1.0, 2.0)]);
        assert!(parse_pairs("1;2").is_err());
        assert!(parse_pairs("").is_err());
    }

    proptest! {
        #[test]
        fn parsers_never_panic(s in "\\PC{0,64}") {
            let _ = parse_grid(&s);
            let _ = parse_pairs(&s);
            let _ = parse_complex_list("w", &s);
            let _ = parse_f64_list("m", &s);
        }

        #[test]
        fn pairs_roundtrip(v in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..10)) {
            let text: Vec<String> = v.iter().map(|(a, b)| format!("{a:?},{b:?}")).collect();
            prop_assert_eq!(parse_pairs(&text.join(" ")).unwrap(), v);
        }
    }
}
