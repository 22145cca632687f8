use std::path::{Path, PathBuf};

use fpm_core::appell::{DiscretizedIntensity, KernelSet, C64};
use fpm_core::dual::DualContext;
use fpm_core::fpm1d::Fpm1D;
use fpm_core::fpm2d::{beta_grid, figure31};
use fpm_core::process::{bin_counts, sample_configuration, Intensity, Window};
use fpm_core::specfun::{mittag_leffler, ml_derivative, Beta, PrecisionBudget};
use fpm_core::verify::{self, biorthogonality_residuals, random_tensor};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::error::{config_err, CliError, CliResult};
use crate::output::{csv_line, emit, fmt_num, to_json, Format};
use crate::parse::*;
use crate::Command;

const MAX_KMAX: usize = 5_000;
const MAX_MOMENT_ORDER: usize = 60;
const MAX_SAMPLES: usize = 10_000_000;

/// Typed access to the merged parameters.
struct Params<'a>(&'a Config);

impl Params<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key)
    }

    fn required(&self, key: &str) -> CliResult<&str> {
        self.raw(key).ok_or_else(|| config_err(format!("missing required parameter {key}")))
    }

    fn f64(&self, key: &str) -> CliResult<f64> {
        parse_f64(key, self.required(key)?)
    }

    fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        self.raw(key).map_or(Ok(default), |s| parse_f64(key, s))
    }

    fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        self.raw(key).map_or(Ok(default), |s| parse_usize(key, s))
    }

    fn beta(&self) -> CliResult<Beta> {
        Ok(Beta::new(self.f64("beta")?)?)
    }

    fn beta_or(&self, default: f64) -> CliResult<Beta> {
        Ok(Beta::new(self.f64_or("beta", default)?)?)
    }

    fn format(&self, default: Format) -> CliResult<Format> {
        self.raw("format").map_or(Ok(default), Format::parse)
    }

    fn json_only(&self) -> CliResult<()> {
        match self.format(Format::Json)? {
            Format::Json => Ok(()),
            Format::Csv => Err(config_err("this command only writes JSON")),
        }
    }

    fn out(&self) -> Option<PathBuf> {
        self.raw("out").map(PathBuf::from)
    }

    fn seed(&self) -> CliResult<u64> {
        self.raw("seed").map_or(Ok(0), parse_seed)
    }

    fn budget(&self) -> CliResult<PrecisionBudget> {
        let d = PrecisionBudget::default();
        let digits = self.usize_or("digits", d.extended_digits as usize)?;
        Ok(PrecisionBudget::new(
            self.f64_or("tol", d.target_abs_err)?,
            self.usize_or("max-terms", d.max_terms)?,
            u32::try_from(digits).map_err(|_| config_err("digits is too large"))?,
        )?)
    }
}

pub fn dispatch(cmd: &Command, params: &Config) -> CliResult<()> {
    let p = Params(params);
    let out = p.out();
    let out = out.as_deref();
    match cmd {
        Command::MlEval(_) => ml_eval(&p, out),
        Command::FpmPmf(_) => fpm_pmf(&p, out),
        Command::FpmMoments(_) => fpm_moments(&p, out),
        Command::SampleProcess(_) => sample_process(&p, out),
        Command::Figure31(_) => figure(&p, out),
        Command::KernelsDump(_) => kernels_dump(&p, out),
        Command::BiorthogonalityCheck(_) => biorthogonality(&p, out),
        Command::Selftest(_) => selftest(&p, out),
    }
}

#[derive(Serialize)]
struct MlValue {
    z: C64,
    value: C64,
}

#[derive(Serialize)]
struct MlOut {
    beta: f64,
    k: usize,
    values: Vec<MlValue>,
}

fn ml_eval(p: &Params, out: Option<&Path>) -> CliResult<()> {
    let beta = p.beta()?;
    let zs = parse_complex_list("z", p.required("z")?)?;
    let k = p.usize_or("k", 0)?;
    let budget = p.budget()?;
    let mut values = Vec::with_capacity(zs.len());
    for z in zs {
        let value = if k == 0 {
            mittag_leffler(beta, z, &budget)?
        } else {
            if z.im != 0.0 {
                return Err(config_err("derivatives are only available for real z"));
            }
            C64::new(ml_derivative(beta, k, z.re, &budget)?, 0.0)
        };
        values.push(MlValue { z, value });
    }
    let text = match p.format(Format::Csv)? {
        Format::Csv => {
            let mut s = csv_line(&["beta", "z_re", "z_im", "k", "re", "im"].map(String::from));
            for v in &values {
                s += &csv_line(&[
                    fmt_num(beta.value()),
                    fmt_num(v.z.re),
                    fmt_num(v.z.im),
                    k.to_string(),
                    fmt_num(v.value.re),
                    fmt_num(v.value.im),
                ]);
            }
            s
        }
        Format::Json => to_json(&MlOut {
            beta: beta.value(),
            k,
            values,
        }),
    };
    emit(out, &text)
}

#[derive(Serialize)]
struct PmfOut {
    lambda: f64,
    beta: f64,
    kmax: usize,
    pmf: Vec<f64>,
}

fn fpm_pmf(p: &Params, out: Option<&Path>) -> CliResult<()> {
    let lambda = p.f64("lambda")?;
    let beta = p.beta()?;
    let d = Fpm1D::with_budget(lambda, beta, p.budget()?)?;
    let kmax = match p.raw("kmax") {
        Some(s) => parse_usize("kmax", s)?,
        None => {
            let tail = p.f64_or("tail", 1e-12)?;
            if !(tail > 0.0 && tail < 1.0) {
                return Err(config_err("tail must lie in (0, 1)"));
            }
            d.tail_bound(tail)
        }
    };
    if kmax > MAX_KMAX {
        return Err(config_err(format!("kmax {kmax} exceeds {MAX_KMAX}")));
    }
    let pmf = d.pmf_table(kmax)?;
    let text = match p.format(Format::Csv)? {
        Format::Csv => {
            let mut s = csv_line(&["k".into(), "pmf".into()]);
            for (k, v) in pmf.iter().enumerate() {
                s += &csv_line(&[k.to_string(), fmt_num(*v)]);
            }
            s
        }
        Format::Json => to_json(&PmfOut {
            lambda,
            beta: beta.value(),
            kmax,
            pmf,
        }),
    };
    emit(out, &text)
}

#[derive(Serialize)]
struct MomentsOut {
    lambda: f64,
    beta: f64,
    moments: Vec<f64>,
}

fn fpm_moments(p: &Params, out: Option<&Path>) -> CliResult<()> {
    let lambda = p.f64("lambda")?;
    let beta = p.beta()?;
    let n = p.usize_or("n", 3)?;
    if n == 0 || n > MAX_MOMENT_ORDER {
        return Err(config_err(format!("n must lie in 1..={MAX_MOMENT_ORDER}")));
    }
    let d = Fpm1D::new(lambda, beta)?;
    let moments: Vec<f64> = (1..=n).map(|i| d.moment(i)).collect();
    if moments.iter().any(|m| !m.is_finite()) {
        return Err(CliError::Numerical("moment overflowed".into()));
    }
    let text = match p.format(Format::Csv)? {
        Format::Csv => {
            let mut s = csv_line(&["n".into(), "moment".into()]);
            for (i, m) in moments.iter().enumerate() {
                s += &csv_line(&[(i + 1).to_string(), fmt_num(*m)]);
            }
            s
        }
        Format::Json => to_json(&MomentsOut {
            lambda,
            beta: beta.value(),
            moments,
        }),
    };
    emit(out, &text)
}

fn window(p: &Params) -> CliResult<Window> {
    let dim = match (p.raw("dim"), p.raw("lower"), p.raw("upper")) {
        (Some(d), _, _) => parse_usize("dim", d)?,
        (None, Some(l), _) => parse_f64_list("lower", l)?.len(),
        (None, None, Some(u)) => parse_f64_list("upper", u)?.len(),
        _ => 1,
    };
    if dim == 0 || dim > fpm_core::process::MAX_DIM {
        return Err(config_err(format!("dim must lie in 1..={}", fpm_core::process::MAX_DIM)));
    }
    let lower = p.raw("lower").map_or(Ok(vec![0.0; dim]), |s| parse_f64_list("lower", s))?;
    let upper = p.raw("upper").map_or(Ok(vec![1.0; dim]), |s| parse_f64_list("upper", s))?;
    let mut cells = p.raw("cells").map_or(Ok(vec![1]), |s| parse_usize_list("cells", s))?;
    if cells.len() == 1 {
        cells = vec![cells[0]; dim];
    }
    let intensity = match (p.raw("density"), p.raw("masses")) {
        (Some(_), Some(_)) => return Err(config_err("give either density or masses, not both")),
        (Some(d), None) => Intensity::Density(parse_f64("density", d)?),
        (None, Some(m)) => Intensity::CellMasses(parse_f64_list("masses", m)?),
        (None, None) => Intensity::Density(1.0),
    };
    Ok(Window::new(lower, upper, cells, intensity)?)
}

#[derive(Serialize)]
struct SampleStats {
    samples: usize,
    seed: u64,
    beta: f64,
    total_mass: f64,
    mean_count: f64,
    var_count: f64,
    expected_mean: f64,
    cell_masses: Vec<f64>,
    cell_mean_counts: Vec<f64>,
}

fn sample_process(p: &Params, out: Option<&Path>) -> CliResult<()> {
    p.json_only()?;
    let beta = p.beta()?;
    let win = window(p)?;
    let n = p.usize_or("samples", 1000)?;
    if n == 0 || n > MAX_SAMPLES {
        return Err(config_err(format!("samples must lie in 1..={MAX_SAMPLES}")));
    }
    let seed = p.seed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let mut cell_sums = vec![0.0; win.bins()];
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let g = sample_configuration(&win, beta, &mut rng);
        for (acc, c) in cell_sums.iter_mut().zip(bin_counts(&g, &win)?) {
            *acc += c as f64;
        }
        let len = g.len() as f64;
        s1 += len;
        s2 += len * len;
        text += &g.to_json_line();
        text.push('\n');
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let stats = SampleStats {
        samples: n,
        seed,
        beta: beta.value(),
        total_mass: win.total_mass(),
        mean_count: mean,
        var_count: if n > 1 { (s2 - nf * mean * mean) / (nf - 1.0) } else { 0.0 },
        expected_mean: Fpm1D::new(win.total_mass(), beta)?.moment(1),
        cell_masses: win.cell_masses().to_vec(),
        cell_mean_counts: cell_sums.iter().map(|s| s / nf).collect(),
    };
    emit(out, &text)?;
    let stats_path = match (p.raw("stats"), out) {
        (Some(s), _) => Some(PathBuf::from(s)),
        (None, Some(o)) => {
            let mut s = o.as_os_str().to_owned();
            s.push(".stats.json");
            Some(PathBuf::from(s))
        }
        (None, None) => None,
    };
    if let Some(sp) = stats_path {
        emit(Some(&sp), &to_json(&stats))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FigureRowOut {
    beta: f64,
    lambda1: f64,
    lambda2: f64,
    #[serde(rename = "F")]
    f: f64,
}

#[derive(Serialize)]
struct FigureOut {
    rows: Vec<FigureRowOut>,
}

fn figure(p: &Params, out: Option<&Path>) -> CliResult<()> {
    let g = parse_grid(p.raw("grid").unwrap_or("0.1:1.0:0.05"))?;
    let pairs = parse_pairs(p.raw("pairs").unwrap_or("1,1 2,3 1,2"))?;
    let betas = beta_grid(g.lo, g.hi, g.step)?;
    let rows = figure31(&betas, &pairs)?;
    let text = match p.format(Format::Csv)? {
        Format::Csv => {
            let mut s = csv_line(&["beta", "lambda1", "lambda2", "F"].map(String::from));
            for r in &rows {
                s += &csv_line(&[fmt_num(r.beta), fmt_num(r.lambda1), fmt_num(r.lambda2), fmt_num(r.f)]);
            }
            s
        }
        Format::Json => to_json(&FigureOut {
            rows: rows
                .iter()
                .map(|r| FigureRowOut {
                    beta: r.beta,
                    lambda1: r.lambda1,
                    lambda2: r.lambda2,
                    f: r.f,
                })
                .collect(),
        }),
    };
    emit(out, &text)
}

fn kernels_dump(p: &Params, out: Option<&Path>) -> CliResult<()> {
    p.json_only()?;
    let sigma = DiscretizedIntensity::new(parse_f64_list("masses", p.required("masses")?)?)?;
    let beta = p.beta()?;
    let order = p.usize_or("order", 4)?;
    let w = match p.raw("w") {
        Some(s) => parse_complex_list("w", s)?,
        None => vec![C64::new(0.0, 0.0); sigma.bins()],
    };
    let ks = KernelSet::new(sigma, beta, order, w)?;
    emit(out, &to_json(&ks.to_json()))
}

#[derive(Serialize)]
struct BiorthogonalityOut {
    bins: usize,
    nmax: usize,
    beta: f64,
    masses: Vec<f64>,
    seed: u64,
    tolerance: f64,
    /// `table[n][m] = ⟨⟨Q_n(Φ^(n)), ⟨C_m, φ^(m)⟩⟩⟩` as `[re, im]`.
    table: Vec<Vec<C64>>,
    max_off_diagonal: f64,
    max_diagonal_error: f64,
    scale: f64,
    passed: bool,
}

fn biorthogonality(p: &Params, out: Option<&Path>) -> CliResult<()> {
    p.json_only()?;
    let bins = p.usize_or("bins", 2)?;
    let nmax = p.usize_or("nmax", 4)?;
    let beta = p.beta_or(0.5)?;
    let masses = match p.raw("masses") {
        Some(s) => parse_f64_list("masses", s)?,
        None => vec![1.0; bins],
    };
    if masses.len() != bins {
        return Err(config_err(format!("expected {bins} masses, got {}", masses.len())));
    }
    let tol = p.f64_or("tol", 1e-9)?;
    if !(tol > 0.0) {
        return Err(config_err("tol must be positive"));
    }
    let seed = p.seed()?;
    let ctx = DualContext::new(DiscretizedIntensity::new(masses.clone())?, beta, nmax)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big = (0..=nmax)
        .map(|n| random_tensor(&mut rng, bins, n))
        .collect::<Result<Vec<_>, _>>()?;
    let small = (0..=nmax)
        .map(|n| random_tensor(&mut rng, bins, n))
        .collect::<Result<Vec<_>, _>>()?;
    let r = biorthogonality_residuals(&ctx, &big, &small)?;
    let passed = r.max_off_diagonal <= tol * r.scale && r.max_diagonal_error <= tol * r.scale;
    let report = BiorthogonalityOut {
        bins,
        nmax,
        beta: beta.value(),
        masses,
        seed,
        tolerance: tol,
        table: r.table,
        max_off_diagonal: r.max_off_diagonal,
        max_diagonal_error: r.max_diagonal_error,
        scale: r.scale,
        passed,
    };
    emit(out, &to_json(&report))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::TestFailure(format!(
            "residual {:e} exceeds {tol:e}·scale",
            r.max_off_diagonal.max(r.max_diagonal_error)
        )))
    }
}

fn selftest(p: &Params, out: Option<&Path>) -> CliResult<()> {
    let ids: Vec<u8> = match p.raw("only") {
        Some(s) => parse_usize_list("only", s)?
            .into_iter()
            .map(|i| {
                u8::try_from(i)
                    .ok()
                    .filter(|i| verify::CRITERIA.iter().any(|c| c.0 == *i))
                    .ok_or_else(|| config_err(format!("unknown criterion {i}")))
            })
            .collect::<CliResult<_>>()?,
        None => verify::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let mut reports = Vec::new();
    for id in ids {
        let r = verify::run(id).expect("id was validated");
        println!("{}", r.line());
        reports.push(r);
    }
    if let Some(o) = out {
        emit(Some(o), &to_json(&reports))?;
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::TestFailure(format!("criteria {failed:?} failed")))
    }
}
