use std::collections::HashMap;

use fpm_core::appell::{c_kernels, C64};
use fpm_core::dual::{CBasisPolynomial, DualContext, PolynomialFunctional};
use fpm_core::fpm1d::Fpm1D;
use fpm_core::process::{bin_counts, sample_configuration, Intensity, Window};
use fpm_core::specfun::{gamma_fn, Beta};
use fpm_core::stats::{chi_square_counts, mean_se};
use fpm_core::tensor::SymTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn counts_as_w(counts: &[u64]) -> Vec<C64> {
    counts.iter().map(|&c| C64::new(c as f64, 0.0)).collect()
}

fn real_tensor(rng: &mut ChaCha8Rng, bins: usize, degree: usize) -> SymTensor<C64> {
    SymTensor::from_fn(bins, degree, |_| C64::new(rng.random_range(-1.0..1.0), 0.0)).unwrap()
}

fn samples(win: &Window, beta: Beta, n: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| counts_as_w(&bin_counts(&sample_configuration(win, beta, &mut rng), win).unwrap()))
        .collect()
}

#[test]
fn appell_polynomials_have_zero_mean_on_samples() {
    let beta = Beta::new(0.6).unwrap();
    let win = Window::new(vec![0.0, 0.0], vec![2.0, 1.0], vec![2, 1], Intensity::CellMasses(vec![0.7, 1.1])).unwrap();
    let sigma = win.discretized().unwrap();
    let ws = samples(&win, beta, 100_000, 17);
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for n in 1..=3 {
        let phi = real_tensor(&mut rng, 2, n);
        let mut cache: HashMap<(u64, u64), f64> = HashMap::new();
        let vals: Vec<f64> = ws
            .iter()
            .map(|w| {
                *cache
                    .entry((w[0].re as u64, w[1].re as u64))
                    .or_insert_with(|| c_kernels(&sigma, beta, w, n).unwrap()[n].pair(&phi).unwrap().re)
            })
            .collect();
        let (m, se) = mean_se(&vals);
        assert!(m.abs() < 5.0 * se, "n={n}: mean {m} se {se}");
    }
}

#[test]
fn exact_expectation_matches_monte_carlo() {
    let beta = Beta::new(0.45).unwrap();
    let win = Window::unit_box(1, 2, 1.6).unwrap();
    let ctx = DualContext::new(win.discretized().unwrap(), beta, 3).unwrap();
    let ws = samples(&win, beta, 100_000, 23);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for deg in 1..=3 {
        let p = PolynomialFunctional::new(2, (0..=deg).map(|n| real_tensor(&mut rng, 2, n)).collect()).unwrap();
        let exact = ctx.expectation(&p).unwrap().re;
        let vals: Vec<f64> = ws.iter().map(|w| p.evaluate(w).unwrap().re).collect();
        let (m, se) = mean_se(&vals);
        assert!((m - exact).abs() < 5.0 * se, "deg {deg}: {m} vs {exact} (se {se})");
    }
    // the C-basis route gives the same exact value
    let pc = CBasisPolynomial::new(2, (0..=3).map(|n| real_tensor(&mut rng, 2, n)).collect()).unwrap();
    let mono = ctx.to_monomial(&pc).unwrap();
    let e = ctx.expectation(&mono).unwrap();
    assert!((e - pc.coeffs()[0].as_scalar().unwrap()).norm() < 1e-12);
}

#[test]
fn poisson_process_at_beta_one() {
    let beta = Beta::new(1.0).unwrap();
    let win = Window::unit_box(2, 1, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n: Vec<u64> = (0..50_000).map(|_| sample_configuration(&win, beta, &mut rng).len() as u64).collect();
    let mut pmf = vec![(-3.0f64).exp()];
    for k in 1..30 {
        pmf.push(pmf[k - 1] * 3.0 / k as f64);
    }
    assert!(chi_square_counts(&n, &pmf, 5.0).unwrap().p_value > 1e-3);
}

#[test]
fn tiny_window_is_almost_always_empty() {
    let beta = Beta::new(0.5).unwrap();
    let win = Window::unit_box(1, 1, 1e-12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    assert!((0..1000).all(|_| sample_configuration(&win, beta, &mut rng).is_empty()));
    let d = Fpm1D::new(1e-12, beta).unwrap();
    assert!((d.pmf(0).unwrap() - 1.0).abs() < 1e-11);
}

#[test]
fn fpm1d_sample_mean() {
    let d = Fpm1D::new(1.0, Beta::new(0.5).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let v: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng) as f64).collect();
    let (m, se) = mean_se(&v);
    assert!((m - 1.0 / gamma_fn(1.5)).abs() < 4.0 * se, "{m}");
}

#[test]
fn fpm1d_sample_chi_square() {
    let d = Fpm1D::new(1.5, Beta::new(0.7).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let v: Vec<u64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
    let r = chi_square_counts(&v, &d.pmf_table(20).unwrap(), 5.0).unwrap();
    assert!(r.p_value > 1e-3, "{r:?}");
}
