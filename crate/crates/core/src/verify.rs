//! The acceptance checks, shared by the `acceptance` test target and the
//! `selftest` command. Each check returns a report instead of panicking.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::appell::{
    binomial_product, c_kernels, moment_kernels, moment_kernels_alpha, p_kernels, DiscretizedIntensity, C64,
};
use crate::dual::{
    convolution, convolution_stirling, tensor_norm, wick_norm_sq, CBasisPolynomial, DualContext, WickNorm,
};
use crate::error::Result;
use crate::fpm1d::Fpm1D;
use crate::fpm2d::{beta_grid, f_function, Fpm2D};
use crate::process::{
    bin_counts, char_functional_exact, empirical_char_functional, sample_configuration, Window,
};
use crate::specfun::{gamma_fn, ln_factorial, mittag_leffler_real, sample_nu_beta, Beta, PrecisionBudget};
use crate::stats::{chi_square_counts, mean_se};
use crate::stirling::{
    falling_factorial, operator, stirling_op1, stirling_op1_adj, stirling_op2, stirling_op2_adj, Kind,
    StirlingTable,
};
use crate::tensor::scalar::{binomial, factorial, factorial_f64};
use crate::tensor::{GradedSeries, SymTensor};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub limit_s: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} {}: {} ({:.3}s, limit {}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_s,
            self.limit_s
        )
    }
}

pub const CRITERIA: [(u8, &str, u64); 9] = [
    (1, "moment formulas", 1),
    (2, "pmf normalization and Poisson collapse", 5),
    (3, "non-orthogonality function F", 10),
    (4, "mixture sampling", 30),
    (5, "point process", 60),
    (6, "Stirling suite", 10),
    (7, "Appell identity suite", 30),
    (8, "biorthogonality", 60),
    (9, "distribution examples", 5),
];

/// Runs criterion `id`; numerical errors count as failures.
pub fn run(id: u8) -> Option<CriterionReport> {
    let &(id, name, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = match id {
        1 => check_moments(),
        2 => check_pmf(),
        3 => check_figure(),
        4 => check_mixture(),
        5 => check_point_process(),
        6 => check_stirling(),
        7 => check_appell(),
        8 => check_biorthogonality(),
        9 => check_examples(),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    let (ok, mut detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > limit {
        detail.push_str("; runtime limit exceeded");
    }
    Some(CriterionReport {
        id,
        name,
        passed: ok && elapsed <= limit,
        detail,
        elapsed_s: elapsed.as_secs_f64(),
        limit_s: limit.as_secs_f64(),
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

type Outcome = Result<(bool, String)>;

const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const BETAS: [f64; 4] = [0.3, 0.5, 0.7, 1.0];

fn check_moments() -> Outcome {
    let mut worst = 0.0f64;
    for l in LAMBDAS {
        for b in BETAS {
            let d = Fpm1D::new(l, Beta::new(b)?)?;
            let g1 = l / gamma_fn(b + 1.0);
            let g2 = l * l / gamma_fn(2.0 * b + 1.0);
            let g3 = l * l * l / gamma_fn(3.0 * b + 1.0);
            let closed = [g1, g1 + 2.0 * g2, g1 + 6.0 * g2 + 6.0 * g3];
            for (i, c) in closed.iter().enumerate() {
                worst = worst.max((d.moment(i + 1) - c).abs() / c.abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max relative error {worst:.3e} (tol 1e-10)")))
}

fn check_pmf() -> Outcome {
    let mut worst_norm = 0.0f64;
    let mut worst_poisson = 0.0f64;
    let mut k_max = 0;
    for l in LAMBDAS {
        for b in BETAS {
            let d = Fpm1D::new(l, Beta::new(b)?)?;
            let k = d.tail_bound(1e-10);
            k_max = k_max.max(k);
            let table = d.pmf_table(k)?;
            worst_norm = worst_norm.max((table.iter().sum::<f64>() - 1.0).abs());
            if b == 1.0 {
                for (i, p) in table.iter().enumerate() {
                    let poisson = (i as f64 * l.ln() - l - ln_factorial(i)).exp();
                    worst_poisson = worst_poisson.max((p - poisson).abs());
                }
            }
        }
    }
    Ok((
        worst_norm <= 1e-8 && worst_poisson <= 1e-12,
        format!(
            "max |Σpmf−1| {worst_norm:.3e} (tol 1e-8, K ≤ {k_max}); max |pmf−Poisson| {worst_poisson:.3e} (tol 1e-12)"
        ),
    ))
}

fn check_figure() -> Outcome {
    let grid = beta_grid(0.1, 1.0, 0.05)?;
    let mut at_one = 0.0f64;
    let mut min_inner = f64::INFINITY;
    let mut route = 0.0f64;
    for (l1, l2) in [(1.0, 1.0), (2.0, 3.0), (1.0, 2.0)] {
        for &b in &grid {
            let beta = Beta::new(b)?;
            let f = f_function(beta, l1, l2)?;
            if beta.is_one() {
                at_one = at_one.max(f.abs());
            } else if b <= 0.9 + 1e-12 {
                min_inner = min_inner.min(f.abs());
            }
            // independent route: E[C₁(X₁) C₂(X₂)] with Gram-Schmidt polynomials
            let d = Fpm2D::new(l1, l2, beta)?;
            let (p, q) = d.marginals()?;
            let c1 = &p.orthogonal_polys(1)?[1];
            let c2 = &q.orthogonal_polys(2)?[2];
            let mut e = 0.0;
            for (i, a) in c1.coeffs().iter().enumerate() {
                for (j, c) in c2.coeffs().iter().enumerate() {
                    e += a * c * d.moment2(i, j);
                }
            }
            route = route.max((e - f).abs() / f.abs().max(1.0));
        }
    }
    Ok((
        at_one < 1e-10 && min_inner > 1e-6 && route <= 1e-9,
        format!(
            "|F(1)| max {at_one:.3e} (tol 1e-10); min |F(β≤0.9)| {min_inner:.3e} (> 1e-6); route mismatch {route:.3e} (tol 1e-9)"
        ),
    ))
}

fn check_mixture() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (b, seed) in [(0.5, 401u64), (0.7, 402)] {
        let d = Fpm1D::new(1.5, Beta::new(b)?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<u64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
        let chi = chi_square_counts(&draws, &d.pmf_table(40)?, 5.0)?;
        ok &= chi.p_value > 1e-3;
        parts.push(format!("β={b}: χ² p={:.4}", chi.p_value));
    }
    let mut worst = 0.0f64;
    for (b, seed) in [(0.5, 403u64), (0.7, 404)] {
        let beta = Beta::new(b)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taus: Vec<f64> = (0..100_000).map(|_| sample_nu_beta(beta, &mut rng)).collect();
        for z in [0.5, 1.0, 2.0] {
            let vals: Vec<f64> = taus.iter().map(|t| (-z * t).exp()).collect();
            let (m, se) = mean_se(&vals);
            let exact = mittag_leffler_real(beta, -z, &PrecisionBudget::default())?;
            worst = worst.max((m - exact).abs() / se);
        }
    }
    ok &= worst < 4.0;
    parts.push(format!("ν_β Laplace max {worst:.2} SE (< 4)"));
    Ok((ok, parts.join("; ")))
}

fn check_point_process() -> Outcome {
    let beta = Beta::new(0.6)?;
    let win = Window::unit_box(2, 2, 2.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let samples: Vec<_> = (0..100_000).map(|_| sample_configuration(&win, beta, &mut rng)).collect();
    let totals: Vec<u64> = samples.iter().map(|g| g.len() as u64).collect();
    let chi = chi_square_counts(&totals, &Fpm1D::new(2.0, beta)?.pmf_table(40)?, 5.0)?;
    let first_cell: Vec<u64> = samples
        .iter()
        .map(|g| bin_counts(g, &win).map(|c| c[0]))
        .collect::<Result<_>>()?;
    let chi_sub = chi_square_counts(&first_cell, &Fpm1D::new(0.5, beta)?.pmf_table(40)?, 5.0)?;
    let mut worst = 0.0f64;
    let mut phi_rng = ChaCha8Rng::seed_from_u64(502);
    for _ in 0..5 {
        let phi: Vec<f64> = (0..win.bins()).map(|_| phi_rng.random_range(-1.0..=1.0)).collect();
        let est = empirical_char_functional(&samples, &win, &phi)?;
        let exact = char_functional_exact(&win, beta, &phi, &PrecisionBudget::default())?;
        worst = worst.max(est.z_score(exact));
    }
    Ok((
        chi.p_value > 1e-3 && chi_sub.p_value > 1e-3 && worst < 4.0,
        format!(
            "count χ² p={:.4}; sub-box χ² p={:.4}; char. functional max {worst:.2} SE (< 4)",
            chi.p_value, chi_sub.p_value
        ),
    ))
}

fn rational_tensor(rng: &mut ChaCha8Rng, bins: usize, degree: usize) -> Result<SymTensor<BigRational>> {
    SymTensor::from_fn(bins, degree, |_| {
        BigRational::new(rng.random_range(-50i64..=50).into(), rng.random_range(1i64..=9).into())
    })
}

/// Worst coefficient error of `Σ_n K(n,k)^* ψ^⊗k / n!` against the series of
/// `g(ψ)^⊗k / k!`, with `g = e^x − 1` for the second kind and `log(1+x)` for
/// the first.
fn decomposition_residual(kind: Kind, psi: &[f64], k: usize, order: usize) -> Result<f64> {
    let bins = psi.len();
    let mut inner = GradedSeries::<f64>::zero(bins, order)?;
    for (j, pj) in psi.iter().enumerate() {
        let c = GradedSeries::coordinate(bins, order, j)?;
        let g = match kind {
            Kind::Second => c.exp()?.add_constant(&-1.0),
            Kind::First => c.log1p()?,
        };
        inner = inner.add(&g.scale(pj))?;
    }
    let mut pow = GradedSeries::constant(bins, order, 1.0)?;
    for _ in 0..k {
        pow = pow.mul(&inner)?;
    }
    let target = pow.scale(&(1.0 / factorial_f64(k)));
    let psik = SymTensor::tensor_power(psi, k)?;
    let mut worst = 0.0f64;
    for n in 0..=order {
        let t = operator(kind, true, bins, n, k)?.apply(&psik)?.scale(&(1.0 / factorial_f64(n)));
        worst = worst.max(t.sub(target.coeff(n))?.max_abs());
    }
    Ok(worst)
}

fn check_stirling() -> Outcome {
    let table = StirlingTable::new(8);
    let inverse_ok = table
        .inverse_product()
        .iter()
        .enumerate()
        .all(|(n, row)| row.iter().enumerate().all(|(i, &v)| v == i128::from(n == i)));

    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let mut operator_ok = true;
    for n in 0..=5 {
        let phi = rational_tensor(&mut rng, 2, n)?;
        for i in 0..=n {
            let mut acc = SymTensor::zeros(2, i)?;
            for k in i..=n {
                acc = acc.add(&stirling_op2(i, &stirling_op1(k, &phi)?)?)?;
            }
            operator_ok &= if i == n { acc == phi } else { acc.is_zero() };
        }
    }

    let mut worst = 0.0f64;
    for _ in 0..4 {
        let psi: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
        for k in 0..=8 {
            worst = worst.max(decomposition_residual(Kind::Second, &psi, k, 8)?);
            worst = worst.max(decomposition_residual(Kind::First, &psi, k, 8)?);
        }
    }
    Ok((
        inverse_ok && operator_ok && worst <= 1e-10,
        format!(
            "matrix inverse n≤8 {}; operator identity n≤5 exact {}; generating identities N=8 max {worst:.3e} (tol 1e-10)",
            if inverse_ok { "ok" } else { "FAILED" },
            if operator_ok { "ok" } else { "FAILED" }
        ),
    ))
}

fn rand_c<R: Rng + ?Sized>(rng: &mut R, r: f64) -> C64 {
    C64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn rand_vec(rng: &mut ChaCha8Rng, bins: usize, r: f64) -> Vec<C64> {
    (0..bins).map(|_| rand_c(rng, r)).collect()
}

/// Entries with real and imaginary parts uniform on `(−1, 1)`.
pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, bins: usize, degree: usize) -> Result<SymTensor<C64>> {
    SymTensor::from_fn(bins, degree, |_| rand_c(rng, 1.0))
}

fn rand_sigma(rng: &mut ChaCha8Rng, bins: usize) -> Result<DiscretizedIntensity> {
    DiscretizedIntensity::new((0..bins).map(|_| rng.random_range(0.3..2.0)).collect())
}

/// `max |a−b| / max(1, max|b|)` over the tensor entries.
fn rel(a: &SymTensor<C64>, b: &SymTensor<C64>) -> Result<f64> {
    Ok(a.sub(b)?.max_abs() / b.max_abs().max(1.0))
}

fn check_appell() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let order = 4;
    let mut worst = [0.0f64; 6];
    for _ in 0..5 {
        let sigma = rand_sigma(&mut rng, 2)?;
        let beta = Beta::new(rng.random_range(0.3..=1.0))?;
        let w = rand_vec(&mut rng, 2, 1.5);
        let z = rand_vec(&mut rng, 2, 1.5);
        let zw: Vec<C64> = z.iter().zip(&w).map(|(a, b)| a + b).collect();
        let zero = vec![C64::new(0.0, 0.0); 2];
        let cw = c_kernels(&sigma, beta, &w, order)?;
        let cz = c_kernels(&sigma, beta, &z, order)?;
        let czw = c_kernels(&sigma, beta, &zw, order)?;
        let c0 = c_kernels(&sigma, beta, &zero, order)?;
        let pw = p_kernels(&sigma, beta, &w, order)?;
        let m = moment_kernels(&sigma, beta, order)?;
        let ma = moment_kernels_alpha(&sigma, beta, order)?;
        let ctx = DualContext::new(sigma.clone(), beta, order)?;
        for n in 0..=order {
            // (P1)
            let mut p1 = SymTensor::zeros(2, n)?;
            for k in 0..=n {
                p1 = p1.add(&stirling_op1_adj(n, &pw[k])?)?;
            }
            worst[0] = worst[0].max(rel(&p1, &cw[n])?);
            // (P2)
            let mut p2 = SymTensor::zeros(2, n)?;
            for k in 0..=n {
                let mut s = SymTensor::zeros(2, k)?;
                for mm in 0..=k {
                    s = s.add(&stirling_op2_adj(k, &cw[mm])?)?;
                }
                p2.axpy(&C64::new(binomial(n, k) as f64, 0.0), &s.sym_product(&m[n - k])?)?;
            }
            worst[1] = worst[1].max(rel(&p2, &SymTensor::tensor_power(&w, n)?)?);
            // (P3)
            let mut p3 = SymTensor::zeros(2, n)?;
            for k in 0..=n {
                for l in 0..=(n - k) {
                    let mm = n - k - l;
                    let coef = factorial_f64(n) / (factorial_f64(k) * factorial_f64(l) * factorial_f64(mm));
                    let t = cz[k].sym_product(&cw[l])?.sym_product(&ma[mm])?;
                    p3.axpy(&C64::new(coef, 0.0), &t)?;
                }
            }
            worst[2] = worst[2].max(rel(&p3, &czw[n])?);
            // (P4)
            let ff: Vec<_> = (0..=n).map(|j| falling_factorial(&w, j)).collect::<Result<_>>()?;
            worst[3] = worst[3].max(rel(&binomial_product(&cz, &ff, n)?, &czw[n])?);
            // (P5)
            let mut p5 = SymTensor::zeros(2, n)?;
            for k in 0..=n {
                let mut s = SymTensor::zeros(2, n - k)?;
                for mm in 0..=(n - k) {
                    s = s.add(&stirling_op1_adj(n - k, &SymTensor::tensor_power(&w, mm)?)?)?;
                }
                p5.axpy(&C64::new(binomial(n, k) as f64, 0.0), &c0[k].sym_product(&s)?)?;
            }
            worst[4] = worst[4].max(rel(&p5, &cw[n])?);
            // (P6)
            let phi = random_tensor(&mut rng, 2, n)?;
            let p = ctx.to_monomial(&CBasisPolynomial::single(phi.clone())?)?;
            let e = ctx.expectation(&p)?;
            let expect = if n == 0 { *phi.as_scalar().unwrap_or(&C64::new(0.0, 0.0)) } else { C64::new(0.0, 0.0) };
            worst[5] = worst[5].max((e - expect).norm() / tensor_norm(&phi).max(1.0));
        }
    }
    let mut single = 0.0f64;
    for b in BETAS {
        let beta = Beta::new(b)?;
        let m = moment_kernels(&DiscretizedIntensity::new(vec![1.7])?, beta, 6)?;
        let d = Fpm1D::new(1.7, beta)?;
        for (n, t) in m.iter().enumerate() {
            single = single.max((t.values()[0].re - d.moment(n)).abs() / d.moment(n).max(1.0));
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    Ok((
        max <= 1e-9 && single <= 1e-9,
        format!(
            "P1..P6 residuals {:.1e} {:.1e} {:.1e} {:.1e} {:.1e} {:.1e} (tol 1e-9·scale); single-bin moments {single:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]
        ),
    ))
}

fn check_biorthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let nmax = 4;
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for _ in 0..10 {
        let sigma = rand_sigma(&mut rng, 2)?;
        let beta = Beta::new(rng.random_range(0.3..=1.0))?;
        let ctx = DualContext::new(sigma, beta, nmax)?;
        let big: Vec<_> = (0..=nmax).map(|n| random_tensor(&mut rng, 2, n)).collect::<Result<_>>()?;
        let small: Vec<_> = (0..=nmax).map(|n| random_tensor(&mut rng, 2, n)).collect::<Result<_>>()?;
        let r = biorthogonality_residuals(&ctx, &big, &small)?;
        off = off.max(r.max_off_diagonal / r.scale);
        diag = diag.max(r.max_diagonal_error / r.scale);
    }

    // S-transform through the G operator versus the C-basis route
    let mut ratio = 0.0f64;
    let mut worst_tail = 0.0f64;
    let mut c_route = 0.0f64;
    let budget = PrecisionBudget::default();
    for _ in 0..3 {
        let sigma = rand_sigma(&mut rng, 2)?;
        let beta = Beta::new(rng.random_range(0.3..=1.0))?;
        let ctx = DualContext::new(sigma, beta, 8)?;
        let phi = rand_vec(&mut rng, 2, 0.25);
        let g: Vec<C64> = phi.iter().map(|x| x.exp() - 1.0).collect();
        for n in 0..=nmax {
            let big = random_tensor(&mut rng, 2, n)?;
            let closed = big.pair_power(&g)?;
            let scale = closed.norm().max(1.0);
            let via_c = ctx.s_transform_c_route(&big, &g)?;
            c_route = c_route.max((via_c.value - closed).norm() / scale);
            let via_g = ctx.s_transform_g_route(&big, &phi, &budget)?;
            let tol = 10.0 * via_g.tail_estimate + 1e-9 * scale;
            ratio = ratio.max((via_g.value - via_c.value).norm() / tol);
            worst_tail = worst_tail.max(via_g.tail_estimate);
        }
    }
    Ok((
        off <= 1e-9 && diag <= 1e-9 && c_route <= 1e-9 && ratio <= 1.0,
        format!(
            "off-diagonal {off:.2e}, diagonal error {diag:.2e} (tol 1e-9·scale); S-transform routes at N=8: error/tolerance {ratio:.2e}, last-term tail ≤ {worst_tail:.2e}, C-route vs closed form {c_route:.2e}"
        ),
    ))
}

/// Pairing table summary.
#[derive(Debug, Clone, Serialize)]
pub struct Biorthogonality {
    pub table: Vec<Vec<C64>>,
    pub max_off_diagonal: f64,
    pub max_diagonal_error: f64,
    /// `max(1, max_{n,m} max(n!, m!)·‖Φ^(n)‖·‖φ^(m)‖)`.
    pub scale: f64,
}

pub fn biorthogonality_residuals(
    ctx: &DualContext,
    big: &[SymTensor<C64>],
    small: &[SymTensor<C64>],
) -> Result<Biorthogonality> {
    let table = ctx.pairing_table(big, small)?;
    let mut scale = 1.0f64;
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for (n, row) in table.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let f = factorial_f64(n.max(m));
            scale = scale.max(f * tensor_norm(&big[n]) * tensor_norm(&small[m]));
            if n == m {
                let expect = big[n].pair(&small[n])? * factorial::<C64>(n);
                diag = diag.max((v - expect).norm());
            } else {
                off = off.max(v.norm());
            }
        }
    }
    Ok(Biorthogonality {
        table,
        max_off_diagonal: off,
        max_diagonal_error: diag,
        scale,
    })
}

fn check_examples() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let mut conv = 0.0f64;
    let mut delta = 0.0f64;
    for _ in 0..10 {
        let sigma = rand_sigma(&mut rng, 2)?;
        let beta = Beta::new(rng.random_range(0.3..=1.0))?;
        let ctx = DualContext::new(sigma.clone(), beta, 4)?;
        let deg = rng.random_range(0..=4);
        let coeffs: Vec<_> = (0..=deg).map(|n| random_tensor(&mut rng, 2, n)).collect::<Result<_>>()?;
        let pc = CBasisPolynomial::new(2, coeffs.clone())?;
        let w = rand_vec(&mut rng, 2, 2.0);
        let neg: Vec<C64> = w.iter().map(|x| -x).collect();
        let mut scale = 1.0f64;
        for (n, phi) in coeffs.iter().enumerate() {
            scale += tensor_norm(phi) * tensor_norm(&falling_factorial(&neg, n)?);
        }
        let direct = convolution(&pc, &w)?;
        conv = conv.max((convolution_stirling(&pc, &w)? - direct).norm() / scale);
        conv = conv.max((ctx.convolution_rnd(&pc, &w)? - direct).norm() / scale);

        let cw = c_kernels(&sigma, beta, &w, deg)?;
        let mut dscale = 1.0f64;
        for (c, phi) in cw.iter().zip(&coeffs) {
            dscale += tensor_norm(c) * tensor_norm(phi);
        }
        let d = ctx.delta_pairing(&w, &pc)?;
        delta = delta.max((d - ctx.to_monomial(&pc)?.evaluate(&w)?).norm() / dscale);
    }
    let mut wick_ok = true;
    for t in [0.0, 0.3, 1.0, 4.5] {
        wick_ok &= wick_norm_sq(t, 0.0, 10)? == WickNorm::Finite(f64::exp(t));
    }
    let below = 1.0 - 1e-6;
    wick_ok &= wick_norm_sq(below, 1.0, 10)? == WickNorm::Finite(1.0 / (1.0 - below));
    wick_ok &= wick_norm_sq(1.0 + 1e-6, 1.0, 10)? == WickNorm::Divergent;
    Ok((
        conv <= 1e-9 && delta <= 1e-9 && wick_ok,
        format!(
            "convolution/RND {conv:.2e}, delta {delta:.2e} (tol 1e-9·scale); Wick norm κ=0 and κ=1 boundary {}",
            if wick_ok { "ok" } else { "FAILED" }
        ),
    ))
}
