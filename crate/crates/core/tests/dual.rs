use fpm_core::appell::{p_kernels, DiscretizedIntensity, C64};
use fpm_core::dual::*;
use fpm_core::specfun::{gamma_fn, Beta};
use fpm_core::stirling::compositions;
use fpm_core::tensor::scalar::factorial_f64;
use fpm_core::tensor::SymTensor;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    c(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn rand_tensor(rng: &mut ChaCha8Rng, bins: usize, degree: usize) -> SymTensor<C64> {
    SymTensor::from_fn(bins, degree, |_| rand_c(rng, 1.0)).unwrap()
}

fn ctx(order: usize) -> DualContext {
    DualContext::new(
        DiscretizedIntensity::new(vec![1.2, 0.5]).unwrap(),
        Beta::new(0.55).unwrap(),
        order,
    )
    .unwrap()
}

/// `⟨P_m(·), φ^(m)⟩` in monomial form, from `P_m(w) = Σ_k binom(m,k) w^⊗k ⊗̂ P_{m−k}(0)`.
fn p_polynomial(ctx: &DualContext, phi: &SymTensor<C64>) -> PolynomialFunctional {
    let m = phi.degree();
    let zero = vec![c(0.0, 0.0); ctx.bins()];
    let r = p_kernels(ctx.sigma(), ctx.beta(), &zero, m).unwrap();
    let coeffs = (0..=m)
        .map(|k| {
            let chi = r[m - k].contract_into(phi).unwrap();
            chi.scale(&c(fpm_core::tensor::scalar::binomial(m, k) as f64, 0.0))
        })
        .collect();
    PolynomialFunctional::new(ctx.bins(), coeffs).unwrap()
}

#[test]
fn d_operator_on_p_polynomials() {
    let ctx = ctx(4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w: Vec<C64> = (0..2).map(|_| rand_c(&mut rng, 1.0)).collect();
    let pw = p_kernels(ctx.sigma(), ctx.beta(), &w, 4).unwrap();
    for m in 0..=4 {
        let phi = rand_tensor(&mut rng, 2, m);
        let p = p_polynomial(&ctx, &phi);
        for n in 0..=4 {
            let big = rand_tensor(&mut rng, 2, n);
            let got = d_operator(&big, &p).unwrap().evaluate(&w).unwrap();
            let expect = if n > m {
                c(0.0, 0.0)
            } else {
                let f = factorial_f64(m) / factorial_f64(m - n);
                pw[m - n].pair(&big.contract_into(&phi).unwrap()).unwrap() * f
            };
            assert!((got - expect).norm() < 1e-9 * expect.norm().max(1.0), "n={n} m={m}");
        }
    }
}

#[test]
fn first_moment_expectation() {
    let ctx = ctx(2);
    let psi = [c(0.3, -0.4), c(1.1, 0.2)];
    let p = PolynomialFunctional::monomial(SymTensor::vector(&psi).unwrap()).unwrap();
    let expect = (psi[0] * 1.2 + psi[1] * 0.5) / gamma_fn(1.55);
    assert!((ctx.expectation(&p).unwrap() - expect).norm() < 1e-13);
}

#[test]
fn q_pairing_degree_zero_is_scaled_expectation() {
    let ctx = ctx(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = PolynomialFunctional::new(2, (0..=3).map(|n| rand_tensor(&mut rng, 2, n)).collect()).unwrap();
    let k = c(0.7, -2.0);
    let got = ctx.q_pairing(&SymTensor::scalar(2, k).unwrap(), &p).unwrap();
    assert!((got - k * ctx.expectation(&p).unwrap()).norm() < 1e-12);
}

/// `⟨Φ, g^⊗n⟩` with `g = e^φ − 1` expanded multilinearly, keeping total
/// φ-degree `≤ limit`.
fn truncated_g_pairing(big: &SymTensor<C64>, phi: &[C64], limit: usize) -> C64 {
    let n = big.degree();
    if n == 0 {
        return *big.as_scalar().unwrap();
    }
    let mut acc = c(0.0, 0.0);
    for total in n..=limit {
        for parts in compositions(total, n) {
            let vs: Vec<Vec<C64>> = parts
                .iter()
                .map(|&r| phi.iter().map(|x| x.powu(r as u32) / factorial_f64(r)).collect())
                .collect();
            acc += big.pair_vectors(&vs).unwrap();
        }
    }
    acc
}

#[test]
fn g_eigenrelation_on_truncated_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let phi: Vec<C64> = (0..2).map(|_| rand_c(&mut rng, 0.8)).collect();
    let big_m = 7;
    let coeffs: Vec<_> = (0..=big_m)
        .map(|k| SymTensor::tensor_power(&phi, k).unwrap().scale(&c(1.0 / factorial_f64(k), 0.0)))
        .collect();
    let p = PolynomialFunctional::new(2, coeffs.clone()).unwrap();
    for n in 0..=3 {
        let big = rand_tensor(&mut rng, 2, n);
        let g = g_operator(&big, &p).unwrap();
        for j in 0..=big_m.saturating_sub(n) {
            let expect = coeffs[j].scale(&truncated_g_pairing(&big, &phi, big_m - j));
            let diff = g.coeff(j).sub(&expect).unwrap().max_abs();
            assert!(diff < 1e-12 * expect.max_abs().max(1.0), "n={n} j={j} diff={diff}");
        }
    }
}

#[test]
fn delta_pairing_examples() {
    let ctx = ctx(6);
    let w = [c(0.4, 0.3), c(2.0, -1.0)];
    let one = CBasisPolynomial::new(2, vec![SymTensor::scalar(2, c(1.0, 0.0)).unwrap()]).unwrap();
    assert!((ctx.delta_pairing(&w, &one).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

    // ⟨C_n, ψ^⊗n⟩/n! summed to N is the truncated modified Wick exponential.
    let psi = [c(0.2, 0.1), c(-0.3, 0.05)];
    let coeffs: Vec<_> = (0..=6)
        .map(|k| SymTensor::tensor_power(&psi, k).unwrap().scale(&c(1.0 / factorial_f64(k), 0.0)))
        .collect();
    let pc = CBasisPolynomial::new(2, coeffs).unwrap();
    let got = ctx.delta_pairing(&w, &pc).unwrap();
    let dot: C64 = w.iter().zip(&psi).map(|(a, b)| a * (b + 1.0).ln()).sum();
    let l = ctx.laplace(&psi.map(|x| (x + 1.0).ln()), &Default::default()).unwrap();
    let closed = dot.exp() / l;
    assert!((got - closed).norm() < 1e-4, "{got} vs {closed}");
    assert!((got - ctx.to_monomial(&pc).unwrap().evaluate(&w).unwrap()).norm() < 1e-9);
}

#[test]
fn wick_norm_boundary() {
    assert_eq!(wick_norm_sq(1.0 - 1e-6, 1.0, 100).unwrap(), WickNorm::Finite(1.0 / (1.0 - (1.0 - 1e-6))));
    assert_eq!(wick_norm_sq(1.0 + 1e-6, 1.0, 100).unwrap(), WickNorm::Divergent);
    assert_eq!(wick_norm_sq(2.5, 0.0, 1).unwrap(), WickNorm::Finite(2.5f64.exp()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn convolution_two_paths(seed in any::<u64>(), deg in 0usize..=4) {
        let ctx = ctx(4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pc = CBasisPolynomial::new(2, (0..=deg).map(|n| rand_tensor(&mut rng, 2, n)).collect()).unwrap();
        let w: Vec<C64> = (0..2).map(|_| rand_c(&mut rng, 2.0)).collect();
        let direct = convolution(&pc, &w).unwrap();
        let scale = direct.norm().max(1.0);
        prop_assert!((convolution_stirling(&pc, &w).unwrap() - direct).norm() < 1e-9 * scale);
        prop_assert!((ctx.convolution_rnd(&pc, &w).unwrap() - direct).norm() < 1e-9 * scale);
    }

    #[test]
    fn delta_matches_monomial_evaluation(seed in any::<u64>(), deg in 0usize..=4) {
        let ctx = ctx(4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pc = CBasisPolynomial::new(2, (0..=deg).map(|n| rand_tensor(&mut rng, 2, n)).collect()).unwrap();
        let w: Vec<C64> = (0..2).map(|_| rand_c(&mut rng, 2.0)).collect();
        let a = ctx.delta_pairing(&w, &pc).unwrap();
        let b = ctx.to_monomial(&pc).unwrap().evaluate(&w).unwrap();
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }
}
