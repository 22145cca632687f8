//! Mittag-Leffler function and derivatives, the M-Wright density, Γ, and
//! sampling from the mixing law ν_β.
//!
//! Alternating series are summed with MPFR floats. Before summing, the largest
//! term is located in `f64` log space; the working precision must cover it
//! plus the requested absolute accuracy, otherwise the call fails.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};
use rug::{Complex as BigComplex, Float};

use crate::error::{Error, Result};

/// Order parameter `β ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
pub struct Beta(f64);

impl Beta {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::invalid(format!("beta must lie in (0, 1], got {value}")));
        }
        Ok(Beta(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

/// Accuracy and cost limits for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionBudget {
    pub target_abs_err: f64,
    pub max_terms: usize,
    /// Working precision in decimal digits.
    pub extended_digits: u32,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        Self {
            target_abs_err: 1e-10,
            max_terms: 100_000,
            extended_digits: 64,
        }
    }
}

impl PrecisionBudget {
    pub fn new(target_abs_err: f64, max_terms: usize, extended_digits: u32) -> Result<Self> {
        let b = Self {
            target_abs_err,
            max_terms,
            extended_digits,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_err > 0.0 && self.target_abs_err.is_finite()) {
            return Err(Error::invalid("target_abs_err must be positive and finite"));
        }
        if self.max_terms == 0 || self.max_terms > MAX_TERMS_CEILING {
            return Err(Error::invalid(format!("max_terms must lie in 1..={MAX_TERMS_CEILING}")));
        }
        if self.extended_digits == 0 || self.extended_digits > DIGIT_CEILING {
            return Err(Error::invalid(format!("extended_digits must lie in 1..={DIGIT_CEILING}")));
        }
        Ok(())
    }

    pub fn with_digits(self, extended_digits: u32) -> Self {
        Self {
            extended_digits,
            ..self
        }
    }

    pub fn with_target(self, target_abs_err: f64) -> Self {
        Self {
            target_abs_err,
            ..self
        }
    }
}

/// Upper limit for automatically raised working precision.
pub(crate) const DIGIT_CEILING: u32 = 4000;
pub(crate) const MAX_TERMS_CEILING: usize = 10_000_000;

/// Terms and working precision chosen for one series.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesPlan {
    pub terms: usize,
    pub bits: u32,
}

pub(crate) fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * LN_10 / std::f64::consts::LN_2).ceil() as u32 + 32
}

/// Decide how many terms to sum and at what precision.
///
/// `log10_term(n)` estimates `log10 |a_n|`, `-inf` for vanishing terms. The
/// series is cut once a term is far below the target and the term ratio has
/// dropped under one half.
pub(crate) fn plan_series(
    log10_term: impl Fn(usize) -> f64,
    budget: &PrecisionBudget,
    auto_raise: bool,
) -> Result<SeriesPlan> {
    budget.validate()?;
    let tol = budget.target_abs_err.log10();
    let stop_level = tol - 6.0;
    let scan_cap = budget.max_terms.saturating_mul(4).max(1_000_000);
    let mut max_l = f64::NEG_INFINITY;
    let mut last = f64::NEG_INFINITY;
    let mut n = 0usize;
    let terms = loop {
        let l = log10_term(n);
        if l.is_finite() {
            max_l = max_l.max(l);
            if n >= 2 && l < stop_level && l < last - std::f64::consts::LOG10_2 {
                break n + 1;
            }
            last = l;
        }
        n += 1;
        if n > scan_cap {
            return Err(Error::TermLimitExceeded {
                required: n,
                allowed: budget.max_terms,
            });
        }
    };
    if terms > budget.max_terms {
        return Err(Error::TermLimitExceeded {
            required: terms,
            allowed: budget.max_terms,
        });
    }
    let need = (max_l.max(0.0) - tol + (terms as f64).log10() + 3.0).ceil().max(20.0) as u32;
    let digits = if auto_raise {
        need.max(budget.extended_digits)
    } else {
        budget.extended_digits
    };
    if need > digits || digits > DIGIT_CEILING {
        return Err(Error::CancellationBudgetExceeded {
            required_digits: need,
            available_digits: digits.min(DIGIT_CEILING),
        });
    }
    Ok(SeriesPlan {
        terms,
        bits: bits_for_digits(digits),
    })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x+1))
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x). Returns `+∞` at the poles `0, -1, -2, ...`.
pub fn gamma_fn(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    if x == x.floor() {
        return (2..x as u32).fold(1.0, |acc, k| acc * f64::from(k));
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    // split the power so t^(y+0.5) does not overflow before e^-t is applied
    let half = t.powf((y + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(y)
}

/// 1/Γ(x), zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 171.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma_fn(x)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps accuracy near zero
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (y + 0.5) * t.ln() - t + lanczos_sum(y).ln()
}

/// ln |1/Γ(x)| for any real x (−∞ at the poles).
pub(crate) fn ln_abs_recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NEG_INFINITY;
    }
    if x > 0.0 {
        return -ln_gamma(x);
    }
    // 1/Γ(x) = Γ(1-x) sin(πx)/π, |sin| bounded by one
    ln_gamma(1.0 - x) + (PI * x).sin().abs().max(1e-300).ln() - PI.ln()
}

/// 1/Γ(x) at working precision, zero at the poles.
pub(crate) fn recip_gamma_big(x: &Float) -> Float {
    let prec = x.prec();
    if x.is_integer() && *x <= 0 {
        return Float::new(prec);
    }
    Float::with_val(prec, x.gamma_ref()).recip()
}

/// E_β(z) = Σ z^n / Γ(βn + 1).
pub fn mittag_leffler(beta: Beta, z: Complex64, budget: &PrecisionBudget) -> Result<Complex64> {
    mittag_leffler_impl(beta, z, budget, false)
}

pub(crate) fn mittag_leffler_impl(
    beta: Beta,
    z: Complex64,
    budget: &PrecisionBudget,
    auto_raise: bool,
) -> Result<Complex64> {
    budget.validate()?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("mittag_leffler: argument must be finite"));
    }
    if beta.is_one() {
        return Ok(z.exp());
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let b = beta.value();
    let lz = z.norm().log10();
    let plan = plan_series(
        |n| n as f64 * lz - ln_gamma(b * n as f64 + 1.0) / LN_10,
        budget,
        auto_raise,
    )?;
    let prec = plan.bits;
    let zb = BigComplex::with_val(prec, (z.re, z.im));
    let mut pow = BigComplex::with_val(prec, (1, 0));
    let mut acc = BigComplex::with_val(prec, (0, 0));
    let bb = Float::with_val(prec, b);
    for n in 0..plan.terms {
        if n > 0 {
            pow *= &zb;
        }
        let arg = Float::with_val(prec, &bb * n as u32) + 1u32;
        let g = recip_gamma_big(&arg);
        acc += BigComplex::with_val(prec, &pow * &g);
    }
    let (re, im) = acc.into_real_imag();
    Ok(Complex64::new(re.to_f64(), im.to_f64()))
}

/// Real-argument convenience wrapper.
pub fn mittag_leffler_real(beta: Beta, x: f64, budget: &PrecisionBudget) -> Result<f64> {
    Ok(mittag_leffler(beta, Complex64::new(x, 0.0), budget)?.re)
}

/// E_β^{(k)}(x) = Σ_n ((n+k)!/n!) x^n / Γ(β(n+k) + 1).
pub fn ml_derivative(beta: Beta, k: usize, x: f64, budget: &PrecisionBudget) -> Result<f64> {
    ml_derivative_impl(beta, k, x, budget, false)
}

pub(crate) fn ml_derivative_impl(
    beta: Beta,
    k: usize,
    x: f64,
    budget: &PrecisionBudget,
    auto_raise: bool,
) -> Result<f64> {
    budget.validate()?;
    if !x.is_finite() {
        return Err(Error::invalid("ml_derivative: argument must be finite"));
    }
    let b = beta.value();
    let kf = k as f64;
    if x == 0.0 {
        return Ok(ln_factorial(k).exp() * recip_gamma(b * kf + 1.0));
    }
    let lx = x.abs().log10();
    let plan = plan_series(
        |n| {
            let nf = n as f64;
            (ln_gamma(nf + kf + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(b * (nf + kf) + 1.0)) / LN_10
                + nf * lx
        },
        budget,
        auto_raise,
    )?;
    let prec = plan.bits;
    let xb = Float::with_val(prec, x);
    let bb = Float::with_val(prec, b);
    // coef = (n+k)!/n! * x^n
    let mut coef = Float::with_val(prec, 1);
    for j in 2..=k as u32 {
        coef *= j;
    }
    let mut acc = Float::new(prec);
    for n in 0..plan.terms {
        if n > 0 {
            coef *= (n + k) as u32;
            coef /= n as u32;
            coef *= &xb;
        }
        let arg = Float::with_val(prec, &bb * (n + k) as u32) + 1u32;
        acc += Float::with_val(prec, &coef * recip_gamma_big(&arg));
    }
    let v = acc.to_f64();
    if x <= 0.0 && v < -budget.target_abs_err {
        return Err(Error::NegativeResultAnomaly {
            value: v,
            tolerance: budget.target_abs_err,
        });
    }
    Ok(v)
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Cached series for the M-Wright density on `[0, tau_max]`.
///
/// `W(τ) = Σ (−τ)^n / (n! Γ(1 − β − βn))`, summed by Horner's rule with
/// coefficients fixed at construction.
#[derive(Debug, Clone)]
pub struct MWright {
    beta: Beta,
    tau_max: f64,
    prec: u32,
    coeffs: Vec<Float>,
}

impl MWright {
    pub fn new(beta: Beta, tau_max: f64, budget: &PrecisionBudget) -> Result<Self> {
        if beta.is_one() {
            return Err(Error::domain(
                "mwright_density: beta = 1 is the point mass at 1, which has no density",
            ));
        }
        if !(tau_max >= 0.0 && tau_max.is_finite()) {
            return Err(Error::invalid("tau must be finite and nonnegative"));
        }
        let b = beta.value();
        let lt = if tau_max > 0.0 {
            tau_max.log10()
        } else {
            f64::NEG_INFINITY
        };
        let plan = if tau_max > 0.0 {
            plan_series(
                |n| {
                    let nf = n as f64;
                    nf * lt + (ln_abs_recip_gamma(1.0 - b - b * nf) - ln_gamma(nf + 1.0)) / LN_10
                },
                budget,
                false,
            )?
        } else {
            SeriesPlan {
                terms: 1,
                bits: bits_for_digits(budget.extended_digits),
            }
        };
        let prec = plan.bits;
        let bb = Float::with_val(prec, b);
        let mut fact = Float::with_val(prec, 1);
        let mut coeffs = Vec::with_capacity(plan.terms);
        for n in 0..plan.terms {
            if n > 0 {
                fact *= n as u32;
            }
            let arg = Float::with_val(prec, 1) - &bb - Float::with_val(prec, &bb * n as u32);
            let mut c = recip_gamma_big(&arg) / &fact;
            if n % 2 == 1 {
                c = -c;
            }
            coeffs.push(c);
        }
        Ok(Self {
            beta,
            tau_max,
            prec,
            coeffs,
        })
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn eval(&self, tau: f64) -> Result<f64> {
        if !(0.0..=self.tau_max).contains(&tau) {
            return Err(Error::invalid(format!(
                "tau = {tau} outside the prepared range [0, {}]",
                self.tau_max
            )));
        }
        let t = Float::with_val(self.prec, tau);
        let mut acc = Float::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= &t;
            acc += c;
        }
        Ok(acc.to_f64())
    }
}

/// M-Wright density of ν_β at τ.
pub fn mwright_density(beta: Beta, tau: f64, budget: &PrecisionBudget) -> Result<f64> {
    MWright::new(beta, tau, budget)?.eval(tau)
}

/// Draw τ ~ ν_β. Exactly 1 at β = 1; otherwise τ = S^{−β} with S one-sided
/// β-stable (Laplace transform exp(−s^β)) from Kanter's representation.
pub fn sample_nu_beta<R: Rng + ?Sized>(beta: Beta, rng: &mut R) -> f64 {
    if beta.is_one() {
        return 1.0;
    }
    let b = beta.value();
    let o: f64 = Open01.sample(rng);
    let u = PI * o;
    let e: f64 = Exp1.sample(rng);
    let ln_a = ((1.0 - b) * u).sin().ln() + b / (1.0 - b) * (b * u).sin().ln()
        - u.sin().ln() / (1.0 - b);
    ((1.0 - b) * (e.ln() - ln_a)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn beta(v: f64) -> Beta {
        Beta::new(v).unwrap()
    }

    #[test]
    fn gamma_basics() {
        assert!((gamma_fn(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma_fn(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(5.0) - 24.0).abs() < 1e-12);
        assert_eq!(gamma_fn(0.0), f64::INFINITY);
        assert_eq!(gamma_fn(-3.0), f64::INFINITY);
        assert_eq!(recip_gamma(-2.0), 0.0);
        assert!((gamma_fn(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_matches_mpfr() {
        let mut x = 0.1;
        while x <= 50.0 {
            let exact = Float::with_val(200, x).gamma().to_f64();
            let rel = (gamma_fn(x) - exact).abs() / exact.abs();
            assert!(rel < 1e-13, "x={x} rel={rel:e}");
            let lexact = Float::with_val(200, x).ln_gamma().to_f64();
            assert!((ln_gamma(x) - lexact).abs() < 1e-12 * lexact.abs().max(1.0));
            x += 0.0731;
        }
    }

    #[test]
    fn ml_trivial_values() {
        let bud = PrecisionBudget::default();
        let v = mittag_leffler(beta(1.0), Complex64::new(1.5, 0.0), &bud).unwrap();
        assert_eq!(v.re, 1.5f64.exp());
        let v = mittag_leffler(beta(0.7), Complex64::new(0.0, 0.0), &bud).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        // E_{1/2}(-x) = exp(x²) erfc(x)
        let v = mittag_leffler_real(beta(0.5), -1.0, &bud).unwrap();
        let erfc1 = 0.157_299_207_050_285_13;
        assert!((v - 1f64.exp() * erfc1).abs() < 1e-12);
        // E_2 would be cosh; within (0,1] use E_1 for complex input
        let z = Complex64::new(0.3, -1.1);
        let v = mittag_leffler(beta(1.0), z, &bud).unwrap();
        assert!((v - z.exp()).norm() < 1e-15);
    }

    #[test]
    fn ml_beta_near_one_matches_exp() {
        let bud = PrecisionBudget::default();
        let x = -3.0;
        let v = mittag_leffler_real(beta(1.0 - 1e-9), x, &bud).unwrap();
        assert!((v - x.exp()).abs() < 1e-7);
    }

    #[test]
    fn derivative_trivial_values() {
        let bud = PrecisionBudget::default();
        let d = ml_derivative(beta(1.0), 3, -2.0, &bud).unwrap();
        assert!((d - (-2.0f64).exp()).abs() < 1e-13);
        let d0 = ml_derivative(beta(0.4), 0, -1.3, &bud).unwrap();
        let e = mittag_leffler_real(beta(0.4), -1.3, &bud).unwrap();
        assert!((d0 - e).abs() < 1e-13);
        let at0 = ml_derivative(beta(0.6), 4, 0.0, &bud).unwrap();
        assert!((at0 - 24.0 / gamma_fn(3.4)).abs() < 1e-12);
    }

    #[test]
    fn cancellation_is_reported() {
        let bud = PrecisionBudget::default().with_digits(20);
        let err = ml_derivative(beta(0.3), 5, -5.0, &bud).unwrap_err();
        assert!(matches!(err, Error::CancellationBudgetExceeded { .. }));
        let tight = PrecisionBudget::new(1e-10, 5, 64).unwrap();
        let err = mittag_leffler_real(beta(0.5), -3.0, &tight).unwrap_err();
        assert!(matches!(err, Error::TermLimitExceeded { allowed: 5, .. }));
    }

    #[test]
    fn mwright_values() {
        let bud = PrecisionBudget::default();
        let w = mwright_density(beta(0.5), 1.0, &bud).unwrap();
        assert!((w - (-0.25f64).exp() / PI.sqrt()).abs() < 1e-12);
        let w0 = mwright_density(beta(0.5), 0.0, &bud).unwrap();
        assert!((w0 - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!(matches!(
            mwright_density(beta(1.0), 1.0, &bud),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn nu_beta_point_mass_and_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_nu_beta(beta(1.0), &mut rng), 1.0);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_nu_beta(beta(0.6), &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - recip_gamma(1.6)).abs() < 4.0 * se);
        assert!(xs.iter().all(|&x| x > 0.0 && x.is_finite()));
    }

    proptest! {
        #[test]
        fn beta_one_is_exp(x in -20.0f64..20.0) {
            let v = mittag_leffler_real(beta(1.0), x, &PrecisionBudget::default()).unwrap();
            prop_assert!((v - x.exp()).abs() <= 1e-13 * x.exp().max(1.0));
        }

        #[test]
        fn derivatives_nonnegative_on_negative_axis(
            b in 0.2f64..1.0, k in 0usize..=30, lam in 0.0f64..3.0
        ) {
            let bud = PrecisionBudget::default();
            let v = ml_derivative_impl(beta(b), k, -lam, &bud, true).unwrap();
            prop_assert!(v >= -bud.target_abs_err);
        }

        #[test]
        fn reflection_consistent(x in -5.0f64..5.0) {
            prop_assume!((x - x.round()).abs() > 1e-3);
            let g = gamma_fn(x);
            prop_assert!((g * gamma_fn(1.0 - x) - PI / (PI * x).sin()).abs() <= 1e-11 * g.abs().max(1.0) * gamma_fn(1.0 - x).abs().max(1.0));
        }
    }
}
