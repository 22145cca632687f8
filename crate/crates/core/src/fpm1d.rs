//! The fractional Poisson law π_{λ,β} on ℕ₀.

use std::f64::consts::LN_10;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rug::Float;

use crate::error::{Error, Result};
use crate::specfun::{
    ln_gamma, mittag_leffler_impl, plan_series, recip_gamma, recip_gamma_big, sample_nu_beta,
    Beta, PrecisionBudget,
};
use crate::stirling::stirling2_row_f64;

/// Condition number above which the moment matrix is rejected.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// Rate `λ > 0` and order `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fpm1D {
    lambda: f64,
    beta: Beta,
    budget: PrecisionBudget,
}

/// Monic polynomial `c_0 + c_1 x + ... + x^n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MonicPolynomial {
    coeffs: Vec<f64>,
}

impl MonicPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.last_mut() {
            None => Err(Error::invalid("polynomial needs at least one coefficient")),
            Some(c) if *c != 1.0 => Err(Error::invalid("leading coefficient must be 1")),
            Some(_) => Ok(Self { coeffs }),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

impl Fpm1D {
    pub fn new(lambda: f64, beta: Beta) -> Result<Self> {
        Self::with_budget(lambda, beta, PrecisionBudget::default())
    }

    pub fn with_budget(lambda: f64, beta: Beta, budget: PrecisionBudget) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
        }
        budget.validate()?;
        Ok(Self {
            lambda,
            beta,
            budget,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    /// `π({k}) = λ^k/k! · E_β^{(k)}(−λ)`.
    pub fn pmf(&self, k: usize) -> Result<f64> {
        Ok(self.pmf_range(k, k)?[0])
    }

    /// `pmf(0..=k_max)`.
    pub fn pmf_table(&self, k_max: usize) -> Result<Vec<f64>> {
        self.pmf_range(0, k_max)
    }

    /// pmf values for `k_lo..=k_hi`, written as
    /// `Σ_{j≥k} C(j,k) (−1)^{j−k} λ^j / Γ(βj+1)` so that `1/Γ(βj+1)` can be
    /// shared across `k`. Working precision is raised as far as the largest
    /// term requires.
    fn pmf_range(&self, k_lo: usize, k_hi: usize) -> Result<Vec<f64>> {
        let b = self.beta.value();
        let ll = self.lambda.log10();
        let mut bits = 0;
        let mut plans = Vec::with_capacity(k_hi + 1 - k_lo);
        for k in k_lo..=k_hi {
            let kf = k as f64;
            let plan = plan_series(
                |n| {
                    let j = n as f64 + kf;
                    (ln_gamma(j + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(n as f64 + 1.0)
                        - ln_gamma(b * j + 1.0))
                        / LN_10
                        + j * ll
                },
                &self.budget,
                true,
            )?;
            bits = bits.max(plan.bits);
            plans.push(plan.terms);
        }
        let j_max = plans
            .iter()
            .enumerate()
            .map(|(i, t)| k_lo + i + t)
            .max()
            .unwrap_or(0);
        let bb = Float::with_val(bits, b);
        let lam = Float::with_val(bits, self.lambda);
        // g[j] = λ^j / Γ(βj+1)
        let mut g = Vec::with_capacity(j_max);
        let mut pow = Float::with_val(bits, 1);
        for j in 0..j_max {
            if j > 0 {
                pow *= &lam;
            }
            let arg = Float::with_val(bits, &bb * j as u32) + 1u32;
            g.push(Float::with_val(bits, &pow * recip_gamma_big(&arg)));
        }
        let mut out = Vec::with_capacity(plans.len());
        for (i, &terms) in plans.iter().enumerate() {
            let k = k_lo + i;
            let mut binom = Float::with_val(bits, 1);
            let mut acc = Float::new(bits);
            for n in 0..terms {
                if n > 0 {
                    binom *= (n + k) as u32;
                    binom /= n as u32;
                }
                let t = Float::with_val(bits, &binom * &g[n + k]);
                if n % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            let v = acc.to_f64();
            if v < -self.budget.target_abs_err {
                return Err(Error::NegativeResultAnomaly {
                    value: v,
                    tolerance: self.budget.target_abs_err,
                });
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `E_β(λ(e^z − 1))`.
    pub fn laplace(&self, z: Complex64) -> Result<Complex64> {
        let arg = (z.exp() - 1.0) * self.lambda;
        mittag_leffler_impl(self.beta, arg, &self.budget, true)
    }

    /// `Σ_{m≤n} m!/Γ(mβ+1) · S(n,m) · λ^m`.
    pub fn moment(&self, n: usize) -> f64 {
        moment_from_rate(self.beta, self.lambda, n)
    }

    /// `A(β,λ) = (m(3) − m(1)m(2)) / (m(2) − m(1)²)`.
    pub fn a_coeff(&self) -> f64 {
        let (m1, m2, m3) = (self.moment(1), self.moment(2), self.moment(3));
        (m3 - m1 * m2) / (m2 - m1 * m1)
    }

    /// Moment-functional inner product `Σ p_i q_j m(i+j)`.
    pub fn inner(&self, p: &[f64], q: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                acc += a * b * self.moment(i + j);
            }
        }
        acc
    }

    /// Condition number of the Hankel matrix `[m(i+j)]_{i,j≤n}`.
    pub fn hankel_condition(&self, n: usize) -> f64 {
        let moments: Vec<f64> = (0..=2 * n).map(|k| self.moment(k)).collect();
        let h = DMatrix::from_fn(n + 1, n + 1, |i, j| moments[i + j]);
        let eig = SymmetricEigen::new(h).eigenvalues;
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Monic orthogonal polynomials `C_0..C_{n_max}` by Gram-Schmidt on the
    /// monomials under the moment functional.
    pub fn orthogonal_polys(&self, n_max: usize) -> Result<Vec<MonicPolynomial>> {
        let condition = self.hankel_condition(n_max);
        if !(condition <= GRAM_CONDITION_LIMIT) {
            return Err(Error::IllConditionedGram { condition });
        }
        let mut polys: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
        let mut norms: Vec<f64> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut p = vec![0.0; n + 1];
            p[n] = 1.0;
            // modified Gram-Schmidt: project the running remainder
            for (c, nc) in polys.iter().zip(&norms) {
                let proj = self.inner(&p, c) / nc;
                for (pi, ci) in p.iter_mut().zip(c) {
                    *pi -= proj * ci;
                }
            }
            p[n] = 1.0;
            norms.push(self.inner(&p, &p));
            polys.push(p);
        }
        polys.into_iter().map(MonicPolynomial::new).collect()
    }

    /// Draw from the mixture: τ ~ ν_β, then Poisson(λτ).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let tau = sample_nu_beta(self.beta, rng);
        poisson_draw(self.lambda * tau, rng)
    }

    /// Smallest `K` with `P(X ≥ K) ≤ eps` by the best moment bound
    /// `P(X ≥ K) ≤ m(r)/K^r`, `1 ≤ r ≤ 60`.
    pub fn tail_bound(&self, eps: f64) -> usize {
        tail_bound_from_moments(|r| self.moment(r), eps)
    }
}

pub(crate) fn tail_bound_from_moments(moment: impl Fn(usize) -> f64, eps: f64) -> usize {
    let mut best = f64::INFINITY;
    for r in 1..=60 {
        let m = moment(r);
        if !m.is_finite() {
            break;
        }
        best = best.min((m / eps).powf(1.0 / r as f64));
    }
    best.ceil() as usize
}

pub(crate) fn poisson_draw<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("Poisson mean is positive and finite");
    d.sample(rng) as u64
}

pub(crate) fn moment_from_rate(beta: Beta, lambda: f64, n: usize) -> f64 {
    let s = stirling2_row_f64(n);
    let b = beta.value();
    let mut acc = 0.0;
    let mut fact = 1.0;
    let mut pow = 1.0;
    for (m, smn) in s.iter().enumerate() {
        if m > 0 {
            fact *= m as f64;
            pow *= lambda;
        }
        if *smn != 0.0 {
            acc += fact * recip_gamma(m as f64 * b + 1.0) * smn * pow;
        }
    }
    acc
}
