//! Moment kernels and (generalized) Appell kernels in the bin reduction.
//!
//! Every kernel is the `n!`-scaled coefficient of a generating function built
//! with [`GradedSeries`]:
//!
//! * `M_n`: `l(φ) = E_β(Σ_j σ_j (e^{φ_j} − 1))`
//! * `M^α_n`: `l(α(φ)) = E_β(⟨σ, φ⟩)`
//! * `P_n(w)`: `exp⟨w, φ⟩ / l(φ)`
//! * `C_n(w)`: `exp⟨w, log(1+φ)⟩ / E_β(⟨σ, φ⟩)`

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{recip_gamma, Beta};
use crate::tensor::json::TensorJson;
use crate::tensor::scalar::factorial;
use crate::tensor::{GradedSeries, SymTensor, MAX_BINS, MAX_DEGREE};

pub type C64 = Complex64;

/// Bin masses `σ_j = σ(Λ_j) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedIntensity {
    masses: Vec<f64>,
}

impl DiscretizedIntensity {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() || masses.len() > MAX_BINS {
            return Err(Error::OutsideEnvelope(format!(
                "number of bins must be in 1..={MAX_BINS}, got {}",
                masses.len()
            )));
        }
        if let Some(bad) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::invalid(format!("bin masses must be positive, got {bad}")));
        }
        Ok(Self { masses })
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn as_complex(&self) -> Vec<C64> {
        self.masses.iter().map(|&m| C64::new(m, 0.0)).collect()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_DEGREE {
        return Err(Error::OutsideEnvelope(format!(
            "truncation order must be at most {MAX_DEGREE}, got {order}"
        )));
    }
    Ok(())
}

fn check_w(sigma: &DiscretizedIntensity, w: &[C64]) -> Result<()> {
    if w.len() != sigma.bins() {
        return Err(Error::shape(format!(
            "w has {} entries, intensity has {} bins",
            w.len(),
            sigma.bins()
        )));
    }
    Ok(())
}

/// `1/Γ(βk+1)` for `k ≤ order`.
pub fn ml_coeffs(beta: Beta, order: usize) -> Vec<C64> {
    (0..=order)
        .map(|k| C64::new(recip_gamma(beta.value() * k as f64 + 1.0), 0.0))
        .collect()
}

/// `Σ_j σ_j (e^{φ_j} − 1)`.
fn exp_minus_one_form(sigma: &DiscretizedIntensity, order: usize) -> Result<GradedSeries<C64>> {
    let m = sigma.bins();
    let mut acc = GradedSeries::zero(m, order)?;
    for (j, s) in sigma.as_complex().iter().enumerate() {
        let e = GradedSeries::coordinate(m, order, j)?
            .exp()?
            .add_constant(&C64::new(-1.0, 0.0));
        acc = acc.add(&e.scale(s))?;
    }
    Ok(acc)
}

/// `Σ_j w_j log(1 + φ_j)`.
fn log_form(w: &[C64], order: usize) -> Result<GradedSeries<C64>> {
    let m = w.len();
    let mut acc = GradedSeries::zero(m, order)?;
    for (j, wj) in w.iter().enumerate() {
        let l = GradedSeries::coordinate(m, order, j)?.log1p()?;
        acc = acc.add(&l.scale(wj))?;
    }
    Ok(acc)
}

/// `l(φ)` as a graded series.
pub fn laplace_series(sigma: &DiscretizedIntensity, beta: Beta, order: usize) -> Result<GradedSeries<C64>> {
    check_order(order)?;
    exp_minus_one_form(sigma, order)?.compose_univariate(&ml_coeffs(beta, order))
}

/// `l(α(φ)) = E_β(⟨σ, φ⟩)` as a graded series.
pub fn laplace_alpha_series(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    order: usize,
) -> Result<GradedSeries<C64>> {
    check_order(order)?;
    GradedSeries::linear(&sigma.as_complex(), order)?.compose_univariate(&ml_coeffs(beta, order))
}

/// Generating function of the `C_n(w)`.
pub fn wick_series(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    w: &[C64],
    order: usize,
) -> Result<GradedSeries<C64>> {
    check_w(sigma, w)?;
    let num = log_form(w, order)?.exp()?;
    num.mul(&laplace_alpha_series(sigma, beta, order)?.recip()?)
}

/// Generating function of the `P_n(w)`.
pub fn appell_series(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    w: &[C64],
    order: usize,
) -> Result<GradedSeries<C64>> {
    check_w(sigma, w)?;
    let num = GradedSeries::linear(w, order)?.exp()?;
    num.mul(&laplace_series(sigma, beta, order)?.recip()?)
}

fn kernels_of(s: &GradedSeries<C64>) -> Vec<SymTensor<C64>> {
    (0..=s.order()).map(|n| s.kernel(n)).collect()
}

/// `M_0..M_N`.
pub fn moment_kernels(sigma: &DiscretizedIntensity, beta: Beta, order: usize) -> Result<Vec<SymTensor<C64>>> {
    Ok(kernels_of(&laplace_series(sigma, beta, order)?))
}

/// `M^α_0..M^α_N` by series extraction.
pub fn moment_kernels_alpha(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    order: usize,
) -> Result<Vec<SymTensor<C64>>> {
    Ok(kernels_of(&laplace_alpha_series(sigma, beta, order)?))
}

/// `M^α_n = n!/Γ(nβ+1) σ^⊗n`.
pub fn moment_kernels_alpha_closed(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    order: usize,
) -> Result<Vec<SymTensor<C64>>> {
    check_order(order)?;
    let s = sigma.as_complex();
    (0..=order)
        .map(|n| {
            let c = factorial::<C64>(n) * recip_gamma(n as f64 * beta.value() + 1.0);
            Ok(SymTensor::tensor_power(&s, n)?.scale(&c))
        })
        .collect()
}

/// `C_0(w)..C_N(w)`.
pub fn c_kernels(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    w: &[C64],
    order: usize,
) -> Result<Vec<SymTensor<C64>>> {
    Ok(kernels_of(&wick_series(sigma, beta, w, order)?))
}

/// `P_0(w)..P_N(w)`.
pub fn p_kernels(
    sigma: &DiscretizedIntensity,
    beta: Beta,
    w: &[C64],
    order: usize,
) -> Result<Vec<SymTensor<C64>>> {
    Ok(kernels_of(&appell_series(sigma, beta, w, order)?))
}

/// All kernels for one `(σ, β, N)`; `C` and `P` are evaluated at `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    pub sigma: DiscretizedIntensity,
    pub beta: Beta,
    pub order: usize,
    pub w: Vec<C64>,
    pub m: Vec<SymTensor<C64>>,
    pub m_alpha: Vec<SymTensor<C64>>,
    pub c: Vec<SymTensor<C64>>,
    pub p: Vec<SymTensor<C64>>,
}

impl KernelSet {
    pub fn new(sigma: DiscretizedIntensity, beta: Beta, order: usize, w: Vec<C64>) -> Result<Self> {
        Ok(Self {
            m: moment_kernels(&sigma, beta, order)?,
            m_alpha: moment_kernels_alpha(&sigma, beta, order)?,
            c: c_kernels(&sigma, beta, &w, order)?,
            p: p_kernels(&sigma, beta, &w, order)?,
            sigma,
            beta,
            order,
            w,
        })
    }

    pub fn to_json(&self) -> KernelSetJson {
        let dump = |v: &[SymTensor<C64>]| v.iter().map(TensorJson::from).collect();
        KernelSetJson {
            bins: self.sigma.bins(),
            beta: self.beta.value(),
            order: self.order,
            sigma: self.sigma.masses().to_vec(),
            w: self.w.clone(),
            moment: dump(&self.m),
            moment_alpha: dump(&self.m_alpha),
            c: dump(&self.c),
            p: dump(&self.p),
        }
    }
}

/// Serialized form of a [`KernelSet`]; complex values are `[re, im]`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelSetJson {
    pub bins: usize,
    pub beta: f64,
    pub order: usize,
    pub sigma: Vec<f64>,
    pub w: Vec<C64>,
    pub moment: Vec<TensorJson<C64>>,
    pub moment_alpha: Vec<TensorJson<C64>>,
    pub c: Vec<TensorJson<C64>>,
    pub p: Vec<TensorJson<C64>>,
}

/// `Σ_k binom(n,k) A_k ⊗̂ B_{n−k}`, the kernel of a product of generating functions.
pub fn binomial_product(a: &[SymTensor<C64>], b: &[SymTensor<C64>], n: usize) -> Result<SymTensor<C64>> {
    let bins = a[0].bins();
    let mut acc = SymTensor::zeros(bins, n)?;
    for k in 0..=n {
        let c = C64::new(crate::tensor::scalar::binomial(n, k) as f64, 0.0);
        acc.axpy(&c, &a[k].sym_product(&b[n - k])?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpm1d::Fpm1D;
    use crate::stirling::{stirling_op1_adj, stirling_op2_adj};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma2() -> DiscretizedIntensity {
        DiscretizedIntensity::new(vec![0.8, 1.7]).unwrap()
    }

    #[test]
    fn degree_zero_kernels_are_one() {
        let b = Beta::new(0.6).unwrap();
        let ks = KernelSet::new(sigma2(), b, 4, vec![c(0.3, 0.2), c(-1.0, 0.5)]).unwrap();
        for v in [&ks.m, &ks.m_alpha, &ks.c, &ks.p] {
            assert!((v[0].values()[0] - c(1.0, 0.0)).norm() < 1e-15);
        }
        let m1 = &ks.m[1];
        for j in 0..2 {
            let expect = sigma2().masses()[j] * recip_gamma(1.6);
            assert!((m1.values()[j] - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn alpha_closed_form_matches_series() {
        let b = Beta::new(0.35).unwrap();
        let s = moment_kernels_alpha(&sigma2(), b, 6).unwrap();
        let cf = moment_kernels_alpha_closed(&sigma2(), b, 6).unwrap();
        for (x, y) in s.iter().zip(&cf) {
            assert!(x.sub(y).unwrap().max_abs() <= 1e-11 * y.max_abs().max(1.0));
        }
    }

    #[test]
    fn single_bin_moments() {
        for b in [0.3, 0.7, 1.0] {
            let beta = Beta::new(b).unwrap();
            let sigma = DiscretizedIntensity::new(vec![2.2]).unwrap();
            let m = moment_kernels(&sigma, beta, 6).unwrap();
            let f = Fpm1D::new(2.2, beta).unwrap();
            for (n, t) in m.iter().enumerate() {
                let v = t.values()[0].re;
                assert!((v - f.moment(n)).abs() < 1e-9 * f.moment(n).max(1.0));
            }
        }
    }

    #[test]
    fn charlier_at_beta_one() {
        let beta = Beta::new(1.0).unwrap();
        let sigma = DiscretizedIntensity::new(vec![1.4]).unwrap();
        let polys = Fpm1D::new(1.4, beta).unwrap().orthogonal_polys(3).unwrap();
        for k in 0..5 {
            let ck = c_kernels(&sigma, beta, &[c(k as f64, 0.0)], 3).unwrap();
            for n in 0..=3 {
                let v = ck[n].values()[0];
                assert!((v.re - polys[n].eval(k as f64)).abs() < 1e-9 && v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_kind_relation_and_inverse() {
        let beta = Beta::new(0.55).unwrap();
        let w = [c(0.4, -0.9), c(1.3, 0.2)];
        let ck = c_kernels(&sigma2(), beta, &w, 5).unwrap();
        let pk = p_kernels(&sigma2(), beta, &w, 5).unwrap();
        for n in 0..=5 {
            let mut from_p = SymTensor::zeros(2, n).unwrap();
            let mut from_c = SymTensor::zeros(2, n).unwrap();
            for m in 0..=n {
                from_p = from_p.add(&stirling_op1_adj(n, &pk[m]).unwrap()).unwrap();
                from_c = from_c.add(&stirling_op2_adj(n, &ck[m]).unwrap()).unwrap();
            }
            let scale = ck[n].max_abs().max(pk[n].max_abs()).max(1.0);
            assert!(from_p.sub(&ck[n]).unwrap().max_abs() <= 1e-10 * scale);
            assert!(from_c.sub(&pk[n]).unwrap().max_abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn monomials_from_p_and_m() {
        let beta = Beta::new(0.8).unwrap();
        let w = [c(-0.6, 0.3), c(0.9, 1.1)];
        let pk = p_kernels(&sigma2(), beta, &w, 4).unwrap();
        let mk = moment_kernels(&sigma2(), beta, 4).unwrap();
        for n in 0..=4 {
            let lhs = SymTensor::tensor_power(&w, n).unwrap();
            let rhs = binomial_product(&pk, &mk, n).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-10 * lhs.max_abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DiscretizedIntensity::new(vec![]).is_err());
        assert!(DiscretizedIntensity::new(vec![1.0; 5]).is_err());
        assert!(DiscretizedIntensity::new(vec![1.0, -0.5]).is_err());
        let beta = Beta::new(0.5).unwrap();
        assert!(c_kernels(&sigma2(), beta, &[c(1.0, 0.0)], 3).is_err());
        assert!(moment_kernels(&sigma2(), beta, 9).is_err());
    }
}
