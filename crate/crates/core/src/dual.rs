//! Polynomial functionals, the operators D and G, the dual pairing with the
//! Q-system, and the distributions built from it.
//!
//! Everything is exact algebra over the bin reduction: expectations are
//! pairings with the moment kernels `M_n`, so `⟨⟨Q_n(Φ), p⟩⟩ = E[G(Φ) p]` is a
//! finite sum.

use num_complex::Complex64;
use serde::Serialize;

use crate::appell::{c_kernels, moment_kernels, DiscretizedIntensity, C64};
use crate::error::{Error, Result};
use crate::specfun::{ln_gamma, mittag_leffler, Beta, PrecisionBudget};
use crate::stirling::{falling_factorial, stirling_op1, stirling_op2, stirling_op2_adj};
use crate::tensor::scalar::{binomial, factorial};
use crate::tensor::{SymTensor, MAX_DEGREE};

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_coeffs(bins: usize, coeffs: &[SymTensor<C64>]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::invalid("need at least the degree-0 coefficient"));
    }
    if coeffs.len() > MAX_DEGREE + 1 {
        return Err(Error::OutsideEnvelope(format!(
            "degree must be at most {MAX_DEGREE}, got {}",
            coeffs.len() - 1
        )));
    }
    for (n, t) in coeffs.iter().enumerate() {
        if t.bins() != bins || t.degree() != n {
            return Err(Error::shape(format!("coefficient {n} has the wrong shape")));
        }
    }
    Ok(())
}

fn zero_coeffs(bins: usize, degree: usize) -> Result<Vec<SymTensor<C64>>> {
    (0..=degree).map(|n| SymTensor::zeros(bins, n)).collect()
}

/// `p(w) = Σ_n ⟨w^⊗n, φ^(n)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFunctional {
    bins: usize,
    coeffs: Vec<SymTensor<C64>>,
}

impl PolynomialFunctional {
    pub fn new(bins: usize, coeffs: Vec<SymTensor<C64>>) -> Result<Self> {
        check_coeffs(bins, &coeffs)?;
        Ok(Self { bins, coeffs })
    }

    pub fn zero(bins: usize, degree: usize) -> Result<Self> {
        Self::new(bins, zero_coeffs(bins, degree)?)
    }

    pub fn constant(bins: usize, c: C64) -> Result<Self> {
        Self::new(bins, vec![SymTensor::scalar(bins, c)?])
    }

    /// The single monomial `⟨w^⊗n, φ^(n)⟩`.
    pub fn monomial(phi: SymTensor<C64>) -> Result<Self> {
        let bins = phi.bins();
        let mut coeffs = zero_coeffs(bins, phi.degree())?;
        let n = phi.degree();
        coeffs[n] = phi;
        Self::new(bins, coeffs)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &SymTensor<C64> {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[SymTensor<C64>] {
        &self.coeffs
    }

    pub fn evaluate(&self, w: &[C64]) -> Result<C64> {
        let mut acc = czero();
        for t in &self.coeffs {
            acc += t.pair_power(w)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.bins != other.bins {
            return Err(Error::shape("polynomials live on different bin counts"));
        }
        let deg = self.degree().max(other.degree());
        let mut coeffs = zero_coeffs(self.bins, deg)?;
        for (n, c) in coeffs.iter_mut().enumerate() {
            if n <= self.degree() {
                *c = c.add(&self.coeffs[n])?;
            }
            if n <= other.degree() {
                *c = c.add(&other.coeffs[n])?;
            }
        }
        Self::new(self.bins, coeffs)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            bins: self.bins,
            coeffs: self.coeffs.iter().map(|t| t.scale(&c)).collect(),
        }
    }

    /// `w ↦ p(w + v)`.
    pub fn shift(&self, v: &[C64]) -> Result<Self> {
        let mut out = zero_coeffs(self.bins, self.degree())?;
        for (n, phi) in self.coeffs.iter().enumerate() {
            for (k, slot) in out.iter_mut().enumerate().take(n + 1) {
                let vp = SymTensor::tensor_power(v, n - k)?;
                let chi = vp.contract_into(phi)?;
                slot.axpy(&real(binomial(n, k) as f64), &chi)?;
            }
        }
        Self::new(self.bins, out)
    }
}

/// `p(w) = Σ_n ⟨C_n(w), φ^(n)⟩` for the Appell kernels of some `(σ, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CBasisPolynomial {
    bins: usize,
    coeffs: Vec<SymTensor<C64>>,
}

impl CBasisPolynomial {
    pub fn new(bins: usize, coeffs: Vec<SymTensor<C64>>) -> Result<Self> {
        check_coeffs(bins, &coeffs)?;
        Ok(Self { bins, coeffs })
    }

    pub fn single(phi: SymTensor<C64>) -> Result<Self> {
        let bins = phi.bins();
        let n = phi.degree();
        let mut coeffs = zero_coeffs(bins, n)?;
        coeffs[n] = phi;
        Self::new(bins, coeffs)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[SymTensor<C64>] {
        &self.coeffs
    }
}

/// `Φ = Σ_n Q_n(Φ^(n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QDistribution {
    bins: usize,
    kernels: Vec<SymTensor<C64>>,
}

impl QDistribution {
    pub fn new(bins: usize, kernels: Vec<SymTensor<C64>>) -> Result<Self> {
        check_coeffs(bins, &kernels)?;
        Ok(Self { bins, kernels })
    }

    /// `Q_n(Φ^(n))` alone.
    pub fn single(phi: SymTensor<C64>) -> Result<Self> {
        let bins = phi.bins();
        let n = phi.degree();
        let mut kernels = zero_coeffs(bins, n)?;
        kernels[n] = phi;
        Self::new(bins, kernels)
    }

    pub fn kernels(&self) -> &[SymTensor<C64>] {
        &self.kernels
    }
}

/// `D(Φ^(n))`: the degree-`m` coefficient `φ^(m)` maps to
/// `m!/(m−n)! · contract(Φ^(n), φ^(m))` at degree `m − n`.
pub fn d_operator(phi_n: &SymTensor<C64>, p: &PolynomialFunctional) -> Result<PolynomialFunctional> {
    if phi_n.bins() != p.bins() {
        return Err(Error::shape("operator and polynomial bin counts differ"));
    }
    let n = phi_n.degree();
    if p.degree() < n {
        return PolynomialFunctional::zero(p.bins(), 0);
    }
    let mut out = zero_coeffs(p.bins(), p.degree() - n)?;
    for m in n..=p.degree() {
        let c = factorial::<C64>(m) / factorial::<C64>(m - n);
        let chi = phi_n.contract_into(&p.coeffs[m])?;
        out[m - n] = chi.scale(&c);
    }
    PolynomialFunctional::new(p.bins(), out)
}

/// `G(Φ^(n)) = Σ_{k=n}^{deg p} (n!/k!) D(𝐒(k,n)^* Φ^(n))`.
pub fn g_operator(phi_n: &SymTensor<C64>, p: &PolynomialFunctional) -> Result<PolynomialFunctional> {
    let n = phi_n.degree();
    let mut acc = PolynomialFunctional::zero(p.bins(), 0)?;
    for k in n..=p.degree() {
        let lifted = stirling_op2_adj(k, phi_n)?;
        let c = factorial::<C64>(n) / factorial::<C64>(k);
        acc = acc.add(&d_operator(&lifted, p)?.scale(c))?;
    }
    Ok(acc)
}

/// `Σ_n ⟨Φ^(n), (e^φ − 1)^⊗n⟩`.
pub fn s_transform(q: &QDistribution, phi: &[C64]) -> Result<C64> {
    let g: Vec<C64> = phi.iter().map(|x| x.exp() - 1.0).collect();
    let mut acc = czero();
    for k in &q.kernels {
        acc += k.pair_power(&g)?;
    }
    Ok(acc)
}

/// `Σ_n ⟨(−w)_n, φ^(n)⟩`.
pub fn convolution(p: &CBasisPolynomial, w: &[C64]) -> Result<C64> {
    let neg: Vec<C64> = w.iter().map(|x| -x).collect();
    let mut acc = czero();
    for (n, phi) in p.coeffs.iter().enumerate() {
        acc += falling_factorial(&neg, n)?.pair(phi)?;
    }
    Ok(acc)
}

/// The same value through `Σ_n Σ_k (−1)^k ⟨w^⊗k, 𝐬(n,k) φ^(n)⟩`.
pub fn convolution_stirling(p: &CBasisPolynomial, w: &[C64]) -> Result<C64> {
    let mut acc = czero();
    for phi in &p.coeffs {
        for k in 0..=phi.degree() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += stirling_op1(k, phi)?.pair_power(w)? * sign;
        }
    }
    Ok(acc)
}

/// Squared norm of the modified Wick exponential in the reduced form
/// `Σ_n (n!)^{κ−1} t^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WickNorm {
    Finite(f64),
    Divergent,
}

pub fn wick_norm_sq(t: f64, kappa: f64, terms: usize) -> Result<WickNorm> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t must be finite and nonnegative"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid("kappa must lie in [0, 1]"));
    }
    if kappa == 0.0 {
        return Ok(WickNorm::Finite(t.exp()));
    }
    if kappa == 1.0 {
        return Ok(if t < 1.0 {
            WickNorm::Finite(1.0 / (1.0 - t))
        } else {
            WickNorm::Divergent
        });
    }
    if t == 0.0 {
        return Ok(WickNorm::Finite(1.0));
    }
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for n in 0..terms {
        let term = ((kappa - 1.0) * ln_gamma(n as f64 + 1.0) + n as f64 * t.ln()).exp();
        acc += term;
        last = term;
        // terms decrease once t < (n+1)^{1−κ}
        let decreasing = t < ((n + 1) as f64).powf(1.0 - kappa);
        if decreasing && term < 1e-17 * acc {
            return Ok(WickNorm::Finite(acc));
        }
    }
    if last > 1e-15 * acc {
        return Err(Error::TermLimitExceeded {
            required: terms + 1,
            allowed: terms,
        });
    }
    Ok(WickNorm::Finite(acc))
}

/// `2^κ exp((1−κ) 2^{κ/(1−κ)} t^{1/(1−κ)})`, valid for κ ∈ [0, 1).
pub fn wick_norm_holder_bound(t: f64, kappa: f64) -> f64 {
    2f64.powf(kappa)
        * ((1.0 - kappa) * 2f64.powf(kappa / (1.0 - kappa)) * t.powf(1.0 / (1.0 - kappa))).exp()
}

/// A value obtained from truncated series, with its truncation order and an
/// estimate of the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated {
    pub value: C64,
    pub order: usize,
    pub tail_estimate: f64,
}

/// Kernels needed to pair against polynomials of degree up to `order`.
#[derive(Debug, Clone)]
pub struct DualContext {
    sigma: DiscretizedIntensity,
    beta: Beta,
    order: usize,
    moments: Vec<SymTensor<C64>>,
    c_at_zero: Vec<SymTensor<C64>>,
}

impl DualContext {
    pub fn new(sigma: DiscretizedIntensity, beta: Beta, order: usize) -> Result<Self> {
        let moments = moment_kernels(&sigma, beta, order)?;
        let zero = vec![czero(); sigma.bins()];
        let c_at_zero = c_kernels(&sigma, beta, &zero, order)?;
        Ok(Self {
            sigma,
            beta,
            order,
            moments,
            c_at_zero,
        })
    }

    pub fn sigma(&self) -> &DiscretizedIntensity {
        &self.sigma
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bins(&self) -> usize {
        self.sigma.bins()
    }

    pub fn moments(&self) -> &[SymTensor<C64>] {
        &self.moments
    }

    fn check_degree(&self, deg: usize, bins: usize) -> Result<()> {
        if bins != self.bins() {
            return Err(Error::shape(format!(
                "polynomial has {bins} bins, context has {}",
                self.bins()
            )));
        }
        if deg > self.order {
            return Err(Error::OutsideEnvelope(format!(
                "polynomial degree {deg} exceeds the context order {}",
                self.order
            )));
        }
        Ok(())
    }

    /// `E[p] = Σ_n ⟨M_n, φ^(n)⟩`.
    pub fn expectation(&self, p: &PolynomialFunctional) -> Result<C64> {
        self.check_degree(p.degree(), p.bins())?;
        let mut acc = czero();
        for (m, phi) in self.moments.iter().zip(&p.coeffs) {
            acc += m.pair(phi)?;
        }
        Ok(acc)
    }

    /// `⟨⟨Q_n(Φ^(n)), p⟩⟩ = E[G(Φ^(n)) p]`.
    pub fn q_pairing(&self, phi_n: &SymTensor<C64>, p: &PolynomialFunctional) -> Result<C64> {
        self.check_degree(p.degree(), p.bins())?;
        self.expectation(&g_operator(phi_n, p)?)
    }

    /// `⟨⟨Φ, p⟩⟩` for a finite Q-decomposition.
    pub fn pair_distribution(&self, q: &QDistribution, p: &PolynomialFunctional) -> Result<C64> {
        let mut acc = czero();
        for k in &q.kernels {
            acc += self.q_pairing(k, p)?;
        }
        Ok(acc)
    }

    /// Monomial form of a C-basis polynomial, through
    /// `C_n(w) = Σ_k binom(n,k) Σ_m C_k(0) ⊗̂ 𝐬(n−k,m)^* w^⊗m`.
    pub fn to_monomial(&self, p: &CBasisPolynomial) -> Result<PolynomialFunctional> {
        self.check_degree(p.degree(), p.bins())?;
        let mut out = zero_coeffs(p.bins, p.degree())?;
        for (n, phi) in p.coeffs.iter().enumerate() {
            for k in 0..=n {
                let chi = self.c_at_zero[k].contract_into(phi)?;
                let c = real(binomial(n, k) as f64);
                for (m, slot) in out.iter_mut().enumerate().take(n - k + 1) {
                    slot.axpy(&c, &stirling_op1(m, &chi)?)?;
                }
            }
        }
        PolynomialFunctional::new(p.bins, out)
    }

    /// C-basis form of a monomial polynomial, through
    /// `w^⊗n = Σ_k binom(n,k) Σ_m 𝐒(k,m)^* C_m(w) ⊗̂ M_{n−k}`.
    pub fn to_c_basis(&self, p: &PolynomialFunctional) -> Result<CBasisPolynomial> {
        self.check_degree(p.degree(), p.bins())?;
        let mut out = zero_coeffs(p.bins, p.degree())?;
        for (n, psi) in p.coeffs.iter().enumerate() {
            for k in 0..=n {
                let chi = self.moments[n - k].contract_into(psi)?;
                let c = real(binomial(n, k) as f64);
                for (m, slot) in out.iter_mut().enumerate().take(k + 1) {
                    slot.axpy(&c, &stirling_op2(m, &chi)?)?;
                }
            }
        }
        CBasisPolynomial::new(p.bins, out)
    }

    /// `⟨⟨δ_w, p⟩⟩ = Σ_n ⟨C_n(w), φ^(n)⟩`.
    pub fn delta_pairing(&self, w: &[C64], p: &CBasisPolynomial) -> Result<C64> {
        self.check_degree(p.degree(), p.bins())?;
        let cw = c_kernels(&self.sigma, self.beta, w, p.degree())?;
        let mut acc = czero();
        for (c, phi) in cw.iter().zip(&p.coeffs) {
            acc += c.pair(phi)?;
        }
        Ok(acc)
    }

    /// Convolution through the Radon-Nikodym expansion
    /// `Σ_k (1/k!) ⟨⟨Q_k((−w)_k), p⟩⟩`.
    pub fn convolution_rnd(&self, p: &CBasisPolynomial, w: &[C64]) -> Result<C64> {
        let mono = self.to_monomial(p)?;
        let neg: Vec<C64> = w.iter().map(|x| -x).collect();
        let mut acc = czero();
        for k in 0..=p.degree() {
            let kernel = falling_factorial(&neg, k)?.scale(&(C64::new(1.0, 0.0) / factorial::<C64>(k)));
            acc += self.q_pairing(&kernel, &mono)?;
        }
        Ok(acc)
    }

    /// Convolution as the shifted expectation `∫ p(x − w) dπ(x)`.
    pub fn convolution_shift(&self, p: &CBasisPolynomial, w: &[C64]) -> Result<C64> {
        let neg: Vec<C64> = w.iter().map(|x| -x).collect();
        self.expectation(&self.to_monomial(p)?.shift(&neg)?)
    }

    /// `l(φ) = E_β(Σ_j σ_j (e^{φ_j} − 1))`.
    pub fn laplace(&self, phi: &[C64], budget: &PrecisionBudget) -> Result<C64> {
        let mut arg = czero();
        for (s, x) in self.sigma.masses().iter().zip(phi) {
            arg += (x.exp() - 1.0) * *s;
        }
        mittag_leffler(self.beta, arg, budget)
    }

    /// `S(Q_n(Φ^(n)))(φ)` through the G operator acting on the truncated
    /// exponential: `E[G(Φ^(n)) Σ_{k≤N} ⟨w, φ⟩^k/k!] / l(φ)`.
    pub fn s_transform_g_route(
        &self,
        phi_n: &SymTensor<C64>,
        phi: &[C64],
        budget: &PrecisionBudget,
    ) -> Result<Truncated> {
        let l = self.laplace(phi, budget)?;
        let mut partial = Vec::with_capacity(self.order + 1);
        let mut acc = czero();
        let mut coeffs = Vec::with_capacity(self.order + 1);
        for k in 0..=self.order {
            let t = SymTensor::tensor_power(phi, k)?.scale(&(real(1.0) / factorial::<C64>(k)));
            coeffs.push(t);
            let p = PolynomialFunctional::new(self.bins(), coeffs.clone())?;
            acc = self.q_pairing(phi_n, &p)? / l;
            partial.push(acc);
        }
        let tail = if partial.len() >= 2 {
            (partial[partial.len() - 1] - partial[partial.len() - 2]).norm()
        } else {
            0.0
        };
        Ok(Truncated {
            value: acc,
            order: self.order,
            tail_estimate: tail,
        })
    }

    /// `S(Q_n(Φ^(n)))` at `α(ψ)` as `Σ_{m≤N} (1/m!) ⟨⟨Q_n(Φ^(n)), ⟨C_m, ψ^⊗m⟩⟩⟩`.
    pub fn s_transform_c_route(&self, phi_n: &SymTensor<C64>, psi: &[C64]) -> Result<Truncated> {
        let mut acc = czero();
        let mut last = 0.0;
        for m in 0..=self.order {
            let t = SymTensor::tensor_power(psi, m)?.scale(&(real(1.0) / factorial::<C64>(m)));
            let p = self.to_monomial(&CBasisPolynomial::single(t)?)?;
            let v = self.q_pairing(phi_n, &p)?;
            last = v.norm();
            acc += v;
        }
        Ok(Truncated {
            value: acc,
            order: self.order,
            tail_estimate: last,
        })
    }

    /// Pairing table `⟨⟨Q_n(Φ^(n)), ⟨C_m, φ^(m)⟩⟩⟩` for `n, m ≤ N`.
    pub fn pairing_table(
        &self,
        big_phi: &[SymTensor<C64>],
        small_phi: &[SymTensor<C64>],
    ) -> Result<Vec<Vec<C64>>> {
        let polys: Vec<PolynomialFunctional> = small_phi
            .iter()
            .map(|t| self.to_monomial(&CBasisPolynomial::single(t.clone())?))
            .collect::<Result<_>>()?;
        big_phi
            .iter()
            .map(|f| polys.iter().map(|p| self.q_pairing(f, p)).collect())
            .collect()
    }
}

/// Pairing-norm `sqrt(Σ mult |A_μ|²)`.
pub fn tensor_norm(t: &SymTensor<Complex64>) -> f64 {
    let conj = t.map(|v| v.conj());
    t.pair(&conj).map(|v| v.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
}
