use super::scalar::{factorial, Scalar};
use super::sym::{check_envelope, SymTensor};
use crate::error::{Error, Result};

/// Truncated power series `F(φ) = Σ_{n≤N} ⟨T_n, φ^⊗n⟩` in `m` variables.
///
/// The coefficient of degree `n` is the symmetric tensor `T_n`; there is no
/// `1/n!` in the convention, so the `n`-th kernel of `F` is `n! T_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries<T> {
    bins: usize,
    order: usize,
    coeffs: Vec<SymTensor<T>>,
}

impl<T: Scalar> GradedSeries<T> {
    pub fn zero(bins: usize, order: usize) -> Result<Self> {
        check_envelope(bins, order)?;
        let coeffs = (0..=order)
            .map(|n| SymTensor::zeros(bins, n))
            .collect::<Result<_>>()?;
        Ok(Self {
            bins,
            order,
            coeffs,
        })
    }

    pub fn constant(bins: usize, order: usize, c: T) -> Result<Self> {
        let mut s = Self::zero(bins, order)?;
        s.coeffs[0] = SymTensor::scalar(bins, c)?;
        Ok(s)
    }

    /// The linear form `⟨v, φ⟩`.
    pub fn linear(v: &[T], order: usize) -> Result<Self> {
        let mut s = Self::zero(v.len(), order)?;
        if order >= 1 {
            s.coeffs[1] = SymTensor::vector(v)?;
        }
        Ok(s)
    }

    /// The coordinate `φ_j`.
    pub fn coordinate(bins: usize, order: usize, j: usize) -> Result<Self> {
        if j >= bins {
            return Err(Error::invalid(format!("coordinate {j} out of range for {bins} bins")));
        }
        let mut v = vec![T::zero(); bins];
        v[j] = T::one();
        Self::linear(&v, order)
    }

    /// Build from coefficient tensors; missing degrees are zero.
    pub fn from_coeffs(bins: usize, order: usize, given: Vec<SymTensor<T>>) -> Result<Self> {
        let mut s = Self::zero(bins, order)?;
        if given.len() > order + 1 {
            return Err(Error::shape("more coefficients than the truncation order allows"));
        }
        for (n, t) in given.into_iter().enumerate() {
            if t.bins() != bins || t.degree() != n {
                return Err(Error::shape(format!("coefficient {n} has wrong shape")));
            }
            s.coeffs[n] = t;
        }
        Ok(s)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, n: usize) -> &SymTensor<T> {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[SymTensor<T>] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &T {
        &self.coeffs[0].values()[0]
    }

    /// `n! T_n`, the `n`-th kernel.
    pub fn kernel(&self, n: usize) -> SymTensor<T> {
        self.coeffs[n].scale(&factorial::<T>(n))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.bins != other.bins || self.order != other.order {
            return Err(Error::shape(format!(
                "series shapes differ: (bins {}, order {}) vs (bins {}, order {})",
                self.bins, self.order, other.bins, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|t| t.scale(c)).collect(),
            ..self.clone()
        }
    }

    pub fn add_constant(&self, c: &T) -> Self {
        let mut out = self.clone();
        let v = out.constant_term().clone() + c.clone();
        out.coeffs[0] = SymTensor::scalar(self.bins, v).expect("bins already validated");
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.bins, self.order)?;
        for a in 0..=self.order {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..=(self.order - a) {
                if other.coeffs[b].is_zero() {
                    continue;
                }
                let p = self.coeffs[a].sym_product(&other.coeffs[b])?;
                out.coeffs[a + b].axpy(&T::one(), &p)?;
            }
        }
        Ok(out)
    }

    fn lowest_degree(&self) -> usize {
        self.coeffs
            .iter()
            .position(|t| !t.is_zero())
            .unwrap_or(self.order + 1)
    }

    /// `Σ_k c_k self^k` for a univariate series with coefficients `c`.
    ///
    /// The constant term of `self` must vanish unless `c` is a polynomial of
    /// degree at most one.
    pub fn compose_univariate(&self, c: &[T]) -> Result<Self> {
        if c.len() > 2 && !self.constant_term().is_zero() {
            return Err(Error::domain(
                "composition with a power series needs a zero constant term",
            ));
        }
        let mut top = c.len().saturating_sub(1);
        if self.constant_term().is_zero() {
            // powers beyond order/low vanish after truncation
            top = top.min(self.order / self.lowest_degree().max(1));
        }
        let mut acc = Self::constant(self.bins, self.order, c.get(top).cloned().unwrap_or_else(T::zero))?;
        for k in (0..top).rev() {
            acc = acc.mul(self)?.add_constant(&c[k]);
        }
        Ok(acc)
    }

    /// `exp(self)`, requires a zero constant term.
    pub fn exp(&self) -> Result<Self> {
        self.require_zero_constant("exp")?;
        let c: Vec<T> = (0..=self.order)
            .map(|k| T::one() / factorial::<T>(k))
            .collect();
        self.compose_univariate(&c)
    }

    /// `log(1 + self)`, requires a zero constant term.
    pub fn log1p(&self) -> Result<Self> {
        self.require_zero_constant("log1p")?;
        let mut c = vec![T::zero()];
        for k in 1..=self.order {
            let v = T::one() / T::from_i64(k as i64);
            c.push(if k % 2 == 1 { v } else { -v });
        }
        self.compose_univariate(&c)
    }

    /// `1 / self`, requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.constant_term().clone();
        if c0.is_zero() {
            return Err(Error::domain("recip needs a nonzero constant term"));
        }
        let inv = T::one() / c0.clone();
        // 1/(c0 (1+u)) with u = (self - c0)/c0
        let u = self.add_constant(&(-c0)).scale(&inv);
        let c: Vec<T> = (0..=self.order)
            .map(|k| if k % 2 == 0 { T::one() } else { -T::one() })
            .collect();
        Ok(u.compose_univariate(&c)?.scale(&inv))
    }

    fn require_zero_constant(&self, what: &str) -> Result<()> {
        if !self.constant_term().is_zero() {
            return Err(Error::domain(format!("{what} needs a zero constant term")));
        }
        Ok(())
    }

    /// Evaluate the truncated series at `φ`.
    pub fn evaluate(&self, phi: &[T]) -> Result<T> {
        let mut acc = T::zero();
        for t in &self.coeffs {
            acc = acc + t.pair_power(phi)?;
        }
        Ok(acc)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> GradedSeries<U> {
        GradedSeries {
            bins: self.bins,
            order: self.order,
            coeffs: self.coeffs.iter().map(|t| t.map(f)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        let mut worst = 0.0f64;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            worst = worst.max(a.sub(b)?.max_abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn log1p_of_linear_is_alternating_powers() {
        let phi = [q(1, 3), q(-2, 1)];
        let s = GradedSeries::linear(&phi, 6).unwrap().log1p().unwrap();
        for n in 1..=6 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            let expect = SymTensor::tensor_power(&phi, n)
                .unwrap()
                .scale(&q(sign, n as i64));
            assert_eq!(s.coeff(n), &expect);
        }
    }

    #[test]
    fn exp_of_linear_gives_power_over_factorial() {
        let phi = [q(2, 1), q(1, 5), q(-1, 2)];
        let s = GradedSeries::linear(&phi, 5).unwrap().exp().unwrap();
        for n in 0..=5 {
            let expect = SymTensor::tensor_power(&phi, n)
                .unwrap()
                .scale(&(q(1, 1) / factorial::<BigRational>(n)));
            assert_eq!(s.coeff(n), &expect);
        }
    }

    #[test]
    fn exp_log1p_roundtrip_exact() {
        let mut s = GradedSeries::<BigRational>::zero(2, 5).unwrap();
        s.coeffs[1] = SymTensor::vector(&[q(1, 2), q(-1, 3)]).unwrap();
        s.coeffs[2] = SymTensor::from_fn(2, 2, |m| q(m[0] as i64 + 2 * m[1] as i64 - 1, 7)).unwrap();
        s.coeffs[4] = SymTensor::from_fn(2, 4, |m| q(m.iter().sum::<usize>() as i64, 3)).unwrap();
        let back = s.log1p().unwrap().exp().unwrap();
        assert_eq!(back, s.add_constant(&q(1, 1)));
    }

    #[test]
    fn recip_times_self_is_one() {
        let mut s = GradedSeries::<BigRational>::constant(2, 4, q(3, 2)).unwrap();
        s.coeffs[1] = SymTensor::vector(&[q(1, 1), q(2, 1)]).unwrap();
        s.coeffs[3] = SymTensor::from_fn(2, 3, |m| q(m[2] as i64 + 1, 5)).unwrap();
        let prod = s.mul(&s.recip().unwrap()).unwrap();
        assert_eq!(prod, GradedSeries::constant(2, 4, q(1, 1)).unwrap());
    }

    #[test]
    fn preconditions_enforced() {
        let s = GradedSeries::<f64>::constant(2, 3, 1.0).unwrap();
        assert!(matches!(s.log1p(), Err(Error::Domain(_))));
        assert!(matches!(s.exp(), Err(Error::Domain(_))));
        let z = GradedSeries::<f64>::zero(2, 3).unwrap();
        assert!(matches!(z.recip(), Err(Error::Domain(_))));
    }

    #[test]
    fn evaluate_matches_closed_form() {
        let phi = [0.1, -0.2];
        let s = GradedSeries::linear(&[1.0, 1.0], 8).unwrap().exp().unwrap();
        let got = s.evaluate(&phi).unwrap();
        assert!((got - (-0.1f64).exp()).abs() < 1e-12);
    }

    fn small_series() -> impl Strategy<Value = GradedSeries<f64>> {
        proptest::collection::vec(-1.0f64..1.0, 2 + 3 + 4).prop_map(|v| {
            let mut s = GradedSeries::zero(2, 4).unwrap();
            s.coeffs[1] = SymTensor::from_values(2, 1, v[0..2].to_vec()).unwrap();
            s.coeffs[2] = SymTensor::from_values(2, 2, v[2..5].to_vec()).unwrap();
            s.coeffs[3] = SymTensor::from_values(2, 3, v[5..9].to_vec()).unwrap();
            s
        })
    }

    proptest! {
        #[test]
        fn exp_is_additive(a in small_series(), b in small_series()) {
            let lhs = a.add(&b).unwrap().exp().unwrap();
            let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn product_commutes(a in small_series(), b in small_series()) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            prop_assert!(ab.max_abs_diff(&ba).unwrap() < 1e-13);
        }
    }
}
