//! The bivariate fractional Poisson law, its joint moments and the
//! non-orthogonality function `F(β, λ₁, λ₂)`.

use crate::error::{Error, Result};
use crate::fpm1d::{moment_from_rate, Fpm1D};
use crate::specfun::{mittag_leffler_impl, recip_gamma, Beta, PrecisionBudget};
use crate::stirling::stirling2_row_f64;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fpm2D {
    lambda1: f64,
    lambda2: f64,
    beta: Beta,
    budget: PrecisionBudget,
}

/// One row of the figure table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FigureRow {
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub f: f64,
}

impl Fpm2D {
    pub fn new(lambda1: f64, lambda2: f64, beta: Beta) -> Result<Self> {
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {l}")));
            }
        }
        Ok(Self {
            lambda1,
            lambda2,
            beta,
            budget: PrecisionBudget::default(),
        })
    }

    pub fn with_budget(mut self, budget: PrecisionBudget) -> Result<Self> {
        budget.validate()?;
        self.budget = budget;
        Ok(self)
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.lambda1, self.lambda2)
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    /// `E_β(λ₁(e^{s₁}−1) + λ₂(e^{s₂}−1))`.
    pub fn laplace2(&self, s1: f64, s2: f64) -> Result<f64> {
        let arg = self.lambda1 * s1.exp_m1() + self.lambda2 * s2.exp_m1();
        Ok(mittag_leffler_impl(self.beta, Complex64::new(arg, 0.0), &self.budget, true)?.re)
    }

    /// Joint moment `E[X₁^{n₁} X₂^{n₂}]`.
    pub fn moment2(&self, n1: usize, n2: usize) -> f64 {
        let s1 = stirling2_row_f64(n1);
        let s2 = stirling2_row_f64(n2);
        let b = self.beta.value();
        let mut acc = 0.0;
        for (m1, a) in s1.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (m2, c) in s2.iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let m = m1 + m2;
                let fact: f64 = (1..=m).map(|k| k as f64).product();
                acc += fact * recip_gamma(m as f64 * b + 1.0)
                    * a
                    * c
                    * self.lambda1.powi(m1 as i32)
                    * self.lambda2.powi(m2 as i32);
            }
        }
        acc
    }

    /// Marginal laws.
    pub fn marginals(&self) -> Result<(Fpm1D, Fpm1D)> {
        Ok((
            Fpm1D::with_budget(self.lambda1, self.beta, self.budget)?,
            Fpm1D::with_budget(self.lambda2, self.beta, self.budget)?,
        ))
    }
}

/// `F(β,λ₁,λ₂) = m²(1,2) − A(β,λ₂) m²(1,1) − m_{λ₁}(1) m_{λ₂}(2) + A(β,λ₂) m_{λ₁}(1) m_{λ₂}(1)`.
///
pub fn f_function(beta: Beta, lambda1: f64, lambda2: f64) -> Result<f64> {
    let d = Fpm2D::new(lambda1, lambda2, beta)?;
    let (_, d2) = d.marginals()?;
    let a = d2.a_coeff();
    let m1 = moment_from_rate(beta, lambda1, 1);
    Ok(d.moment2(1, 2) - a * d.moment2(1, 1) - m1 * d2.moment(2) + a * m1 * d2.moment(1))
}

/// `β` values `lo, lo+step, ..., hi`, each rounded to 12 decimals.
pub fn beta_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && lo > 0.0 && hi <= 1.0 && lo <= hi) {
        return Err(Error::invalid(format!(
            "beta grid {lo}:{hi}:{step} must satisfy 0 < lo <= hi <= 1 and step > 0"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::invalid("beta grid has too many points"));
    }
    Ok((0..count)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// F over a β grid for each rate pair, grouped by pair.
pub fn figure31(betas: &[f64], pairs: &[(f64, f64)]) -> Result<Vec<FigureRow>> {
    let mut rows = Vec::with_capacity(betas.len() * pairs.len());
    for &(l1, l2) in pairs {
        for &b in betas {
            rows.push(FigureRow {
                beta: b,
                lambda1: l1,
                lambda2: l2,
                f: f_function(Beta::new(b)?, l1, l2)?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_fn;
    use crate::tensor::scalar::factorial_f64;
    use crate::tensor::GradedSeries;
    use proptest::prelude::*;

    fn beta(v: f64) -> Beta {
        Beta::new(v).unwrap()
    }

    /// Coefficients of E_β(λ₁(e^{s₁}−1) + λ₂(e^{s₂}−1)) as a graded series.
    fn laplace_series(d: &Fpm2D, order: usize) -> GradedSeries<f64> {
        let mut inner = GradedSeries::zero(2, order).unwrap();
        for (j, l) in [d.lambda1, d.lambda2].iter().enumerate() {
            let e = GradedSeries::coordinate(2, order, j).unwrap().exp().unwrap().add_constant(&-1.0);
            inner = inner.add(&e.scale(l)).unwrap();
        }
        let c: Vec<f64> = (0..=order)
            .map(|k| recip_gamma(d.beta.value() * k as f64 + 1.0))
            .collect();
        inner.compose_univariate(&c).unwrap()
    }

    #[test]
    fn listed_joint_moments() {
        let d = Fpm2D::new(1.3, 0.7, beta(0.6)).unwrap();
        let (l1, l2) = (1.3, 0.7);
        let m11 = 2.0 * l1 * l2 / gamma_fn(2.2);
        assert!((d.moment2(1, 1) - m11).abs() < 1e-13);
        let m12 = m11 + 6.0 * l1 * l2 * l2 / gamma_fn(2.8);
        assert!((d.moment2(1, 2) - m12).abs() < 1e-13);
        let p = Fpm2D::new(1.3, 0.7, beta(1.0)).unwrap();
        assert!((p.moment2(1, 1) - l1 * l2).abs() < 1e-14);
    }

    #[test]
    fn moment2_matches_series_oracle() {
        let d = Fpm2D::new(1.1, 2.3, beta(0.45)).unwrap();
        let s = laplace_series(&d, 6);
        for n1 in 0..=6 {
            for n2 in 0..=(6 - n1) {
                let mut mu = vec![0; n1];
                mu.extend(vec![1; n2]);
                let oracle = factorial_f64(n1 + n2) * s.coeff(n1 + n2).get(&mu);
                let m = d.moment2(n1, n2);
                assert!((m - oracle).abs() < 1e-9 * m.max(1.0), "({n1},{n2}) {m} vs {oracle}");
            }
        }
    }

    #[test]
    fn laplace2_basics_and_finite_difference() {
        let d = Fpm2D::new(0.8, 1.6, beta(0.7)).unwrap();
        assert_eq!(d.laplace2(0.0, 0.0).unwrap(), 1.0);
        let p = Fpm2D::new(0.8, 1.6, beta(1.0)).unwrap();
        let expect = (0.8 * 0.3f64.exp_m1() + 1.6 * (-0.2f64).exp_m1()).exp();
        assert!((p.laplace2(0.3, -0.2).unwrap() - expect).abs() < 1e-14);
        let h = 1e-3;
        let mixed = (d.laplace2(h, h).unwrap() - d.laplace2(h, -h).unwrap()
            - d.laplace2(-h, h).unwrap()
            + d.laplace2(-h, -h).unwrap())
            / (4.0 * h * h);
        assert!((mixed - d.moment2(1, 1)).abs() < 1e-5);
    }

    #[test]
    fn f_vanishes_only_at_one() {
        for (l1, l2) in [(1.0, 1.0), (2.0, 3.0), (1.0, 2.0)] {
            assert!(f_function(beta(1.0), l1, l2).unwrap().abs() < 1e-10);
            assert!(f_function(beta(0.5), l1, l2).unwrap().abs() > 1e-6);
        }
    }

    #[test]
    fn f_equals_polynomial_expectation() {
        let d = Fpm2D::new(1.0, 2.0, beta(0.5)).unwrap();
        let (p, q) = d.marginals().unwrap();
        let c1 = &p.orthogonal_polys(1).unwrap()[1];
        let c2 = &q.orthogonal_polys(2).unwrap()[2];
        let mut e = 0.0;
        for (i, a) in c1.coeffs().iter().enumerate() {
            for (j, b) in c2.coeffs().iter().enumerate() {
                e += a * b * d.moment2(i, j);
            }
        }
        let f = f_function(beta(0.5), 1.0, 2.0).unwrap();
        assert!((e - f).abs() < 1e-9, "{e} vs {f}");
    }

    #[test]
    fn grid_and_table_shape() {
        let g = beta_grid(0.1, 1.0, 0.05).unwrap();
        assert_eq!(g.len(), 19);
        assert_eq!(g[1], 0.15);
        assert_eq!(*g.last().unwrap(), 1.0);
        let rows = figure31(&g, &[(1.0, 1.0), (2.0, 3.0), (1.0, 2.0)]).unwrap();
        assert_eq!(rows.len(), 57);
        assert!(beta_grid(0.0, 1.0, 0.1).is_err());
        assert!(beta_grid(0.5, 1.2, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn factorizes_at_beta_one(l1 in 0.1f64..4.0, l2 in 0.1f64..4.0, n1 in 0usize..=4, n2 in 0usize..=4) {
            let d = Fpm2D::new(l1, l2, beta(1.0)).unwrap();
            let prod = moment_from_rate(beta(1.0), l1, n1) * moment_from_rate(beta(1.0), l2, n2);
            prop_assert!((d.moment2(n1, n2) - prod).abs() <= 1e-10 * prod.max(1.0));
        }
    }
}
