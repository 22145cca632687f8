use num_rational::Rational64;
use num_traits::{One, Zero};

use super::multiset::{basis_len, distinct_permutations, multiplicity, multisets, rank};
use super::scalar::Scalar;
use super::sym::{check_envelope, SymTensor};
use crate::error::{Error, Result};

/// Linear map between symmetric tensor spaces with exact rational entries.
///
/// Stored densely as an `out × in` matrix in the multiset bases. Adjoints are
/// taken with respect to the pairing `⟨A, B⟩ = Σ_μ mult(μ) A_μ B_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    bins: usize,
    in_degree: usize,
    out_degree: usize,
    rows: usize,
    cols: usize,
    matrix: Vec<Rational64>,
}

impl LinearMap {
    pub fn zero(bins: usize, in_degree: usize, out_degree: usize) -> Result<Self> {
        check_envelope(bins, in_degree)?;
        check_envelope(bins, out_degree)?;
        let rows = basis_len(bins, out_degree);
        let cols = basis_len(bins, in_degree);
        Ok(Self {
            bins,
            in_degree,
            out_degree,
            rows,
            cols,
            matrix: vec![Rational64::zero(); rows * cols],
        })
    }

    pub fn identity(bins: usize, degree: usize) -> Result<Self> {
        let mut m = Self::zero(bins, degree, degree)?;
        for i in 0..m.rows {
            m.matrix[i * m.cols + i] = Rational64::one();
        }
        Ok(m)
    }

    /// The diagonal restriction `D_{i_1..i_k}` from degree `Σ i_j` to degree `k`:
    ///
    /// `(D φ)(x_1..x_k) = (1/k!) Σ_ι φ(x_ι(1) repeated i_1 times, ..., x_ι(k) repeated i_k times)`.
    pub fn diag_restrict(bins: usize, parts: &[usize]) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::invalid("diag_restrict: parts must be positive"));
        }
        let n: usize = parts.iter().sum();
        let k = parts.len();
        let mut map = Self::zero(bins, n, k)?;
        let perms = distinct_permutations(parts);
        let weight = Rational64::new(1, perms.len() as i64);
        for (row, xs) in multisets(bins, k).iter().enumerate() {
            for perm in &perms {
                let mut tuple: Vec<usize> = xs
                    .iter()
                    .zip(perm)
                    .flat_map(|(&x, &rep)| std::iter::repeat_n(x, rep))
                    .collect();
                tuple.sort_unstable();
                let col = rank(bins, &tuple);
                map.matrix[row * map.cols + col] += weight;
            }
        }
        Ok(map)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn in_degree(&self) -> usize {
        self.in_degree
    }

    pub fn out_degree(&self) -> usize {
        self.out_degree
    }

    pub fn entry(&self, row: usize, col: usize) -> Rational64 {
        self.matrix[row * self.cols + col]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(Zero::is_zero)
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Rational64, other: &Self) -> Result<()> {
        if self.bins != other.bins
            || self.in_degree != other.in_degree
            || self.out_degree != other.out_degree
        {
            return Err(Error::shape("add_scaled: map shapes differ"));
        }
        for (a, b) in self.matrix.iter_mut().zip(&other.matrix) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
        Ok(())
    }

    pub fn scaled(&self, c: Rational64) -> Self {
        Self {
            matrix: self.matrix.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.out_degree != self.in_degree || inner.bins != self.bins {
            return Err(Error::shape("compose: degrees do not chain"));
        }
        let mut out = Self::zero(self.bins, inner.in_degree, self.out_degree)?;
        for r in 0..self.rows {
            for mid in 0..self.cols {
                let a = self.matrix[r * self.cols + mid];
                if a.is_zero() {
                    continue;
                }
                for c in 0..inner.cols {
                    let b = inner.matrix[mid * inner.cols + c];
                    if !b.is_zero() {
                        out.matrix[r * out.cols + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Adjoint under the multiplicity-weighted pairing: `G_in⁻¹ Mᵀ G_out`.
    pub fn adjoint(&self) -> Self {
        let out_mult: Vec<i64> = multisets(self.bins, self.out_degree)
            .iter()
            .map(|m| multiplicity(m) as i64)
            .collect();
        let in_mult: Vec<i64> = multisets(self.bins, self.in_degree)
            .iter()
            .map(|m| multiplicity(m) as i64)
            .collect();
        let mut matrix = vec![Rational64::zero(); self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.matrix[r * self.cols + c];
                if !v.is_zero() {
                    matrix[c * self.rows + r] = v * Rational64::new(out_mult[r], in_mult[c]);
                }
            }
        }
        Self {
            bins: self.bins,
            in_degree: self.out_degree,
            out_degree: self.in_degree,
            rows: self.cols,
            cols: self.rows,
            matrix,
        }
    }

    pub fn apply<T: Scalar>(&self, t: &SymTensor<T>) -> Result<SymTensor<T>> {
        if t.bins() != self.bins || t.degree() != self.in_degree {
            return Err(Error::shape(format!(
                "map expects (bins {}, degree {}), got ({}, {})",
                self.bins,
                self.in_degree,
                t.bins(),
                t.degree()
            )));
        }
        let input = t.values();
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = T::zero();
            for (c, x) in input.iter().enumerate() {
                let e = self.matrix[r * self.cols + c];
                if e.is_zero() || x.is_zero() {
                    continue;
                }
                acc = acc + T::from_ratio(*e.numer(), *e.denom()) * x.clone();
            }
            out.push(acc);
        }
        SymTensor::from_values(self.bins, self.out_degree, out)
    }
}
