use super::multiset::{
    basis_len, for_each_tuple, merge, multiplicity, multisets, rank, rank_unsorted,
};
use super::scalar::{binomial, Scalar};
use crate::error::{Error, Result};

/// Largest number of bins supported by the dense representation.
pub const MAX_BINS: usize = 4;
/// Largest tensor degree supported by the dense representation.
pub const MAX_DEGREE: usize = 8;

/// Dense symmetric tensor of degree `n` over `m` bins.
///
/// `values[rank(μ)]` is the common value `A(b_1, ..., b_n)` at every ordering
/// of the multiset `μ`. Pairing against a tensor power therefore reads
/// `⟨A, φ^⊗n⟩ = Σ_μ mult(μ) A_μ Π_j φ_j^{μ_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor<T> {
    bins: usize,
    degree: usize,
    values: Vec<T>,
}

pub(crate) fn check_envelope(bins: usize, degree: usize) -> Result<()> {
    if bins == 0 || bins > MAX_BINS {
        return Err(Error::OutsideEnvelope(format!(
            "bins must be in 1..={MAX_BINS}, got {bins}"
        )));
    }
    if degree > MAX_DEGREE {
        return Err(Error::OutsideEnvelope(format!(
            "degree must be at most {MAX_DEGREE}, got {degree}"
        )));
    }
    Ok(())
}

impl<T: Scalar> SymTensor<T> {
    pub fn zeros(bins: usize, degree: usize) -> Result<Self> {
        check_envelope(bins, degree)?;
        Ok(Self {
            bins,
            degree,
            values: vec![T::zero(); basis_len(bins, degree)],
        })
    }

    /// Degree-0 tensor holding `c`.
    pub fn scalar(bins: usize, c: T) -> Result<Self> {
        check_envelope(bins, 0)?;
        Ok(Self {
            bins,
            degree: 0,
            values: vec![c],
        })
    }

    /// Build from a function of the sorted index tuple.
    pub fn from_fn(bins: usize, degree: usize, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        check_envelope(bins, degree)?;
        let values = multisets(bins, degree).iter().map(|m| f(m)).collect();
        Ok(Self {
            bins,
            degree,
            values,
        })
    }

    /// Build from raw values in rank order.
    pub fn from_values(bins: usize, degree: usize, values: Vec<T>) -> Result<Self> {
        check_envelope(bins, degree)?;
        if values.len() != basis_len(bins, degree) {
            return Err(Error::shape(format!(
                "expected {} values for bins={bins}, degree={degree}, got {}",
                basis_len(bins, degree),
                values.len()
            )));
        }
        Ok(Self {
            bins,
            degree,
            values,
        })
    }

    /// Degree-1 tensor from a vector.
    pub fn vector(v: &[T]) -> Result<Self> {
        Self::from_values(v.len(), 1, v.to_vec())
    }

    /// `v^⊗n`.
    pub fn tensor_power(v: &[T], n: usize) -> Result<Self> {
        Self::from_fn(v.len(), n, |m| {
            m.iter().fold(T::one(), |acc, &b| acc * v[b].clone())
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at an index tuple (any order).
    pub fn get(&self, tuple: &[usize]) -> &T {
        debug_assert_eq!(tuple.len(), self.degree);
        &self.values[rank_unsorted(self.bins, tuple)]
    }

    pub fn set(&mut self, tuple: &[usize], value: T) {
        debug_assert_eq!(tuple.len(), self.degree);
        let r = rank_unsorted(self.bins, tuple);
        self.values[r] = value;
    }

    /// Value of a degree-0 tensor.
    pub fn as_scalar(&self) -> Option<&T> {
        (self.degree == 0).then(|| &self.values[0])
    }

    /// `(multiset, value)` pairs in rank order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        multisets(self.bins, self.degree)
            .into_iter()
            .zip(self.values.iter())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.bins != other.bins || self.degree != other.degree {
            return Err(Error::shape(format!(
                "tensor shapes differ: ({}, {}) vs ({}, {})",
                self.bins, self.degree, other.bins, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: &T, other: &Self) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a = a.clone() + c.clone() * b.clone();
        }
        Ok(())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
            ..self.clone()
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymTensor<U> {
        SymTensor {
            bins: self.bins,
            degree: self.degree,
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Full contraction of two tensors of equal degree, `Σ_μ mult(μ) A_μ B_μ`.
    pub fn pair(&self, other: &Self) -> Result<T> {
        self.same_shape(other)?;
        let mut acc = T::zero();
        for ((m, a), b) in self.entries().zip(&other.values) {
            let w = T::from_i64(multiplicity(&m) as i64);
            acc = acc + w * a.clone() * b.clone();
        }
        Ok(acc)
    }

    /// `⟨A, v^⊗n⟩`.
    pub fn pair_power(&self, v: &[T]) -> Result<T> {
        if v.len() != self.bins {
            return Err(Error::shape(format!(
                "vector has {} bins, tensor has {}",
                v.len(),
                self.bins
            )));
        }
        let mut acc = T::zero();
        for (m, a) in self.entries() {
            let w = T::from_i64(multiplicity(&m) as i64);
            let p = m.iter().fold(T::one(), |acc, &b| acc * v[b].clone());
            acc = acc + w * a.clone() * p;
        }
        Ok(acc)
    }

    /// `⟨A, f_1 ⊗ ... ⊗ f_n⟩`, summing over all ordered index tuples.
    pub fn pair_vectors(&self, vs: &[Vec<T>]) -> Result<T> {
        if vs.len() != self.degree {
            return Err(Error::shape(format!(
                "need {} vectors, got {}",
                self.degree,
                vs.len()
            )));
        }
        if vs.iter().any(|v| v.len() != self.bins) {
            return Err(Error::shape("vector length differs from bin count"));
        }
        let mut acc = T::zero();
        for_each_tuple(self.bins, self.degree, |t| {
            let p = t
                .iter()
                .zip(vs)
                .fold(T::one(), |acc, (&b, v)| acc * v[b].clone());
            acc = acc.clone() + self.get(t).clone() * p;
        });
        Ok(acc)
    }

    /// Symmetrized tensor product `A ⊗̂ B`.
    pub fn sym_product(&self, other: &Self) -> Result<Self> {
        if self.bins != other.bins {
            return Err(Error::shape("sym_product: bin counts differ"));
        }
        let a = self.degree;
        let b = other.degree;
        let n = a + b;
        check_envelope(self.bins, n)?;
        if a == 0 {
            return Ok(other.scale(&self.values[0]));
        }
        if b == 0 {
            return Ok(self.scale(&other.values[0]));
        }
        let subsets = position_subsets(n, a);
        let norm = T::from_i64(binomial(n, a) as i64);
        Self::from_fn(self.bins, n, |m| {
            let mut acc = T::zero();
            let mut left = Vec::with_capacity(a);
            let mut right = Vec::with_capacity(b);
            for mask in &subsets {
                left.clear();
                right.clear();
                for (pos, &idx) in m.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        left.push(idx);
                    } else {
                        right.push(idx);
                    }
                }
                acc = acc
                    + self.values[rank(self.bins, &left)].clone()
                        * other.values[rank(self.bins, &right)].clone();
            }
            acc / norm.clone()
        })
    }

    /// Partial contraction: `χ(c) = Σ_{d} self(d) · psi(c, d)` over ordered
    /// `d`, so that `⟨X ⊗̂ self, psi⟩ = ⟨X, χ⟩` for every `X` of the
    /// complementary degree.
    pub fn contract_into(&self, psi: &Self) -> Result<Self> {
        if self.bins != psi.bins {
            return Err(Error::shape("contract: bin counts differ"));
        }
        if self.degree > psi.degree {
            return Err(Error::shape(format!(
                "cannot contract degree {} into degree {}",
                self.degree, psi.degree
            )));
        }
        let inner = multisets(self.bins, self.degree);
        let weights: Vec<T> = inner
            .iter()
            .zip(&self.values)
            .map(|(m, v)| T::from_i64(multiplicity(m) as i64) * v.clone())
            .collect();
        Self::from_fn(self.bins, psi.degree - self.degree, |c| {
            let mut acc = T::zero();
            for (d, w) in inner.iter().zip(&weights) {
                if w.is_zero() {
                    continue;
                }
                let full = merge(c, d);
                acc = acc + w.clone() * psi.values[rank(psi.bins, &full)].clone();
            }
            acc
        })
    }
}

/// Bitmasks of `k`-subsets of `n` positions.
fn position_subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}
