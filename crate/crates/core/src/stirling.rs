//! Stirling numbers, Stirling operators on symmetric tensors, and falling
//! factorials.
//!
//! The operators are exact rational [`LinearMap`]s built from diagonal
//! restrictions:
//!
//! * `𝐬(n,k) = (n!/k!) Σ_{i_1+..+i_k=n} (−1)^{n−k} / (i_1···i_k) D_{i_1..i_k}`
//! * `𝐒(n,k) = (n!/k!) Σ_{i_1+..+i_k=n} 1 / (i_1!···i_k!) D_{i_1..i_k}`
//!
//! with `𝐬(0,0) = 𝐒(0,0) = id` and the zero map whenever `k > n` or `k = 0 < n`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::tensor::multiset::multisets;
use crate::tensor::scalar::Scalar;
use crate::tensor::{LinearMap, SymTensor};

/// Signed Stirling number of the first kind `s(n,k)`.
pub fn stirling1(n: usize, k: usize) -> i128 {
    table1(n)[n][k.min(n + 1)]
}

/// Stirling number of the second kind `S(n,k)`.
pub fn stirling2(n: usize, k: usize) -> i128 {
    table2(n)[n][k.min(n + 1)]
}

fn table1(n: usize) -> Vec<Vec<i128>> {
    assert!(n <= 30, "stirling numbers are tabulated up to n = 30");
    let mut t = vec![vec![0i128; n + 2]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            t[i][k] = t[i - 1][k - 1] - (i as i128 - 1) * t[i - 1][k];
        }
    }
    t
}

fn table2(n: usize) -> Vec<Vec<i128>> {
    assert!(n <= 30, "stirling numbers are tabulated up to n = 30");
    let mut t = vec![vec![0i128; n + 2]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            t[i][k] = t[i - 1][k - 1] + k as i128 * t[i - 1][k];
        }
    }
    t
}

/// Both kinds up to `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingTable {
    pub first: Vec<Vec<i128>>,
    pub second: Vec<Vec<i128>>,
}

impl StirlingTable {
    pub fn new(n_max: usize) -> Self {
        let trim = |t: Vec<Vec<i128>>| -> Vec<Vec<i128>> {
            t.into_iter()
                .map(|mut row| {
                    row.truncate(n_max + 1);
                    row
                })
                .collect()
        };
        Self {
            first: trim(table1(n_max)),
            second: trim(table2(n_max)),
        }
    }

    /// `Σ_k S(k,i) s(n,k)` for all `n, i`; the identity matrix.
    pub fn inverse_product(&self) -> Vec<Vec<i128>> {
        let n = self.first.len();
        (0..n)
            .map(|row| {
                (0..n)
                    .map(|i| (0..n).map(|k| self.second[k][i] * self.first[row][k]).sum())
                    .collect()
            })
            .collect()
    }
}

/// `S(n,m)` as `f64` for larger `n`, by the same recurrence.
pub fn stirling2_row_f64(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for i in 1..=n {
        let mut next = vec![0.0; i + 1];
        for k in 1..=i {
            let a = row[k - 1];
            let b = if k < row.len() { row[k] } else { 0.0 };
            next[k] = a + k as f64 * b;
        }
        row = next;
    }
    row
}

/// Ordered compositions of `n` into `k` positive parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    if n < k {
        return out;
    }
    let mut cur = Vec::with_capacity(k);
    fn rec(rem: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=(rem - (slots - 1)) {
            cur.push(first);
            rec(rem - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    First,
    Second,
}

type OpKey = (Kind, bool, usize, usize, usize);

fn op_cache() -> &'static Mutex<HashMap<OpKey, Arc<LinearMap>>> {
    static CACHE: OnceLock<Mutex<HashMap<OpKey, Arc<LinearMap>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn factorial_i64(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn build_op(kind: Kind, bins: usize, n: usize, k: usize) -> Result<LinearMap> {
    if n == 0 && k == 0 {
        return LinearMap::identity(bins, 0);
    }
    let mut map = LinearMap::zero(bins, n, k)?;
    if k == 0 || k > n {
        return Ok(map);
    }
    let lead = Rational64::new(factorial_i64(n), factorial_i64(k));
    for parts in compositions(n, k) {
        let w = match kind {
            Kind::First => {
                let sign = if (n - k).is_multiple_of(2) { 1 } else { -1 };
                Rational64::new(sign, parts.iter().map(|&i| i as i64).product())
            }
            Kind::Second => Rational64::new(1, parts.iter().map(|&i| factorial_i64(i)).product()),
        };
        map.add_scaled(lead * w, &LinearMap::diag_restrict(bins, &parts)?)?;
    }
    Ok(map)
}

/// The operator `𝐬(n,k)` (`Kind::First`) or `𝐒(n,k)` (`Kind::Second`), or its
/// adjoint, as a cached exact map from degree `n` to degree `k`.
pub fn operator(kind: Kind, adjoint: bool, bins: usize, n: usize, k: usize) -> Result<Arc<LinearMap>> {
    let key = (kind, adjoint, bins, n, k);
    if let Some(m) = op_cache().lock().expect("operator cache poisoned").get(&key) {
        return Ok(Arc::clone(m));
    }
    let base = build_op(kind, bins, n, k)?;
    let map = Arc::new(if adjoint { base.adjoint() } else { base });
    op_cache()
        .lock()
        .expect("operator cache poisoned")
        .insert(key, Arc::clone(&map));
    Ok(map)
}

/// `𝐬(n,k) φ^(n)`.
pub fn stirling_op1<T: Scalar>(k: usize, phi: &SymTensor<T>) -> Result<SymTensor<T>> {
    operator(Kind::First, false, phi.bins(), phi.degree(), k)?.apply(phi)
}

/// `𝐒(n,k) φ^(n)`.
pub fn stirling_op2<T: Scalar>(k: usize, phi: &SymTensor<T>) -> Result<SymTensor<T>> {
    operator(Kind::Second, false, phi.bins(), phi.degree(), k)?.apply(phi)
}

/// `𝐬(n,k)^* ψ^(k)`, a degree-`n` tensor.
pub fn stirling_op1_adj<T: Scalar>(n: usize, psi: &SymTensor<T>) -> Result<SymTensor<T>> {
    operator(Kind::First, true, psi.bins(), n, psi.degree())?.apply(psi)
}

/// `𝐒(n,k)^* ψ^(k)`, a degree-`n` tensor.
pub fn stirling_op2_adj<T: Scalar>(n: usize, psi: &SymTensor<T>) -> Result<SymTensor<T>> {
    operator(Kind::Second, true, psi.bins(), n, psi.degree())?.apply(psi)
}

/// Falling factorial `(w)_n` of an `m`-vector.
///
/// `(w)_n(b_1..b_n) = w_{b_1} (w_{b_2} − δ_{b_1 b_2}) ··· (w_{b_n} − Σ_{i<n} δ_{b_i b_n})`.
pub fn falling_factorial<T: Scalar>(w: &[T], n: usize) -> Result<SymTensor<T>> {
    if w.is_empty() {
        return Err(Error::invalid("falling_factorial: empty vector"));
    }
    SymTensor::from_fn(w.len(), n, |b| {
        let mut acc = T::one();
        for (pos, &bin) in b.iter().enumerate() {
            let hits = b[..pos].iter().filter(|&&x| x == bin).count();
            acc = acc * (w[bin].clone() - T::from_i64(hits as i64));
        }
        acc
    })
}

/// Every multiset of the given degree, for callers that build tables.
pub fn basis(bins: usize, degree: usize) -> Vec<Vec<usize>> {
    multisets(bins, degree)
}
