//! JSON form of a symmetric tensor: `{bins, degree, entries: [{multiset, value}]}`.
//!
//! `multiset` is the nondecreasing list of 0-based bin indices. Real values are
//! plain numbers, complex values are `[re, im]` pairs. Entries omitted on
//! input are zero; duplicates are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multiset::{basis_len, rank};
use super::scalar::Scalar;
use super::sym::{check_envelope, SymTensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson<V> {
    pub bins: usize,
    pub degree: usize,
    pub entries: Vec<EntryJson<V>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson<V> {
    pub multiset: Vec<usize>,
    pub value: V,
}

/// Scalars with a JSON encoding.
pub trait JsonScalar: Scalar + Serialize + for<'de> Deserialize<'de> {
    fn is_finite_value(&self) -> bool;
}

impl JsonScalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl JsonScalar for Complex64 {
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: JsonScalar> From<&SymTensor<T>> for TensorJson<T> {
    fn from(t: &SymTensor<T>) -> Self {
        TensorJson {
            bins: t.bins(),
            degree: t.degree(),
            entries: t
                .entries()
                .map(|(multiset, value)| EntryJson {
                    multiset,
                    value: value.clone(),
                })
                .collect(),
        }
    }
}

impl<T: JsonScalar> TryFrom<TensorJson<T>> for SymTensor<T> {
    type Error = Error;

    fn try_from(j: TensorJson<T>) -> Result<Self> {
        check_envelope(j.bins, j.degree)?;
        let mut values = vec![T::zero(); basis_len(j.bins, j.degree)];
        let mut seen = vec![false; values.len()];
        for e in j.entries {
            if e.multiset.len() != j.degree {
                return Err(Error::Decode(format!(
                    "multiset {:?} has length {}, expected {}",
                    e.multiset,
                    e.multiset.len(),
                    j.degree
                )));
            }
            if e.multiset.iter().any(|&b| b >= j.bins) {
                return Err(Error::Decode(format!(
                    "multiset {:?} has a bin index outside 0..{}",
                    e.multiset, j.bins
                )));
            }
            if e.multiset.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Decode(format!(
                    "multiset {:?} is not nondecreasing",
                    e.multiset
                )));
            }
            if !e.value.is_finite_value() {
                return Err(Error::Decode("non-finite tensor value".into()));
            }
            let r = rank(j.bins, &e.multiset);
            if seen[r] {
                return Err(Error::Decode(format!("duplicate multiset {:?}", e.multiset)));
            }
            seen[r] = true;
            values[r] = e.value;
        }
        SymTensor::from_values(j.bins, j.degree, values)
    }
}

pub fn to_json<T: JsonScalar>(t: &SymTensor<T>) -> String {
    serde_json::to_string(&TensorJson::from(t)).expect("tensor JSON serialization")
}

pub fn from_json<T: JsonScalar>(text: &str) -> Result<SymTensor<T>> {
    let j: TensorJson<T> = serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))?;
    SymTensor::try_from(j)
}
