//! Indexing of multisets of bin indices.
//!
//! A multiset of size `n` over `m` bins is stored as its nondecreasing index
//! tuple. Tuples are ranked in lexicographic order, which is also the order
//! produced by [`multisets`].

use super::scalar::binomial;

/// Number of multisets of size `degree` drawn from `bins` bins.
pub fn basis_len(bins: usize, degree: usize) -> usize {
    if bins == 0 {
        return usize::from(degree == 0);
    }
    binomial(bins + degree - 1, degree) as usize
}

/// All nondecreasing index tuples of length `degree`, in rank order.
pub fn multisets(bins: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(basis_len(bins, degree));
    let mut cur = vec![0usize; degree];
    if degree == 0 {
        out.push(Vec::new());
        return out;
    }
    if bins == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance to the next nondecreasing tuple
        let mut pos = degree;
        while pos > 0 && cur[pos - 1] == bins - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let v = cur[pos - 1] + 1;
        for slot in cur.iter_mut().skip(pos - 1) {
            *slot = v;
        }
    }
    out
}

/// Rank of a sorted index tuple.
pub fn rank(bins: usize, sorted: &[usize]) -> usize {
    let n = sorted.len();
    let mut r = 0usize;
    let mut prev = 0usize;
    for (i, &b) in sorted.iter().enumerate() {
        let rem = n - i - 1;
        for v in prev..b {
            // tuples of length `rem` with entries in v..bins
            r += basis_len(bins - v, rem);
        }
        prev = b;
    }
    r
}

/// Rank of an arbitrary (unsorted) tuple.
pub fn rank_unsorted(bins: usize, tuple: &[usize]) -> usize {
    let mut t = tuple.to_vec();
    t.sort_unstable();
    rank(bins, &t)
}

/// Occupation numbers `μ_j` of a tuple.
pub fn occupation(bins: usize, tuple: &[usize]) -> Vec<usize> {
    let mut occ = vec![0usize; bins];
    for &b in tuple {
        occ[b] += 1;
    }
    occ
}

/// Number of distinct orderings of a multiset: `n! / Π μ_j!`.
pub fn multiplicity(sorted: &[usize]) -> u64 {
    let n = sorted.len();
    let mut denom = 1u64;
    let mut run = 0u64;
    for i in 0..n {
        if i > 0 && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        denom *= run;
    }
    let mut num = 1u64;
    for k in 2..=n as u64 {
        num *= k;
    }
    num / denom
}

/// Merge two sorted tuples into a sorted tuple.
pub fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Step `v` to its next lexicographic permutation; false when `v` was last.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Distinct permutations of `items` (sorted first), in lexicographic order.
pub fn distinct_permutations<T: Ord + Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut cur = items.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Visit every ordered tuple in `[0, bins)^len`.
pub fn for_each_tuple(bins: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut cur = vec![0usize; len];
    if len == 0 {
        f(&cur);
        return;
    }
    if bins == 0 {
        return;
    }
    loop {
        f(&cur);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < bins {
                break;
            }
            cur[pos] = 0;
        }
    }
}
