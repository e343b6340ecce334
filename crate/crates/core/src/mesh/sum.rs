/// Leaves of the reduction tree hold at most this many terms, summed left to right.
pub const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (tree) summation of `term(0) + … + term(n-1)`.
///
/// The range is split at `lo + (hi - lo) / 2` until a leaf has at most
/// [`PAIRWISE_BLOCK`] terms. The association order depends on `n` only, so the
/// result is bit-reproducible.
pub fn pairwise_sum<F: Fn(usize) -> f64>(n: usize, term: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= PAIRWISE_BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, &term)
}

/// Pairwise dot product of two equally long slices.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot product of slices with different lengths");
    pairwise_sum(a.len(), |i| a[i] * b[i])
}
