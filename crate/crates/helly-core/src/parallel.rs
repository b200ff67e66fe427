//! Thin execution facade: data-parallel inner loops go through these helpers
//! so the whole crate can be built without rayon (`--no-default-features`).
//!
//! All helpers preserve input order, so results are deterministic regardless
//! of the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, in parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Always-sequential variant, kept available for baseline comparisons.
pub fn map_slice_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map over an index range `0..n`, in parallel when enabled.
#[cfg(feature = "parallel")]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Always-sequential variant of [`map_range`].
pub fn map_range_sequential<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Minimum over `0..n` of a keyed evaluation, with deterministic
/// lowest-index tie-breaking. Returns `None` for `n == 0` or when every
/// key is `None`.
pub fn argmin_by_key<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    let keys = map_range(n, &f);
    let mut best: Option<(usize, f64)> = None;
    for (i, key) in keys.into_iter().enumerate() {
        if let Some(k) = key {
            let replace = match best {
                None => true,
                Some((_, b)) => k < b,
            };
            if replace {
                best = Some((i, k));
            }
        }
    }
    best
}

/// Maximum analogue of [`argmin_by_key`].
pub fn argmax_by_key<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    argmin_by_key(n, |i| f(i).map(|v| -v)).map(|(i, v)| (i, -v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_sequential() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map_slice(&xs, |x| x * x);
        let b = map_slice_sequential(&xs, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn argmin_uses_lowest_index_on_ties() {
        let vals = [3.0, 1.0, 1.0, 2.0];
        let got = argmin_by_key(vals.len(), |i| Some(vals[i])).unwrap();
        assert_eq!(got.0, 1);
    }
}
