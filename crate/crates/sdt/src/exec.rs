//! Data-parallel map used by the Monte Carlo layers.
//!
//! With the `parallel` feature (default) work items run on the rayon pool;
//! without it the same closure runs sequentially. Results come back in
//! index order either way, and every consumer derives its randomness from
//! the item index, so outputs are identical across both modes and any
//! worker count.

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn preserves_index_order() {
        let v = super::map_indexed(1000, |i| i * i);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(*x, i * i);
        }
    }
}
