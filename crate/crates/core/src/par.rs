use alloc::vec::Vec;

/// Evaluates `f(0..n)` and returns the results in index order. Runs on the
/// rayon pool when the `parallel` feature is enabled; the output is the same
/// either way.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
