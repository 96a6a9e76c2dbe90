//! Sequential / data-parallel execution switch.

/// How batch loops are executed.
///
/// `Parallel` uses rayon when the crate is built with the `parallel` feature
/// and silently degrades to `Sequential` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub(crate) fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub(crate) fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fixed chunk length for reductions. Partial sums are formed per chunk and
/// then added left to right, so the floating-point result does not depend on
/// thread scheduling or on the execution mode.
pub(crate) const REDUCE_CHUNK: usize = 256;

/// Sums `f(item)` over `items` with a schedule-independent summation order.
pub(crate) fn chunked_sum<T, F>(exec: Execution, items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let chunk_sum = |chunk: &[T]| chunk.iter().map(&f).sum::<f64>();
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        let partials: Vec<f64> = items.par_chunks(REDUCE_CHUNK).map(chunk_sum).collect();
        return partials.into_iter().sum();
    }
    let _ = exec;
    items.chunks(REDUCE_CHUNK).map(chunk_sum).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sum_is_mode_independent() {
        let xs: Vec<f64> = (0..10_000)
            .map(|i| (i as f64).sin() * 1e-3 + 1.0 / (i + 1) as f64)
            .collect();
        let a = chunked_sum(Execution::Sequential, &xs, |x| *x);
        let b = chunked_sum(Execution::Parallel, &xs, |x| *x);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn maps_preserve_order() {
        let xs: Vec<usize> = (0..1000).collect();
        assert_eq!(
            map_slice(Execution::Parallel, &xs, |x| x * 2),
            map_range(Execution::Sequential, 1000, |i| i * 2)
        );
    }
}
