//! Fan-out of independent engine calls.
//!
//! With the `parallel` feature the work runs on the rayon pool; without it
//! (the wasm build) it runs in order. Results keep input order either way.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn try_map<T, R, F>(items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_map<T, R, F>(items: Vec<T>, f: F) -> Result<Vec<R>>
where
    F: Fn(T) -> Result<R>,
{
    items.into_iter().map(f).collect()
}

/// Caps the global worker pool. Only the first call has any effect.
#[cfg(feature = "parallel")]
pub fn set_thread_limit(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_thread_limit(_threads: usize) -> bool {
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn keeps_order_and_propagates_errors() {
        assert_eq!(
            try_map((0..50).collect(), |x: i32| Ok(x * 2)).unwrap(),
            (0..50).map(|x| x * 2).collect::<Vec<_>>()
        );
        let failed = try_map(vec![1, 2, 3], |x| if x == 2 { Err(Error::EmptySet) } else { Ok(x) });
        assert_eq!(failed, Err(Error::EmptySet));
    }
}
