//! Order-preserving map over independent work items: rayon when the
//! `parallel` feature is compiled in and requested, a plain loop otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether `map_ordered(.., true, ..)` actually fans out.
pub const PARALLEL_AVAILABLE: bool = cfg!(feature = "parallel");

pub fn map_ordered<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel && items.len() > 1 {
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}
