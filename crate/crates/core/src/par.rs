//! Ordered map over a slice, spread over the rayon pool when the `parallel`
//! feature is on and the caller asks for it.

pub fn map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Whether [`map`] can run in parallel in this build.
pub const AVAILABLE: bool = cfg!(feature = "parallel");

#[cfg(test)]
mod tests {
    #[test]
    fn order_is_kept() {
        let xs: Vec<u64> = (0..1000).collect();
        assert_eq!(super::map(&xs, true, |x| x * x), super::map(&xs, false, |x| x * x));
    }
}
