//! Data-parallel helpers with a sequential fallback.
//!
//! Hot loops (sketch repetitions, per-source PageRank pushes, builder sorts,
//! benchmark query batches) go through [`Parallelism`] so callers can pick
//! the execution mode at run time. Without the `parallel` feature every mode
//! runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }

    /// `f(0), f(1), ..., f(n-1)` in index order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Maps `items` preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn sort_unstable<T: Ord + Send>(self, v: &mut [T]) {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            v.par_sort_unstable();
            return;
        }
        v.sort_unstable();
    }

    /// Runs `f` inside a pool of `threads` workers (0 = library default).
    pub fn install<R: Send>(self, threads: usize, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if self.is_parallel() && threads > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                return pool.install(f);
            }
        }
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = Parallelism::Sequential.map_range(1000, |i| i * i);
        let par = Parallelism::Parallel.map_range(1000, |i| i * i);
        assert_eq!(seq, par);

        let mut a: Vec<u32> = (0..5000).map(|i| (i * 7919) % 5003).collect();
        let mut b = a.clone();
        Parallelism::Sequential.sort_unstable(&mut a);
        Parallelism::Parallel.sort_unstable(&mut b);
        assert_eq!(a, b);
    }
}
