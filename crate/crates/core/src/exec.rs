//! Execution mode selection for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) the heavy loops run on the
//! rayon global pool. Without it, or when [`Exec::Sequential`] is requested,
//! the same closures run in order on the calling thread. Both paths produce
//! results in input order, so outputs are bit-identical across modes.

/// How a data-parallel loop is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..n`, preserving index order in the output.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps `f` over a slice, preserving order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Fills `out` in chunks of `chunk` elements; `f` receives the chunk index.
    pub fn fill_chunks<T, F>(self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                out.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(i, c)| f(i, c));
            }
            _ => out
                .chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = Exec::Sequential.map_range(1000, |i| (i as f64).sqrt());
        let par = Exec::Parallel.map_range(1000, |i| (i as f64).sqrt());
        assert_eq!(seq, par);

        let mut a = vec![0usize; 103];
        let mut b = vec![0usize; 103];
        Exec::Sequential.fill_chunks(&mut a, 10, |ci, c| {
            c.iter_mut().enumerate().for_each(|(j, v)| *v = ci * 10 + j)
        });
        Exec::Parallel.fill_chunks(&mut b, 10, |ci, c| {
            c.iter_mut().enumerate().for_each(|(j, v)| *v = ci * 10 + j)
        });
        assert_eq!(a, b);
        assert_eq!(a[102], 102);
    }
}
