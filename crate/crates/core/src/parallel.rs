//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper splits work into pieces whose boundaries do not depend on the
//! number of workers, and results are gathered in index order. Output is therefore
//! identical with or without the `parallel` feature and for any pool size.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum number of grid points handed to one worker in per-step sweeps.
pub const MIN_CHUNK: usize = 1024;

/// Evaluates `f(i)` for `i in 0..count`, returning results in index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Applies `f(global_offset, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i * chunk, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i * chunk, c));
    }
}

/// Like [`for_each_chunk_mut`] over two equally sized slices walked in lockstep.
pub fn for_each_chunk_mut2<A, B, F>(a: &mut [A], b: &mut [B], chunk: usize, f: F)
where
    A: Send,
    B: Send,
    F: Fn(usize, &mut [A], &mut [B]) + Sync + Send,
{
    assert_eq!(a.len(), b.len());
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(chunk)
            .zip(b.par_chunks_mut(chunk))
            .enumerate()
            .for_each(|(i, (ca, cb))| f(i * chunk, ca, cb));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(chunk)
            .zip(b.chunks_mut(chunk))
            .enumerate()
            .for_each(|(i, (ca, cb))| f(i * chunk, ca, cb));
    }
}

/// Below this many points a per-step sweep runs inline; the fork/join cost of a
/// barrier per time step outweighs the work.
pub const PAR_SWEEP_MIN: usize = 4 * MIN_CHUNK;

/// Sets `out[i] = f(i)` for every index, chunked over workers for long slices.
pub fn fill_indexed<F>(out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if out.len() < PAR_SWEEP_MIN {
        out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    } else {
        for_each_chunk_mut(out, MIN_CHUNK, |off, chunk| {
            chunk.iter_mut().enumerate().for_each(|(i, v)| *v = f(off + i));
        });
    }
}

/// Runs `op` with at most `threads` workers (0 = library default).
///
/// Without the `parallel` feature this simply calls `op`.
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return op();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        op()
    }
}
