//! Deterministic chunked execution for the numeric kernels.
//!
//! Index spaces are split into fixed-size chunks; per-chunk partial results
//! are combined in chunk order. The rayon path (feature `parallel`) and the
//! sequential fallback therefore produce bit-identical floating-point output,
//! and repeated runs are reproducible regardless of thread scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) const CHUNK: usize = 1024;

fn num_chunks(len: usize) -> usize {
    len.div_ceil(CHUNK)
}

fn chunk_bounds(len: usize, chunk_idx: usize) -> (usize, usize) {
    let start = chunk_idx * CHUNK;
    (start, (start + CHUNK).min(len))
}

pub(crate) fn sum_indexed_seq<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let mut total = 0.0;
    for ci in 0..num_chunks(len) {
        let (start, end) = chunk_bounds(len, ci);
        let mut partial = 0.0;
        for i in start..end {
            partial += f(i);
        }
        total += partial;
    }
    total
}

#[cfg(feature = "parallel")]
pub(crate) fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if len <= CHUNK {
        return sum_indexed_seq(len, f);
    }
    let partials: Vec<f64> = (0..num_chunks(len))
        .into_par_iter()
        .map(|ci| {
            let (start, end) = chunk_bounds(len, ci);
            let mut partial = 0.0;
            for i in start..end {
                partial += f(i);
            }
            partial
        })
        .collect();
    partials.into_iter().sum()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    sum_indexed_seq(len, f)
}

pub(crate) fn fill_indexed_seq<T, F>(out: &mut [T], f: F)
where
    F: Fn(usize) -> T,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if out.len() <= CHUNK {
        return fill_indexed_seq(out, f);
    }
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let base = ci * CHUNK;
        for (k, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + k);
        }
    });
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    fill_indexed_seq(out, f)
}

pub(crate) fn update_indexed_seq<F>(out: &mut [f64], f: F)
where
    F: Fn(usize, f64) -> f64,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i, *slot);
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn update_indexed<F>(out: &mut [f64], f: F)
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    if out.len() <= CHUNK {
        return update_indexed_seq(out, f);
    }
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let base = ci * CHUNK;
        for (k, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + k, *slot);
        }
    });
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn update_indexed<F>(out: &mut [f64], f: F)
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    update_indexed_seq(out, f)
}

pub(crate) fn count_indexed_seq<F>(len: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool,
{
    (0..len).filter(|&i| pred(i)).count()
}

#[cfg(feature = "parallel")]
pub(crate) fn count_indexed<F>(len: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool + Sync,
{
    if len <= CHUNK {
        return count_indexed_seq(len, pred);
    }
    (0..num_chunks(len))
        .into_par_iter()
        .map(|ci| {
            let (start, end) = chunk_bounds(len, ci);
            (start..end).filter(|&i| pred(i)).count()
        })
        .sum()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn count_indexed<F>(len: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool + Sync,
{
    count_indexed_seq(len, pred)
}

/// Componentwise minimum and maximum of a nonempty slice without NaNs.
pub(crate) fn minmax_seq(x: &[f64]) -> (f64, f64) {
    assert!(!x.is_empty(), "minmax of empty slice");
    let mut lo = x[0];
    let mut hi = x[0];
    for &v in &x[1..] {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

#[cfg(feature = "parallel")]
pub(crate) fn minmax(x: &[f64]) -> (f64, f64) {
    if x.len() <= CHUNK {
        return minmax_seq(x);
    }
    x.par_chunks(CHUNK)
        .map(minmax_seq)
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |(alo, ahi), (blo, bhi)| (alo.min(blo), ahi.max(bhi)),
        )
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn minmax(x: &[f64]) -> (f64, f64) {
    minmax_seq(x)
}

/// Runs `f(i, acc)` for every index, letting each chunk scatter integer
/// increments into a local accumulator of length `acc_len`; accumulators are
/// merged by elementwise addition (order-independent for integers).
pub(crate) fn accumulate_i32_seq<F>(len: usize, acc_len: usize, f: F) -> Vec<i32>
where
    F: Fn(usize, &mut [i32]),
{
    let mut acc = vec![0i32; acc_len];
    for i in 0..len {
        f(i, &mut acc);
    }
    acc
}

#[cfg(feature = "parallel")]
pub(crate) fn accumulate_i32<F>(len: usize, acc_len: usize, f: F) -> Vec<i32>
where
    F: Fn(usize, &mut [i32]) + Sync,
{
    if len <= CHUNK {
        return accumulate_i32_seq(len, acc_len, f);
    }
    (0..num_chunks(len))
        .into_par_iter()
        .fold(
            || vec![0i32; acc_len],
            |mut acc, ci| {
                let (start, end) = chunk_bounds(len, ci);
                for i in start..end {
                    f(i, &mut acc);
                }
                acc
            },
        )
        .reduce(
            || vec![0i32; acc_len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn accumulate_i32<F>(len: usize, acc_len: usize, f: F) -> Vec<i32>
where
    F: Fn(usize, &mut [i32]) + Sync,
{
    accumulate_i32_seq(len, acc_len, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_matches_seq_exactly() {
        let f = |i: usize| (i as f64).sin() * 1e-3 + 1.0 / (i + 1) as f64;
        for len in [0, 1, CHUNK, CHUNK + 1, 5 * CHUNK + 17] {
            assert_eq!(sum_indexed(len, f).to_bits(), sum_indexed_seq(len, f).to_bits());
        }
    }

    #[test]
    fn minmax_matches_seq() {
        let x: Vec<f64> = (0..4 * CHUNK + 3).map(|i| ((i * 37) % 101) as f64 - 50.0).collect();
        assert_eq!(minmax(&x), minmax_seq(&x));
    }

    #[test]
    fn accumulate_matches_seq() {
        let len = 3 * CHUNK + 5;
        let f = |i: usize, acc: &mut [i32]| acc[i % 7] += 1;
        assert_eq!(accumulate_i32(len, 7, f), accumulate_i32_seq(len, 7, f));
    }
}
