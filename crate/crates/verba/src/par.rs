//! Deterministic partitioned parallelism.
//!
//! Searches scan a rectangular (row, column) space in canonical order.
//! Workers claim rows from a shared counter and report their earliest hit;
//! a row is always scanned to completion by whoever claimed it, and workers
//! only stop claiming once a hit in an earlier row is known. The reduction
//! picks the minimum (row, column), so the result is identical for any
//! worker count. Counting reductions merge per-chunk results in chunk order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Earliest `Some` over rows 0..rows, where `scan_row(r)` itself returns the
/// earliest hit within row r as `(column, payload)`.
pub fn first_hit<T, F>(rows: usize, workers: usize, scan_row: F) -> Option<(usize, usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<(usize, T)> + Sync,
{
    if workers <= 1 {
        for r in 0..rows {
            if let Some((c, payload)) = scan_row(r) {
                return Some((r, c, payload));
            }
        }
        return None;
    }
    let next = AtomicUsize::new(0);
    let best: Mutex<Option<(usize, usize, T)>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let r = next.fetch_add(1, Ordering::SeqCst);
                if r >= rows {
                    return;
                }
                {
                    let b = best.lock().unwrap();
                    if let Some((br, _, _)) = *b {
                        if br < r {
                            return;
                        }
                    }
                }
                if let Some((c, payload)) = scan_row(r) {
                    let mut b = best.lock().unwrap();
                    let better = match *b {
                        None => true,
                        Some((br, bc, _)) => (r, c) < (br, bc),
                    };
                    if better {
                        *b = Some((r, c, payload));
                    }
                }
            });
        }
    });
    best.into_inner().unwrap()
}

/// Splits 0..rows into `workers` contiguous chunks, maps each chunk, and
/// folds the chunk results in chunk order.
pub fn chunked<T, F>(rows: usize, workers: usize, map_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    let workers = workers.max(1).min(rows.max(1));
    if workers <= 1 {
        return vec![map_chunk(0..rows)];
    }
    let chunk = rows.div_ceil(workers);
    let mut out: Vec<Option<T>> = (0..workers).map(|_| None).collect();
    std::thread::scope(|s| {
        for (w, slot) in out.iter_mut().enumerate() {
            let map_chunk = &map_chunk;
            s.spawn(move || {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(rows);
                *slot = Some(map_chunk(lo..hi));
            });
        }
    });
    out.into_iter().map(|x| x.expect("worker finished")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_hit_is_worker_count_independent() {
        let pred = |r: usize| -> Option<(usize, u32)> {
            // hits in rows 17 and 40; earliest must win regardless of workers
            match r {
                17 => Some((3, 170)),
                40 => Some((0, 400)),
                _ => None,
            }
        };
        let base = first_hit(64, 1, pred);
        for w in [2, 4, 8] {
            assert_eq!(first_hit(64, w, pred), base);
        }
        assert_eq!(base, Some((17, 3, 170)));
    }

    #[test]
    fn chunked_preserves_order() {
        let sums = chunked(100, 4, |range| range.sum::<usize>());
        assert_eq!(sums.iter().sum::<usize>(), (0..100).sum::<usize>());
    }
}
