use std::ops::Range;
use std::thread;

/// Splits `0..len` into at most `workers` contiguous blocks of near-equal size.
pub(crate) fn block_ranges(len: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.max(1).min(len.max(1));
    let base = len / workers;
    let extra = len % workers;
    let mut start = 0;
    (0..workers)
        .map(|i| {
            let size = base + usize::from(i < extra);
            let range = start..start + size;
            start += size;
            range
        })
        .collect()
}

/// Runs `f` once per block on its own scoped thread and returns the results in
/// block order. A single block runs on the calling thread.
pub(crate) fn for_each_block<T, F>(len: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let ranges = block_ranges(len, workers);
    if ranges.len() == 1 {
        return vec![f(ranges[0].clone())];
    }
    thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| {
                let f = &f;
                scope.spawn(move || f(range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
