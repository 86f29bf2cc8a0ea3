//! Embarrassing parallelism with a deterministic merge order.
//!
//! Work items are indexed; results come back in index order regardless of
//! scheduling, so outputs are identical to a sequential run. `KOBA_THREADS`
//! caps the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Worker cap: min(KOBA_THREADS, available_parallelism), at least 1.
pub fn thread_cap() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("KOBA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => n.min(avail),
        _ => avail,
    }
}

/// Maps `f` over `0..n`, in parallel when worthwhile; results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_cap().min(n.max(1));
    if workers <= 1 || n < 2 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let next = AtomicUsize::new(0);
    let slots_ptr = SendPtr(slots.as_mut_ptr());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let next = &next;
            let f = &f;
            let slots_ptr = &slots_ptr;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                // Each index is claimed by exactly one worker.
                unsafe { *slots_ptr.0.add(i) = Some(out) };
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

struct SendPtr<T>(*mut T);
unsafe impl<T: Send> Sync for SendPtr<T> {}
unsafe impl<T: Send> Send for SendPtr<T> {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order() {
        let out = map_indexed(97, |i| i * i);
        assert_eq!(out, (0..97).map(|i| i * i).collect::<Vec<_>>());
    }
}
