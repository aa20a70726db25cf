//! Index-addressed fan-out for independent sub-computations. Results come
//! back in job order, so callers stay deterministic regardless of scheduling.
//! KOENIGSLAB_THREADS caps the worker count (0 or 1 forces serial execution;
//! unset uses the machine's available parallelism).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub(crate) fn thread_cap() -> usize {
    match std::env::var("KOENIGSLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(0) => 1,
        Some(n) => n,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

pub(crate) fn run_indexed<T, F>(n_jobs: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_cap().min(n_jobs);
    if workers <= 1 {
        return (0..n_jobs).map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n_jobs).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_jobs {
                    break;
                }
                let out = job(i);
                *slots[i].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().unwrap())
        .collect()
}
