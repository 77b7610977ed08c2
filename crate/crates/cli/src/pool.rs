//! Small work pool: runs independent jobs (prime sweeps, suite members)
//! concurrently up to the configured worker count, then hands results back
//! in job order so report assembly stays single-threaded and
//! deterministic.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

type Job<T> = Box<dyn FnOnce() -> T + Send>;

/// Worker count shared with the library: `DWORKMILL_WORKERS` when set,
/// otherwise the available parallelism (capped).
pub fn worker_count() -> usize {
    dworkmill::normlaurent::worker_count()
}

/// Runs the jobs on up to `worker_count()` threads and returns the results
/// in the order the jobs were given.
pub fn run_all<T: Send>(jobs: Vec<Job<T>>) -> Vec<T> {
    let n = jobs.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = worker_count().min(n);
    if workers <= 1 {
        return jobs.into_iter().map(|j| j()).collect();
    }
    let slots: Vec<Mutex<Option<Job<T>>>> =
        jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let job = slots[i].lock().unwrap().take().expect("job taken once");
                let out = job();
                *results[i].lock().unwrap() = Some(out);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("job ran"))
        .collect()
}
