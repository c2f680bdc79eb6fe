//! Parallel Landfall rounds on scoped threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use cook_core::cook::{BatchRunner, LandfallResult};

/// Runs each round's jobs on up to `threads` worker threads.
#[derive(Clone, Copy, Debug)]
pub struct Threads(pub usize);

impl BatchRunner for Threads {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> LandfallResult + Sync)) -> Vec<LandfallResult> {
        let workers = self.0.max(1).min(jobs);
        if workers <= 1 {
            return (0..jobs).map(job).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<LandfallResult>>> = Mutex::new((0..jobs).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= jobs {
                            break;
                        }
                        done.push((i, job(i)));
                    }
                    let mut slots = slots.lock().expect("worker panicked");
                    for (i, r) in done {
                        slots[i] = Some(r);
                    }
                });
            }
        });
        slots.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every job ran")).collect()
    }
}
