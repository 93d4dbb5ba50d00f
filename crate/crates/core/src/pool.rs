//! Fixed worker pool for propagation passes and bitmap reductions.

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

pub struct WorkerPool {
    workers: usize,
    pool: Option<ThreadPool>,
}

impl WorkerPool {
    /// With one worker everything runs on the calling thread.
    pub fn new(workers: usize) -> Result<WorkerPool> {
        if workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let pool = if workers > 1 {
            let p = ThreadPoolBuilder::new()
                .num_threads(workers)
                .thread_name(|i| format!("aspine-worker-{i}"))
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Some(p)
        } else {
            None
        };
        Ok(WorkerPool { workers, pool })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `f(worker_index)` once per worker and returns the results in index order.
    pub fn run<R, F>(&self, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync,
    {
        match &self.pool {
            None => vec![f(0)],
            Some(p) => p.broadcast(|ctx| f(ctx.index())),
        }
    }

    /// OR of equally sized bitmaps. Each worker reduces a strided share; the
    /// partial results are combined in worker order.
    pub fn or_reduce(&self, masks: &[&[u64]], words: usize) -> Vec<u64> {
        let w = self.workers;
        let partials = self.run(|k| {
            let mut acc = vec![0u64; words];
            for m in masks.iter().skip(k).step_by(w) {
                for (a, b) in acc.iter_mut().zip(m.iter()) {
                    *a |= *b;
                }
            }
            acc
        });
        let mut out = vec![0u64; words];
        for p in partials {
            for (a, b) in out.iter_mut().zip(p) {
                *a |= b;
            }
        }
        out
    }
}
