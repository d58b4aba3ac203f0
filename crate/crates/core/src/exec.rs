use alloc::vec::Vec;

/// Evaluates an indexed family of independent jobs.
///
/// Implementations may run jobs in any order or in parallel, but must return
/// results in index order. Every caller in this crate derives per-index seeds,
/// so results never depend on which executor is used.
pub trait Executor: Sync {
    fn map_indexed<T, F>(&self, len: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every job on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, len: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(job).collect()
    }
}
