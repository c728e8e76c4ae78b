//! Fixed-size worker pool that hands results back in input order.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::thread;

use crossbeam_channel::unbounded;

/// Default worker count: the number of available processors.
pub fn default_jobs() -> usize {
    thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

/// Applies `f` to every item on `jobs` workers (0 means [`default_jobs`]).
///
/// `emit` runs on the calling thread, once per item, in input order, so it
/// can own a single writer. Results are also returned in order.
pub fn map_ordered<T, R, F, E>(items: &[T], jobs: usize, f: F, mut emit: E) -> Vec<R>
where
    T: Sync,
    R: Send + Clone,
    F: Fn(&T) -> R + Sync,
    E: FnMut(usize, &R),
{
    let jobs = if jobs == 0 { default_jobs() } else { jobs }.min(items.len()).max(1);
    let (task_tx, task_rx) = unbounded::<usize>();
    let (done_tx, done_rx) = unbounded::<(usize, R)>();
    for i in 0..items.len() {
        task_tx.send(i).expect("task queue open");
    }
    drop(task_tx);

    let mut out = Vec::with_capacity(items.len());
    thread::scope(|s| {
        for _ in 0..jobs {
            let (task_rx, done_tx, f) = (task_rx.clone(), done_tx.clone(), &f);
            s.spawn(move || {
                for i in task_rx {
                    if done_tx.send((i, f(&items[i]))).is_err() {
                        break;
                    }
                }
            });
        }
        drop(done_tx);

        let mut pending = BTreeMap::new();
        for (i, r) in done_rx {
            pending.insert(i, r);
            while let Some(r) = pending.remove(&out.len()) {
                emit(out.len(), &r);
                out.push(r);
            }
        }
    });
    debug_assert_eq!(out.len(), items.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..200).collect();
        let mut seen = Vec::new();
        let out = map_ordered(
            &items,
            8,
            |x| {
                thread::sleep(Duration::from_micros((200 - x) * 10));
                x * x
            },
            |i, r| seen.push((i, *r)),
        );
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        assert_eq!(seen, out.iter().copied().enumerate().collect::<Vec<_>>());
    }

    #[test]
    fn empty_and_single_worker() {
        let out: Vec<u8> = map_ordered(&[] as &[u8], 0, |x| *x, |_, _| {});
        assert!(out.is_empty());
        assert_eq!(map_ordered(&[1, 2, 3], 1, |x| x + 1, |_, _| {}), vec![2, 3, 4]);
    }
}
