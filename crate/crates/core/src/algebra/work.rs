//! Per-thread work counters.
//!
//! Every `mxv` adds the number of stored matrix entries it visited and every
//! `apply_masked` adds the number of indices it updated. Counts land on the
//! thread that *called* the primitive, so concurrent tests do not interfere.

use std::cell::Cell;
use std::ops::Sub;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounters {
    pub nnz_visits: u64,
    pub apply_visits: u64,
}

impl Sub for WorkCounters {
    type Output = WorkCounters;

    fn sub(self, rhs: WorkCounters) -> WorkCounters {
        WorkCounters {
            nnz_visits: self.nnz_visits - rhs.nnz_visits,
            apply_visits: self.apply_visits - rhs.apply_visits,
        }
    }
}

thread_local! {
    static COUNTERS: Cell<WorkCounters> = const {
        Cell::new(WorkCounters { nnz_visits: 0, apply_visits: 0 })
    };
}

pub fn snapshot() -> WorkCounters {
    COUNTERS.with(Cell::get)
}

pub fn reset() {
    COUNTERS.with(|c| c.set(WorkCounters::default()));
}

pub(crate) fn add_nnz(n: u64) {
    COUNTERS.with(|c| {
        let mut w = c.get();
        w.nnz_visits += n;
        c.set(w);
    });
}

pub(crate) fn add_apply(n: u64) {
    COUNTERS.with(|c| {
        let mut w = c.get();
        w.apply_visits += n;
        c.set(w);
    });
}
