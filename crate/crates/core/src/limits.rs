//! Process-wide resource guards for Gröbner computations.
//!
//! Exceeding any guard aborts the computation with
//! [`Error::ResourceExceeded`](crate::Error::ResourceExceeded); a guard never
//! causes a wrong answer.

use std::cell::Cell;
use std::sync::RwLock;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest total degree of any basis element.
    pub max_degree: u32,
    /// Largest number of elements in an intermediate basis.
    pub max_basis: usize,
    /// Wall-clock budget of a single basis computation.
    pub timeout: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 30,
            max_basis: 5000,
            timeout: Duration::from_secs(60),
        }
    }
}

static LIMITS: RwLock<Option<Limits>> = RwLock::new(None);

thread_local! {
    static OVERRIDE: Cell<Option<Limits>> = const { Cell::new(None) };
}

/// The limits currently in force on this thread.
pub fn current() -> Limits {
    if let Some(l) = OVERRIDE.with(|o| o.get()) {
        return l;
    }
    LIMITS
        .read()
        .map(|l| l.unwrap_or_default())
        .unwrap_or_default()
}

/// Runs `f` with `limits` in force on the calling thread only.
pub fn with<T>(limits: Limits, f: impl FnOnce() -> T) -> T {
    let prev = OVERRIDE.with(|o| o.replace(Some(limits)));
    let out = f();
    OVERRIDE.with(|o| o.set(prev));
    out
}

/// Replaces the process-wide limits.
pub fn set(limits: Limits) {
    if let Ok(mut l) = LIMITS.write() {
        *l = Some(limits);
    }
}
