//! Variable names.
//!
//! A [`Name`] is a base identifier plus an integer stamp. Names read from
//! concrete syntax as free variables carry stamp `0`; every binder created by
//! the parser or by a transformation draws a new stamp from a process-wide
//! monotone counter, so two binders never share a name unless one was copied
//! from the other.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

static NEXT_STAMP: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    base: Arc<str>,
    stamp: u64,
}

impl Name {
    /// A name with stamp `0`, as used for free variables in source text.
    pub fn global(base: &str) -> Self {
        Name {
            base: Arc::from(base),
            stamp: 0,
        }
    }

    /// A name whose stamp has never been handed out before.
    pub fn fresh(base: &str) -> Self {
        Name {
            base: Arc::from(base),
            stamp: NEXT_STAMP.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// A fresh name sharing this name's base.
    pub fn refresh(&self) -> Self {
        Name {
            base: self.base.clone(),
            stamp: NEXT_STAMP.fetch_add(1, Ordering::Relaxed),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn stamp(&self) -> u64 {
        self.stamp
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stamp == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}#{}", self.base, self.stamp)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
