use crate::error::{Error, Result};

/// Limits on exhaustive searches.
///
/// `search` bounds the size of any product space that is walked element by
/// element and the number of nodes a backtracking search may visit. `arrows`
/// bounds the number of arrows of a descent groupoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub search: u64,
    pub arrows: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            search: 10_000_000,
            arrows: 200,
        }
    }
}

impl Budget {
    pub fn with_search(mut self, search: u64) -> Self {
        self.search = search;
        self
    }

    pub fn with_arrows(mut self, arrows: u64) -> Self {
        self.arrows = arrows;
        self
    }

    pub(crate) fn check(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.search as u128 {
            return Err(Error::Budget {
                what,
                needed,
                limit: self.search,
            });
        }
        Ok(())
    }

    pub(crate) fn check_arrows(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.arrows as u128 {
            return Err(Error::Budget {
                what,
                needed,
                limit: self.arrows,
            });
        }
        Ok(())
    }

    pub(crate) fn counter(&self, what: &'static str) -> Counter {
        Counter {
            what,
            used: 0,
            limit: self.search,
        }
    }
}

/// Node counter for backtracking searches.
pub(crate) struct Counter {
    what: &'static str,
    used: u64,
    limit: u64,
}

impl Counter {
    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::Budget {
                what: self.what,
                needed: self.used as u128,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// Product of sizes, saturating instead of overflowing.
pub(crate) fn product<I: IntoIterator<Item = usize>>(sizes: I) -> u128 {
    sizes
        .into_iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s as u128))
}
