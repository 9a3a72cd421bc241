//! Enumeration budget guard.
//!
//! Several operations enumerate all q^n monic polynomials of degree n (or
//! sieve that range for primes). The budget refuses enumerations above a
//! configurable element cap instead of silently truncating.

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Cap on the number of field/polynomial elements an enumeration may touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self::from_env()
    }
}

impl Budget {
    pub fn new(max_elements: u64) -> Self {
        Budget { max_elements }
    }

    /// Default cap, overridable through the `HYPERZETA_BUDGET` environment variable.
    pub fn from_env() -> Self {
        let max = std::env::var("HYPERZETA_BUDGET")
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Budget { max_elements: max }
    }

    /// Check that an enumeration of q^n elements fits.
    pub fn check_pow(&self, q: u64, n: u32) -> Result<u64> {
        let mut acc: u128 = 1;
        for _ in 0..n {
            acc *= q as u128;
            if acc > self.max_elements as u128 {
                return Err(Error::BudgetExceeded {
                    needed: acc,
                    budget: self.max_elements,
                });
            }
        }
        Ok(acc as u64)
    }

    pub fn check(&self, needed: u128) -> Result<u64> {
        if needed > self.max_elements as u128 {
            return Err(Error::BudgetExceeded {
                needed,
                budget: self.max_elements,
            });
        }
        Ok(needed as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_check_refuses_overflow() {
        let b = Budget::new(1000);
        assert_eq!(b.check_pow(3, 6).unwrap(), 729);
        assert!(b.check_pow(3, 7).is_err());
        // would overflow u64 without the early exit
        assert!(b.check_pow(10, 30).is_err());
    }
}
