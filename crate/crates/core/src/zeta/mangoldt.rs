use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TABLE_LIMIT: usize = 1_000_000;

/// `n = p^k` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u32,
    pub exponent: u32,
}

impl PrimePower {
    pub fn mangoldt(&self) -> f64 {
        (self.prime as f64).ln()
    }
}

/// Prime-power descriptors for every `n <= limit`, built once by a sieve.
#[derive(Debug, Clone)]
pub struct MangoldtTable {
    limit: usize,
    powers: Vec<Option<PrimePower>>,
}

impl MangoldtTable {
    pub fn new(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidInput("table limit must be positive".into()));
        }
        let mut composite = vec![false; limit + 1];
        let mut powers = vec![None; limit + 1];
        for p in 2..=limit {
            if composite[p] {
                continue;
            }
            let mut multiple = p.saturating_mul(p);
            while multiple <= limit {
                composite[multiple] = true;
                multiple += p;
            }
            let mut pk = p;
            let mut k = 1;
            loop {
                powers[pk] = Some(PrimePower {
                    prime: p as u32,
                    exponent: k,
                });
                match pk.checked_mul(p) {
                    Some(next) if next <= limit => {
                        pk = next;
                        k += 1;
                    }
                    _ => break,
                }
            }
        }
        Ok(Self { limit, powers })
    }

    /// The process-wide table with [`DEFAULT_TABLE_LIMIT`] entries.
    pub fn shared() -> &'static MangoldtTable {
        static TABLE: OnceLock<MangoldtTable> = OnceLock::new();
        TABLE.get_or_init(|| MangoldtTable::new(DEFAULT_TABLE_LIMIT).expect("positive limit"))
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn prime_power(&self, n: usize) -> Option<PrimePower> {
        self.powers.get(n).copied().flatten()
    }

    pub fn lambda(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidInput("Lambda(0) is undefined".into()));
        }
        if n > self.limit {
            return mangoldt(n as u64);
        }
        Ok(self.prime_power(n).map_or(0.0, |pp| pp.mangoldt()))
    }

    /// `(n, p^k descriptor)` for all prime powers up to `bound`.
    pub fn prime_powers_up_to(&self, bound: usize) -> impl Iterator<Item = (usize, PrimePower)> + '_ {
        let bound = bound.min(self.limit);
        (2..=bound).filter_map(move |n| self.powers[n].map(|pp| (n, pp)))
    }
}

/// von Mangoldt function by trial division; no table needed.
pub fn mangoldt(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("Lambda(0) is undefined".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = n;
            while m.is_multiple_of(p) {
                m /= p;
            }
            return Ok(if m == 1 { (p as f64).ln() } else { 0.0 });
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok((n as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn spot_values() {
        assert!((mangoldt(8).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(mangoldt(6).unwrap(), 0.0);
        assert!((mangoldt(7).unwrap() - 7f64.ln()).abs() < 1e-15);
        assert_eq!(mangoldt(1).unwrap(), 0.0);
        assert!(mangoldt(0).is_err());
    }

    #[test]
    fn table_agrees_with_trial_division() {
        let table = MangoldtTable::new(5000).unwrap();
        for n in 1..=5000usize {
            assert_eq!(table.lambda(n).unwrap(), mangoldt(n as u64).unwrap(), "n = {n}");
        }
        assert_eq!(table.prime_power(1024), Some(PrimePower { prime: 2, exponent: 10 }));
        assert_eq!(table.prime_power(12), None);
    }

    #[test]
    fn divisor_sum_is_log_n() {
        let limit = 10_000;
        let table = MangoldtTable::new(limit).unwrap();
        let mut sums = vec![0.0f64; limit + 1];
        for d in 1..=limit {
            let l = table.lambda(d).unwrap();
            if l == 0.0 {
                continue;
            }
            let mut m = d;
            while m <= limit {
                sums[m] += l;
                m += d;
            }
        }
        for (n, sum) in sums.iter().enumerate().take(limit + 1).skip(1) {
            assert!((sum - (n as f64).ln()).abs() <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn zero_limit_rejected() {
        assert!(MangoldtTable::new(0).is_err());
    }
}
