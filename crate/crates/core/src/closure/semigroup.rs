//! Finitely generated submonoids of `Z>=0`.

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest membership table we are willing to build.
const MAX_TABLE: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMonoid {
    gens: Vec<u64>,
    g: u64,
    conductor: u64,
    /// Membership for `0..conductor`.
    table: Vec<bool>,
}

impl ExponentMonoid {
    /// The monoid generated by `gens`; zeros and duplicates are dropped.
    pub fn new(gens: &[u64]) -> Result<ExponentMonoid> {
        let mut gens: Vec<u64> = gens.iter().copied().filter(|&a| a > 0).collect();
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() {
            return Err(Error::BadParameter("monoid needs a positive generator".into()));
        }
        let g = gens.iter().fold(0u64, |acc, &a| acc.gcd(&a));
        let (a1, ak) = (gens[0] / g, gens[gens.len() - 1] / g);
        // Every multiple of g from (a1 - 1)(ak - 1) g on is a sum of generators.
        let bound = (a1 - 1).checked_mul(ak - 1).and_then(|b| b.checked_mul(g)).filter(|&b| b <= MAX_TABLE).ok_or_else(|| Error::TooLarge { size: format!("{a1}*{ak}"), cap: MAX_TABLE })?;
        let len = bound as usize + 1;
        let mut table = vec![false; len];
        table[0] = true;
        for e in 1..len {
            table[e] = gens.iter().any(|&a| a as usize <= e && table[e - a as usize]);
        }
        let mut conductor = bound;
        while conductor >= g && table[(conductor - g) as usize] {
            conductor -= g;
        }
        table.truncate(conductor as usize);
        Ok(ExponentMonoid { gens, g, conductor, table })
    }

    pub fn gens(&self) -> &[u64] {
        &self.gens
    }

    /// `gcd` of the generators; the monoid sits in `g Z>=0`.
    pub fn gcd(&self) -> u64 {
        self.g
    }

    /// Smallest `c` with every multiple of `g` at or above `c` in the monoid.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn contains(&self, e: i64) -> bool {
        if e < 0 {
            return false;
        }
        let e = e as u64;
        if !e.is_multiple_of(self.g) {
            return false;
        }
        e >= self.conductor || self.table[e as usize]
    }

    /// Multiples of `g` below the conductor that are missing.
    pub fn gaps(&self) -> Vec<u64> {
        (0..self.conductor).step_by(self.g as usize).filter(|&e| !self.table[e as usize]).collect()
    }

    /// Elements below `limit`, in increasing order.
    pub fn elements_below(&self, limit: u64) -> Vec<u64> {
        (0..limit).filter(|&e| self.contains(e as i64)).collect()
    }

    pub fn is_saturated(&self) -> bool {
        self.conductor == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_three() {
        let s = ExponentMonoid::new(&[2, 3]).unwrap();
        assert_eq!(s.conductor(), 2);
        assert_eq!(s.gaps(), vec![1]);
        assert!(s.contains(0) && !s.contains(1) && s.contains(5) && !s.contains(-2));
    }

    #[test]
    fn non_primitive() {
        let s = ExponentMonoid::new(&[6, 9, 0, 6]).unwrap();
        assert_eq!(s.gcd(), 3);
        assert_eq!(s.gens(), &[6, 9]);
        assert_eq!(s.gaps(), vec![3]);
        assert_eq!(s.conductor(), 6);
        assert!(!s.contains(7));
        assert!(ExponentMonoid::new(&[4]).unwrap().is_saturated());
    }

    #[test]
    fn matches_brute_force() {
        for gens in [vec![5, 7], vec![4, 6, 9], vec![3, 10, 11], vec![7, 8, 9, 10]] {
            let s = ExponentMonoid::new(&gens).unwrap();
            let mut reach = [false; 200];
            reach[0] = true;
            for e in 1..200 {
                reach[e] = gens.iter().any(|&a| a <= e as u64 && reach[e - a as usize]);
            }
            for e in 0..200 {
                assert_eq!(s.contains(e as i64), reach[e], "{gens:?} {e}");
            }
        }
    }
}
