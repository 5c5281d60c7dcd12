//! Outcome space of `n` photons in `m` modes: exact counting, lexicographic
//! enumeration, and a rank/unrank bijection consistent with that order.
//!
//! Enumeration order is lexicographic descending in the count vector, so for
//! `m = 3, n = 2` the sequence is `(2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2)`.

use crate::error::{Error, Result};
use crate::math::OccupationList;

/// Largest outcome space that may be materialized by brute force.
pub const DEFAULT_ENUMERATION_CAP: u128 = 5_000_000;

/// Exact binomial coefficient. Errors instead of wrapping on overflow.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul(u128::from(n - i))
            .ok_or(Error::Overflow("binomial coefficient"))?
            / u128::from(i + 1);
    }
    Ok(acc)
}

/// Number of ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(parts: usize, total: u32) -> Result<u128> {
    if parts == 0 {
        return Ok(u128::from(total == 0));
    }
    binomial(u64::from(total) + parts as u64 - 1, parts as u64 - 1)
}

/// Exact factorial for `k <= 20` (the largest that fits in `u64`).
pub fn factorial(k: u32) -> Result<u64> {
    (1..=u64::from(k)).try_fold(1u64, |acc, x| acc.checked_mul(x)).ok_or(Error::Overflow("factorial"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutcomeSpace {
    modes: usize,
    photons: u32,
    size: u128,
}

impl OutcomeSpace {
    pub fn new(modes: usize, photons: u32) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("outcome space needs at least one mode".into()));
        }
        let size = compositions(modes, photons)?;
        Ok(OutcomeSpace { modes, photons, size })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    /// `C(m + n - 1, n)`.
    pub fn size(&self) -> u128 {
        self.size
    }

    /// `C(m, n)`: outcomes with at most one photon per mode.
    pub fn collision_free_size(&self) -> u128 {
        binomial(self.modes as u64, u64::from(self.photons)).unwrap_or(u128::MAX)
    }

    pub fn enumerate(&self, cap: u128) -> Result<Vec<OccupationList>> {
        if self.size > cap {
            return Err(Error::Capacity { what: "outcome enumeration", size: self.size, cap });
        }
        let mut out = Vec::with_capacity(self.size as usize);
        let mut counts = vec![0u32; self.modes];
        fill(&mut counts, 0, self.photons, &mut out);
        Ok(out)
    }

    /// Position of `s` in enumeration order.
    pub fn rank(&self, s: &OccupationList) -> Result<u128> {
        s.check_shape(self.modes, self.photons)?;
        let counts = s.counts();
        let mut remaining = self.photons;
        let mut rank = 0u128;
        for (pos, &c) in counts.iter().enumerate().take(self.modes - 1) {
            let tail = self.modes - pos - 1;
            for v in (c + 1)..=remaining {
                rank += compositions(tail, remaining - v)?;
            }
            remaining -= c;
        }
        Ok(rank)
    }

    /// Inverse of [`OutcomeSpace::rank`].
    pub fn unrank(&self, mut rank: u128) -> Result<OccupationList> {
        if rank >= self.size {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} outside outcome space of size {}",
                self.size
            )));
        }
        let mut counts = vec![0u32; self.modes];
        let mut remaining = self.photons;
        for (pos, slot) in counts.iter_mut().enumerate().take(self.modes - 1) {
            let tail = self.modes - pos - 1;
            let mut v = remaining;
            loop {
                let block = compositions(tail, remaining - v)?;
                if rank < block {
                    break;
                }
                rank -= block;
                v -= 1;
            }
            *slot = v;
            remaining -= v;
        }
        counts[self.modes - 1] = remaining;
        Ok(OccupationList::new(counts))
    }
}

fn fill(counts: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<OccupationList>) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        out.push(OccupationList::new(counts.to_vec()));
        counts[pos] = 0;
        return;
    }
    for v in (0..=remaining).rev() {
        counts[pos] = v;
        fill(counts, pos + 1, remaining - v, out);
    }
    counts[pos] = 0;
}

/// All outcomes of `photons` photons in `modes` modes under the default cap.
pub fn enumerate_outcomes(modes: usize, photons: u32) -> Result<Vec<OccupationList>> {
    OutcomeSpace::new(modes, photons)?.enumerate(DEFAULT_ENUMERATION_CAP)
}
