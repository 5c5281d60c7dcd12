//! Wave function networks: snapshots are nodes, and two snapshots are linked
//! when their L1 distance is strictly below the activation radius `R`.
//!
//! Distances run on a packed thermometer code: a mode holding `c` photons sets
//! the first `c` of its `w` bits, where `w` is the largest count in the set.
//! For two such codes the Hamming distance equals the L1 distance of the
//! occupation lists, so each pair costs a few XOR/popcount word operations.

use crate::error::{Error, Result};
use crate::math::OccupationList;
use crate::samplers::SampleSet;

pub fn l1_distance(a: &OccupationList, b: &OccupationList) -> Result<u32> {
    if a.modes() != b.modes() {
        return Err(Error::LengthMismatch { left: a.modes(), right: b.modes() });
    }
    Ok(a.counts().iter().zip(b.counts()).map(|(&x, &y)| x.abs_diff(y)).sum())
}

/// Thermometer-coded snapshots, `words` 64-bit words each.
#[derive(Clone, Debug)]
pub struct PackedSamples {
    modes: usize,
    width: usize,
    words: usize,
    bits: Vec<u64>,
}

impl PackedSamples {
    /// `width` is the number of bits reserved per mode; every count pushed
    /// later must fit in it.
    pub fn with_width(modes: usize, width: usize) -> Self {
        let width = width.max(1);
        let words = (modes * width).div_ceil(64).max(1);
        PackedSamples { modes, width, words, bits: Vec::new() }
    }

    pub fn from_samples(samples: &[OccupationList]) -> Result<Self> {
        let modes = samples.first().map_or(0, OccupationList::modes);
        let width = samples.iter().map(OccupationList::max_count).max().unwrap_or(1) as usize;
        let mut packed = PackedSamples::with_width(modes, width);
        for s in samples {
            packed.push(s)?;
        }
        Ok(packed)
    }

    pub fn push(&mut self, s: &OccupationList) -> Result<()> {
        if s.modes() != self.modes {
            return Err(Error::LengthMismatch { left: s.modes(), right: self.modes });
        }
        if s.max_count() as usize > self.width {
            return Err(Error::InvalidArgument(format!(
                "mode count {} exceeds packing width {}",
                s.max_count(),
                self.width
            )));
        }
        let start = self.bits.len();
        self.bits.resize(start + self.words, 0);
        let row = &mut self.bits[start..];
        for (mode, &c) in s.counts().iter().enumerate() {
            let base = mode * self.width;
            for bit in base..base + c as usize {
                row[bit / 64] |= 1u64 << (bit % 64);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bits.len() / self.words
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> u32 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    /// Distances from sample `j` to every earlier sample, passed to `visit(i, d)`.
    #[inline]
    pub fn for_each_earlier(&self, j: usize, mut visit: impl FnMut(usize, u32)) {
        let target = self.row(j);
        match self.words {
            1 => {
                let t = target[0];
                for (i, &w) in self.bits[..j].iter().enumerate() {
                    visit(i, (w ^ t).count_ones());
                }
            }
            2 => {
                let (t0, t1) = (target[0], target[1]);
                for (i, w) in self.bits[..2 * j].chunks_exact(2).enumerate() {
                    visit(i, (w[0] ^ t0).count_ones() + (w[1] ^ t1).count_ones());
                }
            }
            words => {
                for (i, w) in self.bits[..words * j].chunks_exact(words).enumerate() {
                    visit(i, w.iter().zip(target).map(|(a, b)| (a ^ b).count_ones()).sum());
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfnGraph {
    radius: u32,
    degrees: Vec<u32>,
}

impl WfnGraph {
    pub fn from_degrees(radius: u32, degrees: Vec<u32>) -> Self {
        WfnGraph { radius, degrees }
    }

    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }
}

pub fn build_graph(samples: &SampleSet, radius: u32) -> Result<WfnGraph> {
    let packed = PackedSamples::from_samples(samples.samples())?;
    let mut degrees = vec![0u32; packed.len()];
    for j in 1..packed.len() {
        let mut own = 0u32;
        packed.for_each_earlier(j, |i, d| {
            if d < radius {
                degrees[i] += 1;
                own += 1;
            }
        });
        degrees[j] += own;
    }
    Ok(WfnGraph { radius, degrees })
}

/// Edges `(i, j)` with `i < j`, zero-based, in row-major order.
pub fn edges(samples: &SampleSet, radius: u32) -> Result<Vec<(usize, usize)>> {
    let packed = PackedSamples::from_samples(samples.samples())?;
    let mut out = Vec::new();
    for i in 0..packed.len() {
        for j in i + 1..packed.len() {
            if packed.distance(i, j) < radius {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeStats {
    pub n_samples: usize,
    pub mu: f64,
    /// Population standard deviation (divides by `N`).
    pub sigma: f64,
}

pub fn degree_stats(graph: &WfnGraph) -> Result<DegreeStats> {
    stats_of(graph.degrees())
}

pub(crate) fn stats_of(degrees: &[u32]) -> Result<DegreeStats> {
    if degrees.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = degrees.len() as f64;
    // Integer sums keep the statistic exact and independent of node order.
    let sum: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
    let sum_sq: u128 = degrees.iter().map(|&d| u128::from(d) * u128::from(d)).sum();
    let mu = sum as f64 / n;
    let len = degrees.len() as u128;
    let centered = len * sum_sq - u128::from(sum) * u128::from(sum);
    let sigma = (centered as f64).sqrt() / n;
    Ok(DegreeStats { n_samples: degrees.len(), mu, sigma })
}
