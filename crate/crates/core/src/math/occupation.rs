use std::fmt;

use crate::error::{Error, Result};

/// Photon counts per mode: an input/output Fock state or a measured snapshot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationList(Vec<u32>);

impl OccupationList {
    pub fn new(counts: Vec<u32>) -> Self {
        OccupationList(counts)
    }

    /// Builds the list and checks it against a declared shape.
    pub fn with_shape(counts: Vec<u32>, modes: usize, photons: u32) -> Result<Self> {
        let list = OccupationList(counts);
        list.check_shape(modes, photons)?;
        Ok(list)
    }

    /// Occupation with one photon in each of the given (zero-based) modes.
    /// Repeated modes accumulate.
    pub fn from_modes(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut counts = vec![0u32; modes];
        for &mode in occupied {
            let slot = counts.get_mut(mode).ok_or_else(|| {
                Error::InvalidOccupation(format!("mode index {mode} out of range for {modes} modes"))
            })?;
            *slot += 1;
        }
        Ok(OccupationList(counts))
    }

    pub fn check_shape(&self, modes: usize, photons: u32) -> Result<()> {
        if self.0.len() != modes {
            return Err(Error::LengthMismatch { left: self.0.len(), right: modes });
        }
        let total = self.total();
        if total != photons {
            return Err(Error::TotalMismatch { left: total, right: photons });
        }
        Ok(())
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Mode index of every photon, ascending, with repetition.
    pub fn photon_modes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(mode, &c)| std::iter::repeat_n(mode, c as usize))
            .collect()
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for OccupationList {
    fn from(counts: Vec<u32>) -> Self {
        OccupationList(counts)
    }
}

impl fmt::Display for OccupationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
