use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::combinatorics::{factorial, OutcomeSpace, DEFAULT_ENUMERATION_CAP};
use crate::math::permanent::permanent;
use crate::math::unitary::build_submatrix;
use crate::math::{OccupationList, UnitaryMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub value: Complex64,
}

impl Amplitude {
    pub fn probability(&self) -> f64 {
        self.value.norm_sqr()
    }
}

fn factorial_product(s: &OccupationList) -> Result<f64> {
    s.counts().iter().try_fold(1.0f64, |acc, &c| Ok(acc * factorial(c)? as f64))
}

/// Transition amplitude `perm(Lambda_S) / sqrt(prod input! * prod output!)`.
pub fn output_amplitude(
    lambda: &UnitaryMatrix,
    input: &OccupationList,
    output: &OccupationList,
) -> Result<Amplitude> {
    let sub = build_submatrix(lambda, input, output)?;
    let perm = permanent(&sub)?;
    let norm = (factorial_product(input)? * factorial_product(output)?).sqrt();
    Ok(Amplitude { value: perm / norm })
}

/// Output distribution over the full outcome space, in enumeration order.
#[derive(Clone, Debug)]
pub struct ProbabilityTable {
    outcomes: Vec<OccupationList>,
    probabilities: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(outcomes: Vec<OccupationList>, probabilities: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probabilities.len() {
            return Err(Error::LengthMismatch { left: outcomes.len(), right: probabilities.len() });
        }
        Ok(ProbabilityTable { outcomes, probabilities })
    }

    pub fn outcomes(&self) -> &[OccupationList] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationList, f64)> {
        self.outcomes.iter().zip(self.probabilities.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn get(&self, s: &OccupationList) -> Option<f64> {
        self.outcomes.binary_search_by(|o| s.cmp(o)).ok().map(|i| self.probabilities[i])
    }
}

pub fn full_distribution(lambda: &UnitaryMatrix, input: &OccupationList) -> Result<ProbabilityTable> {
    full_distribution_capped(lambda, input, DEFAULT_ENUMERATION_CAP)
}

pub fn full_distribution_capped(
    lambda: &UnitaryMatrix,
    input: &OccupationList,
    cap: u128,
) -> Result<ProbabilityTable> {
    let space = OutcomeSpace::new(lambda.dim(), input.total())?;
    let outcomes = space.enumerate(cap)?;
    let probabilities = outcomes
        .par_iter()
        .map(|s| output_amplitude(lambda, input, s).map(|a| a.probability()))
        .collect::<Result<Vec<f64>>>()?;
    ProbabilityTable::new(outcomes, probabilities)
}
