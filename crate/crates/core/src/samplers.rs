//! Sample streams from the exact boson sampling distribution and the three
//! classically simulatable mock-ups (distinguishable particles, mean field,
//! uniform).
//!
//! Every sampler produces *raw* draws from its law; [`Sampler::collect`]
//! turns raw draws into a [`SampleSet`] of distinct snapshots. Duplicates are
//! discarded but counted, and collision-free sampling rejects draws with more
//! than one photon in a mode (the uniform sampler draws collision-free
//! patterns directly instead).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{full_distribution, OccupationList, OutcomeSpace, ProbabilityTable, UnitaryMatrix};

/// Raw draws allowed per requested distinct sample before giving up.
pub const STARVATION_FACTOR: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SamplerKind {
    Boson,
    Distinguishable,
    MeanField,
    Uniform,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 4] =
        [SamplerKind::Boson, SamplerKind::Distinguishable, SamplerKind::MeanField, SamplerKind::Uniform];

    pub fn label(self) -> &'static str {
        match self {
            SamplerKind::Boson => "Boson",
            SamplerKind::Distinguishable => "Distinguishable",
            SamplerKind::MeanField => "MeanField",
            SamplerKind::Uniform => "Uniform",
        }
    }

    pub fn needs_unitary(self) -> bool {
        self != SamplerKind::Uniform
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "boson" => Ok(SamplerKind::Boson),
            "distinguishable" | "dist" => Ok(SamplerKind::Distinguishable),
            "meanfield" | "mf" => Ok(SamplerKind::MeanField),
            "uniform" => Ok(SamplerKind::Uniform),
            _ => Err(Error::InvalidArgument(format!("unknown sampler `{s}`"))),
        }
    }
}

/// Single photons in the first `n` of `m` modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputState {
    occupation: OccupationList,
}

impl InputState {
    pub fn new(modes: usize, photons: u32) -> Result<Self> {
        if photons == 0 || photons as usize > modes {
            return Err(Error::InvalidArgument(format!(
                "input state needs 1 <= n <= m, got n = {photons}, m = {modes}"
            )));
        }
        let counts = (0..modes).map(|j| u32::from(j < photons as usize)).collect();
        Ok(InputState { occupation: OccupationList::new(counts) })
    }

    pub fn modes(&self) -> usize {
        self.occupation.modes()
    }

    pub fn photons(&self) -> u32 {
        self.occupation.total()
    }

    pub fn occupation(&self) -> &OccupationList {
        &self.occupation
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleMeta {
    pub modes: usize,
    pub photons: u32,
    pub label: String,
    pub unitary_hash: Option<String>,
    pub seed: Option<u64>,
    pub collision_free: bool,
    /// Accepted draws including duplicates.
    pub raw_draw_count: u64,
}

impl SampleMeta {
    pub fn new(modes: usize, photons: u32, label: impl Into<String>) -> Self {
        SampleMeta {
            modes,
            photons,
            label: label.into(),
            unitary_hash: None,
            seed: None,
            collision_free: false,
            raw_draw_count: 0,
        }
    }
}

/// Distinct snapshots in draw order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    samples: Vec<OccupationList>,
    meta: SampleMeta,
}

impl SampleSet {
    pub fn new(samples: Vec<OccupationList>, meta: SampleMeta) -> Result<Self> {
        let mut seen = HashSet::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            s.check_shape(meta.modes, meta.photons)?;
            if meta.collision_free && !s.is_collision_free() {
                return Err(Error::InvalidOccupation(format!("sample {i} {s} has a collision")));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidOccupation(format!("sample {i} {s} is a duplicate")));
            }
        }
        Ok(SampleSet { samples, meta })
    }

    /// Keeps the first occurrence of each snapshot; returns the number dropped.
    pub fn dedup_from(samples: Vec<OccupationList>, meta: SampleMeta) -> Result<(Self, usize)> {
        let before = samples.len();
        let mut seen = HashSet::with_capacity(samples.len());
        let kept: Vec<OccupationList> = samples.into_iter().filter(|s| seen.insert(s.clone())).collect();
        let dropped = before - kept.len();
        Ok((SampleSet::new(kept, meta)?, dropped))
    }

    pub fn samples(&self) -> &[OccupationList] {
        &self.samples
    }

    pub fn meta(&self) -> &SampleMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The first `len` samples, with the same metadata.
    pub fn prefix(&self, len: usize) -> SampleSet {
        SampleSet { samples: self.samples[..len.min(self.samples.len())].to_vec(), meta: self.meta.clone() }
    }

    /// Consecutive chunks of `chunk` samples; a trailing partial chunk is dropped.
    pub fn chunks(&self, chunk: usize) -> Vec<SampleSet> {
        if chunk == 0 {
            return Vec::new();
        }
        self.samples
            .chunks_exact(chunk)
            .map(|c| SampleSet { samples: c.to_vec(), meta: self.meta.clone() })
            .collect()
    }
}

/// A sampler with its per-unitary precomputation done.
#[derive(Clone, Debug)]
pub enum Sampler {
    Boson { table: ProbabilityTable, index: WeightedIndex<f64>, unitary_hash: String },
    Distinguishable { routes: Vec<WeightedIndex<f64>>, modes: usize, unitary_hash: String },
    MeanField { lambda: UnitaryMatrix, photons: usize, unitary_hash: String },
    Uniform { space: OutcomeSpace },
}

impl Sampler {
    pub fn prepare(kind: SamplerKind, lambda: Option<&UnitaryMatrix>, input: &InputState) -> Result<Self> {
        if kind == SamplerKind::Uniform {
            return Sampler::uniform(input.modes(), input.photons());
        }
        let lambda = lambda
            .ok_or_else(|| Error::InvalidArgument(format!("{kind} sampler needs an interferometer unitary")))?;
        if lambda.dim() != input.modes() {
            return Err(Error::LengthMismatch { left: lambda.dim(), right: input.modes() });
        }
        match kind {
            SamplerKind::Boson => Sampler::boson(lambda, input),
            SamplerKind::Distinguishable => Sampler::distinguishable(lambda, input),
            SamplerKind::MeanField => Ok(Sampler::MeanField {
                lambda: lambda.clone(),
                photons: input.photons() as usize,
                unitary_hash: lambda.fingerprint(),
            }),
            SamplerKind::Uniform => unreachable!(),
        }
    }

    pub fn boson(lambda: &UnitaryMatrix, input: &InputState) -> Result<Self> {
        let table = full_distribution(lambda, input.occupation())?;
        let index = WeightedIndex::new(table.probabilities().iter().copied())
            .map_err(|e| Error::InvalidArgument(format!("degenerate output distribution: {e}")))?;
        Ok(Sampler::Boson { table, index, unitary_hash: lambda.fingerprint() })
    }

    pub fn distinguishable(lambda: &UnitaryMatrix, input: &InputState) -> Result<Self> {
        let m = lambda.dim();
        let routes = input
            .occupation()
            .photon_modes()
            .into_iter()
            .map(|j| {
                WeightedIndex::new((0..m).map(|k| lambda.get(k, j).norm_sqr()))
                    .map_err(|e| Error::InvalidArgument(format!("column {j} has no weight: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sampler::Distinguishable { routes, modes: m, unitary_hash: lambda.fingerprint() })
    }

    pub fn uniform(modes: usize, photons: u32) -> Result<Self> {
        Ok(Sampler::Uniform { space: OutcomeSpace::new(modes, photons)? })
    }

    pub fn kind(&self) -> SamplerKind {
        match self {
            Sampler::Boson { .. } => SamplerKind::Boson,
            Sampler::Distinguishable { .. } => SamplerKind::Distinguishable,
            Sampler::MeanField { .. } => SamplerKind::MeanField,
            Sampler::Uniform { .. } => SamplerKind::Uniform,
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            Sampler::Boson { table, .. } => table.outcomes()[0].modes(),
            Sampler::Distinguishable { modes, .. } => *modes,
            Sampler::MeanField { lambda, .. } => lambda.dim(),
            Sampler::Uniform { space } => space.modes(),
        }
    }

    pub fn photons(&self) -> u32 {
        match self {
            Sampler::Boson { table, .. } => table.outcomes()[0].total(),
            Sampler::Distinguishable { routes, .. } => routes.len() as u32,
            Sampler::MeanField { photons, .. } => *photons as u32,
            Sampler::Uniform { space } => space.photons(),
        }
    }

    fn unitary_hash(&self) -> Option<String> {
        match self {
            Sampler::Boson { unitary_hash, .. }
            | Sampler::Distinguishable { unitary_hash, .. }
            | Sampler::MeanField { unitary_hash, .. } => Some(unitary_hash.clone()),
            Sampler::Uniform { .. } => None,
        }
    }

    /// One raw draw from the sampler's unrestricted law.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> OccupationList {
        match self {
            Sampler::Boson { table, index, .. } => table.outcomes()[index.sample(rng)].clone(),
            Sampler::Distinguishable { routes, modes, .. } => {
                let mut counts = vec![0u32; *modes];
                for route in routes {
                    counts[route.sample(rng)] += 1;
                }
                OccupationList::new(counts)
            }
            Sampler::MeanField { lambda, photons, .. } => {
                let weights = mean_field_weights(lambda, *photons, rng);
                let cdf: Vec<f64> = weights
                    .iter()
                    .scan(0.0, |acc, &w| {
                        *acc += w;
                        Some(*acc)
                    })
                    .collect();
                let total = *cdf.last().expect("at least one mode");
                let mut counts = vec![0u32; lambda.dim()];
                for _ in 0..*photons {
                    let u = rng.random::<f64>() * total;
                    let k = cdf.partition_point(|&c| c <= u).min(counts.len() - 1);
                    counts[k] += 1;
                }
                OccupationList::new(counts)
            }
            Sampler::Uniform { space } => {
                let rank = rng.random_range(0..space.size());
                space.unrank(rank).expect("rank drawn inside the outcome space")
            }
        }
    }

    fn draw_collision_free<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<OccupationList> {
        match self {
            Sampler::Uniform { space } => {
                let modes = rand::seq::index::sample(rng, space.modes(), space.photons() as usize).into_vec();
                Some(OccupationList::from_modes(space.modes(), &modes).expect("modes in range"))
            }
            _ => Some(self.draw(rng)).filter(OccupationList::is_collision_free),
        }
    }

    /// Upper bound on the number of distinct outcomes reachable, when cheap to know.
    fn support_size(&self, collision_free: bool) -> Option<u128> {
        match self {
            Sampler::Boson { table, .. } => Some(
                table.iter().filter(|(s, p)| *p > 0.0 && (!collision_free || s.is_collision_free())).count()
                    as u128,
            ),
            Sampler::Uniform { space } => {
                Some(if collision_free { space.collision_free_size() } else { space.size() })
            }
            _ => None,
        }
    }

    /// Draws until `count` distinct samples are collected.
    pub fn collect(&self, count: usize, seed: u64, collision_free: bool) -> Result<SampleSet> {
        let mut meta = SampleMeta::new(self.modes(), self.photons(), self.kind().label());
        meta.unitary_hash = self.unitary_hash();
        meta.seed = Some(seed);
        meta.collision_free = collision_free;

        if let Some(support) = self.support_size(collision_free) {
            if (count as u128) > support {
                return Err(Error::Starvation { requested: count, collected: support as usize, draws: 0 });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = STARVATION_FACTOR.saturating_mul(count as u64);
        let mut seen = HashSet::with_capacity(count);
        let mut samples = Vec::with_capacity(count);
        let mut attempts = 0u64;
        let mut accepted = 0u64;
        while samples.len() < count {
            if attempts >= budget {
                return Err(Error::Starvation { requested: count, collected: samples.len(), draws: attempts });
            }
            attempts += 1;
            let draw = if collision_free { self.draw_collision_free(&mut rng) } else { Some(self.draw(&mut rng)) };
            let Some(s) = draw else { continue };
            accepted += 1;
            if seen.insert(s.clone()) {
                samples.push(s);
            }
        }
        meta.raw_draw_count = accepted;
        SampleSet::new(samples, meta)
    }
}

/// Single-particle output law `q_k = |sum_j e^{i theta_j} Lambda_kj|^2 / n`
/// for one draw of uniform input phases over the first `photons` modes.
pub fn mean_field_weights<R: Rng + ?Sized>(lambda: &UnitaryMatrix, photons: usize, rng: &mut R) -> Vec<f64> {
    let phases: Vec<Complex64> = (0..photons)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    mean_field_weights_for_phases(lambda, &phases)
}

pub fn mean_field_weights_for_phases(lambda: &UnitaryMatrix, phases: &[Complex64]) -> Vec<f64> {
    let n = phases.len() as f64;
    (0..lambda.dim())
        .map(|k| {
            let amp: Complex64 = phases.iter().enumerate().map(|(j, &p)| p * lambda.get(k, j)).sum();
            amp.norm_sqr() / n
        })
        .collect()
}

pub fn boson_sample(
    lambda: &UnitaryMatrix,
    input: &InputState,
    count: usize,
    seed: u64,
    collision_free: bool,
) -> Result<SampleSet> {
    Sampler::boson(lambda, input)?.collect(count, seed, collision_free)
}

pub fn distinguishable_sample(
    lambda: &UnitaryMatrix,
    input: &InputState,
    count: usize,
    seed: u64,
    collision_free: bool,
) -> Result<SampleSet> {
    Sampler::distinguishable(lambda, input)?.collect(count, seed, collision_free)
}

pub fn mean_field_sample(
    lambda: &UnitaryMatrix,
    input: &InputState,
    count: usize,
    seed: u64,
    collision_free: bool,
) -> Result<SampleSet> {
    Sampler::prepare(SamplerKind::MeanField, Some(lambda), input)?.collect(count, seed, collision_free)
}

pub fn uniform_sample(modes: usize, photons: u32, count: usize, seed: u64, collision_free: bool) -> Result<SampleSet> {
    Sampler::uniform(modes, photons)?.collect(count, seed, collision_free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::haar_random_unitary;
    use ndarray::array;
    use std::collections::HashMap;

    fn hom() -> UnitaryMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryMatrix::new(array![
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]
        ])
        .unwrap()
    }

    fn occ(c: &[u32]) -> OccupationList {
        OccupationList::new(c.to_vec())
    }

    fn frequencies(sampler: &Sampler, draws: usize, seed: u64) -> HashMap<OccupationList, f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut freq = HashMap::new();
        for _ in 0..draws {
            *freq.entry(sampler.draw(&mut rng)).or_insert(0.0) += 1.0 / draws as f64;
        }
        freq
    }

    #[test]
    fn sampler_kind_parsing() {
        assert_eq!("mean-field".parse::<SamplerKind>().unwrap(), SamplerKind::MeanField);
        assert_eq!("Boson".parse::<SamplerKind>().unwrap(), SamplerKind::Boson);
        assert_eq!("dist".parse::<SamplerKind>().unwrap(), SamplerKind::Distinguishable);
        assert!("gaussian".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn input_state_shape() {
        let s = InputState::new(5, 2).unwrap();
        assert_eq!(s.occupation().counts(), &[1, 1, 0, 0, 0]);
        assert!(InputState::new(2, 3).is_err());
        assert!(InputState::new(2, 0).is_err());
    }

    #[test]
    fn hom_boson_never_coincides() {
        let input = InputState::new(2, 2).unwrap();
        let set = boson_sample(&hom(), &input, 2, 5, false).unwrap();
        let mut got = set.samples().to_vec();
        got.sort();
        assert_eq!(got, vec![occ(&[0, 2]), occ(&[2, 0])]);
        assert!(set.meta().raw_draw_count >= 2);
    }

    #[test]
    fn identity_boson_starves() {
        let input = InputState::new(3, 2).unwrap();
        let err = boson_sample(&UnitaryMatrix::identity(3), &input, 2, 1, false).unwrap_err();
        assert!(matches!(err, Error::Starvation { .. }));
        // Without the support pre-check the guard trips after the draw budget.
        let err = distinguishable_sample(&UnitaryMatrix::identity(3), &input, 2, 1, false).unwrap_err();
        assert!(matches!(err, Error::Starvation { draws: 2000, .. }));
    }

    #[test]
    fn distinguishable_hom_law() {
        let input = InputState::new(2, 2).unwrap();
        let sampler = Sampler::distinguishable(&hom(), &input).unwrap();
        let f = frequencies(&sampler, 100_000, 3);
        assert!((f[&occ(&[2, 0])] - 0.25).abs() < 0.01);
        assert!((f[&occ(&[1, 1])] - 0.5).abs() < 0.01);
        assert!((f[&occ(&[0, 2])] - 0.25).abs() < 0.01);
    }

    #[test]
    fn distinguishable_identity_returns_input() {
        let input = InputState::new(4, 2).unwrap();
        let sampler = Sampler::distinguishable(&UnitaryMatrix::identity(4), &input).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(&sampler.draw(&mut rng), input.occupation());
        }
    }

    #[test]
    fn mean_field_weights_normalized() {
        let u = haar_random_unitary(9, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let q = mean_field_weights(&u, 3, &mut rng);
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_field_single_photon_is_column_law() {
        let u = haar_random_unitary(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = mean_field_weights(&u, 1, &mut rng);
        for (k, qk) in q.iter().enumerate() {
            assert!((qk - u.get(k, 0).norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_frequencies() {
        let sampler = Sampler::uniform(3, 2).unwrap();
        let f = frequencies(&sampler, 100_000, 8);
        assert_eq!(f.len(), 6);
        for p in f.values() {
            assert!((p - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn uniform_exhausts_small_space() {
        let set = uniform_sample(2, 1, 2, 4, false).unwrap();
        let mut got = set.samples().to_vec();
        got.sort();
        assert_eq!(got, vec![occ(&[0, 1]), occ(&[1, 0])]);
        assert!(matches!(uniform_sample(2, 1, 3, 4, false), Err(Error::Starvation { .. })));
        assert!(matches!(uniform_sample(3, 2, 4, 4, true), Err(Error::Starvation { .. })));
    }

    #[test]
    fn collision_free_sets() {
        let u = haar_random_unitary(9, 12).unwrap();
        let input = InputState::new(9, 3).unwrap();
        for kind in SamplerKind::ALL {
            let sampler = Sampler::prepare(kind, Some(&u), &input).unwrap();
            let set = sampler.collect(40, 77, true).unwrap();
            assert_eq!(set.len(), 40);
            assert!(set.meta().collision_free);
            assert!(set.samples().iter().all(OccupationList::is_collision_free), "{kind}");
        }
    }

    #[test]
    fn collect_is_deterministic_and_distinct() {
        let u = haar_random_unitary(9, 12).unwrap();
        let input = InputState::new(9, 3).unwrap();
        for kind in SamplerKind::ALL {
            let sampler = Sampler::prepare(kind, Some(&u), &input).unwrap();
            let a = sampler.collect(60, 5, false).unwrap();
            let b = sampler.collect(60, 5, false).unwrap();
            assert_eq!(a, b);
            let distinct: HashSet<_> = a.samples().iter().collect();
            assert_eq!(distinct.len(), 60);
            assert!(a.meta().raw_draw_count >= 60);
        }
    }

    #[test]
    fn sample_set_rejects_duplicates_and_collisions() {
        let meta = SampleMeta::new(3, 2, "test");
        assert!(SampleSet::new(vec![occ(&[1, 1, 0]), occ(&[1, 1, 0])], meta.clone()).is_err());
        let (set, dropped) = SampleSet::dedup_from(vec![occ(&[1, 1, 0]), occ(&[2, 0, 0]), occ(&[1, 1, 0])], meta.clone()).unwrap();
        assert_eq!((set.len(), dropped), (2, 1));
        let mut cf = meta;
        cf.collision_free = true;
        assert!(SampleSet::new(vec![occ(&[2, 0, 0])], cf).is_err());
    }

    #[test]
    fn chunks_and_prefix() {
        let set = uniform_sample(6, 2, 10, 1, false).unwrap();
        assert_eq!(set.prefix(4).samples(), &set.samples()[..4]);
        let chunks = set.chunks(3);
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[1].samples(), &set.samples()[3..6]);
    }
}
