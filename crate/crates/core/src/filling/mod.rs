//! Filling curves: how the WFN degree mean and spread grow with the number of
//! collected samples, and the fingerprints fitted to them.

mod fit;
pub mod lsq;
mod radius;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::{haar_random_unitary, UnitaryMatrix};
use crate::samplers::{InputState, SampleSet, Sampler, SamplerKind};
use crate::seed::{sampling_seed, unitary_seed};
use crate::wfn::{stats_of, DegreeStats, PackedSamples};

pub use fit::{fit_curves, fit_iterations, FitFingerprint, IterationFit, Param};
pub use radius::{default_radius_grid, optimize_radius, RadiusScan, RadiusScanRow};

pub const DEFAULT_ITERATIONS: usize = 10;
pub const DEFAULT_CHECKPOINT_COUNT: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentMode {
    /// Every iteration samples the same interferometer.
    FixedU,
    /// Every iteration draws a fresh Haar-random interferometer.
    VariedU,
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentMode::FixedU => "fixed",
            ExperimentMode::VariedU => "varied",
        })
    }
}

impl FromStr for ExperimentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "fixed" | "fixedu" => Ok(ExperimentMode::FixedU),
            "varied" | "variedu" => Ok(ExperimentMode::VariedU),
            _ => Err(Error::InvalidArgument(format!("unknown experiment mode `{s}`"))),
        }
    }
}

/// `count` equally spaced checkpoints ending at `n_max`.
pub fn default_checkpoints(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> =
        (1..=DEFAULT_CHECKPOINT_COUNT).map(|k| k * n_max / DEFAULT_CHECKPOINT_COUNT).filter(|&n| n > 0).collect();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub modes: usize,
    pub photons: u32,
    pub sampler: SamplerKind,
    pub mode: ExperimentMode,
    pub iterations: usize,
    pub n_max: usize,
    pub checkpoints: Vec<usize>,
    pub radius: u32,
    pub master_seed: u64,
    pub collision_free: bool,
}

impl ExperimentPlan {
    /// Plan with the default iteration count and checkpoint grid.
    pub fn new(modes: usize, photons: u32, sampler: SamplerKind, n_max: usize, radius: u32, master_seed: u64) -> Self {
        ExperimentPlan {
            modes,
            photons,
            sampler,
            mode: ExperimentMode::FixedU,
            iterations: DEFAULT_ITERATIONS,
            n_max,
            checkpoints: default_checkpoints(n_max),
            radius,
            master_seed,
            collision_free: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 2 {
            return Err(Error::InvalidPlan(format!("iterations = {} (need at least 2)", self.iterations)));
        }
        if self.checkpoints.is_empty() || self.checkpoints[0] == 0 {
            return Err(Error::InvalidPlan("checkpoints must be non-empty and positive".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPlan("checkpoints must be strictly increasing".into()));
        }
        if self.checkpoints.last() != Some(&self.n_max) {
            return Err(Error::InvalidPlan(format!(
                "last checkpoint {:?} must equal n_max = {}",
                self.checkpoints.last(),
                self.n_max
            )));
        }
        if self.photons == 0 || self.modes < self.photons as usize {
            return Err(Error::InvalidPlan(format!("need 1 <= n <= m, got n = {}, m = {}", self.photons, self.modes)));
        }
        Ok(())
    }

    fn meta(&self, radius: u32) -> CurveMeta {
        CurveMeta {
            label: self.sampler.label().to_string(),
            mode: self.mode,
            modes: self.modes,
            photons: self.photons,
            radius,
            collision_free: self.collision_free,
            master_seed: Some(self.master_seed),
        }
    }
}

/// Where each iteration's interferometer comes from.
#[derive(Clone, Debug)]
pub enum UnitarySource {
    Fixed(UnitaryMatrix),
    /// Fresh Haar unitary per iteration, seeded from the plan's master seed.
    Haar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveMeta {
    pub label: String,
    pub mode: ExperimentMode,
    pub modes: usize,
    pub photons: u32,
    pub radius: u32,
    pub collision_free: bool,
    pub master_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRow {
    pub iteration: usize,
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateRow {
    pub n: usize,
    pub mean_mu: f64,
    pub std_mu: f64,
    pub mean_sigma: f64,
    pub std_sigma: f64,
}

/// Per-iteration `(N, mu, sigma)` rows, iteration-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FillingCurve {
    meta: CurveMeta,
    checkpoints: Vec<usize>,
    rows: Vec<IterationRow>,
}

impl FillingCurve {
    pub fn new(meta: CurveMeta, checkpoints: Vec<usize>, rows: Vec<IterationRow>) -> Result<Self> {
        if checkpoints.is_empty() || !rows.len().is_multiple_of(checkpoints.len()) {
            return Err(Error::InvalidArgument(format!(
                "{} rows do not tile {} checkpoints",
                rows.len(),
                checkpoints.len()
            )));
        }
        for (block_idx, block) in rows.chunks(checkpoints.len()).enumerate() {
            for (row, &n) in block.iter().zip(&checkpoints) {
                if row.n != n || row.iteration != block_idx {
                    return Err(Error::InvalidArgument(format!(
                        "row (iteration {}, N {}) out of place; expected (iteration {block_idx}, N {n})",
                        row.iteration, row.n
                    )));
                }
            }
        }
        Ok(FillingCurve { meta, checkpoints, rows })
    }

    pub fn meta(&self) -> &CurveMeta {
        &self.meta
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    pub fn rows(&self) -> &[IterationRow] {
        &self.rows
    }

    pub fn iterations(&self) -> usize {
        self.rows.len() / self.checkpoints.len()
    }

    pub fn iteration_rows(&self, iteration: usize) -> &[IterationRow] {
        let k = self.checkpoints.len();
        &self.rows[iteration * k..(iteration + 1) * k]
    }

    /// Across-iteration mean and sample standard deviation at each checkpoint.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let k = self.checkpoints.len();
        let iters = self.iterations();
        self.checkpoints
            .iter()
            .enumerate()
            .map(|(c, &n)| {
                let mus: Vec<f64> = (0..iters).map(|i| self.rows[i * k + c].mu).collect();
                let sigmas: Vec<f64> = (0..iters).map(|i| self.rows[i * k + c].sigma).collect();
                let (mean_mu, std_mu) = mean_std(&mus);
                let (mean_sigma, std_sigma) = mean_std(&sigmas);
                AggregateRow { n, mean_mu, std_mu, mean_sigma, std_sigma }
            })
            .collect()
    }
}

/// Mean and sample (n - 1) standard deviation; zero spread for a single value.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Degree statistics at each checkpoint for several radii at once, using
/// prefix semantics: checkpoint `N` is the graph on the first `N` samples.
///
/// Degrees are maintained incrementally as samples are appended, so the whole
/// sweep costs one pass over the `n_max^2 / 2` pairs. Returns `[radius][checkpoint]`.
pub fn prefix_stats(set: &SampleSet, checkpoints: &[usize], radii: &[u32]) -> Result<Vec<Vec<DegreeStats>>> {
    if let Some(&last) = checkpoints.last() {
        if last > set.len() {
            return Err(Error::InvalidPlan(format!("checkpoint {last} exceeds the {} available samples", set.len())));
        }
    }
    if !radii.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument("radii must be sorted ascending".into()));
    }
    let packed = PackedSamples::from_samples(set.samples())?;
    let levels = radii.len();

    // level_of[d] = number of radii r with r <= d; a pair at distance d is an
    // edge for every radius index >= level_of[d].
    let max_d = 2 * set.meta().photons as usize;
    let level_of: Vec<usize> = (0..=max_d).map(|d| radii.iter().filter(|&&r| r as usize <= d).count()).collect();

    // counts[i * levels + l]: neighbours of i first admitted at radius index l.
    let mut counts = vec![0u32; set.len() * levels];
    let mut own = vec![0u32; levels];
    let mut degrees = vec![0u32; set.len()];
    let mut out = vec![Vec::with_capacity(checkpoints.len()); levels];
    let mut next = 0;

    for j in 0..set.len() {
        if next == checkpoints.len() {
            break;
        }
        own.fill(0);
        packed.for_each_earlier(j, |i, d| {
            let l = level_of[(d as usize).min(max_d)];
            if l < levels {
                counts[i * levels + l] += 1;
                own[l] += 1;
            }
        });
        counts[j * levels..(j + 1) * levels].copy_from_slice(&own);

        let len = j + 1;
        while next < checkpoints.len() && checkpoints[next] == len {
            for (l, per_radius) in out.iter_mut().enumerate() {
                for (i, deg) in degrees[..len].iter_mut().enumerate() {
                    *deg = counts[i * levels..=i * levels + l].iter().sum();
                }
                per_radius.push(stats_of(&degrees[..len])?);
            }
            next += 1;
        }
    }
    Ok(out)
}

/// Curves for several radii from pre-drawn sample sets (one per iteration).
pub fn curves_from_sample_sets(
    sets: &[SampleSet],
    checkpoints: &[usize],
    radii: &[u32],
    meta: &CurveMeta,
) -> Result<Vec<FillingCurve>> {
    let per_iteration: Vec<Vec<Vec<DegreeStats>>> =
        sets.par_iter().map(|set| prefix_stats(set, checkpoints, radii)).collect::<Result<_>>()?;
    radii
        .iter()
        .enumerate()
        .map(|(l, &radius)| {
            let rows = per_iteration
                .iter()
                .enumerate()
                .flat_map(|(iteration, stats)| {
                    stats[l].iter().map(move |s| IterationRow { iteration, n: s.n_samples, mu: s.mu, sigma: s.sigma })
                })
                .collect();
            FillingCurve::new(CurveMeta { radius, ..meta.clone() }, checkpoints.to_vec(), rows)
        })
        .collect()
}

/// Draws one sample set of `n_max` distinct samples per iteration.
pub fn draw_iterations(plan: &ExperimentPlan, source: &UnitarySource) -> Result<Vec<SampleSet>> {
    plan.validate()?;
    let input = InputState::new(plan.modes, plan.photons)?;
    let shared = match (plan.mode, source) {
        (_, _) if !plan.sampler.needs_unitary() => Some(Sampler::prepare(plan.sampler, None, &input)?),
        (ExperimentMode::FixedU, UnitarySource::Fixed(u)) => Some(Sampler::prepare(plan.sampler, Some(u), &input)?),
        (ExperimentMode::FixedU, UnitarySource::Haar) => {
            return Err(Error::InvalidPlan("fixed-unitary mode needs a provided unitary".into()))
        }
        (ExperimentMode::VariedU, _) => None,
    };
    (0..plan.iterations)
        .into_par_iter()
        .map(|iteration| {
            let seed = sampling_seed(plan.master_seed, iteration);
            match &shared {
                Some(sampler) => sampler.collect(plan.n_max, seed, plan.collision_free),
                None => {
                    let u = haar_random_unitary(plan.modes, unitary_seed(plan.master_seed, iteration))?;
                    Sampler::prepare(plan.sampler, Some(&u), &input)?.collect(plan.n_max, seed, plan.collision_free)
                }
            }
        })
        .collect()
}

pub fn run_experiment(plan: &ExperimentPlan, source: &UnitarySource) -> Result<FillingCurve> {
    let mut curves = run_experiment_radii(plan, source, &[plan.radius])?;
    Ok(curves.remove(0))
}

/// Like [`run_experiment`] for several radii, reusing the same samples.
pub fn run_experiment_radii(plan: &ExperimentPlan, source: &UnitarySource, radii: &[u32]) -> Result<Vec<FillingCurve>> {
    let sets = draw_iterations(plan, source)?;
    curves_from_sample_sets(&sets, &plan.checkpoints, radii, &plan.meta(plan.radius))
}
