use crate::error::{Error, Result};
use crate::filling::{fit_curves, run_experiment_radii, ExperimentPlan, FillingCurve, FitFingerprint, UnitarySource};
use crate::samplers::SamplerKind;
use crate::validator::auto_separation;

/// Even radii `2, 4, ..., 2n`. Odd radii add nothing: same-total occupation
/// lists are always an even L1 distance apart.
pub fn default_radius_grid(photons: u32) -> Vec<u32> {
    (1..=photons).map(|k| 2 * k).collect()
}

#[derive(Clone, Debug)]
pub struct RadiusScanRow {
    pub radius: u32,
    pub curves: Vec<FillingCurve>,
    pub fingerprints: Vec<FitFingerprint>,
    /// `(label_a, label_b, separation)` for every sampler pair.
    pub pairs: Vec<(String, String, f64)>,
    pub min_separation: f64,
}

#[derive(Clone, Debug)]
pub struct RadiusScan {
    pub threshold: f64,
    pub chosen: u32,
    pub rows: Vec<RadiusScanRow>,
}

impl RadiusScan {
    pub fn chosen_row(&self) -> &RadiusScanRow {
        self.rows.iter().find(|r| r.radius == self.chosen).expect("chosen radius is one of the rows")
    }
}

/// Runs the template experiment for every sampler at every candidate radius
/// (samples are drawn once per sampler and shared across radii) and picks the
/// radius maximizing the smallest pairwise fingerprint separation. Ties go to
/// the smaller radius.
pub fn optimize_radius(
    template: &ExperimentPlan,
    samplers: &[SamplerKind],
    candidates: &[u32],
    source: &UnitarySource,
    threshold: f64,
) -> Result<RadiusScan> {
    if samplers.len() < 2 {
        return Err(Error::InvalidArgument("radius optimization needs at least two samplers".into()));
    }
    let mut radii = candidates.to_vec();
    radii.sort_unstable();
    radii.dedup();
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no candidate radii".into()));
    }

    // curves[s][r]
    let curves: Vec<Vec<FillingCurve>> = samplers
        .iter()
        .map(|&kind| {
            let plan = ExperimentPlan { sampler: kind, ..template.clone() };
            run_experiment_radii(&plan, source, &radii)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(radii.len());
    for (r, &radius) in radii.iter().enumerate() {
        let row_curves: Vec<FillingCurve> = curves.iter().map(|c| c[r].clone()).collect();
        let fingerprints = row_curves.iter().map(fit_curves).collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::new();
        for i in 0..fingerprints.len() {
            for j in i + 1..fingerprints.len() {
                let (sep, _) = auto_separation(&fingerprints[i], &fingerprints[j])?;
                pairs.push((fingerprints[i].label.clone(), fingerprints[j].label.clone(), sep));
            }
        }
        let min_separation = pairs.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
        rows.push(RadiusScanRow { radius, curves: row_curves, fingerprints, pairs, min_separation });
    }

    if radii.len() > 1 && rows.iter().all(|row| row.pairs.iter().all(|p| p.2 <= threshold || p.2.is_nan())) {
        return Err(Error::NoSeparation { threshold });
    }
    let chosen = rows
        .iter()
        .fold(None::<&RadiusScanRow>, |best, row| match best {
            // NaN never displaces the incumbent.
            Some(b) if row.min_separation <= b.min_separation || row.min_separation.is_nan() => Some(b),
            _ => Some(row),
        })
        .map(|row| row.radius)
        .expect("at least one candidate");
    Ok(RadiusScan { threshold, chosen, rows })
}
