use std::fmt;

use crate::error::{Error, Result};
use crate::filling::lsq::fit_monomials;
use crate::filling::{mean_std, ExperimentMode, FillingCurve};

/// The three filling-curve coefficients: `mu(N) = alpha_mu N` and
/// `sigma(N) = alpha_sigma N + beta_sigma N^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    AlphaMu,
    AlphaSigma,
    BetaSigma,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::AlphaMu, Param::AlphaSigma, Param::BetaSigma];

    pub fn name(self) -> &'static str {
        match self {
            Param::AlphaMu => "alpha_mu",
            Param::AlphaSigma => "alpha_sigma",
            Param::BetaSigma => "beta_sigma",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationFit {
    pub alpha_mu: f64,
    pub alpha_sigma: f64,
    pub beta_sigma: f64,
}

/// A sampler's validation signature: fitted coefficients with their
/// across-iteration spread as the error.
#[derive(Clone, Debug, PartialEq)]
pub struct FitFingerprint {
    pub label: String,
    pub mode: ExperimentMode,
    pub modes: usize,
    pub photons: u32,
    pub radius: u32,
    pub values: [f64; 3],
    pub errors: [f64; 3],
}

impl FitFingerprint {
    pub fn value(&self, p: Param) -> f64 {
        self.values[p.index()]
    }

    pub fn error(&self, p: Param) -> f64 {
        self.errors[p.index()]
    }

    pub fn alpha_mu(&self) -> f64 {
        self.value(Param::AlphaMu)
    }

    pub fn alpha_sigma(&self) -> f64 {
        self.value(Param::AlphaSigma)
    }

    pub fn beta_sigma(&self) -> f64 {
        self.value(Param::BetaSigma)
    }

    /// `|alpha_sigma|` is within its own error bar.
    pub fn alpha_sigma_vanishes(&self) -> bool {
        self.alpha_sigma().abs() < self.error(Param::AlphaSigma)
    }
}

/// Least-squares coefficients of every iteration's curve.
pub fn fit_iterations(curve: &FillingCurve) -> Result<Vec<IterationFit>> {
    let points = curve.checkpoints().len();
    if points < 3 {
        return Err(Error::Underdetermined { points, coefficients: 3 });
    }
    let xs: Vec<f64> = curve.checkpoints().iter().map(|&n| n as f64).collect();
    (0..curve.iterations())
        .map(|i| {
            let rows = curve.iteration_rows(i);
            let mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
            let sigmas: Vec<f64> = rows.iter().map(|r| r.sigma).collect();
            let alpha_mu = fit_monomials(&xs, &mus, &[1])?[0];
            let s = fit_monomials(&xs, &sigmas, &[1, 2])?;
            Ok(IterationFit { alpha_mu, alpha_sigma: s[0], beta_sigma: s[1] })
        })
        .collect()
}

pub fn fit_curves(curve: &FillingCurve) -> Result<FitFingerprint> {
    if curve.iterations() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fitting needs at least 2 iterations, curve has {}",
            curve.iterations()
        )));
    }
    let fits = fit_iterations(curve)?;
    let column = |f: fn(&IterationFit) -> f64| mean_std(&fits.iter().map(f).collect::<Vec<_>>());
    let (am, eam) = column(|f| f.alpha_mu);
    let (as_, eas) = column(|f| f.alpha_sigma);
    let (bs, ebs) = column(|f| f.beta_sigma);
    let meta = curve.meta();
    Ok(FitFingerprint {
        label: meta.label.clone(),
        mode: meta.mode,
        modes: meta.modes,
        photons: meta.photons,
        radius: meta.radius,
        values: [am, as_, bs],
        errors: [eam, eas, ebs],
    })
}
