//! Exponential decay fits for lattice kernels.
//!
//! Kernels of `H^p` in one dimension decay like `r^(-beta) * exp(-kappa r)`.
//! The fit is an unweighted least-squares solve of
//! `ln|v| = c - kappa * r - beta * ln r` over a window that skips the near
//! field (`r < 3/m`), the periodic wrap (`r > 0.4 * N * a`) and anything
//! under the floating-point floor of the FFT.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{config, input, Result};
use crate::lattice::LatticeConfig;

/// Values smaller than this fraction of the profile peak are treated as noise.
pub const NOISE_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Exponential rate `kappa` (inverse length).
    pub rate: f64,
    /// Power-law exponent `beta` of the prefactor.
    pub power: f64,
    pub intercept: f64,
    pub n_points: usize,
}

impl DecayFit {
    pub fn length(&self) -> f64 {
        self.rate.recip()
    }
}

/// Distance window `[3/m, 0.4 N a]` used for every decay fit.
pub fn decay_window(cfg: &LatticeConfig) -> (f64, f64) {
    (3.0 / cfg.mass(), 0.4 * cfg.length())
}

pub fn fit_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 4 {
        return input(format!("decay fit needs at least 4 points, got {}", points.len()));
    }
    if points.iter().any(|&(r, v)| !(r > 0.0) || !(v > 0.0)) {
        return input("decay fit needs positive distances and magnitudes");
    }
    let n = points.len();
    let design = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => -points[i].0,
        _ => -points[i].0.ln(),
    });
    let rhs = DVector::from_iterator(n, points.iter().map(|&(_, v)| v.ln()));
    let svd = design.svd(true, true);
    let coef = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| crate::error::Error::Input(format!("decay fit failed: {e}")))?;
    Ok(DecayFit {
        intercept: coef[0],
        rate: coef[1],
        power: coef[2],
        n_points: n,
    })
}

/// Fit the decay of a kernel row centred on site 0.
///
/// Only sites on one side of the circle (`1..=N/2`) are used, so each
/// distance appears once.
pub fn fit_kernel_row(cfg: &LatticeConfig, row: &[f64]) -> Result<DecayFit> {
    let profile: Vec<(f64, f64)> = row
        .iter()
        .enumerate()
        .take(cfg.n_sites() / 2 + 1)
        .skip(1)
        .map(|(i, v)| (i as f64 * cfg.spacing(), *v))
        .collect();
    fit_profile(cfg, &profile)
}

/// Fit `(distance, value)` pairs, sorted by distance, inside the decay window.
pub fn fit_profile(cfg: &LatticeConfig, profile: &[(f64, f64)]) -> Result<DecayFit> {
    let (rmin, rmax) = decay_window(cfg);
    if rmax <= rmin {
        return config(format!(
            "decay window [{rmin}, {rmax}] is empty; the lattice is too short for mass {}",
            cfg.mass()
        ));
    }
    let peak = profile.iter().fold(0.0, |m: f64, (_, v)| m.max(v.abs()));
    let floor = NOISE_FLOOR * peak;
    let mut pts = Vec::new();
    for &(r, v) in profile {
        if r < rmin || r > rmax {
            continue;
        }
        // The profile is monotone in the exponential regime; stop at the noise floor.
        if v.abs() <= floor {
            break;
        }
        pts.push((r, v.abs()));
    }
    fit_decay(&pts)
}
