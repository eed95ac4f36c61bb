//! Closed-form Gaussian vacuum quantities for both localization schemes.
//!
//! Weyl convention: `W(f) W(g) = exp(-iσ(f,g)/2) W(f+g)` and
//! `<Ω, W(f) Ω> = exp(-(f,f)_J / 4)`, so
//! `<W(f) W(g)> = exp(-iσ/2) exp(-(f,f)_J/4 - (g,g)_J/4 - Re(f,g)_J/2)`.
//! The truncated Fock matrices in [`crate::fock`] obey the same convention.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{config, input, Result};
use crate::fit::{fit_kernel_row, fit_profile, DecayFit};
use crate::lattice::{l2_inner, symplectic_form, ComplexMode, LatticeConfig, PhaseVector, Region};
use crate::spectral::{fock_mode, inner_product_j, kernel_row, nw_map_k, nw_map_k_inverse};

/// Factor relating `<Kf, Kf>` to the Fock-normalized norm `(f, f)_J`.
pub const NW_NORM_FACTOR: f64 = 2.0;

/// Relative threshold below which entries of `Kf` count as zero when
/// deciding NW support (FFT round trips leave ~1e-16 residue).
pub const NW_SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SchemeKind {
    Standard,
    NewtonWigner,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 2] = [SchemeKind::Standard, SchemeKind::NewtonWigner];

    pub fn slug(&self) -> &'static str {
        match self {
            SchemeKind::Standard => "standard",
            SchemeKind::NewtonWigner => "newton-wigner",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// `(re, im)` of the scheme's one-particle inner product between `f` and `g`,
/// in Fock normalization (`im` equals `σ(f,g)` in both schemes).
fn cross(f: &PhaseVector, g: &PhaseVector, scheme: SchemeKind) -> Result<Complex64> {
    match scheme {
        SchemeKind::Standard => inner_product_j(f, g),
        SchemeKind::NewtonWigner => Ok(l2_inner(&nw_map_k(f), &nw_map_k(g))? * NW_NORM_FACTOR),
    }
}

fn norm_sq(f: &PhaseVector, scheme: SchemeKind) -> f64 {
    match scheme {
        SchemeKind::Standard => inner_product_j(f, f).map(|z| z.re).unwrap_or(0.0),
        SchemeKind::NewtonWigner => NW_NORM_FACTOR * nw_map_k(f).norm().powi(2),
    }
}

/// `<Ω, W(f) Ω>`, in `(0, 1]`.
pub fn weyl_vacuum_expectation(f: &PhaseVector, scheme: SchemeKind) -> f64 {
    (-norm_sq(f, scheme) / 4.0).exp()
}

/// `<Ω, W(f) W(g) Ω>`.
pub fn two_point_weyl(f: &PhaseVector, g: &PhaseVector, scheme: SchemeKind) -> Result<Complex64> {
    let c = cross(f, g, scheme)?;
    let modulus = (-(norm_sq(f, scheme) + norm_sq(g, scheme)) / 4.0 - c.re / 2.0).exp();
    Ok(Complex64::from_polar(modulus, -c.im / 2.0))
}

/// Sites where `Kf` is non-negligible.
pub fn nw_support(f: &PhaseVector) -> Region {
    mode_support(&nw_map_k(f))
}

pub fn mode_support(u: &ComplexMode) -> Region {
    let peak = u.values().iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    let n = u.config().n_sites();
    let sites: Vec<usize> = (0..n)
        .filter(|&i| u.values()[i].norm() > NW_SUPPORT_TOL * peak)
        .collect();
    Region::new(n, sites).expect("indices in range")
}

/// `|<W(f)W(g)> - <W(f)><W(g)>|` for probes localized in disjoint regions.
///
/// Localization is judged per scheme: Cauchy-data support for `Standard`,
/// support of `Kf` for `NewtonWigner`.
pub fn factorization_defect(f: &PhaseVector, g: &PhaseVector, scheme: SchemeKind) -> Result<f64> {
    f.config().ensure_same(g.config())?;
    let (sf, sg) = match scheme {
        SchemeKind::Standard => (f.support(), g.support()),
        SchemeKind::NewtonWigner => (nw_support(f), nw_support(g)),
    };
    if !sf.is_disjoint(&sg) {
        return input(format!("{scheme} probes overlap on sites {:?}", overlap(&sf, &sg)));
    }
    let joint = two_point_weyl(f, g, scheme)?;
    let product = weyl_vacuum_expectation(f, scheme) * weyl_vacuum_expectation(g, scheme);
    Ok((joint - product).norm())
}

fn overlap(a: &Region, b: &Region) -> Vec<usize> {
    a.sites().iter().copied().filter(|&i| b.contains(i)).collect()
}

/// Field delta at `site` scaled to unit `(f, f)_J`.
pub fn unit_field_probe(cfg: &LatticeConfig, site: usize) -> PhaseVector {
    let f = PhaseVector::field_delta(*cfg, site);
    let n = norm_sq(&f, SchemeKind::Standard).sqrt();
    f.scale(n.recip())
}

/// Cauchy data whose NW image is `phase · e_site`, scaled to unit NW norm.
pub fn unit_nw_probe(cfg: &LatticeConfig, site: usize, phase: Complex64) -> PhaseVector {
    let u = ComplexMode::site_mode(*cfg, site).scale(phase / (phase.norm() * NW_NORM_FACTOR.sqrt()));
    nw_map_k_inverse(&u)
}

/// Unit probe of the scheme at `site` (a field delta for Standard, a real
/// site mode for NW).
pub fn unit_probe(cfg: &LatticeConfig, site: usize, scheme: SchemeKind) -> PhaseVector {
    match scheme {
        SchemeKind::Standard => unit_field_probe(cfg, site),
        SchemeKind::NewtonWigner => unit_nw_probe(cfg, site, Complex64::new(1.0, 0.0)),
    }
}

/// `(distance, factorization_defect)` between unit probes at site 0 and site
/// `d`, for `d = 1..=N/2`.
pub fn factorization_profile(cfg: &LatticeConfig, scheme: SchemeKind) -> Result<Vec<(f64, f64)>> {
    let f = unit_probe(cfg, 0, scheme);
    (1..=cfg.n_sites() / 2)
        .map(|d| {
            let g = unit_probe(cfg, d, scheme);
            Ok((d as f64 * cfg.spacing(), factorization_defect(&f, &g, scheme)?))
        })
        .collect()
}

/// Decay fit of the Standard factorization defect against separation.
pub fn factorization_fit(cfg: &LatticeConfig) -> Result<DecayFit> {
    fit_profile(cfg, &factorization_profile(cfg, SchemeKind::Standard)?)
}

/// Real symmetric matrix of vacuum two-point values over a probe list.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub scheme: SchemeKind,
    pub entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone()).eigenvalues.min()
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Standard: `Re(f_i, f_j)_J`. Newton-Wigner: `Re<K f_i, K f_j>`.
pub fn vacuum_covariance(probes: &[PhaseVector], scheme: SchemeKind) -> Result<CovarianceMatrix> {
    if probes.is_empty() {
        return input("vacuum_covariance needs at least one probe");
    }
    let cfg = *probes[0].config();
    for p in probes {
        cfg.ensure_same(p.config())?;
    }
    let n = probes.len();
    let mut entries = DMatrix::zeros(n, n);
    match scheme {
        SchemeKind::Standard => {
            for i in 0..n {
                for j in i..n {
                    let v = inner_product_j(&probes[i], &probes[j])?.re;
                    entries[(i, j)] = v;
                    entries[(j, i)] = v;
                }
            }
        }
        SchemeKind::NewtonWigner => {
            let modes: Vec<ComplexMode> = probes.iter().map(nw_map_k).collect();
            for i in 0..n {
                for j in i..n {
                    let v = l2_inner(&modes[i], &modes[j])?.re;
                    entries[(i, j)] = v;
                    entries[(j, i)] = v;
                }
            }
        }
    }
    Ok(CovarianceMatrix { scheme, entries })
}

/// Fock-normalized one-particle generators of the region's local algebra:
/// field and momentum deltas (Standard) or site modes `e_x`, `i e_x` (NW).
pub fn region_generators(cfg: &LatticeConfig, region: &Region, scheme: SchemeKind) -> Vec<ComplexMode> {
    match scheme {
        SchemeKind::Standard => region
            .sites()
            .iter()
            .flat_map(|&x| {
                [
                    fock_mode(&PhaseVector::field_delta(*cfg, x)),
                    fock_mode(&PhaseVector::momentum_delta(*cfg, x)),
                ]
            })
            .collect(),
        SchemeKind::NewtonWigner => region
            .sites()
            .iter()
            .flat_map(|&x| {
                let e = ComplexMode::site_mode(*cfg, x);
                let ie = e.scale(Complex64::new(0.0, 1.0));
                [e, ie]
            })
            .collect(),
    }
}

/// Purity `Tr ρ²` of the vacuum restricted to the algebra of a region.
///
/// With field operators `Φ(u)`, `V_ij = Re<u_i,u_j>/2` is the symmetrized
/// covariance and `Ω_ij = Im<u_i,u_j>` the commutator matrix; the Gaussian
/// purity is `sqrt(det Ω) / (2^n sqrt(det V))` for `2n` generators. It equals
/// 1 exactly when the reduced state is pure.
pub fn reduced_purity(cfg: &LatticeConfig, region: &Region, scheme: SchemeKind) -> Result<f64> {
    if region.is_empty() {
        return input("reduced_purity on an empty region");
    }
    let gens = region_generators(cfg, region, scheme);
    let n = gens.len();
    let mut v = DMatrix::zeros(n, n);
    let mut om = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let z = l2_inner(&gens[i], &gens[j])?;
            v[(i, j)] = 0.5 * z.re;
            om[(i, j)] = z.im;
        }
    }
    let logdet_v: f64 = SymmetricEigen::new(v).eigenvalues.iter().map(|l| l.ln()).sum();
    let logdet_om: f64 = om.lu().u().diagonal().iter().map(|d| d.abs().ln()).sum();
    let pairs = (n / 2) as f64;
    Ok((0.5 * logdet_om - pairs * std::f64::consts::LN_2 - 0.5 * logdet_v).exp())
}

/// Minimum `N a m` for which the correlation-length fit is trusted.
pub const MIN_CORRELATION_BOX: f64 = 20.0;

/// Equal-time two-point function `<φ(x) φ(0)>` = `H⁻¹(x, 0) / 2`.
pub fn field_two_point_row(cfg: &LatticeConfig) -> Vec<f64> {
    kernel_row(cfg, -1.0).into_iter().map(|v| 0.5 * v).collect()
}

/// Decay fit of the vacuum field correlator.
pub fn correlation_fit(cfg: &LatticeConfig) -> Result<DecayFit> {
    let box_size = cfg.length() * cfg.mass();
    if box_size < MIN_CORRELATION_BOX {
        return config(format!(
            "correlation fit needs N·a·m >= {MIN_CORRELATION_BOX}, got {box_size}"
        ));
    }
    fit_kernel_row(cfg, &field_two_point_row(cfg))
}

/// Fitted vacuum correlation length; close to the Compton length `1/m`.
pub fn correlation_length(cfg: &LatticeConfig) -> Result<f64> {
    correlation_fit(cfg).map(|f| f.length())
}

/// Convenience: the symplectic pairing used for Weyl phases.
pub fn weyl_phase(f: &PhaseVector, g: &PhaseVector) -> Result<Complex64> {
    Ok(Complex64::from_polar(1.0, -symplectic_form(f, g)? / 2.0))
}
