//! Discretized phase space of the free scalar field on a periodic 1-D lattice.
//!
//! Cauchy data live on `n_sites` points with spacing `a`. All lattice sums
//! carry the weight `a`, so inner products and the symplectic form approach
//! their continuum integrals as `a -> 0`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{config, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeConfig {
    n_sites: usize,
    spacing: f64,
    mass: f64,
}

impl LatticeConfig {
    /// Periodic lattice with `n_sites >= 2`, `spacing > 0` and `mass > 0`.
    pub fn new(n_sites: usize, spacing: f64, mass: f64) -> Result<Self> {
        if n_sites < 2 {
            return config(format!("n_sites must be >= 2, got {n_sites}"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return config(format!("spacing must be positive, got {spacing}"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return config(format!("mass must be positive, got {mass}"));
        }
        Ok(Self {
            n_sites,
            spacing,
            mass,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Physical length of the circle, `n_sites * spacing`.
    pub fn length(&self) -> f64 {
        self.n_sites as f64 * self.spacing
    }

    /// Periodic distance between two sites in length units.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j) % self.n_sites;
        d.min(self.n_sites - d) as f64 * self.spacing
    }

    pub(crate) fn key(&self) -> (usize, u64, u64) {
        (self.n_sites, self.spacing.to_bits(), self.mass.to_bits())
    }

    pub(crate) fn ensure_same(&self, other: &LatticeConfig) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            config(format!("mismatched lattices: {self:?} vs {other:?}"))
        }
    }
}

/// Cauchy data `phi (+) pi` on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phi: Vec<f64>,
    pi: Vec<f64>,
    config: LatticeConfig,
}

impl PhaseVector {
    pub fn new(config: LatticeConfig, phi: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        let n = config.n_sites();
        if phi.len() != n || pi.len() != n {
            return Err(Error::Config(format!(
                "phase vector arrays have lengths ({}, {}), lattice has {n} sites",
                phi.len(),
                pi.len()
            )));
        }
        Ok(Self { phi, pi, config })
    }

    pub fn zeros(config: LatticeConfig) -> Self {
        let n = config.n_sites();
        Self {
            phi: vec![0.0; n],
            pi: vec![0.0; n],
            config,
        }
    }

    /// Unit field value at `site`, zero momentum.
    pub fn field_delta(config: LatticeConfig, site: usize) -> Self {
        let mut f = Self::zeros(config);
        f.phi[site % config.n_sites()] = 1.0;
        f
    }

    /// Unit momentum value at `site`, zero field.
    pub fn momentum_delta(config: LatticeConfig, site: usize) -> Self {
        let mut f = Self::zeros(config);
        f.pi[site % config.n_sites()] = 1.0;
        f
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn is_zero(&self) -> bool {
        self.phi.iter().chain(&self.pi).all(|&x| x == 0.0)
    }

    /// Euclidean norm of the stacked arrays, weighted by the spacing.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.phi.iter().chain(&self.pi).map(|x| x * x).sum();
        (self.config.spacing() * s).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.phi
            .iter()
            .chain(&self.pi)
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            phi: self.phi.iter().map(|x| s * x).collect(),
            pi: self.pi.iter().map(|x| s * x).collect(),
            config: self.config,
        }
    }

    /// Sites where either component is nonzero.
    pub fn support(&self) -> Region {
        let sites = (0..self.config.n_sites())
            .filter(|&i| self.phi[i] != 0.0 || self.pi[i] != 0.0)
            .collect();
        Region {
            sites,
            n_sites: self.config.n_sites(),
        }
    }

    pub(crate) fn from_parts(config: LatticeConfig, phi: Vec<f64>, pi: Vec<f64>) -> Self {
        debug_assert_eq!(phi.len(), config.n_sites());
        debug_assert_eq!(pi.len(), config.n_sites());
        Self { phi, pi, config }
    }
}

fn zip_with(a: &PhaseVector, b: &PhaseVector, op: impl Fn(f64, f64) -> f64) -> PhaseVector {
    assert_eq!(a.config, b.config, "phase vectors on different lattices");
    PhaseVector {
        phi: a.phi.iter().zip(&b.phi).map(|(x, y)| op(*x, *y)).collect(),
        pi: a.pi.iter().zip(&b.pi).map(|(x, y)| op(*x, *y)).collect(),
        config: a.config,
    }
}

impl Add for &PhaseVector {
    type Output = PhaseVector;
    fn add(self, rhs: &PhaseVector) -> PhaseVector {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &PhaseVector {
    type Output = PhaseVector;
    fn sub(self, rhs: &PhaseVector) -> PhaseVector {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &PhaseVector {
    type Output = PhaseVector;
    fn neg(self) -> PhaseVector {
        self.scale(-1.0)
    }
}

impl Mul<&PhaseVector> for f64 {
    type Output = PhaseVector;
    fn mul(self, rhs: &PhaseVector) -> PhaseVector {
        rhs.scale(self)
    }
}

/// Complex lattice function: an element of the one-particle space `L^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMode {
    values: Vec<Complex64>,
    config: LatticeConfig,
}

impl ComplexMode {
    pub fn new(config: LatticeConfig, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != config.n_sites() {
            return config_len(values.len(), config.n_sites());
        }
        Ok(Self { values, config })
    }

    pub fn zeros(config: LatticeConfig) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); config.n_sites()],
            config,
        }
    }

    /// `L^2`-normalized indicator of a single site: value `1/sqrt(a)` there.
    pub fn site_mode(config: LatticeConfig, site: usize) -> Self {
        let mut u = Self::zeros(config);
        u.values[site % config.n_sites()] = Complex64::new(config.spacing().recip().sqrt(), 0.0);
        u
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        (self.config.spacing() * s).sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|z| s * z).collect(),
            config: self.config,
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &ComplexMode) -> Self {
        assert_eq!(self.config, other.config, "modes on different lattices");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + s * y)
                .collect(),
            config: self.config,
        }
    }

    /// Largest modulus on sites outside `region`.
    pub fn max_outside(&self, region: &Region) -> f64 {
        (0..self.values.len())
            .filter(|i| !region.contains(*i))
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }

    /// `L^2` mass (squared norm) on sites outside `region`.
    pub fn mass_outside(&self, region: &Region) -> f64 {
        let s: f64 = (0..self.values.len())
            .filter(|i| !region.contains(*i))
            .map(|i| self.values[i].norm_sqr())
            .sum();
        self.config.spacing() * s
    }

    pub(crate) fn from_parts(config: LatticeConfig, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), config.n_sites());
        Self { values, config }
    }
}

fn config_len<T>(got: usize, n: usize) -> Result<T> {
    config(format!("mode has length {got}, lattice has {n} sites"))
}

/// A set of lattice sites, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Region {
    sites: Vec<usize>,
    n_sites: usize,
}

impl Region {
    pub fn new(n_sites: usize, sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = sites.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&i| i >= n_sites) {
            return Err(Error::OutOfRange {
                index: bad,
                limit: n_sites,
            });
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self { sites: v, n_sites })
    }

    /// `len` consecutive sites starting at `start`, wrapping around the circle.
    pub fn interval(n_sites: usize, start: usize, len: usize) -> Result<Self> {
        if len > n_sites {
            return config(format!("interval of {len} sites on a {n_sites}-site lattice"));
        }
        Self::new(n_sites, (0..len).map(|k| (start + k) % n_sites))
    }

    pub fn empty(n_sites: usize) -> Self {
        Self {
            sites: Vec::new(),
            n_sites,
        }
    }

    pub fn full(n_sites: usize) -> Self {
        Self {
            sites: (0..n_sites).collect(),
            n_sites,
        }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    pub fn complement(&self) -> Self {
        Self {
            sites: (0..self.n_sites).filter(|&i| !self.contains(i)).collect(),
            n_sites: self.n_sites,
        }
    }

    pub fn union(&self, other: &Region) -> Self {
        let mut sites: Vec<usize> = self.sites.iter().chain(&other.sites).copied().collect();
        sites.sort_unstable();
        sites.dedup();
        Self {
            sites,
            n_sites: self.n_sites.max(other.n_sites),
        }
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.sites.iter().all(|&i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.sites.iter().all(|&i| !other.contains(i))
    }

    /// Cyclic shift of every site by `shift` (taken mod `n_sites`).
    pub fn shifted(&self, shift: i64) -> Self {
        let n = self.n_sites as i64;
        let s = shift.rem_euclid(n) as usize;
        let mut sites: Vec<usize> = self.sites.iter().map(|&i| (i + s) % self.n_sites).collect();
        sites.sort_unstable();
        Self {
            sites,
            n_sites: self.n_sites,
        }
    }

    /// Smallest periodic distance (in sites) between the two regions.
    pub fn site_gap(&self, other: &Region) -> Option<usize> {
        let n = self.n_sites;
        self.sites
            .iter()
            .flat_map(|&i| {
                other.sites.iter().map(move |&j| {
                    let d = i.abs_diff(j);
                    d.min(n - d)
                })
            })
            .min()
    }
}

/// `sigma(phi0 (+) pi0, phi1 (+) pi1) = <phi0, pi1> - <pi0, phi1>`.
pub fn symplectic_form(f: &PhaseVector, g: &PhaseVector) -> Result<f64> {
    f.config.ensure_same(&g.config)?;
    let s: f64 = (0..f.phi.len())
        .map(|i| f.phi[i] * g.pi[i] - f.pi[i] * g.phi[i])
        .sum();
    Ok(f.config.spacing() * s)
}

/// Lattice `L^2` inner product, conjugate-linear in the **first** argument.
pub fn l2_inner(u: &ComplexMode, v: &ComplexMode) -> Result<Complex64> {
    u.config.ensure_same(&v.config)?;
    let s: Complex64 = u.values.iter().zip(&v.values).map(|(x, y)| x.conj() * y).sum();
    Ok(s * u.config.spacing())
}

/// Zero `f` outside `region`.
///
/// Panics if the region was built for a different number of sites.
pub fn restrict(f: &PhaseVector, region: &Region) -> PhaseVector {
    assert_eq!(region.n_sites, f.config.n_sites(), "region/lattice size mismatch");
    let mut out = PhaseVector::zeros(f.config);
    for &i in &region.sites {
        out.phi[i] = f.phi[i];
        out.pi[i] = f.pi[i];
    }
    out
}

pub fn is_supported_in(f: &PhaseVector, region: &Region, tol: f64) -> bool {
    (0..f.config.n_sites())
        .filter(|&i| !region.contains(i))
        .all(|i| f.phi[i].abs() <= tol && f.pi[i].abs() <= tol)
}

fn rotate<T: Copy>(v: &[T], shift: i64) -> Vec<T> {
    let n = v.len();
    let s = shift.rem_euclid(n as i64) as usize;
    (0..n).map(|i| v[(i + n - s) % n]).collect()
}

/// Cyclic shift: the value at site `i` moves to site `i + shift`.
pub fn translate(f: &PhaseVector, shift: i64) -> PhaseVector {
    PhaseVector {
        phi: rotate(&f.phi, shift),
        pi: rotate(&f.pi, shift),
        config: f.config,
    }
}

pub fn translate_mode(u: &ComplexMode, shift: i64) -> ComplexMode {
    ComplexMode {
        values: rotate(&u.values, shift),
        config: u.config,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: usize, a: f64) -> LatticeConfig {
        LatticeConfig::new(n, a, 1.0).unwrap()
    }

    fn pv(c: LatticeConfig, phi: Vec<f64>, pi: Vec<f64>) -> PhaseVector {
        PhaseVector::new(c, phi, pi).unwrap()
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert!(LatticeConfig::new(1, 0.1, 1.0).is_err());
        assert!(LatticeConfig::new(8, 0.0, 1.0).is_err());
        assert!(LatticeConfig::new(8, 0.1, 0.0).is_err());
        assert!(LatticeConfig::new(8, 0.1, -1.0).is_err());
        assert!(LatticeConfig::new(8, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn delta_pair_has_unit_symplectic_product() {
        let c = cfg(8, 1.0);
        let f = PhaseVector::field_delta(c, 0);
        let g = PhaseVector::momentum_delta(c, 0);
        assert_eq!(symplectic_form(&f, &g).unwrap(), 1.0);
        assert_eq!(symplectic_form(&g, &f).unwrap(), -1.0);
    }

    #[test]
    fn mismatched_configs_are_rejected() {
        let f = PhaseVector::zeros(cfg(8, 1.0));
        let g = PhaseVector::zeros(cfg(8, 0.5));
        assert!(matches!(symplectic_form(&f, &g), Err(Error::Config(_))));
        let u = ComplexMode::zeros(cfg(8, 1.0));
        let v = ComplexMode::zeros(cfg(9, 1.0));
        assert!(l2_inner(&u, &v).is_err());
        assert!(PhaseVector::new(cfg(8, 1.0), vec![0.0; 7], vec![0.0; 8]).is_err());
    }

    #[test]
    fn site_mode_norm_weighted_by_spacing() {
        let c = cfg(16, 0.5);
        let mut v = vec![Complex64::new(0.0, 0.0); 16];
        v[0] = Complex64::new(1.0, 0.0);
        let u = ComplexMode::new(c, v).unwrap();
        assert_eq!(l2_inner(&u, &u).unwrap(), Complex64::new(0.5, 0.0));
        let e = ComplexMode::site_mode(c, 3);
        assert!((e.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn restrict_edge_cases() {
        let c = cfg(6, 1.0);
        let f = pv(c, vec![1., 2., 3., 4., 5., 6.], vec![-1., 0., 1., 0., 2., 0.]);
        assert!(restrict(&f, &Region::empty(6)).is_zero());
        assert_eq!(restrict(&f, &Region::full(6)), f);
        let g = Region::interval(6, 1, 3).unwrap();
        let fg = restrict(&f, &g);
        assert_eq!(restrict(&fg, &g), fg);
        assert!(is_supported_in(&fg, &g, 0.0));
        assert!(!is_supported_in(&f, &Region::empty(6), 0.0));
        assert_eq!(fg.support(), Region::new(6, [1, 2, 3]).unwrap());
    }

    #[test]
    fn region_set_algebra() {
        let g = Region::interval(10, 8, 4).unwrap();
        assert_eq!(g.sites(), &[0, 1, 8, 9]);
        assert_eq!(g.complement().complement(), g);
        assert!(g.is_disjoint(&g.complement()));
        assert_eq!(g.union(&g.complement()), Region::full(10));
        assert_eq!(g.shifted(2).sites(), &[0, 1, 2, 3]);
        assert_eq!(g.shifted(-10), g);
        assert!(Region::new(4, [4]).is_err());
        assert_eq!(Region::new(4, [3, 1, 3]).unwrap().sites(), &[1, 3]);
        let h = Region::interval(10, 4, 2).unwrap();
        assert_eq!(g.site_gap(&h), Some(3));
    }

    #[test]
    fn translate_moves_support() {
        let c = cfg(8, 1.0);
        let f = PhaseVector::field_delta(c, 6);
        let t = translate(&f, 3);
        assert_eq!(t.support().sites(), &[1]);
        assert_eq!(translate(&f, 8), f);
        assert_eq!(translate(&f, 0), f);
        assert_eq!(f.support().shifted(3), t.support());
    }

    #[test]
    fn symplectic_form_is_nondegenerate_on_small_lattices() {
        // Every nonzero f pairs nontrivially with some basis vector.
        let c = cfg(5, 0.7);
        let basis: Vec<PhaseVector> = (0..5)
            .map(|i| PhaseVector::field_delta(c, i))
            .chain((0..5).map(|i| PhaseVector::momentum_delta(c, i)))
            .collect();
        for mask in 1u32..(1 << 10) {
            let mut f = PhaseVector::zeros(c);
            for (b, e) in basis.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    f = &f + &((b as f64 + 1.0) * e);
                }
            }
            let hit = basis
                .iter()
                .any(|g| symplectic_form(&f, g).unwrap().abs() > 0.0);
            assert!(hit, "degenerate direction for mask {mask:b}");
        }
    }

    fn arr(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, n)
    }

    proptest! {
        #[test]
        fn sigma_antisymmetric_and_bilinear(a in arr(64), b in arr(64), c in arr(64), d in arr(64), s in -3.0f64..3.0) {
            let cf = cfg(64, 0.1);
            let f = pv(cf, a, b);
            let g = pv(cf, c, d);
            let fg = symplectic_form(&f, &g).unwrap();
            let gf = symplectic_form(&g, &f).unwrap();
            prop_assert!((fg + gf).abs() <= 1e-12 * (1.0 + fg.abs()));
            prop_assert_eq!(symplectic_form(&f, &f).unwrap(), 0.0);
            let lhs = symplectic_form(&(s * &f), &g).unwrap();
            prop_assert!((lhs - s * fg).abs() <= 1e-10 * (1.0 + fg.abs()));
        }

        #[test]
        fn l2_inner_hermitian_and_positive(re in arr(32), im in arr(32), re2 in arr(32), im2 in arr(32)) {
            let c = cfg(32, 0.3);
            let mk = |r: &[f64], i: &[f64]| ComplexMode::new(c, r.iter().zip(i).map(|(x, y)| Complex64::new(*x, *y)).collect()).unwrap();
            let u = mk(&re, &im);
            let v = mk(&re2, &im2);
            let uu = l2_inner(&u, &u).unwrap();
            prop_assert!(uu.re >= 0.0 && uu.im == 0.0);
            let uv = l2_inner(&u, &v).unwrap();
            let vu = l2_inner(&v, &u).unwrap();
            prop_assert!((uv - vu.conj()).norm() <= 1e-12 * (1.0 + uv.norm()));
        }

        #[test]
        fn translate_preserves_sigma_and_norms(a in arr(16), b in arr(16), c in arr(16), d in arr(16), s in -40i64..40) {
            let cf = cfg(16, 0.25);
            let f = pv(cf, a, b);
            let g = pv(cf, c, d);
            let (tf, tg) = (translate(&f, s), translate(&g, s));
            let before = symplectic_form(&f, &g).unwrap();
            let after = symplectic_form(&tf, &tg).unwrap();
            prop_assert!((before - after).abs() <= 1e-10 * (1.0 + before.abs()));
            prop_assert!((f.l2_norm() - tf.l2_norm()).abs() <= 1e-12 * (1.0 + f.l2_norm()));
            prop_assert_eq!(translate(&tf, -s), f);
        }

        #[test]
        fn disjoint_supports_are_symplectically_orthogonal(a in arr(20), b in arr(20), c in arr(20), d in arr(20), split in 1usize..19) {
            let cf = cfg(20, 0.1);
            let g1 = Region::interval(20, 0, split).unwrap();
            let g2 = g1.complement();
            let f = restrict(&pv(cf, a, b), &g1);
            let g = restrict(&pv(cf, c, d), &g2);
            prop_assert_eq!(symplectic_form(&f, &g).unwrap(), 0.0);
        }
    }
}
