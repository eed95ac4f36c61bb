//! Functions of the lattice Klein-Gordon operator.
//!
//! `H = (-Δ + m²)^(1/2)` with the nearest-neighbour Laplacian is circulant, so
//! every power of it is a Fourier multiplier with symbol `ω_k^p`, where
//! `ω_k² = m² + (4/a²) sin²(πk/N)`. The complex structure `J`, the
//! Newton-Wigner map `K` and the classical time evolution are all built from
//! those multipliers. [`dense_oracle`] gives an independent route through a
//! dense symmetric eigendecomposition, used for cross-checks.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{config, input, Error, Result};
use crate::fit::{fit_kernel_row, DecayFit};
use crate::lattice::{is_supported_in, symplectic_form, ComplexMode, LatticeConfig, PhaseVector, Region};

/// Largest lattice the dense oracle will build.
pub const DENSE_ORACLE_MAX_SITES: usize = 512;

/// Spectrum of `H` indexed by DFT wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    omega: Vec<f64>,
    config: LatticeConfig,
}

impl DispersionTable {
    pub fn new(config: LatticeConfig) -> Self {
        let n = config.n_sites();
        let m2 = config.mass() * config.mass();
        let c = 2.0 / config.spacing();
        let mut omega: Vec<f64> = (0..n)
            .map(|k| {
                let s = c * (PI * k as f64 / n as f64).sin();
                (m2 + s * s).sqrt()
            })
            .collect();
        omega[0] = config.mass();
        Self { omega, config }
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }
}

type PowerKey = (usize, u64, u64, u64);

/// Memo of FFT plans and `ω_k^p` tables.
///
/// Lookups are pure: two threads racing on the same key may both compute the
/// table, and whichever is stored is bitwise identical to the other.
pub struct PropagatorCache {
    plans: Mutex<FftPlanner<f64>>,
    tables: Mutex<HashMap<(usize, u64, u64), Arc<DispersionTable>>>,
    powers: Mutex<HashMap<PowerKey, Arc<Vec<f64>>>>,
}

impl Default for PropagatorCache {
    fn default() -> Self {
        Self {
            plans: Mutex::new(FftPlanner::new()),
            tables: Mutex::default(),
            powers: Mutex::default(),
        }
    }
}

impl PropagatorCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache used by the free functions of this module.
    pub fn global() -> &'static PropagatorCache {
        static CACHE: OnceLock<PropagatorCache> = OnceLock::new();
        CACHE.get_or_init(PropagatorCache::new)
    }

    pub fn dispersion(&self, cfg: &LatticeConfig) -> Arc<DispersionTable> {
        if let Some(t) = self.tables.lock().unwrap().get(&cfg.key()) {
            return Arc::clone(t);
        }
        let t = Arc::new(DispersionTable::new(*cfg));
        self.tables
            .lock()
            .unwrap()
            .entry(cfg.key())
            .or_insert(t)
            .clone()
    }

    /// `ω_k^p` for every wavenumber.
    pub fn symbol(&self, cfg: &LatticeConfig, p: f64) -> Arc<Vec<f64>> {
        let (n, a, m) = cfg.key();
        let key = (n, a, m, p.to_bits());
        if let Some(s) = self.powers.lock().unwrap().get(&key) {
            return Arc::clone(s);
        }
        let table = self.dispersion(cfg);
        let s: Arc<Vec<f64>> = Arc::new(table.omega().iter().map(|w| power(*w, p)).collect());
        self.powers.lock().unwrap().entry(key).or_insert(s).clone()
    }

    fn plans(&self, n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        let mut planner = self.plans.lock().unwrap();
        (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
    }

    /// Multiply the DFT of `data` by `symbol(k)` and transform back.
    pub fn multiply(
        &self,
        cfg: &LatticeConfig,
        mut data: Vec<Complex64>,
        symbol: impl Fn(usize) -> Complex64,
    ) -> Vec<Complex64> {
        let n = data.len();
        debug_assert_eq!(n, cfg.n_sites());
        let (fwd, inv) = self.plans(n);
        fwd.process(&mut data);
        let norm = 1.0 / n as f64;
        for (k, z) in data.iter_mut().enumerate() {
            *z *= symbol(k) * norm;
        }
        inv.process(&mut data);
        data
    }
}

fn power(w: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        w
    } else if p == -1.0 {
        w.recip()
    } else if p == 2.0 {
        w * w
    } else if p == 0.5 {
        w.sqrt()
    } else if p == -0.5 {
        w.sqrt().recip()
    } else {
        w.powf(p)
    }
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn real_multiplier(cfg: &LatticeConfig, v: &[f64], p: f64) -> Vec<f64> {
    let cache = PropagatorCache::global();
    let sym = cache.symbol(cfg, p);
    cache
        .multiply(cfg, to_complex(v), |k| Complex64::new(sym[k], 0.0))
        .into_iter()
        .map(|z| z.re)
        .collect()
}

/// `H^p v` for a real lattice function.
///
/// The imaginary rounding residue of the inverse DFT is discarded, so real
/// input always yields real output.
pub fn apply_h_power(cfg: &LatticeConfig, v: &[f64], p: f64) -> Result<Vec<f64>> {
    if v.len() != cfg.n_sites() {
        return config(format!("array of length {} on {} sites", v.len(), cfg.n_sites()));
    }
    if p == 0.0 {
        return Ok(v.to_vec());
    }
    Ok(real_multiplier(cfg, v, p))
}

/// `H^p u` for a complex mode.
pub fn apply_h_power_mode(u: &ComplexMode, p: f64) -> ComplexMode {
    let cfg = *u.config();
    if p == 0.0 {
        return u.clone();
    }
    let cache = PropagatorCache::global();
    let sym = cache.symbol(&cfg, p);
    let out = cache.multiply(&cfg, u.values().to_vec(), |k| Complex64::new(sym[k], 0.0));
    ComplexMode::from_parts(cfg, out)
}

/// `J(phi (+) pi) = -H⁻¹pi (+) H phi`.
pub fn complex_structure_j(f: &PhaseVector) -> PhaseVector {
    let cfg = *f.config();
    let new_phi: Vec<f64> = real_multiplier(&cfg, f.pi(), -1.0).into_iter().map(|x| -x).collect();
    let new_pi = real_multiplier(&cfg, f.phi(), 1.0);
    PhaseVector::from_parts(cfg, new_phi, new_pi)
}

/// `(f, g)_J = σ(f, Jg) + i σ(f, g)`.
///
/// Conjugate-linear in the first argument, where multiplication by `i` acts
/// as `J`: `(Jf, g)_J = -i (f, g)_J`. The same slot convention is used by
/// [`crate::lattice::l2_inner`].
pub fn inner_product_j(f: &PhaseVector, g: &PhaseVector) -> Result<Complex64> {
    f.config().ensure_same(g.config())?;
    let re = symplectic_form(f, &complex_structure_j(g))?;
    let im = symplectic_form(f, g)?;
    Ok(Complex64::new(re, im))
}

/// Newton-Wigner map `K(phi (+) pi) = (H^(1/2) phi + i H^(-1/2) pi) / sqrt 2`.
///
/// Satisfies `2 Im <Kf, Kg> = σ(f, g)` and `<Kf, Kf> = (f, f)_J / 2`.
pub fn nw_map_k(f: &PhaseVector) -> ComplexMode {
    let cfg = *f.config();
    let re = real_multiplier(&cfg, f.phi(), 0.5);
    let im = real_multiplier(&cfg, f.pi(), -0.5);
    let values = re
        .into_iter()
        .zip(im)
        .map(|(x, y)| Complex64::new(x, y) * FRAC_1_SQRT_2)
        .collect();
    ComplexMode::from_parts(cfg, values)
}

/// Inverse of [`nw_map_k`]: the Cauchy data whose K-image is `u`.
pub fn nw_map_k_inverse(u: &ComplexMode) -> PhaseVector {
    let cfg = *u.config();
    let re: Vec<f64> = u.values().iter().map(|z| z.re * SQRT_2).collect();
    let im: Vec<f64> = u.values().iter().map(|z| z.im * SQRT_2).collect();
    PhaseVector::from_parts(
        cfg,
        real_multiplier(&cfg, &re, -0.5),
        real_multiplier(&cfg, &im, 0.5),
    )
}

/// The one-particle vector of `f` in Fock normalization, `sqrt 2 · Kf`.
///
/// `K` keeps the `2 Im <Kf, Kg> = σ(f, g)` normalization, while the Fock
/// construction wants `Im <u, v> = σ(f, g)` and `<u, u> = (f, f)_J`. This is
/// the only place the factor `sqrt 2` between the two is applied.
pub fn fock_mode(f: &PhaseVector) -> ComplexMode {
    nw_map_k(f).scale(Complex64::new(SQRT_2, 0.0))
}

/// Inverse of [`fock_mode`].
pub fn phase_vector_of_fock_mode(u: &ComplexMode) -> PhaseVector {
    nw_map_k_inverse(&u.scale(Complex64::new(FRAC_1_SQRT_2, 0.0)))
}

/// Classical evolution of Cauchy data by time `t`:
/// `phi_t = cos(Ht) phi + H⁻¹ sin(Ht) pi`, `pi_t = -H sin(Ht) phi + cos(Ht) pi`.
///
/// Under `K` this is multiplication by `exp(-i ω_k t)` on every Fourier mode.
pub fn time_evolve(f: &PhaseVector, t: f64) -> PhaseVector {
    let cfg = *f.config();
    if t == 0.0 {
        return f.clone();
    }
    let cache = PropagatorCache::global();
    let table = cache.dispersion(&cfg);
    let w = table.omega();
    let n = cfg.n_sites();
    let (fwd, inv) = cache.plans(n);
    let mut phi_hat = to_complex(f.phi());
    let mut pi_hat = to_complex(f.pi());
    fwd.process(&mut phi_hat);
    fwd.process(&mut pi_hat);
    let norm = 1.0 / n as f64;
    let mut new_phi = vec![Complex64::new(0.0, 0.0); n];
    let mut new_pi = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let (s, c) = (w[k] * t).sin_cos();
        new_phi[k] = (phi_hat[k] * c + pi_hat[k] * (s / w[k])) * norm;
        new_pi[k] = (-phi_hat[k] * (w[k] * s) + pi_hat[k] * c) * norm;
    }
    inv.process(&mut new_phi);
    inv.process(&mut new_pi);
    PhaseVector::from_parts(
        cfg,
        new_phi.into_iter().map(|z| z.re).collect(),
        new_pi.into_iter().map(|z| z.re).collect(),
    )
}

/// One-particle evolution `exp(-iHt) u`, the image of [`time_evolve`] under `K`.
pub fn evolve_mode(u: &ComplexMode, t: f64) -> ComplexMode {
    let cfg = *u.config();
    if t == 0.0 {
        return u.clone();
    }
    let cache = PropagatorCache::global();
    let table = cache.dispersion(&cfg);
    let w = table.omega();
    let out = cache.multiply(&cfg, u.values().to_vec(), |k| Complex64::from_polar(1.0, -w[k] * t));
    ComplexMode::from_parts(cfg, out)
}

/// `L^2` norm of `H g` on the complement of `region`.
///
/// `g` must vanish exactly outside `region`. For any nonzero such `g` on a
/// proper region the result is strictly positive: `H` is anti-local.
pub fn antilocality_tail(cfg: &LatticeConfig, g: &[f64], region: &Region) -> Result<f64> {
    if region.n_sites() != cfg.n_sites() {
        return config("region built for a different lattice");
    }
    let f = PhaseVector::new(*cfg, g.to_vec(), vec![0.0; cfg.n_sites()])?;
    if !is_supported_in(&f, region, 0.0) {
        return input("antilocality_tail: g is not supported in the region");
    }
    let hg = apply_h_power(cfg, g, 1.0)?;
    let s: f64 = (0..cfg.n_sites())
        .filter(|&i| !region.contains(i))
        .map(|i| hg[i] * hg[i])
        .sum();
    Ok((cfg.spacing() * s).sqrt())
}

/// Row of the `H^p` kernel: `H^p` applied to a unit-mass delta at site 0.
pub fn kernel_row(cfg: &LatticeConfig, p: f64) -> Vec<f64> {
    let mut delta = vec![0.0; cfg.n_sites()];
    delta[0] = cfg.spacing().recip();
    real_multiplier(cfg, &delta, p)
}

/// Fitted exponential decay of `|H δ|` away from the delta.
///
/// The rate approaches `m` (up to `O((ma)²)` lattice corrections).
pub fn antilocality_decay(cfg: &LatticeConfig) -> Result<DecayFit> {
    fit_kernel_row(cfg, &kernel_row(cfg, 1.0))
}

/// Dense `(-Δ + m²)^(p/2)` via symmetric eigendecomposition.
///
/// Independent of the FFT path: builds the circulant stencil matrix and takes
/// the matrix power through its eigenvalues.
pub fn dense_oracle(cfg: &LatticeConfig, p: f64) -> Result<DMatrix<f64>> {
    let n = cfg.n_sites();
    if n > DENSE_ORACLE_MAX_SITES {
        return Err(Error::SizeGuard {
            what: "n_sites",
            value: n,
            limit: DENSE_ORACLE_MAX_SITES,
        });
    }
    let lap = laplacian_plus_mass(cfg);
    if p == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    if p == 2.0 {
        return Ok(lap);
    }
    // The solver's eigenvectors are reliable but its reported eigenvalues can
    // be stale for this matrix (N = 256 is off by ~1e-6 relative), so take
    // Rayleigh quotients instead.
    let v = SymmetricEigen::new(lap.clone()).eigenvectors;
    let d = (v.transpose() * &lap * &v)
        .diagonal()
        .map(|l| l.powf(p / 2.0));
    Ok(&v * DMatrix::from_diagonal(&d) * v.transpose())
}

/// The literal nearest-neighbour matrix `-Δ + m²` on the periodic lattice.
pub fn laplacian_plus_mass(cfg: &LatticeConfig) -> DMatrix<f64> {
    let n = cfg.n_sites();
    let inv_a2 = 1.0 / (cfg.spacing() * cfg.spacing());
    let m2 = cfg.mass() * cfg.mass();
    let mut lap = DMatrix::zeros(n, n);
    for i in 0..n {
        lap[(i, i)] += 2.0 * inv_a2 + m2;
        lap[(i, (i + 1) % n)] -= inv_a2;
        lap[(i, (i + n - 1) % n)] -= inv_a2;
    }
    lap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{l2_inner, translate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize, a: f64, m: f64) -> LatticeConfig {
        LatticeConfig::new(n, a, m).unwrap()
    }

    fn random_pv(c: LatticeConfig, rng: &mut ChaCha8Rng) -> PhaseVector {
        let n = c.n_sites();
        PhaseVector::new(
            c,
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn dispersion_bounded_below_by_mass() {
        let t = DispersionTable::new(cfg(64, 0.1, 1.3));
        assert_eq!(t.omega()[0], 1.3);
        assert!(t.omega().iter().all(|&w| w >= 1.3));
    }

    #[test]
    fn constant_vector_scales_by_mass_power() {
        let c = cfg(32, 0.2, 1.7);
        let ones = vec![1.0; 32];
        for p in [-1.0, -0.5, 0.5, 1.0, 2.0, 0.3] {
            let out = apply_h_power(&c, &ones, p).unwrap();
            let expect = 1.7f64.powf(p);
            assert!(out.iter().all(|x| (x - expect).abs() < 1e-12 * expect.max(1.0)), "p={p}");
        }
        assert_eq!(apply_h_power(&c, &ones, 0.0).unwrap(), ones);
    }

    #[test]
    fn plane_wave_is_an_eigenvector_of_the_stencil() {
        let (n, a, m) = (64, 0.25, 0.8);
        let c = cfg(n, a, m);
        for k in [1usize, 5, 17, 32] {
            let x: Vec<f64> = (0..n).map(|j| (2.0 * PI * (k * j) as f64 / n as f64).cos()).collect();
            let out = apply_h_power(&c, &x, 2.0).unwrap();
            let lam = m * m + 2.0 / (a * a) * (1.0 - (2.0 * PI * k as f64 / n as f64).cos());
            let expect: Vec<f64> = x.iter().map(|v| lam * v).collect();
            assert!(max_diff(&out, &expect) < 1e-10 * lam, "k={k}");
        }
    }

    #[test]
    fn dense_oracle_edge_cases() {
        let c = cfg(16, 0.3, 1.0);
        assert_eq!(dense_oracle(&c, 0.0).unwrap(), DMatrix::identity(16, 16));
        let lap = dense_oracle(&c, 2.0).unwrap();
        assert_eq!(lap[(0, 0)], 2.0 / 0.09 + 1.0);
        assert_eq!(lap[(0, 1)], -1.0 / 0.09);
        assert_eq!(lap[(0, 15)], -1.0 / 0.09);
        assert_eq!(lap[(0, 2)], 0.0);
        // eigen route with p = 2 reproduces the stencil too
        let sq = dense_oracle(&c, 1.0).unwrap();
        assert!((&sq * &sq - &lap).abs().max() < 1e-9 * lap.abs().max());
        let big = cfg(513, 0.1, 1.0);
        assert!(matches!(dense_oracle(&big, 1.0), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn fft_matches_dense_oracle() {
        for n in [128, 256] {
            fft_matches_dense_oracle_at(n);
        }
    }

    fn fft_matches_dense_oracle_at(n: usize) {
        let c = cfg(n, 0.1, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for p in [-1.0, -0.5, 0.5, 1.0] {
            let dense = dense_oracle(&c, p).unwrap();
            let expect = &dense * nalgebra::DVector::from_column_slice(&v);
            let got = apply_h_power(&c, &v, p).unwrap();
            let err = max_diff(&got, expect.as_slice());
            assert!(err < 1e-9 * expect.amax().max(1.0), "p={p}: {err}");
        }
    }

    #[test]
    fn round_trip_powers() {
        let c = cfg(256, 0.05, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for p in [0.5, 1.0, 1.5] {
            let back = apply_h_power(&c, &apply_h_power(&c, &v, p).unwrap(), -p).unwrap();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let err = v.iter().zip(&back).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert!(err < 1e-10 * norm, "p={p}: {err}");
        }
    }

    #[test]
    fn j_on_zero_mode() {
        let c = cfg(32, 0.1, 2.0);
        let f = PhaseVector::new(c, vec![1.0; 32], vec![0.0; 32]).unwrap();
        let jf = complex_structure_j(&f);
        assert!(jf.phi().iter().all(|x| x.abs() < 1e-14));
        assert!(jf.pi().iter().all(|x| (x - 2.0).abs() < 1e-12));
        let ff = inner_product_j(&f, &f).unwrap();
        assert!((ff.re - 2.0 * c.length()).abs() < 1e-10);
        assert!(ff.im.abs() < 1e-14);
    }

    #[test]
    fn j_squares_to_minus_identity_and_is_conjugate_linear_slot() {
        let c = cfg(128, 0.1, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = random_pv(c, &mut rng);
            let g = random_pv(c, &mut rng);
            let jjf = complex_structure_j(&complex_structure_j(&f));
            assert!((&jjf + &f).max_abs() < 1e-10);
            let lhs = inner_product_j(&complex_structure_j(&f), &g).unwrap();
            let rhs = Complex64::new(0.0, -1.0) * inner_product_j(&f, &g).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn k_on_zero_mode_and_its_inverse() {
        let c = cfg(32, 0.1, 4.0);
        let f = PhaseVector::new(c, vec![1.0; 32], vec![0.0; 32]).unwrap();
        let kf = nw_map_k(&f);
        assert!(kf
            .values()
            .iter()
            .all(|z| (z - Complex64::new(2.0 * FRAC_1_SQRT_2, 0.0)).norm() < 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_pv(c, &mut rng);
        assert!((&nw_map_k_inverse(&nw_map_k(&g)) - &g).max_abs() < 1e-12);
        let u = fock_mode(&g);
        assert!((&phase_vector_of_fock_mode(&u) - &g).max_abs() < 1e-12);
    }

    #[test]
    fn k_norm_is_half_the_j_norm() {
        // Direct expansion: <Kf,Kf> = (<phi,H phi> + <pi,H^-1 pi>)/2.
        let c = cfg(64, 0.2, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let f = random_pv(c, &mut rng);
            let kf = nw_map_k(&f);
            let kk = l2_inner(&kf, &kf).unwrap();
            let jj = inner_product_j(&f, &f).unwrap();
            assert!((kk.re - 0.5 * jj.re).abs() < 1e-10 * jj.re);
            let u = fock_mode(&f);
            assert!((l2_inner(&u, &u).unwrap().re - jj.re).abs() < 1e-10 * jj.re);
        }
    }

    #[test]
    fn time_evolution_identity_and_group_law() {
        let c = cfg(64, 0.1, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_pv(c, &mut rng);
        assert_eq!(time_evolve(&f, 0.0), f);
        for (t, s) in [(1.7, -0.4), (10.0, -10.0), (3.3, 6.1)] {
            let two = time_evolve(&time_evolve(&f, s), t);
            let one = time_evolve(&f, t + s);
            assert!((&two - &one).max_abs() < 1e-9 * f.max_abs().max(1.0) * 40.0, "t={t} s={s}");
        }
    }

    #[test]
    fn time_evolution_commutes_with_j_and_translation() {
        let c = cfg(64, 0.1, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_pv(c, &mut rng);
        let a = time_evolve(&complex_structure_j(&f), 0.9);
        let b = complex_structure_j(&time_evolve(&f, 0.9));
        assert!((&a - &b).max_abs() < 1e-10 * a.max_abs());
        let a = time_evolve(&translate(&f, 5), 0.9);
        let b = translate(&time_evolve(&f, 0.9), 5);
        assert!((&a - &b).max_abs() < 1e-11 * a.max_abs());
    }

    #[test]
    fn k_intertwines_evolution_against_fourier_oracle() {
        // Oracle: evolve each DFT coefficient by exp(-i ω t) with a naive O(N²) DFT.
        let (n, a, m, t) = (48, 0.15, 0.9, 1.3);
        let c = cfg(n, a, m);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_pv(c, &mut rng);
        let kf = nw_map_k(&f);
        let omega = DispersionTable::new(c);
        let naive: Vec<Complex64> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let coeff: Complex64 = (0..n)
                            .map(|l| kf.values()[l] * Complex64::from_polar(1.0, -2.0 * PI * (k * l) as f64 / n as f64))
                            .sum();
                        coeff
                            * Complex64::from_polar(1.0, -omega.omega()[k] * t)
                            * Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64)
                    })
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect();
        let got = nw_map_k(&time_evolve(&f, t));
        let err = got
            .values()
            .iter()
            .zip(&naive)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        let via_mode = evolve_mode(&kf, t);
        let err2 = via_mode
            .values()
            .iter()
            .zip(got.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err2 < 1e-10, "{err2}");
    }

    #[test]
    fn antilocality_tail_cases() {
        let c = cfg(256, 0.1, 1.0);
        let region = Region::new(256, (0..6).chain(251..256)).unwrap();
        assert_eq!(antilocality_tail(&c, &vec![0.0; 256], &region).unwrap(), 0.0);
        let mut g = vec![0.0; 256];
        g[0] = 1.0;
        let tail = antilocality_tail(&c, &g, &region).unwrap();
        assert!(tail > 0.0);
        g[100] = 1.0;
        assert!(matches!(antilocality_tail(&c, &g, &region), Err(Error::Input(_))));
    }

    #[test]
    fn cache_is_referentially_transparent() {
        let c = cfg(40, 0.1, 1.0);
        let cache = PropagatorCache::new();
        let a = cache.symbol(&c, 0.5);
        let b = cache.symbol(&c, 0.5);
        assert!(Arc::ptr_eq(&a, &b));
        let fresh = PropagatorCache::new().symbol(&c, 0.5);
        assert_eq!(*a, *fresh);
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(move || PropagatorCache::global().symbol(&c, -0.5).to_vec()))
            .collect();
        let results: Vec<Vec<f64>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }
}
