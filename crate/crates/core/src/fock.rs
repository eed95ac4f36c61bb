//! Truncated bosonic Fock space over a handful of one-particle modes.
//!
//! Basis states are occupation tuples `(n_0, ..., n_{M-1})` with
//! `0 <= n_j <= cutoff`, ordered with mode 0 most significant (the usual
//! Kronecker ordering). Operators are dense complex matrices.
//!
//! Field operators follow `Φ(c) = (a*(c) + a(c)) / sqrt 2` with `a*(c)`
//! linear and `a(c)` conjugate-linear in the mode coefficients `c`, and
//! `W(c) = exp(iΦ(c))`. For Fock-normalized modes `u = sqrt 2 · Kf` this
//! reproduces `W(f)W(g) = exp(-iσ(f,g)/2) W(f+g)` below the cutoff.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config, input, Error, Result};
use crate::lattice::{l2_inner, ComplexMode};

pub const MAX_MODES: usize = 6;
pub const MAX_CUTOFF: usize = 8;
pub const MAX_DIM: usize = 10_000;

/// Words of length up to this many generators enter the cyclicity span.
pub const MAX_WORD_LEN: usize = 3;

/// Displacement magnitudes used for Weyl generators, per direction.
pub const WEYL_GRID: [f64; 3] = [0.25, 0.5, 1.0];

/// Tolerance for orthonormality of the mode basis and for span membership.
pub const BASIS_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    n_modes: usize,
    cutoff: usize,
    dim: usize,
    mode_basis: Vec<ComplexMode>,
}

impl FockSpace {
    /// Fock space over `n_modes` abstract modes with no lattice realization.
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return config(format!("n_modes must be in 1..={MAX_MODES}, got {n_modes}"));
        }
        if cutoff == 0 || cutoff > MAX_CUTOFF {
            return config(format!("cutoff must be in 1..={MAX_CUTOFF}, got {cutoff}"));
        }
        let dim = (cutoff + 1).pow(n_modes as u32);
        if dim > MAX_DIM {
            return Err(Error::SizeGuard {
                what: "Fock dimension",
                value: dim,
                limit: MAX_DIM,
            });
        }
        Ok(Self {
            n_modes,
            cutoff,
            dim,
            mode_basis: Vec::new(),
        })
    }

    /// Fock space over an `L^2`-orthonormal list of lattice modes.
    pub fn with_basis(mode_basis: Vec<ComplexMode>, cutoff: usize) -> Result<Self> {
        let mut space = Self::new(mode_basis.len(), cutoff)?;
        for (i, u) in mode_basis.iter().enumerate() {
            for (j, v) in mode_basis.iter().enumerate().skip(i) {
                let g = l2_inner(u, v)?;
                let want = if i == j { ONE } else { ZERO };
                if (g - want).norm() > BASIS_TOL {
                    return input(format!(
                        "mode basis not orthonormal: <e{i}, e{j}> = {g}"
                    ));
                }
            }
        }
        space.mode_basis = mode_basis;
        Ok(space)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode_basis(&self) -> &[ComplexMode] {
        &self.mode_basis
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow((self.n_modes - 1 - mode) as u32)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes)
            .map(|j| (index / self.stride(j)) % (self.cutoff + 1))
            .collect()
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .enumerate()
            .map(|(j, &n)| n * self.stride(j))
            .sum()
    }

    /// Basis indices whose every occupation lies at least `margin` below the cutoff.
    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.occupations(i).iter().all(|&n| n + margin <= self.cutoff))
            .collect()
    }

    pub fn vacuum(&self) -> FockVector {
        let mut amp = DVector::zeros(self.dim);
        amp[0] = ONE;
        FockVector { amplitudes: amp }
    }

    pub fn basis_state(&self, occupations: &[usize]) -> FockVector {
        let mut amp = DVector::zeros(self.dim);
        amp[self.index_of(occupations)] = ONE;
        FockVector { amplitudes: amp }
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator {
            matrix: DMatrix::identity(self.dim, self.dim),
        }
    }

    pub fn zero_operator(&self) -> FockOperator {
        FockOperator {
            matrix: DMatrix::zeros(self.dim, self.dim),
        }
    }

    /// Coefficients `<e_j, u>` of a lattice mode in the mode basis.
    ///
    /// Fails if `u` is not in the span of the basis.
    pub fn coefficients(&self, u: &ComplexMode) -> Result<Vec<Complex64>> {
        if self.mode_basis.is_empty() {
            return input("Fock space has no lattice mode basis");
        }
        let c: Vec<Complex64> = self
            .mode_basis
            .iter()
            .map(|e| l2_inner(e, u))
            .collect::<Result<_>>()?;
        let mut residual = u.clone();
        for (e, cj) in self.mode_basis.iter().zip(&c) {
            residual = residual.axpy(-cj, e);
        }
        if residual.norm() > 1e-8 * u.norm().max(1.0) {
            return input(format!(
                "mode lies outside the Fock mode span (residual {:.3e})",
                residual.norm()
            ));
        }
        Ok(c)
    }

    fn check_coeffs(&self, c: &[Complex64]) -> Result<()> {
        if c.len() != self.n_modes {
            return input(format!(
                "coefficient vector has {} entries, space has {} modes",
                c.len(),
                self.n_modes
            ));
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::OutOfRange {
                index: mode,
                limit: self.n_modes,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.unscale(self.norm()),
        }
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Random unit vector with i.i.d. Gaussian-ish amplitudes.
    pub fn random_unit(dim: usize, rng: &mut impl Rng) -> Self {
        let amp = DVector::from_fn(dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Self { amplitudes: amp }.normalized()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return config("Fock operators must be square");
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            matrix: &self.matrix * s,
        }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector {
            amplitudes: &self.matrix * &v.amplitudes,
        }
    }

    pub fn commutator(&self, other: &FockOperator) -> FockOperator {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.matrix.iter().all(|z| *z == ZERO) {
            return 0.0;
        }
        self.matrix
            .clone()
            .singular_values()
            .iter()
            .fold(0.0, |m: f64, s| m.max(*s))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m: f64, z| m.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Real eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `exp(i · self)` for Hermitian `self`, through its eigendecomposition.
    pub fn exp_i_hermitian(&self) -> FockOperator {
        let eig = self.matrix.clone().symmetric_eigen();
        let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l));
        let v = &eig.eigenvectors;
        Self {
            matrix: v * DMatrix::from_diagonal(&phases) * v.adjoint(),
        }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

pub fn annihilation_op(space: &FockSpace, mode: usize) -> Result<FockOperator> {
    space.check_mode(mode)?;
    let stride = space.stride(mode);
    let mut m = DMatrix::zeros(space.dim, space.dim);
    for idx in 0..space.dim {
        let n = (idx / stride) % (space.cutoff + 1);
        if n > 0 {
            m[(idx - stride, idx)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
    }
    Ok(FockOperator { matrix: m })
}

pub fn creation_op(space: &FockSpace, mode: usize) -> Result<FockOperator> {
    Ok(annihilation_op(space, mode)?.adjoint())
}

/// `a(c) = Σ conj(c_j) a_j`, conjugate-linear in `c`.
pub fn smeared_annihilation(space: &FockSpace, c: &[Complex64]) -> Result<FockOperator> {
    space.check_coeffs(c)?;
    let mut out = space.zero_operator();
    for (j, cj) in c.iter().enumerate() {
        if *cj != ZERO {
            out = &out + &annihilation_op(space, j)?.scale(cj.conj());
        }
    }
    Ok(out)
}

/// `a*(c) = Σ c_j a_j^†`, linear in `c`.
pub fn smeared_creation(space: &FockSpace, c: &[Complex64]) -> Result<FockOperator> {
    Ok(smeared_annihilation(space, c)?.adjoint())
}

/// `Φ(c) = (a*(c) + a(c)) / sqrt 2`.
pub fn field_op(space: &FockSpace, c: &[Complex64]) -> Result<FockOperator> {
    let a = smeared_annihilation(space, c)?;
    Ok((&a.adjoint() + &a).scale(Complex64::new(FRAC_1_SQRT_2, 0.0)))
}

/// `W(c) = exp(iΦ(c))`; exactly the identity for `c = 0`.
pub fn weyl_op(space: &FockSpace, c: &[Complex64]) -> Result<FockOperator> {
    space.check_coeffs(c)?;
    if c.iter().all(|z| *z == ZERO) {
        return Ok(space.identity());
    }
    Ok(field_op(space, c)?.exp_i_hermitian())
}

/// `W(λ c)` for every `λ` in [`WEYL_GRID`] and every direction, direction-major.
pub fn weyl_generators(space: &FockSpace, directions: &[Vec<Complex64>]) -> Result<Vec<FockOperator>> {
    let mut out = Vec::with_capacity(directions.len() * WEYL_GRID.len());
    for d in directions {
        for lam in WEYL_GRID {
            let c: Vec<Complex64> = d.iter().map(|z| z * lam).collect();
            out.push(weyl_op(space, &c)?);
        }
    }
    Ok(out)
}

/// Real and imaginary unit directions on each listed mode.
pub fn mode_directions(space: &FockSpace, modes: &[usize]) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::new();
    for &m in modes {
        space.check_mode(m)?;
        for unit in [ONE, Complex64::new(0.0, 1.0)] {
            let mut c = vec![ZERO; space.n_modes];
            c[m] = unit;
            out.push(c);
        }
    }
    Ok(out)
}

/// `Im <c_f, c_g>`, the symplectic form of the underlying Cauchy data.
pub fn coefficient_symplectic(cf: &[Complex64], cg: &[Complex64]) -> f64 {
    cf.iter().zip(cg).map(|(a, b)| (a.conj() * b).im).sum()
}

/// `‖(W(f)W(g) − e^{−iσ(f,g)/2} W(f+g)) Ω‖`.
///
/// Measured on the vacuum column, where truncation effects are smallest;
/// the full operator norm is dominated by states at the cutoff.
pub fn weyl_relation_defect(space: &FockSpace, cf: &[Complex64], cg: &[Complex64]) -> Result<f64> {
    space.check_coeffs(cf)?;
    space.check_coeffs(cg)?;
    let sum: Vec<Complex64> = cf.iter().zip(cg).map(|(a, b)| a + b).collect();
    let phase = Complex64::from_polar(1.0, -0.5 * coefficient_symplectic(cf, cg));
    let lhs = &weyl_op(space, cf)? * &weyl_op(space, cg)?;
    let rhs = weyl_op(space, &sum)?.scale(phase);
    Ok((&lhs - &rhs).apply(&space.vacuum()).norm())
}

/// `<Ω, W(c) Ω>` from the truncated matrices.
pub fn vacuum_expectation(space: &FockSpace, op: &FockOperator) -> Complex64 {
    let v = space.vacuum();
    v.inner(&op.apply(&v))
}

/// `N(c) = a*(c) a(c)`.
pub fn number_op(space: &FockSpace, c: &[Complex64]) -> Result<FockOperator> {
    space.check_coeffs(c)?;
    // Σ_jk c_j conj(c_k) a_j^† a_k, built from the Hermitian coefficient
    // matrix so that a global phase on `c` cancels entry by entry.
    let n = space.n_modes;
    let mut out = space.zero_operator();
    for j in 0..n {
        for k in 0..n {
            let w = c[j] * c[k].conj();
            if w != ZERO {
                let term = &creation_op(space, j)? * &annihilation_op(space, k)?;
                out = &out + &term.scale(w);
            }
        }
    }
    Ok(out)
}

/// Columns `A·v` for every word `A` of length `<= MAX_WORD_LEN` in the generators
/// (the empty word included), in deterministic breadth-first order.
pub fn word_orbit(generators: &[FockOperator], vector: &FockVector) -> Vec<DVector<Complex64>> {
    let mut all = vec![vector.amplitudes.clone()];
    let mut frontier = vec![vector.amplitudes.clone()];
    for _ in 0..MAX_WORD_LEN {
        let mut next = Vec::with_capacity(frontier.len() * generators.len());
        for v in &frontier {
            for g in generators {
                next.push(&g.matrix * v);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Numerical rank of `span{A·v}` over generator words.
pub fn orbit_rank(generators: &[FockOperator], vector: &FockVector, tol: f64) -> usize {
    let cols = word_orbit(generators, vector);
    let m = DMatrix::from_columns(&cols);
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0, |a: f64, s| a.max(*s));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Rank of the vacuum orbit under the algebra generated by `generators`.
///
/// Equals `space.dim()` exactly when the vacuum is cyclic (at this word length).
pub fn cyclicity_rank(space: &FockSpace, generators: &[FockOperator], tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return input("cyclicity_rank needs tol > 0");
    }
    check_generators(space, generators)?;
    Ok(orbit_rank(generators, &space.vacuum(), tol))
}

fn check_generators(space: &FockSpace, generators: &[FockOperator]) -> Result<()> {
    if let Some(g) = generators.iter().find(|g| g.dim() != space.dim) {
        return config(format!(
            "generator of dimension {} on a space of dimension {}",
            g.dim(),
            space.dim
        ));
    }
    Ok(())
}

/// Result of a separating-vector probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingProbe {
    /// `min ‖A v‖ / ‖A‖` over the sampled algebra elements.
    pub defect: f64,
    /// The minimizing element as `(coefficient, word)` terms; each word lists
    /// generator indices, rightmost applied first.
    pub witness: Vec<(Complex64, Vec<usize>)>,
}

/// Sample algebra elements and report how close one comes to annihilating `vector`.
///
/// Every single generator is tried first, then `samples` random linear
/// combinations of up to three random words (length `1..=MAX_WORD_LEN`).
/// A defect of 0 means some nonzero element kills the vector, so it is not
/// separating.
pub fn separating_defect(
    space: &FockSpace,
    generators: &[FockOperator],
    vector: &FockVector,
    samples: usize,
    seed: u64,
) -> Result<SeparatingProbe> {
    if samples == 0 {
        return input("separating_defect needs samples > 0");
    }
    if generators.is_empty() {
        return input("separating_defect needs at least one generator");
    }
    check_generators(space, generators)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = SeparatingProbe {
        defect: f64::INFINITY,
        witness: Vec::new(),
    };
    let mut consider = |terms: Vec<(Complex64, Vec<usize>)>| {
        let mut a = space.zero_operator();
        for (c, word) in &terms {
            let mut w = space.identity();
            for &g in word {
                w = &w * &generators[g];
            }
            a = &a + &w.scale(*c);
        }
        let norm = a.spectral_norm();
        if norm < 1e-12 {
            return;
        }
        let ratio = a.apply(vector).norm() / norm;
        if ratio < best.defect {
            best = SeparatingProbe {
                defect: ratio,
                witness: terms,
            };
        }
    };
    for g in 0..generators.len() {
        consider(vec![(ONE, vec![g])]);
    }
    for _ in 0..samples {
        let n_terms = rng.gen_range(1..=3);
        let terms = (0..n_terms)
            .map(|_| {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let len = rng.gen_range(1..=MAX_WORD_LEN);
                let word = (0..len).map(|_| rng.gen_range(0..generators.len())).collect();
                (c, word)
            })
            .collect();
        consider(terms);
    }
    Ok(best)
}
