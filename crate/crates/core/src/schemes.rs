//! Standard and Newton–Wigner localization schemes on the lattice.
//!
//! A scheme assigns to each region a set of one-particle generators. For
//! `Standard` these are the images under `sqrt 2 · K` of the field and
//! momentum deltas at each site; the Cauchy data are local but the modes
//! leak out of the region. For `NewtonWigner` they are the site modes
//! `e_x` and `i e_x`, which vanish outside the region by construction.
//! Both live in the same L² arena, so every check below compares like with
//! like.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{config, input, Error, Result};
use crate::fock::{
    annihilation_op, creation_op, cyclicity_rank, mode_directions, separating_defect,
    weyl_generators, FockOperator, FockSpace,
};
use crate::lattice::{
    l2_inner, symplectic_form, translate_mode, ComplexMode, LatticeConfig, PhaseVector, Region,
};
use crate::spectral::{fock_mode, phase_vector_of_fock_mode, time_evolve};
use crate::vacuum::{mode_support, region_generators, SchemeKind};

/// Residual below which isotony and covariance checks pass.
pub const SPAN_TOL: f64 = 1e-10;

/// Gram–Schmidt drops candidates whose residual falls below this (unit inputs).
pub const GRAM_SCHMIDT_DROP: f64 = 1e-12;

/// Equal-time commutator witnesses must vanish to this level.
pub const WEAK_MICROCAUSALITY_TOL: f64 = 1e-14;

/// Strong microcausality passes below this defect.
pub const STRONG_MICROCAUSALITY_TOL: f64 = 1e-6;

/// Rank tolerance for the vacuum cyclicity probe.
pub const CYCLICITY_TOL: f64 = 1e-8;

/// Real-span residual below which `i u` counts as a local generator.
const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSubspace {
    pub scheme: SchemeKind,
    pub region: Region,
    /// L²-orthonormal basis of the complex span of the generators.
    pub basis: Vec<ComplexMode>,
    /// Cauchy data of the generators (Fock-normalized, before orthonormalization).
    pub raw_phase_basis: Vec<PhaseVector>,
}

impl LocalSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Norm of the component of `u` orthogonal to the subspace.
    pub fn residual(&self, u: &ComplexMode) -> Result<f64> {
        let mut r = u.clone();
        for e in &self.basis {
            r = r.axpy(-l2_inner(e, &r)?, e);
        }
        Ok(r.norm())
    }

    /// Largest `mass_outside(region)` over the basis.
    pub fn leakage(&self) -> f64 {
        self.basis
            .iter()
            .map(|u| u.mass_outside(&self.region))
            .fold(0.0, f64::max)
    }
}

/// Pivoted complex Gram–Schmidt: always take the largest remaining residual,
/// drop anything below [`GRAM_SCHMIDT_DROP`] after unit normalization.
pub fn gram_schmidt(vectors: &[ComplexMode]) -> Result<Vec<ComplexMode>> {
    orthonormalize(vectors, |z| z)
}

/// Real Gram–Schmidt with respect to `Re <u, v>`: orthonormal real-linear
/// generators, as needed for sup-type commutator witnesses.
fn real_gram_schmidt(vectors: &[ComplexMode]) -> Result<Vec<ComplexMode>> {
    orthonormalize(vectors, |z| Complex64::new(z.re, 0.0))
}

/// Shared pivoted Gram–Schmidt. `coef` maps `<e, v>` to the projection
/// coefficient (identity for complex spans, real part for real spans).
/// The pivot is re-orthogonalized against the accepted vectors before it is
/// normalized, which keeps the basis orthonormal to rounding even when the
/// input family is close to degenerate.
fn orthonormalize(vectors: &[ComplexMode], coef: impl Fn(Complex64) -> Complex64) -> Result<Vec<ComplexMode>> {
    let mut rest: Vec<ComplexMode> = vectors
        .iter()
        .filter(|v| v.norm() > 0.0)
        .map(|v| v.scale(Complex64::new(v.norm().recip(), 0.0)))
        .collect();
    let mut out: Vec<ComplexMode> = Vec::new();
    while !rest.is_empty() {
        let (pivot, norm) = rest
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm < GRAM_SCHMIDT_DROP {
            break;
        }
        let mut e = rest.swap_remove(pivot);
        for q in &out {
            e = e.axpy(-coef(l2_inner(q, &e)?), q);
        }
        let n = e.norm();
        if n < GRAM_SCHMIDT_DROP {
            continue;
        }
        let e = e.scale(Complex64::new(n.recip(), 0.0));
        for v in rest.iter_mut() {
            *v = v.axpy(-coef(l2_inner(&e, v)?), &e);
        }
        out.push(e);
    }
    Ok(out)
}

pub fn local_subspace(
    scheme: SchemeKind,
    region: &Region,
    cfg: &LatticeConfig,
    n_per_site: usize,
) -> Result<LocalSubspace> {
    if region.is_empty() {
        return input("local subspace of an empty region");
    }
    if region.n_sites() != cfg.n_sites() {
        return config(format!(
            "region lives on {} sites, lattice has {}",
            region.n_sites(),
            cfg.n_sites()
        ));
    }
    if n_per_site != 1 {
        return config(format!(
            "a lattice site carries one field degree of freedom; n_per_site must be 1, got {n_per_site}"
        ));
    }
    let generators = region_generators(cfg, region, scheme);
    let raw_phase_basis = match scheme {
        SchemeKind::Standard => region
            .sites()
            .iter()
            .flat_map(|&x| {
                [
                    PhaseVector::field_delta(*cfg, x),
                    PhaseVector::momentum_delta(*cfg, x),
                ]
            })
            .collect(),
        SchemeKind::NewtonWigner => generators.iter().map(phase_vector_of_fock_mode).collect(),
    };
    Ok(LocalSubspace {
        scheme,
        region: region.clone(),
        basis: gram_schmidt(&generators)?,
        raw_phase_basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpanCheck {
    pub passed: bool,
    pub residual: f64,
}

impl SpanCheck {
    fn from_residual(residual: f64) -> Self {
        Self {
            passed: residual < SPAN_TOL,
            residual,
        }
    }
}

fn max_residual(vectors: &[ComplexMode], target: &LocalSubspace) -> Result<f64> {
    vectors
        .iter()
        .map(|u| target.residual(u))
        .try_fold(0.0, |m: f64, r| r.map(|r| m.max(r)))
}

pub fn check_isotony(
    scheme: SchemeKind,
    g1: &Region,
    g2: &Region,
    cfg: &LatticeConfig,
) -> Result<SpanCheck> {
    if !g1.is_subset(g2) {
        return input("isotony check needs G1 ⊆ G2");
    }
    let small = local_subspace(scheme, g1, cfg, 1)?;
    let big = local_subspace(scheme, g2, cfg, 1)?;
    Ok(SpanCheck::from_residual(max_residual(&small.basis, &big)?))
}

/// Compares `span subspace(G + shift)` with `translate(span subspace(G))`
/// in both directions.
pub fn check_translation_covariance(
    scheme: SchemeKind,
    region: &Region,
    shift: i64,
    cfg: &LatticeConfig,
) -> Result<SpanCheck> {
    let here = local_subspace(scheme, region, cfg, 1)?;
    let there = local_subspace(scheme, &region.shifted(shift), cfg, 1)?;
    let moved: Vec<ComplexMode> = here.basis.iter().map(|u| translate_mode(u, shift)).collect();
    let forward = max_residual(&moved, &there)?;
    let moved_space = LocalSubspace {
        basis: gram_schmidt(&moved)?,
        ..here
    };
    let backward = max_residual(&there.basis, &moved_space)?;
    Ok(SpanCheck::from_residual(forward.max(backward)))
}

fn require_disjoint(g1: &Region, g2: &Region) -> Result<()> {
    if g1.is_empty() || g2.is_empty() {
        return input("microcausality checks need nonempty regions");
    }
    if !g1.is_disjoint(g2) {
        return input("microcausality checks need disjoint regions");
    }
    Ok(())
}

/// Equal-time commutator witness between the two local algebras.
///
/// Standard: `max |σ(f, g)|` over raw Cauchy data; NW: `max |Im <u, v>|`
/// over basis modes. Weyl operators commute iff the witness vanishes.
pub fn check_weak_microcausality(
    scheme: SchemeKind,
    g1: &Region,
    g2: &Region,
    cfg: &LatticeConfig,
) -> Result<f64> {
    require_disjoint(g1, g2)?;
    let s1 = local_subspace(scheme, g1, cfg, 1)?;
    let s2 = local_subspace(scheme, g2, cfg, 1)?;
    let mut worst = 0.0f64;
    match scheme {
        SchemeKind::Standard => {
            for f in &s1.raw_phase_basis {
                for g in &s2.raw_phase_basis {
                    worst = worst.max(symplectic_form(f, g)?.abs());
                }
            }
        }
        SchemeKind::NewtonWigner => {
            for u in &s1.basis {
                for v in &s2.basis {
                    worst = worst.max(l2_inner(u, v)?.im.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Commutator witness between `U(t)⁻¹ 𝔄(G1) U(t)` and `𝔄(G2)` over a time grid.
///
/// Generators are real-orthonormalized in `Re <u, v>` (unit `(f,f)_J`), and
/// the witness at each time is the largest singular value of the matrix of
/// commutator phases: `σ(D_t f_i, g_j)` for Standard, `Im <e^{-iHt} u_i, v_j>`
/// for NW. For NW this is the operator norm of `P₂ e^{-iHt} P₁`.
pub fn check_strong_microcausality(
    scheme: SchemeKind,
    g1: &Region,
    g2: &Region,
    cfg: &LatticeConfig,
    times: &[f64],
) -> Result<f64> {
    require_disjoint(g1, g2)?;
    if times.is_empty() {
        return input("strong microcausality needs a nonempty time grid");
    }
    let gap = g1.site_gap(g2).expect("nonempty regions") as f64 * cfg.spacing();
    let t_max = times.iter().fold(0.0, |m: f64, t| m.max(t.abs()));
    if !(t_max < gap) {
        return input(format!(
            "time window |t| <= {t_max} reaches the light cone of separation {gap}"
        ));
    }
    let u1 = real_gram_schmidt(&region_generators(cfg, g1, scheme))?;
    let u2 = real_gram_schmidt(&region_generators(cfg, g2, scheme))?;
    let mut worst = 0.0f64;
    for &t in times {
        let m = match scheme {
            SchemeKind::Standard => {
                let f: Vec<PhaseVector> = u1
                    .iter()
                    .map(|u| time_evolve(&phase_vector_of_fock_mode(u), t))
                    .collect();
                let g: Vec<PhaseVector> = u2.iter().map(phase_vector_of_fock_mode).collect();
                let mut m = DMatrix::zeros(f.len(), g.len());
                for (i, fi) in f.iter().enumerate() {
                    for (j, gj) in g.iter().enumerate() {
                        m[(i, j)] = symplectic_form(fi, gj)?;
                    }
                }
                m
            }
            SchemeKind::NewtonWigner => {
                let moved: Vec<ComplexMode> =
                    u1.iter().map(|u| crate::spectral::evolve_mode(u, t)).collect();
                let mut m = DMatrix::zeros(moved.len(), u2.len());
                for (i, ui) in moved.iter().enumerate() {
                    for (j, vj) in u2.iter().enumerate() {
                        m[(i, j)] = l2_inner(ui, vj)?.im;
                    }
                }
                m
            }
        };
        worst = worst.max(m.singular_values().max());
    }
    Ok(worst)
}

/// Whether the real span of the region's generators is closed under `i`.
///
/// Closure is what lets `a(u) = (Φ(u) + iΦ(iu)) / sqrt 2` and hence `N(u)`
/// be built from local fields alone.
pub fn local_number_operator_available(
    scheme: SchemeKind,
    region: &Region,
    cfg: &LatticeConfig,
) -> Result<bool> {
    if region.is_empty() {
        return input("number operator check on an empty region");
    }
    let gens = region_generators(cfg, region, scheme);
    let n = cfg.n_sites();
    let real = |u: &ComplexMode| -> DVector<f64> {
        DVector::from_iterator(
            2 * n,
            u.values().iter().map(|z| z.re).chain(u.values().iter().map(|z| z.im)),
        )
    };
    let cols: Vec<DVector<f64>> = gens.iter().map(real).collect();
    let basis = DMatrix::from_columns(&cols);
    let svd = basis.clone().svd(true, true);
    for u in &gens {
        let target = real(&u.scale(Complex64::new(0.0, 1.0)));
        let coef = svd
            .solve(&target, 1e-12)
            .map_err(|e| Error::Input(format!("span solve failed: {e}")))?;
        if (&basis * coef - &target).norm() > CLOSURE_TOL * target.norm() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Total particle number in `region`: `Σ a_j* a_j` over the Fock modes
/// supported in the region.
///
/// Requires those modes to span every NW site mode of the region.
pub fn nw_local_number_operator(region: &Region, space: &FockSpace) -> Result<FockOperator> {
    let local = modes_in(region, space)?;
    let cfg = *space.mode_basis()[0].config();
    let local_basis: Vec<ComplexMode> = local.iter().map(|&j| space.mode_basis()[j].clone()).collect();
    let target = LocalSubspace {
        scheme: SchemeKind::NewtonWigner,
        region: region.clone(),
        basis: local_basis,
        raw_phase_basis: Vec::new(),
    };
    for &x in region.sites() {
        let r = target.residual(&ComplexMode::site_mode(cfg, x))?;
        if r > SPAN_TOL {
            return input(format!(
                "Fock modes do not span the NW subspace of the region (site {x} residual {r:.3e})"
            ));
        }
    }
    let mut n = space.zero_operator();
    for j in local {
        n = &n + &(&creation_op(space, j)? * &annihilation_op(space, j)?);
    }
    Ok(n)
}

/// Indices of Fock modes whose support lies in `region`.
fn modes_in(region: &Region, space: &FockSpace) -> Result<Vec<usize>> {
    if space.mode_basis().is_empty() {
        return input("Fock space has no lattice mode basis");
    }
    if space.mode_basis()[0].config().n_sites() != region.n_sites() {
        return config("region and Fock modes live on different lattices");
    }
    Ok((0..space.n_modes())
        .filter(|&j| mode_support(&space.mode_basis()[j]).is_subset(region))
        .collect())
}

/// Operators within `delta` (spectral norm) of the strictly local algebra of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct FappAlgebra<'a> {
    region: Region,
    delta: f64,
    space: &'a FockSpace,
}

impl<'a> FappAlgebra<'a> {
    pub fn new(region: Region, delta: f64, space: &'a FockSpace) -> Result<Self> {
        if !(delta > 0.0) {
            return config(format!("FAPP tolerance must be positive, got {delta}"));
        }
        Ok(Self { region, delta, space })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn contains(&self, a: &FockOperator) -> Result<bool> {
        Ok(fapp_distance(a, &self.region, self.space)? < self.delta)
    }
}

/// `‖A − Π(A)‖` where `Π` replaces the complement factor by its normalized
/// partial trace tensored with the identity. An upper bound on the true
/// spectral-norm distance to the local algebra.
pub fn fapp_distance(a: &FockOperator, region: &Region, space: &FockSpace) -> Result<f64> {
    let local = modes_in(region, space)?;
    for j in 0..space.n_modes() {
        if !local.contains(&j)
            && !mode_support(&space.mode_basis()[j]).is_disjoint(region)
        {
            return input(format!(
                "Fock mode {j} straddles the region boundary; the basis does not factorize"
            ));
        }
    }
    fapp_distance_modes(a, space, &local)
}

/// [`fapp_distance`] with the local factor given as a list of mode indices.
pub fn fapp_distance_modes(a: &FockOperator, space: &FockSpace, local: &[usize]) -> Result<f64> {
    if a.dim() != space.dim() {
        return config("operator and Fock space dimensions differ");
    }
    if let Some(&j) = local.iter().find(|&&j| j >= space.n_modes()) {
        return Err(Error::OutOfRange {
            index: j,
            limit: space.n_modes(),
        });
    }
    let d = space.cutoff() + 1;
    let n_rest = space.n_modes() - local.len();
    let d_rest = d.pow(n_rest as u32);
    // Split every basis index into (local part, rest part) labels.
    let split: Vec<(usize, usize)> = (0..space.dim())
        .map(|i| {
            let occ = space.occupations(i);
            let (mut l, mut r) = (0, 0);
            for (j, n) in occ.into_iter().enumerate() {
                if local.contains(&j) {
                    l = l * d + n;
                } else {
                    r = r * d + n;
                }
            }
            (l, r)
        })
        .collect();
    let d_local = d.pow(local.len() as u32);
    let mut reduced = DMatrix::<Complex64>::zeros(d_local, d_local);
    let m = a.matrix();
    for (i, &(li, ri)) in split.iter().enumerate() {
        for (k, &(lk, rk)) in split.iter().enumerate() {
            if ri == rk {
                reduced[(li, lk)] += m[(i, k)];
            }
        }
    }
    reduced /= Complex64::new(d_rest as f64, 0.0);
    let projected = DMatrix::from_fn(space.dim(), space.dim(), |i, k| {
        let (li, ri) = split[i];
        let (lk, rk) = split[k];
        if ri == rk {
            reduced[(li, lk)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(FockOperator::from_matrix(m - projected)?.spectral_norm())
}

/// Two-mode truncated Fock space and the region-1 Weyl generators used for
/// the Reeh–Schlieder rank and separating probes.
///
/// NW: modes `e_x1`, `e_x2` at the first site of each region; generators act
/// on mode 0 only. Standard: the orthonormalized images of the field and
/// momentum deltas at `x1`, the second of which is a J-completion that is not
/// supported near `x1` alone; generators are `W(λ u)` for the two unit raw
/// directions.
#[derive(Debug, Clone)]
pub struct ReehSchliederSetup {
    pub scheme: SchemeKind,
    pub space: FockSpace,
    pub generators: Vec<FockOperator>,
}

pub fn reeh_schlieder_setup(
    scheme: SchemeKind,
    cfg: &LatticeConfig,
    region1: &Region,
    region2: &Region,
    cutoff: usize,
) -> Result<ReehSchliederSetup> {
    require_disjoint(region1, region2)?;
    let x1 = region1.sites()[0];
    let x2 = region2.sites()[0];
    let (space, directions) = match scheme {
        SchemeKind::NewtonWigner => {
            let basis = vec![ComplexMode::site_mode(*cfg, x1), ComplexMode::site_mode(*cfg, x2)];
            let space = FockSpace::with_basis(basis, cutoff)?;
            let dirs = mode_directions(&space, &[0])?;
            (space, dirs)
        }
        SchemeKind::Standard => {
            let site = Region::new(cfg.n_sites(), [x1])?;
            let raw = [
                fock_mode(&PhaseVector::field_delta(*cfg, x1)),
                fock_mode(&PhaseVector::momentum_delta(*cfg, x1)),
            ];
            let space = FockSpace::with_basis(local_subspace(scheme, &site, cfg, 1)?.basis, cutoff)?;
            let dirs = raw
                .iter()
                .map(|u| {
                    let c = space.coefficients(u)?;
                    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    Ok(c.into_iter().map(|z| z / norm).collect())
                })
                .collect::<Result<Vec<Vec<Complex64>>>>()?;
            (space, dirs)
        }
    };
    let generators = weyl_generators(&space, &directions)?;
    Ok(ReehSchliederSetup {
        scheme,
        space,
        generators,
    })
}

impl ReehSchliederSetup {
    pub fn vacuum_rank(&self) -> Result<usize> {
        cyclicity_rank(&self.space, &self.generators, CYCLICITY_TOL)
    }

    /// Generators of the region algebra used in the separating probe: the NW
    /// algebra is taken to include the annihilator of its own mode, which is
    /// affiliated with it; the Standard algebra gets its Weyl operators only.
    pub fn separating_generators(&self) -> Result<Vec<FockOperator>> {
        let mut gens = self.generators.clone();
        if self.scheme == SchemeKind::NewtonWigner {
            gens.push(annihilation_op(&self.space, 0)?);
        }
        Ok(gens)
    }
}

/// Two disjoint regions, a time grid for the strong check and a translation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Geometry {
    pub lattice: LatticeConfig,
    pub region1: Region,
    pub region2: Region,
    pub times: Vec<f64>,
    pub shift: i64,
}

impl Geometry {
    /// Two single sites `separation` apart with times spanning
    /// `[-t_max, t_max]` in `n_times` steps.
    pub fn two_sites(
        lattice: LatticeConfig,
        first: usize,
        separation: f64,
        t_max: f64,
        n_times: usize,
    ) -> Result<Self> {
        Self::two_intervals(lattice, first, 1, separation, t_max, n_times)
    }

    /// Two intervals of `width` sites whose nearest sites are `separation`
    /// apart, with times spanning `[-t_max, t_max]` in `n_times` steps.
    pub fn two_intervals(
        lattice: LatticeConfig,
        first: usize,
        width: usize,
        separation: f64,
        t_max: f64,
        n_times: usize,
    ) -> Result<Self> {
        let gap = (separation / lattice.spacing()).round() as usize;
        let n = lattice.n_sites();
        if width == 0 || gap == 0 || 2 * (gap + width) > n {
            return config(format!(
                "two intervals of {width} sites at separation {separation} do not fit on a ring of length {}",
                lattice.length()
            ));
        }
        if n_times < 2 {
            return config("time grid needs at least two points");
        }
        let times = (0..n_times)
            .map(|k| -t_max + 2.0 * t_max * k as f64 / (n_times - 1) as f64)
            .collect();
        Ok(Self {
            lattice,
            region1: Region::interval(n, first % n, width)?,
            region2: Region::interval(n, (first + width - 1 + gap) % n, width)?,
            times,
            shift: (n / 4) as i64,
        })
    }

    pub fn separation(&self) -> Option<f64> {
        self.region1
            .site_gap(&self.region2)
            .map(|g| g as f64 * self.lattice.spacing())
    }
}

/// Settings for the truncated-Fock probes inside a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSettings {
    pub cutoff: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            cutoff: 3,
            samples: 500,
            seed: 0,
        }
    }
}

pub const REASON_ISOTONY: &str = "isotony";
pub const REASON_COVARIANCE: &str = "translation covariance";
pub const REASON_WEAK: &str = "weak microcausality defect";
pub const REASON_STRONG: &str = "strong microcausality defect";
pub const REASON_NUMBER: &str = "no local number operator";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeReport {
    pub scheme: SchemeKind,
    pub geometry: Geometry,
    pub isotony_ok: bool,
    pub translation_covariance_ok: bool,
    pub weak_microcausality_defect: f64,
    pub strong_microcausality_defect: f64,
    pub vacuum_cyclic_rank: usize,
    pub fock_dim: usize,
    pub vacuum_separating_defect: f64,
    pub local_number_op_available: bool,
    pub fundamentality_verdict: bool,
    pub reasons: Vec<String>,
}

/// Runs every assumption check and the Fock probes, then applies the
/// fundamentality criterion: isotony, covariance, weak and strong
/// microcausality must hold and local number operators must exist.
pub fn fundamentality_report(
    scheme: SchemeKind,
    geometry: &Geometry,
    probes: ProbeSettings,
) -> Result<SchemeReport> {
    let Geometry {
        lattice: cfg,
        region1: g1,
        region2: g2,
        times,
        shift,
    } = geometry;
    if g1.is_empty() || g2.is_empty() || !g1.is_disjoint(g2) {
        return input("fundamentality report needs two nonempty disjoint regions");
    }
    let isotony = check_isotony(scheme, g1, &g1.union(g2), cfg)?;
    let covariance = check_translation_covariance(scheme, g1, *shift, cfg)?;
    let weak = check_weak_microcausality(scheme, g1, g2, cfg)?;
    let strong = check_strong_microcausality(scheme, g1, g2, cfg, times)?;
    let number_op = local_number_operator_available(scheme, g1, cfg)?;
    let setup = reeh_schlieder_setup(scheme, cfg, g1, g2, probes.cutoff)?;
    let rank = setup.vacuum_rank()?;
    let separating = separating_defect(
        &setup.space,
        &setup.separating_generators()?,
        &setup.space.vacuum(),
        probes.samples,
        probes.seed,
    )?;

    let mut reasons = Vec::new();
    if !isotony.passed {
        reasons.push(REASON_ISOTONY.to_string());
    }
    if !covariance.passed {
        reasons.push(REASON_COVARIANCE.to_string());
    }
    if weak > WEAK_MICROCAUSALITY_TOL {
        reasons.push(REASON_WEAK.to_string());
    }
    if strong > STRONG_MICROCAUSALITY_TOL {
        reasons.push(REASON_STRONG.to_string());
    }
    if !number_op {
        reasons.push(REASON_NUMBER.to_string());
    }
    Ok(SchemeReport {
        scheme,
        geometry: geometry.clone(),
        isotony_ok: isotony.passed,
        translation_covariance_ok: covariance.passed,
        weak_microcausality_defect: weak,
        strong_microcausality_defect: strong,
        vacuum_cyclic_rank: rank,
        fock_dim: setup.space.dim(),
        vacuum_separating_defect: separating.defect,
        local_number_op_available: number_op,
        fundamentality_verdict: reasons.is_empty(),
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_op, weyl_op};

    fn cfg() -> LatticeConfig {
        LatticeConfig::new(128, 0.1, 1.0).unwrap()
    }

    fn interval(start: usize, len: usize) -> Region {
        Region::interval(128, start, len).unwrap()
    }

    #[test]
    fn nw_subspace_is_strictly_local() {
        let g = interval(10, 3);
        let s = local_subspace(SchemeKind::NewtonWigner, &g, &cfg(), 1).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.leakage(), 0.0);
        for (i, u) in s.basis.iter().enumerate() {
            for (j, v) in s.basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((l2_inner(u, v).unwrap() - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_subspace_leaks() {
        let g = interval(40, 1);
        let s = local_subspace(SchemeKind::Standard, &g, &cfg(), 1).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.leakage() > 1e-3);
        for f in &s.raw_phase_basis {
            assert!(f.support().is_subset(&g));
        }
    }

    #[test]
    fn subspace_errors() {
        let empty = Region::empty(128);
        assert!(local_subspace(SchemeKind::Standard, &empty, &cfg(), 1).is_err());
        assert!(local_subspace(SchemeKind::Standard, &interval(0, 2), &cfg(), 2).is_err());
        let other = Region::interval(64, 0, 2).unwrap();
        assert!(local_subspace(SchemeKind::NewtonWigner, &other, &cfg(), 1).is_err());
    }

    #[test]
    fn isotony_both_schemes() {
        for scheme in SchemeKind::ALL {
            let same = check_isotony(scheme, &interval(5, 3), &interval(5, 3), &cfg()).unwrap();
            assert!(same.passed);
            assert!(same.residual < 1e-12);
            let nested = check_isotony(scheme, &interval(6, 2), &interval(4, 6), &cfg()).unwrap();
            assert!(nested.passed, "{scheme}: {}", nested.residual);
            assert!(check_isotony(scheme, &interval(0, 3), &interval(2, 3), &cfg()).is_err());
        }
    }

    #[test]
    fn translation_covariance_both_schemes() {
        for scheme in SchemeKind::ALL {
            for shift in [0, 128, 17, -5] {
                let c = check_translation_covariance(scheme, &interval(3, 3), shift, &cfg()).unwrap();
                assert!(c.passed, "{scheme} shift {shift}: {}", c.residual);
            }
        }
    }

    #[test]
    fn weak_microcausality_is_exact() {
        for scheme in SchemeKind::ALL {
            let d = check_weak_microcausality(scheme, &interval(10, 3), &interval(13, 4), &cfg()).unwrap();
            assert!(d < 1e-14, "{scheme}: {d}");
            assert!(check_weak_microcausality(scheme, &interval(10, 3), &interval(10, 3), &cfg()).is_err());
        }
    }

    #[test]
    fn strong_microcausality_at_zero_time_is_weak() {
        for scheme in SchemeKind::ALL {
            let d = check_strong_microcausality(scheme, &interval(10, 2), &interval(30, 2), &cfg(), &[0.0])
                .unwrap();
            assert!(d < 1e-14, "{scheme}: {d}");
        }
    }

    #[test]
    fn strong_microcausality_rejects_timelike_window() {
        let r = check_strong_microcausality(
            SchemeKind::Standard,
            &interval(10, 1),
            &interval(20, 1),
            &cfg(),
            &[0.5, 1.0],
        );
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn strong_microcausality_dichotomy() {
        let lat = LatticeConfig::new(512, 0.05, 1.0).unwrap();
        let geo = Geometry::two_sites(lat, 100, 4.0, 2.0, 9).unwrap();
        let std = check_strong_microcausality(
            SchemeKind::Standard,
            &geo.region1,
            &geo.region2,
            &lat,
            &geo.times,
        )
        .unwrap();
        let nw = check_strong_microcausality(
            SchemeKind::NewtonWigner,
            &geo.region1,
            &geo.region2,
            &lat,
            &geo.times,
        )
        .unwrap();
        assert!(std < 1e-6, "standard {std}");
        assert!(nw > 1e3 * std.max(1e-16), "nw {nw} vs standard {std}");
    }

    #[test]
    fn number_operator_availability() {
        let g = interval(20, 2);
        assert!(local_number_operator_available(SchemeKind::NewtonWigner, &g, &cfg()).unwrap());
        assert!(!local_number_operator_available(SchemeKind::Standard, &g, &cfg()).unwrap());
    }

    fn two_site_nw(cutoff: usize) -> (FockSpace, Region, Region) {
        let c = cfg();
        let basis = vec![ComplexMode::site_mode(c, 10), ComplexMode::site_mode(c, 50)];
        (
            FockSpace::with_basis(basis, cutoff).unwrap(),
            Region::new(128, [10]).unwrap(),
            Region::new(128, [50]).unwrap(),
        )
    }

    #[test]
    fn nw_number_operator_commutes_with_complement() {
        let (space, g, _) = two_site_nw(3);
        let n = nw_local_number_operator(&g, &space).unwrap();
        let dirs = mode_directions(&space, &[1]).unwrap();
        for w in weyl_generators(&space, &dirs).unwrap() {
            assert!(n.commutator(&w).spectral_norm() < 1e-10);
        }
        let ev = n.hermitian_eigenvalues();
        for l in ev {
            assert!((l - l.round()).abs() < 1e-12 && l > -1e-12 && l <= 3.0 + 1e-12);
        }
        let wide = Region::new(128, [10, 11]).unwrap();
        assert!(nw_local_number_operator(&wide, &space).is_err());
    }

    #[test]
    fn phase_rotation_keeps_number_operator_but_translation_moves_support() {
        let c = cfg();
        let f = PhaseVector::field_delta(c, 30);
        let u = fock_mode(&f);
        let rotated = u.scale(Complex64::from_polar(1.0, 0.8));
        let space = FockSpace::new(1, 4).unwrap();
        let coef = |v: &ComplexMode| vec![Complex64::new(v.norm(), 0.0) * (l2_inner(&u, v).unwrap() / (u.norm() * v.norm()))];
        let n0 = number_op(&space, &coef(&u)).unwrap();
        let n1 = number_op(&space, &coef(&rotated)).unwrap();
        assert!((&n0 - &n1).max_abs() < 1e-12);
        let rotated_data = phase_vector_of_fock_mode(&rotated);
        assert!(!rotated_data.support().is_subset(&f.support()));
        assert!(crate::lattice::translate(&f, 3).support() != f.support());
    }

    #[test]
    fn fapp_distance_examples() {
        let (space, g, _) = two_site_nw(1);
        let b = weyl_op(&space, &[Complex64::new(0.3, 0.2), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(fapp_distance(&b, &g, &space).unwrap() < 1e-12);
        let a = annihilation_op(&space, 0).unwrap();
        assert!(fapp_distance(&a, &g, &space).unwrap() < 1e-12);
        // I ⊗ σ_z on the complement mode: traceless with unit norm.
        let sz = DMatrix::from_fn(4, 4, |i, k| {
            if i == k {
                Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let op = FockOperator::from_matrix(sz).unwrap();
        assert!((fapp_distance(&op, &g, &space).unwrap() - 1.0).abs() < 1e-12);
        let alg = FappAlgebra::new(g.clone(), 0.1, &space).unwrap();
        assert!(alg.contains(&b).unwrap());
        assert!(!alg.contains(&op).unwrap());
        assert!(FappAlgebra::new(g, 0.0, &space).is_err());
    }

    #[test]
    fn fapp_distance_triangle_inequality() {
        use rand::{Rng, SeedableRng};
        let (space, g, _) = two_site_nw(1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut random = || {
            FockOperator::from_matrix(DMatrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }))
            .unwrap()
        };
        for _ in 0..20 {
            let (x, y) = (random(), random());
            let dx = fapp_distance(&x, &g, &space).unwrap();
            let dy = fapp_distance(&y, &g, &space).unwrap();
            let dxy = fapp_distance(&(&x + &y), &g, &space).unwrap();
            assert!(dxy <= dx + dy + 1e-12);
        }
    }

    #[test]
    fn reeh_schlieder_ranks() {
        let g1 = Region::new(128, [10]).unwrap();
        let g2 = Region::new(128, [50]).unwrap();
        let nw = reeh_schlieder_setup(SchemeKind::NewtonWigner, &cfg(), &g1, &g2, 3).unwrap();
        assert_eq!(nw.vacuum_rank().unwrap(), 4);
        let st = reeh_schlieder_setup(SchemeKind::Standard, &cfg(), &g1, &g2, 3).unwrap();
        assert_eq!(st.vacuum_rank().unwrap(), 16);
    }

    #[test]
    fn report_verdicts() {
        let lat = LatticeConfig::new(256, 0.05, 1.0).unwrap();
        let geo = Geometry::two_sites(lat, 20, 4.0, 2.0, 5).unwrap();
        let probes = ProbeSettings {
            samples: 50,
            ..ProbeSettings::default()
        };
        let st = fundamentality_report(SchemeKind::Standard, &geo, probes).unwrap();
        assert!(!st.fundamentality_verdict);
        assert_eq!(st.reasons, vec![REASON_NUMBER.to_string()]);
        let nw = fundamentality_report(SchemeKind::NewtonWigner, &geo, probes).unwrap();
        assert!(!nw.fundamentality_verdict);
        assert_eq!(nw.reasons, vec![REASON_STRONG.to_string()]);

        let mut bad = geo.clone();
        bad.region2 = bad.region1.clone();
        assert!(fundamentality_report(SchemeKind::Standard, &bad, probes).is_err());
    }
}
