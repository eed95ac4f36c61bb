//! The six experiments. Each one only calls into `fieldloc` and packages the
//! numbers as CSV tables plus a JSON report.

use fieldloc::fock::{
    cyclicity_rank, mode_directions, orbit_rank, separating_defect, vacuum_expectation,
    weyl_generators, weyl_op, weyl_relation_defect, FockSpace, FockVector,
};
use fieldloc::lattice::{ComplexMode, LatticeConfig, Region};
use fieldloc::schemes::{
    check_strong_microcausality, check_weak_microcausality, fundamentality_report,
    reeh_schlieder_setup, SchemeReport,
};
use fieldloc::spectral::{antilocality_decay, antilocality_tail, kernel_row, phase_vector_of_fock_mode};
use fieldloc::vacuum::{
    correlation_fit, factorization_fit, factorization_profile, field_two_point_row,
    reduced_purity, weyl_vacuum_expectation, SchemeKind,
};
use fieldloc::fit::DecayFit;
use log::info;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::output::{Cell, Table};

pub const REPORT_SCHEMA: &str = "fieldloc-report/1";

/// Tables and a JSON report produced by one experiment.
#[derive(Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub tables: Vec<Table>,
    pub report: serde_json::Value,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    experiment: &'a str,
    seed: u64,
    results: T,
}

fn outcome<T: Serialize>(name: &'static str, cfg: &RunConfig, tables: Vec<Table>, results: T) -> Outcome {
    let report = serde_json::to_value(Envelope {
        schema: REPORT_SCHEMA,
        experiment: name,
        seed: cfg.seed,
        results,
    })
    .expect("reports serialize");
    Outcome { name, tables, report }
}

fn row<const K: usize>(cells: [Cell; K]) -> Vec<Cell> {
    cells.into()
}

/// A random function on `len` consecutive sites starting at a random site,
/// with entries uniform in `[-1, 1]` and zero elsewhere.
pub fn random_local_probe(n_sites: usize, len: usize, rng: &mut impl Rng) -> (Region, Vec<f64>) {
    let start = rng.gen_range(0..n_sites);
    let region = Region::interval(n_sites, start, len).expect("len < n_sites");
    let mut g = vec![0.0; n_sites];
    for &i in region.sites() {
        g[i] = rng.gen_range(-1.0..1.0);
    }
    if g.iter().all(|&x| x == 0.0) {
        g[region.sites()[0]] = 1.0;
    }
    (region, g)
}

#[derive(Serialize)]
struct AntilocalityMass {
    mass: f64,
    fit: DecayFit,
    rate_over_mass: f64,
    min_tail_ratio: f64,
}

pub fn antilocality(cfg: &RunConfig, masses: &[f64]) -> Result<Outcome, CliError> {
    let al = &cfg.antilocality;
    let mut rates = Table::new(
        "antilocality_rates",
        vec!["mass", "n_sites", "spacing", "fitted_rate", "rate_over_mass", "power", "n_points"],
    );
    let mut tails = Table::new(
        "antilocality_tails",
        vec!["mass", "probe", "start_site", "support_len", "l2_norm", "tail_norm", "tail_ratio"],
    );
    let mut profile = Table::new("antilocality_profile", vec!["mass", "distance", "kernel"]);
    let mut summary = Vec::new();
    for &m in masses {
        info!("antilocality: mass {m}");
        let lat = LatticeConfig::new(al.n_sites, al.spacing, m).context("antilocality lattice")?;
        let fit = antilocality_decay(&lat).context("antilocality decay fit")?;
        rates.push(row([
            m.into(),
            al.n_sites.into(),
            al.spacing.into(),
            fit.rate.into(),
            (fit.rate / m).into(),
            fit.power.into(),
            fit.n_points.into(),
        ]));
        let k = kernel_row(&lat, 1.0);
        for (d, v) in k.iter().enumerate().take(al.n_sites / 2 + 1) {
            profile.push(row([m.into(), (d as f64 * al.spacing).into(), (*v).into()]));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut min_ratio = f64::INFINITY;
        for p in 0..al.probes {
            let (region, g) = random_local_probe(al.n_sites, al.probe_len, &mut rng);
            let norm = (al.spacing * g.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let tail = antilocality_tail(&lat, &g, &region).context("antilocality tail")?;
            min_ratio = min_ratio.min(tail / norm);
            tails.push(row([
                m.into(),
                p.into(),
                region.sites()[0].into(),
                al.probe_len.into(),
                norm.into(),
                tail.into(),
                (tail / norm).into(),
            ]));
        }
        summary.push(AntilocalityMass {
            mass: m,
            fit,
            rate_over_mass: fit.rate / m,
            min_tail_ratio: min_ratio,
        });
    }
    Ok(outcome("antilocality", cfg, vec![rates, tails, profile], summary))
}

#[derive(Serialize)]
struct WeylCutoff {
    cutoff: usize,
    fock_dim: usize,
    max_relation_defect: f64,
    max_expectation_error: f64,
}

#[derive(Serialize)]
struct VacuumSummary {
    adjacent_standard_defect: f64,
    max_nw_defect: f64,
    standard_decay: DecayFit,
    purity_standard: f64,
    purity_newton_wigner: f64,
    weyl: Vec<WeylCutoff>,
}

/// Random coefficient pairs with `|c_f|, |c_g|, |c_f + c_g| <= 1`.
pub fn weyl_test_pairs(n_modes: usize, count: usize, seed: u64) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..n_modes)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let norm = |c: &[Complex64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (0..count)
        .map(|_| {
            let cf = draw(&mut rng);
            let cg = draw(&mut rng);
            let sum: Vec<Complex64> = cf.iter().zip(&cg).map(|(a, b)| a + b).collect();
            let biggest = norm(&cf).max(norm(&cg)).max(norm(&sum));
            let s = rng.gen_range(0.2..=1.0) / biggest;
            (
                cf.iter().map(|z| z * s).collect(),
                cg.iter().map(|z| z * s).collect(),
            )
        })
        .collect()
}

pub fn vacuum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let v = &cfg.vacuum;
    let lat = LatticeConfig::new(v.n_sites, v.spacing, cfg.lattice.mass).context("vacuum lattice")?;
    info!("vacuum: factorization profiles on {} sites", v.n_sites);
    let st = factorization_profile(&lat, SchemeKind::Standard).context("standard factorization")?;
    let nw = factorization_profile(&lat, SchemeKind::NewtonWigner).context("NW factorization")?;
    let mut fact = Table::new("factorization", vec!["distance", "standard_defect", "nw_defect"]);
    for ((r, s), (_, n)) in st.iter().zip(&nw) {
        fact.push(row([(*r).into(), (*s).into(), (*n).into()]));
    }
    let decay = factorization_fit(&lat).context("factorization decay fit")?;

    // Two NW site modes carry the truncated Fock space; lattice data built from
    // the coefficients give the closed-form expectation to compare against.
    let basis = vec![ComplexMode::site_mode(lat, 0), ComplexMode::site_mode(lat, 1)];
    let pairs = weyl_test_pairs(2, v.weyl_pairs, cfg.seed);
    let mut weyl_table = Table::new(
        "weyl_convergence",
        vec!["cutoff", "fock_dim", "max_relation_defect", "max_expectation_error"],
    );
    let mut weyl = Vec::new();
    for &cutoff in &v.cutoffs {
        info!("vacuum: Weyl relation at cutoff {cutoff}");
        let space = FockSpace::with_basis(basis.clone(), cutoff).context("Fock space")?;
        let mut rel = 0.0f64;
        let mut exp_err = 0.0f64;
        for (cf, cg) in &pairs {
            rel = rel.max(weyl_relation_defect(&space, cf, cg).context("Weyl relation")?);
            let sum: Vec<Complex64> = cf.iter().zip(cg).map(|(a, b)| a + b).collect();
            for c in [cf, cg, &sum] {
                let w = weyl_op(&space, c).context("Weyl operator")?;
                let mode = basis[0].scale(c[0]).axpy(c[1], &basis[1]);
                let exact = weyl_vacuum_expectation(&phase_vector_of_fock_mode(&mode), SchemeKind::NewtonWigner);
                exp_err = exp_err.max((vacuum_expectation(&space, &w) - exact).norm());
            }
        }
        weyl_table.push(row([cutoff.into(), space.dim().into(), rel.into(), exp_err.into()]));
        weyl.push(WeylCutoff {
            cutoff,
            fock_dim: space.dim(),
            max_relation_defect: rel,
            max_expectation_error: exp_err,
        });
    }
    let block = Region::interval(lat.n_sites(), 0, 4).context("purity region")?;
    let summary = VacuumSummary {
        adjacent_standard_defect: st[0].1,
        max_nw_defect: nw.iter().fold(0.0, |m: f64, (_, d)| m.max(*d)),
        standard_decay: decay,
        purity_standard: reduced_purity(&lat, &block, SchemeKind::Standard).context("purity")?,
        purity_newton_wigner: reduced_purity(&lat, &block, SchemeKind::NewtonWigner).context("purity")?,
        weyl,
    };
    Ok(outcome("vacuum", cfg, vec![fact, weyl_table], summary))
}

#[derive(Serialize)]
struct WitnessTerm {
    re: f64,
    im: f64,
    word: Vec<usize>,
}

#[derive(Serialize)]
struct CyclicityScheme {
    scheme: SchemeKind,
    cutoff: usize,
    fock_dim: usize,
    n_generators: usize,
    vacuum_rank: usize,
    separating_defect: f64,
    witness: Vec<WitnessTerm>,
}

#[derive(Serialize)]
struct CyclicitySummary {
    schemes: Vec<CyclicityScheme>,
    random_vectors: usize,
    random_vectors_cyclic: usize,
}

pub fn cyclicity(cfg: &RunConfig, samples: usize) -> Result<Outcome, CliError> {
    let geo = cfg.geometry().context("geometry")?;
    let cy = &cfg.cyclicity;
    let mut table = Table::new(
        "cyclicity",
        vec![
            "scheme",
            "cutoff",
            "fock_dim",
            "n_generators",
            "vacuum_rank",
            "separating_defect",
            "witness_terms",
        ],
    );
    let mut schemes = Vec::new();
    for scheme in SchemeKind::ALL {
        info!("cyclicity: {scheme}");
        let setup = reeh_schlieder_setup(scheme, &geo.lattice, &geo.region1, &geo.region2, cfg.fock.cutoff)
            .context("Reeh-Schlieder setup")?;
        let rank = cyclicity_rank(&setup.space, &setup.generators, cy.rank_tol).context("cyclicity rank")?;
        let gens = setup.separating_generators().context("separating generators")?;
        let probe = separating_defect(&setup.space, &gens, &setup.space.vacuum(), samples, cfg.seed)
            .context("separating probe")?;
        table.push(row([
            scheme.slug().into(),
            cfg.fock.cutoff.into(),
            setup.space.dim().into(),
            gens.len().into(),
            rank.into(),
            probe.defect.into(),
            probe.witness.len().into(),
        ]));
        schemes.push(CyclicityScheme {
            scheme,
            cutoff: cfg.fock.cutoff,
            fock_dim: setup.space.dim(),
            n_generators: gens.len(),
            vacuum_rank: rank,
            separating_defect: probe.defect,
            witness: probe
                .witness
                .into_iter()
                .map(|(c, word)| WitnessTerm {
                    re: c.re,
                    im: c.im,
                    word,
                })
                .collect(),
        });
    }

    // One-sided NW algebra against random vectors.
    let space = FockSpace::new(2, cfg.fock.cutoff).context("Fock space")?;
    let dirs = mode_directions(&space, &[0]).context("directions")?;
    let gens = weyl_generators(&space, &dirs).context("generators")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cyclic = (0..cy.random_vectors)
        .filter(|_| {
            let v = FockVector::random_unit(space.dim(), &mut rng);
            orbit_rank(&gens, &v, cy.rank_tol) == space.dim()
        })
        .count();
    Ok(outcome(
        "cyclicity",
        cfg,
        vec![table],
        CyclicitySummary {
            schemes,
            random_vectors: cy.random_vectors,
            random_vectors_cyclic: cyclic,
        },
    ))
}

#[derive(Serialize)]
struct MicrocausalitySummary {
    separation: f64,
    max_abs_time: f64,
    weak_standard: f64,
    weak_newton_wigner: f64,
    strong_standard: f64,
    strong_newton_wigner: f64,
}

pub fn microcausality(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let geo = cfg.geometry().context("geometry")?;
    let lat = geo.lattice;
    let weak = |s| check_weak_microcausality(s, &geo.region1, &geo.region2, &lat).context("weak microcausality");
    let weak_standard = weak(SchemeKind::Standard)?;
    let weak_newton_wigner = weak(SchemeKind::NewtonWigner)?;
    let mut table = Table::new("microcausality", vec!["time", "standard_defect", "nw_defect"]);
    let (mut s_max, mut n_max) = (0.0f64, 0.0f64);
    for &t in &geo.times {
        info!("microcausality: t = {t}");
        let strong = |s| {
            check_strong_microcausality(s, &geo.region1, &geo.region2, &lat, &[t])
                .context("strong microcausality")
        };
        let s = strong(SchemeKind::Standard)?;
        let n = strong(SchemeKind::NewtonWigner)?;
        s_max = s_max.max(s);
        n_max = n_max.max(n);
        table.push(row([t.into(), s.into(), n.into()]));
    }
    Ok(outcome(
        "microcausality",
        cfg,
        vec![table],
        MicrocausalitySummary {
            separation: geo.separation().unwrap_or(0.0),
            max_abs_time: geo.times.iter().fold(0.0, |m: f64, t| m.max(t.abs())),
            weak_standard,
            weak_newton_wigner,
            strong_standard: s_max,
            strong_newton_wigner: n_max,
        },
    ))
}

pub fn compare_schemes(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let geo = cfg.geometry().context("geometry")?;
    let mut table = Table::new(
        "schemes",
        vec![
            "scheme",
            "isotony_ok",
            "translation_covariance_ok",
            "weak_microcausality_defect",
            "strong_microcausality_defect",
            "vacuum_cyclic_rank",
            "fock_dim",
            "vacuum_separating_defect",
            "local_number_op_available",
            "fundamentality_verdict",
            "reasons",
        ],
    );
    let mut reports: Vec<SchemeReport> = Vec::new();
    for scheme in SchemeKind::ALL {
        info!("compare-schemes: {scheme}");
        let r = fundamentality_report(scheme, &geo, cfg.probe_settings()).context("fundamentality report")?;
        table.push(row([
            scheme.slug().into(),
            r.isotony_ok.into(),
            r.translation_covariance_ok.into(),
            r.weak_microcausality_defect.into(),
            r.strong_microcausality_defect.into(),
            r.vacuum_cyclic_rank.into(),
            r.fock_dim.into(),
            r.vacuum_separating_defect.into(),
            r.local_number_op_available.into(),
            r.fundamentality_verdict.into(),
            r.reasons.join(";").into(),
        ]));
        reports.push(r);
    }
    Ok(outcome("compare_schemes", cfg, vec![table], reports))
}

#[derive(Serialize)]
struct CorrelationMass {
    mass: f64,
    lengths: Vec<(usize, f64)>,
    length_times_mass: f64,
    max_drift: f64,
}

pub fn correlation(cfg: &RunConfig, masses: &[f64]) -> Result<Outcome, CliError> {
    let c = &cfg.correlation;
    let mut table = Table::new(
        "correlation",
        vec!["mass", "n_sites", "spacing", "correlation_length", "length_times_mass", "power", "n_points"],
    );
    let mut profile = Table::new("correlation_profile", vec!["mass", "distance", "two_point"]);
    let mut summary = Vec::new();
    let largest = *c.n_sites.iter().max().expect("validated nonempty");
    for &m in masses {
        let mut lengths = Vec::new();
        for &n in &c.n_sites {
            info!("correlation: mass {m}, {n} sites");
            let lat = LatticeConfig::new(n, c.spacing, m).context("correlation lattice")?;
            let fit = correlation_fit(&lat).context("correlation fit")?;
            table.push(row([
                m.into(),
                n.into(),
                c.spacing.into(),
                fit.length().into(),
                (fit.length() * m).into(),
                fit.power.into(),
                fit.n_points.into(),
            ]));
            lengths.push((n, fit.length()));
            if n == largest {
                for (d, v) in field_two_point_row(&lat).iter().enumerate().take(n / 2 + 1) {
                    profile.push(row([m.into(), (d as f64 * c.spacing).into(), (*v).into()]));
                }
            }
        }
        let max_drift = lengths
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / w[0].1).abs())
            .fold(0.0, f64::max);
        summary.push(CorrelationMass {
            mass: m,
            length_times_mass: lengths.last().map(|l| l.1 * m).unwrap_or(f64::NAN),
            lengths,
            max_drift,
        });
    }
    Ok(outcome("correlation", cfg, vec![table, profile], summary))
}
