//! Browser demo: three lattice computations exposed to JavaScript.
//!
//! The plain functions in [`demo`] do the work and are tested natively; the
//! `#[wasm_bindgen]` wrappers only translate errors into `JsError`.

use wasm_bindgen::prelude::*;

pub mod demo {
    use fieldloc::lattice::{ComplexMode, LatticeConfig, Region};
    use fieldloc::spectral::{antilocality_decay, evolve_mode, kernel_row};
    use fieldloc::vacuum::{correlation_length, field_two_point_row};
    use fieldloc::Result;

    /// Largest lattice the page may ask for.
    pub const MAX_SITES: usize = 4096;

    pub fn lattice(n_sites: usize, spacing: f64, mass: f64) -> Result<LatticeConfig> {
        if n_sites > MAX_SITES {
            return Err(fieldloc::Error::SizeGuard {
                what: "n_sites",
                value: n_sites,
                limit: MAX_SITES,
            });
        }
        LatticeConfig::new(n_sites, spacing, mass)
    }

    fn half_row(row: Vec<f64>) -> Vec<f64> {
        let half = row.len() / 2;
        row.into_iter().take(half + 1).map(f64::abs).collect()
    }

    /// `|H^p δ|` at distances `0..=N/2` sites from the delta.
    pub fn kernel_profile(cfg: &LatticeConfig, p: f64) -> Vec<f64> {
        half_row(kernel_row(cfg, p))
    }

    pub fn kernel_rate(cfg: &LatticeConfig) -> Result<f64> {
        antilocality_decay(cfg).map(|f| f.rate)
    }

    /// `|<φ(x) φ(0)>|` at distances `0..=N/2`.
    pub fn correlation_profile(cfg: &LatticeConfig) -> Vec<f64> {
        half_row(field_two_point_row(cfg))
    }

    pub fn correlation_len(cfg: &LatticeConfig) -> Result<f64> {
        correlation_length(cfg)
    }

    /// Site probabilities of a Newton-Wigner particle started at the centre
    /// site and evolved for time `t`.
    pub fn nw_spread(cfg: &LatticeConfig, t: f64) -> Vec<f64> {
        let u = evolve_mode(&ComplexMode::site_mode(*cfg, cfg.n_sites() / 2), t);
        let total: f64 = u.values().iter().map(|z| z.norm_sqr()).sum();
        u.values().iter().map(|z| z.norm_sqr() / total).collect()
    }

    /// Probability found farther than `|t|` from the start site.
    pub fn outside_light_cone(cfg: &LatticeConfig, t: f64) -> Result<f64> {
        let n = cfg.n_sites();
        let centre = n / 2;
        let reach = (t.abs() / cfg.spacing()).floor() as usize;
        let len = (2 * reach + 1).min(n);
        let cone = Region::interval(n, (centre + n - reach.min(centre)) % n, len)?;
        let p = nw_spread(cfg, t);
        Ok((0..n).filter(|&i| !cone.contains(i)).map(|i| p[i]).sum())
    }

}

fn js(e: fieldloc::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn kernel_profile(n_sites: usize, spacing: f64, mass: f64, p: f64) -> Result<Vec<f64>, JsError> {
    let cfg = demo::lattice(n_sites, spacing, mass).map_err(js)?;
    Ok(demo::kernel_profile(&cfg, p))
}

#[wasm_bindgen]
pub fn kernel_rate(n_sites: usize, spacing: f64, mass: f64) -> Result<f64, JsError> {
    let cfg = demo::lattice(n_sites, spacing, mass).map_err(js)?;
    demo::kernel_rate(&cfg).map_err(js)
}

#[wasm_bindgen]
pub fn correlation_profile(n_sites: usize, spacing: f64, mass: f64) -> Result<Vec<f64>, JsError> {
    let cfg = demo::lattice(n_sites, spacing, mass).map_err(js)?;
    Ok(demo::correlation_profile(&cfg))
}

#[wasm_bindgen]
pub fn correlation_length(n_sites: usize, spacing: f64, mass: f64) -> Result<f64, JsError> {
    let cfg = demo::lattice(n_sites, spacing, mass).map_err(js)?;
    demo::correlation_len(&cfg).map_err(js)
}

#[wasm_bindgen]
pub fn nw_spread(n_sites: usize, spacing: f64, mass: f64, t: f64) -> Result<Vec<f64>, JsError> {
    let cfg = demo::lattice(n_sites, spacing, mass).map_err(js)?;
    Ok(demo::nw_spread(&cfg, t))
}

#[wasm_bindgen]
pub fn outside_light_cone(n_sites: usize, spacing: f64, mass: f64, t: f64) -> Result<f64, JsError> {
    let cfg = demo::lattice(n_sites, spacing, mass).map_err(js)?;
    demo::outside_light_cone(&cfg, t).map_err(js)
}
