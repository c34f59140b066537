//! Seeded random sweeps of the pointwise metric identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    lower_bound_margin, metric_cartesian, pullback_residual, ConicalParams, SpacetimePoint,
};
use crate::Result;

const CHUNKS: usize = 64;

/// Radii are log-uniform in `[10^lo, 10^hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub samples: usize,
    pub log10_r_min: f64,
    pub log10_r_max: f64,
}

impl SweepSpec {
    pub fn new(samples: usize) -> Self {
        Self {
            samples,
            log10_r_min: -6.0,
            log10_r_max: 1.0,
        }
    }
}

fn chunked<T: Send>(
    spec: &SweepSpec,
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let per = spec.samples.div_ceil(CHUNKS);
    (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(c as u64));
            let n = per.min(spec.samples.saturating_sub(c * per));
            f(&mut rng, n)
        })
        .collect()
}

fn polar(rng: &mut ChaCha8Rng, spec: &SweepSpec) -> (f64, f64) {
    let r = 10f64.powf(rng.random_range(spec.log10_r_min..=spec.log10_r_max));
    let pi = std::f64::consts::PI;
    (r, rng.random_range(-pi..pi))
}

/// Largest deviation of the sorted spectrum from `{−1, α², 1, 1}`.
pub fn spectrum_error(params: &ConicalParams, spec: &SweepSpec, seed: u64) -> Result<f64> {
    let a2 = params.alpha_sq();
    let mut want = [-1.0, a2, 1.0, 1.0];
    want.sort_by(f64::total_cmp);
    let parts = chunked(spec, seed, |rng, n| {
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            let (r, phi) = polar(rng, spec);
            let p = SpacetimePoint::new(
                rng.random_range(-10.0..10.0),
                r * phi.cos(),
                r * phi.sin(),
                rng.random_range(-10.0..10.0),
            );
            let mut ev = metric_cartesian(&p, params)?.eigenvalues();
            ev.sort_by(f64::total_cmp);
            for i in 0..4 {
                worst = worst.max((ev[i] - want[i]).abs());
            }
        }
        Ok(worst)
    })?;
    Ok(parts.into_iter().fold(0.0, f64::max))
}

pub fn pullback_error(params: &ConicalParams, spec: &SweepSpec, seed: u64) -> Result<f64> {
    let parts = chunked(spec, seed, |rng, n| {
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            let (r, phi) = polar(rng, spec);
            let t = rng.random_range(-10.0..10.0);
            let z = rng.random_range(-10.0..10.0);
            worst = worst.max(pullback_residual(t, r, phi, z, params)?);
        }
        Ok(worst)
    })?;
    Ok(parts.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    /// Minimum of `ρ(v, v) − α²(v₁² + v₂²) − v₃²` over random `v ∈ [−1, 1]³`.
    pub min_margin: f64,
    /// Largest `|margin|` on unit angular directions.
    pub max_angular: f64,
    /// Smallest margin on unit radial directions, predicted `1 − α²`.
    pub min_radial: f64,
}

pub fn lower_bound_sweep(
    params: &ConicalParams,
    spec: &SweepSpec,
    seed: u64,
) -> Result<BoundSweep> {
    let parts = chunked(spec, seed, |rng, n| {
        let mut acc = BoundSweep {
            min_margin: f64::INFINITY,
            max_angular: 0.0,
            min_radial: f64::INFINITY,
        };
        for _ in 0..n {
            let (r, phi) = polar(rng, spec);
            let (s, c) = phi.sin_cos();
            let (x, y) = (r * c, r * s);
            let z = rng.random_range(-10.0..10.0);
            let v = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            acc.min_margin = acc.min_margin.min(lower_bound_margin(x, y, z, &v, params)?);
            let ang = lower_bound_margin(x, y, z, &[-s, c, 0.0], params)?;
            acc.max_angular = acc.max_angular.max(ang.abs());
            let rad = lower_bound_margin(x, y, z, &[c, s, 0.0], params)?;
            acc.min_radial = acc.min_radial.min(rad);
        }
        Ok(acc)
    })?;
    Ok(parts.into_iter().fold(
        BoundSweep {
            min_margin: f64::INFINITY,
            max_angular: 0.0,
            min_radial: f64::INFINITY,
        },
        |a, b| BoundSweep {
            min_margin: a.min_margin.min(b.min_margin),
            max_angular: a.max_angular.max(b.max_angular),
            min_radial: a.min_radial.min(b.min_radial),
        },
    ))
}
