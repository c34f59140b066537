//! Annulus integrals of `|∇f_j|` and `|∇f_j|²` over `r_inner < |x| < 1`.
//!
//! Both integrands are homogeneous (degree −1 and −2), so a tensor polar grid
//! is used: Gauss–Legendre in `ln r` on geometric panels times Gauss–Legendre
//! on the eight angular sectors between the kinks of `|∇f_j|` (multiples of
//! `π/4`). The angular panels are doubled until successive sums agree.

use serde::{Deserialize, Serialize};

use crate::quadrature::UnitRule;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldComponent {
    F1,
    F2,
}

impl FieldComponent {
    /// Classical gradient of `f₁` or `f₂` away from the origin.
    pub fn gradient(self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        let r4 = r2 * r2;
        match self {
            FieldComponent::F1 => (4.0 * x * y * y / r4, -4.0 * x * x * y / r4),
            FieldComponent::F2 => (
                2.0 * y * (y * y - x * x) / r4,
                2.0 * x * (x * x - y * y) / r4,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub panels_per_octave: usize,
    pub gauss_order: usize,
    /// Initial number of angular nodes; rounded up to whole panels in each of
    /// the eight sectors.
    pub angular_start: usize,
    pub angular_max: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels_per_octave: 1,
            gauss_order: 10,
            angular_start: 64,
            angular_max: 1 << 16,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevMass {
    pub r_inner: f64,
    pub l1_mass: f64,
    pub l2_mass: f64,
    pub angular_nodes: usize,
    pub l1_error_estimate: f64,
    pub l2_error_estimate: f64,
}

fn annulus_sums(
    component: FieldComponent,
    r_inner: f64,
    spec: &QuadratureSpec,
    rule: &UnitRule,
    n_ang: usize,
) -> (f64, f64) {
    let u0 = r_inner.ln();
    let octaves = (-u0 / std::f64::consts::LN_2).ceil().max(1.0);
    let panels = (octaves as usize) * spec.panels_per_octave.max(1);
    let du = -u0 / panels as f64;
    let per_sector = n_ang / (8 * rule.len());
    let dtheta = std::f64::consts::FRAC_PI_4 / per_sector as f64;
    let trig: Vec<(f64, f64, f64)> = (0..8 * per_sector)
        .flat_map(|k| rule.on(k as f64 * dtheta, (k + 1) as f64 * dtheta))
        .map(|(th, w)| {
            let (s, c) = th.sin_cos();
            (s, c, w)
        })
        .collect();

    let (mut l1, mut l2) = (0.0, 0.0);
    for p in 0..panels {
        let lo = u0 + p as f64 * du;
        for (u, w) in rule.on(lo, lo + du) {
            let r = u.exp();
            let (mut a1, mut a2) = (0.0, 0.0);
            for &(s, c, wa) in &trig {
                let (gx, gy) = component.gradient(r * c, r * s);
                let g2 = gx * gx + gy * gy;
                a1 += wa * g2.sqrt();
                a2 += wa * g2;
            }
            // area element r dr dθ with dr = r du
            let jac = w * r * r;
            l1 += jac * a1;
            l2 += jac * a2;
        }
    }
    (l1, l2)
}

pub fn sobolev_probe(
    component: FieldComponent,
    r_inner: f64,
    spec: &QuadratureSpec,
) -> Result<SobolevMass> {
    if !(r_inner > 0.0 && r_inner < 1.0) {
        return Err(Error::Domain(format!(
            "inner radius must lie in (0, 1), got {r_inner}"
        )));
    }
    let rule = UnitRule::new(spec.gauss_order);
    let block = 8 * rule.len();
    let mut n = spec.angular_start.max(block).div_ceil(block) * block;
    let mut prev = annulus_sums(component, r_inner, spec, &rule, n);
    let mut history = Vec::new();
    while 2 * n <= spec.angular_max {
        n *= 2;
        let cur = annulus_sums(component, r_inner, spec, &rule, n);
        let e1 = (cur.0 - prev.0).abs();
        let e2 = (cur.1 - prev.1).abs();
        history.push((n, e1, e2));
        if e1 <= spec.rel_tol * cur.0.abs() && e2 <= spec.rel_tol * cur.1.abs() {
            return Ok(SobolevMass {
                r_inner,
                l1_mass: cur.0,
                l2_mass: cur.1,
                angular_nodes: n,
                l1_error_estimate: e1,
                l2_error_estimate: e2,
            });
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "angular quadrature did not reach rel_tol {} for r_inner = {r_inner}; \
         (nodes, l1 err, l2 err) history: {history:?}",
        spec.rel_tol
    )))
}
