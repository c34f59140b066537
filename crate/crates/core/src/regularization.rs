//! Mollified field `f^ε = f * φ_ε` and the lower bound for `ρ^ε`.
//!
//! Every mollifier in the catalog is radial, `φ(x, y) = P(|(x, y)|)`, so the
//! regularized unit field is `f^ε(r e^{iθ}) = e^{2iθ} R(r/ε)` with
//!
//! ```text
//! R(ρ) = 2π ∫₀^ρ P(s) s (1 − s²/ρ²) ds,      R'(ρ) = 4π ρ⁻³ ∫₀^ρ P(s) s³ ds.
//! ```
//!
//! `R` is tabulated once per basis profile and evaluated with cubic Hermite
//! interpolation. A direct 2D quadrature evaluator is kept for cross-checks.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metric::{eval_f, ConicalParams, MetricField, SpatialField, SymForm3, SymForm4};
use crate::quadrature::UnitRule;
use crate::{Error, Result, SpacetimePoint};

/// Radius beyond which the Gaussian factor is treated as zero (`e^{-50}`).
const GAUSS_CUTOFF: f64 = 10.0;
const TABLE_RADIUS: f64 = 10.0;
const TABLE_CELLS: usize = 10 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Nonnegative profile.
    A,
    /// Signed profile with vanishing higher moments.
    B,
    /// Net `ψ_ε` with `‖ψ_ε‖₁ → 1`.
    C,
}

/// Serializable description of a mollifier from the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MollifierConfig {
    Gaussian,
    Bump,
    /// Gaussian times an even polynomial of degree `2 moments`, chosen so the
    /// radial moments `∫|x|^{2k} φ` vanish for `k = 1..=moments`.
    MomentCorrected {
        moments: usize,
    },
    /// `ψ_ε = (1 + ε/2) bump on [0,1) − (ε/2) bump on (1,2)`.
    StrictNet,
}

impl MollifierConfig {
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }
}

#[derive(Debug, Clone)]
enum ShapeKind {
    Gaussian,
    Bump,
    Annulus,
    Polynomial(Vec<f64>),
}

/// One normalized radial basis profile, `2π ∫ P(s) s ds = 1`.
#[derive(Debug, Clone)]
struct Shape {
    kind: ShapeKind,
    scale: f64,
    lo: f64,
    hi: f64,
}

fn bump_core(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

impl Shape {
    fn raw(kind: &ShapeKind, s: f64) -> f64 {
        match kind {
            ShapeKind::Gaussian => (-0.5 * s * s).exp(),
            ShapeKind::Bump => bump_core(s),
            ShapeKind::Annulus => bump_core(2.0 * s - 3.0),
            ShapeKind::Polynomial(c) => {
                let s2 = s * s;
                let poly = c.iter().rev().fold(0.0, |acc, &cj| acc * s2 + cj);
                (-0.5 * s2).exp() * poly
            }
        }
    }

    fn support(kind: &ShapeKind) -> (f64, f64) {
        match kind {
            ShapeKind::Gaussian | ShapeKind::Polynomial(_) => (0.0, GAUSS_CUTOFF),
            ShapeKind::Bump => (0.0, 1.0),
            ShapeKind::Annulus => (1.0, 2.0),
        }
    }

    fn new(kind: ShapeKind, rule: &UnitRule) -> Self {
        let (lo, hi) = Self::support(&kind);
        let mass = TAU * rule.composite(&[lo, hi], 256, |s| Self::raw(&kind, s) * s);
        Self {
            kind,
            scale: 1.0 / mass,
            lo,
            hi,
        }
    }

    fn value(&self, s: f64) -> f64 {
        if s < self.lo || s > self.hi {
            return 0.0;
        }
        self.scale * Self::raw(&self.kind, s)
    }
}

/// Coefficients `c_j` of `e^{-s²/2} Σ c_j s^{2j}` with unit mass and
/// vanishing radial moments of orders `2, 4, …, 2m`.
fn moment_coefficients(m: usize) -> Result<Vec<f64>> {
    // ∫₀^∞ e^{-s²/2} s^{2k+1} ds = 2^k k!
    let g = |k: usize| (1..=k).fold(1.0, |acc, i| acc * 2.0 * i as f64);
    let n = m + 1;
    let a = nalgebra::DMatrix::from_fn(n, n, |k, j| g(j + k));
    let mut b = nalgebra::DVector::zeros(n);
    b[0] = 1.0 / TAU;
    let c = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular moment system".into()))?;
    Ok(c.iter().copied().collect())
}

/// A radial mollifier (or net of mollifiers) from the catalog.
#[derive(Debug, Clone)]
pub struct Mollifier {
    config: MollifierConfig,
    shapes: Vec<Shape>,
    /// `‖φ‖₁` for ε-independent profiles.
    l1_fixed: Option<f64>,
    mass_residual: f64,
}

impl Mollifier {
    pub fn new(config: MollifierConfig) -> Result<Self> {
        let rule = UnitRule::new(12);
        let shapes = match &config {
            MollifierConfig::Gaussian => vec![Shape::new(ShapeKind::Gaussian, &rule)],
            MollifierConfig::Bump => vec![Shape::new(ShapeKind::Bump, &rule)],
            MollifierConfig::MomentCorrected { moments } => {
                if *moments == 0 {
                    return Err(Error::Invalid(
                        "moment-corrected mollifier needs at least one vanishing moment".into(),
                    ));
                }
                if *moments > 6 {
                    return Err(Error::Invalid(format!(
                        "moment order {moments} is too high for a stable profile (max 6)"
                    )));
                }
                let c = moment_coefficients(*moments)?;
                vec![Shape::new(ShapeKind::Polynomial(c), &rule)]
            }
            MollifierConfig::StrictNet => vec![
                Shape::new(ShapeKind::Bump, &rule),
                Shape::new(ShapeKind::Annulus, &rule),
            ],
        };
        let mut m = Self {
            config,
            shapes,
            l1_fixed: None,
            mass_residual: 0.0,
        };
        m.mass_residual = (m.integral(0.5) - 1.0).abs();
        if m.variant() != Variant::C {
            m.l1_fixed = Some(if m.variant() == Variant::A {
                // nonnegative and normalized, so ‖φ‖₁ = ∫φ = 1
                1.0
            } else {
                m.l1_numeric(1.0)
            });
        }
        Ok(m)
    }

    pub fn gaussian() -> Self {
        Self::new(MollifierConfig::Gaussian).expect("catalog entry")
    }

    pub fn bump() -> Self {
        Self::new(MollifierConfig::Bump).expect("catalog entry")
    }

    pub fn moment_corrected(moments: usize) -> Result<Self> {
        Self::new(MollifierConfig::MomentCorrected { moments })
    }

    pub fn strict_net() -> Self {
        Self::new(MollifierConfig::StrictNet).expect("catalog entry")
    }

    pub fn config(&self) -> &MollifierConfig {
        &self.config
    }

    pub fn variant(&self) -> Variant {
        match self.config {
            MollifierConfig::Gaussian | MollifierConfig::Bump => Variant::A,
            MollifierConfig::MomentCorrected { .. } => Variant::B,
            MollifierConfig::StrictNet => Variant::C,
        }
    }

    /// Highest order `n` with `∫ x^a y^b φ = 0` for all `1 ≤ a + b ≤ n`.
    pub fn moment_order(&self) -> usize {
        match self.config {
            MollifierConfig::MomentCorrected { moments } => 2 * moments + 1,
            _ => 0,
        }
    }

    /// `|∫φ − 1|` after numerical normalization.
    pub fn mass_residual(&self) -> f64 {
        self.mass_residual
    }

    /// Radius of the (numerical) support of `P`.
    pub fn support_radius(&self) -> f64 {
        self.shapes.iter().map(|s| s.hi).fold(0.0, f64::max)
    }

    fn weights(&self, eps: f64) -> Vec<f64> {
        match self.config {
            MollifierConfig::StrictNet => vec![1.0 + 0.5 * eps, -0.5 * eps],
            _ => vec![1.0],
        }
    }

    /// Radial profile `P(s)` of `φ` (of `ψ_ε` for the strict net).
    pub fn profile(&self, eps: f64, s: f64) -> f64 {
        self.shapes
            .iter()
            .zip(self.weights(eps))
            .map(|(sh, w)| w * sh.value(s))
            .sum()
    }

    fn breakpoints(&self, eps: f64) -> Vec<f64> {
        let mut b: Vec<f64> = self.shapes.iter().flat_map(|s| [s.lo, s.hi]).collect();
        // sign changes of the profile
        let hi = self.support_radius();
        let n = 4096;
        let f = |s: f64| self.profile(eps, s);
        let mut prev = (0.0, f(0.0));
        for i in 1..=n {
            let s = hi * i as f64 / n as f64;
            let v = f(s);
            if prev.1 * v < 0.0 {
                let (mut a, mut c) = (prev.0, s);
                for _ in 0..200 {
                    let mid = 0.5 * (a + c);
                    if f(mid) * f(a) <= 0.0 {
                        c = mid;
                    } else {
                        a = mid;
                    }
                    if c - a < 1e-15 * hi {
                        break;
                    }
                }
                b.push(0.5 * (a + c));
            }
            if v != 0.0 {
                prev = (s, v);
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        b
    }

    fn integral(&self, eps: f64) -> f64 {
        let rule = UnitRule::new(12);
        TAU * rule.composite(&self.breakpoints(eps), 64, |s| self.profile(eps, s) * s)
    }

    fn l1_numeric(&self, eps: f64) -> f64 {
        let rule = UnitRule::new(12);
        TAU * rule.composite(&self.breakpoints(eps), 64, |s| {
            self.profile(eps, s).abs() * s
        })
    }

    /// `‖φ‖_{L¹}` (of `ψ_ε` for the strict net, where it equals `1 + ε`).
    pub fn l1_norm(&self, eps: f64) -> f64 {
        self.l1_fixed.unwrap_or_else(|| self.l1_numeric(eps))
    }

    /// Profile table `(s, P(s))` on `n + 1` equispaced radii of the support.
    pub fn profile_table(&self, eps: f64, n: usize) -> Vec<(f64, f64)> {
        let hi = self.support_radius();
        (0..=n)
            .map(|i| {
                let s = hi * i as f64 / n.max(1) as f64;
                (s, self.profile(eps, s))
            })
            .collect()
    }

    pub fn write_profile_csv(&self, eps: f64, n: usize, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["s", "P(s)"])?;
        for (s, p) in self.profile_table(eps, n) {
            w.write_record([format!("{s:.17e}"), format!("{p:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `c_φ = (‖φ‖₁ − 1)/(‖φ‖₁ + 1)`.
pub fn c_phi(l1: f64) -> f64 {
    (l1 - 1.0) / (l1 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible {
        l1_norm: f64,
        c_phi: f64,
        /// `β` from `2β = 1 − ‖φ‖₁ + α²(1 + ‖φ‖₁)`.
        beta: f64,
        /// `(α² − c_φ)/(2(‖φ‖₁ + 1))`, reported alongside.
        beta_alt: f64,
    },
    Inadmissible {
        l1_norm: f64,
        c_phi: f64,
        alpha_sq: f64,
    },
}

impl Admissibility {
    pub fn beta(&self) -> Option<f64> {
        match self {
            Admissibility::Admissible { beta, .. } => Some(*beta),
            Admissibility::Inadmissible { .. } => None,
        }
    }

    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

/// Constant `β` of the lower bound `ρ^ε(v, v) ≥ β(v₁² + v₂²) + v₃²`.
pub fn beta_from_l1(params: &ConicalParams, l1: f64) -> Admissibility {
    let a2 = params.alpha_sq();
    let c = c_phi(l1);
    if a2 > c {
        let beta = if l1 == 1.0 {
            a2
        } else {
            0.5 * (1.0 - l1 + a2 * (1.0 + l1))
        };
        Admissibility::Admissible {
            l1_norm: l1,
            c_phi: c,
            beta,
            beta_alt: (a2 - c) / (2.0 * (l1 + 1.0)),
        }
    } else {
        Admissibility::Inadmissible {
            l1_norm: l1,
            c_phi: c,
            alpha_sq: a2,
        }
    }
}

pub fn beta(params: &ConicalParams, mollifier: &Mollifier, eps: f64) -> Admissibility {
    beta_from_l1(params, mollifier.l1_norm(eps))
}

/// Tabulated `R(ρ)` for one normalized basis profile.
#[derive(Debug, Clone)]
struct RadialTable {
    h: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
    i0_total: f64,
    i2_total: f64,
}

impl RadialTable {
    fn build(shape: &Shape, rule: &UnitRule) -> Self {
        let h = TABLE_RADIUS / TABLE_CELLS as f64;
        let mut values = Vec::with_capacity(TABLE_CELLS + 1);
        let mut derivs = Vec::with_capacity(TABLE_CELLS + 1);
        let (mut i0, mut i2) = (0.0, 0.0);
        values.push(0.0);
        derivs.push(0.0);
        for k in 0..TABLE_CELLS {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            for (s, w) in rule.on(a, b) {
                let p = shape.value(s);
                i0 += w * p * s;
                i2 += w * p * s * s * s;
            }
            values.push(TAU * (i0 - i2 / (b * b)));
            derivs.push(2.0 * TAU * i2 / (b * b * b));
        }
        Self {
            h,
            values,
            derivs,
            i0_total: i0,
            i2_total: i2,
        }
    }

    fn eval(&self, rho: f64) -> (f64, f64) {
        if rho >= TABLE_RADIUS {
            let r2 = rho * rho;
            return (
                TAU * (self.i0_total - self.i2_total / r2),
                2.0 * TAU * self.i2_total / (r2 * rho),
            );
        }
        let k = ((rho / self.h) as usize).min(TABLE_CELLS - 1);
        let tau = rho / self.h - k as f64;
        let (p0, p1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.derivs[k] * self.h, self.derivs[k + 1] * self.h);
        let t2 = tau * tau;
        let t3 = t2 * tau;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + tau) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let d = ((6.0 * t2 - 6.0 * tau) * (p0 - p1)
            + (3.0 * t2 - 4.0 * tau + 1.0) * m0
            + (3.0 * t2 - 2.0 * tau) * m1)
            / self.h;
        (v, d)
    }
}

/// Random sampling of `(point, vector)` pairs for the lower-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub samples: usize,
    /// Radii are log-uniform in `[r_min, r_max]·ε`.
    pub r_min: f64,
    pub r_max: f64,
    /// Also test every vector on the axis `(0, 0, z)`.
    pub include_axis: bool,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            samples: 100_000,
            r_min: 1e-3,
            r_max: 1e2,
            include_axis: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub eps: f64,
    pub beta: f64,
    pub min_margin: f64,
    /// `(x, y, z, v₁, v₂, v₃)` attaining the minimum.
    pub argmin: [f64; 6],
    pub samples: usize,
}

/// `f^ε = f * φ_ε` for a fixed deficit parameter and mollifier.
#[derive(Debug, Clone)]
pub struct RegularizedField {
    params: ConicalParams,
    mollifier: Mollifier,
    tables: Vec<RadialTable>,
}

impl RegularizedField {
    /// Fills the radial profile cache; evaluation afterwards is read-only.
    pub fn new(params: ConicalParams, mollifier: Mollifier) -> Self {
        let rule = UnitRule::new(8);
        let tables = mollifier
            .shapes
            .iter()
            .map(|s| RadialTable::build(s, &rule))
            .collect();
        Self {
            params,
            mollifier,
            tables,
        }
    }

    pub fn params(&self) -> &ConicalParams {
        &self.params
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    pub fn beta(&self, eps: f64) -> Admissibility {
        beta(&self.params, &self.mollifier, eps)
    }

    fn check_eps(eps: f64) -> Result<()> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        Ok(())
    }

    /// `R_ε(r)` and its derivative in `r`.
    pub fn radial_factor(&self, eps: f64, r: f64) -> Result<(f64, f64)> {
        Self::check_eps(eps)?;
        let rho = r.abs() / eps;
        let (mut v, mut d) = (0.0, 0.0);
        for (t, w) in self.tables.iter().zip(self.mollifier.weights(eps)) {
            let (tv, td) = t.eval(rho);
            v += w * tv;
            d += w * td;
        }
        Ok((v, d / eps))
    }

    /// `(f₁^ε, f₂^ε)(x, y)` through the radial fast path.
    pub fn regularize(&self, eps: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let r = x.hypot(y);
        let (rv, _) = self.radial_factor(eps, r)?;
        if r == 0.0 {
            return Ok((0.0, 0.0));
        }
        let (f1, f2) = eval_f(x, y)?;
        Ok((rv * f1, rv * f2))
    }

    /// `(φ_ε * g)(x, y)` by 2D quadrature, for `g` smooth off the origin.
    ///
    /// Polar coordinates are centered at the origin when `(x, y)` is within two
    /// support radii of it, and at `(x, y)` otherwise.
    pub fn mollify_direct<const K: usize>(
        &self,
        eps: f64,
        x: f64,
        y: f64,
        g: impl Fn(f64, f64) -> [f64; K],
    ) -> Result<[f64; K]> {
        Self::check_eps(eps)?;
        let rule = UnitRule::new(10);
        let n_ang = 512;
        let dpsi = TAU / n_ang as f64;
        let trig: Vec<(f64, f64)> = (0..n_ang).map(|k| (k as f64 * dpsi).sin_cos()).collect();
        let smax = self.mollifier.support_radius();
        let supp_breaks = self.mollifier.breakpoints(eps);
        let r = x.hypot(y);
        let phi = |d: f64| self.mollifier.profile(eps, d / eps) / (eps * eps);
        let mut acc = [0.0; K];

        if r <= 2.0 * eps * smax {
            let mut breaks = vec![0.0, r + eps * smax];
            for b in &supp_breaks {
                for t in [r - eps * b, r + eps * b] {
                    if t > 0.0 && t < r + eps * smax {
                        breaks.push(t);
                    }
                }
            }
            breaks.sort_by(f64::total_cmp);
            for seg in breaks.windows(2) {
                let panels = 16;
                let h = (seg[1] - seg[0]) / panels as f64;
                if h <= 0.0 {
                    continue;
                }
                for p in 0..panels {
                    let lo = seg[0] + p as f64 * h;
                    for (t, w) in rule.on(lo, lo + h) {
                        for &(s, c) in &trig {
                            let (zx, zy) = (t * c, t * s);
                            let weight = phi((x - zx).hypot(y - zy));
                            if weight == 0.0 {
                                continue;
                            }
                            let gv = g(zx, zy);
                            let jw = w * t * dpsi * weight;
                            for i in 0..K {
                                acc[i] += jw * gv[i];
                            }
                        }
                    }
                }
            }
        } else {
            let breaks: Vec<f64> = supp_breaks.iter().map(|b| eps * b).collect();
            for seg in breaks.windows(2) {
                let panels = 16;
                let h = (seg[1] - seg[0]) / panels as f64;
                if h <= 0.0 {
                    continue;
                }
                for p in 0..panels {
                    let lo = seg[0] + p as f64 * h;
                    for (s, w) in rule.on(lo, lo + h) {
                        let weight = phi(s);
                        if weight == 0.0 {
                            continue;
                        }
                        for &(sn, cs) in &trig {
                            let gv = g(x - s * cs, y - s * sn);
                            let jw = w * s * dpsi * weight;
                            for i in 0..K {
                                acc[i] += jw * gv[i];
                            }
                        }
                    }
                }
            }
        }
        Ok(acc)
    }

    /// `(f₁^ε, f₂^ε)(x, y)` by direct 2D quadrature.
    pub fn regularize_direct(&self, eps: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let v = self.mollify_direct(eps, x, y, |a, b| match eval_f(a, b) {
            Ok((f1, f2)) => [f1, f2],
            Err(_) => [0.0, 0.0],
        })?;
        Ok((v[0], v[1]))
    }

    /// Smaller eigenvalue `−|f^ε|` of `F_ε = [[f₁^ε, f₂^ε], [f₂^ε, −f₁^ε]]`.
    pub fn mu_eps(&self, eps: f64, x: f64, y: f64) -> Result<f64> {
        let (a, b) = self.regularize(eps, x, y)?;
        Ok(-a.hypot(b))
    }

    pub fn spatial_metric(&self, eps: f64, x: f64, y: f64, _z: f64) -> Result<SymForm3> {
        let (f1, f2) = self.regularize(eps, x, y)?;
        Ok(SymForm3::conical(&self.params, f1, f2))
    }

    /// `g_α^ε = −dt² + ρ^ε`.
    pub fn metric(&self, eps: f64, p: &SpacetimePoint) -> Result<SymForm4> {
        Ok(SymForm4::from_splitting(
            1.0,
            &self.spatial_metric(eps, p.x, p.y, p.z)?,
        ))
    }

    /// View of the net at a fixed `ε`.
    pub fn at(&self, eps: f64) -> Result<RegularizedMetric<'_>> {
        Self::check_eps(eps)?;
        Ok(RegularizedMetric { field: self, eps })
    }

    /// `ρ^ε(v, v) − β(v₁² + v₂²) − v₃²` at one point.
    pub fn margin(&self, eps: f64, beta: f64, p: &[f64; 3], v: &[f64; 3]) -> Result<f64> {
        let rho = self.spatial_metric(eps, p[0], p[1], p[2])?;
        Ok(rho.quad(v) - beta * (v[0] * v[0] + v[1] * v[1]) - v[2] * v[2])
    }

    /// Minimum of the lower-bound margin over random samples.
    pub fn verify_lower_bound(
        &self,
        eps: f64,
        spec: &SampleSpec,
        seed: u64,
    ) -> Result<LowerBoundReport> {
        Self::check_eps(eps)?;
        let beta = match self.beta(eps) {
            Admissibility::Admissible { beta, .. } => beta,
            Admissibility::Inadmissible {
                l1_norm,
                c_phi,
                alpha_sq,
            } => {
                return Err(Error::Precondition(format!(
                    "inadmissible pair: c_phi = {c_phi} >= alpha^2 = {alpha_sq} (l1 norm {l1_norm})"
                )))
            }
        };
        if !(spec.r_min > 0.0 && spec.r_max >= spec.r_min) {
            return Err(Error::Invalid(format!(
                "bad sampling radii [{}, {}]",
                spec.r_min, spec.r_max
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (l0, l1) = (spec.r_min.ln(), spec.r_max.ln());
        let mut best = (f64::INFINITY, [0.0; 6]);
        let unit = |rng: &mut ChaCha8Rng| loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if n2 > 1e-6 && n2 <= 1.0 {
                let n = n2.sqrt();
                break [v[0] / n, v[1] / n, v[2] / n];
            }
        };
        let mut count = 0;
        for i in 0..spec.samples {
            let p = if spec.include_axis && i % 100 == 0 {
                [0.0, 0.0, rng.random_range(-1.0..1.0)]
            } else {
                let r = eps * rng.random_range(l0..l1).exp();
                let th = rng.random_range(0.0..TAU);
                [r * th.cos(), r * th.sin(), rng.random_range(-1.0..1.0)]
            };
            let v = unit(&mut rng);
            let m = self.margin(eps, beta, &p, &v)?;
            count += 1;
            if m < best.0 {
                best = (m, [p[0], p[1], p[2], v[0], v[1], v[2]]);
            }
        }
        Ok(LowerBoundReport {
            eps,
            beta,
            min_margin: best.0,
            argmin: best.1,
            samples: count,
        })
    }

    /// Worst-case margin over the planar direction for a given point: the
    /// minimum of `ρ^ε(v, v) − β|v⊥|²` over unit `v⊥` equals `(1+α²)/2 −
    /// (1−α²)/2·|f^ε| − β`.
    pub fn planar_margin(&self, eps: f64, beta: f64, x: f64, y: f64) -> Result<f64> {
        let mu = self.mu_eps(eps, x, y)?;
        Ok(self.params.iso_coeff() + self.params.aniso_coeff() * mu - beta)
    }

    /// `max_r |R_ε(r)|` on a fine radial grid, the sup norm of `f^ε`.
    pub fn sup_norm(&self, eps: f64) -> Result<f64> {
        let n = 20_000;
        let mut m: f64 = 0.0;
        for i in 0..=n {
            let rho = 2.0 * TABLE_RADIUS * i as f64 / n as f64;
            m = m.max(self.radial_factor(eps, rho * eps)?.0.abs());
        }
        Ok(m)
    }
}

/// `g_α^ε` at fixed `ε`, usable wherever a metric field is expected.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedMetric<'a> {
    field: &'a RegularizedField,
    eps: f64,
}

impl RegularizedMetric<'_> {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn field(&self) -> &RegularizedField {
        self.field
    }
}

impl MetricField for RegularizedMetric<'_> {
    fn metric(&self, p: &SpacetimePoint) -> Result<SymForm4> {
        self.field.metric(self.eps, p)
    }
}

impl SpatialField for RegularizedMetric<'_> {
    fn spatial(&self, x: f64, y: f64, z: f64) -> Result<SymForm3> {
        self.field.spatial_metric(self.eps, x, y, z)
    }
}

/// One row of the strict-net study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetRow {
    pub eps: f64,
    pub l1_norm: f64,
    pub c_phi: f64,
    pub beta: Option<f64>,
    /// Sampled minimum margin, only for admissible `ε`.
    pub min_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetThreshold {
    pub rows: Vec<NetRow>,
    /// Largest grid `ε` below which every grid value is admissible with
    /// margin `≥ −tol`.
    pub eps_star: Option<f64>,
    /// Root of `α²(2 + ε) = ε`, i.e. `2α²/(1 − α²)` (infinite for `α = 1`).
    pub eps_analytic: f64,
}

/// Scans a grid of `ε` for the strict net and locates where the bound starts
/// to hold.
pub fn strict_net_threshold(
    params: &ConicalParams,
    eps_grid: &[f64],
    spec: &SampleSpec,
    seed: u64,
    tol: f64,
) -> Result<NetThreshold> {
    let field = RegularizedField::new(*params, Mollifier::strict_net());
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let adm = field.beta(eps);
        let l1 = field.mollifier.l1_norm(eps);
        let min_margin = if adm.is_admissible() {
            Some(field.verify_lower_bound(eps, spec, seed)?.min_margin)
        } else {
            None
        };
        rows.push(NetRow {
            eps,
            l1_norm: l1,
            c_phi: c_phi(l1),
            beta: adm.beta(),
            min_margin,
        });
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    let mut eps_star = None;
    for row in &sorted {
        match row.min_margin {
            Some(m) if m >= -tol => eps_star = Some(row.eps),
            _ => break,
        }
    }
    let a2 = params.alpha_sq();
    let eps_analytic = if a2 < 1.0 {
        2.0 * a2 / (1.0 - a2)
    } else {
        f64::INFINITY
    };
    Ok(NetThreshold {
        rows,
        eps_star,
        eps_analytic,
    })
}

/// Standard geometric schedule `ε = 2^{-k}`, `k = 0..=k_max`.
pub fn dyadic_eps(k_max: u32) -> Vec<f64> {
    (0..=k_max).map(|k| 2f64.powi(-(k as i32))).collect()
}
