//! Exact conical metric `g_α` in Cartesian and cylindrical coordinates.
//!
//! Off the axis `{x = y = 0}` the Cartesian components are smooth and bounded;
//! on the axis the metric is only an `L^∞` class, so every operation here
//! rejects axis points with [`Error::OnAxis`].

pub mod sobolev;
pub mod sweep;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use sobolev::{sobolev_probe, FieldComponent, QuadratureSpec, SobolevMass};

/// Deficit parameter `α ∈ (0, 1]`; `α = 1` is Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConicalParams {
    alpha: f64,
}

impl ConicalParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Invalid(format!(
                "deficit parameter alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn minkowski() -> Self {
        Self { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha * self.alpha
    }

    /// Isotropic coefficient `(1 + α²)/2` of `η_α`.
    pub fn iso_coeff(&self) -> f64 {
        0.5 * (1.0 + self.alpha_sq())
    }

    /// Coefficient `(1 − α²)/2` in front of the discontinuous part `h`.
    pub fn aniso_coeff(&self) -> f64 {
        0.5 * (1.0 - self.alpha_sq())
    }

    pub fn is_minkowski(&self) -> bool {
        self.alpha == 1.0
    }
}

impl TryFrom<f64> for ConicalParams {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<ConicalParams> for f64 {
    fn from(p: ConicalParams) -> f64 {
        p.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        Self::new(p[0], p[1], p[2], p[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn is_on_axis(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }
}

/// Symmetric 4×4 form on `T_p R⁴`, coordinates ordered `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymForm4(Matrix4<f64>);

/// Symmetric 3×3 form on the spatial slice, coordinates `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymForm3(Matrix3<f64>);

impl SymForm4 {
    /// Symmetrizes the input; the stored matrix is exactly symmetric.
    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Self(0.5 * (m + m.transpose()))
    }

    pub fn diag(d: [f64; 4]) -> Self {
        Self(Matrix4::from_diagonal(&Vector4::from(d)))
    }

    /// `−θ dt² + ρ` with `θ` the lapse and `ρ` the spatial block.
    pub fn from_splitting(theta: f64, spatial: &SymForm3) -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = -theta;
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(spatial.matrix());
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `g(v, v)`.
    pub fn quad(&self, v: &[f64; 4]) -> f64 {
        let v = Vector4::from(*v);
        v.dot(&(self.0 * v))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn spatial(&self) -> SymForm3 {
        SymForm3(self.0.fixed_view::<3, 3>(1, 1).into_owned())
    }

    pub fn max_abs_diff(&self, other: &SymForm4) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl std::ops::Add for SymForm4 {
    type Output = SymForm4;

    fn add(self, rhs: SymForm4) -> SymForm4 {
        SymForm4(self.0 + rhs.0)
    }
}

impl std::ops::Mul<SymForm4> for f64 {
    type Output = SymForm4;

    fn mul(self, rhs: SymForm4) -> SymForm4 {
        SymForm4(self * rhs.0)
    }
}

impl SymForm3 {
    pub fn from_matrix(m: Matrix3<f64>) -> Self {
        Self(0.5 * (m + m.transpose()))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn quad(&self, v: &[f64; 3]) -> f64 {
        let v = Vector3::from(*v);
        v.dot(&(self.0 * v))
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    /// Determinant of the `(x, y)` block.
    pub fn planar_det(&self) -> f64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    /// Builds `ρ` from the regular part `(1+α²)/2` and the two field values
    /// multiplying `(1−α²)/2`.
    pub fn conical(params: &ConicalParams, f1: f64, f2: f64) -> Self {
        let iso = params.iso_coeff();
        let an = params.aniso_coeff();
        let off = an * f2;
        Self(Matrix3::new(
            iso + an * f1,
            off,
            0.0,
            off,
            iso - an * f1,
            0.0,
            0.0,
            0.0,
            1.0,
        ))
    }
}

/// A Lorentzian metric field on `R⁴`.
pub trait MetricField {
    fn metric(&self, p: &SpacetimePoint) -> Result<SymForm4>;
}

/// A `t`-independent Riemannian metric field on the spatial slice `R³`.
pub trait SpatialField {
    fn spatial(&self, x: f64, y: f64, z: f64) -> Result<SymForm3>;
}

impl MetricField for ConicalParams {
    fn metric(&self, p: &SpacetimePoint) -> Result<SymForm4> {
        metric_cartesian(p, self)
    }
}

impl SpatialField for ConicalParams {
    fn spatial(&self, x: f64, y: f64, z: f64) -> Result<SymForm3> {
        spatial_metric(x, y, z, self)
    }
}

/// Splitting `λ = −θ dt² + ρ` with `θ ≡ 1`.
#[derive(Debug, Clone)]
pub struct MetricSplitting<S> {
    spatial: S,
}

impl<S: SpatialField> MetricSplitting<S> {
    pub fn new(spatial: S) -> Self {
        Self { spatial }
    }

    pub fn theta(&self, _p: &SpacetimePoint) -> f64 {
        1.0
    }

    pub fn spatial_field(&self) -> &S {
        &self.spatial
    }

    pub fn reassemble(&self, p: &SpacetimePoint) -> Result<SymForm4> {
        let rho = self.spatial.spatial(p.x, p.y, p.z)?;
        Ok(SymForm4::from_splitting(self.theta(p), &rho))
    }
}

impl<S: SpatialField> MetricField for MetricSplitting<S> {
    fn metric(&self, p: &SpacetimePoint) -> Result<SymForm4> {
        self.reassemble(p)
    }
}

fn check_off_axis(x: f64, y: f64) -> Result<f64> {
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return Err(Error::OnAxis { x, y });
    }
    Ok(r2)
}

/// `(f₁, f₂) = (Re, Im) (x + iy)² / (x² + y²)`.
pub fn eval_f(x: f64, y: f64) -> Result<(f64, f64)> {
    check_off_axis(x, y)?;
    // Scale first so tiny radii do not underflow in x² + y².
    let r = x.hypot(y);
    let (c, s) = (x / r, y / r);
    Ok((c * c - s * s, 2.0 * c * s))
}

pub fn metric_cartesian(p: &SpacetimePoint, params: &ConicalParams) -> Result<SymForm4> {
    let rho = spatial_metric(p.x, p.y, p.z, params)?;
    Ok(SymForm4::from_splitting(1.0, &rho))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalMetric {
    pub form: SymForm4,
    /// Set at `r = 0`, where the continuous extension loses rank.
    pub degenerate: bool,
}

/// `l_α = −dt² + dr² + α² r² dφ² + dz²` (and its continuous extension at `r = 0`).
pub fn metric_cylindrical(
    _t: f64,
    r: f64,
    _phi: f64,
    _z: f64,
    params: &ConicalParams,
) -> Result<CylindricalMetric> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!(
            "radius must be nonnegative, got {r}"
        )));
    }
    Ok(CylindricalMetric {
        form: SymForm4::diag([-1.0, 1.0, params.alpha_sq() * r * r, 1.0]),
        degenerate: r == 0.0,
    })
}

/// Max-norm of `DΦᵀ G_α(Φ(p)) DΦ − diag(−1, 1, α² r², 1)` with
/// `Φ(t, r, φ, z) = (t, r cos φ, r sin φ, z)`.
pub fn pullback_residual(t: f64, r: f64, phi: f64, z: f64, params: &ConicalParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("pullback needs r > 0, got {r}")));
    }
    let (s, c) = phi.sin_cos();
    let p = SpacetimePoint::new(t, r * c, r * s, z);
    let g = metric_cartesian(&p, params)?;
    #[rustfmt::skip]
    let jac = Matrix4::new(
        1.0, 0.0, 0.0,    0.0,
        0.0, c,   -r * s, 0.0,
        0.0, s,   r * c,  0.0,
        0.0, 0.0, 0.0,    1.0,
    );
    let pulled = jac.transpose() * g.matrix() * jac;
    let expected = metric_cylindrical(t, r, phi, z, params)?.form;
    Ok((pulled - expected.matrix()).amax())
}

/// Splitting `g_α = η_α + ((1 − α²)/2) h` into its constant and discontinuous parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonSmoothSplit {
    pub eta: SymForm4,
    pub h: SymForm4,
    pub coeff: f64,
}

impl NonSmoothSplit {
    pub fn reassemble(&self) -> SymForm4 {
        self.eta + self.coeff * self.h
    }
}

pub fn split_metric(p: &SpacetimePoint, params: &ConicalParams) -> Result<NonSmoothSplit> {
    let (f1, f2) = eval_f(p.x, p.y)?;
    let iso = params.iso_coeff();
    let eta = SymForm4::diag([-1.0, iso, iso, 1.0]);
    let mut h = Matrix4::zeros();
    h[(1, 1)] = f1;
    h[(2, 2)] = -f1;
    h[(1, 2)] = f2;
    h[(2, 1)] = f2;
    Ok(NonSmoothSplit {
        eta,
        h: SymForm4(h),
        coeff: params.aniso_coeff(),
    })
}

/// The `t`-independent spatial metric `ρ` on `R³`.
pub fn spatial_metric(x: f64, y: f64, _z: f64, params: &ConicalParams) -> Result<SymForm3> {
    let (f1, f2) = eval_f(x, y)?;
    Ok(SymForm3::conical(params, f1, f2))
}

/// `ρ(v, v) − [α² (v₁² + v₂²) + v₃²]`, nonnegative up to rounding.
pub fn lower_bound_margin(
    x: f64,
    y: f64,
    z: f64,
    v: &[f64; 3],
    params: &ConicalParams,
) -> Result<f64> {
    let rho = spatial_metric(x, y, z, params)?;
    Ok(rho.quad(v) - params.alpha_sq() * (v[0] * v[0] + v[1] * v[1]) - v[2] * v[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p(alpha: f64) -> ConicalParams {
        ConicalParams::new(alpha).unwrap()
    }

    #[test]
    fn params_reject_out_of_range() {
        for a in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(ConicalParams::new(a).is_err());
        }
        assert!(ConicalParams::new(1.0).is_ok());
    }

    #[test]
    fn eval_f_examples() {
        assert_eq!(eval_f(1.0, 0.0).unwrap(), (1.0, 0.0));
        let (a, b) = eval_f(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);
        let (a, b) = eval_f(3.0, 4.0).unwrap();
        assert_abs_diff_eq!(a, -7.0 / 25.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 24.0 / 25.0, epsilon = 1e-15);
        assert!(matches!(eval_f(0.0, 0.0), Err(Error::OnAxis { .. })));
    }

    #[test]
    fn cartesian_examples() {
        let q = SpacetimePoint::new(0.3, -0.7, 2.0, 5.0);
        let g = metric_cartesian(&q, &ConicalParams::minkowski()).unwrap();
        assert!(g.max_abs_diff(&SymForm4::diag([-1.0, 1.0, 1.0, 1.0])) < 1e-15);

        for a in [0.1, 0.5, 0.9] {
            let g = metric_cartesian(&SpacetimePoint::new(0.0, 1.0, 0.0, 0.0), &p(a)).unwrap();
            assert!(g.max_abs_diff(&SymForm4::diag([-1.0, 1.0, a * a, 1.0])) < 1e-15);
        }
        let axis = SpacetimePoint::new(1.0, 0.0, 0.0, 2.0);
        assert!(metric_cartesian(&axis, &p(0.5)).is_err());
    }

    #[test]
    fn cartesian_matches_displayed_matrix() {
        let a: f64 = 0.7;
        let (x, y) = (0.4_f64, -1.3_f64);
        let r2 = x * x + y * y;
        let g = metric_cartesian(&SpacetimePoint::new(0.0, x, y, 0.0), &p(a)).unwrap();
        assert_abs_diff_eq!(g.get(1, 1), (x * x + a * a * y * y) / r2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(2, 2), (a * a * x * x + y * y) / r2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(1, 2), (1.0 - a * a) * x * y / r2, epsilon = 1e-15);
        assert_eq!(g.get(0, 0), -1.0);
        assert_eq!(g.get(3, 3), 1.0);
    }

    #[test]
    fn cylindrical_examples() {
        let m = metric_cylindrical(0.0, 1.0, 0.3, 0.0, &p(0.5)).unwrap();
        assert_eq!(m.form, SymForm4::diag([-1.0, 1.0, 0.25, 1.0]));
        assert!(!m.degenerate);
        let m = metric_cylindrical(0.0, 0.0, 0.3, 0.0, &p(0.5)).unwrap();
        assert_eq!(m.form, SymForm4::diag([-1.0, 1.0, 0.0, 1.0]));
        assert!(m.degenerate);
        let m = metric_cylindrical(0.0, 2.0, 0.0, 0.0, &ConicalParams::minkowski()).unwrap();
        assert_eq!(m.form, SymForm4::diag([-1.0, 1.0, 4.0, 1.0]));
        assert!(metric_cylindrical(0.0, -1.0, 0.0, 0.0, &p(0.5)).is_err());
    }

    #[test]
    fn pullback_examples() {
        assert!(pullback_residual(0.0, 1.0, 0.0, 0.0, &p(0.5)).unwrap() < 1e-12);
        let r = pullback_residual(1.0, 2.0, std::f64::consts::FRAC_PI_3, -1.0, &p(0.9)).unwrap();
        assert!(r < 1e-12);
        let r = pullback_residual(0.0, 3.0, 2.5, 0.0, &ConicalParams::minkowski()).unwrap();
        assert!(r < 1e-14);
        assert!(pullback_residual(0.0, 0.0, 0.0, 0.0, &p(0.5)).is_err());
    }

    #[test]
    fn split_examples() {
        let q = SpacetimePoint::new(0.0, 0.3, -0.8, 1.0);
        let s = split_metric(&q, &p(0.4)).unwrap();
        let g = metric_cartesian(&q, &p(0.4)).unwrap();
        assert!(s.reassemble().max_abs_diff(&g) < 1e-15);
        let h2 = s.h.matrix().fixed_view::<2, 2>(1, 1).into_owned();
        let mut ev: Vec<f64> = h2.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-14);
        let s1 = split_metric(&q, &ConicalParams::minkowski()).unwrap();
        assert_eq!(s1.coeff, 0.0);
        assert!(s1.reassemble().max_abs_diff(&s1.eta) == 0.0);
    }

    #[test]
    fn spatial_examples() {
        let a = 0.6;
        let rho = spatial_metric(1.0, 0.0, 0.0, &p(a)).unwrap();
        assert_abs_diff_eq!(rho.quad(&[1.0, 0.0, 0.0]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.quad(&[0.0, 1.0, 0.0]), a * a, epsilon = 1e-15);
        let rho = spatial_metric(-2.0, 0.7, 4.0, &p(a)).unwrap();
        assert_eq!(rho.quad(&[0.0, 0.0, 1.0]), 1.0);
    }

    #[test]
    fn margin_examples() {
        let a: f64 = 0.3;
        let (x, y) = (0.8_f64, -0.6_f64);
        let r = x.hypot(y);
        let radial = [x / r, y / r, 0.0];
        let angular = [-y / r, x / r, 0.0];
        let m = lower_bound_margin(x, y, 0.0, &radial, &p(a)).unwrap();
        assert_abs_diff_eq!(m, 1.0 - a * a, epsilon = 1e-14);
        let m = lower_bound_margin(x, y, 0.0, &angular, &p(a)).unwrap();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-14);
        let m = lower_bound_margin(x, y, 0.0, &[0.3, 2.0, -1.0], &ConicalParams::minkowski());
        assert_abs_diff_eq!(m.unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn splitting_reassembles_exact_metric() {
        let params = p(0.35);
        let split = MetricSplitting::new(params);
        let q = SpacetimePoint::new(2.0, 0.1, 0.2, -3.0);
        assert_eq!(split.theta(&q), 1.0);
        let g = split.metric(&q).unwrap();
        assert!(g.max_abs_diff(&metric_cartesian(&q, &params).unwrap()) == 0.0);
    }

    fn off_axis() -> impl Strategy<Value = (f64, f64)> {
        (1e-6f64..10.0, -std::f64::consts::PI..std::f64::consts::PI)
            .prop_map(|(r, th)| (r * th.cos(), r * th.sin()))
    }

    proptest! {
        #[test]
        fn unit_modulus((x, y) in off_axis()) {
            let (f1, f2) = eval_f(x, y).unwrap();
            prop_assert!((f1 * f1 + f2 * f2 - 1.0).abs() < 1e-14);
        }

        #[test]
        fn spectrum_is_fixed((x, y) in off_axis(), k in 1u32..10) {
            let a = k as f64 / 10.0;
            let ev = metric_cartesian(&SpacetimePoint::new(0.0, x, y, 0.0), &p(a)).unwrap().eigenvalues();
            let expected = [-1.0, a * a, 1.0, 1.0];
            for (e, w) in ev.iter().zip(expected) {
                prop_assert!((e - w).abs() < 1e-10);
            }
        }

        #[test]
        fn planar_determinant_is_alpha_sq((x, y) in off_axis(), a in 0.01f64..=1.0) {
            let rho = spatial_metric(x, y, 0.0, &p(a)).unwrap();
            prop_assert!((rho.planar_det() - a * a).abs() < 1e-12);
        }

        #[test]
        fn margin_nonnegative((x, y) in off_axis(), a in 0.01f64..=1.0,
                              v in prop::array::uniform3(-5.0f64..5.0)) {
            prop_assert!(lower_bound_margin(x, y, 0.0, &v, &p(a)).unwrap() >= -1e-12);
        }

        #[test]
        fn pullback_identity(r in 1e-3f64..50.0, phi in -PI..PI, a in 0.01f64..=1.0) {
            prop_assert!(pullback_residual(0.0, r, phi, 0.0, &p(a)).unwrap() < 1e-12 * r.max(1.0).powi(2));
        }
    }
}
